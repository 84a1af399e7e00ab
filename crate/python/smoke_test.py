"""Smoke test for the hardyspace extension module.

Build and install first:

    pip install --no-build-isolation ./crates/py
"""

import math

import hardyspace as hs


def close(a, b, rel):
    return abs(a - b) <= rel * abs(b)


def main():
    g = hs.Grid(-8.0, 8.0, 1.0 / 512)
    chi = hs.GridFunction.indicator(g, -1.0, 1.0)
    assert close(chi.integrate(), 2.0, 1e-12)

    hchi = hs.apply_operator(chi, "hilbert")
    assert close(hchi.value_at([3.0]), math.log(2) / math.pi, 0.02)

    one = hs.GridFunction.constant(hs.Grid(-1.0, 1.0, 1.0 / 64), 1.0)
    assert abs(hs.weight_constant(one, "ap:2") - 1.0) < 1e-12
    a2 = hs.weight_constant("power:0.5", "ap:2", hs.Grid(-1.0, 1.0, 1.0 / 64))
    assert 1.0 < a2 < 10.0

    n = hs.luxemburg(chi, "const:2")
    assert close(n, math.sqrt(2.0), 1e-10)
    nv = hs.luxemburg(chi, "log:1.5,0.5")
    assert abs(hs.modular(chi, nv, "log:1.5,0.5") - 1.0) < 1e-8

    m = hs.maximal(chi)
    assert all(a >= b - 1e-12 for a, b in zip(m.samples(), chi.samples()))

    small = hs.Grid(-4.0, 4.0, 1.0 / 64)
    a = hs.atom(small, 0.0, 1.0, 1)
    assert abs(a.integrate()) < 1e-10
    assert hs.hardy_norm(a, 0.8) > 0.0

    h = hs.GridFunction.indicator(hs.Grid(-4.0, 4.0, 1.0 / 32), -1.0, 1.0)
    rh, report = hs.rubio(h, "const:2")
    assert report["all_pass"], report
    assert all(x >= y for x, y in zip(rh.samples(), h.samples()))

    try:
        hs.Grid(0.0, 1.0, -1.0)
    except ValueError:
        pass
    else:
        raise AssertionError("negative mesh width accepted")

    print("smoke test ok")


if __name__ == "__main__":
    main()
