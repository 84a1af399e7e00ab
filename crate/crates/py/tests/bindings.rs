use pyo3::ffi::c_str;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn with_module(code: &std::ffi::CStr) -> PyResult<()> {
    Python::initialize();
    Python::attach(|py| {
        let m = pyo3::wrap_pymodule!(hardyspace::hardyspace)(py);
        let globals = PyDict::new(py);
        globals.set_item("hs", m)?;
        py.run(code, Some(&globals), None)
    })
}

#[test]
fn grid_and_functions() {
    with_module(c_str!(
        r#"
g = hs.Grid(-1.0, 1.0, 0.125)
assert g.dim == 1 and len(g) == 16 and g.shape == [16]
f = hs.GridFunction.indicator(g, 0.0, 0.5)
assert abs(f.integrate() - 0.5) < 1e-12
assert abs((2.0 * f - f).integrate() - 0.5) < 1e-12
assert len(g.refine()) == 32
"#
    ))
    .unwrap();
}

#[test]
fn invalid_input_raises_value_error() {
    with_module(c_str!(
        r#"
for bad in (lambda: hs.Grid(0.0, 1.0, -1.0),
            lambda: hs.weight_constant("power:0.5", "ap:0.5", hs.Grid(-1.0, 1.0, 0.125)),
            lambda: hs.luxemburg(hs.GridFunction.constant(hs.Grid(-1.0, 1.0, 0.125), 1.0), "nope")):
    try:
        bad()
    except ValueError:
        pass
    else:
        raise AssertionError("accepted")
"#
    ))
    .unwrap();
}

#[test]
fn norms_and_weights() {
    with_module(c_str!(
        r#"
g = hs.Grid(-1.0, 1.0, 1.0 / 64)
one = hs.GridFunction.constant(g, 1.0)
assert abs(hs.weight_constant(one, "a1") - 1.0) < 1e-12
chi = hs.GridFunction.indicator(g, 0.0, 0.5)
n = hs.luxemburg(chi, "const:2")
assert abs(n - 0.5 ** 0.5) < 1e-10
assert abs(hs.modular(chi, n, "const:2") - 1.0) < 1e-10
"#
    ))
    .unwrap();
}
