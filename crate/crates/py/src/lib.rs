//! Python bindings: grids, grid functions, weight constants, Luxemburg
//! norms, operators, atoms, the Rubio iteration and the check harness.

use std::path::PathBuf;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use hardy_core::atoms::{hardy_quasinorm, Atom, Space};
use hardy_core::grid::{Cube, GridFunction, GridSpec, MollifierSpec};
use hardy_core::harness::run_config;
use hardy_core::operators::{apply_kernel, frac_maximal, hl_maximal, KernelSpec};
use hardy_core::rubio::{check_iteration_properties, estimate_maximal_opnorm, CompositeParams, IterationConfig};
use hardy_core::varlebesgue::{luxemburg_norm, modular, ExponentSpec};
use hardy_core::weights::{CubeFamily, Weight, WeightClass, WeightSpec};
use hardy_core::Error;

fn err(e: Error) -> PyErr {
    match e {
        Error::Io(_) | Error::Csv(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// Uniform cell-centred grid on `[lo, hi]^dim`.
#[pyclass(name = "Grid", frozen, from_py_object)]
#[derive(Clone)]
struct PyGrid(GridSpec);

#[pymethods]
impl PyGrid {
    #[new]
    #[pyo3(signature = (lo, hi, h, dim = 1))]
    fn new(lo: f64, hi: f64, h: f64, dim: usize) -> PyResult<Self> {
        let g = match dim {
            1 => GridSpec::line(lo, hi, h),
            2 => GridSpec::square(lo, hi, h),
            d => return Err(PyValueError::new_err(format!("dimension {d} not supported"))),
        };
        g.map(PyGrid).map_err(err)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    #[getter]
    fn h(&self) -> f64 {
        self.0.h()
    }

    #[getter]
    fn shape(&self) -> Vec<usize> {
        self.0.shape()[..self.0.dim()].to_vec()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn refine(&self) -> Self {
        PyGrid(self.0.refine())
    }

    /// Cell centres, one `[x]` or `[x, y]` per sample.
    fn points(&self) -> Vec<Vec<f64>> {
        (0..self.0.len()).map(|k| self.0.point(k)[..self.0.dim()].to_vec()).collect()
    }

    fn __repr__(&self) -> String {
        format!("Grid(dim={}, h={}, shape={:?})", self.0.dim(), self.0.h(), self.shape())
    }
}

/// Samples of a function on a grid.
#[pyclass(name = "GridFunction", frozen, from_py_object)]
#[derive(Clone)]
struct PyFunction(GridFunction);

fn cube(grid: &GridSpec, a: f64, b: f64) -> PyResult<Cube> {
    Cube::new(&vec![a; grid.dim()], b - a).map_err(err)
}

#[pymethods]
impl PyFunction {
    #[new]
    fn new(grid: &PyGrid, samples: Vec<f64>) -> PyResult<Self> {
        GridFunction::new(grid.0.clone(), samples).map(PyFunction).map_err(err)
    }

    /// Indicator of the cube `[a, b]^dim`.
    #[staticmethod]
    fn indicator(grid: &PyGrid, a: f64, b: f64) -> PyResult<Self> {
        Ok(PyFunction(GridFunction::indicator(&grid.0, &cube(&grid.0, a, b)?)))
    }

    #[staticmethod]
    fn constant(grid: &PyGrid, c: f64) -> Self {
        PyFunction(GridFunction::constant(&grid.0, c))
    }

    #[getter]
    fn grid(&self) -> PyGrid {
        PyGrid(self.0.spec().clone())
    }

    fn samples(&self) -> Vec<f64> {
        self.0.samples().to_vec()
    }

    fn integrate(&self) -> f64 {
        self.0.integrate()
    }

    fn value_at(&self, x: Vec<f64>) -> PyResult<f64> {
        if x.len() != self.0.spec().dim() {
            return Err(PyValueError::new_err("point has the wrong dimension"));
        }
        Ok(self.0.value_at(&x))
    }

    fn __add__(&self, other: &PyFunction) -> PyResult<Self> {
        self.0.add(&other.0).map(PyFunction).map_err(err)
    }

    fn __sub__(&self, other: &PyFunction) -> PyResult<Self> {
        self.0.sub(&other.0).map(PyFunction).map_err(err)
    }

    fn __mul__(&self, c: f64) -> Self {
        PyFunction(self.0.scale(c))
    }

    fn __rmul__(&self, c: f64) -> Self {
        PyFunction(self.0.scale(c))
    }

    fn __len__(&self) -> usize {
        self.0.samples().len()
    }
}

fn parse_class(class: &str) -> PyResult<WeightClass> {
    let bad = || PyValueError::new_err(format!("weight class `{class}`"));
    let num = |v: &str| v.trim().parse::<f64>().map_err(|_| bad());
    let c = match class.split_once(':') {
        None if class == "a1" => WeightClass::A1,
        None if class == "rhinf" => WeightClass::RhInf,
        Some(("ap", p)) => WeightClass::Ap(num(p)?),
        Some(("rh", s)) => WeightClass::Rh(num(s)?),
        Some(("apq", pq)) => {
            let (p, q) = pq.split_once(',').ok_or_else(bad)?;
            WeightClass::Apq(num(p)?, num(q)?)
        }
        _ => return Err(bad()),
    };
    c.validate().map_err(err)?;
    Ok(c)
}

/// Constant of a weight in `class` (`ap:p`, `a1`, `rh:s`, `rhinf`,
/// `apq:p,q`) over the standard cube family. `weight` is either a grid
/// function or a spec string such as `power:0.5`.
#[pyfunction]
#[pyo3(signature = (weight, class_, grid = None))]
fn weight_constant(weight: &Bound<'_, PyAny>, class_: &str, grid: Option<&PyGrid>) -> PyResult<f64> {
    let w = if let Ok(f) = weight.extract::<PyFunction>() {
        Weight::new(f.0).map_err(err)?
    } else {
        let spec: String = weight.extract()?;
        let g = grid.ok_or_else(|| PyValueError::new_err("a grid is needed for a weight spec"))?;
        WeightSpec::parse(&spec).and_then(|s| s.sample(&g.0)).map_err(err)?
    };
    w.constant(parse_class(class_)?, &CubeFamily::standard(w.spec())).map_err(err)
}

/// Luxemburg norm of `f` in `L^{p(·)}`; `exponent` is a spec such as
/// `const:2` or `log:1.5,0.5`.
#[pyfunction]
fn luxemburg(f: &PyFunction, exponent: &str) -> PyResult<f64> {
    let p = ExponentSpec::parse(exponent).and_then(|s| s.sample(f.0.spec())).map_err(err)?;
    luxemburg_norm(&f.0, &p).map_err(err)
}

/// Modular `∫ |f/λ|^{p(x)} dx`.
#[pyfunction]
#[pyo3(name = "modular")]
fn py_modular(f: &PyFunction, lam: f64, exponent: &str) -> PyResult<f64> {
    let p = ExponentSpec::parse(exponent).and_then(|s| s.sample(f.0.spec())).map_err(err)?;
    modular(&f.0, lam, &p).map_err(err)
}

/// Hardy-Littlewood maximal function, or the fractional one when
/// `alpha > 0`.
#[pyfunction]
#[pyo3(signature = (f, alpha = 0.0))]
fn maximal(f: &PyFunction, alpha: f64) -> PyResult<PyFunction> {
    if alpha == 0.0 {
        Ok(PyFunction(hl_maximal(&f.0)))
    } else {
        frac_maximal(&f.0, alpha).map(PyFunction).map_err(err)
    }
}

/// Applies a kernel given by name: `hilbert`, `riesz:j`, `power:α`,
/// `nonconv-hilbert`.
#[pyfunction]
fn apply_operator(f: &PyFunction, kernel: &str) -> PyResult<PyFunction> {
    let k = KernelSpec::parse(kernel).map_err(err)?;
    apply_kernel(&f.0, &k).map(PyFunction).map_err(err)
}

/// Atom on `[a, b]^dim` with vanishing moments up to `order`, built from
/// the profile `u^(order+1)` in the first coordinate.
#[pyfunction]
fn atom(grid: &PyGrid, a: f64, b: f64, order: i32) -> PyResult<PyFunction> {
    let q = cube(&grid.0, a, b)?;
    let raw = GridFunction::from_fn(&grid.0, |x| {
        let u = (x[0] - q.center()[0]) / q.side();
        if q.contains(&x[..grid.0.dim()]) {
            u.powi(order + 1)
        } else {
            0.0
        }
    })
    .map_err(err)?;
    let a = Atom::new(&raw, q, order).map_err(err)?;
    Ok(PyFunction(a.samples().clone()))
}

/// Unweighted `H^p` quasi-norm through the radial maximal function.
#[pyfunction]
fn hardy_norm(f: &PyFunction, p: f64) -> PyResult<f64> {
    let phi = MollifierSpec::for_grid(f.0.spec());
    hardy_quasinorm(&f.0, &phi, &Space::unweighted(f.0.spec(), p)).map_err(err)
}

/// Rubio de Francia iteration of a nonnegative `h` in `L^{r(·)}`.
/// Returns `(Rh, report)` with the checked properties in a dict.
#[pyfunction]
#[pyo3(signature = (h, exponent = "const:2", witnesses = 100, seed = 0))]
fn rubio<'py>(
    py: Python<'py>,
    h: &PyFunction,
    exponent: &str,
    witnesses: usize,
    seed: u64,
) -> PyResult<(PyFunction, Bound<'py, pyo3::types::PyDict>)> {
    let r = ExponentSpec::parse(exponent).and_then(|s| s.sample(h.0.spec())).map_err(err)?;
    let est = estimate_maximal_opnorm(&r, witnesses, seed).map_err(err)?;
    let cfg = IterationConfig::new(est.b).map_err(err)?;
    let rh = hardy_core::rubio::iterate(&h.0, &cfg).map_err(err)?;
    let rep = check_iteration_properties(&h.0, &cfg, &r, &CubeFamily::standard(h.0.spec()), &CompositeParams::default())
        .map_err(err)?;
    let d = pyo3::types::PyDict::new(py);
    d.set_item("b", est.b)?;
    d.set_item("dominates", rep.dominates)?;
    d.set_item("norm_ratio", rep.norm_ratio)?;
    d.set_item("norm_bound", rep.norm_bound)?;
    d.set_item("a1", rep.a1)?;
    d.set_item("a1_bound", rep.a1_bound)?;
    d.set_item("all_pass", rep.all_pass())?;
    Ok((PyFunction(rh), d))
}

/// Runs a TOML check config, writes reports into `out` and returns
/// `(name, verdict)` pairs.
#[pyfunction]
fn run_checks(config: PathBuf, out: PathBuf) -> PyResult<Vec<(String, String)>> {
    let reports = run_config(&config, &out).map_err(err)?;
    Ok(reports
        .into_iter()
        .map(|(name, r)| (name, r.verdict.to_string()))
        .collect())
}

#[pymodule]
pub fn hardyspace(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGrid>()?;
    m.add_class::<PyFunction>()?;
    m.add_function(wrap_pyfunction!(weight_constant, m)?)?;
    m.add_function(wrap_pyfunction!(luxemburg, m)?)?;
    m.add_function(wrap_pyfunction!(py_modular, m)?)?;
    m.add_function(wrap_pyfunction!(maximal, m)?)?;
    m.add_function(wrap_pyfunction!(apply_operator, m)?)?;
    m.add_function(wrap_pyfunction!(atom, m)?)?;
    m.add_function(wrap_pyfunction!(hardy_norm, m)?)?;
    m.add_function(wrap_pyfunction!(rubio, m)?)?;
    m.add_function(wrap_pyfunction!(run_checks, m)?)?;
    Ok(())
}
