//! Python bindings: receiver configurations, forward maps, inversion and
//! classification for the range and range-difference models.

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use rangeloc_core::kummer::{gaussian_curvature, nodes_and_tropes, quartic_residual, NodeKind};
use rangeloc_core::params::{abc_from_config, cayley_residual, config_from_param, ParamPoint};
use rangeloc_core::sim::{gen_noisy_toa, NoiseSpec};
use rangeloc_core::tdoa::{classify_tau, invert_tdoa, invert_tdoa_collinear, project_pi, tau_map, Fiber};
use rangeloc_core::toa2::{forward2, invert2};
use rangeloc_core::toa3::{classify3, forward3, invert3, invert3_collinear, Feasibility};
use rangeloc_core::toa3d::{forward3d, invert3d_r2, invert3d_r3, invert3d_r3_collinear, SolutionSet3D};
use rangeloc_core::{GeoError, PseudorangePair, RangePair, RangeTriple, SolutionSet, Vec2, Vec3};

create_exception!(rangeloc, GeometryError, PyValueError);

fn err(e: GeoError) -> PyErr {
    GeometryError::new_err(format!("{}: {e}", e.kind()))
}

fn vec2(p: &[f64]) -> PyResult<Vec2> {
    match p {
        [x, y] => Ok(Vec2::new(*x, *y)),
        _ => Err(PyValueError::new_err("expected a point with 2 coordinates")),
    }
}

fn vec3(p: &[f64]) -> PyResult<Vec3> {
    match p {
        [x, y] => Ok(Vec3::new(*x, *y, 0.0)),
        [x, y, z] => Ok(Vec3::new(*x, *y, *z)),
        _ => Err(PyValueError::new_err("expected a point with 2 or 3 coordinates")),
    }
}

fn points(sol: SolutionSet) -> Vec<(f64, f64)> {
    sol.points().iter().map(|p| (p.x, p.y)).collect()
}

/// Validated receiver positions.
#[pyclass(name = "SensorConfig", module = "rangeloc", frozen)]
#[derive(Clone)]
struct PyConfig {
    inner: rangeloc_core::SensorConfig,
}

#[pymethods]
impl PyConfig {
    #[new]
    #[pyo3(signature = (receivers, dimension=None))]
    fn new(receivers: Vec<Vec<f64>>, dimension: Option<usize>) -> PyResult<Self> {
        let inner = rangeloc_core::SensorConfig::validate(dimension, &receivers).map_err(err)?;
        Ok(PyConfig { inner })
    }

    #[getter]
    fn receivers(&self) -> Vec<Vec<f64>> {
        let dim = self.inner.dimension().as_usize();
        self.inner.receivers().iter().map(|m| m.to_array()[..dim].to_vec()).collect()
    }

    #[getter]
    fn dimension(&self) -> usize {
        self.inner.dimension().as_usize()
    }

    #[getter]
    fn class_name(&self) -> &'static str {
        self.inner.class().name()
    }

    #[getter]
    fn d_max(&self) -> f64 {
        self.inner.d_max()
    }

    #[getter]
    fn rho(&self) -> Option<f64> {
        self.inner.rho()
    }

    fn is_collinear(&self) -> bool {
        self.inner.is_collinear()
    }

    /// Distance between receivers `i` and `j` (0-based).
    fn d(&self, i: usize, j: usize) -> PyResult<f64> {
        if i >= self.inner.len() || j >= self.inner.len() {
            return Err(PyValueError::new_err("receiver index out of range"));
        }
        Ok(self.inner.d(i, j))
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("SensorConfig({:?}, class={})", self.receivers(), self.class_name())
    }
}

/// Ranges from `x` to every receiver.
#[pyfunction]
fn forward(config: &PyConfig, x: Vec<f64>) -> PyResult<Vec<f64>> {
    let c = &config.inner;
    match (c.dimension().as_usize(), c.len()) {
        (2, 2) => Ok(forward2(c, vec2(&x)?).map_err(err)?.to_array().to_vec()),
        (2, _) => Ok(forward3(c, vec2(&x)?).map_err(err)?.to_array().to_vec()),
        _ => forward3d(c, vec3(&x)?).map_err(err),
    }
}

/// Sources with the given ranges: a list of points, or a dict describing a circle.
#[pyfunction]
fn localize_toa(py: Python<'_>, config: &PyConfig, toa: Vec<f64>) -> PyResult<PyObject> {
    let c = &config.inner;
    if toa.len() != c.len() {
        return Err(PyValueError::new_err(format!("expected {} ranges", c.len())));
    }
    if c.dimension().as_usize() == 2 {
        let sol = if toa.len() == 2 {
            invert2(c, RangePair::new(toa[0], toa[1]))
        } else {
            let t = RangeTriple::new(toa[0], toa[1], toa[2]);
            if c.is_collinear() {
                invert3_collinear(c, t)
            } else {
                invert3(c, t)
            }
        }
        .map_err(err)?;
        return Ok(points(sol).into_pyobject(py)?.into_any().unbind());
    }
    let sol = if toa.len() == 2 {
        invert3d_r2(c, RangePair::new(toa[0], toa[1]))
    } else {
        let t = RangeTriple::new(toa[0], toa[1], toa[2]);
        if c.is_collinear() {
            invert3d_r3_collinear(c, t)
        } else {
            invert3d_r3(c, t)
        }
    }
    .map_err(err)?;
    Ok(match sol {
        SolutionSet3D::Circle { center, radius, axis, .. } => {
            let d = PyDict::new(py);
            d.set_item("center", center.to_array())?;
            d.set_item("radius", radius)?;
            d.set_item("axis", axis.to_array())?;
            d.into_any().unbind()
        }
        s => s.sample(0).iter().map(|p| p.to_array()).collect::<Vec<_>>().into_pyobject(py)?.into_any().unbind(),
    })
}

/// Feasibility of a range triple on a planar three-receiver configuration.
#[pyfunction]
fn classify_toa<'py>(py: Python<'py>, config: &PyConfig, toa: Vec<f64>) -> PyResult<Bound<'py, PyDict>> {
    let t = match toa.as_slice() {
        [a, b, c] => RangeTriple::new(*a, *b, *c),
        _ => return Err(PyValueError::new_err("expected 3 ranges")),
    };
    let r = classify3(&config.inner, t).map_err(err)?;
    let d = PyDict::new(py);
    match r.verdict {
        Feasibility::Feasible { fiber } => {
            d.set_item("verdict", "Feasible")?;
            d.set_item("fiber", fiber)?;
        }
        Feasibility::Infeasible(why) => {
            d.set_item("verdict", "Infeasible")?;
            d.set_item("reason", why.name())?;
            d.set_item("fiber", 0)?;
        }
    }
    d.set_item("in_first_octant", r.in_octant)?;
    d.set_item("surface_residual", r.surface_residual)?;
    d.set_item("surface_residual_raw", r.surface_residual_raw)?;
    d.set_item("q3_min_residual", r.q3.min_residual())?;
    Ok(d)
}

#[pyfunction]
fn quartic(config: &PyConfig, toa: (f64, f64, f64)) -> PyResult<f64> {
    quartic_residual(&config.inner, RangeTriple::new(toa.0, toa.1, toa.2)).map_err(err)
}

#[pyfunction]
fn curvature(config: &PyConfig, x: (f64, f64)) -> PyResult<f64> {
    gaussian_curvature(&config.inner, Vec2::new(x.0, x.1)).map_err(err)
}

/// Homogeneous coordinates and kinds of the sixteen nodes.
#[pyfunction]
fn nodes(config: &PyConfig) -> PyResult<Vec<([f64; 4], String)>> {
    let (n, _) = nodes_and_tropes(&config.inner).map_err(err)?;
    Ok(n.iter()
        .map(|n| {
            let kind = match n.kind {
                NodeKind::ReceiverImage(i) => format!("receiver_image{}", i + 1),
                NodeKind::Affine => "affine".into(),
                NodeKind::Ideal { principal: true } => "ideal_principal".into(),
                NodeKind::Ideal { principal: false } => "ideal".into(),
            };
            (n.coords, kind)
        })
        .collect())
}

#[pyfunction(name = "tau_map")]
fn py_tau_map(config: &PyConfig, x: (f64, f64)) -> PyResult<(f64, f64)> {
    let t = tau_map(&config.inner, Vec2::new(x.0, x.1)).map_err(err)?;
    Ok((t.tau1, t.tau2))
}

#[pyfunction(name = "project_pi")]
fn py_project_pi(toa: (f64, f64, f64)) -> (f64, f64) {
    let t = project_pi(RangeTriple::new(toa.0, toa.1, toa.2));
    (t.tau1, t.tau2)
}

#[pyfunction]
fn localize_tdoa(config: &PyConfig, tdoa: (f64, f64)) -> PyResult<Vec<(f64, f64)>> {
    let c = &config.inner;
    let tau = PseudorangePair::new(tdoa.0, tdoa.1);
    let sol = if c.is_collinear() { invert_tdoa_collinear(c, tau) } else { invert_tdoa(c, tau) };
    Ok(points(sol.map_err(err)?))
}

/// Region label and fiber size (`None` for infinitely many preimages).
#[pyfunction]
fn classify_tdoa(config: &PyConfig, tdoa: (f64, f64)) -> PyResult<(String, Option<usize>)> {
    let r = classify_tau(&config.inner, PseudorangePair::new(tdoa.0, tdoa.1)).map_err(err)?;
    let fiber = match r.fiber {
        Fiber::Finite(n) => Some(n),
        Fiber::Infinite => None,
    };
    Ok((r.label.to_string(), fiber))
}

/// `(a, b, c)` of a triangle.
#[pyfunction]
fn shape_params(config: &PyConfig) -> PyResult<(f64, f64, f64)> {
    abc_from_config(&config.inner).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (a, c, scale=1.0))]
fn triangle_from_params(a: f64, c: f64, scale: f64) -> PyResult<PyConfig> {
    let inner = config_from_param(ParamPoint::new(a, c, scale)).map_err(err)?;
    Ok(PyConfig { inner })
}

#[pyfunction(name = "cayley_residual")]
fn py_cayley_residual(a: f64, b: f64, c: f64) -> f64 {
    cayley_residual(a, b, c)
}

/// `n` noisy range vectors.
#[pyfunction]
#[pyo3(signature = (config, x, n, sigma=0.0, bias=0.0, seed=0))]
fn simulate(config: &PyConfig, x: Vec<f64>, n: usize, sigma: f64, bias: f64, seed: u64) -> PyResult<Vec<Vec<f64>>> {
    let spec = NoiseSpec::new(sigma, bias, seed).map_err(err)?;
    Ok(gen_noisy_toa(&config.inner, vec3(&x)?, spec, n).map_err(err)?.samples)
}

#[pymodule]
fn rangeloc(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyConfig>()?;
    m.add("GeometryError", m.py().get_type::<GeometryError>())?;
    m.add_function(wrap_pyfunction!(forward, m)?)?;
    m.add_function(wrap_pyfunction!(localize_toa, m)?)?;
    m.add_function(wrap_pyfunction!(classify_toa, m)?)?;
    m.add_function(wrap_pyfunction!(quartic, m)?)?;
    m.add_function(wrap_pyfunction!(curvature, m)?)?;
    m.add_function(wrap_pyfunction!(nodes, m)?)?;
    m.add_function(wrap_pyfunction!(py_tau_map, m)?)?;
    m.add_function(wrap_pyfunction!(py_project_pi, m)?)?;
    m.add_function(wrap_pyfunction!(localize_tdoa, m)?)?;
    m.add_function(wrap_pyfunction!(classify_tdoa, m)?)?;
    m.add_function(wrap_pyfunction!(shape_params, m)?)?;
    m.add_function(wrap_pyfunction!(triangle_from_params, m)?)?;
    m.add_function(wrap_pyfunction!(py_cayley_residual, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    Ok(())
}
