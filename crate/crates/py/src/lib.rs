//! Python bindings. Bodies, measures and atom measures are classes; reports
//! come back as plain dicts built from the same JSON the CLI writes.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde_json::Value;
use wbm::bodies::{self, facet_data};
use wbm::geom::{from_slice, to_vec, Vec3};
use wbm::io::{body_from_value, body_to_value, measure_from_name, parse_json, solve_report_to_value, to_value};
use wbm::minkowski::{self, SolveOptions};
use wbm::projection::{self, ShephardBound};
use wbm::suites::{self, SuiteArgs};
use wbm::{measures, surfmeas, DensitySpec, HPolytope, QuadConfig, SphericalAtomMeasure};

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn dict<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (v.to_string(),))
}

fn points(name: &str, rows: &[Vec<f64>], dim: usize) -> PyResult<Vec<Vec3>> {
    rows.iter()
        .enumerate()
        .map(|(i, r)| {
            if r.len() != dim {
                return Err(err(format!("{name}[{i}]: expected {dim} coordinates, got {}", r.len())));
            }
            Ok(from_slice(r))
        })
        .collect()
}

fn point(theta: &[f64], dim: usize) -> PyResult<Vec3> {
    Ok(points("theta", &[theta.to_vec()], dim)?[0])
}

fn cfg() -> QuadConfig {
    QuadConfig::default()
}

/// Convex polytope `{x : <u_i, x> <= h_i}` containing the origin.
#[pyclass(name = "Body", module = "wbm_py", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyBody(HPolytope);

#[pymethods]
impl PyBody {
    /// Wulff shape of support values `offsets` on unit `normals`; redundant
    /// constraints are tightened to the support function.
    #[new]
    fn new(dim: usize, normals: Vec<Vec<f64>>, offsets: Vec<f64>) -> PyResult<Self> {
        let n = points("normals", &normals, dim)?;
        bodies::wulff(dim, &n, &offsets).map(PyBody).map_err(err)
    }

    #[staticmethod]
    fn axis_box(half_widths: Vec<f64>) -> PyResult<Self> {
        bodies::axis_box(&half_widths).map(PyBody).map_err(err)
    }

    /// Zonotope `sum_i [-g_i, g_i]`; the dimension is the generator length.
    #[staticmethod]
    fn zonotope(generators: Vec<Vec<f64>>) -> PyResult<Self> {
        let dim = generators.first().map_or(0, |g| g.len());
        let g = points("generators", &generators, dim)?;
        bodies::zonotope(dim, &g).map(|z| PyBody(z.into_body())).map_err(err)
    }

    #[staticmethod]
    fn from_vertices(vertices: Vec<Vec<f64>>) -> PyResult<Self> {
        let dim = vertices.first().map_or(0, |v| v.len());
        let v = points("vertices", &vertices, dim)?;
        bodies::from_vertices(dim, &v).map(PyBody).map_err(err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        body_from_value(&parse_json(text).map_err(err)?).map(PyBody).map_err(err)
    }

    fn to_json(&self) -> String {
        body_to_value(&self.0).to_string()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    #[getter]
    fn normals(&self) -> Vec<Vec<f64>> {
        self.0.normals().iter().map(|u| to_vec(u, self.0.dim())).collect()
    }

    #[getter]
    fn offsets(&self) -> Vec<f64> {
        self.0.offsets().to_vec()
    }

    #[getter]
    fn vertices(&self) -> Vec<Vec<f64>> {
        self.0.vertices().iter().map(|v| to_vec(v, self.0.dim())).collect()
    }

    #[getter]
    fn facet_areas(&self) -> Vec<f64> {
        self.0.facet_areas().to_vec()
    }

    fn volume(&self) -> f64 {
        self.0.volume()
    }

    fn support(&self, theta: Vec<f64>) -> PyResult<f64> {
        Ok(self.0.support(&point(&theta, self.0.dim())?))
    }

    fn radial(&self, theta: Vec<f64>) -> PyResult<f64> {
        Ok(self.0.radial(&point(&theta, self.0.dim())?))
    }

    fn scaled(&self, t: f64) -> PyBody {
        PyBody(self.0.scaled(t))
    }

    fn reflected(&self) -> PyBody {
        PyBody(self.0.reflected())
    }

    fn polar(&self) -> PyBody {
        PyBody(bodies::polar(&self.0))
    }

    #[pyo3(signature = (tol = 1e-9))]
    fn is_symmetric(&self, tol: f64) -> bool {
        self.0.is_symmetric(tol)
    }

    /// `a·self + b·other`.
    #[pyo3(signature = (other, a = 1.0, b = 1.0))]
    fn minkowski_sum(&self, other: &PyBody, a: f64, b: f64) -> PyResult<PyBody> {
        bodies::minkowski_comb(&self.0, a, &other.0, b).map(PyBody).map_err(err)
    }

    /// Atoms `(u_i, |F_i|)`.
    fn facet_data(&self) -> PyAtoms {
        PyAtoms(facet_data(&self.0))
    }

    fn hausdorff(&self, other: &PyBody) -> f64 {
        bodies::hausdorff(&self.0, &other.0)
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __repr__(&self) -> String {
        format!("Body(dim={}, facets={}, vertices={})", self.0.dim(), self.0.len(), self.0.vertices().len())
    }
}

/// Finite measure on the sphere: weights at unit directions.
#[pyclass(name = "AtomMeasure", module = "wbm_py", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyAtoms(SphericalAtomMeasure);

#[pymethods]
impl PyAtoms {
    #[new]
    fn new(dim: usize, directions: Vec<Vec<f64>>, weights: Vec<f64>) -> PyResult<Self> {
        let d = points("directions", &directions, dim)?;
        SphericalAtomMeasure::new(dim, d, weights).map(PyAtoms).map_err(err)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    #[getter]
    fn directions(&self) -> Vec<Vec<f64>> {
        self.0.dirs().iter().map(|u| to_vec(u, self.0.dim())).collect()
    }

    #[getter]
    fn weights(&self) -> Vec<f64> {
        self.0.weights().to_vec()
    }

    fn total(&self) -> f64 {
        self.0.total()
    }

    /// `sum_i w_i·|<theta, u_i>|`.
    fn cosine_transform(&self, theta: Vec<f64>) -> PyResult<f64> {
        Ok(self.0.cosine_transform(&point(&theta, self.0.dim())?))
    }

    #[pyo3(signature = (tol = 1e-10))]
    fn is_even(&self, tol: f64) -> bool {
        self.0.is_even(tol)
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __repr__(&self) -> String {
        format!("AtomMeasure(dim={}, atoms={}, total={})", self.0.dim(), self.0.len(), self.0.total())
    }
}

/// Measure with `lebesgue`, `gaussian` or `power:<s>` density.
#[pyclass(name = "Measure", module = "wbm_py", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyMeasure(DensitySpec);

impl PyMeasure {
    fn checked(&self, dim: usize) -> PyResult<DensitySpec> {
        self.0.validate(dim).map_err(err)?;
        Ok(self.0)
    }
}

#[pymethods]
impl PyMeasure {
    #[new]
    fn new(name: &str) -> PyResult<Self> {
        measure_from_name(name).map(PyMeasure).map_err(err)
    }

    #[getter]
    fn name(&self) -> String {
        self.0.name()
    }

    fn mass(&self, body: &PyBody) -> PyResult<f64> {
        Ok(measures::mass(&self.checked(body.0.dim())?, &body.0, &cfg()))
    }

    /// Masses of the facets, in facet order.
    fn facet_masses(&self, body: &PyBody) -> PyResult<Vec<f64>> {
        Ok(measures::facet_mass_vector(&self.checked(body.0.dim())?, &body.0, &cfg()))
    }

    fn boundary_mass(&self, body: &PyBody) -> PyResult<f64> {
        Ok(measures::boundary_mass(&self.checked(body.0.dim())?, &body.0, &cfg()))
    }

    /// Weighted surface area measure; with `q` the `L^q` form `h^{1-q}·S`.
    #[pyo3(signature = (body, q = None))]
    fn surface_measure(&self, body: &PyBody, q: Option<f64>) -> PyResult<PyAtoms> {
        let mu = self.checked(body.0.dim())?;
        match q {
            None => Ok(PyAtoms(surfmeas::surface_measure(&mu, &body.0, &cfg()))),
            Some(q) => surfmeas::surface_measure_q(&mu, &body.0, q, &cfg()).map(PyAtoms).map_err(err),
        }
    }

    /// `mu(K, L) = sum_i h_L(u_i)·S(u_i)`, or its `L^q` form.
    #[pyo3(signature = (k, l, q = None))]
    fn mixed(&self, k: &PyBody, l: &PyBody, q: Option<f64>) -> PyResult<f64> {
        let mu = self.checked(k.0.dim())?;
        match q {
            None => Ok(surfmeas::mixed_measure(&mu, &k.0, &l.0, &cfg())),
            Some(q) => surfmeas::mixed_measure_q(&mu, &k.0, &l.0, q, &cfg()).map_err(err),
        }
    }

    fn projection_body(&self, body: &PyBody) -> PyResult<PyProjection> {
        Ok(PyProjection(projection::projection_body(&self.checked(body.0.dim())?, &body.0, &cfg())))
    }

    /// Boundary mass against the sphere integral of the projection body's
    /// support function.
    fn surface_area_identity<'py>(&self, py: Python<'py>, body: &PyBody) -> PyResult<Bound<'py, PyAny>> {
        let r = projection::surface_area_identity(&self.checked(body.0.dim())?, &body.0, &cfg());
        dict(py, &to_value(&r))
    }

    fn __repr__(&self) -> String {
        format!("Measure('{}')", self.0.name())
    }
}

/// Weighted projection body, a zonotope with generators `½·w_i·u_i`.
#[pyclass(name = "ProjectionBody", module = "wbm_py", frozen, skip_from_py_object)]
pub struct PyProjection(projection::ProjectionBody);

#[pymethods]
impl PyProjection {
    fn support(&self, theta: Vec<f64>) -> PyResult<f64> {
        Ok(self.0.support(&point(&theta, self.0.dim())?))
    }

    #[getter]
    fn generators(&self) -> Vec<Vec<f64>> {
        self.0.generators().iter().map(|g| to_vec(g, self.0.dim())).collect()
    }

    /// Exact integral of the support function over the sphere.
    fn sphere_integral(&self) -> f64 {
        self.0.sphere_integral()
    }

    /// The zonotope as a facet-described body.
    fn body(&self) -> PyResult<PyBody> {
        self.0.zonotope().map(|z| PyBody(z.into_body())).map_err(err)
    }
}

/// Solves `c·S_K = nu` (or `c·h_K^{1-q}·S_K = nu`) for a symmetric body.
#[pyfunction]
#[pyo3(signature = (measure, beta, nu, q = 1.0, tol = 1e-6, max_iters = 5000))]
fn solve<'py>(
    py: Python<'py>,
    measure: &PyMeasure,
    beta: f64,
    nu: &PyAtoms,
    q: f64,
    tol: f64,
    max_iters: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let mu = measure.checked(nu.0.dim())?;
    let opt = SolveOptions {
        tol,
        max_iters,
        ..Default::default()
    };
    let r = minkowski::solve_q(&mu, beta, &nu.0, q, &cfg(), &opt).map_err(err)?;
    let out = dict(py, &solve_report_to_value(&r))?;
    out.set_item("body", PyBody(r.body))?;
    Ok(out)
}

/// One Shephard-type bound for symmetric `k`, `l`. `p` defaults to `1/alpha`.
#[pyfunction]
#[pyo3(signature = (mu, nu, k, l, bound = "cor_q1", p = None))]
fn shephard<'py>(
    py: Python<'py>,
    mu: &PyMeasure,
    nu: &PyMeasure,
    k: &PyBody,
    l: &PyBody,
    bound: &str,
    p: Option<f64>,
) -> PyResult<Bound<'py, PyAny>> {
    let b: ShephardBound = bound.parse().map_err(err)?;
    let dim = k.0.dim();
    // Non-homogeneous measures are rejected by the check itself.
    let p = p.unwrap_or_else(|| mu.0.homogeneity(dim).map_or(1.0, |a| 1.0 / a));
    let r = projection::shephard_check(&mu.0, &nu.0, &k.0, &l.0, p, b, &cfg()).map_err(err)?;
    dict(py, &to_value(&r))
}

/// Names of the seeded property suites.
#[pyfunction]
fn suite_names() -> Vec<&'static str> {
    suites::names()
}

/// Runs one seeded property suite and returns its report.
#[pyfunction]
#[pyo3(signature = (suite, seed = 0, count = None, measure = None))]
fn verify<'py>(
    py: Python<'py>,
    suite: &str,
    seed: u64,
    count: Option<usize>,
    measure: Option<&PyMeasure>,
) -> PyResult<Bound<'py, PyAny>> {
    let s = suites::find(suite).ok_or_else(|| err(format!("unknown suite '{suite}'")))?;
    let args = SuiteArgs {
        seed,
        count,
        measure: measure.map(|m| m.0),
        ..Default::default()
    };
    let report = py.detach(|| s.run(&args));
    dict(py, &to_value(&report))
}

#[pymodule]
fn wbm_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyBody>()?;
    m.add_class::<PyAtoms>()?;
    m.add_class::<PyMeasure>()?;
    m.add_class::<PyProjection>()?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(shephard, m)?)?;
    m.add_function(wrap_pyfunction!(suite_names, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
