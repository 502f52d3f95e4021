//! Python bindings: the main types and operations of the passage-time
//! toolkit, close to the Rust API but with plain lists for points.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use efpp_core::estimators::{run_grid, MeasureSpec, ReplicateRecord, ScaleFunction};
use efpp_core::geodesic::{self, GeodesicSolver};
use efpp_core::geometry::{self, derive_constants, BoxRegion, Point, RotationMap, Segment};
use efpp_core::poisson::{self, SeedPolicy};

fn to_value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_runtime_err(e: impl std::fmt::Display) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

fn point_from(coords: Vec<f64>) -> PyResult<Point> {
    Point::new(coords).map_err(to_value_err)
}

/// Model constants derived from (d, alpha, kappa3).
#[pyclass(name = "ModelParams", frozen)]
#[derive(Clone)]
struct PyModelParams {
    inner: geometry::ModelParams,
}

#[pymethods]
impl PyModelParams {
    #[getter]
    fn d(&self) -> usize {
        self.inner.d
    }
    #[getter]
    fn alpha(&self) -> f64 {
        self.inner.alpha
    }
    #[getter]
    fn kappa1(&self) -> f64 {
        self.inner.kappa1
    }
    #[getter]
    fn kappa2(&self) -> f64 {
        self.inner.kappa2
    }
    #[getter]
    fn kappa3(&self) -> f64 {
        self.inner.kappa3
    }
    #[getter]
    fn gamma(&self) -> f64 {
        self.inner.gamma
    }
    #[getter]
    fn beta(&self) -> f64 {
        self.inner.beta
    }
    #[getter]
    fn eta(&self) -> f64 {
        self.inner.eta
    }

    fn __repr__(&self) -> String {
        format!(
            "ModelParams(d={}, alpha={}, kappa1={}, kappa2={}, kappa3={}, gamma={}, beta={}, eta={})",
            self.inner.d,
            self.inner.alpha,
            self.inner.kappa1,
            self.inner.kappa2,
            self.inner.kappa3,
            self.inner.gamma,
            self.inner.beta,
            self.inner.eta
        )
    }
}

/// Seeded Poisson point sample in an axis-aligned box.
#[pyclass(name = "PoissonSample", frozen)]
struct PySample {
    inner: poisson::PoissonSample,
}

#[pymethods]
impl PySample {
    /// Draw a sample in the box [lo, hi] at the given intensity.
    #[staticmethod]
    #[pyo3(signature = (lo, hi, intensity, seed, replicate=0))]
    fn sample(
        lo: Vec<f64>,
        hi: Vec<f64>,
        intensity: f64,
        seed: u64,
        replicate: u64,
    ) -> PyResult<Self> {
        let lo = point_from(lo)?;
        let hi = point_from(hi)?;
        let bounds = BoxRegion::from_corners(&lo, &hi).map_err(to_value_err)?;
        let sample = poisson::sample_poisson(&bounds, intensity, SeedPolicy::new(seed, replicate))
            .map_err(to_runtime_err)?;
        Ok(PySample { inner: sample })
    }

    /// Build a sample from explicit points inside the box [lo, hi].
    #[staticmethod]
    fn from_points(points: Vec<Vec<f64>>, lo: Vec<f64>, hi: Vec<f64>) -> PyResult<Self> {
        let lo = point_from(lo)?;
        let hi = point_from(hi)?;
        let bounds = BoxRegion::from_corners(&lo, &hi).map_err(to_value_err)?;
        let pts: Vec<Point> = points
            .into_iter()
            .map(point_from)
            .collect::<PyResult<_>>()?;
        let sample =
            poisson::PoissonSample::from_points(&pts, bounds, 1.0, 0).map_err(to_value_err)?;
        Ok(PySample { inner: sample })
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed()
    }

    fn points(&self) -> Vec<Vec<f64>> {
        (0..self.inner.len())
            .map(|i| self.inner.coords_of(i).to_vec())
            .collect()
    }

    /// The sample point nearest to x (ties toward smaller coordinates).
    fn nearest_point(&self, x: Vec<f64>) -> PyResult<Vec<f64>> {
        let p = self
            .inner
            .nearest_point(&point_from(x)?)
            .map_err(to_value_err)?;
        Ok(p.coords().to_vec())
    }

    /// All sample points within `radius` of `center`.
    fn ball_query(&self, center: Vec<f64>, radius: f64) -> PyResult<Vec<Vec<f64>>> {
        let pts = self.inner.ball_query(&point_from(center)?, radius);
        Ok(pts.into_iter().map(|p| p.coords().to_vec()).collect())
    }
}

/// An optimal path between the entry points nearest to the endpoints.
#[pyclass(name = "Geodesic", frozen)]
struct PyGeodesic {
    #[pyo3(get)]
    total: f64,
    #[pyo3(get)]
    max_edge: f64,
    #[pyo3(get)]
    touched_boundary: bool,
    path: Vec<Vec<f64>>,
}

#[pymethods]
impl PyGeodesic {
    #[getter]
    fn path(&self) -> Vec<Vec<f64>> {
        self.path.clone()
    }

    fn __repr__(&self) -> String {
        format!(
            "Geodesic(total={}, hops={}, max_edge={})",
            self.total,
            self.path.len(),
            self.max_edge
        )
    }
}

#[pyfunction]
#[pyo3(name = "derive_constants")]
fn py_derive_constants(d: usize, alpha: f64, kappa3: f64) -> PyResult<PyModelParams> {
    derive_constants(d, alpha, kappa3)
        .map(|inner| PyModelParams { inner })
        .map_err(to_value_err)
}

#[pyfunction]
#[pyo3(name = "iterated_log")]
fn py_iterated_log(k: u32, x: f64) -> PyResult<f64> {
    geometry::iterated_log(k, x).map_err(to_value_err)
}

#[pyfunction]
#[pyo3(name = "theta")]
fn py_theta(x: Vec<f64>) -> PyResult<f64> {
    geometry::theta(&point_from(x)?).map_err(to_value_err)
}

#[pyfunction]
#[pyo3(name = "rotation_containment_factor")]
fn py_rotation_containment_factor(a: f64, b: f64, theta: f64) -> f64 {
    geometry::rotation_containment_factor(a, b, theta)
}

/// Rotate e1 onto `target` and apply the rotation to `x`.
#[pyfunction]
#[pyo3(name = "rotate_from_e1")]
fn py_rotate_from_e1(target: Vec<f64>, x: Vec<f64>) -> PyResult<Vec<f64>> {
    let rot = RotationMap::rotate_e1_to(&point_from(target)?).map_err(to_value_err)?;
    Ok(rot.apply(&point_from(x)?).coords().to_vec())
}

#[pyfunction]
#[pyo3(name = "path_time")]
fn py_path_time(path: Vec<Vec<f64>>, alpha: f64) -> PyResult<f64> {
    let pts: Vec<Point> = path.into_iter().map(point_from).collect::<PyResult<_>>()?;
    geodesic::path_time(&pts, alpha).map_err(to_value_err)
}

#[pyfunction]
#[pyo3(name = "dist_max")]
fn py_dist_max(points: Vec<Vec<f64>>, seg_a: Vec<f64>, seg_b: Vec<f64>) -> PyResult<Option<f64>> {
    let pts: Vec<Point> = points
        .into_iter()
        .map(point_from)
        .collect::<PyResult<_>>()?;
    let seg = Segment::new(point_from(seg_a)?, point_from(seg_b)?);
    Ok(geometry::dist_max(&pts, &seg))
}

#[pyfunction]
#[pyo3(name = "geodesic")]
fn py_geodesic(sample: &PySample, x: Vec<f64>, y: Vec<f64>, alpha: f64) -> PyResult<PyGeodesic> {
    let mut solver = GeodesicSolver::new(&sample.inner, alpha).map_err(to_value_err)?;
    let geo = solver
        .solve(&point_from(x)?, &point_from(y)?)
        .map_err(to_runtime_err)?;
    Ok(PyGeodesic {
        total: geo.total,
        max_edge: geo.max_edge,
        touched_boundary: geo.touched_boundary,
        path: geo.path.iter().map(|p| p.coords().to_vec()).collect(),
    })
}

#[pyfunction]
#[pyo3(name = "brute_force_geodesic")]
fn py_brute_force_geodesic(
    sample: &PySample,
    x: Vec<f64>,
    y: Vec<f64>,
    alpha: f64,
) -> PyResult<PyGeodesic> {
    let geo =
        geodesic::brute_force_geodesic(&sample.inner, &point_from(x)?, &point_from(y)?, alpha)
            .map_err(to_runtime_err)?;
    Ok(PyGeodesic {
        total: geo.total,
        max_edge: geo.max_edge,
        touched_boundary: geo.touched_boundary,
        path: geo.path.iter().map(|p| p.coords().to_vec()).collect(),
    })
}

fn record_to_dict<'py>(py: Python<'py>, rec: &ReplicateRecord) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new_bound(py);
    d.set_item("n", rec.n)?;
    d.set_item("replicate_index", rec.replicate_index)?;
    d.set_item("seed", rec.seed)?;
    d.set_item("t_n", rec.t_n)?;
    d.set_item("wandering", rec.wandering)?;
    let slab = PyDict::new_bound(py);
    for (lambda, value) in &rec.slab {
        slab.set_item(lambda, value)?;
    }
    d.set_item("slab", slab)?;
    let flags = PyList::new_bound(py, rec.flags.as_strings());
    d.set_item("flags", flags)?;
    Ok(d)
}

/// Run replicate measurements of T(0, n e1) and return one dict per
/// replicate, mirroring the records.jsonl schema.
#[pyfunction]
#[pyo3(signature = (n_grid, replicates, master_seed, d=2, alpha=1.5, kappa3=0.4, k=1, intensity=1.0))]
#[allow(clippy::too_many_arguments)]
fn measure_records(
    py: Python<'_>,
    n_grid: Vec<u64>,
    replicates: u64,
    master_seed: u64,
    d: usize,
    alpha: f64,
    kappa3: f64,
    k: u32,
    intensity: f64,
) -> PyResult<Vec<Py<PyDict>>> {
    let params = derive_constants(d, alpha, kappa3).map_err(to_value_err)?;
    let mut spec = MeasureSpec::new(params, ScaleFunction::sqrt(), k);
    spec.intensity = intensity;
    let records = py.allow_threads(|| run_grid(&spec, &n_grid, replicates, master_seed));
    records
        .iter()
        .map(|rec| record_to_dict(py, rec).map(|d| d.unbind()))
        .collect()
}

#[pymodule]
fn efpp(_py: Python<'_>, m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyModelParams>()?;
    m.add_class::<PySample>()?;
    m.add_class::<PyGeodesic>()?;
    m.add_function(wrap_pyfunction!(py_derive_constants, m)?)?;
    m.add_function(wrap_pyfunction!(py_iterated_log, m)?)?;
    m.add_function(wrap_pyfunction!(py_theta, m)?)?;
    m.add_function(wrap_pyfunction!(py_rotation_containment_factor, m)?)?;
    m.add_function(wrap_pyfunction!(py_rotate_from_e1, m)?)?;
    m.add_function(wrap_pyfunction!(py_path_time, m)?)?;
    m.add_function(wrap_pyfunction!(py_dist_max, m)?)?;
    m.add_function(wrap_pyfunction!(py_geodesic, m)?)?;
    m.add_function(wrap_pyfunction!(py_brute_force_geodesic, m)?)?;
    m.add_function(wrap_pyfunction!(measure_records, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
