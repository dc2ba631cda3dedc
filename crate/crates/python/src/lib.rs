//! Python bindings for `crpoly`.
//!
//! Coordinates are lists of floats, polynomial coefficients and roots are lists
//! of Python complex numbers, and `omega` is given by its argument in radians.

use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;

use crpoly::crmap::{self, CRCoefficients, RealCoeffVector};
use crpoly::polyroots::{self, MonicPolynomial};
use crpoly::{symmetry, volume, wn_set, Complex64, Error, Tolerances};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::NumericFailure { .. } | Error::QuadratureFailure { .. } => PyArithmeticError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn omega(arg: f64) -> Complex64 {
    Complex64::from_polar(1.0, arg)
}

fn point(coords: Vec<f64>) -> PyResult<RealCoeffVector> {
    RealCoeffVector::new(coords).map_err(to_py)
}

/// Result of a membership test.
#[pyclass(frozen, get_all, module = "crpoly_py")]
pub struct Verdict {
    /// "interior", "boundary" or "exterior".
    status: String,
    unit_residual: f64,
    residual_ratio: f64,
    disc_magnitude: f64,
    /// Canonical face partition; None for exterior points.
    partition: Option<Vec<usize>>,
    diagnostic: Option<String>,
    roots: Vec<Complex64>,
}

#[pymethods]
impl Verdict {
    fn __repr__(&self) -> String {
        format!("Verdict(status={:?}, partition={:?})", self.status, self.partition)
    }
}

#[pyclass(frozen, get_all, module = "crpoly_py")]
pub struct VolumeEstimate {
    degree: usize,
    method: String,
    value: f64,
    std_error: f64,
    samples: u64,
    seed: u64,
    streams: usize,
    hit_fraction: Option<f64>,
}

#[pymethods]
impl VolumeEstimate {
    fn __repr__(&self) -> String {
        format!(
            "VolumeEstimate(method={:?}, value={}, std_error={})",
            self.method, self.value, self.std_error
        )
    }
}

impl From<volume::VolumeEstimate> for VolumeEstimate {
    fn from(e: volume::VolumeEstimate) -> Self {
        Self {
            degree: e.degree,
            method: e.method.to_string(),
            value: e.value,
            std_error: e.std_error,
            samples: e.samples,
            seed: e.seed,
            streams: e.streams,
            hit_fraction: e.hit_fraction,
        }
    }
}

/// Rows of the unitary basis matrix X_{N,omega}.
#[pyfunction]
#[pyo3(signature = (n, omega_arg = 0.0))]
fn basis(n: usize, omega_arg: f64) -> PyResult<Vec<Vec<Complex64>>> {
    Ok(crmap::build_basis(n, omega(omega_arg)).map_err(to_py)?.rows())
}

/// CR coefficients c_1..c_{N-1} of a real point.
#[pyfunction]
#[pyo3(signature = (coords, omega_arg = 0.0))]
fn real_to_cr(coords: Vec<f64>, omega_arg: f64) -> PyResult<Vec<Complex64>> {
    let a = point(coords)?;
    let x = crmap::build_basis(a.degree(), omega(omega_arg)).map_err(to_py)?;
    Ok(crmap::real_to_cr(&a, &x).map_err(to_py)?.coeffs().to_vec())
}

#[pyfunction]
#[pyo3(signature = (coeffs, omega_arg = 0.0))]
fn cr_to_real(coeffs: Vec<Complex64>, omega_arg: f64) -> PyResult<Vec<f64>> {
    let w = omega(omega_arg);
    let c = CRCoefficients::new(coeffs, w).map_err(to_py)?;
    let x = crmap::build_basis(c.degree(), w).map_err(to_py)?;
    Ok(crmap::cr_to_real(&c, &x).map_err(to_py)?.into_coords())
}

/// Roots of x^N + coeffs[0] x^{N-1} + ... + coeffs[N-1].
#[pyfunction]
fn roots(coeffs: Vec<Complex64>) -> PyResult<Vec<Complex64>> {
    polyroots::roots_from_coeffs(&MonicPolynomial::new(coeffs)).map_err(to_py)
}

/// Lower coefficients of the monic polynomial with the given roots.
#[pyfunction]
fn coeffs(roots: Vec<Complex64>) -> Vec<Complex64> {
    polyroots::coeffs_from_roots(&roots).coeffs().to_vec()
}

#[pyfunction]
fn discriminant(coeffs: Vec<Complex64>) -> PyResult<Complex64> {
    polyroots::discriminant(&MonicPolynomial::new(coeffs)).map_err(to_py)
}

fn tolerances(tol: Option<f64>, cluster_angle: Option<f64>) -> Tolerances {
    let mut t = Tolerances::default();
    if let Some(v) = tol {
        t.base = v;
    }
    if let Some(v) = cluster_angle {
        t.cluster_angle = v;
    }
    t
}

#[pyfunction]
#[pyo3(signature = (coords, tol = None, cluster_angle = None))]
fn classify(coords: Vec<f64>, tol: Option<f64>, cluster_angle: Option<f64>) -> PyResult<Verdict> {
    let v = wn_set::classify(&point(coords)?, &tolerances(tol, cluster_angle)).map_err(to_py)?;
    Ok(Verdict {
        status: v.status.to_string(),
        unit_residual: v.unit_residual,
        residual_ratio: v.residual_ratio,
        disc_magnitude: v.disc_magnitude,
        partition: v.partition.map(|p| p.canonical_form().to_vec()),
        diagnostic: v.diagnostic,
        roots: v.roots,
    })
}

/// Canonical partition of a root multiset on the unit circle.
#[pyfunction]
#[pyo3(signature = (roots, tol = None, cluster_angle = None))]
fn classify_partition(roots: Vec<Complex64>, tol: Option<f64>, cluster_angle: Option<f64>) -> PyResult<Vec<usize>> {
    let p = wn_set::classify_partition(&roots, &tolerances(tol, cluster_angle)).map_err(to_py)?;
    Ok(p.canonical_form().to_vec())
}

#[pyfunction]
fn partition_reduce(parts: Vec<usize>) -> PyResult<Vec<Vec<usize>>> {
    let p = wn_set::Partition::new(parts).map_err(to_py)?;
    Ok(wn_set::partition_reduce(&p)
        .iter()
        .map(|q| q.canonical_form().to_vec())
        .collect())
}

/// `count` seeded samples as (thetas of all N roots, coordinates).
#[pyfunction]
#[pyo3(signature = (n, count, seed = 0))]
fn sample(n: usize, count: usize, seed: u64) -> PyResult<Vec<(Vec<f64>, Vec<f64>)>> {
    let mut stream = crpoly::rng::stream(seed, 0);
    (0..count)
        .map(|_| {
            let (rv, a) = wn_set::sample_point(n, &mut stream).map_err(to_py)?;
            Ok((rv.angles(), a.into_coords()))
        })
        .collect()
}

/// Vertex v_k of W_N, the point with an N-fold root at a root of unity.
#[pyfunction]
fn vertex(n: usize, k: usize) -> PyResult<Vec<f64>> {
    Ok(symmetry::vertex(n, k).map_err(to_py)?.into_coords())
}

fn isometry_rows(m: &symmetry::IsometryMatrix) -> Vec<Vec<f64>> {
    m.matrix.row_iter().map(|r| r.iter().copied().collect()).collect()
}

/// Matrix of the rotation R acting on R^{N-1}.
#[pyfunction]
fn action_r(n: usize) -> PyResult<Vec<Vec<f64>>> {
    Ok(isometry_rows(&symmetry::action_r(n).map_err(to_py)?))
}

/// Matrix of the conjugation C acting on R^{N-1}.
#[pyfunction]
fn action_c(n: usize) -> PyResult<Vec<Vec<f64>>> {
    Ok(isometry_rows(&symmetry::action_c(n).map_err(to_py)?))
}

/// Number of distinct elements generated by R and C.
#[pyfunction]
fn dihedral_order(n: usize) -> PyResult<usize> {
    Ok(symmetry::dihedral_closure(n).map_err(to_py)?.len())
}

#[pyfunction]
#[pyo3(signature = (a1, a2, points = None))]
fn parseval(a1: Vec<f64>, a2: Vec<f64>, points: Option<usize>) -> PyResult<f64> {
    let (a1, a2) = (point(a1)?, point(a2)?);
    let points = points.unwrap_or(4 * a1.degree() + 1);
    symmetry::parseval_distance(&a1, &a2, points).map_err(to_py)
}

/// ||v_N - v_k||^2 as (direct, formula, periodic_formula).
#[pyfunction]
fn vertex_distance(n: usize, k: usize) -> PyResult<(f64, f64, f64)> {
    let d = symmetry::vertex_distance_squared(n, k).map_err(to_py)?;
    Ok((d.direct, d.formula, d.periodic_formula))
}

#[pyfunction]
fn convolution_ff(n: usize, t: f64) -> PyResult<f64> {
    symmetry::convolution_ff(n, t).map_err(to_py)
}

/// Rows (name, residual, threshold, passed) of the invariant suite.
#[pyfunction]
#[pyo3(signature = (n, seed = 0))]
fn verify(n: usize, seed: u64) -> PyResult<Vec<(String, f64, f64, bool)>> {
    let checks = symmetry::verification_suite(n, seed).map_err(to_py)?;
    Ok(checks
        .into_iter()
        .map(|c| (c.name, c.residual, c.threshold, c.passed))
        .collect())
}

/// |Jac E_{N,omega}| at the N-1 free root angles.
#[pyfunction]
#[pyo3(signature = (thetas, omega_arg = 0.0))]
fn jacobian(thetas: Vec<f64>, omega_arg: f64) -> f64 {
    volume::jacobian_abs(&thetas, omega(omega_arg))
}

/// Relative gap between the finite-difference determinant and `jacobian`.
#[pyfunction]
#[pyo3(signature = (thetas, omega_arg = 0.0, step = 1e-5))]
fn jacobian_fd_check(thetas: Vec<f64>, omega_arg: f64, step: f64) -> PyResult<f64> {
    volume::jacobian_fd_check(&thetas, omega(omega_arg), step).map_err(to_py)
}

#[pyfunction]
fn volume_closed_form(n: usize) -> PyResult<VolumeEstimate> {
    Ok(volume::volume_closed_form(n).map_err(to_py)?.into())
}

#[pyfunction]
#[pyo3(signature = (n, samples, seed = 0, streams = 1))]
fn volume_mc_jacobian(py: Python<'_>, n: usize, samples: u64, seed: u64, streams: usize) -> PyResult<VolumeEstimate> {
    let est = py.detach(|| volume::volume_mc_jacobian(n, samples, seed, streams));
    Ok(est.map_err(to_py)?.into())
}

#[pyfunction]
#[pyo3(signature = (n, samples, seed = 0, streams = 1))]
fn volume_mc_hit(py: Python<'_>, n: usize, samples: u64, seed: u64, streams: usize) -> PyResult<VolumeEstimate> {
    let est = py.detach(|| volume::volume_mc_hit(n, samples, seed, streams));
    Ok(est.map_err(to_py)?.into())
}

/// Boundary samples as (angle, point) pairs for N = 3 or 4.
#[pyfunction]
fn boundary_curve(n: usize, points: usize) -> PyResult<Vec<(f64, Vec<f64>)>> {
    let curve = volume::boundary_curve(n, points).map_err(to_py)?;
    Ok(curve
        .angles
        .into_iter()
        .zip(curve.points.into_iter().map(RealCoeffVector::into_coords))
        .collect())
}

#[pymodule]
fn crpoly_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Verdict>()?;
    m.add_class::<VolumeEstimate>()?;
    m.add_function(wrap_pyfunction!(basis, m)?)?;
    m.add_function(wrap_pyfunction!(real_to_cr, m)?)?;
    m.add_function(wrap_pyfunction!(cr_to_real, m)?)?;
    m.add_function(wrap_pyfunction!(roots, m)?)?;
    m.add_function(wrap_pyfunction!(coeffs, m)?)?;
    m.add_function(wrap_pyfunction!(discriminant, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(classify_partition, m)?)?;
    m.add_function(wrap_pyfunction!(partition_reduce, m)?)?;
    m.add_function(wrap_pyfunction!(sample, m)?)?;
    m.add_function(wrap_pyfunction!(vertex, m)?)?;
    m.add_function(wrap_pyfunction!(action_r, m)?)?;
    m.add_function(wrap_pyfunction!(action_c, m)?)?;
    m.add_function(wrap_pyfunction!(dihedral_order, m)?)?;
    m.add_function(wrap_pyfunction!(parseval, m)?)?;
    m.add_function(wrap_pyfunction!(vertex_distance, m)?)?;
    m.add_function(wrap_pyfunction!(convolution_ff, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(jacobian, m)?)?;
    m.add_function(wrap_pyfunction!(jacobian_fd_check, m)?)?;
    m.add_function(wrap_pyfunction!(volume_closed_form, m)?)?;
    m.add_function(wrap_pyfunction!(volume_mc_jacobian, m)?)?;
    m.add_function(wrap_pyfunction!(volume_mc_hit, m)?)?;
    m.add_function(wrap_pyfunction!(boundary_curve, m)?)?;
    Ok(())
}
