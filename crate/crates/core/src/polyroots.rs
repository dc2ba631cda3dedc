//! Roots <-> coefficients for monic complex polynomials, a simultaneous
//! root finder, and discriminants.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

use crate::{Error, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Aberth sweeps before falling back to companion eigenvalues.
pub const MAX_SWEEPS: usize = 200;
/// A root is frozen once its update falls below `UPDATE_TOL * (1 + |z|)`.
pub const UPDATE_TOL: f64 = 1e-14;
/// Accepted residual `|p(z)| <= RESIDUAL_TOL * (1 + ||c||) * max(1, |z|)^N`.
pub const RESIDUAL_TOL: f64 = 1e-8;

/// `x^N + coeffs[0] x^{N-1} + ... + coeffs[N-1]`; the leading one is implicit.
#[derive(Debug, Clone, PartialEq)]
pub struct MonicPolynomial {
    coeffs: Vec<Complex64>,
}

impl MonicPolynomial {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self {
            coeffs: coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect(),
        }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    /// Coefficients of `x^{N-1}, ..., x^0`.
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// All `N + 1` coefficients, leading one first.
    pub fn full_coeffs(&self) -> Vec<Complex64> {
        std::iter::once(ONE).chain(self.coeffs.iter().copied()).collect()
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().fold(ONE, |acc, &c| acc * z + c)
    }

    /// `(p(z), p'(z))` by Horner.
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut p = ONE;
        let mut dp = ZERO;
        for &c in &self.coeffs {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    /// Euclidean norm of the non-leading coefficients.
    pub fn coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `max_k |c_k|^{1/k}`-style bound: every root satisfies `|z| <= bound`.
    pub fn root_bound(&self) -> f64 {
        let n = self.degree();
        let mut bound = 0.0f64;
        for (k, c) in self.coeffs.iter().enumerate() {
            let power = (k + 1) as f64;
            let magnitude = if k + 1 == n { c.norm() / 2.0 } else { c.norm() };
            bound = bound.max(magnitude.powf(1.0 / power));
        }
        2.0 * bound
    }

    fn residual_scale(&self, z: Complex64) -> f64 {
        (1.0 + self.coeff_norm()) * z.norm().max(1.0).powi(self.degree() as i32)
    }

    /// `|p(z)|` divided by the accepted scale; `<= RESIDUAL_TOL` means accepted.
    pub fn scaled_residual(&self, z: Complex64) -> f64 {
        self.eval(z).norm() / self.residual_scale(z)
    }
}

/// `N` complex roots together with the `omega` of the constraint
/// `xi_1 ... xi_N = (-1)^N omega`.
#[derive(Debug, Clone, PartialEq)]
pub struct RootVector {
    roots: Vec<Complex64>,
    omega: Complex64,
}

impl RootVector {
    pub fn new(roots: Vec<Complex64>, omega: Complex64) -> Self {
        Self { roots, omega }
    }

    /// Roots `e^{i theta_n}` for `n < N` plus the root forced by the product
    /// constraint.
    pub fn from_angles(thetas: &[f64], omega: Complex64) -> Self {
        let n = thetas.len() + 1;
        let mut roots: Vec<Complex64> = thetas.iter().map(|&t| Complex64::from_polar(1.0, t)).collect();
        let product: Complex64 = roots.iter().product();
        roots.push(sign_power(n) * omega / product);
        Self { roots, omega }
    }

    pub fn degree(&self) -> usize {
        self.roots.len()
    }

    pub fn roots(&self) -> &[Complex64] {
        &self.roots
    }

    pub fn omega(&self) -> Complex64 {
        self.omega
    }

    /// Arguments of the roots in `[0, 2 pi)`.
    pub fn angles(&self) -> Vec<f64> {
        self.roots.iter().map(|z| z.arg().rem_euclid(2.0 * PI)).collect()
    }

    /// `|prod xi_n - (-1)^N omega|`.
    pub fn product_residual(&self) -> f64 {
        let product: Complex64 = self.roots.iter().product();
        (product - sign_power(self.degree()) * self.omega).norm()
    }

    pub fn unit_residual(&self) -> f64 {
        unit_circle_residual(&self.roots)
    }

    pub fn to_polynomial(&self) -> MonicPolynomial {
        coeffs_from_roots(&self.roots)
    }
}

/// `(-1)^n` as a complex number.
pub(crate) fn sign_power(n: usize) -> Complex64 {
    if n.is_multiple_of(2) {
        ONE
    } else {
        -ONE
    }
}

/// Expand `prod (x - r_n)` by multiplying in one linear factor at a time.
pub fn coeffs_from_roots(roots: &[Complex64]) -> MonicPolynomial {
    let mut full = vec![ONE];
    for &r in roots {
        full.push(ZERO);
        for k in (1..full.len()).rev() {
            let prev = full[k - 1];
            full[k] -= r * prev;
        }
    }
    full.remove(0);
    MonicPolynomial::new(full)
}

/// `max_n | |z_n| - 1 |`.
pub fn unit_circle_residual(roots: &[Complex64]) -> f64 {
    roots.iter().map(|z| (z.norm() - 1.0).abs()).fold(0.0, f64::max)
}

/// All `N` roots, with multiplicity.
///
/// Aberth–Ehrlich iteration from a circle just outside the root bound; if some
/// root has not settled after [`MAX_SWEEPS`] sweeps the companion matrix
/// eigenvalues are computed as well and the set with the smaller residual is
/// kept.
pub fn roots_from_coeffs(p: &MonicPolynomial) -> Result<Vec<Complex64>> {
    if p.coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    let n = p.degree();
    match n {
        0 => return Ok(Vec::new()),
        1 => return Ok(vec![-p.coeffs[0]]),
        _ => {}
    }

    let (aberth_roots, converged) = aberth(p);
    let aberth_worst = max_residual(p, &aberth_roots);
    if converged && aberth_worst <= RESIDUAL_TOL {
        return Ok(aberth_roots);
    }

    let (best, worst) = match companion_roots(p) {
        Some(eig) => {
            let eig_worst = max_residual(p, &eig);
            if eig_worst < aberth_worst {
                (eig, eig_worst)
            } else {
                (aberth_roots, aberth_worst)
            }
        }
        None => (aberth_roots, aberth_worst),
    };
    if worst <= RESIDUAL_TOL {
        let polished = polish_clusters(p, &best);
        if max_residual(p, &polished) <= RESIDUAL_TOL {
            return Ok(polished);
        }
        return Ok(best);
    }
    let residuals = best.iter().map(|&z| p.scaled_residual(z)).collect();
    Err(Error::NumericFailure {
        best,
        residuals,
        max_residual: worst,
    })
}

/// Roots of many polynomials, evaluated in parallel.
pub fn roots_batch(polys: &[MonicPolynomial]) -> Vec<Result<Vec<Complex64>>> {
    polys.par_iter().map(roots_from_coeffs).collect()
}

fn max_residual(p: &MonicPolynomial, roots: &[Complex64]) -> f64 {
    roots.iter().map(|&z| p.scaled_residual(z)).fold(0.0, f64::max)
}

fn aberth(p: &MonicPolynomial) -> (Vec<Complex64>, bool) {
    let n = p.degree();
    let radius = 1.05 * p.root_bound().max(1e-3);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius, 2.0 * PI * k as f64 / n as f64 + 0.4))
        .collect();
    let mut frozen = vec![false; n];

    for _ in 0..MAX_SWEEPS {
        for k in 0..n {
            if frozen[k] {
                continue;
            }
            let (value, slope) = p.eval_with_derivative(z[k]);
            if value == ZERO {
                frozen[k] = true;
                continue;
            }
            let repulsion: Complex64 = (0..n).filter(|&j| j != k).map(|j| (z[k] - z[j]).inv()).sum();
            let newton = value / slope;
            let mut step = newton / (ONE - newton * repulsion);
            if !step.re.is_finite() || !step.im.is_finite() {
                // Stationary point or coincident iterates: nudge and retry next sweep.
                step = Complex64::from_polar(1e-7 * (1.0 + z[k].norm()), 1.0 + k as f64);
            }
            z[k] -= step;
            if step.norm() < UPDATE_TOL * (1.0 + z[k].norm()) {
                frozen[k] = true;
            }
        }
        if frozen.iter().all(|&f| f) {
            return (z, true);
        }
    }
    (z, false)
}

/// Eigenvalues of the companion matrix via complex Schur decomposition.
pub fn companion_roots(p: &MonicPolynomial) -> Option<Vec<Complex64>> {
    let n = p.degree();
    let mut m = DMatrix::from_element(n, n, ZERO);
    for k in 0..n {
        m[(0, k)] = -p.coeffs[k];
    }
    for k in 1..n {
        m[(k, k - 1)] = ONE;
    }
    let schur = match nalgebra::linalg::Schur::try_new(m.clone(), f64::EPSILON, 10_000) {
        Some(s) => s,
        None => {
            // Shifted QR stalls on cyclic companions such as x^n + 1; a fixed
            // Householder similarity breaks the symmetry.
            let v = nalgebra::DVector::from_fn(n, |i, _| {
                Complex64::new(1.0 + 0.37 * i as f64, 0.21 * ((i + 1) as f64).sin())
            });
            let v = &v / Complex64::new(v.norm(), 0.0);
            let q = DMatrix::<Complex64>::identity(n, n) - (&v * v.adjoint()) * Complex64::new(2.0, 0.0);
            nalgebra::linalg::Schur::try_new(&q * m * &q, f64::EPSILON, 10_000)?
        }
    };
    let (_, t) = schur.unpack();
    Some((0..n).map(|k| t[(k, k)]).collect())
}

/// Coefficients of the `order`-th derivative, leading term first.
fn derivative_coeffs(full: &[Complex64], order: usize) -> Vec<Complex64> {
    let degree = full.len() - 1;
    (0..=degree - order)
        .map(|k| {
            let power = degree - k;
            let factor: f64 = (0..order).map(|j| (power - j) as f64).product();
            full[k] * factor
        })
        .collect()
}

fn horner_pair(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = ZERO;
    let mut dp = ZERO;
    for &c in coeffs {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// Radius within which `m` computed roots may be spread around one `m`-fold root.
fn cluster_radius(p: &MonicPolynomial, m: usize, centre: Complex64) -> f64 {
    let scale = 1.0 + p.coeffs.iter().map(|c| c.norm()).sum::<f64>();
    4.0 * (f64::EPSILON * scale).powf(1.0 / m as f64) * centre.norm().max(1.0)
}

/// Replace each tight group of `m` computed roots by the nearby root of
/// `p^{(m-1)}`, which is simple there and so is found to full precision.
pub fn polish_clusters(p: &MonicPolynomial, roots: &[Complex64]) -> Vec<Complex64> {
    let n = roots.len();
    let full = p.full_coeffs();
    let mut out = roots.to_vec();
    let mut assigned = vec![false; n];
    for m in (2..=n).rev() {
        let derivative = derivative_coeffs(&full, m - 1);
        for i in 0..n {
            if assigned[i] {
                continue;
            }
            let mut near: Vec<(f64, usize)> = (0..n)
                .filter(|&j| j != i && !assigned[j])
                .map(|j| ((roots[j] - roots[i]).norm(), j))
                .collect();
            if near.len() < m - 1 {
                continue;
            }
            near.sort_by(|a, b| a.0.total_cmp(&b.0));
            let group: Vec<usize> = std::iter::once(i).chain(near[..m - 1].iter().map(|x| x.1)).collect();
            let centroid = group.iter().map(|&j| roots[j]).sum::<Complex64>() / m as f64;
            let radius = cluster_radius(p, m, centroid);
            if group.iter().any(|&j| (roots[j] - centroid).norm() > radius) {
                continue;
            }
            let Some(z) = newton(&derivative, centroid) else {
                continue;
            };
            if (z - centroid).norm() > radius {
                continue;
            }
            for &j in &group {
                out[j] = z;
                assigned[j] = true;
            }
        }
    }
    out
}

fn newton(coeffs: &[Complex64], start: Complex64) -> Option<Complex64> {
    let mut z = start;
    for _ in 0..50 {
        let (value, slope) = horner_pair(coeffs, z);
        if value == ZERO {
            return Some(z);
        }
        let step = value / slope;
        if !step.re.is_finite() || !step.im.is_finite() {
            return None;
        }
        z -= step;
        if step.norm() <= 4.0 * f64::EPSILON * (1.0 + z.norm()) {
            return Some(z);
        }
    }
    Some(z)
}

fn sylvester_with_derivative(p: &MonicPolynomial) -> DMatrix<Complex64> {
    let n = p.degree();
    let full = p.full_coeffs();
    let derivative: Vec<Complex64> = full[..n].iter().enumerate().map(|(k, &c)| c * (n - k) as f64).collect();
    let size = 2 * n - 1;
    let mut m = DMatrix::from_element(size, size, ZERO);
    for row in 0..n - 1 {
        for (k, &c) in full.iter().enumerate() {
            m[(row, row + k)] = c;
        }
    }
    for row in 0..n {
        for (k, &c) in derivative.iter().enumerate() {
            m[(n - 1 + row, row + k)] = c;
        }
    }
    m
}

fn discriminant_sign(n: usize) -> f64 {
    if (n * (n - 1) / 2).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// `disc(p) = (-1)^{N(N-1)/2} Res(p, p')` from the Sylvester determinant.
pub fn discriminant(p: &MonicPolynomial) -> Result<Complex64> {
    let n = p.degree();
    if n < 2 {
        return Err(Error::InvalidDegree(n));
    }
    Ok(sylvester_with_derivative(p).determinant() * discriminant_sign(n))
}

/// `ln |disc(p)|` from the LU factors of the Sylvester matrix; `-inf` when singular.
pub fn log_abs_discriminant(p: &MonicPolynomial) -> Result<f64> {
    let n = p.degree();
    if n < 2 {
        return Err(Error::InvalidDegree(n));
    }
    let lu = sylvester_with_derivative(p).lu();
    let u = lu.u();
    Ok((0..u.nrows()).map(|k| u[(k, k)].norm().ln()).sum())
}

/// `prod_{m<n} (xi_n - xi_m)^2`.
pub fn discriminant_from_roots(roots: &[Complex64]) -> Complex64 {
    let mut acc = ONE;
    for n in 0..roots.len() {
        for m in 0..n {
            let d = roots[n] - roots[m];
            acc *= d * d;
        }
    }
    acc
}
