//! Vertices of `W_N` and its dihedral symmetry group.
//!
//! The vertices `v_n` are the points of the polynomials `(x + zeta^n)^N`,
//! `zeta = e^{2 pi i / N}`; they are the points of `W_N` farthest from the
//! origin. Rotating every root by `zeta` (`R`) and conjugating every root (`C`)
//! are isometries of `W_N` generating a dihedral group of order `2N`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

use crate::crmap::{cr_to_real, real_to_cr, standard_basis, CRCoefficients, RealCoeffVector};
use crate::polyroots::{self, MonicPolynomial};
use crate::quadrature;
use crate::wn_set::{self, Status, Tolerances};
use crate::{binomial, circumradius_squared, rng, Error, Result};

const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Absolute tolerance for the convolution integrals.
pub const CONVOLUTION_TOL: f64 = 1e-9;

fn root_of_unity(n: usize, power: i64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * power as f64 / n as f64)
}

/// The vertex `v_n`, `1 <= n <= N`.
pub fn vertex(degree: usize, index: usize) -> Result<RealCoeffVector> {
    if degree < 2 {
        return Err(Error::InvalidDegree(degree));
    }
    if index == 0 || index > degree {
        return Err(Error::IndexOutOfRange { index, max: degree });
    }
    let coeffs = (1..degree)
        .map(|m| binomial(degree, m) * root_of_unity(degree, (index * m) as i64))
        .collect();
    let c = CRCoefficients::new(coeffs, ONE)?;
    cr_to_real(&c, &standard_basis(degree)?)
}

/// All `N` vertices of `W_N`.
#[derive(Debug, Clone)]
pub struct VertexSet {
    degree: usize,
    vertices: Vec<RealCoeffVector>,
}

impl VertexSet {
    pub fn new(degree: usize) -> Result<Self> {
        let vertices = (1..=degree).map(|n| vertex(degree, n)).collect::<Result<_>>()?;
        Ok(Self { degree, vertices })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// `v_1, ..., v_N`.
    pub fn vertices(&self) -> &[RealCoeffVector] {
        &self.vertices
    }

    /// `v_n` with the index taken mod `N` (so `v_0 = v_N`).
    pub fn get(&self, index: usize) -> &RealCoeffVector {
        let n = self.degree;
        &self.vertices[(index + n - 1) % n]
    }

    /// `max_n | ||v_n||^2 - (C(2N,N) - 2) |`.
    pub fn norm_residual(&self) -> f64 {
        let target = circumradius_squared(self.degree);
        self.vertices
            .iter()
            .map(|v| (v.norm_squared() - target).abs())
            .fold(0.0, f64::max)
    }

    /// `max_k |(v_1 + ... + v_N)_k|`.
    pub fn sum_residual(&self) -> f64 {
        let dim = self.degree - 1;
        (0..dim)
            .map(|k| self.vertices.iter().map(|v| v.coords()[k]).sum::<f64>().abs())
            .fold(0.0, f64::max)
    }

    /// `|det [v_1; ...; v_{N-1}]|`.
    pub fn span_determinant(&self) -> f64 {
        let dim = self.degree - 1;
        DMatrix::from_fn(dim, dim, |r, c| self.vertices[r].coords()[c])
            .determinant()
            .abs()
    }
}

/// `prod_{n <= N/2} C(N,n) * prod_{n <= (N-1)/2} C(N,n) * sqrt|disc((x^N - 1)/(x - 1))|`.
pub fn span_determinant_formula(degree: usize) -> Result<f64> {
    let first: f64 = (1..=degree / 2).map(|n| binomial(degree, n)).product();
    let second: f64 = (1..=(degree - 1) / 2).map(|n| binomial(degree, n)).product();
    let disc = if degree == 2 {
        1.0
    } else {
        polyroots::discriminant(&MonicPolynomial::from_real(&vec![1.0; degree - 1]))?.norm()
    };
    Ok(first * second * disc.sqrt())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum IsometryKind {
    Identity,
    /// `R^k`.
    Rotation(usize),
    Conjugation,
    /// Product of generators, written left to right as applied last to first.
    Word(String),
}

/// A real orthogonal matrix acting on `R^{N-1}`.
#[derive(Debug, Clone)]
pub struct IsometryMatrix {
    pub kind: IsometryKind,
    pub matrix: DMatrix<f64>,
}

impl IsometryMatrix {
    pub fn identity(degree: usize) -> Self {
        Self {
            kind: IsometryKind::Identity,
            matrix: DMatrix::identity(degree - 1, degree - 1),
        }
    }

    pub fn apply(&self, a: &RealCoeffVector) -> Result<RealCoeffVector> {
        let dim = self.matrix.nrows();
        if a.coords().len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: a.coords().len(),
            });
        }
        let v = &self.matrix * nalgebra::DVector::from_column_slice(a.coords());
        RealCoeffVector::new(v.iter().copied().collect())
    }

    pub fn compose(&self, other: &IsometryMatrix) -> IsometryMatrix {
        IsometryMatrix {
            kind: IsometryKind::Word(format!("{}{}", self.label(), other.label())),
            matrix: &self.matrix * &other.matrix,
        }
    }

    pub fn power(&self, k: usize) -> IsometryMatrix {
        let dim = self.matrix.nrows();
        let mut matrix = DMatrix::identity(dim, dim);
        for _ in 0..k {
            matrix = &self.matrix * matrix;
        }
        let kind = match self.kind {
            IsometryKind::Rotation(1) => IsometryKind::Rotation(k),
            _ => IsometryKind::Word(format!("({})^{k}", self.label())),
        };
        IsometryMatrix { kind, matrix }
    }

    pub fn transpose(&self) -> IsometryMatrix {
        IsometryMatrix {
            kind: IsometryKind::Word(format!("({})^T", self.label())),
            matrix: self.matrix.transpose(),
        }
    }

    /// `max |(M^T M - I)_{jk}|`.
    pub fn orthogonality_residual(&self) -> f64 {
        let dim = self.matrix.nrows();
        let gram = self.matrix.transpose() * &self.matrix;
        (gram - DMatrix::<f64>::identity(dim, dim)).amax()
    }

    /// Operator (spectral) norm of `self - other`.
    pub fn distance(&self, other: &IsometryMatrix) -> f64 {
        operator_norm(&(&self.matrix - &other.matrix))
    }

    pub fn label(&self) -> String {
        match &self.kind {
            IsometryKind::Identity => "I".into(),
            IsometryKind::Rotation(1) => "R".into(),
            IsometryKind::Rotation(k) => format!("R^{k}"),
            IsometryKind::Conjugation => "C".into(),
            IsometryKind::Word(w) => w.clone(),
        }
    }
}

fn operator_norm(m: &DMatrix<f64>) -> f64 {
    m.clone().svd(false, false).singular_values.max()
}

/// Real matrix of the linear map `c -> op(c)` transported by the basis `X_N`.
fn transported(degree: usize, op: impl Fn(usize, Complex64) -> Complex64) -> Result<DMatrix<f64>> {
    let basis = standard_basis(degree)?;
    let dim = degree - 1;
    let x = basis.entries();
    let mut out = DMatrix::zeros(dim, dim);
    for col in 0..dim {
        // Image of the unit vector e_col.
        let c: Vec<Complex64> = (0..dim).map(|m| op(m + 1, x[(m, col)])).collect();
        for row in 0..dim {
            let value: Complex64 = (0..dim).map(|m| x[(m, row)].conj() * c[m]).sum();
            assert!(value.im.abs() < 1e-8, "transported map is not real: {value}");
            out[(row, col)] = value.re;
        }
    }
    Ok(out)
}

fn checked(kind: IsometryKind, matrix: DMatrix<f64>) -> IsometryMatrix {
    let iso = IsometryMatrix { kind, matrix };
    let residual = iso.orthogonality_residual();
    assert!(
        residual <= 1e-8,
        "{} is not orthogonal (residual {residual:.3e})",
        iso.label()
    );
    iso
}

/// `R`: every root multiplied by `zeta_N`, i.e. `c_n -> zeta^n c_n`.
pub fn action_r(degree: usize) -> Result<IsometryMatrix> {
    if degree < 2 {
        return Err(Error::InvalidDegree(degree));
    }
    let m = transported(degree, |n, c| root_of_unity(degree, n as i64) * c)?;
    Ok(checked(IsometryKind::Rotation(1), m))
}

/// `C`: every root conjugated, i.e. `c_n -> conj(c_n)`.
pub fn action_c(degree: usize) -> Result<IsometryMatrix> {
    if degree < 2 {
        return Err(Error::InvalidDegree(degree));
    }
    let m = transported(degree, |_, c| c.conj())?;
    Ok(checked(IsometryKind::Conjugation, m))
}

/// The group generated by `R` and `C`, as distinct matrices.
pub fn dihedral_closure(degree: usize) -> Result<Vec<IsometryMatrix>> {
    let generators = [action_r(degree)?, action_c(degree)?];
    let mut elements = vec![IsometryMatrix::identity(degree)];
    let mut frontier = 0;
    while frontier < elements.len() {
        let current = elements[frontier].clone();
        frontier += 1;
        for g in &generators {
            let next = g.compose(&current);
            if elements.iter().all(|e| e.distance(&next) > 1e-6) {
                elements.push(next);
            }
            if elements.len() > 4 * degree + 4 {
                return Ok(elements);
            }
        }
    }
    Ok(elements)
}

/// Smallest pairwise operator-norm distance within a set of matrices.
pub fn min_pairwise_distance(elements: &[IsometryMatrix]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..elements.len() {
        for j in 0..i {
            best = best.min(elements[i].distance(&elements[j]));
        }
    }
    best
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct IsometryReport {
    /// `max | ||Ta - Tb|| - ||a - b|| |` over the pairs.
    pub max_distortion: f64,
    /// Images classified as non-exterior.
    pub images_in_set: bool,
}

/// Distance distortion of `T` over sample pairs, plus a membership check of
/// every image.
pub fn verify_isometry(
    t: &IsometryMatrix,
    pairs: &[(RealCoeffVector, RealCoeffVector)],
    tol: &Tolerances,
) -> Result<IsometryReport> {
    let mut max_distortion = 0.0f64;
    let mut images_in_set = true;
    for (a, b) in pairs {
        let ta = t.apply(a)?;
        let tb = t.apply(b)?;
        max_distortion = max_distortion.max((ta.distance(&tb) - a.distance(b)).abs());
        for image in [&ta, &tb] {
            if wn_set::classify(image, tol)?.status == Status::Exterior {
                images_in_set = false;
            }
        }
    }
    Ok(IsometryReport {
        max_distortion,
        images_in_set,
    })
}

/// `(1 / 2 pi) \oint |w_1(e^{i theta}) - w_2(e^{i theta})|^2 d theta` by the
/// trapezoidal rule on `points` equispaced nodes.
pub fn parseval_distance(a1: &RealCoeffVector, a2: &RealCoeffVector, points: usize) -> Result<f64> {
    let n = a1.degree();
    if a2.degree() != n {
        return Err(Error::DimensionMismatch {
            expected: n - 1,
            found: a2.coords().len(),
        });
    }
    if points <= 2 * n {
        return Err(Error::InvalidResolution {
            got: points,
            min: 2 * n,
        });
    }
    let basis = standard_basis(n)?;
    let c1 = real_to_cr(a1, &basis)?;
    let c2 = real_to_cr(a2, &basis)?;
    let diff: Vec<Complex64> = c1.coeffs().iter().zip(c2.coeffs()).map(|(x, y)| x - y).collect();
    let total: f64 = (0..points)
        .map(|k| {
            let z = Complex64::from_polar(1.0, 2.0 * PI * k as f64 / points as f64);
            // sum_{m=1}^{N-1} d_m z^{N-m}; Horner with a zero constant term.
            diff.iter()
                .fold(Complex64::new(0.0, 0.0), |acc, &d| (acc + d) * z)
                .norm_sqr()
        })
        .sum();
    Ok(total / points as f64)
}

/// `f(theta) = (2 + 2 cos theta)^{N/2} = |e^{i theta} + 1|^N`.
pub fn kernel(degree: usize, theta: f64) -> f64 {
    (2.0 + 2.0 * theta.cos()).max(0.0).powf(degree as f64 / 2.0)
}

/// `(2 cos(phi/2))^N`, the signed amplitude with `(e^{i phi} + 1)^N = e^{i N phi / 2} (2 cos(phi/2))^N`.
fn signed_kernel(degree: usize, phi: f64) -> f64 {
    (2.0 * (0.5 * phi).cos()).powi(degree as i32)
}

/// `f*f(t) = (1/pi) \int_{-pi}^{pi} f(theta) f(t - theta) d theta`.
pub fn convolution_ff(degree: usize, t: f64) -> Result<f64> {
    if degree < 2 {
        return Err(Error::InvalidDegree(degree));
    }
    let breaks = [t - PI, t + PI, 0.0];
    let value = quadrature::integrate_with_breaks(
        |theta| kernel(degree, theta) * kernel(degree, t - theta),
        -PI,
        PI,
        &breaks,
        CONVOLUTION_TOL * PI,
    )?;
    Ok(value / PI)
}

/// Same convolution with the signed amplitude and no periodic wrap of
/// `t - theta`; equals [`convolution_ff`] for even `N`.
pub fn signed_convolution(degree: usize, t: f64) -> Result<f64> {
    if degree < 2 {
        return Err(Error::InvalidDegree(degree));
    }
    let value = quadrature::integrate_with_breaks(
        |theta| signed_kernel(degree, theta) * signed_kernel(degree, theta - t),
        -PI,
        PI,
        &[t - PI, 0.0],
        CONVOLUTION_TOL * PI,
    )?;
    Ok(value / PI)
}

/// `||v_N - v_k||^2` computed three ways.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct VertexDistance {
    /// From the vertex coordinates.
    pub direct: f64,
    /// `2 C(2N,N) + (-1)^{k+1} g(2 pi k / N)` with `g` the signed convolution.
    pub formula: f64,
    /// Same expression with `g = f*f`; differs from `direct` for odd `N`.
    pub periodic_formula: f64,
}

impl VertexDistance {
    pub fn relative_gap(&self) -> f64 {
        (self.direct - self.formula).abs() / self.direct.abs()
    }
}

pub fn vertex_distance_squared(degree: usize, k: usize) -> Result<VertexDistance> {
    if k == 0 || k >= degree {
        return Err(Error::IndexOutOfRange {
            index: k,
            max: degree - 1,
        });
    }
    let direct = {
        let vn = vertex(degree, degree)?;
        let vk = vertex(degree, k)?;
        vn.distance(&vk).powi(2)
    };
    let t = 2.0 * PI * k as f64 / degree as f64;
    let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
    let base = 2.0 * binomial(2 * degree, degree);
    Ok(VertexDistance {
        direct,
        formula: base + sign * signed_convolution(degree, t)?,
        periodic_formula: base + sign * convolution_ff(degree, t)?,
    })
}

/// One row of the `verify` table.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub threshold: f64,
    pub passed: bool,
}

impl Check {
    pub fn below(name: impl Into<String>, residual: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            residual,
            threshold,
            passed: residual.is_finite() && residual < threshold,
        }
    }

    pub fn flag(name: impl Into<String>, ok: bool) -> Self {
        Self {
            name: name.into(),
            residual: if ok { 0.0 } else { 1.0 },
            threshold: 0.5,
            passed: ok,
        }
    }
}

/// Basis, vertex and symmetry invariants for one degree.
pub fn verification_suite(degree: usize, seed: u64) -> Result<Vec<Check>> {
    let tol = Tolerances::default();
    let mut checks = Vec::new();

    let basis = standard_basis(degree)?;
    checks.push(Check::below(
        "basis |det| - 1",
        (basis.determinant().norm() - 1.0).abs(),
        1e-10,
    ));
    checks.push(Check::below("basis unitarity", basis.unitarity_residual(), 1e-12));

    let mut stream = rng::stream(seed, 0);
    let mut samples = Vec::with_capacity(200);
    for _ in 0..200 {
        samples.push(wn_set::sample_point(degree, &mut stream)?.1);
    }
    let mut round_trip = 0.0f64;
    let mut norm_gap = 0.0f64;
    let mut cr = 0.0f64;
    for a in &samples {
        let c = real_to_cr(a, &basis)?;
        cr = cr.max(c.cr_residual());
        let back = cr_to_real(&c, &basis)?;
        for (x, y) in a.coords().iter().zip(back.coords()) {
            round_trip = round_trip.max((x - y).abs());
        }
        norm_gap = norm_gap.max(crate::crmap::norm_preservation_check(a, &basis)?);
    }
    checks.push(Check::below("CR symmetry of X a", cr, 1e-12));
    checks.push(Check::below("real->CR->real round trip", round_trip, 1e-12));
    checks.push(Check::below("norm preservation", norm_gap, 1e-10));

    let vertices = VertexSet::new(degree)?;
    checks.push(Check::below("vertex norms", vertices.norm_residual(), 1e-8));
    checks.push(Check::below("vertex sum", vertices.sum_residual(), 1e-9));
    let formula = span_determinant_formula(degree)?;
    checks.push(Check::below(
        "vertex span determinant",
        (vertices.span_determinant() - formula).abs() / formula,
        1e-6,
    ));

    let r = action_r(degree)?;
    let c = action_c(degree)?;
    let id = IsometryMatrix::identity(degree);
    checks.push(Check::below("R orthogonal", r.orthogonality_residual(), 1e-10));
    checks.push(Check::below("C orthogonal", c.orthogonality_residual(), 1e-10));
    checks.push(Check::below("R^N = I", r.power(degree).distance(&id), 1e-10));
    checks.push(Check::below("C^2 = I", c.power(2).distance(&id), 1e-10));
    checks.push(Check::below(
        "CRC = R^-1",
        c.compose(&r).compose(&c).distance(&r.transpose()),
        1e-10,
    ));
    let group = dihedral_closure(degree)?;
    checks.push(Check::flag(
        format!("group order = 2N ({})", group.len()),
        group.len() == 2 * degree,
    ));
    checks.push(Check::flag(
        "group elements distinct",
        min_pairwise_distance(&group) > 1e-6,
    ));

    let mut shift = 0.0f64;
    for n in 1..=degree {
        let image = r.apply(vertices.get(n))?;
        shift = shift.max(image.distance(vertices.get(n + 1)));
    }
    checks.push(Check::below("R v_n = v_{n+1}", shift, 1e-9));

    let pairs: Vec<_> = samples
        .chunks(2)
        .take(100)
        .map(|p| (p[0].clone(), p[1].clone()))
        .collect();
    for (name, t) in [("R", &r), ("C", &c)] {
        let report = verify_isometry(t, &pairs, &tol)?;
        checks.push(Check::below(
            format!("{name} distance distortion"),
            report.max_distortion,
            1e-10,
        ));
        checks.push(Check::flag(
            format!("{name} keeps samples in W_N"),
            report.images_in_set,
        ));
    }

    let mut parseval = 0.0f64;
    for (a, b) in &pairs {
        let value = parseval_distance(a, b, 4 * degree + 1)?;
        let exact = a.distance(b).powi(2);
        parseval = parseval.max((value - exact).abs() / exact.max(1.0));
    }
    checks.push(Check::below("Parseval identity", parseval, 1e-9));

    let mut pair_gap = 0.0f64;
    let scale = 2.0 * binomial(2 * degree, degree);
    for m in 1..=degree {
        for mp in 1..=degree {
            let k = (mp + degree - m) % degree;
            let lhs = vertices.get(m).distance(vertices.get(mp)).powi(2);
            let rhs = vertices.get(degree).distance(vertices.get(k)).powi(2);
            pair_gap = pair_gap.max((lhs - rhs).abs() / scale);
        }
    }
    checks.push(Check::below("||v_m - v_m'|| depends on m' - m only", pair_gap, 1e-12));

    if degree >= 3 {
        let mut worst = 0.0f64;
        for k in 1..degree {
            worst = worst.max(vertex_distance_squared(degree, k)?.relative_gap());
        }
        checks.push(Check::below("vertex distance formula", worst, 1e-6));
    }
    Ok(checks)
}
