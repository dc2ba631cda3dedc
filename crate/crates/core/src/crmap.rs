//! Real <-> complex coordinates for conjugate-reciprocal coefficient vectors.
//!
//! For a unit complex `omega`, the basis matrix `X_{N,omega}` sends a real
//! vector `a` in `R^{N-1}` to coefficients `c = X a` satisfying
//! `c_{N-n} = omega * conj(c_n)`, so that
//! `x^N + c_1 x^{N-1} + ... + c_{N-1} x + omega` is omega-CR. Rows are
//!
//! * `j < N/2`:  `s * (e_j + i e_{N-j})`
//! * `j = N/2`:  `omega^{1/2} e_j` (principal branch)
//! * `j > N/2`:  `omega * s * (e_{N-j} - i e_j)`
//!
//! with `s = sqrt(2)/2`. For `omega = 1` this is `X_N`. The matrix is unitary,
//! so the inverse map is the conjugate transpose.

use nalgebra::DMatrix;
use num_complex::Complex64;
use std::f64::consts::FRAC_1_SQRT_2;

use crate::polyroots::MonicPolynomial;
use crate::{Error, Result};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Tolerance on the CR relation and on the imaginary residue of the inverse,
/// relative to `1 + max |c_n|`.
pub const CR_TOLERANCE: f64 = 1e-9;

/// A point of `R^{N-1}`, the real coordinate of a degree-`N` CR polynomial.
#[derive(Debug, Clone, PartialEq)]
pub struct RealCoeffVector {
    coords: Vec<f64>,
}

impl RealCoeffVector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidDegree(1));
        }
        if coords.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { coords })
    }

    pub fn zeros(degree: usize) -> Result<Self> {
        if degree < 2 {
            return Err(Error::InvalidDegree(degree));
        }
        Ok(Self {
            coords: vec![0.0; degree - 1],
        })
    }

    /// The polynomial degree `N` (one more than the dimension).
    pub fn degree(&self) -> usize {
        self.coords.len() + 1
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn norm_squared(&self) -> f64 {
        self.coords.iter().map(|x| x * x).sum()
    }

    pub fn distance(&self, other: &Self) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt()
    }
}

/// Coefficients `c_1..c_{N-1}` of the monic omega-CR polynomial
/// `x^N + sum c_n x^{N-n} + omega`.
#[derive(Debug, Clone, PartialEq)]
pub struct CRCoefficients {
    omega: Complex64,
    coeffs: Vec<Complex64>,
}

impl CRCoefficients {
    /// Checked constructor: rejects sequences violating `c_{N-n} = omega conj(c_n)`.
    pub fn new(coeffs: Vec<Complex64>, omega: Complex64) -> Result<Self> {
        check_omega(omega)?;
        if coeffs.is_empty() {
            return Err(Error::InvalidDegree(1));
        }
        let out = Self { omega, coeffs };
        let residual = out.cr_residual();
        if residual > CR_TOLERANCE * out.scale() {
            return Err(Error::NotConjugateReciprocal { residual });
        }
        Ok(out)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() + 1
    }

    pub fn omega(&self) -> Complex64 {
        self.omega
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// `max_n |c_{N-n} - omega conj(c_n)|`.
    pub fn cr_residual(&self) -> f64 {
        cr_residual(&self.coeffs, self.omega)
    }

    /// The full monic polynomial, constant term `omega` included.
    pub fn to_polynomial(&self) -> MonicPolynomial {
        let mut all = self.coeffs.clone();
        all.push(self.omega);
        MonicPolynomial::new(all)
    }

    fn scale(&self) -> f64 {
        1.0 + self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// `max_n |c_{N-n} - omega conj(c_n)|` for `c_1..c_{N-1}`.
pub fn cr_residual(coeffs: &[Complex64], omega: Complex64) -> f64 {
    let m = coeffs.len();
    (0..m)
        .map(|k| (coeffs[m - 1 - k] - omega * coeffs[k].conj()).norm())
        .fold(0.0, f64::max)
}

/// The `(N-1) x (N-1)` unitary change of basis `X_{N,omega}`.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisMatrix {
    degree: usize,
    omega: Complex64,
    entries: DMatrix<Complex64>,
}

impl BasisMatrix {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn omega(&self) -> Complex64 {
        self.omega
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.degree - 1
    }

    pub fn determinant(&self) -> Complex64 {
        self.entries.clone().determinant()
    }

    /// `max |(X^* X - I)_{jk}|`.
    pub fn unitarity_residual(&self) -> f64 {
        let gram = self.entries.adjoint() * &self.entries;
        let n = self.dim();
        let mut worst = 0.0f64;
        for j in 0..n {
            for k in 0..n {
                let target = if j == k { ONE } else { Complex64::new(0.0, 0.0) };
                worst = worst.max((gram[(j, k)] - target).norm());
            }
        }
        worst
    }

    /// Row-major entries, convenient for serialization.
    pub fn rows(&self) -> Vec<Vec<Complex64>> {
        (0..self.dim())
            .map(|j| (0..self.dim()).map(|k| self.entries[(j, k)]).collect())
            .collect()
    }

    fn check_dim(&self, found: usize) -> Result<()> {
        if found != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found,
            });
        }
        Ok(())
    }

    fn apply(&self, a: &[f64]) -> Vec<Complex64> {
        let n = self.dim();
        (0..n)
            .map(|j| (0..n).map(|k| self.entries[(j, k)] * a[k]).sum())
            .collect()
    }

    fn apply_inverse(&self, c: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim();
        (0..n)
            .map(|k| (0..n).map(|j| self.entries[(j, k)].conj() * c[j]).sum())
            .collect()
    }
}

fn check_omega(omega: Complex64) -> Result<()> {
    let modulus = omega.norm();
    if !modulus.is_finite() || (modulus - 1.0).abs() > 1e-12 {
        return Err(Error::NotUnitModulus(modulus));
    }
    Ok(())
}

/// Build `X_{N,omega}`.
pub fn build_basis(degree: usize, omega: Complex64) -> Result<BasisMatrix> {
    if degree < 2 {
        return Err(Error::InvalidDegree(degree));
    }
    check_omega(omega)?;
    let n = degree - 1;
    let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let mut entries = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for j in 1..degree {
        let row = j - 1;
        let mirror = degree - j - 1;
        match (2 * j).cmp(&degree) {
            std::cmp::Ordering::Less => {
                entries[(row, row)] = s;
                entries[(row, mirror)] = I * s;
            }
            std::cmp::Ordering::Equal => {
                entries[(row, row)] = omega.sqrt();
            }
            std::cmp::Ordering::Greater => {
                entries[(row, mirror)] = omega * s;
                entries[(row, row)] = -I * omega * s;
            }
        }
    }
    Ok(BasisMatrix { degree, omega, entries })
}

/// `X_N`, the `omega = 1` basis.
pub fn standard_basis(degree: usize) -> Result<BasisMatrix> {
    build_basis(degree, ONE)
}

/// `c = X a`.
pub fn real_to_cr(a: &RealCoeffVector, basis: &BasisMatrix) -> Result<CRCoefficients> {
    basis.check_dim(a.coords.len())?;
    Ok(CRCoefficients {
        omega: basis.omega,
        coeffs: basis.apply(&a.coords),
    })
}

/// `a = X^* c`, after checking the CR relation and the imaginary residue.
pub fn cr_to_real(c: &CRCoefficients, basis: &BasisMatrix) -> Result<RealCoeffVector> {
    basis.check_dim(c.coeffs.len())?;
    let scale = c.scale();
    let residual = cr_residual(&c.coeffs, basis.omega);
    if residual > CR_TOLERANCE * scale {
        return Err(Error::NotConjugateReciprocal { residual });
    }
    let a = basis.apply_inverse(&c.coeffs);
    let imaginary = a.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    if imaginary > CR_TOLERANCE * scale {
        return Err(Error::ImaginaryResidue { residual: imaginary });
    }
    RealCoeffVector::new(a.into_iter().map(|z| z.re).collect())
}

/// `| ||X a|| - ||a|| |`.
pub fn norm_preservation_check(a: &RealCoeffVector, basis: &BasisMatrix) -> Result<f64> {
    let c = real_to_cr(a, basis)?;
    let image = c.coeffs.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    Ok((image - a.norm()).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn x5_matches_display() {
        let x = build_basis(5, ONE).unwrap();
        let pattern = [
            [c(1., 0.), c(0., 0.), c(0., 0.), c(0., 1.)],
            [c(0., 0.), c(1., 0.), c(0., 1.), c(0., 0.)],
            [c(0., 0.), c(1., 0.), c(0., -1.), c(0., 0.)],
            [c(1., 0.), c(0., 0.), c(0., 0.), c(0., -1.)],
        ];
        for (j, row) in pattern.iter().enumerate() {
            for (k, v) in row.iter().enumerate() {
                assert_eq!(x.entries()[(j, k)], v * FRAC_1_SQRT_2);
            }
        }
    }

    #[test]
    fn x2_is_one_by_one_identity() {
        let x = build_basis(2, ONE).unwrap();
        assert_eq!(x.dim(), 1);
        assert_eq!(x.entries()[(0, 0)], ONE);
    }

    #[test]
    fn x6_middle_entry_is_one() {
        let x = build_basis(6, ONE).unwrap();
        assert_eq!(x.entries()[(2, 2)], ONE);
        for k in [0, 1, 3, 4] {
            assert_eq!(x.entries()[(2, k)], c(0., 0.));
        }
    }

    #[test]
    fn rejects_small_degree_and_bad_omega() {
        assert!(matches!(build_basis(1, ONE), Err(Error::InvalidDegree(1))));
        assert!(matches!(build_basis(4, c(2.0, 0.0)), Err(Error::NotUnitModulus(_))));
    }

    #[test]
    fn determinant_and_unitarity() {
        for omega in [ONE, I, Complex64::from_polar(1.0, 2.7)] {
            for n in 2..=16 {
                let x = build_basis(n, omega).unwrap();
                assert_abs_diff_eq!(x.determinant().norm(), 1.0, epsilon = 1e-10);
                assert!(x.unitarity_residual() < 1e-12);
            }
        }
    }

    #[test]
    fn cube_of_x_plus_one() {
        let x = standard_basis(3).unwrap();
        let a = RealCoeffVector::new(vec![3.0 * 2f64.sqrt(), 0.0]).unwrap();
        let cr = real_to_cr(&a, &x).unwrap();
        assert_abs_diff_eq!(cr.coeffs()[0].re, 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(cr.coeffs()[0].im, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(cr.coeffs()[1].re, 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(norm_preservation_check(&a, &x).unwrap(), 0.0, epsilon = 1e-12);

        let back = cr_to_real(&CRCoefficients::new(vec![c(3., 0.), c(3., 0.)], ONE).unwrap(), &x).unwrap();
        assert_abs_diff_eq!(back.coords()[0], 3.0 * 2f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(back.coords()[1], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn zero_maps_to_zero() {
        let x = standard_basis(3).unwrap();
        let cr = real_to_cr(&RealCoeffVector::zeros(3).unwrap(), &x).unwrap();
        assert!(cr.coeffs().iter().all(|z| z.norm() == 0.0));
        let p = cr.to_polynomial();
        assert_eq!(p.coeffs(), &[c(0., 0.), c(0., 0.), ONE]);
        let back = cr_to_real(&cr, &x).unwrap();
        assert_eq!(back.coords(), &[0.0, 0.0]);
    }

    #[test]
    fn not_cr_is_rejected() {
        let x = standard_basis(3).unwrap();
        let bad = CRCoefficients {
            omega: ONE,
            coeffs: vec![c(1., 1.), c(1., 1.)],
        };
        assert!(matches!(
            cr_to_real(&bad, &x),
            Err(Error::NotConjugateReciprocal { .. })
        ));
        assert!(CRCoefficients::new(vec![c(1., 1.), c(1., 1.)], ONE).is_err());
    }

    #[test]
    fn dimension_mismatch() {
        let x = standard_basis(4).unwrap();
        let a = RealCoeffVector::new(vec![1.0, 2.0]).unwrap();
        assert!(matches!(
            real_to_cr(&a, &x),
            Err(Error::DimensionMismatch { expected: 3, found: 2 })
        ));
    }

    #[test]
    fn omega_cr_relation_and_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let n = rng.random_range(3..=10);
            let omega = Complex64::from_polar(1.0, rng.random_range(-3.0..3.0));
            let x = build_basis(n, omega).unwrap();
            let a = RealCoeffVector::new((0..n - 1).map(|_| rng.random_range(-5.0..5.0)).collect()).unwrap();
            let cr = real_to_cr(&a, &x).unwrap();
            assert!(cr.cr_residual() < 1e-12);
            let back = cr_to_real(&cr, &x).unwrap();
            for (u, v) in a.coords().iter().zip(back.coords()) {
                assert!((u - v).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn norm_preserved_for_random_vectors() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let n = rng.random_range(2..=12);
            let x = standard_basis(n).unwrap();
            let a = RealCoeffVector::new((0..n - 1).map(|_| rng.random_range(-10.0..10.0)).collect()).unwrap();
            assert!(norm_preservation_check(&a, &x).unwrap() < 1e-10);
        }
    }
}
