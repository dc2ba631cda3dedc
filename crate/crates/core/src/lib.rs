//! Geometry of monic conjugate-reciprocal (CR) polynomials whose roots all lie
//! on the unit circle.
//!
//! A degree-`N` CR polynomial `x^N + c_1 x^{N-1} + ... + c_{N-1} x + 1` with
//! `c_{N-n} = conj(c_n)` is identified with a point of `R^{N-1}` through a
//! unitary change of basis ([`crmap`]). The set `W_N` of such points whose
//! polynomial has every root on the unit circle is a compact body; this crate
//! provides
//!
//! * coordinate transforms between real vectors, CR coefficients and roots
//!   ([`crmap`], [`polyroots`]),
//! * membership, boundary and face (partition) classification ([`wn_set`]),
//! * the vertices and the dihedral symmetries of `W_N` ([`symmetry`]),
//! * the closed-form volume together with two independent Monte Carlo
//!   estimators of it ([`volume`]),
//! * the `crpoly` command line front end ([`cli`]).

pub mod cli;
pub mod crmap;
mod error;
pub mod polyroots;
pub mod quadrature;
pub mod rng;
pub mod symmetry;
pub mod volume;
pub mod wn_set;

pub use error::{Error, Result};
pub use num_complex::Complex64;

pub use crmap::{build_basis, cr_to_real, real_to_cr, BasisMatrix, CRCoefficients, RealCoeffVector};
pub use polyroots::{MonicPolynomial, RootVector};
pub use volume::{VolumeEstimate, VolumeMethod};
pub use wn_set::{MembershipVerdict, Partition, Status, Tolerances};

/// Binomial coefficient as a float; exact for the degrees used here.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}

/// `C(2N, N) - 2`, the squared radius of the sphere circumscribing `W_N`.
pub fn circumradius_squared(n: usize) -> f64 {
    binomial(2 * n, n) - 2.0
}
