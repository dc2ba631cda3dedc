//! Volume of `W_N`: the root-space Jacobian, the closed form, and two Monte
//! Carlo estimators.
//!
//! The map `E_{N,omega}` sends `N - 1` free unit-circle roots to the real
//! coordinates of the omega-CR polynomial whose last root is fixed by
//! `xi_1 ... xi_N = (-1)^N omega`. Its Jacobian has absolute value
//! `prod_{m<n} |xi_n - xi_m|`, and since each interior point has `N!` root
//! vectors,
//!
//! ```text
//! vol(W_N) = (1/N!) \int_{[0, 2pi)^{N-1}} |Jac E_{N,1}| d theta
//!          = 2^{N-1} pi^{(N-1)/2} / Gamma((N+1)/2),
//! ```
//!
//! the volume of the `(N-1)`-ball of radius 2.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use statrs::function::gamma::ln_gamma;
use std::f64::consts::PI;
use std::fmt;

use crate::crmap::{build_basis, cr_to_real, CRCoefficients, RealCoeffVector};
use crate::polyroots::RootVector;
use crate::wn_set::{self, Status, Tolerances};
use crate::{circumradius_squared, rng, Error, Result};

const TAU: f64 = 2.0 * PI;

/// Above this degree the Jacobian product is accumulated in log space.
pub const LOG_DOMAIN_DEGREE: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum VolumeMethod {
    #[serde(rename = "closed-form")]
    ClosedForm,
    #[serde(rename = "mc-jacobian")]
    McJacobian,
    #[serde(rename = "mc-hit")]
    McHit,
}

impl fmt::Display for VolumeMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VolumeMethod::ClosedForm => "closed-form",
            VolumeMethod::McJacobian => "mc-jacobian",
            VolumeMethod::McHit => "mc-hit",
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VolumeEstimate {
    pub degree: usize,
    pub method: VolumeMethod,
    pub value: f64,
    pub std_error: f64,
    pub samples: u64,
    pub seed: u64,
    pub streams: usize,
    /// Hit-or-miss only: fraction of box samples inside `W_N`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hit_fraction: Option<f64>,
}

/// Streaming mean and variance; partial results merge exactly.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Welford {
    pub count: u64,
    pub mean: f64,
    pub m2: f64,
}

impl Welford {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(self, other: Welford) -> Welford {
        if self.count == 0 {
            return other;
        }
        if other.count == 0 {
            return self;
        }
        let count = self.count + other.count;
        let delta = other.mean - self.mean;
        let mean = self.mean + delta * other.count as f64 / count as f64;
        let m2 = self.m2 + other.m2 + delta * delta * (self.count as f64 * other.count as f64) / count as f64;
        Welford { count, mean, m2 }
    }

    /// Sample variance (`n - 1` denominator); zero below two samples.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    pub fn std_error(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            (self.variance() / self.count as f64).sqrt()
        }
    }
}

fn pair_distances(roots: &[Complex64]) -> impl Iterator<Item = f64> + '_ {
    (0..roots.len()).flat_map(move |n| (0..n).map(move |m| (roots[n] - roots[m]).norm()))
}

/// `prod_{m<n} |xi_n - xi_m|` with `xi_n = e^{i theta_n}` and `xi_N` forced.
pub fn jacobian_abs(thetas: &[f64], omega: Complex64) -> f64 {
    let rv = RootVector::from_angles(thetas, omega);
    if rv.degree() > LOG_DOMAIN_DEGREE {
        log_jacobian_abs_roots(rv.roots()).exp()
    } else {
        pair_distances(rv.roots()).product()
    }
}

/// `ln |Jac E_{N,omega}|`; `-inf` at coincident roots.
pub fn log_jacobian_abs(thetas: &[f64], omega: Complex64) -> f64 {
    log_jacobian_abs_roots(RootVector::from_angles(thetas, omega).roots())
}

fn log_jacobian_abs_roots(roots: &[Complex64]) -> f64 {
    pair_distances(roots).map(f64::ln).sum()
}

/// `E_{N,omega}(theta)`: roots -> coefficients -> real coordinates.
pub fn embedding(thetas: &[f64], omega: Complex64) -> Result<RealCoeffVector> {
    let n = thetas.len() + 1;
    if n < 2 {
        return Err(Error::InvalidDegree(n));
    }
    let poly = RootVector::from_angles(thetas, omega).to_polynomial();
    let inner = poly.coeffs()[..n - 1].to_vec();
    let basis = build_basis(n, omega)?;
    cr_to_real(&CRCoefficients::new(inner, omega)?, &basis)
}

/// Smallest circular gap between the angles of all `N` roots, the forced one included.
pub fn min_angular_gap(thetas: &[f64], omega: Complex64) -> f64 {
    let mut angles = RootVector::from_angles(thetas, omega).angles();
    angles.sort_by(f64::total_cmp);
    let n = angles.len();
    (0..n)
        .map(|k| (angles[(k + 1) % n] - angles[k]).rem_euclid(TAU))
        .map(|g| if n == 1 { TAU } else { g })
        .fold(f64::INFINITY, f64::min)
}

/// Relative error between `|det|` of the central-difference Jacobian of
/// [`embedding`] and [`jacobian_abs`].
pub fn jacobian_fd_check(thetas: &[f64], omega: Complex64, step: f64) -> Result<f64> {
    let dim = thetas.len();
    if dim == 0 {
        return Err(Error::InvalidDegree(1));
    }
    let gap = min_angular_gap(thetas, omega);
    let threshold = 10.0 * step;
    if gap <= threshold {
        return Err(Error::NearSingular { gap, threshold });
    }
    let mut jac = DMatrix::<f64>::zeros(dim, dim);
    let mut shifted = thetas.to_vec();
    for col in 0..dim {
        shifted[col] = thetas[col] + step;
        let plus = embedding(&shifted, omega)?;
        shifted[col] = thetas[col] - step;
        let minus = embedding(&shifted, omega)?;
        shifted[col] = thetas[col];
        for row in 0..dim {
            jac[(row, col)] = (plus.coords()[row] - minus.coords()[row]) / (2.0 * step);
        }
    }
    let numeric = jac.determinant().abs();
    let exact = jacobian_abs(thetas, omega);
    Ok((numeric - exact).abs() / exact)
}

/// `2^{N-1} pi^{(N-1)/2} / Gamma((N+1)/2)`.
pub fn volume_closed_form(degree: usize) -> Result<VolumeEstimate> {
    if degree < 2 {
        return Err(Error::InvalidDegree(degree));
    }
    let d = (degree - 1) as f64;
    let log_value = d * 2f64.ln() + 0.5 * d * PI.ln() - ln_gamma(0.5 * (degree + 1) as f64);
    Ok(VolumeEstimate {
        degree,
        method: VolumeMethod::ClosedForm,
        value: log_value.exp(),
        std_error: 0.0,
        samples: 0,
        seed: 0,
        streams: 0,
        hit_fraction: None,
    })
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

fn run_streams<F>(samples: u64, seed: u64, streams: usize, worker: F) -> Result<Welford>
where
    F: Fn(&mut rng::Stream, u64) -> Result<Welford> + Sync,
{
    let budget = rng::split_budget(samples, streams);
    let parts: Vec<Result<Welford>> = budget
        .par_iter()
        .enumerate()
        .map(|(id, &count)| worker(&mut rng::stream(seed, id as u64), count))
        .collect();
    parts
        .into_iter()
        .try_fold(Welford::default(), |acc, part| Ok(acc.merge(part?)))
}

/// `(2 pi)^{N-1} / N! * mean |Jac E_{N,1}|` over uniform angles.
pub fn volume_mc_jacobian(degree: usize, samples: u64, seed: u64, streams: usize) -> Result<VolumeEstimate> {
    if degree < 2 {
        return Err(Error::InvalidDegree(degree));
    }
    if samples == 0 {
        return Err(Error::Unsupported("at least one sample is required".into()));
    }
    let omega = Complex64::new(1.0, 0.0);
    let stats = run_streams(samples, seed, streams, |stream, count| {
        let mut acc = Welford::default();
        let mut thetas = vec![0.0; degree - 1];
        for _ in 0..count {
            for t in thetas.iter_mut() {
                *t = stream.random_range(0.0..TAU);
            }
            acc.push(jacobian_abs(&thetas, omega));
        }
        Ok(acc)
    })?;
    let factor = ((degree - 1) as f64 * TAU.ln() - ln_factorial(degree)).exp();
    Ok(VolumeEstimate {
        degree,
        method: VolumeMethod::McJacobian,
        value: factor * stats.mean,
        std_error: factor * stats.std_error(),
        samples,
        seed,
        streams: streams.max(1),
        hit_fraction: None,
    })
}

/// Box volume times the fraction of uniform samples in `[-D, D]^{N-1}` that
/// are not exterior, `D = sqrt(C(2N,N) - 2)`.
pub fn volume_mc_hit(degree: usize, samples: u64, seed: u64, streams: usize) -> Result<VolumeEstimate> {
    if degree < 2 {
        return Err(Error::InvalidDegree(degree));
    }
    if samples == 0 {
        return Err(Error::Unsupported("at least one sample is required".into()));
    }
    let tol = Tolerances::default();
    let radius_sq = circumradius_squared(degree);
    let half = radius_sq.sqrt();
    let stats = run_streams(samples, seed, streams, |stream, count| {
        let mut acc = Welford::default();
        let mut coords = vec![0.0; degree - 1];
        for _ in 0..count {
            for x in coords.iter_mut() {
                *x = stream.random_range(-half..half);
            }
            let a = RealCoeffVector::new(coords.clone())?;
            let hit = a.norm_squared() <= radius_sq + 1e-6
                && !wn_set::violates_coefficient_bound(&a, 1e-8)?
                && wn_set::classify(&a, &tol)?.status != Status::Exterior;
            acc.push(if hit { 1.0 } else { 0.0 });
        }
        Ok(acc)
    })?;
    let box_volume = (2.0 * half).powi(degree as i32 - 1);
    let p = stats.mean;
    let binomial_se = (p * (1.0 - p) / samples as f64).max(0.0).sqrt();
    Ok(VolumeEstimate {
        degree,
        method: VolumeMethod::McHit,
        value: box_volume * p,
        std_error: box_volume * binomial_se,
        samples,
        seed,
        streams: streams.max(1),
        hit_fraction: Some(p),
    })
}

/// Sampled boundary of `W_3`, or the `(3,1)` edge family of `W_4`.
#[derive(Debug, Clone)]
pub struct BoundaryCurve {
    pub degree: usize,
    /// Double-root (N = 3) or triple-root (N = 4) angle of each point.
    pub angles: Vec<f64>,
    pub points: Vec<RealCoeffVector>,
    /// `(a_1, a_2)` for N = 3, `(a_1, a_3)` for N = 4.
    pub projection: Vec<[f64; 2]>,
}

/// Points on `phi -> (x - e^{i phi})^{N-1} (x - xi_N)` for `phi = 2 pi k / points`.
///
/// For `N = 3` this is the whole boundary of `W_3`, a deltoid with cusps at the
/// three vertices; for `N = 4` its `(a_1, a_3)` projection is the 4-cusped
/// hypocycloid bounding the projection of `W_4`.
pub fn boundary_curve(degree: usize, points: usize) -> Result<BoundaryCurve> {
    if degree != 3 && degree != 4 {
        return Err(Error::Unsupported(format!(
            "boundary curve for N = {degree} (only 3 and 4)"
        )));
    }
    if points == 0 {
        return Err(Error::InvalidResolution { got: 0, min: 0 });
    }
    let mut angles = Vec::with_capacity(points);
    let mut out = Vec::with_capacity(points);
    let mut projection = Vec::with_capacity(points);
    for k in 0..points {
        let phi = TAU * k as f64 / points as f64;
        let thetas = vec![phi; degree - 1];
        let rv = RootVector::from_angles(&thetas, Complex64::new(1.0, 0.0));
        let a = wn_set::point_from_roots(&rv)?;
        projection.push([a.coords()[0], a.coords()[degree - 2]]);
        angles.push(phi);
        out.push(a);
    }
    Ok(BoundaryCurve {
        degree,
        angles,
        points: out,
        projection,
    })
}

/// Signed area of a closed polygon.
pub fn shoelace_area(points: &[[f64; 2]]) -> f64 {
    let n = points.len();
    0.5 * (0..n)
        .map(|k| {
            let [x0, y0] = points[k];
            let [x1, y1] = points[(k + 1) % n];
            x0 * y1 - x1 * y0
        })
        .sum::<f64>()
}

/// SVG document with the projected curve as one closed path. The square
/// `[-D, D]^2`, `D` the circumradius, fills a 1000 x 1000 viewport.
pub fn boundary_svg(curve: &BoundaryCurve) -> String {
    let half = circumradius_squared(curve.degree).sqrt();
    let to_view =
        |[x, y]: [f64; 2]| -> (f64, f64) { ((x + half) / (2.0 * half) * 1000.0, (half - y) / (2.0 * half) * 1000.0) };
    let mut path = String::new();
    for (k, &p) in curve.projection.iter().enumerate() {
        let (x, y) = to_view(p);
        path.push_str(&format!("{}{x:.3} {y:.3} ", if k == 0 { "M" } else { "L" }));
    }
    path.push('Z');
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"1000\" height=\"1000\" viewBox=\"0 0 1000 1000\">\n\
         <rect x=\"0\" y=\"0\" width=\"1000\" height=\"1000\" fill=\"none\" stroke=\"#999999\"/>\n\
         <path d=\"{path}\" fill=\"none\" stroke=\"#000000\" stroke-width=\"1\"/>\n\
         </svg>\n"
    )
}
