//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line.

use std::f64::consts::PI;

use crpoly::crmap::{build_basis, cr_to_real, real_to_cr, standard_basis, RealCoeffVector};
use crpoly::polyroots::{coeffs_from_roots, roots_from_coeffs, RootVector};
use crpoly::symmetry::{self, convolution_ff, vertex_distance_squared};
use crpoly::volume::{
    boundary_curve, jacobian_abs, jacobian_fd_check, min_angular_gap, shoelace_area, volume_closed_form, volume_mc_hit,
    volume_mc_jacobian,
};
use crpoly::wn_set::{self, Status, Tolerances};
use crpoly::{binomial, circumradius_squared, rng, Complex64};
use rand::Rng;

const TAU: f64 = 2.0 * PI;
const SEED: u64 = 20_240_917;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn report(id: usize, title: &str, o: &Outcome) {
    println!(
        "[{}] {id:>2}. {title}: {}",
        if o.passed { "PASS" } else { "FAIL" },
        o.detail
    );
}

fn unit(phi: f64) -> Complex64 {
    Complex64::from_polar(1.0, phi)
}

fn closed_form() -> Outcome {
    let expected = [(2, 4.0), (3, 4.0 * PI), (4, 32.0 * PI / 3.0)];
    let worst = expected
        .iter()
        .map(|&(n, v)| (volume_closed_form(n).unwrap().value - v).abs() / v)
        .fold(0.0, f64::max);
    outcome(worst <= 1e-12, format!("max relative error {worst:.2e}"))
}

fn mc_jacobian() -> Outcome {
    let mut passed = true;
    let mut lines = Vec::new();
    for n in 2..=8 {
        let est = volume_mc_jacobian(n, 1_000_000, SEED, 1).unwrap();
        let exact = volume_closed_form(n).unwrap().value;
        let sigmas = (est.value - exact).abs() / est.std_error;
        let rel_se = est.std_error / est.value;
        passed &= sigmas <= 3.0 && rel_se < 0.015;
        lines.push(format!("N={n}: {sigmas:.2}σ, se {:.3}%", 100.0 * rel_se));
    }
    outcome(passed, lines.join("; "))
}

fn hit_or_miss() -> Outcome {
    let est = volume_mc_hit(3, 100_000, SEED, 1).unwrap();
    let p = est.hit_fraction.unwrap();
    let expected = 4.0 * PI / 72.0;
    let sigma = (expected * (1.0 - expected) / 100_000.0).sqrt();
    let sigmas = (p - expected).abs() / sigma;
    outcome(
        sigmas <= 3.0,
        format!("hit fraction {p:.5} vs {expected:.5} ({sigmas:.2}σ)"),
    )
}

fn separated_angles<R: Rng>(rng: &mut R, dim: usize, omega: Complex64, min_gap: f64) -> Vec<f64> {
    loop {
        let thetas: Vec<f64> = (0..dim).map(|_| rng.random_range(0.0..TAU)).collect();
        if min_angular_gap(&thetas, omega) > min_gap {
            return thetas;
        }
    }
}

fn jacobian() -> Outcome {
    let mut stream = rng::stream(SEED, 4);
    let one = Complex64::new(1.0, 0.0);
    let mut fd_worst = 0.0f64;
    let mut omega_worst = 0.0f64;
    for n in 3..=6 {
        for _ in 0..100 {
            let omega = unit(stream.random_range(0.0..TAU));
            let thetas = separated_angles(&mut stream, n - 1, omega, 0.05);
            fd_worst = fd_worst.max(jacobian_fd_check(&thetas, omega, 1e-5).unwrap());
            // Rotating every root by omega^{-1/N} turns an omega-CR polynomial into a CR one.
            let shift = omega.arg() / n as f64;
            let rotated: Vec<f64> = thetas.iter().map(|t| t - shift).collect();
            let a = jacobian_abs(&thetas, omega);
            let b = jacobian_abs(&rotated, one);
            omega_worst = omega_worst.max((a - b).abs() / b);
        }
    }
    outcome(
        fd_worst <= 1e-6 && omega_worst <= 1e-10,
        format!("finite difference {fd_worst:.2e}, omega independence {omega_worst:.2e}"),
    )
}

fn basis() -> Outcome {
    let mut det_worst = 0.0f64;
    let mut unitary_worst = 0.0f64;
    for n in 2..=16 {
        for omega in [unit(0.0), unit(1.1), unit(-2.7)] {
            let x = build_basis(n, omega).unwrap();
            det_worst = det_worst.max((x.determinant().norm() - 1.0).abs());
            unitary_worst = unitary_worst.max(x.unitarity_residual());
        }
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let z = Complex64::new(0.0, 0.0);
    let r = Complex64::new(s, 0.0);
    let i = Complex64::new(0.0, s);
    let one = Complex64::new(1.0, 0.0);
    let x5 = vec![vec![r, z, z, i], vec![z, r, i, z], vec![z, r, -i, z], vec![r, z, z, -i]];
    let x6 = vec![
        vec![r, z, z, z, i],
        vec![z, r, z, i, z],
        vec![z, z, one, z, z],
        vec![z, r, z, -i, z],
        vec![r, z, z, z, -i],
    ];
    let exact = standard_basis(5).unwrap().rows() == x5 && standard_basis(6).unwrap().rows() == x6;
    outcome(
        det_worst <= 1e-10 && unitary_worst < 1e-12 && exact,
        format!("|det|-1 {det_worst:.2e}, unitarity {unitary_worst:.2e}, X5/X6 exact {exact}"),
    )
}

fn geometry() -> Outcome {
    let mut failures = Vec::new();
    for n in 3..=12 {
        for check in symmetry::verification_suite(n, SEED).unwrap() {
            if !check.passed {
                failures.push(format!("N={n} {} ({:.2e})", check.name, check.residual));
            }
        }
        let group = symmetry::dihedral_closure(n).unwrap();
        if group.len() != 2 * n {
            failures.push(format!("N={n} group order {}", group.len()));
        }
    }
    if failures.is_empty() {
        outcome(true, "all invariants hold for N = 3..12")
    } else {
        outcome(false, failures.join("; "))
    }
}

fn vertex_distances() -> Outcome {
    let mut gap = 0.0f64;
    let mut chains = true;
    for n in 4..=12 {
        let separator = 2.0 * binomial(2 * n, n);
        let mut dist = vec![0.0; n];
        for (k, d) in dist.iter_mut().enumerate().skip(1) {
            let v = vertex_distance_squared(n, k).unwrap();
            gap = gap.max(v.relative_gap());
            *d = v.direct;
        }
        let evens: Vec<f64> = (2..=n / 2).step_by(2).map(|k| dist[k]).collect();
        let odds: Vec<f64> = (1..=n / 2).step_by(2).map(|k| dist[k]).collect();
        chains &= evens.windows(2).all(|w| w[0] < w[1]) && evens.iter().all(|&d| d < separator);
        chains &= odds.windows(2).all(|w| w[0] > w[1]) && odds.iter().all(|&d| d > separator);
    }
    let mut decreasing = true;
    for n in 3..=8 {
        let grid: Vec<f64> = (1..=100)
            .map(|j| convolution_ff(n, PI * j as f64 / 101.0).unwrap())
            .collect();
        decreasing &= grid.windows(2).all(|w| w[1] < w[0]);
    }
    outcome(
        gap <= 1e-6 && chains && decreasing,
        format!("route gap {gap:.2e}, chains ordered {chains}, f*f decreasing {decreasing}"),
    )
}

fn bounds() -> Outcome {
    let mut stream = rng::stream(SEED, 8);
    let mut norm_excess = f64::NEG_INFINITY;
    let mut coeff_excess = f64::NEG_INFINITY;
    for n in 2..=8 {
        let limit = circumradius_squared(n);
        for _ in 0..10_000 {
            let (rv, a) = wn_set::sample_point(n, &mut stream).unwrap();
            norm_excess = norm_excess.max(a.norm_squared() - limit);
            let c = rv.to_polynomial();
            for (k, ck) in c.coeffs().iter().enumerate() {
                coeff_excess = coeff_excess.max(ck.norm() - binomial(n, k + 1));
            }
        }
    }
    outcome(
        norm_excess <= 1e-6 && coeff_excess <= 1e-8,
        format!("max ||a||^2 excess {norm_excess:.2e}, max |c_n| excess {coeff_excess:.2e}"),
    )
}

fn boundary() -> Outcome {
    let points = 10_000;
    let curve = boundary_curve(3, points).unwrap();
    let r = 2f64.sqrt();
    let pointwise = curve
        .angles
        .iter()
        .zip(&curve.projection)
        .map(|(&t, &[x, y])| {
            let ex = -2.0 * r * t.cos() + r * (2.0 * t).cos();
            let ey = -2.0 * r * t.sin() - r * (2.0 * t).sin();
            (x - ex).abs().max((y - ey).abs())
        })
        .fold(0.0, f64::max);
    let area = shoelace_area(&curve.projection).abs();
    let area_err = (area - 4.0 * PI).abs() / (4.0 * PI);
    let tol = Tolerances::default();
    let off_boundary = curve
        .points
        .iter()
        .filter(|a| wn_set::classify(a, &tol).unwrap().status != Status::Boundary)
        .count();
    outcome(
        pointwise <= 1e-9 && area_err < 1e-3 && off_boundary == 0,
        format!(
            "pointwise {pointwise:.2e}, area error {:.4}%, non-boundary points {off_boundary}",
            100.0 * area_err
        ),
    )
}

fn round_trips() -> Outcome {
    let mut stream = rng::stream(SEED, 10);
    let mut roots_worst = 0.0f64;
    let mut coeffs_worst = 0.0f64;
    let mut parseval_worst = 0.0f64;
    for n in 2..=12 {
        for _ in 0..200 {
            let omega = unit(stream.random_range(0.0..TAU));
            let thetas = separated_angles(&mut stream, n - 1, omega, 0.05);
            let rv = RootVector::from_angles(&thetas, omega);
            let found = roots_from_coeffs(&coeffs_from_roots(rv.roots())).unwrap();
            for z in rv.roots() {
                let nearest = found.iter().map(|w| (w - z).norm()).fold(f64::INFINITY, f64::min);
                roots_worst = roots_worst.max(nearest);
            }

            let a = RealCoeffVector::new((0..n - 1).map(|_| stream.random_range(-10.0..10.0)).collect()).unwrap();
            let x = build_basis(n, omega).unwrap();
            let back = cr_to_real(&real_to_cr(&a, &x).unwrap(), &x).unwrap();
            coeffs_worst = coeffs_worst.max(a.distance(&back));

            let b = wn_set::sample_point(n, &mut stream).unwrap().1;
            let exact = a.distance(&b).powi(2);
            let value = symmetry::parseval_distance(&a, &b, 4 * n + 1).unwrap();
            parseval_worst = parseval_worst.max((value - exact).abs() / exact.max(1.0));
        }
    }
    outcome(
        roots_worst <= 1e-8 && coeffs_worst <= 1e-12 && parseval_worst <= 1e-9,
        format!("roots {roots_worst:.2e}, real<->CR {coeffs_worst:.2e}, Parseval {parseval_worst:.2e}"),
    )
}

#[test]
fn acceptance() {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 10] = [
        ("closed-form volume", closed_form),
        ("MC Jacobian estimator", mc_jacobian),
        ("hit-or-miss estimator", hit_or_miss),
        ("Jacobian correctness", jacobian),
        ("basis properties", basis),
        ("geometry suite", geometry),
        ("vertex distances", vertex_distances),
        ("norm and coefficient bounds", bounds),
        ("boundary curve", boundary),
        ("round trips", round_trips),
    ];
    let mut failed = Vec::new();
    for (k, (title, check)) in criteria.iter().enumerate() {
        let o = check();
        report(k + 1, title, &o);
        if !o.passed {
            failed.push(k + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
