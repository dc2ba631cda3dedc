use std::f64::consts::PI;

use crpoly::crmap::{build_basis, cr_to_real, real_to_cr, RealCoeffVector};
use crpoly::polyroots::{coeffs_from_roots, RootVector};
use crpoly::volume::{jacobian_abs, min_angular_gap};
use crpoly::wn_set::{self, classify_partition, partition_reduce, Partition, Status, Tolerances};
use crpoly::Complex64;
use proptest::prelude::*;

const TAU: f64 = 2.0 * PI;

fn angles(max_degree: usize) -> impl Strategy<Value = Vec<f64>> {
    (2..=max_degree).prop_flat_map(|n| prop::collection::vec(0.0..TAU, n - 1))
}

fn parts() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(1usize..4, 1..7)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn real_cr_round_trip(coords in prop::collection::vec(-20.0..20.0f64, 1..15), phi in 0.0..TAU) {
        let n = coords.len() + 1;
        let a = RealCoeffVector::new(coords).unwrap();
        let x = build_basis(n, Complex64::from_polar(1.0, phi)).unwrap();
        let c = real_to_cr(&a, &x).unwrap();
        prop_assert!(c.cr_residual() <= 1e-12 * (1.0 + a.norm()));
        let back = cr_to_real(&c, &x).unwrap();
        prop_assert!(a.distance(&back) <= 1e-12 * (1.0 + a.norm()));
        prop_assert!((c.coeffs().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() - a.norm()).abs() <= 1e-12 * (1.0 + a.norm()));
    }

    #[test]
    fn sampled_points_are_members(thetas in angles(9)) {
        let rv = RootVector::from_angles(&thetas, Complex64::new(1.0, 0.0));
        let a = wn_set::point_from_roots(&rv).unwrap();
        let v = wn_set::classify(&a, &Tolerances::default()).unwrap();
        prop_assert_ne!(v.status, Status::Exterior);
        prop_assert_eq!(v.partition.map(|p| p.total()), Some(rv.degree()));
    }

    #[test]
    fn coefficients_ignore_root_order(thetas in angles(10), seed in any::<u64>()) {
        let rv = RootVector::from_angles(&thetas, Complex64::new(1.0, 0.0));
        let mut shuffled = rv.roots().to_vec();
        let len = shuffled.len();
        shuffled.rotate_left((seed as usize) % len);
        shuffled.swap(0, len - 1);
        let p = coeffs_from_roots(rv.roots());
        let q = coeffs_from_roots(&shuffled);
        for (x, y) in p.coeffs().iter().zip(q.coeffs()) {
            prop_assert!((x - y).norm() <= 1e-11 * (1.0 + x.norm()));
        }
    }

    #[test]
    fn jacobian_is_invariant_under_rotation(thetas in angles(8), shift in 0.0..TAU) {
        let n = thetas.len() + 1;
        let one = Complex64::new(1.0, 0.0);
        // Rotating all N roots by zeta keeps the product constraint when zeta^N = 1.
        let zeta = TAU * (shift * n as f64 / TAU).floor() / n as f64;
        let rotated: Vec<f64> = thetas.iter().map(|t| t + zeta).collect();
        let a = jacobian_abs(&thetas, one);
        let b = jacobian_abs(&rotated, one);
        prop_assert!((a - b).abs() <= 1e-10 * a.max(1.0));
    }

    #[test]
    fn jacobian_is_independent_of_omega(thetas in angles(8), phi in 0.0..TAU) {
        let n = thetas.len() + 1;
        let omega = Complex64::from_polar(1.0, phi);
        let rotated: Vec<f64> = thetas.iter().map(|t| t - phi / n as f64).collect();
        let a = jacobian_abs(&thetas, omega);
        let b = jacobian_abs(&rotated, Complex64::new(1.0, 0.0));
        prop_assert!((a - b).abs() <= 1e-10 * a.max(1.0));
    }

    #[test]
    fn jacobian_ignores_order_of_free_roots(thetas in angles(8)) {
        let one = Complex64::new(1.0, 0.0);
        let mut reversed = thetas.clone();
        reversed.reverse();
        let a = jacobian_abs(&thetas, one);
        prop_assert!((a - jacobian_abs(&reversed, one)).abs() <= 1e-12 * a.max(1.0));
        prop_assert!(min_angular_gap(&thetas, one) >= 0.0);
    }

    #[test]
    fn canonical_form_is_rotation_invariant(p in parts(), r in 0usize..7) {
        let a = Partition::new(p.clone()).unwrap();
        let mut q = p.clone();
        let len = q.len();
        q.rotate_left(r % len);
        let b = Partition::new(q).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(a.canonical_form(), b.canonical_form());
        prop_assert_eq!(a.total(), p.iter().sum::<usize>());
    }

    #[test]
    fn reduction_keeps_total_and_drops_one_part(p in parts()) {
        let a = Partition::new(p).unwrap();
        for q in partition_reduce(&a) {
            prop_assert_eq!(q.total(), a.total());
            prop_assert_eq!(q.len(), a.len() - 1);
            prop_assert!(q.precedes(&a));
            prop_assert!(!a.precedes(&q));
        }
        prop_assert!(a.precedes(&a));
    }

    #[test]
    fn repeated_roots_give_their_partition(p in parts(), phase in 0.0..TAU) {
        // One root per part, evenly spaced; part k repeated p_k times.
        let m = p.len();
        let mut roots = Vec::new();
        for (k, &mult) in p.iter().enumerate() {
            let z = Complex64::from_polar(1.0, phase + TAU * k as f64 / m as f64);
            roots.extend(std::iter::repeat_n(z, mult));
        }
        let found = classify_partition(&roots, &Tolerances::default()).unwrap();
        prop_assert_eq!(found, Partition::new(p).unwrap());
    }
}
