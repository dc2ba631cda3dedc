//! Membership in `W_N`, sampling of root vectors, and face partitions.
//!
//! A point `a` is in `W_N` when every root of its CR polynomial lies on the
//! unit circle. Roots off the circle come in pairs `alpha, 1/conj(alpha)`, so a
//! computed root that leaves the circle means the point is exterior. Points
//! with a repeated root lie on the boundary; the cyclic pattern of root
//! multiplicities (the partition) labels the face.
//!
//! Repeated roots are only computable to about `eps^{1/m}` for multiplicity
//! `m`, so clustering and the off-circle test both widen with cluster size.

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;
use std::collections::{BTreeSet, VecDeque};
use std::f64::consts::PI;
use std::fmt;

use crate::crmap::{cr_to_real, real_to_cr, standard_basis, RealCoeffVector};
use crate::polyroots::{self, RootVector};
use crate::{binomial, Error, Result};

const TAU: f64 = 2.0 * PI;

/// Numerical tolerances for membership decisions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// Radial tolerance for a simple root; a cluster of size `m` gets `base^{1/m}`.
    pub base: f64,
    /// Minimum angular span under which roots are treated as coincident.
    pub cluster_angle: f64,
    /// `|disc| < disc_relative * N^N` flags a repeated root (cross-check only).
    pub disc_relative: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            base: 1e-9,
            cluster_angle: 1e-5,
            disc_relative: 1e-8,
        }
    }
}

impl Tolerances {
    /// Radial tolerance for a cluster of `m` roots.
    pub fn radial(&self, m: usize) -> f64 {
        self.base.powf(1.0 / m.max(1) as f64)
    }

    /// Largest angular span of a run of `m` computed roots that is still read
    /// as one root of multiplicity `m`, for a degree-`n` polynomial.
    pub fn cluster_span(&self, m: usize, n: usize) -> f64 {
        let scale = f64::EPSILON * binomial(n, n / 2).max(1.0);
        self.cluster_angle.max(4.0 * scale.powf(1.0 / m as f64))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Interior,
    Boundary,
    Exterior,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Interior => "interior",
            Status::Boundary => "boundary",
            Status::Exterior => "exterior",
        })
    }
}

/// Cyclically ordered multiplicities `(n_1, ..., n_M)` of the roots of a point
/// of `W_N`, compared up to rotation.
///
/// The canonical form is the lexicographically greatest rotation. Reflections
/// are not identified; see [`Partition::reflection_equivalent`].
#[derive(Debug, Clone)]
pub struct Partition {
    parts: Vec<usize>,
    canonical: Vec<usize>,
}

impl Partition {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.is_empty() || parts.contains(&0) {
            return Err(Error::Unsupported(
                "partition parts must be positive and nonempty".into(),
            ));
        }
        let canonical = canonical_rotation(&parts);
        Ok(Self { parts, canonical })
    }

    /// Parts in the order they were observed.
    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn canonical_form(&self) -> &[usize] {
        &self.canonical
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn total(&self) -> usize {
        self.parts.iter().sum()
    }

    pub fn max_part(&self) -> usize {
        self.parts.iter().copied().max().unwrap_or(0)
    }

    /// Equal up to rotation and reflection.
    pub fn reflection_equivalent(&self, other: &Partition) -> bool {
        if self == other {
            return true;
        }
        let mut reversed = other.parts.clone();
        reversed.reverse();
        canonical_rotation(&reversed) == self.canonical
    }

    /// `self ⪯ other`: `self` is reachable from `other` by zero or more reductions.
    pub fn precedes(&self, other: &Partition) -> bool {
        if self.total() != other.total() || self.len() > other.len() {
            return false;
        }
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::from([other.clone()]);
        while let Some(p) = queue.pop_front() {
            if p == *self {
                return true;
            }
            if p.len() <= self.len() || !seen.insert(p.clone()) {
                continue;
            }
            queue.extend(partition_reduce(&p));
        }
        false
    }
}

impl PartialEq for Partition {
    fn eq(&self, other: &Self) -> bool {
        self.canonical == other.canonical
    }
}

impl Eq for Partition {}

impl PartialOrd for Partition {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Partition {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        other.canonical.cmp(&self.canonical)
    }
}

impl std::hash::Hash for Partition {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.canonical.hash(state);
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let inner: Vec<String> = self.canonical.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", inner.join(","))
    }
}

impl Serialize for Partition {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.canonical.serialize(serializer)
    }
}

fn canonical_rotation(parts: &[usize]) -> Vec<usize> {
    let m = parts.len();
    (0..m)
        .map(|r| parts[r..].iter().chain(&parts[..r]).copied().collect::<Vec<_>>())
        .max()
        .unwrap_or_default()
}

/// Every partition reachable by merging one pair of cyclically adjacent parts.
pub fn partition_reduce(p: &Partition) -> BTreeSet<Partition> {
    let m = p.parts.len();
    let mut out = BTreeSet::new();
    if m < 2 {
        return out;
    }
    for i in 0..m {
        let j = (i + 1) % m;
        let mut merged = Vec::with_capacity(m - 1);
        merged.push(p.parts[i] + p.parts[j]);
        for k in 2..m {
            merged.push(p.parts[(i + k) % m]);
        }
        // Parts are positive, so this cannot fail.
        out.insert(Partition::new(merged).expect("positive parts"));
    }
    out
}

/// A run of angularly consecutive roots read as one repeated root.
#[derive(Debug, Clone)]
pub struct RootCluster {
    /// Indices into the root slice, in increasing angle.
    pub members: Vec<usize>,
    /// Largest `| |z| - 1 |` over members.
    pub radial_deviation: f64,
}

impl RootCluster {
    pub fn multiplicity(&self) -> usize {
        self.members.len()
    }
}

/// Group roots into clusters, returned in circular angular order starting from
/// the cluster holding the smallest-angle root.
pub fn cluster_roots(roots: &[Complex64], tol: &Tolerances) -> Vec<RootCluster> {
    let n = roots.len();
    if n == 0 {
        return Vec::new();
    }
    let mut order: Vec<usize> = (0..n).collect();
    let angles: Vec<f64> = roots.iter().map(|z| z.arg().rem_euclid(TAU)).collect();
    order.sort_by(|&i, &j| angles[i].total_cmp(&angles[j]));
    let sorted: Vec<f64> = order.iter().map(|&i| angles[i]).collect();

    // Arc swept walking forward from `start` through `len` sorted roots.
    let span = |start: usize, len: usize| -> f64 {
        let end = start + len - 1;
        if end < n {
            sorted[end] - sorted[start]
        } else {
            sorted[end - n] + TAU - sorted[start]
        }
    };

    // Largest runs first, so a computed m-fold root is not split into pieces.
    let mut owner: Vec<Option<usize>> = vec![None; n];
    let mut runs: Vec<(usize, usize)> = Vec::new();
    for len in (2..=n).rev() {
        let limit = tol.cluster_span(len, n);
        let mut best: Option<(f64, usize)> = None;
        loop {
            for start in 0..n {
                let free = (0..len).all(|k| owner[(start + k) % n].is_none());
                if !free {
                    continue;
                }
                let s = span(start, len);
                if s < limit && best.is_none_or(|(b, _)| s < b) {
                    best = Some((s, start));
                }
            }
            match best.take() {
                Some((_, start)) => {
                    let id = runs.len();
                    for k in 0..len {
                        owner[(start + k) % n] = Some(id);
                    }
                    runs.push((start, len));
                }
                None => break,
            }
        }
    }
    for (pos, slot) in owner.iter_mut().enumerate() {
        if slot.is_none() {
            *slot = Some(runs.len());
            runs.push((pos, 1));
        }
    }

    // Circular order: walk sorted positions, emitting each run at its first
    // position; a run wrapping past 2*pi is emitted where it starts.
    let first_start = (0..n).find(|&pos| runs[owner[pos].unwrap()].0 == pos).unwrap_or(0);
    let mut emitted = vec![false; runs.len()];
    let mut clusters = Vec::with_capacity(runs.len());
    for step in 0..n {
        let pos = (first_start + step) % n;
        let id = owner[pos].unwrap();
        if emitted[id] {
            continue;
        }
        emitted[id] = true;
        let (start, len) = runs[id];
        let members: Vec<usize> = (0..len).map(|k| order[(start + k) % n]).collect();
        let radial_deviation = members
            .iter()
            .map(|&i| (roots[i].norm() - 1.0).abs())
            .fold(0.0, f64::max);
        clusters.push(RootCluster {
            members,
            radial_deviation,
        });
    }
    clusters
}

/// Multiple of the first-order error bound allowed for a simple root.
pub const CONDITION_FACTOR: f64 = 64.0;

/// `eps * sum_j |c_j| |z|^j / |p'(z)|`: first-order forward error of a simple
/// root `roots[k]` computed with backward error `eps`.
pub fn simple_root_error(roots: &[Complex64], k: usize) -> f64 {
    let z = roots[k];
    let r = z.norm();
    let poly = polyroots::coeffs_from_roots(roots);
    let n = roots.len();
    let magnitude: f64 = poly
        .full_coeffs()
        .iter()
        .enumerate()
        .map(|(j, c)| c.norm() * r.powi((n - j) as i32))
        .sum();
    let slope: f64 = (0..n).filter(|&j| j != k).map(|j| (z - roots[j]).norm()).product();
    f64::EPSILON * magnitude / slope
}

/// Radial tolerance of a cluster: `base^{1/m}` for repeated roots; for a
/// simple root, `base` widened by its conditioning.
fn cluster_tolerance(roots: &[Complex64], cluster: &RootCluster, tol: &Tolerances) -> f64 {
    match cluster.members.as_slice() {
        [k] => tol.base.max(CONDITION_FACTOR * simple_root_error(roots, *k)),
        _ => tol.radial(cluster.multiplicity()),
    }
}

/// Largest `deviation / tolerance` over clusters; `> 1` means a root is off the circle.
fn excess(roots: &[Complex64], clusters: &[RootCluster], tol: &Tolerances) -> (f64, usize) {
    let mut worst = (0.0f64, 0usize);
    for (k, cl) in clusters.iter().enumerate() {
        let ratio = cl.radial_deviation / cluster_tolerance(roots, cl, tol);
        if ratio > worst.0 {
            worst = (ratio, k);
        }
    }
    worst
}

/// Partition of a root multiset lying on the unit circle.
pub fn classify_partition(roots: &[Complex64], tol: &Tolerances) -> Result<Partition> {
    let clusters = cluster_roots(roots, tol);
    let (ratio, worst) = excess(roots, &clusters, tol);
    if ratio > 1.0 {
        let cl = &clusters[worst];
        let index = cl
            .members
            .iter()
            .copied()
            .max_by(|&i, &j| {
                let di = (roots[i].norm() - 1.0).abs();
                let dj = (roots[j].norm() - 1.0).abs();
                di.total_cmp(&dj)
            })
            .unwrap_or(0);
        return Err(Error::OffCircle {
            index,
            deviation: cl.radial_deviation,
        });
    }
    Partition::new(clusters.iter().map(RootCluster::multiplicity).collect())
}

/// Outcome of a membership test.
#[derive(Debug, Clone, Serialize)]
pub struct MembershipVerdict {
    pub status: Status,
    /// Raw `max | |xi| - 1 |` over computed roots.
    pub unit_residual: f64,
    /// Worst cluster deviation over its multiplicity-aware tolerance; `> 1` iff exterior.
    pub residual_ratio: f64,
    pub disc_magnitude: f64,
    pub partition: Option<Partition>,
    /// Set when the discriminant cross-check disagrees with the cluster verdict.
    pub diagnostic: Option<String>,
    #[serde(skip)]
    pub roots: Vec<Complex64>,
}

/// Classify a real coordinate vector as interior, boundary or exterior.
pub fn classify(a: &RealCoeffVector, tol: &Tolerances) -> Result<MembershipVerdict> {
    let n = a.degree();
    let basis = standard_basis(n)?;
    let poly = real_to_cr(a, &basis)?.to_polynomial();
    let roots = polyroots::roots_from_coeffs(&poly)?;
    let disc = polyroots::discriminant(&poly)?.norm();

    let clusters = cluster_roots(&roots, tol);
    let (ratio, _) = excess(&roots, &clusters, tol);
    let unit_residual = polyroots::unit_circle_residual(&roots);
    let repeated = clusters.iter().any(|c| c.multiplicity() >= 2);

    let status = if ratio > 1.0 {
        Status::Exterior
    } else if repeated {
        Status::Boundary
    } else {
        Status::Interior
    };

    let disc_threshold = tol.disc_relative * (n as f64).powi(n as i32);
    let disc_says_repeated = disc < disc_threshold;
    let diagnostic = (status != Status::Exterior && disc_says_repeated != repeated).then(|| {
        format!(
            "discriminant cross-check disagrees: |disc| = {disc:.3e}, threshold {disc_threshold:.3e}, clusters say {}",
            if repeated { "repeated root" } else { "simple roots" }
        )
    });

    let partition = match status {
        Status::Exterior => None,
        _ => Some(Partition::new(
            clusters.iter().map(RootCluster::multiplicity).collect(),
        )?),
    };

    Ok(MembershipVerdict {
        status,
        unit_residual,
        residual_ratio: ratio,
        disc_magnitude: disc,
        partition,
        diagnostic,
        roots,
    })
}

/// Cheap exterior test from `|c_n| <= C(N, n)`, which holds on `W_N`.
pub fn violates_coefficient_bound(a: &RealCoeffVector, slack: f64) -> Result<bool> {
    let n = a.degree();
    let c = real_to_cr(a, &standard_basis(n)?)?;
    Ok(c.coeffs()
        .iter()
        .enumerate()
        .any(|(k, z)| z.norm() > binomial(n, k + 1) + slack))
}

/// Draw `theta_1..theta_{N-1}` uniformly on `[0, 2 pi)`; the last root is forced
/// by `xi_1 ... xi_N = (-1)^N`.
pub fn sample_root_vector<R: Rng + ?Sized>(degree: usize, rng: &mut R) -> Result<RootVector> {
    if degree < 2 {
        return Err(Error::InvalidDegree(degree));
    }
    let thetas: Vec<f64> = (0..degree - 1).map(|_| rng.random_range(0.0..TAU)).collect();
    Ok(RootVector::from_angles(&thetas, Complex64::new(1.0, 0.0)))
}

/// A sampled root vector together with its point of `W_N`.
pub fn sample_point<R: Rng + ?Sized>(degree: usize, rng: &mut R) -> Result<(RootVector, RealCoeffVector)> {
    let rv = sample_root_vector(degree, rng)?;
    let a = point_from_roots(&rv)?;
    Ok((rv, a))
}

/// Real coordinates of the CR polynomial with the given roots.
pub fn point_from_roots(rv: &RootVector) -> Result<RealCoeffVector> {
    let n = rv.degree();
    let poly = rv.to_polynomial();
    let inner = poly.coeffs()[..n - 1].to_vec();
    let basis = standard_basis(n)?;
    let cr = crate::crmap::CRCoefficients::new(inner, Complex64::new(1.0, 0.0))?;
    cr_to_real(&cr, &basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyroots::{coeffs_from_roots, roots_from_coeffs, MonicPolynomial};
    use crate::rng;

    fn p(parts: &[usize]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    #[test]
    fn canonical_is_greatest_rotation() {
        assert_eq!(p(&[1, 3]).canonical_form(), &[3, 1]);
        assert_eq!(p(&[1, 2, 1, 3]).canonical_form(), &[3, 1, 2, 1]);
        assert_ne!(p(&[3, 1, 2]), p(&[3, 2, 1]));
        assert!(p(&[3, 1, 2]).reflection_equivalent(&p(&[3, 2, 1])));
        assert!(Partition::new(vec![]).is_err());
    }

    #[test]
    fn reductions() {
        assert_eq!(partition_reduce(&p(&[1, 1, 1, 1])), BTreeSet::from([p(&[2, 1, 1])]));
        assert_eq!(
            partition_reduce(&p(&[2, 1, 1])),
            BTreeSet::from([p(&[3, 1]), p(&[2, 2])])
        );
        assert!(partition_reduce(&p(&[4])).is_empty());
        assert!(p(&[4]).precedes(&p(&[1, 1, 1, 1])));
        assert!(p(&[2, 2]).precedes(&p(&[2, 1, 1])));
        assert!(!p(&[2, 1, 1]).precedes(&p(&[2, 2])));
        assert!(!p(&[3, 1]).precedes(&p(&[2, 2])));
    }

    #[test]
    fn partitions_of_examples() {
        let tol = Tolerances::default();
        let cases: [(&[f64], &[usize]); 3] = [
            (&[4.0, 6.0, 4.0, 1.0], &[4]),
            (&[0.0, 0.0, 0.0, 1.0], &[1, 1, 1, 1]),
            (&[0.0, 2.0, 0.0, 1.0], &[2, 2]),
        ];
        for (coeffs, parts) in cases {
            let roots = roots_from_coeffs(&MonicPolynomial::from_real(coeffs)).unwrap();
            let got = classify_partition(&roots, &tol).unwrap();
            assert_eq!(got, p(parts), "{coeffs:?}");
            assert_eq!(got.total(), 4);
        }
    }

    #[test]
    fn off_circle_roots_rejected() {
        let roots = [Complex64::new(2.0, 0.0), Complex64::new(0.5, 0.0)];
        assert!(matches!(
            classify_partition(&roots, &Tolerances::default()),
            Err(Error::OffCircle { .. })
        ));
    }

    #[test]
    fn classify_examples() {
        let tol = Tolerances::default();
        let v = classify(&RealCoeffVector::new(vec![0.0, 0.0]).unwrap(), &tol).unwrap();
        assert_eq!(v.status, Status::Interior);
        assert_eq!(v.partition, Some(p(&[1, 1, 1])));
        assert!(v.diagnostic.is_none());

        let v = classify(&RealCoeffVector::new(vec![3.0 * 2f64.sqrt(), 0.0]).unwrap(), &tol).unwrap();
        assert_eq!(v.status, Status::Boundary);
        assert_eq!(v.partition, Some(p(&[3])));

        let v = classify(&RealCoeffVector::new(vec![10.0, 0.0]).unwrap(), &tol).unwrap();
        assert_eq!(v.status, Status::Exterior);
        assert!(v.partition.is_none());
    }

    #[test]
    fn sampled_points_are_members() {
        let tol = Tolerances::default();
        let mut stream = rng::stream(1, 0);
        for n in 2..=8 {
            for _ in 0..300 {
                let (rv, a) = sample_point(n, &mut stream).unwrap();
                assert!(rv.product_residual() < 1e-12);
                assert!(a.norm_squared() <= crate::circumradius_squared(n) + 1e-6);
                let v = classify(&a, &tol).unwrap();
                assert_ne!(v.status, Status::Exterior, "n={n} {:?}", a);
                assert_eq!(v.partition.unwrap().total(), n);
            }
        }
    }

    #[test]
    fn merged_clusters_reduce_partition() {
        let tol = Tolerances::default();
        // (1,1,1,1,1) face point; merging two adjacent roots gives a (2,1,1,1) point.
        let angles = [0.3, 1.4, 2.9, 4.0, 5.2];
        let shift = -(angles.iter().sum::<f64>()) + PI;
        let mut thetas: Vec<f64> = angles.to_vec();
        thetas[4] += shift; // product of roots becomes -1 = (-1)^5
        let roots: Vec<Complex64> = thetas.iter().map(|&t| Complex64::from_polar(1.0, t)).collect();
        let w = classify_partition(&roots_from_coeffs(&coeffs_from_roots(&roots)).unwrap(), &tol).unwrap();

        let mid = 0.5 * (thetas[1] + thetas[2]);
        let mut merged = thetas.clone();
        merged[1] = mid;
        merged[2] = mid;
        let merged_roots: Vec<Complex64> = merged.iter().map(|&t| Complex64::from_polar(1.0, t)).collect();
        let u = classify_partition(&roots_from_coeffs(&coeffs_from_roots(&merged_roots)).unwrap(), &tol).unwrap();
        assert_eq!(w, p(&[1, 1, 1, 1, 1]));
        assert_eq!(u, p(&[2, 1, 1, 1]));
        assert!(u.precedes(&w));
    }

    #[test]
    fn coefficient_bound_agrees_with_roots() {
        let tol = Tolerances::default();
        let mut stream = rng::stream(2, 0);
        let mut checked = 0;
        while checked < 200 {
            let n = stream.random_range(3..=6);
            let a = RealCoeffVector::new((0..n - 1).map(|_| stream.random_range(-40.0..40.0)).collect()).unwrap();
            if violates_coefficient_bound(&a, 1e-8).unwrap() {
                assert_eq!(classify(&a, &tol).unwrap().status, Status::Exterior);
                checked += 1;
            }
        }
    }
}
