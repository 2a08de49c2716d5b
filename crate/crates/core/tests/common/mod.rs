#![allow(dead_code)]

use critgeom_core::experiments::{disk_point, random_disk_roots};
use critgeom_core::surface::branch_projections;
use critgeom_core::{is_simple, Complex64, Polynomial};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Monic polynomial with `deg` roots uniform in the closed unit disk.
pub fn disk_poly(rng: &mut ChaCha8Rng, deg: usize) -> Polynomial {
    Polynomial::from_roots(&random_disk_roots(rng, deg)).unwrap()
}

/// Like [`disk_poly`] but redrawn until simple.
pub fn simple_disk_poly(rng: &mut ChaCha8Rng, deg: usize) -> Polynomial {
    loop {
        let p = disk_poly(rng, deg);
        if is_simple(&p, 1e-7).unwrap().simple {
            return p;
        }
    }
}

/// Point uniform in the disk of the given radius.
pub fn point_in(rng: &mut ChaCha8Rng, radius: f64) -> Complex64 {
    disk_point(rng) * radius
}

pub fn unit(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::from_polar(1.0, rng.random::<f64>() * std::f64::consts::TAU)
}

/// Distance from the segment `[a, b]` to `z`.
pub fn segment_distance(a: Complex64, b: Complex64, z: Complex64) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (z - a).norm();
    }
    let s = (((z - a) * d.conj()).re / len2).clamp(0.0, 1.0);
    (a + d * s - z).norm()
}

/// Smallest distance from the segment to a branch projection of `q`.
pub fn branch_clearance(q: &Polynomial, a: Complex64, b: Complex64) -> f64 {
    branch_projections(q)
        .unwrap()
        .iter()
        .map(|(w, _)| segment_distance(a, b, *w))
        .fold(f64::INFINITY, f64::min)
}

/// Naive `sum a_k z^k` with explicit powers.
pub fn naive_eval(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs.iter().enumerate().map(|(k, a)| a * z.powu(k as u32)).sum()
}

/// Roots of `a z^2 + b z + c`.
pub fn quadratic_roots(a: Complex64, b: Complex64, c0: Complex64) -> [Complex64; 2] {
    let disc = (b * b - a * c0 * 4.0).sqrt();
    [(-b + disc) / (a * 2.0), (-b - disc) / (a * 2.0)]
}

/// Greedy one-to-one matching of `a` onto `b`; largest matched distance, or
/// infinity when two entries of `a` claim the same entry of `b`.
pub fn match_sets(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; b.len()];
    let mut worst = 0.0f64;
    for x in a {
        let (j, d) = b
            .iter()
            .enumerate()
            .map(|(j, y)| (j, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .unwrap();
        if used[j] {
            return f64::INFINITY;
        }
        used[j] = true;
        worst = worst.max(d);
    }
    worst
}

/// Smallest distance from the segment to a zero of `q`.
pub fn zero_clearance(q: &Polynomial, a: Complex64, b: Complex64) -> f64 {
    q.roots().unwrap().roots.iter().map(|z| segment_distance(a, b, *z)).fold(f64::INFINITY, f64::min)
}

/// Seeded instance for the two forms of the ratio `f`: a simple polynomial
/// with disk roots, a designated zero, a critical point and a straight path
/// from the zero that keeps 0.1 away from branch projections and zeros of the
/// cofactor.
pub struct IdentityInstance {
    pub p: Polynomial,
    pub z1_index: usize,
    pub zeta_index: usize,
    pub end: Complex64,
}

pub fn identity_instance(r: &mut ChaCha8Rng) -> IdentityInstance {
    use critgeom_core::experiments::split_designated;
    loop {
        let deg = r.random_range(3..=6);
        let p = simple_disk_poly(r, deg);
        let z1_index = r.random_range(0..deg);
        let (z1, q) = split_designated(&p, z1_index).unwrap();
        let end = z1 + point_in(r, 1.0);
        if branch_clearance(&q, z1, end) < 0.1 || zero_clearance(&q, z1, end) < 0.1 {
            continue;
        }
        let zeta_index = r.random_range(0..deg - 1);
        return IdentityInstance { p, z1_index, zeta_index, end };
    }
}
