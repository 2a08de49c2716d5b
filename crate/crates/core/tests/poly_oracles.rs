mod common;

use common::{c, disk_poly, match_sets, naive_eval, rng};
use critgeom_core::experiments::random_disk_roots;
use critgeom_core::{is_simple, Complex64, Polynomial};
use proptest::prelude::*;
use rand::Rng;

#[test]
fn evaluation_matches_power_sums() {
    let mut r = rng(1);
    for _ in 0..200 {
        let coeffs: Vec<Complex64> = (0..7).map(|_| c(r.random::<f64>() * 2.0 - 1.0, r.random::<f64>() * 2.0 - 1.0)).collect();
        let p = Polynomial::new(coeffs.clone()).unwrap();
        let z = c(r.random::<f64>() * 3.0 - 1.5, r.random::<f64>() * 3.0 - 1.5);
        let naive = naive_eval(&coeffs, z);
        assert!((p.eval(z) - naive).norm() <= 1e-12 * (1.0 + naive.norm()));
    }
    let p = Polynomial::from_real(&[-1.0, 0.0, 1.0]).unwrap();
    assert_eq!(p.eval(c(2.0, 0.0)), c(3.0, 0.0));
    assert_eq!(Polynomial::unit_roots(3).eval(c(1.0, 0.0)), c(0.0, 0.0));
}

#[test]
fn derivative_matches_central_differences() {
    let mut r = rng(2);
    let h = 1e-5;
    for _ in 0..100 {
        let p = disk_poly(&mut r, 6);
        let z = c(r.random::<f64>() - 0.5, r.random::<f64>() - 0.5);
        let fd = (p.eval(z + h) - p.eval(z - h)) / (2.0 * h);
        assert!((p.eval_derivative(z) - fd).norm() < 1e-6);
        let dp = p.derivative().unwrap();
        assert_eq!(dp.degree(), 5);
        let fd2 = (dp.eval(z + h) - dp.eval(z - h)) / (2.0 * h);
        assert!((p.eval_second_derivative(z) - fd2).norm() < 1e-6);
    }
}

/// `prod (z - s_j)` expanded by summing over subsets: the coefficient of
/// `z^k` is `(-1)^(n-k)` times the elementary symmetric polynomial `e_{n-k}`.
fn subset_expansion(roots: &[Complex64]) -> Vec<Complex64> {
    let n = roots.len();
    let mut coeffs = vec![c(0.0, 0.0); n + 1];
    for mask in 0u32..(1 << n) {
        let mut prod = c(1.0, 0.0);
        for (j, s) in roots.iter().enumerate() {
            if mask & (1 << j) != 0 {
                prod *= -s;
            }
        }
        coeffs[n - mask.count_ones() as usize] += prod;
    }
    coeffs
}

#[test]
fn from_roots_matches_subset_expansion() {
    let mut r = rng(3);
    for n in 1..=8 {
        for _ in 0..10 {
            let roots = random_disk_roots(&mut r, n);
            let p = Polynomial::from_roots(&roots).unwrap();
            let oracle = subset_expansion(&roots);
            let scale = oracle.iter().map(|a| a.norm()).fold(0.0, f64::max);
            for (a, b) in p.coeffs().iter().zip(&oracle) {
                assert!((a - b).norm() <= 1e-13 * scale.max(1.0));
            }
        }
    }
    let p = Polynomial::from_roots(&[c(0.0, 0.0); 3]).unwrap();
    assert_eq!(p.coeffs(), &[c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
}

#[test]
fn roots_round_trip() {
    let mut r = rng(4);
    let mut done = 0;
    while done < 100 {
        let n = r.random_range(1..=8);
        let roots = random_disk_roots(&mut r, n);
        let gap = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| (roots[i] - roots[j]).norm())
            .fold(f64::INFINITY, f64::min);
        if gap < 0.05 {
            continue;
        }
        let found = Polynomial::from_roots(&roots).unwrap().roots().unwrap();
        assert_eq!(found.len(), n);
        assert!(match_sets(&roots, &found.roots) < 1e-8);
        done += 1;
    }
}

#[test]
fn scaled_roots_are_scaled() {
    let mut r = rng(5);
    for _ in 0..50 {
        let roots = random_disk_roots(&mut r, 5);
        let p = Polynomial::from_roots(&roots).unwrap();
        let s = 0.5 + 3.0 * r.random::<f64>();
        let scaled = p.scale(s).unwrap().roots().unwrap();
        let expected: Vec<Complex64> = p.roots().unwrap().roots.iter().map(|z| z * s).collect();
        assert!(match_sets(&expected, &scaled.roots) < 1e-10 * s.max(1.0) * 10.0);
    }
    let p = Polynomial::from_real(&[-1.0, 0.0, 1.0]).unwrap();
    assert_eq!(p.scale(2.0).unwrap(), Polynomial::from_real(&[-4.0, 0.0, 1.0]).unwrap());
    assert_eq!(p.scale(1.0).unwrap(), p);
}

#[test]
fn critical_points_satisfy_logarithmic_derivative() {
    let mut r = rng(6);
    for _ in 0..100 {
        let n = r.random_range(2..=8);
        let roots = random_disk_roots(&mut r, n);
        let crit = Polynomial::from_roots(&roots).unwrap().derivative().unwrap().roots().unwrap();
        for zeta in crit.roots {
            let min_dist = roots.iter().map(|s| (zeta - s).norm()).fold(f64::INFINITY, f64::min);
            if min_dist < 1e-3 {
                continue;
            }
            let sum: Complex64 = roots.iter().map(|s| (zeta - s).inv()).sum();
            let size: f64 = roots.iter().map(|s| 1.0 / (zeta - s).norm()).sum();
            assert!(sum.norm() <= 1e-8 * size, "sum {sum} size {size}");
        }
    }
}

#[test]
fn simplicity_examples() {
    assert!(is_simple(&Polynomial::from_real(&[-1.0, 0.0, 1.0]).unwrap(), 1e-7).unwrap().simple);
    let double = is_simple(&Polynomial::from_real(&[0.0, 0.0, 1.0]).unwrap(), 1e-7).unwrap();
    assert!(!double.simple);
    assert!(double.witness.unwrap().distance <= 1e-7);
    let p = Polynomial::from_roots(&[c(0.5, 0.0), c(0.5, 0.0), c(-0.5, 0.0)]).unwrap();
    assert!(!is_simple(&p, 1e-7).unwrap().simple);
}

fn arb_roots(max: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((0.0f64..=1.0, 0.0f64..std::f64::consts::TAU), 1..=max)
}

fn polar(v: &[(f64, f64)]) -> Vec<Complex64> {
    v.iter().map(|&(r, t)| Complex64::from_polar(r, t)).collect()
}

proptest! {
    #[test]
    fn scaling_covariance_of_values(roots in arb_roots(8), s in 0.1f64..4.0, zr in 0.0f64..2.0, zt in 0.0f64..6.0) {
        let p = Polynomial::from_roots(&polar(&roots)).unwrap();
        let z = Complex64::from_polar(zr, zt);
        let n = p.degree() as i32;
        let lhs = p.scale(s).unwrap().eval(z * s);
        let rhs = p.eval(z) * s.powi(n);
        let size = p.eval_scale(z) * s.powi(n);
        prop_assert!((lhs - rhs).norm() <= 1e-10 * size);
    }

    #[test]
    fn round_trip_separated(roots in arb_roots(10)) {
        let roots = polar(&roots);
        let n = roots.len();
        let gap = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| (roots[i] - roots[j]).norm()).fold(f64::INFINITY, f64::min);
        prop_assume!(gap >= 0.05);
        let found = Polynomial::from_roots(&roots).unwrap().roots().unwrap();
        prop_assert!(match_sets(&roots, &found.roots) < 1e-8);
    }

    #[test]
    fn derivative_drops_degree(roots in arb_roots(8)) {
        let p = Polynomial::from_roots(&polar(&roots)).unwrap();
        prop_assert_eq!(p.derivative().unwrap().degree(), p.degree() - 1);
    }

    #[test]
    fn json_round_trip(roots in arb_roots(6)) {
        let p = Polynomial::from_roots(&polar(&roots)).unwrap();
        let text = serde_json::to_string(&p).unwrap();
        let back: Polynomial = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, p);
    }
}

#[test]
fn json_rejects_bad_input() {
    assert!(serde_json::from_str::<Polynomial>(r#"{"coeffs": []}"#).is_err());
    assert!(serde_json::from_str::<Polynomial>(r#"{"coeffs": [[0, 0]]}"#).is_err());
    assert!(serde_json::from_str::<Polynomial>(r#"{"coeffs": [[1, 0]], "extra": 1}"#).is_err());
    let p: Polynomial = serde_json::from_str(r#"{"coeffs": [[-1, 0], [0, 0], [1, 0]]}"#).unwrap();
    assert_eq!(p.degree(), 2);
}
