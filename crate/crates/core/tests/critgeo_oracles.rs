mod common;

use common::{c, disk_poly, quadratic_roots, rng};
use critgeom_core::critgeo::{
    critical_points, critical_radius, gauss_lucas_check, grr_disk_check, sendov_check, DiskLocation,
};
use critgeom_core::experiments::random_disk_roots;
use critgeom_core::{Complex64, Polynomial};
use proptest::prelude::*;
use rand::Rng;

#[test]
fn cubic_critical_points_by_quadratic_formula() {
    let mut r = rng(11);
    for _ in 0..200 {
        let p = disk_poly(&mut r, 3);
        let a = p.coeffs();
        // p' = 3 a3 z^2 + 2 a2 z + a1
        let oracle = quadratic_roots(a[3] * 3.0, a[2] * 2.0, a[1]);
        let found = critical_points(&p).unwrap().roots;
        for z in oracle {
            let d = found.iter().map(|w| (w - z).norm()).fold(f64::INFINITY, f64::min);
            // a near-double critical point is only determined to about sqrt(eps)
            let gap = (oracle[0] - oracle[1]).norm();
            assert!(d < if gap > 1e-3 { 1e-12 } else { 1e-7 }, "{d}");
        }
    }
}

#[test]
fn unit_roots_have_one_critical_point() {
    for n in 2..=12 {
        let crit = critical_points(&Polynomial::unit_roots(n)).unwrap();
        assert_eq!(crit.len(), n - 1);
        assert!(crit.roots.iter().all(|z| z.norm() < 1e-12));
        let rep = critical_radius(&Polynomial::unit_roots(n), c(1.0, 0.0)).unwrap();
        assert!((rep.rho - 1.0).abs() < 1e-10);
        assert_eq!(rep.essential.len(), 1);
    }
}

#[test]
fn midpoint_examples() {
    let p = Polynomial::from_roots(&[c(0.5, 0.0), c(-1.0, 0.0)]).unwrap();
    let rep = critical_radius(&p, c(0.5, 0.0)).unwrap();
    assert!((rep.rho - 0.75).abs() < 1e-15);
    assert_eq!(rep.essential, vec![c(-0.25, 0.0)]);
    let (a, b) = (c(0.3, -0.2), c(-0.6, 0.7));
    let rep = critical_radius(&Polynomial::from_roots(&[a, b]).unwrap(), a).unwrap();
    assert!((rep.rho - (a - b).norm() / 2.0).abs() < 1e-15);
}

/// Barycentric point-in-triangle test.
fn in_triangle(p: Complex64, a: Complex64, b: Complex64, cc: Complex64) -> bool {
    let cross = |u: Complex64, v: Complex64| u.re * v.im - u.im * v.re;
    let d1 = cross(b - a, p - a);
    let d2 = cross(cc - b, p - b);
    let d3 = cross(a - cc, p - cc);
    (d1 >= 0.0 && d2 >= 0.0 && d3 >= 0.0) || (d1 <= 0.0 && d2 <= 0.0 && d3 <= 0.0)
}

#[test]
fn gauss_lucas_triangle() {
    let roots = [c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 1.0)];
    let p = Polynomial::from_roots(&roots).unwrap();
    let a = p.coeffs();
    for z in quadratic_roots(a[3] * 3.0, a[2] * 2.0, a[1]) {
        assert!(in_triangle(z, roots[0], roots[1], roots[2]));
    }
    let rep = gauss_lucas_check(&p).unwrap();
    assert!(rep.inside && rep.worst_signed_distance < 0.0);

    let collinear = Polynomial::from_roots(&[c(-1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
    assert!(gauss_lucas_check(&collinear).unwrap().inside);
    assert!(gauss_lucas_check(&Polynomial::unit_roots(7)).unwrap().inside);
}

#[test]
fn gauss_lucas_against_triangle_oracle() {
    let mut r = rng(12);
    for _ in 0..200 {
        let roots = random_disk_roots(&mut r, 3);
        let p = Polynomial::from_roots(&roots).unwrap();
        let rep = gauss_lucas_check(&p).unwrap();
        assert!(rep.inside);
        for z in critical_points(&p).unwrap().roots {
            // strictly inside by the oracle unless within rounding of an edge
            if rep.worst_signed_distance < -1e-9 {
                assert!(in_triangle(z, roots[0], roots[1], roots[2]));
            }
        }
    }
}

#[test]
fn sendov_examples() {
    let rep = sendov_check(&Polynomial::unit_roots(5), true).unwrap();
    assert!((rep.max_distance - 1.0).abs() < 1e-12 && rep.passes);
    let rep = sendov_check(&Polynomial::from_roots(&[c(0.0, 0.0), c(1.0, 0.0)]).unwrap(), true).unwrap();
    assert!(rep.per_zero.iter().all(|row| (row.distance - 0.5).abs() < 1e-15));
    let brute = |p: &Polynomial| {
        let crit = critical_points(p).unwrap().roots;
        p.roots()
            .unwrap()
            .roots
            .iter()
            .map(|z| crit.iter().map(|w| (w - z).norm()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    let mut r = rng(13);
    for _ in 0..100 {
        let n = r.random_range(2..=8);
        let p = disk_poly(&mut r, n);
        assert!((sendov_check(&p, true).unwrap().max_distance - brute(&p)).abs() < 1e-15);
    }
}

#[test]
fn grr_examples() {
    let rep = grr_disk_check(&Polynomial::from_real(&[-1.0, 0.0, 1.0]).unwrap()).unwrap();
    assert!(rep.has_closed_disk_zero && !rep.has_open_disk_zero && rep.all_on_circle);
    let rep = grr_disk_check(&Polynomial::unit_roots(3)).unwrap();
    assert!(rep.has_closed_disk_zero && !rep.has_open_disk_zero);

    // (z - 1)(z + 0.5)^2: p' = (z + 0.5)(3z - 1.5), critical points -0.5 and 0.5
    let p = Polynomial::from_roots(&[c(1.0, 0.0), c(-0.5, 0.0), c(-0.5, 0.0)]).unwrap();
    let a = p.coeffs();
    let oracle = quadratic_roots(a[3] * 3.0, a[2] * 2.0, a[1]);
    let rep = grr_disk_check(&p).unwrap();
    for z in oracle {
        let w = rep.witnesses.iter().min_by(|x, y| (x.zeta - z).norm().total_cmp(&(y.zeta - z).norm())).unwrap();
        let expected = if (z * 2.0 - 1.0).norm() < 1.0 { DiskLocation::Inside } else { DiskLocation::Outside };
        assert_eq!(w.location, expected);
    }
    assert!(rep.has_open_disk_zero);
}

fn arb_config() -> impl Strategy<Value = (Vec<(f64, f64)>, usize)> {
    prop::collection::vec((0.0f64..=1.0, 0.0f64..std::f64::consts::TAU), 2..=8)
        .prop_flat_map(|v| {
            let n = v.len();
            (Just(v), 0..n)
        })
}

proptest! {
    #[test]
    fn radius_scales(cfg in arb_config(), s in 0.2f64..5.0) {
        let (v, k) = cfg;
        let roots: Vec<Complex64> = v.iter().map(|&(r, t)| Complex64::from_polar(r, t)).collect();
        let p = Polynomial::from_roots(&roots).unwrap();
        let rho = critical_radius(&p, roots[k]).unwrap().rho;
        let scaled = critical_radius(&p.scale(s).unwrap(), roots[k] * s).unwrap().rho;
        prop_assert!((scaled - s * rho).abs() <= 1e-9 * (s * rho).max(1e-3));
    }

    #[test]
    fn radius_rotation_invariant(cfg in arb_config(), alpha in 0.0f64..std::f64::consts::TAU) {
        let (v, k) = cfg;
        let rot = Complex64::from_polar(1.0, alpha);
        let roots: Vec<Complex64> = v.iter().map(|&(r, t)| Complex64::from_polar(r, t)).collect();
        let turned: Vec<Complex64> = roots.iter().map(|z| z * rot).collect();
        let a = critical_radius(&Polynomial::from_roots(&roots).unwrap(), roots[k]).unwrap().rho;
        let b = critical_radius(&Polynomial::from_roots(&turned).unwrap(), turned[k]).unwrap().rho;
        prop_assert!((a - b).abs() <= 1e-9);
    }

    #[test]
    fn essential_points_on_critical_circle(cfg in arb_config()) {
        let (v, k) = cfg;
        let roots: Vec<Complex64> = v.iter().map(|&(r, t)| Complex64::from_polar(r, t)).collect();
        let rep = critical_radius(&Polynomial::from_roots(&roots).unwrap(), roots[k]).unwrap();
        prop_assert!(!rep.essential.is_empty());
        for z in &rep.essential {
            prop_assert!(((z - roots[k]).norm() - rep.rho).abs() <= 1e-9 * (1.0 + rep.rho));
        }
        let min = rep.critical.iter().map(|z| (z - roots[k]).norm()).fold(f64::INFINITY, f64::min);
        prop_assert_eq!(min, rep.rho);
    }
}

#[test]
fn not_a_zero_is_rejected() {
    let err = critical_radius(&Polynomial::unit_roots(3), c(0.5, 0.0));
    assert!(matches!(err, Err(critgeom_core::Error::NotAZero { .. })));
    let err = grr_disk_check(&Polynomial::from_real(&[-4.0, 0.0, 1.0]).unwrap());
    assert!(matches!(err, Err(critgeom_core::Error::NotAZero { .. })));
    let outside = Polynomial::from_roots(&[c(2.0, 0.0), c(0.0, 0.0)]).unwrap();
    assert!(matches!(sendov_check(&outside, true), Err(critgeom_core::Error::RootOutsideDisk { .. })));
}
