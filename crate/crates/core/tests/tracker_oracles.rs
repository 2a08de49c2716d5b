mod common;

use common::{branch_clearance, c, match_sets, point_in, rng, simple_disk_poly};
use critgeom_core::surface::{branch_projections, phi};
use critgeom_core::tracker::{
    davidenko_rhs, q_prime_of_q, q_second_of_q, track, track_all, Path, Predictor, TrackConfig, Variation,
};
use critgeom_core::{Complex64, Polynomial};
use proptest::prelude::*;
use rand::Rng;

fn big_q(q: &Polynomial, u: Complex64) -> Polynomial {
    q.mul(&Polynomial::new(vec![-u, c(1.0, 0.0)]).unwrap())
}

#[test]
fn first_and_second_derivative_of_q_by_expansion() {
    let mut r = rng(21);
    for _ in 0..100 {
        let q = simple_disk_poly(&mut r, 4);
        let (z, u) = (point_in(&mut r, 1.5), point_in(&mut r, 1.5));
        let full = big_q(&q, u);
        let d1 = full.eval_derivative(z);
        let d2 = full.eval_second_derivative(z);
        assert!((q_prime_of_q(&q, z, u) - d1).norm() <= 1e-12 * (1.0 + d1.norm()));
        assert!((q_second_of_q(&q, z, u) - d2).norm() <= 1e-12 * (1.0 + d2.norm()));
    }
    let q = Polynomial::from_real(&[1.0, 1.0]).unwrap();
    assert_eq!(q_prime_of_q(&q, c(0.0, 0.0), c(1.0, 0.0)), c(0.0, 0.0));
    assert_eq!(q_second_of_q(&q, c(0.3, 2.0), c(-1.0, 0.5)), c(2.0, 0.0));
}

/// A start on a generic line path: random q, random endpoints with clearance
/// from every branch projection.
fn generic_instance(r: &mut rand_chacha::ChaCha8Rng, deg: usize, clearance: f64) -> (Polynomial, Complex64, Complex64) {
    loop {
        let q = simple_disk_poly(r, deg);
        let (a, b) = (point_in(r, 1.5), point_in(r, 1.5));
        if branch_clearance(&q, a, b) >= clearance {
            return (q, a, b);
        }
    }
}

#[test]
fn rhs_matches_finite_difference_of_tracked_path() {
    let mut r = rng(22);
    let cfg = TrackConfig::default();
    for _ in 0..30 {
        let (q, u0, _) = generic_instance(&mut r, 3, 0.1);
        let zeta0 = Variation::new(&q).critical_points(u0).unwrap().roots[0];
        let h = 1e-4;
        let dir = Complex64::from_polar(1.0, r.random::<f64>() * std::f64::consts::TAU);
        let fwd = track(&q, &Path::line(u0, u0 + dir * h), zeta0, &cfg).unwrap().end_zeta;
        let bwd = track(&q, &Path::line(u0, u0 - dir * h), zeta0, &cfg).unwrap().end_zeta;
        let fd = (fwd - bwd) / (dir * (2.0 * h));
        let rhs = davidenko_rhs(&q, u0, zeta0).unwrap();
        assert!((fd - rhs).norm() < 1e-5 * (1.0 + rhs.norm()), "{fd} vs {rhs}");
    }
}

#[test]
fn rhs_examples() {
    let b = c(0.3, -0.7);
    let q = Polynomial::new(vec![-b, c(1.0, 0.0)]).unwrap();
    assert_eq!(davidenko_rhs(&q, c(2.0, 1.0), c(0.1, 0.4)).unwrap(), c(0.5, 0.0));
    let cc = 0.6;
    let q = Polynomial::from_real(&[-cc * cc, 0.0, 1.0]).unwrap();
    let w = c(0.0, cc / 3f64.sqrt());
    let u = phi(&q, w).unwrap();
    assert!(matches!(davidenko_rhs(&q, u, w), Err(critgeom_core::Error::BranchPointSingularity { .. })));
}

#[test]
fn endpoint_matches_direct_solve() {
    let mut r = rng(23);
    let cfg = TrackConfig::default();
    for _ in 0..50 {
        let (q, a, b) = generic_instance(&mut r, 3, 0.05);
        let var = Variation::new(&q);
        let end_roots = var.critical_points(b).unwrap().roots;
        for zeta in var.critical_points(a).unwrap().roots {
            let traj = track(&q, &Path::line(a, b), zeta, &cfg).unwrap();
            let mut d: Vec<f64> = end_roots.iter().map(|z| (z - traj.end_zeta).norm()).collect();
            d.sort_by(f64::total_cmp);
            assert!(d[0] < 1e-8 && d[1] > 1e-8);
            for s in &traj.samples {
                assert!((phi(&q, s.zeta).unwrap() - s.u).norm() < 1e-9 * (1.0 + s.u.norm()));
            }
        }
    }
}

#[test]
fn lockstep_sheets_are_the_critical_set() {
    let mut r = rng(24);
    let cfg = TrackConfig::default();
    for _ in 0..20 {
        let (q, a, b) = generic_instance(&mut r, 3, 0.05);
        let trajs = track_all(&q, &Path::line(a, b), &cfg).unwrap();
        assert_eq!(trajs.len(), 3);
        let var = Variation::new(&q);
        for k in 0..trajs[0].samples.len() {
            let u = trajs[0].samples[k].u;
            let zetas: Vec<Complex64> = trajs.iter().map(|t| t.samples[k].zeta).collect();
            assert!(trajs.iter().all(|t| t.samples[k].t == trajs[0].samples[k].t));
            assert!(match_sets(&zetas, &var.critical_points(u).unwrap().roots) < 1e-8);
        }
    }
    let q = Polynomial::from_real(&[1.0, 1.0]).unwrap();
    assert_eq!(track_all(&q, &Path::line(c(0.0, 0.0), c(1.0, 1.0)), &cfg).unwrap().len(), 1);
}

#[test]
fn small_loops_close() {
    let mut r = rng(25);
    let cfg = TrackConfig::default();
    let mut done = 0;
    while done < 20 {
        let q = simple_disk_poly(&mut r, 3);
        let center = point_in(&mut r, 1.2);
        let radius = 0.05;
        let near = branch_projections(&q).unwrap().iter().map(|(w, _)| (w - center).norm()).fold(f64::INFINITY, f64::min);
        if near < 4.0 * radius {
            continue;
        }
        let path = Path::circle(center, radius, 0.0).unwrap();
        for traj in track_all(&q, &path, &cfg).unwrap() {
            assert!((traj.end_zeta - traj.start_zeta).norm() < 1e-8);
        }
        done += 1;
    }
}

#[test]
fn halving_the_step_does_not_move_the_endpoint() {
    let mut r = rng(26);
    for _ in 0..20 {
        let (q, a, b) = generic_instance(&mut r, 4, 0.05);
        let zeta = Variation::new(&q).critical_points(a).unwrap().roots[1];
        let coarse = TrackConfig::default();
        let fine = TrackConfig { max_step: coarse.max_step / 2.0, initial_step: coarse.initial_step / 2.0, ..coarse };
        let e1 = track(&q, &Path::line(a, b), zeta, &coarse).unwrap().end_zeta;
        let e2 = track(&q, &Path::line(a, b), zeta, &fine).unwrap().end_zeta;
        assert!((e1 - e2).norm() < 1e-8);
        let euler = TrackConfig { predictor: Predictor::Euler, ..coarse };
        let e3 = track(&q, &Path::line(a, b), zeta, &euler).unwrap().end_zeta;
        assert!((e1 - e3).norm() < 1e-8);
    }
}

#[test]
fn linear_and_constant_examples() {
    let cfg = TrackConfig::default();
    let q = Polynomial::from_real(&[1.0, 1.0]).unwrap();
    let traj = track(&q, &Path::line(c(1.0, 0.0), c(0.0, 1.0)), c(0.0, 0.0), &cfg).unwrap();
    assert!((traj.end_zeta - c(-0.5, 0.5)).norm() < 1e-12);
    let q3 = Polynomial::from_roots(&[c(0.2, 0.1), c(-0.4, 0.5), c(0.6, -0.3)]).unwrap();
    let u0 = c(0.9, 0.9);
    let z0 = Variation::new(&q3).critical_points(u0).unwrap().roots[2];
    let traj = track(&q3, &Path::constant(u0), z0, &cfg).unwrap();
    assert_eq!(traj.end_zeta, traj.start_zeta);
    assert!(traj.samples.iter().all(|s| s.zeta == traj.start_zeta));
}

#[test]
fn start_must_be_critical() {
    let q = Polynomial::from_real(&[1.0, 1.0]).unwrap();
    let err = track(&q, &Path::line(c(1.0, 0.0), c(0.0, 1.0)), c(0.3, 0.0), &TrackConfig::default());
    assert!(matches!(err, Err(critgeom_core::Error::StartNotCritical { .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn linear_q_follows_midpoint(br in -1.0f64..1.0, bi in -1.0f64..1.0,
                                 ar in -2.0f64..2.0, ai in -2.0f64..2.0,
                                 er in -2.0f64..2.0, ei in -2.0f64..2.0) {
        let b = c(br, bi);
        let q = Polynomial::new(vec![-b, c(1.0, 0.0)]).unwrap();
        let (a, e) = (c(ar, ai), c(er, ei));
        let traj = track(&q, &Path::line(a, e), (a + b) / 2.0, &TrackConfig::default()).unwrap();
        for s in &traj.samples {
            prop_assert!((s.zeta - (s.u + b) / 2.0).norm() <= 1e-10);
        }
    }

    #[test]
    fn samples_strictly_increase(seed in 0u64..1000) {
        let mut r = rng(seed);
        let (q, a, b) = generic_instance(&mut r, 3, 0.05);
        let zeta = Variation::new(&q).critical_points(a).unwrap().roots[0];
        let traj = track(&q, &Path::line(a, b), zeta, &TrackConfig::default()).unwrap();
        prop_assert_eq!(traj.samples[0].t, 0.0);
        prop_assert_eq!(traj.samples.last().unwrap().t, 1.0);
        prop_assert!(traj.samples.windows(2).all(|w| w[0].t < w[1].t));
        let scale = 1.0 + q.coefficient_scale();
        prop_assert!(traj.samples.iter().all(|s| s.residual <= 1e-9 * scale));
    }
}
