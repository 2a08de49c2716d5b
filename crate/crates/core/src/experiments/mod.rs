//! Quantitative experiments on the variation `Q(z, u) = (z - u) q(z)` of a
//! polynomial `p = (z - z1) q` in one of its zeros.
//!
//! Along a continuation `zeta(u)` of a critical point `zeta` of `p`, the ratio
//! `f = (zeta(u) - u) / (zeta - z1)` has two expressions:
//!
//! * closed form `f = (q'/q)(zeta) * (q/q')(zeta(u))`, from `Q'(zeta(u), u) = 0`;
//! * integral form `f = exp( int_gamma zeta'(v)/(zeta(v) - v) + (q'/q)(zeta(v)) dv )`.
//!
//! [`verify_identity`] computes both and the distance identity
//! `|zeta(u) - u| = |zeta - z1| |f|`.

mod blowup;
mod sample;
mod search;

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use blowup::{blowup_scan, BlowupRow, BlowupScan};
pub use sample::{disk_point, random_disk_roots, random_pn_sample, random_pn_sample_with_stats, random_pn_with_root, SampleStats};
pub use search::{
    critical_radius_of_roots, distance_to_extremal, maximize_rho, MaximalSearchResult, SearchConfig, TracePoint,
};

use crate::critgeo::{critical_points, critical_radius};
use crate::error::{Error, Result};
use crate::poly::{is_simple, Polynomial, RootConfig};
use crate::tracker::{track, Path, Piece, TrackConfig, Trajectory, Variation};

/// Relative floor for `|q|` and `|q'|` in the closed form of `f`.
pub const EVAL_FLOOR: f64 = 1e-14;

/// Tolerance for `|w0| = 1`.
pub const UNIT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub track: TrackConfig,
    /// Stop refining the quadrature once the accumulated log changes by less than this.
    pub quadrature_tol: f64,
    /// Each tracker step is split into at most `2^max_level` quadrature panels.
    pub max_level: u32,
    /// `|q(zeta)|` below this (relative) makes the integrand singular.
    pub singular_clearance: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig { track: TrackConfig::default(), quadrature_tol: 1e-8, max_level: 8, singular_clearance: 1e-10 }
    }
}

/// `(q'/q)(zeta_start) * (q/q')(zeta_end)`.
pub fn f_closed(q: &Polynomial, zeta_start: Complex64, zeta_end: Complex64) -> Result<Complex64> {
    let dq = q.derivative().ok();
    let dscale = |z: Complex64| dq.as_ref().map_or(1.0, |d| d.eval_scale(z));
    let (qs, dqs) = q.eval_d1(zeta_start);
    if qs.norm() <= EVAL_FLOOR * q.eval_scale(zeta_start) {
        return Err(Error::SingularEvaluation(format!("q vanishes at the start point {zeta_start}")));
    }
    let (qe, dqe) = q.eval_d1(zeta_end);
    if dqe.norm() <= EVAL_FLOOR * dscale(zeta_end) {
        return Err(Error::SingularEvaluation(format!("q' vanishes at the end point {zeta_end}")));
    }
    Ok(dqs / qs * (qe / dqe))
}

/// `f` by quadrature along the continuation of `zeta_start` over `path`.
pub fn f_integral(q: &Polynomial, path: &Path, zeta_start: Complex64, cfg: &ExperimentConfig) -> Result<Complex64> {
    let traj = track(q, path, zeta_start, &cfg.track)?;
    Ok(log_integral(&Variation::new(q), path, &traj, cfg)?.exp())
}

const GAUSS_NODES: [f64; 5] = [-0.906_179_845_938_664, -0.538_469_310_105_683_1, 0.0, 0.538_469_310_105_683_1, 0.906_179_845_938_664];
const GAUSS_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_1,
    0.478_628_670_499_366_5,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
];

struct Interval {
    piece: Piece,
    ta: f64,
    tb: f64,
    za: Complex64,
    zb: Complex64,
    /// `d zeta / dt` at both ends, when available.
    slopes: Option<(Complex64, Complex64)>,
}

impl Interval {
    fn guess(&self, t: f64) -> Complex64 {
        let h = self.tb - self.ta;
        let s = (t - self.ta) / h;
        match self.slopes {
            Some((da, db)) => {
                let (s2, s3) = (s * s, s * s * s);
                self.za * (2.0 * s3 - 3.0 * s2 + 1.0)
                    + da * (h * (s3 - 2.0 * s2 + s))
                    + self.zb * (3.0 * s2 - 2.0 * s3)
                    + db * (h * (s3 - s2))
            }
            None => self.za + (self.zb - self.za) * s,
        }
    }
}

fn zeta_slope(var: &Variation, piece: &Piece, t: f64, zeta: Complex64) -> Option<Complex64> {
    let u = piece.point(t);
    let (_, dq, ddq) = var.q_derivs(zeta);
    let second = dq * 2.0 + (zeta - u) * ddq;
    let v = dq / second * piece.velocity(t);
    (v.re.is_finite() && v.im.is_finite()).then_some(v)
}

fn newton(var: &Variation, start: Complex64, u: Complex64) -> Option<Complex64> {
    let mut z = start;
    for _ in 0..12 {
        let (f, df) = var.first_second(z, u);
        if f.norm_sqr() == 0.0 {
            return Some(z);
        }
        let dz = f / df;
        if !(dz.re.is_finite() && dz.im.is_finite()) {
            return None;
        }
        z -= dz;
        if dz.norm() <= 1e-15 * (1.0 + z.norm()) {
            return Some(z);
        }
    }
    (var.first(z, u).norm() <= 1e-12 * var.first_scale(z, u)).then_some(z)
}

/// `log f` accumulated panel by panel over the tracker's own grid.
fn log_integral(var: &Variation, path: &Path, traj: &Trajectory, cfg: &ExperimentConfig) -> Result<Complex64> {
    let pieces = path.pieces();
    let mut intervals = Vec::with_capacity(traj.samples.len());
    let mut k = 0;
    for w in traj.samples.windows(2) {
        let (a, b) = (w[0], w[1]);
        while k + 1 < pieces.len() && a.t >= pieces[k].t1 {
            k += 1;
        }
        let piece = pieces[k];
        let slopes = zeta_slope(var, &piece, a.t, a.zeta).zip(zeta_slope(var, &piece, b.t, b.zeta));
        intervals.push(Interval { piece, ta: a.t, tb: b.t, za: a.zeta, zb: b.zeta, slopes });
    }

    let integrand = |iv: &Interval, t: f64| -> Result<Complex64> {
        let vel = iv.piece.velocity(t);
        if vel.norm_sqr() == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let v = iv.piece.point(t);
        let guess = iv.guess(t);
        let zeta = newton(var, guess, v).ok_or(Error::CorrectorFailure { t })?;
        let spread = (iv.zb - iv.za).norm();
        if (zeta - guess).norm() > 0.5 * spread + 1e-9 * (1.0 + zeta.norm()) {
            return Err(Error::CorrectorFailure { t });
        }
        let (qv, dq, ddq) = var.q_derivs(zeta);
        if qv.norm() <= cfg.singular_clearance * var.q().eval_scale(zeta) {
            return Err(Error::SingularEvaluation(format!("continuation meets a zero of q at {zeta}")));
        }
        let second = dq * 2.0 + (zeta - v) * ddq;
        let zeta_prime = dq / second;
        Ok((zeta_prime / (zeta - v) + dq / qv) * vel)
    };

    let mut previous: Option<Complex64> = None;
    let mut change = f64::INFINITY;
    for level in 0..=cfg.max_level {
        let panels = 1usize << level;
        let mut total = Complex64::new(0.0, 0.0);
        let mut coarse = false;
        for iv in &intervals {
            let width = (iv.tb - iv.ta) / panels as f64;
            for p in 0..panels {
                let mid = iv.ta + width * (p as f64 + 0.5);
                let mut inc = Complex64::new(0.0, 0.0);
                for (x, w) in GAUSS_NODES.iter().zip(GAUSS_WEIGHTS) {
                    inc += integrand(iv, mid + 0.5 * width * x)? * (0.5 * width * w);
                }
                // keep every increment on the principal branch
                coarse |= inc.norm() >= FRAC_PI_2;
                total += inc;
            }
        }
        if let Some(prev) = previous {
            change = (total - prev).norm();
            if !coarse && change < cfg.quadrature_tol {
                return Ok(total);
            }
        }
        previous = Some(total);
    }
    Err(Error::QuadratureNotConverged { change })
}

/// Zero `z1` (by index into the `(re, im)`-sorted roots of `p`) and the cofactor
/// `q` with `p = (z - z1) q`.
pub fn split_designated(p: &Polynomial, z1_index: usize) -> Result<(Complex64, Polynomial)> {
    if p.degree() < 2 {
        return Err(Error::DegreeTooLow { degree: p.degree(), required: 2 });
    }
    let roots = p.roots()?.roots;
    let z1 = *roots
        .get(z1_index)
        .ok_or_else(|| Error::Precondition(format!("zero index {z1_index} out of range 0..{}", roots.len())))?;
    let others: Vec<Complex64> = roots.iter().enumerate().filter(|&(i, _)| i != z1_index).map(|(_, &z)| z).collect();
    let q = Polynomial::from_roots(&others)?.scale_coeffs(p.leading())?;
    Ok((z1, q))
}

fn ensure_simple(p: &Polynomial) -> Result<()> {
    let s = is_simple(p, RootConfig::default().cluster_tol)?;
    match (s.simple, s.witness) {
        (false, Some(w)) => Err(Error::DegenerateConfiguration(format!(
            "{:?} roots {} and {} are {:e} apart",
            w.set, w.a, w.b, w.distance
        ))),
        _ => Ok(()),
    }
}

fn check_unit(w0: Complex64) -> Result<()> {
    if (w0.norm() - 1.0).abs() > UNIT_TOL {
        return Err(Error::Precondition(format!("|w0| must be 1, got {}", w0.norm())));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheckReport {
    pub z1: Complex64,
    pub u: Complex64,
    pub zeta_start: Complex64,
    pub zeta_end: Complex64,
    pub f_closed: Complex64,
    pub f_integral: Complex64,
    /// `| |f_integral| - |f_closed| | / |f_closed|`
    pub abs_discrepancy: f64,
    /// `| |zeta(u) - u| - |zeta - z1| |f_closed| | / (1 + |zeta(u) - u|)`
    pub qf_residual: f64,
}

/// Moves the zero `z1` of `p` along `path` (which must start at `z1`), follows
/// the critical point `zeta`, and evaluates both forms of `f`.
pub fn verify_identity(
    p: &Polynomial,
    z1_index: usize,
    zeta_index: usize,
    path: &Path,
    cfg: &ExperimentConfig,
) -> Result<IdentityCheckReport> {
    ensure_simple(p)?;
    let (z1, q) = split_designated(p, z1_index)?;
    let crit = critical_points(p)?.roots;
    let zeta = *crit
        .get(zeta_index)
        .ok_or_else(|| Error::Precondition(format!("critical index {zeta_index} out of range 0..{}", crit.len())))?;
    if (path.start() - z1).norm() > 1e-9 * (1.0 + z1.norm()) {
        return Err(Error::Precondition(format!("path starts at {} but z1 = {z1}", path.start())));
    }
    let traj = track(&q, path, zeta, &cfg.track)?;
    let var = Variation::new(&q);
    let f_int = log_integral(&var, path, &traj, cfg)?.exp();
    let (zs, ze) = (traj.start_zeta, traj.end_zeta);
    let u = path.end();
    let f_cl = f_closed(&q, zs, ze)?;
    let lhs = (ze - u).norm();
    Ok(IdentityCheckReport {
        z1,
        u,
        zeta_start: zs,
        zeta_end: ze,
        f_closed: f_cl,
        f_integral: f_int,
        abs_discrepancy: (f_int.norm() - f_cl.norm()).abs() / f_cl.norm(),
        qf_residual: (lhs - (zs - path.start()).norm() * f_cl.norm()).abs() / (1.0 + lhs),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryComparison {
    pub z1: Complex64,
    pub w0: Complex64,
    pub rho_interior: f64,
    pub rho_boundary: f64,
}

/// Critical radius at an interior zero `z1` next to the critical radius after
/// moving that zero to `w0` on the unit circle.
pub fn boundary_comparison(p: &Polynomial, z1_index: usize, w0: Complex64) -> Result<BoundaryComparison> {
    check_unit(w0)?;
    ensure_simple(p)?;
    let (z1, q) = split_designated(p, z1_index)?;
    if z1.norm() >= 1.0 {
        return Err(Error::Precondition(format!("designated zero {z1} is not inside the unit disk")));
    }
    let rho_interior = critical_radius(p, z1)?.rho;
    let moved = q.mul(&Polynomial::new(vec![-w0, Complex64::new(1.0, 0.0)])?);
    let rho_boundary = critical_radius(&moved, w0)?.rho;
    Ok(BoundaryComparison { z1, w0, rho_interior, rho_boundary })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundarySummary {
    pub total: usize,
    pub boundary_not_smaller: usize,
}

pub fn boundary_summary(rows: &[BoundaryComparison]) -> BoundarySummary {
    BoundarySummary {
        total: rows.len(),
        boundary_not_smaller: rows.iter().filter(|r| r.rho_boundary >= r.rho_interior).count(),
    }
}
