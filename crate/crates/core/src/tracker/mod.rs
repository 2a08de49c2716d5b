//! Continuation of critical points of `Q(z, u) = (z - u) q(z)` as `u` moves
//! along a path.
//!
//! A critical point `zeta(u)` solves `Q'(zeta, u) = q(zeta) + (zeta - u) q'(zeta) = 0`.
//! Differentiating in `u` gives `zeta'(u) = q'(zeta) / Q''(zeta, u)` with
//! `Q'' = 2 q' + (zeta - u) q''`. Each step predicts with that ODE (RK4 or
//! Euler in the path parameter) and corrects with Newton on `Q'(., u)`. A step
//! is only accepted when the corrected point stays well inside the basin of
//! the root it started from; branch points (`Q'' = 0`) stop the tracker.

mod path;

use std::io::{self, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use path::{Path, Piece, Segment, JOIN_TOL};

use crate::error::{Error, Result};
use crate::poly::roots::{lex_cmp, refine_roots};
use crate::poly::{is_simple, Polynomial, RootConfig, RootList};

/// `q`, `q'` and `q''` bundled for repeated evaluation of `Q'` and `Q''`.
#[derive(Debug, Clone)]
pub struct Variation {
    q: Polynomial,
    dq: Option<Polynomial>,
}

impl Variation {
    pub fn new(q: &Polynomial) -> Self {
        Variation { q: q.clone(), dq: q.derivative().ok() }
    }

    pub fn q(&self) -> &Polynomial {
        &self.q
    }

    /// `(q, q', q'')` at `z`.
    pub fn q_derivs(&self, z: Complex64) -> (Complex64, Complex64, Complex64) {
        self.q.eval_d2(z)
    }

    /// `Q'(z, u)`.
    pub fn first(&self, z: Complex64, u: Complex64) -> Complex64 {
        let (q, dq) = self.q.eval_d1(z);
        q + (z - u) * dq
    }

    /// `(Q'(z, u), Q''(z, u))`.
    pub fn first_second(&self, z: Complex64, u: Complex64) -> (Complex64, Complex64) {
        let (q, dq, ddq) = self.q.eval_d2(z);
        (q + (z - u) * dq, dq * 2.0 + (z - u) * ddq)
    }

    /// Magnitude that `|Q'(z, u)|` is measured against.
    pub fn first_scale(&self, z: Complex64, u: Complex64) -> f64 {
        let d = self.dq.as_ref().map_or(0.0, |dq| dq.eval_scale(z));
        1.0 + self.q.eval_scale(z) + (z - u).norm() * d
    }

    /// Magnitude that `|Q''(z, u)|` is measured against.
    pub fn second_scale(&self, z: Complex64, u: Complex64) -> f64 {
        match &self.dq {
            Some(dq) => {
                let dd = dq.derivative().map_or(0.0, |p| p.eval_scale(z));
                1.0 + 2.0 * dq.eval_scale(z) + (z - u).norm() * dd
            }
            None => 1.0,
        }
    }

    /// `Q'(., u)` as a polynomial in `z`; its degree is `deg q`.
    pub fn first_poly(&self, u: Complex64) -> Polynomial {
        let qc = self.q.coeffs();
        let m = qc.len();
        // Q = z q - u q, coefficient i of Q is q[i-1] - u q[i]
        let big_q: Vec<Complex64> = (0..=m)
            .map(|i| {
                let hi = if i >= 1 { qc[i - 1] } else { Complex64::new(0.0, 0.0) };
                let lo = if i < m { qc[i] } else { Complex64::new(0.0, 0.0) };
                hi - u * lo
            })
            .collect();
        Polynomial::new(big_q)
            .and_then(|p| p.derivative())
            .expect("Q has degree deg q + 1 >= 1")
    }

    /// All critical points of `Q(., u)`, sorted by `(re, im)`.
    pub fn critical_points(&self, u: Complex64) -> Result<RootList> {
        self.first_poly(u).roots()
    }
}

/// `Q'(z, u) = q(z) + (z - u) q'(z)`.
pub fn q_prime_of_q(q: &Polynomial, z: Complex64, u: Complex64) -> Complex64 {
    Variation::new(q).first(z, u)
}

/// `Q''(z, u) = 2 q'(z) + (z - u) q''(z)`.
pub fn q_second_of_q(q: &Polynomial, z: Complex64, u: Complex64) -> Complex64 {
    Variation::new(q).first_second(z, u).1
}

/// Relative floor below which `Q''` is treated as zero.
pub const SINGULAR_FLOOR: f64 = 1e-12;

/// `d zeta / du = q'(zeta) / Q''(zeta, u)`.
pub fn davidenko_rhs(q: &Polynomial, u: Complex64, zeta: Complex64) -> Result<Complex64> {
    rhs(&Variation::new(q), u, zeta, SINGULAR_FLOOR)
}

fn rhs(var: &Variation, u: Complex64, zeta: Complex64, floor: f64) -> Result<Complex64> {
    let (_, dq, ddq) = var.q_derivs(zeta);
    let second = dq * 2.0 + (zeta - u) * ddq;
    if second.norm() <= floor * var.second_scale(zeta, u) {
        return Err(Error::BranchPointSingularity { zeta, u });
    }
    Ok(dq / second)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Predictor {
    Euler,
    Rk4,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrackConfig {
    pub predictor: Predictor,
    pub initial_step: f64,
    pub max_step: f64,
    pub step_floor: f64,
    pub max_corrector_steps: usize,
    /// Acceptance threshold on `|Q'| / first_scale`.
    pub residual_tol: f64,
    /// Largest scaled residual accepted for the starting value.
    pub start_tol: f64,
    /// `|Q''| / second_scale` below this records a branch-proximity event.
    pub branch_flag: f64,
    pub singular_floor: f64,
    /// Bound on `|d zeta| / |d u|` between consecutive samples.
    pub jump_bound: f64,
    pub cluster_tol: f64,
}

impl Default for TrackConfig {
    fn default() -> Self {
        TrackConfig {
            predictor: Predictor::Rk4,
            initial_step: 1e-2,
            max_step: 5e-2,
            step_floor: 1e-8,
            max_corrector_steps: 8,
            residual_tol: 1e-9,
            start_tol: 1e-6,
            branch_flag: 1e-6,
            singular_floor: SINGULAR_FLOOR,
            jump_bound: 1e6,
            cluster_tol: 1e-7,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub u: Complex64,
    pub zeta: Complex64,
    /// `|Q'(zeta, u)|`
    pub residual: f64,
    /// Parameter step that produced this sample; 0 for the first.
    pub step: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EventKind {
    BranchProximity,
    StepFloor,
    CorrectorRetry,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub t: f64,
    pub kind: EventKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub events: Vec<Event>,
    pub start_zeta: Complex64,
    pub end_zeta: Complex64,
}

impl Trajectory {
    pub fn end_u(&self) -> Complex64 {
        self.samples[self.samples.len() - 1].u
    }

    /// CSV with header `t,u_re,u_im,zeta_re,zeta_im,residual,step`; events follow
    /// as `# event,<t>,<kind>` comment rows.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "t,u_re,u_im,zeta_re,zeta_im,residual,step")?;
        for s in &self.samples {
            writeln!(w, "{},{},{},{},{},{},{}", s.t, s.u.re, s.u.im, s.zeta.re, s.zeta.im, s.residual, s.step)?;
        }
        for e in &self.events {
            writeln!(w, "# event,{},{:?}", e.t, e.kind)?;
        }
        Ok(())
    }
}

struct Newton {
    zeta: Complex64,
    iterations: usize,
}

fn correct(var: &Variation, start: Complex64, u: Complex64, cfg: &TrackConfig) -> Option<Newton> {
    let mut z = start;
    let mut last = f64::INFINITY;
    let mut iterations = 0;
    for _ in 0..cfg.max_corrector_steps {
        let (f, df) = var.first_second(z, u);
        if f.norm_sqr() == 0.0 {
            last = 0.0;
            break;
        }
        let dz = f / df;
        if !(dz.re.is_finite() && dz.im.is_finite()) {
            return None;
        }
        z -= dz;
        iterations += 1;
        last = dz.norm();
        if last <= 1e-14 * (1.0 + z.norm()) {
            break;
        }
    }
    let scaled = var.first(z, u).norm() / var.first_scale(z, u);
    (scaled <= cfg.residual_tol && last <= 1e-10 * (1.0 + z.norm())).then_some(Newton { zeta: z, iterations })
}

fn predict(var: &Variation, piece: &Piece, t: f64, h: f64, zeta: Complex64, cfg: &TrackConfig) -> Result<Complex64> {
    let f = |t: f64, z: Complex64| -> Result<Complex64> {
        let v = piece.velocity(t);
        if v.norm_sqr() == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        Ok(rhs(var, piece.point(t), z, cfg.singular_floor)? * v)
    };
    match cfg.predictor {
        Predictor::Euler => Ok(zeta + f(t, zeta)? * h),
        Predictor::Rk4 => {
            let k1 = f(t, zeta)?;
            let k2 = f(t + h / 2.0, zeta + k1 * (h / 2.0))?;
            let k3 = f(t + h / 2.0, zeta + k2 * (h / 2.0))?;
            let k4 = f(t + h, zeta + k3 * h)?;
            Ok(zeta + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0))
        }
    }
}

fn nearest(points: &[Complex64], z: Complex64) -> (usize, f64) {
    points
        .iter()
        .enumerate()
        .map(|(i, p)| (i, (p - z).norm()))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("nonempty")
}

fn ensure_simple(q: &Polynomial, tol: f64) -> Result<()> {
    let s = is_simple(q, tol)?;
    match s.witness {
        Some(w) if !s.simple => Err(Error::DegenerateConfiguration(format!(
            "q has {:?} roots {} and {} only {:e} apart",
            w.set, w.a, w.b, w.distance
        ))),
        _ => Ok(()),
    }
}

/// Step-size bookkeeping shared by the single- and all-sheet trackers.
struct Stepper {
    t: f64,
    h: f64,
    events: Vec<Event>,
}

impl Stepper {
    fn new(cfg: &TrackConfig) -> Self {
        Stepper { t: 0.0, h: cfg.initial_step.min(cfg.max_step), events: Vec::new() }
    }

    /// Size of the next attempt within the piece ending at `t1`.
    fn attempt(&self, t1: f64) -> f64 {
        let rest = t1 - self.t;
        // avoid leaving a sliver shorter than a tenth of the step
        if self.h >= rest || rest - self.h < 0.1 * self.h {
            rest
        } else {
            self.h
        }
    }

    fn reject(&mut self, h: f64, cfg: &TrackConfig) -> bool {
        self.events.push(Event { t: self.t, kind: EventKind::CorrectorRetry });
        self.h = h / 2.0;
        if self.h < cfg.step_floor {
            self.events.push(Event { t: self.t, kind: EventKind::StepFloor });
            return false;
        }
        true
    }

    fn accept(&mut self, h: f64, t1: f64, easy: bool, cfg: &TrackConfig) {
        self.t = if (t1 - (self.t + h)).abs() <= f64::EPSILON * 4.0 { t1 } else { self.t + h };
        self.h = if easy { (h * 2.0).min(cfg.max_step) } else { h };
    }
}

fn branch_event(var: &Variation, z: Complex64, u: Complex64, t: f64, cfg: &TrackConfig, events: &mut Vec<Event>) {
    let (_, second) = var.first_second(z, u);
    if second.norm() < cfg.branch_flag * var.second_scale(z, u) {
        events.push(Event { t, kind: EventKind::BranchProximity });
    }
}

/// Follows the critical point `zeta_start` of `Q(., path(0))` along `path`.
pub fn track(q: &Polynomial, path: &Path, zeta_start: Complex64, cfg: &TrackConfig) -> Result<Trajectory> {
    ensure_simple(q, cfg.cluster_tol)?;
    let var = Variation::new(q);
    let u0 = path.start();
    let residual = var.first(zeta_start, u0).norm() / var.first_scale(zeta_start, u0);
    if residual.is_nan() || residual > cfg.start_tol {
        return Err(Error::StartNotCritical { zeta: zeta_start, u: u0, residual });
    }
    let start = correct(&var, zeta_start, u0, cfg).ok_or(Error::CorrectorFailure { t: 0.0 })?.zeta;
    let root_cfg = RootConfig { cluster_tol: cfg.cluster_tol, ..RootConfig::default() };
    let mut all = var.critical_points(u0)?.roots;

    let mut zeta = start;
    let mut u = u0;
    let mut samples = vec![Sample { t: 0.0, u: u0, zeta, residual: var.first(zeta, u0).norm(), step: 0.0 }];
    let mut st = Stepper::new(cfg);
    branch_event(&var, zeta, u0, 0.0, cfg, &mut st.events);

    for piece in path.pieces() {
        while st.t < piece.t1 {
            let h = st.attempt(piece.t1);
            let t_new = if h == piece.t1 - st.t { piece.t1 } else { st.t + h };
            let u_new = piece.point(t_new);
            let step = predict(&var, &piece, st.t, h, zeta, cfg).ok().and_then(|pred| {
                let newton = correct(&var, pred, u_new, cfg)?;
                let poly = var.first_poly(u_new);
                let full = refine_roots(&poly, &all, &root_cfg)
                    .or_else(|_| poly.roots_with(&root_cfg))
                    .ok()?
                    .roots;
                let (idx, _) = nearest(&full, newton.zeta);
                let gap = full
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != idx)
                    .map(|(_, w)| (w - newton.zeta).norm())
                    .fold(f64::INFINITY, f64::min);
                let moved = (newton.zeta - zeta).norm();
                let ok = (newton.zeta - pred).norm() < 0.5 * gap
                    && moved <= cfg.jump_bound * (u_new - u).norm() + 1e-12 * (1.0 + zeta.norm());
                ok.then_some((newton, full))
            });
            match step {
                Some((newton, full)) => {
                    zeta = newton.zeta;
                    u = u_new;
                    all = full;
                    st.accept(h, piece.t1, newton.iterations <= 3, cfg);
                    samples.push(Sample { t: st.t, u, zeta, residual: var.first(zeta, u).norm(), step: h });
                    branch_event(&var, zeta, u, st.t, cfg, &mut st.events);
                }
                None => {
                    if !st.reject(h, cfg) {
                        return Err(Error::PathNearBranchPoint { t: st.t, u });
                    }
                }
            }
        }
    }
    Ok(Trajectory { samples, events: st.events, start_zeta: start, end_zeta: zeta })
}

/// Follows all `deg q` critical points of `Q(., path(0))` in lockstep, so the
/// trajectories share one parameter grid and at every sample form the full
/// critical set of `Q(., u)`. Trajectories come back in `(re, im)` order of
/// their starting points.
pub fn track_all(q: &Polynomial, path: &Path, cfg: &TrackConfig) -> Result<Vec<Trajectory>> {
    ensure_simple(q, cfg.cluster_tol)?;
    let var = Variation::new(q);
    let mut start = var.critical_points(path.start())?.roots;
    start.sort_by(lex_cmp);
    track_set(&var, path, start, cfg)
}

/// Like [`track_all`] but from explicitly given critical points of
/// `Q(., path(0))`, returned in the given order. Used to continue a set of
/// sheets across several consecutive paths.
pub fn track_all_from(q: &Polynomial, path: &Path, starts: &[Complex64], cfg: &TrackConfig) -> Result<Vec<Trajectory>> {
    ensure_simple(q, cfg.cluster_tol)?;
    if starts.len() != q.degree() {
        return Err(Error::Precondition(format!("expected {} starting points, got {}", q.degree(), starts.len())));
    }
    let var = Variation::new(q);
    let u0 = path.start();
    let mut polished = Vec::with_capacity(starts.len());
    for &z in starts {
        let residual = var.first(z, u0).norm() / var.first_scale(z, u0);
        if residual.is_nan() || residual > cfg.start_tol {
            return Err(Error::StartNotCritical { zeta: z, u: u0, residual });
        }
        polished.push(correct(&var, z, u0, cfg).ok_or(Error::CorrectorFailure { t: 0.0 })?.zeta);
    }
    track_set(&var, path, polished, cfg)
}

fn track_set(var: &Variation, path: &Path, mut zetas: Vec<Complex64>, cfg: &TrackConfig) -> Result<Vec<Trajectory>> {
    let u0 = path.start();
    for i in 0..zetas.len() {
        for j in i + 1..zetas.len() {
            if (zetas[i] - zetas[j]).norm() < cfg.cluster_tol {
                return Err(Error::DegenerateConfiguration(format!(
                    "critical points {} and {} of Q(., {u0}) coincide",
                    zetas[i], zetas[j]
                )));
            }
        }
    }
    let m = zetas.len();
    let mut u = u0;
    let mut samples: Vec<Vec<Sample>> = zetas
        .iter()
        .map(|&z| vec![Sample { t: 0.0, u: u0, zeta: z, residual: var.first(z, u0).norm(), step: 0.0 }])
        .collect();
    let mut events: Vec<Vec<Event>> = vec![Vec::new(); m];
    let mut st = Stepper::new(cfg);
    let mut collision: Option<(usize, usize)> = None;

    for piece in path.pieces() {
        while st.t < piece.t1 {
            let h = st.attempt(piece.t1);
            let t_new = if h == piece.t1 - st.t { piece.t1 } else { st.t + h };
            let u_new = piece.point(t_new);
            let mut next = Vec::with_capacity(m);
            let mut preds = Vec::with_capacity(m);
            let mut easy = true;
            let mut failed = false;
            for &z in &zetas {
                let Some(newton) = predict(var, &piece, st.t, h, z, cfg)
                    .ok()
                    .and_then(|pred| correct(var, pred, u_new, cfg).map(|n| (pred, n)))
                else {
                    failed = true;
                    break;
                };
                easy &= newton.1.iterations <= 3;
                preds.push(newton.0);
                next.push(newton.1.zeta);
            }
            if !failed {
                'guard: for k in 0..m {
                    let moved = (next[k] - zetas[k]).norm();
                    if moved > cfg.jump_bound * (u_new - u).norm() + 1e-12 * (1.0 + zetas[k].norm()) {
                        failed = true;
                        break;
                    }
                    for j in 0..m {
                        if j == k {
                            continue;
                        }
                        let gap = (next[k] - next[j]).norm();
                        if gap < cfg.cluster_tol {
                            collision = Some((k.min(j), k.max(j)));
                        }
                        if (next[k] - preds[k]).norm() >= 0.5 * gap {
                            failed = true;
                            break 'guard;
                        }
                    }
                }
            }
            if failed {
                if !st.reject(h, cfg) {
                    for ev in &mut events {
                        ev.extend(st.events.iter().copied());
                    }
                    return Err(match collision {
                        Some((first, second)) => Error::SheetCollision { first, second, t: st.t },
                        None => Error::PathNearBranchPoint { t: st.t, u },
                    });
                }
                continue;
            }
            collision = None;
            zetas = next;
            u = u_new;
            st.accept(h, piece.t1, easy, cfg);
            for k in 0..m {
                let z = zetas[k];
                samples[k].push(Sample { t: st.t, u, zeta: z, residual: var.first(z, u).norm(), step: h });
                branch_event(var, z, u, st.t, cfg, &mut events[k]);
            }
        }
    }
    let shared = st.events;
    Ok(samples
        .into_iter()
        .zip(events)
        .map(|(s, mut ev)| {
            ev.extend(shared.iter().copied());
            ev.sort_by(|a, b| a.t.total_cmp(&b.t));
            Trajectory { start_zeta: s[0].zeta, end_zeta: s[s.len() - 1].zeta, samples: s, events: ev }
        })
        .collect())
}
