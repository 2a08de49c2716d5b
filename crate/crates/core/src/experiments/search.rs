use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::sample::random_disk_roots;
use crate::critgeo::critical_points;
use crate::error::{Error, Result};
use crate::poly::Polynomial;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub initial_sigma: f64,
    /// Restart from a fresh random configuration once the step size drops below this.
    pub restart_sigma: f64,
    /// Evaluations reserved for the closing pattern search.
    pub polish_budget: u64,
    pub polish_initial: f64,
    pub polish_floor: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { initial_sigma: 0.3, restart_sigma: 1e-10, polish_budget: 4000, polish_initial: 1e-3, polish_floor: 1e-14 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub iteration: u64,
    pub rho: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaximalSearchResult {
    pub n: usize,
    pub seed: u64,
    pub best_roots: Vec<Complex64>,
    pub best_rho: f64,
    pub iterations: u64,
    /// Every improvement of the incumbent, so `rho` never decreases.
    pub trace: Vec<TracePoint>,
}

/// `rho(prod (z - z_k), z_1)`, or `-inf` when the critical points cannot be computed.
pub fn critical_radius_of_roots(roots: &[Complex64]) -> f64 {
    critical_distances(roots).map_or(f64::NEG_INFINITY, |d| min_of(&d))
}

fn critical_distances(roots: &[Complex64]) -> Option<Vec<f64>> {
    let p = Polynomial::from_roots(roots).ok()?;
    let crit = critical_points(&p).ok()?;
    Some(crit.roots.iter().map(|z| (z - roots[0]).norm()).collect())
}

fn min_of(d: &[f64]) -> f64 {
    d.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Smoothed minimum `-tau log sum exp(-d_k / tau)`, shifted so that it never
/// exceeds the true minimum; `tau = 0` gives the minimum itself.
fn soft_min(d: Option<&[f64]>, tau: f64) -> f64 {
    let Some(d) = d else {
        return f64::NEG_INFINITY;
    };
    let m = min_of(d);
    if tau == 0.0 {
        return m;
    }
    m - tau * d.iter().map(|x| (-(x - m) / tau).exp()).sum::<f64>().ln()
}

fn project(z: Complex64) -> Complex64 {
    let r = z.norm();
    if r > 1.0 {
        z / r
    } else {
        z
    }
}

struct Search<'a> {
    cfg: &'a SearchConfig,
    evals: u64,
    best: Vec<Complex64>,
    best_rho: f64,
    trace: Vec<TracePoint>,
}

impl Search<'_> {
    fn eval(&mut self, roots: &[Complex64]) -> f64 {
        self.distances(roots).map_or(f64::NEG_INFINITY, |d| min_of(&d))
    }

    fn distances(&mut self, roots: &[Complex64]) -> Option<Vec<f64>> {
        self.evals += 1;
        let d = critical_distances(roots)?;
        let rho = min_of(&d);
        if rho > self.best_rho {
            self.best_rho = rho;
            self.best = roots.to_vec();
            self.trace.push(TracePoint { iteration: self.evals, rho });
        }
        Some(d)
    }

    fn polish(&mut self, budget: u64) {
        let stop = self.evals + budget;
        let mut step = self.cfg.polish_initial;
        while step > self.cfg.polish_floor && self.evals < stop {
            let mut improved = false;
            for k in 0..2 * self.best.len() {
                for sign in [1.0, -1.0] {
                    if self.evals >= stop {
                        return;
                    }
                    let mut y = self.best.clone();
                    let d = if k % 2 == 0 { Complex64::new(sign * step, 0.0) } else { Complex64::new(0.0, sign * step) };
                    y[k / 2] = project(y[k / 2] + d);
                    let before = self.best_rho;
                    if self.eval(&y) > before {
                        improved = true;
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
    }
}

/// Step size and shape of the mutation distribution of a (1+1) evolution
/// strategy, adapted by success rate and by a rank-one Cholesky update along
/// the evolution path.
struct Mutation {
    dim: usize,
    sigma: f64,
    /// `C = A A^T`, row-major
    a: Vec<f64>,
    a_inv: Vec<f64>,
    path: Vec<f64>,
    p_succ: f64,
}

/// Temperatures of the smoothed objective used in successive stages of one run.
const SMOOTHING: [f64; 10] = [3e-2, 1e-2, 3e-3, 1e-3, 3e-4, 1e-4, 3e-5, 1e-5, 3e-6, 1e-6];

const REFINE_STAGE: usize = 3;
const REFINE_EVERY: u64 = 4;
const ABANDON: f64 = 3.0;
const STAGE_SIGMA: f64 = 1e-4;

const P_TARGET: f64 = 0.1;
const P_THRESH: f64 = 0.44;

impl Mutation {
    fn new(dim: usize, sigma: f64) -> Self {
        let mut eye = vec![0.0; dim * dim];
        for i in 0..dim {
            eye[i * dim + i] = 1.0;
        }
        Mutation { dim, sigma, a: eye.clone(), a_inv: eye, path: vec![0.0; dim], p_succ: P_TARGET }
    }

    fn mat_vec(m: &[f64], v: &[f64]) -> Vec<f64> {
        let d = v.len();
        (0..d).map(|i| (0..d).map(|j| m[i * d + j] * v[j]).sum()).collect()
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        let z: Vec<f64> = (0..self.dim).map(|_| rng.sample(StandardNormal)).collect();
        Mutation::mat_vec(&self.a, &z).into_iter().map(|v| v * self.sigma).collect()
    }

    fn update(&mut self, success: bool, step: &[f64]) {
        let d = self.dim as f64;
        let sigma = self.sigma;
        let c_p = 1.0 / 12.0;
        let damping = 1.0 + d / 2.0;
        self.p_succ = (1.0 - c_p) * self.p_succ + if success { c_p } else { 0.0 };
        self.sigma *= ((self.p_succ - P_TARGET) / (damping * (1.0 - P_TARGET))).exp();
        if !success {
            return;
        }
        let c_c = 2.0 / (d + 2.0);
        let c_cov = 2.0 / (d * d + 6.0);
        let alpha;
        if self.p_succ < P_THRESH {
            let k = (c_c * (2.0 - c_c)).sqrt() / sigma;
            for (p, s) in self.path.iter_mut().zip(step) {
                *p = (1.0 - c_c) * *p + k * s;
            }
            alpha = 1.0 - c_cov;
        } else {
            for p in &mut self.path {
                *p *= 1.0 - c_c;
            }
            alpha = 1.0 - c_cov + c_cov * c_c * (2.0 - c_c);
        }
        let w = Mutation::mat_vec(&self.a_inv, &self.path);
        let w2: f64 = w.iter().map(|v| v * v).sum();
        if !(w2 > 0.0 && w2.is_finite()) {
            return;
        }
        let n = self.dim;
        let root = (1.0 + c_cov / alpha * w2).sqrt();
        let sa = alpha.sqrt();
        let ka = sa / w2 * (root - 1.0);
        let ki = 1.0 / (sa * w2) * (1.0 - 1.0 / root);
        // w^T A^{-1}
        let wa: Vec<f64> = (0..n).map(|j| (0..n).map(|i| w[i] * self.a_inv[i * n + j]).sum()).collect();
        for i in 0..n {
            for j in 0..n {
                self.a[i * n + j] = sa * self.a[i * n + j] + ka * self.path[i] * w[j];
                self.a_inv[i * n + j] = self.a_inv[i * n + j] / sa - ki * w[i] * wa[j];
            }
        }
    }

    fn healthy(&self) -> bool {
        self.a.iter().chain(&self.a_inv).all(|v| v.is_finite())
    }
}

fn to_coords(roots: &[Complex64]) -> Vec<f64> {
    roots.iter().flat_map(|z| [z.re, z.im]).collect()
}

fn to_roots(x: &[f64]) -> Vec<Complex64> {
    x.chunks(2).map(|c| project(Complex64::new(c[0], c[1]))).collect()
}

/// Searches root configurations in the closed unit disk for a large critical
/// radius at the first root: a (1+1) evolution strategy with success-rate step
/// size control and covariance adaptation, restarted from random points when
/// the step size collapses, finished by a coordinate pattern search around the
/// best point.
pub fn maximize_rho(n: usize, seed: u64, budget: u64, cfg: &SearchConfig) -> Result<MaximalSearchResult> {
    if !(2..=12).contains(&n) {
        return Err(Error::Precondition(format!("degree {n} outside 2..=12")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = Search { cfg, evals: 0, best: Vec::new(), best_rho: f64::NEG_INFINITY, trace: Vec::new() };
    let polish_budget = cfg.polish_budget.min(budget / 10);
    let explore = budget.saturating_sub(polish_budget).max(1);

    let fresh = |rng: &mut ChaCha8Rng, s: &mut Search| {
        let x = to_coords(&random_disk_roots(rng, n));
        let d = s.distances(&to_roots(&x));
        (x, d)
    };
    let (mut x, mut dx) = fresh(&mut rng, &mut s);
    let mut stage = 0;
    let mut restarts = 0u64;
    let mut m = Mutation::new(2 * n, cfg.initial_sigma);
    while s.evals < explore {
        let tau = SMOOTHING.get(stage).copied().unwrap_or(0.0);
        let step = m.sample(&mut rng);
        let y = to_coords(&to_roots(&x.iter().zip(&step).map(|(a, b)| a + b).collect::<Vec<f64>>()));
        let dy = s.distances(&to_roots(&y));
        let success = soft_min(dy.as_deref(), tau) >= soft_min(dx.as_deref(), tau);
        let taken: Vec<f64> = y.iter().zip(&x).map(|(a, b)| a - b).collect();
        if success {
            x = y;
            dx = dy;
        }
        m.update(success, &taken);
        if m.sigma < cfg.restart_sigma.max(STAGE_SIGMA * tau) || !m.healthy() {
            // abandon runs that trail the incumbent by more than the smoothing can explain
            let lagging = stage > 0 && min_of(dx.as_deref().unwrap_or(&[f64::NEG_INFINITY])) < s.best_rho - ABANDON * tau;
            if m.healthy() && stage < SMOOTHING.len() && !lagging {
                stage += 1;
                // keep the learned shape, reopen the step size
                m.sigma = cfg.initial_sigma * SMOOTHING.get(stage).copied().unwrap_or(1e-3);
                m.p_succ = P_TARGET;
            } else if s.evals < explore {
                restarts += 1;
                if restarts.is_multiple_of(REFINE_EVERY) {
                    // revisit the incumbent with a fresh, finer distribution
                    let best = s.best.clone();
                    x = to_coords(&best);
                    dx = s.distances(&best);
                    stage = REFINE_STAGE;
                    m = Mutation::new(2 * n, cfg.initial_sigma * SMOOTHING[stage]);
                } else {
                    (x, dx) = fresh(&mut rng, &mut s);
                    stage = 0;
                    m = Mutation::new(2 * n, cfg.initial_sigma);
                }
            }
        }
    }
    s.polish(budget.saturating_sub(s.evals));

    Ok(MaximalSearchResult { n, seed, best_roots: s.best, best_rho: s.best_rho, iterations: s.evals, trace: s.trace })
}

/// Distance from `roots` to the zero set of `z^n - a` for the best unimodular
/// `a`: the largest distance between a root and its matched `n`-th root of
/// `a`, or infinity when no rotation matches them one to one.
pub fn distance_to_extremal(roots: &[Complex64]) -> f64 {
    let n = roots.len();
    if n == 0 {
        return f64::INFINITY;
    }
    let nf = n as f64;
    let mut angles: Vec<f64> = roots.iter().map(|z| z.arg()).collect();
    let power_mean: Complex64 = roots.iter().map(|z| z.powu(n as u32)).sum();
    angles.push(power_mean.arg() / nf);

    let mut best = f64::INFINITY;
    for theta in angles {
        let mut used = vec![false; n];
        let mut worst = 0.0f64;
        for z in roots {
            let k = (((z.arg() - theta) * nf / TAU).round() as i64).rem_euclid(n as i64) as usize;
            if used[k] {
                worst = f64::INFINITY;
                break;
            }
            used[k] = true;
            worst = worst.max((z - Complex64::from_polar(1.0, theta + TAU * k as f64 / nf)).norm());
        }
        best = best.min(worst);
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn objective_on_unit_roots() {
        // the (n-1)-fold critical point at 0 amplifies rounding in the coefficients
        for n in 2..=5 {
            let roots: Vec<Complex64> = (0..n).map(|k| Complex64::from_polar(1.0, TAU * k as f64 / n as f64)).collect();
            let rho = critical_radius_of_roots(&roots);
            assert!(rho > 1.0 - 1e-4 && rho <= 1.0 + 1e-12);
            assert!(distance_to_extremal(&roots) < 1e-12);
        }
    }

    #[test]
    fn objective_rotation_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let roots = random_disk_roots(&mut rng, 5);
        let rot = Complex64::from_polar(1.0, 0.7);
        let turned: Vec<Complex64> = roots.iter().map(|z| z * rot).collect();
        assert!((critical_radius_of_roots(&roots) - critical_radius_of_roots(&turned)).abs() < 1e-12);
    }

    #[test]
    fn alignment_rejects_clumped_roots() {
        let roots = [Complex64::new(1.0, 0.0), Complex64::new(0.99, 0.01), Complex64::new(-1.0, 0.0)];
        assert!(distance_to_extremal(&roots) > 0.5);
    }

    #[test]
    fn quadratic_search() {
        let res = maximize_rho(2, 3, 5000, &SearchConfig::default()).unwrap();
        assert!(res.best_rho > 1.0 - 1e-6 && res.best_rho <= 1.0 + 1e-12);
        assert!(res.trace.windows(2).all(|w| w[0].rho <= w[1].rho));
        assert!(res.iterations <= 5000);
        assert_eq!(res, maximize_rho(2, 3, 5000, &SearchConfig::default()).unwrap());
        assert!(maximize_rho(13, 0, 10, &SearchConfig::default()).is_err());
    }
}
