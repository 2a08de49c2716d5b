//! Simultaneous root finding by Aberth–Ehrlich iteration with Newton polish.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::Polynomial;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootConfig {
    pub max_iter: usize,
    /// Convergence threshold on `|p(z)| / eval_scale(z)`.
    pub residual_tol: f64,
    /// Roots closer than this are reported as one cluster.
    pub cluster_tol: f64,
    /// Seeds the angular offset of the initial circle.
    pub seed: u64,
}

impl Default for RootConfig {
    fn default() -> Self {
        RootConfig { max_iter: 500, residual_tol: 1e-13, cluster_tol: 1e-7, seed: 0 }
    }
}

/// All roots of a polynomial, counted with multiplicity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootList {
    pub roots: Vec<Complex64>,
    /// Maximum scaled residual over the roots.
    pub residual_bound: f64,
    /// Index groups of roots closer than the cluster tolerance (singletons omitted).
    pub clusters: Vec<Vec<usize>>,
}

impl RootList {
    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn has_clusters(&self) -> bool {
        !self.clusters.is_empty()
    }

    /// Smallest pairwise distance, with the offending pair. `None` for fewer than two roots.
    pub fn min_separation(&self) -> Option<(f64, usize, usize)> {
        let mut best: Option<(f64, usize, usize)> = None;
        for i in 0..self.roots.len() {
            for j in i + 1..self.roots.len() {
                let d = (self.roots[i] - self.roots[j]).norm();
                if best.is_none_or(|(b, _, _)| d < b) {
                    best = Some((d, i, j));
                }
            }
        }
        best
    }
}

pub(crate) fn lex_cmp(a: &Complex64, b: &Complex64) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

fn scaled_residual(p: &Polynomial, z: Complex64) -> f64 {
    let s = p.eval_scale(z);
    if s == 0.0 {
        0.0
    } else {
        p.eval(z).norm() / s
    }
}

pub(crate) fn find_roots(p: &Polynomial, config: &RootConfig) -> Result<RootList> {
    let n = p.degree();
    if n == 0 {
        return Err(Error::DegreeTooLow { degree: 0, required: 1 });
    }
    // exact zero roots are split off so that z^k factors come out exactly
    let zeros = p.coeffs().iter().take_while(|c| c.norm_sqr() == 0.0).count();
    let reduced = Polynomial::new(p.coeffs()[zeros..].to_vec())?;
    let mut roots = vec![Complex64::new(0.0, 0.0); zeros];
    match reduced.degree() {
        0 => {}
        1 => {
            let c = reduced.coeffs();
            roots.push(-c[0] / c[1]);
        }
        m => {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            let offset = rng.random::<f64>() * TAU / m as f64;
            let monic = reduced.monic();
            let radius = 1.0
                + monic.coeffs()[..m].iter().map(|c| c.norm()).fold(0.0, f64::max);
            let mut guesses: Vec<Complex64> = (0..m)
                .map(|k| Complex64::from_polar(radius, offset + TAU * k as f64 / m as f64))
                .collect();
            aberth(&reduced, &mut guesses, config)?;
            roots.extend(guesses);
        }
    }
    roots.sort_by(lex_cmp);
    finish(p, roots, config)
}

/// Refines approximations of all roots, e.g. the roots of a nearby polynomial.
pub(crate) fn refine_roots(p: &Polynomial, guesses: &[Complex64], config: &RootConfig) -> Result<RootList> {
    if guesses.len() != p.degree() {
        return Err(Error::Precondition(format!(
            "expected {} starting values, got {}",
            p.degree(),
            guesses.len()
        )));
    }
    let mut zs = guesses.to_vec();
    if p.degree() == 1 {
        zs[0] = -p.coeffs()[0] / p.coeffs()[1];
    } else {
        aberth(p, &mut zs, config)?;
    }
    finish(p, zs, config)
}

fn finish(p: &Polynomial, roots: Vec<Complex64>, config: &RootConfig) -> Result<RootList> {
    let residual_bound = roots.iter().map(|&z| scaled_residual(p, z)).fold(0.0, f64::max);
    if residual_bound.is_nan() || residual_bound > config.residual_tol {
        return Err(Error::NonConvergence { iterations: config.max_iter, residual: residual_bound });
    }
    let clusters = clusters(&roots, config.cluster_tol);
    Ok(RootList { roots, residual_bound, clusters })
}

fn clusters(roots: &[Complex64], tol: f64) -> Vec<Vec<usize>> {
    let n = roots.len();
    let mut label: Vec<usize> = (0..n).collect();
    fn find(label: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while label[r] != r {
            r = label[r];
        }
        label[i] = r;
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            if (roots[i] - roots[j]).norm() < tol {
                let (a, b) = (find(&mut label, i), find(&mut label, j));
                if a != b {
                    label[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        let r = find(&mut label, i);
        groups[r].push(i);
    }
    groups.into_iter().filter(|g| g.len() > 1).collect()
}

/// Gauss–Seidel Aberth iteration followed by a guarded Newton polish.
fn aberth(p: &Polynomial, zs: &mut [Complex64], config: &RootConfig) -> Result<()> {
    let n = zs.len();
    let noise_floor = 4.0 * f64::EPSILON;
    let mut done = vec![false; n];
    for iter in 0..config.max_iter {
        for i in 0..n {
            if done[i] {
                continue;
            }
            let z = zs[i];
            let (v, d) = p.eval_d1(z);
            let res = v.norm() / p.eval_scale(z);
            if v.norm_sqr() == 0.0 || res <= noise_floor {
                done[i] = true;
                continue;
            }
            let ratio = v / d;
            let mut s = Complex64::new(0.0, 0.0);
            for (j, &w) in zs.iter().enumerate() {
                if j != i {
                    s += (z - w).inv();
                }
            }
            let mut delta = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if !(delta.re.is_finite() && delta.im.is_finite()) {
                delta = if ratio.re.is_finite() && ratio.im.is_finite() {
                    ratio
                } else {
                    // stationary point of p: kick off it deterministically
                    Complex64::from_polar(1e-3 * (1.0 + z.norm()), 1.0 + iter as f64)
                };
            }
            zs[i] = z - delta;
            if res < config.residual_tol && delta.norm() <= 1e-12 * (1.0 + zs[i].norm()) {
                done[i] = true;
            }
        }
        if done.iter().all(|&d| d) {
            break;
        }
    }
    polish(p, zs);
    Ok(())
}

fn polish(p: &Polynomial, zs: &mut [Complex64]) {
    for i in 0..zs.len() {
        let gap = zs
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, &w)| (w - zs[i]).norm())
            .fold(f64::INFINITY, f64::min);
        for _ in 0..3 {
            let z = zs[i];
            let (v, d) = p.eval_d1(z);
            if v.norm_sqr() == 0.0 {
                break;
            }
            let step = v / d;
            let cand = z - step;
            if !(cand.re.is_finite() && cand.im.is_finite()) || step.norm() >= 0.1 * gap {
                break;
            }
            if scaled_residual(p, cand) < scaled_residual(p, z) {
                zs[i] = cand;
            } else {
                break;
            }
        }
    }
}

/// Which root set holds the closest pair found by [`is_simple`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RootSet {
    Polynomial,
    Derivative,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimplicityWitness {
    pub set: RootSet,
    pub a: Complex64,
    pub b: Complex64,
    pub distance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Simplicity {
    pub simple: bool,
    pub witness: Option<SimplicityWitness>,
}

/// True iff the roots of `p` and the roots of `p'` are each pairwise farther apart than `tol`.
pub fn is_simple(p: &Polynomial, tol: f64) -> Result<Simplicity> {
    let check = |poly: &Polynomial, set: RootSet| -> Result<Option<SimplicityWitness>> {
        if poly.degree() < 2 {
            return Ok(None);
        }
        let rl = poly.roots()?;
        Ok(rl.min_separation().and_then(|(d, i, j)| {
            (d <= tol).then_some(SimplicityWitness { set, a: rl.roots[i], b: rl.roots[j], distance: d })
        }))
    };
    if let Some(w) = check(p, RootSet::Polynomial)? {
        return Ok(Simplicity { simple: false, witness: Some(w) });
    }
    if p.degree() >= 1 {
        if let Some(w) = check(&p.derivative()?, RootSet::Derivative)? {
            return Ok(Simplicity { simple: false, witness: Some(w) });
        }
    }
    Ok(Simplicity { simple: true, witness: None })
}
