use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::poly::{is_simple, Polynomial, RootConfig};

/// Uniform point of the closed unit disk.
pub fn disk_point<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let r = rng.random::<f64>().sqrt();
    let theta = rng.random::<f64>() * std::f64::consts::TAU;
    Complex64::from_polar(r, theta)
}

pub fn random_disk_roots<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<Complex64> {
    (0..n).map(|_| disk_point(rng)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleStats {
    pub accepted: usize,
    pub draws: usize,
}

impl SampleStats {
    pub fn rejection_rate(&self) -> f64 {
        if self.draws == 0 {
            0.0
        } else {
            (self.draws - self.accepted) as f64 / self.draws as f64
        }
    }
}

/// `count` monic degree-`n` polynomials with roots uniform in the closed unit
/// disk, keeping only those that pass [`is_simple`].
pub fn random_pn_sample(n: usize, count: usize, seed: u64) -> Result<Vec<Polynomial>> {
    Ok(random_pn_sample_with_stats(n, count, seed, RootConfig::default().cluster_tol)?.0)
}

pub fn random_pn_sample_with_stats(n: usize, count: usize, seed: u64, tol: f64) -> Result<(Vec<Polynomial>, SampleStats)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut draws = 0;
    while out.len() < count {
        draws += 1;
        let p = Polynomial::from_roots(&random_disk_roots(&mut rng, n))?;
        if is_simple(&p, tol)?.simple {
            out.push(p);
        }
    }
    let accepted = out.len();
    Ok((out, SampleStats { accepted, draws }))
}

/// Like [`random_pn_sample`], with one root pinned at `root`.
pub fn random_pn_with_root(n: usize, root: Complex64, count: usize, seed: u64) -> Result<Vec<Polynomial>> {
    let tol = RootConfig::default().cluster_tol;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let mut roots = vec![root];
        roots.extend(random_disk_roots(&mut rng, n.saturating_sub(1)));
        let p = Polynomial::from_roots(&roots)?;
        if is_simple(&p, tol)?.simple {
            out.push(p);
        }
    }
    Ok(out)
}
