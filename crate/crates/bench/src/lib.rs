//! Fixed inputs for the criterion benchmarks under `benches/`.

use critgeom_core::{Complex64, Polynomial};

/// Monic polynomial whose roots sit on a slightly perturbed circle of radius 0.9,
/// so the instance is simple and the same on every run.
pub fn wobbly_circle(n: usize) -> Polynomial {
    let roots: Vec<Complex64> = (0..n)
        .map(|k| {
            let t = std::f64::consts::TAU * (k as f64 + 0.3 * (k as f64 * 1.7).sin()) / n as f64;
            Complex64::from_polar(0.9 - 0.05 * (k % 3) as f64, t)
        })
        .collect();
    Polynomial::from_roots(&roots).expect("nonempty root list")
}
