//! The critical-point curve `Q'(w, u) = q(w) + (w - u) q'(w) = 0` as a covering
//! of the `u`-plane with `deg q` sheets.
//!
//! Over a surface point `w` the covering coordinate is `u = phi(w) = w + q(w)/q'(w)`.
//! Branch points are the zeros of `B(w) = 2 q'(w)^2 - q(w) q''(w)`, which is where
//! `Q''` vanishes as well.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::roots::lex_cmp;
use crate::poly::{is_simple, Polynomial, RootConfig};
use crate::tracker::{track_all, Path, TrackConfig, Variation, JOIN_TOL};

/// Relative floor on `|q'(w)|` for evaluating `phi`.
pub const PROJECTION_FLOOR: f64 = 1e-14;
/// Half-width of the boundary band around `|phi(w)| = 1`.
pub const CLAIM_BAND: f64 = 1e-9;

fn ensure_simple(q: &Polynomial) -> Result<()> {
    if q.degree() < 1 {
        return Err(Error::DegreeTooLow { degree: q.degree(), required: 1 });
    }
    let s = is_simple(q, RootConfig::default().cluster_tol)?;
    if let (false, Some(w)) = (s.simple, s.witness) {
        return Err(Error::DegenerateConfiguration(format!(
            "{:?} roots {} and {} are {:e} apart",
            w.set, w.a, w.b, w.distance
        )));
    }
    Ok(())
}

/// `2 q'^2 - q q''`, built coefficient-wise. `None` when `deg q <= 1`, where it
/// is the nonzero constant `2 q'^2`.
pub fn branch_polynomial(q: &Polynomial) -> Result<Option<Polynomial>> {
    if q.degree() <= 1 {
        return Ok(None);
    }
    let dq = q.derivative()?;
    let ddq = dq.derivative()?;
    let two_dq2 = dq.mul(&dq).scale_coeffs(Complex64::new(2.0, 0.0))?;
    two_dq2.sub(&q.mul(&ddq)).map(Some)
}

pub fn phi(q: &Polynomial, w: Complex64) -> Result<Complex64> {
    let (v, d) = q.eval_d1(w);
    let floor = q.derivative().map_or(1.0, |dq| dq.eval_scale(w)) * PROJECTION_FLOOR;
    if d.norm() <= floor {
        return Err(Error::ProjectionSingular { w });
    }
    Ok(w + v / d)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchPoint {
    pub w: Complex64,
    pub u: Complex64,
    /// `|B(w)|` relative to the evaluation scale of `B`.
    pub residual: f64,
}

/// All `2 deg q - 2` branch points (with multiplicity), sorted by `w`.
pub fn branch_locus(q: &Polynomial) -> Result<Vec<BranchPoint>> {
    ensure_simple(q)?;
    let Some(b) = branch_polynomial(q)? else {
        return Ok(Vec::new());
    };
    let roots = b.roots()?;
    let mut out = roots
        .roots
        .iter()
        .map(|&w| Ok(BranchPoint { w, u: phi(q, w)?, residual: b.eval(w).norm() / b.eval_scale(w) }))
        .collect::<Result<Vec<_>>>()?;
    out.sort_by(|a, b| lex_cmp(&a.w, &b.w));
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClaimStatus {
    Satisfied,
    Boundary,
    Violated,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchDiskRow {
    pub w: Complex64,
    pub u: Complex64,
    pub abs_phi: f64,
    /// `|phi(w)| >= 1`
    pub violation: bool,
}

impl BranchDiskRow {
    pub fn status(&self) -> ClaimStatus {
        if self.abs_phi < 1.0 - CLAIM_BAND {
            ClaimStatus::Satisfied
        } else if self.abs_phi <= 1.0 + CLAIM_BAND {
            ClaimStatus::Boundary
        } else {
            ClaimStatus::Violated
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchDiskReport {
    pub rows: Vec<BranchDiskRow>,
    pub satisfied: usize,
    pub boundary: usize,
    pub violated: usize,
    /// Violating rows `w`, `w'` with `w' = conj(w)`, each pair counted once.
    pub violating_conjugate_pairs: usize,
}

/// Measures `|phi(w)|` over the branch locus of a `q` with all roots in the
/// closed unit disk. Nothing here asserts that the measurement is below 1.
pub fn branch_disk_report(q: &Polynomial) -> Result<BranchDiskReport> {
    let roots = q.roots()?;
    if let Some(&root) = roots.roots.iter().find(|z| z.norm() > 1.0 + crate::critgeo::UNIT_DISK_TOL) {
        return Err(Error::RootOutsideDisk { root });
    }
    let rows: Vec<BranchDiskRow> = branch_locus(q)?
        .into_iter()
        .map(|b| {
            let abs_phi = b.u.norm();
            BranchDiskRow { w: b.w, u: b.u, abs_phi, violation: abs_phi >= 1.0 }
        })
        .collect();
    let count = |s: ClaimStatus| rows.iter().filter(|r| r.status() == s).count();
    let bad: Vec<&BranchDiskRow> = rows.iter().filter(|r| r.status() == ClaimStatus::Violated).collect();
    let mut used = vec![false; bad.len()];
    let mut pairs = 0;
    for i in 0..bad.len() {
        if used[i] || bad[i].w.im == 0.0 {
            continue;
        }
        let target = bad[i].w.conj();
        if let Some(j) = (i + 1..bad.len())
            .find(|&j| !used[j] && (bad[j].w - target).norm() <= 1e-9 * (1.0 + target.norm()))
        {
            used[i] = true;
            used[j] = true;
            pairs += 1;
        }
    }
    Ok(BranchDiskReport {
        satisfied: count(ClaimStatus::Satisfied),
        boundary: count(ClaimStatus::Boundary),
        violated: bad.len(),
        violating_conjugate_pairs: pairs,
        rows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SheetClass {
    Unbounded,
    ConvergesTo { limit: Complex64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SheetRow {
    /// Critical point of `Q(., u_start)` where the sheet was entered.
    pub start: Complex64,
    pub class: SheetClass,
    /// `zeta / u` at the far end of the ray.
    pub ratio: Complex64,
    /// Index into `critical_of_q` of the limit, for bounded sheets.
    pub matched: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SheetAtInfinityReport {
    pub ray_angle: f64,
    pub u_start: Complex64,
    pub u_end: Complex64,
    /// `(n - 1) / n` with `n = deg q + 1`.
    pub expected_ratio: f64,
    pub critical_of_q: Vec<Complex64>,
    pub per_sheet: Vec<SheetRow>,
}

impl SheetAtInfinityReport {
    pub fn unbounded_count(&self) -> usize {
        self.per_sheet.iter().filter(|r| r.class == SheetClass::Unbounded).count()
    }

    /// One unbounded sheet, and the bounded limits hit every zero of `q'` once.
    pub fn is_consistent(&self) -> bool {
        let mut hits = vec![0usize; self.critical_of_q.len()];
        for row in &self.per_sheet {
            match (row.class, row.matched) {
                (SheetClass::ConvergesTo { .. }, Some(i)) => hits[i] += 1,
                (SheetClass::ConvergesTo { .. }, None) => return false,
                _ => {}
            }
        }
        self.unbounded_count() == 1 && hits.iter().all(|&h| h == 1)
    }
}

/// Ratio and limit tolerance used to classify sheets.
pub const SHEET_TOL: f64 = 1e-4;
/// The ray runs from `|u| = radius` out to `|u| = radius * RAY_STRETCH`.
pub const RAY_STRETCH: f64 = 1e4;
const RAY_ANGLES: [f64; 5] = [0.3, 1.7, 3.1, 4.4, 5.6];

/// Follows every sheet out along a ray and classifies its behaviour as `u -> infinity`.
/// Tries a few ray angles if the first one passes too close to a branch point.
pub fn sheets_at_infinity(q: &Polynomial, radius: f64, cfg: &TrackConfig) -> Result<SheetAtInfinityReport> {
    if !(radius >= 10.0 && radius.is_finite()) {
        return Err(Error::Precondition(format!("radius must be at least 10, got {radius}")));
    }
    ensure_simple(q)?;
    let mut last = None;
    for angle in RAY_ANGLES {
        match sheets_along_ray(q, radius, angle, cfg) {
            Ok(r) => return Ok(r),
            Err(e @ (Error::PathNearBranchPoint { .. } | Error::SheetCollision { .. })) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("at least one angle tried"))
}

pub fn sheets_along_ray(q: &Polynomial, radius: f64, angle: f64, cfg: &TrackConfig) -> Result<SheetAtInfinityReport> {
    let n = q.degree() + 1;
    let expected_ratio = (n - 1) as f64 / n as f64;
    let u_start = Complex64::from_polar(radius, angle);
    let u_end = Complex64::from_polar(radius * RAY_STRETCH, angle);
    let critical_of_q = if q.degree() >= 2 { q.derivative()?.roots()?.roots } else { Vec::new() };
    let trajectories = track_all(q, &Path::line(u_start, u_end), cfg)?;
    let per_sheet = trajectories
        .iter()
        .map(|tr| {
            let ratio = tr.end_zeta / u_end;
            if (ratio - expected_ratio).norm() <= SHEET_TOL {
                SheetRow { start: tr.start_zeta, class: SheetClass::Unbounded, ratio, matched: None }
            } else {
                let matched = critical_of_q
                    .iter()
                    .enumerate()
                    .map(|(i, x)| (i, (x - tr.end_zeta).norm()))
                    .min_by(|a, b| a.1.total_cmp(&b.1))
                    .filter(|&(_, d)| d <= SHEET_TOL)
                    .map(|(i, _)| i);
                SheetRow { start: tr.start_zeta, class: SheetClass::ConvergesTo { limit: tr.end_zeta }, ratio, matched }
            }
        })
        .collect();
    Ok(SheetAtInfinityReport { ray_angle: angle, u_start, u_end, expected_ratio, critical_of_q, per_sheet })
}

/// A permutation of sheet labels: `images[i]` is where sheet `i` ends up.
/// Serialized 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation {
    images: Vec<usize>,
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = Error;
    fn try_from(one_based: Vec<usize>) -> Result<Self> {
        if one_based.contains(&0) {
            return Err(Error::Precondition("permutation entries are 1-based".into()));
        }
        Permutation::new(one_based.into_iter().map(|i| i - 1).collect())
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.images.into_iter().map(|i| i + 1).collect()
    }
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            if i >= images.len() || seen[i] {
                return Err(Error::Precondition(format!("{images:?} is not a permutation")));
            }
            seen[i] = true;
        }
        Ok(Permutation { images })
    }

    pub fn identity(n: usize) -> Self {
        Permutation { images: (0..n).collect() }
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    /// `self` first, then `other`.
    pub fn then(&self, other: &Permutation) -> Permutation {
        Permutation { images: self.images.iter().map(|&i| other.images[i]).collect() }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j)
    }

    pub fn is_transposition(&self) -> bool {
        let moved: Vec<usize> = (0..self.len()).filter(|&i| self.images[i] != i).collect();
        moved.len() == 2 && self.images[moved[0]] == moved[1]
    }

    /// Cycle decomposition, fixed points omitted.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.len()];
        let mut out = Vec::new();
        for s in 0..self.len() {
            if seen[s] || self.images[s] == s {
                continue;
            }
            let mut cyc = Vec::new();
            let mut i = s;
            while !seen[i] {
                seen[i] = true;
                cyc.push(i);
                i = self.images[i];
            }
            out.push(cyc);
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonodromyConfig {
    pub track: TrackConfig,
    /// Minimum distance from every loop to every branch projection.
    pub clearance: f64,
    /// Loop radius as a fraction of the distance to the nearest other projection.
    pub loop_fraction: f64,
}

impl Default for MonodromyConfig {
    fn default() -> Self {
        MonodromyConfig { track: TrackConfig::default(), clearance: 1e-3, loop_fraction: 0.4 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoopResult {
    pub path: Path,
    pub perm: Permutation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonodromyReport {
    pub basepoint: Complex64,
    #[serde(rename = "labels")]
    pub sheet_labels: Vec<Complex64>,
    pub loops: Vec<LoopResult>,
    pub product: Permutation,
}

impl MonodromyReport {
    pub fn permutations(&self) -> impl Iterator<Item = &Permutation> {
        self.loops.iter().map(|l| &l.perm)
    }
}

/// Distinct branch projections with the number of branch points over each.
pub fn branch_projections(q: &Polynomial) -> Result<Vec<(Complex64, usize)>> {
    let mut out: Vec<(Complex64, usize)> = Vec::new();
    for b in branch_locus(q)? {
        match out.iter_mut().find(|(u, _)| (u - b.u).norm() <= 1e-9 * (1.0 + u.norm())) {
            Some(entry) => entry.1 += 1,
            None => out.push((b.u, 1)),
        }
    }
    Ok(out)
}

/// Induced permutation of the critical points of `Q(., basepoint)` for each loop.
pub fn monodromy(q: &Polynomial, basepoint: Complex64, loops: &[Path], cfg: &MonodromyConfig) -> Result<MonodromyReport> {
    ensure_simple(q)?;
    let projections = branch_projections(q)?;
    let clear = |d: f64, point: Complex64| -> Result<()> {
        if d < cfg.clearance {
            Err(Error::InsufficientClearance { point, distance: d, clearance: cfg.clearance })
        } else {
            Ok(())
        }
    };
    for &(u, _) in &projections {
        clear((u - basepoint).norm(), u)?;
    }
    let var = Variation::new(q);
    let labels = var.critical_points(basepoint)?.roots;
    let label_of = |z: Complex64| -> Result<usize> {
        let (i, d) = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (i, (l - z).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("deg q >= 1");
        if d > 1e-6 * (1.0 + z.norm()) {
            return Err(Error::LoopNotClosed(format!("sheet ended at {z}, no label within tolerance")));
        }
        Ok(i)
    };

    let mut results = Vec::with_capacity(loops.len());
    for path in loops {
        let tol = JOIN_TOL * (1.0 + basepoint.norm());
        if (path.start() - basepoint).norm() > tol || !path.is_closed() {
            return Err(Error::LoopNotClosed(format!(
                "loop runs from {} to {}, basepoint {basepoint}",
                path.start(),
                path.end()
            )));
        }
        for &(u, _) in &projections {
            clear(path.distance_to(u), u)?;
        }
        let trajectories = track_all(q, path, &cfg.track)?;
        let mut images = vec![usize::MAX; labels.len()];
        for tr in &trajectories {
            images[label_of(tr.start_zeta)?] = label_of(tr.end_zeta)?;
        }
        let perm = Permutation::new(images)
            .map_err(|_| Error::LoopNotClosed("sheets did not return to distinct labels".into()))?;
        results.push(LoopResult { path: path.clone(), perm });
    }
    let product = results
        .iter()
        .fold(Permutation::identity(labels.len()), |acc, l| acc.then(&l.perm));
    Ok(MonodromyReport { basepoint, sheet_labels: labels, loops: results, product })
}

/// A lasso around one branch projection.
#[derive(Debug, Clone, PartialEq)]
pub struct SmallLoop {
    pub center: Complex64,
    /// Branch points projecting to `center`.
    pub multiplicity: usize,
    pub path: Path,
}

/// One lasso from `basepoint` around each distinct branch projection.
pub fn small_loops(q: &Polynomial, basepoint: Complex64, cfg: &MonodromyConfig) -> Result<Vec<SmallLoop>> {
    let projections = branch_projections(q)?;
    projections
        .iter()
        .enumerate()
        .map(|(i, &(center, multiplicity))| {
            let nearest = projections
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, (u, _))| (u - center).norm())
                .fold((center - basepoint).norm(), f64::min);
            let path = Path::lasso(basepoint, center, cfg.loop_fraction * nearest)?;
            Ok(SmallLoop { center, multiplicity, path })
        })
        .collect()
}

/// Radius of a circle about the origin enclosing every branch projection.
pub fn enclosing_radius(q: &Polynomial) -> Result<f64> {
    let max = branch_projections(q)?.iter().map(|(u, _)| u.norm()).fold(0.0, f64::max);
    Ok(1.5 * max + 1.0)
}

/// Loop from `basepoint` once around a circle that encloses all branch projections.
pub fn big_circle_loop(q: &Polynomial, basepoint: Complex64) -> Result<Path> {
    let r = enclosing_radius(q)?.max(basepoint.norm());
    Path::lasso(basepoint, Complex64::new(0.0, 0.0), r)
}

/// Picks a basepoint on the enclosing circle whose lassos all keep the
/// configured clearance, then runs every small loop followed by the big circle.
pub fn standard_monodromy(q: &Polynomial, cfg: &MonodromyConfig) -> Result<MonodromyReport> {
    ensure_simple(q)?;
    let radius = enclosing_radius(q)?;
    let projections = branch_projections(q)?;
    let mut last = None;
    for k in 0..16 {
        let basepoint = Complex64::from_polar(radius, 0.37 + 0.39 * k as f64);
        let mut loops: Vec<Path> = small_loops(q, basepoint, cfg)?.into_iter().map(|l| l.path).collect();
        loops.push(big_circle_loop(q, basepoint)?);
        let clearance_ok = loops
            .iter()
            .all(|p| projections.iter().all(|(u, _)| p.distance_to(*u) >= 10.0 * cfg.clearance));
        if !clearance_ok {
            continue;
        }
        match monodromy(q, basepoint, &loops, cfg) {
            Ok(r) => return Ok(r),
            Err(e @ (Error::PathNearBranchPoint { .. } | Error::SheetCollision { .. })) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.unwrap_or(Error::Precondition("no basepoint with enough clearance".into())))
}
