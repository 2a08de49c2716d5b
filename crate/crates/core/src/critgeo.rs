//! Critical points and the classical inequalities about them.
//!
//! The critical radius of `p` at a zero `w0` is the distance from `w0` to the
//! nearest zero of `p'`; the critical points at that distance are *essential*.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::roots::lex_cmp;
use crate::poly::{Polynomial, RootConfig, RootList};

/// Band used when deciding that a critical point lies on the critical circle.
pub const ESSENTIAL_TOL: f64 = 1e-9;
/// Slack allowed on `max_distance <= 1`.
pub const SENDOV_TOL: f64 = 1e-9;
/// Half-width of the boundary band of `|2z - 1| = 1`.
pub const DISK_TOL: f64 = 1e-9;
/// Relative slack for roots lying in the closed unit disk.
pub const UNIT_DISK_TOL: f64 = 1e-9;

/// Threshold for treating `|p(z)|` as zero.
pub fn zero_tolerance(p: &Polynomial) -> f64 {
    1e-8 * (1.0 + p.coefficient_scale())
}

pub fn critical_points(p: &Polynomial) -> Result<RootList> {
    if p.degree() < 2 {
        return Err(Error::DegreeTooLow { degree: p.degree(), required: 2 });
    }
    p.derivative()?.roots()
}

fn check_zero(p: &Polynomial, w0: Complex64) -> Result<()> {
    let value = p.eval(w0).norm();
    if value > zero_tolerance(p) {
        return Err(Error::NotAZero { point: w0, value });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalRadiusReport {
    pub rho: f64,
    /// Distinct critical points on the critical circle, sorted by `(re, im)`.
    pub essential: Vec<Complex64>,
    /// All critical points, with multiplicity.
    pub critical: Vec<Complex64>,
}

pub fn critical_radius(p: &Polynomial, w0: Complex64) -> Result<CriticalRadiusReport> {
    if p.degree() < 2 {
        return Err(Error::DegreeTooLow { degree: p.degree(), required: 2 });
    }
    check_zero(p, w0)?;
    let crit = critical_points(p)?;
    Ok(radius_from_critical(w0, crit.roots))
}

pub(crate) fn radius_from_critical(w0: Complex64, critical: Vec<Complex64>) -> CriticalRadiusReport {
    let rho = critical.iter().map(|z| (z - w0).norm()).fold(f64::INFINITY, f64::min);
    let band = ESSENTIAL_TOL * (1.0 + rho);
    let merge = RootConfig::default().cluster_tol;
    let mut essential: Vec<Complex64> = Vec::new();
    for &z in &critical {
        if (z - w0).norm() - rho <= band && essential.iter().all(|e| (e - z).norm() >= merge) {
            essential.push(z);
        }
    }
    essential.sort_by(lex_cmp);
    CriticalRadiusReport { rho, essential, critical }
}

/// Convex hull of a finite point set.
#[derive(Debug, Clone, PartialEq)]
pub enum Hull {
    Point(Complex64),
    Segment(Complex64, Complex64),
    /// Vertices in counter-clockwise order, no three collinear.
    Polygon(Vec<Complex64>),
}

fn cross(o: Complex64, a: Complex64, b: Complex64) -> f64 {
    (a.re - o.re) * (b.im - o.im) - (a.im - o.im) * (b.re - o.re)
}

/// Andrew's monotone chain.
pub fn convex_hull(points: &[Complex64]) -> Option<Hull> {
    let mut pts = points.to_vec();
    pts.sort_by(lex_cmp);
    pts.dedup();
    match pts.len() {
        0 => return None,
        1 => return Some(Hull::Point(pts[0])),
        _ => {}
    }
    let mut lower: Vec<Complex64> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Complex64> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    Some(if lower.len() == 2 { Hull::Segment(lower[0], lower[1]) } else { Hull::Polygon(lower) })
}

fn segment_distance(z: Complex64, a: Complex64, b: Complex64) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (z - a).norm();
    }
    let t = (((z - a) * d.conj()).re / len2).clamp(0.0, 1.0);
    (z - (a + d * t)).norm()
}

impl Hull {
    /// Positive outside, nonpositive inside. For polygons this is the largest
    /// outward edge-normal offset, which has the sign of the true distance.
    pub fn signed_distance(&self, z: Complex64) -> f64 {
        match self {
            Hull::Point(p) => (z - p).norm(),
            Hull::Segment(a, b) => segment_distance(z, *a, *b),
            Hull::Polygon(vs) => {
                let n = vs.len();
                (0..n)
                    .map(|i| {
                        let (a, b) = (vs[i], vs[(i + 1) % n]);
                        let e = b - a;
                        let normal = Complex64::new(e.im, -e.re) / e.norm();
                        ((z - a) * normal.conj()).re
                    })
                    .fold(f64::NEG_INFINITY, f64::max)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussLucasReport {
    pub inside: bool,
    pub worst_signed_distance: f64,
    pub tolerance: f64,
}

/// Checks that every critical point lies in the closed convex hull of the roots.
pub fn gauss_lucas_check(p: &Polynomial) -> Result<GaussLucasReport> {
    let crit = critical_points(p)?;
    let roots = p.roots()?;
    let hull = convex_hull(&roots.roots).expect("degree >= 2 has roots");
    let max_root = roots.roots.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let tolerance = 1e-9 * (1.0 + max_root);
    let worst = crit
        .roots
        .iter()
        .map(|&z| hull.signed_distance(z))
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(GaussLucasReport { inside: worst <= tolerance, worst_signed_distance: worst, tolerance })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SendovRow {
    pub zero: Complex64,
    pub nearest: Complex64,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SendovReport {
    pub per_zero: Vec<SendovRow>,
    pub max_distance: f64,
    pub passes: bool,
}

/// Distance from every zero to its nearest critical point.
pub fn sendov_check(p: &Polynomial, assume_unit_disk: bool) -> Result<SendovReport> {
    let crit = critical_points(p)?;
    let roots = p.roots()?;
    if assume_unit_disk {
        if let Some(&root) = roots.roots.iter().find(|z| z.norm() > 1.0 + UNIT_DISK_TOL) {
            return Err(Error::RootOutsideDisk { root });
        }
    }
    let per_zero: Vec<SendovRow> = roots
        .roots
        .iter()
        .map(|&zero| {
            let (nearest, distance) = crit
                .roots
                .iter()
                .map(|&c| (c, (c - zero).norm()))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .expect("degree >= 2 has critical points");
            SendovRow { zero, nearest, distance }
        })
        .collect();
    let max_distance = per_zero.iter().map(|r| r.distance).fold(0.0, f64::max);
    Ok(SendovReport { per_zero, max_distance, passes: max_distance <= 1.0 + SENDOV_TOL })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiskLocation {
    Inside,
    Boundary,
    Outside,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskWitness {
    pub zeta: Complex64,
    /// `|2 zeta - 1|`
    pub disk_value: f64,
    pub location: DiskLocation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiskReport {
    pub has_closed_disk_zero: bool,
    pub has_open_disk_zero: bool,
    /// Every critical point on the circle `|2z - 1| = 1`.
    pub all_on_circle: bool,
    pub witnesses: Vec<DiskWitness>,
}

impl DiskReport {
    /// Either a critical point in the open disk, or all of them on its boundary.
    pub fn rider_holds(&self) -> bool {
        self.has_open_disk_zero || self.all_on_circle
    }
}

/// Classifies the critical points of `p` (with `p(1) = 0`) against the disk `|2z - 1| <= 1`.
pub fn grr_disk_check(p: &Polynomial) -> Result<DiskReport> {
    check_zero(p, Complex64::new(1.0, 0.0))?;
    let crit = critical_points(p)?;
    let witnesses: Vec<DiskWitness> = crit
        .roots
        .iter()
        .map(|&zeta| {
            let disk_value = (zeta * 2.0 - 1.0).norm();
            let location = if disk_value < 1.0 - DISK_TOL {
                DiskLocation::Inside
            } else if disk_value <= 1.0 + DISK_TOL {
                DiskLocation::Boundary
            } else {
                DiskLocation::Outside
            };
            DiskWitness { zeta, disk_value, location }
        })
        .collect();
    Ok(DiskReport {
        has_closed_disk_zero: witnesses.iter().any(|w| w.location != DiskLocation::Outside),
        has_open_disk_zero: witnesses.iter().any(|w| w.location == DiskLocation::Inside),
        all_on_circle: witnesses.iter().all(|w| w.location == DiskLocation::Boundary),
        witnesses,
    })
}
