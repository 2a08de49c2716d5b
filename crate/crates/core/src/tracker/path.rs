//! Piecewise paths in the complex plane, parametrized by `t in [0, 1]`
//! proportionally to arc length.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Endpoints of consecutive segments must agree to this (relative) tolerance.
pub const JOIN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum Segment {
    Line { a: Complex64, b: Complex64 },
    Arc { center: Complex64, radius: f64, angle_start: f64, angle_end: f64 },
}

impl Segment {
    pub fn length(&self) -> f64 {
        match *self {
            Segment::Line { a, b } => (b - a).norm(),
            Segment::Arc { radius, angle_start, angle_end, .. } => radius * (angle_end - angle_start).abs(),
        }
    }

    /// Point at local parameter `s in [0, 1]`.
    pub fn point(&self, s: f64) -> Complex64 {
        match *self {
            Segment::Line { a, b } => a + (b - a) * s,
            Segment::Arc { center, radius, angle_start, angle_end } => {
                center + Complex64::from_polar(radius, angle_start + s * (angle_end - angle_start))
            }
        }
    }

    /// Derivative with respect to the local parameter `s`.
    pub fn tangent(&self, s: f64) -> Complex64 {
        match *self {
            Segment::Line { a, b } => b - a,
            Segment::Arc { radius, angle_start, angle_end, .. } => {
                let sweep = angle_end - angle_start;
                Complex64::new(0.0, sweep) * Complex64::from_polar(radius, angle_start + s * sweep)
            }
        }
    }

    pub fn start(&self) -> Complex64 {
        self.point(0.0)
    }

    pub fn end(&self) -> Complex64 {
        match *self {
            Segment::Line { b, .. } => b,
            _ => self.point(1.0),
        }
    }

    pub fn distance_to(&self, z: Complex64) -> f64 {
        match *self {
            Segment::Line { a, b } => {
                let d = b - a;
                let len2 = d.norm_sqr();
                if len2 == 0.0 {
                    return (z - a).norm();
                }
                let s = (((z - a) * d.conj()).re / len2).clamp(0.0, 1.0);
                (z - (a + d * s)).norm()
            }
            Segment::Arc { center, radius, angle_start, angle_end } => {
                let sweep = angle_end - angle_start;
                let rel = z - center;
                let on_arc = if sweep.abs() >= TAU || rel.norm() == 0.0 {
                    true
                } else {
                    let phi = rel.arg();
                    let offset = ((phi - angle_start) * sweep.signum()).rem_euclid(TAU);
                    offset <= sweep.abs()
                };
                if on_arc {
                    (rel.norm() - radius).abs()
                } else {
                    (z - self.start()).norm().min((z - self.end()).norm())
                }
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let finite = |c: Complex64| c.re.is_finite() && c.im.is_finite();
        match *self {
            Segment::Line { a, b } if finite(a) && finite(b) => Ok(()),
            Segment::Arc { center, radius, angle_start, angle_end }
                if finite(center) && angle_start.is_finite() && angle_end.is_finite() =>
            {
                if radius.is_finite() && radius > 0.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidPath(format!("arc radius must be positive, got {radius}")))
                }
            }
            _ => Err(Error::InvalidPath("non-finite segment data".into())),
        }
    }
}

/// A maximal stretch of the global parameter covered by one segment.
#[derive(Debug, Clone, Copy)]
pub struct Piece {
    pub t0: f64,
    pub t1: f64,
    pub segment: Segment,
}

impl Piece {
    fn local(&self, t: f64) -> f64 {
        if self.t1 > self.t0 {
            ((t - self.t0) / (self.t1 - self.t0)).clamp(0.0, 1.0)
        } else {
            0.0
        }
    }

    pub fn point(&self, t: f64) -> Complex64 {
        if t >= self.t1 {
            return self.segment.end();
        }
        self.segment.point(self.local(t))
    }

    /// `du/dt` in the global parameter.
    pub fn velocity(&self, t: f64) -> Complex64 {
        if self.segment.length() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        self.segment.tangent(self.local(t)) / (self.t1 - self.t0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PathRepr", into = "PathRepr")]
pub struct Path {
    segments: Vec<Segment>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PathRepr {
    segments: Vec<Segment>,
}

impl TryFrom<PathRepr> for Path {
    type Error = Error;
    fn try_from(r: PathRepr) -> Result<Self> {
        Path::new(r.segments)
    }
}

impl From<Path> for PathRepr {
    fn from(p: Path) -> Self {
        PathRepr { segments: p.segments }
    }
}

impl Path {
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidPath("no segments".into()));
        }
        for s in &segments {
            s.validate()?;
        }
        for (i, w) in segments.windows(2).enumerate() {
            let (e, s) = (w[0].end(), w[1].start());
            if (e - s).norm() > JOIN_TOL * (1.0 + e.norm()) {
                return Err(Error::InvalidPath(format!("segment {} ends at {e} but segment {} starts at {s}", i, i + 1)));
            }
        }
        Ok(Path { segments })
    }

    pub fn constant(u: Complex64) -> Self {
        Path { segments: vec![Segment::Line { a: u, b: u }] }
    }

    pub fn line(a: Complex64, b: Complex64) -> Self {
        Path { segments: vec![Segment::Line { a, b }] }
    }

    pub fn polyline(points: &[Complex64]) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidPath("polyline needs two points".into()));
        }
        Path::new(points.windows(2).map(|w| Segment::Line { a: w[0], b: w[1] }).collect())
    }

    /// Full counter-clockwise circle starting at angle `start`, as two half arcs.
    pub fn circle(center: Complex64, radius: f64, start: f64) -> Result<Self> {
        Path::new(vec![
            Segment::Arc { center, radius, angle_start: start, angle_end: start + PI },
            Segment::Arc { center, radius, angle_start: start + PI, angle_end: start + TAU },
        ])
    }

    /// Closed loop at `base`: out along a straight tail to the circle about
    /// `center`, once around it counter-clockwise, and back along the tail.
    pub fn lasso(base: Complex64, center: Complex64, radius: f64) -> Result<Self> {
        let rel = base - center;
        let angle = if rel.norm() == 0.0 { 0.0 } else { rel.arg() };
        let attach = center + Complex64::from_polar(radius, angle);
        let mut segments = Vec::new();
        let tail = (attach - base).norm() > JOIN_TOL * (1.0 + base.norm());
        if tail {
            segments.push(Segment::Line { a: base, b: attach });
        }
        segments.push(Segment::Arc { center, radius, angle_start: angle, angle_end: angle + PI });
        segments.push(Segment::Arc { center, radius, angle_start: angle + PI, angle_end: angle + TAU });
        if tail {
            segments.push(Segment::Line { a: segments[segments.len() - 1].end(), b: base });
        }
        Path::new(segments)
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn length(&self) -> f64 {
        self.segments.iter().map(Segment::length).sum()
    }

    pub fn start(&self) -> Complex64 {
        self.segments[0].start()
    }

    pub fn end(&self) -> Complex64 {
        self.segments[self.segments.len() - 1].end()
    }

    pub fn is_closed(&self) -> bool {
        (self.end() - self.start()).norm() <= JOIN_TOL * (1.0 + self.start().norm())
    }

    /// Pieces of positive length covering `[0, 1]`; a path of zero total length
    /// yields a single constant piece.
    pub fn pieces(&self) -> Vec<Piece> {
        let total = self.length();
        if total == 0.0 {
            return vec![Piece { t0: 0.0, t1: 1.0, segment: self.segments[0] }];
        }
        let mut out: Vec<Piece> = Vec::new();
        let mut acc = 0.0;
        for s in &self.segments {
            let len = s.length();
            if len == 0.0 {
                continue;
            }
            let t0 = acc / total;
            acc += len;
            out.push(Piece { t0, t1: acc / total, segment: *s });
        }
        if let Some(last) = out.last_mut() {
            last.t1 = 1.0;
        }
        out
    }

    pub fn point(&self, t: f64) -> Complex64 {
        let pieces = self.pieces();
        let piece = pieces.iter().find(|p| t <= p.t1).unwrap_or(&pieces[pieces.len() - 1]);
        piece.point(t)
    }

    pub fn distance_to(&self, z: Complex64) -> f64 {
        self.segments.iter().map(|s| s.distance_to(z)).fold(f64::INFINITY, f64::min)
    }
}
