use std::io::{self, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{check_unit, ensure_simple, f_closed, split_designated, ExperimentConfig};
use crate::critgeo::critical_points;
use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::tracker::{track_all_from, Path};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlowupRow {
    pub r: f64,
    pub u: Complex64,
    /// `|f|` per sheet, in the `(re, im)` order of the critical points of `p`.
    pub abs_f: Vec<f64>,
    pub min_abs_f: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlowupScan {
    pub z1: Complex64,
    pub w0: Complex64,
    pub rows: Vec<BlowupRow>,
    pub crossing_r: Option<f64>,
}

impl BlowupScan {
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        let sheets = self.rows.first().map_or(0, |r| r.abs_f.len());
        write!(w, "r,min_abs_f")?;
        for k in 1..=sheets {
            write!(w, ",f_{k}")?;
        }
        writeln!(w)?;
        for row in &self.rows {
            write!(w, "{},{}", row.r, row.min_abs_f)?;
            for f in &row.abs_f {
                write!(w, ",{f}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// Moves the zero `z1` of `p` first to `w0` and then out along the ray
/// `r w0`, recording `|f|` on every sheet at each requested `r`.
///
/// `|f|` is unchanged by the rescaling `p -> r^n p(z/r)` (both `zeta - u` and
/// `zeta - z1` scale by `r`), so the scan follows `Q(., r w0)` for the
/// unscaled cofactor directly.
pub fn blowup_scan(
    p: &Polynomial,
    z1_index: usize,
    w0: Complex64,
    r_list: &[f64],
    cfg: &ExperimentConfig,
) -> Result<BlowupScan> {
    check_unit(w0)?;
    if r_list.is_empty() {
        return Err(Error::Precondition("empty list of radii".into()));
    }
    if r_list.iter().any(|r| !(r.is_finite() && *r >= 1.0)) {
        return Err(Error::Precondition("radii must be finite and at least 1".into()));
    }
    if r_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Precondition("radii must be strictly increasing".into()));
    }
    ensure_simple(p)?;
    let (z1, q) = split_designated(p, z1_index)?;
    let starts = critical_points(p)?.roots;

    let mut current = starts.clone();
    let mut u = z1;
    let advance = |target: Complex64, current: &mut Vec<Complex64>, u: &mut Complex64| -> Result<()> {
        if (target - *u).norm() > 0.0 {
            let trajs = track_all_from(&q, &Path::line(*u, target), current, &cfg.track)?;
            *current = trajs.iter().map(|t| t.end_zeta).collect();
            *u = target;
        }
        Ok(())
    };
    advance(w0, &mut current, &mut u)?;

    let mut rows = Vec::with_capacity(r_list.len());
    for &r in r_list {
        advance(w0 * r, &mut current, &mut u)?;
        let abs_f = starts
            .iter()
            .zip(&current)
            .map(|(&s, &e)| f_closed(&q, s, e).map(|f| f.norm()))
            .collect::<Result<Vec<f64>>>()?;
        let min_abs_f = abs_f.iter().copied().fold(f64::INFINITY, f64::min);
        rows.push(BlowupRow { r, u, abs_f, min_abs_f });
    }
    let crossing_r = rows.iter().find(|row| row.min_abs_f > 1.0).map(|row| row.r);
    Ok(BlowupScan { z1, w0, rows, crossing_r })
}
