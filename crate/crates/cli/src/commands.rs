use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path as FsPath, PathBuf};

use critgeom_core::critgeo::{critical_radius, grr_disk_check, sendov_check, DiskLocation};
use critgeom_core::experiments::{
    blowup_scan, boundary_comparison, boundary_summary, maximize_rho, random_pn_sample, random_pn_with_root,
    split_designated, verify_identity, BoundaryComparison, BoundarySummary,
};
use critgeom_core::surface::{
    big_circle_loop, branch_disk_report, branch_locus, monodromy, sheets_at_infinity, small_loops,
    standard_monodromy, SheetClass,
};
use critgeom_core::tracker::{track, track_all, Path, Trajectory};
use critgeom_core::{Complex64, Polynomial};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::{CliError, Command, Format, RunConfig};

pub(crate) struct Outcome {
    pub check_passed: bool,
    pub message: Option<String>,
}

const DEFAULT_BUDGET: u64 = 100_000;
const DEFAULT_SHEET_RADIUS: f64 = 10.0;

#[derive(Serialize)]
struct BoundaryRun {
    rows: Vec<BoundaryComparison>,
    summary: BoundarySummary,
}

fn need<T: Clone>(value: &Option<T>, flag: &str, cmd: Command) -> Result<T, CliError> {
    value.clone().ok_or_else(|| CliError::Usage(format!("{cmd:?} requires {flag}")))
}

fn read_json<T: DeserializeOwned>(path: &FsPath) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Read { path: path.to_path_buf(), source })?;
    serde_json::from_str(&text).map_err(|source| CliError::Parse { path: path.to_path_buf(), source })
}

fn read_poly(path: &Option<PathBuf>, flag: &str, cmd: Command) -> Result<Polynomial, CliError> {
    read_json(&need(path, flag, cmd)?)
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

fn no_csv(cmd: Command) -> CliError {
    CliError::Usage(format!("{cmd:?} has no CSV form; use --json"))
}

fn emit(cfg: &RunConfig, text: &str) -> Result<(), CliError> {
    match &cfg.out {
        Some(path) => fs::write(path, text)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

fn csv_with<F: FnOnce(&mut Vec<u8>) -> std::io::Result<()>>(f: F) -> String {
    let mut buf = Vec::new();
    f(&mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("CSV is UTF-8")
}

fn trajectories_csv(trajs: &[Trajectory]) -> String {
    let mut text = String::new();
    for (k, tr) in trajs.iter().enumerate() {
        if trajs.len() > 1 {
            writeln!(text, "# sheet {}", k + 1).unwrap();
        }
        text.push_str(&csv_with(|w| tr.write_csv(w)));
    }
    text
}

pub(crate) fn execute(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let cmd = cfg.command;
    let tol = &cfg.tolerances;
    let csv = cfg.format == Format::Csv;
    let mut check_passed = true;
    let mut message = None;

    let text = match cmd {
        Command::Roots => {
            let p = read_poly(&cfg.poly, "--poly", cmd)?;
            let roots = p.roots()?;
            if csv {
                let mut t = String::from("re,im\n");
                for z in &roots.roots {
                    writeln!(t, "{},{}", z.re, z.im).unwrap();
                }
                t
            } else {
                json(&roots)
            }
        }
        Command::CriticalRadius => {
            let p = read_poly(&cfg.poly, "--poly", cmd)?;
            let w0 = need(&cfg.at, "--at", cmd)?;
            let rep = critical_radius(&p, w0)?;
            if csv {
                let mut t = String::from("re,im,distance,essential\n");
                for z in &rep.critical {
                    let essential = rep.essential.iter().any(|e| (e - z).norm() <= 1e-7);
                    writeln!(t, "{},{},{},{}", z.re, z.im, (z - w0).norm(), essential).unwrap();
                }
                t
            } else {
                json(&rep)
            }
        }
        Command::Sendov => {
            let p = read_poly(&cfg.poly, "--poly", cmd)?;
            let rep = sendov_check(&p, cfg.unit_disk)?;
            check_passed = rep.passes;
            if !rep.passes {
                message = Some(format!("max distance {} exceeds 1", rep.max_distance));
            }
            if csv {
                let mut t = String::from("zero_re,zero_im,nearest_re,nearest_im,distance\n");
                for r in &rep.per_zero {
                    writeln!(t, "{},{},{},{},{}", r.zero.re, r.zero.im, r.nearest.re, r.nearest.im, r.distance).unwrap();
                }
                t
            } else {
                json(&rep)
            }
        }
        Command::Grr => {
            let p = read_poly(&cfg.poly, "--poly", cmd)?;
            let rep = grr_disk_check(&p)?;
            check_passed = rep.has_closed_disk_zero;
            if !check_passed {
                message = Some("no critical point in the disk |2z - 1| <= 1".into());
            }
            if csv {
                let mut t = String::from("zeta_re,zeta_im,disk_value,location\n");
                for w in &rep.witnesses {
                    let loc = match w.location {
                        DiskLocation::Inside => "inside",
                        DiskLocation::Boundary => "boundary",
                        DiskLocation::Outside => "outside",
                    };
                    writeln!(t, "{},{},{},{loc}", w.zeta.re, w.zeta.im, w.disk_value).unwrap();
                }
                t
            } else {
                json(&rep)
            }
        }
        Command::Track => {
            let q = read_poly(&cfg.q, "--q", cmd)?;
            let path: Path = read_json(&need(&cfg.path, "--path", cmd)?)?;
            let trajs = match cfg.zeta {
                Some(z) => vec![track(&q, &path, z, &tol.experiment.track)?],
                None => track_all(&q, &path, &tol.experiment.track)?,
            };
            match (csv, cfg.zeta.is_some()) {
                (true, _) => trajectories_csv(&trajs),
                (false, true) => json(&trajs[0]),
                (false, false) => json(&trajs),
            }
        }
        Command::BranchLocus => {
            let q = read_poly(&cfg.q, "--q", cmd)?;
            let locus = branch_locus(&q)?;
            if csv {
                let mut t = String::from("w_re,w_im,u_re,u_im,residual\n");
                for b in &locus {
                    writeln!(t, "{},{},{},{},{}", b.w.re, b.w.im, b.u.re, b.u.im, b.residual).unwrap();
                }
                t
            } else {
                json(&locus)
            }
        }
        Command::BranchReport => {
            let q = read_poly(&cfg.q, "--q", cmd)?;
            let rep = branch_disk_report(&q)?;
            if csv {
                let mut t = String::from("w_re,w_im,u_re,u_im,abs_phi,violation\n");
                for r in &rep.rows {
                    writeln!(t, "{},{},{},{},{},{}", r.w.re, r.w.im, r.u.re, r.u.im, r.abs_phi, r.violation).unwrap();
                }
                t
            } else {
                json(&rep)
            }
        }
        Command::Sheets => {
            let q = read_poly(&cfg.q, "--q", cmd)?;
            let rep = sheets_at_infinity(&q, cfg.radius.unwrap_or(DEFAULT_SHEET_RADIUS), &tol.experiment.track)?;
            check_passed = rep.is_consistent();
            if !check_passed {
                message = Some(format!("{} unbounded sheets, bounded limits not matched one to one", rep.unbounded_count()));
            }
            if csv {
                let mut t = String::from("start_re,start_im,class,ratio_re,ratio_im,limit_re,limit_im\n");
                for r in &rep.per_sheet {
                    let (class, limit) = match r.class {
                        SheetClass::Unbounded => ("unbounded", String::from(",")),
                        SheetClass::ConvergesTo { limit } => ("bounded", format!("{},{}", limit.re, limit.im)),
                    };
                    writeln!(t, "{},{},{class},{},{},{limit}", r.start.re, r.start.im, r.ratio.re, r.ratio.im).unwrap();
                }
                t
            } else {
                json(&rep)
            }
        }
        Command::Monodromy => {
            let q = read_poly(&cfg.q, "--q", cmd)?;
            let rep = match cfg.at {
                None => standard_monodromy(&q, &tol.monodromy)?,
                Some(base) => {
                    let mut loops: Vec<Path> = small_loops(&q, base, &tol.monodromy)?.into_iter().map(|l| l.path).collect();
                    loops.push(big_circle_loop(&q, base)?);
                    monodromy(&q, base, &loops, &tol.monodromy)?
                }
            };
            if csv {
                let mut t = String::from("loop,perm\n");
                for (k, l) in rep.loops.iter().enumerate() {
                    let images: Vec<String> = l.perm.images().iter().map(|i| (i + 1).to_string()).collect();
                    writeln!(t, "{},{}", k + 1, images.join(" ")).unwrap();
                }
                t
            } else {
                json(&rep)
            }
        }
        Command::VerifyIdentity => {
            let p = read_poly(&cfg.poly, "--poly", cmd)?;
            let z1_index = cfg.z1_index.unwrap_or(0);
            let path: Path = match (&cfg.path, cfg.at) {
                (Some(file), None) => read_json(file)?,
                (None, Some(u)) => Path::line(split_designated(&p, z1_index)?.0, u),
                _ => return Err(CliError::Usage("VerifyIdentity requires exactly one of --path or --at".into())),
            };
            let rep = verify_identity(&p, z1_index, cfg.zeta_index.unwrap_or(0), &path, &tol.experiment)?;
            if csv {
                format!(
                    "u_re,u_im,zeta_end_re,zeta_end_im,abs_f_closed,abs_f_integral,abs_discrepancy,qf_residual\n{},{},{},{},{},{},{},{}\n",
                    rep.u.re,
                    rep.u.im,
                    rep.zeta_end.re,
                    rep.zeta_end.im,
                    rep.f_closed.norm(),
                    rep.f_integral.norm(),
                    rep.abs_discrepancy,
                    rep.qf_residual
                )
            } else {
                json(&rep)
            }
        }
        Command::Blowup => {
            let p = read_poly(&cfg.poly, "--poly", cmd)?;
            let w0 = need(&cfg.w0, "--w0", cmd)?;
            let rs = need(&cfg.r_list, "--r-list", cmd)?;
            let scan = blowup_scan(&p, cfg.z1_index.unwrap_or(0), w0, &rs, &tol.experiment)?;
            if csv {
                csv_with(|w| scan.write_csv(w))
            } else {
                json(&scan)
            }
        }
        Command::BoundaryCompare => {
            let rows = match &cfg.poly {
                Some(file) => {
                    let p: Polynomial = read_json(file)?;
                    let w0 = need(&cfg.w0, "--w0", cmd)?;
                    vec![boundary_comparison(&p, cfg.z1_index.unwrap_or(0), w0)?]
                }
                None => sampled_boundary(cfg)?,
            };
            let run = BoundaryRun { summary: boundary_summary(&rows), rows };
            if csv {
                let mut t = String::from("z1_re,z1_im,w0_re,w0_im,rho_interior,rho_boundary\n");
                for r in &run.rows {
                    writeln!(t, "{},{},{},{},{},{}", r.z1.re, r.z1.im, r.w0.re, r.w0.im, r.rho_interior, r.rho_boundary)
                        .unwrap();
                }
                t
            } else {
                json(&run)
            }
        }
        Command::SearchMaximal => {
            let n = need(&cfg.degree, "--degree", cmd)?;
            let res = maximize_rho(n, cfg.seed, cfg.budget.unwrap_or(DEFAULT_BUDGET), &tol.search)?;
            if csv {
                let mut t = String::from("iteration,rho\n");
                for p in &res.trace {
                    writeln!(t, "{},{}", p.iteration, p.rho).unwrap();
                }
                t
            } else {
                json(&res)
            }
        }
        Command::Sample => {
            let n = need(&cfg.degree, "--degree", cmd)?;
            let count = need(&cfg.count, "--count", cmd)?;
            let sample = match cfg.at {
                Some(root) => random_pn_with_root(n, root, count, cfg.seed)?,
                None => random_pn_sample(n, count, cfg.seed)?,
            };
            if csv {
                return Err(no_csv(cmd));
            }
            json(&sample)
        }
    };
    emit(cfg, &text)?;
    Ok(Outcome { check_passed, message })
}

/// Random elements of the unit-disk class; each interior zero nearest the
/// origin is pushed radially out to the circle, or to `--w0` when given.
fn sampled_boundary(cfg: &RunConfig) -> Result<Vec<BoundaryComparison>, CliError> {
    let cmd = cfg.command;
    let n = need(&cfg.degree, "--degree (or --poly)", cmd)?;
    let count = need(&cfg.count, "--count", cmd)?;
    let mut rows = Vec::with_capacity(count);
    for p in random_pn_sample(n, count, cfg.seed)? {
        let roots = p.roots()?.roots;
        let Some((k, z1)) = roots
            .iter()
            .enumerate()
            .filter(|(_, z)| z.norm() < 1.0 - 1e-9)
            .min_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
        else {
            continue;
        };
        let w0 = cfg.w0.unwrap_or_else(|| if z1.norm() > 0.0 { z1 / z1.norm() } else { Complex64::new(1.0, 0.0) });
        rows.push(boundary_comparison(&p, k, w0)?);
    }
    Ok(rows)
}
