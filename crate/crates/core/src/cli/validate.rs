//! Oracle-backed checks of the exact layer and cross-checks of the
//! closed forms.

use std::fmt::Write as _;

use crate::atom::atomic_steady_state;
use crate::error::{Error, Result};
use crate::fock::{
    approximation_gap, build_liouvillian, ehrenfest_residuals, evolve_sampled, extract_moments, steady_state_from,
    DensityMatrix, GapReport, TruncatedSpace,
};
use crate::fock::observables::EDGE_LIMIT;
use crate::moments::{steady_moments_closed, steady_moments_solve};
use crate::params::SystemParams;
use crate::quadrature::{squeezing_normal, vacuum_normal, variance_normal_assembled, variance_normal_closed};

use super::format::sig9;

pub const EHRENFEST_TOL: f64 = 1e-8;
pub const UNCOUPLED_TOL: f64 = 1e-4;
pub const GRID_TOL: f64 = 1e-10;
pub const SAMPLE_TIMES: [f64; 3] = [0.5, 1.0, 2.0];
const EHRENFEST_DT: f64 = 0.005;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// Failed or unverifiable because the state reaches the Fock cutoff.
    CutoffLimited,
    Skipped,
}

impl Status {
    fn tag(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::CutoffLimited => "CUTOFF",
            Status::Skipped => "SKIP",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
    pub gap: Option<GapReport>,
    pub gap_error: Option<String>,
}

impl ValidationReport {
    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| c.status == Status::Fail)
    }

    pub fn cutoff_limited(&self) -> bool {
        self.checks.iter().any(|c| c.status == Status::CutoffLimited)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            writeln!(s, "{:<6} {}: {}", c.status.tag(), c.name, c.detail).unwrap();
        }
        match (&self.gap, &self.gap_error) {
            (Some(g), _) => {
                writeln!(
                    s,
                    "approximation gap (oracle vs large-time approximation, n_max={}, edge population {}):",
                    g.n_max,
                    sig9(g.edge_population)
                )
                .unwrap();
                writeln!(s, "{:<12} {:>16} {:>16} {:>12}", "quantity", "oracle", "approx", "|gap|").unwrap();
                for row in g.atom_rows().iter().chain(g.field_rows().iter()) {
                    writeln!(
                        s,
                        "{:<12} {:>16} {:>16} {:>12}",
                        row.name,
                        sig9(row.oracle),
                        sig9(row.approx),
                        sig9(row.gap())
                    )
                    .unwrap();
                }
            }
            (None, Some(e)) => writeln!(s, "approximation gap not available: {e}").unwrap(),
            (None, None) => {}
        }
        s
    }
}

fn classify(ok: bool, edge: f64) -> Status {
    if edge >= EDGE_LIMIT {
        Status::CutoffLimited
    } else if ok {
        Status::Pass
    } else {
        Status::Fail
    }
}

fn ehrenfest_checks(params: &SystemParams, space: &TruncatedSpace) -> Result<Vec<Check>> {
    let l = build_liouvillian(params, space);
    let states = evolve_sampled(&DensityMatrix::ground(*space), &l, &SAMPLE_TIMES, EHRENFEST_DT)?;
    let mut out = Vec::new();
    for (t, rho) in SAMPLE_TIMES.iter().zip(&states) {
        let r = ehrenfest_residuals(rho, params, space)?;
        let (name, worst) = r.worst();
        let status = if r.cutoff_limited {
            Status::CutoffLimited
        } else if worst < EHRENFEST_TOL {
            Status::Pass
        } else {
            Status::Fail
        };
        out.push(Check {
            name: format!("ehrenfest t={t}"),
            status,
            detail: format!(
                "max residual {} ({name}) of 18, edge population {}",
                sig9(worst),
                sig9(r.edge_population)
            ),
        });
    }
    Ok(out)
}

fn uncoupled_check(params: &SystemParams, space: &TruncatedSpace) -> Result<Check> {
    let p0 = SystemParams::new(params.kappa(), params.epsilon(), 0.0)?;
    let l = build_liouvillian(&p0, space);
    let rho = steady_state_from(&l, &DensityMatrix::ground(*space))?;
    let (oracle, _) = extract_moments(&rho);
    let exact = steady_moments_closed(&p0, &atomic_steady_state(&p0)?)?;
    let diff = [
        oracle.n_a - exact.n_a,
        oracle.n_b - exact.n_b,
        (oracle.ab - exact.ab).norm(),
        (oracle.ba - exact.ba).norm(),
    ]
    .iter()
    .map(|d| d.abs())
    .fold(0.0, f64::max);
    let edge = rho.edge_population();
    Ok(Check {
        name: "uncoupled oracle vs moments".into(),
        status: classify(diff < UNCOUPLED_TOL, edge),
        detail: format!("max |diff| {} (n_a, n_b, ab, ba), edge population {}", sig9(diff), sig9(edge)),
    })
}

fn grid(params: &SystemParams) -> Vec<SystemParams> {
    let mut out = Vec::new();
    for k in [0.5, 0.8, 1.2] {
        for f in [0.1, 0.2, 0.3, 0.45] {
            for gc in [0.5, 16.0 / 15.0, 1.25] {
                out.push(SystemParams::from_gamma_c(k, f * k, gc).expect("grid parameters are valid"));
            }
        }
    }
    if params.dynamics_valid() {
        out.push(*params);
    }
    out
}

fn grid_checks(params: &SystemParams) -> Result<Vec<Check>> {
    let mut solve: f64 = 0.0;
    let mut assembled: f64 = 0.0;
    let mut squeeze: f64 = 0.0;
    let mut skipped = 0;
    let points = grid(params);
    for p in &points {
        let atom = atomic_steady_state(p)?;
        solve = solve.max(steady_moments_solve(p, &atom)?.max_abs_diff(&steady_moments_closed(p, &atom)?));
        let (ap, am) = variance_normal_assembled(p, &atom)?;
        let (cp, cm) = variance_normal_closed(p)?;
        assembled = assembled.max((ap - cp).abs()).max((am - cm?).abs());
        match squeezing_normal(p) {
            Ok(s) => squeeze = squeeze.max((s - (1.0 - cp / vacuum_normal(p))).abs()),
            Err(Error::Domain(_)) => skipped += 1,
            Err(e) => return Err(e),
        }
    }
    let n = points.len();
    let mut out = vec![
        Check {
            name: "moment solver vs closed form".into(),
            status: if solve < GRID_TOL { Status::Pass } else { Status::Fail },
            detail: format!("max |diff| {} over {n} points", sig9(solve)),
        },
        Check {
            name: "assembled vs closed variances".into(),
            status: if assembled < GRID_TOL { Status::Pass } else { Status::Fail },
            detail: format!("max |diff| {} over {n} points", sig9(assembled)),
        },
    ];
    let mut sq = Check {
        name: "squeezing vs vacuum ratio".into(),
        status: if squeeze < 1e-12 { Status::Pass } else { Status::Fail },
        detail: format!("max |diff| {} over {} points", sig9(squeeze), n - skipped),
    };
    if skipped > 0 {
        write!(sq.detail, "; {skipped} point(s) skipped at gamma_c = 0 (vacuum reference undefined)").unwrap();
    }
    out.push(sq);
    Ok(out)
}

pub fn run_validation(params: &SystemParams, space: &TruncatedSpace) -> Result<ValidationReport> {
    let mut checks = ehrenfest_checks(params, space)?;
    checks.push(uncoupled_check(params, space)?);
    checks.extend(grid_checks(params)?);
    if params.gamma_c() == 0.0 {
        checks.push(Check {
            name: "squeezing at requested point".into(),
            status: Status::Skipped,
            detail: "gamma_c = 0: vacuum reference undefined".into(),
        });
    }
    let (gap, gap_error) = match approximation_gap(params, space) {
        Ok(g) => (Some(g), None),
        Err(e) => (None, Some(e.to_string())),
    };
    Ok(ValidationReport { checks, gap, gap_error })
}
