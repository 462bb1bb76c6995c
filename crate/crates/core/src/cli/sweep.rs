//! Grid evaluation of the variances and squeezing, with CSV and SVG output.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::config::{make_params, Format, Ordering, SweepConfig};
use super::format::sig9;
use crate::atom::atomic_steady_state;
use crate::error::{Error, Result};
use crate::moments::steady_moments_closed;
use crate::quadrature::{squeezing_normal, vacuum_normal, variance_arbitrary, variance_minus_closed, variance_plus_closed};

pub const CSV_HEADER: &str = "epsilon,var_plus,var_minus,squeezing,vacuum_level";

/// Arbitrary-order two-mode vacuum variance.
const ARBITRARY_VACUUM: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Row {
    pub epsilon: f64,
    pub var_plus: Option<f64>,
    pub var_minus: Option<f64>,
    pub squeezing: Option<f64>,
    pub vacuum_level: Option<f64>,
}

/// Cells left empty, keyed by (column, reason), with the affected epsilons.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Notes(BTreeMap<(&'static str, String), Vec<f64>>);

impl Notes {
    fn add(&mut self, column: &'static str, reason: &Error, epsilon: f64) {
        self.0.entry((column, reason.to_string())).or_default().push(epsilon);
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn lines(&self) -> Vec<String> {
        self.0
            .iter()
            .map(|((col, reason), eps)| {
                let at = if eps.len() <= 3 {
                    eps.iter().map(|e| sig9(*e)).collect::<Vec<_>>().join(", ")
                } else {
                    format!("{} points in [{}, {}]", eps.len(), sig9(eps[0]), sig9(eps[eps.len() - 1]))
                };
                format!("note: {col} left empty at epsilon = {at}: {reason}")
            })
            .collect()
    }
}

/// One convention's rows. `ordering` must be `Normal` or `Arbitrary`.
pub fn sweep_rows(cfg: &SweepConfig, ordering: Ordering) -> Result<(Vec<Row>, Notes)> {
    assert!(ordering != Ordering::Both, "expand `both` before calling");
    let mut notes = Notes::default();
    let mut rows = Vec::with_capacity(cfg.steps);
    for eps in cfg.grid() {
        let params = make_params(cfg.kappa, eps, cfg.coupling)?;
        let mut keep = |col, r: Result<f64>| match r {
            Ok(v) => Some(v),
            Err(e) => {
                notes.add(col, &e, eps);
                None
            }
        };
        let row = match ordering {
            Ordering::Normal => Row {
                epsilon: eps,
                var_plus: keep("var_plus", variance_plus_closed(&params)),
                var_minus: keep("var_minus", variance_minus_closed(&params)),
                squeezing: keep("squeezing", squeezing_normal(&params)),
                vacuum_level: Some(vacuum_normal(&params)),
            },
            _ => {
                let vars = atomic_steady_state(&params)
                    .and_then(|atom| steady_moments_closed(&params, &atom))
                    .map(|m| variance_arbitrary(&m));
                Row {
                    epsilon: eps,
                    var_plus: keep("var_plus", vars.clone().map(|v| v.0)),
                    var_minus: keep("var_minus", vars.map(|v| v.1)),
                    squeezing: None,
                    vacuum_level: Some(ARBITRARY_VACUUM),
                }
            }
        };
        rows.push(row);
    }
    Ok((rows, notes))
}

fn cell(v: Option<f64>) -> String {
    v.map(sig9).unwrap_or_default()
}

pub fn header_comment(verb: &str, cfg: &SweepConfig, ordering: Ordering) -> Result<String> {
    let p = make_params(cfg.kappa, cfg.eps_min, cfg.coupling)?;
    Ok(format!(
        "# cascade-squeeze {verb} kappa={} gamma_c={} g={} eps_min={} eps_max={} steps={} ordering={}",
        sig9(cfg.kappa),
        sig9(p.gamma_c()),
        sig9(p.g()),
        sig9(cfg.eps_min),
        sig9(cfg.eps_max),
        cfg.steps,
        ordering.name()
    ))
}

pub fn to_csv(comment: &str, rows: &[Row]) -> String {
    let mut s = String::new();
    writeln!(s, "{comment}").unwrap();
    writeln!(s, "{CSV_HEADER}").unwrap();
    for r in rows {
        writeln!(
            s,
            "{},{},{},{},{}",
            sig9(r.epsilon),
            cell(r.var_plus),
            cell(r.var_minus),
            cell(r.squeezing),
            cell(r.vacuum_level)
        )
        .unwrap();
    }
    s
}

/// Quantity drawn in the SVG plot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Series {
    VarPlus,
    Squeezing,
}

impl Series {
    fn label(self) -> &'static str {
        match self {
            Series::VarPlus => "var_plus",
            Series::Squeezing => "squeezing",
        }
    }

    fn value(self, r: &Row) -> Option<f64> {
        match self {
            Series::VarPlus => r.var_plus,
            Series::Squeezing => r.squeezing,
        }
    }
}

fn padded_range(lo: f64, hi: f64) -> (f64, f64) {
    if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}

const W: f64 = 640.0;
const H: f64 = 400.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 20.0;
const BOTTOM: f64 = 50.0;
const TICKS: usize = 5;

/// Single-polyline plot; undefined points are skipped.
pub fn to_svg(rows: &[Row], series: Series) -> String {
    let pts: Vec<(f64, f64)> = rows.iter().filter_map(|r| series.value(r).map(|v| (r.epsilon, v))).collect();
    let (x0, x1) = padded_range(
        rows.iter().map(|r| r.epsilon).fold(f64::INFINITY, f64::min),
        rows.iter().map(|r| r.epsilon).fold(f64::NEG_INFINITY, f64::max),
    );
    let (y0, y1) = if pts.is_empty() {
        (0.0, 1.0)
    } else {
        padded_range(
            pts.iter().map(|p| p.1).fold(f64::INFINITY, f64::min),
            pts.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max),
        )
    };
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * (W - LEFT - RIGHT);
    let sy = |y: f64| H - BOTTOM - (y - y0) / (y1 - y0) * (H - TOP - BOTTOM);

    let mut s = String::new();
    writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#).unwrap();
    writeln!(
        s,
        r#"<path d="M{LEFT} {TOP} V{} H{}" fill="none" stroke="black"/>"#,
        H - BOTTOM,
        W - RIGHT
    )
    .unwrap();
    for i in 0..TICKS {
        let f = i as f64 / (TICKS - 1) as f64;
        let (xv, yv) = (x0 + f * (x1 - x0), y0 + f * (y1 - y0));
        let (px, py) = (sx(xv), sy(yv));
        writeln!(
            s,
            r#"<line x1="{px:.2}" y1="{}" x2="{px:.2}" y2="{}" stroke="black"/><text x="{px:.2}" y="{}" font-size="11" text-anchor="middle">{}</text>"#,
            H - BOTTOM,
            H - BOTTOM + 5.0,
            H - BOTTOM + 18.0,
            sig9(round4(xv))
        )
        .unwrap();
        writeln!(
            s,
            r#"<line x1="{}" y1="{py:.2}" x2="{LEFT}" y2="{py:.2}" stroke="black"/><text x="{}" y="{:.2}" font-size="11" text-anchor="end">{}</text>"#,
            LEFT - 5.0,
            LEFT - 8.0,
            py + 4.0,
            sig9(round4(yv))
        )
        .unwrap();
    }
    writeln!(
        s,
        r#"<text x="{:.2}" y="{}" font-size="13" text-anchor="middle">ε</text>"#,
        LEFT + (W - LEFT - RIGHT) / 2.0,
        H - 10.0
    )
    .unwrap();
    writeln!(
        s,
        r#"<text x="15" y="{:.2}" font-size="13" text-anchor="middle" transform="rotate(-90 15 {:.2})">{}</text>"#,
        TOP + (H - TOP - BOTTOM) / 2.0,
        TOP + (H - TOP - BOTTOM) / 2.0,
        series.label()
    )
    .unwrap();
    let poly: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
    writeln!(s, r#"<polyline points="{}" fill="none" stroke="black"/>"#, poly.join(" ")).unwrap();
    s.push_str("</svg>\n");
    s
}

fn round4(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let scale = 10f64.powi(3 - x.abs().log10().floor() as i32);
    (x * scale).round() / scale
}

/// Output files for one convention: `(csv, svg)` paths, either may be absent.
pub fn output_paths(out: &Path, format: Format, ordering: Ordering, all: Ordering) -> (Option<PathBuf>, Option<PathBuf>) {
    let single_file = format != Format::Both && all != Ordering::Both;
    if single_file {
        return match format {
            Format::Csv => (Some(out.to_path_buf()), None),
            _ => (None, Some(out.to_path_buf())),
        };
    }
    let stem = match out.extension().and_then(|e| e.to_str()) {
        Some("csv") | Some("svg") => out.with_extension(""),
        _ => out.to_path_buf(),
    };
    let suffix = if all == Ordering::Both {
        format!(".{}", ordering.name())
    } else {
        String::new()
    };
    let with = |ext: &str| {
        let mut s = stem.clone().into_os_string();
        s.push(format!("{suffix}.{ext}"));
        PathBuf::from(s)
    };
    (
        (format != Format::Svg).then(|| with("csv")),
        (format != Format::Csv).then(|| with("svg")),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::config::{Coupling, DEFAULT_GAMMA_C};

    fn cfg(gc: f64, ordering: Ordering) -> SweepConfig {
        SweepConfig {
            kappa: 0.8,
            coupling: Coupling::GammaC(gc),
            eps_min: 0.0,
            eps_max: 0.4,
            steps: 101,
            ordering,
            out: None,
            format: Format::Csv,
        }
    }

    #[test]
    fn figure_two_end_points() {
        let (rows, notes) = sweep_rows(&cfg(DEFAULT_GAMMA_C, Ordering::Normal), Ordering::Normal).unwrap();
        assert_eq!(rows.len(), 101);
        assert_eq!(sig9(rows[0].var_plus.unwrap()), "1.33333333");
        assert!(rows[100].var_plus.unwrap().abs() < 1e-12);
        assert_eq!(rows[100].var_minus, None);
        assert_eq!(notes.lines().len(), 1);
        assert!(notes.lines()[0].contains("var_minus"));
    }

    #[test]
    fn figure_three_end_point() {
        let (rows, _) = sweep_rows(&cfg(1.25, Ordering::Normal), Ordering::Normal).unwrap();
        assert!((rows[100].squeezing.unwrap() - 0.89).abs() < 1e-3);
    }

    #[test]
    fn arbitrary_rows() {
        let (rows, notes) = sweep_rows(&cfg(1.0, Ordering::Arbitrary), Ordering::Arbitrary).unwrap();
        assert_eq!(rows[0].squeezing, None);
        assert_eq!(rows[0].vacuum_level, Some(2.0));
        assert_eq!(rows[100].var_plus, None);
        assert_eq!(notes.lines().len(), 2);
    }

    #[test]
    fn zero_coupling_notes_are_grouped() {
        let (_, notes) = sweep_rows(&cfg(0.0, Ordering::Normal), Ordering::Normal).unwrap();
        let lines = notes.lines();
        assert!(lines.iter().any(|l| l.contains("squeezing left empty at epsilon = 101 points")));
    }

    #[test]
    fn csv_layout() {
        let rows = vec![Row {
            epsilon: 0.4,
            var_plus: Some(0.0),
            var_minus: None,
            squeezing: Some(1.0),
            vacuum_level: Some(4.0 / 3.0),
        }];
        assert_eq!(to_csv("# c", &rows), "# c\nepsilon,var_plus,var_minus,squeezing,vacuum_level\n0.4,0,,1,1.33333333\n");
    }

    #[test]
    fn svg_has_one_polyline() {
        let (rows, _) = sweep_rows(&cfg(DEFAULT_GAMMA_C, Ordering::Normal), Ordering::Normal).unwrap();
        let svg = to_svg(&rows, Series::VarPlus);
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert!(svg.contains(">ε</text>") && svg.contains(">var_plus</text>"));
        assert_eq!(svg.matches("<line").count(), 2 * TICKS);
        // degenerate ranges still produce finite coordinates
        let flat = to_svg(&rows[..1], Series::VarPlus);
        assert!(!flat.contains("NaN") && !flat.contains("inf"));
    }

    #[test]
    fn output_naming() {
        let p = Path::new("out/fig2.csv");
        assert_eq!(output_paths(p, Format::Csv, Ordering::Normal, Ordering::Normal), (Some(p.into()), None));
        assert_eq!(
            output_paths(p, Format::Both, Ordering::Normal, Ordering::Normal),
            (Some("out/fig2.csv".into()), Some("out/fig2.svg".into()))
        );
        assert_eq!(
            output_paths(p, Format::Csv, Ordering::Arbitrary, Ordering::Both),
            (Some("out/fig2.arbitrary.csv".into()), None)
        );
        assert_eq!(
            output_paths(Path::new("fig"), Format::Svg, Ordering::Normal, Ordering::Both),
            (None, Some("fig.normal.svg".into()))
        );
    }
}
