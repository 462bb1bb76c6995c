//! Command-line front end. [`run`] is the whole program minus process exit,
//! so it can be driven from tests with in-memory streams.

pub mod config;
pub mod format;
pub mod sweep;
pub mod validate;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::atom::atomic_steady_state;
use crate::error::{Error, Result};
use crate::fock::TruncatedSpace;
use crate::moments::steady_moments_closed;
use crate::quadrature::{critical_gamma_c, variance_plus_closed, QuadratureReport};
use crate::params::SystemParams;
use config::{
    make_params, pick, pick_coupling, require, ConfigFile, Format, Ordering, SweepConfig, DEFAULT_KAPPA,
};
use format::fixed6;
use sweep::Series;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ASSERTION: i32 = 1;
pub const EXIT_CUTOFF: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

/// Default oracle guard: epsilon <= 0.25 kappa.
pub const ORACLE_EPS_FRACTION: f64 = 0.25;

#[derive(Debug, Parser)]
#[command(name = "cascade-squeeze", version, about = "Squeezing of two-mode subharmonic light driven by a cascade three-level atom")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Steady state, moments, variances and squeezing at one point
    Steady(PointArgs),
    /// Variances and squeezing over an epsilon grid
    Sweep(SweepArgs),
    /// As `sweep`, plotting the squeezing column
    Squeezing(SweepArgs),
    /// Coupling gamma_c at which the normally ordered plus variance vanishes
    CriticalGamma(CriticalArgs),
    /// Oracle checks of the exact equations and cross-checks of the closed forms
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
struct CouplingArgs {
    #[arg(long, allow_hyphen_values = true)]
    kappa: Option<f64>,
    #[arg(long = "gamma-c", allow_hyphen_values = true, conflicts_with = "g")]
    gamma_c: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    g: Option<f64>,
    /// key=value file; flags take precedence over it
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PointArgs {
    #[command(flatten)]
    coupling: CouplingArgs,
    #[arg(long, allow_hyphen_values = true)]
    epsilon: Option<f64>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    coupling: CouplingArgs,
    #[arg(long = "eps-min", allow_hyphen_values = true)]
    eps_min: Option<f64>,
    /// Defaults to kappa/2
    #[arg(long = "eps-max", allow_hyphen_values = true)]
    eps_max: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long, value_enum)]
    ordering: Option<Ordering>,
    /// Output path; CSV goes to stdout when absent
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Args)]
struct CriticalArgs {
    #[arg(long, allow_hyphen_values = true)]
    kappa: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    epsilon: Option<f64>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    #[command(flatten)]
    point: PointArgs,
    #[arg(long = "n-max")]
    n_max: Option<usize>,
    /// Allow epsilon > 0.25 kappa, where fixed cutoffs become unreliable
    #[arg(long = "force-oracle")]
    force_oracle: bool,
}

fn load(path: &Option<PathBuf>) -> Result<ConfigFile> {
    match path {
        Some(p) => ConfigFile::load(p),
        None => Ok(ConfigFile::default()),
    }
}

fn point_params(args: &PointArgs, file: &ConfigFile, default_eps: Option<f64>) -> Result<SystemParams> {
    let kappa = require(pick(args.coupling.kappa, file, "kappa", Some(DEFAULT_KAPPA))?, "kappa")?;
    let epsilon = require(pick(args.epsilon, file, "epsilon", default_eps)?, "epsilon")?;
    let coupling = pick_coupling(args.coupling.gamma_c, args.coupling.g, file)?;
    make_params(kappa, epsilon, coupling)
}

fn kv(out: &mut dyn Write, key: &str, value: Option<f64>) -> std::io::Result<()> {
    match value {
        Some(v) => writeln!(out, "{key}={}", fixed6(v)),
        None => writeln!(out, "{key}=undefined"),
    }
}

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

fn stdout_err(e: std::io::Error) -> Error {
    io_err(Path::new("<stdout>"), e)
}

fn cmd_steady(args: &PointArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let file = load(&args.coupling.config)?;
    let params = point_params(args, &file, None)?;
    let report = QuadratureReport::compute(&params)?;
    let atom = atomic_steady_state(&params)?;
    let moments = if params.dynamics_valid() {
        Some(steady_moments_closed(&params, &atom)?)
    } else {
        writeln!(err, "note: field moments and minus variance are undefined at epsilon = kappa/2")
            .map_err(stdout_err)?;
        None
    };
    if report.squeezing.is_none() {
        writeln!(err, "note: squeezing is undefined at gamma_c = 0").map_err(stdout_err)?;
    }
    let mut lines: Vec<(&str, Option<f64>)> = vec![
        ("kappa", Some(params.kappa())),
        ("epsilon", Some(params.epsilon())),
        ("gamma_c", Some(params.gamma_c())),
        ("g", Some(params.g())),
        ("eta_a", Some(atom.eta_a)),
        ("eta_b", Some(atom.eta_b)),
        ("eta_c", Some(atom.eta_c)),
        ("sigma_a", Some(atom.sigma_a.re)),
        ("sigma_b", Some(atom.sigma_b.re)),
        ("sigma_c", Some(atom.sigma_c.re)),
    ];
    let m = moments.as_ref();
    lines.extend([
        ("n_a", m.map(|m| m.n_a)),
        ("anti_a", m.map(|m| m.anti_a)),
        ("n_b", m.map(|m| m.n_b)),
        ("anti_b", m.map(|m| m.anti_b)),
        ("ab", m.map(|m| m.ab.re)),
        ("ba", m.map(|m| m.ba.re)),
        ("a2", m.map(|m| m.a2.re)),
        ("b2", m.map(|m| m.b2.re)),
        ("adb", m.map(|m| m.adb.re)),
        ("bad", m.map(|m| m.bad.re)),
        ("var_plus_arbitrary", report.var_plus_arbitrary),
        ("var_minus_arbitrary", report.var_minus_arbitrary),
        ("var_plus_normal", Some(report.var_plus_normal)),
        ("var_minus_normal", report.var_minus_normal),
        ("vacuum_normal", Some(report.vacuum_normal)),
        ("squeezing", report.squeezing),
    ]);
    for (k, v) in lines {
        kv(out, k, v).map_err(stdout_err)?;
    }
    Ok(EXIT_OK)
}

fn sweep_config(args: &SweepArgs, forced: Option<Ordering>) -> Result<SweepConfig> {
    let file = load(&args.coupling.config)?;
    let kappa = require(pick(args.coupling.kappa, &file, "kappa", Some(DEFAULT_KAPPA))?, "kappa")?;
    let ordering = match args.ordering {
        Some(o) => o,
        None => file.get_enum("ordering")?.unwrap_or(Ordering::Normal),
    };
    let format = match args.format {
        Some(f) => f,
        None => file.get_enum("format")?.unwrap_or(Format::Csv),
    };
    if let Some(f) = forced {
        if ordering != f {
            return Err(Error::Config(format!(
                "squeezing is defined in the {} convention only; got `--ordering {}`",
                f.name(),
                ordering.name()
            )));
        }
    }
    let out = match &args.out {
        Some(p) => Some(p.clone()),
        None => file.get::<String>("out")?.map(PathBuf::from),
    };
    let cfg = SweepConfig {
        kappa,
        coupling: pick_coupling(args.coupling.gamma_c, args.coupling.g, &file)?,
        eps_min: require(pick(args.eps_min, &file, "eps_min", Some(0.0))?, "eps-min")?,
        eps_max: require(pick(args.eps_max, &file, "eps_max", Some(kappa / 2.0))?, "eps-max")?,
        steps: require(pick(args.steps, &file, "steps", Some(101))?, "steps")?,
        ordering,
        out,
        format,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn cmd_sweep(args: &SweepArgs, verb: &str, series: Series, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let forced = (series == Series::Squeezing).then_some(Ordering::Normal);
    let cfg = sweep_config(args, forced)?;
    let orderings = match cfg.ordering {
        Ordering::Both => vec![Ordering::Normal, Ordering::Arbitrary],
        o => vec![o],
    };
    for ordering in orderings {
        let (rows, notes) = sweep::sweep_rows(&cfg, ordering)?;
        for line in notes.lines() {
            writeln!(err, "{line}").map_err(stdout_err)?;
        }
        let csv = sweep::to_csv(&sweep::header_comment(verb, &cfg, ordering)?, &rows);
        let Some(path) = &cfg.out else {
            out.write_all(csv.as_bytes()).map_err(stdout_err)?;
            continue;
        };
        let (csv_path, svg_path) = sweep::output_paths(path, cfg.format, ordering, cfg.ordering);
        if let Some(p) = csv_path {
            fs::write(&p, &csv).map_err(|e| io_err(&p, e))?;
            writeln!(err, "wrote {}", p.display()).map_err(stdout_err)?;
        }
        if let Some(p) = svg_path {
            let s = if ordering == Ordering::Arbitrary { Series::VarPlus } else { series };
            fs::write(&p, sweep::to_svg(&rows, s)).map_err(|e| io_err(&p, e))?;
            writeln!(err, "wrote {}", p.display()).map_err(stdout_err)?;
        }
    }
    Ok(EXIT_OK)
}

fn cmd_critical(args: &CriticalArgs, out: &mut dyn Write) -> Result<i32> {
    let file = load(&args.config)?;
    let kappa = require(pick(args.kappa, &file, "kappa", Some(DEFAULT_KAPPA))?, "kappa")?;
    let epsilon = require(pick(args.epsilon, &file, "epsilon", None)?, "epsilon")?;
    let gc = critical_gamma_c(kappa, epsilon)?;
    let residual = variance_plus_closed(&SystemParams::from_gamma_c(kappa, epsilon, gc)?)?;
    writeln!(out, "gamma_c_star={}", fixed6(gc)).map_err(stdout_err)?;
    writeln!(out, "plus_variance_residual={residual:e}").map_err(stdout_err)?;
    Ok(EXIT_OK)
}

fn cmd_validate(args: &ValidateArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let file = load(&args.point.coupling.config)?;
    let params = point_params(&args.point, &file, Some(0.1))?;
    let n_max = require(pick(args.n_max, &file, "n_max", Some(6))?, "n-max")?;
    let force = args.force_oracle || file.get::<bool>("force_oracle")?.unwrap_or(false);
    if !force && params.epsilon() > ORACLE_EPS_FRACTION * params.kappa() {
        return Err(Error::Config(format!(
            "epsilon = {} exceeds 0.25 kappa, where fixed Fock cutoffs are unreliable; pass --force-oracle to run anyway",
            params.epsilon()
        )));
    }
    params.require_dynamics()?;
    let space = TruncatedSpace::new(n_max)?;
    let report = validate::run_validation(&params, &space)?;
    out.write_all(report.render().as_bytes()).map_err(stdout_err)?;
    if let Some(c) = report.first_failure() {
        writeln!(err, "validation failed: {}", c.name).map_err(stdout_err)?;
        return Ok(EXIT_ASSERTION);
    }
    if report.cutoff_limited() {
        writeln!(err, "validation inconclusive: some checks are cutoff-limited; raise --n-max").map_err(stdout_err)?;
        return Ok(EXIT_CUTOFF);
    }
    Ok(EXIT_OK)
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Steady(a) => cmd_steady(a, out, err),
        Command::Sweep(a) => cmd_sweep(a, "sweep", Series::VarPlus, out, err),
        Command::Squeezing(a) => cmd_sweep(a, "squeezing", Series::Squeezing, out, err),
        Command::CriticalGamma(a) => cmd_critical(a, out),
        Command::Validate(a) => cmd_validate(a, out, err),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}
