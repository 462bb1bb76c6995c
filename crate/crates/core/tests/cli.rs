use std::fs;

use cascade_squeeze::cli::{run, EXIT_CUTOFF, EXIT_OK, EXIT_USAGE};

struct Outcome {
    code: i32,
    stdout: String,
    stderr: String,
}

fn cli(args: &[&str]) -> Outcome {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("cascade-squeeze").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    Outcome {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn value(stdout: &str, key: &str) -> String {
    let prefix = format!("{key}=");
    stdout
        .lines()
        .find_map(|l| l.strip_prefix(&prefix))
        .unwrap_or_else(|| panic!("no `{key}` in output:\n{stdout}"))
        .to_string()
}

fn data_rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn steady_at_half_kappa_is_perfectly_squeezed() {
    let o = cli(&["steady", "--kappa", "0.8", "--epsilon", "0.4", "--gamma-c", "1.0666666666666667"]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    assert_eq!(value(&o.stdout, "var_plus_normal"), "0.000000");
    assert_eq!(value(&o.stdout, "squeezing"), "1.000000");
    assert_eq!(value(&o.stdout, "var_minus_normal"), "undefined");
    assert!(o.stderr.contains("undefined"));
}

#[test]
fn steady_reference_points() {
    let o = cli(&["steady", "--kappa", "0.8", "--epsilon", "0.0", "--gamma-c", "1.0"]);
    assert_eq!(value(&o.stdout, "var_plus_normal"), "1.250000");
    let o = cli(&["steady", "--kappa", "0.8", "--epsilon", "0.3", "--gamma-c", "1.0"]);
    assert_eq!(value(&o.stdout, "var_plus_normal"), "0.285714");
    assert_eq!(value(&o.stdout, "var_minus_normal"), "4.400000");
}

#[test]
fn steady_regime_violation_names_inequality() {
    let o = cli(&["steady", "--kappa", "0.8", "--epsilon", "0.5", "--g", "1"]);
    assert_eq!(o.code, EXIT_USAGE);
    assert!(o.stderr.contains("kappa/2"), "{}", o.stderr);
}

#[test]
fn coupling_flags_are_exclusive() {
    let o = cli(&["steady", "--epsilon", "0.1", "--g", "1", "--gamma-c", "1"]);
    assert_eq!(o.code, EXIT_USAGE);
}

#[test]
fn help_exits_zero_on_stdout() {
    let o = cli(&["--help"]);
    assert_eq!(o.code, EXIT_OK);
    assert!(o.stdout.contains("sweep"));
}

#[test]
fn default_sweep_spans_vacuum_to_zero() {
    let o = cli(&["sweep"]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    assert!(o.stdout.starts_with("# cascade-squeeze sweep kappa=0.8"));
    let rows = data_rows(&o.stdout);
    assert_eq!(rows.len(), 101);
    assert_eq!(rows[0][0], "0");
    assert_eq!(rows[0][1], "1.33333333");
    assert_eq!(rows[100][0], "0.4");
    assert!(rows[100][1].parse::<f64>().unwrap().abs() < 1e-12);
    // minus variance diverges at the end point
    assert_eq!(rows[100][2], "");
    assert!(o.stderr.contains("var_minus"));
}

#[test]
fn squeezing_sweep_above_critical_coupling() {
    let o = cli(&["squeezing", "--gamma-c", "1.25"]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let rows = data_rows(&o.stdout);
    let last: f64 = rows.last().unwrap()[3].parse().unwrap();
    assert!((last - 0.890).abs() < 1e-3, "{last}");
    let o = cli(&["squeezing", "--ordering", "arbitrary"]);
    assert_eq!(o.code, EXIT_USAGE);
}

#[test]
fn arbitrary_sweep_has_no_squeezing_column() {
    let o = cli(&["sweep", "--ordering", "arbitrary", "--steps", "3"]);
    assert_eq!(o.code, EXIT_OK);
    for r in data_rows(&o.stdout) {
        assert_eq!(r[3], "");
        assert_eq!(r[4], "2");
    }
}

#[test]
fn degenerate_grid_repeats_the_point() {
    let o = cli(&["sweep", "--steps", "2", "--eps-min", "0", "--eps-max", "0"]);
    assert_eq!(o.code, EXIT_OK);
    let rows = data_rows(&o.stdout);
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0], rows[1]);
}

#[test]
fn sweep_usage_errors() {
    assert_eq!(cli(&["sweep", "--steps", "1"]).code, EXIT_USAGE);
    assert_eq!(cli(&["sweep", "--eps-min", "0.3", "--eps-max", "0.1"]).code, EXIT_USAGE);
    assert_eq!(cli(&["sweep", "--eps-max", "0.5"]).code, EXIT_USAGE);
    assert_eq!(cli(&["sweep", "--format", "svg"]).code, EXIT_USAGE);
}

#[test]
fn sweep_is_deterministic() {
    let a = cli(&["sweep", "--steps", "17", "--g", "0.7"]);
    let b = cli(&["sweep", "--steps", "17", "--g", "0.7"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn sweep_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig.csv");
    let o = cli(&["sweep", "--steps", "5", "--ordering", "both", "--format", "both", "--out", out.to_str().unwrap()]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    assert!(o.stdout.is_empty());
    for name in ["fig.normal.csv", "fig.normal.svg", "fig.arbitrary.csv", "fig.arbitrary.svg"] {
        let text = fs::read_to_string(dir.path().join(name)).unwrap();
        assert!(!text.is_empty(), "{name}");
    }
    let svg = fs::read_to_string(dir.path().join("fig.normal.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("polyline"));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    fs::write(&cfg, "# point\nkappa = 0.8\nepsilon = 0.3\ngamma-c = 2.0\n").unwrap();
    let o = cli(&["steady", "--config", cfg.to_str().unwrap(), "--gamma-c", "1.0"]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    assert_eq!(value(&o.stdout, "var_plus_normal"), "0.285714");

    fs::write(&cfg, "kappa = 0.8\nbogus = 1\n").unwrap();
    let o = cli(&["steady", "--config", cfg.to_str().unwrap(), "--epsilon", "0.1"]);
    assert_eq!(o.code, EXIT_USAGE);
    assert!(o.stderr.contains("bogus"));

    let missing = dir.path().join("missing.conf");
    assert_eq!(cli(&["steady", "--config", missing.to_str().unwrap()]).code, EXIT_USAGE);
}

#[test]
fn critical_gamma_zeroes_plus_variance() {
    let o = cli(&["critical-gamma", "--kappa", "0.8", "--epsilon", "0.3"]);
    assert_eq!(o.code, EXIT_OK);
    let gc = value(&o.stdout, "gamma_c_star");
    let s = cli(&["steady", "--kappa", "0.8", "--epsilon", "0.3", "--gamma-c", &gc]);
    assert_eq!(value(&s.stdout, "var_plus_normal"), "0.000000");
    assert_eq!(cli(&["critical-gamma", "--epsilon", "0"]).code, EXIT_USAGE);
}

#[test]
fn validate_defaults_pass() {
    let o = cli(&["validate"]);
    assert_eq!(o.code, EXIT_OK, "{}\n{}", o.stdout, o.stderr);
    assert!(o.stdout.contains("approximation gap"));
}

#[test]
fn validate_small_cutoff_is_inconclusive() {
    let o = cli(&["validate", "--n-max", "1", "--epsilon", "0.2"]);
    assert_eq!(o.code, EXIT_CUTOFF, "{}\n{}", o.stdout, o.stderr);
}

#[test]
fn validate_guards_strong_pump() {
    assert_eq!(cli(&["validate", "--epsilon", "0.3"]).code, EXIT_USAGE);
}
