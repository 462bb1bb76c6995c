//! `key=value` configuration files and the flag > file > default merge.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::ValueEnum;

use crate::error::{Error, Result};
use crate::params::SystemParams;

pub const DEFAULT_KAPPA: f64 = 0.8;
pub const DEFAULT_GAMMA_C: f64 = 16.0 / 15.0;

const KNOWN_KEYS: [&str; 12] = [
    "kappa", "epsilon", "gamma_c", "g", "eps_min", "eps_max", "steps", "ordering", "n_max", "out", "format",
    "force_oracle",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Ordering {
    Normal,
    Arbitrary,
    Both,
}

impl Ordering {
    pub fn name(self) -> &'static str {
        match self {
            Ordering::Normal => "normal",
            Ordering::Arbitrary => "arbitrary",
            Ordering::Both => "both",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Svg,
    Both,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Svg => "svg",
            Format::Both => "both",
        }
    }
}

/// Parsed `key=value` file. Keys accept `-` or `_`; `#` starts a comment line.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("config line {}: expected key=value, got `{line}`", n + 1)))?;
            let key = k.trim().replace('-', "_");
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(Error::Config(format!("config line {}: unknown key `{}`", n + 1, k.trim())));
            }
            if values.insert(key, v.trim().to_string()).is_some() {
                return Err(Error::Config(format!("config line {}: duplicate key `{}`", n + 1, k.trim())));
            }
        }
        Ok(Self { values })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::parse(&text)
    }

    pub fn contains(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| Error::Config(format!("config: invalid value `{v}` for `{key}`"))),
        }
    }

    pub fn get_enum<T: ValueEnum>(&self, key: &str) -> Result<Option<T>> {
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => T::from_str(v, true)
                .map(Some)
                .map_err(|_| Error::Config(format!("config: invalid value `{v}` for `{key}`"))),
        }
    }
}

/// Flag value, else file value, else `default`.
pub fn pick<T: FromStr>(flag: Option<T>, file: &ConfigFile, key: &str, default: Option<T>) -> Result<Option<T>> {
    if flag.is_some() {
        return Ok(flag);
    }
    match file.get(key)? {
        Some(v) => Ok(Some(v)),
        None => Ok(default),
    }
}

pub fn require<T>(value: Option<T>, flag: &str) -> Result<T> {
    value.ok_or_else(|| Error::Config(format!("missing required value `--{flag}` (flag or config key)")))
}

/// Coupling given either as gamma_c or as g; never both at the same level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coupling {
    GammaC(f64),
    G(f64),
}

pub fn pick_coupling(gamma_c: Option<f64>, g: Option<f64>, file: &ConfigFile) -> Result<Coupling> {
    match (gamma_c, g) {
        (Some(x), None) => return Ok(Coupling::GammaC(x)),
        (None, Some(x)) => return Ok(Coupling::G(x)),
        (Some(_), Some(_)) => {
            return Err(Error::Config("`--gamma-c` and `--g` are mutually exclusive".into()));
        }
        (None, None) => {}
    }
    match (file.get::<f64>("gamma_c")?, file.get::<f64>("g")?) {
        (Some(_), Some(_)) => Err(Error::Config("config sets both `gamma_c` and `g`".into())),
        (Some(x), None) => Ok(Coupling::GammaC(x)),
        (None, Some(x)) => Ok(Coupling::G(x)),
        (None, None) => Ok(Coupling::GammaC(DEFAULT_GAMMA_C)),
    }
}

pub fn make_params(kappa: f64, epsilon: f64, coupling: Coupling) -> Result<SystemParams> {
    match coupling {
        Coupling::GammaC(gc) => SystemParams::from_gamma_c(kappa, epsilon, gc),
        Coupling::G(g) => SystemParams::new(kappa, epsilon, g),
    }
}

/// Fully resolved sweep request.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub kappa: f64,
    pub coupling: Coupling,
    pub eps_min: f64,
    pub eps_max: f64,
    pub steps: usize,
    pub ordering: Ordering,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        // parameter checks on the end points; reported before any output
        make_params(self.kappa, self.eps_min, self.coupling)?;
        make_params(self.kappa, self.eps_max, self.coupling)?;
        if self.steps < 2 {
            return Err(Error::Config(format!("`steps` must be >= 2, got {}", self.steps)));
        }
        if self.eps_min > self.eps_max {
            return Err(Error::Config(format!(
                "`eps-min` ({}) exceeds `eps-max` ({})",
                self.eps_min, self.eps_max
            )));
        }
        if 2.0 * self.eps_max > self.kappa {
            return Err(Error::Regime {
                violated: "epsilon > kappa/2",
            });
        }
        if self.out.is_none() && self.format != Format::Csv {
            return Err(Error::Config("SVG output needs `--out`".into()));
        }
        if self.out.is_none() && self.ordering == Ordering::Both {
            return Err(Error::Config("`--ordering both` writes two files and needs `--out`".into()));
        }
        Ok(())
    }

    /// Grid points, with the end point set exactly.
    pub fn grid(&self) -> Vec<f64> {
        let n = self.steps - 1;
        (0..=n)
            .map(|i| {
                if i == n {
                    self.eps_max
                } else {
                    self.eps_min + (self.eps_max - self.eps_min) * i as f64 / n as f64
                }
            })
            .collect()
    }
}
