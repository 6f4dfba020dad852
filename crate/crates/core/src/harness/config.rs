//! Campaign configuration and its flat `key = value` file format.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rkhs::KernelTag;
use crate::theorems::{TheoremId, DEFAULT_CHECK_TOL};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(format!("unknown format `{other}` (expected json or csv)")),
        }
    }
}

/// Values each checker parameter is drawn from, uniformly per trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamGrid {
    pub r: Vec<f64>,
    pub p: Vec<f64>,
    pub t: Vec<f64>,
    pub alpha: Vec<f64>,
    pub nu: Vec<f64>,
    pub m: Vec<u32>,
    pub s: Vec<f64>,
    /// Conjugate-exponent pairs `(P, P/(P−1))` for the Young-type checks.
    pub young_p: Vec<f64>,
    pub theta_grid: usize,
}

impl Default for ParamGrid {
    fn default() -> Self {
        Self {
            r: vec![1.0, 1.5, 2.0, 3.0],
            p: vec![0.0, 0.25, 0.5, 0.75, 1.0],
            t: vec![0.0, 0.25, 0.5, 0.75, 1.0],
            alpha: vec![0.0, 0.5, 1.0],
            nu: vec![0.0, 0.25, 0.5, 0.75, 1.0],
            m: vec![1, 2, 3],
            s: vec![1.0, 2.0],
            young_p: vec![1.5, 2.0, 3.0, 4.0],
            theta_grid: 720,
        }
    }
}

impl ParamGrid {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let unit = |name: &str, v: &[f64]| check_all(name, v, |x| (0.0..=1.0).contains(&x), "in [0, 1]");
        check_all("r", &self.r, |x| x >= 1.0, "at least 1")?;
        unit("p", &self.p)?;
        unit("t", &self.t)?;
        unit("alpha", &self.alpha)?;
        unit("nu", &self.nu)?;
        check_all("s", &self.s, |x| x >= 1.0, "at least 1")?;
        check_all("young_p", &self.young_p, |x| x > 1.0, "greater than 1")?;
        if self.m.is_empty() || self.m.contains(&0) {
            return Err(ConfigError::Invalid("m must be a nonempty list of positive integers".into()));
        }
        if self.theta_grid < 4 {
            return Err(ConfigError::Invalid("theta_grid must be at least 4".into()));
        }
        Ok(())
    }
}

fn check_all(name: &str, values: &[f64], ok: impl Fn(f64) -> bool, what: &str) -> Result<(), ConfigError> {
    if values.is_empty() {
        return Err(ConfigError::Invalid(format!("{name} grid is empty")));
    }
    match values.iter().find(|&&v| !v.is_finite() || !ok(v)) {
        Some(v) => Err(ConfigError::Invalid(format!("{name} = {v} must be {what}"))),
        None => Ok(()),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignConfig {
    pub master_seed: u64,
    pub trials_per_checker: usize,
    pub dims: Vec<(usize, usize)>,
    pub kernel_families: Vec<KernelTag>,
    pub param_grid: ParamGrid,
    /// Empty means every checker.
    pub checker_filter: Vec<TheoremId>,
    pub check_tol: f64,
    #[serde(skip)]
    pub output: Option<PathBuf>,
    #[serde(skip)]
    pub format: OutputFormat,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        Self {
            master_seed: 42,
            trials_per_checker: 500,
            dims: vec![(1, 1), (2, 2), (3, 2), (4, 4), (6, 5)],
            kernel_families: vec![KernelTag::Identity, KernelTag::Szego, KernelTag::Gaussian],
            param_grid: ParamGrid::default(),
            checker_filter: Vec::new(),
            check_tol: DEFAULT_CHECK_TOL,
            output: None,
            format: OutputFormat::Json,
        }
    }
}

impl CampaignConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.trials_per_checker == 0 {
            return Err(ConfigError::Invalid("trials_per_checker must be at least 1".into()));
        }
        if self.dims.is_empty() || self.dims.iter().any(|&(a, b)| a == 0 || b == 0) {
            return Err(ConfigError::Invalid("dims must be a nonempty list of positive sizes".into()));
        }
        if self.kernel_families.is_empty() {
            return Err(ConfigError::Invalid("kernel_families is empty".into()));
        }
        if !(self.check_tol.is_finite() && self.check_tol >= 0.0) {
            return Err(ConfigError::Invalid(format!("check_tol = {} must be nonnegative", self.check_tol)));
        }
        self.param_grid.validate()
    }

    /// Checkers to run, in canonical order.
    pub fn checkers(&self) -> Vec<TheoremId> {
        if self.checker_filter.is_empty() {
            TheoremId::ALL.to_vec()
        } else {
            TheoremId::ALL
                .iter()
                .copied()
                .filter(|id| self.checker_filter.contains(id))
                .collect()
        }
    }

    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let grid = &mut self.param_grid;
        match key {
            "seed" | "master_seed" => self.master_seed = parse_one(value)?,
            "trials" | "trials_per_checker" => self.trials_per_checker = parse_one(value)?,
            "dims" => self.dims = parse_dims(value)?,
            "kernel" | "kernels" | "kernel_families" => self.kernel_families = parse_list(value)?,
            "theorems" | "checker_filter" => self.checker_filter = parse_list(value)?,
            "tol" | "check_tol" => self.check_tol = parse_one(value)?,
            "out" | "output" => self.output = Some(PathBuf::from(value)),
            "format" => self.format = parse_one(value)?,
            "r" => grid.r = parse_list(value)?,
            "p" => grid.p = parse_list(value)?,
            "t" => grid.t = parse_list(value)?,
            "alpha" => grid.alpha = parse_list(value)?,
            "nu" => grid.nu = parse_list(value)?,
            "m" => grid.m = parse_list(value)?,
            "s" => grid.s = parse_list(value)?,
            "young_p" => grid.young_p = parse_list(value)?,
            "theta_grid" => grid.theta_grid = parse_one(value)?,
            other => return Err(format!("unknown key `{other}`")),
        }
        Ok(())
    }

    /// Parses the flat text format: one `key = value` per line, lists
    /// comma-separated, `#` starts a comment.
    pub fn parse_str(text: &str) -> Result<Self, ConfigError> {
        let mut config = Self::default();
        config.apply_str(text)?;
        Ok(config)
    }

    pub fn apply_str(&mut self, text: &str) -> Result<(), ConfigError> {
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Parse {
                line: idx + 1,
                message: "expected `key = value`".into(),
            })?;
            self.set(key.trim(), value.trim())
                .map_err(|message| ConfigError::Parse { line: idx + 1, message })?;
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse_str(&text)
    }
}

fn parse_one<V: FromStr>(value: &str) -> Result<V, String>
where
    V::Err: fmt::Display,
{
    value.trim().parse::<V>().map_err(|e| format!("`{value}`: {e}"))
}

fn parse_list<V: FromStr>(value: &str) -> Result<Vec<V>, String>
where
    V::Err: fmt::Display,
{
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(parse_one)
        .collect()
}

/// `1x1,2x2,3x2`.
pub fn parse_dims(value: &str) -> Result<Vec<(usize, usize)>, String> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|pair| {
            let (a, b) = pair
                .split_once(['x', 'X'])
                .ok_or_else(|| format!("dimension `{pair}` is not of the form n1xn2"))?;
            Ok((parse_one(a)?, parse_one(b)?))
        })
        .collect()
}
