//! Experiment configuration: defaults, a flat `key = value` file, then
//! command-line overrides.

use std::path::{Path, PathBuf};

use corrgrow::detect::TestStatistic;
use corrgrow::estimate::DEFAULT_RANK_CONSTANT;
use corrgrow::{make_seed, GrowthRule, SeedSpec, SeedTree};

pub const THREADS_ENV: &str = "CORRGROW_THREADS";

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ConfigError {
    #[error("{file}:{line}: expected `key = value`, got `{text}`")]
    Syntax { file: String, line: usize, text: String },
    #[error("unknown configuration key `{0}`")]
    UnknownKey(String),
    #[error("invalid value for `{field}`: {message}")]
    Invalid { field: &'static str, message: String },
    #[error("cannot read {0}: {1}")]
    Io(String, String),
}

fn invalid(field: &'static str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field,
        message: message.into(),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub rule: GrowthRule,
    pub seed_spec: SeedSpec,
    pub n: usize,
    /// Empty means "no correlated pair" for `simulate`.
    pub t_star: Vec<usize>,
    pub trials: usize,
    pub alpha: f64,
    pub statistic: TestStatistic,
    pub master_seed: u64,
    pub output_path: Option<PathBuf>,
    pub threads: Option<usize>,
    pub k_constant: f64,
    pub allow_any_seed: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            rule: GrowthRule::Uniform,
            seed_spec: SeedSpec::S2,
            n: 1000,
            t_star: Vec::new(),
            trials: 1,
            alpha: 0.05,
            statistic: TestStatistic::AntiCentralityGap,
            master_seed: 0,
            output_path: None,
            threads: None,
            k_constant: DEFAULT_RANK_CONSTANT,
            allow_any_seed: false,
        }
    }
}

impl ExperimentConfig {
    /// Apply one setting. Keys accept `-` or `_` as separator.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let value = value.trim();
        match key.trim().replace('-', "_").as_str() {
            "rule" => self.rule = value.parse().map_err(|e| invalid("rule", format!("{e}")))?,
            "seed_spec" | "seed" => {
                self.seed_spec = value.parse().map_err(|e| invalid("seed_spec", format!("{e}")))?
            }
            "n" => self.n = parse_num("n", value)?,
            "t_star" => {
                self.t_star = value
                    .split(',')
                    .filter(|s| !s.trim().is_empty())
                    .map(|s| parse_num("t_star", s.trim()))
                    .collect::<Result<_, _>>()?
            }
            "trials" => self.trials = parse_num("trials", value)?,
            "alpha" => self.alpha = parse_num("alpha", value)?,
            "statistic" => self.statistic = value.parse().map_err(|e| invalid("statistic", e))?,
            "master_seed" => self.master_seed = parse_num("master_seed", value)?,
            "out" | "output_path" => self.output_path = Some(PathBuf::from(value)),
            "threads" => self.threads = Some(parse_num("threads", value)?),
            "k_constant" => self.k_constant = parse_num("k_constant", value)?,
            "allow_any_seed" => self.allow_any_seed = parse_num("allow_any_seed", value)?,
            other => return Err(ConfigError::UnknownKey(other.to_string())),
        }
        Ok(())
    }

    /// Read a config file: one `key = value` per line, `#` starts a comment.
    pub fn load_file(&mut self, path: &Path) -> Result<(), ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Io(path.display().to_string(), e.to_string()))?;
        self.apply_text(&text, &path.display().to_string())
    }

    pub fn apply_text(&mut self, text: &str, file: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                file: file.to_string(),
                line: i + 1,
                text: line.to_string(),
            })?;
            self.set(key, value)?;
        }
        Ok(())
    }

    /// Builds the seed and checks every field against it.
    pub fn validate(&self) -> Result<SeedTree, ConfigError> {
        let seed = make_seed(&self.seed_spec).map_err(|e| invalid("seed_spec", e.to_string()))?;
        if self.n < seed.size() {
            return Err(invalid("n", format!("n = {} is below the seed size {}", self.n, seed.size())));
        }
        if let Some(&t) = self.t_star.iter().find(|&&t| t < seed.size() || t > self.n) {
            return Err(invalid(
                "t_star",
                format!("{t} is outside [{}, {}]", seed.size(), self.n),
            ));
        }
        if self.trials == 0 {
            return Err(invalid("trials", "must be positive"));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(invalid("alpha", format!("{} is not in (0, 1)", self.alpha)));
        }
        if self.threads == Some(0) {
            return Err(invalid("threads", "must be positive"));
        }
        if !(self.k_constant > 0.0 && self.k_constant.is_finite()) {
            return Err(invalid("k_constant", "must be a positive number"));
        }
        Ok(seed)
    }

    /// Explicit setting first, then the environment.
    pub fn thread_count(&self) -> Result<Option<usize>, ConfigError> {
        if self.threads.is_some() {
            return Ok(self.threads);
        }
        match std::env::var(THREADS_ENV) {
            Ok(v) => match v.trim().parse::<usize>() {
                Ok(0) | Err(_) => Err(invalid("threads", format!("{THREADS_ENV}={v} is not a positive integer"))),
                Ok(k) => Ok(Some(k)),
            },
            Err(_) => Ok(None),
        }
    }
}

fn parse_num<T: std::str::FromStr>(field: &'static str, value: &str) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|e| invalid(field, format!("`{value}`: {e}")))
}
