//! Tests of independence (H0) against shared history up to `t_star`.
//!
//! Thresholds are empirical quantiles of the statistic over independent pairs,
//! so every test is exactly calibrated at finite `n` up to Monte Carlo error.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::RngSpec;
use crate::stats::{f_min_anticentrality, h_statistic, max_degree};
use crate::tree::{grow_correlated, GrowingTree, GrowthRule, SeedTree, TreeError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DetectError {
    #[error("trees have different sizes ({0} vs {1})")]
    SizeMismatch(usize, usize),
    #[error("trees need at least 2 vertices")]
    TooSmall,
    #[error("alpha must lie in (0, 1), got {0}")]
    BadAlpha(f64),
    #[error("calibration needs at least 100 trials, got {0}")]
    TooFewTrials(usize),
    #[error(transparent)]
    Tree(#[from] TreeError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TestStatistic {
    /// `min(Δ(T1), Δ(T2)) / sqrt(n)`; exceeding `u` is the event that both
    /// maximum degrees exceed `u sqrt(n)`.
    MaxDegreeJoint,
    /// `H(T1) H(T2)`.
    HProduct,
    /// `|f(T1) - f(T2)|` with `f` the normalised minimum anti-centrality.
    AntiCentralityGap,
}

/// Which side of the threshold rejects H0.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tail {
    Upper,
    Lower,
}

impl TestStatistic {
    pub const ALL: [TestStatistic; 3] = [
        TestStatistic::MaxDegreeJoint,
        TestStatistic::HProduct,
        TestStatistic::AntiCentralityGap,
    ];

    pub fn tail(self) -> Tail {
        match self {
            TestStatistic::AntiCentralityGap => Tail::Lower,
            _ => Tail::Upper,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            TestStatistic::MaxDegreeJoint => "max-degree",
            TestStatistic::HProduct => "h-product",
            TestStatistic::AntiCentralityGap => "gap",
        }
    }
}

impl fmt::Display for TestStatistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TestStatistic {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "max-degree" | "maxdegree" | "maxdegreejoint" => Ok(TestStatistic::MaxDegreeJoint),
            "h-product" | "hproduct" => Ok(TestStatistic::HProduct),
            "gap" | "anticentralitygap" | "anti-centrality-gap" => {
                Ok(TestStatistic::AntiCentralityGap)
            }
            other => Err(format!(
                "unknown statistic `{other}` (expected max-degree, h-product or gap)"
            )),
        }
    }
}

/// The growth model both hypotheses share.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Model {
    pub seed: SeedTree,
    pub rule: GrowthRule,
    pub n: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectionOutcome {
    pub statistic_value: f64,
    pub threshold: f64,
    pub reject_h0: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerReport {
    pub statistic: TestStatistic,
    pub n: usize,
    pub t_star: usize,
    pub alpha_target: f64,
    pub threshold: f64,
    /// Rejection rate on fresh independent pairs.
    pub empirical_size: f64,
    pub size_ci_halfwidth: f64,
    /// Rejection rate on correlated pairs.
    pub empirical_power: f64,
    /// Normal-approximation 95% half-width for the power.
    pub ci_halfwidth: f64,
    pub trials: usize,
    pub master_seed: u64,
}

/// 95% normal-approximation half-width of a binomial proportion.
pub fn binomial_ci_halfwidth(p: f64, trials: usize) -> f64 {
    1.96 * (p * (1.0 - p) / trials as f64).sqrt()
}

pub fn eval_statistic(
    s: TestStatistic,
    t1: &GrowingTree,
    t2: &GrowingTree,
) -> Result<f64, DetectError> {
    if t1.n() != t2.n() {
        return Err(DetectError::SizeMismatch(t1.n(), t2.n()));
    }
    let n = t1.n();
    if n < 2 {
        return Err(DetectError::TooSmall);
    }
    Ok(match s {
        TestStatistic::MaxDegreeJoint => {
            max_degree(t1).min(max_degree(t2)) as f64 / (n as f64).sqrt()
        }
        TestStatistic::HProduct => h_statistic(t1) * h_statistic(t2),
        TestStatistic::AntiCentralityGap => {
            (f_min_anticentrality(t1) - f_min_anticentrality(t2)).abs()
        }
    })
}

/// Strict-inequality rejection: a value equal to the threshold is accepted.
pub fn rejects(s: TestStatistic, value: f64, threshold: f64) -> bool {
    match s.tail() {
        Tail::Upper => value > threshold,
        Tail::Lower => value < threshold,
    }
}

pub fn run_test(
    s: TestStatistic,
    threshold: f64,
    t1: &GrowingTree,
    t2: &GrowingTree,
) -> Result<DetectionOutcome, DetectError> {
    let value = eval_statistic(s, t1, t2)?;
    Ok(DetectionOutcome {
        statistic_value: value,
        threshold,
        reject_h0: rejects(s, value, threshold),
    })
}

/// Statistic values over `trials` pairs sharing history to `t_star`; trial `i`
/// uses stream `rng.substream(i)`. `t_star == seed size` samples H0.
pub fn sample_statistic(
    s: TestStatistic,
    model: &Model,
    t_star: usize,
    trials: usize,
    rng: &RngSpec,
) -> Result<Vec<f64>, DetectError> {
    (0..trials)
        .into_par_iter()
        .map(|i| {
            let pair = grow_correlated(&model.seed, model.rule, model.n, t_star, &rng.substream(i as u64))?;
            eval_statistic(s, &pair.first, &pair.second)
        })
        .collect()
}

/// Threshold from a sorted calibration sample such that at most
/// `alpha * len` of the sample falls strictly inside the rejection region.
pub fn quantile_threshold(s: TestStatistic, sorted: &[f64], alpha: f64) -> f64 {
    let m = sorted.len();
    assert!(m > 0);
    match s.tail() {
        Tail::Upper => {
            let j = ((1.0 - alpha) * m as f64).ceil() as usize;
            sorted[j.clamp(1, m) - 1]
        }
        Tail::Lower => {
            let i = (alpha * m as f64).floor() as usize;
            sorted[i.min(m - 1)]
        }
    }
}

/// Empirical `alpha`-level threshold under H0.
pub fn calibrate_threshold(
    s: TestStatistic,
    model: &Model,
    alpha: f64,
    trials: usize,
    rng: &RngSpec,
) -> Result<f64, DetectError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(DetectError::BadAlpha(alpha));
    }
    if trials < 100 {
        return Err(DetectError::TooFewTrials(trials));
    }
    let mut values = sample_statistic(s, model, model.seed.size(), trials, rng)?;
    values.sort_by(f64::total_cmp);
    Ok(quantile_threshold(s, &values, alpha))
}

/// Calibrate on one stream, then measure size and power on two others.
pub fn estimate_power(
    s: TestStatistic,
    model: &Model,
    t_star: usize,
    alpha: f64,
    trials_cal: usize,
    trials_power: usize,
    rng: &RngSpec,
) -> Result<PowerReport, DetectError> {
    let threshold = calibrate_threshold(s, model, alpha, trials_cal, &rng.substream(0))?;
    let rate = |values: Vec<f64>| {
        values.iter().filter(|&&v| rejects(s, v, threshold)).count() as f64 / values.len() as f64
    };
    let null = sample_statistic(s, model, model.seed.size(), trials_power, &rng.substream(1))?;
    let alt = sample_statistic(s, model, t_star, trials_power, &rng.substream(2))?;
    let size = rate(null);
    let power = rate(alt);
    Ok(PowerReport {
        statistic: s,
        n: model.n,
        t_star,
        alpha_target: alpha,
        threshold,
        empirical_size: size,
        size_ci_halfwidth: binomial_ci_halfwidth(size, trials_power),
        empirical_power: power,
        ci_halfwidth: binomial_ci_halfwidth(power, trials_power),
        trials: trials_power,
        master_seed: rng.master_seed,
    })
}

/// Total-variation distance between the equal-width histograms of two samples
/// over their joint range. Exploratory output only.
pub fn empirical_tv(a: &[f64], b: &[f64], bins: usize) -> f64 {
    assert!(bins > 0 && !a.is_empty() && !b.is_empty());
    let lo = a.iter().chain(b).copied().fold(f64::INFINITY, f64::min);
    let hi = a.iter().chain(b).copied().fold(f64::NEG_INFINITY, f64::max);
    let width = (hi - lo) / bins as f64;
    let hist = |xs: &[f64]| {
        let mut h = vec![0.0; bins];
        for &x in xs {
            let k = if width > 0.0 {
                (((x - lo) / width) as usize).min(bins - 1)
            } else {
                0
            };
            h[k] += 1.0 / xs.len() as f64;
        }
        h
    };
    let (ha, hb) = (hist(a), hist(b));
    0.5 * ha.iter().zip(&hb).map(|(x, y)| (x - y).abs()).sum::<f64>()
}
