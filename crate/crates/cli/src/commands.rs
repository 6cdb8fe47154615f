//! The four subcommands, written against `io::Write` so tests can capture them.

use std::fs;
use std::io::{self, Write};

use anyhow::{bail, Context, Result};

use corrgrow::detect::{estimate_power, Model};
use corrgrow::estimate::{batch_estimate, EstimatorConfig};
use corrgrow::stats::{centroid, h_statistic, max_degree};
use corrgrow::{grow, grow_correlated, GrowingTree, RngSpec};

use crate::config::ExperimentConfig;
use crate::output::{
    estimate_row, fmt_float, power_row, ESTIMATE_HEADER, POWER_HEADER, SCHEMA_VERSION, TREE_HEADER,
};
use crate::verify::{run_suite, Suite};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EstimateFormat {
    Csv,
    Json,
}

/// The configured output file, or `fallback` when none is set.
fn sink<'a>(cfg: &ExperimentConfig, fallback: &'a mut dyn Write) -> Result<Box<dyn Write + 'a>> {
    Ok(match &cfg.output_path {
        Some(p) => Box::new(io::BufWriter::new(
            fs::File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(fallback),
    })
}

fn tree_row(trial: usize, t_star: Option<usize>, which: u8, t: &GrowingTree) -> String {
    let c = centroid(t);
    format!(
        "{SCHEMA_VERSION},{trial},{},{which},{},{},{},{},{}",
        t_star.map_or(String::new(), |t| t.to_string()),
        t.n(),
        max_degree(t),
        fmt_float(h_statistic(t)),
        c.psi,
        c.canonical
    )
}

/// Grow trees (or correlated pairs when `t_star` is set), print one summary
/// row per tree, and write tree files into the output directory if given.
pub fn simulate(cfg: &ExperimentConfig, out: &mut dyn Write) -> Result<()> {
    let seed = cfg.validate()?;
    let rng = RngSpec::new(cfg.master_seed);
    if let Some(dir) = &cfg.output_path {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let save = |name: String, t: &GrowingTree| -> Result<()> {
        if let Some(dir) = &cfg.output_path {
            let path = dir.join(name);
            fs::write(&path, t.to_string()).with_context(|| format!("writing {}", path.display()))?;
        }
        Ok(())
    };
    writeln!(out, "{TREE_HEADER}")?;
    if cfg.t_star.is_empty() {
        for trial in 0..cfg.trials {
            let t = grow(&seed, cfg.rule, cfg.n, &rng.substream(trial as u64))?;
            save(format!("tree_{trial}.txt"), &t)?;
            writeln!(out, "{}", tree_row(trial, None, 1, &t))?;
        }
    }
    for &t_star in &cfg.t_star {
        let base = rng.substream(t_star as u64);
        for trial in 0..cfg.trials {
            let pair = grow_correlated(&seed, cfg.rule, cfg.n, t_star, &base.substream(trial as u64))?;
            for (which, t) in [(1u8, &pair.first), (2, &pair.second)] {
                save(format!("pair_t{t_star}_{trial}_{which}.txt"), t)?;
                writeln!(out, "{}", tree_row(trial, Some(t_star), which, t))?;
            }
        }
    }
    Ok(())
}

/// Calibrate the configured test under H0 and report size and power for each
/// `t_star`. Every `t_star` shares the calibration stream.
pub fn detect(cfg: &ExperimentConfig, out: &mut dyn Write) -> Result<()> {
    let seed = cfg.validate()?;
    if cfg.t_star.is_empty() {
        bail!("detect needs at least one --t-star");
    }
    let model = Model {
        seed,
        rule: cfg.rule,
        n: cfg.n,
    };
    let rng = RngSpec::new(cfg.master_seed);
    let mut w = sink(cfg, out)?;
    writeln!(w, "{POWER_HEADER}")?;
    for &t in &cfg.t_star {
        let r = estimate_power(cfg.statistic, &model, t, cfg.alpha, cfg.trials, cfg.trials, &rng)?;
        writeln!(w, "{}", power_row(&r))?;
    }
    w.flush()?;
    Ok(())
}

/// Per-trial estimator output, followed by a summary on `summary`.
pub fn estimate(
    cfg: &ExperimentConfig,
    format: EstimateFormat,
    out: &mut dyn Write,
    summary: &mut dyn Write,
) -> Result<()> {
    let seed = cfg.validate()?;
    if cfg.t_star.is_empty() {
        bail!("estimate needs at least one --t-star");
    }
    let est = EstimatorConfig {
        k_constant: cfg.k_constant,
        allow_any_seed: cfg.allow_any_seed,
    };
    let rng = RngSpec::new(cfg.master_seed);
    let mut w = sink(cfg, out)?;
    if format == EstimateFormat::Csv {
        writeln!(w, "{ESTIMATE_HEADER}")?;
    }
    for &t in &cfg.t_star {
        let batch = batch_estimate(&seed, cfg.rule, cfg.n, t, cfg.trials, &rng.substream(t as u64), &est)?;
        for (trial, r) in batch.reports.iter().enumerate() {
            match format {
                EstimateFormat::Csv => writeln!(w, "{}", estimate_row(cfg.n, t, cfg.rule, trial, r))?,
                EstimateFormat::Json => {
                    let line = match r {
                        Ok(report) => serde_json::json!({"t_star": t, "trial": trial, "report": report}),
                        Err(e) => serde_json::json!({"t_star": t, "trial": trial, "degenerate": e.to_string()}),
                    };
                    writeln!(w, "{line}")?;
                }
            }
        }
        let s = &batch.summary;
        let q = |x: &Option<corrgrow::estimate::ErrorQuantiles>| {
            x.as_ref().map_or("n/a".to_string(), |q| {
                format!("median {} [q10 {}, q90 {}]", fmt_float(q.median), fmt_float(q.q10), fmt_float(q.q90))
            })
        };
        writeln!(
            summary,
            "t_star={t} rule={} n={}: {} trials, {} degenerate; coarse rel. error {}; fine rel. error {}",
            cfg.rule,
            cfg.n,
            s.trials,
            s.degenerate,
            q(&s.coarse),
            q(&s.fine)
        )?;
    }
    w.flush()?;
    Ok(())
}

/// Run one suite and print each check. Returns whether all passed.
pub fn verify(suite: Suite, out: &mut dyn Write) -> Result<bool> {
    writeln!(out, "suite {}", suite.name())?;
    let mut all = true;
    for check in run_suite(suite) {
        writeln!(out, "{check}")?;
        all &= check.passed();
    }
    Ok(all)
}
