use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use corrgrow_cli::commands::{self, EstimateFormat};
use corrgrow_cli::config::ExperimentConfig;
use corrgrow_cli::verify::Suite;

#[derive(Parser)]
#[command(name = "corrgrow", version, about = "Simulate correlated growing trees, test for shared history, estimate t*")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Grow trees or correlated pairs and print their summary statistics.
    Simulate(Common),
    /// Calibrate a test under H0 and measure its size and power.
    Detect(Common),
    /// Estimate t* from correlated pairs.
    Estimate {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Run a verification suite: exact, limits, moments, estimators or detection.
    Verify { suite: String },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct Common {
    /// Flat `key = value` file; flags given here override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// UA or PA.
    #[arg(long)]
    rule: Option<String>,
    /// S2, star:K, path:K or edges:a-b,c-d,...
    #[arg(long)]
    seed_spec: Option<String>,
    #[arg(long)]
    n: Option<String>,
    /// Comma-separated list.
    #[arg(long)]
    t_star: Option<String>,
    #[arg(long)]
    trials: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    /// max-degree, h-product or gap.
    #[arg(long)]
    statistic: Option<String>,
    #[arg(long)]
    master_seed: Option<String>,
    /// Worker threads; falls back to CORRGROW_THREADS.
    #[arg(long)]
    threads: Option<String>,
    /// Output file (detect, estimate) or directory for tree files (simulate).
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    k_constant: Option<String>,
    /// Run the estimators on seeds other than S2.
    #[arg(long)]
    allow_any_seed: bool,
}

impl Common {
    fn resolve(&self) -> anyhow::Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::default();
        if let Some(path) = &self.config {
            cfg.load_file(path)?;
        }
        let flags = [
            ("rule", &self.rule),
            ("seed_spec", &self.seed_spec),
            ("n", &self.n),
            ("t_star", &self.t_star),
            ("trials", &self.trials),
            ("alpha", &self.alpha),
            ("statistic", &self.statistic),
            ("master_seed", &self.master_seed),
            ("threads", &self.threads),
            ("out", &self.out),
            ("k_constant", &self.k_constant),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        if self.allow_any_seed {
            cfg.allow_any_seed = true;
        }
        cfg.validate()?;
        if let Some(k) = cfg.thread_count()? {
            rayon::ThreadPoolBuilder::new().num_threads(k).build_global()?;
        }
        Ok(cfg)
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Simulate(c) => commands::simulate(&c.resolve()?, &mut out)?,
        Command::Detect(c) => commands::detect(&c.resolve()?, &mut out)?,
        Command::Estimate { common, format } => {
            let cfg = common.resolve()?;
            let format = match format {
                Format::Csv => EstimateFormat::Csv,
                Format::Json => EstimateFormat::Json,
            };
            if cfg.output_path.is_some() {
                let mut summary = io::stdout();
                commands::estimate(&cfg, format, &mut io::sink(), &mut summary)?;
            } else {
                commands::estimate(&cfg, format, &mut out, &mut io::stderr())?;
            }
        }
        Command::Verify { suite } => {
            let suite: Suite = match suite.parse() {
                Ok(s) => s,
                Err(msg) => {
                    eprintln!("error: {msg}");
                    return Ok(ExitCode::from(2));
                }
            };
            let ok = commands::verify(suite, &mut out)?;
            out.flush()?;
            return Ok(if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE });
        }
    }
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
