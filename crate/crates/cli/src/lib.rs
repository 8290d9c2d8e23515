//! Verification runner and dataset generator for `rs-toolkit-core`.

pub mod config;
pub mod figures;
pub mod output;
pub mod sweep;
pub mod verify;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use config::{Command, ConfigError, Format, Mu2Grid, RunConfig};
pub use output::{Cell, Table};
pub use sweep::Quantity;
pub use verify::{Record, Report, Suite};

pub const THREADS_ENV: &str = "RS_TOOLKIT_THREADS";

#[derive(Debug, Parser)]
#[command(name = "rs-toolkit", version, about = "Rogers-Szego numerics: identity checks and datasets")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Run the residual checks and write a pass/fail report.
    Verify(VerifyArgs),
    /// Write the dataset behind one of the four figures.
    Figure(FigureArgs),
    /// Evaluate a coherent-state quantity over a q x |mu|^2 grid.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Restrict to one check id or tag.
    #[arg(long)]
    pub only: Option<String>,
    /// Comma-separated q values.
    #[arg(long, value_delimiter = ',')]
    pub q: Option<Vec<f64>>,
    /// Replace every tolerance with this value.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Largest degree in the orthogonality and recurrence checks.
    #[arg(long, default_value_t = config::DEFAULT_MAX_DEGREE)]
    pub max_degree: u32,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct FigureArgs {
    #[arg(long)]
    pub id: u8,
    #[arg(long, default_value_t = config::DEFAULT_PHI_SAMPLES)]
    pub phi_samples: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub quantity: String,
    #[arg(long, value_delimiter = ',', required = true)]
    pub q: Vec<f64>,
    /// Grid `start:end:points`, inclusive.
    #[arg(long)]
    pub mu2: String,
    #[arg(long, allow_hyphen_values = true)]
    pub theta: f64,
    /// Largest occupation number for the excitation distribution.
    #[arg(long, default_value_t = 40)]
    pub nmax: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

impl Cli {
    pub fn into_config(self) -> Result<RunConfig, ConfigError> {
        let config = match self.command {
            CliCommand::Verify(a) => {
                let mut c = RunConfig::new(Command::Verify {
                    only: a.only,
                    tol: a.tol,
                });
                if let Some(q) = a.q {
                    c.q_list = q;
                }
                c.max_degree = a.max_degree;
                c.output = a.out;
                c.format = a.format;
                c
            }
            CliCommand::Figure(a) => {
                let mut c = RunConfig::new(Command::Figure { id: a.id });
                c.phi_samples = a.phi_samples;
                c.output = a.out;
                c
            }
            CliCommand::Sweep(a) => {
                let mut c = RunConfig::new(Command::Sweep {
                    quantity: a.quantity.parse()?,
                    nmax: a.nmax,
                });
                c.q_list = a.q;
                c.mu2 = a.mu2.parse()?;
                c.theta = a.theta;
                c.output = a.out;
                c.format = a.format;
                c
            }
        };
        config.validate()?;
        Ok(config)
    }
}

/// Worker pool capped by `RS_TOOLKIT_THREADS` when set.
pub fn thread_pool() -> anyhow::Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(raw) = std::env::var(THREADS_ENV) {
        let n: usize = raw
            .trim()
            .parse()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| ConfigError::Threads(raw.clone()))?;
        builder = builder.num_threads(n);
    }
    Ok(builder.build()?)
}

/// What a run produced; `success` is false when a verification check failed.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub success: bool,
    pub summary: String,
}

fn emit(table: &Table, format: Format, config: &RunConfig, json: Option<serde_json::Value>) -> anyhow::Result<()> {
    let mut sink = output::sink(config.output.as_deref())?;
    match format {
        Format::Csv => table.write_csv(&mut sink)?,
        Format::Json => {
            let value = json.unwrap_or_else(|| table.to_json());
            serde_json::to_writer_pretty(&mut sink, &value)?;
            writeln!(sink)?;
        }
    }
    sink.flush()?;
    Ok(())
}

/// Executes a validated configuration inside the worker pool.
pub fn run(config: &RunConfig) -> anyhow::Result<Outcome> {
    config.validate()?;
    let pool = thread_pool()?;
    pool.install(|| match &config.command {
        Command::Verify { only, tol } => {
            let suite = Suite {
                q_list: config.q_list.clone(),
                max_degree: config.max_degree,
                tol_override: *tol,
            };
            let report = verify::run(&suite, only.as_deref());
            emit(&report.table(), config.format, config, Some(report.to_json()))?;
            let mut summary = format!(
                "{} checks, {} failed",
                report.records.len(),
                report.failures()
            );
            for r in report.records.iter().filter(|r| !r.pass) {
                summary.push_str(&format!("\nFAIL {} [{}] {}", r.id, r.eq, r.params_text()));
                if let Some(e) = &r.error {
                    summary.push_str(&format!(": {e}"));
                }
            }
            Ok(Outcome {
                success: report.all_passed(),
                summary,
            })
        }
        Command::Figure { id } => {
            let table = figures::figure(*id, config.phi_samples)?;
            emit(&table, Format::Csv, config, None)?;
            Ok(Outcome {
                success: true,
                summary: format!("figure {id}: {} rows", table.rows.len()),
            })
        }
        Command::Sweep { quantity, nmax } => {
            let table = sweep::sweep(*quantity, &config.q_list, &config.mu2, config.theta, *nmax)?;
            emit(&table, config.format, config, None)?;
            Ok(Outcome {
                success: true,
                summary: format!("sweep {}: {} rows", quantity.name(), table.rows.len()),
            })
        }
    })
}
