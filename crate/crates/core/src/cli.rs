//! Command-line front end.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::config::ConfigLayer;
use crate::error::Error;
use crate::harness::{figure_suite, run_sweep_with_threads, SweepConfig};
use crate::output::to_csv;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "screenlab", version, about = "Fair k-set selection under screening fatigue")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one configuration and write its CSV.
    Run {
        #[command(flatten)]
        source: Source,
        /// Output CSV path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        exec: Exec,
    },
    /// Run every figure configuration, one CSV per figure.
    Suite {
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        runs: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Run only the named figures.
        #[arg(long, value_delimiter = ',')]
        only: Vec<String>,
        #[command(flatten)]
        exec: Exec,
    },
    /// Parse a configuration and print its normalized form.
    Validate {
        #[command(flatten)]
        source: Source,
    },
}

#[derive(Debug, Args)]
struct Source {
    /// JSON config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    flags: ConfigLayer,
}

#[derive(Debug, Args)]
struct Exec {
    /// Worker threads (0 = all cores). Never changes results.
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

enum Failure {
    Config(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(m) => Failure::Config(m),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

fn resolve(source: &Source, err: &mut dyn Write) -> Result<SweepConfig, Failure> {
    let file = match &source.config {
        Some(path) => ConfigLayer::from_file(path)?,
        None => ConfigLayer::default(),
    };
    let (cfg, warnings) = file.overlay(source.flags.clone()).resolve(&SweepConfig::default())?;
    for w in warnings {
        let _ = writeln!(err, "warning: {w}");
    }
    Ok(cfg)
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::Runtime(format!("cannot write {}: {e}", path.display())))
}

fn execute(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    match command {
        Command::Run { source, out: path, exec } => {
            let cfg = resolve(&source, err)?;
            let csv = to_csv(&[run_sweep_with_threads(&cfg, exec.threads)?]);
            match path {
                Some(p) => write_file(&p, &csv)?,
                None => out.write_all(csv.as_bytes()).map_err(|e| Failure::Runtime(e.to_string()))?,
            }
        }
        Command::Suite { out: dir, runs, seed, only, exec } => {
            if runs == Some(0) {
                return Err(Failure::Config("runs must be at least 1".into()));
            }
            let suite = figure_suite();
            if let Some(name) = only.iter().find(|n| !suite.iter().any(|f| &f.name == *n)) {
                return Err(Failure::Config(format!("unknown figure `{name}`")));
            }
            std::fs::create_dir_all(&dir)
                .map_err(|e| Failure::Runtime(format!("cannot create {}: {e}", dir.display())))?;
            for fig in suite.into_iter().filter(|f| only.is_empty() || only.contains(&f.name)) {
                let results = fig
                    .series
                    .iter()
                    .map(|s| {
                        let cfg = SweepConfig {
                            runs: runs.unwrap_or(s.runs),
                            master_seed: seed.unwrap_or(s.master_seed),
                            ..s.clone()
                        };
                        run_sweep_with_threads(&cfg, exec.threads)
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                let path = dir.join(format!("{}.csv", fig.name));
                write_file(&path, &to_csv(&results))?;
                let _ = writeln!(err, "wrote {}", path.display());
            }
        }
        Command::Validate { source } => {
            let cfg = resolve(&source, err)?;
            let _ = writeln!(out, "{}", ConfigLayer::from_config(&cfg).to_json());
        }
    }
    Ok(())
}

/// Runs the CLI on `args` (including the program name); returns the exit code.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(cli.command, out, err) {
        Ok(()) => EXIT_OK,
        Err(Failure::Config(m)) => {
            let _ = writeln!(err, "error: {m}");
            EXIT_CONFIG
        }
        Err(Failure::Runtime(m)) => {
            let _ = writeln!(err, "error: {m}");
            EXIT_RUNTIME
        }
    }
}
