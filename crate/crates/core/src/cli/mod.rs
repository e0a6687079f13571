//! Command-line front end: configuration, the five subcommands, output.

pub mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::{
    classify_regime, run_kernel, run_scan, run_solve, run_sweep, run_verify, KernelGrid, ResultRecord, ScanReport,
};
pub use config::{ConfigMap, Format, RunConfig};

use crate::error::{Error, Result};

#[derive(Debug, Parser)]
#[command(
    name = "resonance-solver",
    version,
    about = "Resonances and eigenvalues of two-channel point interactions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// All singularities at one parameter point
    Solve(Flags),
    /// `solve` over eps_ladder, in parallel
    Sweep(Flags),
    /// |D_eps| on both edges of the cut over [scan_min, scan_max]
    Scan(Flags),
    /// Resolvent correction kernel on a spatial grid
    Kernel(Flags),
    /// Remainder-order fit of the small-eps expansion over eps_ladder
    Verify(Flags),
}

/// Overrides for the keys of the configuration file.
#[derive(Debug, Default, Args)]
pub struct Flags {
    /// Flat `key = value` configuration file
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub dimension: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub theta0: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<String>,
    #[arg(long)]
    pub epsilon: Option<String>,
    /// Comma separated list or start:stop:count
    #[arg(long)]
    pub eps_ladder: Option<String>,
    #[arg(long)]
    pub tol: Option<String>,
    #[arg(long)]
    pub max_iter: Option<String>,
    #[arg(long)]
    pub scan_min: Option<String>,
    #[arg(long)]
    pub scan_max: Option<String>,
    #[arg(long)]
    pub grid_n: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub energy_re: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub energy_im: Option<String>,
    /// Output path; stdout when absent
    #[arg(long)]
    pub out: Option<String>,
    /// csv or json
    #[arg(long)]
    pub format: Option<String>,
}

impl Flags {
    fn overrides(&self) -> ConfigMap {
        let mut m = ConfigMap::default();
        let pairs = [
            ("dimension", &self.dimension),
            ("theta0", &self.theta0),
            ("c", &self.c),
            ("b", &self.b),
            ("epsilon", &self.epsilon),
            ("eps_ladder", &self.eps_ladder),
            ("tol", &self.tol),
            ("max_iter", &self.max_iter),
            ("scan_min", &self.scan_min),
            ("scan_max", &self.scan_max),
            ("grid_n", &self.grid_n),
            ("energy_re", &self.energy_re),
            ("energy_im", &self.energy_im),
            ("out", &self.out),
            ("format", &self.format),
        ];
        for (k, v) in pairs {
            if let Some(v) = v {
                m.set(k, v.clone());
            }
        }
        m
    }

    /// File values first, flags on top.
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut map = match &self.config {
            Some(p) => ConfigMap::load(p)?,
            None => ConfigMap::default(),
        };
        map.merge(&self.overrides());
        RunConfig::from_map(&map)
    }
}

fn sink(cfg: &RunConfig) -> Result<Box<dyn Write>> {
    Ok(match &cfg.out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Runs one command and writes its output. Returns whether every record
/// succeeded.
pub fn execute(command: &Command) -> Result<bool> {
    let (Command::Solve(f) | Command::Sweep(f) | Command::Scan(f) | Command::Kernel(f) | Command::Verify(f)) = command;
    let cfg = f.resolve()?;
    match command {
        Command::Solve(_) | Command::Sweep(_) => {
            let records = match command {
                Command::Solve(_) => vec![run_solve(&cfg)?],
                _ => run_sweep(&cfg)?,
            };
            let mut w = sink(&cfg)?;
            match (cfg.format, command) {
                (Format::Csv, _) => output::write_records_csv(&mut w, &records)?,
                (Format::Json, Command::Solve(_)) => output::write_json(&mut w, &records[0])?,
                (Format::Json, _) => output::write_json(&mut w, &records)?,
            }
            w.flush()?;
            for r in &records {
                for note in &r.notes {
                    eprintln!("eps = {:e}: {note}", r.epsilon);
                }
            }
            for r in records.iter().filter(|r| r.failed()) {
                eprintln!("eps = {:e}: {}", r.epsilon, r.error.as_deref().unwrap_or(""));
            }
            Ok(records.iter().all(|r| !r.failed()))
        }
        Command::Scan(_) => {
            let scan = run_scan(&cfg)?;
            let mut w = sink(&cfg)?;
            match cfg.format {
                Format::Csv => output::write_scan_csv(&mut w, &scan)?,
                Format::Json => output::write_json(&mut w, &scan)?,
            }
            w.flush()?;
            Ok(true)
        }
        Command::Kernel(_) => {
            let grid = run_kernel(&cfg)?;
            let mut w = sink(&cfg)?;
            match cfg.format {
                Format::Csv => output::write_kernel_csv(&mut w, &grid)?,
                Format::Json => output::write_json(&mut w, &grid)?,
            }
            w.flush()?;
            Ok(true)
        }
        Command::Verify(_) => {
            let rec = run_verify(&cfg)?;
            let mut w = sink(&cfg)?;
            match cfg.format {
                Format::Csv => output::write_verify_csv(&mut w, &rec)?,
                Format::Json => output::write_json(&mut w, &rec)?,
            }
            w.flush()?;
            for note in &rec.notes {
                eprintln!("{note}");
            }
            if let Some(e) = &rec.error {
                eprintln!("{e}");
            }
            Ok(!rec.failed())
        }
    }
}

/// Parses `args` (program name first) and runs; returns the exit code:
/// 0 success, 1 solver failure, 2 invalid configuration.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli.command) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::InvalidConfig(_) => 2,
                other => other.exit_code(),
            }
        }
    }
}
