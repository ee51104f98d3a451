//! Command-line driver.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use rayon::prelude::*;

use crate::output::{result_rows, write_csv, write_geometry, write_json};
use crate::scenario::{parse_scenario, Scenario};
use crate::sim::{run_scenario, ScenarioResult, SimError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Simulate neighbor cell list schemes for femto-to-femto handover.
#[derive(Debug, Parser)]
#[command(name = "femto-ncl", version)]
pub struct Args {
    /// Scenario file.
    #[arg(long)]
    pub scenario: PathBuf,
    /// First seed; replication i uses seed + i.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub replications: u64,
    /// Handover events per replication.
    #[arg(long, default_value_t = 1000)]
    pub events: u64,
    /// Output file (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write the realised geometry of every replication to this file.
    #[arg(long)]
    pub dump_geometry: Option<PathBuf>,
    /// Worker threads for replications; 0 uses every core.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

/// Runs replications `seed..seed + replications`, results in seed order.
pub fn run_replications(
    scenario: &Scenario,
    seed: u64,
    replications: u64,
    events: u64,
    jobs: usize,
) -> Result<Vec<ScenarioResult>, SimError> {
    let seeds: Vec<u64> = (0..replications).map(|i| seed.wrapping_add(i)).collect();
    if jobs == 1 {
        return seeds
            .iter()
            .map(|&s| run_scenario(&scenario.sim, s, events))
            .collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .expect("thread pool");
    pool.install(|| {
        seeds
            .par_iter()
            .map(|&s| run_scenario(&scenario.sim, s, events))
            .collect()
    })
}

fn write_output(args: &Args, scenario: &Scenario, results: &[ScenarioResult], stdout: &mut dyn Write) -> io::Result<()> {
    let rows = result_rows(&scenario.name, results);
    let mut buf = Vec::new();
    match args.format {
        Format::Csv => write_csv(&rows, &mut buf)?,
        Format::Json => write_json(&rows, &mut buf)?,
    }
    match &args.out {
        Some(path) => fs::write(path, buf),
        None => stdout.write_all(&buf),
    }
}

fn dump_geometry(path: &PathBuf, scenario: &Scenario, results: &[ScenarioResult]) -> Result<(), String> {
    let mut buf = Vec::new();
    for r in results {
        let dep = scenario.sim.build_deployment(r.seed).map_err(|e| e.to_string())?;
        write_geometry(scenario, r.seed, &dep, &mut buf).map_err(|e| e.to_string())?;
    }
    fs::write(path, buf).map_err(|e| format!("{}: {e}", path.display()))
}

/// Parses `argv` (program name first) and runs; returns the process exit code.
pub fn run<I, S>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{}", e.render());
                    EXIT_INPUT
                }
            };
        }
    };

    let text = match fs::read_to_string(&args.scenario) {
        Ok(t) => t,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}: {e}", args.scenario.display());
            return EXIT_INPUT;
        }
    };
    let scenario = match parse_scenario(&text) {
        Ok(s) => s,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}: {e}", args.scenario.display());
            return EXIT_INPUT;
        }
    };

    let results = match run_replications(&scenario, args.seed, args.replications, args.events, args.jobs) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_RUNTIME;
        }
    };
    for r in &results {
        if let Err(e) = r.require_complete() {
            let _ = writeln!(stderr, "warning: seed {}: {e}; row holds a partial result", r.seed);
        }
        if r.channel_stressed {
            let _ = writeln!(
                stderr,
                "warning: seed {}: {} channels cannot separate every overlapping pair",
                r.seed, scenario.sim.num_channels
            );
        }
    }

    if let Some(path) = &args.dump_geometry {
        if let Err(e) = dump_geometry(path, &scenario, &results) {
            let _ = writeln!(stderr, "error: geometry dump: {e}");
            return EXIT_RUNTIME;
        }
    }
    if let Err(e) = write_output(&args, &scenario, &results, stdout) {
        let _ = writeln!(stderr, "error: writing results: {e}");
        return EXIT_RUNTIME;
    }
    EXIT_OK
}
