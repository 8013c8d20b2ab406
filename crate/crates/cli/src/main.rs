//! `walklab`: growth, escape, and entropy constants for random walks on
//! free, free abelian, and locally free groups and monoids, from the
//! command line.
//!
//! Every invocation emits exactly one NDJSON result record (stdout, or
//! appended to `--out`) carrying the resolved config, a content hash of
//! it, and the outputs with units. Records for complete answers are
//! cached under that hash, so re-running an identical invocation replays
//! the identical outputs instantly; `--no-cache` forces a fresh run.
//!
//! Exit codes: 0 complete, 2 invalid input, 3 budget-limited partial
//! answer, 4 undefined drift, 5 optimization failure, 1 internal error.

mod commands;
mod error;
mod inputs;
mod record;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use serde_json::Value;

use error::CliError;

#[derive(Parser)]
#[command(
    name = "walklab",
    version,
    about = "Growth, escape rate, and entropy rate of random walks on free and locally free groups and monoids"
)]
struct Cli {
    #[command(subcommand)]
    command: commands::Cmd,
    /// Append the result record to this NDJSON file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Compute fresh and store nothing, ignoring any cached record.
    #[arg(long, global = true)]
    no_cache: bool,
    /// Result cache directory; defaults to WALKLAB_CACHE_DIR, then the
    /// system temp dir.
    #[arg(long, global = true, value_name = "DIR")]
    cache_dir: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            e.exit()
        }
    }
}

fn run(cli: &Cli) -> Result<u8, CliError> {
    let started = Instant::now();
    let commands::Prepared {
        command,
        config,
        csv,
        job,
    } = commands::prepare(&cli.command)?;
    let tool_version = env!("CARGO_PKG_VERSION");
    let hash = record::config_hash(command, &config, tool_version);
    let dir = record::cache_dir(cli.cache_dir.as_deref());

    if !cli.no_cache {
        if let Some(mut cached) = record::cache_load(&dir, &hash) {
            cached.cache_hit = true;
            cached.wall_clock_seconds = started.elapsed().as_secs_f64();
            write_csv(command, &cached.outputs, csv.as_deref())?;
            record::emit(&cached, cli.out.as_deref())?;
            return Ok(0);
        }
    }

    let (outputs, code) = commands::execute(job)?;
    let rec = record::ResultRecord {
        command: command.into(),
        config,
        config_hash: hash,
        tool_version: tool_version.into(),
        outputs,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
        cache_hit: false,
    };
    write_csv(command, &rec.outputs, csv.as_deref())?;
    record::emit(&rec, cli.out.as_deref())?;
    // Only complete answers are worth replaying; partial ones should be
    // recomputed once their budgets are raised.
    if code == 0 && !cli.no_cache {
        record::cache_store(&dir, &rec);
    }
    Ok(code)
}

fn write_csv(command: &str, outputs: &Value, path: Option<&Path>) -> Result<(), CliError> {
    let Some(path) = path else { return Ok(()) };
    let Some(table) = commands::csv_for(command, outputs) else {
        return Ok(());
    };
    std::fs::write(path, table).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        source: e,
    })
}
