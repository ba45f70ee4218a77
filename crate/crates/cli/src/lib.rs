//! Command-line front end for the `robust-stream` algorithms.
//!
//! Every subcommand reads a stream, runs one algorithm (or plays one attack
//! game) and writes `summary.json` plus one `round,value` CSV per metric
//! series into the output directory.

pub mod config;
pub mod error;
pub mod execute;
pub mod io;
pub mod report;

use std::ffi::OsString;

pub use config::{parse, parse_and_validate, Parsed, RunConfig};
pub use error::{CliError, CliResult};
pub use execute::{execute, TrialOutcome};
pub use report::MetricSeries;

pub const EXIT_OK: i32 = 0;
pub const EXIT_WARNING: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

/// Parses, runs and reports; returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match parse(argv) {
        Ok(Parsed::Run(cfg)) => cfg,
        Ok(Parsed::Info(text)) => {
            print!("{text}");
            return EXIT_OK;
        }
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_ERROR;
        }
    };
    match execute(&cfg) {
        Ok(outcomes) => {
            let mut code = EXIT_OK;
            for o in &outcomes {
                for w in &o.warnings {
                    eprintln!("warning (seed {}): {w}", o.seed);
                    code = EXIT_WARNING;
                }
            }
            println!("{}: wrote {}", cfg.job.name(), cfg.out.display());
            code
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}
