mod args;
mod run;

use std::process::ExitCode;

use clap::Parser;
use log::LevelFilter;

use args::Cli;
use run::{run, Exit};

/// `CONIC_ALM_LOG` in {quiet, info, trace}; warnings only when unset.
fn init_logging() {
    let level = match std::env::var("CONIC_ALM_LOG").as_deref() {
        Ok("quiet") => LevelFilter::Off,
        Ok("info") => LevelFilter::Info,
        Ok("trace") => LevelFilter::Trace,
        Ok(other) => {
            eprintln!("warning: ignoring CONIC_ALM_LOG={other}; expected quiet, info or trace");
            LevelFilter::Warn
        }
        Err(_) => LevelFilter::Warn,
    };
    env_logger::Builder::new().filter_level(level).format_timestamp(None).init();
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { Exit::Usage as u8 } else { 0 });
        }
    };
    init_logging();
    match run(cli.command) {
        Ok(exit) => ExitCode::from(exit as u8),
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.exit as u8)
        }
    }
}
