use std::io::Write;
use std::process::ExitCode;

use alphacalc::cli::{run, Cli};
use clap::Parser;

fn main() -> ExitCode {
    let config = match Cli::parse().into_config() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match run(&config) {
        Ok(outcome) => {
            if config.output_path.is_none() {
                let mut out = std::io::stdout().lock();
                if out.write_all(outcome.report.as_bytes()).and_then(|_| out.flush()).is_err() {
                    return ExitCode::from(2);
                }
            }
            ExitCode::from(outcome.code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
