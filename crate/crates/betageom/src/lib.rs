//! Command-line front end for `betageom-core`.
//!
//! [`run`] parses arguments, evaluates formulas or simulations, and
//! renders versioned JSON or CSV. Simulations run chunk-parallel on a
//! rayon pool with results identical to the sequential estimators.

pub mod commands;
pub mod error;
pub mod formulas;
pub mod parallel;
pub mod report;
pub mod request;

use clap::error::ErrorKind;
use clap::Parser;

pub use error::{CliError, CliResult};
pub use request::{Cli, Command, Request};

/// Everything a run prints, with its exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Runs the CLI on `args` (without the program name).
pub fn run<I, S>(args: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let argv = std::iter::once(std::ffi::OsString::from("betageom")).chain(args.into_iter().map(Into::into));
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome {
                    code: 0,
                    stdout: text,
                    stderr: String::new(),
                },
                _ => Outcome {
                    code: 2,
                    stdout: String::new(),
                    stderr: text,
                },
            };
        }
    };
    match request::resolve(&cli.command).and_then(|req| commands::execute(&req)) {
        Ok(out) => Outcome {
            code: out.code,
            stdout: out.stdout,
            stderr: String::new(),
        },
        Err(err @ CliError::Usage(_)) => Outcome {
            code: err.exit_code(),
            stdout: String::new(),
            stderr: format!("error: {err}\n"),
        },
        Err(err) => Outcome {
            code: err.exit_code(),
            stdout: report::error_object(&err),
            stderr: format!("error: {err}\n"),
        },
    }
}
