//! `logostate` command-line front end.
//!
//! Exit codes: 0 success, 1 configuration error, 2 data error, 3 fit
//! failure. Failures print one `logostate: error kind=... code=... message="..."`
//! line on standard error.

mod args;
mod output;
mod run;
mod sweep;

use std::process::ExitCode;

use clap::error::ErrorKind as ClapErrorKind;
use clap::Parser;
use logostate::ErrorKind;

use args::Cli;

#[derive(Debug, Clone)]
pub struct CliError {
    pub kind: ErrorKind,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        Self {
            kind: ErrorKind::Config,
            message: message.into(),
        }
    }

    pub fn data(message: impl Into<String>) -> Self {
        Self {
            kind: ErrorKind::Data,
            message: message.into(),
        }
    }

    pub fn code(&self) -> i32 {
        match self.kind {
            ErrorKind::Config => 1,
            ErrorKind::Data => 2,
            ErrorKind::Fit => 3,
        }
    }

    pub fn diagnostic(&self) -> String {
        format!(
            "logostate: error kind={} code={} message={:?}",
            self.kind.as_str(),
            self.code(),
            self.message
        )
    }
}

impl From<logostate::Error> for CliError {
    fn from(e: logostate::Error) -> Self {
        Self {
            kind: e.kind(),
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if matches!(
                e.kind(),
                ClapErrorKind::DisplayHelp | ClapErrorKind::DisplayVersion
            ) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let message = e.to_string();
            let first = message.lines().next().unwrap_or("invalid arguments");
            let err = CliError::config(first.trim_start_matches("error: "));
            eprintln!("{}", err.diagnostic());
            return ExitCode::from(err.code() as u8);
        }
    };
    let result = if cli.is_sweep() {
        sweep::run_sweep(&cli)
    } else {
        match cli.run_config() {
            Ok(rc) => run::run_fit(&rc),
            Err(message) => {
                let err = CliError::config(message);
                run::record_early_failure(&cli.input, &cli.output, &err);
                Err(err)
            }
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.diagnostic());
            ExitCode::from(e.code() as u8)
        }
    }
}
