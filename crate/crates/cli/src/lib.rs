//! The `qudisc` command line.
//!
//! Exit statuses: 0 success, 1 failed verification, 2 bad flags or
//! configuration, 3 violated precondition, 4 I/O error.

pub mod args;
pub mod commands;
pub mod format;

use std::ffi::OsString;
use std::io::Write;
use std::path::Path;

use clap::Parser;

pub use args::Cli;
pub use commands::Outcome;

pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const VERIFY_FAILED: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const PRECONDITION: i32 = 3;
    pub const IO: i32 = 4;
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Precondition(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Failure(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => exit::USAGE,
            CliError::Precondition(_) => exit::PRECONDITION,
            CliError::Io(_) => exit::IO,
            CliError::Failure(_) => exit::VERIFY_FAILED,
        }
    }
}

impl From<qudisc_core::Error> for CliError {
    fn from(e: qudisc_core::Error) -> Self {
        use qudisc_core::Error::*;
        match e {
            Precondition(_) => CliError::Precondition(e.to_string()),
            NoConvergence { .. } | Certification(_) => CliError::Failure(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

fn emit(body: &str, path: Option<&Path>, stdout: &mut dyn Write) -> Result<(), CliError> {
    let io = |e: std::io::Error| match path {
        Some(p) => CliError::Io(format!("cannot write {}: {e}", p.display())),
        None => CliError::Io(format!("cannot write to standard output: {e}")),
    };
    match path {
        Some(p) => std::fs::write(p, body).map_err(io),
        None => stdout.write_all(body.as_bytes()).and_then(|_| stdout.flush()).map_err(io),
    }
}

fn dispatch(cli: &Cli) -> (Result<Outcome, CliError>, Option<&Path>) {
    use args::Command::*;
    match &cli.command {
        Spectrum(a) => (commands::spectrum(a), a.output.out.as_deref()),
        Unambiguous(a) => (commands::unambiguous(a), a.output.out.as_deref()),
        Minerror(a) => (commands::minerror(a), a.output.out.as_deref()),
        Bounds(a) => (commands::bounds(a), a.output.out.as_deref()),
        Verify(a) => (commands::verify(a), a.output.out.as_deref()),
        Sweep(a) => (commands::sweep(a), a.out.as_deref()),
    }
}

/// Parses `args` (program name first), runs the command, and returns the
/// exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let target: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(target, "{}", e.render());
            return e.exit_code();
        }
    };
    let (outcome, path) = dispatch(&cli);
    let result = outcome.and_then(|o| {
        emit(&o.body, path, stdout)?;
        if let Some(note) = &o.note {
            let _ = writeln!(stderr, "{note}");
        }
        Ok(o.code)
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.code()
        }
    }
}
