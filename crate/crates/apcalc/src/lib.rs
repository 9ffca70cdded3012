//! Command-line front end and file formats for `apcalc-core`.

pub mod cli;
pub mod commands;
pub mod error;
pub mod format;
pub mod report;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

pub use cli::{Cli, Mode};
pub use error::{CliError, CliResult};

/// Runs the command line `args` and returns the exit code: 0 when the
/// command's check passed, 2 when it failed, 3 on input errors.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                3
            } else {
                let _ = write!(stdout, "{text}");
                0
            };
        }
    };
    let outcome = commands::execute(&cli).and_then(|r| {
        r.emit(cli.mode.name(), cli.seed, cli.out.as_deref(), stdout)?;
        Ok(r.pass)
    });
    match outcome {
        Ok(true) => 0,
        Ok(false) => 2,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
