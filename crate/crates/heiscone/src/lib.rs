//! Command-line front end of `heiscone-core`: surface files, report
//! emission and point-cloud export.

pub mod cli;
pub mod error;
pub mod input;
pub mod run;

pub use cli::{parse_args, parse_args_with_seed, Command, RunConfig};
pub use error::CliError;
pub use input::{load_surface, LoadedSurface};
pub use run::{emit_report, execute, Outcome};

/// Parses, runs and emits; returns the process exit code.
pub fn main_with_args<I, T>(argv: I, env_seed: Option<String>) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let result = parse_args_with_seed(argv, env_seed).and_then(|config| {
        let outcome = execute(&config)?;
        emit_report(&outcome, config.output.as_deref())?;
        Ok(outcome.exit_code())
    });
    match result {
        Ok(code) => code,
        Err(CliError::Help(text)) => {
            print!("{text}");
            0
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("{}", msg.trim_end());
            2
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
