//! Command-line frontend for `linkforge`: annotation, evaluation, training-set
//! and dictionary tools, and the annotation web service.

pub mod args;
mod commands;
pub mod error;
pub mod report;
pub mod service;

use std::ffi::OsString;
use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use clap::Parser;
use linkforge::{Mode, Pipeline, PipelineConfig};

use args::{Cli, Command, KbCommand};
pub use error::{exit, CliError};

/// Parse `args` (including the program name) and run the command. Returns the
/// process exit code.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(sink, "{e}");
            return code;
        }
    };
    let result = match cli.command {
        Command::Annotate(a) => commands::annotate(&a, stdin, stdout),
        Command::Evaluate(a) => commands::evaluate(&a, stdout, stderr),
        Command::BuildTrainset(a) => commands::build_trainset(&a, stdout, stderr),
        Command::Kb(KbCommand::Build(a)) => commands::kb_build(&a, stdout),
        Command::Serve(a) => service::run(&a, stderr),
    };
    match result {
        Ok(()) => exit::OK,
        Err(e) => {
            let _ = writeln!(stderr, "linkforge: {e}");
            e.code()
        }
    }
}

/// Read a configuration and build its pipeline, optionally in another mode.
pub fn load_pipeline(path: &Path, mode: Option<&str>) -> Result<(PipelineConfig, Pipeline), CliError> {
    let cfg = PipelineConfig::from_file(path)?;
    let pipeline = Pipeline::from_config(&cfg)?;
    let pipeline = match mode {
        Some(m) => pipeline.with_mode(m.parse::<Mode>()?)?,
        None => pipeline,
    };
    Ok((cfg, pipeline))
}

/// Write `bytes` to a temporary file next to `path`, then rename it into place,
/// so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir.display(), e))?;
    tmp.write_all(bytes).map_err(|e| CliError::io(path.display(), e))?;
    tmp.as_file().sync_all().map_err(|e| CliError::io(path.display(), e))?;
    tmp.persist(path).map_err(|e| CliError::io(path.display(), e.error))?;
    Ok(())
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}
