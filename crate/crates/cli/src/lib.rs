//! Batch front-end: JSON experiment configs in, CSV and JSON results out.

pub mod config;
pub mod experiments;
pub mod presets;
pub mod weights;

use std::fs;
use std::path::Path;

use config::ExperimentConfig;
use experiments::{execute, RunOutput};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Validation(String),
    #[error(transparent)]
    Core(#[from] gcnn_ridgelet::error::Error),
    #[error("i/o: {0}")]
    Io(String),
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl CliError {
    /// 2 for bad input, 3 for numeric failure, 4 for a degenerate pair.
    pub fn exit_code(&self) -> i32 {
        use gcnn_ridgelet::error::Error;
        match self {
            CliError::Validation(_) | CliError::Io(_) => 2,
            CliError::Core(Error::Numeric(_)) => 3,
            CliError::Core(Error::DegeneratePair { .. }) => 4,
            CliError::Core(_) => 2,
        }
    }
}

/// Reads and validates a config file.
pub fn load_config(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    ExperimentConfig::from_json(&text)
}

fn check_file_name(name: &str) -> Result<(), CliError> {
    let p = Path::new(name);
    if name.is_empty() || p.components().count() != 1 || p.file_name().is_none() {
        return Err(CliError::Validation(format!(
            "output name '{name}' must be a plain file name"
        )));
    }
    Ok(())
}

/// Runs `cfg` on a pool of `threads` workers (all cores if `None`) and
/// writes its outputs to `out_dir`. Nothing is written unless the run
/// succeeds.
pub fn run(
    cfg: &ExperimentConfig,
    out_dir: &Path,
    threads: Option<usize>,
) -> Result<RunOutput, CliError> {
    cfg.validate()?;
    let o = &cfg.output;
    for name in [&o.results, &o.summary, &o.weights] {
        check_file_name(name)?;
    }
    if threads == Some(0) {
        return Err(CliError::Validation("--threads must be at least 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Io(e.to_string()))?;
    let output = pool.install(|| execute(cfg))?;
    fs::create_dir_all(out_dir)?;
    fs::write(out_dir.join(&o.results), &output.csv)?;
    let mut summary = serde_json::to_string_pretty(&output.summary)?;
    summary.push('\n');
    fs::write(out_dir.join(&o.summary), summary)?;
    if let Some(w) = &output.weights {
        let mut text = serde_json::to_string_pretty(w)?;
        text.push('\n');
        fs::write(out_dir.join(&o.weights), text)?;
    }
    Ok(output)
}
