use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// `line` is 0 for whole-config checks.
    #[error("config{}: {msg}", if *line > 0 { format!(" line {line}") } else { String::new() })]
    Config { line: usize, msg: String },
    #[error("unknown preset '{0}'")]
    UnknownPreset(String),
    #[error("strict mode: {0}")]
    Strict(String),
    #[error(transparent)]
    Core(#[from] rabi_bloch::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type CliResult<T> = std::result::Result<T, CliError>;
