use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, found `{text}`")]
    Syntax { line: usize, text: String },
    #[error("line {line}: unknown key '{key}'")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: key '{key}' given more than once")]
    DuplicateKey { line: usize, key: String },
    #[error("line {line}: cannot parse '{value}' for '{key}': {reason}")]
    Unparsable {
        line: usize,
        key: String,
        value: String,
        reason: String,
    },
    #[error("missing required key '{key}'")]
    MissingKey { key: &'static str },
    #[error("{}invalid '{key}': {reason}", line.map(|l| format!("line {l}: ")).unwrap_or_default())]
    Invalid {
        line: Option<usize>,
        key: String,
        reason: String,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Solver(#[from] fracab_core::Error),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    /// Process exit status: 2 for a halted unstable run, 1 for anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Solver(fracab_core::Error::Unstable { .. }) => 2,
            _ => 1,
        }
    }
}
