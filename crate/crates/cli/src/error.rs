use std::fmt;
use std::path::{Path, PathBuf};

#[derive(Debug)]
pub enum CliError {
    /// A library error, tagged with the flag or input it concerns.
    Input { field: String, source: convmax::Error },
    Usage(String),
    Io { path: PathBuf, source: std::io::Error },
    Encode(String),
}

impl CliError {
    pub fn input(field: &str) -> impl FnOnce(convmax::Error) -> CliError + '_ {
        move |source| CliError::Input { field: field.to_string(), source }
    }

    pub fn io(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
        move |source| CliError::Io { path: path.to_path_buf(), source }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input { source, .. } if source.is_io() => 1,
            CliError::Input { .. } | CliError::Usage(_) => 2,
            CliError::Io { .. } | CliError::Encode(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input { field, source } => write!(f, "{field}: {source}"),
            CliError::Usage(msg) => f.write_str(msg),
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
            CliError::Encode(msg) => write!(f, "encoding output: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}
