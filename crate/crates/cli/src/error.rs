use std::path::PathBuf;

use thiserror::Error;

/// Exit code for configuration, input and IO problems.
pub const EXIT_CONFIG: i32 = 2;
/// Exit code for failures inside the numerics.
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("numerical failure: {0}")]
    Numerical(dfs_oneway::Error),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => EXIT_CONFIG,
            CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

/// Core errors that can only come from bad input are config errors; the
/// rest are numerical.
impl From<dfs_oneway::Error> for CliError {
    fn from(e: dfs_oneway::Error) -> Self {
        use dfs_oneway::Error as E;
        match e {
            E::UnknownLabel(_)
            | E::Json(_)
            | E::InvalidSchedule(_)
            | E::OverlappingTargets(_)
            | E::IndexOutOfRange { .. }
            | E::RepeatedIndex(_)
            | E::TooSmall { .. }
            | E::Tomography(_)
            | E::MissingProbe(_)
            | E::EntryCount { .. }
            | E::NotQubitDimension(_) => CliError::Config(e.to_string()),
            other => CliError::Numerical(other),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Config(format!("json: {e}"))
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[cfg(test)]
mod tests {
    use super::*;
    use dfs_oneway::Error as E;

    #[test]
    fn exit_codes_follow_the_error_class() {
        assert_eq!(CliError::from(E::UnknownLabel("x".into())).exit_code(), EXIT_CONFIG);
        assert_eq!(CliError::from(E::Tomography("empty".into())).exit_code(), EXIT_CONFIG);
        assert_eq!(CliError::from(E::SingularDesign).exit_code(), EXIT_NUMERICAL);
        assert_eq!(CliError::from(E::NoCodeSpaceSupport(0.0)).exit_code(), EXIT_NUMERICAL);
        let io = CliError::io("x", std::io::Error::other("boom"));
        assert_eq!(io.exit_code(), EXIT_CONFIG);
    }
}
