use std::fmt;

use minecast_core::ErrorClass;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Core(minecast_core::Error),
    Output(String),
}

impl CliError {
    /// 1 config, 2 dataset or file, 3 numeric.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Output(_) => 2,
            CliError::Core(e) => match e.class() {
                ErrorClass::Config => 1,
                ErrorClass::Dataset => 2,
                ErrorClass::Numeric => 3,
            },
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Core(e) => match e.class() {
                ErrorClass::Config => write!(f, "config error: {e}"),
                ErrorClass::Dataset => write!(f, "dataset error: {e}"),
                ErrorClass::Numeric => write!(f, "numeric error: {e}"),
            },
            CliError::Output(m) => write!(f, "output error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<minecast_core::Error> for CliError {
    fn from(e: minecast_core::Error) -> Self {
        CliError::Core(e)
    }
}
