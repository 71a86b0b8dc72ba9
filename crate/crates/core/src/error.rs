use std::fmt;

use thiserror::Error;

/// Which side of a pool's geography an operation is working on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    China,
    RestOfWorld,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::China => f.write_str("Chinese-province"),
            Side::RestOfWorld => f.write_str("rest-of-world"),
        }
    }
}

/// Coarse error category, used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Config,
    Dataset,
    Numeric,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("{source_name}: {message}")]
    Dataset {
        source_name: String,
        message: String,
    },

    #[error("no emission factor for region `{0}`")]
    MissingEmissionFactor(String),

    #[error("unknown region `{0}`")]
    UnknownRegion(String),

    #[error("no donor pools report {0} disaggregation")]
    NoDonors(Side),

    #[error("pool `{pool}`: {message}")]
    InvalidPool { pool: String, message: String },

    #[error("no hardware specs released in or after {0}")]
    EmptySelection(i32),

    #[error("degenerate trajectory: {0}")]
    DegenerateTrajectory(String),

    #[error("sensitivity analysis requires a linear trajectory")]
    NotLinear,

    #[error("log-derivative undefined: cumulative emissions are zero")]
    ZeroEmissions,

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn dataset(source_name: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Dataset {
            source_name: source_name.into(),
            message: message.into(),
        }
    }

    pub fn class(&self) -> ErrorClass {
        match self {
            Error::InvalidParameter { .. } | Error::NotLinear => ErrorClass::Config,
            Error::Dataset { .. }
            | Error::MissingEmissionFactor(_)
            | Error::UnknownRegion(_)
            | Error::NoDonors(_)
            | Error::InvalidPool { .. }
            | Error::EmptySelection(_)
            | Error::DegenerateTrajectory(_)
            | Error::Io(_) => ErrorClass::Dataset,
            Error::ZeroEmissions | Error::Numeric(_) => ErrorClass::Numeric,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
