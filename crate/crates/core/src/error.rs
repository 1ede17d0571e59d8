use std::fmt;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Broad error class, used by the CLI to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Parse,
    Unit,
    Gap,
    Coverage,
    Computation,
    Io,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{source_name}: line {line}: {message}")]
    Parse {
        source_name: String,
        line: u64,
        message: String,
    },

    #[error("unit error: {0}")]
    Unit(String),

    #[error("{series}: missing years {first}-{last}")]
    Gap { series: String, first: i32, last: i32 },

    #[error("coverage error: {0}")]
    Coverage(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("range error: {0}")]
    Range(String),

    #[error("calibration error: {0}")]
    Calibration(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("weight error: {0}")]
    Weight(String),

    #[error("fit error: {0}")]
    Fit(String),

    #[error("output error: {0}")]
    Output(String),

    #[error(
        "skill undefined: persistence error is zero (hindcast error {hindcast_error}, persistence error {persistence_error})"
    )]
    UndefinedSkill {
        hindcast_error: f64,
        persistence_error: f64,
    },

    #[error("{}", DisplayList(.0))]
    Dataset(Vec<Error>),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

struct DisplayList<'a>(&'a [Error]);

impl fmt::Display for DisplayList<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Parse { .. } => ErrorClass::Parse,
            Error::Unit(_) => ErrorClass::Unit,
            Error::Gap { .. } => ErrorClass::Gap,
            Error::Coverage(_) => ErrorClass::Coverage,
            Error::Io { .. } => ErrorClass::Io,
            // An aggregate reports the class of its first member.
            Error::Dataset(errors) => errors
                .first()
                .map(Error::class)
                .unwrap_or(ErrorClass::Computation),
            _ => ErrorClass::Computation,
        }
    }

    pub(crate) fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
