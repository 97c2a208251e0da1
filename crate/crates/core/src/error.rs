use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid {grid}: no mix data between {from} and {to}")]
    CoverageGap {
        grid: String,
        from: String,
        to: String,
    },
    #[error("grid {grid}: negative share {value} for {source_name} at {at}")]
    NegativeShare {
        grid: String,
        source_name: String,
        value: f64,
        at: String,
    },
    #[error("grid {grid}: all shares are zero at {at}")]
    EmptyMix { grid: String, at: String },
    #[error("invalid region {id}: {reason}")]
    InvalidRegion { id: String, reason: String },
    #[error("unknown region {0}")]
    UnknownRegion(String),
    #[error("unknown vm instance {0}")]
    UnknownVm(String),
    #[error("invalid vm {name}: {reason}")]
    InvalidVm { name: String, reason: String },
    #[error("utilization {0} outside [0, 1]")]
    Utilization(f64),
    #[error("invalid job {id}: {reason}")]
    InvalidJob { id: String, reason: String },
    #[error("execution of job {job} in region {region} from step {start} ends at {end:.3}, beyond horizon of {horizon} steps")]
    HorizonOverflow {
        job: String,
        region: usize,
        start: usize,
        end: f64,
        horizon: usize,
    },
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("invalid trace spec: {0}")]
    InvalidTraceSpec(String),
    #[error("malformed function statistics: {0}")]
    MalformedStats(String),
    #[error("empty big-data trace pool")]
    EmptyPool,
    #[error("missing data: {0}")]
    MissingData(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("parse error in {context}: {message}")]
    Parse { context: String, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn parse(context: impl Into<String>, message: impl ToString) -> Self {
        Error::Parse {
            context: context.into(),
            message: message.to_string(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
