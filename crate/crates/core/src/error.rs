//! Crate-wide error type.

use std::path::PathBuf;

use chrono::NaiveDate;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse classification used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Input,
    Config,
    Numeric,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension registry must contain at least one label")]
    EmptyRegistry,
    #[error("empty dimension label")]
    EmptyLabel,
    #[error("duplicate dimension label `{0}`")]
    DuplicateLabel(String),
    #[error("unknown dimension `{0}`")]
    UnknownDimension(String),
    #[error("vectors belong to different dimension registries")]
    MixedRegistries,
    #[error("score {value} for `{dim}` outside [-1, 1]")]
    ScoreOutOfRange { dim: String, value: f64 },
    #[error("unknown bias enum `{0}`")]
    UnknownBias(String),

    #[error("missing field `{0}`")]
    MissingField(String),
    #[error("{context}: {message}")]
    Parse { context: String, message: String },
    #[error("cannot access {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("duplicate date {0}")]
    DuplicateDate(NaiveDate),
    #[error("non-positive price {value} on {date}")]
    NonPositivePrice { date: NaiveDate, value: f64 },
    #[error("series is not strictly date-sorted at {0}")]
    Unsorted(NaiveDate),
    #[error("misaligned inputs: {0}")]
    Misaligned(String),
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("no input: {0}")]
    NoInput(String),

    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{name} = {value} out of range [{lo:.2},{hi:.2}]")]
    OutOfRange {
        name: String,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },
    #[error("unknown quadrant `{0}`")]
    UnknownQuadrant(String),
    #[error("unknown event class `{0}`")]
    UnknownEventClass(String),

    #[error("insufficient data: need at least {needed}, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("design matrix is rank deficient")]
    RankDeficient,
    #[error("zero variance in {0}")]
    ZeroVariance(String),
    #[error("undefined statistic: {0}")]
    Undefined(String),
    #[error("log-domain undefined for score {0}")]
    LogDomain(f64),
    #[error("distribution has zero total mass")]
    ZeroMass,
    #[error("distribution is not normalized (sum = {0})")]
    Unnormalized(f64),
    #[error("histograms do not share a support")]
    SupportMismatch,
    #[error("zero vector has no direction")]
    ZeroVector,
}

impl Error {
    pub fn parse(context: impl Into<String>, message: impl std::fmt::Display) -> Self {
        Error::Parse {
            context: context.into(),
            message: message.to_string(),
        }
    }

    pub fn invalid(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.into(),
            reason: reason.into(),
        }
    }

    pub fn kind(&self) -> ErrorKind {
        use Error::*;
        match self {
            Config(_)
            | OutOfRange { .. }
            | InvalidParameter { .. }
            | UnknownQuadrant(_)
            | UnknownEventClass(_) => ErrorKind::Config,
            InsufficientData { .. }
            | RankDeficient
            | ZeroVariance(_)
            | Undefined(_)
            | LogDomain(_)
            | ZeroMass
            | Unnormalized(_)
            | SupportMismatch
            | ZeroVector => ErrorKind::Numeric,
            _ => ErrorKind::Input,
        }
    }
}
