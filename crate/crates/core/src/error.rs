//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by weight synthesis, array evaluation, and scenario runs.
#[derive(Debug, Error)]
pub enum DmError {
    /// An IQ path needs at least one step.
    #[error("empty weight sequence: an IQ path needs at least one step")]
    EmptyPath,

    /// Observation angle outside the supported [0, 180] degree range.
    #[error("angle {0} deg outside [0, 180]")]
    AngleOutOfRange(f64),

    /// A weight or delta-gain vector does not match the element count.
    #[error("length mismatch: expected {expected} values, got {got}")]
    ShapeMismatch { expected: usize, got: usize },

    /// A parameter violates its documented domain (odd rotation count,
    /// Beta shape <= 1, symbol index out of range, ...).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The requested target cannot be reached by the configured array.
    #[error("infeasible target: {0}")]
    Infeasible(String),

    /// Scenario configuration could not be parsed or validated.
    #[error("config error: {0}")]
    Config(String),

    /// An error raised while processing a specific epoch.
    #[error("epoch {epoch}: {source}")]
    Epoch {
        epoch: usize,
        #[source]
        source: Box<DmError>,
    },
}

impl DmError {
    /// Wrap an error with the epoch index it occurred in.
    pub fn at_epoch(self, epoch: usize) -> Self {
        DmError::Epoch {
            epoch,
            source: Box::new(self),
        }
    }

    /// True for configuration-stage errors (maps to CLI exit code 2).
    pub fn is_config(&self) -> bool {
        match self {
            DmError::Config(_) => true,
            DmError::Epoch { source, .. } => source.is_config(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, DmError>;
