//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by model construction, integration, and solving.
#[derive(Debug, Error)]
pub enum Error {
    /// A value violated a type or operation precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A control value fell outside the admissible interval.
    #[error("invalid control: {0}")]
    InvalidControl(String),

    /// The population fraction `n` dropped below the division guard.
    /// Positivity holds analytically, so this signals an integrator defect.
    #[error("singular population fraction n = {n:e} at t = {t}")]
    SingularPopulation { t: f64, n: f64 },

    /// The integrator produced a state outside its admissible region.
    #[error("integration failure: {0}")]
    IntegrationFailure(String),

    /// Configuration file or flag combination is unusable.
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
