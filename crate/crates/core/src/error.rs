use num_complex::Complex64;
use thiserror::Error;

use crate::rootfinder::{IterationTrace, Singularity};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("overflow: {0}")]
    Overflow(String),

    /// D_eps vanishes at the requested energy. Not a fault: the energy is a
    /// spectral singularity.
    #[error("D_eps vanishes at z = {z}")]
    Pole { z: Complex64 },

    #[error("fixed-point iteration did not converge in {} steps", trace.iterates.len().saturating_sub(1))]
    FixedPointNoConvergence { trace: Box<IterationTrace> },

    #[error("Newton iteration did not converge from seed {seed} ({reason})")]
    NewtonNoConvergence { seed: Complex64, reason: String },

    #[error("Newton derivative vanishes near z = {z}")]
    IllConditioned { z: Complex64 },

    #[error("no sign change of D_eps on the bracket [{lo:e}, {hi:e}]")]
    Bracket { lo: f64, hi: f64 },

    #[error("bracket [{lo:e}, {hi:e}] contains the vertical asymptote lambda_a = {asymptote:e}; bisect ({lo:e}, lambda_a) and (lambda_a, {hi:e}) separately")]
    SplitBracket { lo: f64, hi: f64, asymptote: f64 },

    /// The requested eigenvalue exists but -E is not representable in f64.
    #[error("eigenvalue out of f64 range: ln(-E) = {ln_lambda:.6}, ln(lambda_a) = {ln_lambda_a:.6}")]
    Range { ln_lambda: f64, ln_lambda_a: f64 },

    #[error("root cluster incomplete: found {} of 3 roots", found.len())]
    IncompleteCluster { found: Vec<Singularity> },

    /// Every ladder point but one was at the rounding floor, so no slope.
    #[error("residuals at the precision floor for eps = {excluded:?}")]
    PrecisionFloor { excluded: Vec<f64> },

    #[error("unsupported regime: {0}")]
    Unsupported(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidConfig(_) => 2,
            _ => 1,
        }
    }
}
