use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension must be 1, 2 or 3 (got {0})")]
    InvalidDimension(usize),
    #[error("resolution must be a power of two >= 4 (got {0})")]
    InvalidResolution(usize),
    #[error("period must be positive and finite (got {0})")]
    NonPositivePeriod(f64),
    #[error("non-finite value encountered{}", context_suffix(.0))]
    NonFiniteValue(Option<String>),
    #[error("axis {axis} out of range for a {dims}-dimensional grid")]
    AxisOutOfRange { axis: usize, dims: usize },
    #[error("invalid exponent {0}: must be >= 1 or infinity")]
    InvalidExponent(f64),
    #[error("band {band} outside the partition range -1..={j_max}")]
    BandOutOfRange { band: i32, j_max: i32 },
    #[error("fields live on different grids")]
    MismatchedGrid,
    #[error("expected {expected} components, got {actual}")]
    MismatchedComponents { expected: usize, actual: usize },
    #[error("interpolation weight must lie in [0, 1] (got {0})")]
    InvalidAlpha(f64),
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("time step violates CFL limit (dt * max|u| * N / period = {0:.3e} >= 1)")]
    UnstableTimeStep(f64),
    #[error("step failed at t = {time}: {source}")]
    StepFailed {
        time: f64,
        #[source]
        source: Box<Error>,
    },
    #[error("regularity index must be positive (got {0})")]
    InvalidRegularity(f64),
    #[error("spectrum fit range [{lo}, {hi}] holds fewer than two nonzero shells")]
    EmptyFitRange { lo: usize, hi: usize },
    #[error("random generator kind requires a seed")]
    MissingSeed,
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("bad magic bytes in field file")]
    BadMagic,
    #[error("field payload truncated: expected {expected} bytes, found {found}")]
    TruncatedPayload { expected: usize, found: usize },
    #[error("field header mismatch: {0}")]
    HeaderMismatch(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o failure: {0}")]
    IoFailure(#[from] io::Error),
}

fn context_suffix(ctx: &Option<String>) -> String {
    match ctx {
        Some(c) => format!(" ({c})"),
        None => String::new(),
    }
}

impl Error {
    pub(crate) fn non_finite(ctx: impl Into<String>) -> Self {
        Error::NonFiniteValue(Some(ctx.into()))
    }

    pub(crate) fn at_time(self, time: f64) -> Self {
        match self {
            e @ Error::StepFailed { .. } => e,
            e => Error::StepFailed {
                time,
                source: Box::new(e),
            },
        }
    }
}
