//! Error types shared across the simulator and harness.

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong when building states, instances, schedules,
/// or harness artifacts.
///
/// Numerical routines themselves are total once their inputs validate; errors
/// are raised at construction and dispatch boundaries, not mid-iteration.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A register dimension below the smallest meaningful size.
    #[error("invalid dimension {dim}: register dimension must be at least 2")]
    InvalidDimension { dim: u32 },

    /// A hinted-set size outside 1..=dim.
    #[error("invalid hinted-set size {m}: must satisfy 1 <= M <= {dim}")]
    InvalidMarkedCount { m: u32, dim: u32 },

    /// A basis index outside the 1-based range of its register.
    #[error("basis index {index} out of range 1..={dim}")]
    IndexOutOfRange { index: u32, dim: u32 },

    /// Two objects that must share a dimension do not.
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: u32, right: u32 },

    /// A register selector applied to a state shape it does not address.
    #[error("selector {selector} is not valid for a {shape} state")]
    InvalidSelector {
        selector: &'static str,
        shape: &'static str,
    },

    /// Amplitude data that cannot form a unit state.
    #[error("invalid amplitudes: {reason}")]
    InvalidAmplitudes { reason: String },

    /// Instance construction from explicit parts that violate an invariant.
    #[error("invalid instance: {reason}")]
    InvalidInstance { reason: String },

    /// A run parameter that fails validation (e.g. zero sampling shots).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A size beyond the dense-statevector memory guard.
    #[error("infeasible size: {what} = {value} exceeds the supported limit {limit}")]
    InfeasibleSize {
        what: &'static str,
        value: u64,
        limit: u64,
    },

    /// A malformed sweep configuration.
    #[error("invalid sweep config: {0}")]
    Config(String),

    /// A malformed results CSV.
    #[error("csv parse error on line {line}: {reason}")]
    Csv { line: usize, reason: String },

    /// A scaling fit over too few or non-positive points.
    #[error("invalid fit input: {0}")]
    Fit(String),

    /// An underlying I/O failure (file read/write in the harness).
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
