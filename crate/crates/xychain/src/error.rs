use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error(
        "quadrature did not converge after {subdivisions} subdivisions: \
         achieved error {achieved:.3e}, requested {requested:.3e}"
    )]
    QuadratureNonConvergence {
        achieved: f64,
        requested: f64,
        subdivisions: usize,
    },

    #[error("matrix is not Hermitian: max |a_ij - conj(a_ji)| = {max_asymmetry:.3e}")]
    NotHermitian { max_asymmetry: f64 },

    #[error("not a density matrix: {reason}")]
    NotAState { reason: String },

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal sum {off_diagonal:.3e})")]
    EighNonConvergence { sweeps: usize, off_diagonal: f64 },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("measure value {value:.3e} is negative beyond the round-off clamp budget")]
    NegativeMeasure { value: f64 },

    #[error("measure value {value} escapes its admissible range")]
    MeasureOutOfRange { value: f64 },

    #[error("sweep failed at lambda = {lambda}: {source}")]
    SweepPoint {
        lambda: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("no interior extremum in the search window")]
    NoInteriorExtremum,
}

pub type Result<T> = std::result::Result<T, Error>;
