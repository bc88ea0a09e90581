use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid subsystem dimensions: {0}")]
    InvalidDims(String),

    #[error("dimension mismatch at site {site}: expected {expected}, got {got}")]
    SiteDimension {
        site: usize,
        expected: usize,
        got: usize,
    },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid bipartition (mask {mask:#b} over {n} subsystems): {reason}")]
    InvalidBipartition { mask: u64, n: usize, reason: &'static str },

    #[error("state is not normalized (norm deviation {0:e})")]
    NotNormalized(f64),

    #[error("operator is not Hermitian (max asymmetry {0:e})")]
    NotHermitian(f64),

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),

    #[error("invalid populations: {0}")]
    InvalidPopulations(String),

    #[error("marginal has {populations} populations but the local space holds only {dimension} levels")]
    SpectrumTooSmall { populations: usize, dimension: u64 },

    #[error("negative ergotropic quantity {0:e} beyond round-off")]
    NegativeGap(f64),

    #[error("empty gap set")]
    EmptyGapSet,

    #[error("parameter count mismatch: expected {expected}, got {got}")]
    ParameterCount { expected: usize, got: usize },

    #[error("optimizer did not converge after all restarts (best value {best_value:e} after {iterations} iterations)")]
    OptimizerNotConverged { best_value: f64, iterations: usize },

    #[error("every optimizer restart aborted on a non-finite objective value")]
    AllRestartsAborted,

    #[error("photon cutoff n_max = {n_max} insufficient: tail population {tail:e}")]
    CutoffInsufficient { n_max: usize, tail: f64 },

    #[error("iterative eigensolver did not converge (residual {residual:e})")]
    NotConverged { residual: f64 },

    #[error("discarded spectral mass {discarded:e} exceeds bound {bound:e}; lower the truncation threshold")]
    DiscardedMass { discarded: f64, bound: f64 },

    #[error("cannot rescale a constant series")]
    ConstantSeries,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable snake_case name of the variant, for machine-readable reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidDims(_) => "invalid_dims",
            Error::SiteDimension { .. } => "site_dimension",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::InvalidBipartition { .. } => "invalid_bipartition",
            Error::NotNormalized(_) => "not_normalized",
            Error::NotHermitian(_) => "not_hermitian",
            Error::Eigensolver(_) => "eigensolver",
            Error::InvalidPopulations(_) => "invalid_populations",
            Error::SpectrumTooSmall { .. } => "spectrum_too_small",
            Error::NegativeGap(_) => "negative_gap",
            Error::EmptyGapSet => "empty_gap_set",
            Error::ParameterCount { .. } => "parameter_count",
            Error::OptimizerNotConverged { .. } => "optimizer_not_converged",
            Error::AllRestartsAborted => "all_restarts_aborted",
            Error::CutoffInsufficient { .. } => "cutoff_insufficient",
            Error::NotConverged { .. } => "not_converged",
            Error::DiscardedMass { .. } => "discarded_mass",
            Error::ConstantSeries => "constant_series",
            Error::InvalidArgument(_) => "invalid_argument",
        }
    }

    /// Whether the error reflects bad input rather than a numerical failure.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidDims(_)
                | Error::SiteDimension { .. }
                | Error::DimensionMismatch { .. }
                | Error::InvalidBipartition { .. }
                | Error::ParameterCount { .. }
                | Error::InvalidArgument(_)
        )
    }
}
