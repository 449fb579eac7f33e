use crate::imagemodel::PgmError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Pgm(#[from] PgmError),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("window {m}x{n} does not fit image {rows}x{cols} (need m < rows and n < cols)")]
    WindowDoesNotFit {
        m: usize,
        n: usize,
        rows: usize,
        cols: usize,
    },

    #[error("invalid window {m}x{n}: both dimensions must be positive")]
    EmptyWindow { m: usize, n: usize },

    #[error("filter length {found} does not match window length {expected}")]
    GeometryMismatch { expected: usize, found: usize },

    #[error("incomplete filter set: expected {expected} filters, got {found}")]
    IncompleteFilterSet { expected: usize, found: usize },

    #[error("matrix is not symmetric (relative residual {residual:e})")]
    NotSymmetric { residual: f64 },

    #[error("Jacobi eigensolver did not converge within {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("truncation rank {ell} out of range 1..={k}")]
    RankOutOfRange { ell: usize, k: usize },

    #[error("image dimensions differ: {left_rows}x{left_cols} vs {right_rows}x{right_cols}")]
    DimensionMismatch {
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },

    #[error("window {m}x{n} has an even dimension; no center cell")]
    EvenWindow { m: usize, n: usize },

    #[error("filter {m}x{n} larger than target grid {rows}x{cols}")]
    FilterTooLarge {
        m: usize,
        n: usize,
        rows: usize,
        cols: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Stable identifier used in the CLI's machine-readable error line.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Pgm(_) => "pgm",
            Error::Io(_) => "io",
            Error::WindowDoesNotFit { .. } => "window_does_not_fit",
            Error::EmptyWindow { .. } => "empty_window",
            Error::GeometryMismatch { .. } => "geometry_mismatch",
            Error::IncompleteFilterSet { .. } => "incomplete_filter_set",
            Error::NotSymmetric { .. } => "not_symmetric",
            Error::NoConvergence { .. } => "no_convergence",
            Error::RankOutOfRange { .. } => "rank_out_of_range",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::EvenWindow { .. } => "even_window",
            Error::FilterTooLarge { .. } => "filter_too_large",
            Error::InvalidArgument(_) => "invalid_argument",
        }
    }
}
