//! Two-dimensional singular spectrum analysis viewed as an adaptive filter bank.
//!
//! An image is swept by an `m × n` window under periodic boundary conditions.
//! The eigenvectors of the resulting lag-covariance matrix are laid out on the
//! window as FIR filters. Each filter is applied twice (forward, then with its
//! point reflection), giving one component image per eigenvector; the mean of
//! all components reproduces the input exactly.
//!
//! Pipeline:
//!
//! ```text
//! Image ──lagcov──▶ LagCovariance ──eigen──▶ [EigenFilter; K]
//!   │                                              │
//!   └──────────────────filterbank──────────────────┴──▶ Decomposition
//!                                                        │
//!                    spectral (|V̂|² identities) ◀────────┤
//!                    analysis (Taylor rows, D(ℓ)) ◀──────┘
//! ```

pub mod analysis;
pub mod cli;
pub mod eigen;
mod error;
mod fft;
pub mod filterbank;
pub mod imagemodel;
pub mod lagcov;
pub mod spectral;

pub use analysis::{
    rms_distance_curve, spectrum_csv, spectrum_report, taylor_coefficients,
    taylor_coefficients_of_grid, taylor_report, DenoiseReport, SpectrumRow, TaylorCoefficients,
    TaylorReport, TaylorRow,
};
pub use eigen::{classify_symmetry, eigendecompose, EigenFilter, FilterGrid, SymmetryClass};
pub use error::{Error, Result};
pub use filterbank::{
    decompose, decompose_with, forward_filter, partial_sum, reverse_filter, Decomposition,
    FilterPath,
};
pub use imagemodel::{add_gaussian_noise, load_pgm, save_pgm, Image, NoiseSpec, PgmError};
pub use lagcov::{
    bisymmetry_residual, build_lag_covariance_fast, build_lag_covariance_oracle, lagged_vector,
    LagCovariance, WindowGeometry,
};
pub use spectral::{embed_filter, power_spectrum, verify_identities, SpectralReport};
