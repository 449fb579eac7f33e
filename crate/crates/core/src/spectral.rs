//! Fourier-space view of the filter bank.
//!
//! A filter is zero-embedded in the top-left corner of an `M × N` grid and
//! transformed with the positive-exponent kernel
//! `V̂(α,β) = Σ exp[2πi(αi/M + βj/N)]·V(i,j)`. The two-step filtering acts
//! as multiplication by the real, nonnegative `|V̂|²`, so only the modulus
//! matters downstream and the exponent sign is a convention.

use rayon::prelude::*;
pub use rustfft::num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

use crate::eigen::EigenFilter;
use crate::error::{Error, Result};
use crate::fft::{fft2_in_place, to_complex};
use crate::imagemodel::Image;

/// Zero-embeds the filter grid into an `rows × cols` image.
pub fn embed_filter(filter: &EigenFilter, rows: usize, cols: usize) -> Result<Image> {
    let grid = &filter.grid;
    if grid.m() > rows || grid.n() > cols {
        return Err(Error::FilterTooLarge {
            m: grid.m(),
            n: grid.n(),
            rows,
            cols,
        });
    }
    let mut out = Image::zeros(rows, cols);
    for r in 0..grid.m() {
        for c in 0..grid.n() {
            out.set(r, c, grid.get(r, c));
        }
    }
    Ok(out)
}

/// Unnormalized positive-exponent 2D DFT, `O(MN log MN)`.
pub fn dft2(image: &Image) -> Vec<Complex64> {
    let mut data = to_complex(image.data());
    let mut planner = FftPlanner::new();
    fft2_in_place(
        &mut planner,
        &mut data,
        image.rows(),
        image.cols(),
        FftDirection::Inverse,
    );
    data
}

/// Direct `O((MN)²)` evaluation of the same transform as [`dft2`].
pub fn naive_dft2(image: &Image) -> Vec<Complex64> {
    let (rows, cols) = (image.rows(), image.cols());
    let mut out = vec![Complex64::new(0.0, 0.0); rows * cols];
    for alpha in 0..rows {
        for beta in 0..cols {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..rows {
                for j in 0..cols {
                    // Reduce the phase index exactly before converting to an angle.
                    let turns = ((alpha * i) % rows) as f64 / rows as f64
                        + ((beta * j) % cols) as f64 / cols as f64;
                    let angle = 2.0 * std::f64::consts::PI * turns;
                    acc += Complex64::from_polar(1.0, angle) * image.get(i, j);
                }
            }
            out[alpha * cols + beta] = acc;
        }
    }
    out
}

/// `|V̂(α,β)|²` of the zero-embedded filter.
pub fn power_spectrum(filter: &EigenFilter, rows: usize, cols: usize) -> Result<Image> {
    let embedded = embed_filter(filter, rows, cols)?;
    let spectrum = dft2(&embedded);
    Image::new(rows, cols, spectrum.iter().map(|v| v.norm_sqr()).collect())
}

#[derive(Debug, Clone)]
pub struct SpectralReport {
    /// Window length used as the completeness divisor.
    pub k: usize,
    /// `|V̂⁽ᵏ⁾|²` per filter, in input order.
    pub power: Vec<Image>,
    /// `|(1/MN)·Σ|V̂⁽ᵏ⁾|² − 1|` per filter.
    pub normalization_residuals: Vec<f64>,
    /// `max_{α,β} |(1/K)·Σₖ|V̂⁽ᵏ⁾|² − 1|`.
    pub completeness_residual: f64,
    /// Frequency `(α, β)` attaining `completeness_residual`.
    pub completeness_worst_at: (usize, usize),
}

impl SpectralReport {
    pub fn max_normalization_residual(&self) -> f64 {
        self.normalization_residuals
            .iter()
            .copied()
            .fold(0.0, f64::max)
    }
}

/// Evaluates the normalization and completeness identities.
///
/// The divisor `K` comes from the window geometry, not from `filters.len()`,
/// so an incomplete set shows up as a completeness violation.
pub fn verify_identities(
    filters: &[EigenFilter],
    rows: usize,
    cols: usize,
) -> Result<SpectralReport> {
    let first = filters
        .first()
        .ok_or_else(|| Error::InvalidArgument("no filters to verify".into()))?;
    let k = first.geometry().k();
    if let Some(bad) = filters.iter().find(|f| f.k() != k) {
        return Err(Error::GeometryMismatch {
            expected: k,
            found: bad.k(),
        });
    }
    let power: Vec<Image> = filters
        .par_iter()
        .map(|f| power_spectrum(f, rows, cols))
        .collect::<Result<_>>()?;

    let mn = (rows * cols) as f64;
    let normalization_residuals = power
        .iter()
        .map(|p| (p.data().iter().sum::<f64>() / mn - 1.0).abs())
        .collect();

    let mut total = vec![0.0; rows * cols];
    for p in &power {
        for (t, v) in total.iter_mut().zip(p.data()) {
            *t += v;
        }
    }
    let (mut completeness_residual, mut worst) = (0.0, 0);
    for (idx, t) in total.iter().enumerate() {
        let r = (t / k as f64 - 1.0).abs();
        if r > completeness_residual {
            completeness_residual = r;
            worst = idx;
        }
    }

    Ok(SpectralReport {
        k,
        power,
        normalization_residuals,
        completeness_residual,
        completeness_worst_at: (worst / cols, worst % cols),
    })
}
