//! Two-step eigenfiltering and perfect reconstruction.
//!
//! The forward pass correlates the image with the filter grid anchored at the
//! reference pixel; the reverse pass applies the point-reflected grid, i.e.
//! the adjoint convolution. Composed, they multiply the spectrum by
//! `|V̂⁽ᵏ⁾|²`. For any orthonormal basis of `ℝᴷ` the mean of the `K`
//! component images is the input.

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

use crate::eigen::EigenFilter;
use crate::error::{Error, Result};
use crate::fft::{fft2_in_place, to_complex};
use crate::imagemodel::Image;
use crate::lagcov::WindowGeometry;
use crate::spectral::power_spectrum;

/// How the two-step filtering is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FilterPath {
    /// Direct periodic convolution, `O(K·MN)` per component.
    Spatial,
    /// Pointwise multiplication by `|V̂|²`, `O(MN log MN)` per component.
    Fft,
    /// Spatial for short filters, FFT otherwise.
    #[default]
    Auto,
}

impl FilterPath {
    fn resolve(self, k: usize, rows: usize, cols: usize) -> FilterPath {
        match self {
            FilterPath::Auto => {
                let log_mn = ((rows * cols) as f64).log2().max(1.0);
                if (k as f64) > 2.0 * log_mn {
                    FilterPath::Fft
                } else {
                    FilterPath::Spatial
                }
            }
            other => other,
        }
    }
}

fn check_filter(filter: &EigenFilter, geometry: WindowGeometry) -> Result<()> {
    let g = filter.geometry();
    if g.m() != geometry.m() || g.n() != geometry.n() {
        return Err(Error::GeometryMismatch {
            expected: geometry.k(),
            found: filter.k(),
        });
    }
    Ok(())
}

/// `out(i, j) += w · src(i + dr, j + dc)` with periodic wrap; shifts may be negative.
fn accumulate_shifted(out: &mut [f64], src: &Image, w: f64, dr: isize, dc: isize) {
    let (rows, cols) = (src.rows(), src.cols());
    let dc = dc.rem_euclid(cols as isize) as usize;
    let data = src.data();
    for i in 0..rows {
        let sr = (i as isize + dr).rem_euclid(rows as isize) as usize;
        let src_row = &data[sr * cols..(sr + 1) * cols];
        let out_row = &mut out[i * cols..(i + 1) * cols];
        let split = cols - dc;
        for (o, s) in out_row[..split].iter_mut().zip(&src_row[dc..]) {
            *o += w * s;
        }
        for (o, s) in out_row[split..].iter_mut().zip(&src_row[..dc]) {
            *o += w * s;
        }
    }
}

/// `b(i, j) = Σ_{r,c} F(r, c) · a(i + r, j + c)`.
pub fn forward_filter(
    image: &Image,
    filter: &EigenFilter,
    geometry: WindowGeometry,
) -> Result<Image> {
    check_filter(filter, geometry)?;
    let mut out = vec![0.0; image.len()];
    for r in 0..geometry.m() {
        for c in 0..geometry.n() {
            accumulate_shifted(
                &mut out,
                image,
                filter.grid.get(r, c),
                r as isize,
                c as isize,
            );
        }
    }
    Image::new(image.rows(), image.cols(), out)
}

/// `d(i, j) = Σ_{r,c} F(r, c) · b(i − r, j − c)`.
pub fn reverse_filter(b: &Image, filter: &EigenFilter, geometry: WindowGeometry) -> Result<Image> {
    check_filter(filter, geometry)?;
    let mut out = vec![0.0; b.len()];
    for r in 0..geometry.m() {
        for c in 0..geometry.n() {
            accumulate_shifted(
                &mut out,
                b,
                filter.grid.get(r, c),
                -(r as isize),
                -(c as isize),
            );
        }
    }
    Image::new(b.rows(), b.cols(), out)
}

/// Forward then reverse filtering in the spatial domain.
pub fn two_step_spatial(
    image: &Image,
    filter: &EigenFilter,
    geometry: WindowGeometry,
) -> Result<Image> {
    let b = forward_filter(image, filter, geometry)?;
    reverse_filter(&b, filter, geometry)
}

/// Spectrum of an image under the `e^{−2πi…}` kernel, shared across filters.
fn image_spectrum(image: &Image) -> Vec<Complex64> {
    let mut spec = to_complex(image.data());
    fft2_in_place(
        &mut FftPlanner::new(),
        &mut spec,
        image.rows(),
        image.cols(),
        FftDirection::Forward,
    );
    spec
}

fn two_step_from_spectrum(
    spectrum: &[Complex64],
    rows: usize,
    cols: usize,
    filter: &EigenFilter,
) -> Result<Image> {
    // |V̂|² is even in frequency for a real filter, so the kernel sign of
    // power_spectrum does not matter here.
    let power = power_spectrum(filter, rows, cols)?;
    let mut data: Vec<Complex64> = spectrum
        .iter()
        .zip(power.data())
        .map(|(s, p)| s * *p)
        .collect();
    fft2_in_place(
        &mut FftPlanner::new(),
        &mut data,
        rows,
        cols,
        FftDirection::Inverse,
    );
    let scale = 1.0 / (rows * cols) as f64;
    Image::new(rows, cols, data.iter().map(|v| v.re * scale).collect())
}

/// Forward then reverse filtering as multiplication by `|V̂|²`.
pub fn two_step_fft(
    image: &Image,
    filter: &EigenFilter,
    geometry: WindowGeometry,
) -> Result<Image> {
    check_filter(filter, geometry)?;
    two_step_from_spectrum(&image_spectrum(image), image.rows(), image.cols(), filter)
}

/// The `K` component images of one image.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub source: Image,
    pub geometry: WindowGeometry,
    pub filters: Vec<EigenFilter>,
    /// `d⁽ᵏ⁾`, ordered by filter rank.
    pub components: Vec<Image>,
}

impl Decomposition {
    pub fn k(&self) -> usize {
        self.geometry.k()
    }

    pub fn partial_sum(&self, ell: usize) -> Result<Image> {
        partial_sum(self, ell)
    }

    /// `(1/K)·Σₖ d⁽ᵏ⁾`.
    pub fn reconstruction(&self) -> Image {
        partial_sum(self, self.k()).expect("full rank is always in range")
    }

    /// Largest absolute pixel error of the full reconstruction.
    pub fn reconstruction_residual(&self) -> f64 {
        self.reconstruction().max_abs_diff(&self.source)
    }
}

/// Reference decomposition using spatial convolution.
pub fn decompose(
    image: &Image,
    filters: &[EigenFilter],
    geometry: WindowGeometry,
) -> Result<Decomposition> {
    decompose_with(image, filters, geometry, FilterPath::Spatial)
}

/// Decomposes `image` into `d⁽ᵏ⁾ = reverse(forward(image, Fₖ), Fₖ)`.
///
/// Requires exactly `K` filters; an incomplete set cannot reconstruct.
pub fn decompose_with(
    image: &Image,
    filters: &[EigenFilter],
    geometry: WindowGeometry,
    path: FilterPath,
) -> Result<Decomposition> {
    if filters.len() != geometry.k() {
        return Err(Error::IncompleteFilterSet {
            expected: geometry.k(),
            found: filters.len(),
        });
    }
    for f in filters {
        check_filter(f, geometry)?;
    }
    let components = match path.resolve(geometry.k(), image.rows(), image.cols()) {
        FilterPath::Fft => {
            let spectrum = image_spectrum(image);
            filters
                .par_iter()
                .map(|f| two_step_from_spectrum(&spectrum, image.rows(), image.cols(), f))
                .collect::<Result<Vec<_>>>()?
        }
        _ => filters
            .par_iter()
            .map(|f| two_step_spatial(image, f, geometry))
            .collect::<Result<Vec<_>>>()?,
    };
    Ok(Decomposition {
        source: image.clone(),
        geometry,
        filters: filters.to_vec(),
        components,
    })
}

/// `(1/K)·Σ_{k=1..ℓ} d⁽ᵏ⁾`, accumulated in rank order.
pub fn partial_sum(decomposition: &Decomposition, ell: usize) -> Result<Image> {
    let k = decomposition.k();
    if ell == 0 || ell > k {
        return Err(Error::RankOutOfRange { ell, k });
    }
    let src = &decomposition.source;
    let mut acc = vec![0.0; src.len()];
    for comp in &decomposition.components[..ell] {
        for (a, v) in acc.iter_mut().zip(comp.data()) {
            *a += v;
        }
    }
    let inv_k = 1.0 / k as f64;
    acc.iter_mut().for_each(|a| *a *= inv_k);
    Image::new(src.rows(), src.cols(), acc)
}
