//! Window geometry, lagged vectors and the lag-covariance matrix.
//!
//! Window cell `(r, c)` (row `r < m`, column `c < n`) holds vector component
//! `index_of(r, c) = c·m + r + 1`: the first window column carries
//! components `1..=m`, the second `m+1..=2m`, and so on. Every one of the
//! `L = M·N` anchors yields a lagged vector under periodic boundary, and
//! `C = XᵀX / L`.

use rustfft::num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

use crate::error::{Error, Result};
use crate::fft::{fft2_in_place, to_complex};
use crate::imagemodel::Image;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WindowGeometry {
    m: usize,
    n: usize,
}

impl WindowGeometry {
    pub fn new(m: usize, n: usize) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::EmptyWindow { m, n });
        }
        Ok(Self { m, n })
    }

    /// Window rows.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Window columns.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Filter length `K = m·n`.
    pub fn k(&self) -> usize {
        self.m * self.n
    }

    /// Number of lagged vectors for an `rows × cols` image (one per pixel).
    pub fn lagged_count(&self, rows: usize, cols: usize) -> usize {
        rows * cols
    }

    pub fn is_odd(&self) -> bool {
        self.m % 2 == 1 && self.n % 2 == 1
    }

    /// 1-based component index of window cell `(r, c)`.
    pub fn index_of(&self, r: usize, c: usize) -> usize {
        self.slot(r, c) + 1
    }

    /// 0-based position of window cell `(r, c)` in a K-vector.
    pub fn slot(&self, r: usize, c: usize) -> usize {
        debug_assert!(r < self.m && c < self.n);
        c * self.m + r
    }

    /// Window cell of a 0-based slot.
    pub fn cell(&self, slot: usize) -> (usize, usize) {
        (slot % self.m, slot / self.m)
    }

    /// 1-based index of the cell point-symmetric about the window center.
    pub fn point_reflect(&self, index: usize) -> usize {
        self.k() - index + 1
    }

    pub fn check_fits(&self, rows: usize, cols: usize) -> Result<()> {
        if self.m >= rows || self.n >= cols {
            return Err(Error::WindowDoesNotFit {
                m: self.m,
                n: self.n,
                rows,
                cols,
            });
        }
        Ok(())
    }
}

impl std::fmt::Display for WindowGeometry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}x{}", self.m, self.n)
    }
}

impl std::str::FromStr for WindowGeometry {
    type Err = Error;

    /// Parses `"MxN"`, e.g. `"11x11"`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("window must look like MxN, got {s:?}"));
        let (m, n) = s.split_once(['x', 'X']).ok_or_else(bad)?;
        let m = m.trim().parse().map_err(|_| bad())?;
        let n = n.trim().parse().map_err(|_| bad())?;
        Self::new(m, n)
    }
}

/// The symmetric `K × K` matrix `XᵀX / L`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct LagCovariance {
    geometry: WindowGeometry,
    entries: Vec<f64>,
}

impl LagCovariance {
    /// Wraps an explicit `K × K` row-major matrix.
    pub fn from_entries(geometry: WindowGeometry, entries: Vec<f64>) -> Result<Self> {
        let k = geometry.k();
        if entries.len() != k * k {
            return Err(Error::InvalidArgument(format!(
                "covariance for K={k} needs {} entries, got {}",
                k * k,
                entries.len()
            )));
        }
        Ok(Self { geometry, entries })
    }

    pub fn geometry(&self) -> WindowGeometry {
        self.geometry
    }

    pub fn k(&self) -> usize {
        self.geometry.k()
    }

    /// 0-based entry access.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.k() + j]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn entries_mut(&mut self) -> &mut [f64] {
        &mut self.entries
    }

    pub fn trace(&self) -> f64 {
        (0..self.k()).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// `max |C − Cᵀ| / ‖C‖_F` (0 for the zero matrix).
    pub fn symmetry_residual(&self) -> f64 {
        let k = self.k();
        let mut worst: f64 = 0.0;
        for i in 0..k {
            for j in (i + 1)..k {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        let norm = self.frobenius_norm();
        if norm == 0.0 {
            worst
        } else {
            worst / norm
        }
    }

    /// K lines of K comma-separated values at round-trip precision.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for row in self.entries.chunks(self.k()) {
            let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }
}

/// The lagged vector anchored at `(anchor_row, anchor_col)`; anchors wrap.
///
/// Slot `index_of(r, c) − 1` holds `pixel(anchor_row + r, anchor_col + c)`.
pub fn lagged_vector(
    image: &Image,
    geometry: WindowGeometry,
    anchor_row: isize,
    anchor_col: isize,
) -> Vec<f64> {
    let mut out = vec![0.0; geometry.k()];
    for c in 0..geometry.n() {
        for r in 0..geometry.m() {
            out[geometry.slot(r, c)] =
                image.pixel(anchor_row + r as isize, anchor_col + c as isize);
        }
    }
    out
}

/// The `L × K` trajectory matrix, anchors swept row-major.
pub fn trajectory_matrix(image: &Image, geometry: WindowGeometry) -> Vec<f64> {
    let k = geometry.k();
    let mut x = Vec::with_capacity(image.len() * k);
    for i in 0..image.rows() {
        for j in 0..image.cols() {
            x.extend(lagged_vector(image, geometry, i as isize, j as isize));
        }
    }
    x
}

/// Reference construction: materializes `X` and forms `XᵀX / L` directly.
pub fn build_lag_covariance_oracle(
    image: &Image,
    geometry: WindowGeometry,
) -> Result<LagCovariance> {
    geometry.check_fits(image.rows(), image.cols())?;
    let k = geometry.k();
    let x = trajectory_matrix(image, geometry);
    let mut acc = vec![0.0; k * k];
    for row in x.chunks_exact(k) {
        for i in 0..k {
            let xi = row[i];
            let acc_row = &mut acc[i * k..(i + 1) * k];
            for j in i..k {
                acc_row[j] += xi * row[j];
            }
        }
    }
    let l = geometry.lagged_count(image.rows(), image.cols()) as f64;
    for i in 0..k {
        for j in i..k {
            let v = acc[i * k + j] / l;
            acc[i * k + j] = v;
            acc[j * k + i] = v;
        }
    }
    LagCovariance::from_entries(geometry, acc)
}

/// Periodic autocorrelation `R(dr, dc) = (1/L) Σ a(i,j)·a(i+dr, j+dc)` via FFT.
pub fn periodic_autocorrelation(image: &Image) -> Vec<f64> {
    let (rows, cols) = (image.rows(), image.cols());
    let mut planner = FftPlanner::new();
    let mut spec = to_complex(image.data());
    fft2_in_place(&mut planner, &mut spec, rows, cols, FftDirection::Forward);
    for v in spec.iter_mut() {
        *v = Complex64::new(v.norm_sqr(), 0.0);
    }
    fft2_in_place(&mut planner, &mut spec, rows, cols, FftDirection::Inverse);
    let scale = 1.0 / ((rows * cols) as f64 * (rows * cols) as f64);
    spec.iter().map(|v| v.re * scale).collect()
}

/// Fast construction from the periodic autocorrelation.
///
/// `C[p][q]` depends only on the lag between cells `p` and `q`, so one
/// autocorrelation plus an `O(K²)` gather fills the matrix. `R(d)` and `R(−d)`
/// are averaged so the result is exactly symmetric and bisymmetric.
pub fn build_lag_covariance_fast(image: &Image, geometry: WindowGeometry) -> Result<LagCovariance> {
    geometry.check_fits(image.rows(), image.cols())?;
    let (rows, cols) = (image.rows() as isize, image.cols() as isize);
    let r = periodic_autocorrelation(image);
    let at = |dr: isize, dc: isize| r[(dr.rem_euclid(rows) * cols + dc.rem_euclid(cols)) as usize];
    let k = geometry.k();
    let mut entries = vec![0.0; k * k];
    for p in 0..k {
        let (r1, c1) = geometry.cell(p);
        for q in p..k {
            let (r2, c2) = geometry.cell(q);
            let dr = r2 as isize - r1 as isize;
            let dc = c2 as isize - c1 as isize;
            let v = 0.5 * (at(dr, dc) + at(-dr, -dc));
            entries[p * k + q] = v;
            entries[q * k + p] = v;
        }
    }
    LagCovariance::from_entries(geometry, entries)
}

/// `max_{i,j} |C[i][j] − C[K−i+1][K−j+1]| / (1 + |C[i][j]|)`.
pub fn bisymmetry_residual(c: &LagCovariance) -> f64 {
    let k = c.k();
    let mut worst: f64 = 0.0;
    for i in 0..k {
        for j in 0..k {
            let a = c.get(i, j);
            let b = c.get(k - 1 - i, k - 1 - j);
            worst = worst.max((a - b).abs() / (1.0 + a.abs()));
        }
    }
    worst
}

/// Largest disagreement between entries that share the same 2D lag modulo
/// `(rows, cols)`, measured like [`bisymmetry_residual`]. Bisymmetry is the
/// special case of reflected index pairs.
pub fn lag_consistency_residual(c: &LagCovariance, rows: usize, cols: usize) -> f64 {
    let g = c.geometry();
    let k = c.k();
    let mut reference: std::collections::HashMap<(usize, usize), f64> = Default::default();
    let mut worst: f64 = 0.0;
    for i in 0..k {
        let (ri, ci) = g.cell(i);
        for j in 0..k {
            let (rj, cj) = g.cell(j);
            let lag = (
                (rj as isize - ri as isize).rem_euclid(rows as isize) as usize,
                (cj as isize - ci as isize).rem_euclid(cols as isize) as usize,
            );
            let v = c.get(i, j);
            let first = *reference.entry(lag).or_insert(v);
            worst = worst.max((v - first).abs() / (1.0 + first.abs()));
        }
    }
    worst
}
