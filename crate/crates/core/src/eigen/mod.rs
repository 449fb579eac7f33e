//! Eigenfilters of the lag-covariance matrix.
//!
//! A bisymmetric `C` commutes with the exchange operator `J` (index reversal
//! `i ↦ K − i + 1`), so each eigenvector of a simple eigenvalue satisfies
//! `Jv = ±v`. On the window this means the filter grid is centrosymmetric
//! (`+`) or skew-centrosymmetric (`−`).

pub mod jacobi;

use crate::error::{Error, Result};
use crate::lagcov::{LagCovariance, WindowGeometry};

/// Threshold on `|v·Jv|` for calling a vector (anti)symmetric.
pub const SYMMETRY_TOLERANCE: f64 = 1e-6;
/// Eigenvalues closer than this fraction of `trace(C)` count as degenerate.
pub const DEGENERACY_TOLERANCE: f64 = 1e-8;
/// Relative symmetry residual accepted on input to [`eigendecompose`].
pub const INPUT_SYMMETRY_TOLERANCE: f64 = 1e-10;
const SIGN_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SymmetryClass {
    Symmetric,
    Antisymmetric,
    Mixed,
}

impl SymmetryClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            SymmetryClass::Symmetric => "symmetric",
            SymmetryClass::Antisymmetric => "antisymmetric",
            SymmetryClass::Mixed => "mixed",
        }
    }
}

impl std::fmt::Display for SymmetryClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Filter taps laid out on the `m × n` window, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterGrid {
    m: usize,
    n: usize,
    taps: Vec<f64>,
}

impl FilterGrid {
    /// Places `vector[index_of(r, c) − 1]` at cell `(r, c)`.
    pub fn from_vector(geometry: WindowGeometry, vector: &[f64]) -> Result<Self> {
        if vector.len() != geometry.k() {
            return Err(Error::GeometryMismatch {
                expected: geometry.k(),
                found: vector.len(),
            });
        }
        let (m, n) = (geometry.m(), geometry.n());
        let mut taps = vec![0.0; m * n];
        for r in 0..m {
            for c in 0..n {
                taps[r * n + c] = vector[geometry.slot(r, c)];
            }
        }
        Ok(Self { m, n, taps })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.taps[r * self.n + c]
    }

    /// Row-major taps.
    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    /// `max |grid(r,c) − sign·grid(m−1−r, n−1−c)|`.
    pub fn reflection_residual(&self, sign: f64) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..self.m {
            for c in 0..self.n {
                let mirrored = self.get(self.m - 1 - r, self.n - 1 - c);
                worst = worst.max((self.get(r, c) - sign * mirrored).abs());
            }
        }
        worst
    }
}

/// One eigenpair of `C` viewed as a window filter.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenFilter {
    /// 1-based rank by descending eigenvalue.
    pub rank: usize,
    pub lambda: f64,
    pub vector: Vec<f64>,
    pub symmetry: SymmetryClass,
    /// `v·Jv / v·v`, in `[−1, 1]`.
    pub symmetry_score: f64,
    /// Set when another eigenvalue lies within `DEGENERACY_TOLERANCE·trace(C)`.
    pub degenerate: bool,
    pub grid: FilterGrid,
    geometry: WindowGeometry,
}

impl EigenFilter {
    /// Wraps an arbitrary vector as a filter. The vector is used as given;
    /// callers supplying eigenvectors are expected to pass unit vectors.
    pub fn from_vector(
        rank: usize,
        lambda: f64,
        vector: Vec<f64>,
        geometry: WindowGeometry,
    ) -> Result<Self> {
        let grid = FilterGrid::from_vector(geometry, &vector)?;
        let (symmetry, symmetry_score) = classify_symmetry(&vector);
        Ok(Self {
            rank,
            lambda,
            vector,
            symmetry,
            symmetry_score,
            degenerate: false,
            grid,
            geometry,
        })
    }

    pub fn geometry(&self) -> WindowGeometry {
        self.geometry
    }

    pub fn k(&self) -> usize {
        self.vector.len()
    }
}

/// Symmetry score `v·Jv / v·v` and its class.
///
/// For a unit vector the score is `Σ vᵢ·v_{K−i+1}`. The zero vector scores 0.
pub fn classify_symmetry(vector: &[f64]) -> (SymmetryClass, f64) {
    let norm_sq: f64 = vector.iter().map(|v| v * v).sum();
    if norm_sq == 0.0 {
        return (SymmetryClass::Mixed, 0.0);
    }
    let reflected: f64 = vector
        .iter()
        .zip(vector.iter().rev())
        .map(|(a, b)| a * b)
        .sum();
    let score = (reflected / norm_sq).clamp(-1.0, 1.0);
    let class = if score >= 1.0 - SYMMETRY_TOLERANCE {
        SymmetryClass::Symmetric
    } else if score <= -(1.0 - SYMMETRY_TOLERANCE) {
        SymmetryClass::Antisymmetric
    } else {
        SymmetryClass::Mixed
    };
    (class, score)
}

/// Deterministic sign: positive component sum, or if the sum vanishes, a
/// positive first non-negligible component. Idempotent.
pub fn apply_sign_convention(vector: &mut [f64]) {
    let sum: f64 = vector.iter().sum();
    let flip = if sum.abs() > SIGN_EPS {
        sum < 0.0
    } else {
        vector
            .iter()
            .find(|v| v.abs() > SIGN_EPS)
            .is_some_and(|&v| v < 0.0)
    };
    if flip {
        vector.iter_mut().for_each(|v| *v = -*v);
    }
}

/// All `K` eigenfilters of `C`, ordered by descending eigenvalue.
///
/// Equal eigenvalues keep the solver's column order.
pub fn eigendecompose(c: &LagCovariance) -> Result<Vec<EigenFilter>> {
    let residual = c.symmetry_residual();
    if residual > INPUT_SYMMETRY_TOLERANCE {
        return Err(Error::NotSymmetric { residual });
    }
    let k = c.k();
    let pairs = jacobi::symmetric_eigen(c.entries(), k)?;

    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| pairs.values[b].total_cmp(&pairs.values[a]));

    let gap = DEGENERACY_TOLERANCE * c.trace().abs();
    let sorted: Vec<f64> = order.iter().map(|&j| pairs.values[j]).collect();
    let mut filters = Vec::with_capacity(k);
    for (pos, &j) in order.iter().enumerate() {
        let mut vector = pairs.vectors[j].clone();
        apply_sign_convention(&mut vector);
        let mut filter = EigenFilter::from_vector(pos + 1, pairs.values[j], vector, c.geometry())?;
        let below = pos > 0 && (sorted[pos - 1] - sorted[pos]).abs() <= gap;
        let above = pos + 1 < k && (sorted[pos] - sorted[pos + 1]).abs() <= gap;
        filter.degenerate = below || above;
        filters.push(filter);
    }
    Ok(filters)
}
