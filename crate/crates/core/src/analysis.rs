//! Filter characterization and truncation-based denoising.
//!
//! A filter with taps `w(r, c)` applied at `(x, y)` samples
//! `f(x + Δx, y + Δy)`, where the x axis runs along window columns (left to
//! right) and the first window row sits at the largest `Δy`:
//!
//! ```text
//! Δx = (c − (n−1)/2)·s        Δy = ((m−1)/2 − r)·s
//! ```
//!
//! with mesh scale `s`. Expanding to second order gives
//! `f·Σw + f_x·Σw·Δx + f_y·Σw·Δy + f_xx·Σw·Δx²/2 + f_xy·Σw·ΔxΔy + f_yy·Σw·Δy²/2`;
//! the six sums are the reported coefficients. For the 3×3 window with
//! `s = 1`, component 1 sits at `(Δx, Δy) = (−1, +1)`.

use crate::eigen::{EigenFilter, FilterGrid, SymmetryClass};
use crate::error::{Error, Result};
use crate::filterbank::Decomposition;
use crate::imagemodel::Image;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TaylorCoefficients {
    pub f: f64,
    pub f_x: f64,
    pub f_y: f64,
    pub f_xx: f64,
    pub f_xy: f64,
    pub f_yy: f64,
}

impl TaylorCoefficients {
    pub fn as_array(&self) -> [f64; 6] {
        [self.f, self.f_x, self.f_y, self.f_xx, self.f_xy, self.f_yy]
    }

    /// Largest of `|f_x|, |f_y|`.
    pub fn odd_magnitude(&self) -> f64 {
        self.f_x.abs().max(self.f_y.abs())
    }

    /// Largest of `|f|, |f_xx|, |f_xy|, |f_yy|`.
    pub fn even_magnitude(&self) -> f64 {
        [self.f, self.f_xx, self.f_xy, self.f_yy]
            .iter()
            .fold(0.0, |m, v| m.max(v.abs()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaylorRow {
    pub rank: usize,
    pub symmetry: SymmetryClass,
    pub coefficients: TaylorCoefficients,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TaylorReport {
    pub mesh_scale: f64,
    pub rows: Vec<TaylorRow>,
}

impl TaylorReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,f,f_x,f_y,f_xx,f_xy,f_yy\n");
        for row in &self.rows {
            let c = row.coefficients.as_array().map(|v| v.to_string());
            out.push_str(&format!("{},{}\n", row.rank, c.join(",")));
        }
        out
    }
}

/// Second-order Taylor coefficients of a grid. Both window sides must be odd.
pub fn taylor_coefficients_of_grid(
    grid: &FilterGrid,
    mesh_scale: f64,
) -> Result<TaylorCoefficients> {
    let (m, n) = (grid.m(), grid.n());
    if m % 2 == 0 || n % 2 == 0 {
        return Err(Error::EvenWindow { m, n });
    }
    if !mesh_scale.is_finite() || mesh_scale <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "mesh scale must be positive, got {mesh_scale}"
        )));
    }
    let (half_m, half_n) = ((m / 2) as f64, (n / 2) as f64);
    let mut t = TaylorCoefficients::default();
    for r in 0..m {
        for c in 0..n {
            let w = grid.get(r, c);
            let dx = (c as f64 - half_n) * mesh_scale;
            let dy = (half_m - r as f64) * mesh_scale;
            t.f += w;
            t.f_x += w * dx;
            t.f_y += w * dy;
            t.f_xx += w * dx * dx / 2.0;
            t.f_xy += w * dx * dy;
            t.f_yy += w * dy * dy / 2.0;
        }
    }
    Ok(t)
}

pub fn taylor_coefficients(filter: &EigenFilter, mesh_scale: f64) -> Result<TaylorRow> {
    Ok(TaylorRow {
        rank: filter.rank,
        symmetry: filter.symmetry,
        coefficients: taylor_coefficients_of_grid(&filter.grid, mesh_scale)?,
    })
}

pub fn taylor_report(filters: &[EigenFilter], mesh_scale: f64) -> Result<TaylorReport> {
    let rows = filters
        .iter()
        .map(|f| taylor_coefficients(f, mesh_scale))
        .collect::<Result<_>>()?;
    Ok(TaylorReport { mesh_scale, rows })
}

/// RMS distance `D(ℓ)` of each prefix reconstruction from a reference.
#[derive(Debug, Clone, PartialEq)]
pub struct DenoiseReport {
    /// `curve[ℓ − 1] = D(ℓ)` for `ℓ = 1..=K`.
    pub curve: Vec<f64>,
    /// Smallest `ℓ` attaining the minimum.
    pub ell_star: usize,
    pub d_min: f64,
}

impl DenoiseReport {
    pub fn d(&self, ell: usize) -> f64 {
        self.curve[ell - 1]
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("ell,D\n");
        for (i, d) in self.curve.iter().enumerate() {
            out.push_str(&format!("{},{}\n", i + 1, d));
        }
        out.push_str(&format!(
            "# ell_star={},d_min={}\n",
            self.ell_star, self.d_min
        ));
        out
    }
}

/// `D(ℓ) = sqrt((1/MN)·Σ (a − (1/K)·Σ_{k≤ℓ} d⁽ᵏ⁾)²)` for every `ℓ`, in one
/// cumulative pass over the components.
pub fn rms_distance_curve(
    reference: &Image,
    decomposition: &Decomposition,
) -> Result<DenoiseReport> {
    reference.check_same_shape(&decomposition.source)?;
    let k = decomposition.k();
    if decomposition.components.len() != k {
        return Err(Error::IncompleteFilterSet {
            expected: k,
            found: decomposition.components.len(),
        });
    }
    let inv_k = 1.0 / k as f64;
    let mn = reference.len() as f64;
    let mut acc = vec![0.0; reference.len()];
    let mut curve = Vec::with_capacity(k);
    for comp in &decomposition.components {
        for (a, v) in acc.iter_mut().zip(comp.data()) {
            *a += v;
        }
        let ss: f64 = reference
            .data()
            .iter()
            .zip(&acc)
            .map(|(r, a)| {
                let e = r - a * inv_k;
                e * e
            })
            .sum();
        curve.push((ss / mn).sqrt());
    }
    let (mut ell_star, mut d_min) = (1, curve[0]);
    for (i, &d) in curve.iter().enumerate().skip(1) {
        if d < d_min {
            ell_star = i + 1;
            d_min = d;
        }
    }
    Ok(DenoiseReport {
        curve,
        ell_star,
        d_min,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumRow {
    pub rank: usize,
    pub lambda: f64,
    pub symmetry: SymmetryClass,
    pub score: f64,
}

pub fn spectrum_report(filters: &[EigenFilter]) -> Vec<SpectrumRow> {
    filters
        .iter()
        .map(|f| SpectrumRow {
            rank: f.rank,
            lambda: f.lambda,
            symmetry: f.symmetry,
            score: f.symmetry_score,
        })
        .collect()
}

pub fn spectrum_csv(rows: &[SpectrumRow]) -> String {
    let mut out = String::from("k,lambda,symmetry_class,symmetry_score\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.rank, r.lambda, r.symmetry, r.score
        ));
    }
    out
}
