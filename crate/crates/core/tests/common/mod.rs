#![allow(dead_code)]

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ssa2d::{EigenFilter, Image, WindowGeometry};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_image(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Image {
    Image::from_fn(rows, cols, |_, _| rng.random_range(0.0..255.0))
}

/// Low-order polynomial plus a few low-frequency sinusoids, roughly 0..255.
pub fn smooth_image(rows: usize, cols: usize) -> Image {
    Image::from_fn(rows, cols, |i, j| {
        let y = i as f64 / rows as f64;
        let x = j as f64 / cols as f64;
        let poly = 60.0 + 80.0 * x + 40.0 * y - 30.0 * x * y + 25.0 * y * y;
        let waves = 20.0 * (2.0 * PI * x).sin() * (2.0 * PI * y).cos()
            + 12.0 * (2.0 * PI * (2.0 * x + y)).cos()
            + 8.0 * (2.0 * PI * 3.0 * y).sin();
        poly + waves
    })
}

/// Facade-like scene: sky gradient, a block with a lattice of windows, a
/// horizontal ledge and mild deterministic texture.
pub fn building_image(rows: usize, cols: usize) -> Image {
    let mut r = rng(0x5eed);
    Image::from_fn(rows, cols, |i, j| {
        let y = i as f64 / rows as f64;
        let x = j as f64 / cols as f64;
        let mut v = 200.0 - 60.0 * y;
        if x > 0.15 && x < 0.85 && y > 0.2 {
            v = 120.0 + 20.0 * x;
            let wi = (i as f64 / rows as f64 * 24.0).fract();
            let wj = (j as f64 / cols as f64 * 18.0).fract();
            if wi > 0.35 && wi < 0.8 && wj > 0.3 && wj < 0.75 {
                v = 50.0;
            }
            if (y - 0.55).abs() < 0.02 {
                v = 220.0;
            }
        }
        v + r.random_range(-4.0..4.0)
    })
}

/// Orthonormal basis of ℝᴷ from the QR factorization of a random matrix.
pub fn random_orthonormal_filters(
    rng: &mut ChaCha8Rng,
    geometry: WindowGeometry,
) -> Vec<EigenFilter> {
    let k = geometry.k();
    let a = DMatrix::from_fn(k, k, |_, _| rng.random_range(-1.0..1.0));
    let q = a.qr().q();
    (0..k)
        .map(|j| {
            let v: Vec<f64> = q.column(j).iter().copied().collect();
            EigenFilter::from_vector(j + 1, 0.0, v, geometry).unwrap()
        })
        .collect()
}

/// Random symmetric matrix that also commutes with the exchange matrix.
pub fn random_bisymmetric(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    let mut a = vec![0.0; k * k];
    for i in 0..k {
        for j in i..k {
            let x = rng.random_range(-1.0..1.0);
            a[i * k + j] = x;
            a[j * k + i] = x;
        }
    }
    let mut out = vec![0.0; k * k];
    for i in 0..k {
        for j in 0..k {
            out[i * k + j] = 0.5 * (a[i * k + j] + a[(k - 1 - i) * k + (k - 1 - j)]);
        }
    }
    out
}

pub fn rel_frobenius(a: &[f64], b: &[f64]) -> f64 {
    let diff: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    let norm: f64 = b.iter().map(|y| y * y).sum();
    if norm == 0.0 {
        diff.sqrt()
    } else {
        (diff / norm).sqrt()
    }
}

/// Smallest gap to a neighboring eigenvalue, per rank.
pub fn eigen_gaps(filters: &[EigenFilter]) -> Vec<f64> {
    let l: Vec<f64> = filters.iter().map(|f| f.lambda).collect();
    (0..l.len())
        .map(|i| {
            let below = if i > 0 {
                l[i - 1] - l[i]
            } else {
                f64::INFINITY
            };
            let above = if i + 1 < l.len() {
                l[i] - l[i + 1]
            } else {
                f64::INFINITY
            };
            below.min(above)
        })
        .collect()
}

/// Five leading 3×3 eigenvectors of a facade-photo decomposition,
/// four decimals, components in window index order.
pub const FACADE_VECTORS: [[f64; 9]; 5] = [
    [
        0.3327, 0.3338, 0.3326, 0.3336, 0.3348, 0.3336, 0.3326, 0.3338, 0.3327,
    ],
    [
        0.3747, -0.0197, -0.4168, 0.4307, 0.0000, -0.4307, 0.4168, 0.0197, -0.3747,
    ],
    [
        -0.4151, -0.4336, -0.3732, -0.0198, -0.0000, 0.0198, 0.3732, 0.4336, 0.4151,
    ],
    [
        -0.2671, 0.4223, -0.2390, -0.1967, 0.5558, -0.1967, -0.2390, 0.4223, -0.2671,
    ],
    [
        0.0899, 0.2913, 0.3057, -0.4716, -0.4272, -0.4716, 0.3057, 0.2913, 0.0899,
    ],
];

/// Frozen (f, f_x, f_y, f_xx, f_xy, f_yy) for the vectors above, mesh scale 1.
pub const FACADE_TAYLOR: [[f64; 6]; 5] = [
    [3.000, 0.000, 0.000, 0.999, -0.000, 0.999],
    [0.000, 0.123, 2.444, 0.000, 0.000, 0.000],
    [0.000, 2.444, -0.123, 0.000, 0.000, 0.000],
    [-0.005, 0.000, 0.000, -0.084, 0.056, -0.703],
    [0.004, 0.000, 0.000, 0.687, 0.432, -0.076],
];

pub fn unit(v: &[f64]) -> Vec<f64> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter().map(|x| x / n).collect()
}
