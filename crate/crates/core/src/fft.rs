//! Separable 2D FFT over row-major complex grids.

use rustfft::num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

/// Unnormalized in-place 2D transform. `Inverse` uses the `e^{+2πi…}` kernel.
pub(crate) fn fft2_in_place(
    planner: &mut FftPlanner<f64>,
    data: &mut [Complex64],
    rows: usize,
    cols: usize,
    direction: FftDirection,
) {
    debug_assert_eq!(data.len(), rows * cols);
    let row_fft = planner.plan_fft(cols, direction);
    row_fft.process(data);

    let col_fft = planner.plan_fft(rows, direction);
    let mut column = vec![Complex64::new(0.0, 0.0); rows];
    for c in 0..cols {
        for (r, slot) in column.iter_mut().enumerate() {
            *slot = data[r * cols + c];
        }
        col_fft.process(&mut column);
        for (r, v) in column.iter().enumerate() {
            data[r * cols + c] = *v;
        }
    }
}

pub(crate) fn to_complex(values: &[f64]) -> Vec<Complex64> {
    values.iter().map(|&v| Complex64::new(v, 0.0)).collect()
}
