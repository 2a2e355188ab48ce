//! Multi-dimensional discrete Fourier transforms on the periodic grid.
//!
//! Normalization: the forward transform divides by `M = n^dim`, so the
//! coefficient at wavevector `k` is the Fourier-series coefficient of the
//! grid function (a constant `c` transforms to `c` at `k = 0` and zero
//! elsewhere). The inverse transform is the plain unnormalized adjoint, so
//! `inverse(forward(f)) = f` to rounding.

use crate::grid::GridSpec;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

thread_local! {
    static PLANS: RefCell<HashMap<(usize, bool), Arc<dyn Fft<f64>>>> =
        RefCell::new(HashMap::new());
}

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANS.with(|cell| {
        cell.borrow_mut()
            .entry((n, inverse))
            .or_insert_with(|| {
                let mut planner = FftPlanner::new();
                if inverse {
                    planner.plan_fft_inverse(n)
                } else {
                    planner.plan_fft_forward(n)
                }
            })
            .clone()
    })
}

/// In-place complex FFT along every axis of a row-major `n^dim` buffer.
fn transform_all_axes(grid: &GridSpec, buf: &mut [Complex64], inverse: bool) {
    let n = grid.points_per_axis();
    let dim = grid.dim();
    let m = grid.num_points();
    debug_assert_eq!(buf.len(), m);
    let fft = plan(n, inverse);
    let mut line = vec![Complex64::default(); n];
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
    for axis in 0..dim {
        // Row-major: stride of `axis` is n^(dim-1-axis).
        let stride = n.pow((dim - 1 - axis) as u32);
        let lines = m / n;
        for l in 0..lines {
            // Start offset of the l-th line along `axis`.
            let block = l / stride;
            let within = l % stride;
            let start = block * stride * n + within;
            for (i, slot) in line.iter_mut().enumerate() {
                *slot = buf[start + i * stride];
            }
            fft.process_with_scratch(&mut line, &mut scratch);
            for (i, v) in line.iter().enumerate() {
                buf[start + i * stride] = *v;
            }
        }
    }
}

/// Forward transform of one real component laid out row-major over the grid.
pub fn forward(grid: &GridSpec, phys: &[f64]) -> Vec<Complex64> {
    let m = grid.num_points();
    debug_assert_eq!(phys.len(), m);
    let mut buf: Vec<Complex64> = phys.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    transform_all_axes(grid, &mut buf, false);
    let scale = 1.0 / m as f64;
    for v in &mut buf {
        *v *= scale;
    }
    buf
}

/// Inverse transform back to a real component (imaginary part discarded;
/// it is rounding-level for Hermitian input).
pub fn inverse(grid: &GridSpec, spec: &[Complex64]) -> Vec<f64> {
    let mut buf = spec.to_vec();
    transform_all_axes(grid, &mut buf, true);
    buf.into_iter().map(|v| v.re).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_maps_to_zero_mode() {
        let g = GridSpec::new(2, 16).unwrap();
        let phys = vec![3.5; g.num_points()];
        let spec = forward(&g, &phys);
        assert!((spec[0].re - 3.5).abs() < 1e-13);
        assert!(spec.iter().skip(1).all(|c| c.norm() < 1e-13));
    }

    #[test]
    fn single_mode_coefficients() {
        // cos(x_1) = (e^{i x_1} + e^{-i x_1}) / 2 on the second axis.
        let g = GridSpec::new(2, 16).unwrap();
        let phys: Vec<f64> = (0..g.num_points())
            .map(|f| g.coords(f)[1].cos())
            .collect();
        let spec = forward(&g, &phys);
        for flat in 0..g.num_points() {
            let k = g.wavevector(flat);
            let expect = if k[0] == 0 && k[1].abs() == 1 { 0.5 } else { 0.0 };
            assert!(
                (spec[flat].re - expect).abs() < 1e-13 && spec[flat].im.abs() < 1e-13,
                "k = {k:?}"
            );
        }
    }

    #[test]
    fn round_trip_3d() {
        let g = GridSpec::new(3, 16).unwrap();
        let phys: Vec<f64> = (0..g.num_points())
            .map(|f| {
                let x = g.coords(f);
                (x[0].sin() + 2.0 * (x[1] * 2.0).cos()) * (x[2] + 1.0).sin()
            })
            .collect();
        let back = inverse(&g, &forward(&g, &phys));
        let err = phys
            .iter()
            .zip(&back)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        assert!(err < 1e-12, "round-trip error {err}");
    }
}
