//! Reproducible synthetic fields for calibration runs, checker suites and
//! tests. All generators are seeded (ChaCha8) and deterministic.

use crate::field::SpectralField;
use crate::grid::GridSpec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex64;

/// Random real band-limited field: white noise on the grid, band-limited to
/// `|k| <= kmax`, with a power-law spectral envelope `(1+|k|^2)^(-alpha/2)`,
/// then scaled so its `L^2` norm equals `amplitude` (zero field if the band
/// is empty).
pub fn random_field(
    grid: GridSpec,
    components: usize,
    seed: u64,
    amplitude: f64,
    kmax: f64,
    alpha: f64,
) -> SpectralField {
    shaped_field(grid, components, seed, amplitude, alpha, |ksq| {
        (ksq as f64).sqrt() <= kmax
    })
}

/// Random mean-zero band-limited field (`k = 0` removed).
pub fn random_mean_zero(
    grid: GridSpec,
    components: usize,
    seed: u64,
    amplitude: f64,
    kmax: f64,
    alpha: f64,
) -> SpectralField {
    shaped_field(grid, components, seed, amplitude, alpha, |ksq| {
        ksq > 0 && (ksq as f64).sqrt() <= kmax
    })
}

/// Random field spectrally supported in the dyadic annulus
/// `(3/4)·2^q <= |k| <= (8/3)·2^q`.
pub fn random_annulus(
    grid: GridSpec,
    components: usize,
    seed: u64,
    amplitude: f64,
    q: i32,
) -> SpectralField {
    let lo = 0.75 * (q as f64).exp2();
    let hi = 8.0 / 3.0 * (q as f64).exp2();
    shaped_field(grid, components, seed, amplitude, 0.0, |ksq| {
        let r = (ksq as f64).sqrt();
        lo <= r && r <= hi
    })
}

/// Random field restricted to modes with `lo <= |k| <= hi`.
pub fn random_shell(
    grid: GridSpec,
    components: usize,
    seed: u64,
    amplitude: f64,
    lo: f64,
    hi: f64,
) -> SpectralField {
    shaped_field(grid, components, seed, amplitude, 0.0, |ksq| {
        let r = (ksq as f64).sqrt();
        lo <= r && r <= hi
    })
}

fn shaped_field<F: Fn(u64) -> bool>(
    grid: GridSpec,
    components: usize,
    seed: u64,
    amplitude: f64,
    alpha: f64,
    keep: F,
) -> SpectralField {
    let m = grid.num_points();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let phys: Vec<f64> = (0..m * components)
        .map(|_| rng.gen_range(-1.0..1.0))
        .collect();
    let white = SpectralField::from_physical(grid, components, phys)
        .expect("generated data has the right shape");
    let shaped = white.apply_mode_multiplier(|k| {
        let ksq = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as u64;
        if keep(ksq) {
            (1.0 + ksq as f64).powf(-alpha / 2.0)
        } else {
            0.0
        }
    });
    let norm = shaped.l2_norm();
    if norm == 0.0 {
        shaped
    } else {
        shaped.scaled(amplitude / norm)
    }
}

/// A single real mode `amplitude · cos(k·x + phase)` on the grid.
pub fn single_mode(
    grid: GridSpec,
    k: [i64; 3],
    amplitude: f64,
    phase: f64,
) -> SpectralField {
    let m = grid.num_points();
    let mut spec = vec![Complex64::default(); m];
    for flat in 0..m {
        let kv = grid.wavevector(flat);
        if kv == k {
            spec[flat] += Complex64::from_polar(amplitude / 2.0, phase);
        }
        if kv == [-k[0], -k[1], -k[2]] {
            spec[flat] += Complex64::from_polar(amplitude / 2.0, -phase);
        }
    }
    SpectralField::from_spectral(grid, 1, spec).expect("shape is valid")
}
