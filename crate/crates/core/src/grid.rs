use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Uniform periodic grid on the torus `[0, 2π)^dim`.
///
/// The wavenumber lattice is the integer lattice with per-axis components in
/// `[-n/2, n/2)` under the usual FFT index folding (index `j` maps to `j` for
/// `j < n/2` and to `j - n` otherwise).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    dim: usize,
    n: usize,
}

impl GridSpec {
    /// `dim` must be 2 or 3; `n` a power of two, at least 16.
    pub fn new(dim: usize, n: usize) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::InvalidGrid(format!("dim must be 2 or 3, got {dim}")));
        }
        if n < 16 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "points_per_axis must be a power of two >= 16, got {n}"
            )));
        }
        Ok(GridSpec { dim, n })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points_per_axis(&self) -> usize {
        self.n
    }

    /// Total number of grid points, `n^dim`.
    pub fn num_points(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    /// Volume of the torus, `(2π)^dim`.
    pub fn volume(&self) -> f64 {
        (2.0 * PI).powi(self.dim as i32)
    }

    /// Grid spacing `2π / n`.
    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.n as f64
    }

    /// Per-axis index -> signed integer wavenumber.
    #[inline]
    pub fn wavenumber(&self, idx: usize) -> i64 {
        if idx < self.n / 2 {
            idx as i64
        } else {
            idx as i64 - self.n as i64
        }
    }

    /// Decompose a flat (row-major) index into per-axis indices.
    /// Unused trailing axes are zero for `dim = 2`.
    #[inline]
    pub fn indices(&self, flat: usize) -> [usize; 3] {
        let n = self.n;
        match self.dim {
            2 => [flat / n, flat % n, 0],
            _ => [flat / (n * n), (flat / n) % n, flat % n],
        }
    }

    /// Wavevector of a flat spectral index (trailing components zero in 2D).
    #[inline]
    pub fn wavevector(&self, flat: usize) -> [i64; 3] {
        let idx = self.indices(flat);
        let mut k = [0i64; 3];
        for a in 0..self.dim {
            k[a] = self.wavenumber(idx[a]);
        }
        k
    }

    /// Squared lattice magnitude `|k|^2` of a flat spectral index.
    #[inline]
    pub fn k_sq(&self, flat: usize) -> u64 {
        let k = self.wavevector(flat);
        (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as u64
    }

    /// Largest representable `|k|^2` on the lattice: `dim * (n/2)^2`.
    pub fn max_k_sq(&self) -> u64 {
        let h = (self.n / 2) as u64;
        self.dim as u64 * h * h
    }

    /// Physical coordinates of a flat index (trailing components zero in 2D).
    #[inline]
    pub fn coords(&self, flat: usize) -> [f64; 3] {
        let idx = self.indices(flat);
        let dx = self.spacing();
        let mut x = [0.0; 3];
        for a in 0..self.dim {
            x[a] = idx[a] as f64 * dx;
        }
        x
    }

    /// 2/3-rule dealiasing cutoff: modes with any `|k_a| > n/3` are dropped.
    pub fn dealias_cutoff(&self) -> i64 {
        (self.n / 3) as i64
    }

    /// True if the mode at `flat` survives the 2/3-rule mask.
    #[inline]
    pub fn in_dealias_band(&self, flat: usize) -> bool {
        let c = self.dealias_cutoff();
        let k = self.wavevector(flat);
        (0..self.dim).all(|a| k[a].abs() <= c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_grids() {
        assert!(GridSpec::new(1, 32).is_err());
        assert!(GridSpec::new(4, 32).is_err());
        assert!(GridSpec::new(2, 8).is_err());
        assert!(GridSpec::new(2, 24).is_err());
        assert!(GridSpec::new(2, 16).is_ok());
        assert!(GridSpec::new(3, 64).is_ok());
    }

    #[test]
    fn wavenumber_range_is_centered() {
        let g = GridSpec::new(2, 16).unwrap();
        let ks: Vec<i64> = (0..16).map(|i| g.wavenumber(i)).collect();
        assert_eq!(*ks.iter().min().unwrap(), -8);
        assert_eq!(*ks.iter().max().unwrap(), 7);
        assert_eq!(ks[0], 0);
    }

    #[test]
    fn flat_index_round_trip() {
        let g = GridSpec::new(3, 16).unwrap();
        for flat in [0usize, 1, 15, 16, 255, 256, 4095] {
            let [i, j, k] = g.indices(flat);
            assert_eq!((i * 16 + j) * 16 + k, flat);
        }
    }

    #[test]
    fn max_k_sq_matches_lattice() {
        let g = GridSpec::new(2, 16).unwrap();
        let max = (0..g.num_points()).map(|f| g.k_sq(f)).max().unwrap();
        assert_eq!(max, g.max_k_sq());
    }
}
