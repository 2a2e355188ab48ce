//! Real vector-valued fields on the periodic grid with their spectral
//! representation, exact spectral differentiation, `L^p` norms, and the
//! binary snapshot format.
//!
//! A field always carries both representations, kept consistent: linear
//! operations (sums, scalings) act on both arrays at once; pointwise
//! (physical-space) constructions and spectral multipliers each go through
//! one transform. Physical data is laid out row-major over the grid with the
//! component index innermost.
//!
//! Odd-order derivative multipliers (`gradient`, `divergence`, `curl`) zero
//! the Nyquist wavenumber `k = -n/2`: the factor `i·k` has no Hermitian
//! partner there, so keeping it would produce spurious imaginary output for
//! real fields. Band-limited fields (in particular anything below the
//! 2/3-rule cutoff) are differentiated exactly.
//!
//! In 2D the scalar-curl convention is used: `curl` of a 2-vector `v` is the
//! scalar `∂_1 v_2 - ∂_2 v_1`, and `curl` of a scalar `b` is the vector
//! `(∂_2 b, -∂_1 b)`.

use crate::error::{Error, Result};
use crate::fft;
use crate::grid::GridSpec;
use rustfft::num_complex::Complex64;
use std::io::{Read, Write};
use std::path::Path;

const MAGIC: &[u8; 4] = b"BPF1";

#[derive(Debug, Clone)]
pub struct SpectralField {
    grid: GridSpec,
    components: usize,
    /// Row-major over grid points, component-innermost: `phys[flat*C + c]`.
    phys: Vec<f64>,
    /// Same layout in spectral space: `spec[flat*C + c]`.
    spec: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: GridSpec, components: usize) -> Self {
        let m = grid.num_points();
        SpectralField {
            grid,
            components,
            phys: vec![0.0; m * components],
            spec: vec![Complex64::default(); m * components],
        }
    }

    /// Build from physical values (row-major, component-innermost).
    pub fn from_physical(grid: GridSpec, components: usize, phys: Vec<f64>) -> Result<Self> {
        let m = grid.num_points();
        if components == 0 || phys.len() != m * components {
            return Err(Error::ShapeMismatch(format!(
                "expected {} = {}x{} physical values, got {}",
                m * components,
                m,
                components,
                phys.len()
            )));
        }
        let mut spec = vec![Complex64::default(); m * components];
        let mut scratch = vec![0.0; m];
        for c in 0..components {
            for flat in 0..m {
                scratch[flat] = phys[flat * components + c];
            }
            let s = fft::forward(&grid, &scratch);
            for flat in 0..m {
                spec[flat * components + c] = s[flat];
            }
        }
        Ok(SpectralField {
            grid,
            components,
            phys,
            spec,
        })
    }

    /// Build from spectral coefficients. The coefficients are stored as given
    /// (exact zeros stay exact zeros); the physical values are their inverse
    /// transform with the imaginary part discarded.
    pub fn from_spectral(grid: GridSpec, components: usize, spec: Vec<Complex64>) -> Result<Self> {
        let m = grid.num_points();
        if components == 0 || spec.len() != m * components {
            return Err(Error::ShapeMismatch(format!(
                "expected {} spectral values, got {}",
                m * components,
                spec.len()
            )));
        }
        let mut phys = vec![0.0; m * components];
        let mut scratch = vec![Complex64::default(); m];
        for c in 0..components {
            for flat in 0..m {
                scratch[flat] = spec[flat * components + c];
            }
            let p = fft::inverse(&grid, &scratch);
            for flat in 0..m {
                phys[flat * components + c] = p[flat];
            }
        }
        Ok(SpectralField {
            grid,
            components,
            phys,
            spec,
        })
    }

    /// Evaluate `f(x, component)` on the grid (test and setup helper).
    pub fn from_fn<F: Fn(&[f64; 3], usize) -> f64>(
        grid: GridSpec,
        components: usize,
        f: F,
    ) -> Result<Self> {
        let m = grid.num_points();
        let mut phys = vec![0.0; m * components];
        for flat in 0..m {
            let x = grid.coords(flat);
            for c in 0..components {
                phys[flat * components + c] = f(&x, c);
            }
        }
        SpectralField::from_physical(grid, components, phys)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn physical(&self) -> &[f64] {
        &self.phys
    }

    pub fn spectral(&self) -> &[Complex64] {
        &self.spec
    }

    #[inline]
    pub fn value(&self, flat: usize, c: usize) -> f64 {
        self.phys[flat * self.components + c]
    }

    #[inline]
    pub fn coeff(&self, flat: usize, c: usize) -> Complex64 {
        self.spec[flat * self.components + c]
    }

    /// Mean of one component (the `k = 0` Fourier coefficient).
    pub fn mean(&self, c: usize) -> f64 {
        self.spec[c].re
    }

    /// Extract a single component as a scalar field.
    pub fn component(&self, c: usize) -> SpectralField {
        let m = self.grid.num_points();
        let mut phys = vec![0.0; m];
        let mut spec = vec![Complex64::default(); m];
        for flat in 0..m {
            phys[flat] = self.phys[flat * self.components + c];
            spec[flat] = self.spec[flat * self.components + c];
        }
        SpectralField {
            grid: self.grid,
            components: 1,
            phys,
            spec,
        }
    }

    /// Stack fields (on one grid) into a single multi-component field.
    pub fn stack(parts: &[&SpectralField]) -> Result<SpectralField> {
        let grid = *parts
            .first()
            .ok_or_else(|| Error::ShapeMismatch("stack of zero fields".into()))?
            .grid();
        if parts.iter().any(|p| *p.grid() != grid) {
            return Err(Error::ShapeMismatch("stack across different grids".into()));
        }
        let m = grid.num_points();
        let total: usize = parts.iter().map(|p| p.components).sum();
        let mut phys = vec![0.0; m * total];
        let mut spec = vec![Complex64::default(); m * total];
        for flat in 0..m {
            let mut off = 0;
            for p in parts {
                for c in 0..p.components {
                    phys[flat * total + off] = p.phys[flat * p.components + c];
                    spec[flat * total + off] = p.spec[flat * p.components + c];
                    off += 1;
                }
            }
        }
        Ok(SpectralField {
            grid,
            components: total,
            phys,
            spec,
        })
    }

    // ---- linear algebra (acts on both representations) ----

    pub fn scaled(&self, c: f64) -> SpectralField {
        let mut out = self.clone();
        for v in &mut out.phys {
            *v *= c;
        }
        for v in &mut out.spec {
            *v *= c;
        }
        out
    }

    pub fn add_scaled(&self, c: f64, other: &SpectralField) -> Result<SpectralField> {
        if self.grid != other.grid || self.components != other.components {
            return Err(Error::ShapeMismatch("add_scaled shape mismatch".into()));
        }
        let mut out = self.clone();
        for (v, o) in out.phys.iter_mut().zip(&other.phys) {
            *v += c * o;
        }
        for (v, o) in out.spec.iter_mut().zip(&other.spec) {
            *v += c * o;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &SpectralField) -> Result<SpectralField> {
        self.add_scaled(-1.0, other)
    }

    /// Pointwise product with a scalar field (applied to every component).
    pub fn pointwise_mul(&self, scalar: &SpectralField) -> Result<SpectralField> {
        if scalar.components != 1 || scalar.grid != self.grid {
            return Err(Error::ShapeMismatch(
                "pointwise_mul expects a scalar field on the same grid".into(),
            ));
        }
        let m = self.grid.num_points();
        let mut phys = self.phys.clone();
        for flat in 0..m {
            let s = scalar.phys[flat];
            for c in 0..self.components {
                phys[flat * self.components + c] *= s;
            }
        }
        SpectralField::from_physical(self.grid, self.components, phys)
    }

    /// Apply a scalar function to every physical value.
    pub fn map_values<F: Fn(f64) -> f64>(&self, f: F) -> Result<SpectralField> {
        let phys: Vec<f64> = self.phys.iter().map(|v| f(*v)).collect();
        SpectralField::from_physical(self.grid, self.components, phys)
    }

    // ---- spectral operators ----

    /// Apply a real mode multiplier `k -> m(k)` to every component.
    pub fn apply_mode_multiplier<F: Fn(&[i64; 3]) -> f64>(&self, mult: F) -> SpectralField {
        let m = self.grid.num_points();
        let mut spec = self.spec.clone();
        for flat in 0..m {
            let k = self.grid.wavevector(flat);
            let w = mult(&k);
            for c in 0..self.components {
                spec[flat * self.components + c] *= w;
            }
        }
        SpectralField::from_spectral(self.grid, self.components, spec)
            .expect("shape preserved by multiplier")
    }

    /// 2/3-rule mask: zero every mode with any `|k_a| > n/3`.
    pub fn dealiased(&self) -> SpectralField {
        let m = self.grid.num_points();
        let mut spec = self.spec.clone();
        for flat in 0..m {
            if !self.grid.in_dealias_band(flat) {
                for c in 0..self.components {
                    spec[flat * self.components + c] = Complex64::default();
                }
            }
        }
        SpectralField::from_spectral(self.grid, self.components, spec)
            .expect("shape preserved by mask")
    }

    /// Derivative factor `i·k_axis` with the Nyquist row zeroed.
    fn deriv_factor(&self, k: &[i64; 3], axis: usize) -> Complex64 {
        let n2 = (self.grid.points_per_axis() / 2) as i64;
        if k[axis] == -n2 {
            Complex64::default()
        } else {
            Complex64::new(0.0, k[axis] as f64)
        }
    }

    /// Spectral derivative `∂_axis` of one component, as raw coefficients.
    fn derivative_spec(&self, c: usize, axis: usize) -> Vec<Complex64> {
        let m = self.grid.num_points();
        let mut out = vec![Complex64::default(); m];
        for flat in 0..m {
            let k = self.grid.wavevector(flat);
            out[flat] = self.spec[flat * self.components + c] * self.deriv_factor(&k, axis);
        }
        out
    }

    /// Gradient of a scalar field: component `j` is `F^{-1}(i k_j F f)`.
    pub fn gradient(&self) -> Result<SpectralField> {
        if self.components != 1 {
            return Err(Error::ShapeMismatch(format!(
                "gradient expects a scalar field, got {} components",
                self.components
            )));
        }
        let dim = self.grid.dim();
        let m = self.grid.num_points();
        let mut spec = vec![Complex64::default(); m * dim];
        for axis in 0..dim {
            let d = self.derivative_spec(0, axis);
            for flat in 0..m {
                spec[flat * dim + axis] = d[flat];
            }
        }
        SpectralField::from_spectral(self.grid, dim, spec)
    }

    /// Gradient of every component: output components ordered
    /// `(∂_1 f_1, …, ∂_d f_1, ∂_1 f_2, …)`.
    pub fn jacobian(&self) -> Result<SpectralField> {
        let dim = self.grid.dim();
        let m = self.grid.num_points();
        let total = dim * self.components;
        let mut spec = vec![Complex64::default(); m * total];
        for c in 0..self.components {
            for axis in 0..dim {
                let d = self.derivative_spec(c, axis);
                for flat in 0..m {
                    spec[flat * total + c * dim + axis] = d[flat];
                }
            }
        }
        SpectralField::from_spectral(self.grid, total, spec)
    }

    /// Divergence of a `dim`-component vector field.
    pub fn divergence(&self) -> Result<SpectralField> {
        let dim = self.grid.dim();
        if self.components != dim {
            return Err(Error::ShapeMismatch(format!(
                "divergence expects {} components, got {}",
                dim, self.components
            )));
        }
        let m = self.grid.num_points();
        let mut spec = vec![Complex64::default(); m];
        for flat in 0..m {
            let k = self.grid.wavevector(flat);
            let mut acc = Complex64::default();
            for axis in 0..dim {
                acc += self.spec[flat * dim + axis] * self.deriv_factor(&k, axis);
            }
            spec[flat] = acc;
        }
        SpectralField::from_spectral(self.grid, 1, spec)
    }

    /// Curl. In 3D: 3-vector -> 3-vector. In 2D, vector -> scalar
    /// (`∂_1 v_2 - ∂_2 v_1`) and scalar -> vector (`(∂_2 b, -∂_1 b)`),
    /// dispatched on the component count.
    pub fn curl(&self) -> Result<SpectralField> {
        let m = self.grid.num_points();
        match (self.grid.dim(), self.components) {
            (3, 3) => {
                let mut spec = vec![Complex64::default(); m * 3];
                for flat in 0..m {
                    let k = self.grid.wavevector(flat);
                    let d = [
                        self.deriv_factor(&k, 0),
                        self.deriv_factor(&k, 1),
                        self.deriv_factor(&k, 2),
                    ];
                    let v = [
                        self.spec[flat * 3],
                        self.spec[flat * 3 + 1],
                        self.spec[flat * 3 + 2],
                    ];
                    spec[flat * 3] = d[1] * v[2] - d[2] * v[1];
                    spec[flat * 3 + 1] = d[2] * v[0] - d[0] * v[2];
                    spec[flat * 3 + 2] = d[0] * v[1] - d[1] * v[0];
                }
                SpectralField::from_spectral(self.grid, 3, spec)
            }
            (2, 2) => {
                let mut spec = vec![Complex64::default(); m];
                for flat in 0..m {
                    let k = self.grid.wavevector(flat);
                    spec[flat] = self.deriv_factor(&k, 0) * self.spec[flat * 2 + 1]
                        - self.deriv_factor(&k, 1) * self.spec[flat * 2];
                }
                SpectralField::from_spectral(self.grid, 1, spec)
            }
            (2, 1) => {
                let mut spec = vec![Complex64::default(); m * 2];
                for flat in 0..m {
                    let k = self.grid.wavevector(flat);
                    spec[flat * 2] = self.deriv_factor(&k, 1) * self.spec[flat];
                    spec[flat * 2 + 1] = -(self.deriv_factor(&k, 0) * self.spec[flat]);
                }
                SpectralField::from_spectral(self.grid, 2, spec)
            }
            (d, c) => Err(Error::ShapeMismatch(format!(
                "curl undefined for dim {d} with {c} components"
            ))),
        }
    }

    // ---- norms ----

    /// Pointwise Euclidean magnitude over components.
    #[inline]
    pub fn magnitude(&self, flat: usize) -> f64 {
        let base = flat * self.components;
        let mut s = 0.0;
        for c in 0..self.components {
            let v = self.phys[base + c];
            s += v * v;
        }
        s.sqrt()
    }

    /// Discrete `L^p` norm, `p in [1, ∞]`: uniform Riemann sum of the
    /// pointwise magnitude for finite `p`, grid max for `p = ∞`.
    /// Summation runs in flat-index order (determinism).
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        if !(p >= 1.0) {
            return Err(Error::InvalidNorm(format!("p must be >= 1, got {p}")));
        }
        let m = self.grid.num_points();
        if p.is_infinite() {
            let mut best = 0.0f64;
            for flat in 0..m {
                best = best.max(self.magnitude(flat));
            }
            return Ok(best);
        }
        let w = self.grid.volume() / m as f64;
        let mut acc = 0.0f64;
        if p == 2.0 {
            for flat in 0..m {
                let base = flat * self.components;
                for c in 0..self.components {
                    let v = self.phys[base + c];
                    acc += v * v;
                }
            }
            Ok((w * acc).sqrt())
        } else {
            for flat in 0..m {
                acc += self.magnitude(flat).powf(p);
            }
            Ok((w * acc).powf(1.0 / p))
        }
    }

    pub fn l2_norm(&self) -> f64 {
        self.lp_norm(2.0).expect("p = 2 is valid")
    }

    /// Largest relative deviation from Hermitian symmetry
    /// `F(-k) = conj(F(k))` (diagnostic; rounding-level for real fields).
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.grid.points_per_axis();
        let dim = self.grid.dim();
        let m = self.grid.num_points();
        let scale = self
            .spec
            .iter()
            .map(|c| c.norm())
            .fold(0.0f64, f64::max)
            .max(f64::MIN_POSITIVE);
        let mut worst = 0.0f64;
        for flat in 0..m {
            let idx = self.grid.indices(flat);
            let mut conj_idx = [0usize; 3];
            for a in 0..dim {
                conj_idx[a] = (n - idx[a]) % n;
            }
            let conj_flat = match dim {
                2 => conj_idx[0] * n + conj_idx[1],
                _ => (conj_idx[0] * n + conj_idx[1]) * n + conj_idx[2],
            };
            for c in 0..self.components {
                let a = self.spec[flat * self.components + c];
                let b = self.spec[conj_flat * self.components + c];
                worst = worst.max((a - b.conj()).norm() / scale);
            }
        }
        worst
    }

    // ---- binary snapshot format ----

    /// Write the field record: magic `BPF1`, then `dim`, `points_per_axis`,
    /// `components` as little-endian u32, then the physical values as
    /// little-endian f64 (row-major, component-innermost). Bit-exact.
    pub fn write_record<W: Write>(&self, w: &mut W) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&(self.grid.dim() as u32).to_le_bytes())?;
        w.write_all(&(self.grid.points_per_axis() as u32).to_le_bytes())?;
        w.write_all(&(self.components as u32).to_le_bytes())?;
        for v in &self.phys {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    /// Read one field record (see [`SpectralField::write_record`]).
    pub fn read_record<R: Read>(r: &mut R) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::Format(format!(
                "bad magic {:?}, expected {:?}",
                magic, MAGIC
            )));
        }
        let mut u = [0u8; 4];
        r.read_exact(&mut u)?;
        let dim = u32::from_le_bytes(u) as usize;
        r.read_exact(&mut u)?;
        let n = u32::from_le_bytes(u) as usize;
        r.read_exact(&mut u)?;
        let components = u32::from_le_bytes(u) as usize;
        let grid = GridSpec::new(dim, n)?;
        let count = grid.num_points() * components;
        let mut phys = vec![0.0f64; count];
        let mut b = [0u8; 8];
        for v in &mut phys {
            r.read_exact(&mut b)?;
            *v = f64::from_le_bytes(b);
        }
        SpectralField::from_physical(grid, components, phys)
    }

    pub fn write_to_path<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_record(&mut f)
    }

    pub fn read_from_path<P: AsRef<Path>>(path: P) -> Result<Self> {
        let mut f = std::io::BufReader::new(std::fs::File::open(path)?);
        SpectralField::read_record(&mut f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn grid2() -> GridSpec {
        GridSpec::new(2, 32).unwrap()
    }

    fn max_abs_diff(a: &SpectralField, b: &SpectralField) -> f64 {
        a.physical()
            .iter()
            .zip(b.physical())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0f64, f64::max)
    }

    /// Band-limited random scalar, |k| <= kmax, reproducible.
    pub(crate) fn random_band_limited(grid: GridSpec, kmax: f64, seed: u64) -> SpectralField {
        crate::synth::random_field(grid, 1, seed, 1.0, kmax, 1.0)
    }

    #[test]
    fn gradient_of_sin_is_cos() {
        let g = grid2();
        let f = SpectralField::from_fn(g, 1, |x, _| x[0].sin()).unwrap();
        let grad = f.gradient().unwrap();
        for flat in 0..g.num_points() {
            let x = g.coords(flat);
            assert_abs_diff_eq!(grad.value(flat, 0), x[0].cos(), epsilon = 1e-12);
            assert_abs_diff_eq!(grad.value(flat, 1), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn gradient_of_constant_is_zero() {
        let g = grid2();
        let f = SpectralField::from_fn(g, 1, |_, _| 4.25).unwrap();
        let grad = f.gradient().unwrap();
        assert!(grad.physical().iter().all(|v| v.abs() < 1e-13));
    }

    #[test]
    fn gradient_rejects_vector_input() {
        let g = grid2();
        let v = SpectralField::zeros(g, 2);
        assert!(v.gradient().is_err());
    }

    #[test]
    fn gradient_matches_finite_differences_at_order_two() {
        // Fix one band-limited profile; refine the grid; centered differences
        // of the analytic samples converge at O(h^2) to the spectral gradient.
        let modes: [([i64; 2], f64, f64); 3] =
            [([1, 2], 0.7, 0.3), ([3, -1], -0.4, 1.1), ([2, 2], 0.2, -0.9)];
        let eval = |x: f64, y: f64| -> f64 {
            modes
                .iter()
                .map(|(k, a, ph)| a * (k[0] as f64 * x + k[1] as f64 * y + ph).sin())
                .sum()
        };
        let eval_dx = |x: f64, y: f64| -> f64 {
            modes
                .iter()
                .map(|(k, a, ph)| a * k[0] as f64 * (k[0] as f64 * x + k[1] as f64 * y + ph).cos())
                .sum()
        };
        let mut errs = Vec::new();
        for n in [16usize, 32, 64] {
            let g = GridSpec::new(2, n).unwrap();
            let h = g.spacing();
            // max over grid of |centered difference - spectral gradient|
            let f = SpectralField::from_fn(g, 1, |x, _| eval(x[0], x[1])).unwrap();
            let grad = f.gradient().unwrap();
            let mut worst = 0.0f64;
            for flat in 0..g.num_points() {
                let x = g.coords(flat);
                let fd = (eval(x[0] + h, x[1]) - eval(x[0] - h, x[1])) / (2.0 * h);
                worst = worst.max((fd - grad.value(flat, 0)).abs());
                // spectral gradient itself is exact:
                assert_abs_diff_eq!(grad.value(flat, 0), eval_dx(x[0], x[1]), epsilon = 1e-11);
            }
            errs.push(worst);
        }
        let order1 = (errs[0] / errs[1]).log2();
        let order2 = (errs[1] / errs[2]).log2();
        assert!((order1 - 2.0).abs() < 0.1, "order {order1}");
        assert!((order2 - 2.0).abs() < 0.1, "order {order2}");
    }

    #[test]
    fn divergence_of_gradient_is_laplacian() {
        let g = grid2();
        let f = SpectralField::from_fn(g, 1, |x, _| x[0].sin()).unwrap();
        let lap = f.gradient().unwrap().divergence().unwrap();
        for flat in 0..g.num_points() {
            let x = g.coords(flat);
            assert_abs_diff_eq!(lap.value(flat, 0), -x[0].sin(), epsilon = 1e-12);
        }
    }

    #[test]
    fn divergence_of_rotated_stream_function_vanishes() {
        let g = grid2();
        let psi = random_band_limited(g, 8.0, 42);
        // v = (-∂_2 ψ, ∂_1 ψ)
        let gp = psi.gradient().unwrap();
        let m = g.num_points();
        let mut spec = vec![Complex64::default(); m * 2];
        for flat in 0..m {
            spec[flat * 2] = -gp.spectral()[flat * 2 + 1];
            spec[flat * 2 + 1] = gp.spectral()[flat * 2];
        }
        let v = SpectralField::from_spectral(g, 2, spec).unwrap();
        assert!(v.divergence().unwrap().lp_norm(f64::INFINITY).unwrap() < 1e-12);
    }

    #[test]
    fn divergence_rejects_wrong_component_count() {
        let g = grid2();
        assert!(SpectralField::zeros(g, 3).divergence().is_err());
    }

    #[test]
    fn curl_of_single_mode_3d() {
        let g = GridSpec::new(3, 16).unwrap();
        let v = SpectralField::from_fn(g, 3, |x, c| if c == 2 { x[0].sin() } else { 0.0 }).unwrap();
        let curl = v.curl().unwrap();
        for flat in 0..g.num_points() {
            let x = g.coords(flat);
            assert_abs_diff_eq!(curl.value(flat, 0), 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!(curl.value(flat, 1), -x[0].cos(), epsilon = 1e-12);
            assert_abs_diff_eq!(curl.value(flat, 2), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn div_curl_and_curl_grad_vanish_3d() {
        let g = GridSpec::new(3, 16).unwrap();
        let v = crate::synth::random_field(g, 3, 7, 1.0, 5.0, 1.0);
        let dc = v.curl().unwrap().divergence().unwrap();
        assert!(dc.lp_norm(f64::INFINITY).unwrap() < 1e-12);
        let f = crate::synth::random_field(g, 1, 8, 1.0, 5.0, 1.0);
        let cg = f.gradient().unwrap().curl().unwrap();
        assert!(cg.lp_norm(f64::INFINITY).unwrap() < 1e-12);
    }

    #[test]
    fn curl_conventions_2d() {
        let g = grid2();
        // scalar b -> vector (∂_2 b, -∂_1 b), then vector-curl recovers -Δb
        let b = random_band_limited(g, 6.0, 3);
        let v = b.curl().unwrap();
        assert_eq!(v.components(), 2);
        let back = v.curl().unwrap();
        let lap = b
            .apply_mode_multiplier(|k| -((k[0] * k[0] + k[1] * k[1]) as f64));
        let diff = back.sub(&lap.scaled(-1.0)).unwrap();
        assert!(diff.lp_norm(f64::INFINITY).unwrap() < 1e-10);
        // divergence of the scalar-curl field vanishes
        assert!(v.divergence().unwrap().lp_norm(f64::INFINITY).unwrap() < 1e-12);
    }

    #[test]
    fn lp_norms_reference_values() {
        let g = grid2();
        let one = SpectralField::from_fn(g, 1, |_, _| 1.0).unwrap();
        assert_abs_diff_eq!(one.lp_norm(2.0).unwrap(), 2.0 * PI, epsilon = 1e-12);
        let s = SpectralField::from_fn(g, 1, |x, _| x[0].sin()).unwrap();
        assert_abs_diff_eq!(s.lp_norm(f64::INFINITY).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.lp_norm(2.0).unwrap(), 2.0f64.sqrt() * PI, epsilon = 1e-10);
        assert!(s.lp_norm(0.5).is_err());
    }

    #[test]
    fn parseval_for_random_fields() {
        let g = grid2();
        for seed in 0..5u64 {
            let f = crate::synth::random_field(g, 2, seed, 1.0, 10.0, 1.0);
            let l2 = f.lp_norm(2.0).unwrap();
            let spec_sum: f64 = f.spectral().iter().map(|c| c.norm_sqr()).sum();
            let rhs = (g.volume() * spec_sum).sqrt();
            assert!(
                (l2 - rhs).abs() <= 1e-10 * rhs.max(1e-300),
                "Parseval defect {} vs {}",
                l2,
                rhs
            );
        }
    }

    #[test]
    fn hermitian_symmetry_and_round_trip() {
        let g = grid2();
        let f = crate::synth::random_field(g, 1, 11, 1.0, 12.0, 1.0);
        assert!(f.hermitian_defect() < 1e-12);
        let back =
            SpectralField::from_spectral(g, 1, f.spectral().to_vec()).unwrap();
        let scale = f.lp_norm(f64::INFINITY).unwrap();
        assert!(max_abs_diff(&f, &back) < 1e-12 * scale.max(1.0));
    }

    #[test]
    fn binary_record_round_trip_is_bit_exact() {
        let g = grid2();
        let f = crate::synth::random_field(g, 3, 5, 1.0, 9.0, 1.0);
        let mut buf = Vec::new();
        f.write_record(&mut buf).unwrap();
        let r = SpectralField::read_record(&mut buf.as_slice()).unwrap();
        assert_eq!(f.physical().len(), r.physical().len());
        for (a, b) in f.physical().iter().zip(r.physical()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn operators_are_linear(seed_a in 0u64..1000, seed_b in 1000u64..2000,
                                ca in -3.0f64..3.0, cb in -3.0f64..3.0) {
            let g = GridSpec::new(2, 16).unwrap();
            let a = crate::synth::random_field(g, 1, seed_a, 1.0, 5.0, 1.0);
            let b = crate::synth::random_field(g, 1, seed_b, 1.0, 5.0, 1.0);
            let combo = a.scaled(ca).add_scaled(cb, &b).unwrap();
            let lhs = combo.gradient().unwrap();
            let rhs = a.gradient().unwrap().scaled(ca)
                .add_scaled(cb, &b.gradient().unwrap().scaled(1.0)).unwrap();
            let scale = lhs.lp_norm(f64::INFINITY).unwrap().max(1.0);
            prop_assert!(max_abs_diff(&lhs, &rhs) < 1e-11 * scale);
        }

        #[test]
        fn operators_preserve_band_limits(seed in 0u64..500) {
            let g = GridSpec::new(2, 32).unwrap();
            let f = crate::synth::random_field(g, 1, seed, 1.0, 5.0, 1.0);
            let grad = f.gradient().unwrap();
            for flat in 0..g.num_points() {
                if (g.k_sq(flat) as f64).sqrt() > 5.0 {
                    for c in 0..grad.components() {
                        prop_assert!(grad.coeff(flat, c).norm() == 0.0);
                    }
                }
            }
        }

        #[test]
        fn grad_div_commutes_on_scalars(seed in 0u64..500) {
            // divergence(gradient(f)) computed two ways equals the spectral
            // Laplacian composition.
            let g = GridSpec::new(2, 16).unwrap();
            let f = crate::synth::random_field(g, 1, seed, 1.0, 5.0, 1.0);
            let a = f.gradient().unwrap().divergence().unwrap();
            let b = f.apply_mode_multiplier(|k| -((k[0]*k[0] + k[1]*k[1]) as f64));
            let scale = a.lp_norm(f64::INFINITY).unwrap().max(1.0);
            prop_assert!(max_abs_diff(&a, &b) < 1e-12 * scale);
        }
    }
}
