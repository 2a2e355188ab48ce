//! Dyadic (Littlewood-Paley) partition of unity on the wavenumber lattice,
//! frequency blocks, Besov norms and mixed time-space (Chemin-Lerner) norms.
//!
//! The generating profile is the smooth bump
//! `φ_0(ξ) = g(|ξ|)`, `g(t) = exp(-1/((t - 3/4)(8/3 - t)))` on the open
//! annulus `3/4 < t < 8/3` and zero elsewhere; `φ_q(ξ) = φ_0(2^{-q} ξ)`. The
//! normalized block symbols are `FΦ_q = φ_q / Σ_{q'} φ_{q'}` (pointwise on
//! the lattice, zero at `k = 0`), so `Σ_q FΦ_q(k) = 1` for every `k ≠ 0`.
//! The inhomogeneous low-frequency symbol is `FΨ = 1 - Σ_{q>=0} FΦ_q`.
//!
//! All symbols are radial, hence even; on the 2π-torus the lattice is the
//! integer lattice, so each symbol is stored as a table indexed by `|k|^2`.

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::GridSpec;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Which decomposition a block index refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decomposition {
    /// `Δ̇_q` for `q` in the lattice range; no low-frequency block.
    Homogeneous,
    /// `Δ_q`: `q = -1` is the low-frequency cutoff `Ψ`, `q >= 0` the annuli,
    /// `q <= -2` is identically zero.
    Inhomogeneous,
}

/// The generating bump `g(t)` (zero outside the open annulus `(3/4, 8/3)`).
pub fn annulus_bump(t: f64) -> f64 {
    const LO: f64 = 0.75;
    const HI: f64 = 8.0 / 3.0;
    if t > LO && t < HI {
        (-1.0 / ((t - LO) * (HI - t))).exp()
    } else {
        0.0
    }
}

/// Identifies one Besov norm `B^s_{p,r}` (or its homogeneous version).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BesovSpec {
    pub s: f64,
    pub p: f64,
    pub r: f64,
    pub homogeneous: bool,
}

impl BesovSpec {
    pub fn new(s: f64, p: f64, r: f64, homogeneous: bool) -> Result<Self> {
        if !(p >= 1.0) || !(r >= 1.0) {
            return Err(Error::InvalidNorm(format!(
                "Besov indices need p, r >= 1, got p = {p}, r = {r}"
            )));
        }
        Ok(BesovSpec { s, p, r, homogeneous })
    }

    pub fn inhomogeneous(s: f64, p: f64, r: f64) -> Self {
        BesovSpec::new(s, p, r, false).expect("static indices")
    }

    pub fn homogeneous(s: f64, p: f64, r: f64) -> Self {
        BesovSpec::new(s, p, r, true).expect("static indices")
    }
}

/// One mixed time-space norm `L̃^θ_T(B^s_{p,r})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeNormSpec {
    pub base: BesovSpec,
    pub theta: f64,
    pub t_end: f64,
}

impl TimeNormSpec {
    pub fn new(base: BesovSpec, theta: f64, t_end: f64) -> Result<Self> {
        if !(theta >= 1.0) {
            return Err(Error::InvalidNorm(format!("theta must be >= 1, got {theta}")));
        }
        if !(t_end > 0.0) {
            return Err(Error::InvalidNorm(format!("T must be > 0, got {t_end}")));
        }
        Ok(TimeNormSpec { base, theta, t_end })
    }
}

/// The dyadic filter bank realized on one grid's wavenumber lattice.
#[derive(Debug, Clone)]
pub struct DyadicPartition {
    grid: GridSpec,
    q_min: i32,
    q_max: i32,
    /// `tables[(q - q_min) as usize][|k|^2]` = normalized block symbol.
    tables: Vec<Vec<f64>>,
    /// Low-frequency symbol `FΨ`, same indexing.
    psi: Vec<f64>,
}

impl DyadicPartition {
    /// Build the filter bank for a grid. Total: every lattice magnitude is
    /// covered, blocks that vanish identically on the lattice are trimmed.
    pub fn build(grid: &GridSpec) -> DyadicPartition {
        let table_len = grid.max_k_sq() as usize + 1;
        // Mark |k|^2 values actually present on the lattice.
        let mut present = vec![false; table_len];
        for flat in 0..grid.num_points() {
            present[grid.k_sq(flat) as usize] = true;
        }
        // Candidate block range: the annulus of q touches |k| in
        // [3/4·2^q, 8/3·2^q]; magnitudes run from 1 to sqrt(max_k_sq).
        let kmax = (grid.max_k_sq() as f64).sqrt();
        let q_hi_cand = (kmax * 4.0 / 3.0).log2().ceil() as i32 + 1;
        let q_lo_cand = -2;
        let nq = (q_hi_cand - q_lo_cand + 1) as usize;
        let mut raw = vec![vec![0.0; table_len]; nq];
        for m in 1..table_len {
            let t = (m as f64).sqrt();
            let mut sum = 0.0;
            let mut vals = vec![0.0; nq];
            for (i, q) in (q_lo_cand..=q_hi_cand).enumerate() {
                let v = annulus_bump(t / (q as f64).exp2());
                vals[i] = v;
                sum += v;
            }
            for (i, v) in vals.iter().enumerate() {
                raw[i][m] = if *v > 0.0 { v / sum } else { 0.0 };
            }
        }
        // Trim to blocks with support on lattice magnitudes.
        let nonzero = |tab: &Vec<f64>| {
            tab.iter()
                .enumerate()
                .any(|(m, v)| present[m] && *v != 0.0)
        };
        let mut q_min = q_lo_cand;
        let mut q_max = q_hi_cand;
        while q_min < q_max && !nonzero(&raw[(q_min - q_lo_cand) as usize]) {
            q_min += 1;
        }
        while q_max > q_min && !nonzero(&raw[(q_max - q_lo_cand) as usize]) {
            q_max -= 1;
        }
        let tables: Vec<Vec<f64>> = (q_min..=q_max)
            .map(|q| std::mem::take(&mut raw[(q - q_lo_cand) as usize]))
            .collect();
        // FΨ = 1 - Σ_{q>=0} FΦ_q, computed on the lattice.
        let mut psi = vec![1.0; table_len];
        for (i, q) in (q_min..=q_max).enumerate() {
            if q >= 0 {
                for m in 0..table_len {
                    psi[m] -= tables[i][m];
                }
            }
        }
        DyadicPartition {
            grid: *grid,
            q_min,
            q_max,
            tables,
            psi,
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// Smallest homogeneous block index with lattice support.
    pub fn q_min(&self) -> i32 {
        self.q_min
    }

    /// Largest block index with lattice support.
    pub fn q_max(&self) -> i32 {
        self.q_max
    }

    /// Normalized block symbol `FΦ_q` at squared magnitude `|k|^2`.
    pub fn block_symbol(&self, q: i32, k_sq: u64) -> f64 {
        if q < self.q_min || q > self.q_max {
            return 0.0;
        }
        self.tables[(q - self.q_min) as usize]
            .get(k_sq as usize)
            .copied()
            .unwrap_or(0.0)
    }

    /// Low-frequency symbol `FΨ` at squared magnitude `|k|^2`.
    pub fn low_symbol(&self, k_sq: u64) -> f64 {
        self.psi.get(k_sq as usize).copied().unwrap_or(0.0)
    }

    /// Symbol of the block `(q, decomposition)` at `|k|^2`.
    pub fn symbol(&self, q: i32, k_sq: u64, decomp: Decomposition) -> f64 {
        match decomp {
            Decomposition::Homogeneous => self.block_symbol(q, k_sq),
            Decomposition::Inhomogeneous => {
                if q == -1 {
                    self.low_symbol(k_sq)
                } else if q >= 0 {
                    self.block_symbol(q, k_sq)
                } else {
                    0.0
                }
            }
        }
    }

    /// Apply the block filter `Δ_q` / `Δ̇_q`. A `q` outside the valid range
    /// returns the zero field (mirroring `Δ_q f = 0` for `q <= -2`); a
    /// warning is logged since that usually indicates an indexing slip.
    pub fn block(&self, f: &SpectralField, q: i32, decomp: Decomposition) -> SpectralField {
        let in_range = match decomp {
            Decomposition::Homogeneous => q >= self.q_min && q <= self.q_max,
            Decomposition::Inhomogeneous => q >= -1 && q <= self.q_max,
        };
        if !in_range {
            log::warn!("block index q = {q} outside valid range; returning zero field");
            return SpectralField::zeros(self.grid, f.components());
        }
        let m = self.grid.num_points();
        let comps = f.components();
        let mut spec = vec![Complex64::default(); m * comps];
        for flat in 0..m {
            let w = self.symbol(q, self.grid.k_sq(flat), decomp);
            if w != 0.0 {
                for c in 0..comps {
                    spec[flat * comps + c] = f.spectral()[flat * comps + c] * w;
                }
            }
        }
        SpectralField::from_spectral(self.grid, comps, spec).expect("shape preserved")
    }

    /// Block indices contributing to a decomposition on this lattice.
    pub fn block_range(&self, decomp: Decomposition) -> std::ops::RangeInclusive<i32> {
        match decomp {
            Decomposition::Homogeneous => self.q_min..=self.q_max,
            Decomposition::Inhomogeneous => -1..=self.q_max,
        }
    }

    /// Dump one block symbol as a scalar field over the lattice, in the
    /// binary field format (physical values = symbol at that lattice point).
    pub fn multiplier_field(&self, q: i32, decomp: Decomposition) -> SpectralField {
        let m = self.grid.num_points();
        let mut phys = vec![0.0; m];
        for flat in 0..m {
            phys[flat] = self.symbol(q, self.grid.k_sq(flat), decomp);
        }
        SpectralField::from_physical(self.grid, 1, phys).expect("scalar dump")
    }

    /// Worst partition-of-unity defect over lattice points:
    /// `|FΨ + Σ_{q>=0} FΦ_q - 1|` and, for `k ≠ 0`, `|Σ_q FΦ_q - 1|`.
    pub fn partition_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for flat in 0..self.grid.num_points() {
            let ksq = self.grid.k_sq(flat);
            let mut inhom = self.low_symbol(ksq);
            let mut hom = 0.0;
            for q in self.q_min..=self.q_max {
                let v = self.block_symbol(q, ksq);
                hom += v;
                if q >= 0 {
                    inhom += v;
                }
            }
            worst = worst.max((inhom - 1.0).abs());
            if ksq != 0 {
                worst = worst.max((hom - 1.0).abs());
            }
        }
        worst
    }
}

/// Besov norm of a (possibly multi-component) field: the `ℓ^r`-weighted sum
/// over blocks of `2^{qs} ‖Δ_q f‖_{L^p}` (`sup` for `r = ∞`).
pub fn besov_norm(f: &SpectralField, spec: &BesovSpec, part: &DyadicPartition) -> Result<f64> {
    if f.grid() != part.grid() {
        return Err(Error::ShapeMismatch("field/partition grid mismatch".into()));
    }
    let decomp = if spec.homogeneous {
        Decomposition::Homogeneous
    } else {
        Decomposition::Inhomogeneous
    };
    let mut terms = Vec::new();
    for q in part.block_range(decomp) {
        let norm = part.block(f, q, decomp).lp_norm(spec.p)?;
        terms.push((q as f64 * spec.s).exp2() * norm);
    }
    Ok(lr_sum(&terms, spec.r))
}

fn lr_sum(terms: &[f64], r: f64) -> f64 {
    if r.is_infinite() {
        terms.iter().copied().fold(0.0, f64::max)
    } else {
        terms
            .iter()
            .map(|t| t.powf(r))
            .sum::<f64>()
            .powf(1.0 / r)
    }
}

/// Chemin-Lerner norm of a sampled trajectory: per block `q`, the time-`L^θ`
/// norm (trapezoidal over `[0, T]`, max over samples for `θ = ∞`) of
/// `t ↦ ‖Δ_q f(t)‖_{L^p}`, then the `ℓ^r`-weighted block sum. The order —
/// block-wise time norm first, block sum second — is what distinguishes this
/// from `L^θ_T(B^s_{p,r})`.
pub fn chemin_lerner_norm(
    samples: &[(f64, SpectralField)],
    spec: &TimeNormSpec,
    part: &DyadicPartition,
) -> Result<f64> {
    validate_samples(samples, spec.t_end)?;
    let decomp = if spec.base.homogeneous {
        Decomposition::Homogeneous
    } else {
        Decomposition::Inhomogeneous
    };
    let mut terms = Vec::new();
    for q in part.block_range(decomp) {
        let values: Vec<(f64, f64)> = samples
            .iter()
            .map(|(t, f)| Ok((*t, part.block(f, q, decomp).lp_norm(spec.base.p)?)))
            .collect::<Result<_>>()?;
        let time_norm = time_lp(&values, spec.theta, spec.t_end);
        terms.push((q as f64 * spec.base.s).exp2() * time_norm);
    }
    Ok(lr_sum(&terms, spec.base.r))
}

/// Time-`L^θ` norm of a scalar trajectory over `[0, T]` on the same sampling
/// rules as [`chemin_lerner_norm`] (used for the mixed-norm comparisons).
pub fn time_lp_norm(values: &[(f64, f64)], theta: f64, t_end: f64) -> Result<f64> {
    if values.len() < 2 {
        return Err(Error::InvalidSamples("need at least 2 samples".into()));
    }
    Ok(time_lp(values, theta, t_end))
}

fn validate_samples(samples: &[(f64, SpectralField)], t_end: f64) -> Result<()> {
    if samples.len() < 2 {
        return Err(Error::InvalidSamples(format!(
            "need at least 2 samples, got {}",
            samples.len()
        )));
    }
    let mut prev = f64::NEG_INFINITY;
    for (t, _) in samples {
        if !(*t > prev) {
            return Err(Error::InvalidSamples("sample times must be increasing".into()));
        }
        prev = *t;
    }
    let t0 = samples[0].0;
    let t1 = samples.last().unwrap().0;
    if t0 > 1e-9 || t1 < t_end - 1e-9 {
        return Err(Error::InvalidSamples(format!(
            "samples [{t0}, {t1}] do not cover [0, {t_end}]"
        )));
    }
    Ok(())
}

/// Trapezoidal `(∫_0^T x(t)^θ dt)^{1/θ}`; `θ = ∞` is the max over samples in
/// `[0, T]`. Samples beyond `T` are clipped with linear interpolation of `x`.
fn time_lp(values: &[(f64, f64)], theta: f64, t_end: f64) -> f64 {
    if theta.is_infinite() {
        return values
            .iter()
            .filter(|(t, _)| *t <= t_end + 1e-12)
            .map(|(_, x)| *x)
            .fold(0.0, f64::max);
    }
    let mut acc = 0.0;
    for w in values.windows(2) {
        let (t0, x0) = w[0];
        let (mut t1, mut x1) = w[1];
        if t0 >= t_end {
            break;
        }
        if t1 > t_end {
            let frac = (t_end - t0) / (t1 - t0);
            x1 = x0 + frac * (x1 - x0);
            t1 = t_end;
        }
        acc += 0.5 * (x0.powf(theta) + x1.powf(theta)) * (t1 - t0);
    }
    acc.powf(1.0 / theta)
}

/// Bernstein ratio of a field spectrally supported in the annulus `A_q`:
/// `forward = ‖∇f‖_{L^p} / (2^q ‖f‖_{L^p})` and its reciprocal. For `p = 2`
/// both lie in the annulus band `[3/4, 8/3]` (resp. its reciprocal) exactly.
#[derive(Debug, Clone, Copy)]
pub struct BernsteinRatios {
    pub forward: f64,
    pub inverse: f64,
}

pub fn check_bernstein(f: &SpectralField, q: i32, p: f64) -> Result<BernsteinRatios> {
    if f.components() != 1 {
        return Err(Error::ShapeMismatch("Bernstein check expects a scalar".into()));
    }
    // Verify annulus support.
    let lo = 0.75 * (q as f64).exp2();
    let hi = 8.0 / 3.0 * (q as f64).exp2();
    let grid = f.grid();
    let total: f64 = f.spectral().iter().map(|c| c.norm_sqr()).sum();
    if total == 0.0 {
        return Err(Error::Degenerate("Bernstein ratio of the zero field".into()));
    }
    let mut outside = 0.0;
    for flat in 0..grid.num_points() {
        let r = (grid.k_sq(flat) as f64).sqrt();
        if !(lo <= r && r <= hi) {
            outside += f.spectral()[flat].norm_sqr();
        }
    }
    if outside > 1e-20 * total {
        return Err(Error::SupportViolation(format!(
            "field has spectral mass outside A_{q} (fraction {:.2e})",
            outside / total
        )));
    }
    let fnorm = f.lp_norm(p)?;
    let gnorm = f.gradient()?.lp_norm(p)?;
    if fnorm == 0.0 || gnorm == 0.0 {
        return Err(Error::Degenerate("zero norm in Bernstein ratio".into()));
    }
    let forward = gnorm / ((q as f64).exp2() * fnorm);
    Ok(BernsteinRatios {
        forward,
        inverse: 1.0 / forward,
    })
}
