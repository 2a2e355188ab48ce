//! Theorem-level functionals evaluated on runs (energy/dissipation budget,
//! decay channels, the Poincaré step) and the randomized inequality
//! checkers.
//!
//! None of the underlying inequalities comes with explicit constants, so
//! every checker follows one protocol: measure the best constant `Ĉ` on a
//! seeded calibration set, freeze it, then assert the inequality with 5%
//! headroom (`1.05·Ĉ`) on a disjoint set of fresh seeds. Seeds are fixed, so
//! outcomes are deterministic.
//!
//! Conventions: composite norms of several fields use the sum-of-group-norms
//! convention `‖(f, g, …)‖ = ‖f‖ + ‖g‖ + …`; all reports are computed on the
//! physical-variable view `(n± - 1, u±, E, B - B̄)`; analysis windows are in
//! the solver's (symmetrized) clock.

use crate::dyadic::{
    besov_norm, chemin_lerner_norm, check_bernstein, time_lp_norm, BesovSpec, Decomposition,
    DyadicPartition, TimeNormSpec,
};
use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::GridSpec;
use crate::integrator::{choose_dt, step};
use crate::model::{critical_regularity, make_initial_data, phi, PhysParams, SymState};
use crate::record::RunRecord;
use crate::synth;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

type TimeSeries = Vec<(f64, SpectralField)>;

/// Energy and dissipation budget of one run over `[0, T]`:
/// `sup_norm` in `L̃^∞(B^{s_c}_{2,1})`, hydrodynamic dissipation in
/// `L̃²(B^{s_c}_{2,1})` (periodic form: the densities themselves),
/// electric dissipation at one derivative less, magnetic-gradient
/// dissipation at two derivatives less.
#[derive(Debug, Clone, Serialize)]
pub struct EnergyReport {
    pub t_window: f64,
    pub mu0: f64,
    pub sup_norm: f64,
    pub diss_density: f64,
    pub diss_e: f64,
    pub diss_grad_b: f64,
    pub initial_norm: f64,
    /// `(sup + μ₀(diss_density + diss_e + diss_grad_b)) / initial`;
    /// `None` when the run is degenerate (zero initial data).
    pub ratio: Option<f64>,
}

/// The six perturbation groups `(n+-1, n--1, u+, u-, E, B-B̄)` as sampled
/// trajectories.
fn perturbation_groups(run: &RunRecord, t_max: f64) -> Result<Vec<(String, TimeSeries)>> {
    let mut groups: Vec<(String, TimeSeries)> = [
        "n_plus", "n_minus", "u_plus", "u_minus", "e", "b",
    ]
    .iter()
    .map(|n| (n.to_string(), Vec::new()))
    .collect();
    let mut past_end = false;
    for snap in &run.snapshots {
        // keep one sample beyond the window so quadrature can clip at t_max
        if past_end {
            break;
        }
        if snap.t_sym > t_max + 1e-12 {
            past_end = true;
        }
        let phys = snap.state.to_physical()?;
        let grid = *phys.n_plus.grid();
        let params = &snap.state.params;
        let sg = params.sqrt_gamma();
        let one = SpectralField::from_fn(grid, 1, |_, _| 1.0)?;
        let b_back = SpectralField::from_fn(grid, phys.b.components(), |_, c| {
            sg * params.b_bar[c]
        })?;
        let t = snap.t_sym;
        groups[0].1.push((t, phys.n_plus.sub(&one)?));
        groups[1].1.push((t, phys.n_minus.sub(&one)?));
        groups[2].1.push((t, phys.u_plus.clone()));
        groups[3].1.push((t, phys.u_minus.clone()));
        groups[4].1.push((t, phys.e.clone()));
        groups[5].1.push((t, phys.b.sub(&b_back)?));
    }
    Ok(groups)
}

pub fn energy_report(run: &RunRecord, mu0: f64, t_window: Option<f64>) -> Result<EnergyReport> {
    if run.snapshots.len() < 2 {
        return Err(Error::InvalidSamples(
            "energy report needs at least 2 snapshots".into(),
        ));
    }
    let t_max = t_window.unwrap_or_else(|| run.t_final());
    let grid = *run.snapshots[0].state.grid();
    let part = DyadicPartition::build(&grid);
    let sc = critical_regularity(grid.dim());
    let groups = perturbation_groups(run, t_max)?;

    let sup_spec = |s: f64| TimeNormSpec::new(BesovSpec::inhomogeneous(s, 2.0, 1.0), f64::INFINITY, t_max);
    let l2_spec = |s: f64| TimeNormSpec::new(BesovSpec::inhomogeneous(s, 2.0, 1.0), 2.0, t_max);

    let mut sup_norm = 0.0;
    for (_, series) in &groups {
        sup_norm += chemin_lerner_norm(series, &sup_spec(sc)?, &part)?;
    }
    let mut diss_density = 0.0;
    for (_, series) in groups.iter().take(4) {
        diss_density += chemin_lerner_norm(series, &l2_spec(sc)?, &part)?;
    }
    let diss_e = chemin_lerner_norm(&groups[4].1, &l2_spec(sc - 1.0)?, &part)?;
    // magnetic dissipation measured on the spectral gradient field
    let grad_b_series: TimeSeries = groups[5]
        .1
        .iter()
        .map(|(t, f)| {
            let g = if f.components() == 1 {
                f.gradient()
            } else {
                f.jacobian()
            }?;
            Ok((*t, g))
        })
        .collect::<Result<_>>()?;
    let diss_grad_b = chemin_lerner_norm(&grad_b_series, &l2_spec(sc - 2.0)?, &part)?;

    let spec0 = BesovSpec::inhomogeneous(sc, 2.0, 1.0);
    let mut initial_norm = 0.0;
    for (_, series) in &groups {
        initial_norm += besov_norm(&series[0].1, &spec0, &part)?;
    }
    let ratio = if initial_norm > 0.0 {
        Some((sup_norm + mu0 * (diss_density + diss_e + diss_grad_b)) / initial_norm)
    } else {
        None
    };
    Ok(EnergyReport {
        t_window: t_max,
        mu0,
        sup_norm,
        diss_density,
        diss_e,
        diss_grad_b,
        initial_norm,
        ratio,
    })
}

/// One decay channel: per-snapshot Besov norms at the channel's regularity.
#[derive(Debug, Clone, Serialize)]
pub struct ChannelSeries {
    pub name: String,
    pub s: f64,
    pub values: Vec<f64>,
    pub final_over_initial: Option<f64>,
    /// Fitted exponent λ of `v(t) ≈ C·e^{-λt}` over the later half of the
    /// run (reported as data; no rate is asserted).
    pub fitted_exponent: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecayChannels {
    pub eps: f64,
    pub times: Vec<f64>,
    pub channels: Vec<ChannelSeries>,
}

pub fn decay_report(run: &RunRecord, eps: f64) -> Result<DecayChannels> {
    if !(eps > 0.0) {
        return Err(Error::InvalidNorm(format!("eps must be > 0, got {eps}")));
    }
    if run.snapshots.is_empty() {
        return Err(Error::InvalidSamples("decay report needs snapshots".into()));
    }
    let grid = *run.snapshots[0].state.grid();
    let part = DyadicPartition::build(&grid);
    let sc = critical_regularity(grid.dim());
    let times: Vec<f64> = run.snapshots.iter().map(|s| s.t_sym).collect();

    let mut channels: Vec<ChannelSeries> = [
        ("charge_imbalance", sc - eps),
        ("velocity_plus", sc - eps),
        ("velocity_minus", sc - eps),
        ("e_field", sc - 1.0 - eps),
        ("b_field", sc - 2.0 - eps),
        ("density_plus", sc - eps),
        ("density_minus", sc - eps),
    ]
    .iter()
    .map(|(name, s)| ChannelSeries {
        name: name.to_string(),
        s: *s,
        values: Vec::new(),
        final_over_initial: None,
        fitted_exponent: None,
    })
    .collect();

    for snap in &run.snapshots {
        let phys = snap.state.to_physical()?;
        let params = &snap.state.params;
        let sg = params.sqrt_gamma();
        let one = SpectralField::from_fn(grid, 1, |_, _| 1.0)?;
        let b_back = SpectralField::from_fn(grid, phys.b.components(), |_, c| {
            sg * params.b_bar[c]
        })?;
        let fields: [SpectralField; 7] = [
            phys.n_plus.sub(&phys.n_minus)?,
            phys.u_plus.clone(),
            phys.u_minus.clone(),
            phys.e.clone(),
            phys.b.sub(&b_back)?,
            phys.n_plus.sub(&one)?,
            phys.n_minus.sub(&one)?,
        ];
        for (ch, f) in channels.iter_mut().zip(fields.iter()) {
            let spec = BesovSpec::inhomogeneous(ch.s, 2.0, 1.0);
            ch.values.push(besov_norm(f, &spec, &part)?);
        }
    }
    for ch in &mut channels {
        let first = ch.values.first().copied().unwrap_or(0.0);
        let last = ch.values.last().copied().unwrap_or(0.0);
        if first > 0.0 {
            ch.final_over_initial = Some(last / first);
        }
        ch.fitted_exponent = fit_decay_exponent(&times, &ch.values);
    }
    Ok(DecayChannels {
        eps,
        times,
        channels,
    })
}

/// Least-squares fit of `ln v = a - λ t` over the later half of the samples
/// (only where `v > 0`); returns `λ`.
pub fn fit_decay_exponent(times: &[f64], values: &[f64]) -> Option<f64> {
    let t_mid = 0.5 * (times.first()? + times.last()?);
    let pts: Vec<(f64, f64)> = times
        .iter()
        .zip(values)
        .filter(|(t, v)| **t >= t_mid && **v > 0.0)
        .map(|(t, v)| (*t, v.ln()))
        .collect();
    if pts.len() < 3 {
        return None;
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|(t, _)| t).sum();
    let sy: f64 = pts.iter().map(|(_, y)| y).sum();
    let sxx: f64 = pts.iter().map(|(t, _)| t * t).sum();
    let sxy: f64 = pts.iter().map(|(t, y)| t * y).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-300 {
        return None;
    }
    Some(-(n * sxy - sx * sy) / denom)
}

/// Poincaré ratio `‖f‖_{L²} / ‖∇f‖_{L²}` of a mean-zero scalar field; on the
/// 2π-torus it is at most 1 (the lowest nonzero lattice magnitude is 1).
pub fn poincare_check(f: &SpectralField) -> Result<f64> {
    if f.components() != 1 {
        return Err(Error::ShapeMismatch("Poincaré check expects a scalar".into()));
    }
    let scale = f.l2_norm();
    if scale == 0.0 {
        return Err(Error::Degenerate("Poincaré ratio of the zero field".into()));
    }
    if f.mean(0).abs() > 1e-12 * scale.max(1.0) {
        return Err(Error::ShapeMismatch(format!(
            "Poincaré check needs a mean-zero field, mean = {}",
            f.mean(0)
        )));
    }
    let grad = f.gradient()?.l2_norm();
    if grad == 0.0 {
        return Err(Error::Degenerate("zero gradient in Poincaré ratio".into()));
    }
    Ok(scale / grad)
}

/// Outcome of one calibrate-then-assert suite.
#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    /// Calibrated constant (worst ratio over the calibration seeds).
    pub c_hat: f64,
    /// Assertion bound on fresh seeds (`1.05 · c_hat`).
    pub bound: f64,
    pub worst_fresh: f64,
    pub failing_seed: Option<u64>,
    pub calibration_trials: usize,
    pub fresh_trials: usize,
    pub details: serde_json::Value,
}

impl CheckOutcome {
    fn from_ratios(
        name: &str,
        cal: &[(u64, f64)],
        fresh: &[(u64, f64)],
        details: serde_json::Value,
    ) -> CheckOutcome {
        let c_hat = cal.iter().map(|(_, r)| *r).fold(0.0, f64::max);
        let bound = 1.05 * c_hat;
        let mut worst_fresh = 0.0;
        let mut failing_seed = None;
        for (seed, r) in fresh {
            if *r > worst_fresh {
                worst_fresh = *r;
            }
            if *r > bound && failing_seed.is_none() {
                failing_seed = Some(*seed);
            }
        }
        CheckOutcome {
            name: name.to_string(),
            passed: failing_seed.is_none(),
            c_hat,
            bound,
            worst_fresh,
            failing_seed,
            calibration_trials: cal.len(),
            fresh_trials: fresh.len(),
            details,
        }
    }
}

fn trial_alpha(seed: u64) -> f64 {
    ChaCha8Rng::seed_from_u64(seed.wrapping_add(0xA1FA)).gen_range(0.5..2.5)
}

/// Band edge keeping quadratic products exactly representable on the grid.
fn product_safe_kmax(grid: &GridSpec) -> f64 {
    (grid.points_per_axis() / 4 - 1) as f64
}

/// Product continuity at critical regularity:
/// `‖fg‖_{B^{s_c}_{2,1}} <= C ‖f‖ ‖g‖` over random band-limited pairs.
pub fn check_product_estimate(
    grid: GridSpec,
    cal_trials: usize,
    fresh_trials: usize,
    base_seed: u64,
) -> Result<CheckOutcome> {
    let part = DyadicPartition::build(&grid);
    let sc = critical_regularity(grid.dim());
    let spec = BesovSpec::inhomogeneous(sc, 2.0, 1.0);
    let kmax = product_safe_kmax(&grid);
    let ratio = |seed: u64| -> Result<Option<f64>> {
        let f = synth::random_field(grid, 1, seed.wrapping_mul(2).wrapping_add(1), 1.0, kmax, trial_alpha(seed));
        let g = synth::random_field(grid, 1, seed.wrapping_mul(2).wrapping_add(2), 1.0, kmax, trial_alpha(seed ^ 0x55));
        let nf = besov_norm(&f, &spec, &part)?;
        let ng = besov_norm(&g, &spec, &part)?;
        if nf == 0.0 || ng == 0.0 {
            return Ok(None); // degenerate draw, skipped
        }
        let fg = g.pointwise_mul(&f)?;
        Ok(Some(besov_norm(&fg, &spec, &part)? / (nf * ng)))
    };
    let mut cal = Vec::new();
    for seed in base_seed..base_seed + cal_trials as u64 {
        if let Some(r) = ratio(seed)? {
            cal.push((seed, r));
        }
    }
    let mut fresh = Vec::new();
    for seed in base_seed + cal_trials as u64..base_seed + (cal_trials + fresh_trials) as u64 {
        if let Some(r) = ratio(seed)? {
            fresh.push((seed, r));
        }
    }
    Ok(CheckOutcome::from_ratios(
        "product",
        &cal,
        &fresh,
        json!({"s": sc, "p": 2.0, "r": 1.0, "kmax": kmax}),
    ))
}

/// Synthetic admissible time series `f(t) = cos(ω̃t) f₀ + sin(ω̃t) f₁`.
fn trial_series(grid: GridSpec, seed: u64, amplitude: f64, samples: usize) -> Result<TimeSeries> {
    let kmax = product_safe_kmax(&grid);
    let f0 = synth::random_field(grid, 1, seed.wrapping_mul(3).wrapping_add(1), amplitude, kmax, trial_alpha(seed));
    let f1 = synth::random_field(grid, 1, seed.wrapping_mul(3).wrapping_add(2), amplitude, kmax, trial_alpha(seed ^ 0xAA));
    let t_end = 1.0;
    (0..samples)
        .map(|i| {
            let t = t_end * i as f64 / (samples - 1) as f64;
            let w = 1.3 * t;
            Ok((t, f0.scaled(w.cos()).add_scaled(w.sin(), &f1)?))
        })
        .collect()
}

fn linf_linf(series: &TimeSeries) -> Result<f64> {
    let mut best = 0.0f64;
    for (_, f) in series {
        best = best.max(f.lp_norm(f64::INFINITY)?);
    }
    Ok(best)
}

fn l2t_linf(series: &TimeSeries, t_end: f64) -> Result<f64> {
    let pts: Vec<(f64, f64)> = series
        .iter()
        .map(|(t, f)| Ok((*t, f.lp_norm(f64::INFINITY)?)))
        .collect::<Result<_>>()?;
    time_lp_norm(&pts, 2.0, t_end)
}

fn phi_series(series: &TimeSeries, gamma: f64) -> Result<TimeSeries> {
    series
        .iter()
        .map(|(t, f)| Ok((*t, f.map_values(|v| phi(v, gamma).unwrap_or(f64::NAN))?)))
        .collect()
}

/// Composition continuity with `F = Φ`:
/// `‖Φ(f)‖_{L̃^θ_T(B^s)} <= C (1 + ‖f‖_{L^∞_T(L^∞)})^{[s]+1} ‖f‖_{L̃^θ_T(B^s)}`
/// on synthetic admissible time series, θ alternating between 2 and ∞.
pub fn check_composition_value(
    grid: GridSpec,
    gamma: f64,
    cal_trials: usize,
    fresh_trials: usize,
    base_seed: u64,
) -> Result<CheckOutcome> {
    let part = DyadicPartition::build(&grid);
    let sc = critical_regularity(grid.dim());
    let power = sc.floor() as i32 + 1;
    let t_end = 1.0;
    let ratio = |seed: u64| -> Result<Option<f64>> {
        let amp = 0.05 + (seed % 5) as f64 * 0.05;
        let series = trial_series(grid, seed, amp, 5)?;
        let theta = if seed % 2 == 0 { 2.0 } else { f64::INFINITY };
        let spec = TimeNormSpec::new(BesovSpec::inhomogeneous(sc, 2.0, 1.0), theta, t_end)?;
        let lhs = chemin_lerner_norm(&phi_series(&series, gamma)?, &spec, &part)?;
        let cl_f = chemin_lerner_norm(&series, &spec, &part)?;
        if cl_f == 0.0 {
            return Ok(None);
        }
        let pre = (1.0 + linf_linf(&series)?).powi(power);
        Ok(Some(lhs / (pre * cl_f)))
    };
    let mut cal = Vec::new();
    for seed in base_seed..base_seed + cal_trials as u64 {
        if let Some(r) = ratio(seed)? {
            cal.push((seed, r));
        }
    }
    let mut fresh = Vec::new();
    for seed in base_seed + cal_trials as u64..base_seed + (cal_trials + fresh_trials) as u64 {
        if let Some(r) = ratio(seed)? {
            fresh.push((seed, r));
        }
    }
    Ok(CheckOutcome::from_ratios(
        "composition_value",
        &cal,
        &fresh,
        json!({"gamma": gamma, "s": sc, "power": power}),
    ))
}

/// Composition difference bound (the θ-split form used with
/// `θ₁ = θ₄ = 2`, `θ₂ = θ₃ = ∞`):
/// `‖Φ(f)-Φ(g)‖_{L̃²(B^s)} <= C (1+‖f‖+‖g‖)^{[s]+1} ·
///  (‖f-g‖_{L²(L^∞)}·sup_κ‖g+κ(f-g)‖_{L̃^∞(B^s)}
///   + ‖f-g‖_{L̃²(B^s)}·sup_κ‖g+κ(f-g)‖_{L^∞(L^∞)})`;
/// the κ-sup of a norm along an affine path is attained at an endpoint.
pub fn check_composition_difference(
    grid: GridSpec,
    gamma: f64,
    cal_trials: usize,
    fresh_trials: usize,
    base_seed: u64,
) -> Result<CheckOutcome> {
    let part = DyadicPartition::build(&grid);
    let sc = critical_regularity(grid.dim());
    let power = sc.floor() as i32 + 1;
    let t_end = 1.0;
    let besov = BesovSpec::inhomogeneous(sc, 2.0, 1.0);
    let ratio = |seed: u64| -> Result<Option<f64>> {
        let amp = 0.05 + (seed % 5) as f64 * 0.05;
        let f = trial_series(grid, seed, amp, 5)?;
        let g = trial_series(grid, seed ^ 0x5a5a, amp * 0.8, 5)?;
        let diff: TimeSeries = f
            .iter()
            .zip(&g)
            .map(|((t, a), (_, b))| Ok((*t, a.sub(b)?)))
            .collect::<Result<_>>()?;
        let phi_diff: TimeSeries = phi_series(&f, gamma)?
            .into_iter()
            .zip(phi_series(&g, gamma)?)
            .map(|((t, a), (_, b))| Ok((t, a.sub(&b)?)))
            .collect::<Result<_>>()?;
        let l2_spec = TimeNormSpec::new(besov, 2.0, t_end)?;
        let sup_spec = TimeNormSpec::new(besov, f64::INFINITY, t_end)?;
        let lhs = chemin_lerner_norm(&phi_diff, &l2_spec, &part)?;
        let sup_path_besov = chemin_lerner_norm(&f, &sup_spec, &part)?
            .max(chemin_lerner_norm(&g, &sup_spec, &part)?);
        let sup_path_linf = linf_linf(&f)?.max(linf_linf(&g)?);
        let rhs = (1.0 + linf_linf(&f)? + linf_linf(&g)?).powi(power)
            * (l2t_linf(&diff, t_end)? * sup_path_besov
                + chemin_lerner_norm(&diff, &l2_spec, &part)? * sup_path_linf);
        if rhs == 0.0 {
            return Ok(None);
        }
        Ok(Some(lhs / rhs))
    };
    let mut cal = Vec::new();
    for seed in base_seed..base_seed + cal_trials as u64 {
        if let Some(r) = ratio(seed)? {
            cal.push((seed, r));
        }
    }
    let mut fresh = Vec::new();
    for seed in base_seed + cal_trials as u64..base_seed + (cal_trials + fresh_trials) as u64 {
        if let Some(r) = ratio(seed)? {
            fresh.push((seed, r));
        }
    }
    Ok(CheckOutcome::from_ratios(
        "composition_difference",
        &cal,
        &fresh,
        json!({"gamma": gamma, "theta_split": [2.0, f64::INFINITY], "s": sc}),
    ))
}

/// Commutator continuity at `s = 1 + N/p` (`p = 2`): per block,
/// `c_q = 2^{qs}·‖[f, Δ_q]∇g‖_{L²} / (‖∇f‖_{B^{s-1}}·‖g‖_{B^s})` must be
/// summable; the checker calibrates and asserts `Σ_q c_q <= Ĉ`.
pub fn check_commutator_estimate(
    grid: GridSpec,
    cal_trials: usize,
    fresh_trials: usize,
    base_seed: u64,
) -> Result<CheckOutcome> {
    let part = DyadicPartition::build(&grid);
    let sc = critical_regularity(grid.dim());
    let kmax = product_safe_kmax(&grid);
    let ratio = |seed: u64| -> Result<Option<f64>> {
        let f = synth::random_field(grid, 1, seed.wrapping_mul(5).wrapping_add(1), 1.0, kmax, trial_alpha(seed));
        let g = synth::random_field(grid, 1, seed.wrapping_mul(5).wrapping_add(2), 1.0, kmax, trial_alpha(seed ^ 0x77));
        commutator_cq_sum(&f, &g, sc, &part)
    };
    let mut cal = Vec::new();
    for seed in base_seed..base_seed + cal_trials as u64 {
        if let Some(r) = ratio(seed)? {
            cal.push((seed, r));
        }
    }
    let mut fresh = Vec::new();
    for seed in base_seed + cal_trials as u64..base_seed + (cal_trials + fresh_trials) as u64 {
        if let Some(r) = ratio(seed)? {
            fresh.push((seed, r));
        }
    }
    Ok(CheckOutcome::from_ratios(
        "commutator",
        &cal,
        &fresh,
        json!({"s": sc, "operator": "grad"}),
    ))
}

/// `Σ_q c_q` for the commutator `[f, Δ_q]∇g` (`None` when degenerate).
pub fn commutator_cq_sum(
    f: &SpectralField,
    g: &SpectralField,
    s: f64,
    part: &DyadicPartition,
) -> Result<Option<f64>> {
    let grad_g = g.gradient()?;
    let denom_f = besov_norm(&f.gradient()?, &BesovSpec::inhomogeneous(s - 1.0, 2.0, 1.0), part)?;
    let denom_g = besov_norm(g, &BesovSpec::inhomogeneous(s, 2.0, 1.0), part)?;
    if denom_f == 0.0 || denom_g == 0.0 {
        return Ok(None);
    }
    let f_grad_g = grad_g.pointwise_mul(f)?;
    let mut sum = 0.0;
    for q in part.block_range(Decomposition::Inhomogeneous) {
        let a = part
            .block(&grad_g, q, Decomposition::Inhomogeneous)
            .pointwise_mul(f)?;
        let b = part.block(&f_grad_g, q, Decomposition::Inhomogeneous);
        let comm = a.sub(&b)?.l2_norm();
        sum += (q as f64 * s).exp2() * comm / (denom_f * denom_g);
    }
    Ok(Some(sum))
}

/// Embedding `B^{N/2}_{2,1} -> L^∞`: calibrate/assert
/// `‖f‖_{L^∞} <= C ‖f‖_{B^{N/2}_{2,1}}`.
pub fn check_embedding(
    grid: GridSpec,
    cal_trials: usize,
    fresh_trials: usize,
    base_seed: u64,
) -> Result<CheckOutcome> {
    let part = DyadicPartition::build(&grid);
    let s = grid.dim() as f64 / 2.0;
    let spec = BesovSpec::inhomogeneous(s, 2.0, 1.0);
    let kmax = (grid.points_per_axis() / 2 - 1) as f64;
    let ratio = |seed: u64| -> Result<Option<f64>> {
        let f = synth::random_field(grid, 1, seed.wrapping_mul(7).wrapping_add(1), 1.0, kmax, trial_alpha(seed));
        let b = besov_norm(&f, &spec, &part)?;
        if b == 0.0 {
            return Ok(None);
        }
        Ok(Some(f.lp_norm(f64::INFINITY)? / b))
    };
    let mut cal = Vec::new();
    for seed in base_seed..base_seed + cal_trials as u64 {
        if let Some(r) = ratio(seed)? {
            cal.push((seed, r));
        }
    }
    let mut fresh = Vec::new();
    for seed in base_seed + cal_trials as u64..base_seed + (cal_trials + fresh_trials) as u64 {
        if let Some(r) = ratio(seed)? {
            fresh.push((seed, r));
        }
    }
    Ok(CheckOutcome::from_ratios(
        "embedding",
        &cal,
        &fresh,
        json!({"s": s}),
    ))
}

/// Bernstein ratio at `p = ∞` for annulus-supported fields: calibrate
/// `C = max(ratio, 1/ratio)` (the constant should stay <= 4) and assert on
/// fresh seeds.
pub fn check_bernstein_linf(
    grid: GridSpec,
    cal_trials: usize,
    fresh_trials: usize,
    base_seed: u64,
) -> Result<CheckOutcome> {
    let q_hi = ((grid.points_per_axis() / 2) as f64 * 3.0 / 8.0).log2().floor() as i32;
    let ratio = |seed: u64| -> Result<Option<f64>> {
        let q = (seed % (q_hi + 2) as u64) as i32 - 1; // q in [-1, q_hi]
        let f = synth::random_annulus(grid, 1, seed.wrapping_mul(11).wrapping_add(3), 1.0, q);
        if f.l2_norm() == 0.0 {
            return Ok(None);
        }
        let r = check_bernstein(&f, q, f64::INFINITY)?;
        Ok(Some(r.forward.max(r.inverse)))
    };
    let mut cal = Vec::new();
    for seed in base_seed..base_seed + cal_trials as u64 {
        if let Some(r) = ratio(seed)? {
            cal.push((seed, r));
        }
    }
    let mut fresh = Vec::new();
    for seed in base_seed + cal_trials as u64..base_seed + (cal_trials + fresh_trials) as u64 {
        if let Some(r) = ratio(seed)? {
            fresh.push((seed, r));
        }
    }
    let out = CheckOutcome::from_ratios(
        "bernstein_linf",
        &cal,
        &fresh,
        json!({"q_max_tested": q_hi, "constant_cap": 4.0}),
    );
    Ok(CheckOutcome {
        passed: out.passed && out.c_hat <= 4.0,
        ..out
    })
}

/// Two-sided equivalence between the inhomogeneous mixed norm and
/// (homogeneous mixed norm + time-L^θ of L^p), for `s > 0`, `θ >= r`:
/// calibrate the ratio band on seeded series, assert fresh ratios inside
/// the widened band.
pub fn check_splitting_identity(
    grid: GridSpec,
    cal_trials: usize,
    fresh_trials: usize,
    base_seed: u64,
) -> Result<CheckOutcome> {
    let part = DyadicPartition::build(&grid);
    let sc = critical_regularity(grid.dim());
    let t_end = 1.0;
    let inhom = TimeNormSpec::new(BesovSpec::inhomogeneous(sc, 2.0, 1.0), 2.0, t_end)?;
    let hom = TimeNormSpec::new(BesovSpec::homogeneous(sc, 2.0, 1.0), 2.0, t_end)?;
    let ratio = |seed: u64| -> Result<Option<f64>> {
        // include a constant offset so the low block genuinely matters
        let mut series = trial_series(grid, seed, 1.0, 5)?;
        let offset = 0.3 + (seed % 7) as f64 * 0.1;
        let grid0 = *series[0].1.grid();
        let one = SpectralField::from_fn(grid0, 1, |_, _| offset)?;
        for (t, f) in series.iter_mut() {
            *f = f.add_scaled(1.0 + *t, &one)?;
        }
        let a = chemin_lerner_norm(&series, &inhom, &part)?;
        let l2l2: Vec<(f64, f64)> = series
            .iter()
            .map(|(t, f)| Ok((*t, f.lp_norm(2.0)?)))
            .collect::<Result<_>>()?;
        let b = chemin_lerner_norm(&series, &hom, &part)? + time_lp_norm(&l2l2, 2.0, t_end)?;
        if b == 0.0 {
            return Ok(None);
        }
        Ok(Some(a / b))
    };
    let mut cal = Vec::new();
    for seed in base_seed..base_seed + cal_trials as u64 {
        if let Some(r) = ratio(seed)? {
            cal.push((seed, r));
        }
    }
    let c_lo = cal.iter().map(|(_, r)| *r).fold(f64::INFINITY, f64::min);
    let c_hi = cal.iter().map(|(_, r)| *r).fold(0.0, f64::max);
    let (lo_bound, hi_bound) = (c_lo / 1.05, c_hi * 1.05);
    let mut worst: f64 = 0.0;
    let mut failing_seed = None;
    for seed in base_seed + cal_trials as u64..base_seed + (cal_trials + fresh_trials) as u64 {
        if let Some(r) = ratio(seed)? {
            worst = worst.max(r);
            if (r < lo_bound || r > hi_bound) && failing_seed.is_none() {
                failing_seed = Some(seed);
            }
        }
    }
    Ok(CheckOutcome {
        name: "splitting_identity".into(),
        passed: failing_seed.is_none(),
        c_hat: c_hi,
        bound: hi_bound,
        worst_fresh: worst,
        failing_seed,
        calibration_trials: cal_trials,
        fresh_trials,
        details: json!({"band": [c_lo, c_hi], "widened": [lo_bound, hi_bound], "theta": 2.0, "r": 1.0}),
    })
}

/// Convergence suite: RK4 local/global order by Richardson step-halving and
/// the single-step Gauss-defect growth order.
pub fn check_convergence(seed: u64) -> Result<CheckOutcome> {
    let grid = GridSpec::new(2, 16)?;
    let params = PhysParams::new(2.0, vec![1.0], 2)?;
    let w0 = make_initial_data(grid, &params, 0.3, seed, (1, 1))?;
    let local = |h: f64| -> Result<f64> {
        let big = step(&w0, h)?;
        let small = step(&step(&w0, h / 2.0)?, h / 2.0)?;
        Ok(big.add_scaled(-1.0, &small).concat().l2_norm())
    };
    let local_order = (local(0.1)? / local(0.05)?).log2();
    let advance = |h: f64| -> Result<SymState> {
        let mut w = w0.clone();
        let n = (1.0 / h).round() as usize;
        for _ in 0..n {
            w = step(&w, h)?;
        }
        Ok(w)
    };
    let a = advance(0.1)?;
    let b = advance(0.05)?;
    let c = advance(0.025)?;
    let e1 = a.add_scaled(-1.0, &b).concat().l2_norm();
    let e2 = b.add_scaled(-1.0, &c).concat().l2_norm();
    let global_order = (e1 / e2).log2();
    let gauss = |h: f64| -> Result<f64> {
        Ok(step(&w0, h)?.constraint_residuals()?.gauss)
    };
    let gauss_order = (gauss(0.2)? / gauss(0.1)?).log2();
    let cfl_h = choose_dt(&w0, 0.4)?;
    let passed = (local_order - 5.0).abs() <= 0.2
        && (global_order - 4.0).abs() <= 0.2
        && gauss_order >= 4.5
        && cfl_h > 0.0;
    Ok(CheckOutcome {
        name: "convergence".into(),
        passed,
        c_hat: global_order,
        bound: 4.2,
        worst_fresh: local_order,
        failing_seed: if passed { None } else { Some(seed) },
        calibration_trials: 0,
        fresh_trials: 3,
        details: json!({
            "local_order": local_order,
            "global_order": global_order,
            "gauss_growth_order": gauss_order,
        }),
    })
}

/// Partition suite: partition-of-unity defect, exact annulus support, and
/// reconstruction on random fields, over 16/32/64-point 2D grids.
pub fn check_partition(recon_fields_per_grid: usize, base_seed: u64) -> Result<CheckOutcome> {
    let mut worst_defect = 0.0f64;
    let mut worst_recon = 0.0f64;
    let mut support_ok = true;
    let mut failing_seed = None;
    for n in [16usize, 32, 64] {
        let grid = GridSpec::new(2, n)?;
        let part = DyadicPartition::build(&grid);
        worst_defect = worst_defect.max(part.partition_defect());
        for q in part.q_min()..=part.q_max() {
            let lo = 0.75 * (q as f64).exp2();
            let hi = 8.0 / 3.0 * (q as f64).exp2();
            for m in 0..=grid.max_k_sq() {
                let r = (m as f64).sqrt();
                if (r < lo || r > hi) && part.block_symbol(q, m) != 0.0 {
                    support_ok = false;
                }
            }
        }
        let kmax = (n / 2 - 1) as f64;
        for i in 0..recon_fields_per_grid {
            let seed = base_seed + i as u64 + n as u64 * 1000;
            let f = synth::random_field(grid, 1, seed, 1.0, kmax, 0.7);
            let mut sum = SpectralField::zeros(grid, 1);
            for q in part.block_range(Decomposition::Inhomogeneous) {
                sum = sum.add_scaled(1.0, &part.block(&f, q, Decomposition::Inhomogeneous))?;
            }
            let rel = sum.sub(&f)?.l2_norm() / f.l2_norm();
            if rel > worst_recon {
                worst_recon = rel;
            }
            if rel > 1e-11 && failing_seed.is_none() {
                failing_seed = Some(seed);
            }
        }
    }
    let passed = worst_defect <= 1e-12 && support_ok && failing_seed.is_none();
    Ok(CheckOutcome {
        name: "partition".into(),
        passed,
        c_hat: worst_defect,
        bound: 1e-12,
        worst_fresh: worst_recon,
        failing_seed,
        calibration_trials: 0,
        fresh_trials: recon_fields_per_grid * 3,
        details: json!({
            "worst_partition_defect": worst_defect,
            "support_exact": support_ok,
            "worst_reconstruction_rel": worst_recon,
        }),
    })
}

/// Bernstein suite at `p = 2`: annulus-supported random fields must yield
/// `‖∇f‖_{L²}/‖f‖_{L²} ∈ [(3/4)·2^q, (8/3)·2^q]` within 1e-9.
pub fn check_bernstein_p2(
    grid: GridSpec,
    fields_per_q: usize,
    base_seed: u64,
) -> Result<CheckOutcome> {
    let q_hi = ((grid.points_per_axis() / 2) as f64 * 3.0 / 8.0).log2().floor() as i32;
    let mut worst_low = f64::INFINITY;
    let mut worst_high = 0.0f64;
    let mut failing_seed = None;
    let mut tested = 0usize;
    for q in -1..=q_hi {
        for i in 0..fields_per_q {
            let seed = base_seed + i as u64 + (q + 2) as u64 * 10_000;
            let f = synth::random_annulus(grid, 1, seed, 1.0, q);
            if f.l2_norm() == 0.0 {
                continue;
            }
            let r = check_bernstein(&f, q, 2.0)?;
            tested += 1;
            worst_low = worst_low.min(r.forward);
            worst_high = worst_high.max(r.forward);
            if (r.forward < 0.75 - 1e-9 || r.forward > 8.0 / 3.0 + 1e-9) && failing_seed.is_none()
            {
                failing_seed = Some(seed);
            }
        }
    }
    Ok(CheckOutcome {
        name: "bernstein".into(),
        passed: failing_seed.is_none(),
        c_hat: 8.0 / 3.0,
        bound: 8.0 / 3.0 + 1e-9,
        worst_fresh: worst_high,
        failing_seed,
        calibration_trials: 0,
        fresh_trials: tested,
        details: json!({
            "q_range": [-1, q_hi],
            "min_ratio": worst_low,
            "max_ratio": worst_high,
        }),
    })
}

/// Poincaré suite: equality cases at `|k| = 1, 2` and the `<= 1` bound on
/// random mean-zero fields.
pub fn check_poincare(grid: GridSpec, trials: usize, base_seed: u64) -> Result<CheckOutcome> {
    let f1 = SpectralField::from_fn(grid, 1, |x, _| x[0].sin())?;
    let f2 = SpectralField::from_fn(grid, 1, |x, _| (2.0 * x[0]).sin())?;
    let r1 = poincare_check(&f1)?;
    let r2 = poincare_check(&f2)?;
    let exact_ok = (r1 - 1.0).abs() <= 1e-12 && (r2 - 0.5).abs() <= 1e-12;
    let kmax = (grid.points_per_axis() / 2 - 1) as f64;
    let mut worst = 0.0f64;
    let mut failing_seed = None;
    for i in 0..trials {
        let seed = base_seed + i as u64;
        let f = synth::random_mean_zero(grid, 1, seed, 1.0, kmax, trial_alpha(seed));
        if f.l2_norm() == 0.0 {
            continue;
        }
        let r = poincare_check(&f)?;
        worst = worst.max(r);
        if r > 1.0 + 1e-12 && failing_seed.is_none() {
            failing_seed = Some(seed);
        }
    }
    // a nonzero-mean field must be rejected
    let biased = SpectralField::from_fn(grid, 1, |x, _| 1.0 + x[0].sin())?;
    let rejects = poincare_check(&biased).is_err();
    Ok(CheckOutcome {
        name: "poincare".into(),
        passed: exact_ok && failing_seed.is_none() && rejects,
        c_hat: 1.0,
        bound: 1.0 + 1e-12,
        worst_fresh: worst,
        failing_seed,
        calibration_trials: 0,
        fresh_trials: trials,
        details: json!({
            "ratio_at_k1": r1,
            "ratio_at_k2": r2,
            "rejects_nonzero_mean": rejects,
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn grid2() -> GridSpec {
        GridSpec::new(2, 32).unwrap()
    }

    #[test]
    fn poincare_reference_values() {
        let g = grid2();
        let f1 = SpectralField::from_fn(g, 1, |x, _| x[0].sin()).unwrap();
        assert_abs_diff_eq!(poincare_check(&f1).unwrap(), 1.0, epsilon = 1e-13);
        let f2 = SpectralField::from_fn(g, 1, |x, _| (2.0 * x[0]).sin()).unwrap();
        assert_abs_diff_eq!(poincare_check(&f2).unwrap(), 0.5, epsilon = 1e-13);
        for seed in 0..20u64 {
            let f = synth::random_mean_zero(g, 1, seed, 1.0, 12.0, 1.0);
            assert!(poincare_check(&f).unwrap() <= 1.0 + 1e-12);
        }
        let biased = SpectralField::from_fn(g, 1, |_, _| 1.0).unwrap();
        assert!(poincare_check(&biased).is_err());
    }

    #[test]
    fn product_constant_consistency() {
        // f = g = c: ratio = 1 / ‖1‖_B with ‖1‖_B = 2^{-s}·(2π)^{d/2}.
        let g = grid2();
        let part = DyadicPartition::build(&g);
        let sc = critical_regularity(2);
        let spec = BesovSpec::inhomogeneous(sc, 2.0, 1.0);
        let c = 1.7;
        let f = SpectralField::from_fn(g, 1, |_, _| c).unwrap();
        let fg = f.pointwise_mul(&f).unwrap();
        let ratio = besov_norm(&fg, &spec, &part).unwrap()
            / besov_norm(&f, &spec, &part).unwrap().powi(2);
        let norm_one = (-sc).exp2() * (2.0 * std::f64::consts::PI);
        assert_abs_diff_eq!(ratio, 1.0 / norm_one, epsilon = 1e-10);
    }

    #[test]
    fn product_two_modes_hand_evaluation() {
        // f, g single modes with separated supports: fg has exactly two
        // modes; the Besov norm follows from the partition symbols.
        let g2 = grid2();
        let part = DyadicPartition::build(&g2);
        let sc = critical_regularity(2);
        let spec = BesovSpec::inhomogeneous(sc, 2.0, 1.0);
        let f = synth::single_mode(g2, [1, 0, 0], 1.0, 0.0);
        let h = synth::single_mode(g2, [6, 0, 0], 1.0, 0.0);
        let fg = f.pointwise_mul(&h).unwrap();
        // cos(x)cos(6x) = (cos 5x + cos 7x)/2; each term has L² norm
        // (1/2)·√(2π²) and lands in the blocks active at |k| = 5, 7.
        let l2_half_mode = 0.5 * (2.0 * std::f64::consts::PI * std::f64::consts::PI).sqrt();
        let mut expect = 0.0;
        for q in part.block_range(Decomposition::Inhomogeneous) {
            let w5 = part.symbol(q, 25, Decomposition::Inhomogeneous);
            let w7 = part.symbol(q, 49, Decomposition::Inhomogeneous);
            // blocks are supported on one |k| ring each here; the two rings
            // never share a block weight contribution at the same q unless
            // both symbols are nonzero, in which case Parseval adds in
            // quadrature.
            let block_l2 = ((w5 * l2_half_mode).powi(2) + (w7 * l2_half_mode).powi(2)).sqrt();
            expect += (q as f64 * sc).exp2() * block_l2;
        }
        let got = besov_norm(&fg, &spec, &part).unwrap();
        assert_abs_diff_eq!(got, expect, epsilon = 1e-10);
    }

    #[test]
    fn product_checker_calibrates_and_passes() {
        let out = check_product_estimate(grid2(), 25, 25, 4000).unwrap();
        assert!(out.passed, "failing seed {:?}", out.failing_seed);
        assert!(out.c_hat > 0.0);
    }

    #[test]
    fn composition_gamma_three_is_trivial() {
        // Φ ≡ 0 at γ = 3: the left side of the value bound vanishes.
        let g = grid2();
        let series = trial_series(g, 5, 0.2, 5).unwrap();
        let mapped = phi_series(&series, 3.0).unwrap();
        for (_, f) in &mapped {
            assert!(f.lp_norm(f64::INFINITY).unwrap() < 1e-13);
        }
    }

    #[test]
    fn composition_gamma_two_algebraic_identity() {
        // γ = 2: Φ(f) - Φ(g) = (f-g)(f+g)/4 pointwise.
        let g2 = grid2();
        let f = synth::random_field(g2, 1, 3, 0.3, 7.0, 1.0);
        let g = synth::random_field(g2, 1, 4, 0.25, 7.0, 1.0);
        let lhs = f
            .map_values(|v| phi(v, 2.0).unwrap())
            .unwrap()
            .sub(&g.map_values(|v| phi(v, 2.0).unwrap()).unwrap())
            .unwrap();
        let rhs = f
            .sub(&g)
            .unwrap()
            .pointwise_mul(&f.add_scaled(1.0, &g).unwrap())
            .unwrap()
            .scaled(0.25);
        assert!(lhs.sub(&rhs).unwrap().lp_norm(f64::INFINITY).unwrap() < 1e-14);
        // f = g: difference bound left side is zero
        let zero = f
            .map_values(|v| phi(v, 2.0).unwrap())
            .unwrap()
            .sub(&f.map_values(|v| phi(v, 2.0).unwrap()).unwrap())
            .unwrap();
        assert_eq!(zero.lp_norm(f64::INFINITY).unwrap(), 0.0);
    }

    #[test]
    fn composition_checkers_pass() {
        let g = grid2();
        let a = check_composition_value(g, 2.0, 15, 15, 5000).unwrap();
        assert!(a.passed, "value checker failed at {:?}", a.failing_seed);
        let b = check_composition_difference(g, 2.0, 10, 10, 5200).unwrap();
        assert!(b.passed, "difference checker failed at {:?}", b.failing_seed);
    }

    #[test]
    fn commutator_constant_f_vanishes() {
        let g2 = grid2();
        let part = DyadicPartition::build(&g2);
        let f = SpectralField::from_fn(g2, 1, |_, _| 3.0).unwrap();
        let g = synth::random_field(g2, 1, 6, 1.0, 7.0, 1.0);
        let grad_g = g.gradient().unwrap();
        let fg = grad_g.pointwise_mul(&f).unwrap();
        for q in part.block_range(Decomposition::Inhomogeneous) {
            let a = part
                .block(&grad_g, q, Decomposition::Inhomogeneous)
                .pointwise_mul(&f)
                .unwrap();
            let b = part.block(&fg, q, Decomposition::Inhomogeneous);
            assert!(
                a.sub(&b).unwrap().lp_norm(f64::INFINITY).unwrap() < 1e-12,
                "q = {q}"
            );
        }
    }

    #[test]
    fn commutator_two_mode_convolution_oracle() {
        // f = cos(k1·x), g = cos(k2·x): the commutator spectrum follows from
        // explicit convolution of the four mode pairs.
        let g2 = grid2();
        let part = DyadicPartition::build(&g2);
        let k1 = [1i64, 0, 0];
        let k2 = [0i64, 5, 0];
        let f = synth::single_mode(g2, k1, 1.0, 0.0);
        let g = synth::single_mode(g2, k2, 1.0, 0.0);
        let grad_g = g.gradient().unwrap();
        let fg = grad_g.pointwise_mul(&f).unwrap();
        let q = 2; // block containing |k2| = 5
        let a = part
            .block(&grad_g, q, Decomposition::Inhomogeneous)
            .pointwise_mul(&f)
            .unwrap();
        let b = part.block(&fg, q, Decomposition::Inhomogeneous);
        let comm = a.sub(&b).unwrap();
        // oracle: for each pair (±k1, ±k2), coefficient
        // (1/2)(i k2 /2)·(m_q(|k2|) - m_q(|k1+k2|)) at wavevector k1 + k2.
        let m = g2.num_points();
        let mut expect = vec![rustfft::num_complex::Complex64::default(); m * 2];
        let m_q = |k: [i64; 3]| {
            part.symbol(q, (k[0] * k[0] + k[1] * k[1]) as u64, Decomposition::Inhomogeneous)
        };
        for (s1, s2) in [(1i64, 1i64), (1, -1), (-1, 1), (-1, -1)] {
            let ka = [s1 * k1[0], s1 * k1[1], 0];
            let kb = [s2 * k2[0], s2 * k2[1], 0];
            let sum = [ka[0] + kb[0], ka[1] + kb[1], 0];
            let weight = m_q(kb) - m_q(sum);
            for flat in 0..m {
                if g2.wavevector(flat) == sum {
                    for axis in 0..2 {
                        let deriv = rustfft::num_complex::Complex64::new(0.0, kb[axis] as f64);
                        expect[flat * 2 + axis] += deriv * 0.25 * weight;
                    }
                }
            }
        }
        let expect_field = SpectralField::from_spectral(g2, 2, expect).unwrap();
        let diff = comm.sub(&expect_field).unwrap().lp_norm(f64::INFINITY).unwrap();
        assert!(diff < 1e-12, "two-mode oracle defect {diff}");
    }

    #[test]
    fn commutator_checker_passes() {
        let out = check_commutator_estimate(grid2(), 20, 20, 6000).unwrap();
        assert!(out.passed, "failing seed {:?}", out.failing_seed);
    }

    #[test]
    fn embedding_and_bernstein_linf_checkers() {
        let g = grid2();
        let a = check_embedding(g, 30, 30, 3000).unwrap();
        assert!(a.passed);
        let b = check_bernstein_linf(g, 30, 30, 2000).unwrap();
        assert!(b.passed);
        assert!(b.c_hat <= 4.0, "L∞ Bernstein constant {}", b.c_hat);
    }

    #[test]
    fn splitting_identity_checker() {
        let out = check_splitting_identity(grid2(), 20, 20, 7000).unwrap();
        assert!(out.passed, "failing seed {:?}", out.failing_seed);
    }

    #[test]
    fn partition_poincare_bernstein_suites() {
        let p = check_partition(10, 1000).unwrap();
        assert!(p.passed, "{:?}", p.details);
        let b = check_bernstein_p2(grid2(), 10, 2000).unwrap();
        assert!(b.passed, "{:?}", b.details);
        let pc = check_poincare(grid2(), 25, 7000).unwrap();
        assert!(pc.passed, "{:?}", pc.details);
    }

    #[test]
    fn decay_exponent_fit_recovers_rate() {
        let times: Vec<f64> = (0..50).map(|i| i as f64 * 0.2).collect();
        let values: Vec<f64> = times.iter().map(|t| 3.0 * (-0.7 * t).exp()).collect();
        let lambda = fit_decay_exponent(&times, &values).unwrap();
        assert_abs_diff_eq!(lambda, 0.7, epsilon = 1e-9);
    }
}
