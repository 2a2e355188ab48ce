//! Classical RK4 time stepping for the symmetrized system, CFL step control,
//! and the run monitors: constraint drift and the blow-up criterion
//! functional `∫ ‖(∇n±, ∇u±, ∇E, ∇B)‖_{L^∞} dt` (accumulated in physical
//! time over the physical-variable view; the sum-over-groups convention is
//! used for the composite norm).
//!
//! The integrator evolves the symmetrized clock `t_sym`; outputs report both
//! `t_sym` and `t_phys = t_sym/√γ`. A trip of the blow-up monitor means "the
//! criterion functional exceeded its threshold" or "gradients exhausted the
//! resolution scale 1/h" — it is a guard, never a claim of PDE blow-up.

use crate::error::{Error, Result};
use crate::model::{RhsFlags, SymState};
use serde::{Deserialize, Serialize};

/// One classical RK4 step of the full model.
pub fn step(w: &SymState, h: f64) -> Result<SymState> {
    step_with(w, h, &RhsFlags::default())
}

/// RK4 step with term switches (linear-wave and reversibility tests).
pub fn step_with(w: &SymState, h: f64, flags: &RhsFlags) -> Result<SymState> {
    if !(h != 0.0 && h.is_finite()) {
        return Err(Error::Config(format!("step size must be finite and nonzero, got {h}")));
    }
    let k1 = w.rhs_with(flags)?;
    let k2 = w.add_scaled(0.5 * h, &k1).rhs_with(flags)?;
    let k3 = w.add_scaled(0.5 * h, &k2).rhs_with(flags)?;
    let k4 = w.add_scaled(h, &k3).rhs_with(flags)?;
    let mut incr = k1;
    incr = incr.add_scaled(2.0, &k2);
    incr = incr.add_scaled(2.0, &k3);
    incr = incr.add_scaled(1.0, &k4);
    let next = w.add_scaled(h / 6.0, &incr);
    next.ensure_admissible()?;
    Ok(next)
}

/// CFL step size: `h = cfl · Δx / λ_max` with
/// `λ_max = max( max over grid/species (|υ| + (γ-1)/2·ϱ + 1), 1/√γ )`
/// (acoustic characteristic speed vs. the Maxwell block speed).
pub fn choose_dt(w: &SymState, cfl: f64) -> Result<f64> {
    if !(cfl > 0.0 && cfl <= 1.0) {
        return Err(Error::Config(format!("cfl must be in (0, 1], got {cfl}")));
    }
    let grid = w.grid();
    let gm = 0.5 * (w.params.gamma - 1.0);
    let mut lambda: f64 = w.params.inv_sqrt_gamma();
    for (rho, v) in [(&w.rho_plus, &w.v_plus), (&w.rho_minus, &w.v_minus)] {
        for flat in 0..grid.num_points() {
            let speed = v.magnitude(flat) + gm * rho.value(flat, 0) + 1.0;
            if !speed.is_finite() {
                return Err(Error::NonFinite("state in CFL estimate".into()));
            }
            lambda = lambda.max(speed);
        }
    }
    Ok(cfl * grid.spacing() / lambda)
}

/// Why a run tripped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TripReason {
    /// The accumulated criterion functional exceeded the configured threshold.
    ThresholdExceeded,
    /// Instantaneous gradients exceeded the resolution scale `1/h`.
    ResolutionExhausted,
    /// The admissibility set was left mid-step.
    AdmissibilityLost,
}

/// Instantaneous monitor readings at one time-series point.
#[derive(Debug, Clone, Copy)]
pub struct MonitorSample {
    pub integrand: f64,
    pub gauss: f64,
    pub div_b: f64,
}

/// Monitored quantities along a run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MonitorState {
    /// `∫ ‖(∇n±, ∇u±, ∇E, ∇B)‖_{L^∞} dt` (trapezoidal, physical time).
    pub blowup_integral: f64,
    pub max_gauss: f64,
    pub max_div_b: f64,
    pub tripped: Option<TripReason>,
    /// Time (symmetrized clock) of the trip, if any.
    pub trip_time: Option<f64>,
    prev_integrand: Option<f64>,
}

impl MonitorState {
    pub fn new() -> MonitorState {
        MonitorState {
            blowup_integral: 0.0,
            max_gauss: 0.0,
            max_div_b: 0.0,
            tripped: None,
            trip_time: None,
            prev_integrand: None,
        }
    }

    /// The instantaneous criterion integrand: sum over the six physical-field
    /// groups of the `L^∞` norm of the (spectral) gradient.
    pub fn gradient_linf(w: &SymState) -> Result<f64> {
        let phys = w.to_physical()?;
        let mut total = 0.0;
        for f in [
            &phys.n_plus,
            &phys.n_minus,
            &phys.u_plus,
            &phys.u_minus,
            &phys.e,
            &phys.b,
        ] {
            let grad = if f.components() == 1 {
                f.gradient()?
            } else {
                f.jacobian()?
            };
            total += grad.lp_norm(f64::INFINITY)?;
        }
        Ok(total)
    }

    /// Accumulate monitors after the step to `t_sym` (step size `h_sym`).
    /// The criterion integral uses physical time `dt = h_sym/√γ`. Returns the
    /// instantaneous sample for time-series output.
    pub fn update(
        &mut self,
        w: &SymState,
        t_sym: f64,
        h_sym: f64,
        blowup_threshold: f64,
    ) -> Result<MonitorSample> {
        let integrand = Self::gradient_linf(w)?;
        if let Some(prev) = self.prev_integrand {
            let dt_phys = h_sym / w.params.sqrt_gamma();
            self.blowup_integral += 0.5 * (prev + integrand) * dt_phys;
        }
        self.prev_integrand = Some(integrand);
        let res = w.constraint_residuals()?;
        self.max_gauss = self.max_gauss.max(res.gauss);
        self.max_div_b = self.max_div_b.max(res.div_b);
        if self.tripped.is_none() {
            if self.blowup_integral > blowup_threshold {
                self.tripped = Some(TripReason::ThresholdExceeded);
                self.trip_time = Some(t_sym);
            } else if h_sym > 0.0 && integrand > 1.0 / h_sym {
                self.tripped = Some(TripReason::ResolutionExhausted);
                self.trip_time = Some(t_sym);
            }
        }
        Ok(MonitorSample {
            integrand,
            gauss: res.gauss,
            div_b: res.div_b,
        })
    }

    pub fn mark_admissibility_lost(&mut self, t_sym: f64) {
        if self.tripped.is_none() {
            self.tripped = Some(TripReason::AdmissibilityLost);
            self.trip_time = Some(t_sym);
        }
    }
}

impl Default for MonitorState {
    fn default() -> Self {
        MonitorState::new()
    }
}
