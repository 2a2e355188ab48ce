//! The symmetrized two-fluid Euler-Maxwell system on the torus.
//!
//! Physical variables are densities and velocities of two charged carriers
//! `(n±, u±)` plus the electromagnetic fields `(E, B)`. The solver's
//! canonical state is the symmetrized unknown
//! `W = (ϱ+, υ+, ϱ-, υ-, Ẽ, B̃)` obtained from the change of variables
//!
//! ```text
//!   ϱ± = 2/(γ-1) · (n±^{(γ-1)/2} - 1),   υ± = u±/√γ,
//!   Ẽ  = E/√γ,                            B̃  = B/√γ - B̄,
//! ```
//!
//! with the time axis rescaled by `√γ` (owned by the integrator's clock).
//! The evolution is
//!
//! ```text
//!   ∂_t ϱ± + υ±·∇ϱ± + a± ∇·υ± = 0,                 a± = (γ-1)/2·ϱ± + 1
//!   ∂_t υ± + a± ∇ϱ± + υ±·∇υ± = ∓(Ẽ/√γ + υ±×(B̃+B̄)) - υ±/√γ
//!   ∂_t Ẽ  - (1/√γ) ∇×B̃ = (1/√γ)[(1+Φ(ϱ+)+ϱ+)υ+ - (1+Φ(ϱ-)+ϱ-)υ-]
//!   ∂_t B̃  + (1/√γ) ∇×Ẽ = 0
//! ```
//!
//! subject to the propagated constraints
//! `∇·Ẽ = -(1/√γ)[Φ(ϱ+)+ϱ+] + (1/√γ)[Φ(ϱ-)+ϱ-]` and `∇·B̃ = 0`, where
//! `Φ(ρ) = ((γ-1)/2·ρ + 1)^{2/(γ-1)} - ρ - 1` (smooth, `Φ(0) = Φ'(0) = 0`,
//! and `1 + ρ + Φ(ρ) = n`). The system is symmetric hyperbolic: the flux
//! matrices returned by [`flux_matrices`] are symmetric, with two acoustic
//! blocks and a constant Maxwell block.
//!
//! Spatial derivatives are spectral; pointwise products are formed in
//! physical space and every assembled tendency is 2/3-rule dealiased.
//! In 2D the scalar-curl (TE) convention applies: `B̃` is a scalar and
//! `υ×b = (υ_2 b, -υ_1 b)`.

use crate::dyadic::{besov_norm, BesovSpec, DyadicPartition};
use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::GridSpec;
use crate::synth;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Critical regularity index `s_c = 1 + dim/2`.
pub fn critical_regularity(dim: usize) -> f64 {
    1.0 + dim as f64 / 2.0
}

/// Number of components of the magnetic field (scalar in 2D, 3-vector in 3D).
pub fn b_components(dim: usize) -> usize {
    if dim == 2 {
        1
    } else {
        3
    }
}

/// Length of the flattened state vector at one grid point.
pub fn state_len(dim: usize) -> usize {
    2 * (1 + dim) + dim + b_components(dim)
}

/// Model parameters. The relaxation times, Debye length and inverse light
/// speed of the primitive system are all fixed to one; the adiabatic
/// exponent `γ > 1` and the background field `B̄` (in symmetrized units)
/// remain free.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhysParams {
    pub gamma: f64,
    /// Background field in symmetrized units; length 1 in 2D, 3 in 3D.
    pub b_bar: Vec<f64>,
}

impl PhysParams {
    pub fn new(gamma: f64, b_bar: Vec<f64>, dim: usize) -> Result<Self> {
        if !(gamma > 1.0) || !gamma.is_finite() {
            return Err(Error::Config(format!(
                "gamma must be finite and > 1 (the isothermal case is out of scope), got {gamma}"
            )));
        }
        if b_bar.len() != b_components(dim) {
            return Err(Error::Config(format!(
                "b_bar must have {} component(s) in {dim}D, got {}",
                b_components(dim),
                b_bar.len()
            )));
        }
        Ok(PhysParams { gamma, b_bar })
    }

    /// Default background: scalar 1 in 2D, (0, 0, 1) in 3D.
    pub fn default_b_bar(dim: usize) -> Vec<f64> {
        if dim == 2 {
            vec![1.0]
        } else {
            vec![0.0, 0.0, 1.0]
        }
    }

    pub fn sqrt_gamma(&self) -> f64 {
        self.gamma.sqrt()
    }

    pub fn inv_sqrt_gamma(&self) -> f64 {
        1.0 / self.gamma.sqrt()
    }
}

/// `Φ(ρ) = ((γ-1)/2·ρ + 1)^{2/(γ-1)} - ρ - 1` on the admissible set
/// `(γ-1)/2·ρ + 1 > 0`.
pub fn phi(rho: f64, gamma: f64) -> Result<f64> {
    let a = 0.5 * (gamma - 1.0) * rho + 1.0;
    if !(a > 0.0) {
        return Err(Error::Vacuum(format!(
            "Φ outside admissible set: (γ-1)/2·ρ + 1 = {a}"
        )));
    }
    Ok(a.powf(2.0 / (gamma - 1.0)) - rho - 1.0)
}

/// `Φ'(ρ) = ((γ-1)/2·ρ + 1)^{(3-γ)/(γ-1)} - 1`.
pub fn phi_prime(rho: f64, gamma: f64) -> Result<f64> {
    let a = 0.5 * (gamma - 1.0) * rho + 1.0;
    if !(a > 0.0) {
        return Err(Error::Vacuum(format!(
            "Φ' outside admissible set: (γ-1)/2·ρ + 1 = {a}"
        )));
    }
    Ok(a.powf(2.0 / (gamma - 1.0) - 1.0) - 1.0)
}

/// Density from the symmetrized variable: `n = 1 + ρ + Φ(ρ) = a^{2/(γ-1)}`.
fn density_of(rho: f64, gamma: f64) -> f64 {
    (0.5 * (gamma - 1.0) * rho + 1.0).powf(2.0 / (gamma - 1.0))
}

/// Symmetrized variable from the density: `ρ = 2/(γ-1)·(n^{(γ-1)/2} - 1)`.
fn rho_of(n: f64, gamma: f64) -> f64 {
    2.0 / (gamma - 1.0) * (n.powf(0.5 * (gamma - 1.0)) - 1.0)
}

/// Which terms the tendency includes. The defaults give the full model;
/// the switches exist for the linear-wave oracle and reversibility tests.
#[derive(Debug, Clone, Copy)]
pub struct RhsFlags {
    /// Evolve the fluid unknowns (ϱ±, υ±). Off: Maxwell-only dynamics.
    pub evolve_fluid: bool,
    /// Include the relaxation terms `-υ±/√γ`.
    pub relaxation: bool,
}

impl Default for RhsFlags {
    fn default() -> Self {
        RhsFlags {
            evolve_fluid: true,
            relaxation: true,
        }
    }
}

/// `L²` norms of the two constraint defects.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ConstraintResiduals {
    pub gauss: f64,
    pub div_b: f64,
}

/// The symmetrized state `W`.
#[derive(Debug, Clone)]
pub struct SymState {
    pub rho_plus: SpectralField,
    pub rho_minus: SpectralField,
    pub v_plus: SpectralField,
    pub v_minus: SpectralField,
    pub e: SpectralField,
    pub b: SpectralField,
    pub params: PhysParams,
}

/// The physical-variable view `(n±, u±, E, B)`.
#[derive(Debug, Clone)]
pub struct PhysState {
    pub n_plus: SpectralField,
    pub n_minus: SpectralField,
    pub u_plus: SpectralField,
    pub u_minus: SpectralField,
    pub e: SpectralField,
    pub b: SpectralField,
}

impl SymState {
    pub fn equilibrium(grid: GridSpec, params: PhysParams) -> SymState {
        let dim = grid.dim();
        SymState {
            rho_plus: SpectralField::zeros(grid, 1),
            rho_minus: SpectralField::zeros(grid, 1),
            v_plus: SpectralField::zeros(grid, dim),
            v_minus: SpectralField::zeros(grid, dim),
            e: SpectralField::zeros(grid, dim),
            b: SpectralField::zeros(grid, b_components(dim)),
            params,
        }
    }

    pub fn grid(&self) -> &GridSpec {
        self.rho_plus.grid()
    }

    pub fn dim(&self) -> usize {
        self.grid().dim()
    }

    /// Stack all components into one field, ordered
    /// `(ϱ+, υ+, ϱ-, υ-, Ẽ, B̃)`.
    pub fn concat(&self) -> SpectralField {
        SpectralField::stack(&[
            &self.rho_plus,
            &self.v_plus,
            &self.rho_minus,
            &self.v_minus,
            &self.e,
            &self.b,
        ])
        .expect("state fields share one grid")
    }

    /// Rebuild a state from a stacked field (inverse of [`SymState::concat`]).
    pub fn from_concat(params: PhysParams, stacked: &SpectralField) -> Result<SymState> {
        let grid = *stacked.grid();
        let dim = grid.dim();
        if stacked.components() != state_len(dim) {
            return Err(Error::ShapeMismatch(format!(
                "stacked state needs {} components, got {}",
                state_len(dim),
                stacked.components()
            )));
        }
        let take = |lo: usize, len: usize| -> SpectralField {
            let parts: Vec<SpectralField> =
                (lo..lo + len).map(|c| stacked.component(c)).collect();
            let refs: Vec<&SpectralField> = parts.iter().collect();
            SpectralField::stack(&refs).expect("contiguous components")
        };
        let bc = b_components(dim);
        Ok(SymState {
            rho_plus: take(0, 1),
            v_plus: take(1, dim),
            rho_minus: take(1 + dim, 1),
            v_minus: take(2 + dim, dim),
            e: take(2 + 2 * dim, dim),
            b: take(2 + 3 * dim, bc),
            params,
        })
    }

    pub fn add_scaled(&self, c: f64, other: &SymState) -> SymState {
        SymState {
            rho_plus: self.rho_plus.add_scaled(c, &other.rho_plus).expect("shape"),
            rho_minus: self
                .rho_minus
                .add_scaled(c, &other.rho_minus)
                .expect("shape"),
            v_plus: self.v_plus.add_scaled(c, &other.v_plus).expect("shape"),
            v_minus: self.v_minus.add_scaled(c, &other.v_minus).expect("shape"),
            e: self.e.add_scaled(c, &other.e).expect("shape"),
            b: self.b.add_scaled(c, &other.b).expect("shape"),
            params: self.params.clone(),
        }
    }

    pub fn scaled(&self, c: f64) -> SymState {
        SymState {
            rho_plus: self.rho_plus.scaled(c),
            rho_minus: self.rho_minus.scaled(c),
            v_plus: self.v_plus.scaled(c),
            v_minus: self.v_minus.scaled(c),
            e: self.e.scaled(c),
            b: self.b.scaled(c),
            params: self.params.clone(),
        }
    }

    /// Largest pointwise magnitude over all state components.
    pub fn max_abs(&self) -> f64 {
        [
            &self.rho_plus,
            &self.rho_minus,
            &self.v_plus,
            &self.v_minus,
            &self.e,
            &self.b,
        ]
        .iter()
        .map(|f| f.lp_norm(f64::INFINITY).expect("p = inf valid"))
        .fold(0.0, f64::max)
    }

    /// `min over grid and species of (γ-1)/2·ϱ± + 1`; must stay positive.
    pub fn admissibility_margin(&self) -> f64 {
        let gm = 0.5 * (self.params.gamma - 1.0);
        let mut min = f64::INFINITY;
        for rho in [&self.rho_plus, &self.rho_minus] {
            for v in rho.physical() {
                min = min.min(gm * v + 1.0);
            }
        }
        min
    }

    pub fn ensure_admissible(&self) -> Result<()> {
        let m = self.admissibility_margin();
        if !(m > 0.0) {
            return Err(Error::Vacuum(format!(
                "admissibility margin (γ-1)/2·ϱ + 1 reached {m}"
            )));
        }
        Ok(())
    }

    pub fn to_physical(&self) -> Result<PhysState> {
        from_symmetric(self)
    }

    /// Full tendency `∂_t W` of the symmetrized system.
    pub fn rhs(&self) -> Result<SymState> {
        self.rhs_with(&RhsFlags::default())
    }

    /// Tendency with term switches (see [`RhsFlags`]).
    pub fn rhs_with(&self, flags: &RhsFlags) -> Result<SymState> {
        self.ensure_admissible()?;
        let grid = *self.grid();
        let dim = grid.dim();
        let bc = b_components(dim);
        let m = grid.num_points();
        let g = self.params.inv_sqrt_gamma();
        let gamma = self.params.gamma;
        let gm = 0.5 * (gamma - 1.0);
        let b_bar = &self.params.b_bar;

        // Spectral derivatives.
        let grad_rp = self.rho_plus.gradient()?;
        let grad_rm = self.rho_minus.gradient()?;
        let div_vp = self.v_plus.divergence()?;
        let div_vm = self.v_minus.divergence()?;
        let jac_vp = self.v_plus.jacobian()?; // [c*dim + axis]
        let jac_vm = self.v_minus.jacobian()?;
        let curl_b = self.b.curl()?; // dim components in both 2D and 3D
        let curl_e = self.e.curl()?; // bc components

        let mut drho_p = vec![0.0; m];
        let mut drho_m = vec![0.0; m];
        let mut dv_p = vec![0.0; m * dim];
        let mut dv_m = vec![0.0; m * dim];
        let mut de = vec![0.0; m * dim];
        let mut db = vec![0.0; m * bc];

        for flat in 0..m {
            let rp = self.rho_plus.value(flat, 0);
            let rm = self.rho_minus.value(flat, 0);
            let ap = gm * rp + 1.0;
            let am = gm * rm + 1.0;
            // n = 1 + ρ + Φ(ρ); powf is safe here, admissibility was checked.
            let np = ap.powf(2.0 / (gamma - 1.0));
            let nm = am.powf(2.0 / (gamma - 1.0));

            let mut vp = [0.0f64; 3];
            let mut vm = [0.0f64; 3];
            let mut ev = [0.0f64; 3];
            for a in 0..dim {
                vp[a] = self.v_plus.value(flat, a);
                vm[a] = self.v_minus.value(flat, a);
                ev[a] = self.e.value(flat, a);
            }

            if flags.evolve_fluid {
                let mut adv_p = 0.0;
                let mut adv_m = 0.0;
                for a in 0..dim {
                    adv_p += vp[a] * grad_rp.value(flat, a);
                    adv_m += vm[a] * grad_rm.value(flat, a);
                }
                drho_p[flat] = -adv_p - ap * div_vp.value(flat, 0);
                drho_m[flat] = -adv_m - am * div_vm.value(flat, 0);

                let cross_p = cross_with_background(&self.b, flat, &vp, b_bar, dim);
                let cross_m = cross_with_background(&self.b, flat, &vm, b_bar, dim);
                for a in 0..dim {
                    let mut tp = -ap * grad_rp.value(flat, a);
                    let mut tm = -am * grad_rm.value(flat, a);
                    for j in 0..dim {
                        tp -= vp[j] * jac_vp.value(flat, a * dim + j);
                        tm -= vm[j] * jac_vm.value(flat, a * dim + j);
                    }
                    tp -= g * ev[a] + cross_p[a];
                    tm += g * ev[a] + cross_m[a];
                    if flags.relaxation {
                        tp -= g * vp[a];
                        tm -= g * vm[a];
                    }
                    dv_p[flat * dim + a] = tp;
                    dv_m[flat * dim + a] = tm;
                }
            }

            for a in 0..dim {
                de[flat * dim + a] =
                    g * curl_b.value(flat, a) + g * (np * vp[a] - nm * vm[a]);
            }
            for c in 0..bc {
                db[flat * bc + c] = -g * curl_e.value(flat, c);
            }
        }

        Ok(SymState {
            rho_plus: SpectralField::from_physical(grid, 1, drho_p)?.dealiased(),
            rho_minus: SpectralField::from_physical(grid, 1, drho_m)?.dealiased(),
            v_plus: SpectralField::from_physical(grid, dim, dv_p)?.dealiased(),
            v_minus: SpectralField::from_physical(grid, dim, dv_m)?.dealiased(),
            e: SpectralField::from_physical(grid, dim, de)?.dealiased(),
            b: SpectralField::from_physical(grid, bc, db)?.dealiased(),
            params: self.params.clone(),
        })
    }

    /// Tendency of the linearization about the equilibrium `W = 0` (every
    /// product of perturbations dropped; used as a Taylor-remainder oracle).
    pub fn rhs_linearized(&self) -> Result<SymState> {
        let grid = *self.grid();
        let dim = grid.dim();
        let bc = b_components(dim);
        let m = grid.num_points();
        let g = self.params.inv_sqrt_gamma();
        let b_bar = &self.params.b_bar;

        let grad_rp = self.rho_plus.gradient()?;
        let grad_rm = self.rho_minus.gradient()?;
        let div_vp = self.v_plus.divergence()?;
        let div_vm = self.v_minus.divergence()?;
        let curl_b = self.b.curl()?;
        let curl_e = self.e.curl()?;

        let mut drho_p = vec![0.0; m];
        let mut drho_m = vec![0.0; m];
        let mut dv_p = vec![0.0; m * dim];
        let mut dv_m = vec![0.0; m * dim];
        let mut de = vec![0.0; m * dim];
        let mut db = vec![0.0; m * bc];

        for flat in 0..m {
            drho_p[flat] = -div_vp.value(flat, 0);
            drho_m[flat] = -div_vm.value(flat, 0);
            let mut vp = [0.0f64; 3];
            let mut vm = [0.0f64; 3];
            for a in 0..dim {
                vp[a] = self.v_plus.value(flat, a);
                vm[a] = self.v_minus.value(flat, a);
            }
            let cross_p = cross_constant(&vp, b_bar, dim);
            let cross_m = cross_constant(&vm, b_bar, dim);
            for a in 0..dim {
                dv_p[flat * dim + a] = -grad_rp.value(flat, a)
                    - (g * self.e.value(flat, a) + cross_p[a])
                    - g * vp[a];
                dv_m[flat * dim + a] = -grad_rm.value(flat, a)
                    + (g * self.e.value(flat, a) + cross_m[a])
                    - g * vm[a];
                de[flat * dim + a] = g * curl_b.value(flat, a) + g * (vp[a] - vm[a]);
            }
            for c in 0..bc {
                db[flat * bc + c] = -g * curl_e.value(flat, c);
            }
        }

        Ok(SymState {
            rho_plus: SpectralField::from_physical(grid, 1, drho_p)?.dealiased(),
            rho_minus: SpectralField::from_physical(grid, 1, drho_m)?.dealiased(),
            v_plus: SpectralField::from_physical(grid, dim, dv_p)?.dealiased(),
            v_minus: SpectralField::from_physical(grid, dim, dv_m)?.dealiased(),
            e: SpectralField::from_physical(grid, dim, de)?.dealiased(),
            b: SpectralField::from_physical(grid, bc, db)?.dealiased(),
            params: self.params.clone(),
        })
    }

    /// Tendency assembled from the symmetric-hyperbolic form
    /// `∂_t W = -Σ_j A_j(W_I) ∂_j W + L(W)` using the pointwise flux
    /// matrices and source. Independent route from [`SymState::rhs`]; the
    /// two must agree to rounding on band-limited states.
    pub fn rhs_via_flux_form(&self) -> Result<SymState> {
        self.ensure_admissible()?;
        let grid = *self.grid();
        let dim = grid.dim();
        let len = state_len(dim);
        let m = grid.num_points();
        let stacked = self.concat();
        let deriv = stacked.jacobian()?; // [c*dim + axis]
        let mut out = vec![0.0; m * len];
        let mut w = vec![0.0; len];
        for flat in 0..m {
            for c in 0..len {
                w[c] = stacked.value(flat, c);
            }
            let mats = flux_matrices(&w, dim, self.params.gamma)?;
            let src = source_at(&w, dim, &self.params);
            for i in 0..len {
                let mut acc = src[i];
                for (j, mat) in mats.iter().enumerate() {
                    for l in 0..len {
                        let a = mat[i * len + l];
                        if a != 0.0 {
                            acc -= a * deriv.value(flat, l * dim + j);
                        }
                    }
                }
                out[flat * len + i] = acc;
            }
        }
        let tend = SpectralField::from_physical(grid, len, out)?.dealiased();
        SymState::from_concat(self.params.clone(), &tend)
    }

    /// `L²` norms of the Gauss and solenoidal constraint defects.
    /// In 2D the magnetic field is a scalar and `∇·B̃` vanishes identically.
    pub fn constraint_residuals(&self) -> Result<ConstraintResiduals> {
        let gauss = self.gauss_defect_field()?.l2_norm();
        let div_b = if self.dim() == 2 {
            0.0
        } else {
            self.b.divergence()?.l2_norm()
        };
        Ok(ConstraintResiduals { gauss, div_b })
    }

    /// The Gauss defect `∇·Ẽ + (1/√γ)[Φ(ϱ+)+ϱ+] - (1/√γ)[Φ(ϱ-)+ϱ-]`
    /// as a scalar field.
    pub fn gauss_defect_field(&self) -> Result<SpectralField> {
        let grid = *self.grid();
        let m = grid.num_points();
        let g = self.params.inv_sqrt_gamma();
        let gamma = self.params.gamma;
        let div_e = self.e.divergence()?;
        let mut vals = vec![0.0; m];
        for flat in 0..m {
            let np = density_of(self.rho_plus.value(flat, 0), gamma);
            let nm = density_of(self.rho_minus.value(flat, 0), gamma);
            // Φ(ρ)+ρ = n - 1, so the defect is ∇·Ẽ + (n+ - n-)/√γ.
            vals[flat] = div_e.value(flat, 0) + g * (np - nm);
        }
        SpectralField::from_physical(grid, 1, vals)
    }
}

/// `υ × (B̃ + B̄)` at one grid point (scalar-curl convention in 2D).
fn cross_with_background(
    b: &SpectralField,
    flat: usize,
    v: &[f64],
    b_bar: &[f64],
    dim: usize,
) -> [f64; 3] {
    if dim == 2 {
        let bt = b.value(flat, 0) + b_bar[0];
        [v[1] * bt, -v[0] * bt, 0.0]
    } else {
        let bt = [
            b.value(flat, 0) + b_bar[0],
            b.value(flat, 1) + b_bar[1],
            b.value(flat, 2) + b_bar[2],
        ];
        [
            v[1] * bt[2] - v[2] * bt[1],
            v[2] * bt[0] - v[0] * bt[2],
            v[0] * bt[1] - v[1] * bt[0],
        ]
    }
}

/// `υ × B̄` (the linear part of the rotation term).
fn cross_constant(v: &[f64], b_bar: &[f64], dim: usize) -> [f64; 3] {
    if dim == 2 {
        [v[1] * b_bar[0], -v[0] * b_bar[0], 0.0]
    } else {
        [
            v[1] * b_bar[2] - v[2] * b_bar[1],
            v[2] * b_bar[0] - v[0] * b_bar[2],
            v[0] * b_bar[1] - v[1] * b_bar[0],
        ]
    }
}

/// The symmetric flux matrices `A_j(W_I)` at one state point `w` (flattened
/// in the order `(ϱ+, υ+, ϱ-, υ-, Ẽ, B̃)`), returned row-major.
///
/// Block structure: two acoustic blocks
/// `[[υ^j, a e_j^T], [a e_j, υ^j I]]` with `a = (γ-1)/2·ϱ + 1`, and a
/// constant Maxwell block `[[0, P_j], [P_j^T, 0]]` whose entries are
/// `±1/√γ` (in 2D the reduced 3x3 block on `(Ẽ_1, Ẽ_2, B̃)`).
pub fn flux_matrices(w: &[f64], dim: usize, gamma: f64) -> Result<Vec<Vec<f64>>> {
    let len = state_len(dim);
    if w.len() != len {
        return Err(Error::ShapeMismatch(format!(
            "state point needs {len} entries, got {}",
            w.len()
        )));
    }
    let gm = 0.5 * (gamma - 1.0);
    let g = 1.0 / gamma.sqrt();
    let ap = gm * w[0] + 1.0;
    let am = gm * w[1 + dim] + 1.0;
    if !(ap > 0.0 && am > 0.0) {
        return Err(Error::Vacuum("flux matrix outside admissible set".into()));
    }
    let off_e = 2 + 2 * dim;
    let off_b = 2 + 3 * dim;
    let mut mats = vec![vec![0.0; len * len]; dim];
    for (j, mat) in mats.iter_mut().enumerate() {
        let mut set = |r: usize, c: usize, v: f64| mat[r * len + c] = v;
        // acoustic block, + species at rows [0, 1..=dim]
        let vpj = w[1 + j];
        set(0, 0, vpj);
        set(0, 1 + j, ap);
        set(1 + j, 0, ap);
        for a in 0..dim {
            set(1 + a, 1 + a, vpj);
        }
        // acoustic block, - species at rows [1+dim, 2+dim..=1+2dim]
        let o = 1 + dim;
        let vmj = w[o + 1 + j];
        set(o, o, vmj);
        set(o, o + 1 + j, am);
        set(o + 1 + j, o, am);
        for a in 0..dim {
            set(o + 1 + a, o + 1 + a, vmj);
        }
        // Maxwell block
        if dim == 3 {
            // P_1, P_2, P_3 with entries ±1/√γ.
            let p = match j {
                0 => [[0.0, 0.0, 0.0], [0.0, 0.0, g], [0.0, -g, 0.0]],
                1 => [[0.0, 0.0, -g], [0.0, 0.0, 0.0], [g, 0.0, 0.0]],
                _ => [[0.0, g, 0.0], [-g, 0.0, 0.0], [0.0, 0.0, 0.0]],
            };
            for r in 0..3 {
                for c in 0..3 {
                    set(off_e + r, off_b + c, p[r][c]);
                    set(off_b + r, off_e + c, p[c][r]);
                }
            }
        } else {
            // Reduced TE block on (Ẽ_1, Ẽ_2, B̃).
            if j == 0 {
                set(off_e + 1, off_b, g);
                set(off_b, off_e + 1, g);
            } else {
                set(off_e, off_b, -g);
                set(off_b, off_e, -g);
            }
        }
    }
    Ok(mats)
}

/// The source column `L(W)` at one state point (same flattening).
pub fn source_at(w: &[f64], dim: usize, params: &PhysParams) -> Vec<f64> {
    let len = state_len(dim);
    let g = params.inv_sqrt_gamma();
    let gamma = params.gamma;
    let mut out = vec![0.0; len];
    let o = 1 + dim;
    let off_e = 2 + 2 * dim;
    let vp = &w[1..1 + dim];
    let vm = &w[o + 1..o + 1 + dim];
    let ev = &w[off_e..off_e + dim];
    let bt = &w[2 + 3 * dim..];
    let cross = |v: &[f64]| -> [f64; 3] {
        if dim == 2 {
            let b = bt[0] + params.b_bar[0];
            [v[1] * b, -v[0] * b, 0.0]
        } else {
            let b = [
                bt[0] + params.b_bar[0],
                bt[1] + params.b_bar[1],
                bt[2] + params.b_bar[2],
            ];
            [
                v[1] * b[2] - v[2] * b[1],
                v[2] * b[0] - v[0] * b[2],
                v[0] * b[1] - v[1] * b[0],
            ]
        }
    };
    let cp = cross(vp);
    let cm = cross(vm);
    let np = density_of(w[0], gamma);
    let nm = density_of(w[o], gamma);
    for a in 0..dim {
        out[1 + a] = -(g * ev[a] + cp[a]) - g * vp[a];
        out[o + 1 + a] = (g * ev[a] + cm[a]) - g * vm[a];
        out[off_e + a] = g * (np * vp[a] - nm * vm[a]);
    }
    out
}

/// Change of variables physical -> symmetrized (spatial part; the `√γ` time
/// rescaling is owned by the integrator's clock).
pub fn to_symmetric(phys: &PhysState, params: &PhysParams) -> Result<SymState> {
    let grid = *phys.n_plus.grid();
    let m = grid.num_points();
    let gamma = params.gamma;
    let sg = params.sqrt_gamma();
    let mut rho_p = vec![0.0; m];
    let mut rho_m = vec![0.0; m];
    for flat in 0..m {
        let np = phys.n_plus.value(flat, 0);
        let nm = phys.n_minus.value(flat, 0);
        if !(np > 0.0 && nm > 0.0) {
            return Err(Error::Vacuum(format!(
                "density must be positive, found n+ = {np}, n- = {nm}"
            )));
        }
        rho_p[flat] = rho_of(np, gamma);
        rho_m[flat] = rho_of(nm, gamma);
    }
    let bc = phys.b.components();
    if params.b_bar.len() != bc {
        return Err(Error::ShapeMismatch("b_bar / B component mismatch".into()));
    }
    let mut b_tilde = phys.b.scaled(1.0 / sg);
    let background =
        SpectralField::from_fn(grid, bc, |_, c| params.b_bar[c]).expect("constant field");
    b_tilde = b_tilde.add_scaled(-1.0, &background).expect("shape");
    Ok(SymState {
        rho_plus: SpectralField::from_physical(grid, 1, rho_p)?,
        rho_minus: SpectralField::from_physical(grid, 1, rho_m)?,
        v_plus: phys.u_plus.scaled(1.0 / sg),
        v_minus: phys.u_minus.scaled(1.0 / sg),
        e: phys.e.scaled(1.0 / sg),
        b: b_tilde,
        params: params.clone(),
    })
}

/// Change of variables symmetrized -> physical.
pub fn from_symmetric(sym: &SymState) -> Result<PhysState> {
    sym.ensure_admissible()?;
    let grid = *sym.grid();
    let m = grid.num_points();
    let gamma = sym.params.gamma;
    let sg = sym.params.sqrt_gamma();
    let mut n_p = vec![0.0; m];
    let mut n_m = vec![0.0; m];
    for flat in 0..m {
        n_p[flat] = density_of(sym.rho_plus.value(flat, 0), gamma);
        n_m[flat] = density_of(sym.rho_minus.value(flat, 0), gamma);
    }
    let bc = sym.b.components();
    let background =
        SpectralField::from_fn(grid, bc, |_, c| sym.params.b_bar[c]).expect("constant field");
    let b_phys = sym.b.add_scaled(1.0, &background).expect("shape").scaled(sg);
    Ok(PhysState {
        n_plus: SpectralField::from_physical(grid, 1, n_p)?,
        n_minus: SpectralField::from_physical(grid, 1, n_m)?,
        u_plus: sym.v_plus.scaled(sg),
        u_minus: sym.v_minus.scaled(sg),
        e: sym.e.scaled(sg),
        b: b_phys,
    })
}

/// Random admissible initial data:
/// band-limited `ϱ±, υ±, B̃` (solenoidal `B̃` in 3D), means of `n±` pinned to
/// one, `Ẽ` with a random solenoidal part and its gradient part solving the
/// Gauss constraint spectrally, the whole state rescaled so the `B^{s_c}_{2,1}`
/// norm of the concatenated `W` equals `amplitude` (to 1e-10 relative).
///
/// The mean adjustment, Gauss solve and rescale interact through `Φ`, so the
/// construction iterates them to a joint fixed point.
pub fn make_initial_data(
    grid: GridSpec,
    params: &PhysParams,
    amplitude: f64,
    seed: u64,
    band: (i32, i32),
) -> Result<SymState> {
    if amplitude < 0.0 {
        return Err(Error::Config(format!("amplitude must be >= 0, got {amplitude}")));
    }
    if amplitude == 0.0 {
        return Ok(SymState::equilibrium(grid, params.clone()));
    }
    let dim = grid.dim();
    let bc = b_components(dim);
    let (q_lo, q_hi) = band;
    if q_hi < q_lo {
        return Err(Error::Config(format!("empty band ({q_lo}, {q_hi})")));
    }
    let lo = (q_lo as f64).exp2();
    let hi = (q_hi as f64).exp2();
    if hi > grid.dealias_cutoff() as f64 {
        return Err(Error::Config(format!(
            "band upper edge 2^{q_hi} exceeds the dealiasing cutoff {} of a {}-point grid",
            grid.dealias_cutoff(),
            grid.points_per_axis()
        )));
    }

    let sub = |i: u64| seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(i);
    let mut state = SymState {
        rho_plus: synth::random_shell(grid, 1, sub(1), 1.0, lo, hi),
        rho_minus: synth::random_shell(grid, 1, sub(2), 1.0, lo, hi),
        v_plus: synth::random_shell(grid, dim, sub(3), 1.0, lo, hi),
        v_minus: synth::random_shell(grid, dim, sub(4), 1.0, lo, hi),
        e: synth::random_shell(grid, dim, sub(5), 1.0, lo, hi),
        b: synth::random_shell(grid, bc, sub(6), 1.0, lo, hi),
        params: params.clone(),
    };
    if dim == 3 {
        state.b = project_solenoidal(&state.b)?;
    }
    // Pre-scale to the right ballpark so the admissibility check below is
    // meaningful on the first pass.
    let part = DyadicPartition::build(&grid);
    let spec = BesovSpec::inhomogeneous(critical_regularity(dim), 2.0, 1.0);
    let nu0 = besov_norm(&state.concat(), &spec, &part)?;
    if nu0 > 0.0 {
        state = state.scaled(amplitude / nu0);
    }

    for _ in 0..100 {
        if state.admissibility_margin() <= 0.0 {
            return Err(Error::Vacuum(format!(
                "amplitude {amplitude} too large: admissibility margin {} <= 0",
                state.admissibility_margin()
            )));
        }
        pin_density_means(&mut state)?;
        solve_gauss(&mut state)?;
        let nu = besov_norm(&state.concat(), &spec, &part)?;
        if (nu - amplitude).abs() <= 1e-10 * amplitude {
            state.ensure_admissible()?;
            return Ok(state);
        }
        state = state.scaled(amplitude / nu);
    }
    Err(Error::Degenerate(
        "initial-data normalization did not converge".into(),
    ))
}

/// Adjust the `k = 0` mode of `n±` so the means are exactly one, then map
/// back to the symmetrized density variables.
fn pin_density_means(state: &mut SymState) -> Result<()> {
    let grid = *state.grid();
    let m = grid.num_points();
    let gamma = state.params.gamma;
    for rho in [&mut state.rho_plus, &mut state.rho_minus] {
        let mut n: Vec<f64> = (0..m)
            .map(|flat| density_of(rho.value(flat, 0), gamma))
            .collect();
        let mean = n.iter().sum::<f64>() / m as f64;
        let shift = mean - 1.0;
        let mut vals = vec![0.0; m];
        for flat in 0..m {
            n[flat] -= shift;
            if !(n[flat] > 0.0) {
                return Err(Error::Vacuum(
                    "density mean adjustment crossed vacuum".into(),
                ));
            }
            vals[flat] = rho_of(n[flat], gamma);
        }
        *rho = SpectralField::from_physical(grid, 1, vals)?;
    }
    Ok(())
}

/// Replace the gradient (curl-free) part of `Ẽ` with the spectral solution
/// of the Gauss constraint, keeping the solenoidal part.
fn solve_gauss(state: &mut SymState) -> Result<()> {
    let grid = *state.grid();
    let dim = grid.dim();
    let m = grid.num_points();
    // Right-hand side: ∇·Ẽ = -(n+ - n-)/√γ, with n - 1 = ρ + Φ(ρ).
    let gamma = state.params.gamma;
    let g = state.params.inv_sqrt_gamma();
    let rhs: Vec<f64> = (0..m)
        .map(|flat| {
            let np = density_of(state.rho_plus.value(flat, 0), gamma);
            let nm = density_of(state.rho_minus.value(flat, 0), gamma);
            -g * (np - nm)
        })
        .collect();
    let rhs_hat = SpectralField::from_physical(grid, 1, rhs)?;
    let n2 = (grid.points_per_axis() / 2) as i64;
    let mut spec = vec![Complex64::default(); m * dim];
    for flat in 0..m {
        let k = grid.wavevector(flat);
        let ksq = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64;
        if ksq == 0.0 || (0..dim).any(|a| k[a] == -n2) {
            continue;
        }
        // solenoidal projection of the existing field
        let mut kd = Complex64::default();
        for a in 0..dim {
            kd += Complex64::new(k[a] as f64, 0.0) * state.e.coeff(flat, a);
        }
        for a in 0..dim {
            let sol = state.e.coeff(flat, a) - kd * (k[a] as f64) / ksq;
            // gradient part: ê = i k Λ̂ with -|k|² Λ̂ = F(rhs)
            let grad = Complex64::new(0.0, k[a] as f64) * (-rhs_hat.coeff(flat, 0) / ksq);
            spec[flat * dim + a] = sol + grad;
        }
    }
    state.e = SpectralField::from_spectral(grid, dim, spec)?;
    Ok(())
}

/// Spectral divergence-free projection `v - k (k·v)/|k|²`.
pub fn project_solenoidal(v: &SpectralField) -> Result<SpectralField> {
    let grid = *v.grid();
    let dim = grid.dim();
    if v.components() != dim {
        return Err(Error::ShapeMismatch(
            "solenoidal projection expects a dim-component vector".into(),
        ));
    }
    let m = grid.num_points();
    let mut spec = v.spectral().to_vec();
    for flat in 0..m {
        let k = grid.wavevector(flat);
        let ksq = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64;
        if ksq == 0.0 {
            continue;
        }
        let mut kd = Complex64::default();
        for a in 0..dim {
            kd += Complex64::new(k[a] as f64, 0.0) * spec[flat * dim + a];
        }
        for a in 0..dim {
            spec[flat * dim + a] -= kd * (k[a] as f64) / ksq;
        }
    }
    SpectralField::from_spectral(grid, dim, spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn grid2() -> GridSpec {
        GridSpec::new(2, 32).unwrap()
    }

    fn params2() -> PhysParams {
        PhysParams::new(2.0, vec![1.0], 2).unwrap()
    }

    #[test]
    fn phi_vanishes_to_second_order_at_zero() {
        for gamma in [1.4, 2.0, 2.5, 3.0, 5.0 / 3.0] {
            assert_abs_diff_eq!(phi(0.0, gamma).unwrap(), 0.0, epsilon = 1e-15);
            assert_abs_diff_eq!(phi_prime(0.0, gamma).unwrap(), 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn phi_closed_forms() {
        // γ = 3: Φ ≡ 0; γ = 2: Φ(ρ) = ρ²/4.
        for rho in [-0.5, 0.0, 0.3, 1.7] {
            assert_abs_diff_eq!(phi(rho, 3.0).unwrap(), 0.0, epsilon = 1e-14);
            assert_abs_diff_eq!(phi(rho, 2.0).unwrap(), rho * rho / 4.0, epsilon = 1e-14);
        }
        assert_abs_diff_eq!(phi(0.2, 2.0).unwrap(), 0.01, epsilon = 1e-15);
        assert!(phi(-3.0, 2.0).is_err());
    }

    #[test]
    fn variable_change_round_trip_and_equilibrium() {
        let g = grid2();
        let params = params2();
        // equilibrium: n± = 1, u± = 0, E = 0, B = √γ·B̄  =>  W = 0
        let sg = params.sqrt_gamma();
        let phys = PhysState {
            n_plus: SpectralField::from_fn(g, 1, |_, _| 1.0).unwrap(),
            n_minus: SpectralField::from_fn(g, 1, |_, _| 1.0).unwrap(),
            u_plus: SpectralField::zeros(g, 2),
            u_minus: SpectralField::zeros(g, 2),
            e: SpectralField::zeros(g, 2),
            b: SpectralField::from_fn(g, 1, |_, _| sg * 1.0).unwrap(),
        };
        let sym = to_symmetric(&phys, &params).unwrap();
        assert!(sym.max_abs() < 1e-13, "W at equilibrium = {}", sym.max_abs());

        // round trip on a random admissible state
        let state = make_initial_data(g, &params, 0.3, 11, (1, 2)).unwrap();
        let back = to_symmetric(&from_symmetric(&state).unwrap(), &params).unwrap();
        let diff = back.add_scaled(-1.0, &state);
        assert!(diff.max_abs() < 1e-12);
    }

    #[test]
    fn rho_substitution_gamma_three() {
        // γ = 3: (γ-1)/2 = 1, so ρ = n - 1 and n = 4 gives ρ = 3.
        assert_abs_diff_eq!(rho_of(4.0, 3.0), 3.0, epsilon = 1e-14);
    }

    #[test]
    fn equilibrium_is_a_fixed_point() {
        let g = grid2();
        let eq = SymState::equilibrium(g, params2());
        let tend = eq.rhs().unwrap();
        assert!(tend.max_abs() < 1e-13);
    }

    #[test]
    fn linearization_taylor_remainder() {
        let g = grid2();
        let params = params2();
        let w1 = make_initial_data(g, &params, 1.0, 5, (1, 2)).unwrap();
        let mut remainders = Vec::new();
        for delta in [1e-4, 5e-5] {
            let w = w1.scaled(delta);
            let full = w.rhs().unwrap();
            let lin = w.rhs_linearized().unwrap();
            let diff = full.add_scaled(-1.0, &lin);
            remainders.push(diff.concat().l2_norm() / (delta * delta));
        }
        // remainder / δ² is bounded (same constant across δ)
        let ratio = remainders[0] / remainders[1];
        assert!(
            ratio > 0.5 && ratio < 2.0,
            "remainder not quadratic: {remainders:?}"
        );
    }

    #[test]
    fn maxwell_only_plane_wave_frequency() {
        // ϱ± = υ± = 0: Ẽ, B̃ satisfy the linear curl system whose single-mode
        // solutions oscillate at |k|/√γ. One tendency evaluation must match
        // the analytic time derivative.
        let g = grid2();
        let params = params2();
        let sq = params.inv_sqrt_gamma();
        let k = [2i64, 0, 0];
        let b0 = synth::single_mode(g, k, 1.0, 0.0);
        let mut state = SymState::equilibrium(g, params);
        state.b = b0.clone();
        let flags = RhsFlags {
            evolve_fluid: false,
            relaxation: true,
        };
        let tend = state.rhs_with(&flags).unwrap();
        // ∂_t Ẽ = (1/√γ)·∇×B̃ = (1/√γ)(∂₂b, -∂₁b)
        let expect = b0.curl().unwrap().scaled(sq);
        let diff = tend.e.sub(&expect).unwrap();
        assert!(diff.lp_norm(f64::INFINITY).unwrap() < 1e-12);
        assert!(tend.rho_plus.l2_norm() == 0.0 && tend.v_plus.l2_norm() == 0.0);
    }

    #[test]
    fn flux_matrices_are_symmetric_and_match_direct_rhs() {
        let g = grid2();
        let params = params2();
        for seed in 0..5u64 {
            let w = make_initial_data(g, &params, 0.5 + 0.1 * seed as f64, 100 + seed, (1, 2))
                .unwrap();
            // symmetry at sampled points
            let stacked = w.concat();
            for flat in [0usize, 7, 123, 800] {
                let pt: Vec<f64> = (0..stacked.components())
                    .map(|c| stacked.value(flat, c))
                    .collect();
                let mats = flux_matrices(&pt, 2, params.gamma).unwrap();
                let len = state_len(2);
                for mat in &mats {
                    for i in 0..len {
                        for j in 0..len {
                            assert_eq!(mat[i * len + j], mat[j * len + i]);
                        }
                    }
                }
            }
            // equivalence of the two tendency routes
            let direct = w.rhs().unwrap().concat();
            let flux = w.rhs_via_flux_form().unwrap().concat();
            let err = direct.sub(&flux).unwrap().l2_norm();
            let scale = 1.0 + direct.l2_norm();
            assert!(err <= 1e-11 * scale, "route disagreement {err}");
        }
    }

    #[test]
    fn maxwell_block_entries_3d() {
        let params = PhysParams::new(2.0, vec![0.0, 0.0, 1.0], 3).unwrap();
        let w = vec![0.0; state_len(3)];
        let mats = flux_matrices(&w, 3, params.gamma).unwrap();
        let len = state_len(3);
        let g = params.inv_sqrt_gamma();
        let off_e = 2 + 2 * 3;
        let off_b = 2 + 3 * 3;
        // P_1 entry (2,3) = 1/√γ and (3,2) = -1/√γ (1-based), rest zero.
        let p1 = |r: usize, c: usize| mats[0][(off_e + r) * len + off_b + c];
        for r in 0..3 {
            for c in 0..3 {
                let expect = match (r, c) {
                    (1, 2) => g,
                    (2, 1) => -g,
                    _ => 0.0,
                };
                assert_eq!(p1(r, c), expect, "P1[{r}][{c}]");
            }
        }
    }

    #[test]
    fn flux_matrix_eigenvalues_at_equilibrium() {
        // Independent oracle: Jacobi eigenvalue iteration on A_1(0).
        fn jacobi_eigenvalues(mut a: Vec<f64>, n: usize) -> Vec<f64> {
            for _ in 0..200 {
                // largest off-diagonal element
                let (mut p, mut q, mut big) = (0, 1, 0.0f64);
                for i in 0..n {
                    for j in (i + 1)..n {
                        if a[i * n + j].abs() > big {
                            big = a[i * n + j].abs();
                            p = i;
                            q = j;
                        }
                    }
                }
                if big < 1e-14 {
                    break;
                }
                let theta = 0.5 * (a[q * n + q] - a[p * n + p]) / a[p * n + q];
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
            let mut eig: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
            eig.sort_by(|x, y| x.partial_cmp(y).unwrap());
            eig
        }
        let gamma = 2.0;
        let w = vec![0.0; state_len(2)];
        let mats = flux_matrices(&w, 2, gamma).unwrap();
        let len = state_len(2);
        let eig = jacobi_eigenvalues(mats[0].clone(), len);
        // acoustic blocks contribute {0, ±1} twice, Maxwell {0, ±1/√2}
        let ig = 1.0 / gamma.sqrt();
        let mut expect = vec![-1.0, -1.0, -ig, 0.0, 0.0, 0.0, ig, 1.0, 1.0];
        expect.sort_by(|x, y| x.partial_cmp(y).unwrap());
        for (a, b) in eig.iter().zip(&expect) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-10);
        }
    }

    #[test]
    fn constraint_residuals_behave() {
        let g = grid2();
        let params = params2();
        let eq = SymState::equilibrium(g, params.clone());
        let r = eq.constraint_residuals().unwrap();
        assert!(r.gauss < 1e-13 && r.div_b == 0.0);

        for seed in [3u64, 17, 99] {
            let w = make_initial_data(g, &params, 1e-3, seed, (1, 2)).unwrap();
            let r = w.constraint_residuals().unwrap();
            assert!(r.gauss <= 1e-10, "gauss {}", r.gauss);
            assert!(r.div_b <= 1e-11);
        }

        // 3D: B̃ = ∇×ψ is divergence-free
        let g3 = GridSpec::new(3, 16).unwrap();
        let psi = synth::random_field(g3, 3, 5, 1.0, 4.0, 1.0);
        let b = psi.curl().unwrap();
        let mut w3 = SymState::equilibrium(
            g3,
            PhysParams::new(2.0, vec![0.0, 0.0, 1.0], 3).unwrap(),
        );
        w3.b = b;
        let r3 = w3.constraint_residuals().unwrap();
        assert!(r3.div_b <= 1e-11, "div_b {}", r3.div_b);
    }

    #[test]
    fn initial_data_contract() {
        let g = grid2();
        let params = params2();
        // amplitude zero -> exact equilibrium
        let eq = make_initial_data(g, &params, 0.0, 9, (1, 2)).unwrap();
        assert_eq!(eq.max_abs(), 0.0);

        let part = DyadicPartition::build(&g);
        let spec = BesovSpec::inhomogeneous(critical_regularity(2), 2.0, 1.0);
        for seed in [1u64, 2, 42] {
            let w = make_initial_data(g, &params, 1e-3, seed, (1, 2)).unwrap();
            let nu = besov_norm(&w.concat(), &spec, &part).unwrap();
            assert!((nu - 1e-3).abs() <= 1e-13, "norm {nu}");
            assert!((w.to_physical().unwrap().n_plus.mean(0) - 1.0).abs() < 1e-12);
            assert!((w.to_physical().unwrap().n_minus.mean(0) - 1.0).abs() < 1e-12);
        }
        // absurd amplitude violates admissibility
        assert!(matches!(
            make_initial_data(g, &params, 1e6, 1, (1, 2)),
            Err(Error::Vacuum(_))
        ));
        // band beyond the dealias cutoff is rejected
        assert!(make_initial_data(g, &params, 1e-3, 1, (1, 5)).is_err());
    }

    #[test]
    fn initial_data_3d_contract() {
        let g = GridSpec::new(3, 16).unwrap();
        let params = PhysParams::new(2.0, vec![0.0, 0.0, 1.0], 3).unwrap();
        let w = make_initial_data(g, &params, 1e-3, 7, (1, 1)).unwrap();
        let r = w.constraint_residuals().unwrap();
        assert!(r.gauss <= 1e-10 && r.div_b <= 1e-11);
    }
}
