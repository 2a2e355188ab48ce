//! Pseudo-spectral simulator for the symmetrized two-fluid Euler-Maxwell
//! system on the periodic torus `[0, 2π)^d` (d = 2 or 3), coupled to a
//! Littlewood-Paley analysis engine.
//!
//! The crate is organized in layers:
//!
//! * [`grid`] / [`field`] — uniform periodic grids, real vector fields with
//!   their discrete Fourier representation, exact spectral differentiation
//!   and discrete `L^p` norms.
//! * [`dyadic`] — the dyadic partition of unity, frequency blocks `Δ_q`,
//!   Besov norms `B^s_{p,r}` and mixed time-space (Chemin-Lerner) norms.
//! * [`model`] — the symmetrized two-fluid Euler-Maxwell equations: state
//!   types, the density change of variables, the nonlinearity `Φ`, the
//!   right-hand side, flux matrices, constraint functionals and initial data.
//! * [`integrator`] — RK4 time stepping, CFL step control and run monitors
//!   (constraint drift, blow-up criterion functional).
//! * [`record`] — run records, snapshot/CSV serialization.
//! * [`diagnostics`] — energy/dissipation reports, decay channels, and the
//!   calibrate-then-assert inequality checkers.
//! * [`harness`] — the `run` / `analyze` / `check` commands behind the CLI.
//!
//! The torus side is fixed to `2π` so wavenumbers are integers and dyadic
//! annuli are unambiguous. The forward transform is normalized by `1/M`
//! (M = total grid points), so coefficients are Fourier-series coefficients:
//! a constant field `c` has exactly one nonzero coefficient, `c` at `k = 0`.

pub mod config;
pub mod diagnostics;
pub mod dyadic;
pub mod error;
pub mod fft;
pub mod field;
pub mod grid;
pub mod harness;
pub mod integrator;
pub mod model;
pub mod record;
pub mod synth;

pub use error::{Error, Result};
pub use field::SpectralField;
pub use grid::GridSpec;
