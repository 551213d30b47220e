//! 1-D pseudospectral solver and virial diagnostics for the Zakharov,
//! Klein-Gordon-Zakharov (KGZ) and nonlinear Schrödinger (NLS) equations.
//!
//! The three first-order systems are evolved on a periodic box `[-L, L)`
//! with Fourier spatial differentiation and RK4 (or Strang splitting for
//! NLS) in time.  On top of the solver sits a diagnostics layer: conserved
//! quantities, weighted norms, exact solitary-wave oracles, the localized
//! virial functionals `I(t)`, `K(t)`, `J(t)` together with their analytic
//! time derivatives, and scenario runners that turn all of it into
//! pass/fail decay experiments with CSV/manifest output.

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod exact;
pub mod experiments;
pub mod functionals;
pub mod grid;
pub mod io;
pub mod state;
pub mod virial;

pub use error::{Error, Result};
pub use grid::{Field, Grid};
