//! One-dimensional free-boundary gas dynamics with time-decaying friction,
//! in Lagrangian coordinates on a fixed reference interval.
//!
//! The crate provides
//! - the explicit self-similar reference family (profile constants, density,
//!   velocity, moving boundary) and its diffusion-equation identities,
//! - the scalar correction ODE whose solution upgrades the self-similar
//!   ansatz to an exact solution of the damped Lagrangian equation, with
//!   phase-plane and decay-rate diagnostics,
//! - a degenerate-weight finite-difference solver for the displacement
//!   perturbation, with exact zero fixed point and vacuum boundary handling,
//! - space-time weighted energies, weighted sup norms and Hardy ratios,
//! - log-log rate fitting against the predicted decay/expansion exponents.

pub mod correction;
pub mod error;
pub mod grid;
pub mod metrics;
pub mod ode;
pub mod params;
pub mod profile;
pub mod quadrature;
pub mod rates;
pub mod sampling;
pub mod solver;

pub use correction::{integrate_correction, CorrectionTrajectory};
pub use error::{Error, Result};
pub use grid::{build_grid, Grid};
pub use params::GasParameters;
pub use profile::{derive_profile, BarenblattProfile};
pub use solver::{initial_data, Preset, Solver, SolverState};
