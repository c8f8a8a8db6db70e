// SPDX-License-Identifier: Apache-2.0

//! Lower bounds on the principal Dirichlet eigenvalue of
//! `L u = -div(a ∇u) + ∇V·∇u` from exit times of the diffusion generated by `-L`.
//!
//! * [`model`]: domains, coefficients and the associated SDE.
//! * [`sde`]: parallel, reproducible Euler–Maruyama exit-time sampling.
//! * [`estimator`]: exit-time quantiles `d_p` and the bound `log(1/p) / sup d_p`.
//! * [`baseline`]: the mean-exit-time (Donsker–Varadhan) bound `1 / sup E τ`.
//! * [`reference`]: series and PDE survival functions used as ground truth.

pub mod baseline;
pub mod error;
pub mod estimator;
pub mod model;
pub mod presets;
pub mod reference;
pub mod sde;
pub mod tridiag;

pub use baseline::{analytic_mean_exit, solve_mean_exit_1d, MeanExitSolution};
pub use error::{Error, Result};
pub use estimator::{
    empirical_survival, estimate_d_p, estimate_d_p_with, quantile_bound, quantile_floor,
    sup_over_starts, QuantileBoundReport,
};
pub use model::{make_problem, to_sde, Domain, DriftDiffusionField, EllipticProblem};
pub use presets::Preset;
pub use reference::{oracle_quantile, preset_oracle, SurvivalOracle};
pub use sde::{simulate_batch, simulate_path, ExitCheck, ExitRecord, ExitTimeSample, SimConfig};
