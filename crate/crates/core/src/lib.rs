//! Numerical solvers for infinite-horizon stochastic control with
//! non-exponential near-term discounting.
//!
//! The discount weight is exponential with rate δ after a splice time T₀
//! and arbitrary (typically hyperbolic) before it. Beyond the splice the
//! decision maker is time-consistent, so the far future reduces to one
//! classical discounted problem; inside the window `[τ, τ+T₀]` preferences
//! shift with the anchor and the crate solves an equilibrium system of
//! anchored backward equations instead. The two parts glue into a single
//! value field and feedback strategy, which the simulation module verifies
//! by Monte Carlo along controlled paths.
//!
//! Module map:
//! - [`model`]: problems, discounts, Hamiltonian, argmin selector, validation;
//! - [`pde`]: grids, monotone explicit steps, CFL control;
//! - [`classical`]: finite/infinite-horizon and discounted-tail solves;
//! - [`refine`]: refinement studies and empirical error estimates;
//! - [`equilibrium`]: the anchored two-time system and gluing;
//! - [`recursive`]: cost functionals defined through backward recursions;
//! - [`sim`]: path simulation, Monte Carlo costs, plan-revision replay.

pub mod classical;
pub mod equilibrium;
pub mod error;
pub mod model;
pub mod pde;
pub mod recursive;
pub mod refine;
pub mod sim;

pub use error::{Result, SolverError};
pub use model::{
    argmin_control, hamiltonian, tail_bound, validate_problem, CatalogProblem, DiscountSpec,
    ProblemSpec, Violation,
};
pub use pde::{Grid1D, StrategyTable, ValueField};
