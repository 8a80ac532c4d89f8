//! Sectional solver and verification tooling for the continuous
//! coagulation/multiple-fragmentation population balance equation
//!
//! The governing equation tracks a particle number density `f(x,t)` over
//! mass `x > 0`:
//!
//! ```text
//! ∂f/∂t = 1/2 ∫₀ˣ K(x-y,y) f(x-y) f(y) dy  -  f(x) ∫₀^∞ K(x,y) f(y) dy
//!       + ∫ₓ^∞ b(x,y) S(y) f(y) dy         -  S(x) f(x)
//! ```
//!
//! where `K` is a (possibly singular) coagulation kernel, `S` a selection
//! function, and `b` a multiple-fragmentation daughter distribution.  The
//! crate provides
//!
//! * a kernel catalog with admissibility verifiers for the growth bounds
//!   `K(x,y) ≤ k (1+x+y)^λ / (xy)^σ` and `S(x) ≤ S₀ x^α`, the daughter-mass
//!   and fragment-count integrals of `b`, and the negative-moment condition
//!   `∫ x^{-γ} b dx ≤ N₀ y^{-γ}` ([`kernels`]),
//! * compactly supported truncations `K_n`, `S_n` that agree with the
//!   originals on `[1/n, n]` ([`kernels::truncation`]),
//! * a mass-conserving fixed-pivot discretization on a geometric grid
//!   ([`grid`], [`operators`]),
//! * an adaptive embedded Runge-Kutta time integrator with a closed mass
//!   ledger ([`solver`]),
//! * moment/norm diagnostics, uniform moment-bound checks, an
//!   exponential-in-time envelope check on `g = f/x^σ`, weighted-distance
//!   uniqueness diagnostics, and a truncation-convergence study
//!   ([`analysis`]),
//! * independent analytic and mass-discrete reference solutions used by the
//!   test and acceptance suites ([`oracles`]).
//!
//! All numerics are generic over the floating-point scalar via [`Scalar`];
//! `f64` is the working precision and has type aliases at the crate root.

pub mod analysis;
pub mod error;
pub mod grid;
pub mod kernels;
pub mod operators;
pub mod oracles;
pub mod quadrature;
pub mod scalar;
pub mod solver;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub use grid::{build_grid, project_initial, DensityState, GeometricGrid, InitialProfile};
pub use kernels::{
    BreakageSpec, CoagulationSpec, KernelSystem, SelectionSpec, TruncationParams,
};
pub use operators::{assemble, OperatorTables};
pub use solver::{integrate, IntegratorConfig, RunOutput, Simulation};

/// Double-precision instantiations of the main domain types.
pub type KernelSystem64 = kernels::KernelSystem<f64>;
pub type GeometricGrid64 = grid::GeometricGrid<f64>;
pub type DensityState64 = grid::DensityState<f64>;
pub type OperatorTables64 = operators::OperatorTables<f64>;
pub type Simulation64 = solver::Simulation<f64>;
pub type RunOutput64 = solver::RunOutput<f64>;
