//! Quarantine-controlled SEIR-type epidemic models and their optimal
//! control problems.
//!
//! Two six-compartment models (susceptible, exposed, asymptomatically and
//! symptomatically infectious, removed, and the shrinking population
//! fraction) differ in how the incidence rate depends on population size:
//! bilinear versus standard. A bounded quarantine intensity enters each
//! incidence law, and the cost of a policy combines the terminal and
//! cumulative infection levels with a quadratic control cost.
//!
//! The crate provides
//!
//! * the model right-hand sides, normalization from head counts, and
//!   reproduction-number formulas ([`model`]),
//! * fixed-step RK4 integration of the state systems forward and the
//!   adjoint (costate) systems backward on a shared grid ([`integrate`]),
//! * the cost functional, Hamiltonian coefficients, indicator functions,
//!   and pointwise control synthesis ([`ocp`]),
//! * a forward-backward sweep solver and an independent projected
//!   gradient solver, with cross-validation between them ([`solver`]),
//! * executable probes for positivity, conservation, indicator signs,
//!   convexity of the velocity set, and gradient consistency ([`probe`]),
//! * a TOML-configured command-line front end ([`cli`], [`config`]).
//!
//! Start with the examples: each one exercises a single capability end
//! to end (`cargo run --release --example uncontrolled_peaks`, then
//! `solve_ocp1`, `cross_solver`, `terminal_sweep`, ...).

// Validation code rejects NaN through negated comparisons on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod error;
pub mod grid;
pub mod integrate;
pub mod model;
pub mod ocp;
pub mod output;
pub mod probe;
pub mod solver;

pub use error::{Error, Result};
pub use grid::{ControlTrajectory, StateTrajectory, TimeGrid};
pub use model::{
    beta_from_r0, normalize, r0_basic, r0_controlled, rhs_controlled, rhs_uncontrolled,
    ControlBounds, EpidemicParams, ModelKind, NormalizedState, ObjectiveWeights, RawPopulation,
};
pub use ocp::{
    hamiltonian_coeffs_m1, indicator_m1, indicator_m2, objective, objective_gradient,
    synthesize_u_m1, synthesize_u_m2, AdjointState, AdjointTrajectory, HamiltonianCoeffs,
    OcpProblem, Quadrature,
};
pub use solver::{
    continuity_refinement_check, cross_validate, solve_fbsm, solve_projected_gradient,
    ComparisonRecord, SolveReport, SweepSettings,
};
