//! Nelder–Mead parameter search and the multi-start per-instance solver.

mod nelder_mead;
mod solve;

pub use nelder_mead::{nelder_mead, random_initial_simplex, NmConfig, NmError, RunRecord, Termination};
pub use solve::{solve_instance, Instance, InstanceSolveResult, Pipeline, SolveError, SolveOptions};
