//! QAOA Max-Cut benchmarking: instance generation, circuit scheduling on a
//! qubit grid, noisy trajectory simulation, Nelder–Mead parameter search,
//! and wall-time extrapolation.

pub mod circuit;
pub mod graphs;
pub mod maxsat;
pub mod scheduler;
pub mod simulator;
pub mod estimator;
pub mod optimizer;
pub mod seed;
pub mod analysis;
pub mod costmodel;
pub mod pipeline;
