//! Randomized asynchronous ADMM for consensus optimization over graphs.
//!
//! Agents `v` of a graph hold private convex costs `f_v` and look for a
//! common minimizer of `sum_v f_v`. The graph is covered by components
//! `A_1..A_L`; synchronous ADMM updates every component each iteration,
//! while the asynchronous variant wakes a single random component and is a
//! randomized Gauss-Seidel sweep of the Douglas-Rachford resolvent
//! ([`operators::DouglasRachford`]).
//!
//! ```
//! use randprox::{config::ExperimentConfig, harness::run_experiment};
//!
//! let rows = run_experiment(&ExperimentConfig::default()).unwrap();
//! assert!(rows.last().unwrap().squared_error < 1e-6);
//! ```

pub mod admm;
pub mod baselines;
pub mod config;
pub mod error;
pub mod harness;
pub mod objectives;
pub mod operators;
pub mod problem;
pub mod topology;

pub use error::{Error, Result};
pub use objectives::{CostFunction, Point};
pub use problem::Problem;
