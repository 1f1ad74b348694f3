//! Simulation of Caputo fractional-order systems (order in `(0, 1)`), their
//! approximation by retarded functional-differential equations built from
//! Grünwald-Letnikov differences, and the mutual aiming procedure that keeps
//! a conflict-controlled fractional system close to its approximation.
//!
//! The crate is organised bottom-up:
//!
//! - [`frac_ops`]: weights, differences, Riemann-Liouville quadrature, the
//!   `p_α` kernel and the Mittag-Leffler function.
//! - [`fde_solver`]: explicit steppers for the Caputo problem and the
//!   retarded approximating problem, plus reconstruction of the fractional
//!   state from the delay state.
//! - [`conflict_sim`]: Hamiltonian, extremal selectors, saddle check and the
//!   aiming co-simulation.
//! - [`harness`]: built-in scenarios, config parsing, experiment runs and CSV
//!   output.
//! - [`cli`]: the `fracaim` command-line front end.

pub mod cli;
pub mod conflict_sim;
pub mod error;
pub mod fde_solver;
pub mod frac_ops;
pub mod harness;

pub use error::{Error, Result};
