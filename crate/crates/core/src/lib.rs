//! Bethe ansatz for the twisted XXZ chain in the critical regime.

pub mod characters;
pub mod cft;
pub mod ed;
pub mod error;
pub mod kernel;
pub mod observables;
pub mod quad;
pub mod scaling;
pub mod solver;
pub mod states;

pub use error::{Error, Result};
pub use kernel::{Kernel, KernelConstants, ModelParams, TwistConvention};
pub use solver::{solve, solve_from, BetheState, SolverOptions};
pub use states::{BetheNumberSet, StateClassification, StateTemplate};
