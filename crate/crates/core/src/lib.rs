//! Inexact interior point methods for semidefinite optimization.
//!
//! The feasible method (`drivers::run_if`) keeps every iterate exactly
//! feasible by solving the Newton system in nullspace coordinates, so any
//! error in the linear solve only perturbs the complementarity equation.
//! The infeasible method (`drivers::run_ii`) follows a neighborhood of the
//! infeasible central path and tolerates residuals in all three blocks.
//! `qcost` evaluates the block-encoding and quantum linear-system cost
//! formulas for the same systems.

pub mod drivers;
pub mod error;
pub mod instances;
pub mod model;
pub mod newton;
pub mod output;
pub mod qcost;
pub mod sdpa;
pub mod scaling;
pub mod solvers;
pub mod study;
pub mod tensor;

pub use error::{Error, Result};
