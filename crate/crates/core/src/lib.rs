//! Numerical laboratory for Korovkin-type uniform-convergence experiments
//! with weakly nonlinear operator families.
//!
//! The classical Korovkin theorem certifies uniform convergence of positive
//! linear operators from their behaviour on a handful of test functions.
//! The same protocol survives when linearity is weakened to sublinearity
//! plus monotonicity (and, for sign-changing inputs, translatability).
//! This crate provides the machinery to probe that claim numerically:
//!
//! * [`capacity`]: monotone set functions (capacities) on intervals and
//!   boxes, including distorted Lebesgue measures such as `sqrt ∘ length`;
//! * [`choquet`]: Choquet integration against a capacity, in one variable,
//!   iterated in two variables, and in discrete (sorted-sum) form;
//! * [`operators`]: the operator families under study, from
//!   Bernstein-Kantorovich-Choquet polynomials to possibilistic (sup-based)
//!   and max-product constructions;
//! * [`opalgebra`]: randomized axiom checks (sublinearity, monotonicity,
//!   translatability, comonotone additivity, unitality), norm estimates and
//!   the sup/composition combinators that preserve those axioms;
//! * [`korovkin`]: test sets, separating functions, the convergence harness
//!   and quantitative rate-bound verification.

pub mod capacity;
pub mod choquet;
pub mod domain;
pub mod error;
pub mod korovkin;
pub mod opalgebra;
pub mod operators;
pub mod report;

pub use error::{Error, Result};

/// Library version, echoed into report headers.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
