//! The operator families under study.
//!
//! Every family maps scalar fields on its domain to scalar fields. All of
//! them are positively homogeneous, subadditive and monotone by
//! construction; each declares in its `AxiomProfile` which further structure
//! it claims (translation by nonnegative constants, unit preservation,
//! additivity on comonotone pairs). The profile is a falsifiable claim: the
//! axiom harness samples random functions and expects the empirical verdict
//! to match the flags exactly, failures included.
//!
//! `prepare` does all work that depends on the pair (order, function) —
//! cell integrals, kernel suprema, lattice values — so that evaluating the
//! resulting operator at many points stays cheap.

pub mod bernstein;
pub mod bkc;
pub mod gauss;
pub mod maxprod;
pub mod possibilistic;
pub mod sequence;

use std::sync::Arc;

use crate::domain::{DomainSpec, Point, ScalarField};
use crate::error::Result;

/// Structural claims of a family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AxiomProfile {
    /// Subadditive and positively homogeneous.
    pub sublinear: bool,
    pub monotone: bool,
    /// T(f + c) = T(f) + c·T(1) for constants c >= 0.
    pub translatable: bool,
    /// T(1) = 1.
    pub unital: bool,
    /// T(f + g) = T(f) + T(g) whenever (f(s)-f(t))(g(s)-g(t)) >= 0 on the
    /// whole domain.
    pub comonotone_additive: bool,
}

impl AxiomProfile {
    /// Sublinear + monotone + translatable.
    pub const fn weakly_nonlinear(&self) -> bool {
        self.sublinear && self.monotone && self.translatable
    }
}

/// An operator instance with all (n, f)-dependent work done up front.
/// Cloning shares the precomputed state.
#[derive(Clone)]
pub struct PreparedOperator {
    eval: Arc<dyn Fn(Point) -> Result<f64> + Send + Sync>,
}

impl PreparedOperator {
    pub fn new(eval: impl Fn(Point) -> Result<f64> + Send + Sync + 'static) -> Self {
        PreparedOperator { eval: Arc::new(eval) }
    }

    pub fn eval(&self, x: Point) -> Result<f64> {
        (self.eval)(x)
    }

    /// Max of |T(f)| over a grid; errors bubble up from evaluation.
    pub fn grid_sup_norm(&self, grid: &[Point]) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for &p in grid {
            worst = worst.max(self.eval(p)?.abs());
        }
        Ok(worst)
    }
}

pub trait OperatorFamily: Send + Sync {
    fn name(&self) -> &str;

    fn domain(&self) -> &DomainSpec;

    fn profile(&self) -> AxiomProfile;

    /// Instantiates the n-th operator of the family on `f`.
    fn prepare(&self, n: usize, f: &ScalarField) -> Result<PreparedOperator>;

    /// One-off evaluation; prefer `prepare` when probing many points.
    fn apply(&self, n: usize, f: &ScalarField, x: Point) -> Result<f64> {
        self.prepare(n, f)?.eval(x)
    }
}
