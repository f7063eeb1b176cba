//! Kantorovich-style Bernstein families whose cell means are Choquet
//! integrals against a nonadditive capacity (square-root-distorted Lebesgue
//! by default).
//!
//! One-variable form: sum_k p_{n,k}(x) · A_k where
//! A_k = ∫ f dmu over [k/(n+1), (k+1)/(n+1)] normalized by the integral of
//! 1 over the same cell. The two-variable form tensorizes the weights and
//! replaces the cell mean by an iterated planar integral (inner second
//! coordinate, outer first).
//!
//! The normalizer is computed by the *same* quadrature as the numerator, so
//! constants are reproduced exactly in floating point, not merely up to
//! quadrature error.

use rayon::prelude::*;

use crate::capacity::{sqrt_lebesgue, Capacity, MeasurableSet};
use crate::choquet::{choquet_integral_1d, choquet_integral_2d_iterated, QuadratureConfig};
use crate::domain::{DomainSpec, ScalarField};
use crate::error::{Error, Result};
use crate::operators::{AxiomProfile, OperatorFamily, PreparedOperator};

use super::bernstein::bernstein_row;

fn cell(k: usize, n: usize) -> Result<MeasurableSet> {
    let den = (n + 1) as f64;
    MeasurableSet::interval(k as f64 / den, (k + 1) as f64 / den)
}

/// One-variable Bernstein-Kantorovich operator with Choquet cell means.
pub struct BernsteinKantorovichChoquet1 {
    domain: DomainSpec,
    mu: Capacity,
    /// Quadrature cells per operator cell.
    cell_samples: usize,
}

impl BernsteinKantorovichChoquet1 {
    pub fn new() -> Self {
        BernsteinKantorovichChoquet1 {
            domain: DomainSpec::unit_interval(),
            mu: sqrt_lebesgue(),
            cell_samples: 64,
        }
    }

    pub fn with_capacity(mut self, mu: Capacity) -> Self {
        self.mu = mu;
        self
    }

    pub fn with_cell_samples(mut self, m: usize) -> Self {
        self.cell_samples = m;
        self
    }
}

impl Default for BernsteinKantorovichChoquet1 {
    fn default() -> Self {
        Self::new()
    }
}

impl OperatorFamily for BernsteinKantorovichChoquet1 {
    fn name(&self) -> &str {
        "bernstein_kantorovich_choquet"
    }

    fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    fn profile(&self) -> AxiomProfile {
        // Each cell mean is a Choquet integral against a submodular
        // capacity: subadditive, positively homogeneous, monotone,
        // translation-covariant and comonotone-additive. Nonnegative
        // Bernstein weights preserve all of that.
        AxiomProfile {
            sublinear: true,
            monotone: true,
            translatable: true,
            unital: true,
            comonotone_additive: true,
        }
    }

    fn prepare(&self, n: usize, f: &ScalarField) -> Result<PreparedOperator> {
        let cfg = QuadratureConfig::fixed(self.cell_samples);
        let means: Vec<f64> = (0..=n)
            .into_par_iter()
            .map(|k| {
                let c = cell(k, n)?;
                let num = choquet_integral_1d(|t| f.eval1(t), &c, &self.mu, &cfg)?;
                let den = choquet_integral_1d(|_| 1.0, &c, &self.mu, &cfg)?;
                if !(den > 0.0) {
                    return Err(Error::Precondition(format!(
                        "capacity '{}' vanishes on cell {k} of order {n}",
                        self.mu.name
                    )));
                }
                Ok(num / den)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PreparedOperator::new(move |p| {
            let x = p.scalar()?;
            Ok(bernstein_row(n, x).iter().zip(&means).map(|(w, a)| w * a).sum())
        }))
    }
}

/// Two-variable tensor Bernstein-Kantorovich operator with iterated Choquet
/// cell means over square cells.
pub struct BernsteinKantorovichChoquet2 {
    domain: DomainSpec,
    mu: Capacity,
    /// Quadrature cells per axis inside each operator cell.
    cell_axis_samples: usize,
}

impl BernsteinKantorovichChoquet2 {
    pub fn new() -> Self {
        BernsteinKantorovichChoquet2 {
            domain: DomainSpec::unit_square(),
            mu: sqrt_lebesgue(),
            cell_axis_samples: 16,
        }
    }

    pub fn with_capacity(mut self, mu: Capacity) -> Self {
        self.mu = mu;
        self
    }

    pub fn with_cell_axis_samples(mut self, m: usize) -> Self {
        self.cell_axis_samples = m;
        self
    }
}

impl Default for BernsteinKantorovichChoquet2 {
    fn default() -> Self {
        Self::new()
    }
}

impl OperatorFamily for BernsteinKantorovichChoquet2 {
    fn name(&self) -> &str {
        "bernstein_kantorovich_choquet_2d"
    }

    fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    fn profile(&self) -> AxiomProfile {
        // The iterated integral keeps sublinearity, monotonicity and
        // translation, but comonotone additivity is lost: comonotone
        // planar pairs need not have comonotone inner integrals.
        AxiomProfile {
            sublinear: true,
            monotone: true,
            translatable: true,
            unital: true,
            comonotone_additive: false,
        }
    }

    fn prepare(&self, n: usize, f: &ScalarField) -> Result<PreparedOperator> {
        let cfg = QuadratureConfig::fixed(self.cell_axis_samples * self.cell_axis_samples);
        let side = n + 1;
        let means: Vec<f64> = (0..side * side)
            .into_par_iter()
            .map(|idx| {
                let (k1, k2) = (idx / side, idx % side);
                let cx = cell(k1, n)?;
                let cy = cell(k2, n)?;
                let num = choquet_integral_2d_iterated(
                    |t1, t2| f.eval2(t1, t2),
                    &cx,
                    &cy,
                    &self.mu,
                    &cfg,
                )?;
                let den =
                    choquet_integral_2d_iterated(|_, _| 1.0, &cx, &cy, &self.mu, &cfg)?;
                if !(den > 0.0) {
                    return Err(Error::Precondition(format!(
                        "capacity '{}' vanishes on cell ({k1},{k2}) of order {n}",
                        self.mu.name
                    )));
                }
                Ok(num / den)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PreparedOperator::new(move |p| {
            let (x1, x2) = p.planar()?;
            let r1 = bernstein_row(n, x1);
            let r2 = bernstein_row(n, x2);
            let mut acc = 0.0;
            for (k1, w1) in r1.iter().enumerate() {
                if *w1 == 0.0 {
                    continue;
                }
                let row = &means[k1 * side..(k1 + 1) * side];
                let partial: f64 = r2.iter().zip(row).map(|(w2, a)| w2 * a).sum();
                acc += w1 * partial;
            }
            Ok(acc)
        }))
    }
}
