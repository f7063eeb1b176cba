//! Weakly nonlinear operators on convergent sequences. A sequence is held
//! as a finite prefix plus an optional tail limit; operators that blend the
//! running entries with the limit require it, the rest work on the prefix
//! alone.
//!
//! All four operators preserve constants, translate, and are sublinear and
//! monotone. They differ on comonotone additivity: blending each entry with
//! the tail limit respects comonotone pairs (the sign of x_j - lim x is
//! controlled by comonotonicity, limits included), while blending with a
//! running mean does not.

use crate::error::{Error, Result};
use crate::operators::AxiomProfile;

#[derive(Clone, Debug)]
pub struct FiniteSequence {
    entries: Vec<f64>,
    tail_limit: Option<f64>,
}

impl FiniteSequence {
    pub fn new(entries: Vec<f64>, tail_limit: Option<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptyInput("sequence prefix".into()));
        }
        if let Some(bad) = entries.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFiniteSample(format!("sequence entry {bad}")));
        }
        if let Some(l) = tail_limit {
            if !l.is_finite() {
                return Err(Error::NonFiniteSample(format!("tail limit {l}")));
            }
        }
        Ok(FiniteSequence { entries, tail_limit })
    }

    pub fn convergent(entries: Vec<f64>, limit: f64) -> Result<Self> {
        FiniteSequence::new(entries, Some(limit))
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn tail_limit(&self) -> Option<f64> {
        self.tail_limit
    }

    /// Tail limit when known, otherwise the maximum over the trailing
    /// quarter of the prefix.
    pub fn limsup_estimate(&self) -> f64 {
        match self.tail_limit {
            Some(l) => l,
            None => {
                let start = self.entries.len() - (self.entries.len() / 4).max(1);
                self.entries[start..].iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b))
            }
        }
    }

    pub fn add(&self, other: &FiniteSequence) -> Result<FiniteSequence> {
        if self.entries.len() != other.entries.len() {
            return Err(Error::Precondition(format!(
                "prefix lengths differ: {} vs {}",
                self.entries.len(),
                other.entries.len()
            )));
        }
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect();
        let tail_limit = match (self.tail_limit, other.tail_limit) {
            (Some(a), Some(b)) => Some(a + b),
            _ => None,
        };
        FiniteSequence::new(entries, tail_limit)
    }

    pub fn scale(&self, c: f64) -> FiniteSequence {
        FiniteSequence {
            entries: self.entries.iter().map(|v| c * v).collect(),
            tail_limit: self.tail_limit.map(|l| c * l),
        }
    }

    pub fn add_const(&self, a: f64) -> FiniteSequence {
        FiniteSequence {
            entries: self.entries.iter().map(|v| v + a).collect(),
            tail_limit: self.tail_limit.map(|l| l + a),
        }
    }
}

/// Entrywise dominance, tail limits included when both are known.
pub fn seq_le(a: &FiniteSequence, b: &FiniteSequence) -> bool {
    a.entries.len() == b.entries.len()
        && a.entries.iter().zip(&b.entries).all(|(x, y)| x <= y)
        && match (a.tail_limit, b.tail_limit) {
            (Some(x), Some(y)) => x <= y,
            _ => true,
        }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SequenceOperator {
    /// Entry j becomes max(x_j, lim x).
    SupWithTail,
    /// Entry j becomes max of the running Cesàro mean and lim x.
    CesaroSupWithTail,
    /// Entry j becomes max(x_j, D_j) with the dyadically weighted mean
    /// D_j = (sum_{k<=j} 2^k x_k) / (2^{j+1} - 1).
    DyadicBlend,
    /// Every entry becomes the limsup of the sequence.
    LimsupConstant,
}

impl SequenceOperator {
    pub fn name(&self) -> &'static str {
        match self {
            SequenceOperator::SupWithTail => "sup_with_tail",
            SequenceOperator::CesaroSupWithTail => "cesaro_sup_with_tail",
            SequenceOperator::DyadicBlend => "dyadic_blend",
            SequenceOperator::LimsupConstant => "limsup_constant",
        }
    }

    pub fn profile(&self) -> AxiomProfile {
        let comonotone_additive = matches!(
            self,
            SequenceOperator::SupWithTail | SequenceOperator::LimsupConstant
        );
        AxiomProfile {
            sublinear: true,
            monotone: true,
            translatable: true,
            unital: true,
            comonotone_additive,
        }
    }

    pub fn apply(&self, x: &FiniteSequence) -> Result<FiniteSequence> {
        match self {
            SequenceOperator::SupWithTail => {
                let l = x.tail_limit.ok_or(Error::MissingTailLimit)?;
                let entries = x.entries.iter().map(|&v| v.max(l)).collect();
                FiniteSequence::new(entries, Some(l))
            }
            SequenceOperator::CesaroSupWithTail => {
                let l = x.tail_limit.ok_or(Error::MissingTailLimit)?;
                let mut sum = 0.0;
                let entries = x
                    .entries
                    .iter()
                    .enumerate()
                    .map(|(j, &v)| {
                        sum += v;
                        (sum / (j + 1) as f64).max(l)
                    })
                    .collect();
                FiniteSequence::new(entries, Some(l))
            }
            SequenceOperator::DyadicBlend => {
                // scaled recurrence N_j = x_j + N_{j-1}/2 keeps the dyadic
                // sum bounded; D_j = N_j / (2 - 2^{-j})
                let mut n_prev = 0.0;
                let entries = x
                    .entries
                    .iter()
                    .enumerate()
                    .map(|(j, &v)| {
                        let n_j = v + 0.5 * n_prev;
                        n_prev = n_j;
                        let denom = 2.0 - 0.5f64.powi(j.min(1100) as i32);
                        v.max(n_j / denom)
                    })
                    .collect();
                FiniteSequence::new(entries, x.tail_limit)
            }
            SequenceOperator::LimsupConstant => {
                let l = x.limsup_estimate();
                FiniteSequence::new(vec![l; x.entries.len()], Some(l))
            }
        }
    }
}

pub const SEQUENCE_OPERATORS: [SequenceOperator; 4] = [
    SequenceOperator::SupWithTail,
    SequenceOperator::CesaroSupWithTail,
    SequenceOperator::DyadicBlend,
    SequenceOperator::LimsupConstant,
];

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn assert_entries_eq(a: &FiniteSequence, b: &[f64], tol: f64) {
        assert_eq!(a.entries().len(), b.len());
        for (x, y) in a.entries().iter().zip(b) {
            assert_abs_diff_eq!(x, y, epsilon = tol);
        }
    }

    #[test]
    fn dyadic_mean_matches_direct_formula() {
        let xs: Vec<f64> = (0..12).map(|j| ((j * 37 % 11) as f64) / 3.0 - 1.0).collect();
        let x = FiniteSequence::convergent(xs.clone(), 0.0).unwrap();
        let out = SequenceOperator::DyadicBlend.apply(&x).unwrap();
        for j in 0..xs.len() {
            let num: f64 = (0..=j).map(|k| 2f64.powi(k as i32) * xs[k]).sum();
            let direct = xs[j].max(num / (2f64.powi(j as i32 + 1) - 1.0));
            assert_abs_diff_eq!(out.entries()[j], direct, epsilon = 1e-12);
        }
    }

    #[test]
    fn constants_are_preserved_and_translation_is_exact() {
        let x = FiniteSequence::convergent(vec![0.4, -1.0, 0.25, 0.1, 0.0], 0.0).unwrap();
        for op in SEQUENCE_OPERATORS {
            let ones = FiniteSequence::convergent(vec![1.0; 5], 1.0).unwrap();
            assert_entries_eq(&op.apply(&ones).unwrap(), &[1.0; 5], 0.0);

            let shifted = op.apply(&x.add_const(2.5)).unwrap();
            let base = op.apply(&x).unwrap().add_const(2.5);
            assert_entries_eq(&shifted, base.entries(), 1e-12);
        }
    }

    #[test]
    fn blending_with_the_tail_limit_splits_comonotone_pairs() {
        // comonotone pair: both are nondecreasing transforms of one driver
        let h = [2.0, 0.0, 1.0, 1.0, 1.0, 1.0];
        let phi = |t: f64| if t < 0.5 { 0.0 } else { 1.0 };
        let psi = |t: f64| t * t;
        let x = FiniteSequence::convergent(h.iter().map(|&t| phi(t)).collect(), phi(1.0)).unwrap();
        let y = FiniteSequence::convergent(h.iter().map(|&t| psi(t)).collect(), psi(1.0)).unwrap();
        let joint = SequenceOperator::SupWithTail.apply(&x.add(&y).unwrap()).unwrap();
        let split = SequenceOperator::SupWithTail
            .apply(&x)
            .unwrap()
            .add(&SequenceOperator::SupWithTail.apply(&y).unwrap())
            .unwrap();
        assert_entries_eq(&joint, split.entries(), 1e-12);
    }

    #[test]
    fn cesaro_blend_breaks_comonotone_additivity() {
        // x and y are nondecreasing transforms of h = (2, 0, 1, 1, ...):
        // x = (1, 0, 1, 1, ...) stays below its limit in Cesàro mean, while
        // y = (1, 0, 0, 0, ...) stays above its limit 0, so the max picks
        // different branches and additivity fails by 1/2 at entry 1.
        let x = FiniteSequence::convergent(vec![1.0, 0.0, 1.0, 1.0], 1.0).unwrap();
        let y = FiniteSequence::convergent(vec![1.0, 0.0, 0.0, 0.0], 0.0).unwrap();
        let joint = SequenceOperator::CesaroSupWithTail.apply(&x.add(&y).unwrap()).unwrap();
        let split = SequenceOperator::CesaroSupWithTail
            .apply(&x)
            .unwrap()
            .add(&SequenceOperator::CesaroSupWithTail.apply(&y).unwrap())
            .unwrap();
        assert_abs_diff_eq!(split.entries()[1] - joint.entries()[1], 0.5, epsilon = 1e-12);
    }

    #[test]
    fn dyadic_blend_breaks_comonotone_additivity() {
        // driver h = (0, 2, 1, 1): x = h, y maps 2 to 1.01; at entry 2 the
        // dyadic mean exceeds x_2 but not y_2
        let x = FiniteSequence::convergent(vec![0.0, 2.0, 1.0, 1.0], 1.0).unwrap();
        let y = FiniteSequence::convergent(vec![0.0, 1.01, 1.0, 1.0], 1.0).unwrap();
        let joint = SequenceOperator::DyadicBlend.apply(&x.add(&y).unwrap()).unwrap();
        let split = SequenceOperator::DyadicBlend
            .apply(&x)
            .unwrap()
            .add(&SequenceOperator::DyadicBlend.apply(&y).unwrap())
            .unwrap();
        let gap = split.entries()[2] - joint.entries()[2];
        assert!(gap > 0.1, "expected a visible additivity gap, got {gap}");
    }

    #[test]
    fn operators_are_monotone_and_subadditive_on_samples() {
        let x = FiniteSequence::convergent(vec![0.3, -0.7, 1.1, 0.2, 0.05], 0.1).unwrap();
        let y = FiniteSequence::convergent(vec![-0.2, 0.5, 0.4, -0.9, 0.0], -0.1).unwrap();
        for op in SEQUENCE_OPERATORS {
            let tx = op.apply(&x).unwrap();
            let ty = op.apply(&y).unwrap();
            let txy = op.apply(&x.add(&y).unwrap()).unwrap();
            for j in 0..5 {
                assert!(
                    txy.entries()[j] <= tx.entries()[j] + ty.entries()[j] + 1e-12,
                    "{} not subadditive at {j}",
                    op.name()
                );
            }
            let dominated = x.add_const(0.4);
            assert!(seq_le(&tx, &op.apply(&dominated).unwrap()), "{} not monotone", op.name());
        }
    }

    #[test]
    fn missing_tail_limit_is_an_error() {
        let x = FiniteSequence::new(vec![1.0, 2.0], None).unwrap();
        assert!(SequenceOperator::SupWithTail.apply(&x).is_err());
        assert!(SequenceOperator::CesaroSupWithTail.apply(&x).is_err());
        assert!(SequenceOperator::DyadicBlend.apply(&x).is_ok());
        assert!(SequenceOperator::LimsupConstant.apply(&x).is_ok());
    }
}
