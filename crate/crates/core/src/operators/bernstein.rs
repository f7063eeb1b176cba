//! Bernstein basis utilities shared by the polynomial-kernel families, and
//! the truncated Bernstein operator (a deliberately non-translatable
//! example: it clips node values at zero).

use statrs::function::gamma::ln_gamma;

use crate::domain::{DomainSpec, Point, ScalarField};
use crate::error::{Error, Result};
use crate::operators::{AxiomProfile, OperatorFamily, PreparedOperator};

/// Largest order whose binomials are computed in exact integer arithmetic.
const EXACT_BINOMIAL_MAX_N: usize = 60;

/// C(n, k). Exact through u128 arithmetic for n <= 60, via log-gamma beyond
/// (relative error ~1e-14, far below anything the weights can feel).
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    if n <= EXACT_BINOMIAL_MAX_N {
        let mut acc: u128 = 1;
        for i in 1..=k {
            // stays integral: C(n-k+i, i) divides the running product
            acc = acc * (n - k + i) as u128 / i as u128;
        }
        acc as f64
    } else {
        ln_binomial(n, k).exp()
    }
}

pub fn ln_binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

/// p_{n,k}(t) = C(n,k) t^k (1-t)^{n-k}, with exact values at t in {0, 1}.
/// Interior points go through the log domain, which is uniformly accurate
/// for every order this crate uses.
pub fn bernstein_basis(n: usize, k: usize, t: f64) -> f64 {
    if k > n {
        return 0.0;
    }
    if t == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    if t == 1.0 {
        return if k == n { 1.0 } else { 0.0 };
    }
    let ln_p = ln_binomial(n, k) + k as f64 * t.ln() + (n - k) as f64 * (1.0 - t).ln();
    ln_p.exp()
}

/// All n+1 basis values at t.
pub fn bernstein_row(n: usize, t: f64) -> Vec<f64> {
    (0..=n).map(|k| bernstein_basis(n, k, t)).collect()
}

/// T_n(f)(x) = sum_k p_{n,k}(x) · max(f(k/n), 0).
///
/// Clipping the node values keeps the operator sublinear and monotone but
/// destroys translatability: adding a constant to a function that dips
/// below zero moves clipped nodes by less than the constant. Restoring
/// convergence for sign-changing functions therefore needs the shift trick
/// T_n(f + ||f||) - ||f||.
pub struct TruncatedBernstein {
    domain: DomainSpec,
}

impl TruncatedBernstein {
    pub fn new() -> Self {
        TruncatedBernstein { domain: DomainSpec::unit_interval() }
    }
}

impl Default for TruncatedBernstein {
    fn default() -> Self {
        Self::new()
    }
}

impl OperatorFamily for TruncatedBernstein {
    fn name(&self) -> &str {
        "bernstein_truncated"
    }

    fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    fn profile(&self) -> AxiomProfile {
        AxiomProfile {
            sublinear: true,
            monotone: true,
            translatable: false,
            unital: true,
            comonotone_additive: false,
        }
    }

    fn prepare(&self, n: usize, f: &ScalarField) -> Result<PreparedOperator> {
        if n == 0 {
            return Err(Error::Precondition("operator order must be at least 1".into()));
        }
        let vals: Vec<f64> = (0..=n)
            .map(|k| f.eval(Point::Scalar(k as f64 / n as f64)).max(0.0))
            .collect();
        if let Some(bad) = vals.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFiniteSample(format!("node value {bad}")));
        }
        Ok(PreparedOperator::new(move |p| {
            let x = p.scalar()?;
            Ok(bernstein_row(n, x)
                .iter()
                .zip(&vals)
                .map(|(w, v)| w * v)
                .sum())
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(0, 0), 1.0);
        assert_eq!(binomial(5, 2), 10.0);
        assert_eq!(binomial(60, 30), 118264581564861424.0);
        assert_eq!(binomial(4, 7), 0.0);
    }

    #[test]
    fn log_binomial_matches_exact() {
        for n in [10usize, 37, 60] {
            for k in 0..=n {
                let exact = binomial(n, k);
                let viagamma = ln_binomial(n, k).exp();
                assert_abs_diff_eq!(viagamma / exact, 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn basis_is_a_partition_of_unity() {
        for n in [1usize, 8, 60, 61, 128, 200] {
            for i in 0..=17 {
                let t = i as f64 / 17.0;
                let s: f64 = bernstein_row(n, t).iter().sum();
                assert_abs_diff_eq!(s, 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn basis_endpoints_are_exact() {
        assert_eq!(bernstein_basis(9, 0, 0.0), 1.0);
        assert_eq!(bernstein_basis(9, 3, 0.0), 0.0);
        assert_eq!(bernstein_basis(9, 9, 1.0), 1.0);
        assert_eq!(bernstein_basis(9, 8, 1.0), 0.0);
    }

    #[test]
    fn truncated_operator_reproduces_nonnegative_polynomials_at_nodes() {
        let op = TruncatedBernstein::new();
        let d = DomainSpec::unit_interval();
        let f = ScalarField::of_x("e1", d, |t| t);
        let t = op.prepare(16, &f).unwrap();
        // linear functions are reproduced exactly by the Bernstein scheme
        assert_abs_diff_eq!(t.eval(Point::Scalar(0.37)).unwrap(), 0.37, epsilon = 1e-12);
        let one = ScalarField::one(DomainSpec::unit_interval());
        let t = op.prepare(16, &one).unwrap();
        assert_abs_diff_eq!(t.eval(Point::Scalar(0.7)).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn truncation_bites_functions_with_negative_values() {
        let op = TruncatedBernstein::new();
        let d = DomainSpec::unit_interval();
        let f = ScalarField::of_x("e1 - 1/2", d, |t| t - 0.5);
        let t = op.prepare(32, &f).unwrap();
        // every node below 1/2 is clipped to zero; at x = 0 the value is
        // exactly the clipped node 0, while f(0) = -1/2
        assert_eq!(t.eval(Point::Scalar(0.0)).unwrap(), 0.0);
    }
}
