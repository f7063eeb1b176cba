//! Max-product Bernstein operator on the standard simplex
//! {(x1, x2) : x1, x2 >= 0, x1 + x2 <= 1}: the usual Bernstein weights
//! combined by maximum instead of summation,
//!
//!   T_n(f)(x) = max_{i+j<=n} w_{ij}(x) f(i/n, j/n) / max_{i+j<=n} w_{ij}(x),
//!
//! with trinomial weights w_{ij}(x) = C(n,i) C(n-i,j) x1^i x2^j (1-x1-x2)^{n-i-j}.
//! The weight maximum in the denominator is at least 1/#nodes because the
//! weights sum to 1, so the ratio never degenerates on the simplex.

use crate::domain::{DomainSpec, ScalarField};
use crate::error::{Error, Result};
use crate::operators::bernstein::ln_binomial;
use crate::operators::{AxiomProfile, OperatorFamily, PreparedOperator};

const MEMBERSHIP_SLACK: f64 = 1e-12;

/// exp * ln(base), with the 0^0 = 1 convention: a zero exponent contributes
/// nothing even when ln(base) = -inf.
fn pow_term(exp: usize, ln_base: f64) -> f64 {
    if exp == 0 {
        0.0
    } else {
        exp as f64 * ln_base
    }
}

pub struct MaxProductBernstein {
    domain: DomainSpec,
}

impl MaxProductBernstein {
    pub fn new() -> Self {
        MaxProductBernstein { domain: DomainSpec::simplex() }
    }
}

impl Default for MaxProductBernstein {
    fn default() -> Self {
        Self::new()
    }
}

impl OperatorFamily for MaxProductBernstein {
    fn name(&self) -> &str {
        "maxprod_bernstein"
    }

    fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    fn profile(&self) -> AxiomProfile {
        // max(w(f+c))/max(w) shifts by less than c whenever different nodes
        // win the two maxima, so translation fails; same obstruction breaks
        // comonotone additivity.
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
        // lattice values f(i/n, j/n), rows indexed by i
        let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let mut row = Vec::with_capacity(n - i + 1);
            for j in 0..=(n - i) {
                let v = f.eval2(i as f64 / n as f64, j as f64 / n as f64);
                if !v.is_finite() {
                    return Err(Error::NonFiniteSample(format!(
                        "f({}, {}) = {v}",
                        i as f64 / n as f64,
                        j as f64 / n as f64
                    )));
                }
                row.push(v);
            }
            rows.push(row);
        }
        // log-binomial part of each weight is x-free; hoist it out of eval
        let coefs: Vec<Vec<f64>> = (0..=n)
            .map(|i| (0..=(n - i)).map(|j| ln_binomial(n, i) + ln_binomial(n - i, j)).collect())
            .collect();

        Ok(PreparedOperator::new(move |p| {
            let (x1, x2) = p.planar()?;
            let x3 = 1.0 - x1 - x2;
            if x1 < -MEMBERSHIP_SLACK || x2 < -MEMBERSHIP_SLACK || x3 < -MEMBERSHIP_SLACK {
                return Err(Error::OutsideDomain(format!("({x1}, {x2}) is not in the simplex")));
            }
            let (lx1, lx2, lx3) =
                (x1.max(0.0).ln(), x2.max(0.0).ln(), x3.max(0.0).ln());
            let ln_w = |i: usize, j: usize, coef: f64| {
                coef + pow_term(i, lx1) + pow_term(j, lx2) + pow_term(n - i - j, lx3)
            };
            let mut ln_max = f64::NEG_INFINITY;
            for (i, crow) in coefs.iter().enumerate() {
                for (j, &c) in crow.iter().enumerate() {
                    ln_max = ln_max.max(ln_w(i, j, c));
                }
            }
            // weights sum to 1, so ln_max >= -ln((n+1)(n+2)/2) is finite
            let mut num = f64::NEG_INFINITY;
            let mut den = f64::NEG_INFINITY;
            for ((i, crow), row) in coefs.iter().enumerate().zip(&rows) {
                for ((j, &c), &fv) in crow.iter().enumerate().zip(row) {
                    let w = (ln_w(i, j, c) - ln_max).exp();
                    num = num.max(w * fv);
                    den = den.max(w);
                }
            }
            Ok(num / den)
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Point;
    use approx::assert_abs_diff_eq;

    fn pr1() -> ScalarField {
        ScalarField::of_xy("pr1", DomainSpec::simplex(), |x, _| x)
    }

    #[test]
    fn unital_everywhere() {
        let op = MaxProductBernstein::new();
        let one = ScalarField::one(DomainSpec::simplex());
        for n in [1usize, 7, 40] {
            let t = op.prepare(n, &one).unwrap();
            for p in [
                Point::Planar(0.0, 0.0),
                Point::Planar(1.0, 0.0),
                Point::Planar(0.25, 0.5),
                Point::Planar(1.0 / 3.0, 1.0 / 3.0),
            ] {
                assert_abs_diff_eq!(t.eval(p).unwrap(), 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn translation_gap_at_order_one() {
        // At x = (0.3, 0.3) the order-1 weights are (0.4, 0.3, 0.3) for the
        // nodes (0,0), (1,0), (0,1). For f = pr1: num = max(0, 0.3, 0) = 0.3,
        // den = 0.4, so T(f) = 0.75; for f + 1 the numerator becomes
        // max(0.4, 0.6, 0.3) = 0.6 and T(f+1) = 1.5, a gap of 0.25.
        let op = MaxProductBernstein::new();
        let f = pr1();
        let base = op.prepare(1, &f).unwrap();
        let shifted = op.prepare(1, &f.add_const(1.0)).unwrap();
        let p = Point::Planar(0.3, 0.3);
        assert_abs_diff_eq!(base.eval(p).unwrap(), 0.75, epsilon = 1e-12);
        assert_abs_diff_eq!(shifted.eval(p).unwrap(), 1.5, epsilon = 1e-12);
    }

    #[test]
    fn reproduces_vertex_values() {
        let op = MaxProductBernstein::new();
        let f = ScalarField::of_xy("mix", DomainSpec::simplex(), |x, y| x + 2.0 * y);
        let t = op.prepare(9, &f).unwrap();
        // at a vertex one weight is 1 and the rest vanish
        assert_abs_diff_eq!(t.eval(Point::Planar(0.0, 0.0)).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(t.eval(Point::Planar(1.0, 0.0)).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(t.eval(Point::Planar(0.0, 1.0)).unwrap(), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn rejects_points_outside_the_simplex() {
        let op = MaxProductBernstein::new();
        let t = op.prepare(3, &pr1()).unwrap();
        assert!(t.eval(Point::Planar(0.7, 0.7)).is_err());
        assert!(t.eval(Point::Planar(-0.1, 0.2)).is_err());
    }

    #[test]
    fn monotone_in_the_argument() {
        let op = MaxProductBernstein::new();
        let lo = ScalarField::of_xy("lo", DomainSpec::simplex(), |x, y| x * y);
        let hi = ScalarField::of_xy("hi", DomainSpec::simplex(), |x, y| x * y + 0.3 * x);
        let tl = op.prepare(6, &lo).unwrap();
        let th = op.prepare(6, &hi).unwrap();
        for p in [Point::Planar(0.2, 0.2), Point::Planar(0.5, 0.25), Point::Planar(0.05, 0.9)] {
            assert!(tl.eval(p).unwrap() <= th.eval(p).unwrap() + 1e-12);
        }
    }
}
