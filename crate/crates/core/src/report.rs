//! Pass/fail reports produced by the property checkers.

use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

/// Outcome of a randomized or grid-based property check.
///
/// Invariants: `verdict == Fail` exactly when `worst_violation > tolerance`,
/// and a witness is recorded exactly on failure.
#[derive(Clone, Debug)]
pub struct PropertyReport {
    pub property: String,
    pub trials: usize,
    pub worst_violation: f64,
    pub tolerance: f64,
    pub witness: Option<String>,
    pub verdict: Verdict,
}

impl PropertyReport {
    /// Builds a report, enforcing the verdict/witness invariants. The
    /// witness argument is kept only if the check failed.
    pub fn new(
        property: impl Into<String>,
        trials: usize,
        worst_violation: f64,
        tolerance: f64,
        witness: Option<String>,
    ) -> Self {
        let fail = worst_violation > tolerance || worst_violation.is_nan();
        PropertyReport {
            property: property.into(),
            trials,
            worst_violation,
            tolerance,
            witness: if fail { witness } else { None },
            verdict: if fail { Verdict::Fail } else { Verdict::Pass },
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

impl fmt::Display for PropertyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} (trials {}, worst violation {:.3e}, tol {:.1e})",
            self.property,
            match self.verdict {
                Verdict::Pass => "pass",
                Verdict::Fail => "FAIL",
            },
            self.trials,
            self.worst_violation,
            self.tolerance,
        )?;
        if let Some(w) = &self.witness {
            write!(f, " witness: {w}")?;
        }
        Ok(())
    }
}

/// Folds per-trial results into (worst violation, witness of the first trial
/// attaining it). Deterministic as long as the slice order is fixed, so
/// parallel trial evaluation must collect in trial order before folding.
pub fn fold_trials(results: &[(f64, Option<String>)]) -> (f64, Option<String>) {
    let mut worst = 0.0_f64;
    let mut witness: Option<String> = None;
    let mut first = true;
    for (v, w) in results {
        if first || *v > worst {
            worst = *v;
            witness = w.clone();
            first = false;
        }
    }
    (worst, witness)
}
