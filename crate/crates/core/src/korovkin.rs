//! The convergence laboratory: canonical test sets, separating functions,
//! a sup-error harness with per-function verdicts, per-family rate-bound
//! verification, the Lipschitz error bound, and the shift trick for
//! sign-changing arguments under families that are not translatable.
//!
//! "Uniform convergence" is operationalized throughout as a supremum over a
//! finite evaluation grid. Grid resolution is a parameter and is recorded in
//! every report, so coarse fast runs and fine validation runs stay
//! distinguishable.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::domain::{AxisDependence, DomainKind, DomainSpec, Point, ScalarField};
use crate::error::{Error, Result};
use crate::operators::{OperatorFamily, PreparedOperator};
use crate::report::PropertyReport;

/// Traces whose final error is at or below this are treated as converged
/// even when flat: exact-by-construction identities (unit preservation, node
/// reproduction) sit at rounding level for every order and have nowhere
/// further to descend.
const ZERO_FLOOR: f64 = 1e-12;

fn eval_err(family: &str, n: usize, function: &str, point: impl fmt::Display, e: Error) -> Error {
    Error::OperatorEval {
        family: family.into(),
        n: n as u32,
        function: function.into(),
        point: point.to_string(),
        source: Box::new(e),
    }
}

// ---------------------------------------------------------------------------
// separating functions

/// A nonnegative bivariate function vanishing exactly on the diagonal. Its
/// sections γ(x, ·) are the probe functions of the convergence hypotheses:
/// an operator family that flattens them at their own center point pinches
/// every continuous function against the test set.
#[derive(Clone)]
pub struct SeparatingFn {
    name: String,
    domain: DomainSpec,
    gamma: Arc<dyn Fn(Point, Point) -> f64 + Send + Sync>,
}

impl SeparatingFn {
    /// d(x, y)^p for the domain's own metric.
    pub fn metric_power(domain: &DomainSpec, p: f64) -> Self {
        let metric_domain = domain.clone();
        SeparatingFn {
            name: format!("d^{p}"),
            domain: domain.clone(),
            gamma: Arc::new(move |x, y| metric_domain.metric(x, y).powf(p)),
        }
    }

    /// The squared metric — the default γ used by the harness diagnostics.
    pub fn squared_metric(domain: &DomainSpec) -> Self {
        Self::metric_power(domain, 2.0)
    }

    /// γ(x, y) = Σ_k (f_k(x) − f_k(y))² built from a finite function family.
    /// Separates points iff the family does.
    pub fn from_family(domain: &DomainSpec, fields: &[ScalarField]) -> Result<Self> {
        if fields.is_empty() {
            return Err(Error::EmptyInput("separating family".into()));
        }
        let names: Vec<&str> = fields.iter().map(|f| f.name()).collect();
        let name = format!("sum_sq({})", names.join(", "));
        let fields = fields.to_vec();
        Ok(SeparatingFn {
            name,
            domain: domain.clone(),
            gamma: Arc::new(move |x, y| {
                fields
                    .iter()
                    .map(|f| {
                        let d = f.eval(x) - f.eval(y);
                        d * d
                    })
                    .sum()
            }),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    pub fn value(&self, x: Point, y: Point) -> f64 {
        (self.gamma)(x, y)
    }

    /// The section t ↦ γ(x, t) as a field, ready to feed through an operator.
    pub fn center_section(&self, x: Point) -> ScalarField {
        let gamma = self.gamma.clone();
        ScalarField::new(format!("{}@{x}", self.name), self.domain.clone(), move |t| gamma(x, t))
    }
}

/// Outcome of `check_separating`: the fitted constants together with the
/// structural pass/fail report.
pub struct SeparationCheck {
    /// Per ε, the least δ̂ with d(x, y) ≤ ε + δ̂·γ(x, y) on all grid pairs
    /// (0 when no pair is farther than ε apart).
    pub deltas: Vec<(f64, f64)>,
    pub report: PropertyReport,
}

/// Verifies that γ is admissible on a grid: vanishes on the diagonal, is
/// nonnegative, and for each ε admits a finite δ̂(ε) with
/// d(x, y) ≤ ε + δ̂(ε)·γ(x, y) across all grid pairs. Fails exactly when γ
/// is negative somewhere, nonzero on the diagonal, or zero on a pair with
/// d > ε (no finite δ̂ exists).
pub fn check_separating(
    sep: &SeparatingFn,
    per_axis: usize,
    epsilons: &[f64],
) -> Result<SeparationCheck> {
    if epsilons.is_empty() {
        return Err(Error::EmptyInput("epsilon list".into()));
    }
    for &eps in epsilons {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::InvalidConfig(format!("epsilon must be positive, got {eps}")));
        }
    }
    let grid = sep.domain.grid_points(per_axis);

    let mut worst = 0.0_f64;
    let mut witness = None;
    for &x in &grid {
        let diag = sep.value(x, x).abs();
        if diag > worst {
            worst = diag;
            witness = Some(format!("γ(x, x) = {diag:.3e} at x = {x}"));
        }
    }

    // (distance, γ) over unordered pairs; γ sign violations fold into worst
    let mut pairs = Vec::with_capacity(grid.len() * (grid.len() - 1) / 2);
    for (i, &x) in grid.iter().enumerate() {
        for &y in &grid[i + 1..] {
            let g = sep.value(x, y);
            if -g > worst {
                worst = -g;
                witness = Some(format!("γ = {g:.3e} < 0 at ({x}, {y})"));
            }
            pairs.push((sep.domain.metric(x, y), g, x, y));
        }
    }

    let mut deltas = Vec::with_capacity(epsilons.len());
    for &eps in epsilons {
        let mut delta = 0.0_f64;
        for &(d, g, x, y) in &pairs {
            if d <= eps {
                continue;
            }
            if g <= 0.0 {
                // d > ε with γ = 0: no finite δ̂ can close the gap
                if 1.0 > worst {
                    worst = 1.0;
                    witness = Some(format!("γ = 0 but d = {d:.3} at ({x}, {y})"));
                }
            } else {
                delta = delta.max((d - eps) / g);
            }
        }
        deltas.push((eps, delta));
    }

    let report = PropertyReport::new(
        format!("separating[{}]", sep.name),
        pairs.len() * epsilons.len(),
        worst,
        1e-9,
        witness,
    );
    Ok(SeparationCheck { deltas, report })
}

// ---------------------------------------------------------------------------
// test sets and probes

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TestSetKind {
    /// 1, ±pr_1, …, ±pr_N and Σ pr_k² on a Euclidean domain.
    Euclidean,
    /// 1, ±cos, ±sin on the circle.
    CircleTrig,
    /// Anything else, e.g. a nonnegative restriction.
    Custom,
}

/// The finite function family whose convergence under a family of operators
/// pins down convergence for all (nonnegative) continuous functions.
pub struct TestSet {
    pub kind: TestSetKind,
    pub functions: Vec<ScalarField>,
}

impl TestSet {
    pub fn names(&self) -> Vec<&str> {
        self.functions.iter().map(|f| f.name()).collect()
    }

    /// The members that are nonnegative on the default grid. Families that
    /// are not translatable only come with convergence guarantees for
    /// nonnegative arguments, so their protocols run on this subset.
    pub fn nonnegative_subset(&self, domain: &DomainSpec) -> TestSet {
        let grid = domain.default_grid();
        TestSet {
            kind: TestSetKind::Custom,
            functions: self
                .functions
                .iter()
                .filter(|f| f.grid_min(&grid) >= -1e-12)
                .cloned()
                .collect(),
        }
    }
}

/// Canonical test set for a domain: {1, ±e₁, e₂} on the interval,
/// {1, ±cos, ±sin} on the circle, {1, ±pr₁, ±pr₂, pr₁²+pr₂²} on the planar
/// domains. Lipschitz constants are with respect to the domain's own metric.
pub fn build_test_set(domain: &DomainSpec) -> TestSet {
    let d = domain.clone();
    match domain.kind {
        DomainKind::UnitInterval => TestSet {
            kind: TestSetKind::Euclidean,
            functions: vec![
                ScalarField::one(d.clone()),
                ScalarField::of_x("e1", d.clone(), |t| t)
                    .with_lipschitz(1.0)
                    .with_sup_norm_hint(1.0),
                ScalarField::of_x("neg_e1", d.clone(), |t| -t)
                    .with_lipschitz(1.0)
                    .with_sup_norm_hint(1.0),
                ScalarField::of_x("e2", d, |t| t * t)
                    .with_lipschitz(2.0)
                    .with_sup_norm_hint(1.0),
            ],
        },
        DomainKind::Circle => {
            // chord metric: |cos φ − cos ψ| and |sin φ − sin ψ| are both
            // bounded by 2|sin((φ−ψ)/2)|
            let entry = |name: &str, f: fn(f64) -> f64| {
                ScalarField::of_x(name, d.clone(), f).with_lipschitz(1.0).with_sup_norm_hint(1.0)
            };
            TestSet {
                kind: TestSetKind::CircleTrig,
                functions: vec![
                    ScalarField::one(d.clone()),
                    entry("cos", |t| t.cos()),
                    entry("neg_cos", |t| -t.cos()),
                    entry("sin", |t| t.sin()),
                    entry("neg_sin", |t| -t.sin()),
                ],
            }
        }
        DomainKind::UnitSquare | DomainKind::Simplex | DomainKind::PlaneWindow { .. } => {
            let (coord_hint, quad_lip, quad_hint) = match domain.kind {
                // |∇(x²+y²)| ≤ 2·max|x|, against the Euclidean metric
                DomainKind::UnitSquare => (1.0, 2.0 * std::f64::consts::SQRT_2, 2.0),
                DomainKind::Simplex => (1.0, 2.0, 1.0),
                // the plane window carries the taxicab metric, so the
                // per-axis slope bound 2·half_width is the constant
                DomainKind::PlaneWindow { half_width } => {
                    (half_width, 2.0 * half_width, 2.0 * half_width * half_width)
                }
                _ => unreachable!(),
            };
            TestSet {
                kind: TestSetKind::Euclidean,
                functions: vec![
                    ScalarField::one(d.clone()).with_dependence(AxisDependence::OnlyX1),
                    ScalarField::of_xy("pr1", d.clone(), |x, _| x)
                        .with_lipschitz(1.0)
                        .with_sup_norm_hint(coord_hint)
                        .with_dependence(AxisDependence::OnlyX1),
                    ScalarField::of_xy("neg_pr1", d.clone(), |x, _| -x)
                        .with_lipschitz(1.0)
                        .with_sup_norm_hint(coord_hint)
                        .with_dependence(AxisDependence::OnlyX1),
                    ScalarField::of_xy("pr2", d.clone(), |_, y| y)
                        .with_lipschitz(1.0)
                        .with_sup_norm_hint(coord_hint)
                        .with_dependence(AxisDependence::OnlyX2),
                    ScalarField::of_xy("neg_pr2", d.clone(), |_, y| -y)
                        .with_lipschitz(1.0)
                        .with_sup_norm_hint(coord_hint)
                        .with_dependence(AxisDependence::OnlyX2),
                    ScalarField::of_xy("pr1_sq_plus_pr2_sq", d, |x, y| x * x + y * y)
                        .with_lipschitz(quad_lip)
                        .with_sup_norm_hint(quad_hint),
                ],
            }
        }
    }
}

/// The family's canonical test set: the full signed set when it is
/// translatable, the nonnegative members otherwise (the signed protocol
/// relies on translation compatibility).
pub fn test_set_for(family: &dyn OperatorFamily) -> TestSet {
    let full = build_test_set(family.domain());
    if family.profile().translatable {
        full
    } else {
        full.nonnegative_subset(family.domain())
    }
}

/// Five nonnegative probe functions per domain, mixing smooth, kinked and
/// oscillating profiles. These are the "generic continuous functions" whose
/// convergence the test-set protocol is supposed to imply.
pub fn probe_set(domain: &DomainSpec) -> Vec<ScalarField> {
    use std::f64::consts::{E, PI};
    let d = domain.clone();
    match domain.kind {
        DomainKind::UnitInterval => vec![
            ScalarField::of_x("ramp", d.clone(), |t| t)
                .with_lipschitz(1.0)
                .with_sup_norm_hint(1.0),
            ScalarField::of_x("parabola", d.clone(), |t| t * t)
                .with_lipschitz(2.0)
                .with_sup_norm_hint(1.0),
            ScalarField::of_x("kink", d.clone(), |t| (t - 1.0 / 3.0).abs())
                .with_lipschitz(1.0)
                .with_sup_norm_hint(2.0 / 3.0),
            ScalarField::of_x("bump", d.clone(), |t| (PI * t).sin().powi(2))
                .with_lipschitz(PI)
                .with_sup_norm_hint(1.0),
            ScalarField::of_x("exp_ramp", d, |t| t.exp() - 1.0)
                .with_lipschitz(E)
                .with_sup_norm_hint(E - 1.0),
        ],
        DomainKind::Circle => {
            let entry = |name: &str, lip: f64, f: fn(f64) -> f64| {
                ScalarField::of_x(name, d.clone(), f).with_lipschitz(lip)
            };
            vec![
                entry("lifted_cos", 1.0, |t| 1.0 + t.cos()).with_sup_norm_hint(2.0),
                entry("lifted_sin", 1.0, |t| 1.0 + t.sin()).with_sup_norm_hint(2.0),
                entry("sin_sq", 1.0, |t| t.sin().powi(2)).with_sup_norm_hint(1.0),
                entry("abs_sin", 1.0, |t| t.sin().abs()).with_sup_norm_hint(1.0),
                entry("two_minus_cos", 1.0, |t| 2.0 - t.cos()).with_sup_norm_hint(3.0),
            ]
        }
        DomainKind::UnitSquare | DomainKind::Simplex => {
            let product_lip = match domain.kind {
                DomainKind::UnitSquare => std::f64::consts::SQRT_2,
                _ => 1.0,
            };
            vec![
                // plain coordinates, but named apart from the pr1/pr2 test
                // functions so reports can key rows by function name
                ScalarField::of_xy("ramp_x1", d.clone(), |x, _| x)
                    .with_lipschitz(1.0)
                    .with_sup_norm_hint(1.0)
                    .with_dependence(AxisDependence::OnlyX1),
                ScalarField::of_xy("ramp_x2", d.clone(), |_, y| y)
                    .with_lipschitz(1.0)
                    .with_sup_norm_hint(1.0)
                    .with_dependence(AxisDependence::OnlyX2),
                ScalarField::of_xy("product", d.clone(), |x, y| x * y)
                    .with_lipschitz(product_lip)
                    .with_sup_norm_hint(1.0),
                ScalarField::of_xy("crease", d.clone(), |x, y| (x - 0.25).abs() + 0.5 * y)
                    .with_lipschitz(1.25_f64.sqrt())
                    .with_sup_norm_hint(1.25),
                ScalarField::of_xy("wave", d, |x, y| (PI * x).sin().powi(2) + y * y)
                    .with_lipschitz((PI * PI + 4.0).sqrt())
                    .with_sup_norm_hint(2.0),
            ]
        }
        DomainKind::PlaneWindow { half_width } => {
            let hw = half_width;
            // constants against the taxicab metric: a per-axis slope bound
            // of 1 suffices
            vec![
                ScalarField::of_xy("shift1", d.clone(), move |x, _| x + hw)
                    .with_lipschitz(1.0)
                    .with_sup_norm_hint(2.0 * hw)
                    .with_dependence(AxisDependence::OnlyX1),
                ScalarField::of_xy("shift2", d.clone(), move |_, y| y + hw)
                    .with_lipschitz(1.0)
                    .with_sup_norm_hint(2.0 * hw)
                    .with_dependence(AxisDependence::OnlyX2),
                ScalarField::of_xy("taxi", d.clone(), |x, y| x.abs() + y.abs())
                    .with_lipschitz(1.0)
                    .with_sup_norm_hint(2.0 * hw),
                ScalarField::of_xy("paraboloid", d.clone(), move |x, y| {
                    (x * x + y * y) / (2.0 * hw)
                })
                .with_lipschitz(1.0)
                .with_sup_norm_hint(hw),
                ScalarField::of_xy("gauss_bump", d, |x, y| (-x * x - y * y).exp())
                    .with_lipschitz((2.0 / E).sqrt())
                    .with_sup_norm_hint(1.0),
            ]
        }
    }
}

// ---------------------------------------------------------------------------
// the harness

/// Largest |T(f)(x) − f(x)| over the grid. Errors out on non-finite
/// differences instead of letting them vanish inside the max.
pub fn sup_error(t: &PreparedOperator, f: &ScalarField, grid: &[Point]) -> Result<f64> {
    grid.par_iter()
        .map(|&p| {
            let d = (t.eval(p)? - f.eval(p)).abs();
            if d.is_finite() {
                Ok(d)
            } else {
                Err(Error::NonFiniteSample(format!("error of '{}' at {p}", f.name())))
            }
        })
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConvergenceVerdict {
    Converging,
    Stalled,
    Diverging,
}

impl fmt::Display for ConvergenceVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConvergenceVerdict::Converging => "converging",
            ConvergenceVerdict::Stalled => "stalled",
            ConvergenceVerdict::Diverging => "diverging",
        })
    }
}

/// Heuristic trend rule: converging requires the final error to be under
/// pass_tol and strictly under the initial error (or at numerical zero);
/// diverging requires it to exceed both pass_tol and twice the initial
/// error; everything in between is stalled.
pub fn classify_trace(errors: &[f64], pass_tol: f64) -> ConvergenceVerdict {
    let (Some(&first), Some(&last)) = (errors.first(), errors.last()) else {
        return ConvergenceVerdict::Stalled;
    };
    if last < pass_tol && (last < first || last <= ZERO_FLOOR) {
        ConvergenceVerdict::Converging
    } else if last > pass_tol && last > 2.0 * first {
        ConvergenceVerdict::Diverging
    } else {
        ConvergenceVerdict::Stalled
    }
}

#[derive(Clone, Debug)]
pub struct FunctionTrace {
    pub function: String,
    /// Sup-grid errors aligned with the schedule.
    pub errors: Vec<f64>,
    pub verdict: ConvergenceVerdict,
}

impl FunctionTrace {
    pub fn final_error(&self) -> f64 {
        *self.errors.last().expect("trace is never empty")
    }
}

#[derive(Clone, Debug)]
pub struct HarnessOptions {
    pub schedule: Vec<usize>,
    pub pass_tol: f64,
    /// Evaluation grid resolution; 0 means the domain's default grid.
    pub grid_per_axis: usize,
    /// Resolution of the grid for the γ-section diagnostic, which costs one
    /// `prepare` per point; 0 disables the diagnostic.
    pub hyp_per_axis: usize,
}

impl HarnessOptions {
    pub fn new(schedule: &[usize], pass_tol: f64) -> Self {
        HarnessOptions { schedule: schedule.to_vec(), pass_tol, grid_per_axis: 0, hyp_per_axis: 21 }
    }

    pub fn with_grid(mut self, per_axis: usize) -> Self {
        self.grid_per_axis = per_axis;
        self
    }

    pub fn with_hyp_grid(mut self, per_axis: usize) -> Self {
        self.hyp_per_axis = per_axis;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.schedule.is_empty() {
            return Err(Error::EmptyInput("order schedule".into()));
        }
        if self.schedule[0] == 0 {
            return Err(Error::InvalidConfig("operator orders start at 1".into()));
        }
        if !self.schedule.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidConfig("order schedule must be strictly increasing".into()));
        }
        if !(self.pass_tol > 0.0 && self.pass_tol.is_finite()) {
            return Err(Error::InvalidConfig(format!("pass_tol must be positive, got {}", self.pass_tol)));
        }
        Ok(())
    }
}

/// Everything one harness run measured.
#[derive(Clone, Debug)]
pub struct ConvergenceReport {
    pub family: String,
    pub schedule: Vec<usize>,
    pub pass_tol: f64,
    /// Points per axis of the evaluation grid actually used.
    pub grid_per_axis: usize,
    pub tests: Vec<FunctionTrace>,
    pub probes: Vec<FunctionTrace>,
    /// Worst-over-grid rate bound per scheduled order, when one is
    /// registered for the family.
    pub bounds: Option<Vec<f64>>,
    /// sup |T_n(1) − 1| over the grid, per scheduled order.
    pub unit_defect: Vec<f64>,
    /// sup_x T_n(γ_x)(x) for the squared metric γ, per scheduled order;
    /// empty when the diagnostic is disabled.
    pub gamma_peak: Vec<f64>,
}

impl ConvergenceReport {
    pub fn trace(&self, name: &str) -> Option<&FunctionTrace> {
        self.tests.iter().chain(&self.probes).find(|t| t.function == name)
    }

    pub fn all_tests_converging(&self) -> bool {
        self.tests.iter().all(|t| t.verdict == ConvergenceVerdict::Converging)
    }

    pub fn all_probes_converging(&self) -> bool {
        self.probes.iter().all(|t| t.verdict == ConvergenceVerdict::Converging)
    }
}

/// Runs the protocol: for every scheduled order, measures the sup-grid error
/// of every test and probe function, the unit defect, and (on its own
/// coarser grid) the γ-section diagnostic sup_x T_n(γ_x)(x) for the squared
/// metric. Operator failures carry the offending (family, n, function,
/// point).
pub fn run_harness(
    family: &dyn OperatorFamily,
    tests: &TestSet,
    probes: &[ScalarField],
    opts: &HarnessOptions,
) -> Result<ConvergenceReport> {
    opts.validate()?;
    let domain = family.domain();
    let fname = family.name();
    let grid_per_axis = if opts.grid_per_axis == 0 { domain.eval_grid } else { opts.grid_per_axis };
    let grid = domain.grid_points(grid_per_axis);

    let sweep = |f: &ScalarField, n: usize| -> Result<f64> {
        let t = family
            .prepare(n, f)
            .map_err(|e| eval_err(fname, n, f.name(), "prepare", e))?;
        grid.par_iter()
            .map(|&p| {
                let v = t.eval(p).map_err(|e| eval_err(fname, n, f.name(), p, e))?;
                let d = (v - f.eval(p)).abs();
                if d.is_finite() {
                    Ok(d)
                } else {
                    Err(eval_err(fname, n, f.name(), p, Error::NonFiniteSample("sup-error sweep".into())))
                }
            })
            .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
    };
    let run = |f: &ScalarField| -> Result<FunctionTrace> {
        let errors =
            opts.schedule.iter().map(|&n| sweep(f, n)).collect::<Result<Vec<f64>>>()?;
        Ok(FunctionTrace {
            function: f.name().into(),
            verdict: classify_trace(&errors, opts.pass_tol),
            errors,
        })
    };

    let test_traces = tests.functions.iter().map(run).collect::<Result<Vec<_>>>()?;
    let probe_traces = probes.iter().map(run).collect::<Result<Vec<_>>>()?;

    let mut one = ScalarField::one(domain.clone());
    if domain.is_planar() {
        one = one.with_dependence(AxisDependence::OnlyX1);
    }
    let unit_defect =
        opts.schedule.iter().map(|&n| sweep(&one, n)).collect::<Result<Vec<f64>>>()?;

    let gamma_peak = if opts.hyp_per_axis == 0 {
        Vec::new()
    } else {
        let sep = SeparatingFn::squared_metric(domain);
        let hyp_grid = domain.grid_points(opts.hyp_per_axis);
        opts.schedule
            .iter()
            .map(|&n| {
                hyp_grid
                    .par_iter()
                    .map(|&x| {
                        let section = sep.center_section(x);
                        let t = family
                            .prepare(n, &section)
                            .map_err(|e| eval_err(fname, n, section.name(), x, e))?;
                        t.eval(x).map_err(|e| eval_err(fname, n, section.name(), x, e))
                    })
                    .try_reduce(|| f64::NEG_INFINITY, |a, b| Ok(a.max(b)))
            })
            .collect::<Result<Vec<f64>>>()?
    };

    let axes = if domain.is_planar() { 2 } else { 1 };
    let bounds = rate_bound_for(fname).ok().map(|b| {
        opts.schedule
            .iter()
            .map(|&n| {
                grid.iter()
                    .flat_map(|&x| (0..axes).map(move |a| b.value(n, x.component(a))))
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .collect()
    });

    Ok(ConvergenceReport {
        family: fname.into(),
        schedule: opts.schedule.clone(),
        pass_tol: opts.pass_tol,
        grid_per_axis,
        tests: test_traces,
        probes: probe_traces,
        bounds,
        unit_defect,
        gamma_peak,
    })
}

// ---------------------------------------------------------------------------
// rate bounds

/// A pointwise per-axis rate bound: `value(n, xi)` dominates
/// T_n(|pr_i − xi|)(x) for the family it is registered to.
#[derive(Clone, Copy)]
pub struct RateBound {
    pub label: &'static str,
    formula: fn(usize, f64) -> f64,
}

impl RateBound {
    pub fn value(&self, n: usize, xi: f64) -> f64 {
        (self.formula)(n, xi)
    }
}

fn durrmeyer_rate(n: usize, xi: f64) -> f64 {
    let nf = n as f64;
    let s = (xi * (1.0 - xi)).max(0.0).sqrt();
    ((1.0 + std::f64::consts::SQRT_2) * s + std::f64::consts::SQRT_2 * xi.max(0.0).sqrt())
        / nf.sqrt()
        + 1.0 / nf
}

fn kantorovich_rate(n: usize, xi: f64) -> f64 {
    let nf = n as f64;
    (xi * (1.0 - xi)).max(0.0).sqrt() / nf.sqrt() + 2.0 / (nf + 1.0)
}

fn maxprod_rate(n: usize, _xi: f64) -> f64 {
    6.0 / (n as f64 + 1.0).sqrt()
}

fn gauss_rate(n: usize, _xi: f64) -> f64 {
    4.0 / n as f64
}

/// The registry pairing each family with its proven coordinate-distance
/// bound. Families without one (the Choquet–Bernstein pair, the truncated
/// operator) yield `UnknownPairing`.
pub fn rate_bound_for(family_name: &str) -> Result<RateBound> {
    match family_name {
        "possibilistic_durrmeyer" => Ok(RateBound {
            label: "((1+sqrt2)*sqrt(x(1-x)) + sqrt2*sqrt(x))/sqrt(n) + 1/n",
            formula: durrmeyer_rate,
        }),
        "possibilistic_kantorovich" | "possibilistic_kantorovich_1d" => Ok(RateBound {
            label: "sqrt(x(1-x))/sqrt(n) + 2/(n+1)",
            formula: kantorovich_rate,
        }),
        "maxprod_bernstein" => Ok(RateBound { label: "6/sqrt(n+1)", formula: maxprod_rate }),
        "gauss_weierstrass_choquet" => Ok(RateBound { label: "4/n", formula: gauss_rate }),
        other => Err(Error::UnknownPairing(other.into())),
    }
}

/// One (order, axis) slice of a rate-bound sweep.
#[derive(Clone, Debug)]
pub struct RateBoundRow {
    pub n: usize,
    pub axis: usize,
    /// max over the grid of measured − bound; negative means headroom.
    pub worst_excess: f64,
    pub lhs_max: f64,
    /// measured value and bound at the worst-excess point (a matched pair,
    /// unlike lhs_max which may peak elsewhere).
    pub lhs_at_worst: f64,
    pub bound_at_worst: f64,
    pub worst_point: Option<Point>,
}

/// |pr_axis − xi| as a field, marked axis-dependent so operators with
/// separable fast paths can use them.
fn axis_distance_field(domain: &DomainSpec, axis: usize, xi: f64) -> ScalarField {
    let f = if axis == 0 {
        ScalarField::new(format!("|pr1 - {xi:.4}|"), domain.clone(), move |p| {
            (p.component(0) - xi).abs()
        })
    } else {
        ScalarField::new(format!("|pr2 - {xi:.4}|"), domain.clone(), move |p| {
            (p.component(1) - xi).abs()
        })
    };
    let f = f.with_lipschitz(1.0);
    if domain.is_planar() {
        f.with_dependence(if axis == 0 { AxisDependence::OnlyX1 } else { AxisDependence::OnlyX2 })
    } else {
        f
    }
}

/// Measures T_n(|pr_i − xi|)(x) at every grid point, both axes, every
/// scheduled order, and compares against the registered bound. The grid sup
/// under-estimates the true sup, so a pass is evidence, not proof; a
/// violation beyond `slack` is a genuine counterexample.
pub fn verify_rate_bound(
    family: &dyn OperatorFamily,
    schedule: &[usize],
    grid_per_axis: usize,
    slack: f64,
) -> Result<(Vec<RateBoundRow>, PropertyReport)> {
    let bound = rate_bound_for(family.name())?;
    let domain = family.domain();
    let fname = family.name();
    let axes = if domain.is_planar() { 2 } else { 1 };
    let grid = domain.grid_points(grid_per_axis);

    let mut rows = Vec::with_capacity(schedule.len() * axes);
    for &n in schedule {
        for axis in 0..axes {
            let pointwise: Vec<(f64, f64, Point)> = grid
                .par_iter()
                .map(|&x| {
                    let xi = x.component(axis);
                    let f = axis_distance_field(domain, axis, xi);
                    let t = family
                        .prepare(n, &f)
                        .map_err(|e| eval_err(fname, n, f.name(), x, e))?;
                    let lhs = t.eval(x).map_err(|e| eval_err(fname, n, f.name(), x, e))?;
                    Ok((lhs - bound.value(n, xi), lhs, x))
                })
                .collect::<Result<Vec<_>>>()?;
            let mut row = RateBoundRow {
                n,
                axis,
                worst_excess: f64::NEG_INFINITY,
                lhs_max: f64::NEG_INFINITY,
                lhs_at_worst: f64::NEG_INFINITY,
                bound_at_worst: f64::INFINITY,
                worst_point: None,
            };
            for (excess, lhs, x) in pointwise {
                row.lhs_max = row.lhs_max.max(lhs);
                if excess > row.worst_excess {
                    row.worst_excess = excess;
                    row.lhs_at_worst = lhs;
                    row.bound_at_worst = lhs - excess;
                    row.worst_point = Some(x);
                }
            }
            rows.push(row);
        }
    }

    let worst =
        rows.iter().map(|r| r.worst_excess).fold(f64::NEG_INFINITY, f64::max);
    let witness = rows
        .iter()
        .max_by(|a, b| a.worst_excess.total_cmp(&b.worst_excess))
        .filter(|r| r.worst_excess > slack)
        .map(|r| {
            format!(
                "n={}, axis={}, x={}, excess={:.3e}",
                r.n,
                r.axis,
                r.worst_point.map(|p| p.to_string()).unwrap_or_default(),
                r.worst_excess
            )
        });
    let report = PropertyReport::new(
        format!("rate_bound[{fname}: {}]", bound.label),
        grid.len() * rows.len(),
        worst,
        slack,
        witness,
    );
    Ok((rows, report))
}

// ---------------------------------------------------------------------------
// the Lipschitz error bound

/// One scheduled order of `lipschitz_bound_check`.
#[derive(Clone, Debug)]
pub struct LipschitzCheckRow {
    pub n: usize,
    /// sup_y T_n(d_y²)(y) over the grid.
    pub gamma_sup: f64,
    /// K · gamma_sup^(1/2), the claimed error bound.
    pub bound: f64,
    pub worst_error: f64,
}

/// For a nonnegative Lipschitz f, checks |T_n(f)(x) − f(x)| ≤
/// K · sup_y |T_n(d_y²)(y)|^{1/2} at every grid point and scheduled order,
/// both sides measured on the same grid. Requires a unital sublinear
/// monotone family and a field with a declared Lipschitz constant.
pub fn lipschitz_bound_check(
    family: &dyn OperatorFamily,
    f: &ScalarField,
    schedule: &[usize],
    grid_per_axis: usize,
    slack: f64,
) -> Result<(Vec<LipschitzCheckRow>, PropertyReport)> {
    let k = f.lipschitz.ok_or_else(|| Error::MissingLipschitz(f.name().into()))?;
    let profile = family.profile();
    if !(profile.sublinear && profile.monotone && profile.unital) {
        return Err(Error::Precondition(format!(
            "the Lipschitz bound needs a unital sublinear monotone family; {} is not",
            family.name()
        )));
    }
    let domain = family.domain();
    let fname = family.name();
    let grid = domain.grid_points(grid_per_axis);
    if f.grid_min(&grid) < -1e-9 {
        return Err(Error::Precondition(format!(
            "'{}' must be nonnegative on the grid for the Lipschitz bound",
            f.name()
        )));
    }
    let sep = SeparatingFn::squared_metric(domain);

    let mut rows = Vec::with_capacity(schedule.len());
    for &n in schedule {
        let t = family.prepare(n, f).map_err(|e| eval_err(fname, n, f.name(), "prepare", e))?;
        let worst_error = grid
            .par_iter()
            .map(|&p| {
                let v = t.eval(p).map_err(|e| eval_err(fname, n, f.name(), p, e))?;
                Ok((v - f.eval(p)).abs())
            })
            .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))?;
        let gamma_sup = grid
            .par_iter()
            .map(|&y| {
                let section = sep.center_section(y);
                let t = family
                    .prepare(n, &section)
                    .map_err(|e| eval_err(fname, n, section.name(), y, e))?;
                t.eval(y).map_err(|e| eval_err(fname, n, section.name(), y, e))
            })
            .try_reduce(|| f64::NEG_INFINITY, |a, b| Ok(a.max(b)))?;
        let bound = k * gamma_sup.abs().sqrt();
        rows.push(LipschitzCheckRow { n, gamma_sup, bound, worst_error });
    }

    let worst = rows
        .iter()
        .map(|r| r.worst_error - r.bound)
        .fold(f64::NEG_INFINITY, f64::max);
    let witness = rows
        .iter()
        .max_by(|a, b| (a.worst_error - a.bound).total_cmp(&(b.worst_error - b.bound)))
        .filter(|r| r.worst_error - r.bound > slack)
        .map(|r| format!("n={}: error {:.3e} > bound {:.3e}", r.n, r.worst_error, r.bound));
    let report = PropertyReport::new(
        format!("lipschitz_bound[{fname} on '{}']", f.name()),
        grid.len() * schedule.len(),
        worst,
        slack,
        witness,
    );
    Ok((rows, report))
}

// ---------------------------------------------------------------------------
// the shift trick

fn sup_norm_of(f: &ScalarField) -> f64 {
    f.sup_norm_hint.unwrap_or_else(|| f.grid_sup_norm(&f.domain.default_grid()))
}

/// x ↦ T_n(f + ‖f‖∞)(x) − ‖f‖∞ as a field. For translatable unital families
/// this coincides with T_n(f); for the others it restores convergence on
/// sign-changing arguments by lifting them into the nonnegative cone first.
/// Evaluation failures inside the returned field surface as NaN; use
/// `shifted_sup_error` where errors must propagate.
pub fn shift_trick(family: &dyn OperatorFamily, n: usize, f: &ScalarField) -> Result<ScalarField> {
    let c = sup_norm_of(f);
    let t = family.prepare(n, &f.add_const(c))?;
    Ok(ScalarField::new(
        format!("shift[{}]@{n}", f.name()),
        family.domain().clone(),
        move |p| t.eval(p).map(|v| v - c).unwrap_or(f64::NAN),
    ))
}

/// Sup-grid error of the shift trick against f itself, per scheduled order.
pub fn shifted_sup_error(
    family: &dyn OperatorFamily,
    f: &ScalarField,
    schedule: &[usize],
    grid_per_axis: usize,
) -> Result<Vec<(usize, f64)>> {
    let domain = family.domain();
    let fname = family.name();
    let grid = if grid_per_axis == 0 {
        domain.default_grid()
    } else {
        domain.grid_points(grid_per_axis)
    };
    let c = sup_norm_of(f);
    let lifted = f.add_const(c);
    schedule
        .iter()
        .map(|&n| {
            let t = family
                .prepare(n, &lifted)
                .map_err(|e| eval_err(fname, n, lifted.name(), "prepare", e))?;
            let err = grid
                .par_iter()
                .map(|&p| {
                    let v = t.eval(p).map_err(|e| eval_err(fname, n, lifted.name(), p, e))?;
                    Ok((v - c - f.eval(p)).abs())
                })
                .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))?;
            Ok((n, err))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::bernstein::TruncatedBernstein;
    use crate::operators::bkc::BernsteinKantorovichChoquet1;
    use crate::operators::maxprod::MaxProductBernstein;
    use crate::operators::possibilistic::PossibilisticKantorovich;

    #[test]
    fn test_set_shapes() {
        let interval = build_test_set(&DomainSpec::unit_interval());
        assert_eq!(interval.names(), ["one", "e1", "neg_e1", "e2"]);
        assert_eq!(interval.kind, TestSetKind::Euclidean);

        let square = build_test_set(&DomainSpec::unit_square());
        assert_eq!(square.functions.len(), 6);

        let circle = build_test_set(&DomainSpec::circle());
        assert_eq!(circle.functions.len(), 5);
        assert_eq!(circle.kind, TestSetKind::CircleTrig);
    }

    #[test]
    fn nonnegative_subsets_drop_the_signed_entries() {
        let domain = DomainSpec::unit_interval();
        let sub = build_test_set(&domain).nonnegative_subset(&domain);
        assert_eq!(sub.names(), ["one", "e1", "e2"]);

        let simplex = DomainSpec::simplex();
        let sub = build_test_set(&simplex).nonnegative_subset(&simplex);
        assert_eq!(sub.names(), ["one", "pr1", "pr2", "pr1_sq_plus_pr2_sq"]);
        assert_eq!(sub.kind, TestSetKind::Custom);
    }

    #[test]
    fn test_set_for_respects_translatability() {
        assert_eq!(test_set_for(&BernsteinKantorovichChoquet1::new()).functions.len(), 4);
        assert_eq!(test_set_for(&MaxProductBernstein::new()).functions.len(), 4);
        assert_eq!(test_set_for(&TruncatedBernstein::new()).functions.len(), 3);
    }

    #[test]
    fn probes_are_nonnegative_and_lipschitz_tagged() {
        for domain in [
            DomainSpec::unit_interval(),
            DomainSpec::unit_square(),
            DomainSpec::simplex(),
            DomainSpec::circle(),
            DomainSpec::plane_window(2.0),
        ] {
            let probes = probe_set(&domain);
            assert_eq!(probes.len(), 5);
            let grid = domain.default_grid();
            for p in &probes {
                assert!(p.grid_min(&grid) >= 0.0, "{} dips negative", p.name());
                assert!(p.lipschitz.is_some());
                p.validate_lipschitz(&domain.grid_points(9), 1e-9).unwrap();
            }
        }
    }

    #[test]
    fn verdict_rule() {
        assert_eq!(classify_trace(&[0.5, 0.1, 0.01], 0.05), ConvergenceVerdict::Converging);
        // flat at numerical zero counts as converged
        assert_eq!(classify_trace(&[0.0, 0.0], 0.05), ConvergenceVerdict::Converging);
        assert_eq!(classify_trace(&[0.5, 0.5, 0.5], 0.05), ConvergenceVerdict::Stalled);
        // small but not shrinking
        assert_eq!(classify_trace(&[0.01, 0.02], 0.05), ConvergenceVerdict::Stalled);
        assert_eq!(classify_trace(&[0.1, 0.9], 0.05), ConvergenceVerdict::Diverging);
    }

    #[test]
    fn squared_metric_is_admissible() {
        let sep = SeparatingFn::squared_metric(&DomainSpec::unit_interval());
        let check = check_separating(&sep, 41, &[0.2, 0.1, 0.05]).unwrap();
        assert!(check.report.passed(), "{:?}", check.report);
        for &(eps, delta) in &check.deltas {
            // diam([0,1]) = 1; admissibility costs at most 2·diam²/ε
            assert!(delta <= 2.0 / eps, "delta-hat {delta} too large at eps {eps}");
            assert!(delta > 0.0);
        }
    }

    #[test]
    fn plain_metric_needs_delta_at_most_one() {
        let sep = SeparatingFn::metric_power(&DomainSpec::unit_square(), 1.0);
        let check = check_separating(&sep, 9, &[0.3, 0.1]).unwrap();
        assert!(check.report.passed());
        for &(_, delta) in &check.deltas {
            assert!(delta <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn constant_family_is_not_separating() {
        let domain = DomainSpec::unit_interval();
        let fields = [ScalarField::one(domain.clone())];
        let sep = SeparatingFn::from_family(&domain, &fields).unwrap();
        let check = check_separating(&sep, 11, &[0.1]).unwrap();
        assert!(!check.report.passed());
        assert!(check.report.witness.is_some());

        assert!(matches!(
            SeparatingFn::from_family(&domain, &[]),
            Err(Error::EmptyInput(_))
        ));
    }

    #[test]
    fn section_of_family_gamma_matches_squared_distance() {
        let domain = DomainSpec::unit_interval();
        let e1 = ScalarField::of_x("e1", domain.clone(), |t| t);
        let sep = SeparatingFn::from_family(&domain, &[e1]).unwrap();
        let section = sep.center_section(Point::Scalar(0.3));
        for t in [0.0, 0.3, 0.9] {
            let expect = (t - 0.3) * (t - 0.3);
            assert!((section.eval1(t) - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn harness_on_the_choquet_kantorovich_family() {
        let op = BernsteinKantorovichChoquet1::new();
        let tests = test_set_for(&op);
        let probes = probe_set(op.domain());
        let opts = HarnessOptions::new(&[4, 16, 128], 5e-2).with_grid(41).with_hyp_grid(11);
        let report = run_harness(&op, &tests, &probes, &opts).unwrap();

        assert!(report.all_tests_converging(), "tests: {:?}", report.tests);
        assert!(report.all_probes_converging(), "probes: {:?}", report.probes);
        for &d in &report.unit_defect {
            assert!(d <= 1e-12, "unit defect {d}");
        }
        // the gamma diagnostic must shrink along the schedule
        assert!(report.gamma_peak.last().unwrap() < &5e-2);
        assert!(report.gamma_peak[0] > *report.gamma_peak.last().unwrap());
        assert!(report.bounds.is_none());
    }

    #[test]
    fn harness_flags_the_truncated_counterexample() {
        let op = TruncatedBernstein::new();
        let domain = op.domain().clone();
        let tests = test_set_for(&op);
        let probe = ScalarField::of_x("centered_ramp", domain, |t| t - 0.5)
            .with_lipschitz(1.0)
            .with_sup_norm_hint(0.5);
        let opts = HarnessOptions::new(&[4, 16, 128], 5e-2).with_grid(41).with_hyp_grid(0);
        let report = run_harness(&op, &tests, &[probe.clone()], &opts).unwrap();

        assert!(report.all_tests_converging());
        let trace = report.trace("centered_ramp").unwrap();
        assert_ne!(trace.verdict, ConvergenceVerdict::Converging);
        // the operator output is nonnegative while f(0) = -1/2
        for &err in &trace.errors {
            assert!(err >= 0.2, "error {err} dipped below the floor");
        }
        assert!(report.gamma_peak.is_empty());

        // lifting into the nonnegative cone restores convergence
        let errs = shifted_sup_error(&op, &probe, &[4, 16, 128], 41).unwrap();
        assert!(errs.last().unwrap().1 < 5e-2, "{errs:?}");
    }

    #[test]
    fn shift_trick_is_inert_for_translatable_families() {
        let op = BernsteinKantorovichChoquet1::new();
        let domain = op.domain().clone();
        let f = ScalarField::of_x("dipping", domain.clone(), |t| t - 0.3)
            .with_sup_norm_hint(0.7);
        let shifted = shift_trick(&op, 8, &f).unwrap();
        let direct = op.prepare(8, &f).unwrap();
        for &p in &domain.grid_points(11) {
            assert!((shifted.eval(p) - direct.eval(p).unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn rate_bound_registry() {
        assert!(matches!(
            rate_bound_for("bernstein_truncated"),
            Err(Error::UnknownPairing(_))
        ));
        let b = rate_bound_for("maxprod_bernstein").unwrap();
        assert!((b.value(35, 0.7) - 1.0).abs() < 1e-15);
        let q = rate_bound_for("possibilistic_kantorovich").unwrap();
        assert!((q.value(4, 0.0) - 0.4).abs() < 1e-15);
    }

    #[test]
    fn kantorovich_rate_bound_holds_on_a_coarse_grid() {
        let op = PossibilisticKantorovich::new();
        let (rows, report) = verify_rate_bound(&op, &[4, 8], 5, 1e-6).unwrap();
        assert!(report.passed(), "{report:?}");
        assert_eq!(rows.len(), 4);
        // at the corner the measured value is 1/(n+1) against bound 2/(n+1)
        let corner = rows.iter().find(|r| r.n == 4 && r.axis == 0).unwrap();
        assert!(corner.lhs_max <= kantorovich_rate(4, 0.5) + 1e-9);
        assert!(corner.worst_excess < 0.0);
    }

    #[test]
    fn lipschitz_bound_on_the_choquet_kantorovich_family() {
        let op = BernsteinKantorovichChoquet1::new();
        let e1 = ScalarField::of_x("e1", DomainSpec::unit_interval(), |t| t).with_lipschitz(1.0);
        let (rows, report) = lipschitz_bound_check(&op, &e1, &[4, 16], 21, 1e-6).unwrap();
        assert!(report.passed(), "{report:?}");
        // the gamma sup shrinks with the order
        assert!(rows[1].gamma_sup < rows[0].gamma_sup);

        let untagged = ScalarField::of_x("e1", DomainSpec::unit_interval(), |t| t);
        assert!(matches!(
            lipschitz_bound_check(&op, &untagged, &[4], 11, 1e-6),
            Err(Error::MissingLipschitz(_))
        ));

        let dipping = ScalarField::of_x("dip", DomainSpec::unit_interval(), |t| t - 0.5)
            .with_lipschitz(1.0);
        assert!(matches!(
            lipschitz_bound_check(&op, &dipping, &[4], 11, 1e-6),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn harness_on_the_max_product_family() {
        let op = MaxProductBernstein::new();
        let tests = test_set_for(&op);
        let opts = HarnessOptions::new(&[2, 8, 32], 0.2).with_grid(15).with_hyp_grid(9);
        let report = run_harness(&op, &tests, &[], &opts).unwrap();
        assert!(report.all_tests_converging(), "{:?}", report.tests);
        // the registered 6/sqrt(n+1) bound shows up alongside the traces
        let bounds = report.bounds.as_ref().unwrap();
        assert!((bounds[0] - 6.0 / 3.0_f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn harness_rejects_bad_schedules() {
        let op = MaxProductBernstein::new();
        let tests = test_set_for(&op);
        let bad = HarnessOptions::new(&[8, 4], 0.1);
        assert!(run_harness(&op, &tests, &[], &bad).is_err());
        let empty = HarnessOptions::new(&[], 0.1);
        assert!(run_harness(&op, &tests, &[], &empty).is_err());
    }
}
