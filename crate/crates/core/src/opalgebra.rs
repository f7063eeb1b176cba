//! Structural checks on operator families: randomized axiom verification,
//! the induced inequality |T(f) - T(g)| <= T(|f - g|), the Hölder bound for
//! unital monotone sublinear operators, operator norm estimation, and the
//! two closure operations (pointwise suprema and composition).
//!
//! Random fields come from a seeded generator so every check replays
//! byte-identically. Comonotone pairs are built as nondecreasing transforms
//! of a shared driver field, which is comonotonicity by construction and
//! survives restriction to any sample grid.

use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::domain::{DomainKind, DomainSpec, Point, ScalarField};
use crate::error::{Error, Result};
use crate::operators::{AxiomProfile, OperatorFamily, PreparedOperator};
use crate::report::{fold_trials, PropertyReport};

#[derive(Clone, Copy, Debug)]
pub enum GenFamily {
    /// Cubics in the normalized coordinates.
    Polynomial,
    /// Random piecewise-linear profiles, 4 to 12 segments per axis.
    PiecewiseLinear,
    /// Short trigonometric sums; `max_frequency` counts oscillations across
    /// the domain, so large values probe fine-scale behavior.
    Trig { max_frequency: f64 },
    /// Uniform choice among the above per draw.
    Mixed { max_frequency: f64 },
}

pub struct FunctionGenerator {
    domain: DomainSpec,
    family: GenFamily,
    seed: u64,
}

fn axis_range(domain: &DomainSpec) -> (f64, f64) {
    match domain.kind {
        DomainKind::UnitInterval | DomainKind::UnitSquare | DomainKind::Simplex => (0.0, 1.0),
        DomainKind::Circle => (0.0, std::f64::consts::TAU),
        DomainKind::PlaneWindow { half_width } => (-half_width, half_width),
    }
}

type Profile1 = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

fn sample_profile(rng: &mut ChaCha8Rng, family: GenFamily) -> Profile1 {
    match family {
        GenFamily::Polynomial => {
            let c: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
            Arc::new(move |u| c[0] + u * (c[1] + u * (c[2] + u * c[3])))
        }
        GenFamily::PiecewiseLinear => {
            let m = rng.gen_range(4usize..=12);
            let vals: Vec<f64> = (0..=m).map(|_| rng.gen_range(-1.0..1.0)).collect();
            Arc::new(move |u| {
                let s = (u.clamp(0.0, 1.0) * m as f64).min(m as f64 - 1e-9);
                let i = s.floor() as usize;
                let w = s - i as f64;
                vals[i] * (1.0 - w) + vals[i + 1] * w
            })
        }
        GenFamily::Trig { max_frequency } => {
            let terms: Vec<(f64, f64, f64)> = (0..3)
                .map(|_| {
                    (
                        rng.gen_range(-0.7..0.7),
                        rng.gen_range(0.5..max_frequency.max(0.6)),
                        rng.gen_range(0.0..std::f64::consts::TAU),
                    )
                })
                .collect();
            Arc::new(move |u| {
                terms
                    .iter()
                    .map(|(a, w, phi)| a * (std::f64::consts::TAU * w * u + phi).sin())
                    .sum()
            })
        }
        GenFamily::Mixed { max_frequency } => {
            let pick = rng.gen_range(0u8..3);
            let fam = match pick {
                0 => GenFamily::Polynomial,
                1 => GenFamily::PiecewiseLinear,
                _ => GenFamily::Trig { max_frequency },
            };
            sample_profile(rng, fam)
        }
    }
}

/// Random nondecreasing piecewise-linear map on [-4, 4], extended by its
/// end slopes; some segments are flat, which exercises the degenerate side
/// of comonotonicity.
fn monotone_map(rng: &mut ChaCha8Rng) -> Profile1 {
    const R: f64 = 4.0;
    const K: usize = 6;
    let width = 2.0 * R / K as f64;
    let slopes: Vec<f64> = (0..K)
        .map(|_| if rng.gen_bool(0.3) { 0.0 } else { rng.gen_range(0.05..2.0) })
        .collect();
    let mut knots = Vec::with_capacity(K + 1);
    let mut v = rng.gen_range(-1.0..1.0);
    knots.push(v);
    for s in &slopes {
        v += s * width;
        knots.push(v);
    }
    Arc::new(move |t| {
        let s = ((t + R) / width).clamp(0.0, K as f64 - 1e-12);
        let i = s.floor() as usize;
        let w = s - i as f64;
        let inside = knots[i] * (1.0 - w) + knots[i + 1] * w;
        if t < -R {
            knots[0] + slopes[0] * (t + R)
        } else if t > R {
            knots[K] + slopes[K - 1] * (t - R)
        } else {
            inside
        }
    })
}

impl FunctionGenerator {
    pub fn new(domain: DomainSpec, family: GenFamily, seed: u64) -> Self {
        FunctionGenerator { domain, family, seed }
    }

    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    fn rng(&self, trial: u64, lane: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(
            self.seed
                ^ trial.wrapping_mul(0x9E37_79B9_7F4A_7C15)
                ^ lane.wrapping_mul(0xD1B5_4A32_D192_ED03),
        )
    }

    fn build(&self, rng: &mut ChaCha8Rng, name: String) -> ScalarField {
        let (lo1, hi1) = axis_range(&self.domain);
        let scale1 = hi1 - lo1;
        if self.domain.is_planar() {
            let (lo2, hi2) = axis_range(&self.domain);
            let scale2 = hi2 - lo2;
            let p1 = sample_profile(rng, self.family);
            let p2 = sample_profile(rng, self.family);
            let p3 = sample_profile(rng, self.family);
            let p4 = sample_profile(rng, self.family);
            let (a, b, c) = (
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            );
            ScalarField::of_xy(name, self.domain.clone(), move |x, y| {
                let u = (x - lo1) / scale1;
                let v = (y - lo2) / scale2;
                a * p1(u) + b * p2(v) + c * p3(u) * p4(v)
            })
        } else {
            let p1 = sample_profile(rng, self.family);
            ScalarField::of_x(name, self.domain.clone(), move |x| p1((x - lo1) / scale1))
        }
    }

    /// Deterministic field for (seed, trial).
    pub fn sample(&self, trial: u64) -> ScalarField {
        let mut rng = self.rng(trial, 0);
        self.build(&mut rng, format!("gen{trial}"))
    }

    pub fn sample_pair(&self, trial: u64) -> (ScalarField, ScalarField) {
        let mut r0 = self.rng(trial, 0);
        let mut r1 = self.rng(trial, 1);
        (self.build(&mut r0, format!("gen{trial}a")), self.build(&mut r1, format!("gen{trial}b")))
    }

    /// Nonnegative field: the absolute value of a sample.
    pub fn nonneg_sample(&self, trial: u64) -> ScalarField {
        self.sample(trial).abs()
    }

    /// Comonotone pair: nondecreasing transforms of one driver field.
    pub fn comonotone_pair(&self, trial: u64) -> (ScalarField, ScalarField) {
        let mut rd = self.rng(trial, 2);
        let driver = self.build(&mut rd, format!("driver{trial}"));
        let phi = monotone_map(&mut rd);
        let psi = monotone_map(&mut rd);
        let d1 = driver.clone();
        let d2 = driver;
        let f = ScalarField::new(format!("cmono{trial}a"), self.domain.clone(), move |p| {
            phi(d1.eval(p))
        });
        let g = ScalarField::new(format!("cmono{trial}b"), self.domain.clone(), move |p| {
            psi(d2.eval(p))
        });
        (f, g)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axiom {
    Subadditive,
    PositivelyHomogeneous,
    Monotone,
    Translatable,
    Unital,
    ComonotoneAdditive,
}

pub const AXIOMS: [Axiom; 6] = [
    Axiom::Subadditive,
    Axiom::PositivelyHomogeneous,
    Axiom::Monotone,
    Axiom::Translatable,
    Axiom::Unital,
    Axiom::ComonotoneAdditive,
];

impl Axiom {
    pub fn label(&self) -> &'static str {
        match self {
            Axiom::Subadditive => "subadditive",
            Axiom::PositivelyHomogeneous => "positively_homogeneous",
            Axiom::Monotone => "monotone",
            Axiom::Translatable => "translatable",
            Axiom::Unital => "unital",
            Axiom::ComonotoneAdditive => "comonotone_additive",
        }
    }

    fn expected(&self, profile: &AxiomProfile) -> bool {
        match self {
            Axiom::Subadditive | Axiom::PositivelyHomogeneous => profile.sublinear,
            Axiom::Monotone => profile.monotone,
            Axiom::Translatable => profile.translatable,
            Axiom::Unital => profile.unital,
            Axiom::ComonotoneAdditive => profile.comonotone_additive,
        }
    }
}

#[derive(Clone, Debug)]
pub struct AxiomCheckOptions {
    pub trials: usize,
    pub tolerance: f64,
    /// Evaluation points per axis; the check compares operator values on
    /// this subgrid.
    pub points_per_axis: usize,
}

impl Default for AxiomCheckOptions {
    fn default() -> Self {
        AxiomCheckOptions { trials: 100, tolerance: 1e-9, points_per_axis: 3 }
    }
}

fn eval_all(op: &PreparedOperator, pts: &[Point]) -> Result<Vec<f64>> {
    pts.iter().map(|&p| op.eval(p)).collect()
}

/// Worst signed violation of the axiom over random trials and grid points.
/// Equality axioms report |lhs - rhs|; inequality axioms report the
/// positive excess.
pub fn check_axiom(
    family: &dyn OperatorFamily,
    n: usize,
    axiom: Axiom,
    gen: &FunctionGenerator,
    opts: &AxiomCheckOptions,
) -> Result<PropertyReport> {
    let pts = family.domain().grid_points(opts.points_per_axis);
    let trials = if axiom == Axiom::Unital { 1 } else { opts.trials };
    let mut results: Vec<(f64, Option<String>)> = Vec::with_capacity(trials);

    for trial in 0..trials as u64 {
        let (worst, at) = match axiom {
            Axiom::Subadditive => {
                let (f, g) = gen.sample_pair(trial);
                let tf = eval_all(&family.prepare(n, &f)?, &pts)?;
                let tg = eval_all(&family.prepare(n, &g)?, &pts)?;
                let tfg = eval_all(&family.prepare(n, &f.add(&g))?, &pts)?;
                worst_at(&pts, |i| tfg[i] - tf[i] - tg[i])
            }
            Axiom::PositivelyHomogeneous => {
                let f = gen.sample(trial);
                let lambda = [0.0, 0.5, 2.0, 10.0][trial as usize % 4];
                let tf = eval_all(&family.prepare(n, &f)?, &pts)?;
                let tl = eval_all(&family.prepare(n, &f.scale(lambda))?, &pts)?;
                worst_at(&pts, |i| (tl[i] - lambda * tf[i]).abs())
            }
            Axiom::Monotone => {
                let f = gen.sample(trial);
                let bump = gen.nonneg_sample(trial | (1 << 32)).scale(0.7);
                let tf = eval_all(&family.prepare(n, &f)?, &pts)?;
                let tg = eval_all(&family.prepare(n, &f.add(&bump))?, &pts)?;
                worst_at(&pts, |i| tf[i] - tg[i])
            }
            Axiom::Translatable => {
                let f = gen.sample(trial);
                let alpha = [0.5, 1.0, 3.0][trial as usize % 3];
                let one = ScalarField::one(family.domain().clone());
                let t1 = eval_all(&family.prepare(n, &one)?, &pts)?;
                let tf = eval_all(&family.prepare(n, &f)?, &pts)?;
                let ts = eval_all(&family.prepare(n, &f.add_const(alpha))?, &pts)?;
                worst_at(&pts, |i| (ts[i] - tf[i] - alpha * t1[i]).abs())
            }
            Axiom::Unital => {
                let one = ScalarField::one(family.domain().clone());
                let t1 = eval_all(&family.prepare(n, &one)?, &pts)?;
                worst_at(&pts, |i| (t1[i] - 1.0).abs())
            }
            Axiom::ComonotoneAdditive => {
                let (f, g) = gen.comonotone_pair(trial);
                let tf = eval_all(&family.prepare(n, &f)?, &pts)?;
                let tg = eval_all(&family.prepare(n, &g)?, &pts)?;
                let tfg = eval_all(&family.prepare(n, &f.add(&g))?, &pts)?;
                worst_at(&pts, |i| (tfg[i] - tf[i] - tg[i]).abs())
            }
        };
        let witness = at.map(|p| format!("trial {trial} at {p}"));
        results.push((worst, witness));
    }

    let (worst, witness) = fold_trials(&results);
    Ok(PropertyReport::new(
        format!("{}[{}] n={}", family.name(), axiom.label(), n),
        trials,
        worst,
        opts.tolerance,
        witness,
    ))
}

fn worst_at(pts: &[Point], violation: impl Fn(usize) -> f64) -> (f64, Option<Point>) {
    let mut worst = f64::NEG_INFINITY;
    let mut at = None;
    for i in 0..pts.len() {
        let v = violation(i);
        if v > worst {
            worst = v;
            at = Some(pts[i]);
        }
    }
    (worst.max(0.0), at)
}

#[derive(Clone, Debug)]
pub struct AxiomMatrixRow {
    pub axiom: Axiom,
    pub expected: bool,
    pub report: PropertyReport,
}

impl AxiomMatrixRow {
    /// True when the empirical outcome agrees with the declared profile:
    /// expected axioms hold, rejected axioms produce a visible violation.
    pub fn consistent(&self) -> bool {
        self.expected == self.report.passed()
    }
}

/// Runs all six axiom checks against the family's declared profile.
pub fn axiom_matrix(
    family: &dyn OperatorFamily,
    n: usize,
    gen: &FunctionGenerator,
    opts: &AxiomCheckOptions,
) -> Result<Vec<AxiomMatrixRow>> {
    let profile = family.profile();
    AXIOMS
        .iter()
        .map(|&axiom| {
            let report = check_axiom(family, n, axiom, gen, opts)?;
            Ok(AxiomMatrixRow { axiom, expected: axiom.expected(&profile), report })
        })
        .collect()
}

pub fn matrix_matches_profile(rows: &[AxiomMatrixRow]) -> bool {
    rows.iter().all(AxiomMatrixRow::consistent)
}

/// |T(f) - T(g)| <= T(|f - g|), the workhorse inequality behind the
/// convergence theorems; holds for every monotone sublinear operator.
pub fn check_absolute_difference_bound(
    family: &dyn OperatorFamily,
    n: usize,
    gen: &FunctionGenerator,
    opts: &AxiomCheckOptions,
) -> Result<PropertyReport> {
    let pts = family.domain().grid_points(opts.points_per_axis);
    let mut results = Vec::with_capacity(opts.trials);
    for trial in 0..opts.trials as u64 {
        let (f, g) = gen.sample_pair(trial);
        let tf = eval_all(&family.prepare(n, &f)?, &pts)?;
        let tg = eval_all(&family.prepare(n, &g)?, &pts)?;
        let diff = f.add(&g.scale(-1.0)).abs();
        let td = eval_all(&family.prepare(n, &diff)?, &pts)?;
        let (worst, at) = worst_at(&pts, |i| (tf[i] - tg[i]).abs() - td[i]);
        results.push((worst, at.map(|p| format!("trial {trial} at {p}"))));
    }
    let (worst, witness) = fold_trials(&results);
    Ok(PropertyReport::new(
        format!("{}[absolute_difference_bound] n={}", family.name(), n),
        opts.trials,
        worst,
        opts.tolerance,
        witness,
    ))
}

/// Hölder's inequality T(|fg|) <= T(|f|^p)^{1/p} T(|g|^q)^{1/q} with
/// 1/p + 1/q = 1, valid for unital monotone sublinear operators.
pub fn check_holder(
    family: &dyn OperatorFamily,
    n: usize,
    p: f64,
    gen: &FunctionGenerator,
    opts: &AxiomCheckOptions,
) -> Result<PropertyReport> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidConfig(format!("Hölder exponent must exceed 1, got {p}")));
    }
    let q = p / (p - 1.0);
    let pts = family.domain().grid_points(opts.points_per_axis);
    let mut results = Vec::with_capacity(opts.trials);
    for trial in 0..opts.trials as u64 {
        let (f, g) = gen.sample_pair(trial);
        let tfg = eval_all(&family.prepare(n, &f.abs_mul(&g))?, &pts)?;
        let tfp = eval_all(&family.prepare(n, &f.abs_pow(p))?, &pts)?;
        let tgq = eval_all(&family.prepare(n, &g.abs_pow(q))?, &pts)?;
        let (worst, at) = worst_at(&pts, |i| {
            tfg[i] - tfp[i].max(0.0).powf(1.0 / p) * tgq[i].max(0.0).powf(1.0 / q)
        });
        results.push((worst, at.map(|pt| format!("trial {trial} at {pt}"))));
    }
    let (worst, witness) = fold_trials(&results);
    Ok(PropertyReport::new(
        format!("{}[holder p={p}] n={}", family.name(), n),
        opts.trials,
        worst,
        opts.tolerance,
        witness,
    ))
}

/// Largest observed ratio ||T(f)||_eval / ||f||_norm over random fields;
/// for unital monotone sublinear operators the true operator norm is 1.
///
/// The two grids play different roles: `eval_points_per_axis` is where T(f)
/// is probed (coarse is fine, it only under-estimates), while
/// `norm_points_per_axis` measures ||f|| and must dominate the operator's
/// own sampling of f — if the operator reads f at points the norm grid
/// misses, the ratio can spuriously exceed 1.
pub fn operator_norm_estimate(
    family: &dyn OperatorFamily,
    n: usize,
    gen: &FunctionGenerator,
    trials: usize,
    eval_points_per_axis: usize,
    norm_points_per_axis: usize,
) -> Result<f64> {
    let eval_pts = family.domain().grid_points(eval_points_per_axis);
    let norm_pts = family.domain().grid_points(norm_points_per_axis);
    let mut best = 0.0_f64;
    for trial in 0..trials as u64 {
        let f = gen.sample(trial);
        let denom = f.grid_sup_norm(&norm_pts);
        if denom < 1e-9 {
            continue;
        }
        let values = eval_all(&family.prepare(n, &f)?, &eval_pts)?;
        let num = values.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        best = best.max(num / denom);
    }
    Ok(best)
}

/// Pointwise supremum of two families on the same domain. Requires both to
/// preserve constants so the normalizations agree; the result keeps
/// sublinearity, monotonicity and translatability exactly when both inputs
/// have them. No comonotone additivity claim is made for the blend.
pub struct PointwiseSup {
    left: Arc<dyn OperatorFamily + Send + Sync>,
    right: Arc<dyn OperatorFamily + Send + Sync>,
    name: String,
    domain: DomainSpec,
}

pub fn sup_combinator(
    left: Arc<dyn OperatorFamily + Send + Sync>,
    right: Arc<dyn OperatorFamily + Send + Sync>,
) -> Result<PointwiseSup> {
    if left.domain().kind != right.domain().kind {
        return Err(Error::Precondition(format!(
            "cannot blend families on different domains: {:?} vs {:?}",
            left.domain().kind,
            right.domain().kind
        )));
    }
    if !(left.profile().unital && right.profile().unital) {
        return Err(Error::Precondition(
            "pointwise supremum requires both families to preserve constants".into(),
        ));
    }
    let name = format!("sup({}, {})", left.name(), right.name());
    let domain = left.domain().clone();
    Ok(PointwiseSup { left, right, name, domain })
}

impl OperatorFamily for PointwiseSup {
    fn name(&self) -> &str {
        &self.name
    }

    fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    fn profile(&self) -> AxiomProfile {
        let l = self.left.profile();
        let r = self.right.profile();
        AxiomProfile {
            sublinear: l.sublinear && r.sublinear,
            monotone: l.monotone && r.monotone,
            translatable: l.translatable && r.translatable,
            unital: l.unital && r.unital,
            comonotone_additive: false,
        }
    }

    fn prepare(&self, n: usize, f: &ScalarField) -> Result<PreparedOperator> {
        let l = self.left.prepare(n, f)?;
        let r = self.right.prepare(n, f)?;
        Ok(PreparedOperator::new(move |p| Ok(l.eval(p)?.max(r.eval(p)?))))
    }
}

/// Applies outer-after-inner to one field. The inner family must preserve
/// constants for the composition to stay weakly nonlinear.
pub fn compose_apply(
    outer: &dyn OperatorFamily,
    inner: &dyn OperatorFamily,
    n_outer: usize,
    n_inner: usize,
    f: &ScalarField,
) -> Result<PreparedOperator> {
    if outer.domain().kind != inner.domain().kind {
        return Err(Error::Precondition(format!(
            "cannot compose families on different domains: {:?} vs {:?}",
            outer.domain().kind,
            inner.domain().kind
        )));
    }
    if !inner.profile().unital {
        return Err(Error::Precondition(
            "composition requires the inner family to preserve constants".into(),
        ));
    }
    let stage = inner.prepare(n_inner, f)?;
    let field = ScalarField::new(
        format!("{}({})", inner.name(), f.name()),
        inner.domain().clone(),
        move |p| stage.eval(p).unwrap_or(f64::NAN),
    );
    outer.prepare(n_outer, &field)
}
