//! Capacities: monotone set functions vanishing on the empty set.
//!
//! The measurable sets handled here are finite unions of disjoint closed
//! intervals (one dimension), axis-aligned boxes (two dimensions) and finite
//! point sets. That is exactly what the integration and operator layers
//! need; nothing more general is representable.
//!
//! Capacities are not assumed additive. The workhorse construction is the
//! distorted Lebesgue measure u(L(A)) for a nondecreasing u with u(0) = 0;
//! concave u yields a submodular capacity, which in turn makes the Choquet
//! integral subadditive.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::report::{fold_trials, PropertyReport};

/// Closed interval [lo, hi] with lo <= hi.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::MalformedSet(format!("non-finite endpoints [{lo}, {hi}]")));
        }
        if lo > hi {
            return Err(Error::MalformedSet(format!("reversed endpoints [{lo}, {hi}]")));
        }
        Ok(Interval { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(Interval { lo, hi })
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// A set a capacity can evaluate.
#[derive(Clone, Debug, PartialEq)]
pub enum MeasurableSet {
    /// Finite union of disjoint closed intervals, sorted by left endpoint.
    /// The empty vector is the empty set.
    Intervals(Vec<Interval>),
    /// Axis-aligned box in the plane.
    Box2 { x: Interval, y: Interval },
    /// Finite point set (Lebesgue-null), sorted ascending.
    Points(Vec<f64>),
}

impl MeasurableSet {
    pub fn empty() -> Self {
        MeasurableSet::Intervals(Vec::new())
    }

    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        Ok(MeasurableSet::Intervals(vec![Interval::new(lo, hi)?]))
    }

    /// Builds a union from endpoint pairs, sorting and merging overlapping
    /// or touching components so the stored form is disjoint.
    pub fn from_intervals(parts: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let mut ivs = parts
            .into_iter()
            .map(|(a, b)| Interval::new(a, b))
            .collect::<Result<Vec<_>>>()?;
        ivs.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        let mut merged: Vec<Interval> = Vec::with_capacity(ivs.len());
        for iv in ivs {
            match merged.last_mut() {
                Some(last) if iv.lo <= last.hi => last.hi = last.hi.max(iv.hi),
                _ => merged.push(iv),
            }
        }
        Ok(MeasurableSet::Intervals(merged))
    }

    pub fn box2(x_lo: f64, x_hi: f64, y_lo: f64, y_hi: f64) -> Result<Self> {
        Ok(MeasurableSet::Box2 {
            x: Interval::new(x_lo, x_hi)?,
            y: Interval::new(y_lo, y_hi)?,
        })
    }

    pub fn points(mut pts: Vec<f64>) -> Result<Self> {
        if pts.iter().any(|p| !p.is_finite()) {
            return Err(Error::MalformedSet("non-finite point".into()));
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        Ok(MeasurableSet::Points(pts))
    }

    pub fn is_empty(&self) -> bool {
        match self {
            MeasurableSet::Intervals(v) => v.is_empty(),
            MeasurableSet::Box2 { .. } => false,
            MeasurableSet::Points(p) => p.is_empty(),
        }
    }

    pub fn union(&self, other: &MeasurableSet) -> Result<MeasurableSet> {
        match (self, other) {
            (MeasurableSet::Intervals(a), MeasurableSet::Intervals(b)) => {
                MeasurableSet::from_intervals(
                    a.iter().chain(b.iter()).map(|iv| (iv.lo, iv.hi)),
                )
            }
            (MeasurableSet::Points(a), MeasurableSet::Points(b)) => {
                MeasurableSet::points(a.iter().chain(b.iter()).copied().collect())
            }
            (MeasurableSet::Box2 { x: ax, y: ay }, MeasurableSet::Box2 { x: bx, y: by }) => {
                // Only unions that are again a box are representable.
                let a_in_b = bx.contains_interval(ax) && by.contains_interval(ay);
                let b_in_a = ax.contains_interval(bx) && ay.contains_interval(by);
                if a_in_b {
                    Ok(other.clone())
                } else if b_in_a {
                    Ok(self.clone())
                } else if ay == by && ax.intersect(bx).is_some() {
                    Ok(MeasurableSet::Box2 {
                        x: Interval::new(ax.lo.min(bx.lo), ax.hi.max(bx.hi))?,
                        y: *ay,
                    })
                } else if ax == bx && ay.intersect(by).is_some() {
                    Ok(MeasurableSet::Box2 {
                        x: *ax,
                        y: Interval::new(ay.lo.min(by.lo), ay.hi.max(by.hi))?,
                    })
                } else {
                    Err(Error::UnsupportedSet(
                        "union of boxes is not a box".into(),
                    ))
                }
            }
            (a, b) if a.is_empty() => Ok(b.clone()),
            (a, b) if b.is_empty() => Ok(a.clone()),
            _ => Err(Error::UnsupportedSet("union of mixed set kinds".into())),
        }
    }

    pub fn intersect(&self, other: &MeasurableSet) -> Result<MeasurableSet> {
        match (self, other) {
            (MeasurableSet::Intervals(a), MeasurableSet::Intervals(b)) => {
                let mut out = Vec::new();
                for ia in a {
                    for ib in b {
                        if let Some(iv) = ia.intersect(ib) {
                            out.push(iv);
                        }
                    }
                }
                // components of each operand are disjoint, so the pairwise
                // intersections are already disjoint; sort for the invariant
                out.sort_by(|u, v| u.lo.total_cmp(&v.lo));
                Ok(MeasurableSet::Intervals(out))
            }
            (MeasurableSet::Points(a), MeasurableSet::Points(b)) => MeasurableSet::points(
                a.iter().filter(|p| b.contains(p)).copied().collect(),
            ),
            (MeasurableSet::Box2 { x: ax, y: ay }, MeasurableSet::Box2 { x: bx, y: by }) => {
                match (ax.intersect(bx), ay.intersect(by)) {
                    (Some(x), Some(y)) => Ok(MeasurableSet::Box2 { x, y }),
                    _ => Ok(MeasurableSet::empty()),
                }
            }
            (a, b) if a.is_empty() || b.is_empty() => Ok(MeasurableSet::empty()),
            (MeasurableSet::Points(a), MeasurableSet::Intervals(b))
            | (MeasurableSet::Intervals(b), MeasurableSet::Points(a)) => MeasurableSet::points(
                a.iter()
                    .filter(|p| b.iter().any(|iv| iv.contains(**p)))
                    .copied()
                    .collect(),
            ),
            _ => Err(Error::UnsupportedSet("intersection of mixed set kinds".into())),
        }
    }
}

impl fmt::Display for MeasurableSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeasurableSet::Intervals(v) if v.is_empty() => write!(f, "∅"),
            MeasurableSet::Intervals(v) => {
                for (i, iv) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, "∪")?;
                    }
                    write!(f, "{iv}")?;
                }
                Ok(())
            }
            MeasurableSet::Box2 { x, y } => write!(f, "{x}×{y}"),
            MeasurableSet::Points(p) => write!(f, "{p:?}"),
        }
    }
}

/// Lebesgue measure: total length of an interval union, area of a box,
/// zero for finite point sets.
pub fn lebesgue(set: &MeasurableSet) -> f64 {
    match set {
        MeasurableSet::Intervals(v) => v.iter().map(Interval::len).sum(),
        MeasurableSet::Box2 { x, y } => x.len() * y.len(),
        MeasurableSet::Points(_) => 0.0,
    }
}

#[derive(Clone)]
enum CapacityKind {
    /// mu(A) = u(L(A)): the value depends on the set only through its
    /// Lebesgue measure. Integrators exploit this with a running-length
    /// fast path.
    LengthDistorted(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
    General(Arc<dyn Fn(&MeasurableSet) -> Result<f64> + Send + Sync>),
}

/// A capacity: nonnegative, monotone set function with mu(∅) = 0.
/// `total` records the value on the ambient set of the experiment;
/// capacities are not normalized to total 1.
#[derive(Clone)]
pub struct Capacity {
    kind: CapacityKind,
    pub name: String,
    pub total: f64,
    pub submodular: bool,
    pub additive: bool,
}

impl fmt::Debug for Capacity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Capacity")
            .field("name", &self.name)
            .field("total", &self.total)
            .field("submodular", &self.submodular)
            .field("additive", &self.additive)
            .finish()
    }
}

impl Capacity {
    /// Capacity from an arbitrary set evaluator. The evaluator is trusted to
    /// be monotone and to vanish on the empty set; `check_capacity_axioms`
    /// can audit that claim.
    pub fn from_fn(
        name: impl Into<String>,
        total: f64,
        submodular: bool,
        additive: bool,
        eval: impl Fn(&MeasurableSet) -> Result<f64> + Send + Sync + 'static,
    ) -> Self {
        Capacity {
            kind: CapacityKind::General(Arc::new(eval)),
            name: name.into(),
            total,
            submodular,
            additive,
        }
    }

    fn from_length_profile(
        name: impl Into<String>,
        total: f64,
        submodular: bool,
        additive: bool,
        u: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    ) -> Self {
        Capacity {
            kind: CapacityKind::LengthDistorted(u),
            name: name.into(),
            total,
            submodular,
            additive,
        }
    }

    pub fn evaluate(&self, set: &MeasurableSet) -> Result<f64> {
        match &self.kind {
            CapacityKind::LengthDistorted(u) => Ok(u(lebesgue(set))),
            CapacityKind::General(f) => f(set),
        }
    }

    /// When the capacity is a function of Lebesgue measure alone, the
    /// distortion applied to the length. Integrators use this to avoid
    /// materializing level sets.
    pub(crate) fn length_profile(&self) -> Option<Arc<dyn Fn(f64) -> f64 + Send + Sync>> {
        match &self.kind {
            CapacityKind::LengthDistorted(u) => Some(u.clone()),
            CapacityKind::General(_) => None,
        }
    }
}

/// Lebesgue measure as a capacity over an ambient set of the given measure.
pub fn lebesgue_capacity(total: f64) -> Capacity {
    Capacity::from_length_profile("lebesgue", total, true, true, Arc::new(|l| l))
}

/// The square-root-distorted Lebesgue capacity mu(A) = sqrt(L(A)).
/// Submodular (sqrt is concave), not additive. Total refers to an ambient
/// set of measure 1; the evaluator itself works on sets of any length.
pub fn sqrt_lebesgue() -> Capacity {
    Capacity::from_length_profile("sqrt_lebesgue", 1.0, true, false, Arc::new(f64::sqrt))
}

/// A distortion: nondecreasing continuous u on [0, total] with u(0) = 0.
#[derive(Clone)]
pub struct Distortion {
    map: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub total: f64,
    pub concave: bool,
    pub name: String,
}

impl Distortion {
    /// Validates u(0) = 0 and monotonicity on a 1025-point grid over
    /// [0, total].
    pub fn new(
        name: impl Into<String>,
        total: f64,
        concave: bool,
        u: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        if !(total > 0.0) {
            return Err(Error::InvalidDistortion(format!("total must be positive, got {total}")));
        }
        if u(0.0).abs() > 1e-12 {
            return Err(Error::InvalidDistortion(format!("u(0) = {} != 0", u(0.0))));
        }
        let mut prev = u(0.0);
        for i in 1..=1024 {
            let t = total * i as f64 / 1024.0;
            let v = u(t);
            if !v.is_finite() {
                return Err(Error::InvalidDistortion(format!("u({t}) is not finite")));
            }
            if v < prev - 1e-12 {
                return Err(Error::InvalidDistortion(format!(
                    "u decreases near t = {t}: {v} < {prev}"
                )));
            }
            prev = v;
        }
        Ok(Distortion {
            map: Arc::new(u),
            total,
            concave,
            name: name.into(),
        })
    }

    pub fn identity(total: f64) -> Result<Self> {
        Distortion::new("id", total, true, |t| t)
    }

    pub fn sqrt(total: f64) -> Result<Self> {
        Distortion::new("sqrt", total, true, f64::sqrt)
    }

    /// u(t) = t^alpha; concave exactly when alpha <= 1.
    pub fn power(alpha: f64, total: f64) -> Result<Self> {
        Distortion::new(format!("t^{alpha}"), total, alpha <= 1.0, move |t| t.powf(alpha))
    }

    pub fn apply(&self, t: f64) -> f64 {
        (self.map)(t)
    }
}

/// Distorted capacity u ∘ base. Requires an additive base so the result is
/// a genuine distorted measure; the submodular flag comes from concavity of
/// the distortion.
pub fn distorted_capacity(base: &Capacity, u: &Distortion) -> Result<Capacity> {
    if !base.additive {
        return Err(Error::Precondition(format!(
            "distorted_capacity needs an additive base, '{}' is not",
            base.name
        )));
    }
    if u.total + 1e-9 < base.total {
        return Err(Error::Precondition(format!(
            "distortion domain [0, {}] does not cover base total {}",
            u.total, base.total
        )));
    }
    let name = format!("{}({})", u.name, base.name);
    let total = u.apply(base.total);
    let submodular = u.concave;
    match base.length_profile() {
        Some(base_u) => {
            let um = u.map.clone();
            Ok(Capacity::from_length_profile(
                name,
                total,
                submodular,
                false,
                Arc::new(move |l| um(base_u(l))),
            ))
        }
        None => {
            let um = u.map.clone();
            let inner = base.clone();
            Ok(Capacity::from_fn(name, total, submodular, false, move |set| {
                Ok(um(inner.evaluate(set)?))
            }))
        }
    }
}

/// Capacity on subsets of {0, .., len-1}, used by the discrete Choquet sum.
/// Subsets are passed as boolean masks.
#[derive(Clone)]
pub struct DiscreteCapacity {
    eval: Arc<dyn Fn(&[bool]) -> Result<f64> + Send + Sync>,
    pub len: usize,
}

impl DiscreteCapacity {
    pub fn new(
        len: usize,
        eval: impl Fn(&[bool]) -> Result<f64> + Send + Sync + 'static,
    ) -> Self {
        DiscreteCapacity { eval: Arc::new(eval), len }
    }

    /// mu(S) = u(|S| / len): a distortion of the normalized counting measure.
    pub fn distorted_counting(len: usize, u: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        DiscreteCapacity::new(len, move |mask| {
            let count = mask.iter().filter(|&&b| b).count();
            Ok(u(count as f64 / len as f64))
        })
    }

    /// The capacity induced on indices by pieces of the line:
    /// mu_disc(S) = mu(union of pieces[i], i in S).
    pub fn induced_by_pieces(pieces: Vec<MeasurableSet>, mu: Capacity) -> Self {
        let len = pieces.len();
        DiscreteCapacity::new(len, move |mask| {
            let mut acc = MeasurableSet::empty();
            for (i, piece) in pieces.iter().enumerate() {
                if mask[i] {
                    acc = acc.union(piece)?;
                }
            }
            mu.evaluate(&acc)
        })
    }

    pub fn evaluate(&self, mask: &[bool]) -> Result<f64> {
        (self.eval)(mask)
    }
}

/// mu(A ∪ B) + mu(A ∩ B) - mu(A) - mu(B); positive values witness a
/// submodularity violation.
pub fn supermodularity_defect(mu: &Capacity, a: &MeasurableSet, b: &MeasurableSet) -> Result<f64> {
    let union = a.union(b)?;
    let inter = a.intersect(b)?;
    Ok(mu.evaluate(&union)? + mu.evaluate(&inter)? - mu.evaluate(a)? - mu.evaluate(b)?)
}

/// Seeded generator of interval-union pairs inside an ambient interval.
/// Produces nested pairs for monotonicity checks and arbitrary pairs for
/// submodularity checks.
#[derive(Clone, Debug)]
pub struct IntervalPairSampler {
    pub ambient: Interval,
    pub max_components: usize,
    pub seed: u64,
}

impl IntervalPairSampler {
    pub fn new(ambient: Interval, seed: u64) -> Self {
        IntervalPairSampler { ambient, max_components: 3, seed }
    }

    fn random_union(&self, rng: &mut ChaCha8Rng) -> MeasurableSet {
        let k = rng.gen_range(1..=self.max_components);
        let mut cuts: Vec<f64> = (0..2 * k)
            .map(|_| rng.gen_range(self.ambient.lo..=self.ambient.hi))
            .collect();
        cuts.sort_by(f64::total_cmp);
        let parts: Vec<(f64, f64)> = cuts.chunks(2).map(|c| (c[0], c[1])).collect();
        MeasurableSet::from_intervals(parts).expect("sorted finite endpoints")
    }

    /// (A, B) with A ⊆ B.
    pub fn nested_pair(&self, rng: &mut ChaCha8Rng) -> (MeasurableSet, MeasurableSet) {
        let b = self.random_union(rng);
        let cut = self.random_union(rng);
        let a = b.intersect(&cut).expect("interval kinds");
        (a, b)
    }

    pub fn arbitrary_pair(&self, rng: &mut ChaCha8Rng) -> (MeasurableSet, MeasurableSet) {
        (self.random_union(rng), self.random_union(rng))
    }
}

/// Audits the capacity axioms over randomized set pairs: value on the empty
/// set, monotonicity under inclusion (which covers nonnegativity, since
/// ∅ ⊆ A), and submodularity. The submodularity row reports the empirical
/// verdict whether or not the capacity claims the property; callers compare
/// against the declared flag.
pub fn check_capacity_axioms(
    mu: &Capacity,
    sampler: &IntervalPairSampler,
    trials: usize,
    tol: f64,
) -> Result<Vec<PropertyReport>> {
    let mut rng = ChaCha8Rng::seed_from_u64(sampler.seed);
    let empty_val = mu.evaluate(&MeasurableSet::empty())?;
    let empty_report = PropertyReport::new(
        format!("{}: vanishes on empty set", mu.name),
        1,
        empty_val.abs(),
        tol,
        Some(format!("mu(∅) = {empty_val}")),
    );

    let mut mono: Vec<(f64, Option<String>)> = Vec::with_capacity(trials);
    let mut subm: Vec<(f64, Option<String>)> = Vec::with_capacity(trials);
    for t in 0..trials {
        let (a, b) = sampler.nested_pair(&mut rng);
        let (va, vb) = (mu.evaluate(&a)?, mu.evaluate(&b)?);
        mono.push((
            va - vb,
            Some(format!("trial {t}: A={a} B={b} mu(A)={va} mu(B)={vb}")),
        ));

        let (c, d) = sampler.arbitrary_pair(&mut rng);
        let defect = supermodularity_defect(mu, &c, &d)?;
        subm.push((defect, Some(format!("trial {t}: A={c} B={d} defect={defect}"))));
    }

    let (mw, mwit) = fold_trials(&mono);
    let (sw, swit) = fold_trials(&subm);
    Ok(vec![
        empty_report,
        PropertyReport::new(format!("{}: monotone", mu.name), trials, mw, tol, mwit),
        PropertyReport::new(format!("{}: submodular", mu.name), trials, sw, tol, swit),
    ])
}
