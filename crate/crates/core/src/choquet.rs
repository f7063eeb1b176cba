//! Choquet integration by domain sampling.
//!
//! The integrand is sampled at midpoints of equal-width cells that partition
//! each component of the integration set. The integral of the resulting
//! simple function is then computed exactly: sort the sampled values in
//! decreasing order and accumulate value-weighted capacity increments of the
//! growing level sets. This is the same thing as integrating the level
//! function on the grid of sorted sampled values, so no separate level
//! quadrature is involved in the primary path.
//!
//! Sign convention for integrands taking negative values: positive levels
//! contribute mu(A ∩ {f >= t}), negative levels contribute
//! mu(A ∩ {f >= t}) - mu(A). The descending-sort formula realizes exactly
//! this, so constants integrate to c·mu(A) for either sign of c.
//!
//! Capacities that depend on a set only through its Lebesgue measure are
//! integrated with a running-length fast path; anything else pays for an
//! incremental union of cells per level step.

use rayon::prelude::*;

use crate::capacity::{Capacity, DiscreteCapacity, Interval, MeasurableSet};
use crate::error::{Error, Result};

/// Hard ceiling for refinement in one dimension.
pub const REFINEMENT_CAP: usize = 1 << 20;
/// Per-axis ceiling for the iterated two-dimensional rule.
pub const REFINEMENT_CAP_PER_AXIS: usize = 1 << 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Refinement {
    /// Single pass at the configured resolution.
    None,
    /// Double the sample count until two successive values agree to
    /// `stability_tol`; give up (with an error) at `max_domain_samples`.
    DoubleUntilStable,
}

#[derive(Clone, Debug)]
pub struct QuadratureConfig {
    /// Cells across the whole integration set (split across components in
    /// proportion to their length). The iterated planar rule reads this as
    /// a total budget and uses roughly its square root per axis.
    pub domain_samples: usize,
    /// Levels used by the uniform-grid diagnostic integrator only; the
    /// primary path integrates on the sorted sample values directly.
    pub level_samples: usize,
    pub refinement: Refinement,
    pub stability_tol: f64,
    pub max_domain_samples: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            domain_samples: 4096,
            level_samples: 2048,
            refinement: Refinement::DoubleUntilStable,
            stability_tol: 1e-6,
            max_domain_samples: REFINEMENT_CAP,
        }
    }
}

impl QuadratureConfig {
    /// Fixed-resolution configuration, no refinement. The workhorse for
    /// operator evaluation where the caller controls accuracy directly.
    pub fn fixed(domain_samples: usize) -> Self {
        QuadratureConfig {
            domain_samples,
            refinement: Refinement::None,
            ..QuadratureConfig::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.domain_samples == 0 {
            return Err(Error::InvalidConfig("domain_samples must be positive".into()));
        }
        if self.level_samples == 0 {
            return Err(Error::InvalidConfig("level_samples must be positive".into()));
        }
        if !(self.stability_tol > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "stability_tol must be positive, got {}",
                self.stability_tol
            )));
        }
        if self.max_domain_samples > REFINEMENT_CAP {
            return Err(Error::InvalidConfig(format!(
                "max_domain_samples {} exceeds the hard cap {REFINEMENT_CAP}",
                self.max_domain_samples
            )));
        }
        Ok(())
    }
}

/// Equal-width cells partitioning each component, at least one per
/// nondegenerate component, in proportion to component length.
/// Degenerate components are dropped: they carry no length and the sampler
/// has nothing to average over them.
fn partition_cells(set: &MeasurableSet, m: usize) -> Result<Vec<Interval>> {
    let comps = match set {
        MeasurableSet::Intervals(v) => v,
        MeasurableSet::Box2 { .. } => {
            return Err(Error::UnsupportedSet(
                "one-dimensional integral over a planar set".into(),
            ))
        }
        MeasurableSet::Points(_) => {
            return Err(Error::UnsupportedSet(
                "one-dimensional integral over a finite point set".into(),
            ))
        }
    };
    let total: f64 = comps.iter().map(Interval::len).sum();
    let mut cells = Vec::with_capacity(m + comps.len());
    if total <= 0.0 {
        return Ok(cells);
    }
    for comp in comps.iter().filter(|c| !c.is_degenerate()) {
        let share = (m as f64 * comp.len() / total).round() as usize;
        let count = share.max(1);
        let width = comp.len() / count as f64;
        for i in 0..count {
            let lo = comp.lo() + i as f64 * width;
            let hi = if i + 1 == count { comp.hi() } else { comp.lo() + (i + 1) as f64 * width };
            cells.push(Interval::new(lo, hi)?);
        }
    }
    Ok(cells)
}

fn sample_midpoints(f: &impl Fn(f64) -> f64, cells: &[Interval]) -> Result<Vec<f64>> {
    cells
        .iter()
        .map(|c| {
            let mid = 0.5 * (c.lo() + c.hi());
            let v = f(mid);
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::NonFiniteSample(format!("f({mid}) = {v}")))
            }
        })
        .collect()
}

/// Inserts an interval into a sorted disjoint list, merging anything it
/// overlaps or touches.
fn insert_merged(comps: &mut Vec<Interval>, iv: Interval) {
    let pos = comps.partition_point(|c| c.lo() <= iv.lo());
    let mut lo = iv.lo();
    let mut hi = iv.hi();
    let mut start = pos;
    if pos > 0 && comps[pos - 1].hi() >= iv.lo() {
        start = pos - 1;
        lo = comps[start].lo();
        hi = hi.max(comps[start].hi());
    }
    let mut end = start;
    while end < comps.len() && comps[end].lo() <= hi {
        hi = hi.max(comps[end].hi());
        end += 1;
    }
    comps.splice(start..end, [Interval::new(lo, hi).expect("ordered endpoints")]);
}

/// Exact Choquet integral of the simple function that takes `values[i]` on
/// `cells[i]`. Ties are harmless: tied cells contribute
/// v·(mu after group - mu before group) regardless of their internal order.
fn choquet_of_cells(values: &[f64], cells: &[Interval], mu: &Capacity) -> Result<f64> {
    debug_assert_eq!(values.len(), cells.len());
    if values.is_empty() {
        return Ok(0.0);
    }
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));

    let mut prev = 0.0;
    let mut acc = 0.0;
    if let Some(u) = mu.length_profile() {
        let mut run_len = 0.0;
        for &i in &order {
            run_len += cells[i].len();
            let cur = u(run_len);
            acc += values[i] * (cur - prev);
            prev = cur;
        }
    } else {
        let mut union: Vec<Interval> = Vec::new();
        for &i in &order {
            insert_merged(&mut union, cells[i]);
            let cur = mu.evaluate(&MeasurableSet::Intervals(union.clone()))?;
            acc += values[i] * (cur - prev);
            prev = cur;
        }
    }
    Ok(acc)
}

fn integrate_once(
    f: &impl Fn(f64) -> f64,
    set: &MeasurableSet,
    mu: &Capacity,
    m: usize,
) -> Result<f64> {
    let cells = partition_cells(set, m)?;
    let values = sample_midpoints(f, &cells)?;
    choquet_of_cells(&values, &cells, mu)
}

/// Choquet integral of `f` over a union of intervals.
pub fn choquet_integral_1d(
    f: impl Fn(f64) -> f64,
    set: &MeasurableSet,
    mu: &Capacity,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    cfg.validate()?;
    match cfg.refinement {
        Refinement::None => integrate_once(&f, set, mu, cfg.domain_samples),
        Refinement::DoubleUntilStable => {
            let mut m = cfg.domain_samples.min(cfg.max_domain_samples);
            let mut prev = integrate_once(&f, set, mu, m)?;
            let mut last_delta = f64::INFINITY;
            while m < cfg.max_domain_samples {
                m = m.saturating_mul(2).min(cfg.max_domain_samples);
                let cur = integrate_once(&f, set, mu, m)?;
                last_delta = (cur - prev).abs();
                if last_delta < cfg.stability_tol {
                    return Ok(cur);
                }
                prev = cur;
            }
            Err(Error::RefinementStalled { value: prev, delta: last_delta })
        }
    }
}

fn iterated_once<F>(
    f: &F,
    x_set: &MeasurableSet,
    y_set: &MeasurableSet,
    mu: &Capacity,
    m_axis: usize,
) -> Result<f64>
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    let x_cells = partition_cells(x_set, m_axis)?;
    let inner: Vec<f64> = x_cells
        .par_iter()
        .map(|cx| {
            let t1 = 0.5 * (cx.lo() + cx.hi());
            integrate_once(&|t2| f(t1, t2), y_set, mu, m_axis)
        })
        .collect::<Result<Vec<_>>>()?;
    choquet_of_cells(&inner, &x_cells, mu)
}

/// Iterated Choquet integral over a box: inner integral in the second
/// coordinate, outer in the first. `domain_samples` is read as a total
/// budget, so each axis gets about its square root; refinement doubles the
/// per-axis count.
pub fn choquet_integral_2d_iterated<F>(
    f: F,
    x_set: &MeasurableSet,
    y_set: &MeasurableSet,
    mu: &Capacity,
    cfg: &QuadratureConfig,
) -> Result<f64>
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    cfg.validate()?;
    let base = ((cfg.domain_samples as f64).sqrt().round() as usize).max(2);
    match cfg.refinement {
        Refinement::None => iterated_once(&f, x_set, y_set, mu, base),
        Refinement::DoubleUntilStable => {
            let cap = REFINEMENT_CAP_PER_AXIS
                .min(((cfg.max_domain_samples as f64).sqrt().floor() as usize).max(2));
            let mut m = base.min(cap);
            let mut prev = iterated_once(&f, x_set, y_set, mu, m)?;
            let mut last_delta = f64::INFINITY;
            while m < cap {
                m = m.saturating_mul(2).min(cap);
                let cur = iterated_once(&f, x_set, y_set, mu, m)?;
                last_delta = (cur - prev).abs();
                if last_delta < cfg.stability_tol {
                    return Ok(cur);
                }
                prev = cur;
            }
            Err(Error::RefinementStalled { value: prev, delta: last_delta })
        }
    }
}

/// Discrete Choquet integral of a vector against a capacity on its index
/// set. Assumes mu(∅) = 0, as every `DiscreteCapacity` constructor here
/// guarantees.
pub fn discrete_choquet(values: &[f64], mu: &DiscreteCapacity) -> Result<f64> {
    if values.len() != mu.len {
        return Err(Error::Precondition(format!(
            "value vector has length {}, capacity expects {}",
            values.len(),
            mu.len
        )));
    }
    if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::NonFiniteSample(format!("discrete value {bad}")));
    }
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    let mut mask = vec![false; values.len()];
    let mut prev = 0.0;
    let mut acc = 0.0;
    for &i in &order {
        mask[i] = true;
        let cur = mu.evaluate(&mask)?;
        acc += values[i] * (cur - prev);
        prev = cur;
    }
    Ok(acc)
}

/// Diagnostic integrator on a uniform level grid (`level_samples` levels per
/// sign), for cross-checking the primary path. Only capacities with a
/// length profile are supported; the level-set length comes from a suffix
/// sum over value-sorted cells.
pub fn choquet_levels_uniform(
    f: impl Fn(f64) -> f64,
    set: &MeasurableSet,
    mu: &Capacity,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    cfg.validate()?;
    let u = mu.length_profile().ok_or_else(|| {
        Error::Precondition("uniform level grid needs a capacity with a length profile".into())
    })?;
    let cells = partition_cells(set, cfg.domain_samples)?;
    if cells.is_empty() {
        return Ok(0.0);
    }
    let values = sample_midpoints(&f, &cells)?;
    let total_len: f64 = cells.iter().map(Interval::len).sum();

    let mut pairs: Vec<(f64, f64)> =
        values.iter().zip(&cells).map(|(&v, c)| (v, c.len())).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    // suffix[i] = total length of cells with value index >= i
    let mut suffix = vec![0.0; pairs.len() + 1];
    for i in (0..pairs.len()).rev() {
        suffix[i] = suffix[i + 1] + pairs[i].1;
    }
    let level_len = |t: f64| -> f64 {
        let idx = pairs.partition_point(|&(v, _)| v < t);
        suffix[idx]
    };

    let vmin = pairs.first().map(|p| p.0).unwrap();
    let vmax = pairs.last().map(|p| p.0).unwrap();
    let levels = cfg.level_samples;
    let mut acc = 0.0;
    if vmax > 0.0 {
        let width = vmax / levels as f64;
        for j in 0..levels {
            let t = (j as f64 + 0.5) * width;
            acc += u(level_len(t)) * width;
        }
    }
    if vmin < 0.0 {
        let width = -vmin / levels as f64;
        let mu_total = u(total_len);
        for j in 0..levels {
            let t = vmin + (j as f64 + 0.5) * width;
            acc += (u(level_len(t)) - mu_total) * width;
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capacity::{lebesgue, sqrt_lebesgue, MeasurableSet};
    use approx::assert_abs_diff_eq;

    fn unit() -> MeasurableSet {
        MeasurableSet::interval(0.0, 1.0).unwrap()
    }

    fn sqrt_general() -> Capacity {
        // Same set function as sqrt_lebesgue, but routed through the
        // general evaluator to exercise the incremental-union path.
        Capacity::from_fn("sqrt_general", 1.0, true, false, |s| Ok(lebesgue(s).sqrt()))
    }

    #[test]
    fn constants_are_reproduced_exactly() {
        let cfg = QuadratureConfig::fixed(512);
        let mu = sqrt_lebesgue();
        let v = choquet_integral_1d(|_| 0.7, &unit(), &mu, &cfg).unwrap();
        assert_abs_diff_eq!(v, 0.7, epsilon = 1e-12);
        let v = choquet_integral_1d(|_| -0.7, &unit(), &mu, &cfg).unwrap();
        assert_abs_diff_eq!(v, -0.7, epsilon = 1e-12);
        let quarter = MeasurableSet::interval(0.0, 0.25).unwrap();
        let v = choquet_integral_1d(|_| 0.7, &quarter, &mu, &cfg).unwrap();
        assert_abs_diff_eq!(v, 0.7 * 0.5, epsilon = 1e-12);
    }

    #[test]
    fn identity_against_closed_form() {
        // ∫ t d(sqrt∘L) over [0,1] = ∫_0^1 sqrt(1-s) ds = 2/3,
        // and for -t the negative-level convention gives -1/3.
        let cfg = QuadratureConfig::fixed(4096);
        let mu = sqrt_lebesgue();
        let v = choquet_integral_1d(|t| t, &unit(), &mu, &cfg).unwrap();
        assert_abs_diff_eq!(v, 2.0 / 3.0, epsilon = 1e-3);
        let v = choquet_integral_1d(|t| -t, &unit(), &mu, &cfg).unwrap();
        assert_abs_diff_eq!(v, -1.0 / 3.0, epsilon = 1e-3);
    }

    #[test]
    fn subinterval_closed_forms() {
        // Over [a, a+h]: ∫ t = a·sqrt(h) + (2/3)h^{3/2}
        //                ∫ t² = a²·sqrt(h) + (4/3)a·h^{3/2} + (8/15)h^{5/2}
        let (a, h) = (0.25, 0.5);
        let set = MeasurableSet::interval(a, a + h).unwrap();
        let cfg = QuadratureConfig::fixed(4096);
        let mu = sqrt_lebesgue();
        let v = choquet_integral_1d(|t| t, &set, &mu, &cfg).unwrap();
        assert_abs_diff_eq!(v, a * h.sqrt() + 2.0 / 3.0 * h.powf(1.5), epsilon = 1e-3);
        let v = choquet_integral_1d(|t| t * t, &set, &mu, &cfg).unwrap();
        let exact = a * a * h.sqrt() + 4.0 / 3.0 * a * h.powf(1.5) + 8.0 / 15.0 * h.powf(2.5);
        assert_abs_diff_eq!(v, exact, epsilon = 1e-3);
    }

    #[test]
    fn union_of_intervals() {
        // f = t over [0,1/4] ∪ [1/2,3/4] with sqrt∘L; piecing the level
        // integral together gives (2/3)(2^{-3/2} - 8^{-1}) + 1/8 + 1/12.
        let set = MeasurableSet::from_intervals([(0.0, 0.25), (0.5, 0.75)]).unwrap();
        let cfg = QuadratureConfig::fixed(4096);
        let v = choquet_integral_1d(|t| t, &set, &sqrt_lebesgue(), &cfg).unwrap();
        assert_abs_diff_eq!(v, 0.36070226039551586, epsilon = 1e-3);
    }

    #[test]
    fn refinement_reaches_stability() {
        let cfg = QuadratureConfig {
            domain_samples: 64,
            refinement: Refinement::DoubleUntilStable,
            stability_tol: 1e-6,
            ..QuadratureConfig::default()
        };
        let v = choquet_integral_1d(|t| t, &unit(), &sqrt_lebesgue(), &cfg).unwrap();
        assert_abs_diff_eq!(v, 2.0 / 3.0, epsilon = 1e-4);
    }

    #[test]
    fn refinement_cap_breach_is_reported() {
        let cfg = QuadratureConfig {
            domain_samples: 64,
            refinement: Refinement::DoubleUntilStable,
            stability_tol: 1e-18,
            max_domain_samples: 256,
            ..QuadratureConfig::default()
        };
        let err = choquet_integral_1d(|t| t, &unit(), &sqrt_lebesgue(), &cfg).unwrap_err();
        match err {
            Error::RefinementStalled { value, delta } => {
                assert_abs_diff_eq!(value, 2.0 / 3.0, epsilon = 1e-2);
                assert!(delta > 0.0);
            }
            other => panic!("expected RefinementStalled, got {other}"),
        }
    }

    #[test]
    fn iterated_planar_integrals() {
        let cfg = QuadratureConfig {
            domain_samples: 512 * 512,
            refinement: Refinement::None,
            ..QuadratureConfig::default()
        };
        let mu = sqrt_lebesgue();
        let v = choquet_integral_2d_iterated(|x, y| x + y, &unit(), &unit(), &mu, &cfg).unwrap();
        assert_abs_diff_eq!(v, 4.0 / 3.0, epsilon = 3e-3);
        let v = choquet_integral_2d_iterated(|x, y| x * y, &unit(), &unit(), &mu, &cfg).unwrap();
        assert_abs_diff_eq!(v, 4.0 / 9.0, epsilon = 3e-3);
    }

    #[test]
    fn discrete_two_values() {
        let mu = DiscreteCapacity::distorted_counting(2, f64::sqrt);
        let v = discrete_choquet(&[1.0, 2.0], &mu).unwrap();
        assert_abs_diff_eq!(v, 1.0 + 0.5f64.sqrt(), epsilon = 1e-15);
        // order of entries is irrelevant
        let w = discrete_choquet(&[2.0, 1.0], &mu).unwrap();
        assert_abs_diff_eq!(v, w, epsilon = 0.0);
    }

    /// Piecewise-constant integrand whose breakpoints sit on the sampling
    /// grid: the sampled simple function IS the integrand, so the continuous
    /// integrator and the discrete Choquet against the piece-induced
    /// capacity must agree to rounding.
    #[test]
    fn sampled_matches_discrete_on_aligned_pieces() {
        let vals = [0.3, -0.8, 1.4, 0.1, -0.2, 2.0, 0.9, -1.1];
        let k = vals.len();
        let pieces: Vec<MeasurableSet> = (0..k)
            .map(|i| {
                MeasurableSet::interval(i as f64 / k as f64, (i + 1) as f64 / k as f64).unwrap()
            })
            .collect();
        let f = move |t: f64| vals[((t * k as f64) as usize).min(k - 1)];

        let cont = choquet_integral_1d(
            f,
            &unit(),
            &sqrt_lebesgue(),
            &QuadratureConfig::fixed(4096),
        )
        .unwrap();
        let disc = discrete_choquet(
            &vals,
            &DiscreteCapacity::induced_by_pieces(pieces, sqrt_lebesgue()),
        )
        .unwrap();
        assert_abs_diff_eq!(cont, disc, epsilon = 1e-9);
    }

    #[test]
    fn general_capacity_path_matches_length_profile_path() {
        let f = |t: f64| (7.0 * t).sin() - 0.3;
        let cfg = QuadratureConfig::fixed(1024);
        let fast = choquet_integral_1d(f, &unit(), &sqrt_lebesgue(), &cfg).unwrap();
        let slow = choquet_integral_1d(f, &unit(), &sqrt_general(), &cfg).unwrap();
        assert_abs_diff_eq!(fast, slow, epsilon = 1e-12);
    }

    #[test]
    fn uniform_level_diagnostic_agrees() {
        let cfg = QuadratureConfig::fixed(4096);
        let mu = sqrt_lebesgue();
        let d = choquet_levels_uniform(|t| t, &unit(), &mu, &cfg).unwrap();
        assert_abs_diff_eq!(d, 2.0 / 3.0, epsilon = 5e-3);
        let f = |t: f64| (5.0 * t).cos() * 0.8 + 0.1;
        let primary = choquet_integral_1d(f, &unit(), &mu, &cfg).unwrap();
        let diag = choquet_levels_uniform(f, &unit(), &mu, &cfg).unwrap();
        assert_abs_diff_eq!(primary, diag, epsilon = 5e-3);
    }

    fn seeded_piecewise(seed: u64) -> impl Fn(f64) -> f64 {
        // cheap deterministic wiggle, bounded, no allocation
        let a = (seed % 7) as f64 - 3.0;
        let b = ((seed / 7) % 5) as f64;
        move |t: f64| a * t + (b * t * 3.7).sin() - 0.4 * ((seed % 3) as f64)
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(32))]

        #[test]
        fn positively_homogeneous(seed in 0u64..500, lam in 0.0f64..8.0) {
            let f = seeded_piecewise(seed);
            let cfg = QuadratureConfig::fixed(256);
            let mu = sqrt_lebesgue();
            let base = choquet_integral_1d(&f, &unit(), &mu, &cfg).unwrap();
            let scaled = choquet_integral_1d(|t| lam * f(t), &unit(), &mu, &cfg).unwrap();
            proptest::prop_assert!((scaled - lam * base).abs() <= 1e-9 * (1.0 + lam * base.abs()));
        }

        #[test]
        fn monotone_in_the_integrand(seed in 0u64..500, bump in 0.0f64..2.0) {
            let f = seeded_piecewise(seed);
            let cfg = QuadratureConfig::fixed(256);
            let mu = sqrt_lebesgue();
            let lo = choquet_integral_1d(&f, &unit(), &mu, &cfg).unwrap();
            let hi = choquet_integral_1d(|t| f(t) + bump * (1.0 + (3.1 * t).cos().abs()), &unit(), &mu, &cfg).unwrap();
            proptest::prop_assert!(lo <= hi + 1e-12);
        }

        #[test]
        fn translates_by_nonnegative_constants(seed in 0u64..500, alpha in 0.0f64..3.0) {
            let f = seeded_piecewise(seed);
            let cfg = QuadratureConfig::fixed(256);
            let mu = sqrt_lebesgue();
            let base = choquet_integral_1d(&f, &unit(), &mu, &cfg).unwrap();
            let shifted = choquet_integral_1d(|t| f(t) + alpha, &unit(), &mu, &cfg).unwrap();
            // mu([0,1]) = 1
            proptest::prop_assert!((shifted - base - alpha).abs() <= 1e-9);
        }

        #[test]
        fn subadditive_for_submodular_capacity(sa in 0u64..500, sb in 0u64..500) {
            let f = seeded_piecewise(sa);
            let g = seeded_piecewise(sb.wrapping_mul(31).wrapping_add(1));
            let cfg = QuadratureConfig::fixed(256);
            let mu = sqrt_lebesgue();
            let sum = choquet_integral_1d(|t| f(t) + g(t), &unit(), &mu, &cfg).unwrap();
            let parts = choquet_integral_1d(&f, &unit(), &mu, &cfg).unwrap()
                + choquet_integral_1d(&g, &unit(), &mu, &cfg).unwrap();
            proptest::prop_assert!(sum <= parts + 1e-9);
        }
    }
}
