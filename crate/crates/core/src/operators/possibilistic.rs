//! Possibilistic polynomial families: Bernstein weights applied to kernel
//! suprema instead of integral means.
//!
//! Durrmeyer form — the node value attached to (k1, k2) is
//! sup_t f(t) · κ_{k1}(t1) κ_{k2}(t2) normalized by the kernel peaks, where
//! κ_k(t) = t^k (1-t)^{n-k} peaks at k/n with height
//! D(k) = (k/n)^k ((n-k)/n)^{n-k} (0^0 = 1). Kantorovich form — the node
//! value is the plain supremum of f over the square cell with corners
//! k/(n+1), (k+1)/(n+1).
//!
//! Suprema are grid suprema over grids that contain every kernel peak
//! (Durrmeyer) or every cell endpoint (Kantorovich); those alignments make
//! unit preservation exact, and sampled sups only ever under-estimate, which
//! is the safe direction for upper-bound verification. Fields that declare
//! single-axis dependence factor through 1-D sups; the fast path agrees
//! with the general one to rounding because the zero set of every kernel
//! meets the grid.

use rayon::prelude::*;

use crate::domain::{AxisDependence, DomainSpec, ScalarField};
use crate::error::{Error, Result};
use crate::operators::{AxiomProfile, OperatorFamily, PreparedOperator};

use super::bernstein::bernstein_row;

/// Uniform grid of n*s+1 points on [0,1]; contains every j/n exactly
/// (j*s/(n*s) and j/n round to the same double).
fn aligned_grid(n: usize, s: usize) -> Vec<f64> {
    let count = n * s;
    (0..=count).map(|m| m as f64 / count as f64).collect()
}

fn ln_peak(n: usize, k: usize) -> f64 {
    let mut l = 0.0;
    if k > 0 {
        l += k as f64 * (k as f64 / n as f64).ln();
    }
    if k < n {
        l += (n - k) as f64 * ((n - k) as f64 / n as f64).ln();
    }
    l
}

/// κ_k(t)/D(k): the kernel normalized to peak height 1.
fn normalized_kernel(n: usize, k: usize, lnd: f64, t: f64) -> f64 {
    if t == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    if t == 1.0 {
        return if k == n { 1.0 } else { 0.0 };
    }
    let mut ln_v = -lnd;
    if k > 0 {
        ln_v += k as f64 * t.ln();
    }
    if k < n {
        ln_v += (n - k) as f64 * (1.0 - t).ln();
    }
    ln_v.exp()
}

/// Table of normalized kernel values, kernels[k*grid_len + i].
fn kernel_table(n: usize, grid: &[f64]) -> Vec<f64> {
    let g = grid.len();
    let mut table = vec![0.0; (n + 1) * g];
    table
        .par_chunks_mut(g)
        .enumerate()
        .for_each(|(k, row)| {
            let lnd = ln_peak(n, k);
            for (i, &t) in grid.iter().enumerate() {
                row[i] = normalized_kernel(n, k, lnd, t);
            }
        });
    table
}

fn check_finite(values: &[f64]) -> Result<()> {
    match values.iter().find(|v| !v.is_finite()) {
        Some(bad) => Err(Error::NonFiniteSample(format!("sampled value {bad}"))),
        None => Ok(()),
    }
}

fn max_of(values: impl Iterator<Item = f64>) -> f64 {
    values.fold(f64::NEG_INFINITY, f64::max)
}

/// Bilinear evaluation sum_{k1,k2} row1[k1] row2[k2] node[k1*side+k2].
fn tensor_eval(row1: &[f64], row2: &[f64], nodes: &[f64]) -> f64 {
    let side = row2.len();
    let mut acc = 0.0;
    for (k1, w1) in row1.iter().enumerate() {
        if *w1 == 0.0 {
            continue;
        }
        let row = &nodes[k1 * side..(k1 + 1) * side];
        let partial: f64 = row2.iter().zip(row).map(|(w2, v)| w2 * v).sum();
        acc += w1 * partial;
    }
    acc
}

/// Durrmeyer-type possibilistic operator on the unit square.
pub struct PossibilisticDurrmeyer {
    domain: DomainSpec,
    /// Sup-grid subdivisions per kernel-peak gap 1/n; default aims for
    /// about 256 points per axis.
    subdivisions: Option<usize>,
}

impl PossibilisticDurrmeyer {
    pub fn new() -> Self {
        PossibilisticDurrmeyer { domain: DomainSpec::unit_square(), subdivisions: None }
    }

    pub fn with_subdivisions(mut self, s: usize) -> Self {
        self.subdivisions = Some(s.max(1));
        self
    }

    fn grid_for(&self, n: usize) -> Vec<f64> {
        let s = self.subdivisions.unwrap_or_else(|| (256 + n - 1) / n).max(1);
        aligned_grid(n, s)
    }
}

impl Default for PossibilisticDurrmeyer {
    fn default() -> Self {
        Self::new()
    }
}

impl OperatorFamily for PossibilisticDurrmeyer {
    fn name(&self) -> &str {
        "possibilistic_durrmeyer"
    }

    fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    fn profile(&self) -> AxiomProfile {
        // sup(f·kernel + c·kernel) is not sup(f·kernel) + c·D in general:
        // weighting inside the sup breaks translation, and comonotonicity
        // of (f, g) says nothing about (f·kernel, g·kernel).
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
        let grid = self.grid_for(n);
        let g = grid.len();
        let side = n + 1;
        let kernels = kernel_table(n, &grid);

        let nodes: Vec<f64> = match f.dependence {
            AxisDependence::OnlyX1 | AxisDependence::OnlyX2 => {
                let first = f.dependence == AxisDependence::OnlyX1;
                let line: Vec<f64> = grid
                    .iter()
                    .map(|&t| if first { f.eval2(t, 0.0) } else { f.eval2(0.0, t) })
                    .collect();
                check_finite(&line)?;
                // other-axis kernels contribute sup κ = 1 where the line
                // value is positive and touch 0 otherwise
                let sups: Vec<f64> = (0..side)
                    .map(|k| {
                        let krow = &kernels[k * g..(k + 1) * g];
                        max_of(line.iter().zip(krow).map(|(v, w)| v * w)).max(0.0)
                    })
                    .collect();
                let mut nodes = vec![0.0; side * side];
                for k1 in 0..side {
                    for k2 in 0..side {
                        nodes[k1 * side + k2] = if first { sups[k1] } else { sups[k2] };
                    }
                }
                nodes
            }
            AxisDependence::General => {
                let mut fv = vec![0.0; g * g];
                fv.par_chunks_mut(g).enumerate().for_each(|(i1, row)| {
                    let t1 = grid[i1];
                    for (i2, slot) in row.iter_mut().enumerate() {
                        *slot = f.eval2(t1, grid[i2]);
                    }
                });
                check_finite(&fv)?;
                // inner stage: best second-coordinate response per (k2, t1)
                let mut inner = vec![0.0; side * g];
                inner.par_chunks_mut(g).enumerate().for_each(|(k2, row)| {
                    let krow = &kernels[k2 * g..(k2 + 1) * g];
                    for (i1, slot) in row.iter_mut().enumerate() {
                        let frow = &fv[i1 * g..(i1 + 1) * g];
                        *slot = max_of(frow.iter().zip(krow).map(|(v, w)| v * w));
                    }
                });
                // outer stage over the first coordinate
                let mut nodes = vec![0.0; side * side];
                nodes.par_chunks_mut(side).enumerate().for_each(|(k1, row)| {
                    let krow = &kernels[k1 * g..(k1 + 1) * g];
                    for (k2, slot) in row.iter_mut().enumerate() {
                        let irow = &inner[k2 * g..(k2 + 1) * g];
                        *slot = max_of(krow.iter().zip(irow).map(|(w, v)| w * v));
                    }
                });
                nodes
            }
        };

        Ok(PreparedOperator::new(move |p| {
            let (x1, x2) = p.planar()?;
            Ok(tensor_eval(&bernstein_row(n, x1), &bernstein_row(n, x2), &nodes))
        }))
    }
}

/// Kantorovich-type possibilistic operator on the unit square: Bernstein
/// weights times plain cell suprema.
pub struct PossibilisticKantorovich {
    domain: DomainSpec,
    /// Sup-grid points per cell edge (cell endpoints always included);
    /// default 8.
    subdivisions: Option<usize>,
}

impl PossibilisticKantorovich {
    pub fn new() -> Self {
        PossibilisticKantorovich { domain: DomainSpec::unit_square(), subdivisions: None }
    }

    pub fn with_subdivisions(mut self, s: usize) -> Self {
        self.subdivisions = Some(s.max(1));
        self
    }
}

impl Default for PossibilisticKantorovich {
    fn default() -> Self {
        Self::new()
    }
}

/// Per-cell maxima over an aligned grid: cell k spans grid indices
/// k*s ..= (k+1)*s, sharing its endpoints with the neighbors.
fn cell_maxima(values: &[f64], cells: usize, s: usize) -> Vec<f64> {
    (0..cells)
        .map(|k| max_of(values[k * s..=(k + 1) * s].iter().copied()))
        .collect()
}

impl OperatorFamily for PossibilisticKantorovich {
    fn name(&self) -> &str {
        "possibilistic_kantorovich"
    }

    fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    fn profile(&self) -> AxiomProfile {
        // A convex combination of plain cell sups: sups of f + c shift by
        // exactly c, and on each compact cell, comonotone summands attain
        // their sups at a common point.
        AxiomProfile {
            sublinear: true,
            monotone: true,
            translatable: true,
            unital: true,
            comonotone_additive: true,
        }
    }

    fn prepare(&self, n: usize, f: &ScalarField) -> Result<PreparedOperator> {
        let side = n + 1;
        let s = self.subdivisions.unwrap_or(8).max(1);
        let grid = aligned_grid(side, s);
        let g = grid.len();

        let nodes: Vec<f64> = match f.dependence {
            AxisDependence::OnlyX1 | AxisDependence::OnlyX2 => {
                let first = f.dependence == AxisDependence::OnlyX1;
                let line: Vec<f64> = grid
                    .iter()
                    .map(|&t| if first { f.eval2(t, 0.0) } else { f.eval2(0.0, t) })
                    .collect();
                check_finite(&line)?;
                let sups = cell_maxima(&line, side, s);
                let mut nodes = vec![0.0; side * side];
                for k1 in 0..side {
                    for k2 in 0..side {
                        nodes[k1 * side + k2] = if first { sups[k1] } else { sups[k2] };
                    }
                }
                nodes
            }
            AxisDependence::General => {
                let mut fv = vec![0.0; g * g];
                fv.par_chunks_mut(g).enumerate().for_each(|(i1, row)| {
                    let t1 = grid[i1];
                    for (i2, slot) in row.iter_mut().enumerate() {
                        *slot = f.eval2(t1, grid[i2]);
                    }
                });
                check_finite(&fv)?;
                // reduce the second coordinate to per-cell maxima, then the
                // first
                let mut half = vec![0.0; g * side];
                half.par_chunks_mut(side).enumerate().for_each(|(i1, row)| {
                    let frow = &fv[i1 * g..(i1 + 1) * g];
                    row.copy_from_slice(&cell_maxima(frow, side, s));
                });
                let mut nodes = vec![0.0; side * side];
                for k2 in 0..side {
                    let column: Vec<f64> = (0..g).map(|i1| half[i1 * side + k2]).collect();
                    let sups = cell_maxima(&column, side, s);
                    for k1 in 0..side {
                        nodes[k1 * side + k2] = sups[k1];
                    }
                }
                nodes
            }
        };

        Ok(PreparedOperator::new(move |p| {
            let (x1, x2) = p.planar()?;
            Ok(tensor_eval(&bernstein_row(n, x1), &bernstein_row(n, x2), &nodes))
        }))
    }
}

/// One-variable Kantorovich-type possibilistic operator: Bernstein weights
/// times sups over the intervals [k/(n+1), (k+1)/(n+1)]. Shares its domain
/// with the one-variable Choquet family, which makes the two combinable
/// under pointwise suprema.
pub struct PossibilisticKantorovich1d {
    domain: DomainSpec,
    subdivisions: Option<usize>,
}

impl PossibilisticKantorovich1d {
    pub fn new() -> Self {
        PossibilisticKantorovich1d { domain: DomainSpec::unit_interval(), subdivisions: None }
    }

    pub fn with_subdivisions(mut self, s: usize) -> Self {
        self.subdivisions = Some(s.max(1));
        self
    }
}

impl Default for PossibilisticKantorovich1d {
    fn default() -> Self {
        Self::new()
    }
}

impl OperatorFamily for PossibilisticKantorovich1d {
    fn name(&self) -> &str {
        "possibilistic_kantorovich_1d"
    }

    fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    fn profile(&self) -> AxiomProfile {
        AxiomProfile {
            sublinear: true,
            monotone: true,
            translatable: true,
            unital: true,
            comonotone_additive: true,
        }
    }

    fn prepare(&self, n: usize, f: &ScalarField) -> Result<PreparedOperator> {
        let side = n + 1;
        let s = self.subdivisions.unwrap_or(8).max(1);
        let grid = aligned_grid(side, s);
        let line: Vec<f64> = grid.iter().map(|&t| f.eval1(t)).collect();
        check_finite(&line)?;
        let sups = cell_maxima(&line, side, s);
        Ok(PreparedOperator::new(move |p| {
            let x = p.scalar()?;
            Ok(bernstein_row(n, x).iter().zip(&sups).map(|(w, v)| w * v).sum())
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Point;
    use approx::assert_abs_diff_eq;

    fn pr1() -> ScalarField {
        ScalarField::of_xy("pr1", DomainSpec::unit_square(), |x, _| x)
            .with_dependence(AxisDependence::OnlyX1)
    }

    #[test]
    fn durrmeyer_corner_value_of_projection() {
        // At the origin only the (0,0) node survives, and its value is
        // sup t(1-t)^2 = 4/27 at t = 1/3 (grid sup slightly below).
        let op = PossibilisticDurrmeyer::new();
        let t = op.prepare(2, &pr1()).unwrap();
        let v = t.eval(Point::Planar(0.0, 0.0)).unwrap();
        assert_abs_diff_eq!(v, 4.0 / 27.0, epsilon = 1e-4);
        assert!(v <= 4.0 / 27.0 + 1e-15);
    }

    #[test]
    fn durrmeyer_translation_fails_with_known_gap() {
        let op = PossibilisticDurrmeyer::new();
        let f = pr1();
        let base = op.prepare(2, &f).unwrap();
        let shifted = op.prepare(2, &f.add_const(1.0)).unwrap();
        let p = Point::Planar(0.0, 0.0);
        // sup (t+1)(1-t)^2 = 1 at t = 0, so the shifted value is exactly 1
        assert_abs_diff_eq!(shifted.eval(p).unwrap(), 1.0, epsilon = 1e-12);
        let gap = base.eval(p).unwrap() + 1.0 - shifted.eval(p).unwrap();
        assert_abs_diff_eq!(gap, 4.0 / 27.0, epsilon = 1e-4);
    }

    #[test]
    fn durrmeyer_is_unital() {
        let op = PossibilisticDurrmeyer::new();
        let one = ScalarField::one(DomainSpec::unit_square());
        for n in [1usize, 5, 16] {
            let t = op.prepare(n, &one).unwrap();
            for p in [Point::Planar(0.0, 0.0), Point::Planar(0.37, 0.81)] {
                assert_abs_diff_eq!(t.eval(p).unwrap(), 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn durrmeyer_fast_path_matches_general_path() {
        let op = PossibilisticDurrmeyer::new();
        let fast = pr1();
        let slow = ScalarField::of_xy("pr1_general", DomainSpec::unit_square(), |x, _| x);
        let a = op.prepare(5, &fast).unwrap();
        let b = op.prepare(5, &slow).unwrap();
        for p in [Point::Planar(0.1, 0.9), Point::Planar(0.5, 0.5), Point::Planar(1.0, 0.2)] {
            assert_abs_diff_eq!(a.eval(p).unwrap(), b.eval(p).unwrap(), epsilon = 1e-12);
        }
    }

    #[test]
    fn kantorovich_corner_value_of_projection() {
        let op = PossibilisticKantorovich::new();
        for n in [1usize, 4, 9] {
            let t = op.prepare(n, &pr1()).unwrap();
            let v = t.eval(Point::Planar(0.0, 0.0)).unwrap();
            assert_abs_diff_eq!(v, 1.0 / (n as f64 + 1.0), epsilon = 1e-15);
        }
    }

    #[test]
    fn kantorovich_translation_is_exact() {
        let op = PossibilisticKantorovich::new();
        let f = ScalarField::of_xy("dip", DomainSpec::unit_square(), |x, y| {
            (4.0 * x).sin() * (3.0 * y).cos() - 0.5
        });
        let base = op.prepare(6, &f).unwrap();
        let shifted = op.prepare(6, &f.add_const(2.0)).unwrap();
        for p in [Point::Planar(0.0, 0.4), Point::Planar(0.66, 0.91)] {
            assert_abs_diff_eq!(
                shifted.eval(p).unwrap(),
                base.eval(p).unwrap() + 2.0,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn kantorovich_comonotone_additivity_on_powers() {
        // pr1 and pr1^2 are comonotone; cell sups split exactly.
        let op = PossibilisticKantorovich::new();
        let f = pr1();
        let gsq = ScalarField::of_xy("pr1^2", DomainSpec::unit_square(), |x, _| x * x)
            .with_dependence(AxisDependence::OnlyX1);
        let joint = op.prepare(5, &f.add(&gsq)).unwrap();
        let a = op.prepare(5, &f).unwrap();
        let b = op.prepare(5, &gsq).unwrap();
        for p in [Point::Planar(0.2, 0.7), Point::Planar(0.9, 0.1)] {
            assert_abs_diff_eq!(
                joint.eval(p).unwrap(),
                a.eval(p).unwrap() + b.eval(p).unwrap(),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn one_dimensional_kantorovich_matches_planar_slice() {
        let op1 = PossibilisticKantorovich1d::new();
        let e1 = ScalarField::of_x("e1", DomainSpec::unit_interval(), |t| t);
        let t1 = op1.prepare(4, &e1).unwrap();
        let op2 = PossibilisticKantorovich::new();
        let t2 = op2.prepare(4, &pr1()).unwrap();
        for x in [0.0, 0.5, 1.0] {
            assert_abs_diff_eq!(
                t1.eval(Point::Scalar(x)).unwrap(),
                t2.eval(Point::Planar(x, 0.3)).unwrap(),
                epsilon = 1e-12
            );
        }
    }
}
