//! Evaluation domains, points and scalar fields.
//!
//! Operator families act on continuous functions over a compact (or locally
//! compact) domain. `DomainSpec` names the domain and knows how to produce
//! uniform evaluation grids and the metric used by separating functions;
//! `ScalarField` packages an evaluable function with the metadata the
//! checkers care about (Lipschitz constant, sup-norm hint, axis structure).

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// A point of an evaluation domain. Interval and circle domains use
/// `Scalar` (the circle is parameterized by angle), planar domains use
/// `Planar`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Point {
    Scalar(f64),
    Planar(f64, f64),
}

impl Point {
    pub fn scalar(self) -> Result<f64> {
        match self {
            Point::Scalar(x) => Ok(x),
            Point::Planar(..) => Err(Error::PointShape("expected scalar point".into())),
        }
    }

    pub fn planar(self) -> Result<(f64, f64)> {
        match self {
            Point::Planar(x, y) => Ok((x, y)),
            Point::Scalar(_) => Err(Error::PointShape("expected planar point".into())),
        }
    }

    /// Component `i` (0 or 1); scalar points only have component 0.
    pub fn component(self, i: usize) -> f64 {
        match (self, i) {
            (Point::Scalar(x), _) => x,
            (Point::Planar(x, _), 0) => x,
            (Point::Planar(_, y), _) => y,
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Scalar(x) => write!(f, "{x:.6}"),
            Point::Planar(x, y) => write!(f, "({x:.6}, {y:.6})"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DomainKind {
    /// [0, 1]
    UnitInterval,
    /// [0, 1]^2
    UnitSquare,
    /// {(x1, x2): x1, x2 >= 0, x1 + x2 <= 1}
    Simplex,
    /// Unit circle parameterized by angle in [0, 2*pi)
    Circle,
    /// [-half_width, half_width]^2, an observation window in the plane
    PlaneWindow { half_width: f64 },
}

/// An evaluation domain plus its default grid resolution (points per axis;
/// angular samples on the circle).
#[derive(Clone, Debug, PartialEq)]
pub struct DomainSpec {
    pub kind: DomainKind,
    pub eval_grid: usize,
}

impl DomainSpec {
    pub fn unit_interval() -> Self {
        DomainSpec { kind: DomainKind::UnitInterval, eval_grid: 101 }
    }

    pub fn unit_square() -> Self {
        DomainSpec { kind: DomainKind::UnitSquare, eval_grid: 101 }
    }

    pub fn simplex() -> Self {
        DomainSpec { kind: DomainKind::Simplex, eval_grid: 101 }
    }

    pub fn circle() -> Self {
        DomainSpec { kind: DomainKind::Circle, eval_grid: 201 }
    }

    pub fn plane_window(half_width: f64) -> Self {
        DomainSpec { kind: DomainKind::PlaneWindow { half_width }, eval_grid: 101 }
    }

    pub fn is_planar(&self) -> bool {
        matches!(
            self.kind,
            DomainKind::UnitSquare | DomainKind::Simplex | DomainKind::PlaneWindow { .. }
        )
    }

    /// Metric between two domain points. Planar compact domains use the
    /// Euclidean distance, the circle uses the chord length
    /// 2|sin((phi - psi)/2)|, and the plane window uses the taxicab metric
    /// (any equivalent metric works for convergence on compact windows; the
    /// taxicab one matches the rate bounds used for kernel operators).
    pub fn metric(&self, p: Point, q: Point) -> f64 {
        match self.kind {
            DomainKind::UnitInterval => (p.component(0) - q.component(0)).abs(),
            DomainKind::UnitSquare | DomainKind::Simplex => {
                let (px, py) = (p.component(0), p.component(1));
                let (qx, qy) = (q.component(0), q.component(1));
                ((px - qx).powi(2) + (py - qy).powi(2)).sqrt()
            }
            DomainKind::Circle => {
                let d = (p.component(0) - q.component(0)) / 2.0;
                2.0 * d.sin().abs()
            }
            DomainKind::PlaneWindow { .. } => {
                (p.component(0) - q.component(0)).abs() + (p.component(1) - q.component(1)).abs()
            }
        }
    }

    /// Uniform evaluation grid with `per_axis` points per axis (angular
    /// points on the circle). Simplex grids keep only points with
    /// x1 + x2 <= 1 (hypotenuse included).
    pub fn grid_points(&self, per_axis: usize) -> Vec<Point> {
        let per_axis = per_axis.max(2);
        let lin = |a: f64, b: f64| -> Vec<f64> {
            (0..per_axis)
                .map(|i| a + (b - a) * i as f64 / (per_axis - 1) as f64)
                .collect()
        };
        match self.kind {
            DomainKind::UnitInterval => lin(0.0, 1.0).into_iter().map(Point::Scalar).collect(),
            DomainKind::Circle => (0..per_axis)
                .map(|i| Point::Scalar(2.0 * std::f64::consts::PI * i as f64 / per_axis as f64))
                .collect(),
            DomainKind::UnitSquare => {
                let xs = lin(0.0, 1.0);
                let mut out = Vec::with_capacity(per_axis * per_axis);
                for &x in &xs {
                    for &y in &xs {
                        out.push(Point::Planar(x, y));
                    }
                }
                out
            }
            DomainKind::Simplex => {
                let xs = lin(0.0, 1.0);
                let mut out = Vec::new();
                for &x in &xs {
                    for &y in &xs {
                        if x + y <= 1.0 + 1e-12 {
                            out.push(Point::Planar(x, y));
                        }
                    }
                }
                out
            }
            DomainKind::PlaneWindow { half_width } => {
                let xs = lin(-half_width, half_width);
                let mut out = Vec::with_capacity(per_axis * per_axis);
                for &x in &xs {
                    for &y in &xs {
                        out.push(Point::Planar(x, y));
                    }
                }
                out
            }
        }
    }

    /// Default grid at the domain's own resolution.
    pub fn default_grid(&self) -> Vec<Point> {
        self.grid_points(self.eval_grid)
    }

    pub fn contains(&self, p: Point) -> bool {
        const EPS: f64 = 1e-12;
        match (self.kind, p) {
            (DomainKind::UnitInterval, Point::Scalar(x)) => (-EPS..=1.0 + EPS).contains(&x),
            (DomainKind::Circle, Point::Scalar(_)) => true,
            (DomainKind::UnitSquare, Point::Planar(x, y)) => {
                (-EPS..=1.0 + EPS).contains(&x) && (-EPS..=1.0 + EPS).contains(&y)
            }
            (DomainKind::Simplex, Point::Planar(x, y)) => {
                x >= -EPS && y >= -EPS && x + y <= 1.0 + EPS
            }
            (DomainKind::PlaneWindow { half_width }, Point::Planar(x, y)) => {
                x.abs() <= half_width + EPS && y.abs() <= half_width + EPS
            }
            _ => false,
        }
    }
}

/// Structural hint: does the field depend on one planar coordinate only?
/// Operators with per-axis kernels exploit this to factor 2-D suprema and
/// iterated integrals into 1-D passes. `General` is always safe.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AxisDependence {
    General,
    OnlyX1,
    OnlyX2,
}

/// A named real-valued function on a domain.
#[derive(Clone)]
pub struct ScalarField {
    name: String,
    eval: Arc<dyn Fn(Point) -> f64 + Send + Sync>,
    pub domain: DomainSpec,
    pub lipschitz: Option<f64>,
    pub sup_norm_hint: Option<f64>,
    pub dependence: AxisDependence,
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField")
            .field("name", &self.name)
            .field("domain", &self.domain.kind)
            .field("lipschitz", &self.lipschitz)
            .finish()
    }
}

impl ScalarField {
    pub fn new(
        name: impl Into<String>,
        domain: DomainSpec,
        eval: impl Fn(Point) -> f64 + Send + Sync + 'static,
    ) -> Self {
        ScalarField {
            name: name.into(),
            eval: Arc::new(eval),
            domain,
            lipschitz: None,
            sup_norm_hint: None,
            dependence: AxisDependence::General,
        }
    }

    /// Field on a scalar domain, defined by a function of the coordinate.
    pub fn of_x(
        name: impl Into<String>,
        domain: DomainSpec,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        ScalarField::new(name, domain, move |p| match p {
            Point::Scalar(x) => f(x),
            Point::Planar(x, _) => f(x),
        })
    }

    /// Field on a planar domain.
    pub fn of_xy(
        name: impl Into<String>,
        domain: DomainSpec,
        f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        ScalarField::new(name, domain, move |p| match p {
            Point::Planar(x, y) => f(x, y),
            Point::Scalar(x) => f(x, x),
        })
    }

    pub fn constant(domain: DomainSpec, c: f64) -> Self {
        let mut f = ScalarField::new(format!("const({c})"), domain, move |_| c);
        f.lipschitz = Some(0.0);
        f.sup_norm_hint = Some(c.abs());
        f
    }

    pub fn one(domain: DomainSpec) -> Self {
        let mut f = ScalarField::constant(domain, 1.0);
        f.name = "one".into();
        f
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_lipschitz(mut self, k: f64) -> Self {
        self.lipschitz = Some(k);
        self
    }

    pub fn with_sup_norm_hint(mut self, s: f64) -> Self {
        self.sup_norm_hint = Some(s);
        self
    }

    pub fn with_dependence(mut self, dep: AxisDependence) -> Self {
        self.dependence = dep;
        self
    }

    pub fn eval(&self, p: Point) -> f64 {
        (self.eval)(p)
    }

    pub fn eval1(&self, x: f64) -> f64 {
        (self.eval)(Point::Scalar(x))
    }

    pub fn eval2(&self, x: f64, y: f64) -> f64 {
        (self.eval)(Point::Planar(x, y))
    }

    /// Pointwise sum. Metadata: Lipschitz constants add when both known.
    pub fn add(&self, other: &ScalarField) -> ScalarField {
        let (a, b) = (self.eval.clone(), other.eval.clone());
        let mut out = ScalarField::new(
            format!("({} + {})", self.name, other.name),
            self.domain.clone(),
            move |p| a(p) + b(p),
        );
        out.lipschitz = match (self.lipschitz, other.lipschitz) {
            (Some(x), Some(y)) => Some(x + y),
            _ => None,
        };
        out.dependence = if self.dependence == other.dependence {
            self.dependence
        } else {
            AxisDependence::General
        };
        out
    }

    pub fn scale(&self, a: f64) -> ScalarField {
        let e = self.eval.clone();
        let mut out = ScalarField::new(
            format!("{a}*{}", self.name),
            self.domain.clone(),
            move |p| a * e(p),
        );
        out.lipschitz = self.lipschitz.map(|k| k * a.abs());
        out.sup_norm_hint = self.sup_norm_hint.map(|s| s * a.abs());
        out.dependence = self.dependence;
        out
    }

    pub fn add_const(&self, c: f64) -> ScalarField {
        let e = self.eval.clone();
        let mut out = ScalarField::new(
            format!("({} + {c})", self.name),
            self.domain.clone(),
            move |p| e(p) + c,
        );
        out.lipschitz = self.lipschitz;
        out.dependence = self.dependence;
        out
    }

    pub fn abs(&self) -> ScalarField {
        let e = self.eval.clone();
        let mut out = ScalarField::new(
            format!("|{}|", self.name),
            self.domain.clone(),
            move |p| e(p).abs(),
        );
        out.lipschitz = self.lipschitz;
        out.dependence = self.dependence;
        out
    }

    /// |self|^p, used by the Hölder check.
    pub fn abs_pow(&self, p: f64) -> ScalarField {
        let e = self.eval.clone();
        let mut out = ScalarField::new(
            format!("|{}|^{p}", self.name),
            self.domain.clone(),
            move |q| e(q).abs().powf(p),
        );
        out.dependence = self.dependence;
        out
    }

    /// Pointwise product of absolute values, |f*g|.
    pub fn abs_mul(&self, other: &ScalarField) -> ScalarField {
        let (a, b) = (self.eval.clone(), other.eval.clone());
        let mut out = ScalarField::new(
            format!("|{} * {}|", self.name, other.name),
            self.domain.clone(),
            move |p| (a(p) * b(p)).abs(),
        );
        out.dependence = if self.dependence == other.dependence {
            self.dependence
        } else {
            AxisDependence::General
        };
        out
    }

    /// Max of |f| over a grid.
    pub fn grid_sup_norm(&self, grid: &[Point]) -> f64 {
        grid.iter().map(|&p| self.eval(p).abs()).fold(0.0, f64::max)
    }

    /// Min of f over a grid.
    pub fn grid_min(&self, grid: &[Point]) -> f64 {
        grid.iter().map(|&p| self.eval(p)).fold(f64::INFINITY, f64::min)
    }

    /// Checks sampled difference quotients against the declared Lipschitz
    /// constant; quotients may not exceed it by more than `slack`.
    pub fn validate_lipschitz(&self, grid: &[Point], slack: f64) -> Result<()> {
        let k = self
            .lipschitz
            .ok_or_else(|| Error::MissingLipschitz(self.name.clone()))?;
        for (i, &p) in grid.iter().enumerate() {
            for &q in grid.iter().skip(i + 1) {
                let d = self.domain.metric(p, q);
                if d <= 1e-14 {
                    continue;
                }
                let quot = (self.eval(p) - self.eval(q)).abs() / d;
                if quot > k + slack {
                    return Err(Error::Precondition(format!(
                        "field '{}' violates declared lipschitz {k}: quotient {quot} at {p}, {q}",
                        self.name
                    )));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_endpoints_are_exact() {
        let d = DomainSpec::unit_interval();
        let g = d.grid_points(11);
        assert_eq!(g.len(), 11);
        assert_eq!(g[0], Point::Scalar(0.0));
        assert_eq!(g[10], Point::Scalar(1.0));
    }

    #[test]
    fn simplex_grid_keeps_hypotenuse() {
        let d = DomainSpec::simplex();
        let g = d.grid_points(3);
        // (0,0),(0,0.5),(0,1),(0.5,0),(0.5,0.5),(1,0)
        assert_eq!(g.len(), 6);
        assert!(g.contains(&Point::Planar(0.5, 0.5)));
        assert!(!g.contains(&Point::Planar(1.0, 0.5)));
    }

    #[test]
    fn circle_metric_is_chord_length() {
        let d = DomainSpec::circle();
        let m = d.metric(Point::Scalar(0.0), Point::Scalar(std::f64::consts::PI));
        assert!((m - 2.0).abs() < 1e-12);
    }

    #[test]
    fn lipschitz_validation_catches_understated_constant() {
        let d = DomainSpec::unit_interval();
        let f = ScalarField::of_x("steep", d.clone(), |x| 3.0 * x).with_lipschitz(1.0);
        let grid = d.grid_points(11);
        assert!(f.validate_lipschitz(&grid, 1e-9).is_err());
        let g = ScalarField::of_x("ok", d.clone(), |x| 3.0 * x).with_lipschitz(3.0);
        assert!(g.validate_lipschitz(&grid, 1e-9).is_ok());
    }
}
