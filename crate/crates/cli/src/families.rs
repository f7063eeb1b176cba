//! Name → operator-family registry, plus the probe materializer. The
//! registry is the single place that knows which resolution knobs each
//! family accepts, so misdirected config keys fail loudly.

use std::f64::consts::TAU;

use korovkin_lab::domain::{AxisDependence, DomainKind, DomainSpec, ScalarField};
use korovkin_lab::operators::bernstein::TruncatedBernstein;
use korovkin_lab::operators::bkc::{BernsteinKantorovichChoquet1, BernsteinKantorovichChoquet2};
use korovkin_lab::operators::gauss::GaussWeierstrassChoquet;
use korovkin_lab::operators::maxprod::MaxProductBernstein;
use korovkin_lab::operators::possibilistic::{
    PossibilisticDurrmeyer, PossibilisticKantorovich, PossibilisticKantorovich1d,
};
use korovkin_lab::operators::OperatorFamily;

use crate::config::{ProbeKind, ProbeSpec, QuadKnobs};

use crate::{CliError, CliResult};

pub const FAMILY_NAMES: [&str; 8] = [
    "bernstein_kantorovich_choquet",
    "bernstein_kantorovich_choquet_2d",
    "possibilistic_durrmeyer",
    "possibilistic_kantorovich",
    "possibilistic_kantorovich_1d",
    "maxprod_bernstein",
    "gauss_weierstrass_choquet",
    "truncated_bernstein",
];

/// Accepts canonical names and a few short aliases.
pub fn canonical_name(name: &str) -> CliResult<&'static str> {
    let canon = match name {
        "bernstein_kantorovich_choquet" | "bkc1" => "bernstein_kantorovich_choquet",
        "bernstein_kantorovich_choquet_2d" | "bkc2" => "bernstein_kantorovich_choquet_2d",
        "possibilistic_durrmeyer" | "durrmeyer" => "possibilistic_durrmeyer",
        "possibilistic_kantorovich" | "kantorovich" => "possibilistic_kantorovich",
        "possibilistic_kantorovich_1d" | "kantorovich_1d" => "possibilistic_kantorovich_1d",
        "maxprod_bernstein" | "maxprod" => "maxprod_bernstein",
        "gauss_weierstrass_choquet" | "gauss_weierstrass" | "gauss" => "gauss_weierstrass_choquet",
        "truncated_bernstein" | "truncated" => "truncated_bernstein",
        other => {
            return Err(CliError::Validation(format!(
                "unknown family '{other}'; known: {}",
                FAMILY_NAMES.join(", ")
            )))
        }
    };
    Ok(canon)
}

/// Default convergence threshold: the Choquet-type families are expected
/// tight; the possibilistic / max-product ones get the looser calibration.
pub fn default_pass_tol(canonical: &str) -> f64 {
    match canonical {
        "bernstein_kantorovich_choquet"
        | "bernstein_kantorovich_choquet_2d"
        | "gauss_weierstrass_choquet" => 1e-2,
        _ => 5e-2,
    }
}

fn reject_knob(name: &str, set: bool, family: &str) -> CliResult<()> {
    if set {
        return Err(CliError::Validation(format!(
            "quadrature.{name} does not apply to family '{family}'"
        )));
    }
    Ok(())
}

/// Builds a family from its canonical name and resolution knobs. Every knob
/// that does not belong to the family must be unset.
pub fn build_family(name: &str, q: &QuadKnobs) -> CliResult<Box<dyn OperatorFamily>> {
    let canon = canonical_name(name)?;

    let guard = |applicable: &[&str]| -> CliResult<()> {
        let all: [(&str, bool); 6] = [
            ("cell_samples", q.cell_samples.is_some()),
            ("cell_axis_samples", q.cell_axis_samples.is_some()),
            ("subdivisions", q.subdivisions.is_some()),
            ("axis_samples", q.axis_samples.is_some()),
            ("line_samples", q.line_samples.is_some()),
            ("tail_tol", q.tail_tol.is_some()),
        ];
        for (knob, set) in all {
            if !applicable.contains(&knob) {
                reject_knob(knob, set, canon)?;
            }
        }
        Ok(())
    };

    let family: Box<dyn OperatorFamily> = match canon {
        "bernstein_kantorovich_choquet" => {
            guard(&["cell_samples"])?;
            let mut op = BernsteinKantorovichChoquet1::new();
            if let Some(m) = q.cell_samples {
                op = op.with_cell_samples(m);
            }
            Box::new(op)
        }
        "bernstein_kantorovich_choquet_2d" => {
            guard(&["cell_axis_samples"])?;
            let mut op = BernsteinKantorovichChoquet2::new();
            if let Some(m) = q.cell_axis_samples {
                op = op.with_cell_axis_samples(m);
            }
            Box::new(op)
        }
        "possibilistic_durrmeyer" => {
            guard(&["subdivisions"])?;
            let mut op = PossibilisticDurrmeyer::new();
            if let Some(s) = q.subdivisions {
                op = op.with_subdivisions(s);
            }
            Box::new(op)
        }
        "possibilistic_kantorovich" => {
            guard(&["subdivisions"])?;
            let mut op = PossibilisticKantorovich::new();
            if let Some(s) = q.subdivisions {
                op = op.with_subdivisions(s);
            }
            Box::new(op)
        }
        "possibilistic_kantorovich_1d" => {
            guard(&["subdivisions"])?;
            let mut op = PossibilisticKantorovich1d::new();
            if let Some(s) = q.subdivisions {
                op = op.with_subdivisions(s);
            }
            Box::new(op)
        }
        "maxprod_bernstein" => {
            guard(&[])?;
            Box::new(MaxProductBernstein::new())
        }
        "gauss_weierstrass_choquet" => {
            guard(&["axis_samples", "line_samples", "tail_tol"])?;
            let mut op = GaussWeierstrassChoquet::new();
            if let Some(s) = q.axis_samples {
                op = op.with_axis_samples(s);
            }
            if let Some(s) = q.line_samples {
                op = op.with_line_samples(s);
            }
            if let Some(t) = q.tail_tol {
                op = op.with_tail_tol(t)?;
            }
            Box::new(op)
        }
        "truncated_bernstein" => {
            guard(&[])?;
            Box::new(TruncatedBernstein::new())
        }
        _ => unreachable!("canonical_name covers all families"),
    };
    Ok(family)
}

pub fn domain_kind_label(kind: &DomainKind) -> &'static str {
    match kind {
        DomainKind::UnitInterval => "unit_interval",
        DomainKind::UnitSquare => "unit_square",
        DomainKind::Simplex => "simplex",
        DomainKind::Circle => "circle",
        DomainKind::PlaneWindow { .. } => "plane_window",
    }
}

/// Names land in CSV cells and coefficients in float kernels, so both are
/// vetted up front.
pub fn validate_probe_spec(spec: &ProbeSpec) -> CliResult<()> {
    if spec.name.is_empty() || spec.name.contains(',') || spec.name.contains('\n') {
        return Err(CliError::Validation(format!(
            "probe name {:?} must be nonempty and free of commas/newlines",
            spec.name
        )));
    }
    if spec.coefficients.is_empty() {
        return Err(CliError::Validation(format!(
            "probe '{}' needs at least one coefficient",
            spec.name
        )));
    }
    if spec.coefficients.iter().any(|c| !c.is_finite()) {
        return Err(CliError::Validation(format!(
            "probe '{}' has a non-finite coefficient",
            spec.name
        )));
    }
    Ok(())
}

/// The coefficient basis as a plain scalar function: polynomial by Horner,
/// or a cosine series at base frequency `omega`.
pub fn scalar_function(
    kind: ProbeKind,
    coefficients: &[f64],
    omega: f64,
) -> impl Fn(f64) -> f64 + Send + Sync + 'static {
    let coeffs = coefficients.to_vec();
    move |u: f64| match kind {
        ProbeKind::Polynomial => coeffs.iter().rev().fold(0.0, |acc, &c| acc * u + c),
        ProbeKind::Trig => {
            coeffs.iter().enumerate().map(|(k, &c)| c * (k as f64 * omega * u).cos()).sum()
        }
    }
}

/// Turns an inline coefficient spec into an evaluable field on the given
/// domain. Functions read the first coordinate only (and are tagged so on
/// planar domains, which unlocks the separable fast paths).
pub fn materialize_probe(spec: &ProbeSpec, domain: &DomainSpec) -> CliResult<ScalarField> {
    validate_probe_spec(spec)?;
    let omega = if domain.kind == DomainKind::Circle { 1.0 } else { TAU };
    let f = scalar_function(spec.kind, &spec.coefficients, omega);
    let field = ScalarField::new(spec.name.clone(), domain.clone(), move |p| f(p.component(0)));
    Ok(if domain.is_planar() { field.with_dependence(AxisDependence::OnlyX1) } else { field })
}

#[cfg(test)]
mod tests {
    use super::*;
    use korovkin_lab::domain::Point;

    #[test]
    fn aliases_resolve() {
        assert_eq!(canonical_name("bkc1").unwrap(), "bernstein_kantorovich_choquet");
        assert_eq!(canonical_name("gauss").unwrap(), "gauss_weierstrass_choquet");
        assert!(canonical_name("no_such_family").is_err());
    }

    #[test]
    fn misdirected_knob_is_rejected() {
        let q = QuadKnobs { subdivisions: Some(4), ..QuadKnobs::default() };
        match build_family("maxprod", &q) {
            Err(CliError::Validation(msg)) => assert!(msg.contains("subdivisions"), "{msg}"),
            Err(other) => panic!("wrong error class: {other}"),
            Ok(_) => panic!("misdirected knob was accepted"),
        }
    }

    #[test]
    fn polynomial_probe_evaluates_by_horner() {
        let spec = ProbeSpec {
            name: "quad".into(),
            kind: ProbeKind::Polynomial,
            coefficients: vec![1.0, -2.0, 3.0],
        };
        let f = materialize_probe(&spec, &DomainSpec::unit_interval()).unwrap();
        let v = f.eval(Point::Scalar(0.5));
        assert!((v - (1.0 - 1.0 + 0.75)).abs() < 1e-15);
    }

    #[test]
    fn probe_names_are_csv_safe() {
        let spec = ProbeSpec {
            name: "a,b".into(),
            kind: ProbeKind::Polynomial,
            coefficients: vec![1.0],
        };
        assert!(materialize_probe(&spec, &DomainSpec::unit_interval()).is_err());
    }
}
