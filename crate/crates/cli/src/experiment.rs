//! Drivers behind the subcommands. Each one validates its config, runs the
//! library, and produces a sorted [`ReportFile`] plus a list of verified
//! claims that failed (bound violations, profile mismatches). The caller
//! decides what failure means for the exit code; the report is written
//! either way so the evidence is never lost.

use korovkin_lab::capacity::{
    distorted_capacity, lebesgue, lebesgue_capacity, sqrt_lebesgue, Capacity, Distortion,
    MeasurableSet,
};
use korovkin_lab::choquet::{choquet_integral_1d, QuadratureConfig, Refinement};
use korovkin_lab::domain::{DomainKind, ScalarField};
use korovkin_lab::korovkin::{
    build_test_set, probe_set, run_harness, test_set_for, verify_rate_bound, FunctionTrace,
    HarnessOptions, RateBoundRow, TestSet,
};
use korovkin_lab::opalgebra::{axiom_matrix, AxiomCheckOptions, FunctionGenerator, GenFamily};

use crate::config::{
    check_schedule, check_version, BoundsConfig, CheckConfig, CorpusChoice, IntegrateConfig,
    ProbesSpec, RunConfig, TestsChoice,
};
use crate::families::{
    build_family, canonical_name, default_pass_tol, domain_kind_label, materialize_probe,
    scalar_function, validate_probe_spec,
};
use crate::report::{sort_rows, ReportFile, ReportHeader, ReportRow};
use crate::{CliError, CliResult};

/// A finished job: the report to emit, plus descriptions of every verified
/// claim that did not hold. An empty `failures` means exit 0.
pub struct JobOutcome {
    pub report: ReportFile,
    pub failures: Vec<String>,
}

fn config_echo<T: serde::Serialize>(cfg: &T) -> serde_json::Value {
    serde_json::to_value(cfg).expect("config serializes")
}

/// Reports must be replayable: a non-finite number in a row is a numerical
/// failure, not something to serialize as null.
fn check_rows_finite(rows: &[ReportRow]) -> CliResult<()> {
    for r in rows {
        let bound_bad = r.bound_value.is_some_and(|b| !b.is_finite());
        if !r.sup_error.is_finite() || bound_bad {
            return Err(CliError::Numerical(format!(
                "non-finite value in report row (n={}, function={})",
                r.n, r.function
            )));
        }
    }
    Ok(())
}

fn trace_rows(trace: &FunctionTrace, schedule: &[usize], bounds: Option<&[f64]>) -> Vec<ReportRow> {
    schedule
        .iter()
        .zip(&trace.errors)
        .enumerate()
        .map(|(i, (&n, &err))| ReportRow {
            n,
            function: trace.function.clone(),
            sup_error: err,
            bound_value: bounds.map(|b| b[i]),
            verdict: trace.verdict.to_string(),
        })
        .collect()
}

fn rate_rows(rows: &[RateBoundRow], slack: f64) -> Vec<ReportRow> {
    rows.iter()
        .map(|r| ReportRow {
            n: r.n,
            function: format!("abs_dev_pr{}", r.axis + 1),
            sup_error: r.lhs_at_worst,
            bound_value: Some(r.bound_at_worst),
            verdict: if r.worst_excess <= slack { "bounded".into() } else { "violated".into() },
        })
        .collect()
}

fn rate_failures(family: &str, rows: &[RateBoundRow], slack: f64) -> Vec<String> {
    rows.iter()
        .filter(|r| r.worst_excess > slack)
        .map(|r| {
            format!(
                "rate bound violated: family={family}, n={}, axis={}, x={}, excess={:.3e}",
                r.n,
                r.axis + 1,
                r.worst_point.map(|p| p.to_string()).unwrap_or_default(),
                r.worst_excess
            )
        })
        .collect()
}

pub fn run_experiment(
    cfg: &RunConfig,
    grid_override: Option<usize>,
    seed_override: Option<u64>,
) -> CliResult<JobOutcome> {
    check_version(cfg.version)?;
    check_schedule(&cfg.schedule)?;
    let canon = canonical_name(&cfg.family)?;
    let family = build_family(&cfg.family, &cfg.quadrature)?;
    let domain = family.domain();

    if let Some(expect) = &cfg.domain {
        let actual = domain_kind_label(&domain.kind);
        if expect.kind != actual {
            return Err(CliError::Validation(format!(
                "family '{canon}' lives on {actual}, config pinned {}",
                expect.kind
            )));
        }
        if let Some(hw) = expect.half_width {
            match domain.kind {
                DomainKind::PlaneWindow { half_width } if half_width == hw => {}
                DomainKind::PlaneWindow { half_width } => {
                    return Err(CliError::Validation(format!(
                        "window half_width is {half_width}, config pinned {hw}"
                    )))
                }
                _ => {
                    return Err(CliError::Validation(
                        "half_width only applies to plane_window domains".into(),
                    ))
                }
            }
        }
    }

    let tests: TestSet = match cfg.tests {
        TestsChoice::Auto => test_set_for(family.as_ref()),
        TestsChoice::Euclidean => {
            if domain.kind == DomainKind::Circle {
                return Err(CliError::Validation(
                    "tests = \"euclidean\" needs a euclidean domain; this family lives on the circle"
                        .into(),
                ));
            }
            build_test_set(domain)
        }
        TestsChoice::CircleTrig => {
            if domain.kind != DomainKind::Circle {
                return Err(CliError::Validation(format!(
                    "tests = \"circle_trig\" needs the circle; family '{canon}' lives on {}",
                    domain_kind_label(&domain.kind)
                )));
            }
            build_test_set(domain)
        }
        TestsChoice::Nonnegative => build_test_set(domain).nonnegative_subset(domain),
    };

    let probes: Vec<ScalarField> = match &cfg.probes {
        ProbesSpec::Corpus(CorpusChoice::Builtin) => probe_set(domain),
        ProbesSpec::Corpus(CorpusChoice::None) => Vec::new(),
        ProbesSpec::Inline(specs) => specs
            .iter()
            .map(|s| materialize_probe(s, domain))
            .collect::<CliResult<Vec<_>>>()?,
    };

    // every row is keyed by (function, n): duplicate names would collide
    let mut names: Vec<&str> =
        tests.functions.iter().chain(probes.iter()).map(|f| f.name()).collect();
    names.sort_unstable();
    if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
        return Err(CliError::Validation(format!("duplicate function name '{}'", w[0])));
    }

    let pass_tol = cfg.harness.pass_tol.unwrap_or_else(|| default_pass_tol(canon));
    let grid = grid_override.or(cfg.harness.grid).unwrap_or(0);
    let opts = HarnessOptions::new(&cfg.schedule, pass_tol)
        .with_grid(grid)
        .with_hyp_grid(cfg.harness.hyp_grid.unwrap_or(21));

    let harness = run_harness(family.as_ref(), &tests, &probes, &opts)?;

    let mut rows = Vec::new();
    for trace in harness.tests.iter().chain(&harness.probes) {
        rows.extend(trace_rows(trace, &cfg.schedule, harness.bounds.as_deref()));
    }

    let mut failures = Vec::new();
    if let Some(bounds) = &cfg.bounds {
        if let Some(name) = &bounds.name {
            if canonical_name(name)? != canon {
                return Err(CliError::Validation(format!(
                    "bounds.name '{name}' does not match family '{canon}'; the bound \
                     registry is keyed by family"
                )));
            }
        }
        let slack = bounds.slack.unwrap_or(1e-6);
        if !(slack.is_finite() && slack >= 0.0) {
            return Err(CliError::Validation(format!("bounds.slack must be >= 0 (got {slack})")));
        }
        let bgrid = bounds.grid.unwrap_or(21);
        let (brows, _) = verify_rate_bound(family.as_ref(), &cfg.schedule, bgrid, slack)?;
        rows.extend(rate_rows(&brows, slack));
        failures.extend(rate_failures(canon, &brows, slack));
    }

    sort_rows(&mut rows);
    check_rows_finite(&rows)?;

    let mut effective = cfg.clone();
    if let Some(g) = grid_override {
        effective.harness.grid = Some(g);
    }
    let seed = seed_override.unwrap_or(cfg.seed);
    effective.seed = seed;

    Ok(JobOutcome {
        report: ReportFile {
            header: ReportHeader::new("run", harness.grid_per_axis, seed, config_echo(&effective)),
            rows,
        },
        failures,
    })
}

pub fn check_family(cfg: &CheckConfig, seed_override: Option<u64>) -> CliResult<JobOutcome> {
    check_version(cfg.version)?;
    check_schedule(&cfg.orders)?;
    if cfg.trials == 0 {
        return Err(CliError::Validation("trials must be at least 1".into()));
    }
    if !(cfg.tolerance.is_finite() && cfg.tolerance > 0.0) {
        return Err(CliError::Validation(format!("tolerance must be > 0 (got {})", cfg.tolerance)));
    }
    if cfg.points_per_axis == 0 {
        return Err(CliError::Validation("points_per_axis must be at least 1".into()));
    }
    if !(cfg.max_frequency.is_finite() && cfg.max_frequency > 0.0) {
        return Err(CliError::Validation(format!(
            "max_frequency must be > 0 (got {})",
            cfg.max_frequency
        )));
    }

    let canon = canonical_name(&cfg.family)?;
    let family = build_family(&cfg.family, &cfg.quadrature)?;
    let opts = AxiomCheckOptions {
        trials: cfg.trials,
        tolerance: cfg.tolerance,
        points_per_axis: cfg.points_per_axis,
    };
    let seed = seed_override.unwrap_or(cfg.seed);

    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for &n in &cfg.orders {
        let gen = FunctionGenerator::new(
            family.domain().clone(),
            GenFamily::Mixed { max_frequency: cfg.max_frequency },
            seed ^ (n as u64),
        );
        let matrix = axiom_matrix(family.as_ref(), n, &gen, &opts)?;
        for row in &matrix {
            let verdict = match (row.expected, row.report.passed()) {
                (true, true) => "expected_pass",
                (false, false) => "expected_fail",
                (true, false) => "unexpected_fail",
                (false, true) => "unexpected_pass",
            };
            rows.push(ReportRow {
                n,
                function: row.axiom.label().into(),
                sup_error: row.report.worst_violation,
                bound_value: Some(row.report.tolerance),
                verdict: verdict.into(),
            });
            if !row.consistent() {
                failures.push(format!(
                    "axiom profile mismatch: family={canon}, n={n}, axiom={}, {verdict}, \
                     worst violation {:.3e}{}",
                    row.axiom.label(),
                    row.report.worst_violation,
                    row.report
                        .witness
                        .as_deref()
                        .map(|w| format!(", witness: {w}"))
                        .unwrap_or_default()
                ));
            }
        }
    }

    sort_rows(&mut rows);
    check_rows_finite(&rows)?;

    let mut effective = cfg.clone();
    effective.seed = seed;
    Ok(JobOutcome {
        report: ReportFile {
            header: ReportHeader::new("check", cfg.points_per_axis, seed, config_echo(&effective)),
            rows,
        },
        failures,
    })
}

pub fn verify_bounds(cfg: &BoundsConfig, grid_override: Option<usize>) -> CliResult<JobOutcome> {
    check_version(cfg.version)?;
    check_schedule(&cfg.schedule)?;
    if !(cfg.slack.is_finite() && cfg.slack >= 0.0) {
        return Err(CliError::Validation(format!("slack must be >= 0 (got {})", cfg.slack)));
    }
    let canon = canonical_name(&cfg.family)?;
    let family = build_family(&cfg.family, &cfg.quadrature)?;
    let grid = grid_override.unwrap_or(cfg.grid);
    if grid < 2 {
        return Err(CliError::Validation(format!("grid must be at least 2 (got {grid})")));
    }

    let (brows, _) = verify_rate_bound(family.as_ref(), &cfg.schedule, grid, cfg.slack)?;
    let mut rows = rate_rows(&brows, cfg.slack);
    let failures = rate_failures(canon, &brows, cfg.slack);

    sort_rows(&mut rows);
    check_rows_finite(&rows)?;

    Ok(JobOutcome {
        report: ReportFile {
            header: ReportHeader::new("bounds", grid, cfg.seed, config_echo(cfg)),
            rows,
        },
        failures,
    })
}

/// One Choquet integral; returns (function name, value).
pub fn integrate(cfg: &IntegrateConfig) -> CliResult<(String, f64)> {
    check_version(cfg.version)?;
    let set = MeasurableSet::from_intervals(cfg.set.intervals.iter().copied())?;
    let total = lebesgue(&set);

    let capacity: Capacity = match cfg.capacity.kind.as_str() {
        "sqrt_lebesgue" => {
            if cfg.capacity.exponent.is_some() {
                return Err(CliError::Validation(
                    "capacity.exponent only applies to power_distortion".into(),
                ));
            }
            sqrt_lebesgue()
        }
        "lebesgue" => {
            if cfg.capacity.exponent.is_some() {
                return Err(CliError::Validation(
                    "capacity.exponent only applies to power_distortion".into(),
                ));
            }
            lebesgue_capacity(total)
        }
        "power_distortion" => {
            let alpha = cfg.capacity.exponent.ok_or_else(|| {
                CliError::Validation("power_distortion needs capacity.exponent".into())
            })?;
            let u = Distortion::power(alpha, total)?;
            distorted_capacity(&lebesgue_capacity(total), &u)?
        }
        other => {
            return Err(CliError::Validation(format!(
                "unknown capacity kind '{other}'; known: sqrt_lebesgue, lebesgue, power_distortion"
            )))
        }
    };

    let mut quad = QuadratureConfig::default();
    if let Some(m) = cfg.quadrature.domain_samples {
        quad.domain_samples = m;
    }
    if let Some(m) = cfg.quadrature.level_samples {
        quad.level_samples = m;
    }
    if let Some(m) = cfg.quadrature.max_domain_samples {
        quad.max_domain_samples = m;
    }
    if let Some(t) = cfg.quadrature.stability_tol {
        quad.stability_tol = t;
    }
    if let Some(r) = &cfg.quadrature.refinement {
        quad.refinement = match r.as_str() {
            "none" => Refinement::None,
            "double_until_stable" => Refinement::DoubleUntilStable,
            other => {
                return Err(CliError::Validation(format!(
                    "unknown refinement '{other}'; known: none, double_until_stable"
                )))
            }
        };
    }

    validate_probe_spec(&cfg.function)?;
    let f = scalar_function(cfg.function.kind, &cfg.function.coefficients, std::f64::consts::TAU);
    let value = choquet_integral_1d(f, &set, &capacity, &quad)?;
    if !value.is_finite() {
        return Err(CliError::Numerical(format!(
            "integral of '{}' came out non-finite",
            cfg.function.name
        )));
    }
    Ok((cfg.function.name.clone(), value))
}
