//! End-to-end tests against the compiled binary: exit codes, report
//! shapes, determinism, and the shipped fixture configs.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use korovkin_lab_cli::report::ReportFile;

fn klab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_klab")).args(args).output().expect("binary runs")
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../experiments").join(name)
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

const SMALL_RUN: &str = r#"
version = 1
family = "bkc1"
schedule = [2, 4, 8]
seed = 3

[harness]
grid = 9
hyp_grid = 5
"#;

#[test]
fn run_emits_sorted_csv_with_exact_columns() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "small.toml", SMALL_RUN);
    let out = klab(&["run", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));

    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.ends_with('\n'));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,function,sup_error,bound_value,verdict");
    // 4 interval test functions + 5 built-in probes, 3 orders each
    assert_eq!(lines.len() - 1, 9 * 3, "rows: {text}");

    let keys: Vec<(String, usize)> = lines[1..]
        .iter()
        .map(|l| {
            let cells: Vec<&str> = l.split(',').collect();
            assert_eq!(cells.len(), 5, "row: {l}");
            (cells[1].to_string(), cells[0].parse().unwrap())
        })
        .collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted, "rows must be sorted by (function, n)");
}

#[test]
fn identical_config_and_seed_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "small.toml", SMALL_RUN);
    let cfg_s = cfg.to_str().unwrap();

    let a = klab(&["run", "--config", cfg_s]);
    let b = klab(&["run", "--config", cfg_s]);
    let c = klab(&["run", "--config", cfg_s, "--jobs", "1"]);
    let d = klab(&["run", "--config", cfg_s, "--format", "json"]);
    let e = klab(&["run", "--config", cfg_s, "--format", "json", "--jobs", "2"]);
    for o in [&a, &b, &c, &d, &e] {
        assert!(o.status.success());
    }
    assert_eq!(a.stdout, b.stdout, "two identical runs must agree byte-for-byte");
    assert_eq!(a.stdout, c.stdout, "--jobs must not change the report");
    assert_eq!(d.stdout, e.stdout, "--jobs must not change the JSON report either");
}

#[test]
fn json_report_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "small.toml", SMALL_RUN);
    let out = klab(&["run", "--config", cfg.to_str().unwrap(), "--format", "json"]);
    assert!(out.status.success());

    let text = String::from_utf8(out.stdout).unwrap();
    let report: ReportFile = serde_json::from_str(&text).unwrap();
    assert_eq!(report.header.tool, "klab");
    assert_eq!(report.header.command, "run");
    assert_eq!(report.header.grid_per_axis, 9);
    assert_eq!(report.rows.len(), 27);
    assert_eq!(korovkin_lab_cli::report::to_json(&report), text, "render is stable");
    assert!(report.rows.iter().all(|r| r.sup_error.is_finite()));
}

#[test]
fn out_flag_writes_the_same_bytes_as_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "small.toml", SMALL_RUN);
    let out_path = dir.path().join("report.csv");
    let piped = klab(&["run", "--config", cfg.to_str().unwrap()]);
    let filed = klab(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(piped.status.success() && filed.status.success());
    assert!(filed.stdout.is_empty());
    assert_eq!(std::fs::read(&out_path).unwrap(), piped.stdout);
}

#[test]
fn validation_failures_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cases: Vec<(&str, &str, &str)> = vec![
        (
            "decreasing.toml",
            "version = 1\nfamily = \"bkc1\"\nschedule = [8, 4]\n",
            "schedule",
        ),
        (
            "unknown_key.toml",
            "version = 1\nfamily = \"bkc1\"\nschedule = [2, 4]\nshoe_size = 44\n",
            "shoe_size",
        ),
        (
            "bad_version.toml",
            "version = 3\nfamily = \"bkc1\"\nschedule = [2, 4]\n",
            "version",
        ),
        (
            "unknown_family.toml",
            "version = 1\nfamily = \"simpson\"\nschedule = [2, 4]\n",
            "unknown family",
        ),
        (
            "misdirected_knob.toml",
            "version = 1\nfamily = \"maxprod\"\nschedule = [2, 4]\n[quadrature]\nsubdivisions = 4\n",
            "does not apply",
        ),
        (
            "wrong_domain.toml",
            "version = 1\nfamily = \"bkc1\"\nschedule = [2, 4]\n[domain]\nkind = \"simplex\"\n",
            "lives on unit_interval",
        ),
    ];
    for (name, body, needle) in cases {
        let cfg = write_config(dir.path(), name, body);
        let out = klab(&["run", "--config", cfg.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(2), "{name} should fail validation");
        let stderr = String::from_utf8_lossy(&out.stderr);
        assert!(stderr.contains(needle), "{name}: stderr was {stderr}");
    }

    let none = klab(&["run"]);
    assert_eq!(none.status.code(), Some(2), "--config is required");
}

#[test]
fn unwritable_out_path_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "small.toml", SMALL_RUN);
    let out = klab(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        "/nonexistent_dir_zz/report.csv",
    ]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn integrate_matches_the_closed_form() {
    let out = klab(&["integrate", "--config", fixture("integrate_sqrt.toml").to_str().unwrap()]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "function,value");
    let row = lines.next().unwrap();
    let value: f64 = row.strip_prefix("identity,").unwrap().parse().unwrap();
    assert!((value - 2.0 / 3.0).abs() < 1e-3, "value {value}");
}

#[test]
fn bounds_fixture_reports_every_row_bounded() {
    let out = klab(&["bounds", "--config", fixture("kantorovich_bounds.toml").to_str().unwrap()]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    // two axes x three orders
    assert_eq!(rows.len(), 6);
    assert!(rows.iter().all(|r| r.ends_with(",bounded")), "{text}");
}

#[test]
fn check_fixture_catches_the_expected_failures() {
    let out = klab(&[
        "check",
        "--config",
        fixture("durrmeyer_axioms.toml").to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report: ReportFile = serde_json::from_str(&String::from_utf8(out.stdout).unwrap()).unwrap();
    // six axioms, three orders
    assert_eq!(report.rows.len(), 18);
    for row in &report.rows {
        let expected = match row.function.as_str() {
            "translatable" | "comonotone_additive" => "expected_fail",
            _ => "expected_pass",
        };
        assert_eq!(row.verdict, expected, "axiom {} at n={}", row.function, row.n);
    }
}

#[test]
fn counterexample_fixture_shows_the_stall_and_exits_zero() {
    let out = klab(&[
        "run",
        "--config",
        fixture("truncated_counterexample.toml").to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report: ReportFile = serde_json::from_str(&String::from_utf8(out.stdout).unwrap()).unwrap();

    let ramp: Vec<_> = report.rows.iter().filter(|r| r.function == "centered_ramp").collect();
    assert_eq!(ramp.len(), 6);
    assert!(ramp.iter().all(|r| r.sup_error >= 0.2 && r.verdict == "stalled"), "{ramp:?}");

    // while every classical test function still converges
    for name in ["one", "e1", "e2"] {
        assert!(
            report
                .rows
                .iter()
                .filter(|r| r.function == name)
                .all(|r| r.verdict == "converging"),
            "{name} should converge"
        );
    }
}

#[test]
fn shipped_fixtures_run_to_completion() {
    let jobs: [(&str, &str); 4] = [
        ("run", "bkc1_interval.toml"),
        ("run", "maxprod_simplex.toml"),
        ("run", "gauss_window.toml"),
        ("check", "durrmeyer_axioms.toml"),
    ];
    for (cmd, name) in jobs {
        let out = klab(&[cmd, "--config", fixture(name).to_str().unwrap()]);
        assert!(
            out.status.success(),
            "{name}: exit {:?}, stderr: {}",
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        );
        let text = String::from_utf8(out.stdout).unwrap();
        assert_eq!(text.lines().next().unwrap(), "n,function,sup_error,bound_value,verdict");
        assert!(text.ends_with('\n'));
    }
}
