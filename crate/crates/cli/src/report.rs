//! The report model every subcommand emits: a header echoing the job and a
//! flat row table. CSV carries the rows only; JSON mirrors the whole
//! structure and round-trips.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::OutputFormat;
use crate::{CliError, CliResult};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ReportFile {
    pub header: ReportHeader,
    pub rows: Vec<ReportRow>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ReportHeader {
    pub tool: String,
    pub tool_version: String,
    pub command: String,
    /// Evaluation grid resolution actually used (points per axis).
    pub grid_per_axis: usize,
    pub seed: u64,
    /// Echo of the parsed config, so a report is self-describing.
    pub config: serde_json::Value,
}

impl ReportHeader {
    pub fn new(command: &str, grid_per_axis: usize, seed: u64, config: serde_json::Value) -> Self {
        ReportHeader {
            tool: "klab".into(),
            tool_version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            grid_per_axis,
            seed,
            config,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ReportRow {
    pub n: usize,
    pub function: String,
    pub sup_error: f64,
    pub bound_value: Option<f64>,
    pub verdict: String,
}

/// Output order is part of the contract: by function name, then order —
/// independent of how the rows were produced.
pub fn sort_rows(rows: &mut [ReportRow]) {
    rows.sort_by(|a, b| a.function.cmp(&b.function).then(a.n.cmp(&b.n)));
}

/// Shortest round-trip float formatting; deterministic for identical bits.
fn fmt_float(v: f64) -> String {
    format!("{v}")
}

pub fn to_csv(report: &ReportFile) -> String {
    let mut out = String::from("n,function,sup_error,bound_value,verdict\n");
    for r in &report.rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.n,
            r.function,
            fmt_float(r.sup_error),
            r.bound_value.map(fmt_float).unwrap_or_default(),
            r.verdict
        ));
    }
    out
}

pub fn to_json(report: &ReportFile) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

pub fn render(report: &ReportFile, format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => to_csv(report),
        OutputFormat::Json => to_json(report),
    }
}

/// Writes to the path, or stdout when none is given.
pub fn emit(text: &str, out: Option<&Path>) -> CliResult<()> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Io(format!("writing {}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(format!("writing stdout: {e}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ReportFile {
        ReportFile {
            header: ReportHeader::new("run", 11, 7, serde_json::json!({"family": "x"})),
            rows: vec![
                ReportRow {
                    n: 8,
                    function: "e1".into(),
                    sup_error: 0.125,
                    bound_value: None,
                    verdict: "converging".into(),
                },
                ReportRow {
                    n: 4,
                    function: "e1".into(),
                    sup_error: 0.25,
                    bound_value: Some(0.5),
                    verdict: "converging".into(),
                },
            ],
        }
    }

    #[test]
    fn csv_has_exact_columns_and_trailing_newline() {
        let mut r = sample();
        sort_rows(&mut r.rows);
        let csv = to_csv(&r);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "n,function,sup_error,bound_value,verdict");
        assert_eq!(lines.next().unwrap(), "4,e1,0.25,0.5,converging");
        assert_eq!(lines.next().unwrap(), "8,e1,0.125,,converging");
        assert!(csv.ends_with('\n'));
    }

    #[test]
    fn json_round_trips() {
        let r = sample();
        let text = to_json(&r);
        let back: ReportFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn sorting_is_function_then_order() {
        let mut r = sample();
        r.rows.push(ReportRow {
            n: 2,
            function: "a".into(),
            sup_error: 1.0,
            bound_value: None,
            verdict: "stalled".into(),
        });
        sort_rows(&mut r.rows);
        let names: Vec<(usize, &str)> =
            r.rows.iter().map(|row| (row.n, row.function.as_str())).collect();
        assert_eq!(names, vec![(2, "a"), (4, "e1"), (8, "e1")]);
    }
}
