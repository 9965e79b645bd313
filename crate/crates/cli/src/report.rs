//! Monitoring reports: a violation table and a JSON document.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use occg_core::{EdgeVerdict, Verdict};
use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct ConstraintReport<'a> {
    pub name: &'a str,
    pub violated: bool,
    pub warnings: &'a [String],
    pub edges: Vec<EdgeReport<'a>>,
}

#[derive(Debug, Serialize)]
pub struct EdgeReport<'a> {
    pub kind: &'static str,
    pub description: &'a str,
    pub vocabulary_present: bool,
    pub metric: MetricReport,
    pub threshold: Option<f64>,
    pub holds: bool,
}

#[derive(Debug, Serialize)]
pub struct MetricReport {
    pub name: &'static str,
    pub value: Option<f64>,
    pub measures: BTreeMap<String, Option<f64>>,
}

fn edge(v: &EdgeVerdict) -> EdgeReport<'_> {
    EdgeReport {
        kind: v.kind.as_str(),
        description: &v.description,
        vocabulary_present: v.vocabulary_present,
        metric: MetricReport {
            name: v.metric_name,
            value: v.metric_value,
            measures: v
                .measures
                .iter()
                .map(|(k, val)| (k.to_string(), *val))
                .collect(),
        },
        threshold: v.threshold,
        holds: v.holds,
    }
}

pub fn constraint_reports(verdicts: &[Verdict]) -> Vec<ConstraintReport<'_>> {
    verdicts
        .iter()
        .map(|v| ConstraintReport {
            name: &v.name,
            violated: v.violated,
            warnings: &v.warnings,
            edges: v.edge_verdicts.iter().map(edge).collect(),
        })
        .collect()
}

/// Pretty JSON array with one entry per constraint, in input order.
pub fn render_json(verdicts: &[Verdict]) -> String {
    let mut s =
        serde_json::to_string_pretty(&constraint_reports(verdicts)).expect("report serializes");
    s.push('\n');
    s
}

/// One row per constraint; `✓` marks a violation.
pub fn render_table(verdicts: &[Verdict], log_label: &str) -> String {
    let header = "Constraint";
    let width = verdicts
        .iter()
        .map(|v| v.name.chars().count())
        .chain([header.len()])
        .max()
        .unwrap_or(0);
    let col = log_label.chars().count().max(1);
    let mut out = String::new();
    let rule = format!("+-{}-+-{}-+\n", "-".repeat(width), "-".repeat(col));
    out.push_str(&rule);
    let _ = writeln!(out, "| {header:<width$} | {log_label:^col$} |");
    out.push_str(&rule);
    for v in verdicts {
        let mark = if v.violated { "✓" } else { "" };
        let _ = writeln!(out, "| {:<width$} | {mark:^col$} |", v.name);
    }
    out.push_str(&rule);
    out
}
