//! Violation semantics of constraint graphs.
//!
//! A graph is violated in a log iff every one of its edge conditions holds.
//! Edges whose activities or object type do not occur in the log hold
//! vacuously and leave a warning in the verdict.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{
    validate_graph, ConstraintGraph, Diagnostic, FlowEdge, FlowLabel, ObjEdge, ObjLabel, PerfEdge,
};
use crate::log::EventLog;
use crate::metrics::{self, MeasureKey, MetricError};
use crate::stats::LogStats;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("invalid constraint {name:?}: {}", .diagnostics.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    InvalidGraph {
        name: String,
        diagnostics: Vec<Diagnostic>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeKind {
    Flow,
    Obj,
    Perf,
}

impl EdgeKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            EdgeKind::Flow => "flow",
            EdgeKind::Obj => "obj",
            EdgeKind::Perf => "perf",
        }
    }
}

impl fmt::Display for EdgeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Outcome of one edge condition together with the evidence behind it.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeVerdict {
    pub kind: EdgeKind,
    /// Textual form of the edge, as it would appear in a constraint file.
    pub description: String,
    /// `causal`, `concur`, `choice`, `skip_strength`, `absent`, `singular`,
    /// `at_least_one`, `multiple` or `formula`.
    pub metric_name: &'static str,
    /// Absent for vacuous edges and for performance formulas.
    pub metric_value: Option<f64>,
    /// Absent for performance edges.
    pub threshold: Option<f64>,
    /// Measure values feeding a performance formula; `None` when undefined.
    pub measures: BTreeMap<MeasureKey, Option<f64>>,
    pub vocabulary_present: bool,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub name: String,
    pub violated: bool,
    pub edge_verdicts: Vec<EdgeVerdict>,
    pub warnings: Vec<String>,
}

fn vacuous(
    kind: EdgeKind,
    description: String,
    metric_name: &'static str,
    threshold: Option<f64>,
) -> EdgeVerdict {
    EdgeVerdict {
        kind,
        description,
        metric_name,
        metric_value: None,
        threshold,
        measures: BTreeMap::new(),
        vocabulary_present: false,
        holds: true,
    }
}

fn missing_vocabulary(stats: &LogStats<'_>, types: &[&str], activities: &[&str]) -> Vec<String> {
    let mut missing = Vec::new();
    for t in types {
        if !stats.has_type(t) {
            missing.push(format!("object type `{t}`"));
        }
    }
    for a in activities {
        if !stats.has_activity(a) && !missing.iter().any(|m| *m == format!("activity `{a}`")) {
            missing.push(format!("activity `{a}`"));
        }
    }
    missing
}

fn vacuity_warning(description: &str, missing: &[String]) -> String {
    format!(
        "edge `{description}` holds vacuously: {} not in the log",
        missing.join(", ")
    )
}

/// Evaluates a flow edge; returns the verdict and any warnings.
pub fn evaluate_flow_edge(stats: &LogStats<'_>, e: &FlowEdge) -> (EdgeVerdict, Vec<String>) {
    let description = e.to_string();
    let metric_name = match e.label {
        FlowLabel::Causal => "causal",
        FlowLabel::Concur => "concur",
        FlowLabel::Choice => "choice",
        FlowLabel::Skip => "skip_strength",
    };
    let (ot, a, b) = (e.otype.as_str(), e.source.as_str(), e.target.as_str());
    let missing = missing_vocabulary(stats, &[ot], &[a, b]);
    if !missing.is_empty() {
        let w = vacuity_warning(&description, &missing);
        return (
            vacuous(EdgeKind::Flow, description, metric_name, Some(e.threshold)),
            vec![w],
        );
    }
    let value = match e.label {
        FlowLabel::Causal => metrics::causal(stats, ot, a, b),
        FlowLabel::Concur => metrics::concur(stats, ot, a, b),
        FlowLabel::Choice => metrics::choice(stats, ot, a, b),
        FlowLabel::Skip => {
            metrics::skip_strength(stats, ot, a).expect("object type presence checked above")
        }
    };
    let verdict = EdgeVerdict {
        kind: EdgeKind::Flow,
        description,
        metric_name,
        metric_value: Some(value),
        threshold: Some(e.threshold),
        measures: BTreeMap::new(),
        vocabulary_present: true,
        holds: value > e.threshold,
    };
    (verdict, Vec::new())
}

/// Evaluates an object-involvement edge; returns the verdict and any warnings.
pub fn evaluate_obj_edge(stats: &LogStats<'_>, e: &ObjEdge) -> (EdgeVerdict, Vec<String>) {
    let description = e.to_string();
    let metric_name = match e.label {
        ObjLabel::Absent => "absent",
        ObjLabel::Singular => "singular",
        ObjLabel::AtLeastOne => "at_least_one",
        ObjLabel::Multiple => "multiple",
    };
    let (ot, a) = (e.otype.as_str(), e.activity.as_str());
    let missing = missing_vocabulary(stats, &[ot], &[a]);
    if !missing.is_empty() {
        let w = vacuity_warning(&description, &missing);
        return (
            vacuous(EdgeKind::Obj, description, metric_name, Some(e.threshold)),
            vec![w],
        );
    }
    let value = match e.label {
        ObjLabel::Absent => metrics::absent(stats, ot, a),
        ObjLabel::Singular => metrics::singular(stats, ot, a),
        ObjLabel::AtLeastOne => metrics::absent(stats, ot, a).map(|v| 1.0 - v),
        ObjLabel::Multiple => metrics::multiple(stats, ot, a),
    }
    .expect("activity presence checked above");
    let verdict = EdgeVerdict {
        kind: EdgeKind::Obj,
        description,
        metric_name,
        metric_value: Some(value),
        threshold: Some(e.threshold),
        measures: BTreeMap::new(),
        vocabulary_present: true,
        holds: value > e.threshold,
    };
    (verdict, Vec::new())
}

/// Evaluates a performance edge; returns the verdict and any warnings.
pub fn evaluate_perf_edge(stats: &LogStats<'_>, e: &PerfEdge) -> (EdgeVerdict, Vec<String>) {
    let description = e.to_string();
    let a = e.activity.as_str();
    let missing = missing_vocabulary(stats, &[], &[a]);
    if !missing.is_empty() {
        let w = vacuity_warning(&description, &missing);
        return (
            vacuous(EdgeKind::Perf, description, "formula", None),
            vec![w],
        );
    }
    let mut warnings = Vec::new();
    let mut measures = BTreeMap::new();
    for m in e.formula.measures() {
        let value = match metrics::perf(stats, a, m) {
            Ok(v) => Some(v),
            Err(MetricError::UndefinedMeasure { .. }) => {
                warnings.push(format!(
                    "edge `{description}`: measure {m} is undefined for `{a}`, comparisons on it are false"
                ));
                None
            }
            Err(other) => unreachable!("activity presence checked above: {other}"),
        };
        measures.insert(m.clone(), value);
    }
    let holds = e
        .formula
        .evaluate(&mut |m: &MeasureKey| measures.get(m).copied().flatten());
    let verdict = EdgeVerdict {
        kind: EdgeKind::Perf,
        description,
        metric_name: "formula",
        metric_value: None,
        threshold: None,
        measures,
        vocabulary_present: true,
        holds,
    };
    (verdict, warnings)
}

fn evaluate(stats: &LogStats<'_>, cg: &ConstraintGraph) -> Verdict {
    let mut edge_verdicts = Vec::with_capacity(cg.edge_count());
    let mut warnings = Vec::new();
    let mut push = |(v, w): (EdgeVerdict, Vec<String>)| {
        edge_verdicts.push(v);
        warnings.extend(w);
    };
    for e in &cg.flow_edges {
        push(evaluate_flow_edge(stats, e));
    }
    for e in &cg.obj_edges {
        push(evaluate_obj_edge(stats, e));
    }
    for e in &cg.perf_edges {
        push(evaluate_perf_edge(stats, e));
    }
    Verdict {
        name: cg.name.clone(),
        violated: edge_verdicts.iter().all(|v| v.holds),
        edge_verdicts,
        warnings,
    }
}

fn check(cg: &ConstraintGraph) -> Result<(), EngineError> {
    let diagnostics = validate_graph(cg);
    if diagnostics.is_empty() {
        Ok(())
    } else {
        Err(EngineError::InvalidGraph {
            name: cg.name.clone(),
            diagnostics,
        })
    }
}

/// Decides whether `cg` is violated in `log`.
pub fn monitor(log: &EventLog, cg: &ConstraintGraph) -> Result<Verdict, EngineError> {
    check(cg)?;
    Ok(evaluate(&LogStats::new(log), cg))
}

/// [`monitor`] over several graphs, evaluated in parallel; verdicts keep
/// the input order.
pub fn monitor_all(
    log: &EventLog,
    graphs: &[ConstraintGraph],
) -> Result<Vec<Verdict>, EngineError> {
    graphs.iter().try_for_each(check)?;
    let stats = LogStats::new(log);
    Ok(graphs.par_iter().map(|cg| evaluate(&stats, cg)).collect())
}
