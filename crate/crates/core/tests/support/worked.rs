//! Worked values on the three-event order log.
#![allow(dead_code)]

use std::collections::BTreeSet;

use occg_core::metrics::{self, perf};
use occg_core::{example_order_log, Cardinality, LogStats, MeasureKey};

pub const TOLERANCE: f64 = 1e-9;

/// Checks every worked value, returning one message per mismatch.
pub fn mismatches() -> Vec<String> {
    let log = example_order_log();
    let s = LogStats::new(&log);
    let mut bad = Vec::new();

    let acts: BTreeSet<&str> = log.acts().into_iter().map(|a| a.as_str()).collect();
    if acts != BTreeSet::from(["po", "ec", "co"]) {
        bad.push(format!("acts = {acts:?}"));
    }
    let types: BTreeSet<&str> = log.types().into_iter().map(|t| t.as_str()).collect();
    if types != BTreeSet::from(["Order", "Item"]) {
        bad.push(format!("types = {types:?}"));
    }
    let traces: BTreeSet<(String, Vec<String>)> = log
        .objects()
        .iter()
        .map(|o| {
            let t = log.trace(o.id.as_str()).unwrap();
            (
                o.otype.to_string(),
                t.into_iter().map(|a| a.to_string()).collect(),
            )
        })
        .collect();
    let expected: BTreeSet<(String, Vec<String>)> = [
        ("Order", vec!["po", "ec", "co"]),
        ("Item", vec!["po", "co"]),
    ]
    .into_iter()
    .map(|(t, v)| (t.to_string(), v.into_iter().map(String::from).collect()))
    .collect();
    if traces != expected {
        bad.push(format!("trace sets = {traces:?}"));
    }

    use Cardinality::*;
    let r = |x: Result<f64, occg_core::MetricError>| x.unwrap_or(f64::NAN);
    let values: Vec<(&str, f64, f64)> = vec![
        (
            "#(Order,{po})",
            s.count_containing("Order", ["po"]) as f64,
            1.0,
        ),
        (
            "#(Item,{po})",
            s.count_containing("Item", ["po"]) as f64,
            3.0,
        ),
        (
            "#(Item,{po,ec})",
            s.count_containing("Item", ["po", "ec"]) as f64,
            0.0,
        ),
        (
            "#(Order,po,ec)",
            s.count_followed_by("Order", "po", "ec") as f64,
            1.0,
        ),
        (
            "#0(Order,ec)",
            s.count_cardinality("Order", "ec", Zero) as f64,
            0.0,
        ),
        (
            "#0(Item,ec)",
            s.count_cardinality("Item", "ec", Zero) as f64,
            1.0,
        ),
        (
            "#1(Order,po)",
            s.count_cardinality("Order", "po", One) as f64,
            1.0,
        ),
        (
            "#1(Item,po)",
            s.count_cardinality("Item", "po", One) as f64,
            0.0,
        ),
        (
            "#*(Order,po)",
            s.count_cardinality("Order", "po", Many) as f64,
            0.0,
        ),
        (
            "#*(Item,po)",
            s.count_cardinality("Item", "po", Many) as f64,
            1.0,
        ),
        (
            "causal(Order,po,co)",
            metrics::causal(&s, "Order", "po", "co"),
            1.0,
        ),
        (
            "concur(Order,po,co)",
            metrics::concur(&s, "Order", "po", "co"),
            0.0,
        ),
        (
            "choice(Order,po,co)",
            metrics::choice(&s, "Order", "po", "co"),
            0.0,
        ),
        ("absent(Item,ec)", r(metrics::absent(&s, "Item", "ec")), 1.0),
        (
            "singular(Order,po)",
            r(metrics::singular(&s, "Order", "po")),
            1.0,
        ),
        (
            "multiple(Item,po)",
            r(metrics::multiple(&s, "Item", "po")),
            1.0,
        ),
        (
            "perf(po,avg_object_count(Item))",
            r(perf(&s, "po", &MeasureKey::AvgObjectCount("Item".into()))),
            3.0,
        ),
        (
            "perf(co,avg_sojourn_time)",
            r(perf(&s, "co", &MeasureKey::AvgSojournTime)),
            7200.0,
        ),
    ];
    for (name, got, want) in values {
        let close = (got - want).abs() <= TOLERANCE;
        if !close {
            bad.push(format!("{name} = {got}, expected {want}"));
        }
    }
    bad
}
