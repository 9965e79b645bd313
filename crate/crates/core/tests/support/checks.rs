//! Check bodies shared by the property, oracle and acceptance suites.
#![allow(dead_code)]

use occg_core::engine::{evaluate_flow_edge, evaluate_obj_edge};
use occg_core::metrics::{self, enabling_time, perf};
use occg_core::testing::{ACTIVITIES, TYPES};
use occg_core::{monitor, Cardinality, ConstraintGraph, EventLog, LogStats, MeasureKey};
use proptest::prelude::*;

use super::oracle::Oracle;

const TOL: f64 = 1e-12;

fn types_with_ghost() -> Vec<&'static str> {
    TYPES.iter().copied().chain(["Ghost"]).collect()
}

fn acts_with_ghost() -> Vec<&'static str> {
    ACTIVITIES.iter().copied().chain(["zz"]).collect()
}

fn in_unit(v: f64) -> bool {
    (0.0..=1.0).contains(&v)
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= TOL
}

/// Edges of `cg` split into two graphs, either of which may be edgeless.
fn split(cg: &ConstraintGraph) -> (ConstraintGraph, ConstraintGraph) {
    let mut a = ConstraintGraph::new(cg.name.clone());
    let mut b = ConstraintGraph::new(cg.name.clone());
    for (i, e) in cg.flow_edges.iter().enumerate() {
        if i % 2 == 0 {
            a.flow_edges.push(e.clone())
        } else {
            b.flow_edges.push(e.clone())
        }
    }
    for (i, e) in cg.obj_edges.iter().enumerate() {
        if i % 2 == 1 {
            a.obj_edges.push(e.clone())
        } else {
            b.obj_edges.push(e.clone())
        }
    }
    for (i, e) in cg.perf_edges.iter().enumerate() {
        if i % 2 == 0 {
            a.perf_edges.push(e.clone())
        } else {
            b.perf_edges.push(e.clone())
        }
    }
    (a, b)
}

/// `from` followed by increasing thresholds above it.
fn raised_thresholds(from: f64) -> Vec<f64> {
    let mut ts = vec![from];
    ts.extend(
        [0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0]
            .into_iter()
            .filter(|t| *t > from),
    );
    ts
}

fn violated_or_vacuous(log: &EventLog, cg: &ConstraintGraph) -> bool {
    cg.edge_count() == 0 || monitor(log, cg).unwrap().violated
}

/// Metric ranges, symmetries, count bounds, threshold monotonicity and the
/// conjunction law.
pub fn properties(log: &EventLog, cg: &ConstraintGraph) -> Result<(), TestCaseError> {
    let s = LogStats::new(log);
    for ot in types_with_ghost() {
        for a in acts_with_ghost() {
            for b in acts_with_ghost() {
                let (c, k, h) = (
                    metrics::causal(&s, ot, a, b),
                    metrics::concur(&s, ot, a, b),
                    metrics::choice(&s, ot, a, b),
                );
                prop_assert!(
                    in_unit(c) && in_unit(k) && in_unit(h),
                    "{ot} {a} {b}: {c} {k} {h}"
                );
                prop_assert_eq!(k, metrics::concur(&s, ot, b, a));
                prop_assert_eq!(h, metrics::choice(&s, ot, b, a));
                prop_assert!(s.count_followed_by(ot, a, b) <= s.count_containing(ot, [a, b]));
            }
            if let Ok(v) = metrics::skip_strength(&s, ot, a) {
                prop_assert!(in_unit(v));
            }
            if let (Ok(x), Ok(y), Ok(z)) = (
                metrics::absent(&s, ot, a),
                metrics::singular(&s, ot, a),
                metrics::multiple(&s, ot, a),
            ) {
                prop_assert!(in_unit(x) && in_unit(y) && in_unit(z));
                prop_assert!(close(x + y + z, 1.0), "{ot} {a}: {x}+{y}+{z}");
            }
        }
    }

    for e in &cg.flow_edges {
        let mut prev = true;
        for t in raised_thresholds(e.threshold) {
            let mut e2 = e.clone();
            e2.threshold = t;
            let holds = evaluate_flow_edge(&s, &e2).0.holds;
            prop_assert!(prev || !holds, "{e} flipped to true at {t}");
            prev = holds;
        }
    }
    for e in &cg.obj_edges {
        let mut prev = true;
        for t in raised_thresholds(e.threshold) {
            let mut e2 = e.clone();
            e2.threshold = t;
            let holds = evaluate_obj_edge(&s, &e2).0.holds;
            prop_assert!(prev || !holds, "{e} flipped to true at {t}");
            prev = holds;
        }
    }

    let whole = monitor(log, cg).unwrap();
    let (a, b) = split(cg);
    prop_assert_eq!(
        whole.violated,
        violated_or_vacuous(log, &a) && violated_or_vacuous(log, &b)
    );
    prop_assert_eq!(whole.clone(), monitor(log, cg).unwrap());
    let vacuous = whole
        .edge_verdicts
        .iter()
        .filter(|v| !v.vocabulary_present)
        .count();
    let vacuity_warnings = whole
        .warnings
        .iter()
        .filter(|w| w.contains("holds vacuously"))
        .count();
    prop_assert_eq!(vacuous, vacuity_warnings);
    Ok(())
}

fn same_opt(a: Option<f64>, b: Option<f64>) -> bool {
    match (a, b) {
        (Some(x), Some(y)) => close(x, y),
        (None, None) => true,
        _ => false,
    }
}

/// Every characteristic, metric, enabling time and verdict matches the
/// brute-force reference.
pub fn oracle_agrees(log: &EventLog, cg: &ConstraintGraph) -> Result<(), TestCaseError> {
    let o = Oracle::new(log);
    let s = LogStats::new(log);

    prop_assert_eq!(
        log.acts()
            .into_iter()
            .map(|a| a.to_string())
            .collect::<std::collections::BTreeSet<_>>(),
        o.acts()
    );
    prop_assert_eq!(
        log.types()
            .into_iter()
            .map(|t| t.to_string())
            .collect::<std::collections::BTreeSet<_>>(),
        o.types()
    );
    for obj in log.objects() {
        let t: Vec<String> = log
            .trace(obj.id.as_str())
            .unwrap()
            .into_iter()
            .map(|a| a.to_string())
            .collect();
        prop_assert_eq!(t, o.trace(obj.id.as_str()));
    }

    for ot in types_with_ghost() {
        for a in acts_with_ghost() {
            prop_assert_eq!(s.count_containing(ot, [a]), o.containing(ot, &[a]));
            for (k, class) in [
                (0, Cardinality::Zero),
                (1, Cardinality::One),
                (2, Cardinality::Many),
            ] {
                prop_assert_eq!(s.count_cardinality(ot, a, class), o.cardinality(ot, a, k));
            }
            prop_assert!(same_opt(
                metrics::skip_strength(&s, ot, a).ok(),
                o.skip(ot, a)
            ));
            prop_assert!(same_opt(
                metrics::absent(&s, ot, a).ok(),
                o.involvement(ot, a, 0)
            ));
            prop_assert!(same_opt(
                metrics::singular(&s, ot, a).ok(),
                o.involvement(ot, a, 1)
            ));
            prop_assert!(same_opt(
                metrics::multiple(&s, ot, a).ok(),
                o.involvement(ot, a, 2)
            ));
            for b in acts_with_ghost() {
                prop_assert_eq!(s.count_containing(ot, [a, b]), o.containing(ot, &[a, b]));
                prop_assert_eq!(
                    s.count_followed_by(ot, a, b),
                    o.follows(ot, a, b),
                    "{} {} {}",
                    ot,
                    a,
                    b
                );
                prop_assert!(close(metrics::causal(&s, ot, a, b), o.causal(ot, a, b)));
                prop_assert!(close(metrics::concur(&s, ot, a, b), o.concur(ot, a, b)));
                prop_assert!(close(metrics::choice(&s, ot, a, b), o.choice(ot, a, b)));
            }
        }
    }

    for e in log.events() {
        let lib = enabling_time(log, e.id.as_str()).unwrap().map(|t| {
            let dt = t.as_datetime();
            (dt.timestamp(), dt.timestamp_subsec_nanos())
        });
        prop_assert_eq!(lib, o.enabling(e.id.as_str()));
    }
    let mut measures = vec![MeasureKey::AvgSojournTime, MeasureKey::EventCount];
    measures.extend(
        types_with_ghost()
            .into_iter()
            .map(|t| MeasureKey::AvgObjectCount(t.into())),
    );
    for a in acts_with_ghost() {
        for m in &measures {
            prop_assert!(same_opt(perf(&s, a, m).ok(), o.perf(a, m)), "{} {}", a, m);
        }
    }

    let v = monitor(log, cg).unwrap();
    let (holds, violated) = o.monitor(cg);
    prop_assert_eq!(
        v.edge_verdicts.iter().map(|e| e.holds).collect::<Vec<_>>(),
        holds
    );
    prop_assert_eq!(v.violated, violated);
    Ok(())
}
