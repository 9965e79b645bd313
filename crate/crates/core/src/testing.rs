//! Proptest strategies for logs and constraint graphs.

use chrono::DateTime;
use proptest::collection::vec;
use proptest::prelude::*;

use crate::graph::{
    Comparator, ConstraintGraph, FlowEdge, FlowLabel, Formula, ObjEdge, ObjLabel, PerfEdge,
};
use crate::log::{AttrValue, Event, EventId, EventLog, Object, ObjectId};
use crate::metrics::MeasureKey;
use crate::time::Timestamp;

/// Activities drawn by [`arb_log`].
pub const ACTIVITIES: [&str; 4] = ["a", "b", "c", "d"];
/// Object types drawn by [`arb_log`].
pub const TYPES: [&str; 3] = ["T1", "T2", "T3"];

fn ts(secs: i64, nanos: u32) -> Timestamp {
    Timestamp::from_datetime(DateTime::from_timestamp(secs, nanos).expect("in range"))
}

/// Small logs over [`ACTIVITIES`] and [`TYPES`] with coarse timestamps,
/// so ties and repeated activities are common.
pub fn arb_log(max_events: usize, max_objects: usize) -> impl Strategy<Value = EventLog> {
    (0..=max_objects)
        .prop_flat_map(move |n_obj| {
            (
                vec(0..TYPES.len(), n_obj),
                vec(
                    (0..ACTIVITIES.len(), 0..12i64, vec(any::<bool>(), n_obj)),
                    0..=max_events,
                ),
            )
        })
        .prop_map(|(types, rows)| {
            let objects: Vec<Object> = types
                .iter()
                .enumerate()
                .map(|(i, &t)| Object::new(format!("o{i}"), TYPES[t]))
                .collect();
            let mut events = Vec::new();
            let mut relation: Vec<(EventId, ObjectId)> = Vec::new();
            for (i, (a, t, rel)) in rows.into_iter().enumerate() {
                let id = format!("e{i:02}");
                for (oi, r) in rel.into_iter().enumerate() {
                    if r {
                        relation.push((id.as_str().into(), objects[oi].id.clone()));
                    }
                }
                events.push(Event::new(
                    id,
                    ACTIVITIES[a],
                    ts(1_600_000_000 + t * 3600, 0),
                ));
            }
            EventLog::build(events, objects, relation).expect("generated log is valid")
        })
}

fn arb_name() -> impl Strategy<Value = String> {
    prop_oneof![
        "[a-z][a-z0-9 _-]{0,8}",
        "\\PC{1,10}",
        Just("quote \" and \\ back".to_string()),
        Just("line\nbreak\ttab".to_string()),
        Just("créer ✓ 注文".to_string()),
    ]
}

fn arb_attr() -> impl Strategy<Value = AttrValue> {
    prop_oneof![
        any::<bool>().prop_map(AttrValue::Bool),
        any::<f64>()
            .prop_filter("finite", |v| v.is_finite())
            .prop_map(AttrValue::Num),
        (-5_000_000_000i64..5_000_000_000, 0..1_000_000_000u32)
            .prop_map(|(s, n)| AttrValue::Time(ts(s, n))),
        "\\PC{0,12}"
            .prop_filter("must not read as a timestamp", |s| {
                chrono::DateTime::parse_from_rfc3339(s).is_err()
            })
            .prop_map(AttrValue::Str),
    ]
}

fn arb_attrs() -> impl Strategy<Value = Vec<(String, AttrValue)>> {
    vec(("\\PC{1,6}", arb_attr()), 0..3)
}

/// Logs with arbitrary unicode identifiers, sub-second timestamps and
/// attributes, for serialization round trips.
pub fn arb_rich_log(max_events: usize, max_objects: usize) -> impl Strategy<Value = EventLog> {
    (0..=max_objects)
        .prop_flat_map(move |n_obj| {
            (
                vec((arb_name(), arb_name(), arb_attrs()), n_obj),
                vec(
                    (
                        arb_name(),
                        arb_name(),
                        (-2_000_000_000i64..4_000_000_000, 0..1_000_000_000u32),
                        arb_attrs(),
                        vec(any::<bool>(), n_obj),
                    ),
                    0..=max_events,
                ),
            )
        })
        .prop_map(|(objs, evs)| {
            let mut seen = std::collections::HashSet::new();
            let objects: Vec<Object> = objs
                .into_iter()
                .filter(|(id, _, _)| seen.insert(id.clone()))
                .map(|(id, ty, attrs)| {
                    attrs
                        .into_iter()
                        .fold(Object::new(id, ty), |o, (k, v)| o.with_attr(k, v))
                })
                .collect();
            let mut seen = std::collections::HashSet::new();
            let mut events = Vec::new();
            let mut relation: Vec<(EventId, ObjectId)> = Vec::new();
            for (id, act, (s, n), attrs, rel) in evs {
                if !seen.insert(id.clone()) {
                    continue;
                }
                for (o, r) in objects.iter().zip(rel) {
                    if r {
                        relation.push((id.as_str().into(), o.id.clone()));
                    }
                }
                let e = attrs
                    .into_iter()
                    .fold(Event::new(id, act, ts(s, n)), |e, (k, v)| e.with_attr(k, v));
                events.push(e);
            }
            EventLog::build(events, objects, relation).expect("generated log is valid")
        })
}

fn arb_threshold() -> impl Strategy<Value = f64> {
    prop_oneof![
        prop::sample::select(vec![0.0, 0.25, 0.5, 0.75, 1.0]),
        0.0..=1.0f64,
    ]
}

fn arb_comparator() -> impl Strategy<Value = Comparator> {
    prop::sample::select(Comparator::ALL.to_vec())
}

fn arb_measure(types: Vec<String>) -> impl Strategy<Value = MeasureKey> {
    prop_oneof![
        prop::sample::select(types).prop_map(|t| MeasureKey::AvgObjectCount(t.into())),
        Just(MeasureKey::AvgSojournTime),
        Just(MeasureKey::EventCount),
    ]
}

/// Formulas of bounded depth over the registry measures.
pub fn arb_formula(
    types: Vec<String>,
    literal: BoxedStrategy<f64>,
) -> impl Strategy<Value = Formula> {
    let leaf = (arb_measure(types), arb_comparator(), literal)
        .prop_map(|(m, op, v)| Formula::compare(m, op, v));
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(l, r)| l.and(r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| l.or(r)),
            inner.prop_map(Formula::not),
        ]
    })
}

/// Valid graphs over the given vocabulary; at least one edge, no two
/// edges over the same endpoints.
pub fn arb_graph_over(
    activities: Vec<String>,
    types: Vec<String>,
    literal: BoxedStrategy<f64>,
) -> impl Strategy<Value = ConstraintGraph> {
    let act = prop::sample::select(activities);
    let ty = prop::sample::select(types.clone());
    let flow = (
        prop::sample::select(FlowLabel::ALL.to_vec()),
        act.clone(),
        act.clone(),
        ty.clone(),
        arb_threshold(),
    )
        .prop_map(|(label, a, b, t, th)| match label {
            FlowLabel::Skip => FlowEdge::skip(a, t, th),
            l => FlowEdge::new(l, a, b, t, th),
        });
    let obj = (
        ty,
        prop::sample::select(ObjLabel::ALL.to_vec()),
        act.clone(),
        arb_threshold(),
    )
        .prop_map(|(t, l, a, th)| ObjEdge::new(t, l, a, th));
    let perf = (act, arb_formula(types, literal)).prop_map(|(a, f)| PerfEdge::new(a, f));
    (
        "[a-z][a-z0-9-]{0,10}",
        vec(flow, 0..4),
        vec(obj, 0..4),
        vec(perf, 0..3),
    )
        .prop_filter("needs an edge", |(_, f, o, p)| {
            f.len() + o.len() + p.len() > 0
        })
        .prop_map(|(name, flows, objs, perfs)| {
            let mut g = ConstraintGraph::new(name);
            let mut keys = std::collections::HashSet::new();
            for e in flows {
                if keys.insert((e.source.clone(), e.otype.clone(), e.target.clone())) {
                    g.flow_edges.push(e);
                }
            }
            let mut keys = std::collections::HashSet::new();
            for e in objs {
                if keys.insert((e.otype.clone(), e.activity.clone())) {
                    g.obj_edges.push(e);
                }
            }
            g.perf_edges = perfs;
            g
        })
}

/// Graphs over [`ACTIVITIES`] and [`TYPES`] plus names missing from every
/// generated log, so vacuous edges occur.
pub fn arb_graph() -> impl Strategy<Value = ConstraintGraph> {
    let mut acts: Vec<String> = ACTIVITIES.iter().map(|s| s.to_string()).collect();
    acts.push("zz".into());
    let mut types: Vec<String> = TYPES.iter().map(|s| s.to_string()).collect();
    types.push("Ghost".into());
    let literal = prop_oneof![
        prop::sample::select(vec![0.0, 0.5, 1.0, 2.0, 3.0, 3600.0, 7200.0]),
        -10.0..20_000.0f64,
    ]
    .boxed();
    arb_graph_over(acts, types, literal)
}

/// Graphs with arbitrary names and any finite literal, for text round trips.
pub fn arb_rich_graph() -> impl Strategy<Value = ConstraintGraph> {
    (vec(arb_name(), 1..5), vec(arb_name(), 1..4), arb_name()).prop_flat_map(
        |(acts, types, name)| {
            let literal = any::<f64>()
                .prop_filter("finite", |v| v.is_finite())
                .boxed();
            arb_graph_over(acts, types, literal).prop_map(move |mut g| {
                g.name = name.clone();
                g
            })
        },
    )
}
