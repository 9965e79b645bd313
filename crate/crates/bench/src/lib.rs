//! Synthetic workloads for the benchmarks.

use occg_core::{
    Comparator, ConstraintGraph, Event, EventId, EventLog, FlowEdge, FlowLabel, Formula,
    MeasureKey, ObjEdge, ObjLabel, Object, ObjectId, PerfEdge, Timestamp,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub const ACTIVITIES: [&str; 6] = ["create", "approve", "pick", "pack", "ship", "invoice"];
pub const TYPES: [&str; 3] = ["Order", "Item", "Package"];

/// A reproducible log of `n_events` events over `n_objects` objects. Each
/// object walks a prefix of [`ACTIVITIES`]; events touch one to four objects.
pub fn random_log(n_events: usize, n_objects: usize, seed: u64) -> EventLog {
    let mut rng = StdRng::seed_from_u64(seed);
    let objects: Vec<Object> = (0..n_objects)
        .map(|i| Object::new(format!("o{i}"), TYPES[rng.gen_range(0..TYPES.len())]))
        .collect();
    let mut events = Vec::with_capacity(n_events);
    let mut relation: Vec<(EventId, ObjectId)> = Vec::new();
    let mut clock = 1_640_995_200i64;
    for i in 0..n_events {
        clock += rng.gen_range(60..7200);
        let activity = ACTIVITIES[rng.gen_range(0..ACTIVITIES.len())];
        let id = format!("e{i}");
        if n_objects > 0 {
            for _ in 0..rng.gen_range(1..=4) {
                let o = &objects[rng.gen_range(0..n_objects)];
                relation.push((id.as_str().into(), o.id.clone()));
            }
        }
        events.push(Event::new(
            id,
            activity,
            Timestamp::from_unix(clock).expect("in range"),
        ));
    }
    EventLog::build(events, objects, relation).expect("generated log is valid")
}

/// Constraint graphs touching every edge kind over the benchmark vocabulary.
pub fn constraint_set() -> Vec<ConstraintGraph> {
    let mut graphs = Vec::new();
    for (i, t) in TYPES.iter().enumerate() {
        let a = ACTIVITIES[i];
        let b = ACTIVITIES[i + 1];
        graphs.push(
            ConstraintGraph::new(format!("flow {t}"))
                .with_flow(FlowEdge::new(FlowLabel::Causal, a, b, *t, 0.2))
                .with_flow(FlowEdge::new(
                    FlowLabel::Concur,
                    b,
                    ACTIVITIES[i + 2],
                    *t,
                    0.1,
                ))
                .with_flow(FlowEdge::skip(ACTIVITIES[i + 3], *t, 0.5)),
        );
        graphs.push(
            ConstraintGraph::new(format!("involvement {t}"))
                .with_obj(ObjEdge::new(*t, ObjLabel::Multiple, a, 0.3))
                .with_perf(PerfEdge::new(
                    b,
                    Formula::compare(MeasureKey::AvgObjectCount((*t).into()), Comparator::Gt, 1.0)
                        .or(Formula::compare(
                            MeasureKey::AvgSojournTime,
                            Comparator::Ge,
                            3600.0,
                        )),
                )),
        );
    }
    graphs
}
