//! Object-centric constraint monitoring.
//!
//! An [`EventLog`] relates events to objects of several types. Constraint
//! graphs ([`ConstraintGraph`]) combine ordering, object-involvement and
//! performance conditions over such a log, and [`monitor`] decides whether
//! a graph is violated, keeping the per-edge evidence.
//!
//! ```
//! use occg_core::{dsl, example_order_log, monitor};
//!
//! let log = example_order_log();
//! let graphs = dsl::parse(r#"
//!     constraint "items skip credit check" {
//!         obj Item [0..0] "ec" threshold 0.5;
//!         perf "po": avg_object_count(Item) > 1;
//!     }
//! "#).unwrap();
//! let verdict = monitor(&log, &graphs[0]).unwrap();
//! assert!(verdict.violated);
//! ```

pub mod dsl;
pub mod engine;
pub mod graph;
pub mod io;
pub mod log;
pub mod metrics;
pub mod stats;
#[cfg(feature = "testing")]
pub mod testing;
pub mod time;

pub use engine::{monitor, monitor_all, EdgeKind, EdgeVerdict, EngineError, Verdict};
pub use graph::{
    Comparator, ConstraintGraph, Diagnostic, DiagnosticKind, FlowEdge, FlowLabel, Formula, ObjEdge,
    ObjLabel, PerfEdge, FORMULA_EPSILON,
};
pub use io::{export_json, import_csv, import_json, load_log, CsvSpec, IoError, ObjectColumn};
pub use log::{
    example_order_log, Activity, AttrMap, AttrValue, Event, EventId, EventLog, IdKind, LogError,
    Object, ObjectId, ObjectType,
};
pub use metrics::{MeasureKey, MetricError};
pub use stats::{Cardinality, LogStats};
pub use time::Timestamp;
