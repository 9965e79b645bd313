//! Object-centric behavioral metrics.
//!
//! Ordering-relation metrics (`causal`, `concur`, `choice`) and the skip
//! strength are ratios of containment/follows counts and fall back to 0 on
//! a zero denominator. Object-involvement metrics (`absent`, `singular`,
//! `multiple`) are the cardinality classes of an activity's events divided
//! by its event count. All of them lie in `[0, 1]`.
//!
//! Performance metrics are drawn from a fixed registry ([`MeasureKey`]).
//! Sojourn time is measured from an event's *enabling time*: the latest
//! timestamp among the immediate predecessors of the event in the
//! sequences of the objects it touches.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::log::{EventLog, LogError, ObjectType};
use crate::stats::{Cardinality, LogStats};
use crate::time::Timestamp;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricError {
    #[error("unknown object type `{0}`")]
    UnknownType(String),
    #[error("unknown activity `{0}`")]
    UnknownActivity(String),
    #[error("unknown measure `{0}` (expected avg_object_count(<type>), avg_sojourn_time or event_count)")]
    UnknownMeasure(String),
    #[error("measure {measure} is undefined for activity `{activity}`")]
    UndefinedMeasure { activity: String, measure: String },
    #[error(transparent)]
    Log(#[from] LogError),
}

/// A performance/frequency measure name from the registry.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MeasureKey {
    /// Mean number of objects of the type per event of the activity.
    AvgObjectCount(ObjectType),
    /// Mean seconds between enabling time and event time.
    AvgSojournTime,
    /// Number of events of the activity.
    EventCount,
}

impl MeasureKey {
    pub const NAMES: [&'static str; 3] = ["avg_object_count", "avg_sojourn_time", "event_count"];

    /// Looks up a measure by name and optional parenthesized argument.
    pub fn from_parts(name: &str, arg: Option<&str>) -> Result<Self, MetricError> {
        let display = || match arg {
            Some(a) => format!("{name}({a})"),
            None => name.to_string(),
        };
        match (name, arg) {
            ("avg_object_count", Some(ot)) if !ot.is_empty() => {
                Ok(MeasureKey::AvgObjectCount(ObjectType::from(ot)))
            }
            ("avg_sojourn_time", None) => Ok(MeasureKey::AvgSojournTime),
            ("event_count", None) => Ok(MeasureKey::EventCount),
            _ => Err(MetricError::UnknownMeasure(display())),
        }
    }

    /// Whether `name` is the name of a measure that takes an argument.
    pub fn takes_argument(name: &str) -> bool {
        name == "avg_object_count"
    }
}

impl fmt::Display for MeasureKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeasureKey::AvgObjectCount(ot) => write!(f, "avg_object_count({ot})"),
            MeasureKey::AvgSojournTime => f.write_str("avg_sojourn_time"),
            MeasureKey::EventCount => f.write_str("event_count"),
        }
    }
}

impl FromStr for MeasureKey {
    type Err = MetricError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        match s.split_once('(') {
            Some((name, rest)) => match rest.strip_suffix(')') {
                Some(arg) => Self::from_parts(name.trim(), Some(arg.trim())),
                None => Err(MetricError::UnknownMeasure(s.to_string())),
            },
            None => Self::from_parts(s, None),
        }
    }
}

impl Serialize for MeasureKey {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// `#(ot,a,b) / #(ot,{a,b})`
pub fn causal(stats: &LogStats<'_>, otype: &str, a: &str, b: &str) -> f64 {
    ratio(
        stats.count_followed_by(otype, a, b),
        stats.count_containing(otype, [a, b]),
    )
}

/// `1 - (max(f,g) - min(f,g)) / (f+g)` with `f = #(ot,a,b)`, `g = #(ot,b,a)`.
pub fn concur(stats: &LogStats<'_>, otype: &str, a: &str, b: &str) -> f64 {
    let f = stats.count_followed_by(otype, a, b);
    let g = stats.count_followed_by(otype, b, a);
    if f + g == 0 {
        return 0.0;
    }
    1.0 - ratio(f.max(g) - f.min(g), f + g)
}

/// `1 - 2·#(ot,{a,b}) / (#(ot,{a}) + #(ot,{b}))`
pub fn choice(stats: &LogStats<'_>, otype: &str, a: &str, b: &str) -> f64 {
    let den = stats.count_containing(otype, [a]) + stats.count_containing(otype, [b]);
    if den == 0 {
        return 0.0;
    }
    1.0 - ratio(2 * stats.count_containing(otype, [a, b]), den)
}

/// Share of `ot` objects whose trace never contains `a`.
pub fn skip_strength(stats: &LogStats<'_>, otype: &str, a: &str) -> Result<f64, MetricError> {
    let total = stats.object_count(otype);
    if total == 0 {
        return Err(MetricError::UnknownType(otype.to_string()));
    }
    Ok(1.0 - ratio(stats.count_containing(otype, [a]), total))
}

fn involvement(
    stats: &LogStats<'_>,
    otype: &str,
    a: &str,
    class: Cardinality,
) -> Result<f64, MetricError> {
    let total = stats.event_count(a);
    if total == 0 {
        return Err(MetricError::UnknownActivity(a.to_string()));
    }
    Ok(ratio(stats.count_cardinality(otype, a, class), total))
}

pub fn absent(stats: &LogStats<'_>, otype: &str, a: &str) -> Result<f64, MetricError> {
    involvement(stats, otype, a, Cardinality::Zero)
}

pub fn singular(stats: &LogStats<'_>, otype: &str, a: &str) -> Result<f64, MetricError> {
    involvement(stats, otype, a, Cardinality::One)
}

pub fn multiple(stats: &LogStats<'_>, otype: &str, a: &str) -> Result<f64, MetricError> {
    involvement(stats, otype, a, Cardinality::Many)
}

/// Latest timestamp among the immediate predecessors of `event` in the
/// sequences of its objects; `None` when it starts every such sequence.
pub fn enabling_time(log: &EventLog, event: &str) -> Result<Option<Timestamp>, LogError> {
    let ei = log.event_idx(event)?;
    Ok(enabling_time_idx(log, ei))
}

fn enabling_time_idx(log: &EventLog, ei: usize) -> Option<Timestamp> {
    let events = log.events();
    log.event_objects_idx(ei)
        .iter()
        .filter_map(|&oi| {
            let seq = log.object_events_idx(oi);
            let pos = seq.iter().position(|&x| x == ei)?;
            pos.checked_sub(1).map(|p| events[seq[p]].time)
        })
        .max()
}

/// Value of measure `m` for activity `a`.
pub fn perf(stats: &LogStats<'_>, a: &str, m: &MeasureKey) -> Result<f64, MetricError> {
    let log = stats.log();
    let of_a: Vec<usize> = log
        .events()
        .iter()
        .enumerate()
        .filter(|(_, e)| e.activity.as_str() == a)
        .map(|(i, _)| i)
        .collect();
    if of_a.is_empty() {
        return Err(MetricError::UnknownActivity(a.to_string()));
    }
    match m {
        MeasureKey::EventCount => Ok(of_a.len() as f64),
        MeasureKey::AvgObjectCount(ot) => {
            let objects = log.objects();
            let total: usize = of_a
                .iter()
                .map(|&ei| {
                    log.event_objects_idx(ei)
                        .iter()
                        .filter(|&&oi| objects[oi].otype == *ot)
                        .count()
                })
                .sum();
            Ok(total as f64 / of_a.len() as f64)
        }
        MeasureKey::AvgSojournTime => {
            let events = log.events();
            let durations: Vec<i64> = of_a
                .iter()
                .filter_map(|&ei| {
                    enabling_time_idx(log, ei).map(|en| events[ei].time.seconds_since(&en))
                })
                .collect();
            if durations.is_empty() {
                return Err(MetricError::UndefinedMeasure {
                    activity: a.to_string(),
                    measure: m.to_string(),
                });
            }
            Ok(durations.iter().map(|&d| d as f64).sum::<f64>() / durations.len() as f64)
        }
    }
}
