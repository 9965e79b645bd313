//! Log characteristics: per-type containment, eventually-follows and
//! cardinality counts.
//!
//! Counts are computed lazily per query and memoized, so a [`LogStats`]
//! can be shared across threads and queried repeatedly at no extra cost.
//! Unknown object types or activities simply count zero.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Mutex;

use crate::log::EventLog;

/// Number of objects of one type related to a single event.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cardinality {
    Zero,
    One,
    Many,
}

impl Cardinality {
    pub fn of(n: usize) -> Self {
        match n {
            0 => Cardinality::Zero,
            1 => Cardinality::One,
            _ => Cardinality::Many,
        }
    }
}

impl fmt::Display for Cardinality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Cardinality::Zero => "zero",
            Cardinality::One => "one",
            Cardinality::Many => "many",
        })
    }
}

type ContainingKey = (String, BTreeSet<String>);
type FollowsKey = (String, String, String);

pub struct LogStats<'a> {
    log: &'a EventLog,
    objects_by_type: BTreeMap<&'a str, Vec<usize>>,
    containing: Mutex<HashMap<ContainingKey, usize>>,
    followed_by: Mutex<HashMap<FollowsKey, usize>>,
    cardinality: Mutex<HashMap<(String, String), [usize; 3]>>,
}

impl fmt::Debug for LogStats<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LogStats")
            .field("events", &self.log.events().len())
            .field("objects", &self.log.objects().len())
            .finish_non_exhaustive()
    }
}

impl<'a> LogStats<'a> {
    pub fn new(log: &'a EventLog) -> Self {
        let mut objects_by_type: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
        for (i, o) in log.objects().iter().enumerate() {
            objects_by_type.entry(o.otype.as_str()).or_default().push(i);
        }
        Self {
            log,
            objects_by_type,
            containing: Mutex::default(),
            followed_by: Mutex::default(),
            cardinality: Mutex::default(),
        }
    }

    pub fn log(&self) -> &'a EventLog {
        self.log
    }

    pub fn has_type(&self, otype: &str) -> bool {
        self.objects_by_type.contains_key(otype)
    }

    pub fn has_activity(&self, activity: &str) -> bool {
        self.log
            .events()
            .iter()
            .any(|e| e.activity.as_str() == activity)
    }

    /// `|objects(ot)|`
    pub fn object_count(&self, otype: &str) -> usize {
        self.objects_by_type.get(otype).map_or(0, Vec::len)
    }

    /// `|events(a)|`
    pub fn event_count(&self, activity: &str) -> usize {
        self.log
            .events()
            .iter()
            .filter(|e| e.activity.as_str() == activity)
            .count()
    }

    fn trace_of(&self, oi: usize) -> impl Iterator<Item = &'a str> + '_ {
        let events = self.log.events();
        self.log
            .object_events_idx(oi)
            .iter()
            .map(move |&ei| events[ei].activity.as_str())
    }

    /// `#_L(ot, X)`: objects of type `ot` whose trace contains every activity of `X`.
    pub fn count_containing<I, S>(&self, otype: &str, activities: I) -> usize
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let set: BTreeSet<String> = activities
            .into_iter()
            .map(|a| a.as_ref().to_string())
            .collect();
        let key = (otype.to_string(), set);
        if let Some(&n) = self.containing.lock().unwrap().get(&key) {
            return n;
        }
        let n = match self.objects_by_type.get(otype) {
            None => 0,
            Some(objs) => objs
                .iter()
                .filter(|&&oi| {
                    let seen: BTreeSet<&str> = self.trace_of(oi).collect();
                    key.1.iter().all(|x| seen.contains(x.as_str()))
                })
                .count(),
        };
        self.containing.lock().unwrap().insert(key, n);
        n
    }

    /// `#_L(ot, a, b)`: objects of type `ot` whose trace has `a` at some
    /// position strictly before some `b` (eventually-follows).
    pub fn count_followed_by(&self, otype: &str, a: &str, b: &str) -> usize {
        let key = (otype.to_string(), a.to_string(), b.to_string());
        if let Some(&n) = self.followed_by.lock().unwrap().get(&key) {
            return n;
        }
        let n = match self.objects_by_type.get(otype) {
            None => 0,
            Some(objs) => objs
                .iter()
                .filter(|&&oi| {
                    let mut first_a = None;
                    let mut last_b = None;
                    for (pos, act) in self.trace_of(oi).enumerate() {
                        if act == a && first_a.is_none() {
                            first_a = Some(pos);
                        }
                        if act == b {
                            last_b = Some(pos);
                        }
                    }
                    matches!((first_a, last_b), (Some(i), Some(j)) if i < j)
                })
                .count(),
        };
        self.followed_by.lock().unwrap().insert(key, n);
        n
    }

    /// `#⁰/#¹/#*_L(ot, a)`: events of `a` relating zero, one, or more than one
    /// object of type `ot`.
    pub fn count_cardinality(&self, otype: &str, activity: &str, class: Cardinality) -> usize {
        let counts = self.cardinality_counts(otype, activity);
        match class {
            Cardinality::Zero => counts[0],
            Cardinality::One => counts[1],
            Cardinality::Many => counts[2],
        }
    }

    fn cardinality_counts(&self, otype: &str, activity: &str) -> [usize; 3] {
        let key = (otype.to_string(), activity.to_string());
        if let Some(&c) = self.cardinality.lock().unwrap().get(&key) {
            return c;
        }
        let objects = self.log.objects();
        let mut counts = [0usize; 3];
        for (ei, e) in self.log.events().iter().enumerate() {
            if e.activity.as_str() != activity {
                continue;
            }
            let n = self
                .log
                .event_objects_idx(ei)
                .iter()
                .filter(|&&oi| objects[oi].otype.as_str() == otype)
                .count();
            counts[n.min(2)] += 1;
        }
        self.cardinality.lock().unwrap().insert(key, counts);
        counts
    }
}
