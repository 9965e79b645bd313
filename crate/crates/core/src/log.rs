//! In-memory object-centric event log.
//!
//! An [`EventLog`] holds a set of events, a set of typed objects and the
//! event-to-object relation between them. It is validated once at
//! construction and immutable afterwards; every query below is a pure
//! read over precomputed indexes.

use std::borrow::Borrow;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::time::Timestamp;

macro_rules! string_id {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(String);

        impl $name {
            pub fn new(s: impl Into<String>) -> Self {
                Self(s.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }

            pub fn into_string(self) -> String {
                self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                Self(s.to_string())
            }
        }

        impl From<String> for $name {
            fn from(s: String) -> Self {
                Self(s)
            }
        }

        impl Borrow<str> for $name {
            fn borrow(&self) -> &str {
                &self.0
            }
        }

        impl AsRef<str> for $name {
            fn as_ref(&self) -> &str {
                &self.0
            }
        }
    };
}

string_id!(
    /// Event identifier.
    EventId
);
string_id!(
    /// Object identifier.
    ObjectId
);
string_id!(
    /// Activity name.
    Activity
);
string_id!(
    /// Object type name.
    ObjectType
);

/// An attribute value. Absence (⊥) is `None` from [`AttrMap::get`].
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum AttrValue {
    Bool(bool),
    Num(f64),
    Time(Timestamp),
    Str(String),
}

impl fmt::Display for AttrValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AttrValue::Str(s) => f.write_str(s),
            AttrValue::Num(n) => write!(f, "{n}"),
            AttrValue::Bool(b) => write!(f, "{b}"),
            AttrValue::Time(t) => write!(f, "{t}"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
#[serde(transparent)]
pub struct AttrMap(BTreeMap<String, AttrValue>);

impl AttrMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, name: &str) -> Option<&AttrValue> {
        self.0.get(name)
    }

    pub fn insert(&mut self, name: impl Into<String>, value: AttrValue) -> Option<AttrValue> {
        self.0.insert(name.into(), value)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &AttrValue)> {
        self.0.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromIterator<(String, AttrValue)> for AttrMap {
    fn from_iter<I: IntoIterator<Item = (String, AttrValue)>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Event {
    pub id: EventId,
    pub activity: Activity,
    pub time: Timestamp,
    pub attrs: AttrMap,
}

impl Event {
    pub fn new(id: impl Into<EventId>, activity: impl Into<Activity>, time: Timestamp) -> Self {
        Self {
            id: id.into(),
            activity: activity.into(),
            time,
            attrs: AttrMap::new(),
        }
    }

    pub fn with_attr(mut self, name: impl Into<String>, value: AttrValue) -> Self {
        self.attrs.insert(name, value);
        self
    }
}

/// An object with a single, time-invariant type.
#[derive(Debug, Clone, PartialEq)]
pub struct Object {
    pub id: ObjectId,
    pub otype: ObjectType,
    pub attrs: AttrMap,
}

impl Object {
    pub fn new(id: impl Into<ObjectId>, otype: impl Into<ObjectType>) -> Self {
        Self {
            id: id.into(),
            otype: otype.into(),
            attrs: AttrMap::new(),
        }
    }

    pub fn with_attr(mut self, name: impl Into<String>, value: AttrValue) -> Self {
        self.attrs.insert(name, value);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IdKind {
    Event,
    Object,
}

impl fmt::Display for IdKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IdKind::Event => "event",
            IdKind::Object => "object",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LogError {
    #[error("relation pair ({event}, {object}) references unknown {kind} `{unknown}`")]
    DanglingReference {
        event: String,
        object: String,
        kind: IdKind,
        unknown: String,
    },
    #[error("duplicate {kind} id `{id}`")]
    DuplicateId { kind: IdKind, id: String },
    #[error("{kind} `{id}` is missing required field `{field}`")]
    MissingField {
        kind: IdKind,
        id: String,
        field: &'static str,
    },
    #[error("unknown {kind} id `{id}`")]
    UnknownId { kind: IdKind, id: String },
    #[error("invalid time window: from {from} is after to {to}")]
    InvalidWindow { from: Timestamp, to: Timestamp },
}

/// A validated object-centric event log `(E, O, μ, R)`.
#[derive(Debug, Clone)]
pub struct EventLog {
    // sorted by id
    events: Vec<Event>,
    objects: Vec<Object>,
    event_index: HashMap<EventId, usize>,
    object_index: HashMap<ObjectId, usize>,
    // per event: related object indices, ascending
    event_objects: Vec<Vec<usize>>,
    // per object: related event indices ordered by (time, event id)
    object_events: Vec<Vec<usize>>,
    warnings: Vec<String>,
}

impl PartialEq for EventLog {
    fn eq(&self, other: &Self) -> bool {
        self.events == other.events
            && self.objects == other.objects
            && self.event_objects == other.event_objects
    }
}

impl Default for EventLog {
    fn default() -> Self {
        Self::empty()
    }
}

impl EventLog {
    pub fn empty() -> Self {
        Self::build(Vec::new(), Vec::new(), Vec::new()).expect("empty log is valid")
    }

    /// Validates events, objects and relation pairs into a log.
    ///
    /// Duplicate relation pairs are collapsed and events without any
    /// object are accepted; both are reported through [`EventLog::warnings`].
    pub fn build<R>(
        mut events: Vec<Event>,
        mut objects: Vec<Object>,
        relation: R,
    ) -> Result<Self, LogError>
    where
        R: IntoIterator<Item = (EventId, ObjectId)>,
    {
        for e in &events {
            if e.id.as_str().is_empty() {
                return Err(LogError::MissingField {
                    kind: IdKind::Event,
                    id: String::new(),
                    field: "id",
                });
            }
            if e.activity.as_str().is_empty() {
                return Err(LogError::MissingField {
                    kind: IdKind::Event,
                    id: e.id.to_string(),
                    field: "activity",
                });
            }
        }
        for o in &objects {
            if o.id.as_str().is_empty() {
                return Err(LogError::MissingField {
                    kind: IdKind::Object,
                    id: String::new(),
                    field: "id",
                });
            }
            if o.otype.as_str().is_empty() {
                return Err(LogError::MissingField {
                    kind: IdKind::Object,
                    id: o.id.to_string(),
                    field: "type",
                });
            }
        }

        events.sort_by(|a, b| a.id.cmp(&b.id));
        objects.sort_by(|a, b| a.id.cmp(&b.id));
        if let Some(w) = events.windows(2).find(|w| w[0].id == w[1].id) {
            return Err(LogError::DuplicateId {
                kind: IdKind::Event,
                id: w[0].id.to_string(),
            });
        }
        if let Some(w) = objects.windows(2).find(|w| w[0].id == w[1].id) {
            return Err(LogError::DuplicateId {
                kind: IdKind::Object,
                id: w[0].id.to_string(),
            });
        }

        let event_index: HashMap<EventId, usize> = events
            .iter()
            .enumerate()
            .map(|(i, e)| (e.id.clone(), i))
            .collect();
        let object_index: HashMap<ObjectId, usize> = objects
            .iter()
            .enumerate()
            .map(|(i, o)| (o.id.clone(), i))
            .collect();

        let mut pairs = BTreeSet::new();
        let mut duplicates = 0usize;
        for (e, o) in relation {
            let ei = event_index.get(&e).copied();
            let oi = object_index.get(&o).copied();
            match (ei, oi) {
                (Some(ei), Some(oi)) => {
                    if !pairs.insert((ei, oi)) {
                        duplicates += 1;
                    }
                }
                (None, _) => {
                    return Err(LogError::DanglingReference {
                        unknown: e.to_string(),
                        kind: IdKind::Event,
                        event: e.into_string(),
                        object: o.into_string(),
                    })
                }
                (_, None) => {
                    return Err(LogError::DanglingReference {
                        unknown: o.to_string(),
                        kind: IdKind::Object,
                        event: e.into_string(),
                        object: o.into_string(),
                    })
                }
            }
        }

        let mut event_objects = vec![Vec::new(); events.len()];
        let mut object_events = vec![Vec::new(); objects.len()];
        for &(ei, oi) in &pairs {
            event_objects[ei].push(oi);
            object_events[oi].push(ei);
        }
        // event indices follow id order, so (time, index) is the (time, id) tie-break
        for seq in &mut object_events {
            seq.sort_by(|&a, &b| events[a].time.cmp(&events[b].time).then(a.cmp(&b)));
        }

        let mut warnings = Vec::new();
        if duplicates > 0 {
            warnings.push(format!(
                "{duplicates} duplicate event-object pair(s) collapsed"
            ));
        }
        for (e, objs) in events.iter().zip(&event_objects) {
            if objs.is_empty() {
                warnings.push(format!("event `{}` relates to no objects", e.id));
            }
        }

        Ok(Self {
            events,
            objects,
            event_index,
            object_index,
            event_objects,
            object_events,
            warnings,
        })
    }

    /// Non-fatal findings from construction (and import, when applicable).
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub(crate) fn push_warning(&mut self, w: String) {
        self.warnings.push(w);
    }

    /// Events ordered by id.
    pub fn events(&self) -> &[Event] {
        &self.events
    }

    /// Objects ordered by id.
    pub fn objects(&self) -> &[Object] {
        &self.objects
    }

    pub fn event(&self, id: &str) -> Option<&Event> {
        self.event_index.get(id).map(|&i| &self.events[i])
    }

    pub fn object(&self, id: &str) -> Option<&Object> {
        self.object_index.get(id).map(|&i| &self.objects[i])
    }

    /// All `(event, object)` pairs of `R`, by event id then object id.
    pub fn relation(&self) -> impl Iterator<Item = (&EventId, &ObjectId)> + '_ {
        self.event_objects
            .iter()
            .enumerate()
            .flat_map(move |(ei, objs)| {
                objs.iter()
                    .map(move |&oi| (&self.events[ei].id, &self.objects[oi].id))
            })
    }

    pub fn relation_len(&self) -> usize {
        self.event_objects.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty() && self.objects.is_empty()
    }

    pub fn acts(&self) -> BTreeSet<&Activity> {
        self.events.iter().map(|e| &e.activity).collect()
    }

    pub fn events_of_activity<'a>(&'a self, activity: &str) -> Vec<&'a Event> {
        self.events
            .iter()
            .filter(|e| e.activity.as_str() == activity)
            .collect()
    }

    pub fn types(&self) -> BTreeSet<&ObjectType> {
        self.objects.iter().map(|o| &o.otype).collect()
    }

    pub fn objects_of_type<'a>(&'a self, otype: &str) -> Vec<&'a Object> {
        self.objects
            .iter()
            .filter(|o| o.otype.as_str() == otype)
            .collect()
    }

    /// Events related to `object`, in sequence order.
    pub fn events_of_object(&self, object: &str) -> Result<Vec<&Event>, LogError> {
        self.seq(object)
    }

    /// Objects related to `event`, by id.
    pub fn objects_of_event(&self, event: &str) -> Result<Vec<&Object>, LogError> {
        let ei = self.event_idx(event)?;
        Ok(self.event_objects[ei]
            .iter()
            .map(|&oi| &self.objects[oi])
            .collect())
    }

    /// Events of `object` ordered by time, ties broken by event id.
    pub fn seq(&self, object: &str) -> Result<Vec<&Event>, LogError> {
        let oi = self.object_idx(object)?;
        Ok(self.object_events[oi]
            .iter()
            .map(|&ei| &self.events[ei])
            .collect())
    }

    /// Activities of [`EventLog::seq`].
    pub fn trace(&self, object: &str) -> Result<Vec<&Activity>, LogError> {
        Ok(self.seq(object)?.into_iter().map(|e| &e.activity).collect())
    }

    /// Restricts the log to events with `from <= time <= to`.
    ///
    /// Objects no longer related to any kept event are dropped.
    pub fn filter_time_window(
        &self,
        from: Option<Timestamp>,
        to: Option<Timestamp>,
    ) -> Result<EventLog, LogError> {
        if let (Some(from), Some(to)) = (from, to) {
            if from > to {
                return Err(LogError::InvalidWindow { from, to });
            }
        }
        let keep = |t: &Timestamp| from.map_or(true, |f| f <= *t) && to.map_or(true, |u| *t <= u);
        let kept: Vec<usize> = (0..self.events.len())
            .filter(|&i| keep(&self.events[i].time))
            .collect();
        let mut live = vec![false; self.objects.len()];
        let mut relation = Vec::new();
        for &ei in &kept {
            for &oi in &self.event_objects[ei] {
                live[oi] = true;
                relation.push((self.events[ei].id.clone(), self.objects[oi].id.clone()));
            }
        }
        let events = kept.iter().map(|&i| self.events[i].clone()).collect();
        let objects = self
            .objects
            .iter()
            .zip(&live)
            .filter(|(_, &l)| l)
            .map(|(o, _)| o.clone())
            .collect();
        EventLog::build(events, objects, relation)
    }

    pub(crate) fn event_idx(&self, id: &str) -> Result<usize, LogError> {
        self.event_index
            .get(id)
            .copied()
            .ok_or_else(|| LogError::UnknownId {
                kind: IdKind::Event,
                id: id.to_string(),
            })
    }

    pub(crate) fn object_idx(&self, id: &str) -> Result<usize, LogError> {
        self.object_index
            .get(id)
            .copied()
            .ok_or_else(|| LogError::UnknownId {
                kind: IdKind::Object,
                id: id.to_string(),
            })
    }

    pub(crate) fn object_events_idx(&self, oi: usize) -> &[usize] {
        &self.object_events[oi]
    }

    pub(crate) fn event_objects_idx(&self, ei: usize) -> &[usize] {
        &self.event_objects[ei]
    }
}

/// Builds `L₁`, the three-event order log used throughout the docs and tests.
///
/// | event | activity | timestamp        | Order | Item       |
/// |-------|----------|------------------|-------|------------|
/// | e93   | po       | 25-10-2022 09:35 | o1    | i1, i2, i3 |
/// | e94   | ec       | 25-10-2022 13:35 | o1    |            |
/// | e95   | co       | 25-10-2022 15:35 | o1    | i1, i2, i3 |
pub fn example_order_log() -> EventLog {
    let t = |s: &str| Timestamp::parse_iso8601(s).expect("valid literal");
    let events = vec![
        Event::new("e93", "po", t("2022-10-25T09:35:00Z")),
        Event::new("e94", "ec", t("2022-10-25T13:35:00Z")),
        Event::new("e95", "co", t("2022-10-25T15:35:00Z")),
    ];
    let objects = vec![
        Object::new("o1", "Order"),
        Object::new("i1", "Item"),
        Object::new("i2", "Item"),
        Object::new("i3", "Item"),
    ];
    let mut relation = Vec::new();
    for e in ["e93", "e94", "e95"] {
        relation.push((EventId::from(e), ObjectId::from("o1")));
    }
    for e in ["e93", "e95"] {
        for i in ["i1", "i2", "i3"] {
            relation.push((EventId::from(e), ObjectId::from(i)));
        }
    }
    EventLog::build(events, objects, relation).expect("example log is valid")
}
