//! OCEL 1.0 JSON layout.

use std::fmt;
use std::marker::PhantomData;

use serde::de::{Deserializer, MapAccess, Visitor};
use serde::Deserialize;
use serde_json::{json, Map, Value};

use super::IoError;
use crate::log::{AttrMap, AttrValue, Event, EventLog, IdKind, LogError, Object, ObjectId};
use crate::time::Timestamp;

/// Map entries in document order, keeping duplicate keys visible.
struct Entries<T>(Vec<(String, T)>);

impl<'de, T: Deserialize<'de>> Deserialize<'de> for Entries<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V<T>(PhantomData<T>);
        impl<'de, T: Deserialize<'de>> Visitor<'de> for V<T> {
            type Value = Entries<T>;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a JSON object")
            }
            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<Self::Value, A::Error> {
                let mut out = Vec::new();
                while let Some((k, v)) = map.next_entry::<String, T>()? {
                    out.push((k, v));
                }
                Ok(Entries(out))
            }
        }
        d.deserialize_map(V(PhantomData))
    }
}

#[derive(Deserialize)]
struct RawLog {
    #[serde(rename = "ocel:events")]
    events: Option<Entries<Value>>,
    #[serde(rename = "ocel:objects")]
    objects: Option<Entries<Value>>,
}

fn required<'a>(
    rec: &'a Map<String, Value>,
    key: &str,
    what: &str,
    id: &str,
) -> Result<&'a Value, IoError> {
    rec.get(key)
        .ok_or_else(|| IoError::Schema(format!("{what} `{id}` lacks key \"{key}\"")))
}

fn as_str<'a>(v: &'a Value, key: &str, what: &str, id: &str) -> Result<&'a str, IoError> {
    v.as_str()
        .ok_or_else(|| IoError::Schema(format!("{what} `{id}`: \"{key}\" must be a string")))
}

fn attrs(
    rec: &Map<String, Value>,
    key: &str,
    what: &str,
    id: &str,
    warnings: &mut Vec<String>,
) -> Result<AttrMap, IoError> {
    let Some(v) = rec.get(key) else {
        return Ok(AttrMap::new());
    };
    let obj = match v {
        Value::Null => return Ok(AttrMap::new()),
        Value::Object(m) => m,
        _ => {
            return Err(IoError::Schema(format!(
                "{what} `{id}`: \"{key}\" must be an object"
            )))
        }
    };
    let mut out = AttrMap::new();
    for (name, value) in obj {
        let converted = match value {
            Value::Null => continue,
            Value::Bool(b) => AttrValue::Bool(*b),
            Value::Number(n) => AttrValue::Num(n.as_f64().unwrap_or(f64::NAN)),
            Value::String(s) => match chrono::DateTime::parse_from_rfc3339(s) {
                Ok(dt) => AttrValue::Time(Timestamp::from_datetime(dt.to_utc())),
                Err(_) => AttrValue::Str(s.clone()),
            },
            nested => {
                warnings.push(format!(
                    "{what} `{id}`: nested attribute `{name}` kept as JSON text"
                ));
                AttrValue::Str(nested.to_string())
            }
        };
        out.insert(name.clone(), converted);
    }
    Ok(out)
}

fn record<'a>(v: &'a Value, what: &str, id: &str) -> Result<&'a Map<String, Value>, IoError> {
    v.as_object()
        .ok_or_else(|| IoError::Schema(format!("{what} `{id}` must be a JSON object")))
}

/// Parses OCEL JSON. Global sections are accepted and ignored.
pub fn import_json(bytes: &[u8]) -> Result<EventLog, IoError> {
    let raw: RawLog = serde_json::from_slice(bytes).map_err(|e| IoError::Parse(e.to_string()))?;
    let raw_events = raw
        .events
        .ok_or_else(|| IoError::Schema("missing top-level key \"ocel:events\"".into()))?;
    let raw_objects = raw
        .objects
        .ok_or_else(|| IoError::Schema("missing top-level key \"ocel:objects\"".into()))?;
    check_duplicates(&raw_events.0, IdKind::Event)?;
    check_duplicates(&raw_objects.0, IdKind::Object)?;

    let mut warnings = Vec::new();
    let mut objects = Vec::with_capacity(raw_objects.0.len());
    for (id, v) in &raw_objects.0 {
        let rec = record(v, "object", id)?;
        let otype = as_str(
            required(rec, "ocel:type", "object", id)?,
            "ocel:type",
            "object",
            id,
        )?;
        let mut o = Object::new(id.as_str(), otype);
        o.attrs = attrs(rec, "ocel:ovmap", "object", id, &mut warnings)?;
        objects.push(o);
    }

    let mut events = Vec::with_capacity(raw_events.0.len());
    let mut relation = Vec::new();
    for (id, v) in &raw_events.0 {
        let rec = record(v, "event", id)?;
        let activity = as_str(
            required(rec, "ocel:activity", "event", id)?,
            "ocel:activity",
            "event",
            id,
        )?;
        let ts = as_str(
            required(rec, "ocel:timestamp", "event", id)?,
            "ocel:timestamp",
            "event",
            id,
        )?;
        let time = Timestamp::parse_iso8601(ts).map_err(|source| IoError::Timestamp {
            context: format!("event `{id}`"),
            source,
        })?;
        let omap = required(rec, "ocel:omap", "event", id)?
            .as_array()
            .ok_or_else(|| {
                IoError::Schema(format!("event `{id}`: \"ocel:omap\" must be an array"))
            })?;
        for o in omap {
            let oid = as_str(o, "ocel:omap", "event", id)?;
            relation.push((id.as_str().into(), ObjectId::from(oid)));
        }
        let mut e = Event::new(id.as_str(), activity, time);
        e.attrs = attrs(rec, "ocel:vmap", "event", id, &mut warnings)?;
        events.push(e);
    }

    let mut log = EventLog::build(events, objects, relation)?;
    for w in warnings {
        log.push_warning(w);
    }
    Ok(log)
}

fn attr_json(attrs: &AttrMap) -> Value {
    let mut m = Map::new();
    for (k, v) in attrs.iter() {
        let value = match v {
            AttrValue::Bool(b) => Value::Bool(*b),
            AttrValue::Num(n) => json!(n),
            AttrValue::Time(t) => Value::String(t.to_rfc3339()),
            AttrValue::Str(s) => Value::String(s.clone()),
        };
        m.insert(k.to_string(), value);
    }
    Value::Object(m)
}

/// Writes OCEL JSON with events and objects keyed by id.
pub fn export_json(log: &EventLog) -> Vec<u8> {
    let mut event_attr_names = std::collections::BTreeSet::new();
    let mut object_attr_names = std::collections::BTreeSet::new();
    let mut events = Map::new();
    for e in log.events() {
        event_attr_names.extend(e.attrs.iter().map(|(k, _)| k.to_string()));
        let omap: Vec<Value> = log
            .objects_of_event(e.id.as_str())
            .expect("event belongs to the log")
            .into_iter()
            .map(|o| Value::String(o.id.to_string()))
            .collect();
        events.insert(
            e.id.to_string(),
            json!({
                "ocel:activity": e.activity.as_str(),
                "ocel:timestamp": e.time.to_rfc3339(),
                "ocel:omap": omap,
                "ocel:vmap": attr_json(&e.attrs),
            }),
        );
    }
    let mut objects = Map::new();
    for o in log.objects() {
        object_attr_names.extend(o.attrs.iter().map(|(k, _)| k.to_string()));
        objects.insert(
            o.id.to_string(),
            json!({
                "ocel:type": o.otype.as_str(),
                "ocel:ovmap": attr_json(&o.attrs),
            }),
        );
    }
    let types: Vec<&str> = log.types().into_iter().map(|t| t.as_str()).collect();
    let doc = json!({
        "ocel:global-log": {
            "ocel:version": "1.0",
            "ocel:ordering": "timestamp",
            "ocel:attribute-names": event_attr_names.union(&object_attr_names).collect::<Vec<_>>(),
            "ocel:object-types": types,
        },
        "ocel:global-event": {"ocel:activity": "__INVALID__"},
        "ocel:global-object": {"ocel:type": "__INVALID__"},
        "ocel:events": events,
        "ocel:objects": objects,
    });
    serde_json::to_vec_pretty(&doc).expect("JSON values always serialize")
}

/// Rejects a second occurrence of an id within the events or objects map.
fn check_duplicates(entries: &[(String, Value)], kind: IdKind) -> Result<(), IoError> {
    let mut seen = std::collections::HashSet::new();
    for (k, _) in entries {
        if !seen.insert(k.as_str()) {
            return Err(LogError::DuplicateId {
                kind,
                id: k.clone(),
            }
            .into());
        }
    }
    Ok(())
}
