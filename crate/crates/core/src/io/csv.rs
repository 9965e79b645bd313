//! Tabular logs: one row per event, one column per object type.
//!
//! ```text
//! event id,activity,timestamp,order,item
//! e93,place order,25-10-2022:09.35,o1,i1;i2;i3
//! e94,evaluate credit,25-10-2022:13.35,o1,
//! ```
//!
//! Object cells hold a list of ids joined by the list separator. An empty
//! cell, `∅` or `{}` is the empty set, and surrounding braces are ignored.
//! Columns not named in the `CsvSpec` become string attributes of the event.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::IoError;
use crate::log::{AttrValue, Event, EventId, EventLog, Object, ObjectId};
use crate::time::Timestamp;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectColumn {
    pub column: String,
    /// Object type of the ids in this column; the column name when absent.
    #[serde(default)]
    pub object_type: Option<String>,
}

impl ObjectColumn {
    pub fn new(column: impl Into<String>, object_type: impl Into<String>) -> Self {
        Self {
            column: column.into(),
            object_type: Some(object_type.into()),
        }
    }

    pub fn object_type(&self) -> &str {
        self.object_type.as_deref().unwrap_or(&self.column)
    }
}

/// Column layout of a CSV log. Deserializes from JSON with defaults for
/// every field but `object_columns`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct CsvSpec {
    pub event_id_column: String,
    pub activity_column: String,
    pub timestamp_column: String,
    /// strftime-style pattern; ISO-8601 text is accepted as a fallback.
    pub timestamp_format: String,
    pub object_columns: Vec<ObjectColumn>,
    pub list_separator: char,
}

impl Default for CsvSpec {
    fn default() -> Self {
        Self {
            event_id_column: "event id".into(),
            activity_column: "activity".into(),
            timestamp_column: "timestamp".into(),
            timestamp_format: "%d-%m-%Y:%H.%M".into(),
            object_columns: Vec::new(),
            list_separator: ';',
        }
    }
}

fn object_ids(cell: &str, sep: char) -> Vec<&str> {
    let mut s = cell.trim();
    if let Some(inner) = s.strip_prefix('{').and_then(|r| r.strip_suffix('}')) {
        s = inner.trim();
    }
    if s.is_empty() || s == "∅" {
        return Vec::new();
    }
    s.split(sep)
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .collect()
}

/// Parses a CSV log laid out as described by `spec`.
pub fn import_csv(bytes: &[u8], spec: &CsvSpec) -> Result<EventLog, IoError> {
    let mut rdr = ::csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(::csv::Trim::Headers)
        .from_reader(bytes);
    let headers = rdr
        .headers()
        .map_err(|e| IoError::Parse(e.to_string()))?
        .clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| IoError::ColumnMissing(name.to_string()))
    };
    let id_col = col(&spec.event_id_column)?;
    let act_col = col(&spec.activity_column)?;
    let ts_col = col(&spec.timestamp_column)?;
    let obj_cols = spec
        .object_columns
        .iter()
        .map(|c| Ok((col(&c.column)?, c.object_type())))
        .collect::<Result<Vec<_>, IoError>>()?;
    let mut claimed = vec![id_col, act_col, ts_col];
    claimed.extend(obj_cols.iter().map(|(i, _)| *i));
    let attr_cols: Vec<usize> = (0..headers.len())
        .filter(|i| !claimed.contains(i))
        .collect();

    let mut events = Vec::new();
    let mut object_types: HashMap<String, String> = HashMap::new();
    let mut object_order = Vec::new();
    let mut relation: Vec<(EventId, ObjectId)> = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(|e| IoError::Parse(e.to_string()))?;
        let line = row.position().map_or(0, |p| p.line());
        let cell = |i: usize| row.get(i).unwrap_or("").trim();
        let id = cell(id_col);
        let raw_ts = cell(ts_col);
        let time = Timestamp::parse_with_format(raw_ts, &spec.timestamp_format)
            .or_else(|_| Timestamp::parse_iso8601(raw_ts))
            .map_err(|source| IoError::Timestamp {
                context: format!("line {line}, event `{id}`"),
                source,
            })?;
        let mut event = Event::new(id, cell(act_col), time);
        for &i in &attr_cols {
            let v = cell(i);
            if !v.is_empty() {
                event = event.with_attr(headers[i].to_string(), AttrValue::Str(v.to_string()));
            }
        }
        for &(i, otype) in &obj_cols {
            for oid in object_ids(cell(i), spec.list_separator) {
                match object_types.get(oid) {
                    Some(seen) if seen != otype => {
                        return Err(IoError::TypeConflict {
                            object: oid.to_string(),
                            first: seen.clone(),
                            second: otype.to_string(),
                        })
                    }
                    Some(_) => {}
                    None => {
                        object_types.insert(oid.to_string(), otype.to_string());
                        object_order.push(oid.to_string());
                    }
                }
                relation.push((id.into(), oid.into()));
            }
        }
        events.push(event);
    }
    let objects = object_order
        .into_iter()
        .map(|id| {
            let otype = object_types[&id].clone();
            Object::new(id, otype)
        })
        .collect();
    Ok(EventLog::build(events, objects, relation)?)
}
