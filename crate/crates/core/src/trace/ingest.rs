//! JSON-lines trace ingest and serialization.
//!
//! One event per line, each line a JSON object. String values become
//! bindings; numbers are canonicalized to their shortest decimal form and
//! stored as binding strings (integral floats print as integers, so `7`,
//! `7.0` and `"7"` all bind the same value); `true` turns the key into a
//! flag; `false` drops the key. Anything else (`null`, arrays, nested
//! objects, non-object lines, invalid JSON) is malformed. Blank lines are
//! skipped silently.
//!
//! Malformed input is handled per the [`MalformedPolicy`]: `Skip` counts and
//! drops the record, `Abort` stops with the line number.

use super::Event;
use serde_json::Value;
use std::io::BufRead;
use thiserror::Error;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum MalformedPolicy {
    #[default]
    Skip,
    Abort,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct IngestStats {
    /// Events accepted.
    pub events: u64,
    /// Malformed records dropped (only under `MalformedPolicy::Skip`).
    pub skipped: u64,
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("read failed: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: malformed record: {message}")]
    Malformed { line: u64, message: String },
}

fn number_to_string(n: &serde_json::Number) -> String {
    if let Some(i) = n.as_i64() {
        i.to_string()
    } else if let Some(u) = n.as_u64() {
        u.to_string()
    } else {
        let f = n.as_f64().unwrap_or(f64::NAN);
        // 2^53: above this, f64 no longer distinguishes adjacent integers.
        if f.is_finite() && f.fract() == 0.0 && f.abs() <= 9_007_199_254_740_992.0 {
            format!("{}", f as i64)
        } else {
            n.to_string()
        }
    }
}

/// Parse one line. Blank lines yield `Ok(None)`. The caller supplies the
/// index the event gets if it is accepted.
pub fn parse_event_line(line: &str, index: u64) -> Result<Option<Event>, String> {
    if line.trim().is_empty() {
        return Ok(None);
    }
    let value: Value = serde_json::from_str(line).map_err(|e| e.to_string())?;
    let Value::Object(map) = value else {
        return Err("expected a JSON object".to_string());
    };
    let mut bindings = Vec::new();
    let mut flags = Vec::new();
    for (key, value) in map {
        match value {
            Value::String(s) => bindings.push((key, s)),
            Value::Number(n) => {
                let value = number_to_string(&n);
                bindings.push((key, value));
            }
            Value::Bool(true) => flags.push(key),
            Value::Bool(false) => {}
            Value::Null => return Err(format!("key `{key}` is null")),
            Value::Array(_) => return Err(format!("key `{key}` is an array")),
            Value::Object(_) => return Err(format!("key `{key}` is a nested object")),
        }
    }
    Ok(Some(Event::new(index, bindings, flags)))
}

/// Read a whole stream of JSON lines into events.
pub fn read_events(
    reader: impl BufRead,
    policy: MalformedPolicy,
) -> Result<(Vec<Event>, IngestStats), IngestError> {
    let mut events = Vec::new();
    let mut stats = IngestStats::default();
    for (line_no, line) in reader.lines().enumerate() {
        let line = line?;
        match parse_event_line(&line, stats.events) {
            Ok(Some(event)) => {
                events.push(event);
                stats.events += 1;
            }
            Ok(None) => {}
            Err(message) => match policy {
                MalformedPolicy::Skip => stats.skipped += 1,
                MalformedPolicy::Abort => {
                    return Err(IngestError::Malformed {
                        line: line_no as u64 + 1,
                        message,
                    })
                }
            },
        }
    }
    Ok((events, stats))
}

/// Serialize one event back to a JSON line. Keys come out sorted, bindings
/// as strings and flags as `true`, so `parse_event_line` inverts this
/// exactly.
#[must_use]
pub fn event_to_json_line(event: &Event) -> String {
    let mut map = serde_json::Map::new();
    for (k, v) in &event.bindings {
        map.insert(k.clone(), Value::String(v.clone()));
    }
    for f in &event.flags {
        map.insert(f.clone(), Value::Bool(true));
    }
    Value::Object(map).to_string()
}
