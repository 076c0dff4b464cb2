//! Trace model and value extraction.
//!
//! An event is a set of named observations: *bindings* carry a string value
//! (`"user": "adam"`), *flags* are bare markers (`"login": true`). Both lists
//! are kept sorted so events compare and hash cheaply and serialization is
//! canonical.
//!
//! A property's quantifier prefix names guard predicates; an event that binds
//! every guard key contributes one *value vector* (the guard values in prefix
//! order) and is routed to the monitor instance for that vector. A ground
//! body atom holds at an event as follows: a 0-ary atom holds when the event
//! mentions the name at all (flag or binding), an n-ary atom holds when the
//! event binds the name to the comma-joined argument values.

pub mod ingest;
pub mod strace;

pub use ingest::{
    event_to_json_line, parse_event_line, read_events, IngestError, IngestStats, MalformedPolicy,
};

use crate::syntax::{Atom, Property};

/// One trace event. `index` is its 0-based position among the accepted
/// events of its source, used only for reporting.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Event {
    pub index: u64,
    /// Sorted by key; keys are unique.
    pub bindings: Vec<(String, String)>,
    /// Sorted; disjoint from binding keys.
    pub flags: Vec<String>,
}

impl Event {
    /// Build an event from unsorted parts, normalizing order.
    #[must_use]
    pub fn new(
        index: u64,
        mut bindings: Vec<(String, String)>,
        mut flags: Vec<String>,
    ) -> Event {
        bindings.sort();
        bindings.dedup_by(|a, b| a.0 == b.0);
        flags.sort();
        flags.dedup();
        Event {
            index,
            bindings,
            flags,
        }
    }

    #[must_use]
    pub fn binding(&self, key: &str) -> Option<&str> {
        self.bindings
            .binary_search_by(|(k, _)| k.as_str().cmp(key))
            .ok()
            .map(|i| self.bindings[i].1.as_str())
    }

    #[must_use]
    pub fn has_flag(&self, name: &str) -> bool {
        self.flags.binary_search_by(|f| f.as_str().cmp(name)).is_ok()
    }

    /// Presence of a name, as either flag or binding.
    #[must_use]
    pub fn mentions(&self, name: &str) -> bool {
        self.has_flag(name) || self.binding(name).is_some()
    }

    /// The value vector this event contributes under the given guard keys,
    /// if it binds all of them. An empty guard list matches every event.
    #[must_use]
    pub fn value_vector(&self, guard_keys: &[&str]) -> Option<Vec<String>> {
        guard_keys
            .iter()
            .map(|k| self.binding(k).map(str::to_owned))
            .collect()
    }
}

/// The body atoms of a property instantiated for one value vector, compiled
/// to per-event probes. `letter` turns an event into the bitmask over the
/// property's sorted atom list that the body monitor consumes.
#[derive(Clone, Debug)]
pub struct Grounding {
    probes: Vec<Probe>,
}

#[derive(Clone, Debug)]
enum Probe {
    /// 0-ary atom: name is mentioned at all.
    Presence(String),
    /// n-ary atom: name bound to exactly this value.
    Binding(String, String),
}

impl Grounding {
    /// Instantiate the atoms with the vector's values. Every atom argument
    /// must be bound by the prefix; the parser guarantees this.
    #[must_use]
    pub fn new(property: &Property, atoms: &[Atom], vector: &[String]) -> Grounding {
        let positions = property.variable_positions();
        let probes = atoms
            .iter()
            .map(|atom| {
                if atom.args.is_empty() {
                    Probe::Presence(atom.name.clone())
                } else {
                    let value = atom
                        .args
                        .iter()
                        .map(|v| vector[positions[v.as_str()]].as_str())
                        .collect::<Vec<_>>()
                        .join(",");
                    Probe::Binding(atom.name.clone(), value)
                }
            })
            .collect();
        Grounding { probes }
    }

    /// Bit `i` is set iff atom `i` holds at the event.
    #[must_use]
    pub fn letter(&self, event: &Event) -> u32 {
        let mut letter = 0u32;
        for (i, probe) in self.probes.iter().enumerate() {
            let holds = match probe {
                Probe::Presence(name) => event.mentions(name),
                Probe::Binding(name, value) => event.binding(name) == Some(value.as_str()),
            };
            if holds {
                letter |= 1 << i;
            }
        }
        letter
    }
}
