//! Seeded workload generators for common monitoring shapes. The same seed
//! always yields the same event sequence, independent of platform.

use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::trace::Event;

/// A generated workload: a property and a matching event shape.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shape {
    /// Request/response over a fixed socket pool; socket 0 never responds,
    /// so one socket of the pool can never satisfy the body.
    Sockets,
    /// Allocate/release over an unbounded id space; stresses tree growth.
    Chunks,
    /// Lookups over a fixed key space with a counted success bound.
    Cache,
}

impl Shape {
    #[must_use]
    pub fn property_text(self) -> &'static str {
        match self {
            Shape::Sockets => "forall[>=0.95] s : socket(s) => G (receive(s) -> F respond(s))",
            Shape::Chunks => "forall c : chunk(c) => G (alloc(c) -> F free(c))",
            Shape::Cache => "exists[>=100] k : key(k) => F hit(k)",
        }
    }

    /// Object cardinality used when none is given: pool size for sockets,
    /// key-space size for cache, live-set cap for chunks.
    #[must_use]
    pub fn default_objects(self) -> u64 {
        match self {
            Shape::Sockets => 20,
            Shape::Chunks => u64::MAX,
            Shape::Cache => 1000,
        }
    }

    #[must_use]
    pub fn name(self) -> &'static str {
        match self {
            Shape::Sockets => "sockets",
            Shape::Chunks => "chunks",
            Shape::Cache => "cache",
        }
    }
}

impl FromStr for Shape {
    type Err = String;

    fn from_str(s: &str) -> Result<Shape, String> {
        match s {
            "sockets" => Ok(Shape::Sockets),
            "chunks" => Ok(Shape::Chunks),
            "cache" => Ok(Shape::Cache),
            other => Err(format!(
                "unknown shape {other:?} (expected sockets, chunks or cache)"
            )),
        }
    }
}

enum ShapeState {
    Sockets { outstanding: Vec<bool> },
    Chunks { live: Vec<u64>, next_id: u64 },
    Cache,
}

/// Iterator producing `events` seeded events for a shape.
pub struct TraceGen {
    rng: ChaCha8Rng,
    state: ShapeState,
    objects: u64,
    remaining: u64,
    next_index: u64,
}

#[must_use]
pub fn trace(shape: Shape, seed: u64, events: u64) -> TraceGen {
    trace_sized(shape, seed, events, shape.default_objects())
}

/// Like [`trace`] with an explicit object cardinality. Pool-backed shapes
/// cap the pool at 2^24 objects to keep state bounded.
#[must_use]
pub fn trace_sized(shape: Shape, seed: u64, events: u64, objects: u64) -> TraceGen {
    let objects = objects.max(1);
    let pool = objects.min(1 << 24);
    let state = match shape {
        Shape::Sockets => ShapeState::Sockets {
            outstanding: vec![false; pool as usize],
        },
        Shape::Chunks => ShapeState::Chunks {
            live: Vec::new(),
            next_id: 0,
        },
        Shape::Cache => ShapeState::Cache,
    };
    let objects = match shape {
        Shape::Sockets => pool,
        Shape::Chunks | Shape::Cache => objects,
    };
    TraceGen {
        rng: ChaCha8Rng::seed_from_u64(seed),
        state,
        objects,
        remaining: events,
        next_index: 0,
    }
}

impl Iterator for TraceGen {
    type Item = Event;

    fn next(&mut self) -> Option<Event> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        let index = self.next_index;
        self.next_index += 1;
        let bindings = match &mut self.state {
            ShapeState::Sockets { outstanding } => {
                let s = self.rng.random_range(0..self.objects) as usize;
                let value = s.to_string();
                // Socket 0 is deaf: it receives but never responds.
                if s != 0 && outstanding[s] && self.rng.random_bool(0.7) {
                    outstanding[s] = false;
                    vec![
                        ("respond".to_string(), value.clone()),
                        ("socket".to_string(), value),
                    ]
                } else {
                    outstanding[s] = true;
                    vec![
                        ("receive".to_string(), value.clone()),
                        ("socket".to_string(), value),
                    ]
                }
            }
            ShapeState::Chunks { live, next_id } => {
                let can_alloc = (live.len() as u64) < self.objects;
                if can_alloc && (live.is_empty() || self.rng.random_bool(0.55)) {
                    let id = *next_id;
                    *next_id += 1;
                    live.push(id);
                    let value = id.to_string();
                    vec![
                        ("alloc".to_string(), value.clone()),
                        ("chunk".to_string(), value),
                    ]
                } else {
                    let i = self.rng.random_range(0..live.len());
                    let id = live.swap_remove(i);
                    let value = id.to_string();
                    vec![
                        ("free".to_string(), value.clone()),
                        ("chunk".to_string(), value),
                    ]
                }
            }
            ShapeState::Cache => {
                let k = self.rng.random_range(0..self.objects);
                let value = k.to_string();
                let op = if self.rng.random_bool(0.6) {
                    "hit"
                } else {
                    "miss"
                };
                vec![(op.to_string(), value.clone()), ("key".to_string(), value)]
            }
        };
        Some(Event::new(index, bindings, Vec::new()))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = usize::try_from(self.remaining).unwrap_or(usize::MAX);
        (n, Some(n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_property;

    #[test]
    fn properties_parse() {
        for shape in [Shape::Sockets, Shape::Chunks, Shape::Cache] {
            parse_property(shape.property_text())
                .unwrap_or_else(|e| panic!("{}: {e}", shape.name()));
        }
    }

    #[test]
    fn same_seed_same_events() {
        for shape in [Shape::Sockets, Shape::Chunks, Shape::Cache] {
            let a: Vec<Event> = trace(shape, 7, 200).collect();
            let b: Vec<Event> = trace(shape, 7, 200).collect();
            let c: Vec<Event> = trace(shape, 8, 200).collect();
            assert_eq!(a, b);
            assert_ne!(a, c);
            assert_eq!(a.len(), 200);
            assert!(a.iter().enumerate().all(|(i, ev)| ev.index == i as u64));
        }
    }

    #[test]
    fn socket_events_slice_by_socket() {
        let property = parse_property(Shape::Sockets.property_text()).unwrap();
        let keys = property.guard_keys();
        for ev in trace(Shape::Sockets, 1, 500) {
            let vector = ev.value_vector(&keys).expect("every event names a socket");
            assert_eq!(vector.len(), 1);
            let s: u64 = vector[0].parse().unwrap();
            assert!(s < Shape::Sockets.default_objects());
            if s == 0 {
                assert!(ev.binding("respond").is_none());
            }
        }
    }

    #[test]
    fn object_cardinality_controls_the_pool() {
        let sockets: std::collections::BTreeSet<String> = trace_sized(Shape::Sockets, 3, 2000, 100)
            .map(|ev| ev.binding("socket").unwrap().to_string())
            .collect();
        assert!(sockets.len() > 20, "pool of 100 must exceed the default");
        assert!(sockets.iter().all(|s| s.parse::<u64>().unwrap() < 100));
        let mut live = 0i64;
        let mut peak = 0i64;
        for ev in trace_sized(Shape::Chunks, 3, 2000, 8) {
            if ev.binding("alloc").is_some() {
                live += 1;
            } else {
                live -= 1;
            }
            peak = peak.max(live);
        }
        assert!(peak <= 8, "live chunks exceeded the cap: {peak}");
        let keys: std::collections::BTreeSet<String> = trace_sized(Shape::Cache, 3, 500, 2)
            .map(|ev| ev.binding("key").unwrap().to_string())
            .collect();
        assert!(keys.len() <= 2);
    }

    #[test]
    fn shape_names_round_trip() {
        for shape in [Shape::Sockets, Shape::Chunks, Shape::Cache] {
            assert_eq!(shape.name().parse::<Shape>().unwrap(), shape);
        }
        assert!("gpu".parse::<Shape>().is_err());
    }
}
