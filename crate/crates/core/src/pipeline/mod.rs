//! Deterministic data-parallel batch driver.
//!
//! Each batch runs four phases: extract one value vector per event,
//! sort by (vector, event index), compact runs into per-vector groups,
//! and apply the groups to the quantifier tree. Sorting uses a total
//! order over unique event indices and the tree applies updates in
//! event order, so verdicts and counters never depend on the worker
//! count or on where the trace is cut into batches.

mod report;

pub use report::{BatchReport, RunSummary};

use rayon::prelude::*;
use thiserror::Error;

use crate::monitor::{SynthOptions, SynthesisError};
use crate::quant::{QuantTree, TreeDump};
use crate::syntax::Property;
use crate::trace::Event;
use crate::verdict::Verdict6;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Synthesis(#[from] SynthesisError),
    #[error("thread pool: {0}")]
    ThreadPool(#[from] rayon::ThreadPoolBuildError),
}

#[derive(Clone, Copy, Debug, Default)]
pub struct PipelineOptions {
    /// Worker threads for the data-parallel phases; 0 picks one per
    /// available core. Explicit values are clamped to the machine's
    /// available parallelism: the phases are CPU bound, so oversubscribing
    /// cores only adds scheduler churn.
    pub threads: usize,
    pub synth: SynthOptions,
}

/// A property checker fed by batches of events.
pub struct Pipeline {
    tree: QuantTree,
    pool: rayon::ThreadPool,
    batches: u64,
    events: u64,
    matched: u64,
}

impl Pipeline {
    pub fn new(property: Property, options: PipelineOptions) -> Result<Pipeline, PipelineError> {
        let tree = QuantTree::new(property, options.synth)?;
        let available = std::thread::available_parallelism()
            .map(std::num::NonZeroUsize::get)
            .unwrap_or(1);
        let threads = match options.threads {
            0 => available,
            n => n.min(available),
        };
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build()?;
        Ok(Pipeline {
            tree,
            pool,
            batches: 0,
            events: 0,
            matched: 0,
        })
    }

    /// Effective worker count after clamping to available parallelism.
    #[must_use]
    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }

    /// Process one batch. Events may arrive in any order within the batch;
    /// their indices must be unique across the whole run.
    pub fn feed(&mut self, events: &[Event]) -> BatchReport {
        let keys: Vec<String> = self
            .tree
            .property()
            .guard_keys()
            .iter()
            .map(ToString::to_string)
            .collect();
        let tree = &mut self.tree;
        let (matched, vectors) = self.pool.install(|| {
            let key_refs: Vec<&str> = keys.iter().map(String::as_str).collect();
            let mut tagged: Vec<(Vec<String>, &Event)> = events
                .par_iter()
                .filter_map(|ev| ev.value_vector(&key_refs).map(|v| (v, ev)))
                .collect();
            tagged.par_sort_unstable_by(|a, b| a.0.cmp(&b.0).then(a.1.index.cmp(&b.1.index)));
            let matched = tagged.len() as u64;
            let mut groups: Vec<(Vec<String>, Vec<&Event>)> = Vec::new();
            for (vector, ev) in tagged {
                match groups.last_mut() {
                    Some((last, evs)) if *last == vector => evs.push(ev),
                    _ => groups.push((vector, vec![ev])),
                }
            }
            let vectors = groups.len() as u64;
            tree.apply_batch(&groups);
            (matched, vectors)
        });
        self.batches += 1;
        self.events += events.len() as u64;
        self.matched += matched;
        BatchReport {
            batch: self.batches,
            events: events.len() as u64,
            matched,
            vectors,
            verdict: self.tree.root_verdict(),
        }
    }

    #[must_use]
    pub fn verdict(&self) -> Verdict6 {
        self.tree.root_verdict()
    }

    #[must_use]
    pub fn tree(&self) -> &QuantTree {
        &self.tree
    }

    #[must_use]
    pub fn dump(&self) -> TreeDump {
        self.tree.dump()
    }

    #[must_use]
    pub fn summary(&self) -> RunSummary {
        RunSummary {
            batches: self.batches,
            events: self.events,
            matched: self.matched,
            verdict: self.tree.root_verdict(),
            tree: self.tree.stats(),
        }
    }
}
