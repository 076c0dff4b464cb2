//! Reporting records emitted by the batch driver.

use std::fmt;

use serde::Serialize;

use crate::quant::TreeStats;
use crate::verdict::Verdict6;

/// Outcome of one processed batch.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BatchReport {
    /// 1-based sequence number of the batch.
    pub batch: u64,
    /// Events handed to the driver in this batch.
    pub events: u64,
    /// Events that produced a full value vector.
    pub matched: u64,
    /// Distinct value vectors in this batch.
    pub vectors: u64,
    /// Property verdict after the batch.
    pub verdict: Verdict6,
}

impl fmt::Display for BatchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "batch {}: events={} matched={} vectors={} verdict={}",
            self.batch, self.events, self.matched, self.vectors, self.verdict
        )
    }
}

/// Totals over every batch fed so far.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RunSummary {
    pub batches: u64,
    pub events: u64,
    pub matched: u64,
    pub verdict: Verdict6,
    pub tree: TreeStats,
}

impl fmt::Display for RunSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "verdict={} batches={} events={} matched={} nodes={} leaves={} latched={} trapped={}",
            self.verdict,
            self.batches,
            self.events,
            self.matched,
            self.tree.nodes,
            self.tree.leaves,
            self.tree.latched_nodes,
            self.tree.trapped_leaves
        )
    }
}
