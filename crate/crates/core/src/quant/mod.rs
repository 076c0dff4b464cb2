//! Quantifier tree: one node per observed value-vector prefix, one leaf
//! monitor per full vector, six-valued verdicts derived bottom-up from
//! child verdict counters.
//!
//! Verdict updates are event-exact. Leaves step their trace slices in
//! parallel and emit a report whenever their verdict changes; a sequential
//! replay then applies the reports in ascending event order. Every event
//! maps to exactly one value vector, so event indices give a unique global
//! order and the visible tree (counters, verdicts, latch points) is
//! identical for every batch partitioning and worker count.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::monitor::{synthesize, Monitor, SynthOptions, SynthesisError};
use crate::syntax::{Atom, Bound, CmpOp, Property, QuantKind, Quantifier};
use crate::trace::{Event, Grounding};
use crate::verdict::{Verdict4, Verdict6};

const NO_PARENT: u32 = u32::MAX;

/// Does a satisfied-count of `count` out of `total` children meet the
/// quantifier constraint? Percentage bounds compare exactly via
/// cross-multiplication; instance bounds ignore `total`.
#[must_use]
pub fn constraint_holds(q: &Quantifier, count: u64, total: u64) -> bool {
    q.cmp.holds(q.bound.compare_scaled(count, total))
}

/// Permanent verdict forced by monotone counters alone, if any.
///
/// `latched_true` / `latched_false` count children whose verdicts are
/// permanent. They never decrease and the observed child set only grows,
/// so each condition below stays true forever once it fires. Percentage
/// quantifiers latch only on a violated 100% bound; no other percentage
/// constraint is decidable while the domain can still grow.
#[must_use]
pub fn latch_verdict(q: &Quantifier, latched_true: u64, latched_false: u64) -> Option<Verdict6> {
    match (q.kind, q.cmp, q.bound) {
        (QuantKind::Instance, CmpOp::Gt, Bound::Count(c)) if latched_true > c => {
            Some(Verdict6::True)
        }
        (QuantKind::Instance, CmpOp::Ge, Bound::Count(c)) if latched_true >= c => {
            Some(Verdict6::True)
        }
        (QuantKind::Instance, CmpOp::Eq | CmpOp::Le, Bound::Count(c)) if latched_true > c => {
            Some(Verdict6::False)
        }
        (QuantKind::Instance, CmpOp::Lt, Bound::Count(c)) if latched_true >= c => {
            Some(Verdict6::False)
        }
        (QuantKind::Percentage, CmpOp::Eq | CmpOp::Ge, Bound::Ratio(r))
            if r.numer() == r.denom() && latched_false >= 1 =>
        {
            Some(Verdict6::False)
        }
        _ => None,
    }
}

/// Six-valued verdict from the current child counters; first match wins.
/// Evaluation order: vacuous, permanent true, permanent false, currently
/// true, currently false, presumably true, presumably false.
#[must_use]
pub fn node_verdict(
    q: &Quantifier,
    counts: &[u64; 6],
    latched_true: u64,
    latched_false: u64,
) -> Verdict6 {
    let n: u64 = counts.iter().sum();
    if n == 0 {
        // No observed instances yet: classify by the vacuous constraint.
        return if constraint_holds(q, 0, 0) {
            Verdict6::PresumablyTrue
        } else {
            Verdict6::PresumablyFalse
        };
    }
    if let Some(v) = latch_verdict(q, latched_true, latched_false) {
        return v;
    }
    // Instance bounds report permanent satisfaction whenever the count of
    // permanently satisfied children currently meets them; for = / <= / <
    // this can later flip to a latched violation.
    if q.kind == QuantKind::Instance && constraint_holds(q, latched_true, n) {
        return Verdict6::True;
    }
    let certain_true = counts[Verdict6::True.index()] + counts[Verdict6::CurrentlyTrue.index()];
    if constraint_holds(q, certain_true, n) {
        return Verdict6::CurrentlyTrue;
    }
    let not_false = n - counts[Verdict6::False.index()] - counts[Verdict6::CurrentlyFalse.index()];
    if !constraint_holds(q, not_false, n) {
        // Even counting every non-false child as satisfied fails the bound.
        return Verdict6::CurrentlyFalse;
    }
    if constraint_holds(q, certain_true + counts[Verdict6::PresumablyTrue.index()], n) {
        return Verdict6::PresumablyTrue;
    }
    Verdict6::PresumablyFalse
}

struct Node {
    parent: u32,
    depth: u16,
    /// Value of the next variable -> child id. Node ids below the last
    /// quantifier level, leaf ids at it.
    children: BTreeMap<String, u32>,
    /// Child verdict counters indexed by `Verdict6::index`.
    counts: [u64; 6],
    latched_true: u64,
    latched_false: u64,
    reported: Verdict6,
    latched: bool,
    /// Whether the parent's counters include this node.
    counted: bool,
}

struct Leaf {
    parent: u32,
    grounding: Grounding,
    state: u32,
    reported: Verdict4,
    counted: bool,
    active: bool,
}

/// One leaf verdict change, keyed by the event that caused it.
struct Report {
    index: u64,
    leaf: u32,
    verdict: Verdict4,
}

/// One row of a tree dump: a quantifier node (with counters) or a leaf
/// monitor (without). Rows are ordered lexicographically by path.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DumpRow {
    pub path: Vec<String>,
    pub kind: String,
    pub verdict: String,
    pub latched: bool,
    pub counts: Option<[u64; 6]>,
    pub latched_true: u64,
    pub latched_false: u64,
}

/// Stable snapshot of every node and leaf, for explain output and for
/// comparing runs against each other.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TreeDump {
    pub rows: Vec<DumpRow>,
}

impl fmt::Display for TreeDump {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.rows {
            if row.path.is_empty() {
                write!(f, "(root)")?;
            } else {
                write!(f, "{}", row.path.join(","))?;
            }
            write!(f, " :: {} :: {}", row.kind, row.verdict)?;
            if row.latched {
                write!(f, " latched")?;
            }
            if let Some(c) = row.counts {
                write!(
                    f,
                    " :: [t={} ct={} pt={} pf={} cf={} f={}] lt={} lf={}",
                    c[5], c[4], c[3], c[2], c[1], c[0], row.latched_true, row.latched_false
                )?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Running totals maintained by the tree.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct TreeStats {
    pub nodes: usize,
    pub leaves: usize,
    pub latched_nodes: usize,
    pub trapped_leaves: usize,
    pub events_seen: u64,
    pub reports_applied: u64,
}

pub struct QuantTree {
    property: Property,
    monitor: Monitor,
    atoms: Vec<Atom>,
    nodes: Vec<Node>,
    leaves: Vec<Leaf>,
    leaf_index: HashMap<Vec<String>, u32>,
    root_leaf: Option<u32>,
    events_seen: u64,
    reports_applied: u64,
}

impl QuantTree {
    /// Synthesize the body monitor and set up an empty tree. A property
    /// without quantifiers gets a single root leaf fed by every event.
    pub fn new(property: Property, options: SynthOptions) -> Result<QuantTree, SynthesisError> {
        let monitor = synthesize(&property.body, options)?;
        let atoms = property.body.predicate_atoms();
        let mut tree = QuantTree {
            property,
            monitor,
            atoms,
            nodes: Vec::new(),
            leaves: Vec::new(),
            leaf_index: HashMap::new(),
            root_leaf: None,
            events_seen: 0,
            reports_applied: 0,
        };
        if tree.property.prefix.is_empty() {
            let grounding = Grounding::new(&tree.property, &tree.atoms, &[]);
            let initial = tree.monitor.initial();
            tree.leaves.push(Leaf {
                parent: NO_PARENT,
                grounding,
                state: initial,
                reported: tree.monitor.verdict(initial),
                counted: false,
                active: true,
            });
            tree.root_leaf = Some(0);
            tree.leaf_index.insert(Vec::new(), 0);
        } else {
            let q = &tree.property.prefix[0];
            tree.nodes.push(Node {
                parent: NO_PARENT,
                depth: 0,
                children: BTreeMap::new(),
                counts: [0; 6],
                latched_true: 0,
                latched_false: 0,
                reported: node_verdict(q, &[0; 6], 0, 0),
                latched: false,
                counted: false,
            });
        }
        Ok(tree)
    }

    #[must_use]
    pub fn property(&self) -> &Property {
        &self.property
    }

    #[must_use]
    pub fn monitor(&self) -> &Monitor {
        &self.monitor
    }

    /// Current verdict of the whole property.
    #[must_use]
    pub fn root_verdict(&self) -> Verdict6 {
        match self.root_leaf {
            Some(l) => Verdict6::from(self.leaves[l as usize].reported),
            None => self.nodes[0].reported,
        }
    }

    #[must_use]
    pub fn stats(&self) -> TreeStats {
        TreeStats {
            nodes: self.nodes.len(),
            leaves: self.leaves.len(),
            latched_nodes: self.nodes.iter().filter(|n| n.latched).count(),
            trapped_leaves: self
                .leaves
                .iter()
                .filter(|l| l.reported.is_permanent() && l.counted)
                .count(),
            events_seen: self.events_seen,
            reports_applied: self.reports_applied,
        }
    }

    /// Ensure the path for `vector` exists; returns the leaf id. Idempotent
    /// for vectors already present.
    fn spawn(&mut self, vector: &[String]) -> u32 {
        if let Some(&id) = self.leaf_index.get(vector) {
            return id;
        }
        debug_assert_eq!(vector.len(), self.property.prefix.len());
        let depth_n = self.property.prefix.len();
        let mut node = 0u32;
        for (d, value) in vector.iter().enumerate().take(depth_n - 1) {
            if let Some(&c) = self.nodes[node as usize].children.get(value) {
                node = c;
                continue;
            }
            let child = self.nodes.len() as u32;
            let q = &self.property.prefix[d + 1];
            let reported = node_verdict(q, &[0; 6], 0, 0);
            self.nodes.push(Node {
                parent: node,
                depth: (d + 1) as u16,
                children: BTreeMap::new(),
                counts: [0; 6],
                latched_true: 0,
                latched_false: 0,
                reported,
                latched: false,
                counted: false,
            });
            self.nodes[node as usize].children.insert(value.clone(), child);
            node = child;
        }
        let leaf = self.leaves.len() as u32;
        let grounding = Grounding::new(&self.property, &self.atoms, vector);
        let initial = self.monitor.initial();
        self.leaves.push(Leaf {
            parent: node,
            grounding,
            state: initial,
            reported: self.monitor.verdict(initial),
            counted: false,
            active: true,
        });
        self.nodes[node as usize]
            .children
            .insert(vector[depth_n - 1].clone(), leaf);
        self.leaf_index.insert(vector.to_vec(), leaf);
        leaf
    }

    /// True when some ancestor's counters are frozen, so this leaf's
    /// updates could never become visible.
    fn leaf_suspended(&self, leaf: u32) -> bool {
        let mut node = self.leaves[leaf as usize].parent;
        while node != NO_PARENT {
            let nd = &self.nodes[node as usize];
            if nd.latched {
                return true;
            }
            node = nd.parent;
        }
        false
    }

    /// Feed one batch. `groups` pairs each distinct value vector with its
    /// slice events in ascending index order; every event belongs to
    /// exactly one group and indices are unique across the whole trace.
    pub fn apply_batch(&mut self, groups: &[(Vec<String>, Vec<&Event>)]) {
        let mut jobs: Vec<(u32, &[&Event])> = Vec::with_capacity(groups.len());
        for (vector, events) in groups {
            self.events_seen += events.len() as u64;
            let leaf = self.spawn(vector);
            if self.leaves[leaf as usize].active && !self.leaf_suspended(leaf) {
                jobs.push((leaf, events.as_slice()));
            }
        }

        // Distribute: step each leaf over its slice, recording verdict
        // changes. Leaves are disjoint, so this is embarrassingly parallel.
        let monitor = &self.monitor;
        let leaves = &self.leaves;
        let outcomes: Vec<(u32, u32, bool, Vec<Report>)> = jobs
            .par_iter()
            .map(|&(leaf_id, events)| {
                let leaf = &leaves[leaf_id as usize];
                let mut state = leaf.state;
                let mut last = leaf.counted.then_some(leaf.reported);
                let mut active = true;
                let mut reports = Vec::new();
                for ev in events {
                    state = monitor.step(state, leaf.grounding.letter(ev));
                    let v = monitor.verdict(state);
                    if last != Some(v) || !leaf.counted && reports.is_empty() {
                        reports.push(Report {
                            index: ev.index,
                            leaf: leaf_id,
                            verdict: v,
                        });
                        last = Some(v);
                    }
                    if monitor.is_trap(state) {
                        // Verdict can never change again; skip the rest.
                        active = false;
                        break;
                    }
                }
                (leaf_id, state, active, reports)
            })
            .collect();

        let mut log: Vec<Report> = Vec::new();
        for (leaf_id, state, active, reports) in outcomes {
            let leaf = &mut self.leaves[leaf_id as usize];
            leaf.state = state;
            leaf.active = active;
            log.extend(reports);
        }
        // Event indices are unique, so this order is total.
        log.sort_unstable_by_key(|r| r.index);
        for r in log {
            self.replay(&r);
        }
    }

    /// Apply one leaf report, updating counters up the ancestor chain.
    fn replay(&mut self, r: &Report) {
        self.reports_applied += 1;
        let parent = self.leaves[r.leaf as usize].parent;
        if parent == NO_PARENT {
            let leaf = &mut self.leaves[r.leaf as usize];
            leaf.reported = r.verdict;
            leaf.counted = true;
            return;
        }
        // A latched ancestor freezes the whole path below it: the report
        // arrived after the freeze point, so it must leave no trace.
        let mut node = parent;
        while node != NO_PARENT {
            let nd = &self.nodes[node as usize];
            if nd.latched {
                return;
            }
            node = nd.parent;
        }
        let leaf = &mut self.leaves[r.leaf as usize];
        let old = leaf.counted.then(|| Verdict6::from(leaf.reported));
        let new = Verdict6::from(r.verdict);
        let permanent = r.verdict.is_permanent();
        leaf.reported = r.verdict;
        leaf.counted = true;
        self.propagate(parent, old, new, permanent);
    }

    /// Walk from `start` to the root, applying one child transition at each
    /// level and stopping as soon as a node's verdict is unchanged.
    fn propagate(&mut self, start: u32, old0: Option<Verdict6>, new0: Verdict6, perm0: bool) {
        let prefix = &self.property.prefix;
        let nodes = &mut self.nodes;
        let mut node = start;
        let mut old = old0;
        let mut new = new0;
        let mut newly_permanent = perm0;
        loop {
            let nd = &mut nodes[node as usize];
            debug_assert!(!nd.latched);
            if let Some(o) = old {
                nd.counts[o.index()] -= 1;
            }
            nd.counts[new.index()] += 1;
            if newly_permanent {
                if new == Verdict6::True {
                    nd.latched_true += 1;
                } else {
                    nd.latched_false += 1;
                }
            }
            let q = &prefix[nd.depth as usize];
            let (reported, just_latched) =
                match latch_verdict(q, nd.latched_true, nd.latched_false) {
                    Some(v) => (v, true),
                    None => (
                        node_verdict(q, &nd.counts, nd.latched_true, nd.latched_false),
                        false,
                    ),
                };
            let changed = !nd.counted || nd.reported != reported;
            let old_up = nd.counted.then_some(nd.reported);
            nd.reported = reported;
            nd.counted = true;
            if just_latched {
                nd.latched = true;
            }
            if !changed && !just_latched {
                return;
            }
            let parent = nd.parent;
            if parent == NO_PARENT {
                return;
            }
            old = old_up;
            new = reported;
            newly_permanent = just_latched;
            node = parent;
        }
    }

    /// Snapshot every node and leaf in lexicographic path order.
    #[must_use]
    pub fn dump(&self) -> TreeDump {
        let mut rows = Vec::new();
        if let Some(l) = self.root_leaf {
            let leaf = &self.leaves[l as usize];
            rows.push(DumpRow {
                path: Vec::new(),
                kind: "monitor".into(),
                verdict: leaf.reported.token().into(),
                latched: leaf.reported.is_permanent(),
                counts: None,
                latched_true: 0,
                latched_false: 0,
            });
        } else {
            let mut path = Vec::new();
            self.dump_node(0, &mut path, &mut rows);
        }
        TreeDump { rows }
    }

    fn dump_node(&self, node: u32, path: &mut Vec<String>, rows: &mut Vec<DumpRow>) {
        let nd = &self.nodes[node as usize];
        rows.push(DumpRow {
            path: path.clone(),
            kind: self.property.prefix[nd.depth as usize].to_string(),
            verdict: nd.reported.token().into(),
            latched: nd.latched,
            counts: Some(nd.counts),
            latched_true: nd.latched_true,
            latched_false: nd.latched_false,
        });
        let leaf_level = nd.depth as usize == self.property.prefix.len() - 1;
        for (value, &child) in &nd.children {
            path.push(value.clone());
            if leaf_level {
                let leaf = &self.leaves[child as usize];
                rows.push(DumpRow {
                    path: path.clone(),
                    kind: "monitor".into(),
                    verdict: leaf.reported.token().into(),
                    latched: leaf.reported.is_permanent(),
                    counts: None,
                    latched_true: 0,
                    latched_false: 0,
                });
            } else {
                self.dump_node(child, path, rows);
            }
            path.pop();
        }
    }
}
