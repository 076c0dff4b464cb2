//! Report shapes and text rendering shared by the commands. Machine
//! output is JSON lines with a `schema` version; field sets only grow.

use serde::Serialize;

use ltl4c_core::monitor::Monitor;
use ltl4c_core::quant::DumpRow;
use ltl4c_core::verdict::Verdict6;

pub const SCHEMA: u32 = 1;

/// Offline check result: final verdict plus the per-node table.
#[derive(Serialize)]
pub struct RunReport {
    pub schema: u32,
    pub verdict: &'static str,
    pub events: u64,
    pub matched: u64,
    pub skipped: u64,
    pub elapsed_ms: f64,
    pub workers: usize,
    pub nodes: Vec<DumpRow>,
}

impl RunReport {
    pub fn human(&self) -> String {
        let mut out = format!(
            "verdict {}\nevents {} matched {} skipped {} elapsed {:.1}ms workers {}\n",
            self.verdict, self.events, self.matched, self.skipped, self.elapsed_ms, self.workers
        );
        out.push_str(&rows_text(&self.nodes));
        out
    }
}

pub fn rows_text(rows: &[DumpRow]) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    for row in rows {
        if row.path.is_empty() {
            out.push_str("(root)");
        } else {
            out.push_str(&row.path.join(","));
        }
        write!(out, " :: {} :: {}", row.kind, row.verdict).unwrap();
        if row.latched {
            out.push_str(" latched");
        }
        if let Some(c) = row.counts {
            write!(
                out,
                " :: [t={} ct={} pt={} pf={} cf={} f={}] lt={} lf={}",
                c[5], c[4], c[3], c[2], c[1], c[0], row.latched_true, row.latched_false
            )
            .unwrap();
        }
        out.push('\n');
    }
    out
}

/// Sort dump rows for display, comparing the listed depths numerically.
/// Children stay grouped under their parents because the first differing
/// component decides the order.
pub fn sort_rows(rows: &mut [DumpRow], numeric_depths: &[bool]) {
    rows.sort_by(|a, b| {
        for (depth, (x, y)) in a.path.iter().zip(&b.path).enumerate() {
            let numeric = numeric_depths.get(depth).copied().unwrap_or(false);
            let ord = if numeric {
                match (x.parse::<u64>(), y.parse::<u64>()) {
                    (Ok(u), Ok(v)) => u.cmp(&v),
                    _ => x.cmp(y),
                }
            } else {
                x.cmp(y)
            };
            if ord != std::cmp::Ordering::Equal {
                return ord;
            }
        }
        a.path.len().cmp(&b.path.len())
    });
}

/// Quantifier-tree half of an explain dump.
#[derive(Serialize)]
pub struct ExplainTree {
    pub schema: u32,
    pub verdict: &'static str,
    pub nodes: Vec<DumpRow>,
}

/// The body monitor as a table: one row per state with its verdict and
/// the target state for every letter.
#[derive(Serialize)]
pub struct FsmReport {
    pub schema: u32,
    pub atoms: Vec<String>,
    pub states: usize,
    pub initial: u32,
    pub rows: Vec<FsmState>,
}

#[derive(Serialize)]
pub struct FsmState {
    pub state: u32,
    pub verdict: &'static str,
    pub trap: bool,
    pub next: Vec<(String, u32)>,
}

pub fn fsm_report(monitor: &Monitor) -> FsmReport {
    let atoms: Vec<String> = monitor.atoms().iter().map(ToString::to_string).collect();
    let letters = monitor.letter_count() as u32;
    let label = |letter: u32| {
        let members: Vec<&str> = atoms
            .iter()
            .enumerate()
            .filter(|(i, _)| letter & (1 << i) != 0)
            .map(|(_, a)| a.as_str())
            .collect();
        format!("{{{}}}", members.join(","))
    };
    let rows = (0..monitor.state_count() as u32)
        .map(|state| FsmState {
            state,
            verdict: monitor.verdict(state).token(),
            trap: monitor.is_trap(state),
            next: (0..letters).map(|l| (label(l), monitor.step(state, l))).collect(),
        })
        .collect();
    FsmReport {
        schema: SCHEMA,
        atoms,
        states: monitor.state_count(),
        initial: monitor.initial(),
        rows,
    }
}

impl FsmReport {
    pub fn human(&self) -> String {
        use std::fmt::Write;
        let mut out = format!(
            "monitor: {} states over atoms [{}], initial s{}\n",
            self.states,
            self.atoms.join(", "),
            self.initial
        );
        for row in &self.rows {
            write!(out, "s{} [{}{}]", row.state, row.verdict, if row.trap { " trap" } else { "" })
                .unwrap();
            for (letter, target) in &row.next {
                write!(out, " {letter}:s{target}").unwrap();
            }
            out.push('\n');
        }
        out
    }
}

pub fn exit_code(verdict: Verdict6) -> i32 {
    if verdict.affirmative() {
        0
    } else {
        1
    }
}
