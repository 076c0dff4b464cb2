//! Body monitor synthesis and execution.
//!
//! [`synthesize`] turns a quantifier-free body into a deterministic finite
//! state machine whose verdict after reading a finite word `u` is:
//!
//! - `True` when every infinite continuation of `u` satisfies the body;
//! - `False` when every infinite continuation violates it;
//! - `PresumablyTrue`/`PresumablyFalse` otherwise, by the finite-trace
//!   reading of `u` itself (missing futures count against `next` and the
//!   fulfilment of `until`).
//!
//! Inputs are *letters*: bitmasks over the body's sorted atom list, as
//! produced by [`crate::trace::Grounding::letter`]. The machine is total,
//! deterministic and canonical for the body; permanent verdicts are
//! absorbing states.

mod synth;
mod tableau;

pub use tableau::{SynthesisError, MAX_ATOMS, MAX_ELEMENTARY, MAX_KERNELS};

use crate::syntax::{Atom, Formula};
use crate::verdict::Verdict4;

#[derive(Clone, Copy, Debug)]
pub struct SynthOptions {
    /// Merge observationally equivalent states after construction.
    pub minimize: bool,
    /// Ceiling on constructed states before the error path triggers.
    pub max_states: usize,
}

impl Default for SynthOptions {
    fn default() -> Self {
        SynthOptions {
            minimize: true,
            max_states: 10_000,
        }
    }
}

/// Synthesis statistics, surfaced by the `explain` command.
#[derive(Clone, Debug)]
pub struct MonitorInfo {
    /// Kernel subformulas in post order, rendered as source text.
    pub kernels: Vec<String>,
    /// How many kernels are untils (the obligations liveness tracks).
    pub until_kernels: usize,
    pub elementary_sets: usize,
    pub live_sets: usize,
    /// States before and after minimization (equal when disabled).
    pub raw_states: usize,
    pub states: usize,
}

/// Deterministic body monitor.
#[derive(Clone, Debug)]
pub struct Monitor {
    atoms: Vec<Atom>,
    verdicts: Vec<Verdict4>,
    /// Row-major transition table, stride = number of letters.
    trans: Vec<u32>,
    initial: u32,
    info: MonitorInfo,
}

impl Monitor {
    #[must_use]
    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    #[must_use]
    pub fn letter_count(&self) -> usize {
        1 << self.atoms.len()
    }

    #[must_use]
    pub fn state_count(&self) -> usize {
        self.verdicts.len()
    }

    #[must_use]
    pub fn initial(&self) -> u32 {
        self.initial
    }

    #[inline]
    #[must_use]
    pub fn step(&self, state: u32, letter: u32) -> u32 {
        self.trans[state as usize * self.letter_count() + letter as usize]
    }

    #[inline]
    #[must_use]
    pub fn verdict(&self, state: u32) -> Verdict4 {
        self.verdicts[state as usize]
    }

    /// Permanent-verdict states never change again; callers may stop
    /// feeding them.
    #[inline]
    #[must_use]
    pub fn is_trap(&self, state: u32) -> bool {
        self.verdicts[state as usize].is_permanent()
    }

    #[must_use]
    pub fn info(&self) -> &MonitorInfo {
        &self.info
    }

    /// Run a whole word from the initial state; convenience for tests and
    /// offline checks.
    #[must_use]
    pub fn run(&self, letters: impl IntoIterator<Item = u32>) -> Verdict4 {
        let mut state = self.initial;
        for letter in letters {
            state = self.step(state, letter);
        }
        self.verdict(state)
    }
}

/// Synthesize the monitor for a body formula.
pub fn synthesize(body: &Formula, options: SynthOptions) -> Result<Monitor, SynthesisError> {
    let tab = tableau::build(body)?;
    let raw = synth::construct(&tab, options.max_states)?;
    let raw_states = raw.verdicts.len();
    let fsm = if options.minimize {
        synth::minimize(&raw, tab.letter_count())
    } else {
        raw
    };
    let info = MonitorInfo {
        kernels: tab.kernel_names.clone(),
        until_kernels: tab.until_count(),
        elementary_sets: tab.elementary.len(),
        live_sets: tab.live.iter().filter(|&&l| l).count(),
        raw_states,
        states: fsm.verdicts.len(),
    };
    Ok(Monitor {
        atoms: tab.atoms,
        verdicts: fsm.verdicts,
        trans: fsm.trans,
        initial: fsm.initial,
        info,
    })
}
