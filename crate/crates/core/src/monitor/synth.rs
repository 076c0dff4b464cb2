//! Deterministic monitor construction over the tableau.
//!
//! A monitor state tracks, for the word read so far, which live tableau
//! positions are reachable when the run starts on the satisfying side and on
//! the violating side, plus the finite-trace residual of the body and the
//! finite-trace value of the word itself. An empty violating side means
//! every infinite continuation satisfies the body (permanent true); an empty
//! satisfying side means every continuation violates it (permanent false).
//! Both sides share one tableau: they differ only in their initial
//! positions. Permanent states collapse to shared sentinels, which makes
//! them absorbing by construction.
//!
//! States are discovered breadth first and numbered in discovery order, so
//! the same body always yields the same automaton. An optional final pass
//! merges observationally equivalent states (same verdict now and after
//! every input), which produces the canonical minimal form.

use super::tableau::{SynthesisError, Table, Tableau};
use crate::verdict::Verdict4;
use std::collections::{HashMap, VecDeque};

#[derive(Clone, PartialEq, Eq, Hash)]
enum Key {
    Bottom,
    Top,
    Live {
        sat: Vec<u16>,
        viol: Vec<u16>,
        residual: Table,
        fltl: bool,
    },
}

pub(crate) struct RawFsm {
    pub verdicts: Vec<Verdict4>,
    /// Row-major: `trans[state * letters + letter]`.
    pub trans: Vec<u32>,
    pub initial: u32,
}

fn classify(sat: Vec<u16>, viol: Vec<u16>, residual: Table, fltl: bool) -> Key {
    debug_assert!(
        !(sat.is_empty() && viol.is_empty()),
        "every word has some continuation"
    );
    if viol.is_empty() {
        Key::Top
    } else if sat.is_empty() {
        Key::Bottom
    } else {
        Key::Live {
            sat,
            viol,
            residual,
            fltl,
        }
    }
}

/// Union of live successors of the members that spell the given letter.
fn advance(tab: &Tableau, side: &[u16], letter: u32) -> Vec<u16> {
    let mut out: Vec<u16> = Vec::new();
    for &pos in side {
        if tab.letter_of[pos as usize] == letter {
            out.extend_from_slice(&tab.succ[pos as usize]);
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

pub(crate) fn construct(tab: &Tableau, max_states: usize) -> Result<RawFsm, SynthesisError> {
    let letters = tab.letter_count();

    let mut sat0 = Vec::new();
    let mut viol0 = Vec::new();
    for (pos, &m) in tab.elementary.iter().enumerate() {
        if !tab.live[pos] {
            continue;
        }
        if tab.body_table.get(m) {
            sat0.push(pos as u16);
        } else {
            viol0.push(pos as u16);
        }
    }
    // Kernel assignment 0 is "all kernels false", the empty-word reading.
    let init = classify(sat0, viol0, tab.body_table.clone(), tab.body_table.get(0));

    let mut ids: HashMap<Key, u32> = HashMap::new();
    let mut keys: Vec<Key> = Vec::new();
    let mut queue = VecDeque::new();
    let mut intern = |key: Key, keys: &mut Vec<Key>, queue: &mut VecDeque<u32>| -> Result<u32, SynthesisError> {
        if let Some(&id) = ids.get(&key) {
            return Ok(id);
        }
        if keys.len() >= max_states {
            return Err(SynthesisError::BudgetExceeded {
                what: "monitor states",
                n: keys.len() + 1,
                max: max_states,
            });
        }
        let id = keys.len() as u32;
        ids.insert(key.clone(), id);
        keys.push(key);
        queue.push_back(id);
        Ok(id)
    };

    let initial = intern(init, &mut keys, &mut queue)?;
    let mut trans: Vec<u32> = Vec::new();
    while let Some(id) = queue.pop_front() {
        debug_assert_eq!(trans.len(), id as usize * letters);
        let key = keys[id as usize].clone();
        for letter in 0..letters as u32 {
            let next = match &key {
                Key::Top | Key::Bottom => id,
                Key::Live { sat, viol, residual, .. } => {
                    let sat2 = advance(tab, sat, letter);
                    let viol2 = advance(tab, viol, letter);
                    let beta = &tab.beta[letter as usize];
                    let key2 = classify(
                        sat2,
                        viol2,
                        residual.compose(beta),
                        residual.get(tab.nu[letter as usize]),
                    );
                    intern(key2, &mut keys, &mut queue)?
                }
            };
            trans.push(next);
        }
    }

    let verdicts = keys
        .iter()
        .map(|k| match k {
            Key::Top => Verdict4::True,
            Key::Bottom => Verdict4::False,
            Key::Live { fltl: true, .. } => Verdict4::PresumablyTrue,
            Key::Live { fltl: false, .. } => Verdict4::PresumablyFalse,
        })
        .collect();

    Ok(RawFsm {
        verdicts,
        trans,
        initial,
    })
}

/// Merge states with the same verdict and, recursively, the same behavior:
/// standard partition refinement against the verdict output.
pub(crate) fn minimize(fsm: &RawFsm, letters: usize) -> RawFsm {
    let n = fsm.verdicts.len();
    // Seed classes by verdict, numbered by first occurrence.
    let mut class: Vec<u32> = Vec::with_capacity(n);
    let mut seed: HashMap<Verdict4, u32> = HashMap::new();
    for &v in &fsm.verdicts {
        let next = seed.len() as u32;
        class.push(*seed.entry(v).or_insert(next));
    }
    let mut count = seed.len();

    loop {
        let mut fresh: HashMap<Vec<u32>, u32> = HashMap::new();
        let mut next_class = Vec::with_capacity(n);
        for s in 0..n {
            let mut sig = Vec::with_capacity(letters + 1);
            sig.push(class[s]);
            for a in 0..letters {
                sig.push(class[fsm.trans[s * letters + a] as usize]);
            }
            let next = fresh.len() as u32;
            next_class.push(*fresh.entry(sig).or_insert(next));
        }
        let new_count = fresh.len();
        class = next_class;
        if new_count == count {
            break;
        }
        count = new_count;
    }

    // Representative of a class: its first state in id order; classes are
    // already numbered by first occurrence, so class ids are the new ids.
    let mut rep = vec![u32::MAX; count];
    for s in (0..n).rev() {
        rep[class[s] as usize] = s as u32;
    }
    let mut verdicts = Vec::with_capacity(count);
    let mut trans = Vec::with_capacity(count * letters);
    for &r in &rep {
        let s = r as usize;
        verdicts.push(fsm.verdicts[s]);
        for a in 0..letters {
            trans.push(class[fsm.trans[s * letters + a] as usize]);
        }
    }
    RawFsm {
        verdicts,
        trans,
        initial: class[fsm.initial as usize],
    }
}
