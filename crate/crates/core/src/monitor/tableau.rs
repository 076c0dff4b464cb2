//! Tableau machinery behind body monitor synthesis.
//!
//! The body's *kernels* are its predicate, next and until subformulas, in
//! post order (every kernel's strict subformulas precede it). Any subformula
//! is then a boolean function of kernel truth values, represented as a
//! [`Table`]: a truth table with one bit per kernel assignment.
//!
//! An *elementary set* is a kernel assignment that is locally consistent for
//! every until kernel `c U d`: `d` now forces the until now, and the until
//! now without `d` forces `c` now. Elementary sets are the tableau states;
//! `m` steps to `m'` when every next kernel in `m` agrees with its subformula
//! at `m'` and every until kernel satisfies the expansion
//! `u = d | (c & u')`. A set is *live* when some run from it fulfils every
//! until infinitely often; liveness is decided on the counter product
//! (elementary set x until index) by finding accepting states on cycles and
//! everything that reaches them.
//!
//! The same machinery drives the finite-trace reading of the body: `beta`
//! maps, per input letter, the kernel assignment of a suffix to the kernel
//! assignment of letter-then-suffix, so composing a truth table with `beta`
//! is exactly reading one letter; `nu` is the kernel assignment of the
//! one-letter word.

use crate::syntax::{Atom, Formula};
use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use std::collections::HashMap;
use thiserror::Error;

/// Hard ceilings for synthesis; properties over the line get a budget error
/// instead of an attempt to allocate the moon.
pub const MAX_ATOMS: usize = 10;
pub const MAX_KERNELS: usize = 12;
pub const MAX_ELEMENTARY: usize = 1024;
pub const MAX_TABLEAU_EDGES: usize = 200_000;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum SynthesisError {
    #[error("body has {n} distinct atoms, limit is {max}")]
    TooManyAtoms { n: usize, max: usize },
    #[error("body has {n} temporal kernels, limit is {max}")]
    TooManyKernels { n: usize, max: usize },
    #[error("synthesis budget exceeded: {what} reached {n}, limit is {max}")]
    BudgetExceeded {
        what: &'static str,
        n: usize,
        max: usize,
    },
}

/// Truth table over `k` kernel variables: bit `m` is the formula's value
/// under kernel assignment `m`. Unused high bits stay zero so tables compare
/// and hash by value.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Table {
    k: u32,
    bits: Vec<u64>,
}

impl Table {
    fn words(k: u32) -> usize {
        1usize << k.saturating_sub(6)
    }

    /// Mask for the meaningful bits of the last word.
    fn tail_mask(k: u32) -> u64 {
        if k >= 6 {
            u64::MAX
        } else {
            (1u64 << (1u32 << k)) - 1
        }
    }

    #[must_use]
    pub fn zeros(k: u32) -> Table {
        Table {
            k,
            bits: vec![0; Self::words(k)],
        }
    }

    #[must_use]
    pub fn ones(k: u32) -> Table {
        let mut t = Table {
            k,
            bits: vec![u64::MAX; Self::words(k)],
        };
        *t.bits.last_mut().unwrap() &= Self::tail_mask(k);
        t
    }

    /// Table of kernel variable `i`: true exactly where bit `i` of the
    /// assignment index is set.
    #[must_use]
    pub fn var(k: u32, i: usize) -> Table {
        let mut t = Table::zeros(k);
        for m in 0..(1u32 << k) {
            if m >> i & 1 == 1 {
                t.set(m);
            }
        }
        t
    }

    pub fn set(&mut self, m: u32) {
        self.bits[(m >> 6) as usize] |= 1u64 << (m & 63);
    }

    #[must_use]
    pub fn get(&self, m: u32) -> bool {
        self.bits[(m >> 6) as usize] >> (m & 63) & 1 == 1
    }

    #[must_use]
    pub fn not(&self) -> Table {
        let mut t = Table {
            k: self.k,
            bits: self.bits.iter().map(|w| !w).collect(),
        };
        *t.bits.last_mut().unwrap() &= Self::tail_mask(self.k);
        t
    }

    #[must_use]
    pub fn and(&self, other: &Table) -> Table {
        Table {
            k: self.k,
            bits: self
                .bits
                .iter()
                .zip(&other.bits)
                .map(|(a, b)| a & b)
                .collect(),
        }
    }

    /// `new[m] = old[map[m]]`: composition with an assignment transformer.
    #[must_use]
    pub fn compose(&self, map: &[u32]) -> Table {
        let mut t = Table::zeros(self.k);
        for (m, &target) in map.iter().enumerate() {
            if self.get(target) {
                t.set(m as u32);
            }
        }
        t
    }
}

/// One kernel: its kind plus the truth tables of the subformulas its
/// transition constraints need.
#[derive(Clone, Debug)]
pub enum Kernel {
    /// Predicate kernel, tied to bit `atom` of the input letter.
    Pred { atom: usize },
    /// Next kernel with its operand's table.
    Next { sub: Table },
    /// Until kernel with both operands' tables.
    Until { lhs: Table, rhs: Table },
}

/// Everything synthesis needs that depends only on the body formula.
pub struct Tableau {
    pub atoms: Vec<Atom>,
    pub kernels: Vec<Kernel>,
    /// Source text of each kernel, for diagnostics.
    pub kernel_names: Vec<String>,
    pub body_table: Table,
    /// Elementary kernel assignments, ascending.
    pub elementary: Vec<u32>,
    /// Per elementary position: the input letter its predicates spell.
    pub letter_of: Vec<u32>,
    /// Per elementary position: positions of live tableau successors
    /// (already filtered, so subset construction can use them directly).
    pub succ: Vec<Vec<u16>>,
    pub live: Vec<bool>,
    /// Per letter: assignment transformer for reading that letter
    /// (`alpha` of the suffix to `alpha` of letter-then-suffix).
    pub beta: Vec<Vec<u32>>,
    /// Per letter: kernel assignment of the one-letter word.
    pub nu: Vec<u32>,
}

impl Tableau {
    pub fn letter_count(&self) -> usize {
        1usize << self.atoms.len()
    }

    /// Number of until kernels; the obligations liveness has to juggle.
    pub fn until_count(&self) -> usize {
        self.kernels
            .iter()
            .filter(|k| matches!(k, Kernel::Until { .. }))
            .count()
    }
}

/// Collect kernel subformulas in post order, deduplicated.
fn collect_kernels(f: &Formula, order: &mut Vec<Formula>, index: &mut HashMap<Formula, usize>) {
    match f {
        Formula::True => return,
        Formula::Not(a) => {
            collect_kernels(a, order, index);
            return;
        }
        Formula::And(a, b) => {
            collect_kernels(a, order, index);
            collect_kernels(b, order, index);
            return;
        }
        Formula::Pred { .. } => {}
        Formula::Next(a) => collect_kernels(a, order, index),
        Formula::Until(a, b) => {
            collect_kernels(a, order, index);
            collect_kernels(b, order, index);
        }
    }
    if !index.contains_key(f) {
        index.insert(f.clone(), order.len());
        order.push(f.clone());
    }
}

fn table_of(f: &Formula, k: u32, index: &HashMap<Formula, usize>) -> Table {
    if let Some(&i) = index.get(f) {
        return Table::var(k, i);
    }
    match f {
        Formula::True => Table::ones(k),
        Formula::Not(a) => table_of(a, k, index).not(),
        Formula::And(a, b) => table_of(a, k, index).and(&table_of(b, k, index)),
        // Pred, Next and Until are always kernels, handled above.
        Formula::Pred { .. } | Formula::Next(_) | Formula::Until(..) => unreachable!(),
    }
}

pub fn build(body: &Formula) -> Result<Tableau, SynthesisError> {
    let atoms = body.predicate_atoms();
    if atoms.len() > MAX_ATOMS {
        return Err(SynthesisError::TooManyAtoms {
            n: atoms.len(),
            max: MAX_ATOMS,
        });
    }
    let mut kernel_forms = Vec::new();
    let mut index = HashMap::new();
    collect_kernels(body, &mut kernel_forms, &mut index);
    if kernel_forms.len() > MAX_KERNELS {
        return Err(SynthesisError::TooManyKernels {
            n: kernel_forms.len(),
            max: MAX_KERNELS,
        });
    }
    let k = kernel_forms.len() as u32;

    let atom_bit: HashMap<&Atom, usize> = atoms.iter().enumerate().map(|(i, a)| (a, i)).collect();
    let kernels: Vec<Kernel> = kernel_forms
        .iter()
        .map(|f| match f {
            Formula::Pred { name, args } => Kernel::Pred {
                atom: atom_bit[&Atom {
                    name: name.clone(),
                    args: args.clone(),
                }],
            },
            Formula::Next(a) => Kernel::Next {
                sub: table_of(a, k, &index),
            },
            Formula::Until(a, b) => Kernel::Until {
                lhs: table_of(a, k, &index),
                rhs: table_of(b, k, &index),
            },
            Formula::True | Formula::Not(_) | Formula::And(..) => unreachable!(),
        })
        .collect();
    let kernel_names = kernel_forms.iter().map(|f| f.to_string()).collect();
    let body_table = table_of(body, k, &index);

    // Elementary sets: local until consistency.
    let elementary: Vec<u32> = (0..(1u32 << k))
        .filter(|&m| {
            kernels.iter().enumerate().all(|(i, kern)| match kern {
                Kernel::Until { lhs, rhs } => {
                    let u = m >> i & 1 == 1;
                    let d = rhs.get(m);
                    (!d || u) && (!(u && !d) || lhs.get(m))
                }
                _ => true,
            })
        })
        .collect();
    if elementary.len() > MAX_ELEMENTARY {
        return Err(SynthesisError::BudgetExceeded {
            what: "elementary sets",
            n: elementary.len(),
            max: MAX_ELEMENTARY,
        });
    }

    let letter_of: Vec<u32> = elementary
        .iter()
        .map(|&m| {
            kernels
                .iter()
                .enumerate()
                .filter_map(|(i, kern)| match kern {
                    Kernel::Pred { atom } if m >> i & 1 == 1 => Some(1u32 << atom),
                    _ => None,
                })
                .sum()
        })
        .collect();

    // Raw tableau transitions.
    let step_ok = |m: u32, m2: u32| {
        kernels.iter().enumerate().all(|(i, kern)| {
            let cur = m >> i & 1 == 1;
            match kern {
                Kernel::Pred { .. } => true,
                Kernel::Next { sub } => cur == sub.get(m2),
                Kernel::Until { lhs, rhs } => {
                    cur == (rhs.get(m) || (lhs.get(m) && m2 >> i & 1 == 1))
                }
            }
        })
    };
    let mut raw_succ: Vec<Vec<u16>> = Vec::with_capacity(elementary.len());
    let mut edges = 0usize;
    for &m in &elementary {
        let mut row = Vec::new();
        for (pos2, &m2) in elementary.iter().enumerate() {
            if step_ok(m, m2) {
                row.push(pos2 as u16);
            }
        }
        edges += row.len();
        if edges > MAX_TABLEAU_EDGES {
            return Err(SynthesisError::BudgetExceeded {
                what: "tableau transitions",
                n: edges,
                max: MAX_TABLEAU_EDGES,
            });
        }
        raw_succ.push(row);
    }

    let live = compute_live(&elementary, &kernels, &raw_succ);

    // Keep only live-to-live edges; dead positions keep empty rows.
    let succ: Vec<Vec<u16>> = raw_succ
        .iter()
        .enumerate()
        .map(|(pos, row)| {
            if !live[pos] {
                return Vec::new();
            }
            row.iter().copied().filter(|&p| live[p as usize]).collect()
        })
        .collect();

    // Letter machinery for the finite-trace reading.
    let letters = 1usize << atoms.len();
    let mut beta = Vec::with_capacity(letters);
    let mut nu = Vec::with_capacity(letters);
    for a in 0..letters as u32 {
        let map: Vec<u32> = (0..(1u32 << k)).map(|alpha| beta_index(&kernels, alpha, a)).collect();
        beta.push(map);
        nu.push(nu_index(&kernels, a));
    }

    Ok(Tableau {
        atoms,
        kernels,
        kernel_names,
        body_table,
        elementary,
        letter_of,
        succ,
        live,
        beta,
        nu,
    })
}

/// Kernel assignment of `letter . suffix`, given the suffix's assignment.
/// Kernels are in post order, so operand tables only consult bits already
/// computed.
fn beta_index(kernels: &[Kernel], alpha: u32, letter: u32) -> u32 {
    let mut beta = 0u32;
    for (i, kern) in kernels.iter().enumerate() {
        let bit = match kern {
            Kernel::Pred { atom } => letter >> atom & 1 == 1,
            Kernel::Next { sub } => sub.get(alpha),
            Kernel::Until { lhs, rhs } => {
                rhs.get(beta) || (lhs.get(beta) && alpha >> i & 1 == 1)
            }
        };
        if bit {
            beta |= 1 << i;
        }
    }
    beta
}

/// Kernel assignment of the one-letter word: next kernels are false (no
/// second position), untils reduce to their right operand now.
fn nu_index(kernels: &[Kernel], letter: u32) -> u32 {
    let mut nu = 0u32;
    for (i, kern) in kernels.iter().enumerate() {
        let bit = match kern {
            Kernel::Pred { atom } => letter >> atom & 1 == 1,
            Kernel::Next { .. } => false,
            Kernel::Until { rhs, .. } => rhs.get(nu),
        };
        if bit {
            nu |= 1 << i;
        }
    }
    nu
}

/// A position is live when some run from it fulfils every until infinitely
/// often. Decided on the counter product: accepting nodes on cycles are
/// found per strongly connected component, then everything that reaches one
/// is marked by reverse search.
fn compute_live(elementary: &[u32], kernels: &[Kernel], succ: &[Vec<u16>]) -> Vec<bool> {
    let untils: Vec<usize> = kernels
        .iter()
        .enumerate()
        .filter_map(|(i, k)| matches!(k, Kernel::Until { .. }).then_some(i))
        .collect();
    let r = untils.len().max(1);

    // accept(pos, j): position satisfies the j-th until's obligation.
    let accept = |pos: usize, j: usize| -> bool {
        if untils.is_empty() {
            return true;
        }
        let i = untils[j];
        let m = elementary[pos];
        let Kernel::Until { rhs, .. } = &kernels[i] else { unreachable!() };
        m >> i & 1 == 0 || rhs.get(m)
    };

    let n = elementary.len() * r;
    let mut graph = DiGraph::<(), ()>::with_capacity(n, 0);
    for _ in 0..n {
        graph.add_node(());
    }
    let node = |pos: usize, j: usize| NodeIndex::new(pos * r + j);
    let mut rev: Vec<Vec<u32>> = vec![Vec::new(); n];
    for (pos, row) in succ.iter().enumerate() {
        for j in 0..r {
            let j2 = if accept(pos, j) { (j + 1) % r } else { j };
            for &p2 in row {
                graph.add_edge(node(pos, j), node(p2 as usize, j2), ());
                rev[p2 as usize * r + j2].push((pos * r + j) as u32);
            }
        }
    }

    let mut scc_of = vec![usize::MAX; n];
    let mut scc_size = Vec::new();
    for (id, comp) in tarjan_scc(&graph).into_iter().enumerate() {
        scc_size.push(comp.len());
        for nx in comp {
            scc_of[nx.index()] = id;
        }
    }

    // Recurrent: accepting node inside a cycle.
    let mut reach = vec![false; n];
    let mut queue = std::collections::VecDeque::new();
    for pos in 0..elementary.len() {
        let v = node(pos, 0).index();
        if accept(pos, 0) {
            let on_cycle =
                scc_size[scc_of[v]] > 1 || graph.find_edge(node(pos, 0), node(pos, 0)).is_some();
            if on_cycle && !reach[v] {
                reach[v] = true;
                queue.push_back(v as u32);
            }
        }
    }
    while let Some(v) = queue.pop_front() {
        for &p in &rev[v as usize] {
            if !reach[p as usize] {
                reach[p as usize] = true;
                queue.push_back(p);
            }
        }
    }

    (0..elementary.len())
        .map(|pos| (0..r).any(|j| reach[pos * r + j]))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flag(n: &str) -> Formula {
        Formula::flag(n)
    }

    #[test]
    fn tables_are_canonical() {
        let t = Table::var(2, 0);
        assert!(t.get(0b01) && t.get(0b11));
        assert!(!t.get(0b00) && !t.get(0b10));
        assert_eq!(t.not().not(), t);
        assert_eq!(Table::ones(2).and(&t), t);
        // Composition with identity is identity.
        let id: Vec<u32> = (0..4).collect();
        assert_eq!(t.compose(&id), t);
    }

    #[test]
    fn kernels_come_out_in_post_order() {
        // G (a -> F b) has kernels a, b, F b and the outer until of G, in
        // that order: every kernel's subformulas precede it.
        let f = Formula::globally(Formula::implies(flag("a"), Formula::finally(flag("b"))));
        let tab = build(&f).unwrap();
        assert_eq!(
            tab.kernel_names,
            vec!["a", "b", "F b", "F ! (a -> F b)"]
        );
        // Operand tables of an until may only consult strictly earlier
        // kernels: flipping the kernel's own bit never changes them.
        for (i, kern) in tab.kernels.iter().enumerate() {
            if let Kernel::Until { lhs, rhs } = kern {
                for m in 0..(1u32 << tab.kernels.len()) {
                    assert_eq!(lhs.get(m), lhs.get(m ^ (1 << i)));
                    assert_eq!(rhs.get(m), rhs.get(m ^ (1 << i)));
                }
            }
        }
    }

    #[test]
    fn propositional_bodies_have_a_complete_tableau() {
        let f = Formula::and(flag("login"), flag("unauthorized"));
        let tab = build(&f).unwrap();
        assert_eq!(tab.elementary.len(), 4);
        assert!(tab.live.iter().all(|&l| l));
        // No temporal constraints: every position reaches every position.
        assert!(tab.succ.iter().all(|row| row.len() == 4));
        // The letter of a position is its own predicate bits.
        assert_eq!(tab.letter_of, vec![0b00, 0b01, 0b10, 0b11]);
    }

    #[test]
    fn next_true_leaves_only_the_committed_position_live() {
        let f = Formula::next(Formula::True);
        let tab = build(&f).unwrap();
        assert_eq!(tab.elementary, vec![0, 1]);
        assert_eq!(tab.live, vec![false, true]);
        assert_eq!(tab.succ[1], vec![1]);
    }

    #[test]
    fn eventually_not_next_true_is_dead_everywhere_it_claims_truth() {
        // true U ! X true is unsatisfiable on infinite words.
        let f = Formula::until(Formula::True, Formula::not(Formula::next(Formula::True)));
        let tab = build(&f).unwrap();
        for (pos, &m) in tab.elementary.iter().enumerate() {
            if tab.body_table.get(m) {
                assert!(!tab.live[pos], "claiming position {m:02b} must be dead");
            }
        }
    }

    #[test]
    fn finite_reading_machinery_matches_direct_evaluation() {
        // F b on the two-letter alphabet over atom b.
        let f = Formula::finally(flag("b"));
        let tab = build(&f).unwrap();
        // nu: one-letter word. Letter 0: F b false. Letter 1: true.
        assert!(!tab.body_table.get(tab.nu[0]));
        assert!(tab.body_table.get(tab.nu[1]));
        // beta: reading letter 0 then a suffix where F b holds -> holds.
        let alpha_holds = tab.nu[1];
        assert!(tab.body_table.get(tab.beta[0][alpha_holds as usize]));
        // Reading letter 0 then a suffix where F b fails -> fails.
        let alpha_fails = tab.nu[0];
        assert!(!tab.body_table.get(tab.beta[0][alpha_fails as usize]));
        // Reading letter 1 then anything -> holds.
        assert!(tab.body_table.get(tab.beta[1][alpha_fails as usize]));
    }

    #[test]
    fn atom_budget_is_enforced() {
        let mut f = flag("a0");
        for i in 1..=MAX_ATOMS {
            f = Formula::and(f, Formula::flag(format!("a{i}")));
        }
        match build(&f) {
            Err(SynthesisError::TooManyAtoms { n, .. }) => assert_eq!(n, MAX_ATOMS + 1),
            Err(other) => panic!("expected atom budget error, got {other:?}"),
            Ok(_) => panic!("expected atom budget error, got a tableau"),
        }
    }
}
