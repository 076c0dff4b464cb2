//! Test-side oracles and generators, written from scratch against the
//! documented semantics. Nothing here reuses engine internals beyond the
//! public AST/event types, so agreement is a real cross-check.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use ltl4c_core::syntax::{Atom, Bound, CmpOp, Formula, Property, QuantKind, Quantifier};
use ltl4c_core::trace::Event;
use ltl4c_core::verdict::{Verdict4, Verdict6};

// ---------------------------------------------------------------------
// Finite-word semantics (strong next; atoms, next and until fail on the
// empty remainder).
// ---------------------------------------------------------------------

pub fn atom_bit(atoms: &[Atom], name: &str, args: &[String]) -> usize {
    atoms
        .iter()
        .position(|a| a.name == name && a.args == args)
        .expect("atom must come from predicate_atoms of the same body")
}

pub fn fltl_at(body: &Formula, atoms: &[Atom], word: &[u32], pos: usize) -> bool {
    match body {
        Formula::True => true,
        Formula::Pred { name, args } => {
            pos < word.len() && word[pos] & (1 << atom_bit(atoms, name, args)) != 0
        }
        Formula::Not(f) => !fltl_at(f, atoms, word, pos),
        Formula::And(a, b) => fltl_at(a, atoms, word, pos) && fltl_at(b, atoms, word, pos),
        Formula::Next(f) => pos + 1 < word.len() && fltl_at(f, atoms, word, pos + 1),
        Formula::Until(a, b) => (pos..word.len()).any(|k| {
            fltl_at(b, atoms, word, k) && (pos..k).all(|j| fltl_at(a, atoms, word, j))
        }),
    }
}

pub fn fltl(body: &Formula, atoms: &[Atom], word: &[u32]) -> bool {
    fltl_at(body, atoms, word, 0)
}

// ---------------------------------------------------------------------
// Infinite-word oracle: a generalized Buchi automaton whose states are
// (letter, claimed temporal subformulas) pairs. Liveness is decided by
// Kosaraju SCCs that contain a witness for every until obligation. The
// construction is deliberately different from the engine's truth-table
// tableau and counter product.
// ---------------------------------------------------------------------

fn collect_temporal(f: &Formula, out: &mut Vec<Formula>) {
    match f {
        Formula::True | Formula::Pred { .. } => {}
        Formula::Not(a) => collect_temporal(a, out),
        Formula::And(a, b) | Formula::Until(a, b) => {
            collect_temporal(a, out);
            collect_temporal(b, out);
            if matches!(f, Formula::Until(..)) && !out.contains(f) {
                out.push(f.clone());
            }
        }
        Formula::Next(a) => {
            collect_temporal(a, out);
            if !out.contains(f) {
                out.push(f.clone());
            }
        }
    }
}

struct BuchiAut {
    /// (letter, claims) per state; claims index `temporal`.
    states: Vec<(u32, u32)>,
    succ: Vec<Vec<usize>>,
    init: Vec<bool>,
    live: Vec<bool>,
}

fn eval_state(f: &Formula, atoms: &[Atom], temporal: &[Formula], letter: u32, claims: u32) -> bool {
    match f {
        Formula::True => true,
        Formula::Pred { name, args } => letter & (1 << atom_bit(atoms, name, args)) != 0,
        Formula::Not(a) => !eval_state(a, atoms, temporal, letter, claims),
        Formula::And(a, b) => {
            eval_state(a, atoms, temporal, letter, claims)
                && eval_state(b, atoms, temporal, letter, claims)
        }
        Formula::Next(_) | Formula::Until(..) => {
            let i = temporal.iter().position(|t| t == f).expect("claimed formula");
            claims & (1 << i) != 0
        }
    }
}

impl BuchiAut {
    fn build(phi: &Formula, atoms: &[Atom]) -> BuchiAut {
        let mut temporal = Vec::new();
        collect_temporal(phi, &mut temporal);
        let letters = 1u32 << atoms.len();
        let claim_space = 1u32 << temporal.len();
        let mut states = Vec::new();
        for letter in 0..letters {
            for claims in 0..claim_space {
                states.push((letter, claims));
            }
        }
        let n = states.len();
        let mut succ = vec![Vec::new(); n];
        let mut pred = vec![Vec::new(); n];
        for (si, &(l, c)) in states.iter().enumerate() {
            'next: for (ti, &(l2, c2)) in states.iter().enumerate() {
                for (i, t) in temporal.iter().enumerate() {
                    let claimed = c & (1 << i) != 0;
                    let ok = match t {
                        Formula::Next(g) => claimed == eval_state(g, atoms, &temporal, l2, c2),
                        Formula::Until(a, b) => {
                            let here = eval_state(b, atoms, &temporal, l, c)
                                || (eval_state(a, atoms, &temporal, l, c) && c2 & (1 << i) != 0);
                            claimed == here
                        }
                        _ => unreachable!("temporal holds only Next/Until"),
                    };
                    if !ok {
                        continue 'next;
                    }
                }
                succ[si].push(ti);
                pred[ti].push(si);
            }
        }
        // Kosaraju strongly connected components.
        let mut order = Vec::with_capacity(n);
        let mut seen = vec![false; n];
        for s in 0..n {
            if seen[s] {
                continue;
            }
            // Iterative post-order.
            let mut stack = vec![(s, 0usize)];
            seen[s] = true;
            while let Some(&mut (v, ref mut i)) = stack.last_mut() {
                if *i < succ[v].len() {
                    let w = succ[v][*i];
                    *i += 1;
                    if !seen[w] {
                        seen[w] = true;
                        stack.push((w, 0));
                    }
                } else {
                    order.push(v);
                    stack.pop();
                }
            }
        }
        let mut comp = vec![usize::MAX; n];
        let mut comps: Vec<Vec<usize>> = Vec::new();
        for &s in order.iter().rev() {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = comps.len();
            let mut members = vec![s];
            comp[s] = id;
            let mut stack = vec![s];
            while let Some(v) = stack.pop() {
                for &w in &pred[v] {
                    if comp[w] == usize::MAX {
                        comp[w] = id;
                        members.push(w);
                        stack.push(w);
                    }
                }
            }
            comps.push(members);
        }
        // A component is good when it has an internal edge and contains a
        // witness for every until: a state not claiming it or satisfying
        // its right-hand side now.
        let until_ids: Vec<usize> = temporal
            .iter()
            .enumerate()
            .filter(|(_, t)| matches!(t, Formula::Until(..)))
            .map(|(i, _)| i)
            .collect();
        let mut good_state = vec![false; n];
        for members in &comps {
            let nontrivial = members.len() > 1
                || members
                    .iter()
                    .any(|&v| succ[v].contains(&v));
            if !nontrivial {
                continue;
            }
            let all_witnessed = until_ids.iter().all(|&i| {
                members.iter().any(|&v| {
                    let (l, c) = states[v];
                    let Formula::Until(_, b) = &temporal[i] else {
                        unreachable!()
                    };
                    c & (1 << i) == 0 || eval_state(b, atoms, &temporal, l, c)
                })
            });
            if all_witnessed {
                for &v in members {
                    good_state[v] = true;
                }
            }
        }
        // Live: can reach a good component.
        let mut live = good_state.clone();
        let mut queue: Vec<usize> = (0..n).filter(|&v| live[v]).collect();
        while let Some(v) = queue.pop() {
            for &w in &pred[v] {
                if !live[w] {
                    live[w] = true;
                    queue.push(w);
                }
            }
        }
        let init = states
            .iter()
            .map(|&(l, c)| eval_state(phi, atoms, &temporal, l, c))
            .collect();
        BuchiAut {
            states,
            succ,
            init,
            live,
        }
    }

    /// Is there an infinite word extending `word` accepted from position 0?
    fn some_extension(&self, word: &[u32]) -> bool {
        let n = self.states.len();
        let mut cur: Vec<bool> = (0..n).map(|s| self.init[s] && self.live[s]).collect();
        for &letter in word {
            let mut next = vec![false; n];
            for (s, &here) in cur.iter().enumerate() {
                if here && self.states[s].0 == letter {
                    for &t in &self.succ[s] {
                        if self.live[t] {
                            next[t] = true;
                        }
                    }
                }
            }
            // The consumed letter constrains the state we were in; the
            // successors are the candidates for the next position.
            let any = (0..n).any(|s| cur[s] && self.states[s].0 == letter);
            if !any {
                return false;
            }
            cur = next;
        }
        cur.iter().any(|&b| b)
    }
}

/// Exact four-valued prefix oracle for a body formula.
pub struct PrefixOracle {
    pub body: Formula,
    pub atoms: Vec<Atom>,
    pos: BuchiAut,
    neg: BuchiAut,
}

impl PrefixOracle {
    pub fn new(body: &Formula) -> PrefixOracle {
        let atoms = body.predicate_atoms();
        let pos = BuchiAut::build(body, &atoms);
        let neg = BuchiAut::build(&Formula::not(body.clone()), &atoms);
        PrefixOracle {
            body: body.clone(),
            atoms,
            pos,
            neg,
        }
    }

    pub fn letters(&self) -> u32 {
        1 << self.atoms.len()
    }

    /// Can some infinite extension satisfy the body?
    pub fn satisfiable_extension(&self, word: &[u32]) -> bool {
        self.pos.some_extension(word)
    }

    /// Can some infinite extension violate the body?
    pub fn violating_extension(&self, word: &[u32]) -> bool {
        self.neg.some_extension(word)
    }

    pub fn rv4(&self, word: &[u32]) -> Verdict4 {
        let can_violate = self.violating_extension(word);
        let can_satisfy = self.satisfiable_extension(word);
        assert!(
            can_violate || can_satisfy,
            "some infinite extension always exists"
        );
        if !can_violate {
            Verdict4::True
        } else if !can_satisfy {
            Verdict4::False
        } else if fltl(&self.body, &self.atoms, word) {
            Verdict4::PresumablyTrue
        } else {
            Verdict4::PresumablyFalse
        }
    }
}

// ---------------------------------------------------------------------
// Literal quantifier semantics: recompute domains, slices and the verdict
// table from scratch over the whole trace.
// ---------------------------------------------------------------------

fn oracle_holds(q: &Quantifier, count: u64, total: u64) -> bool {
    let ord = match q.bound {
        Bound::Ratio(r) => {
            (u128::from(count) * u128::from(*r.denom()))
                .cmp(&(u128::from(*r.numer()) * u128::from(total)))
        }
        Bound::Count(c) => count.cmp(&c),
    };
    match q.cmp {
        CmpOp::Lt => ord == std::cmp::Ordering::Less,
        CmpOp::Le => ord != std::cmp::Ordering::Greater,
        CmpOp::Gt => ord == std::cmp::Ordering::Greater,
        CmpOp::Ge => ord != std::cmp::Ordering::Less,
        CmpOp::Eq => ord == std::cmp::Ordering::Equal,
    }
}

/// Verdict table transcription: returns the verdict and whether it is
/// permanent. First match in the order vacuous, true, false, currently
/// true, currently false, presumably true, presumably false.
fn oracle_table(q: &Quantifier, counts: &[u64; 6], lt: u64, lf: u64) -> (Verdict6, bool) {
    let n: u64 = counts.iter().sum();
    if n == 0 {
        return if oracle_holds(q, 0, 0) {
            (Verdict6::PresumablyTrue, false)
        } else {
            (Verdict6::PresumablyFalse, false)
        };
    }
    match (q.kind, q.cmp) {
        (QuantKind::Instance, CmpOp::Gt | CmpOp::Ge) if oracle_holds(q, lt, n) => {
            return (Verdict6::True, true)
        }
        (QuantKind::Instance, CmpOp::Eq | CmpOp::Le) => {
            if let Bound::Count(c) = q.bound {
                if lt > c {
                    return (Verdict6::False, true);
                }
            }
        }
        (QuantKind::Instance, CmpOp::Lt) => {
            if let Bound::Count(c) = q.bound {
                if lt >= c {
                    return (Verdict6::False, true);
                }
            }
        }
        (QuantKind::Percentage, CmpOp::Eq | CmpOp::Ge) => {
            if let Bound::Ratio(r) = q.bound {
                if r.numer() == r.denom() && lf >= 1 {
                    return (Verdict6::False, true);
                }
            }
        }
        _ => {}
    }
    if q.kind == QuantKind::Instance && oracle_holds(q, lt, n) {
        return (Verdict6::True, false);
    }
    let certain = counts[Verdict6::True.index()] + counts[Verdict6::CurrentlyTrue.index()];
    if oracle_holds(q, certain, n) {
        return (Verdict6::CurrentlyTrue, false);
    }
    let optimistic =
        n - counts[Verdict6::False.index()] - counts[Verdict6::CurrentlyFalse.index()];
    if !oracle_holds(q, optimistic, n) {
        return (Verdict6::CurrentlyFalse, false);
    }
    if oracle_holds(
        q,
        certain + counts[Verdict6::PresumablyTrue.index()],
        n,
    ) {
        return (Verdict6::PresumablyTrue, false);
    }
    (Verdict6::PresumablyFalse, false)
}

fn oracle_vector(event: &Event, keys: &[&str]) -> Option<Vec<String>> {
    keys.iter()
        .map(|k| event.binding(k).map(str::to_owned))
        .collect()
}

fn oracle_letter(
    event: &Event,
    atoms: &[Atom],
    vector: &[String],
    positions: &BTreeMap<String, usize>,
) -> u32 {
    let mut letter = 0u32;
    for (i, atom) in atoms.iter().enumerate() {
        let hit = if atom.args.is_empty() {
            event.has_flag(&atom.name) || event.binding(&atom.name).is_some()
        } else {
            let expected: Vec<&str> = atom
                .args
                .iter()
                .map(|v| vector[positions[v]].as_str())
                .collect();
            event.binding(&atom.name) == Some(expected.join(",").as_str())
        };
        if hit {
            letter |= 1 << i;
        }
    }
    letter
}

fn brute_node(
    property: &Property,
    oracle: &PrefixOracle,
    positions: &BTreeMap<String, usize>,
    events: &[Event],
    keys: &[&str],
    vectors: &BTreeSet<Vec<String>>,
    prefix: &[String],
) -> (Verdict6, bool) {
    let depth = prefix.len();
    if depth == property.prefix.len() {
        let word: Vec<u32> = events
            .iter()
            .filter(|e| oracle_vector(e, keys).as_deref() == Some(prefix))
            .map(|e| oracle_letter(e, &oracle.atoms, prefix, positions))
            .collect();
        let v = oracle.rv4(&word);
        return (Verdict6::from(v), v.is_permanent());
    }
    let values: BTreeSet<&String> = vectors
        .iter()
        .filter(|d| d[..depth] == *prefix)
        .map(|d| &d[depth])
        .collect();
    let mut counts = [0u64; 6];
    let mut lt = 0;
    let mut lf = 0;
    for value in values {
        let mut child = prefix.to_vec();
        child.push(value.clone());
        let (v, permanent) =
            brute_node(property, oracle, positions, events, keys, vectors, &child);
        counts[v.index()] += 1;
        if permanent && v == Verdict6::True {
            lt += 1;
        }
        if permanent && v == Verdict6::False {
            lf += 1;
        }
    }
    oracle_table(&property.prefix[depth], &counts, lt, lf)
}

/// Whole-trace verdict computed literally from the inductive semantics.
pub fn brute_verdict(property: &Property, events: &[Event]) -> Verdict6 {
    let oracle = PrefixOracle::new(&property.body);
    let keys = property.guard_keys();
    let positions: BTreeMap<String, usize> = property
        .variable_positions()
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
    let vectors: BTreeSet<Vec<String>> = events
        .iter()
        .filter_map(|e| oracle_vector(e, &keys))
        .collect();
    brute_node(property, &oracle, &positions, events, &keys, &vectors, &[]).0
}

// ---------------------------------------------------------------------
// Random generators (seeded, deterministic).
// ---------------------------------------------------------------------

pub fn random_body(rng: &mut ChaCha8Rng, depth: u32, leaves: &[Formula]) -> Formula {
    if depth == 0 || rng.random_bool(0.3) {
        if rng.random_bool(0.12) {
            return Formula::True;
        }
        return leaves[rng.random_range(0..leaves.len())].clone();
    }
    match rng.random_range(0..8u32) {
        0 => Formula::not(random_body(rng, depth - 1, leaves)),
        1 => Formula::and(
            random_body(rng, depth - 1, leaves),
            random_body(rng, depth - 1, leaves),
        ),
        2 => Formula::or(
            random_body(rng, depth - 1, leaves),
            random_body(rng, depth - 1, leaves),
        ),
        3 => Formula::implies(
            random_body(rng, depth - 1, leaves),
            random_body(rng, depth - 1, leaves),
        ),
        4 => Formula::next(random_body(rng, depth - 1, leaves)),
        5 => Formula::until(
            random_body(rng, depth - 1, leaves),
            random_body(rng, depth - 1, leaves),
        ),
        6 => Formula::finally(random_body(rng, depth - 1, leaves)),
        _ => Formula::globally(random_body(rng, depth - 1, leaves)),
    }
}

pub fn flag_leaves(names: &[&str]) -> Vec<Formula> {
    names.iter().map(|n| Formula::flag(*n)).collect()
}

pub fn random_word(rng: &mut ChaCha8Rng, letters: u32, max_len: usize) -> Vec<u32> {
    let len = rng.random_range(0..=max_len);
    (0..len).map(|_| rng.random_range(0..letters)).collect()
}

fn random_bound(rng: &mut ChaCha8Rng, kind: QuantKind) -> Bound {
    match kind {
        QuantKind::Instance => Bound::Count(rng.random_range(0..=3)),
        QuantKind::Percentage => {
            let options = [(0u64, 1u64), (1, 4), (1, 2), (3, 4), (1, 1)];
            let (n, d) = options[rng.random_range(0..options.len())];
            Bound::Ratio(num_rational::Ratio::new(n, d))
        }
    }
}

const CMPS: [CmpOp; 5] = [CmpOp::Lt, CmpOp::Le, CmpOp::Gt, CmpOp::Ge, CmpOp::Eq];

/// A random property with at most `max_quantifiers` counting quantifiers
/// and a temporal body over flag and per-variable predicates.
pub fn random_property(rng: &mut ChaCha8Rng, max_quantifiers: usize, depth: u32) -> Property {
    let count = rng.random_range(0..=max_quantifiers);
    let mut prefix = Vec::new();
    let mut leaves = vec![Formula::flag("f0"), Formula::flag("f1")];
    for i in 0..count {
        let kind = if rng.random_bool(0.5) {
            QuantKind::Percentage
        } else {
            QuantKind::Instance
        };
        let var = format!("x{i}");
        prefix.push(Quantifier {
            kind,
            cmp: CMPS[rng.random_range(0..5usize)],
            bound: random_bound(rng, kind),
            variable: var.clone(),
            guard: format!("g{i}"),
        });
        leaves.push(Formula::pred(format!("p{i}"), [var]));
    }
    let body = random_body(rng, depth, &leaves);
    Property { prefix, body }
}

const DOMAIN: [&str; 2] = ["u", "v"];

/// A random trace for `property`: most events bind every guard key; some
/// deliberately miss one so they match no value vector.
pub fn random_trace(rng: &mut ChaCha8Rng, property: &Property, max_len: usize) -> Vec<Event> {
    let len = rng.random_range(0..=max_len);
    let mut events = Vec::with_capacity(len);
    for index in 0..len {
        let mut bindings = Vec::new();
        let mut flags = Vec::new();
        for (i, q) in property.prefix.iter().enumerate() {
            if rng.random_bool(0.85) {
                bindings.push((
                    q.guard.clone(),
                    DOMAIN[rng.random_range(0..2usize)].to_string(),
                ));
            }
            if rng.random_bool(0.5) {
                bindings.push((
                    format!("p{i}"),
                    DOMAIN[rng.random_range(0..2usize)].to_string(),
                ));
            }
        }
        for f in ["f0", "f1"] {
            if rng.random_bool(0.4) {
                flags.push(f.to_string());
            }
        }
        events.push(Event::new(index as u64, bindings, flags));
    }
    events
}
