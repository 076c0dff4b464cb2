//! Property syntax trees.
//!
//! A property is a (possibly empty) prefix of counting quantifiers followed by
//! a quantifier-free temporal body. The body is stored in canonical form: the
//! only connectives are `true`, predicates, negation, conjunction, next and
//! until. Disjunction, implication, finally and globally are provided as
//! constructors that desugar on the spot, so every downstream component deals
//! with exactly six node kinds.

use num_rational::Ratio;
use std::cmp::Ordering;
use std::fmt;

/// Quantifier kind: `forall` constrains the *percentage* of satisfied
/// children, `exists` constrains their *count*.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum QuantKind {
    Percentage,
    Instance,
}

/// Comparison operator of a counting constraint.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
}

impl CmpOp {
    #[must_use]
    pub fn token(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
            CmpOp::Eq => "=",
        }
    }

    /// Apply the comparison to an already-computed ordering of lhs vs rhs.
    #[must_use]
    pub fn holds(self, ord: Ordering) -> bool {
        match self {
            CmpOp::Lt => ord == Ordering::Less,
            CmpOp::Le => ord != Ordering::Greater,
            CmpOp::Gt => ord == Ordering::Greater,
            CmpOp::Ge => ord != Ordering::Less,
            CmpOp::Eq => ord == Ordering::Equal,
        }
    }
}

/// Constraint constant: an exact rational in [0, 1] for percentage
/// quantifiers, a non-negative integer for instance quantifiers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Bound {
    Ratio(Ratio<u64>),
    Count(u64),
}

impl Bound {
    /// `count ~ bound * total`, computed exactly (no floating point).
    #[must_use]
    pub fn compare_scaled(self, count: u64, total: u64) -> Ordering {
        match self {
            Bound::Ratio(r) => {
                let lhs = u128::from(count) * u128::from(*r.denom());
                let rhs = u128::from(*r.numer()) * u128::from(total);
                lhs.cmp(&rhs)
            }
            Bound::Count(c) => count.cmp(&c),
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Ratio(r) if *r.denom() == 1 => write!(f, "{}", r.numer()),
            Bound::Ratio(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Bound::Count(c) => write!(f, "{c}"),
        }
    }
}

/// One quantifier of the prefix: kind, comparison, constant, bound variable
/// and the guard predicate whose binding populates the variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Quantifier {
    pub kind: QuantKind,
    pub cmp: CmpOp,
    pub bound: Bound,
    pub variable: String,
    pub guard: String,
}

impl Quantifier {
    /// Default constraint for a bare `forall`: exactly 100%.
    #[must_use]
    pub fn default_percentage() -> (CmpOp, Bound) {
        (CmpOp::Eq, Bound::Ratio(Ratio::new(1, 1)))
    }

    /// Default constraint for a bare `exists`: at least one.
    #[must_use]
    pub fn default_instance() -> (CmpOp, Bound) {
        (CmpOp::Ge, Bound::Count(1))
    }

    /// `forall` with constraint `= 1` is the only percentage form that can
    /// latch a permanent violation from a single dead child.
    #[must_use]
    pub fn is_percentage_eq_one(&self) -> bool {
        self.kind == QuantKind::Percentage
            && self.cmp == CmpOp::Eq
            && self.bound == Bound::Ratio(Ratio::new(1, 1))
    }
}

impl fmt::Display for Quantifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kw = match self.kind {
            QuantKind::Percentage => "forall",
            QuantKind::Instance => "exists",
        };
        write!(
            f,
            "{kw}[{}{}] {} : {}({})",
            self.cmp.token(),
            self.bound,
            self.variable,
            self.guard,
            self.variable
        )
    }
}

/// Canonical quantifier-free body.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    /// Predicate applied to bound variables. Zero arguments means a flag.
    Pred { name: String, args: Vec<String> },
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Next(Box<Formula>),
    Until(Box<Formula>, Box<Formula>),
}

impl Formula {
    #[must_use]
    pub fn flag(name: impl Into<String>) -> Formula {
        Formula::Pred {
            name: name.into(),
            args: Vec::new(),
        }
    }

    #[must_use]
    pub fn pred(name: impl Into<String>, args: impl IntoIterator<Item = impl Into<String>>) -> Formula {
        Formula::Pred {
            name: name.into(),
            args: args.into_iter().map(Into::into).collect(),
        }
    }

    #[must_use]
    pub fn falsum() -> Formula {
        Formula::Not(Box::new(Formula::True))
    }

    #[must_use]
    #[allow(clippy::should_implement_trait)] // constructor, not an operator impl
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    #[must_use]
    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    /// `a || b` desugars to `!(!a && !b)`.
    #[must_use]
    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::not(Formula::and(Formula::not(a), Formula::not(b)))
    }

    /// `a -> b` desugars to `!(a && !b)`.
    #[must_use]
    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::not(Formula::and(a, Formula::not(b)))
    }

    #[must_use]
    pub fn next(f: Formula) -> Formula {
        Formula::Next(Box::new(f))
    }

    #[must_use]
    pub fn until(a: Formula, b: Formula) -> Formula {
        Formula::Until(Box::new(a), Box::new(b))
    }

    /// `F f` desugars to `true U f`.
    #[must_use]
    pub fn finally(f: Formula) -> Formula {
        Formula::until(Formula::True, f)
    }

    /// `G f` desugars to `!(true U !f)`.
    #[must_use]
    pub fn globally(f: Formula) -> Formula {
        Formula::not(Formula::finally(Formula::not(f)))
    }

    /// Distinct predicate atoms (name plus argument variables), sorted.
    /// These become the alphabet of the synthesized monitor.
    #[must_use]
    pub fn predicate_atoms(&self) -> Vec<Atom> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out.sort();
        out.dedup();
        out
    }

    fn collect_atoms(&self, out: &mut Vec<Atom>) {
        match self {
            Formula::True => {}
            Formula::Pred { name, args } => out.push(Atom {
                name: name.clone(),
                args: args.clone(),
            }),
            Formula::Not(a) | Formula::Next(a) => a.collect_atoms(out),
            Formula::And(a, b) | Formula::Until(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    /// Variables mentioned by predicates anywhere in the body.
    #[must_use]
    pub fn variables(&self) -> Vec<String> {
        let mut vars: Vec<String> = self
            .predicate_atoms()
            .into_iter()
            .flat_map(|a| a.args)
            .collect();
        vars.sort();
        vars.dedup();
        vars
    }

    /// Number of nodes; a cheap size measure for budgets and generators.
    #[must_use]
    pub fn size(&self) -> usize {
        match self {
            Formula::True | Formula::Pred { .. } => 1,
            Formula::Not(a) | Formula::Next(a) => 1 + a.size(),
            Formula::And(a, b) | Formula::Until(a, b) => 1 + a.size() + b.size(),
        }
    }

    /// True if the body contains a `Next` operator anywhere.
    #[must_use]
    pub fn contains_next(&self) -> bool {
        match self {
            Formula::True | Formula::Pred { .. } => false,
            Formula::Next(_) => true,
            Formula::Not(a) => a.contains_next(),
            Formula::And(a, b) | Formula::Until(a, b) => a.contains_next() || b.contains_next(),
        }
    }
}

/// A predicate atom: name plus argument variables. Ground instances are
/// obtained by substituting a value vector for the variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub name: String,
    pub args: Vec<String>,
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.args.is_empty() {
            f.write_str(&self.name)
        } else {
            write!(f, "{}({})", self.name, self.args.join(","))
        }
    }
}

/// A complete property: quantifier prefix plus canonical body.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Property {
    pub prefix: Vec<Quantifier>,
    pub body: Formula,
}

impl Property {
    /// Guard predicate names in prefix order; the keys a trace event must
    /// bind for the event to contribute a value vector.
    #[must_use]
    pub fn guard_keys(&self) -> Vec<&str> {
        self.prefix.iter().map(|q| q.guard.as_str()).collect()
    }

    /// Position of each bound variable in the prefix.
    #[must_use]
    pub fn variable_positions(&self) -> std::collections::HashMap<&str, usize> {
        self.prefix
            .iter()
            .enumerate()
            .map(|(i, q)| (q.variable.as_str(), i))
            .collect()
    }
}
