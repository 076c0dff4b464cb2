//! Canonical property printer.
//!
//! Printing inverts parsing exactly: `parse(print(p)) == p` for every
//! property. The printer re-sugars the four derived connectives where the
//! desugared shape is recognized (`||`, `->`, `F`, `G`, plus `false` for
//! `!true`), because each sugar form desugars back to the exact subtree it
//! was printed from. Parentheses are emitted only where precedence or
//! associativity demands them.

use super::ast::{Formula, Property};
use std::fmt;

/// Sugared view of a canonical node. `Or`, `Implies`, `Finally`, `Globally`
/// and `False` are pattern matches over the desugared encodings.
enum View<'a> {
    True,
    False,
    Pred(&'a str, &'a [String]),
    Not(&'a Formula),
    And(&'a Formula, &'a Formula),
    Or(&'a Formula, &'a Formula),
    Implies(&'a Formula, &'a Formula),
    Next(&'a Formula),
    Until(&'a Formula, &'a Formula),
    Finally(&'a Formula),
    Globally(&'a Formula),
}

fn view(f: &Formula) -> View<'_> {
    match f {
        Formula::True => View::True,
        Formula::Pred { name, args } => View::Pred(name, args),
        Formula::Not(inner) => match &**inner {
            Formula::True => View::False,
            Formula::Until(a, b) => match (&**a, &**b) {
                (Formula::True, Formula::Not(c)) => View::Globally(c),
                _ => View::Not(inner),
            },
            Formula::And(a, b) => match (&**a, &**b) {
                (Formula::Not(x), Formula::Not(y)) => View::Or(x, y),
                (_, Formula::Not(y)) => View::Implies(a, y),
                _ => View::Not(inner),
            },
            _ => View::Not(inner),
        },
        Formula::And(a, b) => View::And(a, b),
        Formula::Next(a) => View::Next(a),
        Formula::Until(a, b) => match &**a {
            Formula::True => View::Finally(b),
            _ => View::Until(a, b),
        },
    }
}

/// Binding strength; higher binds tighter. Matches the parser's precedence
/// chain: implication, disjunction, conjunction, until, unary, atom.
fn level(v: &View<'_>) -> u8 {
    match v {
        View::Implies(..) => 1,
        View::Or(..) => 2,
        View::And(..) => 3,
        View::Until(..) => 4,
        View::Not(_) | View::Next(_) | View::Finally(_) | View::Globally(_) => 5,
        View::True | View::False | View::Pred(..) => 6,
    }
}

fn fmt_prec(f: &Formula, min: u8, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    let v = view(f);
    if level(&v) < min {
        out.write_str("(")?;
        fmt_prec(f, 0, out)?;
        return out.write_str(")");
    }
    match v {
        View::True => out.write_str("true"),
        View::False => out.write_str("false"),
        View::Pred(name, args) => {
            out.write_str(name)?;
            if !args.is_empty() {
                write!(out, "({})", args.join(", "))?;
            }
            Ok(())
        }
        View::Not(a) => {
            out.write_str("! ")?;
            fmt_prec(a, 5, out)
        }
        View::Next(a) => {
            out.write_str("X ")?;
            fmt_prec(a, 5, out)
        }
        View::Finally(a) => {
            out.write_str("F ")?;
            fmt_prec(a, 5, out)
        }
        View::Globally(a) => {
            out.write_str("G ")?;
            fmt_prec(a, 5, out)
        }
        // `U` and `->` are right associative, `&&` and `||` associate left;
        // the child on the closed side needs strictly higher strength.
        View::Until(a, b) => {
            fmt_prec(a, 5, out)?;
            out.write_str(" U ")?;
            fmt_prec(b, 4, out)
        }
        View::And(a, b) => {
            fmt_prec(a, 3, out)?;
            out.write_str(" && ")?;
            fmt_prec(b, 4, out)
        }
        View::Or(a, b) => {
            fmt_prec(a, 2, out)?;
            out.write_str(" || ")?;
            fmt_prec(b, 3, out)
        }
        View::Implies(a, b) => {
            fmt_prec(a, 2, out)?;
            out.write_str(" -> ")?;
            fmt_prec(b, 1, out)
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_prec(self, 0, f)
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in &self.prefix {
            write!(f, "{q} => ")?;
        }
        write!(f, "{}", self.body)
    }
}
