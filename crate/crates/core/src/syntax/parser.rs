//! Property parser.
//!
//! Grammar (EBNF):
//!
//! ```text
//! property   = { quantifier } body ;
//! quantifier = ( "forall" | "exists" ) [ constraint ]
//!              ident ":" ident "(" ident ")" "=>" ;
//! constraint = "[" cmp number "]" ;
//! cmp        = "<" | "<=" | ">" | ">=" | "=" ;
//! number     = digits [ "." digits ] [ "%" ]
//!            | digits "/" digits ;
//! body       = impl ;
//! impl       = or [ "->" impl ] ;                 (* right associative *)
//! or         = and { "||" and } ;
//! and        = until { "&&" until } ;
//! until      = unary [ "U" until ] ;              (* right associative *)
//! unary      = ( "!" | "X" | "F" | "G" ) unary | atom ;
//! atom       = "true" | "false" | "(" body ")"
//!            | ident [ "(" [ ident { "," ident } ] ")" ] ;
//! ```
//!
//! `#` starts a comment that runs to end of line. A bare `forall` defaults to
//! `forall[=1]`, a bare `exists` to `exists[>=1]`. Percentage constants may be
//! written as a decimal (`0.95`), a percentage (`95%`) or an exact fraction
//! (`19/20`); they are stored as exact rationals and must lie in [0, 1].
//! Instance constants must be plain non-negative integers. The guard predicate
//! of a quantifier must be applied to the variable it binds, every variable
//! used in the body must be bound by the prefix, and quantifiers may not
//! appear inside the body (the prefix is the only place the grammar admits
//! them; a nested one is reported as a non-canonical property rather than a
//! generic syntax error).
//!
//! The keywords `forall`, `exists`, `true`, `false` and the operator letters
//! `G`, `F`, `X`, `U` are reserved and cannot name predicates or variables.

use super::ast::{Bound, CmpOp, Formula, Property, QuantKind, Quantifier};
use num_rational::Ratio;
use std::collections::HashSet;
use std::fmt;
use thiserror::Error;

/// What went wrong, beyond the message: callers dispatch on this.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    /// Token-level or grammar-level violation.
    Syntax,
    /// A quantifier appeared inside the body.
    NonCanonical,
    /// A body predicate mentions a variable the prefix does not bind.
    UnboundVariable,
    /// Constraint constant outside its admissible range.
    ConstraintRange,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    /// 1-based line and column of the offending token.
    pub line: u32,
    pub col: u32,
    pub message: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Pos {
    line: u32,
    col: u32,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Number(String),
    LBracket,
    RBracket,
    LParen,
    RParen,
    Colon,
    Comma,
    FatArrow,
    ThinArrow,
    AndAnd,
    OrOr,
    Bang,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Slash,
    Percent,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Number(s) => format!("number `{s}`"),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Comma => "`,`".into(),
            Tok::FatArrow => "`=>`".into(),
            Tok::ThinArrow => "`->`".into(),
            Tok::AndAnd => "`&&`".into(),
            Tok::OrOr => "`||`".into(),
            Tok::Bang => "`!`".into(),
            Tok::Lt => "`<`".into(),
            Tok::Le => "`<=`".into(),
            Tok::Gt => "`>`".into(),
            Tok::Ge => "`>=`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Percent => "`%`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

const RESERVED: &[&str] = &["forall", "exists", "true", "false", "G", "F", "X", "U"];

fn lex(input: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let mut toks = Vec::new();
    let mut chars = input.chars().peekable();
    let mut line = 1u32;
    let mut col = 1u32;

    macro_rules! bump {
        () => {{
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                col = 1;
            } else if c.is_some() {
                col += 1;
            }
            c
        }};
    }

    loop {
        let pos = Pos { line, col };
        let Some(&c) = chars.peek() else {
            toks.push((Tok::Eof, pos));
            return Ok(toks);
        };
        match c {
            ' ' | '\t' | '\r' | '\n' => {
                bump!();
            }
            '#' => {
                while chars.peek().is_some_and(|&c| c != '\n') {
                    bump!();
                }
            }
            '[' => {
                bump!();
                toks.push((Tok::LBracket, pos));
            }
            ']' => {
                bump!();
                toks.push((Tok::RBracket, pos));
            }
            '(' => {
                bump!();
                toks.push((Tok::LParen, pos));
            }
            ')' => {
                bump!();
                toks.push((Tok::RParen, pos));
            }
            ':' => {
                bump!();
                toks.push((Tok::Colon, pos));
            }
            ',' => {
                bump!();
                toks.push((Tok::Comma, pos));
            }
            '/' => {
                bump!();
                toks.push((Tok::Slash, pos));
            }
            '%' => {
                bump!();
                toks.push((Tok::Percent, pos));
            }
            '!' => {
                bump!();
                toks.push((Tok::Bang, pos));
            }
            '=' => {
                bump!();
                if chars.peek() == Some(&'>') {
                    bump!();
                    toks.push((Tok::FatArrow, pos));
                } else {
                    toks.push((Tok::Eq, pos));
                }
            }
            '-' => {
                bump!();
                if chars.peek() == Some(&'>') {
                    bump!();
                    toks.push((Tok::ThinArrow, pos));
                } else {
                    return Err(err(ParseErrorKind::Syntax, pos, "stray `-`".into()));
                }
            }
            '&' => {
                bump!();
                if chars.peek() == Some(&'&') {
                    bump!();
                    toks.push((Tok::AndAnd, pos));
                } else {
                    return Err(err(ParseErrorKind::Syntax, pos, "stray `&`, expected `&&`".into()));
                }
            }
            '|' => {
                bump!();
                if chars.peek() == Some(&'|') {
                    bump!();
                    toks.push((Tok::OrOr, pos));
                } else {
                    return Err(err(ParseErrorKind::Syntax, pos, "stray `|`, expected `||`".into()));
                }
            }
            '<' => {
                bump!();
                if chars.peek() == Some(&'=') {
                    bump!();
                    toks.push((Tok::Le, pos));
                } else {
                    toks.push((Tok::Lt, pos));
                }
            }
            '>' => {
                bump!();
                if chars.peek() == Some(&'=') {
                    bump!();
                    toks.push((Tok::Ge, pos));
                } else {
                    toks.push((Tok::Gt, pos));
                }
            }
            '0'..='9' => {
                let mut text = String::new();
                while chars.peek().is_some_and(|c| c.is_ascii_digit()) {
                    text.push(bump!().unwrap());
                }
                if chars.peek() == Some(&'.') {
                    text.push(bump!().unwrap());
                    if !chars.peek().is_some_and(|c| c.is_ascii_digit()) {
                        return Err(err(
                            ParseErrorKind::Syntax,
                            pos,
                            format!("malformed number `{text}`"),
                        ));
                    }
                    while chars.peek().is_some_and(|c| c.is_ascii_digit()) {
                        text.push(bump!().unwrap());
                    }
                }
                toks.push((Tok::Number(text), pos));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut text = String::new();
                while chars
                    .peek()
                    .is_some_and(|&c| c.is_ascii_alphanumeric() || c == '_')
                {
                    text.push(bump!().unwrap());
                }
                toks.push((Tok::Ident(text), pos));
            }
            other => {
                return Err(err(
                    ParseErrorKind::Syntax,
                    pos,
                    format!("unexpected character `{other}`"),
                ));
            }
        }
    }
}

fn err(kind: ParseErrorKind, pos: Pos, message: String) -> ParseError {
    ParseError {
        kind,
        line: pos.line,
        col: pos.col,
        message,
    }
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    bound: Vec<String>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn next(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, want: &Tok, ctx: &str) -> Result<Pos, ParseError> {
        if self.peek() == want {
            Ok(self.next().1)
        } else {
            Err(err(
                ParseErrorKind::Syntax,
                self.pos(),
                format!("expected {} {ctx}, found {}", want.describe(), self.peek().describe()),
            ))
        }
    }

    fn expect_ident(&mut self, ctx: &str) -> Result<(String, Pos), ParseError> {
        let pos = self.pos();
        match self.peek() {
            Tok::Ident(s) if !RESERVED.contains(&s.as_str()) => {
                let s = s.clone();
                self.next();
                Ok((s, pos))
            }
            Tok::Ident(s) => Err(err(
                ParseErrorKind::Syntax,
                pos,
                format!("`{s}` is a reserved word and cannot be used {ctx}"),
            )),
            other => Err(err(
                ParseErrorKind::Syntax,
                pos,
                format!("expected identifier {ctx}, found {}", other.describe()),
            )),
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn property(&mut self) -> Result<Property, ParseError> {
        let mut prefix = Vec::new();
        let mut seen: HashSet<String> = HashSet::new();
        while self.is_keyword("forall") || self.is_keyword("exists") {
            let q = self.quantifier()?;
            if !seen.insert(q.variable.clone()) {
                return Err(err(
                    ParseErrorKind::Syntax,
                    self.pos(),
                    format!("variable `{}` is already bound", q.variable),
                ));
            }
            self.bound.push(q.variable.clone());
            prefix.push(q);
        }
        let body = self.implication()?;
        if *self.peek() != Tok::Eof {
            return Err(err(
                ParseErrorKind::Syntax,
                self.pos(),
                format!("unexpected {} after end of property", self.peek().describe()),
            ));
        }
        Ok(Property { prefix, body })
    }

    fn quantifier(&mut self) -> Result<Quantifier, ParseError> {
        let kind = if self.is_keyword("forall") {
            QuantKind::Percentage
        } else {
            QuantKind::Instance
        };
        self.next();
        let (cmp, bound) = if *self.peek() == Tok::LBracket {
            self.next();
            let cmp = self.cmp_op()?;
            let bound = self.bound_const(kind)?;
            self.expect(&Tok::RBracket, "to close the constraint")?;
            (cmp, bound)
        } else {
            match kind {
                QuantKind::Percentage => Quantifier::default_percentage(),
                QuantKind::Instance => Quantifier::default_instance(),
            }
        };
        let (variable, _) = self.expect_ident("as the quantified variable")?;
        self.expect(&Tok::Colon, "after the quantified variable")?;
        let (guard, _) = self.expect_ident("as the guard predicate")?;
        self.expect(&Tok::LParen, "after the guard predicate")?;
        let (arg, arg_pos) = self.expect_ident("as the guard argument")?;
        if arg != variable {
            return Err(err(
                ParseErrorKind::Syntax,
                arg_pos,
                format!("guard must apply to the bound variable `{variable}`, found `{arg}`"),
            ));
        }
        self.expect(&Tok::RParen, "to close the guard")?;
        self.expect(&Tok::FatArrow, "after the guard")?;
        Ok(Quantifier {
            kind,
            cmp,
            bound,
            variable,
            guard,
        })
    }

    fn cmp_op(&mut self) -> Result<CmpOp, ParseError> {
        let (tok, pos) = self.next();
        match tok {
            Tok::Lt => Ok(CmpOp::Lt),
            Tok::Le => Ok(CmpOp::Le),
            Tok::Gt => Ok(CmpOp::Gt),
            Tok::Ge => Ok(CmpOp::Ge),
            Tok::Eq => Ok(CmpOp::Eq),
            other => Err(err(
                ParseErrorKind::Syntax,
                pos,
                format!("expected comparison operator, found {}", other.describe()),
            )),
        }
    }

    fn bound_const(&mut self, kind: QuantKind) -> Result<Bound, ParseError> {
        let pos = self.pos();
        let Tok::Number(text) = self.peek().clone() else {
            return Err(err(
                ParseErrorKind::Syntax,
                pos,
                format!("expected a constant, found {}", self.peek().describe()),
            ));
        };
        self.next();

        // Fraction form: numerator must be a plain integer.
        if *self.peek() == Tok::Slash {
            self.next();
            let den_pos = self.pos();
            let Tok::Number(den_text) = self.peek().clone() else {
                return Err(err(
                    ParseErrorKind::Syntax,
                    den_pos,
                    "expected denominator after `/`".into(),
                ));
            };
            self.next();
            if text.contains('.') || den_text.contains('.') {
                return Err(err(
                    ParseErrorKind::Syntax,
                    pos,
                    "fraction parts must be integers".into(),
                ));
            }
            let num = parse_u64(&text, pos)?;
            let den = parse_u64(&den_text, den_pos)?;
            if den == 0 {
                return Err(err(ParseErrorKind::Syntax, den_pos, "denominator is zero".into()));
            }
            return self.finish_ratio(kind, Ratio::new(num, den), pos);
        }

        let percent = if *self.peek() == Tok::Percent {
            self.next();
            true
        } else {
            false
        };

        match kind {
            QuantKind::Instance => {
                if text.contains('.') || percent {
                    return Err(err(
                        ParseErrorKind::ConstraintRange,
                        pos,
                        "instance constraint must be a non-negative integer".into(),
                    ));
                }
                Ok(Bound::Count(parse_u64(&text, pos)?))
            }
            QuantKind::Percentage => {
                let ratio = decimal_to_ratio(&text, pos)?;
                let ratio = if percent { ratio / Ratio::new(100, 1) } else { ratio };
                self.finish_ratio(kind, ratio, pos)
            }
        }
    }

    fn finish_ratio(&self, kind: QuantKind, r: Ratio<u64>, pos: Pos) -> Result<Bound, ParseError> {
        match kind {
            QuantKind::Instance => Err(err(
                ParseErrorKind::ConstraintRange,
                pos,
                "instance constraint must be a non-negative integer".into(),
            )),
            QuantKind::Percentage => {
                if r > Ratio::new(1, 1) {
                    Err(err(
                        ParseErrorKind::ConstraintRange,
                        pos,
                        format!("percentage constraint must lie in [0, 1], got {}/{}", r.numer(), r.denom()),
                    ))
                } else {
                    Ok(Bound::Ratio(r))
                }
            }
        }
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::ThinArrow {
            self.next();
            let rhs = self.implication()?;
            Ok(Formula::implies(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.conjunction()?;
        while *self.peek() == Tok::OrOr {
            self.next();
            f = Formula::or(f, self.conjunction()?);
        }
        Ok(f)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.until()?;
        while *self.peek() == Tok::AndAnd {
            self.next();
            f = Formula::and(f, self.until()?);
        }
        Ok(f)
    }

    fn until(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.unary()?;
        if self.is_keyword("U") {
            self.next();
            let rhs = self.until()?;
            Ok(Formula::until(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        if *self.peek() == Tok::Bang {
            self.next();
            return Ok(Formula::not(self.unary()?));
        }
        for (kw, wrap) in [
            ("X", Formula::next as fn(Formula) -> Formula),
            ("F", Formula::finally),
            ("G", Formula::globally),
        ] {
            if self.is_keyword(kw) {
                self.next();
                return Ok(wrap(self.unary()?));
            }
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        let pos = self.pos();
        if self.is_keyword("forall") || self.is_keyword("exists") {
            return Err(err(
                ParseErrorKind::NonCanonical,
                pos,
                "quantifiers must form an outermost prefix; none may appear inside the body".into(),
            ));
        }
        if self.is_keyword("true") {
            self.next();
            return Ok(Formula::True);
        }
        if self.is_keyword("false") {
            self.next();
            return Ok(Formula::falsum());
        }
        if *self.peek() == Tok::LParen {
            self.next();
            let f = self.implication()?;
            self.expect(&Tok::RParen, "to close the group")?;
            return Ok(f);
        }
        let (name, _) = self.expect_ident("as a predicate")?;
        let mut args = Vec::new();
        if *self.peek() == Tok::LParen {
            self.next();
            if *self.peek() != Tok::RParen {
                loop {
                    let (arg, arg_pos) = self.expect_ident("as a predicate argument")?;
                    if !self.bound.contains(&arg) {
                        return Err(err(
                            ParseErrorKind::UnboundVariable,
                            arg_pos,
                            format!("variable `{arg}` is not bound by any quantifier"),
                        ));
                    }
                    args.push(arg);
                    if *self.peek() == Tok::Comma {
                        self.next();
                    } else {
                        break;
                    }
                }
            }
            self.expect(&Tok::RParen, "to close the argument list")?;
        }
        Ok(Formula::Pred { name, args })
    }
}

fn parse_u64(text: &str, pos: Pos) -> Result<u64, ParseError> {
    text.parse::<u64>()
        .map_err(|_| err(ParseErrorKind::Syntax, pos, format!("constant `{text}` is too large")))
}

fn decimal_to_ratio(text: &str, pos: Pos) -> Result<Ratio<u64>, ParseError> {
    match text.split_once('.') {
        None => Ok(Ratio::new(parse_u64(text, pos)?, 1)),
        Some((int, frac)) => {
            if frac.len() > 18 {
                return Err(err(ParseErrorKind::Syntax, pos, "too many decimal digits".into()));
            }
            let scale = 10u64.pow(frac.len() as u32);
            let int = parse_u64(int, pos)?;
            let frac = parse_u64(frac, pos)?;
            let numer = int
                .checked_mul(scale)
                .and_then(|v| v.checked_add(frac))
                .ok_or_else(|| err(ParseErrorKind::Syntax, pos, format!("constant `{text}` is too large")))?;
            Ok(Ratio::new(numer, scale))
        }
    }
}

/// Parse a complete property. The input may span multiple lines and contain
/// `#` comments; exactly one property is expected.
pub fn parse_property(input: &str) -> Result<Property, ParseError> {
    let toks = lex(input)?;
    let mut p = Parser {
        toks,
        at: 0,
        bound: Vec::new(),
    };
    p.property()
}
