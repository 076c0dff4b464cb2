//! Property language: syntax trees, parser and printer.

pub mod ast;
pub mod parser;
mod printer;

pub use ast::{Atom, Bound, CmpOp, Formula, Property, QuantKind, Quantifier};
pub use parser::{parse_property, ParseError, ParseErrorKind};
