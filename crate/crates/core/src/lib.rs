//! Monitoring engine for counting-quantified linear temporal properties over
//! finite traces.
//!
//! A property is a prefix of counting quantifiers (`forall` over percentages,
//! `exists` over instance counts) applied to a temporal body. The engine
//! checks such properties against finite traces, offline or incrementally,
//! and reports one of six verdicts per quantifier scope: two permanent
//! (`TRUE`, `FALSE`), two count-contingent (`CURRENTLY_TRUE`,
//! `CURRENTLY_FALSE`) and two prefix-contingent (`PRESUMABLY_TRUE`,
//! `PRESUMABLY_FALSE`).
//!
//! Module map:
//! - [`syntax`]: property AST, parser, canonical printer;
//! - [`trace`]: events, trace files, value vector extraction;
//! - [`monitor`]: body monitor synthesis (automaton pipeline) and the
//!   finite-trace evaluator it is checked against;
//! - [`quant`]: the quantifier tree, verdict ladder and latching;
//! - [`pipeline`]: deterministic data-parallel batch driver;
//! - [`gen`]: seeded workload generators.

pub mod gen;
pub mod monitor;
pub mod pipeline;
pub mod quant;
pub mod syntax;
pub mod trace;
pub mod verdict;

pub use pipeline::Pipeline;
pub use quant::QuantTree;
pub use syntax::{parse_property, Property};
pub use trace::Event;
pub use verdict::{Verdict4, Verdict6};
