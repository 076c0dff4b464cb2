//! Verdict domains.
//!
//! Leaf monitors produce four-valued verdicts: the two permanent values
//! `True`/`False` (no continuation of the trace can change them) and the two
//! provisional values `PresumablyTrue`/`PresumablyFalse` (the finite-trace
//! reading of the formula on what has been seen so far). Quantifier nodes
//! extend this to six values with `CurrentlyTrue`/`CurrentlyFalse`, which
//! report whether the counting constraint holds over the children observed so
//! far while the count can still move in both directions.
//!
//! Both domains are chains; the derived `Ord` is the truth order
//! `False < CurrentlyFalse < PresumablyFalse < PresumablyTrue < CurrentlyTrue < True`.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Verdict of a single property instance (one leaf monitor).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Verdict4 {
    False,
    PresumablyFalse,
    PresumablyTrue,
    True,
}

/// Verdict of a quantified property or of a quantifier node in the
/// instantiation tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Verdict6 {
    #[serde(rename = "FALSE")]
    False,
    #[serde(rename = "CURRENTLY_FALSE")]
    CurrentlyFalse,
    #[serde(rename = "PRESUMABLY_FALSE")]
    PresumablyFalse,
    #[serde(rename = "PRESUMABLY_TRUE")]
    PresumablyTrue,
    #[serde(rename = "CURRENTLY_TRUE")]
    CurrentlyTrue,
    #[serde(rename = "TRUE")]
    True,
}

impl Verdict4 {
    /// Permanent verdicts can never change on any continuation.
    #[must_use]
    pub fn is_permanent(self) -> bool {
        matches!(self, Verdict4::True | Verdict4::False)
    }

    #[must_use]
    pub fn token(self) -> &'static str {
        Verdict6::from(self).token()
    }
}

impl Verdict6 {
    pub const ALL: [Verdict6; 6] = [
        Verdict6::False,
        Verdict6::CurrentlyFalse,
        Verdict6::PresumablyFalse,
        Verdict6::PresumablyTrue,
        Verdict6::CurrentlyTrue,
        Verdict6::True,
    ];

    /// Position in the truth order, `False = 0` through `True = 5`.
    /// Used to index truth-count vectors.
    #[must_use]
    pub fn index(self) -> usize {
        self as usize
    }

    #[must_use]
    pub fn from_index(i: usize) -> Option<Verdict6> {
        Verdict6::ALL.get(i).copied()
    }

    #[must_use]
    pub fn is_permanent(self) -> bool {
        matches!(self, Verdict6::True | Verdict6::False)
    }

    /// True-leaning verdicts map to exit code 0, the rest to 1.
    #[must_use]
    pub fn affirmative(self) -> bool {
        matches!(
            self,
            Verdict6::True | Verdict6::CurrentlyTrue | Verdict6::PresumablyTrue
        )
    }

    /// Stable wire token, also used in human-readable output.
    #[must_use]
    pub fn token(self) -> &'static str {
        match self {
            Verdict6::True => "TRUE",
            Verdict6::CurrentlyTrue => "CURRENTLY_TRUE",
            Verdict6::PresumablyTrue => "PRESUMABLY_TRUE",
            Verdict6::PresumablyFalse => "PRESUMABLY_FALSE",
            Verdict6::CurrentlyFalse => "CURRENTLY_FALSE",
            Verdict6::False => "FALSE",
        }
    }

    /// Lattice meet (minimum in the truth order).
    #[must_use]
    pub fn meet(self, other: Verdict6) -> Verdict6 {
        self.min(other)
    }

    /// Lattice join (maximum in the truth order).
    #[must_use]
    pub fn join(self, other: Verdict6) -> Verdict6 {
        self.max(other)
    }
}

impl From<Verdict4> for Verdict6 {
    fn from(v: Verdict4) -> Verdict6 {
        match v {
            Verdict4::False => Verdict6::False,
            Verdict4::PresumablyFalse => Verdict6::PresumablyFalse,
            Verdict4::PresumablyTrue => Verdict6::PresumablyTrue,
            Verdict4::True => Verdict6::True,
        }
    }
}

impl fmt::Display for Verdict4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl fmt::Display for Verdict6 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for Verdict6 {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Verdict6::ALL
            .into_iter()
            .find(|v| v.token() == s)
            .ok_or_else(|| format!("unknown verdict token `{s}`"))
    }
}
