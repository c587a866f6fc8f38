use std::collections::BTreeSet;
use std::fmt;

use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use super::poly::{Atom, Poly};
use super::value::Value;
use super::SolveError;
use crate::arith::{coprime_splits, gcd};
use crate::repr::{ReprTable, Representation};

/// An instance of the functional equation or of multiplicativity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Constraint {
    /// `f(target) = sum f(x_i)^2`.
    SumOfSquares { target: u64, parts: Vec<u64> },
    /// `f(n) = f(m) f(l)` with `n = m l`, `gcd(m, l) = 1`, `2 <= m < l`.
    Multiplicative { n: u64, m: u64, l: u64 },
}

impl Constraint {
    pub fn sum_of_squares(rep: &Representation) -> Self {
        Constraint::SumOfSquares {
            target: rep.target(),
            parts: rep.parts().to_vec(),
        }
    }

    /// Validates and orders a coprime split.
    pub fn multiplicative(m: u64, l: u64) -> Result<Self, SolveError> {
        let (m, l) = (m.min(l), m.max(l));
        let n = m.checked_mul(l);
        match n {
            Some(n) if m >= 2 && gcd(m, l) == 1 => Ok(Constraint::Multiplicative { n, m, l }),
            _ => Err(SolveError::InvalidConstraint(format!(
                "{m} and {l} do not form a coprime split"
            ))),
        }
    }

    pub fn target(&self) -> u64 {
        match self {
            Constraint::SumOfSquares { target, .. } => *target,
            Constraint::Multiplicative { n, .. } => *n,
        }
    }

    pub(crate) fn validate(&self, k: usize) -> Result<(), SolveError> {
        match self {
            Constraint::SumOfSquares { target, parts } => {
                if parts.len() != k {
                    return Err(SolveError::InvalidConstraint(format!(
                        "{self} has {} parts, expected {k}",
                        parts.len()
                    )));
                }
                Representation::new(*target, parts.clone())
                    .map(|_| ())
                    .map_err(|e| SolveError::InvalidConstraint(e.to_string()))
            }
            Constraint::Multiplicative { n, m, l } => {
                let again = Constraint::multiplicative(*m, *l)?;
                if again.target() != *n {
                    return Err(SolveError::InvalidConstraint(format!("{m}*{l} != {n}")));
                }
                Ok(())
            }
        }
    }

    /// Every `n` whose value this constraint mentions.
    pub fn arguments(&self) -> BTreeSet<u64> {
        match self {
            Constraint::SumOfSquares { target, parts } => {
                let mut out: BTreeSet<u64> = parts.iter().copied().collect();
                out.insert(*target);
                out
            }
            Constraint::Multiplicative { n, m, l } => [*n, *m, *l].into_iter().collect(),
        }
    }

    /// The constraint as a polynomial that vanishes on every solution.
    pub(crate) fn polynomial(&self) -> Poly {
        match self {
            Constraint::SumOfSquares { target, parts } => {
                let mut p = Poly::atom(Atom::value(*target));
                for &x in parts {
                    p = p.sub(&Poly::atom(Atom::square(x)));
                }
                p
            }
            Constraint::Multiplicative { n, m, l } => Poly::atom(Atom::value(*n))
                .sub(&Poly::atom(Atom::value(*m)).mul(&Poly::atom(Atom::value(*l)))),
        }
    }

    /// `f(n)^2 = f(m)^2 f(l)^2` for a multiplicative split.
    pub(crate) fn squared_polynomial(&self) -> Option<Poly> {
        match self {
            Constraint::Multiplicative { n, m, l } => Some(
                Poly::atom(Atom::square(*n))
                    .sub(&Poly::atom(Atom::square(*m)).mul(&Poly::atom(Atom::square(*l)))),
            ),
            Constraint::SumOfSquares { .. } => None,
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constraint::SumOfSquares { target, parts } => {
                write!(f, "f({target}) = ")?;
                for (i, x) in parts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" + ")?;
                    }
                    write!(f, "f({x})^2")?;
                }
                Ok(())
            }
            Constraint::Multiplicative { n, m, l } => write!(f, "f({n}) = f({m})f({l})"),
        }
    }
}

/// For every `n <= bound`: the first `per_target_cap` representations of `n`
/// as `k` positive squares and every coprime split of `n`.
pub fn generate_constraints(k: usize, bound: u64, per_target_cap: usize) -> Vec<Constraint> {
    let mut table = ReprTable::new();
    generate_with(&mut table, k, bound, per_target_cap)
}

pub(crate) fn generate_with(
    table: &mut ReprTable,
    k: usize,
    bound: u64,
    per_target_cap: usize,
) -> Vec<Constraint> {
    let mut out = Vec::new();
    for n in 1..=bound {
        out.extend(
            table
                .enumerate(n, k, per_target_cap)
                .representations
                .iter()
                .map(Constraint::sum_of_squares),
        );
        out.extend(
            coprime_splits(n)
                .into_iter()
                .map(|(m, l)| Constraint::Multiplicative { n, m, l }),
        );
    }
    out
}

/// Candidate values for one unknown.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CandidateSet {
    Unknown,
    Finite(BTreeSet<Value>),
}

impl CandidateSet {
    pub fn singleton(v: Value) -> Self {
        CandidateSet::Finite([v].into_iter().collect())
    }

    pub fn of<I: IntoIterator<Item = Value>>(values: I) -> Self {
        CandidateSet::Finite(values.into_iter().collect())
    }

    pub fn contains(&self, v: &Value) -> bool {
        match self {
            CandidateSet::Unknown => true,
            CandidateSet::Finite(s) => s.contains(v),
        }
    }

    pub fn as_singleton(&self) -> Option<&Value> {
        match self {
            CandidateSet::Finite(s) if s.len() == 1 => s.iter().next(),
            _ => None,
        }
    }

    pub fn values(&self) -> Option<&BTreeSet<Value>> {
        match self {
            CandidateSet::Finite(s) => Some(s),
            CandidateSet::Unknown => None,
        }
    }

    /// `self ⊆ other` (everything is a subset of `Unknown`).
    pub fn is_subset_of(&self, other: &CandidateSet) -> bool {
        match (self, other) {
            (_, CandidateSet::Unknown) => true,
            (CandidateSet::Unknown, CandidateSet::Finite(_)) => false,
            (CandidateSet::Finite(a), CandidateSet::Finite(b)) => a.is_subset(b),
        }
    }
}

impl fmt::Display for CandidateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CandidateSet::Unknown => f.write_str("unknown"),
            CandidateSet::Finite(s) => {
                let items: Vec<String> = s.iter().map(Value::to_string).collect();
                write!(f, "{{{}}}", items.join(", "))
            }
        }
    }
}

impl Serialize for CandidateSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            CandidateSet::Unknown => serializer.serialize_str("unknown"),
            CandidateSet::Finite(s) => {
                let mut seq = serializer.serialize_seq(Some(s.len()))?;
                for v in s {
                    seq.serialize_element(v)?;
                }
                seq.end()
            }
        }
    }
}
