//! Scripted deductions for each case of the theorem.
//!
//! A script is a list of blocks. Each block adds a handful of constraints,
//! propagates, and then checks that the candidate sets are exactly the ones
//! the hand argument claims at that point.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use super::constraint::{CandidateSet, Constraint};
use super::state::{SolverConfig, SolverState, TraceStep};
use super::value::Value;
use super::SolveError;
use crate::arith::{gcd, semigroup_decompositions, SemigroupPair};
use crate::repr::Representation;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReplayError {
    #[error("step {step}: expected {expected}, got {got}")]
    Mismatch {
        step: String,
        expected: String,
        got: String,
    },
    #[error("no sign witness found for f({n})")]
    NoWitness { n: u64 },
    #[error("2k-1 = {} has no admissible decomposition 3a + 8b", 2 * .0 - 1)]
    NoDecomposition(usize),
    #[error("k = {0} has no replay script")]
    UnsupportedK(usize),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Step {
    Add {
        constraint: Constraint,
    },
    /// Pin the sign of `f(n)` through some coprime `m` with `m` and `n*m`
    /// both written with parts whose squares are already known.
    SignWitness {
        n: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Claim {
    /// `f(n)` has exactly these candidates.
    Exactly { n: u64, values: CandidateSet },
    /// `f(n)` has candidates inside `values`, including `n` itself.
    Within { n: u64, values: CandidateSet },
    /// The tuples of values for `f(ns)` not refuted by propagation.
    Jointly {
        ns: Vec<u64>,
        tuples: BTreeSet<Vec<Value>>,
    },
}

impl fmt::Display for Claim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Claim::Exactly { n, values } => write!(f, "f({n}) = {values}"),
            Claim::Within { n, values } => write!(f, "f({n}) within {values}"),
            Claim::Jointly { ns, tuples } => {
                let names: Vec<String> = ns.iter().map(|n| format!("f({n})")).collect();
                write!(f, "({}) in {}", names.join(", "), tuple_set(tuples))
            }
        }
    }
}

fn tuple_set(tuples: &BTreeSet<Vec<Value>>) -> String {
    let items: Vec<String> = tuples
        .iter()
        .map(|t| {
            let vs: Vec<String> = t.iter().map(Value::to_string).collect();
            format!("({})", vs.join(", "))
        })
        .collect();
    format!("{{{}}}", items.join(", "))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Block {
    pub name: String,
    pub steps: Vec<Step>,
    pub claims: Vec<Claim>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClaimOutcome {
    pub claim: String,
    pub got: String,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlockOutcome {
    pub name: String,
    pub constraints: Vec<String>,
    pub claims: Vec<ClaimOutcome>,
    /// Trace steps `first_step..end_step` were produced by this block.
    pub first_step: usize,
    pub end_step: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Trace {
    pub k: usize,
    pub blocks: Vec<BlockOutcome>,
    pub steps: Vec<TraceStep>,
    pub identity_preserved: bool,
}

fn ones(c: usize) -> Vec<u64> {
    vec![1; c]
}

fn padded(mut parts: Vec<u64>, k: usize) -> Vec<u64> {
    let extra = k - parts.len();
    parts.extend(ones(extra));
    parts
}

fn sos(parts: Vec<u64>) -> Step {
    let target = parts.iter().map(|x| x * x).sum();
    let rep = Representation::from_unordered(target, parts).expect("square sum by construction");
    Step::Add {
        constraint: Constraint::sum_of_squares(&rep),
    }
}

fn mult(m: u64, l: u64) -> Step {
    Step::Add {
        constraint: Constraint::multiplicative(m, l).expect("coprime by construction"),
    }
}

fn ints(xs: &[i64]) -> CandidateSet {
    CandidateSet::of(xs.iter().map(|&x| Value::int(x)))
}

fn exactly(n: u64, xs: &[i64]) -> Claim {
    Claim::Exactly {
        n,
        values: ints(xs),
    }
}

fn pinned(n: u64) -> Claim {
    exactly(n, &[n as i64])
}

fn signed(n: u64) -> Claim {
    exactly(n, &[-(n as i64), n as i64])
}

fn block(name: impl Into<String>, steps: Vec<Step>, claims: Vec<Claim>) -> Block {
    Block {
        name: name.into(),
        steps,
        claims,
    }
}

fn script_k4() -> Vec<Block> {
    let mut exceptional = Vec::new();
    let mut claims = Vec::new();
    for (p, parts) in [
        (11, vec![4, 2, 1, 1]),
        (17, vec![5, 2, 2, 1]),
        (29, vec![7, 2, 2, 1]),
        (41, vec![7, 5, 2, 2]),
    ] {
        exceptional.push(mult(2, p));
        exceptional.push(sos(parts));
        claims.push(pinned(p));
    }
    vec![
        block("f(4)", vec![sos(ones(4))], vec![pinned(4)]),
        block(
            "f(12)",
            vec![mult(3, 4), sos(vec![3, 1, 1, 1])],
            vec![exactly(3, &[1, 3])],
        ),
        block(
            "f(20)",
            vec![mult(4, 5), sos(vec![3, 3, 1, 1])],
            vec![exactly(5, &[1, 5])],
        ),
        block(
            "f(28)",
            vec![mult(4, 7), sos(vec![3, 3, 3, 1])],
            vec![exactly(7, &[1, 7])],
        ),
        block(
            "f(35)",
            vec![mult(5, 7), sos(vec![4, 3, 3, 1])],
            vec![pinned(3), pinned(5), pinned(7)],
        ),
        block(
            "f(10), f(7)",
            vec![mult(2, 5), sos(vec![2, 2, 1, 1]), sos(vec![2, 1, 1, 1])],
            vec![pinned(2)],
        ),
        block(
            "f(18)",
            vec![mult(2, 9), sos(vec![3, 2, 2, 1])],
            vec![pinned(9)],
        ),
        block("f(22), f(34), f(58), f(82)", exceptional, claims),
        block(
            "f(40), m = 1",
            vec![
                sos(vec![4, 4, 2, 2]),
                mult(5, 8),
                mult(2, 3),
                mult(2, 7),
                mult(3, 8),
                mult(7, 8),
            ],
            vec![pinned(8), pinned(6), pinned(14), pinned(24), pinned(56)],
        ),
    ]
}

fn script_k5() -> Vec<Block> {
    vec![
        block("f(5)", vec![sos(ones(5))], vec![pinned(5)]),
        block(
            "f(20)",
            vec![mult(4, 5), sos(vec![4, 1, 1, 1, 1]), sos(vec![2; 5])],
            vec![exactly(4, &[1, 4]), exactly(2, &[-2, -1, 1, 2])],
        ),
        block(
            "f(29)",
            vec![
                sos(vec![5, 1, 1, 1, 1]),
                sos(vec![3, 3, 3, 1, 1]),
                sos(vec![4, 2, 2, 2, 1]),
            ],
            vec![pinned(29), signed(2), signed(3), pinned(4)],
        ),
        block(
            "signs",
            vec![
                Step::SignWitness { n: 2 },
                Step::SignWitness { n: 3 },
                mult(2, 3),
            ],
            vec![pinned(2), pinned(3), pinned(6)],
        ),
    ]
}

fn script_k6() -> Vec<Block> {
    vec![
        block("f(6)", vec![sos(ones(6))], vec![pinned(6)]),
        block(
            "f(30), f(41), f(21)",
            vec![
                mult(5, 6),
                sos(padded(vec![5], 6)),
                sos(padded(vec![3, 3, 3], 6)),
                sos(padded(vec![4, 2, 2, 2], 6)),
                sos(padded(vec![6], 6)),
                sos(padded(vec![5, 3, 2], 6)),
                sos(padded(vec![4], 6)),
                sos(padded(vec![2; 5], 6)),
            ],
            vec![signed(2), signed(3), signed(4), pinned(5)],
        ),
        block(
            "signs",
            vec![
                Step::SignWitness { n: 2 },
                Step::SignWitness { n: 3 },
                Step::SignWitness { n: 4 },
                mult(2, 3),
            ],
            (2..=6).map(pinned).collect(),
        ),
    ]
}

fn script_k7() -> Vec<Block> {
    vec![
        block("f(7)", vec![sos(ones(7))], vec![pinned(7)]),
        block(
            "f(31)",
            vec![
                sos(padded(vec![3, 3, 3], 7)),
                sos(padded(vec![4, 2, 2, 2], 7)),
                sos(padded(vec![5], 7)),
            ],
            vec![],
        ),
        block(
            "f(42)",
            vec![
                mult(2, 3),
                sos(padded(vec![6], 7)),
                sos(padded(vec![4, 3, 2, 2, 2, 2], 7)),
                sos(padded(vec![5, 3, 2], 7)),
            ],
            vec![],
        ),
        block(
            "f(55)",
            vec![sos(padded(vec![7], 7)), sos(padded(vec![5, 5], 7))],
            vec![signed(5), signed(2), signed(3), signed(4)],
        ),
        block(
            "signs",
            (2..=5)
                .map(|n| Step::SignWitness { n })
                .chain([mult(2, 3)])
                .collect(),
            (2..=7).map(pinned).collect(),
        ),
    ]
}

/// `(a, b)` with `3a + 8b = 2k - 1`, `b` maximal, and `a + b <= k - 1`.
pub fn frobenius_split(k: usize) -> Option<(u64, u64)> {
    let pair = SemigroupPair::new(3, 8).expect("coprime generators");
    semigroup_decompositions(2 * k as u64 - 1, pair)
        .into_iter()
        .find(|&(a, b)| a + b < k as u64)
}

fn script_general(k: usize) -> Result<Vec<Block>, ReplayError> {
    let kk = k as u64;
    let (a, b) = frobenius_split(k).ok_or(ReplayError::NoDecomposition(k))?;
    let mut big = vec![kk - 1];
    big.extend(vec![3; b as usize]);
    big.extend(vec![2; a as usize]);
    let joint = [(1, 1), (2, 3)]
        .into_iter()
        .flat_map(|(x, y)| {
            [(x, y), (x, -y), (-x, y), (-x, -y)].map(|(p, q)| vec![Value::int(p), Value::int(q)])
        })
        .collect();
    let small = [
        (vec![4, 2, 2, 2], vec![3, 3, 3, 1]),
        (vec![5, 1, 1], vec![3, 3, 3]),
        (vec![7, 1], vec![5, 5]),
        (vec![8, 1], vec![7, 4]),
        (vec![9, 2], vec![7, 6]),
    ];
    let mut table: Vec<Step> = small
        .into_iter()
        .flat_map(|(l, r)| [sos(padded(l, k)), sos(padded(r, k))])
        .collect();
    table.push(mult(2, 3));
    table.push(mult(2, 5));
    Ok(vec![
        block(format!("f({k})"), vec![sos(ones(k))], vec![pinned(kk)]),
        block(
            format!("f({})", kk * (kk - 1)),
            vec![mult(kk - 1, kk), sos(padded(vec![kk - 1], k))],
            vec![exactly(kk - 1, &[1, kk as i64 - 1])],
        ),
        block(
            "40 and 32",
            vec![
                mult(2, 3),
                sos(padded(vec![6], k)),
                sos(padded(vec![3, 3, 3, 3, 2], k)),
                sos(padded(vec![3, 3, 3], k)),
                sos(padded(vec![2; 8], k)),
            ],
            vec![
                exactly(2, &[-2, -1, 1, 2]),
                exactly(3, &[-3, -1, 1, 3]),
                Claim::Jointly {
                    ns: vec![2, 3],
                    tuples: joint,
                },
            ],
        ),
        block(
            format!("f({})", kk * kk + kk - 1),
            vec![sos(padded(vec![kk], k)), sos(padded(big, k))],
            vec![signed(2), signed(3), pinned(kk - 1)],
        ),
        block(
            "small identities",
            table,
            (2..=10)
                .map(|n| Claim::Within {
                    n,
                    values: ints(&[-(n as i64), n as i64]),
                })
                .collect(),
        ),
        block(
            "signs",
            [2, 3, 4, 5, 7, 8, 9]
                .into_iter()
                .map(|n| Step::SignWitness { n })
                .collect(),
            (2..=10).map(pinned).collect(),
        ),
    ])
}

/// The deduction script for `k`.
pub fn script(k: usize) -> Result<Vec<Block>, ReplayError> {
    match k {
        4 => Ok(script_k4()),
        5 => Ok(script_k5()),
        6 => Ok(script_k6()),
        7 => Ok(script_k7()),
        k if k >= 8 => script_general(k),
        k => Err(ReplayError::UnsupportedK(k)),
    }
}

/// The constraints pinning the sign of `f(n)`, or `None` if no coprime
/// `m <= limit` works with the squares currently known.
pub fn sign_witness(state: &mut SolverState, n: u64, limit: u64) -> Option<[Constraint; 3]> {
    let k = state.k();
    let cap = state.pinned_square_prefix();
    if cap == 0 {
        return None;
    }
    let table = state.repr_table();
    let first = |table: &mut crate::repr::ReprTable, t: u64| {
        table
            .enumerate_bounded(t, k, cap, 1)
            .representations
            .into_iter()
            .next()
    };
    (2..=limit).filter(|&m| gcd(m, n) == 1).find_map(|m| {
        let low = first(table, m)?;
        let high = first(table, n * m)?;
        Some([
            Constraint::sum_of_squares(&low),
            Constraint::sum_of_squares(&high),
            Constraint::multiplicative(n, m).ok()?,
        ])
    })
}

const WITNESS_LIMIT: u64 = 10_000;

fn check_claim(state: &SolverState, claim: &Claim) -> ClaimOutcome {
    let (holds, got) = match claim {
        Claim::Exactly { n, values } => {
            let got = state.candidates(*n);
            (got == *values, got.to_string())
        }
        Claim::Within { n, values } => {
            let got = state.candidates(*n);
            let holds = got.is_subset_of(values) && got.contains(&Value::from_u64(*n));
            (holds, got.to_string())
        }
        Claim::Jointly { ns, tuples } => match state.joint_candidates(ns) {
            Some(got) => (got == *tuples, tuple_set(&got)),
            None => (false, "unknown".to_string()),
        },
    };
    ClaimOutcome {
        claim: claim.to_string(),
        got,
        holds,
    }
}

/// Runs the script for `k` on a fresh state tracking arguments up to
/// `bound`, returning the state for further work together with the trace.
pub fn replay_state(
    k: usize,
    bound: u64,
    config: SolverConfig,
) -> Result<(SolverState, Trace), ReplayError> {
    let blocks = script(k)?;
    let mut state = SolverState::new(k, bound, config);
    let mut outcomes = Vec::new();
    for b in blocks {
        let first_step = state.trace().len();
        let mut added = Vec::new();
        for step in &b.steps {
            let cs = match step {
                Step::Add { constraint } => vec![constraint.clone()],
                Step::SignWitness { n } if state.is_pinned(*n) => vec![],
                Step::SignWitness { n } => sign_witness(&mut state, *n, WITNESS_LIMIT)
                    .ok_or(ReplayError::NoWitness { n: *n })?
                    .to_vec(),
            };
            for c in cs {
                added.push(c.to_string());
                state.add_constraint(c)?;
            }
            state.propagate()?;
        }
        let claims: Vec<ClaimOutcome> = b.claims.iter().map(|c| check_claim(&state, c)).collect();
        if let Some(bad) = claims.iter().find(|c| !c.holds) {
            return Err(ReplayError::Mismatch {
                step: b.name,
                expected: bad.claim.clone(),
                got: bad.got.clone(),
            });
        }
        outcomes.push(BlockOutcome {
            name: b.name,
            constraints: added,
            claims,
            first_step,
            end_step: state.trace().len(),
        });
    }
    let trace = Trace {
        k,
        blocks: outcomes,
        steps: state.trace().to_vec(),
        identity_preserved: state.identity_preserved(),
    };
    Ok((state, trace))
}

pub fn replay_script(k: usize) -> Result<Trace, ReplayError> {
    let bound = if k >= 8 { k as u64 + 1 } else { 10 };
    replay_state(k, bound, SolverConfig::default()).map(|(_, t)| t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frobenius_split_examples() {
        assert_eq!(frobenius_split(8), Some((5, 0)));
        assert_eq!(frobenius_split(9), Some((3, 1)));
        for k in 8..200 {
            let (a, b) = frobenius_split(k).unwrap();
            assert_eq!(3 * a + 8 * b, 2 * k as u64 - 1);
            assert!(a + b < k as u64);
        }
    }

    #[test]
    fn scripts_exist_from_four() {
        assert!(matches!(script(3), Err(ReplayError::UnsupportedK(3))));
        for k in 4..=16 {
            assert!(!script(k).unwrap().is_empty());
        }
    }

    #[test]
    fn replays_hold() {
        for k in [4, 5, 6, 7, 8, 9, 10, 11] {
            let t = replay_script(k).unwrap_or_else(|e| panic!("k = {k}: {e}"));
            assert!(t.identity_preserved);
            assert!(t.blocks.iter().all(|b| b.claims.iter().all(|c| c.holds)));
        }
    }
}
