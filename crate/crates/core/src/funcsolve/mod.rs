//! Solving the functional equation on a bounded range of arguments.

mod check;
mod constraint;
mod poly;
pub mod replay;
mod state;
mod value;

use thiserror::Error;

pub use check::{check_function, identity_on_prime_powers, Violation};
pub use constraint::{generate_constraints, CandidateSet, Constraint};
pub use poly::{evaluate, roots, Atom, AtomKind, Poly, Roots};
pub use replay::{replay_script, replay_state, ReplayError, Trace};
pub use state::{
    solve, solve_state, Rule, SolverConfig, SolverReport, SolverState, TraceStep, Unresolved,
};
pub use value::{ParseValueError, Value};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("invalid constraint: {0}")]
    InvalidConstraint(String),
    #[error("no candidate for f({n}) survives {constraint}")]
    Contradiction { n: u64, constraint: String },
    #[error("revision budget exhausted after {revisions} revisions")]
    BudgetExceeded {
        revisions: u64,
        partial: Box<SolverReport>,
    },
    #[error("{target} = {n}*({n}-1) has no representation with parts below {n}")]
    NoSmallRepresentation { n: u64, target: u64 },
    #[error("f({n}) is still undetermined after the induction step")]
    InductionFailed { n: u64 },
    #[error("no value supplied for f({0})")]
    MissingValue(u64),
    #[error("k = {0} is not supported")]
    UnsupportedK(usize),
}
