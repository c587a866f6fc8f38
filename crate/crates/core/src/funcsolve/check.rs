use std::collections::BTreeMap;

use serde::Serialize;

use super::constraint::{generate_constraints, Constraint};
use super::value::Value;
use super::SolveError;
use crate::arith::factorize;

/// A generated constraint that the supplied function fails.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub constraint: Constraint,
    pub lhs: Value,
    pub rhs: Value,
}

/// Extends `values` (given on prime powers) multiplicatively and evaluates
/// every constraint generated up to `bound`.
pub fn check_function(
    values: &BTreeMap<u64, Value>,
    k: usize,
    bound: u64,
    rep_cap: usize,
) -> Result<Vec<Violation>, SolveError> {
    let mut f = vec![Value::one(); bound as usize + 1];
    for n in 2..=bound {
        let mut v = Value::one();
        for q in factorize(n).prime_powers() {
            let fq = values.get(&q).ok_or(SolveError::MissingValue(q))?;
            v = &v * fq;
        }
        f[n as usize] = v;
    }
    let at = |n: u64| &f[n as usize];
    let mut out = Vec::new();
    for c in generate_constraints(k, bound, rep_cap) {
        let (lhs, rhs) = match &c {
            Constraint::SumOfSquares { target, parts } => (
                at(*target).clone(),
                parts
                    .iter()
                    .fold(Value::zero(), |acc, &x| &acc + &at(x).square()),
            ),
            Constraint::Multiplicative { n, m, l } => (at(*n).clone(), at(*m) * at(*l)),
        };
        if lhs != rhs {
            out.push(Violation {
                constraint: c,
                lhs,
                rhs,
            });
        }
    }
    Ok(out)
}

/// The identity on every prime power up to `bound`.
pub fn identity_on_prime_powers(bound: u64) -> BTreeMap<u64, Value> {
    (2..=bound)
        .filter(|&n| factorize(n).is_prime_power())
        .map(|n| (n, Value::from_u64(n)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_has_no_violations() {
        let id = identity_on_prime_powers(100);
        assert!(check_function(&id, 4, 100, 16).unwrap().is_empty());
    }

    #[test]
    fn branch_with_small_values_fails_at_35() {
        let mut f = identity_on_prime_powers(35);
        for p in [3, 5, 7] {
            f.insert(p, Value::one());
        }
        let vs = check_function(&f, 4, 35, 16).unwrap();
        let v = vs
            .iter()
            .find(|v| v.constraint.target() == 35)
            .expect("violation at 35");
        assert_eq!(v.lhs, Value::int(1));
        assert_eq!(v.rhs, Value::int(19));
    }

    #[test]
    fn sign_flip_fails_at_12() {
        let mut f = identity_on_prime_powers(12);
        f.insert(3, Value::int(-3));
        let vs = check_function(&f, 4, 12, 16).unwrap();
        let v = vs.iter().find(|v| v.constraint.target() == 12).unwrap();
        assert_eq!(v.lhs, Value::int(-12));
        assert_eq!(v.rhs, Value::int(12));
    }

    #[test]
    fn missing_prime_power() {
        let mut f = identity_on_prime_powers(20);
        f.remove(&9);
        assert_eq!(
            check_function(&f, 4, 20, 16),
            Err(SolveError::MissingValue(9))
        );
    }
}
