//! Integer utilities: trial-division factorization, coprime splits and the
//! two-generator numerical semigroup machinery (Frobenius numbers).

use num_integer::Integer;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("generators {a} and {b} are not coprime")]
    NotCoprime { a: u64, b: u64 },
    #[error("semigroup generators must be at least 2 (got {a}, {b})")]
    InvalidGenerator { a: u64, b: u64 },
    #[error("{t} is not a non-negative combination of {a} and {b}")]
    NonRepresentable { t: u64, a: u64, b: u64 },
}

/// A positive integer together with its prime-power factorization.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FactoredInteger {
    pub n: u64,
    /// `(prime, exponent)` pairs, primes strictly increasing.
    pub factors: Vec<(u64, u32)>,
}

impl FactoredInteger {
    pub fn is_prime_power(&self) -> bool {
        self.factors.len() == 1
    }

    /// The prime-power components `p^e` of `n`, in increasing prime order.
    pub fn prime_powers(&self) -> Vec<u64> {
        self.factors.iter().map(|&(p, e)| p.pow(e)).collect()
    }
}

/// Factorizes `n` by trial division up to `sqrt(n)`. Panics on `n = 0`.
pub fn factorize(n: u64) -> FactoredInteger {
    assert!(n >= 1, "factorize expects a positive integer");
    let mut factors = Vec::new();
    let mut rest = n;
    let mut p = 2u64;
    while p.saturating_mul(p) <= rest {
        if rest.is_multiple_of(p) {
            let mut e = 0;
            while rest.is_multiple_of(p) {
                rest /= p;
                e += 1;
            }
            factors.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest > 1 {
        factors.push((rest, 1));
    }
    FactoredInteger { n, factors }
}

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

/// All unordered coprime factor pairs `(m, l)` with `m * l = n`, `2 <= m < l`,
/// sorted by `m`. Empty for `1` and for prime powers.
pub fn coprime_splits(n: u64) -> Vec<(u64, u64)> {
    let powers = factorize(n).prime_powers();
    let r = powers.len();
    if r < 2 {
        return Vec::new();
    }
    let mut splits = Vec::new();
    // Each coprime split is a partition of the prime powers into two
    // non-empty groups; masks with the top bit clear pick each pair once.
    for mask in 1u32..(1 << (r - 1)) {
        let m: u64 = powers
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, q)| q)
            .product();
        let l = n / m;
        splits.push((m.min(l), m.max(l)));
    }
    splits.sort_unstable();
    splits
}

/// Two coprime generators `a, b >= 2` of a numerical semigroup.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SemigroupPair {
    a: u64,
    b: u64,
}

impl SemigroupPair {
    pub fn new(a: u64, b: u64) -> Result<Self, ArithError> {
        if a < 2 || b < 2 {
            return Err(ArithError::InvalidGenerator { a, b });
        }
        if gcd(a, b) != 1 {
            return Err(ArithError::NotCoprime { a, b });
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> u64 {
        self.a
    }

    pub fn b(&self) -> u64 {
        self.b
    }

    fn contains(&self, t: u64) -> bool {
        (0..=t / self.b).any(|y| (t - y * self.b).is_multiple_of(self.a))
    }
}

/// `a*b - a - b`, the largest integer with no representation `x*a + y*b`.
pub fn frobenius_number(pair: SemigroupPair) -> u64 {
    pair.a * pair.b - pair.a - pair.b
}

/// Positive integers with no representation `x*a + y*b`, `x, y >= 0`.
pub fn nonrepresentable_set(pair: SemigroupPair) -> Vec<u64> {
    let frob = frobenius_number(pair);
    (1..=frob).filter(|&t| !pair.contains(t)).collect()
}

/// Every `(x, y)` with `x*a + y*b = t`, ordered by decreasing `y`, where `y`
/// is the coefficient of the larger generator.
pub fn semigroup_decompositions(t: u64, pair: SemigroupPair) -> Vec<(u64, u64)> {
    let (small, large, swapped) = if pair.a <= pair.b {
        (pair.a, pair.b, false)
    } else {
        (pair.b, pair.a, true)
    };
    (0..=t / large)
        .rev()
        .filter_map(|y| {
            let rest = t - y * large;
            rest.is_multiple_of(small).then(|| {
                let x = rest / small;
                if swapped {
                    (y, x)
                } else {
                    (x, y)
                }
            })
        })
        .collect()
}

/// Writes `t = x*a + y*b` with the coefficient on the larger generator
/// maximal.
pub fn represent_in_semigroup(t: u64, pair: SemigroupPair) -> Result<(u64, u64), ArithError> {
    semigroup_decompositions(t, pair)
        .into_iter()
        .next()
        .ok_or(ArithError::NonRepresentable {
            t,
            a: pair.a,
            b: pair.b,
        })
}

/// Integer square root (floor).
pub fn isqrt(n: u64) -> u64 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u64;
    while x.checked_mul(x).is_none_or(|sq| sq > n) {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).is_some_and(|sq| sq <= n) {
        x += 1;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute_nonrepresentable(a: u64, b: u64, limit: u64) -> Vec<u64> {
        (1..=limit)
            .filter(|&t| !(0..=t / a).any(|x| (0..=t / b).any(|y| x * a + y * b == t)))
            .collect()
    }

    #[test]
    fn factorize_examples() {
        assert!(factorize(1).factors.is_empty());
        assert_eq!(factorize(12).factors, vec![(2, 2), (3, 1)]);
        assert_eq!(factorize(1024).factors, vec![(2, 10)]);
        assert_eq!(factorize(9_999_991).factors, vec![(9_999_991, 1)]);
    }

    #[test]
    fn coprime_split_examples() {
        assert_eq!(coprime_splits(12), vec![(3, 4)]);
        assert!(coprime_splits(8).is_empty());
        assert!(coprime_splits(1).is_empty());
        assert_eq!(coprime_splits(30), vec![(2, 15), (3, 10), (5, 6)]);
    }

    #[test]
    fn coprime_splits_match_divisor_scan() {
        for n in 1..=10_000u64 {
            let mut expected = Vec::new();
            for m in 2..n {
                if m * m >= n {
                    break;
                }
                if n % m == 0 && gcd(m, n / m) == 1 {
                    expected.push((m, n / m));
                }
            }
            assert_eq!(coprime_splits(n), expected, "n = {n}");
        }
    }

    #[test]
    fn frobenius_examples() {
        let p38 = SemigroupPair::new(3, 8).unwrap();
        assert_eq!(frobenius_number(p38), 13);
        assert_eq!(nonrepresentable_set(p38), vec![1, 2, 4, 5, 7, 10, 13]);
        let p23 = SemigroupPair::new(2, 3).unwrap();
        assert_eq!(frobenius_number(p23), 1);
        assert_eq!(nonrepresentable_set(p23), vec![1]);
        assert_eq!(frobenius_number(SemigroupPair::new(3, 5).unwrap()), 7);
        assert_eq!(
            nonrepresentable_set(SemigroupPair::new(3, 4).unwrap()),
            vec![1, 2, 5]
        );
    }

    #[test]
    fn semigroup_pair_errors() {
        assert_eq!(
            SemigroupPair::new(4, 6),
            Err(ArithError::NotCoprime { a: 4, b: 6 })
        );
        assert!(matches!(
            SemigroupPair::new(1, 5),
            Err(ArithError::InvalidGenerator { .. })
        ));
    }

    #[test]
    fn represent_examples() {
        let p = SemigroupPair::new(3, 8).unwrap();
        assert_eq!(represent_in_semigroup(19, p), Ok((1, 2)));
        assert_eq!(represent_in_semigroup(3, p), Ok((1, 0)));
        assert_eq!(
            represent_in_semigroup(13, p),
            Err(ArithError::NonRepresentable { t: 13, a: 3, b: 8 })
        );
        // 17 = 3*3 + 8*1
        assert_eq!(represent_in_semigroup(17, p), Ok((3, 1)));
    }

    #[test]
    fn frobenius_matches_brute_force() {
        for a in 2..=20u64 {
            for b in 2..=20u64 {
                match SemigroupPair::new(a, b) {
                    Ok(pair) => {
                        let brute = brute_nonrepresentable(a, b, a * b);
                        assert_eq!(nonrepresentable_set(pair), brute);
                        assert_eq!(brute.last().copied(), Some(frobenius_number(pair)));
                    }
                    Err(e) => assert_eq!(e, ArithError::NotCoprime { a, b }),
                }
            }
        }
    }

    #[test]
    fn isqrt_boundaries() {
        for n in 0..10_000u64 {
            let r = isqrt(n);
            assert!(r * r <= n && (r + 1) * (r + 1) > n);
        }
        assert_eq!(isqrt(u64::MAX), 4_294_967_295);
    }

    proptest! {
        #[test]
        fn factorization_multiplies_back(n in 1u64..10_000_000) {
            let f = factorize(n);
            let product: u64 = f.factors.iter().map(|&(p, e)| p.pow(e)).product();
            prop_assert_eq!(product, n);
            prop_assert!(f.factors.windows(2).all(|w| w[0].0 < w[1].0));
            prop_assert!(f.factors.iter().all(|&(_, e)| e >= 1));
        }

        #[test]
        fn representation_sums_back(a in 2u64..20, b in 2u64..20, t in 1u64..=500) {
            prop_assume!(gcd(a, b) == 1);
            let pair = SemigroupPair::new(a, b).unwrap();
            let holes = nonrepresentable_set(pair);
            match represent_in_semigroup(t, pair) {
                Ok((x, y)) => {
                    prop_assert_eq!(x * a + y * b, t);
                    prop_assert!(!holes.contains(&t));
                }
                Err(_) => prop_assert!(holes.contains(&t)),
            }
        }
    }
}
