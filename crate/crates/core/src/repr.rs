//! Representations of an integer as a sum of exactly `k` squares of positive
//! integers, and the exceptional sets of integers that have none.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::arith::isqrt;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReprError {
    #[error("closed-form exceptional sets are only known for k >= 4 (got k = {0})")]
    UnsupportedK(usize),
    #[error("parts {parts:?} do not form a canonical representation of {target}")]
    Invalid { target: u64, parts: Vec<u64> },
}

/// A canonical representation `target = x_1^2 + ... + x_k^2` with
/// `x_1 >= x_2 >= ... >= x_k >= 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Representation {
    target: u64,
    parts: Vec<u64>,
}

impl Representation {
    pub fn new(target: u64, parts: Vec<u64>) -> Result<Self, ReprError> {
        let canonical = !parts.is_empty()
            && parts.windows(2).all(|w| w[0] >= w[1])
            && parts.iter().all(|&x| x >= 1);
        let sum = parts.iter().try_fold(0u64, |acc, &x| {
            x.checked_mul(x).and_then(|sq| acc.checked_add(sq))
        });
        if !canonical || sum != Some(target) {
            return Err(ReprError::Invalid { target, parts });
        }
        Ok(Self { target, parts })
    }

    /// Sorts `parts` into canonical order before validating.
    pub fn from_unordered(target: u64, mut parts: Vec<u64>) -> Result<Self, ReprError> {
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Self::new(target, parts)
    }

    pub fn target(&self) -> u64 {
        self.target
    }

    pub fn parts(&self) -> &[u64] {
        &self.parts
    }

    pub fn k(&self) -> usize {
        self.parts.len()
    }

    /// Appends `extra` parts equal to one, raising the target accordingly.
    pub fn padded(&self, extra: usize) -> Self {
        let mut parts = self.parts.clone();
        parts.extend(std::iter::repeat_n(1, extra));
        Self {
            target: self.target + extra as u64,
            parts,
        }
    }

    /// Distinct parts with their multiplicities, largest part first.
    pub fn multiplicities(&self) -> Vec<(u64, usize)> {
        let mut out: Vec<(u64, usize)> = Vec::new();
        for &x in &self.parts {
            match out.last_mut() {
                Some((y, c)) if *y == x => *c += 1,
                _ => out.push((x, 1)),
            }
        }
        out
    }
}

impl fmt::Display for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = ", self.target)?;
        for (i, x) in self.parts.iter().enumerate() {
            if i > 0 {
                f.write_str("+")?;
            }
            write!(f, "{x}^2")?;
        }
        Ok(())
    }
}

/// Output of [`ReprTable::enumerate`]: a prefix of the representations in
/// lexicographically decreasing order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Enumeration {
    pub representations: Vec<Representation>,
    pub truncated: bool,
}

/// Memoized decision and counting tables keyed on `(n, k, max_part)`.
///
/// A table is single-owner; concurrent workers each build their own.
#[derive(Debug, Clone, Default)]
pub struct ReprTable {
    feasible: HashMap<(u64, usize, u64), bool>,
    counts: HashMap<(u64, usize, u64), u128>,
}

impl ReprTable {
    pub fn new() -> Self {
        Self::default()
    }

    // Largest part worth trying for `n` split into `k` parts capped at `max`.
    fn top(n: u64, k: usize, max: u64) -> u64 {
        max.min(isqrt(n - (k as u64 - 1)))
    }

    /// Is `n` a sum of `k` positive squares, each part at most `max_part`?
    pub fn feasible(&mut self, n: u64, k: usize, max_part: u64) -> bool {
        if k == 0 {
            return n == 0;
        }
        if n < k as u64 || max_part == 0 {
            return false;
        }
        let m = Self::top(n, k, max_part);
        if (k as u128) * (m as u128) * (m as u128) < n as u128 {
            return false;
        }
        if k == 1 {
            return m * m == n;
        }
        if let Some(&hit) = self.feasible.get(&(n, k, m)) {
            return hit;
        }
        let mut found = false;
        for x in (1..=m).rev() {
            if (k as u128) * (x as u128) * (x as u128) < n as u128 {
                break;
            }
            if self.feasible(n - x * x, k - 1, x) {
                found = true;
                break;
            }
        }
        self.feasible.insert((n, k, m), found);
        found
    }

    pub fn is_representable(&mut self, n: u64, k: usize) -> bool {
        n >= 1 && self.feasible(n, k, isqrt(n))
    }

    /// Number of canonical representations with every part at most `max_part`.
    pub fn count_bounded(&mut self, n: u64, k: usize, max_part: u64) -> u128 {
        if k == 0 {
            return u128::from(n == 0);
        }
        if n < k as u64 || max_part == 0 {
            return 0;
        }
        let m = Self::top(n, k, max_part);
        if k == 1 {
            return u128::from(m * m == n);
        }
        if let Some(&c) = self.counts.get(&(n, k, m)) {
            return c;
        }
        let mut total = 0u128;
        for x in (1..=m).rev() {
            if (k as u128) * (x as u128) * (x as u128) < n as u128 {
                break;
            }
            total += self.count_bounded(n - x * x, k - 1, x);
        }
        self.counts.insert((n, k, m), total);
        total
    }

    pub fn count(&mut self, n: u64, k: usize) -> u128 {
        if n == 0 {
            return 0;
        }
        self.count_bounded(n, k, isqrt(n))
    }

    /// Canonical representations in lexicographically decreasing order; at
    /// most `limit` are returned, with `truncated` set when more exist.
    pub fn enumerate(&mut self, n: u64, k: usize, limit: usize) -> Enumeration {
        self.enumerate_bounded(n, k, isqrt(n), limit)
    }

    /// As [`ReprTable::enumerate`], restricted to parts `<= max_part`.
    pub fn enumerate_bounded(
        &mut self,
        n: u64,
        k: usize,
        max_part: u64,
        limit: usize,
    ) -> Enumeration {
        let mut out = Vec::new();
        let mut prefix = Vec::with_capacity(k);
        let mut truncated = false;
        if n >= 1 && k >= 1 {
            self.walk(n, k, max_part, limit, &mut prefix, &mut out, &mut truncated);
        }
        Enumeration {
            representations: out
                .into_iter()
                .map(|parts| Representation { target: n, parts })
                .collect(),
            truncated,
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn walk(
        &mut self,
        rest: u64,
        k: usize,
        max: u64,
        limit: usize,
        prefix: &mut Vec<u64>,
        out: &mut Vec<Vec<u64>>,
        truncated: &mut bool,
    ) {
        if *truncated {
            return;
        }
        if k == 0 {
            if rest == 0 {
                if out.len() == limit {
                    *truncated = true;
                } else {
                    out.push(prefix.clone());
                }
            }
            return;
        }
        if !self.feasible(rest, k, max) {
            return;
        }
        let m = Self::top(rest, k, max);
        for x in (1..=m).rev() {
            if (k as u128) * (x as u128) * (x as u128) < rest as u128 {
                break;
            }
            if !self.feasible(rest - x * x, k - 1, x) {
                continue;
            }
            prefix.push(x);
            self.walk(rest - x * x, k - 1, x, limit, prefix, out, truncated);
            prefix.pop();
            if *truncated {
                return;
            }
        }
    }
}

pub fn is_representable(n: u64, k: usize) -> bool {
    ReprTable::new().is_representable(n, k)
}

pub fn count(n: u64, k: usize) -> u128 {
    ReprTable::new().count(n, k)
}

pub fn enumerate(n: u64, k: usize, limit: usize) -> Enumeration {
    ReprTable::new().enumerate(n, k, limit)
}

/// Closed-form membership in the exceptional set for `k >= 4`.
///
/// For `k = 5` the set is the union of `{33}` with the general `k >= 5`
/// list.
pub fn is_dubouis_exception(n: u64, k: usize) -> Result<bool, ReprError> {
    if k < 4 {
        return Err(ReprError::UnsupportedK(k));
    }
    if n == 0 {
        return Ok(true);
    }
    if k == 4 {
        if [1, 3, 5, 9, 11, 17, 29, 41].contains(&n) {
            return Ok(true);
        }
        let mut m = n;
        while m.is_multiple_of(4) {
            m /= 4;
        }
        return Ok([2, 6, 14].contains(&m));
    }
    let k = k as u64;
    if n < k {
        return Ok(true);
    }
    if n > k && [1, 2, 4, 5, 7, 10, 13].contains(&(n - k)) {
        return Ok(true);
    }
    Ok(k == 5 && n == 33)
}

/// `{n <= bound : n is not a sum of k positive squares}`, computed bottom-up.
pub fn exceptional_set(k: usize, bound: u64) -> Vec<u64> {
    let reach = reachability(k, bound);
    (1..=bound).filter(|&n| !reach[n as usize]).collect()
}

// reach[n] is true iff n is a sum of exactly k positive squares.
fn reachability(k: usize, bound: u64) -> Vec<bool> {
    let size = bound as usize + 1;
    let squares: Vec<usize> = (1..)
        .map(|x: usize| x * x)
        .take_while(|&s| s < size)
        .collect();
    let mut layer = vec![false; size];
    layer[0] = true;
    for _ in 0..k {
        let mut next = vec![false; size];
        for (n, &hit) in layer.iter().enumerate() {
            if !hit {
                continue;
            }
            for &s in &squares {
                if n + s >= size {
                    break;
                }
                next[n + s] = true;
            }
        }
        layer = next;
    }
    layer
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExceptionalSetReport {
    pub k: usize,
    pub bound: u64,
    pub computed: Vec<u64>,
    pub closed_form: Vec<u64>,
    pub agree: bool,
}

pub fn verify_dubouis(k: usize, bound: u64) -> Result<ExceptionalSetReport, ReprError> {
    let closed_form = (1..=bound)
        .filter_map(|n| match is_dubouis_exception(n, k) {
            Ok(true) => Some(Ok(n)),
            Ok(false) => None,
            Err(e) => Some(Err(e)),
        })
        .collect::<Result<Vec<_>, _>>()?;
    let computed = exceptional_set(k, bound);
    let agree = computed == closed_form;
    Ok(ExceptionalSetReport {
        k,
        bound,
        computed,
        closed_form,
        agree,
    })
}

/// Which reading of the `k = 5` exceptional set the computed one supports:
/// the union of `{33}` with the general list, or `{33}` on its own.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct K5Reading {
    pub union_matches: bool,
    pub singleton_matches: bool,
}

pub fn classify_k5_reading(bound: u64) -> K5Reading {
    let computed = exceptional_set(5, bound);
    let union: Vec<u64> = (1..=bound)
        .filter(|&n| is_dubouis_exception(n, 5).unwrap_or(false))
        .collect();
    let singleton: Vec<u64> = (1..=bound).filter(|&n| n == 33).collect();
    K5Reading {
        union_matches: computed == union,
        singleton_matches: computed == singleton,
    }
}
