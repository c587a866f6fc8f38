//! Sparse multivariate polynomials over the unknowns `f(n)` and `f(n)^2`,
//! with exact univariate root finding for the shapes propagation produces.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use super::value::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AtomKind {
    /// The unknown `f(n)` itself.
    Value,
    /// The unknown `f(n)^2`, tracked separately so its value set can be
    /// finite while `f(n)` has no exact root.
    Square,
}

/// One unknown of the system. Ordered by `n`, with `f(n)^2` above `f(n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Atom {
    pub n: u64,
    pub kind: AtomKind,
}

impl Atom {
    pub fn value(n: u64) -> Self {
        Self {
            n,
            kind: AtomKind::Value,
        }
    }

    pub fn square(n: u64) -> Self {
        Self {
            n,
            kind: AtomKind::Square,
        }
    }

    /// The value this atom takes under the identity function.
    pub fn identity_value(&self) -> Value {
        match self.kind {
            AtomKind::Value => Value::from_u64(self.n),
            AtomKind::Square => Value::from_u64(self.n).square(),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            AtomKind::Value => write!(f, "f({})", self.n),
            AtomKind::Square => write!(f, "f({})^2", self.n),
        }
    }
}

type Monomial = Vec<(Atom, u32)>;

fn mono_mul(a: &Monomial, b: &Monomial) -> Monomial {
    let mut out: BTreeMap<Atom, u32> = a.iter().copied().collect();
    for &(atom, e) in b {
        *out.entry(atom).or_insert(0) += e;
    }
    out.into_iter().collect()
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Poly {
    terms: BTreeMap<Monomial, Value>,
}

impl Poly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Value) -> Self {
        let mut p = Self::zero();
        p.add_term(Vec::new(), c);
        p
    }

    pub fn atom(a: Atom) -> Self {
        let mut p = Self::zero();
        p.add_term(vec![(a, 1)], Value::one());
        p
    }

    fn add_term(&mut self, mono: Monomial, c: Value) {
        if c.is_zero() {
            return;
        }
        let sum = match self.terms.remove(&mono) {
            Some(old) => &old + &c,
            None => c,
        };
        if !sum.is_zero() {
            self.terms.insert(mono, sum);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The constant this polynomial equals, if it has no unknowns.
    pub fn as_constant(&self) -> Option<Value> {
        match self.terms.len() {
            0 => Some(Value::zero()),
            1 => self.terms.get(&Vec::new()).cloned(),
            _ => None,
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(&Value::int(-1)))
    }

    pub fn scale(&self, c: &Value) -> Poly {
        let mut out = Poly::zero();
        for (m, coef) in &self.terms {
            out.add_term(m.clone(), coef * c);
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(mono_mul(ma, mb), ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::constant(Value::one());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        self.terms
            .keys()
            .flat_map(|m| m.iter().map(|&(a, _)| a))
            .collect()
    }

    pub fn leading_atom(&self) -> Option<Atom> {
        self.atoms().into_iter().next_back()
    }

    pub fn degree_in(&self, atom: Atom) -> u32 {
        self.terms
            .keys()
            .flat_map(|m| m.iter())
            .filter(|(a, _)| *a == atom)
            .map(|&(_, e)| e)
            .max()
            .unwrap_or(0)
    }

    /// Replaces every atom for which `lookup` yields a value.
    pub fn substitute<F>(&self, lookup: F) -> Poly
    where
        F: Fn(Atom) -> Option<Value>,
    {
        let mut out = Poly::zero();
        for (mono, c) in &self.terms {
            let mut coef = c.clone();
            let mut rest = Vec::new();
            for &(a, e) in mono {
                match lookup(a) {
                    Some(v) => coef = &coef * &v.pow(e),
                    None => rest.push((a, e)),
                }
            }
            out.add_term(rest, coef);
        }
        out
    }

    /// Replaces `atom` by the polynomial `by`.
    pub fn substitute_poly(&self, atom: Atom, by: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (mono, c) in &self.terms {
            let mut rest = Vec::new();
            let mut power = 0;
            for &(a, e) in mono {
                if a == atom {
                    power = e;
                } else {
                    rest.push((a, e));
                }
            }
            let mut term = Poly::zero();
            term.add_term(rest, c.clone());
            out = out.add(&term.mul(&by.pow(power)));
        }
        out
    }

    /// When `atom` occurs only as a bare linear term `c*atom`, the expression
    /// it equals on the zero set of `self`.
    pub fn solve_linear_for(&self, atom: Atom) -> Option<Poly> {
        let own: Monomial = vec![(atom, 1)];
        let c = self.terms.get(&own)?.clone();
        let others_mention = self
            .terms
            .keys()
            .any(|m| *m != own && m.iter().any(|(a, _)| *a == atom));
        if others_mention {
            return None;
        }
        let mut rest = self.clone();
        rest.terms.remove(&own);
        Some(rest.scale(&(&Value::int(-1) / &c)))
    }

    /// Coefficients (constant term first) of the polynomial in `atom` left
    /// after substituting every other atom through `lookup`.
    pub fn univariate<'a, F>(&self, atom: Atom, lookup: F) -> Vec<Value>
    where
        F: Fn(Atom) -> &'a Value,
    {
        let mut coeffs: Vec<Value> = Vec::new();
        for (mono, c) in &self.terms {
            let mut coef = c.clone();
            let mut power = 0usize;
            for &(a, e) in mono {
                if a == atom {
                    power = e as usize;
                } else {
                    coef = &coef * &lookup(a).pow(e);
                }
            }
            if coeffs.len() <= power {
                coeffs.resize(power + 1, Value::zero());
            }
            coeffs[power] = &coeffs[power] + &coef;
        }
        coeffs
    }

    /// Scales so the coefficient of the greatest monomial is one.
    pub fn monic(&self) -> Poly {
        match self.terms.values().next_back() {
            Some(lead) => self.scale(&(&Value::one() / lead)),
            None => Poly::zero(),
        }
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (mono, c)) in self.terms.iter().rev().enumerate() {
            let text = c.to_string();
            let complex = text[1..].contains(['+', '-']);
            let (neg, body) = match text.strip_prefix('-') {
                Some(b) if !complex => (true, b.to_string()),
                _ => (false, text.clone()),
            };
            let body = if complex { format!("({body})") } else { body };
            if i > 0 {
                f.write_str(if neg { " - " } else { " + " })?;
            } else if neg {
                f.write_str("-")?;
            }
            let vars: Vec<String> = mono
                .iter()
                .map(|&(a, e)| match (a.kind, e) {
                    (_, 1) => a.to_string(),
                    (AtomKind::Value, e) => format!("f({})^{}", a.n, e),
                    (AtomKind::Square, e) => format!("(f({})^2)^{}", a.n, e),
                })
                .collect();
            if vars.is_empty() {
                f.write_str(&body)?;
            } else if body == "1" {
                f.write_str(&vars.join("*"))?;
            } else {
                write!(f, "{body}*{}", vars.join("*"))?;
            }
        }
        Ok(())
    }
}

/// Outcome of solving a univariate polynomial equation exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Roots {
    /// The polynomial vanishes identically.
    Any,
    /// Every root, each exactly representable.
    Finite(Vec<Value>),
    /// Some root is not a Gaussian rational (or the degree is out of reach).
    Inexact,
}

pub fn evaluate(coeffs: &[Value], x: &Value) -> Value {
    coeffs
        .iter()
        .rev()
        .fold(Value::zero(), |acc, c| &(&acc * x) + c)
}

/// Exact roots of `sum coeffs[i] * x^i`: handles degree ≤ 2 directly and
/// even polynomials by substituting `x^2`.
pub fn roots(coeffs: &[Value]) -> Roots {
    let mut c: Vec<Value> = coeffs.to_vec();
    while c.last().is_some_and(Value::is_zero) {
        c.pop();
    }
    if c.is_empty() {
        return Roots::Any;
    }
    let mut found = Vec::new();
    let zeros = c.iter().take_while(|v| v.is_zero()).count();
    if zeros > 0 {
        found.push(Value::zero());
        c.drain(..zeros);
    }
    let rest = match c.len() - 1 {
        0 => Vec::new(),
        1 => vec![&-&c[0] / &c[1]],
        2 => {
            let disc = &c[1].square() - &(&Value::int(4) * &(&c[2] * &c[0]));
            let Some(s) = disc.sqrt() else {
                return Roots::Inexact;
            };
            let two_a = &Value::int(2) * &c[2];
            vec![&(&-&c[1] + &s) / &two_a, &(&-&c[1] - &s) / &two_a]
        }
        d if d % 2 == 0 && c.iter().skip(1).step_by(2).all(Value::is_zero) => {
            let halved: Vec<Value> = c.iter().step_by(2).cloned().collect();
            let Roots::Finite(ys) = roots(&halved) else {
                return Roots::Inexact;
            };
            let mut xs = Vec::new();
            for y in ys {
                let Some(r) = y.sqrt() else {
                    return Roots::Inexact;
                };
                xs.push(-&r);
                xs.push(r);
            }
            xs
        }
        _ => return Roots::Inexact,
    };
    found.extend(rest);
    found.sort();
    found.dedup();
    Roots::Finite(found)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(xs: &[i64]) -> Vec<Value> {
        xs.iter().map(|&x| Value::int(x)).collect()
    }

    #[test]
    fn quadratic_from_the_twelve_equation() {
        // 4x = 3 + x^2  <=>  3 - 4x + x^2 = 0
        assert_eq!(roots(&ints(&[3, -4, 1])), Roots::Finite(ints(&[1, 3])));
    }

    #[test]
    fn root_shapes() {
        assert_eq!(roots(&ints(&[0, 0])), Roots::Any);
        assert_eq!(roots(&ints(&[5])), Roots::Finite(vec![]));
        assert_eq!(roots(&ints(&[-12, 0, 1])), Roots::Inexact);
        assert_eq!(
            roots(&ints(&[4, 0, 1])),
            Roots::Finite(vec![
                Value::int(-2) * Value::i(),
                Value::int(2) * Value::i()
            ])
        );
        assert_eq!(roots(&ints(&[0, 0, 1])), Roots::Finite(ints(&[0])));
        // (x^2 - 1)(x^2 - 9)
        assert_eq!(
            roots(&ints(&[9, 0, -10, 0, 1])),
            Roots::Finite(ints(&[-3, -1, 1, 3]))
        );
        assert_eq!(roots(&ints(&[1, 1, 1, 1])), Roots::Inexact);
        assert_eq!(roots(&ints(&[0, -6, 1])), Roots::Finite(ints(&[0, 6])));
    }

    #[test]
    fn substitution_and_elimination() {
        let f3 = Atom::value(3);
        let s3 = Atom::square(3);
        let f12 = Atom::value(12);
        // f(12) - 4 f(3) and f(12) - 3 - f(3)^2
        let mult = Poly::atom(f12).sub(&Poly::atom(f3).scale(&Value::int(4)));
        let sos = Poly::atom(f12)
            .sub(&Poly::constant(Value::int(3)))
            .sub(&Poly::atom(s3));
        assert_eq!(mult.leading_atom(), Some(f12));
        let expr = mult.solve_linear_for(f12).unwrap();
        let derived = sos.substitute_poly(f12, &expr);
        assert_eq!(
            derived.atoms().into_iter().collect::<Vec<_>>(),
            vec![f3, s3]
        );
        let link = Poly::atom(s3).sub(&Poly::atom(f3).pow(2));
        let quad = derived.substitute_poly(s3, &link.solve_linear_for(s3).unwrap());
        let coeffs = quad.univariate(f3, |_| unreachable!());
        assert_eq!(roots(&coeffs), Roots::Finite(ints(&[1, 3])));
        assert_eq!(link.solve_linear_for(f3), None);
    }

    #[test]
    fn display() {
        let p = Poly::atom(Atom::value(12))
            .sub(&Poly::atom(Atom::square(3)))
            .sub(&Poly::constant(Value::int(3)));
        assert_eq!(p.to_string(), "f(12) - f(3)^2 - 3");
        assert_eq!(Poly::zero().to_string(), "0");
    }

    #[test]
    fn substitute_values() {
        let p = Poly::atom(Atom::value(2)).mul(&Poly::atom(Atom::value(3)));
        let q = p.substitute(|a| (a.n == 2).then(|| Value::int(-2)));
        assert_eq!(q, Poly::atom(Atom::value(3)).scale(&Value::int(-2)));
        assert_eq!(
            q.substitute(|_| Some(Value::int(3))).as_constant(),
            Some(Value::int(-6))
        );
        assert_eq!(evaluate(&ints(&[3, -4, 1]), &Value::int(3)), Value::zero());
    }
}
