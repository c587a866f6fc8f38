//! Exact Gaussian rationals `re + im*i` with rational parts.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot parse {0:?} as an exact value")]
pub struct ParseValueError(pub String);

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Value {
    re: BigRational,
    im: BigRational,
}

impl Value {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn int(n: i64) -> Self {
        Self::real(BigRational::from_integer(n.into()))
    }

    pub fn from_u64(n: u64) -> Self {
        Self::real(BigRational::from_integer(n.into()))
    }

    pub fn real(re: BigRational) -> Self {
        Self {
            re,
            im: BigRational::zero(),
        }
    }

    pub fn ratio(p: i64, q: i64) -> Self {
        Self::real(BigRational::new(p.into(), q.into()))
    }

    pub fn i() -> Self {
        Self {
            re: BigRational::zero(),
            im: BigRational::one(),
        }
    }

    pub fn zero() -> Self {
        Self::int(0)
    }

    pub fn one() -> Self {
        Self::int(1)
    }

    pub fn re(&self) -> &BigRational {
        &self.re
    }

    pub fn im(&self) -> &BigRational {
        &self.im
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn square(&self) -> Self {
        self * self
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Value::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// `None` when dividing by zero.
    pub fn checked_div(&self, rhs: &Value) -> Option<Value> {
        if rhs.is_zero() {
            return None;
        }
        let norm = &rhs.re * &rhs.re + &rhs.im * &rhs.im;
        let re = (&self.re * &rhs.re + &self.im * &rhs.im) / &norm;
        let im = (&self.im * &rhs.re - &self.re * &rhs.im) / &norm;
        Some(Value { re, im })
    }

    /// An exact square root in the Gaussian rationals, if one exists. The
    /// other root is its negation.
    pub fn sqrt(&self) -> Option<Value> {
        if self.im.is_zero() {
            return if self.re.is_negative() {
                rational_sqrt(&-self.re.clone()).map(|r| Value {
                    re: BigRational::zero(),
                    im: r,
                })
            } else {
                rational_sqrt(&self.re).map(Value::real)
            };
        }
        // (x + yi)^2 = a + bi  =>  x^2 = (|z| + a) / 2,  y = b / 2x.
        let modulus = rational_sqrt(&(&self.re * &self.re + &self.im * &self.im))?;
        let two = BigRational::from_integer(2.into());
        let x = rational_sqrt(&((&modulus + &self.re) / &two))?;
        if x.is_zero() {
            return None;
        }
        let y = &self.im / (&two * &x);
        Some(Value { re: x, im: y })
    }

    pub fn as_u64(&self) -> Option<u64> {
        if !self.im.is_zero() || !self.re.is_integer() {
            return None;
        }
        u64::try_from(self.re.to_integer()).ok()
    }
}

fn bigint_sqrt(n: &BigInt) -> Option<BigInt> {
    if n.sign() == Sign::Minus {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let num = bigint_sqrt(q.numer())?;
    let den = bigint_sqrt(q.denom())?;
    Some(BigRational::new(num, den))
}

impl Add for &Value {
    type Output = Value;
    fn add(self, rhs: &Value) -> Value {
        Value {
            re: &self.re + &rhs.re,
            im: &self.im + &rhs.im,
        }
    }
}

impl Sub for &Value {
    type Output = Value;
    fn sub(self, rhs: &Value) -> Value {
        Value {
            re: &self.re - &rhs.re,
            im: &self.im - &rhs.im,
        }
    }
}

impl Mul for &Value {
    type Output = Value;
    fn mul(self, rhs: &Value) -> Value {
        Value {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl Div for &Value {
    type Output = Value;
    fn div(self, rhs: &Value) -> Value {
        self.checked_div(rhs).expect("division by zero")
    }
}

impl Neg for &Value {
    type Output = Value;
    fn neg(self) -> Value {
        Value {
            re: -self.re.clone(),
            im: -self.im.clone(),
        }
    }
}

macro_rules! forward_owned {
    ($($tr:ident :: $m:ident),*) => {$(
        impl $tr for Value {
            type Output = Value;
            fn $m(self, rhs: Value) -> Value {
                (&self).$m(&rhs)
            }
        }
    )*};
}
forward_owned!(Add::add, Sub::sub, Mul::mul, Div::div);

impl Neg for Value {
    type Output = Value;
    fn neg(self) -> Value {
        -&self
    }
}

impl From<i64> for Value {
    fn from(n: i64) -> Self {
        Value::int(n)
    }
}

fn fmt_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for Value {
    /// `3`, `-5/2`, `1+2i`, `-i`, `1/2-3/4i`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return f.write_str(&fmt_rational(&self.re));
        }
        let magnitude = self.im.abs();
        let im = if magnitude.is_one() {
            String::new()
        } else {
            fmt_rational(&magnitude)
        };
        let sign = if self.im.is_negative() { "-" } else { "+" };
        if self.re.is_zero() {
            let sign = if self.im.is_negative() { "-" } else { "" };
            write!(f, "{sign}{im}i")
        } else {
            write!(f, "{}{sign}{im}i", fmt_rational(&self.re))
        }
    }
}

impl fmt::Debug for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_rational(s: &str) -> Option<BigRational> {
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let valid = |t: &str| {
        let digits = t.strip_prefix(['+', '-']).unwrap_or(t);
        !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
    };
    if !valid(num) || !den.bytes().all(|b| b.is_ascii_digit()) || den.is_empty() {
        return None;
    }
    let den: BigInt = den.parse().ok()?;
    if den.is_zero() {
        return None;
    }
    Some(BigRational::new(num.parse().ok()?, den))
}

impl FromStr for Value {
    type Err = ParseValueError;

    fn from_str(raw: &str) -> Result<Self, Self::Err> {
        let err = || ParseValueError(raw.to_string());
        let s: String = raw.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(err());
        }
        let Some(body) = s.strip_suffix('i') else {
            return parse_rational(&s).map(Value::real).ok_or_else(err);
        };
        // Split the real part from the imaginary one at the last sign that is
        // not in leading position.
        let split = body
            .char_indices()
            .filter(|&(i, c)| i > 0 && (c == '+' || c == '-'))
            .map(|(i, _)| i)
            .next_back();
        let (re, im) = match split {
            Some(i) => (&body[..i], &body[i..]),
            None => ("0", body),
        };
        let im = match im {
            "" | "+" => "1",
            "-" => "-1",
            other => other,
        };
        let im = im.strip_prefix('+').unwrap_or(im);
        Ok(Value {
            re: parse_rational(re).ok_or_else(err)?,
            im: parse_rational(im).ok_or_else(err)?,
        })
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Value {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
