use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::rational::{parse_rational, Rational};
use crate::error::{Error, Result};

/// Squarefree integer `d >= 2` fixing the field `Q(sqrt(d))`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Radicand(u64);

impl Radicand {
    pub fn new(d: u64) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidInput(format!("radicand {d} must be at least 2")));
        }
        let (square, _) = split_square(d);
        if square != 1 {
            return Err(Error::InvalidInput(format!("radicand {d} is not squarefree")));
        }
        Ok(Radicand(d))
    }

    pub fn get(self) -> u64 {
        self.0
    }
}

/// Writes `n = s^2 * f` with `f` squarefree; returns `(s, f)`.
fn split_square(mut n: u64) -> (u64, u64) {
    let mut square = 1u64;
    let mut free = 1u64;
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        let mut e = 0;
        while n.is_multiple_of(p) {
            n /= p;
            e += 1;
        }
        square *= p.pow(e / 2);
        if e % 2 == 1 {
            free *= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    (square, free * n)
}

/// Element `a + b*sqrt(d)` of a real quadratic field, or a plain rational when
/// `b = 0`.
///
/// Canonical form: the radicand is `None` exactly when the radical part is
/// zero, so rationals compare equal regardless of the field they came from.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FieldElem {
    rational: Rational,
    radical: Rational,
    radicand: Option<Radicand>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

pub fn arith(x: &FieldElem, y: &FieldElem, op: ArithOp) -> Result<FieldElem> {
    match op {
        ArithOp::Add => x.try_add(y),
        ArithOp::Sub => x.try_sub(y),
        ArithOp::Mul => x.try_mul(y),
        ArithOp::Div => x.try_div(y),
    }
}

impl FieldElem {
    pub fn new(rational: Rational, radical: Rational, radicand: Radicand) -> Self {
        Self::canonical(rational, radical, Some(radicand))
    }

    pub fn from_rational(q: Rational) -> Self {
        FieldElem {
            rational: q,
            radical: Rational::zero(),
            radicand: None,
        }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(Rational::from_integer(BigInt::from(n)))
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    /// `sqrt(d)` for a radicand.
    pub fn sqrt_radicand(d: Radicand) -> Self {
        Self::new(Rational::zero(), Rational::one(), d)
    }

    /// Exact square root of a nonnegative rational, landing in `Q(sqrt(f))`
    /// where `f` is the squarefree part of `num * den`.
    pub fn sqrt_rational(q: &Rational) -> Result<Self> {
        if q.is_negative() {
            return Err(Error::InvalidInput(format!("sqrt of negative rational {q}")));
        }
        if q.is_zero() {
            return Ok(Self::zero());
        }
        // sqrt(n/m) = sqrt(n*m) / m
        let prod = q.numer() * q.denom();
        let prod = prod
            .to_u64()
            .ok_or_else(|| Error::InvalidInput(format!("radicand of sqrt({q}) exceeds 64 bits")))?;
        let (square, free) = split_square(prod);
        let coeff = Rational::new(BigInt::from(square), q.denom().clone());
        if free == 1 {
            Ok(Self::from_rational(coeff))
        } else {
            Ok(Self::new(Rational::zero(), coeff, Radicand(free)))
        }
    }

    fn canonical(rational: Rational, radical: Rational, radicand: Option<Radicand>) -> Self {
        if radical.is_zero() || radicand.is_none() {
            debug_assert!(radical.is_zero(), "radical part without a radicand");
            FieldElem {
                rational,
                radical: Rational::zero(),
                radicand: None,
            }
        } else {
            FieldElem {
                rational,
                radical,
                radicand,
            }
        }
    }

    pub fn rational_part(&self) -> &Rational {
        &self.rational
    }

    pub fn radical_part(&self) -> &Rational {
        &self.radical
    }

    pub fn radicand(&self) -> Option<Radicand> {
        self.radicand
    }

    /// Splits into the coordinates over the basis `{1, sqrt(d)}`.
    pub fn rational_decompose(&self) -> (Rational, Rational) {
        (self.rational.clone(), self.radical.clone())
    }

    pub fn is_rational(&self) -> bool {
        self.radicand.is_none()
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        self.is_rational().then_some(&self.rational)
    }

    pub fn is_zero(&self) -> bool {
        self.is_rational() && self.rational.is_zero()
    }

    fn common_radicand(&self, other: &Self) -> Result<Option<Radicand>> {
        match (self.radicand, other.radicand) {
            (Some(a), Some(b)) if a != b => Err(Error::MixedRadicand(a.0, b.0)),
            (a, b) => Ok(a.or(b)),
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        let d = self.common_radicand(other)?;
        Ok(Self::canonical(
            &self.rational + &other.rational,
            &self.radical + &other.radical,
            d,
        ))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        let d = self.common_radicand(other)?;
        Ok(Self::canonical(
            &self.rational - &other.rational,
            &self.radical - &other.radical,
            d,
        ))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        let d = self.common_radicand(other)?;
        let dq = d.map_or_else(Rational::zero, |r| Rational::from_integer(BigInt::from(r.0)));
        // (a + b s)(c + e s) = (ac + be d) + (ae + bc) s
        let rational = &self.rational * &other.rational + &self.radical * &other.radical * dq;
        let radical = &self.rational * &other.radical + &self.radical * &other.rational;
        Ok(Self::canonical(rational, radical, d))
    }

    pub fn try_div(&self, other: &Self) -> Result<Self> {
        let inv = other.inverse()?;
        self.try_mul(&inv)
    }

    /// Galois conjugate `a - b*sqrt(d)`.
    pub fn conjugate(&self) -> Self {
        Self::canonical(self.rational.clone(), -&self.radical, self.radicand)
    }

    /// Field norm `a^2 - d b^2`.
    pub fn norm(&self) -> Rational {
        let d = self.radicand.map_or(0, |r| r.0);
        &self.rational * &self.rational
            - &self.radical * &self.radical * Rational::from_integer(BigInt::from(d))
    }

    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = self.norm();
        let c = self.conjugate();
        Ok(Self::canonical(&c.rational / &n, &c.radical / &n, c.radicand))
    }

    pub fn scale(&self, q: &Rational) -> Self {
        Self::canonical(&self.rational * q, &self.radical * q, self.radicand)
    }

    /// Exact sign of the real number `a + b*sqrt(d)`.
    pub fn sign(&self) -> i8 {
        let sa = rational_sign(&self.rational);
        let sb = rational_sign(&self.radical);
        if sb == 0 {
            return sa;
        }
        if sa == 0 || sa == sb {
            return sb;
        }
        let d = Rational::from_integer(BigInt::from(self.radicand.map_or(0, |r| r.0)));
        let a2 = &self.rational * &self.rational;
        let db2 = &self.radical * &self.radical * d;
        match a2.cmp(&db2) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => 0,
        }
    }

    pub fn is_positive(&self) -> bool {
        self.sign() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.sign() < 0
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    /// Largest integer not exceeding the value.
    pub fn floor(&self) -> BigInt {
        if self.is_rational() {
            return self.rational.floor().to_integer();
        }
        // b*sqrt(d) = sign(b) * sqrt(bn^2 d) / bd, bracketed by isqrt
        let d = BigInt::from(self.radicand.map_or(0, |r| r.0));
        let bn = self.radical.numer();
        let bd = self.radical.denom();
        let root = (bn * bn * d).sqrt();
        let shift = Rational::new(root, bd.clone());
        let approx = if bn.is_negative() {
            &self.rational - shift
        } else {
            &self.rational + shift
        };
        let mut n = approx.floor().to_integer();
        loop {
            let candidate = Self::from_rational(Rational::from_integer(n.clone()));
            if (&candidate - self).sign() > 0 {
                n -= 1;
                continue;
            }
            let next = Self::from_rational(Rational::from_integer(&n + 1));
            if (&next - self).sign() <= 0 {
                n += 1;
                continue;
            }
            return n;
        }
    }

    /// Floating approximation; only for diagnostics and sanity checks.
    pub fn to_f64(&self) -> f64 {
        let a = self.rational.to_f64().unwrap_or(f64::NAN);
        let b = self.radical.to_f64().unwrap_or(f64::NAN);
        let d = self.radicand.map_or(0.0, |r| r.0 as f64);
        a + b * d.sqrt()
    }
}

fn rational_sign(q: &Rational) -> i8 {
    match q.numer().sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

impl From<Rational> for FieldElem {
    fn from(q: Rational) -> Self {
        Self::from_rational(q)
    }
}

impl From<i64> for FieldElem {
    fn from(n: i64) -> Self {
        Self::from_int(n)
    }
}

impl PartialOrd for FieldElem {
    /// `None` when the operands live in different quadratic fields.
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        let diff = self.try_sub(other).ok()?;
        Some(diff.sign().cmp(&0))
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $try:ident) => {
        impl $trait<&FieldElem> for &FieldElem {
            type Output = FieldElem;
            /// Panics on mixed radicands; use the `try_` form to handle that case.
            fn $method(self, rhs: &FieldElem) -> FieldElem {
                self.$try(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl $trait<FieldElem> for FieldElem {
            type Output = FieldElem;
            fn $method(self, rhs: FieldElem) -> FieldElem {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&FieldElem> for FieldElem {
            type Output = FieldElem;
            fn $method(self, rhs: &FieldElem) -> FieldElem {
                (&self).$method(rhs)
            }
        }
        impl $trait<FieldElem> for &FieldElem {
            type Output = FieldElem;
            fn $method(self, rhs: FieldElem) -> FieldElem {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);
forward_binop!(Div, div, try_div);

impl Neg for &FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        FieldElem::canonical(-&self.rational, -&self.radical, self.radicand)
    }
}

impl Neg for FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        -&self
    }
}

impl fmt::Display for FieldElem {
    /// `p/q` for rationals, `p/q + r/s*sqrt(d)` otherwise (`r` carries the sign).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.radicand {
            None => write!(f, "{}", self.rational),
            Some(d) => write!(f, "{} + {}*sqrt({})", self.rational, self.radical, d.0),
        }
    }
}

impl FromStr for FieldElem {
    type Err = Error;

    fn from_str(input: &str) -> Result<Self> {
        let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::parse("field element", input, "empty string"));
        }
        let mut total = FieldElem::zero();
        for term in split_terms(&s) {
            let value = parse_term(term, input)?;
            total = total
                .try_add(&value)
                .map_err(|e| Error::parse("field element", input, e.to_string()))?;
        }
        Ok(total)
    }
}

/// Splits at `+`/`-` acting as binary operators; a joining `+` is dropped,
/// a `-` stays attached to the following term.
fn split_terms(s: &str) -> Vec<&str> {
    let bytes = s.as_bytes();
    let mut terms = Vec::new();
    let mut start = 0;
    for i in 1..bytes.len() {
        let c = bytes[i];
        let prev = bytes[i - 1];
        if (c == b'+' || c == b'-') && !matches!(prev, b'+' | b'-' | b'*' | b'/' | b'(') {
            terms.push(&s[start..i]);
            start = if c == b'+' { i + 1 } else { i };
        }
    }
    terms.push(&s[start..]);
    terms
}

fn parse_term(term: &str, input: &str) -> Result<FieldElem> {
    let Some(pos) = term.find("sqrt(") else {
        return parse_rational(term)
            .map(FieldElem::from_rational)
            .map_err(|_| Error::parse("field element", input, format!("bad term {term:?}")));
    };
    let (head, tail) = term.split_at(pos);
    let inner = tail
        .strip_prefix("sqrt(")
        .and_then(|t| t.strip_suffix(')'))
        .ok_or_else(|| Error::parse("field element", input, format!("bad radical {term:?}")))?;
    let d: u64 = inner
        .parse()
        .map_err(|_| Error::parse("field element", input, format!("bad radicand {inner:?}")))?;
    let coeff = match head {
        "" | "+" => Rational::one(),
        "-" => -Rational::one(),
        _ => {
            let c = head.strip_suffix('*').ok_or_else(|| {
                Error::parse("field element", input, format!("expected '*' before sqrt in {term:?}"))
            })?;
            parse_rational(c)
                .map_err(|_| Error::parse("field element", input, format!("bad coefficient {c:?}")))?
        }
    };
    let root = FieldElem::sqrt_rational(&Rational::from_integer(BigInt::from(d)))?;
    Ok(root.scale(&coeff))
}

impl Serialize for FieldElem {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FieldElem {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn fe(s: &str) -> FieldElem {
        s.parse().unwrap()
    }

    #[test]
    fn radical_parts_cancel() {
        let x = fe("1/2 + sqrt(2)");
        let y = fe("1/2 - sqrt(2)");
        assert_eq!(arith(&x, &y, ArithOp::Add).unwrap(), FieldElem::one());
    }

    #[test]
    fn norm_form_product() {
        assert_eq!(fe("1 + sqrt(2)") * fe("1 - sqrt(2)"), FieldElem::from_int(-1));
    }

    #[test]
    fn division_by_conjugate() {
        let r = arith(&fe("3 + sqrt(2)"), &fe("1 + sqrt(2)"), ArithOp::Div).unwrap();
        assert_eq!(r, fe("-1 + 2*sqrt(2)"));
        assert_eq!(&r * &fe("1 + sqrt(2)"), fe("3 + sqrt(2)"));
    }

    #[test]
    fn errors() {
        assert_eq!(
            arith(&fe("sqrt(2)"), &fe("sqrt(3)"), ArithOp::Add),
            Err(Error::MixedRadicand(2, 3))
        );
        assert_eq!(
            arith(&fe("sqrt(2)"), &FieldElem::zero(), ArithOp::Div),
            Err(Error::DivisionByZero)
        );
        // rationals embed in any field
        assert!(fe("1/3").try_add(&fe("sqrt(3)")).is_ok());
        assert!(fe("sqrt(2)").partial_cmp(&fe("sqrt(3)")).is_none());
    }

    #[test]
    fn signs() {
        assert_eq!(fe("3 - 2*sqrt(2)").sign(), 1);
        assert_eq!(FieldElem::zero().sign(), 0);
        assert_eq!(fe("2 - 3*sqrt(2)").sign(), -1);
        assert_eq!(fe("-1 - sqrt(5)").sign(), -1);
        assert_eq!(fe("-3 + 2*sqrt(2)").sign(), -1);
    }

    #[test]
    fn decompose() {
        assert_eq!(fe("3/4").rational_decompose(), (q(3, 4), q(0, 1)));
        assert_eq!(fe("1/2*sqrt(7)").rational_decompose(), (q(0, 1), q(1, 2)));
        assert_eq!(fe("1 + 1/2*sqrt(7)").rational_decompose(), (q(1, 1), q(1, 2)));
    }

    #[test]
    fn text_form() {
        assert_eq!(fe("-1 + 1*sqrt(2)").to_string(), "-1 + 1*sqrt(2)");
        assert_eq!(fe("0 + 1/2*sqrt(7)").to_string(), "0 + 1/2*sqrt(7)");
        assert_eq!(fe("1-1/2*sqrt(7)").to_string(), "1 + -1/2*sqrt(7)");
        assert_eq!(fe("-1/2 + 1/3*sqrt(2)").to_string(), "-1/2 + 1/3*sqrt(2)");
        assert_eq!(fe("sqrt(8)").to_string(), "0 + 2*sqrt(2)");
        assert_eq!(fe("3*sqrt(4)").to_string(), "6");
        assert_eq!(fe("2/4").to_string(), "1/2");
        for bad in ["", "1//2", "sqrt(x)", "2sqrt(2)", "1 + sqrt(2", "sqrt(2)+sqrt(3)"] {
            assert!(bad.parse::<FieldElem>().is_err(), "{bad:?}");
        }
    }

    #[test]
    fn sqrt_rational_normalizes() {
        assert_eq!(FieldElem::sqrt_rational(&q(3, 2)).unwrap(), fe("1/2*sqrt(6)"));
        assert_eq!(FieldElem::sqrt_rational(&q(7, 4)).unwrap(), fe("1/2*sqrt(7)"));
        assert_eq!(FieldElem::sqrt_rational(&q(9, 4)).unwrap(), fe("3/2"));
        assert!(FieldElem::sqrt_rational(&q(-1, 4)).is_err());
    }

    #[test]
    fn floor_exact() {
        assert_eq!(fe("sqrt(2)").floor(), 1.into());
        assert_eq!(fe("-sqrt(2)").floor(), (-2).into());
        assert_eq!(fe("5/2 - 1/3*sqrt(7)").floor(), 1.into());
        assert_eq!(fe("-7/3").floor(), (-3).into());
    }

    #[test]
    fn radicand_validation() {
        assert!(Radicand::new(12).is_err());
        assert!(Radicand::new(1).is_err());
        assert_eq!(Radicand::new(30).unwrap().get(), 30);
    }

    fn arb_elem() -> impl Strategy<Value = FieldElem> {
        (-20i64..20, 1i64..9, -20i64..20, 1i64..9, prop::sample::select(vec![2u64, 7]))
            .prop_map(|(a, b, c, e, d)| FieldElem::new(q(a, b), q(c, e), Radicand::new(d).unwrap()))
    }

    fn arb_triple() -> impl Strategy<Value = (FieldElem, FieldElem, FieldElem)> {
        // one field per triple
        (arb_elem(), arb_elem(), arb_elem()).prop_map(|(x, y, z)| {
            let d = x.radicand().or(y.radicand()).or(z.radicand());
            let rebase = |e: FieldElem| match (d, e.radicand()) {
                (Some(d), Some(_)) => FieldElem::new(e.rational.clone(), e.radical.clone(), d),
                _ => e,
            };
            (rebase(x), rebase(y), rebase(z))
        })
    }

    proptest! {
        #[test]
        fn field_axioms((x, y, z) in arb_triple()) {
            prop_assert_eq!(&(&x + &y) + &z, &x + &(&y + &z));
            prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
            prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
            prop_assert_eq!(&x * &y, &y * &x);
            if !y.is_zero() {
                prop_assert_eq!(&(&x / &y) * &y, x.clone());
            }
        }

        #[test]
        fn sign_is_multiplicative((x, y, _z) in arb_triple()) {
            prop_assert_eq!((&x * &y).sign(), x.sign() * y.sign());
        }

        #[test]
        fn sign_agrees_with_float(x in arb_elem()) {
            let f = x.to_f64();
            if f.abs() > 1e-6 {
                prop_assert_eq!(x.sign(), if f > 0.0 { 1 } else { -1 });
            }
        }

        #[test]
        fn decompose_recomposes(x in arb_elem()) {
            let (a, b) = x.rational_decompose();
            let back = match x.radicand() {
                Some(d) => FieldElem::new(a, b, d),
                None => FieldElem::from_rational(a),
            };
            prop_assert_eq!(back, x);
        }

        #[test]
        fn text_round_trip(x in arb_elem()) {
            let s = x.to_string();
            let back: FieldElem = s.parse().unwrap();
            prop_assert_eq!(back.to_string(), s);
            prop_assert_eq!(back, x);
        }
    }
}
