use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};

/// Arbitrary-precision rational in lowest terms with a positive denominator.
pub type Rational = num_rational::BigRational;

pub fn rational_from_i64(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `p` or `p/q`. Surrounding whitespace is ignored.
pub fn parse_rational(input: &str) -> Result<Rational> {
    let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(Error::parse("rational", input, "empty string"));
    }
    let mut parts = s.split('/');
    let num = parse_int(parts.next().unwrap_or_default(), input)?;
    let den = match parts.next() {
        Some(d) => parse_int(d, input)?,
        None => BigInt::from(1),
    };
    if parts.next().is_some() {
        return Err(Error::parse("rational", input, "more than one '/'"));
    }
    if den.is_zero() {
        return Err(Error::parse("rational", input, "zero denominator"));
    }
    Ok(Rational::new(num, den))
}

fn parse_int(s: &str, input: &str) -> Result<BigInt> {
    let digits = s.strip_prefix(['+', '-']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::parse("rational", input, format!("bad integer {s:?}")));
    }
    s.parse::<BigInt>()
        .map_err(|e| Error::parse("rational", input, e.to_string()))
}
