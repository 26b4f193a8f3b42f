use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::field::FieldElem;
use super::rational::Rational;
use crate::error::{Error, Result};

/// Rational `q` with `|q - x| < slack`, taken from the continued-fraction
/// convergents of `x`.
///
/// Returns the first convergent `h_n/k_n` whose a-priori bound
/// `1/(k_n k_{n+1})` is below `slack`; the bound is then re-checked exactly.
/// Rational `x` is returned unchanged.
pub fn continued_fraction_approx(x: &FieldElem, slack: &FieldElem) -> Result<Rational> {
    if slack.sign() <= 0 {
        return Err(Error::PreconditionViolated(format!("slack {slack} must be positive")));
    }
    if let Some(q) = x.as_rational() {
        return Ok(q.clone());
    }
    // complete quotients of a quadratic irrational are periodic, so their
    // coefficients stay bounded
    let mut rem = x.clone();
    let (mut h_prev, mut h) = (BigInt::zero(), BigInt::one());
    let (mut k_prev, mut k) = (BigInt::one(), BigInt::zero());
    let mut a = rem.floor();
    loop {
        let h_next = &a * &h + &h_prev;
        let k_next = &a * &k + &k_prev;
        (h_prev, h) = (h, h_next);
        (k_prev, k) = (k, k_next);

        let frac = &rem - &FieldElem::from_rational(Rational::from_integer(a.clone()));
        rem = frac.inverse()?;
        a = rem.floor();
        let k_after = &a * &k + &k_prev;
        let bound = FieldElem::from_rational(Rational::new(BigInt::one(), &k * &k_after));
        if bound.partial_cmp(slack).ok_or_else(|| mixed(x, slack))?.is_lt() {
            let q = Rational::new(h.clone(), k.clone());
            let err = (&FieldElem::from_rational(q.clone()) - x).abs();
            let within = err.partial_cmp(slack).ok_or_else(|| mixed(x, slack))?.is_lt();
            assert!(within, "convergent {q} misses slack {slack} for {x}");
            return Ok(q);
        }
    }
}

fn mixed(x: &FieldElem, y: &FieldElem) -> Error {
    Error::MixedRadicand(
        x.radicand().map_or(0, |d| d.get()),
        y.radicand().map_or(0, |d| d.get()),
    )
}
