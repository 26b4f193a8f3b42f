//! Intersection numbers on `P(E)` over a curve.
//!
//! The numerical ring is generated by the tautological class `Θ` and the
//! fiber class `F` subject to `F^2 = 0` and `Θ^r = deg(E) Θ^{r-1} F`, with
//! `Θ^{r-1} F` the class of a point.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::bundle::BundleNumerics;
use crate::error::{Error, Result};
use crate::numbers::{FieldElem, Rational};

/// Numerical divisor class `theta * Θ + fiber * F` on `P(E)`.
///
/// A divisor `A` on the base enters as `fiber = -deg(A)` in `Θ - f^*(A)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DivClass {
    pub theta: FieldElem,
    pub fiber: FieldElem,
}

impl DivClass {
    pub fn new(theta: impl Into<FieldElem>, fiber: impl Into<FieldElem>) -> Self {
        DivClass {
            theta: theta.into(),
            fiber: fiber.into(),
        }
    }

    /// `Θ - f^*(A)` with `deg(A) = a`.
    pub fn theta_minus(a: impl Into<FieldElem>) -> Self {
        DivClass::new(FieldElem::one(), -a.into())
    }

    pub fn is_rational(&self) -> bool {
        self.theta.is_rational() && self.fiber.is_rational()
    }

    /// Pullback along `P(h^*E) -> P(E)` for a cover `h` of degree `n`.
    pub fn pullback_cover(&self, n: u64) -> Self {
        let n = Rational::from_integer(n.into());
        DivClass {
            theta: self.theta.clone(),
            fiber: self.fiber.scale(&n),
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        Ok(DivClass {
            theta: self.theta.try_add(&other.theta)?,
            fiber: self.fiber.try_add(&other.fiber)?,
        })
    }

    pub fn scale(&self, c: &FieldElem) -> Result<Self> {
        Ok(DivClass {
            theta: self.theta.try_mul(c)?,
            fiber: self.fiber.try_mul(c)?,
        })
    }
}

/// Degree of `D` on a line in a fiber.
pub fn fiber_restriction_degree(d: &DivClass) -> FieldElem {
    d.theta.clone()
}

/// Element of the numerical ring: monomial `(i, j) = Θ^i F^j` -> coefficient.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ChowElem {
    terms: BTreeMap<(u32, u32), FieldElem>,
}

impl ChowElem {
    pub fn coefficient(&self, theta_power: u32, fiber_power: u32) -> FieldElem {
        self.terms
            .get(&(theta_power, fiber_power))
            .cloned()
            .unwrap_or_else(FieldElem::zero)
    }
}

/// Numerical ring of `P(E)` for a bundle of the given rank and degree.
#[derive(Clone, Debug)]
pub struct ChowRing {
    rank: u32,
    degree: FieldElem,
}

impl ChowRing {
    pub fn for_bundle(e: &impl BundleNumerics) -> Self {
        ChowRing {
            rank: u32::try_from(e.rank()).expect("rank fits in u32"),
            degree: FieldElem::from_rational(e.degree()),
        }
    }

    pub fn one(&self) -> ChowElem {
        let mut terms = BTreeMap::new();
        terms.insert((0, 0), FieldElem::one());
        ChowElem { terms }
    }

    pub fn divisor(&self, d: &DivClass) -> ChowElem {
        let mut terms = BTreeMap::new();
        terms.insert((1, 0), d.theta.clone());
        terms.insert((0, 1), d.fiber.clone());
        self.reduce(terms)
    }

    pub fn mul(&self, a: &ChowElem, b: &ChowElem) -> Result<ChowElem> {
        let mut terms: BTreeMap<(u32, u32), FieldElem> = BTreeMap::new();
        for (&(i, j), x) in &a.terms {
            for (&(k, l), y) in &b.terms {
                let c = x.try_mul(y)?;
                let slot = terms.entry((i + k, j + l)).or_insert_with(FieldElem::zero);
                *slot = slot.try_add(&c)?;
            }
        }
        Ok(self.reduce(terms))
    }

    fn reduce(&self, raw: BTreeMap<(u32, u32), FieldElem>) -> ChowElem {
        let r = self.rank;
        let mut terms: BTreeMap<(u32, u32), FieldElem> = BTreeMap::new();
        for ((i, j), c) in raw {
            if c.is_zero() || j >= 2 || i + j > r {
                continue;
            }
            let (key, c) = if j == 0 && i == r {
                // Θ^r = deg(E) Θ^{r-1} F
                ((r - 1, 1), &c * &self.degree)
            } else {
                ((i, j), c)
            };
            let slot = terms.entry(key).or_insert_with(FieldElem::zero);
            *slot = &*slot + &c;
        }
        terms.retain(|_, c| !c.is_zero());
        ChowElem { terms }
    }

    /// Degree of the zero-cycle part.
    pub fn degree_of(&self, x: &ChowElem) -> FieldElem {
        x.coefficient(self.rank - 1, 1)
    }
}

/// `(D_1 ... D_r)` on `P(E)` with `r = rank(E)`.
///
/// Computed twice, by reduction in the relation ring and by the closed form
/// `(prod λ_i) deg(E) + sum_j b_j prod_{i != j} λ_i`; the two must agree.
pub fn intersection_number(classes: &[DivClass], e: &impl BundleNumerics) -> Result<FieldElem> {
    let r = e.rank() as usize;
    if classes.len() != r {
        return Err(Error::ArityMismatch {
            expected: r,
            actual: classes.len(),
        });
    }
    let ring = ChowRing::for_bundle(e);
    let mut product = ring.one();
    for d in classes {
        product = ring.mul(&product, &ring.divisor(d))?;
    }
    let symbolic = ring.degree_of(&product);
    let closed = closed_form(classes, &ring.degree)?;
    assert_eq!(symbolic, closed, "ring reduction disagrees with closed form");
    Ok(symbolic)
}

fn closed_form(classes: &[DivClass], degree: &FieldElem) -> Result<FieldElem> {
    let mut all = FieldElem::one();
    for d in classes {
        all = all.try_mul(&d.theta)?;
    }
    let mut total = all.try_mul(degree)?;
    for (j, dj) in classes.iter().enumerate() {
        let mut term = dj.fiber.clone();
        for (i, di) in classes.iter().enumerate() {
            if i != j {
                term = term.try_mul(&di.theta)?;
            }
        }
        total = total.try_add(&term)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::{HnPiece, HnProfile, SplitBundle};
    use proptest::prelude::*;

    fn fe(s: &str) -> FieldElem {
        s.parse().unwrap()
    }

    fn split(d: &[i64]) -> SplitBundle {
        SplitBundle::new(d).unwrap()
    }

    #[test]
    fn theta_squared() {
        let t = DivClass::new(1, 0);
        assert_eq!(intersection_number(&[t.clone(), t], &split(&[1, 0])).unwrap(), FieldElem::one());
    }

    #[test]
    fn normalized_tautological_class_is_nilpotent() {
        // (Θ - (deg/e) F)^e = 0 on a semistable bundle
        let d = DivClass::theta_minus(1);
        assert_eq!(intersection_number(&[d.clone(), d], &split(&[1, 1])).unwrap(), FieldElem::zero());
        let p = HnProfile::new(vec![HnPiece::new(3, Rational::new(2.into(), 1.into()))]).unwrap();
        let d = DivClass::theta_minus(fe("2/3"));
        assert_eq!(intersection_number(&vec![d; 3], &p).unwrap(), FieldElem::zero());
    }

    #[test]
    fn mixed_product() {
        let a = DivClass::new(1, 2);
        let b = DivClass::new(1, -1);
        assert_eq!(intersection_number(&[a, b], &split(&[1, 0])).unwrap(), FieldElem::from_int(2));
    }

    #[test]
    fn arity_checked() {
        assert_eq!(
            intersection_number(&[DivClass::new(1, 0)], &split(&[1, 0])),
            Err(Error::ArityMismatch { expected: 2, actual: 1 })
        );
    }

    #[test]
    fn fiber_degree() {
        assert_eq!(fiber_restriction_degree(&DivClass::new(1, -3)), FieldElem::one());
        assert_eq!(fiber_restriction_degree(&DivClass::new(-2, 0)), FieldElem::from_int(-2));
        assert_eq!(fiber_restriction_degree(&DivClass::new(0, 5)), FieldElem::zero());
    }

    #[test]
    fn irrational_coefficients() {
        let d = DivClass::new(fe("sqrt(2)"), fe("1 - sqrt(2)"));
        // λ^2 deg + 2 b λ with λ = √2, b = 1 - √2, deg = 3
        let got = intersection_number(&[d.clone(), d], &split(&[2, 1])).unwrap();
        assert_eq!(got, fe("2 + 2*sqrt(2)"));
    }

    fn arb_class() -> impl Strategy<Value = DivClass> {
        (-6i64..=6, -6i64..=6, 1i64..=3, -3i64..=3).prop_map(|(l, b, den, s)| {
            DivClass::new(
                FieldElem::from_rational(Rational::new(l.into(), den.into())),
                fe(&format!("{b}/{den} + {s}*sqrt(7)")),
            )
        })
    }

    fn arb_case() -> impl Strategy<Value = (SplitBundle, Vec<DivClass>)> {
        prop::collection::vec(-4i64..=4, 1..=4).prop_flat_map(|degs| {
            let r = degs.len();
            (Just(split(&degs)), prop::collection::vec(arb_class(), r))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]

        // the closed-form cross-check runs inside every call
        #[test]
        fn reduction_matches_closed_form((e, cs) in arb_case()) {
            intersection_number(&cs, &e).unwrap();
        }

        #[test]
        fn symmetric((e, mut cs) in arb_case()) {
            let before = intersection_number(&cs, &e).unwrap();
            cs.reverse();
            cs.rotate_left(1);
            prop_assert_eq!(intersection_number(&cs, &e).unwrap(), before);
        }

        #[test]
        fn multilinear((e, cs) in arb_case(), extra in arb_class(), k in -3i64..=3) {
            let base = intersection_number(&cs, &e).unwrap();
            let mut other = cs.clone();
            other[0] = extra.clone();
            let alt = intersection_number(&other, &e).unwrap();
            let mut sum = cs.clone();
            let kf = FieldElem::from_int(k);
            sum[0] = cs[0].try_add(&extra.scale(&kf).unwrap()).unwrap();
            prop_assert_eq!(intersection_number(&sum, &e).unwrap(), base + alt * kf);
        }

        #[test]
        fn fiber_twice_vanishes((e, mut cs) in arb_case()) {
            prop_assume!(cs.len() >= 2);
            cs[0] = DivClass::new(0, 1);
            cs[1] = DivClass::new(0, 1);
            prop_assert_eq!(intersection_number(&cs, &e).unwrap(), FieldElem::zero());
        }
    }
}
