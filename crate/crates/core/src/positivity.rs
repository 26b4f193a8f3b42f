//! Positivity verdicts for divisor classes on `P(E)` over a curve.
//!
//! Writing `D = λΘ + bF`, the pseudo-effective cone is cut out by
//! `b >= -λ μ_max(E)` and the nef cone by `b >= -λ μ_min(E)` (with `λ >= 0`).
//! Over `F_p`-bar every pseudo-effective rational class is `Q`-effective and
//! the report carries an explicit decomposition witnessing it.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;
use serde::Serialize;

use crate::bundle::{BundleNumerics, Curve, HnProfile, SplitBundle};
use crate::chow::{intersection_number, DivClass};
use crate::error::{Error, Result};
use crate::numbers::{FieldElem, Rational};
use crate::wire::display;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Thresholds {
    #[serde(serialize_with = "display")]
    pub mu_max: Rational,
    #[serde(serialize_with = "display")]
    pub mu_min: Rational,
}

/// `D ~ λ(Θ - f^*ξ) + λ f^*B` with `deg B >= 0`, where `ξ` is the degree of a
/// maximal-slope summand. `Θ - f^*ξ` has a section coming from summand
/// `section_slot`; `m` clears all denominators so that `mD` is integral.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EffectivityWitness {
    #[serde(rename = "xi", serialize_with = "display")]
    pub xi_degree: Rational,
    #[serde(rename = "b")]
    pub b_degree: FieldElem,
    #[serde(rename = "slot")]
    pub section_slot: usize,
    #[serde(serialize_with = "crate::wire::integer")]
    pub m: BigInt,
}

impl EffectivityWitness {
    /// Rebuilds `λΘ + (λ deg B - λ ξ) F`.
    pub fn reconstruct(&self, theta: &FieldElem) -> DivClass {
        let xi = FieldElem::from_rational(self.xi_degree.clone());
        let fiber = theta * &(&self.b_degree - &xi);
        DivClass::new(theta.clone(), fiber)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PositivityReport {
    #[serde(rename = "nef")]
    pub is_nef: bool,
    #[serde(rename = "pseff")]
    pub is_pseudoeffective: bool,
    #[serde(rename = "big")]
    pub is_big: bool,
    #[serde(rename = "ample")]
    pub is_ample: bool,
    /// Present only for rational classes over `F_p`-bar.
    #[serde(rename = "q_effective")]
    pub is_q_effective: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<EffectivityWitness>,
    pub thresholds: Thresholds,
    /// Set for irrational classes: pseudo-effectivity is reported but
    /// `R`-effectivity is left to the rationalization engine.
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub r_effectivity_undecided: bool,
}

impl PositivityReport {
    /// `(nef, pseff, big, ample, q_effective)`.
    pub fn verdicts(&self) -> (bool, bool, bool, bool, Option<bool>) {
        (
            self.is_nef,
            self.is_pseudoeffective,
            self.is_big,
            self.is_ample,
            self.is_q_effective,
        )
    }
}

fn cmp_sign(x: &FieldElem, y: &FieldElem) -> Result<i8> {
    Ok(x.try_sub(y)?.sign())
}

pub fn classify(d: &DivClass, e: &HnProfile, c: &Curve) -> Result<PositivityReport> {
    let thresholds = Thresholds {
        mu_max: e.mu_max(),
        mu_min: e.mu_min(),
    };
    let lambda = &d.theta;
    let b = &d.fiber;
    // surface a radicand clash early even when λ = 0
    lambda.try_add(b)?;
    let rational = d.is_rational();

    let (nef, pseff, big, ample) = match lambda.sign() {
        s if s < 0 => (false, false, false, false),
        0 => {
            let ok = b.sign() >= 0;
            (ok, ok, false, false)
        }
        _ => {
            let pseff_bound = -(lambda.scale(&thresholds.mu_max));
            let nef_bound = -(lambda.scale(&thresholds.mu_min));
            let to_pseff = cmp_sign(b, &pseff_bound)?;
            let to_nef = cmp_sign(b, &nef_bound)?;
            (to_nef >= 0, to_pseff >= 0, to_pseff > 0, to_nef > 0)
        }
    };

    let is_q_effective = (rational && c.over_fpbar).then_some(pseff);
    let witness = match is_q_effective {
        Some(true) if lambda.is_positive() => Some(witness_for(lambda, b, &thresholds.mu_max)),
        _ => None,
    };
    Ok(PositivityReport {
        is_nef: nef,
        is_pseudoeffective: pseff,
        is_big: big,
        is_ample: ample,
        is_q_effective,
        witness,
        thresholds,
        r_effectivity_undecided: !rational,
    })
}

fn witness_for(lambda: &FieldElem, b: &FieldElem, mu_max: &Rational) -> EffectivityWitness {
    // deg A = -b/λ, B = ξ - A
    let xi = FieldElem::from_rational(mu_max.clone());
    let b_degree = &xi + &(b / lambda);
    debug_assert!(b_degree.sign() >= 0);
    let lam = lambda.as_rational().expect("witness requires rational λ");
    let fib = b.as_rational().expect("witness requires rational b");
    let m = [lam.denom().clone(), fib.denom().clone(), (lam * mu_max).denom().clone()]
        .iter()
        .fold(BigInt::one(), |acc, d| acc.lcm(d));
    EffectivityWitness {
        xi_degree: mu_max.clone(),
        b_degree,
        section_slot: 0,
        m,
    }
}

/// A divisor of degree `deg_a` on a curve over `F_p`-bar is effective up to
/// scaling exactly when its degree is nonnegative.
pub fn curve_divisor_q_effective(deg_a: &FieldElem, c: &Curve) -> Result<bool> {
    if !c.over_fpbar {
        return Err(Error::NotOverFpbar);
    }
    Ok(deg_a.sign() >= 0)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NakaiCertificate {
    pub ample: bool,
    pub self_intersection: FieldElem,
}

/// Ampleness on a ruled surface `P(E)`, `rank E = 2`, for a class that is
/// positive on every curve: `D^2 > 0` and Nakai-Moishezon.
pub fn is_ample_rank2_nakai(d: &DivClass, e: &SplitBundle, c: &Curve) -> Result<NakaiCertificate> {
    if e.rank() != 2 {
        return Err(Error::PreconditionViolated(format!("rank {} != 2", e.rank())));
    }
    if !c.over_fpbar {
        return Err(Error::NotOverFpbar);
    }
    if !d.is_rational() {
        return Err(Error::PreconditionViolated("class must be rational".into()));
    }
    let mu_min = FieldElem::from_rational(Rational::from_integer(e.min_degree().into()));
    let strictly_nef = d.theta.is_positive() && (&d.fiber + &(&d.theta * &mu_min)).is_positive();
    if !strictly_nef {
        return Err(Error::PreconditionViolated(format!(
            "{}Θ + {}F is not strictly nef",
            d.theta, d.fiber
        )));
    }
    let self_intersection = intersection_number(&[d.clone(), d.clone()], e)?;
    assert!(
        self_intersection.is_positive(),
        "strictly nef class with D^2 = {self_intersection}"
    );
    Ok(NakaiCertificate {
        ample: true,
        self_intersection,
    })
}

/// Verdicts are unchanged by pulling back along a degree-`n` cover of the base.
pub fn pullback_invariance_check(d: &DivClass, e: &HnProfile, n: u64, c: &Curve) -> Result<bool> {
    let before = classify(d, e, c)?;
    let after = classify(&d.pullback_cover(n), &crate::bundle::pullback_cover(e, n)?, c)?;
    Ok(before.verdicts() == after.verdicts())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::{hn_profile, HnPiece};
    use proptest::prelude::*;

    fn fe(s: &str) -> FieldElem {
        s.parse().unwrap()
    }

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn p(d: &[i64]) -> HnProfile {
        hn_profile(&SplitBundle::new(d).unwrap())
    }

    fn fpbar() -> Curve {
        Curve::new(0, 5, true).unwrap()
    }

    #[test]
    fn beyond_max_slope_is_not_pseudoeffective() {
        let r = classify(&DivClass::theta_minus(2), &p(&[1, 0]), &fpbar()).unwrap();
        assert!(!r.is_pseudoeffective);
        assert_eq!(r.is_q_effective, Some(false));
        assert!(r.witness.is_none());
    }

    #[test]
    fn between_slopes() {
        let r = classify(&DivClass::theta_minus(fe("1/2")), &p(&[1, 0]), &fpbar()).unwrap();
        assert!(r.is_pseudoeffective && r.is_big);
        assert!(!r.is_nef && !r.is_ample);
    }

    #[test]
    fn boundary_class_has_witness() {
        let d = DivClass::theta_minus(1);
        let r = classify(&d, &p(&[1, 0]), &fpbar()).unwrap();
        assert_eq!(r.is_q_effective, Some(true));
        assert!(!r.is_big);
        let w = r.witness.unwrap();
        assert_eq!(w.xi_degree, q(1, 1));
        assert_eq!(w.b_degree, FieldElem::zero());
        assert_eq!(w.section_slot, 0);
        assert_eq!(w.m, BigInt::one());
        assert_eq!(w.reconstruct(&d.theta), d);
        assert_eq!(
            serde_json::to_string(&w).unwrap(),
            r#"{"xi":"1","b":"0","slot":0,"m":1}"#
        );
    }

    #[test]
    fn negative_on_fibers() {
        let r = classify(&DivClass::new(-1, 0), &p(&[0, 0]), &fpbar()).unwrap();
        assert_eq!(r.verdicts(), (false, false, false, false, Some(false)));
    }

    #[test]
    fn fiber_multiples() {
        let r = classify(&DivClass::new(0, 3), &p(&[2, -1]), &fpbar()).unwrap();
        assert_eq!(r.verdicts(), (true, true, false, false, Some(true)));
        let r = classify(&DivClass::new(0, -1), &p(&[2, -1]), &fpbar()).unwrap();
        assert_eq!(r.verdicts(), (false, false, false, false, Some(false)));
    }

    #[test]
    fn q_effectivity_needs_rational_class_over_fpbar() {
        let complex = Curve::new(0, 0, false).unwrap();
        let r = classify(&DivClass::theta_minus(0), &p(&[1, 0]), &complex).unwrap();
        assert_eq!(r.is_q_effective, None);
        let irr = DivClass::theta_minus(fe("sqrt(2) - 1"));
        let r = classify(&irr, &p(&[1, 0]), &fpbar()).unwrap();
        assert!(r.is_pseudoeffective && !r.is_nef);
        assert_eq!(r.is_q_effective, None);
        assert!(r.r_effectivity_undecided);
    }

    #[test]
    fn report_json_shape() {
        let r = classify(&DivClass::theta_minus(1), &p(&[1, 0]), &fpbar()).unwrap();
        assert_eq!(
            serde_json::to_string(&r).unwrap(),
            r#"{"nef":false,"pseff":true,"big":false,"ample":false,"q_effective":true,"witness":{"xi":"1","b":"0","slot":0,"m":1},"thresholds":{"mu_max":"1","mu_min":"0"}}"#
        );
    }

    #[test]
    fn witness_clears_denominators() {
        let e = HnProfile::new(vec![HnPiece::new(2, q(1, 1)), HnPiece::new(1, q(-1, 1))]).unwrap();
        let d = DivClass::new(fe("2/3"), fe("-1/5"));
        let r = classify(&d, &e, &fpbar()).unwrap();
        let w = r.witness.unwrap();
        // λ = 2/3, b = -1/5, λ ξ = 1/3
        assert_eq!(w.m, BigInt::from(15));
        assert_eq!(w.reconstruct(&d.theta), d);
    }

    #[test]
    fn curve_divisors() {
        let c = fpbar();
        assert!(curve_divisor_q_effective(&FieldElem::zero(), &c).unwrap());
        assert!(!curve_divisor_q_effective(&fe("-1/3"), &c).unwrap());
        assert!(curve_divisor_q_effective(&fe("sqrt(2) - 1"), &c).unwrap());
        let complex = Curve::new(1, 0, false).unwrap();
        assert_eq!(curve_divisor_q_effective(&FieldElem::zero(), &complex), Err(Error::NotOverFpbar));
    }

    #[test]
    fn nakai_rank2() {
        let c = fpbar();
        let cert = is_ample_rank2_nakai(&DivClass::new(1, 1), &SplitBundle::new(&[0, 0]).unwrap(), &c)
            .unwrap();
        assert!(cert.ample);
        assert_eq!(cert.self_intersection, FieldElem::from_int(2));
        assert!(matches!(
            is_ample_rank2_nakai(&DivClass::new(1, 0), &SplitBundle::new(&[1, 0]).unwrap(), &c),
            Err(Error::PreconditionViolated(_))
        ));
        let cert = is_ample_rank2_nakai(&DivClass::new(1, 0), &SplitBundle::new(&[1, 1]).unwrap(), &c)
            .unwrap();
        assert_eq!(cert.self_intersection, FieldElem::from_int(2));
        assert!(is_ample_rank2_nakai(&DivClass::new(1, 5), &SplitBundle::new(&[1, 1, 1]).unwrap(), &c)
            .is_err());
    }

    #[test]
    fn pullback_invariance() {
        let c = fpbar();
        assert!(pullback_invariance_check(&DivClass::theta_minus(1), &p(&[1, 0]), 3, &c).unwrap());
        assert!(pullback_invariance_check(&DivClass::theta_minus(2), &p(&[1, 0]), 2, &c).unwrap());
        assert!(pullback_invariance_check(&DivClass::new(fe("sqrt(3)"), 7), &p(&[4, -2]), 1, &c).unwrap());
    }

    fn arb_profile() -> impl Strategy<Value = HnProfile> {
        prop::collection::vec(-4i64..=4, 1..=4).prop_map(|d| p(&d))
    }

    fn arb_coeff() -> impl Strategy<Value = FieldElem> {
        (-12i64..=12, 1i64..=4, -2i64..=2).prop_map(|(a, den, s)| {
            FieldElem::from_rational(q(a, den)) + fe(&format!("{s}/{den}*sqrt(2)"))
        })
    }

    fn arb_class() -> impl Strategy<Value = DivClass> {
        (arb_coeff(), arb_coeff()).prop_map(|(l, b)| DivClass::new(l, b))
    }

    proptest! {
        #[test]
        fn implication_chain(d in arb_class(), e in arb_profile()) {
            let r = classify(&d, &e, &fpbar()).unwrap();
            prop_assert!(!r.is_ample || r.is_nef);
            prop_assert!(!r.is_nef || r.is_pseudoeffective);
            prop_assert!(!r.is_big || r.is_pseudoeffective);
            if let Some(qe) = r.is_q_effective {
                prop_assert_eq!(qe, r.is_pseudoeffective);
            }
        }

        #[test]
        fn monotone_in_fiber(d in arb_class(), e in arb_profile(), bump in 0i64..=5) {
            let before = classify(&d, &e, &fpbar()).unwrap();
            let raised = DivClass::new(d.theta.clone(), &d.fiber + &FieldElem::from_int(bump));
            let after = classify(&raised, &e, &fpbar()).unwrap();
            prop_assert!(!before.is_nef || after.is_nef);
            prop_assert!(!before.is_pseudoeffective || after.is_pseudoeffective);
            prop_assert!(!before.is_big || after.is_big);
            prop_assert!(!before.is_ample || after.is_ample);
        }

        #[test]
        fn cone_structure(d in arb_class(), g in arb_class(), e in arb_profile(), k in 1i64..=6) {
            let c = fpbar();
            let rd = classify(&d, &e, &c).unwrap();
            let scaled = classify(&d.scale(&FieldElem::from_int(k)).unwrap(), &e, &c).unwrap();
            prop_assert_eq!(rd.verdicts(), scaled.verdicts());
            let rg = classify(&g, &e, &c).unwrap();
            let sum = classify(&d.try_add(&g).unwrap(), &e, &c).unwrap();
            if rd.is_pseudoeffective && rg.is_pseudoeffective {
                prop_assert!(sum.is_pseudoeffective);
            }
            if rd.is_nef && rg.is_nef {
                prop_assert!(sum.is_nef);
            }
        }

        #[test]
        fn witness_reconstructs(l in 1i64..=6, lden in 1i64..=3, b in -20i64..=20, bden in 1i64..=4,
                                e in arb_profile()) {
            let d = DivClass::new(q(l, lden), q(b, bden));
            let r = classify(&d, &e, &fpbar()).unwrap();
            prop_assert_eq!(r.is_q_effective, Some(r.is_pseudoeffective));
            if let Some(w) = r.witness {
                prop_assert!(w.b_degree.sign() >= 0);
                prop_assert_eq!(w.reconstruct(&d.theta), d.clone());
                // m D is integral
                let m = FieldElem::from_rational(Rational::from_integer(w.m.clone()));
                prop_assert!((&m * &d.theta).as_rational().unwrap().is_integer());
                prop_assert!((&m * &d.fiber).as_rational().unwrap().is_integer());
            } else {
                prop_assert!(!r.is_pseudoeffective);
            }
        }

        #[test]
        fn nakai_never_degenerate(d0 in -3i64..=3, d1 in -3i64..=3, l in 1i64..=4, b in -15i64..=15) {
            let e = SplitBundle::new(&[d0, d1]).unwrap();
            let d = DivClass::new(l, b);
            let strict = b + l * e.min_degree() > 0;
            match is_ample_rank2_nakai(&d, &e, &fpbar()) {
                Ok(cert) => {
                    prop_assert!(strict);
                    prop_assert!(cert.self_intersection.is_positive());
                    let r = classify(&d, &hn_profile(&e), &fpbar()).unwrap();
                    prop_assert!(r.is_ample);
                }
                Err(_) => prop_assert!(!strict),
            }
        }
    }
}
