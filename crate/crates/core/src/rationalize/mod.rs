//! Turning an effective presentation with real coefficients into one with
//! rational coefficients.
//!
//! An instance lists, over a common set of prime-divisor slots, the
//! coefficient vector of a rational divisor `D'`, the divisors of rational
//! functions `(φ_j)`, and real multipliers `a_j` such that
//! `D' + Σ a_j (φ_j) >= 0`. Callers are responsible for having already
//! replaced the original divisor by a linearly equivalent `D'`.

mod fm;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

pub use fm::{fm_feasible, Feasibility, LinearSystem, Relation, Row, Scalar};

use crate::error::{Error, Result};
use crate::numbers::{continued_fraction_approx, FieldElem, Rational};
use crate::wire::{display_matrix, display_vec};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EffectivityInstance {
    #[serde(serialize_with = "display_vec")]
    d_prime: Vec<Rational>,
    #[serde(serialize_with = "display_matrix")]
    principals: Vec<Vec<Rational>>,
    coeffs: Vec<FieldElem>,
}

impl EffectivityInstance {
    /// Checks shapes, a common quadratic field, and effectivity.
    pub fn new(d_prime: Vec<Rational>, principals: Vec<Vec<Rational>>, coeffs: Vec<FieldElem>) -> Result<Self> {
        if d_prime.is_empty() {
            return Err(Error::InvalidInput("instance has no slots".into()));
        }
        if principals.len() != coeffs.len() {
            return Err(Error::ArityMismatch {
                expected: coeffs.len(),
                actual: principals.len(),
            });
        }
        for p in &principals {
            if p.len() != d_prime.len() {
                return Err(Error::DimensionMismatch {
                    expected: d_prime.len(),
                    actual: p.len(),
                });
            }
        }
        coeffs.iter().try_fold(FieldElem::zero(), |acc, a| acc.try_add(a))?;
        let inst = EffectivityInstance {
            d_prime,
            principals,
            coeffs,
        };
        let combined = inst.try_combined()?;
        if let Some(slot) = combined.iter().position(FieldElem::is_negative) {
            return Err(Error::NotEffective { slot });
        }
        Ok(inst)
    }

    pub fn d_prime(&self) -> &[Rational] {
        &self.d_prime
    }

    pub fn principals(&self) -> &[Vec<Rational>] {
        &self.principals
    }

    pub fn coeffs(&self) -> &[FieldElem] {
        &self.coeffs
    }

    pub fn slots(&self) -> usize {
        self.d_prime.len()
    }

    fn try_combined(&self) -> Result<Vec<FieldElem>> {
        let mut out: Vec<FieldElem> = self.d_prime.iter().cloned().map(FieldElem::from_rational).collect();
        for (a, p) in self.coeffs.iter().zip(&self.principals) {
            for (slot, entry) in out.iter_mut().zip(p) {
                *slot = slot.try_add(&a.scale(entry))?;
            }
        }
        Ok(out)
    }

    /// `L = D' + Σ a_j (φ_j)` slot by slot.
    pub fn combined(&self) -> Vec<FieldElem> {
        self.try_combined().expect("radicands checked at construction")
    }

    /// `D' + Σ a'_j (φ_j)` for rational replacements `a'`.
    pub fn evaluate(&self, values: &[Rational]) -> Vec<Rational> {
        assert_eq!(values.len(), self.coeffs.len());
        let mut out = self.d_prime.clone();
        for (a, p) in values.iter().zip(&self.principals) {
            for (slot, entry) in out.iter_mut().zip(p) {
                *slot += a * entry;
            }
        }
        out
    }

    /// Rows `Σ_j (φ_j)_k a'_j >= -D'_k` in the unknowns `a'_j`.
    pub fn admissible_system(&self) -> Result<LinearSystem> {
        admissible_system(&self.d_prime, &self.principals)
    }

    /// Rewrites the instance so that `{1} ∪ coeffs` is linearly independent
    /// over `Q`, without changing `L`.
    ///
    /// The multipliers become a basis of their rational span in which every
    /// original multiplier has integer coordinates; a rational basis element
    /// is absorbed into `D'`.
    pub fn normalized(&self) -> Result<NormalizedInstance> {
        let (basis, coords) = normalize_basis(&self.coeffs)?;
        let slots = self.slots();
        let mut combos: Vec<Vec<Rational>> = vec![vec![<Rational as Zero>::zero(); slots]; basis.len()];
        for (row, p) in coords.iter().zip(&self.principals) {
            for (j, c) in row.iter().enumerate() {
                let c = Rational::from_integer(c.clone());
                for (acc, entry) in combos[j].iter_mut().zip(p) {
                    *acc += &c * entry;
                }
            }
        }
        let mut d_prime = self.d_prime.clone();
        let mut coeffs = basis.clone();
        let absorbed = basis.first().and_then(FieldElem::as_rational).cloned();
        if let Some(v) = &absorbed {
            for (d, entry) in d_prime.iter_mut().zip(&combos[0]) {
                *d += v * entry;
            }
            combos.remove(0);
            coeffs.remove(0);
        }
        Ok(NormalizedInstance {
            instance: EffectivityInstance::new(d_prime, combos, coeffs)?,
            basis,
            coords,
            absorbed_rational: absorbed.is_some(),
        })
    }
}

/// Instance with independent multipliers and the change of basis back to the
/// original ones: `original_i = Σ_j coords[i][j] basis[j]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalizedInstance {
    pub instance: EffectivityInstance,
    pub basis: Vec<FieldElem>,
    pub coords: Vec<Vec<BigInt>>,
    /// Whether `basis[0]` is rational and was folded into `D'`.
    pub absorbed_rational: bool,
}

/// The rows `Σ_j p_{jk} x_j >= -d_k`, one per slot.
pub fn admissible_system(d_prime: &[Rational], principals: &[Vec<Rational>]) -> Result<LinearSystem> {
    let rows = (0..d_prime.len())
        .map(|k| {
            let coeffs = principals.iter().map(|p| p[k].clone()).collect();
            Row::ge(coeffs, -&d_prime[k])
        })
        .collect();
    LinearSystem::new(rows)
}

/// The admissible rows with every unknown pinned to its real value; feasible
/// exactly when `d_prime + Σ coeffs_j principals_j >= 0`.
pub fn pinned_system(
    d_prime: &[Rational],
    principals: &[Vec<Rational>],
    coeffs: &[FieldElem],
) -> Result<LinearSystem<FieldElem>> {
    let r = coeffs.len();
    if principals.len() != r {
        return Err(Error::ArityMismatch {
            expected: r,
            actual: principals.len(),
        });
    }
    let mut rows = Vec::new();
    for (k, d) in d_prime.iter().enumerate() {
        let coeffs = principals
            .iter()
            .map(|p| p.get(k).cloned().map(FieldElem::from_rational))
            .collect::<Option<Vec<_>>>()
            .ok_or(Error::DimensionMismatch {
                expected: d_prime.len(),
                actual: principals.iter().map(Vec::len).min().unwrap_or(0),
            })?;
        rows.push(Row::ge(coeffs, FieldElem::from_rational(-d)));
    }
    for (j, a) in coeffs.iter().enumerate() {
        let unit = |s: i64| (0..r).map(|i| FieldElem::from_int(if i == j { s } else { 0 })).collect();
        rows.push(Row::ge(unit(1), a.clone()));
        rows.push(Row::ge(unit(-1), -a.clone()));
    }
    // a common field is required by the eliminator
    rows.iter()
        .flat_map(|r| r.coeffs.iter().chain([&r.bound]))
        .try_fold(FieldElem::zero(), |acc, x| acc.try_add(x))?;
    LinearSystem::new(rows)
}

/// A `Q`-basis of the span of `b` in which every `b_i` has integer
/// coordinates. A rational element, when the span contains one, comes first.
///
/// Works on the lattice generated by `b` inside `Q ⊕ Q sqrt(d)`: an extended
/// gcd on the radical parts yields one generator with nonzero radical part,
/// the remaining vectors are rational, and their gcd generates the rest.
pub fn normalize_basis(b: &[FieldElem]) -> Result<(Vec<FieldElem>, Vec<Vec<BigInt>>)> {
    let radicand = b
        .iter()
        .try_fold(FieldElem::zero(), |acc, x| acc.try_add(x))
        .map(|_| b.iter().find_map(FieldElem::radicand))?;
    let denom = b.iter().fold(BigInt::one(), |acc, x| {
        acc.lcm(x.rational_part().denom()).lcm(x.radical_part().denom())
    });
    let scaled: Vec<(BigInt, BigInt)> = b
        .iter()
        .map(|x| {
            let (r, s) = x.rational_decompose();
            (scale_to_integer(&r, &denom), scale_to_integer(&s, &denom))
        })
        .collect();

    let mut irr: Option<(BigInt, BigInt)> = None;
    let mut rat = BigInt::zero();
    for (r, s) in &scaled {
        if s.is_zero() {
            rat = rat.gcd(r);
            continue;
        }
        match irr.take() {
            None => irr = Some((r.clone(), s.clone())),
            Some((ar, as_)) => {
                let eg = as_.extended_gcd(s);
                let g = eg.gcd;
                let residual = (s / &g) * &ar - (&as_ / &g) * r;
                rat = rat.gcd(&residual);
                irr = Some((eg.x * &ar + eg.y * r, g));
            }
        }
    }
    if let Some((r, s)) = irr.as_mut() {
        if s.is_negative() {
            *r = -&*r;
            *s = -&*s;
        }
        if !rat.is_zero() {
            *r = r.mod_floor(&rat);
        }
    }

    let to_field = |r: &BigInt, s: &BigInt| {
        let rq = Rational::new(r.clone(), denom.clone());
        let sq = Rational::new(s.clone(), denom.clone());
        match radicand {
            Some(d) if !sq.is_zero() => FieldElem::new(rq, sq, d),
            _ => FieldElem::from_rational(rq),
        }
    };
    let mut basis = Vec::new();
    if !rat.is_zero() {
        basis.push(to_field(&rat, &BigInt::zero()));
    }
    if let Some((r, s)) = &irr {
        basis.push(to_field(r, s));
    }

    let coords = scaled
        .iter()
        .map(|(r, s)| {
            let mut row = Vec::new();
            let c_irr = match &irr {
                Some((ir, is)) => {
                    debug_assert!((s % is).is_zero());
                    let c = s / is;
                    (r - &c * ir, Some(c))
                }
                None => (r.clone(), None),
            };
            let (rest, c) = c_irr;
            if !rat.is_zero() {
                debug_assert!((&rest % &rat).is_zero());
                row.push(&rest / &rat);
            } else {
                debug_assert!(rest.is_zero());
            }
            row.extend(c);
            row
        })
        .collect();
    Ok((basis, coords))
}

fn scale_to_integer(q: &Rational, denom: &BigInt) -> BigInt {
    let v = q * Rational::from_integer(denom.clone());
    debug_assert!(v.is_integer());
    v.to_integer()
}

/// Slots where `L` vanishes. On each of them `D'` and every `(φ_j)` must
/// vanish too, which is what independence of `{1, a_1, ...}` forces.
pub fn zero_row_forcing(inst: &EffectivityInstance) -> Result<Vec<usize>> {
    let mut forced = Vec::new();
    for (slot, value) in inst.combined().iter().enumerate() {
        if !value.is_zero() {
            continue;
        }
        let clean = inst.d_prime[slot].is_zero() && inst.principals.iter().all(|p| p[slot].is_zero());
        if !clean {
            return Err(Error::IndependenceViolated { slot });
        }
        forced.push(slot);
    }
    Ok(forced)
}

/// Rational `a'_j` with `D' + Σ a'_j (φ_j) >= 0`.
///
/// The multipliers are first normalized to an independent family; each
/// irrational one is replaced by a continued-fraction convergent within
/// `s / (r · max |entry|)`, where `s` is the smallest positive slot of `L`.
/// The original multipliers are then rebuilt from the integer coordinates
/// and the result is verified exactly.
pub fn rationalize(inst: &EffectivityInstance) -> Result<Vec<Rational>> {
    if let Some(values) = inst.coeffs.iter().map(|a| a.as_rational().cloned()).collect() {
        return Ok(values);
    }
    let norm = inst.normalized()?;
    let reduced = &norm.instance;
    let forced = zero_row_forcing(reduced)?;

    let combined = reduced.combined();
    let slack = combined
        .iter()
        .enumerate()
        .filter(|(k, _)| !forced.contains(k))
        .map(|(_, v)| v)
        .min_by(|x, y| x.partial_cmp(y).expect("single field"))
        .cloned();
    let max_entry = reduced
        .principals
        .iter()
        .flatten()
        .map(|x| x.abs())
        .max()
        .unwrap_or_else(<Rational as Zero>::zero);
    let r = reduced.coeffs.len();
    let eps = match slack {
        Some(s) if !max_entry.is_zero() => {
            s.scale(&(Rational::one() / (Rational::from_integer(r.into()) * &max_entry)))
        }
        _ => FieldElem::one(),
    };
    log::debug!("rationalize: {r} independent multipliers, tolerance {eps}");

    let mut replaced: Vec<Rational> = Vec::with_capacity(norm.basis.len());
    if norm.absorbed_rational {
        replaced.push(norm.basis[0].as_rational().cloned().expect("absorbed element is rational"));
    }
    for a in &reduced.coeffs {
        replaced.push(continued_fraction_approx(a, &eps)?);
    }
    let values: Vec<Rational> = norm
        .coords
        .iter()
        .map(|row| {
            row.iter()
                .zip(&replaced)
                .map(|(c, v)| Rational::from_integer(c.clone()) * v)
                .sum()
        })
        .collect();
    let check = inst.evaluate(&values);
    assert!(
        check.iter().all(|v| !v.is_negative()),
        "rationalized multipliers fail re-verification"
    );
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn qs(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&n| q(n, 1)).collect()
    }

    fn fe(s: &str) -> FieldElem {
        s.parse().unwrap()
    }

    fn ints(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter().map(|r| r.iter().map(|&n| BigInt::from(n)).collect()).collect()
    }

    #[test]
    fn basis_of_two_radicals() {
        let (basis, coords) = normalize_basis(&[fe("1/2*sqrt(2)"), fe("1/3*sqrt(2)")]).unwrap();
        assert_eq!(basis, vec![fe("1/6*sqrt(2)")]);
        assert_eq!(coords, ints(&[&[3], &[2]]));
    }

    #[test]
    fn basis_of_a_rational() {
        let (basis, coords) = normalize_basis(&[fe("1/2")]).unwrap();
        assert_eq!(basis, vec![fe("1/2")]);
        assert_eq!(coords, ints(&[&[1]]));
    }

    #[test]
    fn basis_meeting_the_rationals() {
        let (basis, coords) = normalize_basis(&[fe("1 + sqrt(2)"), fe("sqrt(2)")]).unwrap();
        assert_eq!(basis, vec![fe("1"), fe("sqrt(2)")]);
        assert_eq!(coords, ints(&[&[1, 1], &[0, 1]]));
    }

    #[test]
    fn basis_rejects_mixed_fields() {
        assert_eq!(
            normalize_basis(&[fe("sqrt(2)"), fe("sqrt(3)")]),
            Err(Error::MixedRadicand(2, 3))
        );
    }

    #[test]
    fn forced_slot() {
        let inst = EffectivityInstance::new(qs(&[1, 0]), vec![qs(&[-1, 0])], vec![fe("sqrt(2) - 1")]).unwrap();
        assert_eq!(inst.combined(), vec![fe("2 - sqrt(2)"), FieldElem::zero()]);
        assert_eq!(zero_row_forcing(&inst).unwrap(), vec![1]);
    }

    #[test]
    fn no_forced_slots() {
        let inst = EffectivityInstance::new(qs(&[0, 2]), vec![qs(&[1, -1])], vec![fe("sqrt(2)")]).unwrap();
        assert_eq!(inst.combined(), vec![fe("sqrt(2)"), fe("2 - sqrt(2)")]);
        assert!(zero_row_forcing(&inst).unwrap().is_empty());
        let strict = EffectivityInstance::new(qs(&[3, 3]), vec![qs(&[1, 1])], vec![fe("sqrt(5)")]).unwrap();
        assert!(zero_row_forcing(&strict).unwrap().is_empty());
    }

    #[test]
    fn dependent_multipliers_are_caught() {
        // √2 (1) + √2 (-1) = 0 on slot 0 with nonzero entries
        let inst = EffectivityInstance::new(
            qs(&[0, 1]),
            vec![qs(&[1, 0]), qs(&[-1, 0])],
            vec![fe("sqrt(2)"), fe("sqrt(2)")],
        )
        .unwrap();
        assert_eq!(zero_row_forcing(&inst), Err(Error::IndependenceViolated { slot: 0 }));
        // normalization merges them and the engine succeeds
        let values = rationalize(&inst).unwrap();
        assert_eq!(values[0], values[1]);
    }

    #[test]
    fn construction_checks() {
        assert_eq!(
            EffectivityInstance::new(qs(&[0, 1]), vec![qs(&[1, -1])], vec![fe("sqrt(2)")]),
            Err(Error::NotEffective { slot: 1 })
        );
        assert!(matches!(
            EffectivityInstance::new(qs(&[0]), vec![qs(&[1])], vec![]),
            Err(Error::ArityMismatch { .. })
        ));
        assert!(matches!(
            EffectivityInstance::new(qs(&[0, 1]), vec![qs(&[1])], vec![fe("1")]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert_eq!(
            EffectivityInstance::new(qs(&[5, 5]), vec![qs(&[1, 0]), qs(&[0, 1])], vec![fe("sqrt(2)"), fe("sqrt(3)")]),
            Err(Error::MixedRadicand(2, 3))
        );
    }

    #[test]
    fn rationalize_first_example() {
        let inst = EffectivityInstance::new(qs(&[1, 0]), vec![qs(&[-1, 1])], vec![fe("sqrt(2) - 1")]).unwrap();
        let a = rationalize(&inst).unwrap();
        assert_eq!(a, vec![q(1, 2)]);
        assert!(inst.evaluate(&a).iter().all(|v| !v.is_negative()));
        // 2/5 from the same interval is admissible as well
        assert_eq!(inst.evaluate(&[q(2, 5)]), vec![q(3, 5), q(2, 5)]);
    }

    #[test]
    fn rationalize_second_example() {
        let inst = EffectivityInstance::new(qs(&[0, 2]), vec![qs(&[0, -1])], vec![fe("sqrt(2)")]).unwrap();
        let a = rationalize(&inst).unwrap();
        assert_eq!(a, vec![q(1, 1)]);
        assert_eq!(inst.evaluate(&a), vec![q(0, 1), q(1, 1)]);
        assert_eq!(inst.evaluate(&[q(7, 5)]), vec![q(0, 1), q(3, 5)]);
    }

    #[test]
    fn rational_multipliers_pass_through() {
        let inst = EffectivityInstance::new(qs(&[1, 1]), vec![qs(&[1, -1])], vec![fe("1/3")]).unwrap();
        assert_eq!(rationalize(&inst).unwrap(), vec![q(1, 3)]);
    }

    #[test]
    fn admissible_interval_of_first_example() {
        let inst = EffectivityInstance::new(qs(&[1, 0]), vec![qs(&[-1, 1])], vec![fe("sqrt(2) - 1")]).unwrap();
        let f = fm_feasible(&inst.admissible_system().unwrap());
        let w = f.witness.unwrap();
        assert!(w[0] >= q(0, 1) && w[0] <= q(1, 1));
    }

    #[test]
    fn pinned_system_detects_failure() {
        let good = pinned_system(&qs(&[1, 0]), &[qs(&[-1, 1])], &[fe("sqrt(2) - 1")]).unwrap();
        assert!(fm_feasible(&good).feasible);
        let bad = pinned_system(&qs(&[1, 0]), &[qs(&[-1, 1])], &[fe("sqrt(2)")]).unwrap();
        assert!(!fm_feasible(&bad).feasible);
    }

    #[test]
    fn normalization_absorbs_rational_part() {
        let inst = EffectivityInstance::new(
            qs(&[0, 0, 4]),
            vec![qs(&[1, 0, -1]), qs(&[0, 1, -1])],
            vec![fe("1 + sqrt(2)"), fe("sqrt(2)")],
        )
        .unwrap();
        let norm = inst.normalized().unwrap();
        assert!(norm.absorbed_rational);
        assert_eq!(norm.instance.coeffs(), &[fe("sqrt(2)")]);
        assert_eq!(norm.instance.d_prime(), &qs(&[1, 0, 3])[..]);
        assert_eq!(norm.instance.combined(), inst.combined());
        let a = rationalize(&inst).unwrap();
        assert!(inst.evaluate(&a).iter().all(|v| !v.is_negative()));
    }

    #[test]
    fn instance_json() {
        let inst = EffectivityInstance::new(qs(&[1, 0]), vec![qs(&[-1, 1])], vec![fe("sqrt(2) - 1")]).unwrap();
        assert_eq!(
            serde_json::to_string(&inst).unwrap(),
            r#"{"d_prime":["1","0"],"principals":[["-1","1"]],"coeffs":["-1 + 1*sqrt(2)"]}"#
        );
    }

    fn arb_elem() -> impl Strategy<Value = FieldElem> {
        (-8i64..=8, 1i64..=6, -8i64..=8, 1i64..=6)
            .prop_map(|(a, b, c, d)| FieldElem::from_rational(q(a, b)) + fe(&format!("{c}/{d}*sqrt(7)")))
    }

    /// Effective instance built around independent multipliers: slots get
    /// `L_k >= 0` by choosing `D'_k` from the principal entries.
    fn arb_instance() -> impl Strategy<Value = EffectivityInstance> {
        (1usize..=6, 1usize..=3)
            .prop_flat_map(|(slots, r)| {
                (
                    prop::collection::vec(prop::collection::vec(-3i64..=3, slots), r),
                    prop::collection::vec((1i64..=5, 1i64..=3, 0i64..=4), r),
                    prop::collection::vec(0i64..=3, slots),
                    prop::collection::vec(any::<bool>(), slots),
                )
            })
            .prop_map(|(principals, raw, extra, zero)| {
                let coeffs: Vec<FieldElem> = raw
                    .iter()
                    .map(|&(s, d, a)| FieldElem::from_rational(q(a, 1)) + fe(&format!("{s}/{d}*sqrt(2)")))
                    .collect();
                let mut principals: Vec<Vec<Rational>> =
                    principals.iter().map(|p| p.iter().map(|&n| q(n, 1)).collect()).collect();
                let slots = extra.len();
                let mut d_prime = Vec::with_capacity(slots);
                for k in 0..slots {
                    if zero[k] {
                        for p in principals.iter_mut() {
                            p[k] = q(0, 1);
                        }
                        d_prime.push(q(0, 1));
                        continue;
                    }
                    let partial = coeffs
                        .iter()
                        .zip(&principals)
                        .fold(FieldElem::zero(), |acc, (a, p)| acc + a.scale(&p[k]));
                    // smallest integer making the slot nonnegative, plus extra
                    let need = -partial.floor();
                    d_prime.push(Rational::from_integer(need) + q(extra[k], 1));
                }
                EffectivityInstance::new(d_prime, principals, coeffs).unwrap()
            })
    }

    proptest! {
        #[test]
        fn basis_reconstructs(b in prop::collection::vec(arb_elem(), 1..5)) {
            let (basis, coords) = normalize_basis(&b).unwrap();
            prop_assert!(basis.len() <= 2);
            if basis.len() == 2 || basis.first().is_some_and(FieldElem::is_rational) {
                prop_assert!(basis[0].is_rational());
            }
            for (x, row) in b.iter().zip(&coords) {
                prop_assert_eq!(row.len(), basis.len());
                let rebuilt = row.iter().zip(&basis).fold(FieldElem::zero(), |acc, (c, v)| {
                    acc + v.scale(&Rational::from_integer(c.clone()))
                });
                prop_assert_eq!(&rebuilt, x);
            }
        }

        #[test]
        fn rationalized_instances_verify(inst in arb_instance()) {
            let a = rationalize(&inst).unwrap();
            prop_assert!(inst.evaluate(&a).iter().all(|v| !v.is_negative()));
            let sys = inst.admissible_system().unwrap();
            prop_assert!(sys.is_satisfied_by(&a));
            prop_assert!(fm_feasible(&sys).feasible);
            let pinned = pinned_system(inst.d_prime(), inst.principals(), inst.coeffs()).unwrap();
            prop_assert!(fm_feasible(&pinned).feasible);
        }

        #[test]
        fn independent_instances_force_cleanly(inst in arb_instance()) {
            let norm = inst.normalized().unwrap();
            let forced = zero_row_forcing(&norm.instance).unwrap();
            for k in forced {
                prop_assert!(norm.instance.d_prime()[k].is_zero());
                prop_assert!(norm.instance.principals().iter().all(|p| p[k].is_zero()));
            }
        }

        #[test]
        fn pinned_system_matches_effectivity(d in prop::collection::vec(-3i64..=3, 1..5),
                                             a in arb_elem()) {
            let slots = d.len();
            let p: Vec<Rational> = (0..slots).map(|k| q(if k % 2 == 0 { 1 } else { -1 }, 1)).collect();
            let dq: Vec<Rational> = d.iter().map(|&n| q(n, 1)).collect();
            let effective = EffectivityInstance::new(dq.clone(), vec![p.clone()], vec![a.clone()]).is_ok();
            let sys = pinned_system(&dq, &[p], &[a]).unwrap();
            prop_assert_eq!(fm_feasible(&sys).feasible, effective);
        }
    }
}
