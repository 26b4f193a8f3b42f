//! Cone geometry in the Neron-Severi space of an abelian surface with a
//! diagonal intersection form `diag(anchor, -λ_2, ..., -λ_ρ)`.
//!
//! The nef cone is the closed positive cone `{x^2 >= 0, x.e_1 >= 0}`. On its
//! boundary, a class whose ray is irrational is nef but cannot be a positive
//! combination of classes of curves.

use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numbers::{FieldElem, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NSLattice {
    rho: usize,
    anchor_square: u64,
    negatives: Vec<u64>,
}

impl NSLattice {
    /// `negatives[i]` is `-(e_{i+2} . e_{i+2})`.
    pub fn new(rho: usize, anchor_square: u64, negatives: Vec<u64>) -> Result<Self> {
        if rho < 3 {
            return Err(Error::InvalidInput(format!("Picard number {rho} must be at least 3")));
        }
        if anchor_square == 0 {
            return Err(Error::InvalidInput("anchor square must be positive".into()));
        }
        if negatives.len() != rho - 1 {
            return Err(Error::DimensionMismatch {
                expected: rho - 1,
                actual: negatives.len(),
            });
        }
        if negatives.contains(&0) {
            return Err(Error::InvalidInput("negative squares must be nonzero".into()));
        }
        Ok(NSLattice {
            rho,
            anchor_square,
            negatives,
        })
    }

    pub fn rho(&self) -> usize {
        self.rho
    }

    pub fn anchor_square(&self) -> u64 {
        self.anchor_square
    }

    pub fn negatives(&self) -> &[u64] {
        &self.negatives
    }

    /// Basis class `e_{i+1}` (zero-based index).
    pub fn basis(&self, i: usize) -> NSClass {
        let mut coords = vec![FieldElem::zero(); self.rho];
        coords[i] = FieldElem::one();
        NSClass { coords }
    }

    fn check(&self, x: &NSClass) -> Result<()> {
        if x.coords.len() != self.rho {
            return Err(Error::DimensionMismatch {
                expected: self.rho,
                actual: x.coords.len(),
            });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct NSClass {
    pub coords: Vec<FieldElem>,
}

impl NSClass {
    pub fn new(coords: Vec<FieldElem>) -> Self {
        NSClass { coords }
    }

    pub fn from_rationals(coords: &[Rational]) -> Self {
        NSClass::new(coords.iter().cloned().map(FieldElem::from_rational).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(FieldElem::is_zero)
    }

    pub fn is_rational(&self) -> bool {
        self.coords.iter().all(FieldElem::is_rational)
    }

    pub fn scale(&self, c: &FieldElem) -> Result<Self> {
        Ok(NSClass::new(self.coords.iter().map(|x| x.try_mul(c)).collect::<Result<_>>()?))
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        if self.coords.len() != other.coords.len() {
            return Err(Error::DimensionMismatch {
                expected: self.coords.len(),
                actual: other.coords.len(),
            });
        }
        Ok(NSClass::new(
            self.coords.iter().zip(&other.coords).map(|(a, b)| a.try_add(b)).collect::<Result<_>>()?,
        ))
    }
}

pub fn pairing(l: &NSLattice, x: &NSClass, y: &NSClass) -> Result<FieldElem> {
    l.check(x)?;
    l.check(y)?;
    let anchor = FieldElem::from_int(l.anchor_square as i64);
    let mut total = anchor.try_mul(&x.coords[0].try_mul(&y.coords[0])?)?;
    for (i, lam) in l.negatives.iter().enumerate() {
        let term = x.coords[i + 1].try_mul(&y.coords[i + 1])?;
        total = total.try_sub(&term.scale(&Rational::from_integer((*lam).into())))?;
    }
    Ok(total)
}

pub fn nef_membership(l: &NSLattice, x: &NSClass) -> Result<bool> {
    let square = pairing(l, x, x)?;
    let degree = pairing(l, x, &l.basis(0))?;
    Ok(square.sign() >= 0 && degree.sign() >= 0)
}

/// Whether some positive multiple of `x` has rational coordinates.
pub fn ray_is_rational(x: &NSClass) -> Result<bool> {
    let pivot = x.coords.iter().find(|c| !c.is_zero()).ok_or(Error::ZeroClass)?;
    for c in &x.coords {
        if !c.try_div(pivot)?.is_rational() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `x` and `y` span at most a line: all 2x2 minors vanish.
pub fn proportional(x: &NSClass, y: &NSClass) -> Result<bool> {
    let n = x.coords.len();
    if y.coords.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: y.coords.len(),
        });
    }
    for i in 0..n {
        for j in i + 1..n {
            let minor = x.coords[i].try_mul(&y.coords[j])?.try_sub(&x.coords[j].try_mul(&y.coords[i])?)?;
            if !minor.is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `H = (d . -)` for a boundary class `d`; nonnegative on the cone and zero
/// there exactly on the ray of `d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportFunctional {
    lattice: NSLattice,
    normal: NSClass,
}

impl SupportFunctional {
    pub fn normal(&self) -> &NSClass {
        &self.normal
    }

    pub fn apply(&self, y: &NSClass) -> Result<FieldElem> {
        pairing(&self.lattice, &self.normal, y)
    }
}

pub fn support_functional(l: &NSLattice, d: &NSClass) -> Result<SupportFunctional> {
    let square = pairing(l, d, d)?;
    let degree = pairing(l, d, &l.basis(0))?;
    if !square.is_zero() || !degree.is_positive() {
        return Err(Error::NotBoundaryClass);
    }
    Ok(SupportFunctional {
        lattice: l.clone(),
        normal: d.clone(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub nef: bool,
    pub boundary: bool,
    pub ray_rational: bool,
}

impl Certificate {
    pub fn all_pass(&self) -> bool {
        self.nef && self.boundary && !self.ray_rational
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub class: NSClass,
    pub certificate: Certificate,
}

/// Certificate for `d` computed from the cone operations.
pub fn certify(l: &NSLattice, d: &NSClass) -> Result<Certificate> {
    let square = pairing(l, d, d)?;
    let degree = pairing(l, d, &l.basis(0))?;
    Ok(Certificate {
        nef: nef_membership(l, d)?,
        boundary: square.is_zero() && degree.is_positive(),
        ray_rational: ray_is_rational(d)?,
    })
}

/// `D = e_1 + t e_2 + a e_3` with `a = sqrt((anchor - λ_2 t^2) / λ_3)`, padded
/// with zeros past the third coordinate.
pub fn build_counterexample(l: &NSLattice, t: &Rational) -> Result<Counterexample> {
    let anchor = Rational::from_integer(l.anchor_square.into());
    let lam2 = Rational::from_integer(l.negatives[0].into());
    let lam3 = Rational::from_integer(l.negatives[1].into());
    let used = &lam2 * t * t;
    if !used.is_positive() || used >= anchor {
        return Err(Error::DegenerateChoice(format!(
            "need 0 < {lam2}·t^2 < {anchor}, got t = {t}"
        )));
    }
    let radicand = (anchor - used) / lam3;
    let a = FieldElem::sqrt_rational(&radicand)?;
    if a.is_rational() {
        return Err(Error::DegenerateChoice(format!("{radicand} is a rational square")));
    }
    let mut coords = vec![FieldElem::one(), FieldElem::from_rational(t.clone()), a];
    coords.resize(l.rho, FieldElem::zero());
    let class = NSClass::new(coords);
    let certificate = certify(l, &class)?;
    assert!(certificate.all_pass(), "constructed class fails its certificate");
    Ok(Counterexample { class, certificate })
}

/// Outcome of checking a claimed decomposition `d = Σ c_i γ_i` into nef
/// classes with positive coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Refutation {
    /// `d` is not a boundary class with irrational ray; nothing to refute.
    NotACounterexample { reason: String },
    /// A component is outside the nef cone or has a nonpositive coefficient.
    InvalidComponent { index: usize, reason: String },
    /// The sum is empty but `d` is not zero.
    ZeroSum,
    /// The sum differs from `d` in this coordinate.
    SumMismatch { coordinate: usize },
    /// `H(γ_i) > 0` although `H(d) = 0`.
    FunctionalMismatch { index: usize },
    /// `H(γ_i) = 0` puts `γ_i` on the ray of `d`, which has no rational point.
    RayContradiction { index: usize },
}

impl Refutation {
    pub fn is_refuted(&self) -> bool {
        !matches!(self, Refutation::NotACounterexample { .. })
    }
}

pub fn effective_decomposition_refuter(
    l: &NSLattice,
    d: &NSClass,
    gammas: &[NSClass],
    c: &[FieldElem],
) -> Result<Refutation> {
    if gammas.len() != c.len() {
        return Err(Error::ArityMismatch {
            expected: gammas.len(),
            actual: c.len(),
        });
    }
    let h = match support_functional(l, d) {
        Ok(h) => h,
        Err(Error::NotBoundaryClass) => {
            return Ok(Refutation::NotACounterexample {
                reason: "not on the cone boundary".into(),
            })
        }
        Err(e) => return Err(e),
    };
    if ray_is_rational(d)? {
        return Ok(Refutation::NotACounterexample {
            reason: "ray is rational".into(),
        });
    }
    for (index, (g, ci)) in gammas.iter().zip(c).enumerate() {
        if !ci.is_positive() {
            return Ok(Refutation::InvalidComponent {
                index,
                reason: format!("coefficient {ci} is not positive"),
            });
        }
        if !nef_membership(l, g)? {
            return Ok(Refutation::InvalidComponent {
                index,
                reason: "class is not nef".into(),
            });
        }
    }
    if gammas.is_empty() {
        return Ok(Refutation::ZeroSum);
    }
    let mut sum = NSClass::new(vec![FieldElem::zero(); l.rho]);
    for (g, ci) in gammas.iter().zip(c) {
        sum = sum.try_add(&g.scale(ci)?)?;
    }
    if let Some(coordinate) = (0..l.rho).find(|&i| sum.coords[i] != d.coords[i]) {
        return Ok(Refutation::SumMismatch { coordinate });
    }
    // 0 = H(d) = Σ c_i H(γ_i) with every term >= 0
    for (index, g) in gammas.iter().enumerate() {
        if h.apply(g)?.is_positive() {
            return Ok(Refutation::FunctionalMismatch { index });
        }
    }
    Ok(Refutation::RayContradiction { index: 0 })
}

fn small_rational<R: Rng + ?Sized>(rng: &mut R, span: i64, max_den: i64) -> Rational {
    Rational::new(rng.gen_range(-span..=span).into(), rng.gen_range(1..=max_den).into())
}

fn positive_rational<R: Rng + ?Sized>(rng: &mut R) -> Rational {
    Rational::new(rng.gen_range(1..=6i64).into(), rng.gen_range(1..=4i64).into())
}

/// Random rational class strictly inside the positive cone.
pub fn sample_interior<R: Rng + ?Sized>(l: &NSLattice, rng: &mut R) -> NSClass {
    let mut coords = vec![Rational::zero(); l.rho];
    let mut bound = Rational::one();
    for (i, lam) in l.negatives.iter().enumerate() {
        let v = small_rational(rng, 6, 4);
        bound += v.abs() * Rational::from_integer((*lam).into());
        coords[i + 1] = v;
    }
    // anchor x_1^2 >= (1 + Σ λ_i |x_i|)^2 > Σ λ_i x_i^2
    coords[0] = bound + Rational::new(rng.gen_range(0..=4i64).into(), 2.into());
    let scale = positive_rational(rng);
    NSClass::from_rationals(&coords.iter().map(|x| x * &scale).collect::<Vec<_>>())
}

/// Random boundary class `s (1, ±t, ±a, 0, ...)` for the given `t`.
pub fn sample_boundary<R: Rng + ?Sized>(l: &NSLattice, t: &Rational, rng: &mut R) -> Result<NSClass> {
    let base = build_counterexample(l, t)?.class;
    let mut coords = base.coords;
    for c in coords.iter_mut().skip(1) {
        if rng.gen_bool(0.5) {
            *c = -c.clone();
        }
    }
    NSClass::new(coords).scale(&FieldElem::from_rational(positive_rational(rng)))
}

/// A pair in the positive cone sharing one quadratic field: interior points,
/// boundary points and positive multiples of each other, so that both the
/// strict and the equality cases of the reverse Cauchy-Schwarz inequality
/// come up.
pub fn sample_cone_pair<R: Rng + ?Sized>(l: &NSLattice, t: &Rational, rng: &mut R) -> Result<(NSClass, NSClass)> {
    let draw = |rng: &mut R| -> Result<NSClass> {
        if rng.gen_bool(0.5) {
            Ok(sample_interior(l, rng))
        } else {
            sample_boundary(l, t, rng)
        }
    };
    let x = draw(rng)?;
    let y = if rng.gen_bool(0.25) {
        x.scale(&FieldElem::from_rational(positive_rational(rng)))?
    } else {
        draw(rng)?
    };
    Ok((x, y))
}
