//! Slope-level model of vector bundles on a smooth projective curve.
//!
//! After a suitable finite cover and Frobenius pullback every bundle over
//! `F_p`-bar splits into line bundles, and on such a base a line bundle is
//! determined numerically by its degree. A [`SplitBundle`] is therefore just
//! the multiset of summand degrees; an [`HnProfile`] keeps only the graded
//! pieces of the strong Harder-Narasimhan filtration.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numbers::Rational;

/// Numerical invariants shared by every bundle representation.
pub trait BundleNumerics {
    fn rank(&self) -> u64;
    fn degree(&self) -> Rational;

    fn slope(&self) -> Rational {
        self.degree() / Rational::from_integer(BigInt::from(self.rank()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Curve {
    pub genus: u32,
    /// Characteristic of the base field; `0` or a prime.
    pub characteristic: u64,
    pub over_fpbar: bool,
}

impl Curve {
    pub fn new(genus: u32, characteristic: u64, over_fpbar: bool) -> Result<Self> {
        if characteristic != 0 && !is_prime(characteristic) {
            return Err(Error::InvalidInput(format!(
                "characteristic {characteristic} is neither 0 nor a prime"
            )));
        }
        if over_fpbar && characteristic == 0 {
            return Err(Error::InvalidInput(
                "a curve over F_p-bar needs a prime characteristic".into(),
            ));
        }
        Ok(Curve {
            genus,
            characteristic,
            over_fpbar,
        })
    }

    /// `deg(omega_C) = 2g - 2`.
    pub fn canonical_degree(&self) -> i64 {
        2 * i64::from(self.genus) - 2
    }

    fn prime(&self) -> Result<u64> {
        match self.characteristic {
            0 => Err(Error::CharZero),
            p => Ok(p),
        }
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut i = 2u64;
    while i.saturating_mul(i) <= n {
        if n.is_multiple_of(i) {
            return false;
        }
        i += 1;
    }
    true
}

/// Direct sum of line bundles, stored as degree -> multiplicity.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SplitBundle {
    summands: BTreeMap<i64, u64>,
}

impl SplitBundle {
    pub fn new(degrees: &[i64]) -> Result<Self> {
        if degrees.is_empty() {
            return Err(Error::InvalidInput("a split bundle needs at least one summand".into()));
        }
        let mut summands = BTreeMap::new();
        for &d in degrees {
            *summands.entry(d).or_insert(0) += 1;
        }
        Ok(SplitBundle { summands })
    }

    pub fn line(degree: i64) -> Self {
        SplitBundle {
            summands: BTreeMap::from([(degree, 1)]),
        }
    }

    fn from_counts(summands: BTreeMap<i64, u64>) -> Self {
        debug_assert!(summands.values().all(|&m| m > 0) && !summands.is_empty());
        SplitBundle { summands }
    }

    /// Summand degrees in descending order, repeated by multiplicity.
    pub fn degrees(&self) -> Vec<i64> {
        self.summands
            .iter()
            .rev()
            .flat_map(|(&d, &m)| std::iter::repeat_n(d, m as usize))
            .collect()
    }

    /// `(degree, multiplicity)` pairs in descending degree order.
    pub fn multiplicities(&self) -> impl Iterator<Item = (i64, u64)> + '_ {
        self.summands.iter().rev().map(|(&d, &m)| (d, m))
    }

    pub fn max_degree(&self) -> i64 {
        *self.summands.keys().next_back().expect("nonempty")
    }

    pub fn min_degree(&self) -> i64 {
        *self.summands.keys().next().expect("nonempty")
    }

    pub fn twist(&self, e: i64) -> Self {
        SplitBundle::from_counts(self.summands.iter().map(|(&d, &m)| (d + e, m)).collect())
    }
}

impl BundleNumerics for SplitBundle {
    fn rank(&self) -> u64 {
        self.summands.values().sum()
    }

    fn degree(&self) -> Rational {
        let total: i128 = self
            .summands
            .iter()
            .map(|(&d, &m)| i128::from(d) * i128::from(m))
            .sum();
        Rational::from_integer(BigInt::from(total))
    }
}

impl fmt::Debug for SplitBundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SplitBundle{:?}", self.degrees())
    }
}

/// One graded piece `E_i / E_{i-1}` of a Harder-Narasimhan filtration.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HnPiece {
    pub rank: u64,
    pub degree: Rational,
}

impl HnPiece {
    pub fn new(rank: u64, degree: Rational) -> Self {
        HnPiece { rank, degree }
    }

    pub fn slope(&self) -> Rational {
        &self.degree / Rational::from_integer(BigInt::from(self.rank))
    }
}

/// Graded pieces with strictly decreasing slopes.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HnProfile {
    pieces: Vec<HnPiece>,
}

impl HnProfile {
    pub fn new(pieces: Vec<HnPiece>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::InvalidInput("profile needs at least one piece".into()));
        }
        if let Some(p) = pieces.iter().find(|p| p.rank == 0) {
            return Err(Error::InvalidInput(format!("piece of degree {} has rank 0", p.degree)));
        }
        for (i, w) in pieces.windows(2).enumerate() {
            if w[0].slope() <= w[1].slope() {
                return Err(Error::InvalidInput(format!(
                    "slopes must strictly decrease: piece {} has slope {} and piece {} has slope {}",
                    i,
                    w[0].slope(),
                    i + 1,
                    w[1].slope()
                )));
            }
        }
        Ok(HnProfile { pieces })
    }

    pub fn pieces(&self) -> &[HnPiece] {
        &self.pieces
    }

    pub fn slopes(&self) -> Vec<Rational> {
        self.pieces.iter().map(HnPiece::slope).collect()
    }

    /// Slope of the maximal destabilizing piece `E_1`.
    pub fn mu_max(&self) -> Rational {
        self.pieces[0].slope()
    }

    /// Slope of the last quotient `E / E_{s-1}`.
    pub fn mu_min(&self) -> Rational {
        self.pieces[self.pieces.len() - 1].slope()
    }

    pub fn is_semistable(&self) -> bool {
        self.pieces.len() == 1
    }

    fn scale_degrees(&self, factor: &Rational) -> Self {
        HnProfile {
            pieces: self
                .pieces
                .iter()
                .map(|p| HnPiece::new(p.rank, &p.degree * factor))
                .collect(),
        }
    }
}

impl BundleNumerics for HnProfile {
    fn rank(&self) -> u64 {
        self.pieces.iter().map(|p| p.rank).sum()
    }

    fn degree(&self) -> Rational {
        self.pieces.iter().map(|p| p.degree.clone()).sum()
    }
}

/// Either representation as supplied by a caller.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Bundle {
    Split(SplitBundle),
    Hn(HnProfile),
}

impl Bundle {
    pub fn profile(&self) -> HnProfile {
        match self {
            Bundle::Split(e) => hn_profile(e),
            Bundle::Hn(p) => p.clone(),
        }
    }
}

impl BundleNumerics for Bundle {
    fn rank(&self) -> u64 {
        match self {
            Bundle::Split(e) => e.rank(),
            Bundle::Hn(p) => p.rank(),
        }
    }

    fn degree(&self) -> Rational {
        match self {
            Bundle::Split(e) => e.degree(),
            Bundle::Hn(p) => p.degree(),
        }
    }
}

/// For a split bundle the strong HN filtration groups equal-degree summands.
pub fn hn_profile(e: &SplitBundle) -> HnProfile {
    let pieces = e
        .multiplicities()
        .map(|(d, m)| HnPiece::new(m, Rational::from_integer(BigInt::from(d) * BigInt::from(m))))
        .collect();
    HnProfile::new(pieces).expect("distinct degrees give strictly decreasing slopes")
}

pub fn mu_max(p: &HnProfile) -> Rational {
    p.mu_max()
}

pub fn mu_min(p: &HnProfile) -> Rational {
    p.mu_min()
}

/// `Sym^m(E)` for `m >= 1`.
pub fn sym_power(e: &SplitBundle, m: u32) -> Result<SplitBundle> {
    if m == 0 {
        return Err(Error::InvalidInput("symmetric power exponent must be at least 1".into()));
    }
    Ok(sym_powers(e, m).pop().expect("m >= 1"))
}

/// `[Sym^1(E), ..., Sym^max_m(E)]` computed in one pass.
///
/// Multiplicities are coefficients of `prod_i 1/(1 - x t^{d_i})`, built one
/// summand at a time with the unbounded-knapsack recurrence
/// `new[k](t) = old[k](t) + t^{d_i} new[k-1](t)`.
pub fn sym_powers(e: &SplitBundle, max_m: u32) -> Vec<SplitBundle> {
    let lo = e.min_degree();
    let span = (e.max_degree() - lo) as usize;
    let max_m = max_m as usize;
    // table[k][j] = multiplicity of degree k*lo + j in Sym^k
    let mut table: Vec<Vec<u64>> = (0..=max_m).map(|k| vec![0; k * span + 1]).collect();
    table[0][0] = 1;
    for d in e.degrees() {
        let off = (d - lo) as usize;
        for k in 1..=max_m {
            let (done, rest) = table.split_at_mut(k);
            let prev = &done[k - 1];
            let cur = &mut rest[0];
            for (j, &c) in prev.iter().enumerate() {
                if c != 0 {
                    let slot = &mut cur[j + off];
                    *slot = slot.checked_add(c).expect("symmetric power multiplicity overflow");
                }
            }
        }
    }
    table
        .into_iter()
        .enumerate()
        .skip(1)
        .map(|(k, row)| {
            let base = k as i64 * lo;
            SplitBundle::from_counts(
                row.into_iter()
                    .enumerate()
                    .filter(|&(_, c)| c != 0)
                    .map(|(j, c)| (base + j as i64, c))
                    .collect(),
            )
        })
        .collect()
}

pub fn tensor(e: &SplitBundle, g: &SplitBundle) -> SplitBundle {
    let mut out = BTreeMap::new();
    for (a, ma) in e.multiplicities() {
        for (b, mb) in g.multiplicities() {
            *out.entry(a + b).or_insert(0) += ma * mb;
        }
    }
    SplitBundle::from_counts(out)
}

/// Pullback along a finite cover of degree `n`: degrees scale by `n`.
pub fn pullback_cover(p: &HnProfile, n: u64) -> Result<HnProfile> {
    if n == 0 {
        return Err(Error::InvalidInput("cover degree must be positive".into()));
    }
    Ok(p.scale_degrees(&Rational::from_integer(BigInt::from(n))))
}

/// Pullback by the `m`-th power of Frobenius: degrees scale by `p^m`.
pub fn frobenius_pullback(p: &HnProfile, m: u32, c: &Curve) -> Result<HnProfile> {
    let q = c.prime()?;
    Ok(p.scale_degrees(&Rational::from_integer(BigInt::from(q).pow(m))))
}

/// Least `m >= 0` with `p^m (mu_{i+1} - mu_i) + (2g - 2) < 0` for every
/// adjacent pair of pieces; at that Frobenius power the filtration splits.
pub fn splitting_frobenius_power(p: &HnProfile, c: &Curve) -> Result<u32> {
    let q = BigInt::from(c.prime()?);
    let slopes = p.slopes();
    if slopes.len() < 2 {
        return Ok(0);
    }
    let omega = Rational::from_integer(BigInt::from(c.canonical_degree()));
    let mut m = 0u32;
    let mut power = BigInt::one();
    loop {
        let factor = Rational::from_integer(power.clone());
        let ok = slopes
            .windows(2)
            .all(|w| (&factor * (&w[1] - &w[0]) + &omega).is_negative());
        if ok {
            return Ok(m);
        }
        m += 1;
        power *= &q;
    }
}

/// `H^0` of a split bundle on `P^1`: `sum_i max(d_i + 1, 0)`.
pub fn h0_genus0(e: &SplitBundle) -> u64 {
    e.multiplicities()
        .filter(|&(d, _)| d >= 0)
        .map(|(d, m)| (d as u64 + 1) * m)
        .sum()
}

/// Hypotheses of the symmetric-power vanishing criterion: every graded piece has
/// negative degree and the twisting bundle `g` has nonpositive degree.
pub fn sym_vanishing_holds(p: &HnProfile, g: &HnPiece) -> bool {
    p.pieces().iter().all(|piece| piece.degree.is_negative()) && !g.degree.is_positive()
}
