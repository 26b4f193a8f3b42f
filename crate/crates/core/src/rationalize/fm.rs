//! Fourier-Motzkin feasibility over an exact ordered field.
//!
//! Strict rows carry a flag through elimination instead of being shifted by
//! an epsilon.

use std::collections::HashSet;
use std::fmt;
use std::hash::Hash;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numbers::{FieldElem, Rational};

/// Exact ordered-field operations used by the eliminator.
///
/// The `FieldElem` instance panics when two different radicands meet; a
/// system must live in a single field.
pub trait Scalar: Clone + PartialEq + Eq + Hash + fmt::Debug + fmt::Display {
    fn zero() -> Self;
    fn from_int(n: i64) -> Self;
    fn sign(&self) -> i8;
    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn over(&self, other: &Self) -> Self;
}

impl Scalar for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn from_int(n: i64) -> Self {
        Rational::from_integer(n.into())
    }
    fn sign(&self) -> i8 {
        if self.is_positive() {
            1
        } else if self.is_negative() {
            -1
        } else {
            0
        }
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn over(&self, other: &Self) -> Self {
        self / other
    }
}

impl Scalar for FieldElem {
    fn zero() -> Self {
        FieldElem::zero()
    }
    fn from_int(n: i64) -> Self {
        FieldElem::from_int(n)
    }
    fn sign(&self) -> i8 {
        FieldElem::sign(self)
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn over(&self, other: &Self) -> Self {
        self / other
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Relation {
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = ">")]
    Gt,
}

/// `coeffs . x  (>= | >)  bound`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Row<T = Rational> {
    pub coeffs: Vec<T>,
    pub relation: Relation,
    pub bound: T,
}

impl<T: Scalar> Row<T> {
    pub fn ge(coeffs: Vec<T>, bound: T) -> Self {
        Row {
            coeffs,
            relation: Relation::Ge,
            bound,
        }
    }

    pub fn gt(coeffs: Vec<T>, bound: T) -> Self {
        Row {
            coeffs,
            relation: Relation::Gt,
            bound,
        }
    }

    pub fn holds_at(&self, x: &[T]) -> bool {
        let lhs = self
            .coeffs
            .iter()
            .zip(x)
            .fold(T::zero(), |acc, (c, v)| acc.plus(&c.times(v)));
        satisfied(self.relation, &lhs.minus(&self.bound))
    }

    fn is_constant(&self) -> bool {
        self.coeffs.iter().all(|c| c.sign() == 0)
    }

    /// Divides by the absolute value of the first nonzero coefficient.
    fn normalized(mut self) -> Self {
        if let Some(lead) = self.coeffs.iter().find(|c| c.sign() != 0).cloned() {
            let scale = if lead.sign() < 0 {
                T::zero().minus(&lead)
            } else {
                lead
            };
            for c in &mut self.coeffs {
                *c = c.over(&scale);
            }
            self.bound = self.bound.over(&scale);
        }
        self
    }
}

fn satisfied<T: Scalar>(rel: Relation, slack: &T) -> bool {
    match rel {
        Relation::Ge => slack.sign() >= 0,
        Relation::Gt => slack.sign() > 0,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearSystem<T = Rational> {
    vars: usize,
    rows: Vec<Row<T>>,
}

impl<T: Scalar> LinearSystem<T> {
    pub fn new(rows: Vec<Row<T>>) -> Result<Self> {
        let first = rows
            .first()
            .ok_or_else(|| Error::InvalidInput("linear system has no rows".into()))?;
        let vars = first.coeffs.len();
        for row in &rows {
            if row.coeffs.len() != vars {
                return Err(Error::DimensionMismatch {
                    expected: vars,
                    actual: row.coeffs.len(),
                });
            }
        }
        Ok(LinearSystem { vars, rows })
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn rows(&self) -> &[Row<T>] {
        &self.rows
    }

    pub fn is_satisfied_by(&self, x: &[T]) -> bool {
        x.len() == self.vars && self.rows.iter().all(|r| r.holds_at(x))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Feasibility<T = Rational> {
    pub feasible: bool,
    pub witness: Option<Vec<T>>,
}

/// Decides feasibility exactly and, when feasible, returns a point.
///
/// Back-substitution prefers `0`, then a closed bound, then a midpoint, then
/// one unit inside an open half-line.
pub fn fm_feasible<T: Scalar>(sys: &LinearSystem<T>) -> Feasibility<T> {
    let n = sys.vars;
    // stages[k] mentions only x_0 .. x_{k-1}
    let mut stages: Vec<Vec<Row<T>>> = vec![Vec::new(); n + 1];
    stages[n] = dedup(sys.rows.iter().cloned().map(Row::normalized));
    for k in (0..n).rev() {
        let (mut keep, mut pos, mut neg) = (Vec::new(), Vec::new(), Vec::new());
        for row in &stages[k + 1] {
            match row.coeffs[k].sign() {
                0 => keep.push(row.clone()),
                s if s > 0 => pos.push(row),
                _ => neg.push(row),
            }
        }
        for p in &pos {
            for q in &neg {
                keep.push(combine(p, q, k));
            }
        }
        stages[k] = dedup(keep.into_iter().map(Row::normalized));
        if stages[k].iter().any(|r| r.is_constant() && !r.holds_at(&[])) {
            return Feasibility {
                feasible: false,
                witness: None,
            };
        }
    }
    if !stages[0].iter().all(|r| r.holds_at(&vec![T::zero(); n])) {
        return Feasibility {
            feasible: false,
            witness: None,
        };
    }

    let mut x: Vec<T> = Vec::with_capacity(n);
    for k in 0..n {
        let mut lo: Option<(T, bool)> = None;
        let mut hi: Option<(T, bool)> = None;
        for row in &stages[k + 1] {
            let c = &row.coeffs[k];
            if c.sign() == 0 {
                continue;
            }
            let rest = (0..k).fold(T::zero(), |acc, i| acc.plus(&row.coeffs[i].times(&x[i])));
            let value = row.bound.minus(&rest).over(c);
            let strict = row.relation == Relation::Gt;
            if c.sign() > 0 {
                tighten(&mut lo, value, strict, 1);
            } else {
                tighten(&mut hi, value, strict, -1);
            }
        }
        x.push(pick(lo, hi));
    }
    assert!(sys.is_satisfied_by(&x), "eliminator produced a non-witness");
    Feasibility {
        feasible: true,
        witness: Some(x),
    }
}

fn dedup<T: Scalar>(rows: impl Iterator<Item = Row<T>>) -> Vec<Row<T>> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for row in rows {
        // constant rows that hold carry no information
        if row.is_constant() && row.holds_at(&[]) {
            continue;
        }
        if seen.insert(row.clone()) {
            out.push(row);
        }
    }
    out
}

/// Positive combination of `p` (coefficient of `x_k` > 0) and `q` (< 0)
/// cancelling `x_k`.
fn combine<T: Scalar>(p: &Row<T>, q: &Row<T>, k: usize) -> Row<T> {
    let wp = T::zero().minus(&q.coeffs[k]);
    let wq = p.coeffs[k].clone();
    let coeffs = p
        .coeffs
        .iter()
        .zip(&q.coeffs)
        .map(|(a, b)| wp.times(a).plus(&wq.times(b)))
        .collect();
    let relation = if p.relation == Relation::Gt || q.relation == Relation::Gt {
        Relation::Gt
    } else {
        Relation::Ge
    };
    Row {
        coeffs,
        relation,
        bound: wp.times(&p.bound).plus(&wq.times(&q.bound)),
    }
}

/// Keeps the tighter of two bounds; `dir = 1` for lower, `-1` for upper.
fn tighten<T: Scalar>(slot: &mut Option<(T, bool)>, value: T, strict: bool, dir: i8) {
    match slot {
        None => *slot = Some((value, strict)),
        Some((cur, cur_strict)) => {
            let s = value.minus(cur).sign() * dir;
            if s > 0 {
                *slot = Some((value, strict));
            } else if s == 0 {
                *cur_strict |= strict;
            }
        }
    }
}

fn pick<T: Scalar>(lo: Option<(T, bool)>, hi: Option<(T, bool)>) -> T {
    let zero = T::zero();
    let above = |b: &Option<(T, bool)>, v: &T| match b {
        None => true,
        Some((l, strict)) => satisfied(if *strict { Relation::Gt } else { Relation::Ge }, &v.minus(l)),
    };
    let below = |b: &Option<(T, bool)>, v: &T| match b {
        None => true,
        Some((h, strict)) => satisfied(if *strict { Relation::Gt } else { Relation::Ge }, &h.minus(v)),
    };
    if above(&lo, &zero) && below(&hi, &zero) {
        return zero;
    }
    match (lo, hi) {
        (Some((l, false)), _) => l,
        (_, Some((h, false))) => h,
        (Some((l, _)), Some((h, _))) => l.plus(&h).over(&T::from_int(2)),
        (Some((l, _)), None) => l.plus(&T::from_int(1)),
        (None, Some((h, _))) => h.minus(&T::from_int(1)),
        (None, None) => zero,
    }
}
