//! Built-in suites run by the `selftest` subcommand.
//!
//! Every suite is deterministic for a given seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bundle::{h0_genus0, hn_profile, sym_powers, sym_vanishing_holds, Curve, HnPiece, SplitBundle};
use crate::chow::DivClass;
use crate::ns_cone::{
    build_counterexample, nef_membership, pairing, proportional, ray_is_rational, sample_cone_pair,
    support_functional, NSLattice,
};
use crate::numbers::{FieldElem, Rational};
use crate::positivity::classify;
use crate::rationalize::{fm_feasible, rationalize, EffectivityInstance};

const KEPT_EXAMPLES: usize = 5;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Suite {
    pub name: &'static str,
    pub cases: u64,
    pub failures: u64,
    /// First few failing cases.
    pub examples: Vec<String>,
}

impl Suite {
    fn new(name: &'static str) -> Self {
        Suite {
            name,
            cases: 0,
            failures: 0,
            examples: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            if self.examples.len() < KEPT_EXAMPLES {
                self.examples.push(describe());
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub seed: u64,
    pub suites: Vec<Suite>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(|s| s.failures == 0)
    }
}

pub fn run(seed: u64) -> Report {
    Report {
        seed,
        suites: vec![
            genus0_equivalence(),
            vanishing(),
            cone_properties(seed),
            rationalizer(seed),
        ],
    }
}

/// Nondecreasing degree lists of the given length within `[lo, hi]`.
fn split_bundles(rank: usize, lo: i64, hi: i64) -> Vec<Vec<i64>> {
    if rank == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for tail in split_bundles(rank - 1, lo, hi) {
        let start = tail.last().copied().unwrap_or(lo);
        for d in start..=hi {
            let mut v = tail.clone();
            v.push(d);
            out.push(v);
        }
    }
    out
}

/// Over `P^1`: `Θ - aF` is `Q`-effective iff `Sym^q E (-u)` has a section,
/// for `a = u/q`; classes that are not pseudo-effective have no sections on
/// any multiple; nef iff `a` is at most the minimal degree.
fn genus0_equivalence() -> Suite {
    let mut suite = Suite::new("genus0_equivalence");
    let curve = Curve::new(0, 3, true).expect("valid curve");
    const MULTIPLES: u32 = 5;
    for rank in 1..=3 {
        for degrees in split_bundles(rank, -2, 2) {
            let e = SplitBundle::new(&degrees).expect("nonempty");
            let profile = hn_profile(&e);
            for q in 1..=3i64 {
                let powers = sym_powers(&e, (q as u32) * MULTIPLES);
                for u in -3 * q..=3 * q {
                    let a = Rational::new(u.into(), q.into());
                    let report = classify(&DivClass::theta_minus(a.clone()), &profile, &curve)
                        .expect("rational class over a finite field");
                    let sections = h0_genus0(&powers[q as usize - 1].twist(-u)) > 0;
                    suite.check(report.is_q_effective == Some(sections), || {
                        format!("E={degrees:?} a={a}: q_effective {:?}, h0>0 {sections}", report.is_q_effective)
                    });
                    if !report.is_pseudoeffective {
                        let silent = (1..=MULTIPLES as i64)
                            .all(|j| h0_genus0(&powers[(j * q) as usize - 1].twist(-j * u)) == 0);
                        suite.check(silent, || format!("E={degrees:?} a={a}: sections on a multiple"));
                    }
                    let nef = a <= Rational::from_integer(e.min_degree().into());
                    suite.check(report.is_nef == nef, || format!("E={degrees:?} a={a}: nef {}", report.is_nef));
                }
            }
        }
    }
    suite
}

/// `H^0(Sym^m E ⊗ G) = 0` whenever every slope of `E` and the degree of `G`
/// are negative.
fn vanishing() -> Suite {
    let mut suite = Suite::new("negative_slope_vanishing");
    for rank in 1..=3 {
        for degrees in split_bundles(rank, -3, -1) {
            let e = SplitBundle::new(&degrees).expect("nonempty");
            let powers = sym_powers(&e, 4);
            for g in -2..=0i64 {
                let line = HnPiece::new(1, Rational::from_integer(g.into()));
                suite.check(sym_vanishing_holds(&hn_profile(&e), &line), || {
                    format!("E={degrees:?} G={g}: predicate false")
                });
                for (i, s) in powers.iter().enumerate() {
                    suite.check(h0_genus0(&s.twist(g)) == 0, || {
                        format!("E={degrees:?} G={g} m={}: sections", i + 1)
                    });
                }
            }
        }
    }
    suite
}

fn cone_properties(seed: u64) -> Suite {
    let mut suite = Suite::new("cone_properties");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lattices = [
        NSLattice::new(3, 2, vec![1, 1]).expect("valid"),
        NSLattice::new(3, 2, vec![2, 1]).expect("valid"),
        NSLattice::new(4, 2, vec![1, 3, 2]).expect("valid"),
    ];
    let t = Rational::new(1.into(), 2.into());
    for l in &lattices {
        let c = build_counterexample(l, &t).expect("t = 1/2 is admissible");
        let square = pairing(l, &c.class, &c.class).expect("same dimension");
        suite.check(square.is_zero(), || format!("counterexample square {square}"));
        suite.check(nef_membership(l, &c.class).unwrap_or(false), || "counterexample not nef".into());
        suite.check(!ray_is_rational(&c.class).unwrap_or(true), || "counterexample ray rational".into());
        let h = support_functional(l, &c.class).expect("boundary class");
        for _ in 0..200 {
            let (x, y) = sample_cone_pair(l, &t, &mut rng).expect("sampling");
            let p = pairing(l, &x, &y).expect("same field");
            suite.check(p.sign() >= 0, || format!("{x:?} . {y:?} = {p}"));
            if p.is_zero() {
                suite.check(proportional(&x, &y).unwrap_or(false), || format!("{x:?} . {y:?} = 0"));
            }
            let sum = x.try_add(&y).expect("same field");
            suite.check(nef_membership(l, &sum).unwrap_or(false), || format!("{x:?} + {y:?} not nef"));
            let hx = h.apply(&x).expect("same field");
            suite.check(hx.sign() >= 0, || format!("H({x:?}) = {hx}"));
            let on_ray = proportional(&x, &c.class).expect("same dimension");
            suite.check(hx.is_zero() == on_ray, || format!("H({x:?}) = {hx}, on ray {on_ray}"));
        }
    }
    suite
}

fn rationalizer(seed: u64) -> Suite {
    let mut suite = Suite::new("rationalizer");
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let fields = [
        FieldElem::sqrt_rational(&Rational::from_integer(2.into())).expect("sqrt 2"),
        FieldElem::sqrt_rational(&Rational::from_integer(7.into())).expect("sqrt 7"),
    ];
    for i in 0..60 {
        let root = &fields[i % 2];
        let slots = rng.gen_range(1..=6usize);
        let r = rng.gen_range(1..=3usize);
        let coeffs: Vec<FieldElem> = (0..r)
            .map(|_| {
                let a = Rational::new(rng.gen_range(-4..=4i64).into(), rng.gen_range(1..=3i64).into());
                let b = Rational::new(rng.gen_range(1..=4i64).into(), rng.gen_range(1..=3i64).into());
                &FieldElem::from_rational(a) + &root.scale(&b)
            })
            .collect();
        let principals: Vec<Vec<Rational>> = (0..r)
            .map(|_| (0..slots).map(|_| Rational::from_integer(rng.gen_range(-3..=3i64).into())).collect())
            .collect();
        let d_prime: Vec<Rational> = (0..slots)
            .map(|k| {
                let partial = coeffs
                    .iter()
                    .zip(&principals)
                    .fold(FieldElem::zero(), |acc, (a, p)| &acc + &a.scale(&p[k]));
                Rational::from_integer(-partial.floor() + rng.gen_range(0..=2i64))
            })
            .collect();
        let inst = match EffectivityInstance::new(d_prime, principals, coeffs) {
            Ok(inst) => inst,
            Err(e) => {
                suite.check(false, || format!("instance {i}: {e}"));
                continue;
            }
        };
        match rationalize(&inst) {
            Ok(values) => {
                let ok = inst.evaluate(&values).iter().all(|v| *v >= Rational::from_integer(0.into()));
                suite.check(ok, || format!("instance {i}: {values:?} fails"));
                let sys = inst.admissible_system().expect("nonempty");
                suite.check(fm_feasible(&sys).feasible, || format!("instance {i}: region empty"));
            }
            Err(e) => suite.check(false, || format!("instance {i}: {e}")),
        }
    }
    suite
}
