//! Runs validated scenarios and turns results into JSON values.

use rayon::prelude::*;
use serde_json::{json, Map, Value};

use super::schema::{BundleSpec, Job, LatticeSpec, Scenario};
use crate::bundle::{
    frobenius_pullback, h0_genus0, sym_power, splitting_frobenius_power, BundleNumerics, HnProfile, SplitBundle,
};
use crate::error::{Error, Result};
use crate::ns_cone::{
    build_counterexample, effective_decomposition_refuter, nef_membership, pairing, ray_is_rational,
    support_functional, NSClass, NSLattice,
};
use crate::positivity::classify;
use crate::rationalize::{fm_feasible, rationalize, zero_row_forcing, EffectivityInstance};

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub id: String,
    pub kind: &'static str,
    pub result: std::result::Result<Value, String>,
}

/// Evaluates independent scenarios in parallel; the output keeps input order.
pub fn run_all(scenarios: &[Scenario]) -> Vec<Outcome> {
    scenarios
        .par_iter()
        .map(|s| {
            log::debug!("running scenario {} ({})", s.id, s.kind);
            let result = execute(&s.job).map_err(|e| e.to_string());
            if let Err(e) = &result {
                log::info!("scenario {} failed: {e}", s.id);
            }
            Outcome {
                id: s.id.clone(),
                kind: s.kind.name(),
                result,
            }
        })
        .collect()
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

pub fn execute(job: &Job) -> Result<Value> {
    match job {
        Job::Classify { bundle, class, curve } => {
            let report = classify(class, &bundle.profile()?, &curve.curve()?)?;
            Ok(to_value(&report))
        }
        Job::Hn { bundle, sym, twist } => hn_report(bundle, *sym, *twist),
        Job::Frobsplit { bundle, curve } => {
            let profile = bundle.profile()?;
            let c = curve.curve()?;
            let m = splitting_frobenius_power(&profile, &c)?;
            let pulled = frobenius_pullback(&profile, m, &c)?;
            Ok(json!({
                "m": m,
                "p": c.characteristic,
                "pulled_back": profile_value(&pulled),
            }))
        }
        Job::Cone {
            lattice,
            class,
            decomposition,
        } => {
            let l = ns_lattice(lattice)?;
            let x = NSClass::new(class.clone());
            let square = pairing(&l, &x, &x)?;
            let degree = pairing(&l, &x, &l.basis(0))?;
            let mut out = Map::new();
            out.insert("square".into(), to_value(&square));
            out.insert("degree".into(), to_value(&degree));
            out.insert("nef".into(), Value::Bool(nef_membership(&l, &x)?));
            out.insert("boundary".into(), Value::Bool(support_functional(&l, &x).is_ok()));
            let ray = match ray_is_rational(&x) {
                Ok(b) => Value::Bool(b),
                Err(Error::ZeroClass) => Value::Null,
                Err(e) => return Err(e),
            };
            out.insert("ray_rational".into(), ray);
            if let Some((gammas, c)) = decomposition {
                let gammas: Vec<NSClass> = gammas.iter().cloned().map(NSClass::new).collect();
                let verdict = effective_decomposition_refuter(&l, &x, &gammas, c)?;
                out.insert("refuted".into(), Value::Bool(verdict.is_refuted()));
                out.insert("refutation".into(), to_value(&verdict));
            }
            Ok(Value::Object(out))
        }
        Job::Rationalize {
            d_prime,
            principals,
            coeffs,
        } => {
            let inst = EffectivityInstance::new(d_prime.clone(), principals.clone(), coeffs.clone())?;
            let forced = zero_row_forcing(&inst.normalized()?.instance)?;
            let values = rationalize(&inst)?;
            let after = inst.evaluate(&values);
            let feasible = fm_feasible(&inst.admissible_system()?);
            Ok(json!({
                "rationalized": values.iter().map(ToString::to_string).collect::<Vec<_>>(),
                "forced_slots": forced,
                "effective_after": after.iter().map(ToString::to_string).collect::<Vec<_>>(),
                "admissible": feasible.feasible,
                "admissible_witness": feasible.witness.map(|w| w.iter().map(ToString::to_string).collect::<Vec<_>>()),
            }))
        }
        Job::Counterexample { lattice, t } => {
            let l = ns_lattice(lattice)?;
            let c = build_counterexample(&l, t)?;
            let h = support_functional(&l, &c.class)?;
            Ok(json!({
                "class": to_value(&c.class),
                "certificate": to_value(&c.certificate),
                "functional_on_anchor": to_value(&h.apply(&l.basis(0))?),
            }))
        }
    }
}

fn ns_lattice(spec: &LatticeSpec) -> Result<NSLattice> {
    NSLattice::new(spec.rho, spec.anchor_square, spec.negatives.clone())
}

fn profile_value(p: &HnProfile) -> Value {
    let pieces: Vec<Value> = p
        .pieces()
        .iter()
        .map(|piece| {
            json!({
                "rank": piece.rank,
                "degree": piece.degree.to_string(),
                "slope": piece.slope().to_string(),
            })
        })
        .collect();
    json!({
        "rank": p.rank(),
        "degree": p.degree().to_string(),
        "pieces": pieces,
        "mu_max": p.mu_max().to_string(),
        "mu_min": p.mu_min().to_string(),
        "semistable": p.is_semistable(),
    })
}

fn hn_report(bundle: &BundleSpec, sym: Option<u32>, twist: i64) -> Result<Value> {
    let profile = bundle.profile()?;
    let mut out = match profile_value(&profile) {
        Value::Object(m) => m,
        _ => unreachable!(),
    };
    match bundle {
        BundleSpec::Split(degrees) => {
            let e = SplitBundle::new(degrees)?;
            let m = sym.unwrap_or(1);
            let s = sym_power(&e, m)?.twist(twist);
            let summands: Vec<Value> = s
                .multiplicities()
                .map(|(d, k)| json!({"degree": d, "multiplicity": k}))
                .collect();
            out.insert(
                "sym".into(),
                json!({
                    "m": m,
                    "twist": twist,
                    "rank": s.rank(),
                    "summands": summands,
                    "h0_genus0": h0_genus0(&s),
                }),
            );
        }
        BundleSpec::Pieces(_) if sym.is_some() || twist != 0 => {
            return Err(Error::InvalidInput(
                "symmetric powers and twists need a split bundle given by degrees".into(),
            ));
        }
        BundleSpec::Pieces(_) => {}
    }
    Ok(Value::Object(out))
}
