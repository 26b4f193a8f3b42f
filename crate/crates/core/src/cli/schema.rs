//! Scenario files and payload validation.
//!
//! Every value is reached through a [`Node`] that remembers its JSON pointer,
//! so a schema failure names the exact location that was rejected.

use std::fmt;
use std::path::Path;

use serde_json::{Map, Value};

use crate::bundle::{Curve, HnPiece, HnProfile, SplitBundle};
use crate::chow::DivClass;
use crate::numbers::{parse_rational, FieldElem, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kind {
    Classify,
    Hn,
    Frobsplit,
    Cone,
    Rationalize,
    Counterexample,
}

impl Kind {
    pub const ALL: [Kind; 6] = [
        Kind::Classify,
        Kind::Hn,
        Kind::Frobsplit,
        Kind::Cone,
        Kind::Rationalize,
        Kind::Counterexample,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Kind::Classify => "classify",
            Kind::Hn => "hn",
            Kind::Frobsplit => "frobsplit",
            Kind::Cone => "cone",
            Kind::Rationalize => "rationalize",
            Kind::Counterexample => "counterexample",
        }
    }

    fn from_name(s: &str) -> Option<Kind> {
        Kind::ALL.into_iter().find(|k| k.name() == s)
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchemaError {
    pub id: Option<String>,
    pub pointer: String,
    pub message: String,
}

impl fmt::Display for SchemaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let at = if self.pointer.is_empty() { "/" } else { &self.pointer };
        match &self.id {
            Some(id) => write!(f, "scenario {id:?} at {at}: {}", self.message),
            None => write!(f, "at {at}: {}", self.message),
        }
    }
}

impl std::error::Error for SchemaError {}

type Checked<T> = std::result::Result<T, SchemaError>;

/// A JSON value together with its pointer from the document root.
#[derive(Clone)]
struct Node<'a> {
    value: &'a Value,
    pointer: String,
}

fn escape(token: &str) -> String {
    token.replace('~', "~0").replace('/', "~1")
}

fn fail<T>(pointer: &str, message: impl Into<String>) -> Checked<T> {
    Err(SchemaError {
        id: None,
        pointer: pointer.to_string(),
        message: message.into(),
    })
}

fn type_name(v: &Value) -> &'static str {
    match v {
        Value::Null => "null",
        Value::Bool(_) => "boolean",
        Value::Number(_) => "number",
        Value::String(_) => "string",
        Value::Array(_) => "array",
        Value::Object(_) => "object",
    }
}

impl<'a> Node<'a> {
    fn root(value: &'a Value) -> Self {
        Node {
            value,
            pointer: String::new(),
        }
    }

    fn child(&self, value: &'a Value, token: &str) -> Self {
        Node {
            value,
            pointer: format!("{}/{}", self.pointer, escape(token)),
        }
    }

    fn object(&self) -> Checked<&'a Map<String, Value>> {
        match self.value {
            Value::Object(m) => Ok(m),
            other => fail(&self.pointer, format!("expected an object, found {}", type_name(other))),
        }
    }

    fn array(&self) -> Checked<&'a Vec<Value>> {
        match self.value {
            Value::Array(a) => Ok(a),
            other => fail(&self.pointer, format!("expected an array, found {}", type_name(other))),
        }
    }

    fn get(&self, key: &str) -> Checked<Option<Node<'a>>> {
        Ok(self.object()?.get(key).map(|v| self.child(v, key)))
    }

    fn u64(&self) -> Checked<u64> {
        self.value
            .as_u64()
            .map_or_else(|| fail(&self.pointer, "expected a nonnegative integer"), Ok)
    }

    fn i64(&self) -> Checked<i64> {
        self.value
            .as_i64()
            .map_or_else(|| fail(&self.pointer, "expected an integer"), Ok)
    }

    fn boolean(&self) -> Checked<bool> {
        self.value
            .as_bool()
            .map_or_else(|| fail(&self.pointer, "expected a boolean"), Ok)
    }

    fn string(&self) -> Checked<String> {
        self.value
            .as_str()
            .map(str::to_string)
            .map_or_else(|| fail(&self.pointer, "expected a string"), Ok)
    }

    /// Exact number written as a string; bare integers are accepted too.
    fn number_text(&self) -> Checked<String> {
        match self.value {
            Value::String(s) => Ok(s.clone()),
            Value::Number(n) if n.is_i64() || n.is_u64() => Ok(n.to_string()),
            Value::Number(_) => fail(
                &self.pointer,
                "floating-point numbers are not accepted; write exact values as strings",
            ),
            other => fail(&self.pointer, format!("expected a number string, found {}", type_name(other))),
        }
    }

    fn rational(&self) -> Checked<Rational> {
        let text = self.number_text()?;
        parse_rational(&text).or_else(|e| fail(&self.pointer, e.to_string()))
    }

    fn field(&self) -> Checked<FieldElem> {
        let text = self.number_text()?;
        text.parse().or_else(|e: crate::Error| fail(&self.pointer, e.to_string()))
    }
}

/// Visits each element of an array with its own pointer.
fn each<'a, T>(node: &Node<'a>, mut f: impl FnMut(&Node<'a>) -> Checked<T>) -> Checked<Vec<T>> {
    node.array()?
        .iter()
        .enumerate()
        .map(|(i, v)| f(&node.child(v, &i.to_string())))
        .collect()
}

fn required<'a, T>(node: &Node<'a>, key: &str, f: impl FnOnce(&Node<'a>) -> Checked<T>) -> Checked<T> {
    match node.get(key)? {
        Some(child) => f(&child),
        None => fail(&node.pointer, format!("missing field {key:?}")),
    }
}

fn optional<'a, T>(node: &Node<'a>, key: &str, f: impl FnOnce(&Node<'a>) -> Checked<T>) -> Checked<Option<T>> {
    node.get(key)?.map(|child| f(&child)).transpose()
}

fn only_keys(node: &Node<'_>, allowed: &[&str]) -> Checked<()> {
    for key in node.object()?.keys() {
        if !allowed.contains(&key.as_str()) {
            return fail(
                &format!("{}/{}", node.pointer, escape(key)),
                format!("unknown field {key:?}; expected one of {allowed:?}"),
            );
        }
    }
    Ok(())
}

/// A bundle is given either by the degrees of a split bundle or by its
/// Harder-Narasimhan pieces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BundleSpec {
    Split(Vec<i64>),
    Pieces(Vec<(u64, Rational)>),
}

impl BundleSpec {
    pub fn profile(&self) -> crate::Result<HnProfile> {
        match self {
            BundleSpec::Split(d) => Ok(crate::bundle::hn_profile(&SplitBundle::new(d)?)),
            BundleSpec::Pieces(p) => {
                HnProfile::new(p.iter().map(|(r, d)| HnPiece::new(*r, d.clone())).collect())
            }
        }
    }
}

fn bundle(node: &Node<'_>) -> Checked<BundleSpec> {
    let degrees = optional(node, "degrees", |n| each(n, Node::i64))?;
    let pieces = optional(node, "hn", |n| {
        each(n, |p| {
            only_keys(p, &["rank", "degree"])?;
            Ok((required(p, "rank", Node::u64)?, required(p, "degree", Node::rational)?))
        })
    })?;
    match (degrees, pieces) {
        (Some(d), None) => Ok(BundleSpec::Split(d)),
        (None, Some(p)) => Ok(BundleSpec::Pieces(p)),
        _ => fail(&node.pointer, "give exactly one of \"degrees\" or \"hn\""),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveSpec {
    pub genus: u32,
    pub characteristic: u64,
    pub over_fpbar: bool,
}

impl CurveSpec {
    pub fn curve(&self) -> crate::Result<Curve> {
        Curve::new(self.genus, self.characteristic, self.over_fpbar)
    }
}

fn curve(node: &Node<'_>) -> Checked<CurveSpec> {
    only_keys(node, &["genus", "characteristic", "over_fpbar"])?;
    let genus = required(node, "genus", Node::u64)?;
    let genus = u32::try_from(genus).or_else(|_| fail(&node.pointer, "genus out of range"))?;
    let characteristic = required(node, "characteristic", Node::u64)?;
    let over_fpbar = optional(node, "over_fpbar", Node::boolean)?.unwrap_or(characteristic != 0);
    Ok(CurveSpec {
        genus,
        characteristic,
        over_fpbar,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeSpec {
    pub rho: usize,
    pub anchor_square: u64,
    pub negatives: Vec<u64>,
}

fn lattice(node: &Node<'_>) -> Checked<LatticeSpec> {
    only_keys(node, &["rho", "anchor_square", "negatives", "gram"])?;
    if node.get("gram")?.is_some() {
        return fail(
            &format!("{}/gram", node.pointer),
            "only diagonal forms given by anchor_square and negatives are supported",
        );
    }
    let rho = required(node, "rho", Node::u64)? as usize;
    let anchor_square = required(node, "anchor_square", Node::u64)?;
    let negatives = required(node, "negatives", |n| each(n, Node::u64))?;
    Ok(LatticeSpec {
        rho,
        anchor_square,
        negatives,
    })
}

fn ns_class(node: &Node<'_>) -> Checked<Vec<FieldElem>> {
    only_keys(node, &["coords"])?;
    required(node, "coords", |n| each(n, Node::field))
}

/// Validated payload of one scenario.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Job {
    Classify {
        bundle: BundleSpec,
        class: Box<DivClass>,
        curve: CurveSpec,
    },
    Hn {
        bundle: BundleSpec,
        sym: Option<u32>,
        twist: i64,
    },
    Frobsplit {
        bundle: BundleSpec,
        curve: CurveSpec,
    },
    Cone {
        lattice: LatticeSpec,
        class: Vec<FieldElem>,
        decomposition: Option<(Vec<Vec<FieldElem>>, Vec<FieldElem>)>,
    },
    Rationalize {
        d_prime: Vec<Rational>,
        principals: Vec<Vec<Rational>>,
        coeffs: Vec<FieldElem>,
    },
    Counterexample {
        lattice: LatticeSpec,
        t: Rational,
    },
}

fn job(kind: Kind, node: &Node<'_>) -> Checked<Job> {
    match kind {
        Kind::Classify => {
            only_keys(node, &["bundle", "class", "curve"])?;
            let class = required(node, "class", |n| {
                only_keys(n, &["theta", "fiber"])?;
                Ok(DivClass::new(required(n, "theta", Node::field)?, required(n, "fiber", Node::field)?))
            })?;
            Ok(Job::Classify {
                bundle: required(node, "bundle", bundle)?,
                class: Box::new(class),
                curve: required(node, "curve", curve)?,
            })
        }
        Kind::Hn => {
            only_keys(node, &["bundle", "sym", "twist"])?;
            let sym = optional(node, "sym", Node::u64)?;
            let sym = match sym {
                Some(0) => return fail(&format!("{}/sym", node.pointer), "symmetric power must be at least 1"),
                Some(m) => Some(u32::try_from(m).or_else(|_| fail(&node.pointer, "sym out of range"))?),
                None => None,
            };
            Ok(Job::Hn {
                bundle: required(node, "bundle", bundle)?,
                sym,
                twist: optional(node, "twist", Node::i64)?.unwrap_or(0),
            })
        }
        Kind::Frobsplit => {
            only_keys(node, &["bundle", "curve"])?;
            Ok(Job::Frobsplit {
                bundle: required(node, "bundle", bundle)?,
                curve: required(node, "curve", curve)?,
            })
        }
        Kind::Cone => {
            only_keys(node, &["lattice", "class", "gammas", "c"])?;
            let gammas = optional(node, "gammas", |n| each(n, ns_class))?;
            let c = optional(node, "c", |n| each(n, Node::field))?;
            let decomposition = match (gammas, c) {
                (Some(g), Some(c)) => Some((g, c)),
                (None, None) => None,
                _ => return fail(&node.pointer, "\"gammas\" and \"c\" must be given together"),
            };
            Ok(Job::Cone {
                lattice: required(node, "lattice", lattice)?,
                class: required(node, "class", ns_class)?,
                decomposition,
            })
        }
        Kind::Rationalize => {
            only_keys(node, &["d_prime", "principals", "coeffs"])?;
            Ok(Job::Rationalize {
                d_prime: required(node, "d_prime", |n| each(n, Node::rational))?,
                principals: required(node, "principals", |n| each(n, |row| each(row, Node::rational)))?,
                coeffs: required(node, "coeffs", |n| each(n, Node::field))?,
            })
        }
        Kind::Counterexample => {
            only_keys(node, &["lattice", "t"])?;
            Ok(Job::Counterexample {
                lattice: required(node, "lattice", lattice)?,
                t: required(node, "t", Node::rational)?,
            })
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scenario {
    pub id: String,
    pub kind: Kind,
    pub job: Job,
}

/// Reads a JSON file, or TOML when the extension is `.toml`.
pub fn load_document(path: &Path) -> Checked<Value> {
    let text = std::fs::read_to_string(path).or_else(|e| fail("", format!("cannot read {}: {e}", path.display())))?;
    let is_toml = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("toml"));
    parse_document(&text, is_toml)
}

pub fn parse_document(text: &str, is_toml: bool) -> Checked<Value> {
    if is_toml {
        let table: toml::Table = toml::from_str(text).or_else(|e| fail("", format!("invalid TOML: {e}")))?;
        serde_json::to_value(table).or_else(|e| fail("", format!("unrepresentable TOML: {e}")))
    } else {
        serde_json::from_str(text).or_else(|e| fail("", format!("invalid JSON: {e}")))
    }
}

/// Accepts `{"scenarios": [{"id", "kind"?, "payload"}, ...]}` or a single
/// payload object. A scenario's `kind` must match the subcommand when given.
pub fn parse_scenarios(doc: &Value, kind: Kind) -> Checked<Vec<Scenario>> {
    let root = Node::root(doc);
    root.object()?;
    if root.get("scenarios")?.is_none() {
        return Ok(vec![Scenario {
            id: "0".into(),
            kind,
            job: job(kind, &root)?,
        }]);
    }
    only_keys(&root, &["scenarios"])?;
    let scenarios = required(&root, "scenarios", |list| each(list, |s| scenario(s, kind)))?;
    if scenarios.is_empty() {
        return fail("/scenarios", "no scenarios given");
    }
    let mut seen = std::collections::HashSet::new();
    for (i, s) in scenarios.iter().enumerate() {
        if !seen.insert(&s.id) {
            return Err(SchemaError {
                id: Some(s.id.clone()),
                pointer: format!("/scenarios/{i}/id"),
                message: "duplicate scenario id".into(),
            });
        }
    }
    Ok(scenarios)
}

fn scenario(s: &Node<'_>, kind: Kind) -> Checked<Scenario> {
    let id = required(s, "id", Node::string).map_err(|e| {
        let index = s.pointer.rsplit('/').next().unwrap_or_default();
        SchemaError {
            id: Some(format!("#{index}")),
            ..e
        }
    })?;
    let tagged = |e: SchemaError| SchemaError {
        id: Some(id.clone()),
        ..e
    };
    only_keys(s, &["id", "kind", "payload"]).map_err(tagged)?;
    if let Some(name) = optional(s, "kind", Node::string).map_err(tagged)? {
        let at = format!("{}/kind", s.pointer);
        match Kind::from_name(&name) {
            Some(k) if k == kind => {}
            Some(k) => return fail(&at, format!("scenario kind {k} does not match subcommand {kind}")).map_err(tagged),
            None => return fail(&at, format!("unknown kind {name:?}")).map_err(tagged),
        }
    }
    let job = required(s, "payload", |p| job(kind, p)).map_err(tagged)?;
    Ok(Scenario { id, kind, job })
}
