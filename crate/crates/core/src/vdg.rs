//! Value dependency graph and the knapsack instance wrapping it.
//!
//! A [`Vdg`] stores, for every ordered pair of elements `(i, j)`, the quality
//! (sign) and strength of the explicit dependency of `e_i`'s value on the
//! selection of `e_j`. Strength `0` and [`Quality::NonSpecified`] go together
//! and mean "no explicit dependency".
//!
//! Construction does not enforce the graph invariants so that malformed
//! input can be inspected; [`validate`] reports every violation.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::numfmt::round_sig;

/// Sign of a dependency.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quality {
    Positive,
    Negative,
    /// No explicit dependency between the pair.
    NonSpecified,
}

impl Quality {
    /// Sign product. `NonSpecified` absorbs.
    pub fn compose(self, other: Quality) -> Quality {
        use Quality::*;
        match (self, other) {
            (NonSpecified, _) | (_, NonSpecified) => NonSpecified,
            (Positive, Positive) | (Negative, Negative) => Positive,
            _ => Negative,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Quality::Positive => "+",
            Quality::Negative => "-",
            Quality::NonSpecified => "±",
        }
    }
}

impl fmt::Display for Quality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// One explicit dependency: the value of `from` depends on selecting `to`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub quality: Quality,
    pub strength: f64,
}

impl Edge {
    pub fn new(from: usize, to: usize, quality: Quality, strength: f64) -> Self {
        Self {
            from,
            to,
            quality,
            strength,
        }
    }
}

/// Errors raised while assembling a graph or instance from parts.
#[derive(Debug, Error, PartialEq)]
pub enum VdgError {
    #[error("matrix length {got} does not match {n}x{n}")]
    MatrixSize { n: usize, got: usize },
    #[error("edge ({from}, {to}) references a node outside 0..{n}")]
    OutOfRange { from: usize, to: usize, n: usize },
    #[error("more than one explicit dependency for pair ({from}, {to})")]
    DuplicatePair { from: usize, to: usize },
}

/// Signed directed fuzzy graph over the index space `0..n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Vdg {
    n: usize,
    sigma: Vec<Quality>,
    rho: Vec<f64>,
}

impl Vdg {
    /// Graph on `n` nodes without dependencies.
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            sigma: vec![Quality::NonSpecified; n * n],
            rho: vec![0.0; n * n],
        }
    }

    /// Builds a graph from row-major `n x n` quality and strength matrices.
    /// Only the shapes are checked.
    pub fn from_matrices(n: usize, sigma: Vec<Quality>, rho: Vec<f64>) -> Result<Self, VdgError> {
        for len in [sigma.len(), rho.len()] {
            if len != n * n {
                return Err(VdgError::MatrixSize { n, got: len });
            }
        }
        Ok(Self { n, sigma, rho })
    }

    /// Builds a graph from an edge list. At most one edge per ordered pair.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = Edge>) -> Result<Self, VdgError> {
        let mut g = Self::empty(n);
        let mut seen = HashSet::new();
        for e in edges {
            if e.from >= n || e.to >= n {
                return Err(VdgError::OutOfRange {
                    from: e.from,
                    to: e.to,
                    n,
                });
            }
            if !seen.insert((e.from, e.to)) {
                return Err(VdgError::DuplicatePair {
                    from: e.from,
                    to: e.to,
                });
            }
            let k = e.from * n + e.to;
            g.sigma[k] = e.quality;
            g.rho[k] = e.strength;
        }
        Ok(g)
    }

    /// Number of nodes.
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn quality(&self, i: usize, j: usize) -> Quality {
        self.sigma[i * self.n + j]
    }

    pub fn strength(&self, i: usize, j: usize) -> f64 {
        self.rho[i * self.n + j]
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.strength(i, j) != 0.0
    }

    /// All pairs with nonzero strength, ascending by `from` then `to`.
    pub fn explicit_edges(&self) -> Vec<Edge> {
        let n = self.n;
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| self.has_edge(i, j))
            .map(|(i, j)| Edge::new(i, j, self.quality(i, j), self.strength(i, j)))
            .collect()
    }

    /// Outgoing explicit edges of `i`, ascending by target.
    pub fn successors(&self, i: usize) -> impl Iterator<Item = (usize, Quality, f64)> + '_ {
        (0..self.n)
            .filter(move |&j| self.has_edge(i, j))
            .map(move |j| (j, self.quality(i, j), self.strength(i, j)))
    }
}

/// A knapsack element. `value` is `v_i`, `weight` is `w_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    pub id: String,
    pub value: f64,
    pub weight: f64,
}

impl Element {
    pub fn new(id: impl Into<String>, value: f64, weight: f64) -> Self {
        Self {
            id: id.into(),
            value,
            weight,
        }
    }
}

/// Elements, knapsack capacity and the dependency graph over the elements.
///
/// Node `k` of the graph is element `k`; ids are only used for I/O.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    elements: Vec<Element>,
    capacity: f64,
    vdg: Vdg,
}

impl Instance {
    /// Assembles an instance without checking it; see [`validate`].
    pub fn new(elements: Vec<Element>, capacity: f64, vdg: Vdg) -> Self {
        Self {
            elements,
            capacity,
            vdg,
        }
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn capacity(&self) -> f64 {
        self.capacity
    }

    pub fn vdg(&self) -> &Vdg {
        &self.vdg
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.elements.iter().position(|e| e.id == id)
    }

    /// Parses the JSON interchange format.
    pub fn from_json(text: &str) -> Result<Self, InstanceError> {
        let doc: InstanceDoc = serde_json::from_str(text)?;
        doc.into_instance()
    }

    /// Writes the JSON interchange format with numbers at 12 significant digits.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&InstanceDoc::from(self)).expect("instance serializes")
    }
}

/// One broken invariant of an instance.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    StrengthOutOfRange { from: usize, to: usize, strength: f64 },
    /// Strength zero with an explicit sign, or nonzero strength without one.
    SignStrengthMismatch { from: usize, to: usize, quality: Quality, strength: f64 },
    SelfDependency { node: usize },
    NegativeValue { id: String, value: f64 },
    NegativeWeight { id: String, weight: f64 },
    NegativeCapacity { capacity: f64 },
    DuplicateId { id: String },
    NodeCountMismatch { elements: usize, nodes: usize },
    /// A dependency names an id that is not an element.
    DanglingEdge { from: String, to: String },
    /// Two dependencies for the same ordered pair.
    DuplicatePair { from: String, to: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            StrengthOutOfRange { from, to, strength } => {
                write!(f, "pair ({from}, {to}): strength {strength} outside [0, 1]")
            }
            SignStrengthMismatch {
                from,
                to,
                quality,
                strength,
            } => write!(
                f,
                "pair ({from}, {to}): quality {quality} inconsistent with strength {strength} \
                 (strength is 0 exactly when quality is non-specified)"
            ),
            SelfDependency { node } => write!(f, "node {node} depends on itself"),
            NegativeValue { id, value } => write!(f, "element {id}: negative value {value}"),
            NegativeWeight { id, weight } => write!(f, "element {id}: negative weight {weight}"),
            NegativeCapacity { capacity } => write!(f, "negative capacity {capacity}"),
            DuplicateId { id } => write!(f, "duplicate element id {id}"),
            NodeCountMismatch { elements, nodes } => {
                write!(f, "{elements} elements but graph has {nodes} nodes")
            }
            DanglingEdge { from, to } => {
                write!(f, "dependency {from} -> {to} references an unknown element")
            }
            DuplicatePair { from, to } => {
                write!(f, "more than one dependency {from} -> {to}")
            }
        }
    }
}

/// Returns every invariant violation of `instance`; empty means valid.
pub fn validate(instance: &Instance) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut ids = HashSet::new();
    for e in &instance.elements {
        if !ids.insert(e.id.as_str()) {
            out.push(Violation::DuplicateId { id: e.id.clone() });
        }
        if !e.value.is_finite() || e.value < 0.0 {
            out.push(Violation::NegativeValue {
                id: e.id.clone(),
                value: e.value,
            });
        }
        if !e.weight.is_finite() || e.weight < 0.0 {
            out.push(Violation::NegativeWeight {
                id: e.id.clone(),
                weight: e.weight,
            });
        }
    }
    if instance.capacity.is_nan() || instance.capacity < 0.0 {
        out.push(Violation::NegativeCapacity {
            capacity: instance.capacity,
        });
    }
    let g = &instance.vdg;
    if g.len() != instance.elements.len() {
        out.push(Violation::NodeCountMismatch {
            elements: instance.elements.len(),
            nodes: g.len(),
        });
    }
    for i in 0..g.len() {
        for j in 0..g.len() {
            let (q, s) = (g.quality(i, j), g.strength(i, j));
            if i == j {
                if s != 0.0 || q != Quality::NonSpecified {
                    out.push(Violation::SelfDependency { node: i });
                }
                continue;
            }
            if !(0.0..=1.0).contains(&s) {
                out.push(Violation::StrengthOutOfRange {
                    from: i,
                    to: j,
                    strength: s,
                });
            } else if (s == 0.0) != (q == Quality::NonSpecified) {
                out.push(Violation::SignStrengthMismatch {
                    from: i,
                    to: j,
                    quality: q,
                    strength: s,
                });
            }
        }
    }
    out
}

/// Errors from reading an instance.
#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("malformed instance JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid instance: {}", join_violations(.0))]
    Invalid(Vec<Violation>),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

/// Serialized form of an instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDoc {
    pub elements: Vec<ElementDoc>,
    #[serde(serialize_with = "ser_num")]
    pub capacity: f64,
    #[serde(default)]
    pub dependencies: Vec<DependencyDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementDoc {
    pub id: String,
    #[serde(serialize_with = "ser_num")]
    pub value: f64,
    #[serde(serialize_with = "ser_num")]
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DependencyDoc {
    pub from: String,
    pub to: String,
    pub quality: SignDoc,
    #[serde(serialize_with = "ser_num", deserialize_with = "de_strength")]
    pub strength: f64,
}

/// Explicit dependency sign as written in JSON. The typographic minus is
/// accepted on input; output always uses `-`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SignDoc {
    #[serde(rename = "+")]
    Positive,
    #[serde(rename = "-", alias = "−")]
    Negative,
}

fn ser_num<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(round_sig(*x))
}

fn de_strength<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    let s = f64::deserialize(d)?;
    if s > 0.0 && s <= 1.0 {
        Ok(s)
    } else {
        Err(serde::de::Error::custom(format!(
            "strength {s} outside (0, 1]"
        )))
    }
}

impl InstanceDoc {
    /// Problems that prevent mapping the document onto graph indices.
    pub fn structural_violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut index = HashMap::new();
        for (k, e) in self.elements.iter().enumerate() {
            if index.insert(e.id.as_str(), k).is_some() {
                out.push(Violation::DuplicateId { id: e.id.clone() });
            }
        }
        let mut pairs = HashSet::new();
        for d in &self.dependencies {
            if !index.contains_key(d.from.as_str()) || !index.contains_key(d.to.as_str()) {
                out.push(Violation::DanglingEdge {
                    from: d.from.clone(),
                    to: d.to.clone(),
                });
            } else if !pairs.insert((d.from.as_str(), d.to.as_str())) {
                out.push(Violation::DuplicatePair {
                    from: d.from.clone(),
                    to: d.to.clone(),
                });
            }
        }
        out
    }

    /// Maps ids to indices. Fails on the structural violations only; value
    /// level problems (negative weights, self loops, ...) are left for
    /// [`validate`].
    pub fn into_instance(self) -> Result<Instance, InstanceError> {
        let v = self.structural_violations();
        if !v.is_empty() {
            return Err(InstanceError::Invalid(v));
        }
        let index: HashMap<&str, usize> = self
            .elements
            .iter()
            .enumerate()
            .map(|(k, e)| (e.id.as_str(), k))
            .collect();
        let edges = self.dependencies.iter().map(|d| {
            let quality = match d.quality {
                SignDoc::Positive => Quality::Positive,
                SignDoc::Negative => Quality::Negative,
            };
            Edge::new(index[d.from.as_str()], index[d.to.as_str()], quality, d.strength)
        });
        let vdg = Vdg::from_edges(self.elements.len(), edges)
            .expect("indices and pairs checked above");
        let elements = self
            .elements
            .into_iter()
            .map(|e| Element::new(e.id, e.value, e.weight))
            .collect();
        Ok(Instance::new(elements, self.capacity, vdg))
    }
}

impl From<&Instance> for InstanceDoc {
    fn from(inst: &Instance) -> Self {
        let elements = inst
            .elements
            .iter()
            .map(|e| ElementDoc {
                id: e.id.clone(),
                value: e.value,
                weight: e.weight,
            })
            .collect();
        let dependencies = inst
            .vdg
            .explicit_edges()
            .into_iter()
            .filter(|e| e.from < inst.len() && e.to < inst.len())
            .map(|e| DependencyDoc {
                from: inst.elements[e.from].id.clone(),
                to: inst.elements[e.to].id.clone(),
                quality: match e.quality {
                    Quality::Negative => SignDoc::Negative,
                    _ => SignDoc::Positive,
                },
                strength: e.strength,
            })
            .collect();
        InstanceDoc {
            elements,
            capacity: inst.capacity,
            dependencies,
        }
    }
}
