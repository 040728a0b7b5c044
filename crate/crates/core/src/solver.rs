//! Exact solvers for the dependency-aware knapsack and a seeded instance
//! generator.
//!
//! Once `x` is fixed the objective is evaluated directly from the influence
//! matrix, so both solvers search over selections only.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::influence::InfluenceMatrix;
use crate::penalty::{evaluate, penalty_term, DimensionMismatch, PenaltyVector, Selection};
use crate::vdg::{Edge, Element, Instance, Quality, Vdg};

/// Largest instance [`solve_exhaustive`] accepts by default.
pub const DEFAULT_EXHAUSTIVE_CAP: usize = 20;

#[derive(Debug, Error, PartialEq)]
pub enum SolveError {
    #[error("exhaustive search is capped at {cap} elements, instance has {n}; use branch-and-bound")]
    TooLarge { n: usize, cap: usize },
    #[error(transparent)]
    Dimension(#[from] DimensionMismatch),
}

/// How optimality was established.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Proof {
    /// Every other subtree was pruned by a valid upper bound.
    Optimal,
    /// Every selection was evaluated.
    SearchExhausted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub selection: Selection,
    pub objective: f64,
    pub penalties: PenaltyVector,
    pub total_weight: f64,
    pub nodes_explored: u64,
    pub proof: Proof,
}

fn finish(
    instance: &Instance,
    influence: &InfluenceMatrix,
    selection: Selection,
    nodes_explored: u64,
    proof: Proof,
) -> Result<SolveResult, SolveError> {
    let ev = evaluate(instance, influence, &selection)?;
    Ok(SolveResult {
        selection,
        objective: ev.objective,
        penalties: ev.penalties,
        total_weight: ev.total_weight,
        nodes_explored,
        proof,
    })
}

fn check_dims(instance: &Instance, influence: &InfluenceMatrix) -> Result<(), SolveError> {
    if instance.len() != influence.len() {
        return Err(DimensionMismatch {
            expected: instance.len(),
            got: influence.len(),
        }
        .into());
    }
    Ok(())
}

/// Evaluates all `2^n` selections with the default cap of 20 elements.
pub fn solve_exhaustive(
    instance: &Instance,
    influence: &InfluenceMatrix,
) -> Result<SolveResult, SolveError> {
    solve_exhaustive_capped(instance, influence, DEFAULT_EXHAUSTIVE_CAP)
}

/// Evaluates all `2^n` selections. Among equal objectives the
/// lexicographically smallest bit vector (`x_0` most significant) wins.
pub fn solve_exhaustive_capped(
    instance: &Instance,
    influence: &InfluenceMatrix,
    cap: usize,
) -> Result<SolveResult, SolveError> {
    check_dims(instance, influence)?;
    let n = instance.len();
    if n > cap || n >= 64 {
        return Err(SolveError::TooLarge { n, cap });
    }
    let weights: Vec<f64> = instance.elements().iter().map(|e| e.weight).collect();
    let values: Vec<f64> = instance.elements().iter().map(|e| e.value).collect();
    let mut x = vec![false; n];
    let mut best: Option<(f64, u64)> = None;
    // Bit n-1-i of the mask is x_i, so ascending masks are ascending bit vectors.
    for mask in 0u64..(1u64 << n) {
        for (i, xi) in x.iter_mut().enumerate() {
            *xi = mask >> (n - 1 - i) & 1 == 1;
        }
        let weight: f64 = (0..n).filter(|&i| x[i]).map(|i| weights[i]).sum();
        if weight > instance.capacity() {
            continue;
        }
        let objective = objective_fast(influence, &values, &x);
        if best.is_none_or(|(b, _)| objective > b) {
            best = Some((objective, mask));
        }
    }
    let mask = best.map_or(0, |(_, m)| m);
    let selection = Selection::new((0..n).map(|i| mask >> (n - 1 - i) & 1 == 1).collect());
    finish(instance, influence, selection, 1u64 << n, Proof::SearchExhausted)
}

fn objective_fast(influence: &InfluenceMatrix, values: &[f64], x: &[bool]) -> f64 {
    let n = x.len();
    (0..n)
        .filter(|&i| x[i])
        .map(|i| {
            let p = (0..n)
                .filter(|&j| j != i)
                .map(|j| penalty_term(influence.influence(i, j), x[j]))
                .fold(0.0, f64::max);
            (1.0 - p) * values[i]
        })
        .sum()
}

/// Branching order: zero-weight elements first, then descending value
/// density, ties by index.
fn branching_order(instance: &Instance) -> Vec<usize> {
    let els = instance.elements();
    let mut order: Vec<usize> = (0..els.len()).collect();
    order.sort_by(|&a, &b| {
        let (ea, eb) = (&els[a], &els[b]);
        let za = ea.weight == 0.0;
        let zb = eb.weight == 0.0;
        zb.cmp(&za)
            .then_with(|| {
                if za && zb {
                    std::cmp::Ordering::Equal
                } else {
                    (eb.value / eb.weight).total_cmp(&(ea.value / ea.weight))
                }
            })
            .then(a.cmp(&b))
    });
    order
}

/// Upper bound on the objective of every completion of a partial selection
/// (`None` = undecided).
///
/// Decided selected elements are charged only the penalty terms coming from
/// decided elements; undecided elements contribute their full value through
/// a fractional knapsack over the remaining capacity. Penalties only
/// discount and deciding more elements can only add terms, so no completion
/// exceeds this value. Returns `-inf` if the decided part already exceeds
/// the capacity.
pub fn optimistic_bound(
    instance: &Instance,
    influence: &InfluenceMatrix,
    partial: &[Option<bool>],
) -> f64 {
    let order = branching_order(instance);
    bound_with_order(instance, influence, partial, &order)
}

fn bound_with_order(
    instance: &Instance,
    influence: &InfluenceMatrix,
    partial: &[Option<bool>],
    order: &[usize],
) -> f64 {
    let els = instance.elements();
    let n = els.len();
    let used: f64 = (0..n)
        .filter(|&i| partial[i] == Some(true))
        .map(|i| els[i].weight)
        .sum();
    if used > instance.capacity() {
        return f64::NEG_INFINITY;
    }
    let mut value = 0.0;
    for i in (0..n).filter(|&i| partial[i] == Some(true)) {
        let p = (0..n)
            .filter(|&j| j != i)
            .filter_map(|j| partial[j].map(|xj| penalty_term(influence.influence(i, j), xj)))
            .fold(0.0, f64::max);
        value += (1.0 - p) * els[i].value;
    }
    let mut room = instance.capacity() - used;
    for &i in order.iter().filter(|&&i| partial[i].is_none()) {
        let e = &els[i];
        if e.weight <= room {
            value += e.value;
            room -= e.weight;
        } else {
            if e.weight > 0.0 && room > 0.0 {
                value += e.value * room / e.weight;
            }
            break;
        }
    }
    value
}

struct Search<'a> {
    instance: &'a Instance,
    influence: &'a InfluenceMatrix,
    values: Vec<f64>,
    order: Vec<usize>,
    partial: Vec<Option<bool>>,
    weight: f64,
    best: f64,
    best_x: Vec<bool>,
    nodes: u64,
}

impl Search<'_> {
    fn visit(&mut self, depth: usize) {
        self.nodes += 1;
        if depth == self.order.len() {
            let x: Vec<bool> = self.partial.iter().map(|p| p == &Some(true)).collect();
            let objective = objective_fast(self.influence, &self.values, &x);
            if objective > self.best {
                self.best = objective;
                self.best_x = x;
            }
            return;
        }
        if bound_with_order(self.instance, self.influence, &self.partial, &self.order) <= self.best {
            return;
        }
        let item = self.order[depth];
        let w = self.instance.elements()[item].weight;
        if self.weight + w <= self.instance.capacity() {
            self.partial[item] = Some(true);
            self.weight += w;
            self.visit(depth + 1);
            self.weight -= w;
        }
        self.partial[item] = Some(false);
        self.visit(depth + 1);
        self.partial[item] = None;
    }
}

/// Depth-first branch-and-bound over `x` using [`optimistic_bound`].
/// The empty selection is the initial incumbent.
pub fn solve_bnb(instance: &Instance, influence: &InfluenceMatrix) -> Result<SolveResult, SolveError> {
    check_dims(instance, influence)?;
    let n = instance.len();
    let mut search = Search {
        instance,
        influence,
        values: instance.elements().iter().map(|e| e.value).collect(),
        order: branching_order(instance),
        partial: vec![None; n],
        weight: 0.0,
        best: 0.0,
        best_x: vec![false; n],
        nodes: 0,
    };
    search.visit(0);
    let (x, nodes) = (search.best_x, search.nodes);
    finish(instance, influence, Selection::new(x), nodes, Proof::Optimal)
}

#[derive(Debug, Error, PartialEq)]
pub enum GenerateError {
    #[error("instance needs at least one element")]
    Empty,
    #[error("{name} must lie in [0, 1], got {value}")]
    Probability { name: &'static str, value: f64 },
}

/// Parameters for [`generate_instance`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorParams {
    pub n: usize,
    /// Probability that an ordered pair carries an explicit dependency.
    pub density: f64,
    /// Probability that an explicit dependency is negative.
    pub negative_share: f64,
    pub seed: u64,
}

/// Resolution of generated strengths: uniform on `{k / 10^6 : k = 1..=10^6}`.
const STRENGTH_STEPS: u32 = 1_000_000;

/// Seeded random instance. Integer values in `[1, 100]`, integer weights in
/// `[1, 50]`, capacity half the total weight rounded, ids `e1..en`.
pub fn generate_instance(params: GeneratorParams) -> Result<Instance, GenerateError> {
    let GeneratorParams {
        n,
        density,
        negative_share,
        seed,
    } = params;
    if n == 0 {
        return Err(GenerateError::Empty);
    }
    for (name, value) in [("density", density), ("negative_share", negative_share)] {
        if !(0.0..=1.0).contains(&value) {
            return Err(GenerateError::Probability { name, value });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let elements: Vec<Element> = (0..n)
        .map(|k| {
            let value = f64::from(rng.gen_range(1u32..=100));
            let weight = f64::from(rng.gen_range(1u32..=50));
            Element::new(format!("e{}", k + 1), value, weight)
        })
        .collect();
    let total: f64 = elements.iter().map(|e| e.weight).sum();
    let capacity = (total / 2.0).round();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i == j || !rng.gen_bool(density) {
                continue;
            }
            let quality = if rng.gen_bool(negative_share) {
                Quality::Negative
            } else {
                Quality::Positive
            };
            let strength = f64::from(rng.gen_range(1..=STRENGTH_STEPS)) / f64::from(STRENGTH_STEPS);
            edges.push(Edge::new(i, j, quality, strength));
        }
    }
    let vdg = Vdg::from_edges(n, edges).expect("generated pairs are distinct and in range");
    Ok(Instance::new(elements, capacity, vdg))
}
