//! Max-min aggregation of dependency paths into signed strengths and the
//! overall influence matrix.
//!
//! A path's strength is its weakest edge and its quality is the sign product
//! of its edges. For an ordered pair `(i, j)`, `rho_pos` is the strongest
//! positive path from `i` to `j` and `rho_neg` the strongest negative one;
//! the influence of `j` on `i` is their difference. Paths are simple (no
//! repeated node). [`walk_closure`] gives the same aggregation over walks.

use thiserror::Error;

use crate::vdg::{Quality, Vdg};

#[derive(Debug, Error, PartialEq)]
pub enum InfluenceError {
    #[error("a dependency path needs at least two nodes, got {0}")]
    TooShort(usize),
    #[error("node {0} appears more than once in the path")]
    RepeatedNode(usize),
    #[error("node {node} outside the graph (n = {n})")]
    OutOfRange { node: usize, n: usize },
    #[error("no explicit dependency between consecutive nodes {from} and {to}")]
    MissingEdge { from: usize, to: usize },
}

/// A sequence of distinct node indices `(e(1), ..., e(k))`, `k >= 2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DependencyPath(Vec<usize>);

impl DependencyPath {
    pub fn new(nodes: Vec<usize>) -> Result<Self, InfluenceError> {
        if nodes.len() < 2 {
            return Err(InfluenceError::TooShort(nodes.len()));
        }
        let mut seen = nodes.clone();
        seen.sort_unstable();
        if let Some(w) = seen.windows(2).find(|w| w[0] == w[1]) {
            return Err(InfluenceError::RepeatedNode(w[0]));
        }
        Ok(Self(nodes))
    }

    pub fn nodes(&self) -> &[usize] {
        &self.0
    }

    /// Consecutive `(from, to)` pairs.
    pub fn hops(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.0.windows(2).map(|w| (w[0], w[1]))
    }

    fn check(&self, vdg: &Vdg) -> Result<(), InfluenceError> {
        let n = vdg.len();
        if let Some(&node) = self.0.iter().find(|&&k| k >= n) {
            return Err(InfluenceError::OutOfRange { node, n });
        }
        match self.hops().find(|&(a, b)| !vdg.has_edge(a, b)) {
            Some((from, to)) => Err(InfluenceError::MissingEdge { from, to }),
            None => Ok(()),
        }
    }
}

/// Weakest edge strength along `path`.
pub fn path_strength(vdg: &Vdg, path: &DependencyPath) -> Result<f64, InfluenceError> {
    path.check(vdg)?;
    Ok(path
        .hops()
        .map(|(a, b)| vdg.strength(a, b))
        .fold(f64::INFINITY, f64::min))
}

/// Sign product of the edges along `path`.
pub fn path_quality(vdg: &Vdg, path: &DependencyPath) -> Result<Quality, InfluenceError> {
    path.check(vdg)?;
    Ok(path
        .hops()
        .fold(Quality::Positive, |q, (a, b)| q.compose(vdg.quality(a, b))))
}

/// All simple paths from `i` to `j`, depth first with successors visited in
/// ascending index order. Empty when `i == j` or `j` is unreachable.
pub fn enumerate_simple_paths(vdg: &Vdg, i: usize, j: usize) -> Vec<DependencyPath> {
    fn dfs(vdg: &Vdg, node: usize, target: usize, stack: &mut Vec<usize>, on: &mut [bool], out: &mut Vec<DependencyPath>) {
        for (next, _, _) in vdg.successors(node) {
            if on[next] {
                continue;
            }
            stack.push(next);
            if next == target {
                out.push(DependencyPath(stack.clone()));
            } else {
                on[next] = true;
                dfs(vdg, next, target, stack, on, out);
                on[next] = false;
            }
            stack.pop();
        }
    }

    let mut out = Vec::new();
    if i == j || i >= vdg.len() || j >= vdg.len() {
        return out;
    }
    let mut on = vec![false; vdg.len()];
    on[i] = true;
    dfs(vdg, i, j, &mut vec![i], &mut on, &mut out);
    out
}

/// Strongest positive and strongest negative path strength for one pair.
/// A sign with no path has strength 0.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SignedStrength {
    pub pos: f64,
    pub neg: f64,
}

impl SignedStrength {
    fn offer(&mut self, q: Quality, s: f64) {
        match q {
            Quality::Positive => self.pos = self.pos.max(s),
            Quality::Negative => self.neg = self.neg.max(s),
            Quality::NonSpecified => {}
        }
    }
}

/// Successor lists sorted strongest first so that good paths are found early
/// and the pruning bound bites.
struct Adjacency(Vec<Vec<(usize, Quality, f64)>>);

impl Adjacency {
    fn new(vdg: &Vdg) -> Self {
        Self(
            (0..vdg.len())
                .map(|i| {
                    let mut s: Vec<_> = vdg.successors(i).collect();
                    s.sort_by(|a, b| b.2.total_cmp(&a.2).then(a.0.cmp(&b.0)));
                    s
                })
                .collect(),
        )
    }

    fn signed_strengths(&self, i: usize, j: usize) -> SignedStrength {
        let mut best = SignedStrength::default();
        if i == j || i >= self.0.len() || j >= self.0.len() {
            return best;
        }
        let mut on = vec![false; self.0.len()];
        on[i] = true;
        self.search(i, j, Quality::Positive, f64::INFINITY, &mut on, &mut best);
        best
    }

    fn search(&self, node: usize, target: usize, sign: Quality, weakest: f64, on: &mut [bool], best: &mut SignedStrength) {
        for &(next, q, s) in &self.0[node] {
            if on[next] {
                continue;
            }
            let m = weakest.min(s);
            // Any extension is at most m, whatever its sign.
            if m <= best.pos && m <= best.neg {
                // Successors are sorted by strength, so later ones are weaker.
                break;
            }
            let sign = sign.compose(q);
            if next == target {
                best.offer(sign, m);
            } else {
                on[next] = true;
                self.search(next, target, sign, m, on, best);
                on[next] = false;
            }
        }
    }
}

/// `rho_pos` / `rho_neg` for the ordered pair `(i, j)`.
pub fn signed_strengths(vdg: &Vdg, i: usize, j: usize) -> SignedStrength {
    Adjacency::new(vdg).signed_strengths(i, j)
}

/// Per-pair signed strengths and overall influence, row-major `n x n`.
#[derive(Debug, Clone, PartialEq)]
pub struct InfluenceMatrix {
    n: usize,
    rho_pos: Vec<f64>,
    rho_neg: Vec<f64>,
    influence: Vec<f64>,
}

impl InfluenceMatrix {
    /// Builds the matrix from signed strengths; the diagonal is forced to 0.
    ///
    /// # Panics
    /// If either slice is not `n * n` long.
    pub fn from_signed(n: usize, mut rho_pos: Vec<f64>, mut rho_neg: Vec<f64>) -> Self {
        assert_eq!(rho_pos.len(), n * n, "rho_pos must be n x n");
        assert_eq!(rho_neg.len(), n * n, "rho_neg must be n x n");
        for k in 0..n {
            rho_pos[k * n + k] = 0.0;
            rho_neg[k * n + k] = 0.0;
        }
        let influence = rho_pos.iter().zip(&rho_neg).map(|(p, q)| p - q).collect();
        Self {
            n,
            rho_pos,
            rho_neg,
            influence,
        }
    }

    /// Builds a matrix directly from influence values, splitting each entry
    /// into its positive or negative part.
    pub fn from_influence(n: usize, influence: Vec<f64>) -> Self {
        let pos = influence.iter().map(|&v| v.max(0.0)).collect();
        let neg = influence.iter().map(|&v| (-v).max(0.0)).collect();
        Self::from_signed(n, pos, neg)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn rho_pos(&self, i: usize, j: usize) -> f64 {
        self.rho_pos[i * self.n + j]
    }

    pub fn rho_neg(&self, i: usize, j: usize) -> f64 {
        self.rho_neg[i * self.n + j]
    }

    /// `I_{i,j}`: net influence of selecting `e_j` on the value of `e_i`.
    pub fn influence(&self, i: usize, j: usize) -> f64 {
        self.influence[i * self.n + j]
    }

    pub fn rho_pos_rows(&self) -> Vec<Vec<f64>> {
        rows(&self.rho_pos, self.n)
    }

    pub fn rho_neg_rows(&self) -> Vec<Vec<f64>> {
        rows(&self.rho_neg, self.n)
    }

    pub fn influence_rows(&self) -> Vec<Vec<f64>> {
        rows(&self.influence, self.n)
    }
}

fn rows(m: &[f64], n: usize) -> Vec<Vec<f64>> {
    if n == 0 {
        return Vec::new();
    }
    m.chunks(n).map(<[f64]>::to_vec).collect()
}

/// Signed strengths and influence for every ordered pair over simple paths.
pub fn influence_matrix(vdg: &Vdg) -> InfluenceMatrix {
    let n = vdg.len();
    let adj = Adjacency::new(vdg);
    let mut pos = vec![0.0; n * n];
    let mut neg = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let s = adj.signed_strengths(i, j);
            pos[i * n + j] = s.pos;
            neg[i * n + j] = s.neg;
        }
    }
    InfluenceMatrix::from_signed(n, pos, neg)
}

/// Signed max-min closure over walks (node repetition allowed).
#[derive(Debug, Clone, PartialEq)]
pub struct WalkClosure {
    n: usize,
    rho_pos: Vec<f64>,
    rho_neg: Vec<f64>,
}

impl WalkClosure {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn rho_pos(&self, i: usize, j: usize) -> f64 {
        self.rho_pos[i * self.n + j]
    }

    pub fn rho_neg(&self, i: usize, j: usize) -> f64 {
        self.rho_neg[i * self.n + j]
    }

    pub fn rho_pos_rows(&self) -> Vec<Vec<f64>> {
        rows(&self.rho_pos, self.n)
    }

    pub fn rho_neg_rows(&self) -> Vec<Vec<f64>> {
        rows(&self.rho_neg, self.n)
    }
}

/// Least fixpoint of the signed max-min composition, starting from the
/// explicit edges. Closed walks through a node are used while iterating but
/// the returned diagonal is 0, as for [`InfluenceMatrix`].
pub fn walk_closure(vdg: &Vdg) -> WalkClosure {
    let n = vdg.len();
    let mut pos = vec![0.0f64; n * n];
    let mut neg = vec![0.0f64; n * n];
    for e in vdg.explicit_edges() {
        match e.quality {
            Quality::Positive => pos[e.from * n + e.to] = e.strength,
            Quality::Negative => neg[e.from * n + e.to] = e.strength,
            Quality::NonSpecified => {}
        }
    }
    // Entries only grow and always equal some edge strength, so this stops.
    loop {
        let mut changed = false;
        for i in 0..n {
            for k in 0..n {
                let (ip, in_) = (pos[i * n + k], neg[i * n + k]);
                if ip == 0.0 && in_ == 0.0 {
                    continue;
                }
                for j in 0..n {
                    let (kp, kn) = (pos[k * n + j], neg[k * n + j]);
                    let p = ip.min(kp).max(in_.min(kn));
                    let q = ip.min(kn).max(in_.min(kp));
                    if p > pos[i * n + j] {
                        pos[i * n + j] = p;
                        changed = true;
                    }
                    if q > neg[i * n + j] {
                        neg[i * n + j] = q;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    for k in 0..n {
        pos[k * n + k] = 0.0;
        neg[k * n + k] = 0.0;
    }
    WalkClosure {
        n,
        rho_pos: pos,
        rho_neg: neg,
    }
}
