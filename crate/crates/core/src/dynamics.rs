//! Weight distributions and the three move kinds: sharing on a
//! connected set, edge-sharing, and quasi-edge-sharing, together with
//! the matrix view of a move and the adjoint (reversed) sequence
//! action.
//!
//! Everything here is exact: weights are arbitrary-precision rationals
//! and inputs are never mutated, so distributions can be shared freely
//! between workers and used as hash keys by the search.

use std::collections::BTreeMap;

use num_traits::Zero;
use thiserror::Error;

use crate::graph::{is_connected_subset, Graph, GraphError, VertexSet};
use crate::rational::{parse_rational, ParseRationalError, Rational};

#[derive(Debug, Error, PartialEq)]
pub enum DynamicsError {
    #[error("sharing move on an empty set")]
    EmptyMove,
    #[error("sharing move on a disconnected set {0:?}")]
    DisconnectedMove(Vec<usize>),
    #[error("`{0}`-`{1}` is not an edge")]
    NotAnEdge(String, String),
    #[error("quasi move requires w(x) <= w(y), got w({0}) > w({1})")]
    QuasiNotOrdered(String, String),
    #[error("quasi amount out of range on edge {0}-{1}")]
    QuasiAmountOutOfRange(String, String),
    #[error("weight vector has {0} entries but graph has {1} vertices")]
    LengthMismatch(usize, usize),
    #[error("negative weight at vertex `{0}`")]
    NegativeWeight(String),
    #[error("weights missing vertex `{0}`")]
    MissingVertex(String),
    #[error("weights mention undeclared vertex `{0}`")]
    ExtraVertex(String),
    #[error("bad weight for `{vertex}`: {source}")]
    BadWeight {
        vertex: String,
        source: ParseRationalError,
    },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Exact non-negative weight per vertex, indexed by the graph's vertex
/// order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WeightDistribution {
    weights: Vec<Rational>,
}

impl WeightDistribution {
    pub fn new(g: &Graph, weights: Vec<Rational>) -> Result<Self, DynamicsError> {
        if weights.len() != g.vertex_count() {
            return Err(DynamicsError::LengthMismatch(
                weights.len(),
                g.vertex_count(),
            ));
        }
        if let Some(i) = weights.iter().position(|w| w < &Rational::zero()) {
            return Err(DynamicsError::NegativeWeight(g.vertex_name(i).to_string()));
        }
        Ok(WeightDistribution { weights })
    }

    /// Internal constructor for weights already known valid.
    pub(crate) fn from_raw(weights: Vec<Rational>) -> Self {
        WeightDistribution { weights }
    }

    /// All-zero distribution.
    pub fn zero(g: &Graph) -> Self {
        WeightDistribution {
            weights: vec![Rational::zero(); g.vertex_count()],
        }
    }

    /// The indicator `1_{v}`: one unit at `v`, nothing elsewhere.
    pub fn indicator(g: &Graph, v: usize) -> Self {
        let mut w = Self::zero(g);
        w.weights[v] = Rational::from_integer(1.into());
        w
    }

    /// Indicator of a vertex set.
    pub fn indicator_set(g: &Graph, s: &VertexSet) -> Self {
        let mut w = Self::zero(g);
        for v in s.iter() {
            w.weights[v] = Rational::from_integer(1.into());
        }
        w
    }

    /// Parses a name-to-rational-string map, requiring exact coverage
    /// of the declared vertices.
    pub fn from_named_map(
        g: &Graph,
        map: &BTreeMap<String, String>,
    ) -> Result<Self, DynamicsError> {
        for name in map.keys() {
            if g.vertex_index(name).is_err() {
                return Err(DynamicsError::ExtraVertex(name.clone()));
            }
        }
        let mut weights = Vec::with_capacity(g.vertex_count());
        for name in g.vertex_names() {
            let raw = map
                .get(name)
                .ok_or_else(|| DynamicsError::MissingVertex(name.clone()))?;
            let value = parse_rational(raw).map_err(|source| DynamicsError::BadWeight {
                vertex: name.clone(),
                source,
            })?;
            weights.push(value);
        }
        Self::new(g, weights)
    }

    pub fn get(&self, v: usize) -> &Rational {
        &self.weights[v]
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn as_slice(&self) -> &[Rational] {
        &self.weights
    }

    /// Total weight `w(G)`.
    pub fn total(&self) -> Rational {
        self.weights.iter().sum()
    }

    /// `w(S)`, the sum over a vertex set.
    pub fn sum_over(&self, s: &VertexSet) -> Rational {
        s.iter().map(|v| self.weights[v].clone()).sum()
    }

    pub fn to_f64_vec(&self) -> Vec<f64> {
        self.weights.iter().map(crate::rational::rational_to_f64).collect()
    }
}

/// A sharing move: a nonempty connected vertex set whose weights get
/// replaced by their common average.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SharingMove {
    target: VertexSet,
}

impl SharingMove {
    pub fn new(g: &Graph, target: VertexSet) -> Result<Self, DynamicsError> {
        if target.is_empty() {
            return Err(DynamicsError::EmptyMove);
        }
        if !is_connected_subset(g, &target)? {
            return Err(DynamicsError::DisconnectedMove(
                target.as_slice().to_vec(),
            ));
        }
        Ok(SharingMove { target })
    }

    pub fn target(&self) -> &VertexSet {
        &self.target
    }
}

/// Quasi-edge-sharing move: shift an amount `s` from the heavier to the
/// lighter endpoint of an edge. Legality is state-dependent, so the
/// amount is validated at application time.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasiMove {
    pub x: usize,
    pub y: usize,
    pub amount: Rational,
}

/// Ordered finite list of sharing moves, applied left to right.
pub type MoveSequence = Vec<SharingMove>;

/// Replaces the weights on the move's target set by their average.
/// Total weight is preserved exactly.
pub fn apply_share(w: &WeightDistribution, t: &SharingMove) -> WeightDistribution {
    let set = t.target();
    let sum: Rational = set.iter().map(|v| w.weights[v].clone()).sum();
    let avg = sum / Rational::from_integer(set.len().into());
    let mut weights = w.weights.clone();
    for v in set.iter() {
        weights[v] = avg.clone();
    }
    WeightDistribution { weights }
}

/// Sharing move on the two endpoints of an edge.
pub fn apply_edge_share(
    g: &Graph,
    w: &WeightDistribution,
    x: usize,
    y: usize,
) -> Result<WeightDistribution, DynamicsError> {
    if !g.is_edge(x, y) {
        return Err(DynamicsError::NotAnEdge(
            g.vertex_name(x).to_string(),
            g.vertex_name(y).to_string(),
        ));
    }
    let avg = (&w.weights[x] + &w.weights[y]) / Rational::from_integer(2.into());
    let mut weights = w.weights.clone();
    weights[x] = avg.clone();
    weights[y] = avg;
    Ok(WeightDistribution { weights })
}

/// Moves `q.amount` from the heavier endpoint `y` to the lighter
/// endpoint `x`. Requires `w(x) <= w(y)` and
/// `0 <= amount <= (w(y) - w(x))/2` at the current state.
pub fn apply_quasi(
    g: &Graph,
    w: &WeightDistribution,
    q: &QuasiMove,
) -> Result<WeightDistribution, DynamicsError> {
    if !g.is_edge(q.x, q.y) {
        return Err(DynamicsError::NotAnEdge(
            g.vertex_name(q.x).to_string(),
            g.vertex_name(q.y).to_string(),
        ));
    }
    let wx = &w.weights[q.x];
    let wy = &w.weights[q.y];
    if wx > wy {
        return Err(DynamicsError::QuasiNotOrdered(
            g.vertex_name(q.x).to_string(),
            g.vertex_name(q.y).to_string(),
        ));
    }
    let half_gap = (wy - wx) / Rational::from_integer(2.into());
    if q.amount < Rational::zero() || q.amount > half_gap {
        return Err(DynamicsError::QuasiAmountOutOfRange(
            g.vertex_name(q.x).to_string(),
            g.vertex_name(q.y).to_string(),
        ));
    }
    let mut weights = w.weights.clone();
    weights[q.x] = wx + &q.amount;
    weights[q.y] = wy - &q.amount;
    Ok(WeightDistribution { weights })
}

/// Left-to-right composition of sharing moves.
pub fn apply_sequence(w: &WeightDistribution, seq: &[SharingMove]) -> WeightDistribution {
    let mut cur = w.clone();
    for t in seq {
        cur = apply_share(&cur, t);
    }
    cur
}

/// Applies the sequence in reversed order. Since every share matrix is
/// symmetric, this is the adjoint of `apply_sequence`:
/// `<c, seq(w)> = <w, adjoint_seq(c)>` exactly.
pub fn apply_adjoint_sequence(
    c: &WeightDistribution,
    seq: &[SharingMove],
) -> WeightDistribution {
    let mut cur = c.clone();
    for t in seq.iter().rev() {
        cur = apply_share(&cur, t);
    }
    cur
}

/// Square rational matrix indexed by the graph's vertices; symmetric
/// and doubly stochastic for every sharing move.
#[derive(Debug, Clone, PartialEq)]
pub struct ShareMatrix {
    entries: Vec<Vec<Rational>>,
}

impl ShareMatrix {
    pub fn entry(&self, row: usize, col: usize) -> &Rational {
        &self.entries[row][col]
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn apply(&self, w: &WeightDistribution) -> WeightDistribution {
        let weights = self
            .entries
            .iter()
            .map(|row| row.iter().zip(&w.weights).map(|(a, b)| a * b).sum())
            .collect();
        WeightDistribution { weights }
    }

    pub fn row_sum(&self, row: usize) -> Rational {
        self.entries[row].iter().sum()
    }

    pub fn col_sum(&self, col: usize) -> Rational {
        self.entries.iter().map(|row| row[col].clone()).sum()
    }
}

/// Materializes the matrix of a sharing move: `1/|T|` on the `T x T`
/// block, identity elsewhere.
pub fn matrix_of_move(g: &Graph, t: &SharingMove) -> ShareMatrix {
    let n = g.vertex_count();
    let size = Rational::from_integer(t.target().len().into());
    let share = Rational::from_integer(1.into()) / size;
    let mut entries = vec![vec![Rational::zero(); n]; n];
    for (i, row) in entries.iter_mut().enumerate() {
        if t.target().contains(i) {
            for j in t.target().iter() {
                row[j] = share.clone();
            }
        } else {
            row[i] = Rational::from_integer(1.into());
        }
    }
    ShareMatrix { entries }
}

/// `<a, b> = sum_v a(v) b(v)`, exactly.
pub fn inner_product(
    a: &WeightDistribution,
    b: &WeightDistribution,
) -> Result<Rational, DynamicsError> {
    if a.len() != b.len() {
        return Err(DynamicsError::LengthMismatch(a.len(), b.len()));
    }
    Ok(a.weights.iter().zip(&b.weights).map(|(x, y)| x * y).sum())
}

/// Squared Euclidean norm; the squared form keeps the arithmetic
/// rational.
pub fn squared_norm(w: &WeightDistribution) -> Rational {
    w.weights.iter().map(|x| x * x).sum()
}

/// Expresses the result of a quasi-edge-sharing sequence as an exact
/// convex combination of edge-reachable distributions.
///
/// Each quasi step on edge `(x, y)` with amount `s` splits every hull
/// component `u` into `(1 - lambda) u` and `lambda A_e u` with
/// `lambda = 2s / (u(y) - u(x))` computed on the combined state; the
/// returned pairs `(coefficient, distribution)` always sum to the
/// quasi-reachable state, with coefficients summing to one.
pub fn quasi_hull_decomposition(
    g: &Graph,
    w: &WeightDistribution,
    seq: &[QuasiMove],
) -> Result<Vec<(Rational, WeightDistribution)>, DynamicsError> {
    let one = Rational::from_integer(1.into());
    let mut hull = vec![(one.clone(), w.clone())];
    let mut state = w.clone();
    for q in seq {
        let next = apply_quasi(g, &state, q)?;
        let gap = &state.weights[q.y] - &state.weights[q.x];
        if gap.is_zero() {
            // amount was necessarily zero; nothing changes
            state = next;
            continue;
        }
        let lambda = Rational::from_integer(2.into()) * &q.amount / gap;
        let keep = &one - &lambda;
        let mut split = Vec::with_capacity(hull.len() * 2);
        for (coeff, u) in hull {
            let shared = apply_edge_share(g, &u, q.x, q.y)?;
            if !keep.is_zero() {
                split.push((&coeff * &keep, u));
            }
            if !lambda.is_zero() {
                split.push((coeff * &lambda, shared));
            }
        }
        hull = split;
        state = next;
    }
    Ok(hull)
}
