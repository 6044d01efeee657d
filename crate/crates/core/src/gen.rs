//! Seeded deterministic generation of test instances: graphs, weight
//! vectors, moves, and schedules. Built on the SplitMix64 mixing
//! generator so every trial is reproducible from a 64-bit seed.

use num_bigint::BigInt;

use crate::dynamics::{MoveSequence, SharingMove, WeightDistribution};
use crate::graph::{Graph, VertexSet};
use crate::rational::Rational;

/// SplitMix64: a 64-bit state advanced by a Weyl increment and
/// finalized by two xor-shift multiplies. Deterministic and portable.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform value in `0..bound` (bound > 0), by rejection.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0);
        let zone = u64::MAX - u64::MAX % bound;
        loop {
            let x = self.next_u64();
            if x < zone {
                return x % bound;
            }
        }
    }

    /// Uniform value in `lo..=hi`.
    pub fn range(&mut self, lo: u64, hi: u64) -> u64 {
        lo + self.below(hi - lo + 1)
    }

    /// Non-negative rational `p/q` with `p < num_bound`, `1 <= q <= den_bound`.
    pub fn rational(&mut self, num_bound: u64, den_bound: u64) -> Rational {
        let p = self.below(num_bound);
        let q = self.range(1, den_bound);
        Rational::new(BigInt::from(p), BigInt::from(q))
    }
}

/// Uniformly random labeled tree on `n` vertices `v0..v{n-1}`: each
/// vertex after the first attaches to a uniformly chosen predecessor.
pub fn random_tree(rng: &mut SplitMix64, n: usize) -> Graph {
    assert!(n >= 1);
    let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    for i in 1..n {
        let parent = rng.below(i as u64) as usize;
        edges.push((names[parent].clone(), names[i].clone()));
    }
    Graph::build(&names, &edges).expect("tree construction is always valid")
}

/// Random connected graph: a random tree plus up to `extra_edges`
/// additional distinct non-tree edges.
pub fn random_connected_graph(rng: &mut SplitMix64, n: usize, extra_edges: usize) -> Graph {
    let tree = random_tree(rng, n);
    if n < 3 || extra_edges == 0 {
        return tree;
    }
    let names: Vec<String> = tree.vertex_names().to_vec();
    let mut edges: Vec<(String, String)> = tree
        .edges()
        .iter()
        .map(|&(a, b)| (names[a].clone(), names[b].clone()))
        .collect();
    let mut added = 0;
    let mut attempts = 0;
    while added < extra_edges && attempts < 10 * extra_edges + 20 {
        attempts += 1;
        let a = rng.below(n as u64) as usize;
        let b = rng.below(n as u64) as usize;
        if a != b && !tree.is_edge(a, b) {
            let (a, b) = (a.min(b), a.max(b));
            let candidate = (names[a].clone(), names[b].clone());
            if !edges.contains(&candidate) {
                edges.push(candidate);
                added += 1;
            }
        }
    }
    Graph::build(&names, &edges).expect("augmented tree is still valid")
}

/// Random non-negative rational weights for every vertex.
pub fn random_weights(
    g: &Graph,
    rng: &mut SplitMix64,
    num_bound: u64,
    den_bound: u64,
) -> WeightDistribution {
    let weights = (0..g.vertex_count())
        .map(|_| rng.rational(num_bound, den_bound))
        .collect();
    WeightDistribution::new(g, weights).expect("generated weights are non-negative")
}

/// Random connected vertex set of the requested size, grown from a
/// random start vertex through the frontier.
pub fn random_connected_subset(g: &Graph, rng: &mut SplitMix64, size: usize) -> VertexSet {
    let n = g.vertex_count();
    let size = size.clamp(1, n);
    let start = rng.below(n as u64) as usize;
    let mut chosen = vec![start];
    let mut in_set = vec![false; n];
    in_set[start] = true;
    while chosen.len() < size {
        let mut frontier: Vec<usize> = chosen
            .iter()
            .flat_map(|&x| g.neighbors(x).iter().copied())
            .filter(|&x| !in_set[x])
            .collect();
        frontier.sort_unstable();
        frontier.dedup();
        if frontier.is_empty() {
            break;
        }
        let pick = frontier[rng.below(frontier.len() as u64) as usize];
        in_set[pick] = true;
        chosen.push(pick);
    }
    VertexSet::new(chosen)
}

/// Random sharing move on a connected set of 2..=max_size vertices.
pub fn random_move(g: &Graph, rng: &mut SplitMix64, max_size: usize) -> SharingMove {
    let cap = max_size.clamp(2, g.vertex_count());
    loop {
        let size = rng.range(2, cap as u64) as usize;
        let set = random_connected_subset(g, rng, size);
        if set.len() >= 2 {
            return SharingMove::new(g, set).expect("grown set is connected");
        }
    }
}

/// Random sequence of sharing moves.
pub fn random_sequence(
    g: &Graph,
    rng: &mut SplitMix64,
    len: usize,
    max_size: usize,
) -> MoveSequence {
    (0..len).map(|_| random_move(g, rng, max_size)).collect()
}
