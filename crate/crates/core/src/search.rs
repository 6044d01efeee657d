//! Depth-bounded exact search for optimal move sequences, with
//! admissible-bound pruning, plus the audits around the nested-move
//! counterexample and the truncated-star curve.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap, HashSet, VecDeque};

use num_bigint::BigInt;
use num_traits::One;
use thiserror::Error;

use crate::bounds::{
    self, BoundsError, PhiCertificate,
};
use crate::dynamics::{
    apply_sequence, apply_share, DynamicsError, MoveSequence, SharingMove,
    WeightDistribution,
};
use crate::graph::{enumerate_connected_subsets, Graph, GraphError, VertexSet};
use crate::rational::Rational;

#[derive(Debug, Error)]
pub enum SearchError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error("move universe is empty")]
    EmptyUniverse,
    #[error("instance does not match the audited tree: {0}")]
    WrongInstance(String),
}

/// Which sharing moves the search may use.
#[derive(Debug, Clone)]
pub enum MoveUniverse {
    /// Only two-vertex moves along edges.
    EdgesOnly,
    /// Every connected vertex set of size at least two.
    AllConnected,
    /// A caller-supplied list.
    Custom(Vec<SharingMove>),
}

#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub max_depth: usize,
    pub universe: MoveUniverse,
    /// Prune a state when its phi bound cannot beat the best found.
    pub prune_phi: bool,
    /// When the start distribution is known r-feasible for this root,
    /// the static cap `total / (d(r, v) + 1)` also prunes.
    pub feasibility_root: Option<usize>,
    /// Deduplicate states by exact distribution equality.
    pub dedup: bool,
}

impl SearchConfig {
    pub fn new(max_depth: usize, universe: MoveUniverse) -> Self {
        SearchConfig {
            max_depth,
            universe,
            prune_phi: true,
            feasibility_root: None,
            dedup: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub best_value: Rational,
    pub witness: MoveSequence,
    pub explored: u64,
    pub pruned: u64,
    /// Phi certificate of the start state; `best_value` never exceeds it.
    pub bound_certificate: PhiCertificate,
}

fn universe_moves(g: &Graph, universe: &MoveUniverse) -> Result<Vec<SharingMove>, SearchError> {
    let moves = match universe {
        MoveUniverse::EdgesOnly => g
            .edges()
            .iter()
            .map(|&(a, b)| SharingMove::new(g, VertexSet::new(vec![a, b])))
            .collect::<Result<Vec<_>, _>>()?,
        MoveUniverse::AllConnected => enumerate_connected_subsets(g, g.vertex_count())
            .into_iter()
            .filter(|s| s.len() >= 2)
            .map(|s| SharingMove::new(g, s))
            .collect::<Result<Vec<_>, _>>()?,
        MoveUniverse::Custom(list) => list.clone(),
    };
    if moves.is_empty() {
        return Err(SearchError::EmptyUniverse);
    }
    Ok(moves)
}

struct Searcher<'a> {
    g: &'a Graph,
    v: usize,
    universe: Vec<SharingMove>,
    cfg: &'a SearchConfig,
    best: Rational,
    // Witness as indices into `universe`, for cheap lex comparison on
    // the canonical (size, vertex-list) ordering the universe is in.
    best_witness: Vec<u32>,
    explored: u64,
    pruned: u64,
    feasibility_cap: Option<Rational>,
    /// Largest distance any single move can transport weight across:
    /// the maximum pairwise distance within one move set.
    step_reach: u32,
}

impl Searcher<'_> {
    /// Admissible bound on the target value reachable from `state` in
    /// at most `remaining` further moves. One move transports weight at
    /// most `step_reach` steps, so vertices farther than
    /// `remaining * step_reach` from the target contribute a zero
    /// coefficient to every reachable value; the phi bound of the state
    /// with that unreachable weight zeroed out is therefore still an
    /// upper bound, and it shrinks sharply near the depth limit.
    fn remaining_bound(
        &self,
        state: &WeightDistribution,
        remaining: usize,
    ) -> Result<Rational, SearchError> {
        let reach = (remaining as u64).saturating_mul(self.step_reach as u64);
        let in_reach = |x: usize| match self.g.dist(self.v, x) {
            Some(d) => u64::from(d) <= reach,
            None => false,
        };
        let a = state.get(self.v);
        // The recursion never exceeds the largest weight it folds in,
        // so the reachable maximum is itself an admissible (and very
        // cheap) cap; return it directly when it cannot beat the best.
        let cap = (0..state.len())
            .filter(|&x| in_reach(x))
            .map(|x| state.get(x))
            .max()
            .unwrap_or(a);
        if cap <= &self.best {
            return Ok(cap.clone());
        }
        let mut heavier: Vec<usize> = (0..state.len())
            .filter(|&x| x != self.v && in_reach(x) && state.get(x) > a)
            .collect();
        heavier.sort_by(|&x, &y| state.get(x).cmp(state.get(y)).then(x.cmp(&y)));
        let mut acc = a.clone();
        for x in heavier {
            let d = self.g.dist_checked(x, self.v)?;
            acc = &acc + (state.get(x) - &acc) / Rational::from_integer(BigInt::from(d + 1));
        }
        Ok(acc)
    }

    fn consider(&mut self, value: &Rational, path: &[u32]) {
        let better = match value.cmp(&self.best) {
            std::cmp::Ordering::Greater => true,
            std::cmp::Ordering::Equal => {
                path.len() < self.best_witness.len()
                    || (path.len() == self.best_witness.len()
                        && path < self.best_witness.as_slice())
            }
            std::cmp::Ordering::Less => false,
        };
        if better {
            self.best = value.clone();
            self.best_witness = path.to_vec();
        }
    }

    /// Dive along the child with the largest phi bound. On instances
    /// where greedy play is optimal (stars, single-source) this seeds
    /// `best` with the true optimum, after which the bound prunes the
    /// entire remaining tree.
    fn greedy_dive(&mut self, start: &WeightDistribution) -> Result<(), SearchError> {
        let mut state = start.clone();
        let mut path: Vec<u32> = Vec::new();
        for _ in 0..self.cfg.max_depth {
            let mut next: Option<(Rational, u32, WeightDistribution)> = None;
            for idx in 0..self.universe.len() {
                let child = apply_share(&state, &self.universe[idx]);
                if child == state {
                    continue;
                }
                let phi = bounds::phi_bound(self.g, self.v, &child)?.value;
                if next.as_ref().is_none_or(|(best_phi, _, _)| phi > *best_phi) {
                    next = Some((phi, idx as u32, child));
                }
            }
            let Some((_, idx, child)) = next else {
                break;
            };
            state = child;
            path.push(idx);
            self.explored += 1;
            let value = state.get(self.v).clone();
            self.consider(&value, &path);
        }
        Ok(())
    }

    /// Breadth-first exploration with exact-state deduplication, used
    /// when bound pruning is disabled. The first visit to a state is at
    /// its minimal depth, hence with the most remaining budget, so no
    /// state is ever expanded twice.
    fn bfs(&mut self, start: &WeightDistribution) -> Result<(), SearchError> {
        let mut visited: HashSet<WeightDistribution> = HashSet::new();
        let mut queue: VecDeque<(WeightDistribution, Vec<u32>)> = VecDeque::new();
        self.consider(&start.get(self.v).clone(), &[]);
        visited.insert(start.clone());
        queue.push_back((start.clone(), Vec::new()));
        while let Some((state, path)) = queue.pop_front() {
            self.explored += 1;
            if path.len() == self.cfg.max_depth {
                continue;
            }
            if let Some(cap) = &self.feasibility_cap {
                if *cap <= self.best {
                    self.pruned += 1;
                    continue;
                }
            }
            for idx in 0..self.universe.len() {
                let child = apply_share(&state, &self.universe[idx]);
                if child == state {
                    continue;
                }
                let mut child_path = path.clone();
                child_path.push(idx as u32);
                let value = child.get(self.v).clone();
                self.consider(&value, &child_path);
                if self.cfg.dedup && visited.contains(&child) {
                    self.pruned += 1;
                    continue;
                }
                if self.cfg.dedup {
                    visited.insert(child.clone());
                }
                queue.push_back((child, child_path));
            }
        }
        Ok(())
    }

    /// Best-first branch and bound: always expand the frontier state
    /// with the largest admissible bound. When the largest remaining
    /// bound no longer exceeds the best value found, nothing left on
    /// the frontier can beat it and the search stops. A visited state
    /// is re-expanded only when reached again at a strictly smaller
    /// depth (i.e. with a strictly larger remaining budget).
    fn best_first(&mut self, start: &WeightDistribution) -> Result<(), SearchError> {
        let mut best_depth: HashMap<WeightDistribution, usize> = HashMap::new();
        let mut heap: BinaryHeap<Frontier> = BinaryHeap::new();
        self.consider(&start.get(self.v).clone(), &[]);
        let root_bound = self.remaining_bound(start, self.cfg.max_depth)?;
        best_depth.insert(start.clone(), 0);
        heap.push(Frontier {
            bound: root_bound,
            path: Vec::new(),
            state: start.clone(),
        });
        while let Some(Frontier { bound, path, state }) = heap.pop() {
            if bound <= self.best {
                // Everything still on the frontier is bounded by this.
                self.pruned += heap.len() as u64 + 1;
                break;
            }
            if self.cfg.dedup {
                // A later arrival at smaller depth may have superseded
                // this entry; expand only the best-known depth.
                if best_depth.get(&state).copied() != Some(path.len()) {
                    self.pruned += 1;
                    continue;
                }
            }
            self.explored += 1;
            if path.len() == self.cfg.max_depth {
                continue;
            }
            if let Some(cap) = &self.feasibility_cap {
                if *cap <= self.best {
                    self.pruned += 1;
                    continue;
                }
            }
            let remaining = self.cfg.max_depth - path.len() - 1;
            for idx in 0..self.universe.len() {
                let child = apply_share(&state, &self.universe[idx]);
                if child == state {
                    continue;
                }
                let mut child_path = path.clone();
                child_path.push(idx as u32);
                let value = child.get(self.v).clone();
                self.consider(&value, &child_path);
                if self.cfg.dedup {
                    match best_depth.get(&child) {
                        Some(&seen) if seen <= child_path.len() => {
                            self.pruned += 1;
                            continue;
                        }
                        _ => {
                            best_depth.insert(child.clone(), child_path.len());
                        }
                    }
                }
                let child_bound = self.remaining_bound(&child, remaining)?;
                if child_bound <= self.best {
                    self.pruned += 1;
                    continue;
                }
                heap.push(Frontier {
                    bound: child_bound,
                    path: child_path,
                    state: child,
                });
            }
        }
        Ok(())
    }
}

/// Frontier entry ordered by bound (largest first), then by shorter
/// and lexicographically smaller path, for a deterministic pop order.
struct Frontier {
    bound: Rational,
    path: Vec<u32>,
    state: WeightDistribution,
}

impl PartialEq for Frontier {
    fn eq(&self, other: &Self) -> bool {
        self.bound == other.bound && self.path == other.path
    }
}

impl Eq for Frontier {}

impl Ord for Frontier {
    fn cmp(&self, other: &Self) -> Ordering {
        self.bound
            .cmp(&other.bound)
            .then_with(|| other.path.len().cmp(&self.path.len()))
            .then_with(|| other.path.cmp(&self.path))
    }
}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Exhaustive depth-bounded search for the largest value the target
/// vertex can reach, with the phi bound used for pruning and a
/// deterministic shortest-then-lexicographic witness tie-break.
pub fn search_optimal(
    g: &Graph,
    w: &WeightDistribution,
    v: usize,
    cfg: &SearchConfig,
) -> Result<SearchResult, SearchError> {
    if v >= g.vertex_count() {
        return Err(SearchError::Graph(GraphError::IndexOutOfRange(
            v,
            g.vertex_count(),
        )));
    }
    let universe = universe_moves(g, &cfg.universe)?;
    let certificate = bounds::phi_bound(g, v, w)?;
    let feasibility_cap = match cfg.feasibility_root {
        Some(r) => Some(bounds::distance_bound(g, r, v, &w.total())?),
        None => None,
    };
    let step_reach = universe
        .iter()
        .map(|m| {
            let xs = m.target().as_slice();
            xs.iter()
                .flat_map(|&a| xs.iter().map(move |&b| g.dist(a, b).unwrap_or(0)))
                .max()
                .unwrap_or(0)
        })
        .max()
        .unwrap_or(0);
    let mut searcher = Searcher {
        g,
        v,
        universe,
        cfg,
        best: w.get(v).clone(),
        best_witness: Vec::new(),
        explored: 0,
        pruned: 0,
        feasibility_cap,
        step_reach,
    };
    if cfg.prune_phi {
        searcher.greedy_dive(w)?;
        searcher.best_first(w)?;
    } else {
        searcher.bfs(w)?;
    }
    let witness: MoveSequence = searcher
        .best_witness
        .iter()
        .map(|&i| searcher.universe[i as usize].clone())
        .collect();
    debug_assert_eq!(apply_sequence(w, &witness).get(v), &searcher.best);
    Ok(SearchResult {
        best_value: searcher.best,
        witness,
        explored: searcher.explored,
        pruned: searcher.pruned,
        bound_certificate: certificate,
    })
}

/// Closed-form optimum for a unit of weight concentrated on `r`: the
/// value `1/(d(r,v)+1)` is attained by one sharing move on the vertex
/// set of a shortest r-v path.
pub fn single_source_optimum(
    g: &Graph,
    r: usize,
    v: usize,
) -> Result<(Rational, MoveSequence), SearchError> {
    let d = g.dist_checked(r, v)?;
    let value = Rational::new(BigInt::one(), BigInt::from(d + 1));
    if d == 0 {
        return Ok((value, Vec::new()));
    }
    let path = g.shortest_path(r, v)?;
    let witness = vec![SharingMove::new(g, VertexSet::new(path))?];
    Ok((value, witness))
}

/// All pairs `(i, j)` with `i < j` (one-based) such that the `i`-th
/// move set is contained in the `j`-th. Empty means nesting-free.
pub fn nested_move_audit(seq: &[SharingMove]) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    for i in 0..seq.len() {
        for j in i + 1..seq.len() {
            if seq[i].target().is_subset_of(seq[j].target()) {
                pairs.push((i + 1, j + 1));
            }
        }
    }
    pairs
}

/// Intermediate quantities of the nested-move counterexample audit.
#[derive(Debug, Clone, PartialEq)]
pub struct CounterexampleAudit {
    /// Best value found at the requested depth over all connected moves.
    pub best_value: Rational,
    /// Value at the target after the canonical three-move sequence.
    pub canonical_value: Rational,
    /// Target value once the first move averages the target with its
    /// neighbor: no later nesting-free move can touch the target again.
    pub stuck_value: Rational,
    /// Cap after the first move averages the two non-target leaves: a
    /// quarter of the weight remaining on the target's side.
    pub restricted_bound: Rational,
    /// Cap at the target for the distribution shifted down by the
    /// minimum weight: `(total - n * shift) / (d(r, v) + 1)`.
    pub shifted_bound: Rational,
    /// `shifted_bound` plus the shift: overall cap for nesting-free play.
    pub shifted_ceiling: Rational,
    /// How many best-value witnesses the exhaustive scan found.
    pub optimal_witnesses: u64,
    /// Whether every such witness contains a nested move pair.
    pub all_witnesses_nested: bool,
}

fn audit_index(g: &Graph, name: &str) -> Result<usize, SearchError> {
    g.vertex_index(name)
        .map_err(|_| SearchError::WrongInstance(format!("missing vertex {name}")))
}

/// Replays the counterexample analysis on the five-vertex tree with
/// vertices r, s, t, u, v, edges r-s, s-t, t-v, t-u, and weights
/// (300, 0, 144, 72, 72); checks that every best-value witness at the
/// given depth contains a nested move pair.
pub fn counterexample_audit(
    g: &Graph,
    w: &WeightDistribution,
    v: usize,
    depth: usize,
) -> Result<CounterexampleAudit, SearchError> {
    let ir = audit_index(g, "r")?;
    let is = audit_index(g, "s")?;
    let it = audit_index(g, "t")?;
    let iu = audit_index(g, "u")?;
    let iv = audit_index(g, "v")?;
    if g.vertex_count() != 5 {
        return Err(SearchError::WrongInstance("expected 5 vertices".into()));
    }
    let mut expected_edges: Vec<(usize, usize)> = [(ir, is), (is, it), (it, iv), (it, iu)]
        .iter()
        .map(|&(a, b)| (a.min(b), a.max(b)))
        .collect();
    expected_edges.sort_unstable();
    if g.edges() != expected_edges.as_slice() {
        return Err(SearchError::WrongInstance("edge set differs".into()));
    }
    let rat = |n: i64| Rational::from_integer(BigInt::from(n));
    let expected_w = [
        (ir, rat(300)),
        (is, rat(0)),
        (it, rat(144)),
        (iu, rat(72)),
        (iv, rat(72)),
    ];
    for (x, val) in &expected_w {
        if w.get(*x) != val {
            return Err(SearchError::WrongInstance("weights differ".into()));
        }
    }
    if v != iv {
        return Err(SearchError::WrongInstance("target must be v".into()));
    }

    let canonical: MoveSequence = vec![
        SharingMove::new(g, VertexSet::new(vec![it, iv]))?,
        SharingMove::new(g, VertexSet::new(vec![is, it, iu]))?,
        SharingMove::new(g, VertexSet::new(vec![ir, is, it, iv]))?,
    ];
    let canonical_value = apply_sequence(w, &canonical).get(iv).clone();

    // First move {t, v}: the target cannot be touched again without
    // nesting, so it keeps the averaged value.
    let stuck_value = apply_share(w, &canonical[0]).get(iv).clone();

    // First move {t, u}: play is then confined to {r, s, t, v}, where
    // the distribution is feasible from r, capping the target at a
    // quarter of that side's weight.
    let first_tu = SharingMove::new(g, VertexSet::new(vec![it, iu]))?;
    let after_tu = apply_share(w, &first_tu);
    let side = VertexSet::new(vec![ir, is, it, iv]);
    let restricted_bound = after_tu.sum_over(&side) / rat(4);

    // Shift every vertex down by the guaranteed minimum of 64, apply
    // the distance bound to the shifted mass, and shift back.
    let shift = rat(64);
    let shifted_total = w.total() - rat(5) * &shift;
    let shifted_bound = bounds::distance_bound(g, ir, iv, &shifted_total)?;
    let shifted_ceiling = &shifted_bound + &shift;

    let cfg = SearchConfig::new(depth, MoveUniverse::AllConnected);
    let result = search_optimal(g, w, v, &cfg)?;
    let best_value = result.best_value.clone();

    // Enumerate every sequence up to the depth, without pruning, and
    // check each best-value witness for a nested pair.
    let universe = universe_moves(g, &MoveUniverse::AllConnected)?;
    let mut optimal_witnesses = 0u64;
    let mut all_witnesses_nested = true;
    let mut stack: Vec<(WeightDistribution, Vec<usize>)> = vec![(w.clone(), Vec::new())];
    while let Some((state, path)) = stack.pop() {
        if state.get(iv) == &best_value && !path.is_empty() {
            optimal_witnesses += 1;
            let seq: MoveSequence =
                path.iter().map(|&i| universe[i].clone()).collect();
            if nested_move_audit(&seq).is_empty() {
                all_witnesses_nested = false;
            }
        }
        if path.len() < depth {
            for (idx, m) in universe.iter().enumerate() {
                let child = apply_share(&state, m);
                if child == state {
                    continue;
                }
                let mut next = path.clone();
                next.push(idx);
                stack.push((child, next));
            }
        }
    }

    Ok(CounterexampleAudit {
        best_value,
        canonical_value,
        stuck_value,
        restricted_bound,
        shifted_bound,
        shifted_ceiling,
        optimal_witnesses,
        all_witnesses_nested,
    })
}

/// Builds the star with `k` leaves of weight 2^-1, ..., 2^-k and a
/// zero-weight center, for k = 1..k_max, and returns each optimum.
/// The sequence is strictly increasing: no finite truncation attains
/// the infinite star's supremum.
pub fn star_truncation_curve(k_max: usize) -> Vec<Rational> {
    let mut values = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let names: Vec<String> = std::iter::once("v".to_string())
            .chain((1..=k).map(|i| format!("l{i}")))
            .collect();
        let edges: Vec<(String, String)> = (1..=k)
            .map(|i| ("v".to_string(), format!("l{i}")))
            .collect();
        let g = Graph::build(&names, &edges).expect("star is a valid graph");
        let mut weights = vec![Rational::from_integer(BigInt::from(0))];
        for i in 1..=k {
            weights.push(Rational::new(BigInt::one(), BigInt::one() << i));
        }
        let w = WeightDistribution::new(&g, weights).expect("non-negative");
        let (value, _) = bounds::star_optimum(&g, 0, &w).expect("star shape");
        values.push(value);
    }
    values
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::parse_rational;

    fn rat(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    fn fig_instance() -> (Graph, WeightDistribution) {
        let g = Graph::build(
            &["r", "s", "t", "u", "v"],
            &[("r", "s"), ("s", "t"), ("t", "v"), ("t", "u")],
        )
        .unwrap();
        let w = WeightDistribution::from_named_map(
            &g,
            &[
                ("r", "300"),
                ("s", "0"),
                ("t", "144"),
                ("u", "72"),
                ("v", "72"),
            ]
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect(),
        )
        .unwrap();
        (g, w)
    }

    #[test]
    fn depth_zero_returns_start_value() {
        let (g, w) = fig_instance();
        let v = g.vertex_index("v").unwrap();
        let cfg = SearchConfig::new(0, MoveUniverse::AllConnected);
        let result = search_optimal(&g, &w, v, &cfg).unwrap();
        assert_eq!(result.best_value, rat("72"));
        assert!(result.witness.is_empty());
    }

    #[test]
    fn fig_instance_reaches_132_at_depth_3() {
        let (g, w) = fig_instance();
        let v = g.vertex_index("v").unwrap();
        let cfg = SearchConfig::new(3, MoveUniverse::AllConnected);
        let result = search_optimal(&g, &w, v, &cfg).unwrap();
        assert!(result.best_value >= rat("132"));
        let replay = apply_sequence(&w, &result.witness);
        assert_eq!(replay.get(v), &result.best_value);
        assert!(result.best_value <= result.bound_certificate.value);
    }

    #[test]
    fn single_source_matches_search() {
        let (g, _) = fig_instance();
        let r = g.vertex_index("r").unwrap();
        let v = g.vertex_index("v").unwrap();
        let (value, witness) = single_source_optimum(&g, r, v).unwrap();
        assert_eq!(value, rat("1/4"));
        let w = WeightDistribution::indicator(&g, r);
        assert_eq!(apply_sequence(&w, &witness).get(v), &rat("1/4"));

        let cfg = SearchConfig::new(2, MoveUniverse::AllConnected);
        let result = search_optimal(&g, &w, v, &cfg).unwrap();
        assert_eq!(result.best_value, rat("1/4"));

        let (one, empty) = single_source_optimum(&g, r, r).unwrap();
        assert_eq!(one, rat("1"));
        assert!(empty.is_empty());
    }

    #[test]
    fn depth_monotonicity_and_universe_monotonicity() {
        let (g, w) = fig_instance();
        let v = g.vertex_index("v").unwrap();
        let mut prev = rat("0");
        for depth in 0..4 {
            let cfg = SearchConfig::new(depth, MoveUniverse::AllConnected);
            let best = search_optimal(&g, &w, v, &cfg).unwrap().best_value;
            assert!(best >= prev);
            prev = best;
        }
        let edges = SearchConfig::new(3, MoveUniverse::EdgesOnly);
        let all = SearchConfig::new(3, MoveUniverse::AllConnected);
        let be = search_optimal(&g, &w, v, &edges).unwrap().best_value;
        let ba = search_optimal(&g, &w, v, &all).unwrap().best_value;
        assert!(ba >= be);
    }

    #[test]
    fn custom_universe_and_errors() {
        let (g, w) = fig_instance();
        let v = g.vertex_index("v").unwrap();
        let t = g.vertex_index("t").unwrap();
        let only = SharingMove::new(&g, VertexSet::new(vec![t, v])).unwrap();
        let cfg = SearchConfig::new(2, MoveUniverse::Custom(vec![only]));
        let result = search_optimal(&g, &w, v, &cfg).unwrap();
        assert_eq!(result.best_value, rat("108"));
        assert_eq!(result.witness.len(), 1);

        let empty = SearchConfig::new(1, MoveUniverse::Custom(vec![]));
        assert!(matches!(
            search_optimal(&g, &w, v, &empty),
            Err(SearchError::EmptyUniverse)
        ));
    }

    #[test]
    fn nested_audit_pairs() {
        let (g, _) = fig_instance();
        let idx = |n: &str| g.vertex_index(n).unwrap();
        let mv = |names: &[&str]| {
            SharingMove::new(&g, VertexSet::new(names.iter().map(|n| idx(n)).collect()))
                .unwrap()
        };
        let seq = vec![mv(&["t", "v"]), mv(&["s", "t", "u"]), mv(&["r", "s", "t", "v"])];
        assert_eq!(nested_move_audit(&seq), vec![(1, 3)]);
        let disjoint = vec![mv(&["r", "s"]), mv(&["t", "u"])];
        assert!(nested_move_audit(&disjoint).is_empty());
        let repeated = vec![mv(&["t", "v"]), mv(&["t", "v"])];
        assert_eq!(nested_move_audit(&repeated), vec![(1, 2)]);
    }

    #[test]
    fn counterexample_audit_quantities() {
        let (g, w) = fig_instance();
        let v = g.vertex_index("v").unwrap();
        let audit = counterexample_audit(&g, &w, v, 3).unwrap();
        assert_eq!(audit.canonical_value, rat("132"));
        assert_eq!(audit.best_value, rat("132"));
        assert_eq!(audit.stuck_value, rat("108"));
        assert_eq!(audit.restricted_bound, rat("120"));
        assert_eq!(audit.shifted_bound, rat("67"));
        assert_eq!(audit.shifted_ceiling, rat("131"));
        assert!(audit.optimal_witnesses > 0);
        assert!(audit.all_witnesses_nested);
    }

    #[test]
    fn audit_rejects_wrong_instance() {
        let (g, w) = fig_instance();
        let r = g.vertex_index("r").unwrap();
        assert!(counterexample_audit(&g, &w, r, 3).is_err());
        let bad = WeightDistribution::zero(&g);
        let v = g.vertex_index("v").unwrap();
        assert!(counterexample_audit(&g, &bad, v, 3).is_err());
    }

    #[test]
    fn truncation_curve_values() {
        let curve = star_truncation_curve(4);
        assert_eq!(curve[0], rat("1/4"));
        assert_eq!(curve[1], rat("5/16"));
        for pair in curve.windows(2) {
            assert!(pair[0] < pair[1]);
        }
    }
}
