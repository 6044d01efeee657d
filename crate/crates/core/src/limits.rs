//! Limits of infinitely repeated move families. The exact limit is a
//! projection with a closed form: average over each connected
//! component of the hypergraph whose edges are the family's move sets.
//! Floating-point iteration exists only as a convergence cross-check.

use num_bigint::BigInt;
use thiserror::Error;

use crate::dynamics::{MoveSequence, SharingMove, WeightDistribution};
use crate::graph::{Graph, GraphError, VertexSet};
use crate::rational::{rational_to_f64, Rational};

#[derive(Debug, Error, PartialEq)]
pub enum LimitsError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("move family must be nonempty")]
    EmptyFamily,
    #[error("schedule must be nonempty")]
    EmptySchedule,
    #[error("tolerance must be positive")]
    NonPositiveTolerance,
}

/// A set of sharing moves, each understood to recur infinitely often.
#[derive(Debug, Clone)]
pub struct MoveFamily {
    moves: Vec<SharingMove>,
}

impl MoveFamily {
    pub fn new(moves: Vec<SharingMove>) -> Result<Self, LimitsError> {
        if moves.is_empty() {
            return Err(LimitsError::EmptyFamily);
        }
        let mut moves = moves;
        moves.sort_by(|a, b| a.target().as_slice().cmp(b.target().as_slice()));
        moves.dedup_by(|a, b| a.target() == b.target());
        Ok(MoveFamily { moves })
    }

    pub fn moves(&self) -> &[SharingMove] {
        &self.moves
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Connected components of the hypergraph whose edges are the family's
/// move sets, restricted to vertices that occur in some move. Sorted
/// by least member.
pub fn family_components(g: &Graph, fam: &MoveFamily) -> Vec<VertexSet> {
    let n = g.vertex_count();
    let mut uf = UnionFind::new(n);
    let mut covered = vec![false; n];
    for m in fam.moves() {
        let vs = m.target().as_slice();
        for &x in vs {
            covered[x] = true;
        }
        for pair in vs.windows(2) {
            uf.union(pair[0], pair[1]);
        }
    }
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (x, &hit) in covered.iter().enumerate() {
        if hit {
            let root = uf.find(x);
            groups[root].push(x);
        }
    }
    groups
        .into_iter()
        .filter(|g| !g.is_empty())
        .map(VertexSet::new)
        .collect()
}

/// Exact limit of applying the family's moves forever (every move
/// infinitely often): each hypergraph component is replaced by its
/// average; untouched vertices keep their weight.
pub fn limit_distribution(
    g: &Graph,
    w: &WeightDistribution,
    fam: &MoveFamily,
) -> WeightDistribution {
    let mut weights = w.as_slice().to_vec();
    for component in family_components(g, fam) {
        let avg =
            w.sum_over(&component) / Rational::from_integer(BigInt::from(component.len()));
        for x in component.iter() {
            weights[x] = avg.clone();
        }
    }
    WeightDistribution::from_raw(weights)
}

/// The finite sequence of component moves that reaches the limit
/// exactly: one sharing move per hypergraph component. Each component
/// union is connected in the graph because the move sets are.
pub fn reachability_witness(g: &Graph, fam: &MoveFamily) -> MoveSequence {
    family_components(g, fam)
        .into_iter()
        .map(|c| {
            SharingMove::new(g, c)
                .expect("union of overlapping connected move sets is connected")
        })
        .collect()
}

/// True iff `w` is constant on every move set of the family,
/// equivalently fixed by every move's averaging operator.
pub fn fixed_space_check(fam: &MoveFamily, w: &WeightDistribution) -> bool {
    fam.moves().iter().all(|m| {
        let mut values = m.target().iter().map(|x| w.get(x));
        match values.next() {
            None => true,
            Some(first) => values.all(|v| v == first),
        }
    })
}

/// Outcome of the floating-point convergence cross-check.
#[derive(Debug, Clone)]
pub struct IterationOutcome {
    pub state: Vec<f64>,
    pub cycles: u64,
    /// Whether the per-cycle change dropped below the tolerance before
    /// the repeat budget ran out.
    pub converged: bool,
}

/// Cyclically applies the schedule in floating point until the largest
/// per-vertex change over a full cycle drops below `tol`, or `repeats`
/// cycles elapse. The exact limit is the closed form above; this is a
/// diagnostic, not the source of truth.
pub fn iterate_to_convergence(
    g: &Graph,
    w: &WeightDistribution,
    schedule: &MoveSequence,
    repeats: u64,
    tol: f64,
) -> Result<IterationOutcome, LimitsError> {
    let _ = g;
    if schedule.is_empty() {
        return Err(LimitsError::EmptySchedule);
    }
    if tol <= 0.0 || tol.is_nan() {
        return Err(LimitsError::NonPositiveTolerance);
    }
    let mut state = w.to_f64_vec();
    let mut cycles = 0u64;
    let mut converged = false;
    while cycles < repeats {
        let before = state.clone();
        for m in schedule {
            let vs = m.target().as_slice();
            let avg: f64 = vs.iter().map(|&x| state[x]).sum::<f64>() / vs.len() as f64;
            for &x in vs {
                state[x] = avg;
            }
        }
        cycles += 1;
        let change = state
            .iter()
            .zip(&before)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        if change < tol {
            converged = true;
            break;
        }
    }
    Ok(IterationOutcome {
        state,
        cycles,
        converged,
    })
}

/// Certified per-vertex deviation envelope: since the limit is the
/// orthogonal projection of every reachable state, the distance from
/// `state` to the limit is at most `sqrt(|state|^2 - |limit|^2)`.
pub fn deviation_envelope(state: &[f64], limit: &WeightDistribution) -> f64 {
    let state_sq: f64 = state.iter().map(|x| x * x).sum();
    let limit_sq: f64 = limit
        .as_slice()
        .iter()
        .map(|x| {
            let f = rational_to_f64(x);
            f * f
        })
        .sum();
    (state_sq - limit_sq).max(0.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::apply_sequence;
    use crate::rational::parse_rational;

    fn rat(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    fn path(names: &[&str]) -> Graph {
        let edges: Vec<(&str, &str)> =
            names.windows(2).map(|w| (w[0], w[1])).collect();
        Graph::build(names, &edges).unwrap()
    }

    fn mv(g: &Graph, names: &[&str]) -> SharingMove {
        let idx = names
            .iter()
            .map(|n| g.vertex_index(n).unwrap())
            .collect();
        SharingMove::new(g, VertexSet::new(idx)).unwrap()
    }

    #[test]
    fn overlapping_moves_average_everything() {
        let g = path(&["a", "b", "c"]);
        let w =
            WeightDistribution::new(&g, vec![rat("1"), rat("0"), rat("0")]).unwrap();
        let fam = MoveFamily::new(vec![mv(&g, &["a", "b"]), mv(&g, &["b", "c"])]).unwrap();
        let limit = limit_distribution(&g, &w, &fam);
        assert_eq!(limit.as_slice(), &[rat("1/3"), rat("1/3"), rat("1/3")]);
        assert!(fixed_space_check(&fam, &limit));
        assert_eq!(limit.total(), w.total());
    }

    #[test]
    fn singleton_move_is_identity() {
        let g = path(&["a", "b"]);
        let w = WeightDistribution::new(&g, vec![rat("3"), rat("5")]).unwrap();
        let fam = MoveFamily::new(vec![mv(&g, &["a"])]).unwrap();
        assert_eq!(limit_distribution(&g, &w, &fam), w);
    }

    #[test]
    fn disjoint_moves_average_per_component() {
        let g = path(&["a", "b", "c", "d"]);
        let w = WeightDistribution::new(
            &g,
            vec![rat("1"), rat("0"), rat("0"), rat("2")],
        )
        .unwrap();
        let fam = MoveFamily::new(vec![mv(&g, &["a", "b"]), mv(&g, &["c", "d"])]).unwrap();
        let limit = limit_distribution(&g, &w, &fam);
        assert_eq!(
            limit.as_slice(),
            &[rat("1/2"), rat("1/2"), rat("1"), rat("1")]
        );
        let comps = family_components(&g, &fam);
        assert_eq!(comps.len(), 2);
        assert_eq!(comps[0], VertexSet::new(vec![0, 1]));
        assert_eq!(comps[1], VertexSet::new(vec![2, 3]));
    }

    #[test]
    fn idempotence_and_reachability() {
        let g = path(&["a", "b", "c", "d"]);
        let w = WeightDistribution::new(
            &g,
            vec![rat("7"), rat("1/3"), rat("0"), rat("2")],
        )
        .unwrap();
        let fam = MoveFamily::new(vec![
            mv(&g, &["a", "b"]),
            mv(&g, &["b", "c"]),
        ])
        .unwrap();
        let once = limit_distribution(&g, &w, &fam);
        let twice = limit_distribution(&g, &once, &fam);
        assert_eq!(once, twice);
        let witness = reachability_witness(&g, &fam);
        assert_eq!(apply_sequence(&w, &witness), once);
    }

    #[test]
    fn fixed_space_examples() {
        let g = path(&["a", "b", "c"]);
        let fam = MoveFamily::new(vec![mv(&g, &["a", "b"])]).unwrap();
        let uniform = WeightDistribution::new(&g, vec![rat("2"); 3]).unwrap();
        assert!(fixed_space_check(&fam, &uniform));
        let uneven =
            WeightDistribution::new(&g, vec![rat("1"), rat("2"), rat("2")]).unwrap();
        assert!(!fixed_space_check(&fam, &uneven));
    }

    #[test]
    fn iteration_converges_to_limit() {
        let g = path(&["a", "b", "c"]);
        let w =
            WeightDistribution::new(&g, vec![rat("1"), rat("0"), rat("0")]).unwrap();
        let schedule = vec![mv(&g, &["a", "b"]), mv(&g, &["b", "c"])];
        let outcome =
            iterate_to_convergence(&g, &w, &schedule, 10_000, 1e-9).unwrap();
        assert!(outcome.converged);
        for x in &outcome.state {
            assert!((x - 1.0 / 3.0).abs() < 1e-8);
        }
        let fam = MoveFamily::new(schedule.clone()).unwrap();
        let limit = limit_distribution(&g, &w, &fam);
        assert!(deviation_envelope(&outcome.state, &limit) < 1e-7);
    }

    #[test]
    fn single_move_schedule_converges_in_one_cycle() {
        let g = path(&["a", "b"]);
        let w = WeightDistribution::new(&g, vec![rat("1"), rat("0")]).unwrap();
        let schedule = vec![mv(&g, &["a", "b"])];
        let outcome = iterate_to_convergence(&g, &w, &schedule, 10, 1e-12).unwrap();
        assert!(outcome.converged);
        assert!(outcome.cycles <= 2);
        assert_eq!(outcome.state, vec![0.5, 0.5]);
    }

    #[test]
    fn fixpoint_detected_immediately() {
        let g = path(&["a", "b", "c"]);
        let w = WeightDistribution::new(&g, vec![rat("2"); 3]).unwrap();
        let schedule = vec![mv(&g, &["a", "b", "c"])];
        let outcome = iterate_to_convergence(&g, &w, &schedule, 10, 1e-12).unwrap();
        assert!(outcome.converged);
        assert_eq!(outcome.cycles, 1);
    }

    #[test]
    fn input_validation() {
        let g = path(&["a", "b"]);
        let w = WeightDistribution::zero(&g);
        assert_eq!(
            MoveFamily::new(vec![]).unwrap_err(),
            LimitsError::EmptyFamily
        );
        assert_eq!(
            iterate_to_convergence(&g, &w, &vec![], 10, 1e-9).unwrap_err(),
            LimitsError::EmptySchedule
        );
        let schedule = vec![mv(&g, &["a", "b"])];
        assert_eq!(
            iterate_to_convergence(&g, &w, &schedule, 10, 0.0).unwrap_err(),
            LimitsError::NonPositiveTolerance
        );
    }
}
