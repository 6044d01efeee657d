//! Certified upper bounds on what sharing moves can deliver: the
//! distance / feasibility bound over subsets, the multi-source phi
//! bound built from the shortest-path recursion, and exact verifiers
//! for the two supporting inequalities.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use itertools::Itertools;

use crate::dynamics::{SharingMove, WeightDistribution};
use crate::graph::{Graph, GraphError, VertexSet};
use crate::rational::Rational;

#[derive(Debug, Error, PartialEq)]
pub enum BoundsError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("graph has {0} vertices, exhaustive mode capped at {1}")]
    GraphTooLarge(usize, usize),
    #[error("target vertex may not appear in the recursion order")]
    TargetInOrder,
    #[error("duplicate vertex in recursion order")]
    DuplicateInOrder,
    #[error("value support {0:?} is not an integer interval")]
    NotAnInterval(Vec<u64>),
    #[error("empty input")]
    EmptyInput,
    #[error("distances must be positive")]
    NonPositiveDistance,
    #[error("weights must be non-negative and non-decreasing")]
    WeightsNotSorted,
    #[error("graph is not a star with the given center")]
    NotAStar,
}

/// Default cap on the exhaustive feasibility scan (`2^n` subsets).
pub const FEASIBILITY_EXHAUSTIVE_LIMIT: usize = 20;

/// Cap for the factorial-cost brute-force phi evaluation.
pub const PHI_BRUTEFORCE_LIMIT: usize = 8;

/// Outcome of the exhaustive feasibility scan: the minimizing subset
/// and its slack `w(G)(1 - rho(S)) - w(S)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityReport {
    pub feasible: bool,
    pub worst_subset: VertexSet,
    pub slack: Rational,
}

/// The phi upper bound together with the enumeration that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiCertificate {
    pub value: Rational,
    /// Vertices strictly heavier than the target, sorted non-decreasing
    /// by weight (ties by vertex order).
    pub enumeration: Vec<usize>,
    /// One-based index of the first vertex with weight `>= w(v)` in the
    /// full sorted enumeration of the other vertices.
    pub ell: usize,
}

/// `rho(S) = prod_{x in S} d(r,x) / (d(r,x) + 1)`; zero whenever
/// `r` itself is in `S`, one for the empty set.
pub fn rho(g: &Graph, r: usize, s: &VertexSet) -> Result<Rational, BoundsError> {
    let mut product = Rational::one();
    for x in s.iter() {
        let d = g.dist_checked(r, x)?;
        product *= Rational::new(BigInt::from(d), BigInt::from(d + 1));
    }
    Ok(product)
}

/// `total / (d(r,v) + 1)`: the single-target reachability bound.
pub fn distance_bound(
    g: &Graph,
    r: usize,
    v: usize,
    total: &Rational,
) -> Result<Rational, BoundsError> {
    let d = g.dist_checked(r, v)?;
    Ok(total / Rational::from_integer(BigInt::from(d + 1)))
}

/// `total * (1 - rho(S))`: upper bound on the weight a set can ever
/// hold, starting from any r-feasible distribution with the given
/// total mass.
pub fn multi_target_bound(
    g: &Graph,
    r: usize,
    s: &VertexSet,
    total: &Rational,
) -> Result<Rational, BoundsError> {
    Ok(total * (Rational::one() - rho(g, r, s)?))
}

/// Exhaustively checks `w(S) <= w(G)(1 - rho(S))` over every nonempty
/// subset and reports the minimizing-slack subset. Ties break toward
/// the canonically smallest subset.
pub fn check_feasible(
    g: &Graph,
    r: usize,
    w: &WeightDistribution,
) -> Result<FeasibilityReport, BoundsError> {
    check_feasible_with_limit(g, r, w, FEASIBILITY_EXHAUSTIVE_LIMIT)
}

pub fn check_feasible_with_limit(
    g: &Graph,
    r: usize,
    w: &WeightDistribution,
    limit: usize,
) -> Result<FeasibilityReport, BoundsError> {
    let n = g.vertex_count();
    if n > limit {
        return Err(BoundsError::GraphTooLarge(n, limit));
    }
    let total = w.total();
    // Per-vertex factors once; each subset's rho is a product over bits.
    let mut factors = Vec::with_capacity(n);
    for x in 0..n {
        let d = g.dist_checked(r, x)?;
        factors.push(Rational::new(BigInt::from(d), BigInt::from(d + 1)));
    }
    let mut best: Option<(Rational, VertexSet)> = None;
    for mask in 1u64..(1u64 << n) {
        let mut rho_s = Rational::one();
        let mut w_s = Rational::zero();
        for (x, factor) in factors.iter().enumerate() {
            if mask >> x & 1 == 1 {
                rho_s *= factor;
                w_s += w.get(x);
            }
        }
        let slack = &total * (Rational::one() - rho_s) - w_s;
        let better = match &best {
            None => true,
            Some((cur, _)) => slack < *cur,
        };
        if better {
            let subset = VertexSet::new((0..n).filter(|&x| mask >> x & 1 == 1).collect());
            best = Some((slack, subset));
        }
    }
    let (slack, worst_subset) = best.expect("n >= 1 implies at least one subset");
    Ok(FeasibilityReport {
        feasible: slack >= Rational::zero(),
        worst_subset,
        slack,
    })
}

/// Sampling falsifier for graphs too large for the exhaustive scan.
/// Returns a violating subset if one is found; `None` means "not
/// falsified", which is weaker than "feasible".
pub fn falsify_feasibility_sampled(
    g: &Graph,
    r: usize,
    w: &WeightDistribution,
    trials: usize,
    rng: &mut crate::gen::SplitMix64,
) -> Result<Option<FeasibilityReport>, BoundsError> {
    let n = g.vertex_count();
    let total = w.total();
    for _ in 0..trials {
        let mut members = Vec::new();
        while members.is_empty() {
            members = (0..n).filter(|_| rng.next_u64() & 1 == 1).collect();
        }
        let subset = VertexSet::new(members);
        let slack = &total * (Rational::one() - rho(g, r, &subset)?) - w.sum_over(&subset);
        if slack < Rational::zero() {
            return Ok(Some(FeasibilityReport {
                feasible: false,
                worst_subset: subset,
                slack,
            }));
        }
    }
    Ok(None)
}

/// The shortest-path averaging recursion:
/// `a <- a + (w(x) - a) / (d(x, v) + 1)` over the order, left to right.
pub fn f_recursion(
    g: &Graph,
    v: usize,
    order: &[usize],
    w: &WeightDistribution,
    a: &Rational,
) -> Result<Rational, BoundsError> {
    if order.contains(&v) {
        return Err(BoundsError::TargetInOrder);
    }
    let mut seen = vec![false; g.vertex_count()];
    let mut acc = a.clone();
    for &x in order {
        if seen[x] {
            return Err(BoundsError::DuplicateInOrder);
        }
        seen[x] = true;
        let d = g.dist_checked(x, v)?;
        acc = &acc + (w.get(x) - &acc) / Rational::from_integer(BigInt::from(d + 1));
    }
    Ok(acc)
}

/// The phi upper bound on everything reachable: run the recursion from
/// `a = w(v)` over the vertices strictly heavier than `v`, lightest
/// first. Equal weights are ordered by vertex index; the bound value
/// does not depend on how such ties break.
pub fn phi_bound(
    g: &Graph,
    v: usize,
    w: &WeightDistribution,
) -> Result<PhiCertificate, BoundsError> {
    let n = g.vertex_count();
    let a = w.get(v).clone();
    let mut others: Vec<usize> = (0..n).filter(|&x| x != v).collect();
    others.sort_by(|&x, &y| w.get(x).cmp(w.get(y)).then(x.cmp(&y)));
    let ell = 1 + others.iter().filter(|&&x| w.get(x) < &a).count();
    let enumeration: Vec<usize> = others
        .into_iter()
        .filter(|&x| w.get(x) > &a)
        .collect();
    let value = f_recursion(g, v, &enumeration, w, &a)?;
    Ok(PhiCertificate {
        value,
        enumeration,
        ell,
    })
}

/// Literal maximum over all enumerations of the other vertices and all
/// suffix start indices. Factorial cost; capped at
/// [`PHI_BRUTEFORCE_LIMIT`] vertices.
pub fn phi_bruteforce(
    g: &Graph,
    v: usize,
    w: &WeightDistribution,
    a: &Rational,
) -> Result<Rational, BoundsError> {
    let n = g.vertex_count();
    if n > PHI_BRUTEFORCE_LIMIT {
        return Err(BoundsError::GraphTooLarge(n, PHI_BRUTEFORCE_LIMIT));
    }
    let others: Vec<usize> = (0..n).filter(|&x| x != v).collect();
    let k = others.len();
    let mut best = a.clone(); // the empty suffix (i = n)
    for perm in others.into_iter().permutations(k) {
        for start in 0..k {
            let value = f_recursion(g, v, &perm[start..], w, a)?;
            if value > best {
                best = value;
            }
        }
        if k == 0 {
            break;
        }
    }
    Ok(best)
}

/// Exact optimum for a star with the given center: the phi bound is
/// attained by edge-sharing with the heavier leaves, lightest first.
/// Returns the optimal value and the witness sequence.
pub fn star_optimum(
    g: &Graph,
    center: usize,
    w: &WeightDistribution,
) -> Result<(Rational, Vec<SharingMove>), BoundsError> {
    let n = g.vertex_count();
    if n < 2 || g.neighbors(center).len() != n - 1 {
        return Err(BoundsError::NotAStar);
    }
    for x in 0..n {
        if x != center && g.neighbors(x) != [center] {
            return Err(BoundsError::NotAStar);
        }
    }
    let cert = phi_bound(g, center, w)?;
    let witness = cert
        .enumeration
        .iter()
        .map(|&leaf| {
            SharingMove::new(g, VertexSet::new(vec![center, leaf]))
                .expect("center-leaf pair is an edge")
        })
        .collect();
    Ok((cert.value, witness))
}

/// Verifies `f_{(x1,x2)}(a) <= f_{(x2,x1)}(a)  iff  w(x1) >= w(x2)`,
/// exactly.
pub fn swap_order_check(
    g: &Graph,
    v: usize,
    x1: usize,
    x2: usize,
    w: &WeightDistribution,
    a: &Rational,
) -> Result<bool, BoundsError> {
    let forward = f_recursion(g, v, &[x1, x2], w, a)?;
    let backward = f_recursion(g, v, &[x2, x1], w, a)?;
    Ok((forward <= backward) == (w.get(x1) >= w.get(x2)))
}

fn interval_support(values: &[u64]) -> bool {
    let mut sorted = values.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    sorted.windows(2).all(|w| w[1] == w[0] + 1)
}

/// Checks the weighted product inequality over an integer interval:
/// `s * prod x * prod y + t * prod (x+1) * prod (y+1)
///  >= (s+t) * prod x * prod (y+1)`.
/// A `false` return signals an implementation bug, not a property of
/// > the inputs.
pub fn check_interval_inequality_a(xs: &[u64], ys: &[u64]) -> Result<bool, BoundsError> {
    let s = xs.len();
    let t = ys.len();
    if s + t == 0 {
        return Err(BoundsError::EmptyInput);
    }
    let combined: Vec<u64> = xs.iter().chain(ys).copied().collect();
    if !interval_support(&combined) {
        return Err(BoundsError::NotAnInterval(combined));
    }
    let prod = |vals: &[u64], shift: u64| -> BigInt {
        vals.iter()
            .map(|&v| BigInt::from(v + shift))
            .product::<BigInt>()
    };
    let px = prod(xs, 0);
    let py = prod(ys, 0);
    let px1 = prod(xs, 1);
    let py1 = prod(ys, 1);
    let lhs = BigInt::from(s) * &px * &py + BigInt::from(t) * &px1 * &py1;
    let rhs = BigInt::from(s + t) * &px * &py1;
    Ok(lhs >= rhs)
}

/// Checks the Chebyshev-sum style coefficient inequality for positive
/// interval-support distances and sorted non-negative weights.
pub fn check_chebyshev_inequality_b(
    ds: &[u64],
    ws: &[Rational],
) -> Result<bool, BoundsError> {
    let t = ds.len();
    if t == 0 || ws.len() != t {
        return Err(BoundsError::EmptyInput);
    }
    if ds.contains(&0) {
        return Err(BoundsError::NonPositiveDistance);
    }
    if !interval_support(ds) {
        return Err(BoundsError::NotAnInterval(ds.to_vec()));
    }
    if ws.iter().any(|w| w < &Rational::zero())
        || ws.windows(2).any(|pair| pair[0] > pair[1])
    {
        return Err(BoundsError::WeightsNotSorted);
    }
    // c_i = prod_{j<i} (1 + d_j) * prod_{k>i} d_k
    let coeffs: Vec<BigInt> = (0..t)
        .map(|i| {
            let before: BigInt = ds[..i].iter().map(|&d| BigInt::from(d + 1)).product();
            let after: BigInt = ds[i + 1..].iter().map(|&d| BigInt::from(d)).product();
            before * after
        })
        .collect();
    let lhs: Rational = coeffs
        .iter()
        .zip(ws)
        .map(|(c, w)| Rational::from_integer(c.clone()) * w)
        .sum();
    let coeff_sum: BigInt = coeffs.iter().sum();
    let mean: Rational =
        ws.iter().sum::<Rational>() / Rational::from_integer(BigInt::from(t));
    let rhs = Rational::from_integer(coeff_sum) * mean;
    Ok(lhs >= rhs)
}
