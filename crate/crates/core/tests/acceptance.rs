//! Acceptance gate: ten release criteria, one pass/fail line each.
//! Every comparison is exact rational arithmetic unless a tolerance is
//! stated inline; tolerances are pinned as constants below.

use std::path::PathBuf;
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::One;

use teashare_core::bounds::{
    self, check_chebyshev_inequality_b, check_interval_inequality_a,
};
use teashare_core::dynamics::{
    apply_adjoint_sequence, apply_sequence, apply_share, inner_product, squared_norm,
};
use teashare_core::gen::{
    random_move, random_sequence, random_tree, random_weights, SplitMix64,
};
use teashare_core::io::{parse_graph, parse_moves, parse_weights, ParsedMoves};
use teashare_core::limits::{
    fixed_space_check, iterate_to_convergence, limit_distribution, MoveFamily,
};
use teashare_core::search::{
    counterexample_audit, search_optimal, single_source_optimum, star_truncation_curve,
    MoveUniverse, SearchConfig,
};
use teashare_core::{Graph, Rational, WeightDistribution};

/// Floating-point tolerance for the iterative limit cross-check.
const LIMIT_TOL: f64 = 1e-9;
/// Cycle budget for the iterative limit cross-check.
const LIMIT_MAX_CYCLES: u64 = 10_000;
/// Wall-clock budget for the counterexample reproduction.
const CRITERION_1_BUDGET_SECS: u64 = 60;

fn fixture(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name);
    std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("cannot read fixture {}: {e}", path.display()))
}

fn rat(s: &str) -> Rational {
    teashare_core::parse_rational(s).unwrap()
}

fn criterion_1_counterexample() -> Result<(), String> {
    let start = Instant::now();
    let g = parse_graph(&fixture("counterexample.graph.json")).unwrap();
    let w = parse_weights(&fixture("counterexample.weights.json"), &g).unwrap();
    let ParsedMoves::Sharing(seq) =
        parse_moves(&fixture("counterexample.moves.json"), &g).unwrap()
    else {
        return Err("move fixture is not a sharing sequence".into());
    };
    let v = g.vertex_index("v").unwrap();
    let after = apply_sequence(&w, &seq);
    if after.get(v) != &rat("132") {
        return Err(format!("simulation gave {}, wanted 132", after.get(v)));
    }
    let cfg = SearchConfig::new(3, MoveUniverse::AllConnected);
    let result = search_optimal(&g, &w, v, &cfg).map_err(|e| e.to_string())?;
    if result.best_value < rat("132") {
        return Err(format!("search best {} < 132", result.best_value));
    }
    if apply_sequence(&w, &result.witness).get(v) != &result.best_value {
        return Err("witness does not replay to best value".into());
    }
    let audit = counterexample_audit(&g, &w, v, 3).map_err(|e| e.to_string())?;
    let expect = [
        (&audit.stuck_value, "108"),
        (&audit.restricted_bound, "120"),
        (&audit.shifted_bound, "67"),
        (&audit.shifted_ceiling, "131"),
    ];
    for (got, want) in expect {
        if got != &rat(want) {
            return Err(format!("audit value {got}, wanted {want}"));
        }
    }
    if !audit.all_witnesses_nested || audit.optimal_witnesses == 0 {
        return Err("expected every optimal witness to contain a nested pair".into());
    }
    let elapsed = start.elapsed();
    if elapsed.as_secs() >= CRITERION_1_BUDGET_SECS {
        return Err(format!("took {elapsed:?}, budget {CRITERION_1_BUDGET_SECS}s"));
    }
    Ok(())
}

fn criterion_2_single_source() -> Result<(), String> {
    let mut rng = SplitMix64::new(19978);
    for trial in 0..50 {
        let n = rng.range(2, 9) as usize;
        let g = random_tree(&mut rng, n);
        let r = rng.below(n as u64) as usize;
        let v = rng.below(n as u64) as usize;
        let w = WeightDistribution::indicator(&g, r);
        let d = g.dist_checked(r, v).unwrap();
        let expected = Rational::new(BigInt::one(), BigInt::from(d + 1));
        let phi = bounds::phi_bound(&g, v, &w).unwrap().value;
        let dist = bounds::distance_bound(&g, r, v, &w.total()).unwrap();
        if phi != expected || dist != expected {
            return Err(format!("trial {trial}: bounds disagree with 1/(d+1)"));
        }
        let edge_cfg = SearchConfig::new(2 * n, MoveUniverse::EdgesOnly);
        let edge_best = search_optimal(&g, &w, v, &edge_cfg)
            .map_err(|e| e.to_string())?
            .best_value;
        if edge_best > expected {
            return Err(format!("trial {trial}: edge search exceeded the bound"));
        }
        let (value, witness) = single_source_optimum(&g, r, v).unwrap();
        if value != expected || apply_sequence(&w, &witness).get(v) != &expected {
            return Err(format!("trial {trial}: path witness does not attain 1/(d+1)"));
        }
    }
    Ok(())
}

fn criterion_3_star_optimality() -> Result<(), String> {
    let mut rng = SplitMix64::new(0x57A2);
    for trial in 0..100 {
        let t = rng.range(1, 5) as usize;
        let names: Vec<String> = std::iter::once("c".to_string())
            .chain((1..=t).map(|i| format!("l{i}")))
            .collect();
        let edges: Vec<(String, String)> = (1..=t)
            .map(|i| ("c".to_string(), format!("l{i}")))
            .collect();
        let g = Graph::build(&names, &edges).unwrap();
        let w = random_weights(&g, &mut rng, 16, 7);
        let (closed_form, witness) = bounds::star_optimum(&g, 0, &w).unwrap();
        if apply_sequence(&w, &witness).get(0) != &closed_form {
            return Err(format!("trial {trial}: star witness does not replay"));
        }
        let cfg = SearchConfig::new(t + 2, MoveUniverse::AllConnected);
        let searched = search_optimal(&g, &w, 0, &cfg)
            .map_err(|e| e.to_string())?
            .best_value;
        if searched != closed_form {
            return Err(format!(
                "trial {trial}: search {searched} != closed form {closed_form}"
            ));
        }
    }
    Ok(())
}

fn criterion_4_duality() -> Result<(), String> {
    let mut rng = SplitMix64::new(0xD0A1);
    for trial in 0..200 {
        let n = rng.range(2, 10) as usize;
        let g = random_tree(&mut rng, n);
        let w = random_weights(&g, &mut rng, 25, 9);
        let c = random_weights(&g, &mut rng, 25, 9);
        let len = rng.range(0, 8) as usize;
        let seq = random_sequence(&g, &mut rng, len, n);
        let lhs = inner_product(&c, &apply_sequence(&w, &seq)).unwrap();
        let rhs = inner_product(&w, &apply_adjoint_sequence(&c, &seq)).unwrap();
        if lhs != rhs {
            return Err(format!("trial {trial}: {lhs} != {rhs}"));
        }
    }
    Ok(())
}

fn criterion_5_feasibility_preservation() -> Result<(), String> {
    let mut rng = SplitMix64::new(0xFEA5);
    let mut starts: Vec<(Graph, WeightDistribution, usize)> = Vec::new();
    for name in ["feasible1", "feasible2", "feasible3"] {
        let g = parse_graph(&fixture(&format!("{name}.graph.json"))).unwrap();
        let w = parse_weights(&fixture(&format!("{name}.weights.json")), &g).unwrap();
        let r = g.vertex_index("r").unwrap();
        starts.push((g, w, r));
    }
    for trial in 0..100 {
        let (g, w, r) = if trial < starts.len() {
            starts[trial].clone()
        } else {
            let n = rng.range(2, 10) as usize;
            let g = random_tree(&mut rng, n);
            let r = rng.below(n as u64) as usize;
            let w = WeightDistribution::indicator(&g, r);
            (g, w, r)
        };
        let mut state = w;
        for step in 0..=10 {
            let report = bounds::check_feasible(&g, r, &state).unwrap();
            if !report.feasible {
                return Err(format!(
                    "trial {trial} step {step}: infeasible at subset {:?} (slack {})",
                    report.worst_subset, report.slack
                ));
            }
            if step < 10 {
                let m = random_move(&g, &mut rng, g.vertex_count());
                state = apply_share(&state, &m);
            }
        }
    }
    Ok(())
}

fn criterion_6_phi_descent() -> Result<(), String> {
    let mut rng = SplitMix64::new(0xF1DE);
    for trial in 0..1000 {
        let n = rng.range(2, 9) as usize;
        let g = random_tree(&mut rng, n);
        let w = random_weights(&g, &mut rng, 20, 8);
        let v = rng.below(n as u64) as usize;
        // Alternate between edge moves and general connected moves.
        let m = if trial % 2 == 0 {
            random_move(&g, &mut rng, 2)
        } else {
            random_move(&g, &mut rng, n)
        };
        let before = bounds::phi_bound(&g, v, &w).unwrap().value;
        let after_w = apply_share(&w, &m);
        let after = bounds::phi_bound(&g, v, &after_w).unwrap().value;
        if after > before {
            return Err(format!("trial {trial}: phi rose from {before} to {after}"));
        }
    }
    Ok(())
}

fn criterion_7_inequality_verifiers() -> Result<(), String> {
    // First inequality: exhaustive over all interval-support multisets
    // with at most 6 elements drawn from [0, 6], and every assignment
    // of the elements to the two sides.
    let mut checked = 0u64;
    for lo in 0u64..=6 {
        for hi in lo..=6 {
            let width = (hi - lo + 1) as usize;
            if width > 6 {
                continue;
            }
            // Multiplicities >= 1 per value in the interval, total <= 6.
            let mut mults = vec![1u64; width];
            loop {
                let total: u64 = mults.iter().sum();
                if total <= 6 {
                    let values: Vec<u64> = (0..width)
                        .flat_map(|i| {
                            std::iter::repeat_n(lo + i as u64, mults[i] as usize)
                        })
                        .collect();
                    let k = values.len();
                    for mask in 0u64..(1 << k) {
                        let xs: Vec<u64> = values
                            .iter()
                            .enumerate()
                            .filter(|(i, _)| mask >> i & 1 == 0)
                            .map(|(_, &v)| v)
                            .collect();
                        let ys: Vec<u64> = values
                            .iter()
                            .enumerate()
                            .filter(|(i, _)| mask >> i & 1 == 1)
                            .map(|(_, &v)| v)
                            .collect();
                        if !check_interval_inequality_a(&xs, &ys)
                            .map_err(|e| e.to_string())?
                        {
                            return Err(format!("violated at xs={xs:?} ys={ys:?}"));
                        }
                        checked += 1;
                    }
                }
                // next multiplicity vector with entries in 1..=6
                let mut pos = 0;
                loop {
                    if pos == width {
                        break;
                    }
                    mults[pos] += 1;
                    if mults[pos] <= 6 {
                        break;
                    }
                    mults[pos] = 1;
                    pos += 1;
                }
                if pos == width {
                    break;
                }
            }
        }
    }
    if checked == 0 {
        return Err("no interval cases enumerated".into());
    }
    // Second inequality: all interval-support distance vectors with
    // t <= 5 positive values <= 6, each with random sorted weights.
    let mut rng = SplitMix64::new(0xB1);
    let mut trials = 0u64;
    while trials < 500 {
        for t in 1u64..=5 {
            for lo in 1u64..=6 {
                if lo + t - 1 > 6 {
                    continue;
                }
                let ds: Vec<u64> = (lo..lo + t).collect();
                let mut ws: Vec<Rational> =
                    (0..t).map(|_| rng.rational(20, 8)).collect();
                ws.sort();
                if !check_chebyshev_inequality_b(&ds, &ws).map_err(|e| e.to_string())? {
                    return Err(format!("violated at ds={ds:?}"));
                }
                trials += 1;
            }
        }
    }
    Ok(())
}

fn criterion_8_limits() -> Result<(), String> {
    let mut rng = SplitMix64::new(0x11A1);
    for trial in 0..50 {
        let n = rng.range(2, 12) as usize;
        let g = random_tree(&mut rng, n);
        let w = random_weights(&g, &mut rng, 20, 8);
        let len = rng.range(1, 5) as usize;
        let schedule = random_sequence(&g, &mut rng, len, n);
        let fam = MoveFamily::new(schedule.clone()).unwrap();
        let limit = limit_distribution(&g, &w, &fam);
        if limit.total() != w.total() {
            return Err(format!("trial {trial}: conservation violated"));
        }
        if !fixed_space_check(&fam, &limit) {
            return Err(format!("trial {trial}: limit not in fixed space"));
        }
        let outcome =
            iterate_to_convergence(&g, &w, &schedule, LIMIT_MAX_CYCLES, LIMIT_TOL)
                .unwrap();
        if !outcome.converged {
            return Err(format!("trial {trial}: no convergence in 10^4 cycles"));
        }
        for (x, approx) in outcome.state.iter().enumerate() {
            let exact = teashare_core::rational::rational_to_f64(limit.get(x));
            if (approx - exact).abs() > LIMIT_TOL {
                return Err(format!(
                    "trial {trial}: vertex {x} off by {}",
                    (approx - exact).abs()
                ));
            }
        }
    }
    Ok(())
}

fn criterion_9_norm_descent() -> Result<(), String> {
    let mut rng = SplitMix64::new(0x40D3);
    for trial in 0..1000 {
        let n = rng.range(2, 10) as usize;
        let g = random_tree(&mut rng, n);
        let w = random_weights(&g, &mut rng, 20, 8);
        let m = random_move(&g, &mut rng, n);
        let after = apply_share(&w, &m);
        let before_norm = squared_norm(&w);
        let after_norm = squared_norm(&after);
        if after_norm > before_norm {
            return Err(format!("trial {trial}: norm increased"));
        }
        let first = w.get(m.target().as_slice()[0]);
        let constant = m.target().iter().all(|x| w.get(x) == first);
        if (after_norm == before_norm) != constant {
            return Err(format!("trial {trial}: strictness mismatch"));
        }
    }
    Ok(())
}

fn criterion_10_star_truncation() -> Result<(), String> {
    let curve = star_truncation_curve(10);
    if curve.len() != 10 {
        return Err("expected 10 values".into());
    }
    if curve[0] != rat("1/4") || curve[1] != rat("5/16") {
        return Err(format!("k=1,2 gave {}, {}", curve[0], curve[1]));
    }
    for (k, pair) in curve.windows(2).enumerate() {
        if pair[0] >= pair[1] {
            return Err(format!("not strictly increasing at k={}", k + 1));
        }
    }
    // The supremum of the infinite star is 1/3; no truncation attains it.
    if curve[9] >= rat("1/3") {
        return Err("curve reached the infinite-star supremum".into());
    }
    Ok(())
}

#[test]
fn acceptance() {
    type Criterion = (&'static str, fn() -> Result<(), String>);
    let criteria: Vec<Criterion> = vec![
        ("counterexample reproduction", criterion_1_counterexample),
        ("single-source tightness", criterion_2_single_source),
        ("star optimality", criterion_3_star_optimality),
        ("adjoint duality", criterion_4_duality),
        ("feasibility preservation", criterion_5_feasibility_preservation),
        ("phi descent", criterion_6_phi_descent),
        ("inequality verifiers", criterion_7_inequality_verifiers),
        ("limits of move families", criterion_8_limits),
        ("norm descent", criterion_9_norm_descent),
        ("star truncation curve", criterion_10_star_truncation),
    ];
    let mut failures = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let started = Instant::now();
        match run() {
            Ok(()) => {
                println!(
                    "criterion {:2} ({name}): PASS [{:.2?}]",
                    i + 1,
                    started.elapsed()
                );
            }
            Err(msg) => {
                println!("criterion {:2} ({name}): FAIL — {msg}", i + 1);
                failures.push(format!("criterion {} ({name}): {msg}", i + 1));
            }
        }
    }
    assert!(failures.is_empty(), "failed criteria:\n{}", failures.join("\n"));
}
