//! Randomized self-check suites for the `verify` subcommand.
//!
//! Each check draws random instances from the seeded generator, tests
//! one exact property of the engine, and reports a pass/fail count.
//! The first counterexample found (if any) is embedded in the report
//! so a failure can be reproduced directly.

use num_traits::Zero;
use serde_json::{json, Map, Value};

use teashare_core::bounds::{
    check_feasible, check_interval_inequality_a, check_chebyshev_inequality_b, f_recursion,
    phi_bound, phi_bruteforce, swap_order_check,
};
use teashare_core::dynamics::{
    apply_adjoint_sequence, apply_quasi, apply_sequence, apply_share, inner_product,
    quasi_hull_decomposition, squared_norm, QuasiMove,
};
use teashare_core::gen::{
    random_connected_graph, random_move, random_sequence, random_tree, random_weights, SplitMix64,
};
use teashare_core::io::{moves_to_lists, weights_to_map};
use teashare_core::limits::{limit_distribution, reachability_witness, MoveFamily};
use teashare_core::search::counterexample_audit;
use teashare_core::{format_rational, Graph, Rational, WeightDistribution};

pub struct SuiteReport {
    pub passed: bool,
    pub value: Value,
}

struct CheckOutcome {
    name: &'static str,
    trials: usize,
    failed: usize,
    counterexample: Option<Value>,
}

fn instance(rng: &mut SplitMix64, n_max: u64) -> (Graph, WeightDistribution) {
    let n = rng.range(2, n_max + 1) as usize;
    let extra = rng.range(0, 3) as usize;
    let g = random_connected_graph(rng, n, extra);
    let w = random_weights(&g, rng, 12, 4);
    (g, w)
}

fn dump(g: &Graph, w: &WeightDistribution, extra: Value) -> Value {
    let edges: Vec<[String; 2]> = g
        .edges()
        .iter()
        .map(|&(a, b)| [g.vertex_name(a).to_string(), g.vertex_name(b).to_string()])
        .collect();
    json!({
        "graph": { "vertices": (0..g.vertex_count()).map(|i| g.vertex_name(i).to_string()).collect::<Vec<_>>(), "edges": edges },
        "weights": Value::Object(
            weights_to_map(g, w).into_iter().map(|(k, v)| (k, Value::String(v))).collect::<Map<_, _>>()
        ),
        "detail": extra,
    })
}

/// Runs `trials` independent random trials of `body`; `body` returns
/// `None` on success or a counterexample dump on failure.
fn check(
    name: &'static str,
    seed: u64,
    trials: usize,
    mut body: impl FnMut(&mut SplitMix64) -> Option<Value>,
) -> CheckOutcome {
    let mut rng = SplitMix64::new(seed);
    let mut failed = 0;
    let mut counterexample = None;
    for _ in 0..trials {
        if let Some(dump) = body(&mut rng) {
            failed += 1;
            if counterexample.is_none() {
                counterexample = Some(dump);
            }
        }
    }
    CheckOutcome {
        name,
        trials,
        failed,
        counterexample,
    }
}

fn inequalities_checks(seed: u64, trials: usize) -> Vec<CheckOutcome> {
    vec![
        check("interval product inequality", seed ^ 0x11, trials, |rng| {
            // Split a contiguous run of distances (with random repeats)
            // into two halves by a fair coin per copy.
            let total = rng.range(1, 7);
            let lo = rng.range(0, 4);
            let mut xs: Vec<u64> = Vec::new();
            let mut ys: Vec<u64> = Vec::new();
            for value in lo..lo + total {
                let copies = rng.range(1, 3);
                for _ in 0..copies {
                    if rng.below(2) == 0 {
                        xs.push(value);
                    } else {
                        ys.push(value);
                    }
                }
            }
            match check_interval_inequality_a(&xs, &ys) {
                Ok(true) => None,
                Ok(false) | Err(_) => Some(json!({
                    "check": "interval product inequality",
                    "xs": xs,
                    "ys": ys,
                })),
            }
        }),
        check("weighted mean comparison", seed ^ 0x22, trials, |rng| {
            let t = rng.range(1, 6);
            let lo = rng.range(1, 5);
            let ds: Vec<u64> = (lo..lo + t).collect();
            let mut ws: Vec<Rational> = (0..t).map(|_| rng.rational(10, 4)).collect();
            ws.sort();
            match check_chebyshev_inequality_b(&ds, &ws) {
                Ok(true) => None,
                Ok(false) | Err(_) => Some(json!({
                    "check": "weighted mean comparison",
                    "ds": ds,
                    "ws": ws.iter().map(format_rational).collect::<Vec<_>>(),
                })),
            }
        }),
        check("recursion monotone in start value", seed ^ 0x33, trials, |rng| {
            let (g, w) = instance(rng, 7);
            let v = rng.below(g.vertex_count() as u64) as usize;
            let others: Vec<usize> = (0..g.vertex_count()).filter(|&x| x != v).collect();
            if others.is_empty() {
                return None;
            }
            let a = Rational::from_integer(rng.range(0, 5).into());
            let b = &a + Rational::from_integer(rng.range(1, 5).into());
            let fa = f_recursion(&g, v, &others, &w, &a).ok()?;
            let fb = f_recursion(&g, v, &others, &w, &b).ok()?;
            if fa < fb {
                None
            } else {
                Some(dump(&g, &w, json!({"a": format_rational(&a), "b": format_rational(&b)})))
            }
        }),
        check("swap order rule", seed ^ 0x44, trials, |rng| {
            let (g, w) = instance(rng, 7);
            if g.vertex_count() < 3 {
                return None;
            }
            let v = rng.below(g.vertex_count() as u64) as usize;
            let mut pick = || loop {
                let x = rng.below(g.vertex_count() as u64) as usize;
                if x != v {
                    return x;
                }
            };
            let x1 = pick();
            let x2 = {
                let mut x = pick();
                while x == x1 {
                    x = pick();
                }
                x
            };
            let a = Rational::zero();
            match swap_order_check(&g, v, x1, x2, &w, &a) {
                Ok(true) => None,
                _ => Some(dump(&g, &w, json!({"x1": g.vertex_name(x1), "x2": g.vertex_name(x2)}))),
            }
        }),
    ]
}

fn feasibility_checks(seed: u64, trials: usize) -> Vec<CheckOutcome> {
    vec![check(
        "feasibility preserved by random sequences",
        seed ^ 0x55,
        trials,
        |rng| {
            let n = rng.range(2, 7) as usize;
            let g = random_tree(rng, n);
            let r = rng.below(n as u64) as usize;
            let w = WeightDistribution::indicator(&g, r);
            let seq = random_sequence(&g, rng, 6, n);
            let mut cur = w.clone();
            for m in &seq {
                cur = apply_share(&cur, m);
                let report = check_feasible(&g, r, &cur).expect("small instance");
                if !report.feasible {
                    return Some(dump(
                        &g,
                        &w,
                        json!({"moves": moves_to_lists(&g, &seq)}),
                    ));
                }
            }
            None
        },
    )]
}

fn phi_checks(seed: u64, trials: usize) -> Vec<CheckOutcome> {
    vec![
        check("phi never increases under a move", seed ^ 0x66, trials, |rng| {
            let (g, w) = instance(rng, 7);
            let v = rng.below(g.vertex_count() as u64) as usize;
            let m = random_move(&g, rng, g.vertex_count());
            let before = phi_bound(&g, v, &w).expect("valid instance").value;
            let after_w = apply_share(&w, &m);
            let after = phi_bound(&g, v, &after_w).expect("valid instance").value;
            if after <= before {
                None
            } else {
                Some(dump(&g, &w, json!({"move": moves_to_lists(&g, std::slice::from_ref(&m))})))
            }
        }),
        check("phi matches exhaustive enumeration", seed ^ 0x77, trials, |rng| {
            let (g, w) = instance(rng, 6);
            let v = rng.below(g.vertex_count() as u64) as usize;
            let fast = phi_bound(&g, v, &w).expect("valid instance").value;
            let brute = phi_bruteforce(&g, v, &w, w.get(v)).expect("small instance");
            if fast == brute {
                None
            } else {
                Some(dump(
                    &g,
                    &w,
                    json!({"fast": format_rational(&fast), "brute": format_rational(&brute)}),
                ))
            }
        }),
    ]
}

fn duality_checks(seed: u64, trials: usize) -> Vec<CheckOutcome> {
    vec![
        check("adjoint identity", seed ^ 0x88, trials, |rng| {
            let (g, w) = instance(rng, 8);
            let n = g.vertex_count();
            let c = random_weights(&g, rng, 9, 3);
            let seq = random_sequence(&g, rng, 5, n);
            let lhs = inner_product(&c, &apply_sequence(&w, &seq)).expect("same length");
            let rhs = inner_product(&w, &apply_adjoint_sequence(&c, &seq)).expect("same length");
            if lhs == rhs {
                None
            } else {
                Some(dump(&g, &w, json!({"moves": moves_to_lists(&g, &seq)})))
            }
        }),
        check("quasi moves lie in the edge-sharing hull", seed ^ 0x99, trials, |rng| {
            let (g, w) = instance(rng, 8);
            let edges = g.edges();
            if edges.is_empty() {
                return None;
            }
            let (a, b) = edges[rng.below(edges.len() as u64) as usize];
            let (x, y) = if w.get(a) <= w.get(b) { (a, b) } else { (b, a) };
            let gap = w.get(y) - w.get(x);
            let s = &gap * Rational::new(1.into(), 4.into());
            let q = QuasiMove { x, y, amount: s };
            let direct = apply_quasi(&g, &w, &q).expect("valid quasi move");
            let hull = quasi_hull_decomposition(&g, &w, std::slice::from_ref(&q))
                .expect("valid quasi move");
            let mut total = Rational::zero();
            let mut combo = vec![Rational::zero(); g.vertex_count()];
            for (coeff, state) in &hull {
                total += coeff;
                for (i, entry) in combo.iter_mut().enumerate() {
                    *entry += coeff * state.get(i);
                }
            }
            let recombined = combo
                .iter()
                .enumerate()
                .all(|(i, entry)| entry == direct.get(i));
            if total == Rational::from_integer(1.into()) && recombined {
                None
            } else {
                Some(dump(&g, &w, json!({"edge": [g.vertex_name(x), g.vertex_name(y)]})))
            }
        }),
    ]
}

fn limits_checks(seed: u64, trials: usize) -> Vec<CheckOutcome> {
    vec![
        check("norm never increases under a move", seed ^ 0xAA, trials, |rng| {
            let (g, w) = instance(rng, 8);
            let m = random_move(&g, rng, g.vertex_count());
            let after = apply_share(&w, &m);
            if squared_norm(&after) <= squared_norm(&w) {
                None
            } else {
                Some(dump(&g, &w, json!({"move": moves_to_lists(&g, std::slice::from_ref(&m))})))
            }
        }),
        check("limit is a fixed point and is reachable", seed ^ 0xBB, trials, |rng| {
            let (g, w) = instance(rng, 8);
            let n = g.vertex_count();
            let count = rng.range(1, 4) as usize;
            let family: Vec<_> = (0..count).map(|_| random_move(&g, rng, n)).collect();
            let fam = MoveFamily::new(family.clone()).expect("nonempty family");
            let limit = limit_distribution(&g, &w, &fam);
            for m in fam.moves() {
                if apply_share(&limit, m) != limit {
                    return Some(dump(&g, &w, json!({"moves": moves_to_lists(&g, &family)})));
                }
            }
            let witness = reachability_witness(&g, &fam);
            if apply_sequence(&w, &witness) == limit {
                None
            } else {
                Some(dump(&g, &w, json!({"moves": moves_to_lists(&g, &family)})))
            }
        }),
    ]
}

fn counterexample_check() -> CheckOutcome {
    let graph_json = r#"{"vertices":["r","s","t","u","v"],"edges":[["r","s"],["s","t"],["t","v"],["t","u"]]}"#;
    let weights_json = r#"{"r":"300","s":"0","t":"144","u":"72","v":"72"}"#;
    let g = teashare_core::io::parse_graph(graph_json).expect("built-in graph");
    let w = teashare_core::io::parse_weights(weights_json, &g).expect("built-in weights");
    let v = g.vertex_index("v").expect("built-in vertex");
    let audit = counterexample_audit(&g, &w, v, 3);
    let ok = match audit {
        Ok(a) => {
            a.best_value == Rational::from_integer(132.into())
                && a.canonical_value == Rational::from_integer(132.into())
                && a.shifted_ceiling == Rational::from_integer(131.into())
                && a.all_witnesses_nested
        }
        Err(_) => false,
    };
    CheckOutcome {
        name: "reference instance audit",
        trials: 1,
        failed: usize::from(!ok),
        counterexample: if ok {
            None
        } else {
            Some(json!({"instance": "built-in 5-vertex tree"}))
        },
    }
}

pub fn run_suite(suite: &str, seed: u64, trials: usize) -> Result<SuiteReport, String> {
    let mut checks: Vec<CheckOutcome> = Vec::new();
    match suite {
        "inequalities" => checks.extend(inequalities_checks(seed, trials)),
        "feasibility" => checks.extend(feasibility_checks(seed, trials)),
        "phi" => checks.extend(phi_checks(seed, trials)),
        "duality" => checks.extend(duality_checks(seed, trials)),
        "limits" => checks.extend(limits_checks(seed, trials)),
        "all" => {
            checks.extend(inequalities_checks(seed, trials));
            checks.extend(feasibility_checks(seed, trials));
            checks.extend(phi_checks(seed, trials));
            checks.extend(duality_checks(seed, trials));
            checks.extend(limits_checks(seed, trials));
            checks.push(counterexample_check());
        }
        other => {
            return Err(format!(
                "unknown suite '{other}' (expected all|inequalities|feasibility|phi|duality|limits)"
            ))
        }
    }
    let passed = checks.iter().all(|c| c.failed == 0);
    let checks_json: Vec<Value> = checks
        .iter()
        .map(|c| {
            let mut obj = Map::new();
            obj.insert("name".into(), json!(c.name));
            obj.insert("trials".into(), json!(c.trials));
            obj.insert("passed".into(), json!(c.trials - c.failed));
            obj.insert("failed".into(), json!(c.failed));
            obj.insert(
                "status".into(),
                json!(if c.failed == 0 { "pass" } else { "fail" }),
            );
            if let Some(ce) = &c.counterexample {
                obj.insert("counterexample".into(), ce.clone());
            }
            Value::Object(obj)
        })
        .collect();
    let value = json!({
        "suite": suite,
        "seed": seed,
        "trials": trials,
        "checks": checks_json,
        "status": if passed { "pass" } else { "fail" },
    });
    Ok(SuiteReport { passed, value })
}
