//! `teashare`: command-line front end for the exact sharing-move
//! engine. All results go to stdout as deterministic JSON (or a plain
//! table); diagnostics go to stderr.
//!
//! Exit codes: 0 success, 1 failed verification, 2 parse error,
//! 3 invalid move, 4 missing source/target for the requested bound,
//! 5 other operation errors.

mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_traits::ToPrimitive;
use serde_json::{json, Map, Value};

use teashare_core::bounds;
use teashare_core::dynamics::{
    apply_adjoint_sequence, apply_quasi, apply_sequence, apply_share, inner_product,
};
use teashare_core::io::{
    self, parse_graph, parse_moves, parse_weights, set_to_names, weights_to_map,
    ParsedMoves,
};
use teashare_core::limits::{
    family_components, iterate_to_convergence, limit_distribution, MoveFamily,
};
use teashare_core::rational::rational_to_f64;
use teashare_core::search::{search_optimal, MoveUniverse, SearchConfig};
use teashare_core::{format_rational, Graph, Rational, WeightDistribution};

#[derive(Parser)]
#[command(name = "teashare", version, about = "Exact sharing-move engine on finite graphs")]
struct Cli {
    /// Path to the graph JSON file.
    #[arg(long, global = true)]
    graph: Option<PathBuf>,
    /// Path to the weights JSON file.
    #[arg(long, global = true)]
    weights: Option<PathBuf>,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Seed for randomized suites.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Trial count for randomized suites.
    #[arg(long, global = true)]
    trials: Option<u64>,
    /// Add approximate decimal fields (clearly marked) next to exact values.
    #[arg(long, global = true)]
    float: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundKind {
    Distance,
    Phi,
    Feasibility,
    Dual,
}

#[derive(Clone, Copy, ValueEnum)]
enum UniverseArg {
    EdgesOnly,
    AllConnected,
}

#[derive(Subcommand)]
enum Command {
    /// Apply a move file to the instance and report the final weights.
    Simulate {
        /// Path to the moves JSON (plain or quasi).
        #[arg(long)]
        moves: PathBuf,
        /// Include the per-step trace.
        #[arg(long)]
        trace: bool,
    },
    /// Compute one of the certified bounds.
    Bound {
        #[arg(long, value_enum)]
        kind: BoundKind,
        /// Source vertex (for distance / feasibility / dual bounds).
        #[arg(long)]
        source: Option<String>,
        /// Target vertex (comma-separated list for the dual bound).
        #[arg(long)]
        target: Option<String>,
    },
    /// Depth-bounded exact search for the best reachable target value.
    Search {
        #[arg(long)]
        target: String,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[arg(long, value_enum, default_value_t = UniverseArg::AllConnected)]
        universe: UniverseArg,
    },
    /// Exact limit of repeating a move family forever.
    Limit {
        /// Path to the move-family JSON (array of vertex-name arrays).
        #[arg(long)]
        moves: PathBuf,
        /// Cycle budget for the floating-point cross-check.
        #[arg(long, default_value_t = 10_000)]
        repeats: u64,
        /// Convergence tolerance for the cross-check.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Evaluate both sides of the adjoint identity for a cost vector.
    Duality {
        #[arg(long)]
        moves: PathBuf,
        /// Path to the cost-vector JSON (same schema as weights).
        #[arg(long)]
        cost: PathBuf,
    },
    /// Run the property suites.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

const EXIT_VERIFY: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_MOVE: u8 = 3;
const EXIT_MISSING_VERTEX_ARG: u8 = 4;
const EXIT_OTHER: u8 = 5;

fn read_file(path: &PathBuf) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::new(EXIT_PARSE, format!("cannot read {}: {e}", path.display())))
}

fn load_instance(cli: &Cli) -> Result<(Graph, WeightDistribution), Failure> {
    let graph_path = cli
        .graph
        .as_ref()
        .ok_or_else(|| Failure::new(EXIT_PARSE, "--graph is required"))?;
    let g = parse_graph(&read_file(graph_path)?)
        .map_err(|e| Failure::new(EXIT_PARSE, e.to_string()))?;
    let weights_path = cli
        .weights
        .as_ref()
        .ok_or_else(|| Failure::new(EXIT_PARSE, "--weights is required"))?;
    let w = parse_weights(&read_file(weights_path)?, &g)
        .map_err(|e| Failure::new(EXIT_PARSE, e.to_string()))?;
    Ok((g, w))
}

fn vertex(g: &Graph, name: &str) -> Result<usize, Failure> {
    g.vertex_index(name)
        .map_err(|e| Failure::new(EXIT_PARSE, e.to_string()))
}

fn rational_value(cli: &Cli, r: &Rational) -> Value {
    let _ = cli;
    Value::String(format_rational(r))
}

/// Adds `<key>_approx` fields for every rational-string field when
/// `--float` is set. The approximations are explicitly inexact.
fn add_float_fields(cli: &Cli, obj: &mut Map<String, Value>, keys: &[&str]) {
    if !cli.float {
        return;
    }
    let mut additions = Vec::new();
    for key in keys {
        if let Some(Value::String(s)) = obj.get(*key) {
            if let Ok(r) = teashare_core::parse_rational(s) {
                additions.push((format!("{key}_approx"), json!(rational_to_f64(&r))));
            }
        }
    }
    for (k, v) in additions {
        obj.insert(k, v);
    }
}

fn weights_value(g: &Graph, w: &WeightDistribution) -> Value {
    let map = weights_to_map(g, w);
    Value::Object(map.into_iter().map(|(k, v)| (k, Value::String(v))).collect())
}

fn cmd_simulate(cli: &Cli, moves: &PathBuf, trace: bool) -> Result<Value, Failure> {
    let (g, w) = load_instance(cli)?;
    let parsed = parse_moves(&read_file(moves)?, &g).map_err(|e| match e {
        io::IoError::Json(_) => Failure::new(EXIT_PARSE, e.to_string()),
        io::IoError::Graph(_) => Failure::new(EXIT_PARSE, e.to_string()),
        io::IoError::Dynamics(_) => Failure::new(EXIT_MOVE, e.to_string()),
        io::IoError::QuasiAmount { .. } => Failure::new(EXIT_PARSE, e.to_string()),
    })?;
    let mut steps: Vec<Value> = Vec::new();
    let final_w = match &parsed {
        ParsedMoves::Sharing(seq) => {
            let mut cur = w.clone();
            for m in seq {
                cur = apply_share(&cur, m);
                if trace {
                    steps.push(weights_value(&g, &cur));
                }
            }
            cur
        }
        ParsedMoves::Quasi(seq) => {
            let mut cur = w.clone();
            for (i, q) in seq.iter().enumerate() {
                cur = apply_quasi(&g, &cur, q).map_err(|e| {
                    Failure::new(EXIT_MOVE, format!("quasi move {i}: {e}"))
                })?;
                if trace {
                    steps.push(weights_value(&g, &cur));
                }
            }
            cur
        }
    };
    let mut obj = Map::new();
    obj.insert("initial".into(), weights_value(&g, &w));
    obj.insert("final".into(), weights_value(&g, &final_w));
    obj.insert(
        "total".into(),
        Value::String(format_rational(&final_w.total())),
    );
    obj.insert("conserved".into(), json!(final_w.total() == w.total()));
    if trace {
        obj.insert("trace".into(), Value::Array(steps));
    }
    add_float_fields(cli, &mut obj, &["total"]);
    Ok(Value::Object(obj))
}

fn cmd_bound(
    cli: &Cli,
    kind: BoundKind,
    source: &Option<String>,
    target: &Option<String>,
) -> Result<Value, Failure> {
    let (g, w) = load_instance(cli)?;
    let need = |opt: &Option<String>, what: &str| -> Result<String, Failure> {
        opt.clone().ok_or_else(|| {
            Failure::new(
                EXIT_MISSING_VERTEX_ARG,
                format!("this bound kind requires --{what}"),
            )
        })
    };
    let mut obj = Map::new();
    match kind {
        BoundKind::Distance => {
            let r = vertex(&g, &need(source, "source")?)?;
            let v = vertex(&g, &need(target, "target")?)?;
            let value = bounds::distance_bound(&g, r, v, &w.total())
                .map_err(|e| Failure::new(EXIT_OTHER, e.to_string()))?;
            obj.insert("kind".into(), json!("distance"));
            obj.insert("value".into(), rational_value(cli, &value));
        }
        BoundKind::Phi => {
            let v = vertex(&g, &need(target, "target")?)?;
            let cert = bounds::phi_bound(&g, v, &w)
                .map_err(|e| Failure::new(EXIT_OTHER, e.to_string()))?;
            obj.insert("kind".into(), json!("phi"));
            obj.insert("value".into(), rational_value(cli, &cert.value));
            obj.insert(
                "witness".into(),
                json!(cert
                    .enumeration
                    .iter()
                    .map(|&x| g.vertex_name(x).to_string())
                    .collect::<Vec<_>>()),
            );
            obj.insert("ell".into(), json!(cert.ell));
        }
        BoundKind::Feasibility => {
            let r = vertex(&g, &need(source, "source")?)?;
            let report = bounds::check_feasible(&g, r, &w)
                .map_err(|e| Failure::new(EXIT_OTHER, e.to_string()))?;
            obj.insert("kind".into(), json!("feasibility"));
            obj.insert("feasible".into(), json!(report.feasible));
            obj.insert("value".into(), rational_value(cli, &report.slack));
            obj.insert(
                "worst_subset".into(),
                json!(set_to_names(&g, &report.worst_subset)),
            );
        }
        BoundKind::Dual => {
            let r = vertex(&g, &need(source, "source")?)?;
            let names = need(target, "target")?;
            let members = names
                .split(',')
                .map(|n| vertex(&g, n.trim()))
                .collect::<Result<Vec<_>, _>>()?;
            let set = teashare_core::VertexSet::new(members);
            let value = bounds::multi_target_bound(&g, r, &set, &w.total())
                .map_err(|e| Failure::new(EXIT_OTHER, e.to_string()))?;
            obj.insert("kind".into(), json!("dual"));
            obj.insert("value".into(), rational_value(cli, &value));
            obj.insert("worst_subset".into(), json!(set_to_names(&g, &set)));
        }
    }
    add_float_fields(cli, &mut obj, &["value"]);
    Ok(Value::Object(obj))
}

fn cmd_search(
    cli: &Cli,
    target: &str,
    depth: usize,
    universe: UniverseArg,
) -> Result<Value, Failure> {
    let (g, w) = load_instance(cli)?;
    let v = vertex(&g, target)?;
    let cfg = SearchConfig::new(
        depth,
        match universe {
            UniverseArg::EdgesOnly => MoveUniverse::EdgesOnly,
            UniverseArg::AllConnected => MoveUniverse::AllConnected,
        },
    );
    let result =
        search_optimal(&g, &w, v, &cfg).map_err(|e| Failure::new(EXIT_OTHER, e.to_string()))?;
    let mut obj = Map::new();
    obj.insert("best".into(), rational_value(cli, &result.best_value));
    obj.insert(
        "witness".into(),
        json!(io::moves_to_lists(&g, &result.witness)),
    );
    obj.insert("explored".into(), json!(result.explored));
    obj.insert("pruned".into(), json!(result.pruned));
    obj.insert(
        "phi_bound".into(),
        rational_value(cli, &result.bound_certificate.value),
    );
    obj.insert("optimal_within_depth".into(), json!(depth));
    add_float_fields(cli, &mut obj, &["best", "phi_bound"]);
    Ok(Value::Object(obj))
}

fn cmd_limit(cli: &Cli, moves: &PathBuf, repeats: u64, tol: f64) -> Result<Value, Failure> {
    let (g, w) = load_instance(cli)?;
    let parsed = parse_moves(&read_file(moves)?, &g)
        .map_err(|e| Failure::new(EXIT_MOVE, e.to_string()))?;
    let ParsedMoves::Sharing(seq) = parsed else {
        return Err(Failure::new(
            EXIT_MOVE,
            "limit requires plain sharing moves, not quasi moves",
        ));
    };
    let fam = MoveFamily::new(seq.clone())
        .map_err(|e| Failure::new(EXIT_MOVE, e.to_string()))?;
    let limit = limit_distribution(&g, &w, &fam);
    let components: Vec<Vec<String>> = family_components(&g, &fam)
        .iter()
        .map(|c| set_to_names(&g, c))
        .collect();
    let outcome = iterate_to_convergence(&g, &w, &seq, repeats, tol)
        .map_err(|e| Failure::new(EXIT_OTHER, e.to_string()))?;
    if !outcome.converged {
        eprintln!(
            "warning: iteration did not reach tol {tol} within {repeats} cycles"
        );
    }
    let mut obj = Map::new();
    obj.insert("limit".into(), weights_value(&g, &limit));
    obj.insert("components".into(), json!(components));
    obj.insert("cycles_to_tol".into(), json!(outcome.cycles));
    obj.insert("converged".into(), json!(outcome.converged));
    Ok(Value::Object(obj))
}

fn cmd_duality(cli: &Cli, moves: &PathBuf, cost: &PathBuf) -> Result<Value, Failure> {
    let (g, w) = load_instance(cli)?;
    let parsed = parse_moves(&read_file(moves)?, &g)
        .map_err(|e| Failure::new(EXIT_MOVE, e.to_string()))?;
    let ParsedMoves::Sharing(seq) = parsed else {
        return Err(Failure::new(
            EXIT_MOVE,
            "duality requires plain sharing moves, not quasi moves",
        ));
    };
    let c = parse_weights(&read_file(cost)?, &g)
        .map_err(|e| Failure::new(EXIT_PARSE, e.to_string()))?;
    let lhs = inner_product(&c, &apply_sequence(&w, &seq))
        .map_err(|e| Failure::new(EXIT_OTHER, e.to_string()))?;
    let rhs = inner_product(&w, &apply_adjoint_sequence(&c, &seq))
        .map_err(|e| Failure::new(EXIT_OTHER, e.to_string()))?;
    let mut obj = Map::new();
    obj.insert("lhs".into(), rational_value(cli, &lhs));
    obj.insert("rhs".into(), rational_value(cli, &rhs));
    obj.insert("equal".into(), json!(lhs == rhs));
    add_float_fields(cli, &mut obj, &["lhs", "rhs"]);
    Ok(Value::Object(obj))
}

fn render_table(value: &Value) -> String {
    fn flat(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
        match v {
            Value::Object(map) => {
                for (k, inner) in map {
                    let key = if prefix.is_empty() {
                        k.clone()
                    } else {
                        format!("{prefix}.{k}")
                    };
                    flat(&key, inner, out);
                }
            }
            Value::Array(items) => {
                let rendered: Vec<String> = items
                    .iter()
                    .map(|i| serde_json::to_string(i).unwrap_or_default())
                    .collect();
                out.push((prefix.to_string(), rendered.join(" ")));
            }
            other => {
                let s = match other {
                    Value::String(s) => s.clone(),
                    o => o.to_string(),
                };
                out.push((prefix.to_string(), s));
            }
        }
    }
    let mut rows = Vec::new();
    flat("", value, &mut rows);
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    rows.iter()
        .map(|(k, v)| format!("{k:<width$}  {v}"))
        .collect::<Vec<_>>()
        .join("\n")
}

fn run(cli: &Cli) -> Result<Value, Failure> {
    match &cli.command {
        Command::Simulate { moves, trace } => cmd_simulate(cli, moves, *trace),
        Command::Bound {
            kind,
            source,
            target,
        } => cmd_bound(cli, *kind, source, target),
        Command::Search {
            target,
            depth,
            universe,
        } => cmd_search(cli, target, *depth, *universe),
        Command::Limit {
            moves,
            repeats,
            tol,
        } => cmd_limit(cli, moves, *repeats, *tol),
        Command::Duality { moves, cost } => cmd_duality(cli, moves, cost),
        Command::Verify { suite } => {
            let trials = cli.trials.and_then(|t| t.to_usize()).unwrap_or(100);
            verify::run_suite(suite, cli.seed, trials)
                .map_err(|msg| Failure::new(EXIT_PARSE, msg))
                .and_then(|report| {
                    if report.passed {
                        Ok(report.value)
                    } else {
                        // Emit the report, then fail with the verify code.
                        emit(cli, &report.value);
                        Err(Failure::new(EXIT_VERIFY, "verification failed"))
                    }
                })
        }
    }
}

fn emit(cli: &Cli, value: &Value) {
    match cli.format {
        Format::Json => {
            println!("{}", serde_json::to_string_pretty(value).expect("valid JSON"))
        }
        Format::Table => println!("{}", render_table(value)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(value) => {
            emit(&cli, &value);
            ExitCode::SUCCESS
        }
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
