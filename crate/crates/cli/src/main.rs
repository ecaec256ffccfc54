use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use packpaint_core::exact::{self, SearchBudget, Verdict};
use packpaint_core::gen::{self, GenSpec};
use packpaint_core::graph::Graph;
use packpaint_core::io::{self, ColoringReport};
use packpaint_core::packing::PackingSequence;
use packpaint_core::pipelines::{self, PipelineError, PipelineKind, PipelineOptions};
use packpaint_core::verify;

const OK: u8 = 0;
const NEGATIVE: u8 = 1;
const INPUT_ERROR: u8 = 2;
const FAILURE: u8 = 3;

/// Packing colorings of bounded-degree graphs.
///
/// Exit status: 0 success, feasible or verified; 1 infeasible or violation
/// found; 2 usage or input error; 3 timeout or pipeline failure.
#[derive(Parser)]
#[command(name = "packpaint", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Color a graph and print a JSON report.
    Color {
        #[arg(long, value_enum, default_value_t = PipelineArg::Auto)]
        pipeline: PipelineArg,
        #[arg(long, env = "PACKPAINT_SEED", default_value_t = 0)]
        seed: u64,
        /// Also write a Graphviz rendering to this path.
        #[arg(long)]
        dot: Option<PathBuf>,
        /// Include wall-clock timings in the report.
        #[arg(long)]
        timings: bool,
        /// Edge-list file, or `-` for stdin.
        file: String,
    },
    /// Check a report's coloring against a sequence.
    Verify {
        #[arg(long)]
        seq: String,
        #[arg(long)]
        coloring: PathBuf,
        file: String,
    },
    /// Decide colorability for a sequence by exhaustive search.
    Decide {
        #[arg(long)]
        seq: String,
        #[arg(long, default_value_t = 10_000_000)]
        node_budget: u64,
        /// Seconds.
        #[arg(long, default_value_t = 60.0)]
        time_budget: f64,
        file: String,
    },
    /// Minimal feasible multiplicities for a family like `1^a,2^b`.
    Frontier {
        #[arg(long)]
        family: String,
        #[arg(long)]
        max_a: usize,
        #[arg(long, default_value_t = 0)]
        max_b: usize,
        #[arg(long, default_value_t = 10_000_000)]
        node_budget: u64,
        file: String,
    },
    /// Write a generated graph as an edge list.
    Gen {
        #[arg(long, value_enum)]
        kind: GenKind,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        t: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, env = "PACKPAINT_SEED", default_value_t = 0)]
        seed: u64,
    },
    /// Run a benchmark suite, one JSON line per configuration.
    Bench {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long, default_value_t = 100)]
        seeds: u64,
        #[arg(long, default_value_t = 40)]
        n: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PipelineArg {
    Auto,
    Zero,
    Mid,
    High,
    General,
    Deg2,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    Gkt,
    Bridge,
    Petersen,
    Path,
    Cycle,
    Complete,
    RandomSat,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    /// Random saturated graphs through the automatic pipeline.
    Saturated,
    /// Exact infeasibility of the counterexample family.
    Counterexamples,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match run(cli.command) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            INPUT_ERROR
        }
    };
    ExitCode::from(code)
}

fn read_graph(file: &str) -> Result<Graph, String> {
    let text = if file == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| format!("reading stdin: {e}"))?;
        s
    } else {
        std::fs::read_to_string(file).map_err(|e| format!("reading {file}: {e}"))?
    };
    io::parse_edge_list(&text).map_err(|e| format!("{file}: {e}"))
}

fn parse_seq(text: &str) -> Result<PackingSequence, String> {
    text.parse().map_err(|e| format!("--seq: {e}"))
}

fn run(command: Command) -> Result<u8, String> {
    match command {
        Command::Color {
            pipeline,
            seed,
            dot,
            timings,
            file,
        } => {
            let g = read_graph(&file)?;
            let opts = PipelineOptions::with_seed(seed);
            let start = Instant::now();
            let result = match pipeline {
                PipelineArg::Auto => pipelines::color_auto(&g, &opts),
                PipelineArg::Zero => pipelines::color_with(PipelineKind::ZeroSaturated, &g, &opts),
                PipelineArg::Mid => pipelines::color_with(PipelineKind::MidSaturated, &g, &opts),
                PipelineArg::High => pipelines::color_with(PipelineKind::HighSaturated, &g, &opts),
                PipelineArg::General => pipelines::color_with(PipelineKind::General, &g, &opts),
                PipelineArg::Deg2 => pipelines::color_deg2(&g),
            };
            let out = match result {
                Ok(out) => out,
                Err(e @ PipelineError::Precondition { .. }) => return Err(e.to_string()),
                Err(e) => {
                    eprintln!("error: {e}");
                    return Ok(FAILURE);
                }
            };
            let elapsed = timings.then(|| start.elapsed());
            let report = ColoringReport::new(&g, &out, seed, elapsed);
            if let Some(path) = dot {
                std::fs::write(&path, io::to_dot(&g, &out.coloring))
                    .map_err(|e| format!("writing {}: {e}", path.display()))?;
            }
            print!("{}", report.to_json());
            Ok(OK)
        }
        Command::Verify {
            seq,
            coloring,
            file,
        } => {
            let seq = parse_seq(&seq)?;
            let g = read_graph(&file)?;
            let text = std::fs::read_to_string(&coloring)
                .map_err(|e| format!("reading {}: {e}", coloring.display()))?;
            let report = ColoringReport::from_json(&text).map_err(|e| e.to_string())?;
            let digest = io::graph_digest(&g);
            if digest != report.input.sha256 {
                return Err(format!(
                    "report was made for a different graph (digest {}, graph {digest})",
                    report.input.sha256
                ));
            }
            match verify::verify(&g, &seq, &report.coloring()) {
                Ok(v) if v.is_empty() => {
                    eprintln!("valid {seq} packing coloring");
                    Ok(OK)
                }
                Ok(v) => {
                    for violation in &v {
                        eprintln!("violation: {}", serde_json::to_string(violation).unwrap());
                    }
                    Ok(NEGATIVE)
                }
                Err(e) => {
                    eprintln!("violation: {e}");
                    Ok(NEGATIVE)
                }
            }
        }
        Command::Decide {
            seq,
            node_budget,
            time_budget,
            file,
        } => {
            let seq = parse_seq(&seq)?;
            let g = read_graph(&file)?;
            let budget = search_budget(node_budget, time_budget)?;
            let result = exact::decide(&g, &seq, budget);
            let (verdict, classes, code) = match &result.verdict {
                Verdict::Feasible(col) => (
                    "feasible",
                    col.classes
                        .iter()
                        .map(|c| json!({"parameter": c.parameter, "vertices": c.vertices}))
                        .collect(),
                    OK,
                ),
                Verdict::Infeasible => ("infeasible", Vec::new(), NEGATIVE),
                Verdict::Timeout => ("timeout", Vec::new(), FAILURE),
            };
            let doc = json!({
                "sequence": seq.to_string(),
                "verdict": verdict,
                "nodes_explored": result.nodes_explored,
                "classes": classes,
            });
            println!("{}", serde_json::to_string_pretty(&doc).unwrap());
            Ok(code)
        }
        Command::Frontier {
            family,
            max_a,
            max_b,
            node_budget,
            file,
        } => {
            let parameters = parse_family(&family)?;
            let maxes = [max_a, max_b];
            let g = read_graph(&file)?;
            let budget = search_budget(node_budget, 60.0)?;
            let frontier =
                exact::min_sequence_search(&g, &parameters, &maxes[..parameters.len()], budget);
            let show = |tuples: &[Vec<usize>]| -> Vec<String> {
                tuples
                    .iter()
                    .map(|t| {
                        PackingSequence::from_counts(
                            parameters.iter().copied().zip(t.iter().copied()),
                        )
                        .to_string()
                    })
                    .collect()
            };
            let doc = json!({
                "parameters": parameters,
                "minimal": frontier.minimal,
                "minimal_sequences": show(&frontier.minimal),
                "timeouts": frontier.timeouts,
            });
            println!("{}", serde_json::to_string_pretty(&doc).unwrap());
            Ok(if frontier.timeouts.is_empty() {
                OK
            } else {
                FAILURE
            })
        }
        Command::Gen {
            kind,
            k,
            t,
            n,
            seed,
        } => {
            let need = |v: Option<usize>, name: &str| {
                v.ok_or_else(|| format!("--{name} is required for this kind"))
            };
            let spec = match kind {
                GenKind::Gkt => GenSpec::Gkt {
                    k: need(k, "k")?,
                    t: need(t, "t")?,
                },
                GenKind::Bridge => GenSpec::CliqueBridge { k: need(k, "k")? },
                GenKind::Petersen => GenSpec::Petersen,
                GenKind::Path => GenSpec::Path { n: need(n, "n")? },
                GenKind::Cycle => GenSpec::Cycle { n: need(n, "n")? },
                GenKind::Complete => GenSpec::Complete { n: need(n, "n")? },
                GenKind::RandomSat => GenSpec::RandomSaturated {
                    n: need(n, "n")?,
                    k: need(k, "k")?,
                    t: need(t, "t")?,
                    seed,
                },
            };
            let g = spec.build().map_err(|e| e.to_string())?;
            print!("{}", io::write_edge_list(&g));
            Ok(OK)
        }
        Command::Bench { suite, seeds, n } => Ok(bench(suite, seeds, n)),
    }
}

fn search_budget(nodes: u64, seconds: f64) -> Result<SearchBudget, String> {
    if !(seconds.is_finite() && seconds >= 0.0) {
        return Err(format!("invalid time budget {seconds}"));
    }
    Ok(SearchBudget {
        max_nodes: nodes,
        max_time: Duration::from_secs_f64(seconds),
    })
}

/// `1^a,2^b` (parentheses optional) to the parameter list `[1, 2]`.
fn parse_family(text: &str) -> Result<Vec<u32>, String> {
    let inner = text.trim().trim_start_matches('(').trim_end_matches(')');
    let mut parameters = Vec::new();
    for (term, letter) in inner.split(',').zip(["a", "b"]) {
        let (s, m) = term
            .trim()
            .split_once('^')
            .ok_or_else(|| format!("--family: malformed term `{term}`"))?;
        if m.trim() != letter {
            return Err(format!(
                "--family: expected multiplicity `{letter}` in `{term}`"
            ));
        }
        let s: u32 = s
            .trim()
            .parse()
            .map_err(|_| format!("--family: bad parameter in `{term}`"))?;
        if s == 0 {
            return Err("--family: parameters must be positive".into());
        }
        parameters.push(s);
    }
    if parameters.is_empty() || inner.split(',').count() > 2 {
        return Err("--family takes one or two terms, like `1^a,2^b`".into());
    }
    Ok(parameters)
}

fn saturation_configs() -> Vec<(usize, usize)> {
    (3..=6).flat_map(|k| (0..=k).map(move |t| (k, t))).collect()
}

fn bench(suite: Suite, seeds: u64, n: usize) -> u8 {
    let lines: Vec<(String, bool)> = match suite {
        Suite::Saturated => {
            let configs = saturation_configs();
            std::thread::scope(|scope| {
                let handles: Vec<_> = configs
                    .iter()
                    .map(|&(k, t)| scope.spawn(move || bench_saturated(k, t, n, seeds)))
                    .collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("bench thread"))
                    .collect()
            })
        }
        Suite::Counterexamples => {
            let configs = [(3, 1), (3, 2), (3, 3), (4, 1), (4, 2), (4, 3), (4, 4)];
            std::thread::scope(|scope| {
                let handles: Vec<_> = configs
                    .iter()
                    .map(|&(k, t)| {
                        scope.spawn(move || {
                            let g = gen::gkt(k, t).expect("valid parameters");
                            let seq = PackingSequence::ones_twos_threes(k - 1, 0, t);
                            let start = Instant::now();
                            let r = exact::decide(&g, &seq, SearchBudget::default());
                            let ok = r.verdict == Verdict::Infeasible;
                            let line = json!({
                                "k": k, "t": t, "sequence": seq.to_string(),
                                "verdict": match r.verdict { Verdict::Feasible(_) => "feasible", Verdict::Infeasible => "infeasible", Verdict::Timeout => "timeout" },
                                "nodes": r.nodes_explored,
                                "ms": start.elapsed().as_secs_f64() * 1e3,
                            });
                            (line.to_string(), ok)
                        })
                    })
                    .collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("bench thread"))
                    .collect()
            })
        }
    };
    let mut all_ok = true;
    for (line, ok) in lines {
        println!("{line}");
        all_ok &= ok;
    }
    if all_ok {
        OK
    } else {
        FAILURE
    }
}

fn bench_saturated(k: usize, t: usize, n: usize, seeds: u64) -> (String, bool) {
    let start = Instant::now();
    let (mut runs, mut escalated, mut failures, mut skipped) = (0u64, 0u64, 0u64, 0u64);
    for seed in 0..seeds {
        let Ok(g) = gen::random_saturated(n, k, t, seed) else {
            skipped += 1;
            continue;
        };
        runs += 1;
        match pipelines::color_auto(&g, &PipelineOptions::with_seed(seed)) {
            Ok(out) if verify::is_valid(&g, &out.budget, &out.coloring) => {
                if out.trace.escalation != pipelines::EscalationLevel::LocalSearch {
                    escalated += 1;
                }
            }
            _ => failures += 1,
        }
    }
    let line = json!({
        "k": k, "t": t, "n": n, "runs": runs, "skipped": skipped,
        "escalated": escalated, "failures": failures,
        "ms": start.elapsed().as_secs_f64() * 1e3,
    });
    (line.to_string(), failures == 0)
}
