use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DVector;
use serde_json::{json, Value};

use simplex_walk::apps::{self, EstimateOptions};
use simplex_walk::hodge::{self, SubspaceTarget};
use simplex_walk::markov::{self, WalkKind};
use simplex_walk::qsvt::{self, ProjectorOptions};
use simplex_walk::quantum::{self, Tier};
use simplex_walk::{linalg, CliqueComplex, Error, OrientedSimplex, Result, VertexWeightedGraph};

#[derive(Parser)]
#[command(name = "simplex-walk", version, about = "Quantum walks on clique complexes, simulated exactly")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// JSON graph file: {"n": .., "edges": [[u, v], ..], "weights": [..]}
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 1)]
    k: usize,
    #[arg(long, global = true, default_value_t = 1e-3)]
    epsilon: f64,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = TierArg::Oracle)]
    tier: TierArg,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    output: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum TierArg {
    Oracle,
    Circuit,
}

impl From<TierArg> for Tier {
    fn from(t: TierArg) -> Self {
        match t {
            TierArg::Oracle => Tier::Oracle,
            TierArg::Circuit => Tier::Circuit,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Simplex counts and weights.
    Complex {
        #[command(subcommand)]
        action: ComplexAction,
    },
    /// Eigenvalues of a Laplacian in dimension k.
    Spectrum {
        /// up, down or full
        #[arg(long, default_value = "full")]
        laplacian: String,
    },
    Walk {
        #[command(subcommand)]
        action: WalkAction,
    },
    /// Build a walk unitary and check its Laplacian block encoding.
    Encode {
        #[arg(long, default_value = "harmonic")]
        kind: String,
        /// Amplitude-preparation error of the circuit tier.
        #[arg(long, default_value_t = 0.0)]
        prep_err: f64,
    },
    /// Synthesize a spectral projector and compare it with the exact one.
    Project {
        /// zck, bk, zk, bck or hk
        #[arg(long)]
        target: String,
    },
    Betti {
        #[command(subcommand)]
        action: EstimateAction,
    },
    Persistent {
        #[command(subcommand)]
        action: PersistentAction,
    },
    /// Run the promise-homology verifier on a witness.
    Verify {
        /// JSON array of amplitudes on the positive k-simplices, in basis order.
        #[arg(long)]
        witness: PathBuf,
        /// Promised spectral gap g.
        #[arg(long)]
        gap: f64,
    },
}

#[derive(Subcommand)]
enum ComplexAction {
    Info,
}

#[derive(Subcommand)]
enum WalkAction {
    /// Evolve a point mass on an oriented simplex.
    Simulate {
        #[arg(long, default_value = "up")]
        kind: String,
        /// Vertex sequence, e.g. [0,1]; order sets the orientation.
        #[arg(long)]
        start: String,
        #[arg(long, default_value_t = 1)]
        steps: usize,
        /// Monte Carlo trials; 0 evolves the exact distribution.
        #[arg(long, default_value_t = 0)]
        trials: usize,
    },
}

#[derive(Subcommand)]
enum EstimateAction {
    Estimate {
        #[command(flatten)]
        estimate: EstimateArgs,
    },
}

#[derive(Subcommand)]
enum PersistentAction {
    /// Estimate persistent Betti between --input (small) and --large.
    Estimate {
        #[arg(long)]
        large: PathBuf,
        /// Spectral gap promised for the intersection step.
        #[arg(long, default_value_t = 0.25)]
        gap: f64,
        #[command(flatten)]
        estimate: EstimateArgs,
    },
}

#[derive(Args)]
struct EstimateArgs {
    /// Distance of the simplex sampler from uniform.
    #[arg(long, default_value_t = 0.0)]
    sampler_tvd: f64,
    /// Accuracy of the synthesized projectors.
    #[arg(long, default_value_t = 1e-3)]
    projector_eps: f64,
}

/// Output as a JSON document and as a table for CSV.
struct Report {
    json: Value,
    columns: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

fn load_graph(path: Option<&PathBuf>) -> Result<VertexWeightedGraph> {
    let path = path.ok_or_else(|| Error::InvalidArgument("--input is required".into()))?;
    VertexWeightedGraph::load(path)
}

/// The complex through dimension `k+1`, which the dimension-k operators need.
fn load_complex(global: &Global) -> Result<CliqueComplex> {
    let graph = load_graph(global.input.as_ref())?;
    let n = graph.n();
    if global.k + 1 >= n {
        return Err(Error::DimensionOutOfRange { k: global.k, min: 0, max: n.saturating_sub(2) });
    }
    CliqueComplex::build(graph, global.k + 1)
}

fn estimate_options(global: &Global, args: &EstimateArgs) -> EstimateOptions {
    EstimateOptions {
        epsilon: global.epsilon,
        sampler_tvd: args.sampler_tvd,
        projector_eps: args.projector_eps,
        tier: global.tier.into(),
        seed: global.seed,
        with_truth: true,
    }
}

fn estimate_report(r: &apps::EstimateReport) -> Report {
    let truth = r.truth.map(|t| t.to_string()).unwrap_or_default();
    Report {
        json: serde_json::to_value(r).expect("serializable"),
        columns: vec!["value", "epsilon", "samples_used", "confidence", "truth"],
        rows: vec![vec![
            r.value.to_string(),
            r.epsilon.to_string(),
            r.samples_used.to_string(),
            r.confidence.to_string(),
            truth,
        ]],
    }
}

fn run(cli: &Cli) -> Result<Report> {
    let g = &cli.global;
    match &cli.command {
        Command::Complex { action: ComplexAction::Info } => {
            let graph = load_graph(g.input.as_ref())?;
            let top = graph.n().saturating_sub(1);
            let complex = CliqueComplex::build(graph, top)?;
            let counts: Vec<usize> = complex.counts().into_iter().take_while(|&c| c > 0).collect();
            Ok(Report {
                json: json!({
                    "n": complex.n(),
                    "edges": complex.graph().edges(),
                    "weights": complex.graph().weights(),
                    "counts": counts,
                }),
                columns: vec!["k", "count"],
                rows: counts.iter().enumerate().map(|(k, c)| vec![k.to_string(), c.to_string()]).collect(),
            })
        }
        Command::Spectrum { laplacian } => {
            let complex = load_complex(g)?;
            let lap = hodge::laplacians(&complex, g.k)?;
            let m = match laplacian.as_str() {
                "up" => &lap.up,
                "down" => &lap.down,
                "full" => &lap.full,
                other => return Err(Error::InvalidArgument(format!("unknown Laplacian {other:?}"))),
            };
            let (values, _) = linalg::sym_eigen(m);
            let summary = hodge::spectral_summary(m, linalg::ZERO_TOL).ok();
            let kernel = values.iter().filter(|v| v.abs() <= linalg::ZERO_TOL).count();
            Ok(Report {
                json: json!({
                    "k": g.k,
                    "laplacian": laplacian,
                    "eigenvalues": values.as_slice(),
                    "kernel_dim": kernel,
                    "lambda_min_nonzero": summary.map(|s| s.lambda_min_nonzero),
                }),
                columns: vec!["index", "eigenvalue"],
                rows: values.iter().enumerate().map(|(i, v)| vec![i.to_string(), v.to_string()]).collect(),
            })
        }
        Command::Walk { action: WalkAction::Simulate { kind, start, steps, trials } } => {
            let complex = load_complex(g)?;
            let kind: WalkKind = kind.parse()?;
            let chain = markov::transition_matrix(&complex, g.k, kind)?;
            let start = OrientedSimplex::from_sequence(&hodge::parse_simplex(start)?)?;
            let s0 = chain
                .space
                .state_of(&complex, simplex_walk::OrientedSimplexLabel::simplex(start))
                .ok_or_else(|| Error::NotASimplex(format!("{:?}", start.sequence())))?;
            let mut init = DVector::zeros(chain.dim());
            init[s0] = 1.0;
            let dist = if *trials == 0 {
                markov::evolve_distribution(&chain, &init, *steps)?
            } else {
                markov::evolve_monte_carlo(&chain, &init, *steps, *trials, g.seed)?
            };
            let rows: Vec<Vec<String>> = (0..chain.dim())
                .filter(|&s| dist[s] != 0.0)
                .map(|s| vec![chain.space.label(&complex, g.k, s).render(complex.n()), dist[s].to_string()])
                .collect();
            let json_rows: Vec<Value> = rows.iter().map(|r| json!({"state": r[0], "probability": r[1].parse::<f64>().unwrap()})).collect();
            Ok(Report {
                json: json!({"kind": kind.to_string(), "k": g.k, "steps": steps, "trials": trials, "normalization": chain.normalization, "distribution": json_rows}),
                columns: vec!["state", "probability"],
                rows,
            })
        }
        Command::Encode { kind, prep_err } => {
            let complex = load_complex(g)?;
            let kind: WalkKind = kind.parse()?;
            let walk = quantum::walk_unitary(&complex, g.k, kind, g.tier.into(), *prep_err)?;
            let enc = quantum::laplacian_encoding(&complex, &walk)?;
            let lap = hodge::laplacians(&complex, g.k)?;
            let error = enc.encoding_error(lap.for_kind(kind));
            let cost = walk.cost.map(|c| c.total());
            Ok(Report {
                json: json!({
                    "kind": kind.to_string(),
                    "k": g.k,
                    "scale": enc.scale,
                    "ancilla_qubits": enc.ancilla_qubits,
                    "encoding_error": error,
                    "unitarity_error": enc.unitarity_error(),
                    "cost": walk.cost,
                }),
                columns: vec!["kind", "scale", "ancilla_qubits", "encoding_error", "cost"],
                rows: vec![vec![
                    kind.to_string(),
                    enc.scale.to_string(),
                    enc.ancilla_qubits.to_string(),
                    error.to_string(),
                    cost.map(|c| c.to_string()).unwrap_or_default(),
                ]],
            })
        }
        Command::Project { target } => {
            let complex = load_complex(g)?;
            let target: SubspaceTarget = target.parse()?;
            let options = ProjectorOptions { tier: g.tier.into(), ..Default::default() };
            let p = qsvt::projector_encoding(&complex, g.k, target, g.epsilon, options)?;
            let exact = qsvt::exact_target_projector(&complex, g.k, target)?;
            let error = linalg::spectral_norm(&(&p.block - &exact));
            let rank = p.block.trace().round() as i64;
            Ok(Report {
                json: json!({
                    "target": target.cli_name(),
                    "k": g.k,
                    "epsilon": g.epsilon,
                    "degree": p.degree_used,
                    "lambda": p.lambda,
                    "error": error,
                    "idempotency_error": p.idempotency_error(),
                    "rank": rank,
                }),
                columns: vec!["target", "degree", "lambda", "error", "rank"],
                rows: vec![vec![
                    target.cli_name().to_string(),
                    p.degree_used.to_string(),
                    p.lambda.to_string(),
                    error.to_string(),
                    rank.to_string(),
                ]],
            })
        }
        Command::Betti { action: EstimateAction::Estimate { estimate } } => {
            let complex = load_complex(g)?;
            let r = apps::estimate_normalized_betti(&complex, g.k, &estimate_options(g, estimate))?;
            Ok(estimate_report(&r))
        }
        Command::Persistent { action: PersistentAction::Estimate { large, gap, estimate } } => {
            let small = load_complex(g)?;
            let large = CliqueComplex::build(VertexWeightedGraph::load(large)?, small.k_max())?;
            let r = apps::estimate_normalized_persistent_betti(&small, &large, g.k, *gap, &estimate_options(g, estimate))?;
            Ok(estimate_report(&r))
        }
        Command::Verify { witness, gap } => {
            let graph = load_graph(g.input.as_ref())?;
            let amplitudes: Vec<f64> = serde_json::from_str(&std::fs::read_to_string(witness)?)?;
            let t = apps::verify_promise_homology(&graph, g.k, *gap, &DVector::from_vec(amplitudes), g.epsilon, g.seed)?;
            let decision = serde_json::to_value(t.decision).expect("serializable");
            Ok(Report {
                columns: vec!["decision", "p1", "degree"],
                rows: vec![vec![decision.as_str().unwrap_or_default().to_string(), t.p1.to_string(), t.degree.to_string()]],
                json: serde_json::to_value(&t).expect("serializable"),
            })
        }
    }
}

fn emit(report: &Report, format: Format) -> Result<()> {
    let stdout = std::io::stdout();
    match format {
        Format::Json => {
            let mut out = stdout.lock();
            serde_json::to_writer_pretty(&mut out, &report.json)?;
            writeln!(out)?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(stdout.lock());
            w.write_record(&report.columns)?;
            for row in &report.rows {
                w.write_record(row)?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli).and_then(|r| emit(&r, cli.global.output)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
