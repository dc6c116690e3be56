//! Command-line interface for realisation counting.
//!
//! Subcommands: `decode`, `encode`, `rigid`, `count`, `enumerate`, `batch`
//! and `stats`. Exit code 0 on success, 1 on computation errors, 2 on
//! usage errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use realcount::codec::{canonical_form, decode_graph, encode_graph, GraphCode};
use realcount::counting::{
    realisation_count, trial_instance_seed, trial_tracker_seed, CountOptions, CountValue,
};
use realcount::graph::{graph_to_text, parse_graph_text, Graph};
use realcount::polysys::{euclidean_system, sample_instance, spherical_system, Model};
use realcount::rigidity::{
    enumerate_min_rigid, generic_rank, is_d_independent, is_d_rigid, is_minimally_d_rigid,
};
use realcount::stats::{
    alpha_bounds_line, batch_count, emit_csv, ingest_csv, pair_distribution_csv, ratio_stats,
    BatchOptions,
};

#[derive(Parser)]
#[command(
    name = "realcount",
    about = "Euclidean and spherical realisation numbers of rigid graphs",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decode an adjacency-code integer into the graph text format.
    Decode {
        /// Decimal graph code.
        code: String,
        /// Explicit vertex count (otherwise the minimal one is used).
        #[arg(long = "n")]
        n: Option<u32>,
    },
    /// Encode a graph file (text format) as a decimal code.
    Encode {
        /// Path to the graph file; `-` reads stdin.
        file: String,
        /// Also print the canonical (isomorphism-invariant) code.
        #[arg(long)]
        canonical: bool,
    },
    /// Report generic rigidity properties of a graph file.
    Rigid {
        /// Path to the graph file; `-` reads stdin.
        file: String,
        #[arg(long = "dim")]
        dim: u32,
    },
    /// Compute realisation numbers of a graph given as a code or file.
    Count(CountArgs),
    /// Enumerate minimally 2-rigid graphs as canonical codes, one per line.
    Enumerate {
        #[arg(long = "n")]
        n: u32,
        #[arg(long = "min-degree", default_value_t = 0)]
        min_degree: u32,
    },
    /// Count both models for every code in a file, writing a CSV.
    Batch {
        /// File with one decimal code per line.
        codes: PathBuf,
        #[arg(long = "dim")]
        dim: u32,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        threads: Option<usize>,
        /// Checkpoint file for resumable runs.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        trials: u32,
    },
    /// Ratio statistics (theta, quartiles, alpha bounds) over a CSV.
    Stats {
        csv: PathBuf,
        /// Print one summary block per vertex count.
        #[arg(long = "per-n")]
        per_n: bool,
        /// Also print the (c, c*) pair histogram as CSV.
        #[arg(long)]
        pairs: bool,
    },
}

#[derive(Args)]
struct CountArgs {
    /// Decimal graph code, or a path to a graph file when --file is set.
    input: String,
    #[arg(long = "dim")]
    dim: u32,
    /// euclidean | spherical | both
    #[arg(long, default_value = "both")]
    model: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 3)]
    trials: u32,
    /// Report doubled counts (the convention that counts reflections
    /// separately, used by other published computations).
    #[arg(long)]
    doubled: bool,
    /// Treat the input as a graph file instead of a code.
    #[arg(long)]
    file: bool,
    /// Emit one JSON record per model instead of plain text.
    #[arg(long)]
    json: bool,
    /// Write the first trial's instance audit (seed, pins, lambda).
    #[arg(long)]
    audit: Option<PathBuf>,
    /// Write the endpoint dump of the first trial's solve.
    #[arg(long = "dump-endpoints")]
    dump_endpoints: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn read_input(path: &str) -> Result<String, String> {
    if path == "-" {
        use std::io::Read;
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| e.to_string())?;
        Ok(buf)
    } else {
        std::fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))
    }
}

fn run(cli: Cli) -> Result<(), String> {
    match cli.command {
        Command::Decode { code, n } => {
            let mut code = GraphCode::parse(&code).map_err(|e| e.to_string())?;
            code.n_hint = n;
            let g = decode_graph(&code).map_err(|e| e.to_string())?;
            print!("{}", graph_to_text(&g));
            Ok(())
        }
        Command::Encode { file, canonical } => {
            let g = parse_graph_text(&read_input(&file)?).map_err(|e| e.to_string())?;
            println!("{}", encode_graph(&g));
            if canonical {
                let c = canonical_form(&g).map_err(|e| e.to_string())?;
                println!("canonical {c}");
            }
            Ok(())
        }
        Command::Rigid { file, dim } => {
            let g = parse_graph_text(&read_input(&file)?).map_err(|e| e.to_string())?;
            let report = generic_rank(&g, dim, 3, 0xD1CE);
            println!("n {}", g.vertex_count());
            println!("edges {}", g.edge_count());
            println!("rank {}", report.rank);
            println!("target_rigid_rank {}", report.target_rigid_rank);
            println!("rigid {}", is_d_rigid(&g, dim));
            println!("independent {}", is_d_independent(&g, dim));
            println!("minimally_rigid {}", is_minimally_d_rigid(&g, dim));
            Ok(())
        }
        Command::Count(args) => run_count(args),
        Command::Enumerate { n, min_degree } => {
            let codes = enumerate_min_rigid(n, 2, min_degree).map_err(|e| e.to_string())?;
            for code in codes {
                println!("{code}");
            }
            Ok(())
        }
        Command::Batch {
            codes,
            dim,
            out,
            threads,
            checkpoint,
            seed,
            trials,
        } => {
            let text = std::fs::read_to_string(&codes).map_err(|e| e.to_string())?;
            let parsed: Result<Vec<GraphCode>, _> = text
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(GraphCode::parse)
                .collect();
            let parsed = parsed.map_err(|e| e.to_string())?;
            let mut opts = BatchOptions::new(dim, seed);
            opts.count.trials = trials;
            opts.threads = threads;
            opts.checkpoint = checkpoint;
            let outcome = batch_count(&parsed, &opts).map_err(|e| e.to_string())?;
            std::fs::write(&out, emit_csv(&outcome.records)).map_err(|e| e.to_string())?;
            for (code, reason) in &outcome.skipped {
                eprintln!("skipped {code}: {reason}");
            }
            println!(
                "wrote {} records to {} ({} skipped)",
                outcome.records.len(),
                out.display(),
                outcome.skipped.len()
            );
            Ok(())
        }
        Command::Stats { csv, per_n, pairs } => {
            let records =
                ingest_csv(&std::fs::read_to_string(&csv).map_err(|e| e.to_string())?)
                    .map_err(|e| e.to_string())?;
            if records.is_empty() {
                return Err("no records in CSV".into());
            }
            let summaries = ratio_stats(&records).map_err(|e| e.to_string())?;
            let total: usize = summaries.iter().map(|s| s.count_equal + s.count_differ).sum();
            let theta = summaries.iter().map(|s| s.theta).max().unwrap();
            println!("records {total}");
            println!("theta {}/{}", theta.numer(), theta.denom());
            if per_n {
                for s in &summaries {
                    println!(
                        "n={} records={} equal={} differ={} min={:.5} q1={:.5} median={:.5} q3={:.5} max={:.5} theta={}/{} alpha_lower={:.5}",
                        s.n,
                        s.count_equal + s.count_differ,
                        s.count_equal,
                        s.count_differ,
                        s.min,
                        s.q1,
                        s.median,
                        s.q3,
                        s.max,
                        s.theta.numer(),
                        s.theta.denom(),
                        s.alpha_lower
                    );
                }
            }
            let d = records[0].d;
            println!("{}", alpha_bounds_line(&records, d));
            if pairs {
                print!("{}", pair_distribution_csv(&records));
            }
            Ok(())
        }
    }
}

fn run_count(args: CountArgs) -> Result<(), String> {
    let graph: Graph = if args.file {
        parse_graph_text(&read_input(&args.input)?).map_err(|e| e.to_string())?
    } else {
        let code = GraphCode::parse(&args.input).map_err(|e| e.to_string())?;
        decode_graph(&code).map_err(|e| e.to_string())?
    };
    let code = encode_graph(&graph);
    let models: Vec<Model> = match args.model.as_str() {
        "euclidean" => vec![Model::Euclidean],
        "spherical" => vec![Model::Spherical],
        "both" => vec![Model::Euclidean, Model::Spherical],
        other => {
            return Err(format!(
                "unknown model {other:?} (use euclidean|spherical|both)"
            ))
        }
    };
    let mut opts = CountOptions::with_seed(args.seed);
    opts.trials = args.trials;
    let d = args.dim;

    if let Some(path) = &args.audit {
        // The exact instance the first trial solves for the first model.
        let inst = sample_instance(&graph, d, models[0], trial_instance_seed(args.seed, 0));
        std::fs::write(path, inst.audit_text()).map_err(|e| e.to_string())?;
    }
    if let Some(path) = &args.dump_endpoints {
        let model = models[0];
        let inst = sample_instance(&graph, d, model, trial_instance_seed(args.seed, 0));
        let sys = match model {
            Model::Euclidean => euclidean_system(&inst).map_err(|e| e.to_string())?,
            Model::Spherical => spherical_system(&inst).map_err(|e| e.to_string())?,
        };
        let mut cfg = realcount::TrackerConfig::default();
        cfg.seed = trial_tracker_seed(args.seed, 0);
        let solved = realcount::solve(&sys, &cfg).map_err(|e| e.to_string())?;
        std::fs::write(path, solved.endpoint_dump()).map_err(|e| e.to_string())?;
    }

    let mut outputs = Vec::new();
    for model in models {
        let result = realisation_count(&graph, d, model, &opts).map_err(|e| e.to_string())?;
        if args.json {
            println!(
                "{}",
                result.json_line(&code.to_string(), graph.vertex_count())
            );
        } else {
            let star = match model {
                Model::Euclidean => "",
                Model::Spherical => "*",
            };
            let shown = match (result.value, args.doubled) {
                (CountValue::Finite(k), true) => CountValue::Finite(2 * k),
                (v, _) => v,
            };
            outputs.push(format!("c_{d}{star} = {shown}"));
            if result.unreliable {
                eprintln!(
                    "warning: unreliable result for {model}: {:?}",
                    result.diagnostics.flags
                );
            }
        }
    }
    if !outputs.is_empty() {
        println!("{}", outputs.join(", "));
    }
    Ok(())
}
