//! `nbr`: neighbourhood sizes from the command line.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nbr_core::graph::{Backend, GraphFormat, Mode};
use nbr_core::runner::{
    bench, exit_code, render, run, BackendChoice, BenchSuite, OutputFormat, RunConfig, RunError,
};
use nbr_core::seth::{build_reduction, parse_dimacs, reduction_sizes, verdict};
use nbr_core::td::DEFAULT_MAX_WIDTH;
use nbr_core::vc::{DEFAULT_BRANCH_BUDGET, DEFAULT_MAX_COVER};

/// Closed and open r-neighbourhood sizes of every vertex.
///
/// Exit codes: 0 ok, 2 bad options, 3 file I/O, 4 bad input file,
/// 5 backend refused or failed, 6 benchmark checksum mismatch.
/// NBR_THREADS caps the worker thread count.
#[derive(Parser)]
#[command(name = "nbr", version)]
struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute sizes for one graph.
    Run(RunArgs),
    /// Time backends on generated instances.
    Bench(BenchArgs),
    /// Build the graph for a CNF formula.
    Reduce(ReduceArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    input: PathBuf,
    /// edge-list | pace-gr
    #[arg(long, default_value = "edge-list")]
    format: GraphFormat,
    #[arg(long, default_value_t = 2)]
    r: usize,
    /// closed | open
    #[arg(long, default_value = "closed")]
    mode: Mode,
    /// auto | bfs | vc | tw
    #[arg(long, default_value = "auto")]
    backend: BackendChoice,
    /// Vertex cover file (ids numbered like the graph file).
    #[arg(long)]
    cover: Option<PathBuf>,
    /// Tree decomposition in PACE .td format.
    #[arg(long)]
    td: Option<PathBuf>,
    /// json | csv
    #[arg(long, default_value = "json")]
    output: OutputFormat,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Add wall time to JSON output.
    #[arg(long)]
    timing: bool,
    #[arg(long, default_value_t = DEFAULT_MAX_COVER)]
    max_cover: usize,
    #[arg(long, default_value_t = DEFAULT_MAX_WIDTH)]
    max_width: usize,
    /// Work cap for the cover search, in vertex scans.
    #[arg(long, default_value_t = DEFAULT_BRANCH_BUDGET)]
    branch_budget: u64,
}

#[derive(Args)]
struct BenchArgs {
    /// Suite JSON: {"instances": [...], "backends": [...], "reps": K}.
    #[arg(long)]
    suite: PathBuf,
    /// Comma-separated backends, overriding the suite.
    #[arg(long, value_delimiter = ',')]
    backends: Option<Vec<Backend>>,
    /// Repetitions per backend and instance, overriding the suite.
    #[arg(long)]
    reps: Option<usize>,
    /// json | csv
    #[arg(long, default_value = "json")]
    output: OutputFormat,
}

#[derive(Args)]
struct ReduceArgs {
    /// DIMACS cnf file.
    #[arg(long)]
    cnf: PathBuf,
    /// Writes <prefix>.edges and <prefix>.json.
    #[arg(long)]
    emit: Option<PathBuf>,
    /// Also decide satisfiability with this backend and print the verdict.
    #[arg(long)]
    decide: Option<Backend>,
}

fn read(path: &PathBuf) -> Result<String, RunError> {
    std::fs::read_to_string(path).map_err(|source| RunError::Io {
        path: path.clone(),
        source,
    })
}

fn write(path: PathBuf, text: &str) -> Result<(), RunError> {
    std::fs::write(&path, text).map_err(|source| RunError::Io { path, source })
}

fn cmd_run(a: RunArgs) -> Result<String, RunError> {
    let config = RunConfig {
        input: a.input,
        format: a.format,
        r: a.r,
        mode: a.mode,
        backend: a.backend,
        cover: a.cover,
        td: a.td,
        output: a.output,
        seed: a.seed,
        timing: a.timing,
        max_cover: a.max_cover,
        max_width: a.max_width,
        branch_budget: a.branch_budget,
    };
    let out = run(&config)?;
    Ok(render(&out, &config))
}

fn cmd_bench(a: BenchArgs) -> Result<String, RunError> {
    let mut suite = BenchSuite::from_json(&read(&a.suite)?).map_err(|message| RunError::Input {
        path: a.suite.clone(),
        message,
    })?;
    if let Some(b) = a.backends {
        suite.backends = b;
    }
    if let Some(k) = a.reps {
        suite.reps = k;
    }
    let report = bench(&suite)?;
    Ok(match a.output {
        OutputFormat::Json => serde_json::to_string_pretty(&report).expect("plain struct") + "\n",
        OutputFormat::Csv => report.to_csv(),
    })
}

fn cmd_reduce(a: ReduceArgs) -> Result<String, RunError> {
    let phi = parse_dimacs(&read(&a.cnf)?).map_err(|e| RunError::Input {
        path: a.cnf.clone(),
        message: e.to_string(),
    })?;
    let inst = build_reduction(&phi)?;
    let mut out = String::new();
    if let Some(prefix) = a.emit {
        let (edges, json) = inst.export();
        write(prefix.with_extension("edges"), &edges)?;
        write(prefix.with_extension("json"), &json)?;
    } else {
        out.push_str(&serde_json::to_string_pretty(&inst.sidecar()).expect("plain struct"));
        out.push('\n');
    }
    if let Some(backend) = a.decide {
        let v = verdict(&inst, &reduction_sizes(&inst, backend)?.sizes);
        let doc = serde_json::json!({
            "backend": backend,
            "satisfiable": v.satisfiable,
            "witness": v.witness,
            "min_size": v.min_size,
            "threshold": v.threshold,
        });
        out.push_str(&doc.to_string());
        out.push('\n');
    }
    Ok(out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    if let Ok(v) = std::env::var("NBR_THREADS") {
        match v.parse::<usize>() {
            Ok(k) if k > 0 => {
                if let Err(e) = rayon::ThreadPoolBuilder::new()
                    .num_threads(k)
                    .build_global()
                {
                    log::warn!("could not size the thread pool: {e}");
                }
            }
            _ => {
                eprintln!("error: NBR_THREADS must be a positive integer, got `{v}`");
                return ExitCode::from(exit_code::CONFIG as u8);
            }
        }
    }

    let result = match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Reduce(a) => cmd_reduce(a),
    };
    match result {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
