//! Batch runs and benchmarks over all backends.
//!
//! [`run`] computes sizes for one graph file; [`bench`] times a suite of
//! generated instances across backends and refuses to report if any two
//! backends disagree on an instance.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{
    bfs_sizes, checksum, generate, open_from_closed, parse_graph, Backend, Graph, GraphError,
    GraphFormat, GraphKind, Mode, SizesResult,
};
use crate::seth::{build_reduction, random_cnf, SethError};
use crate::td::{
    grid_decomposition, parse_td, solve_tw_with, validate_td, TdError, TreeDecomposition, TwConfig,
    DEFAULT_MAX_WIDTH,
};
use crate::vc::{
    find_vertex_cover_with_budget, solve_vc_with, validate_cover, VcConfig, VcError,
    DEFAULT_BRANCH_BUDGET, DEFAULT_MAX_COVER,
};

/// Process exit codes, one per error class.
pub mod exit_code {
    pub const OK: i32 = 0;
    /// Conflicting or invalid options.
    pub const CONFIG: i32 = 2;
    /// A file could not be read or written.
    pub const IO: i32 = 3;
    /// An input file failed to parse or validate.
    pub const INPUT: i32 = 4;
    /// A backend refused or failed (parameter caps, search budget).
    pub const BACKEND: i32 = 5;
    /// Two backends disagreed during a benchmark.
    pub const CHECKSUM: i32 = 6;
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Input { path: PathBuf, message: String },
    #[error("{0}")]
    Vc(#[from] VcError),
    #[error("{0}")]
    Tw(#[from] TdError),
    #[error("{0}")]
    Seth(#[from] SethError),
    #[error("checksum mismatch on instance `{instance}` (seed {seed:?}): {detail}")]
    ChecksumMismatch {
        instance: String,
        seed: Option<u64>,
        detail: String,
    },
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => exit_code::CONFIG,
            RunError::Io { .. } => exit_code::IO,
            RunError::Input { .. } => exit_code::INPUT,
            RunError::Vc(_) | RunError::Tw(_) => exit_code::BACKEND,
            RunError::Seth(SethError::Vc(_) | SethError::Tw(_)) => exit_code::BACKEND,
            RunError::Seth(_) => exit_code::INPUT,
            RunError::ChecksumMismatch { .. } => exit_code::CHECKSUM,
        }
    }
}

/// A fixed backend or automatic selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BackendChoice {
    Auto,
    Fixed(Backend),
}

impl FromStr for BackendChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "auto" => Ok(BackendChoice::Auto),
            other => other
                .parse()
                .map(BackendChoice::Fixed)
                .map_err(|_| format!("unknown backend `{other}` (expected auto|bfs|vc|tw)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(format!(
                "unknown output format `{other}` (expected json|csv)"
            )),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub input: PathBuf,
    pub format: GraphFormat,
    pub r: usize,
    pub mode: Mode,
    pub backend: BackendChoice,
    /// Vertex ids, whitespace separated, numbered like the graph format.
    pub cover: Option<PathBuf>,
    /// PACE `.td` file.
    pub td: Option<PathBuf>,
    pub output: OutputFormat,
    /// Recorded in the output; no backend currently draws random numbers.
    pub seed: u64,
    /// Include wall time in the output (makes output bytes run-dependent).
    pub timing: bool,
    pub max_cover: usize,
    pub max_width: usize,
    pub branch_budget: u64,
}

impl RunConfig {
    pub fn new(input: impl Into<PathBuf>) -> Self {
        RunConfig {
            input: input.into(),
            format: GraphFormat::EdgeList,
            r: 2,
            mode: Mode::Closed,
            backend: BackendChoice::Auto,
            cover: None,
            td: None,
            output: OutputFormat::Json,
            seed: 0,
            timing: false,
            max_cover: DEFAULT_MAX_COVER,
            max_width: DEFAULT_MAX_WIDTH,
            branch_budget: DEFAULT_BRANCH_BUDGET,
        }
    }

    fn check(&self) -> Result<(), RunError> {
        if let BackendChoice::Fixed(b @ (Backend::Vc | Backend::Tw)) = self.backend {
            if self.r != 2 {
                return Err(RunError::Config(format!(
                    "the {b} backend computes radius 2 only; got --r {}",
                    self.r
                )));
            }
        }
        if self.r == 0 && self.mode == Mode::Open {
            return Err(RunError::Config("open neighbourhoods need r >= 1".into()));
        }
        Ok(())
    }
}

fn read(path: &Path) -> Result<String, RunError> {
    std::fs::read_to_string(path).map_err(|source| RunError::Io {
        path: path.to_owned(),
        source,
    })
}

fn input_error(path: &Path, e: impl std::fmt::Display) -> RunError {
    RunError::Input {
        path: path.to_owned(),
        message: e.to_string(),
    }
}

/// Parses a cover file: whitespace-separated vertex ids, `c`/`#` comment
/// lines, and an optional PACE `s vc` header line. Ids are 1-based when
/// `one_based` is set.
pub fn parse_cover(text: &str, one_based: bool) -> Result<Vec<usize>, String> {
    let mut out = Vec::new();
    for line in text.lines().map(str::trim) {
        if line.is_empty()
            || line.starts_with('c')
            || line.starts_with('#')
            || line.starts_with('s')
        {
            continue;
        }
        for tok in line.split_whitespace() {
            let v: usize = tok
                .parse()
                .map_err(|_| format!("bad vertex id `{tok}` in cover"))?;
            if one_based {
                out.push(v.checked_sub(1).ok_or("vertex id 0 in a 1-based cover")?);
            } else {
                out.push(v);
            }
        }
    }
    Ok(out)
}

/// Sizes plus how the backend was chosen.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub result: SizesResult,
    pub n: usize,
    pub m: usize,
    pub reason: String,
}

enum Plan {
    Bfs,
    /// `None` searches for a minimum cover.
    Vc(Option<Vec<usize>>),
    Tw(Option<TreeDecomposition>),
}

pub fn run(config: &RunConfig) -> Result<RunOutput, RunError> {
    config.check()?;
    let text = read(&config.input)?;
    let g = parse_graph(&text, config.format).map_err(|e| input_error(&config.input, e))?;
    let one_based = config.format == GraphFormat::PaceGr;

    let cover = match &config.cover {
        Some(p) => {
            let c = parse_cover(&read(p)?, one_based).map_err(|e| input_error(p, e))?;
            validate_cover(&g, &c).map_err(|e| input_error(p, e))?;
            Some(c)
        }
        None => None,
    };
    let td = match &config.td {
        Some(p) => {
            let td = parse_td(&read(p)?).map_err(|e| input_error(p, e))?;
            let report = validate_td(&g, &td);
            if !report.is_ok() {
                return Err(input_error(p, TdError::Invalid(report)));
            }
            Some(td)
        }
        None => None,
    };

    let (plan, reason) = select(config, &g, cover, td);
    log::info!("backend selection: {reason}");
    let result = execute(config, &g, plan)?;
    Ok(RunOutput {
        n: g.n(),
        m: g.m(),
        result,
        reason,
    })
}

fn select(
    config: &RunConfig,
    g: &Graph,
    cover: Option<Vec<usize>>,
    td: Option<TreeDecomposition>,
) -> (Plan, String) {
    match config.backend {
        BackendChoice::Fixed(Backend::Bfs) => (Plan::Bfs, "bfs requested".into()),
        BackendChoice::Fixed(Backend::Tw) => (Plan::Tw(td), "tw requested".into()),
        BackendChoice::Fixed(Backend::Vc) => {
            let why = if cover.is_some() {
                "vc requested with supplied cover"
            } else {
                "vc requested; cover will be searched"
            };
            (Plan::Vc(cover), why.into())
        }
        BackendChoice::Auto => {
            if config.r != 2 {
                return (Plan::Bfs, format!("r = {} needs bfs", config.r));
            }
            if let Some(td) = td {
                if td.width() <= config.max_width {
                    let why = format!(
                        "supplied decomposition has width {} <= {}",
                        td.width(),
                        config.max_width
                    );
                    return (Plan::Tw(Some(td)), why);
                }
                log::info!(
                    "supplied decomposition width {} above cap {}",
                    td.width(),
                    config.max_width
                );
            }
            if let Some(c) = cover {
                if c.len() <= config.max_cover {
                    let why = format!(
                        "supplied cover has {} <= {} vertices",
                        c.len(),
                        config.max_cover
                    );
                    return (Plan::Vc(Some(c)), why);
                }
                log::info!(
                    "supplied cover size {} above cap {}",
                    c.len(),
                    config.max_cover
                );
            }
            match find_vertex_cover_with_budget(g, None, config.branch_budget, config.max_cover) {
                Ok(c) => {
                    let why = format!(
                        "found a cover of {} <= {} vertices",
                        c.len(),
                        config.max_cover
                    );
                    (Plan::Vc(Some(c)), why)
                }
                Err(e) => (
                    Plan::Bfs,
                    format!("no usable cover ({e}); falling back to bfs"),
                ),
            }
        }
    }
}

fn execute(config: &RunConfig, g: &Graph, plan: Plan) -> Result<SizesResult, RunError> {
    let start = Instant::now();
    let closed = match plan {
        Plan::Bfs => return Ok(bfs_sizes(g, config.r, config.mode)),
        Plan::Vc(cover) => {
            let vc_config = VcConfig {
                max_cover: config.max_cover,
                branch_budget: config.branch_budget,
            };
            solve_vc_with(g, cover.as_deref(), vc_config)?
        }
        Plan::Tw(td) => {
            let tw_config = TwConfig {
                max_width: config.max_width,
                ..TwConfig::default()
            };
            solve_tw_with(g, td.as_ref(), &tw_config)?
        }
    };
    let mut result = match config.mode {
        Mode::Closed => closed,
        Mode::Open => {
            let parameter = closed.parameter;
            let peak = closed.peak_table_entries;
            let one = bfs_sizes(g, 1, Mode::Closed);
            let mut open = open_from_closed(&closed, &one).expect("radii 2 and 1, both closed");
            open.parameter = parameter;
            open.peak_table_entries = peak;
            open
        }
    };
    result.elapsed = start.elapsed();
    Ok(result)
}

#[derive(Serialize)]
struct JsonOutput<'a> {
    backend: Backend,
    r: usize,
    mode: Mode,
    n: usize,
    m: usize,
    parameter: Option<usize>,
    peak_table_entries: Option<usize>,
    seed: u64,
    checksum: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    elapsed_ms: Option<f64>,
    sizes: &'a [usize],
}

/// Serializes a run. Output is byte-identical for identical inputs unless
/// `config.timing` is set.
pub fn render(out: &RunOutput, config: &RunConfig) -> String {
    let r = &out.result;
    match config.output {
        OutputFormat::Json => {
            let doc = JsonOutput {
                backend: r.backend,
                r: r.r,
                mode: r.mode,
                n: out.n,
                m: out.m,
                parameter: r.parameter,
                peak_table_entries: r.peak_table_entries,
                seed: config.seed,
                checksum: r.checksum(),
                elapsed_ms: config.timing.then(|| millis(r.elapsed)),
                sizes: &r.sizes,
            };
            serde_json::to_string(&doc).expect("plain struct") + "\n"
        }
        OutputFormat::Csv => {
            let mut s = String::from("vertex,size\n");
            for (v, size) in r.sizes.iter().enumerate() {
                let _ = writeln!(s, "{v},{size}");
            }
            s
        }
    }
}

fn millis(d: Duration) -> f64 {
    (d.as_secs_f64() * 1e6).round() / 1e3
}

/// A generated graph with the cover and decomposition its generator knows.
pub type Materialized = (Graph, Option<Vec<usize>>, Option<TreeDecomposition>);

/// One benchmark instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum InstanceSpec {
    Gnm {
        n: usize,
        m: usize,
        seed: u64,
    },
    /// The vc backend is given the generator's cover `0..t`.
    Split {
        n: usize,
        t: usize,
        p: f64,
        seed: u64,
    },
    /// The tw backend is given the sliding-window decomposition.
    Grid {
        rows: usize,
        cols: usize,
    },
    /// Graph built from a random `k`-CNF; vc gets the clause-side cover.
    Reduction {
        vars: usize,
        clauses: usize,
        #[serde(default = "default_k")]
        k: usize,
        seed: u64,
    },
}

fn default_k() -> usize {
    3
}

impl InstanceSpec {
    fn seed(&self) -> Option<u64> {
        match *self {
            InstanceSpec::Gnm { seed, .. }
            | InstanceSpec::Split { seed, .. }
            | InstanceSpec::Reduction { seed, .. } => Some(seed),
            InstanceSpec::Grid { .. } => None,
        }
    }

    fn default_name(&self) -> String {
        match *self {
            InstanceSpec::Gnm { n, m, seed } => format!("gnm-{n}-{m}-s{seed}"),
            InstanceSpec::Split { n, t, p, seed } => format!("split-{n}-{t}-{p}-s{seed}"),
            InstanceSpec::Grid { rows, cols } => format!("grid-{rows}x{cols}"),
            InstanceSpec::Reduction {
                vars,
                clauses,
                k,
                seed,
            } => format!("reduction-{k}cnf-{vars}-{clauses}-s{seed}"),
        }
    }

    /// The graph plus a known cover and decomposition, where the generator
    /// provides them.
    pub fn materialize(&self) -> Result<Materialized, RunError> {
        let gen = |kind: GraphKind| {
            generate(&kind)
                .map_err(|e: GraphError| RunError::Config(format!("instance {kind:?}: {e}")))
        };
        Ok(match *self {
            InstanceSpec::Gnm { n, m, seed } => (gen(GraphKind::Gnm { n, m, seed })?, None, None),
            InstanceSpec::Split { n, t, p, seed } => {
                let g = gen(GraphKind::Split { n, t, p, seed })?;
                (g, Some((0..t).collect()), None)
            }
            InstanceSpec::Grid { rows, cols } => {
                let g = gen(GraphKind::Grid { rows, cols })?;
                (g, None, Some(grid_decomposition(rows, cols)))
            }
            InstanceSpec::Reduction {
                vars,
                clauses,
                k,
                seed,
            } => {
                let inst = build_reduction(&random_cnf(vars, clauses, k, seed))?;
                let cover = inst.cover();
                (inst.graph, Some(cover), None)
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchInstance {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(flatten)]
    pub spec: InstanceSpec,
}

impl BenchInstance {
    pub fn name(&self) -> String {
        self.name
            .clone()
            .unwrap_or_else(|| self.spec.default_name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchSuite {
    pub instances: Vec<BenchInstance>,
    #[serde(default = "all_backends")]
    pub backends: Vec<Backend>,
    #[serde(default = "one")]
    pub reps: usize,
}

fn all_backends() -> Vec<Backend> {
    Backend::ALL.to_vec()
}

fn one() -> usize {
    1
}

impl BenchSuite {
    pub fn from_json(text: &str) -> Result<Self, String> {
        serde_json::from_str(text).map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub instance: String,
    pub backend: Backend,
    pub n: usize,
    pub m: usize,
    /// Cover size for vc, width for tw.
    pub parameter: Option<usize>,
    pub median_ms: f64,
    pub times_ms: Vec<f64>,
    pub peak_table_entries: Option<usize>,
    pub checksum: String,
}

/// A backend that refused an instance because of its parameter caps.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkippedRun {
    pub instance: String,
    pub backend: Backend,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    #[serde(default)]
    pub skipped: Vec<SkippedRun>,
}

impl BenchReport {
    pub fn to_csv(&self) -> String {
        let mut s =
            String::from("instance,backend,n,m,parameter,median_ms,peak_table_entries,checksum\n");
        for r in &self.rows {
            let opt = |x: Option<usize>| x.map_or(String::new(), |v| v.to_string());
            let _ = writeln!(
                s,
                "{},{},{},{},{},{:.3},{},{}",
                r.instance,
                r.backend,
                r.n,
                r.m,
                opt(r.parameter),
                r.median_ms,
                opt(r.peak_table_entries),
                r.checksum
            );
        }
        s
    }

    pub fn row(&self, instance: &str, backend: Backend) -> Option<&BenchRow> {
        self.rows
            .iter()
            .find(|r| r.instance == instance && r.backend == backend)
    }
}

fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        (v[k / 2 - 1] + v[k / 2]) / 2.0
    }
}

fn run_backend(
    backend: Backend,
    g: &Graph,
    cover: Option<&[usize]>,
    td: Option<&TreeDecomposition>,
) -> Result<SizesResult, RunError> {
    Ok(match backend {
        Backend::Bfs => bfs_sizes(g, 2, Mode::Closed),
        Backend::Vc => solve_vc_with(g, cover, VcConfig::default())?,
        Backend::Tw => solve_tw_with(g, td, &TwConfig::default())?,
    })
}

/// Whether `e` is a backend declining an instance (too large a parameter)
/// rather than a failure.
fn is_refusal(e: &RunError) -> bool {
    matches!(
        e,
        RunError::Vc(
            VcError::NoCoverWithin { .. }
                | VcError::CoverTooLarge { .. }
                | VcError::BudgetExceeded(_)
        ) | RunError::Tw(TdError::WidthTooLarge { .. })
    )
}

/// Runs every backend `reps` times on every instance, at radius 2.
/// Backends whose parameter caps rule an instance out are listed under
/// `skipped`.
///
/// Instances run one after another so timings do not interfere; backends
/// parallelize internally.
pub fn bench(suite: &BenchSuite) -> Result<BenchReport, RunError> {
    if suite.reps == 0 {
        return Err(RunError::Config("reps must be at least 1".into()));
    }
    if suite.backends.is_empty() {
        return Err(RunError::Config("no backends selected".into()));
    }
    let mut report = BenchReport::default();
    for inst in &suite.instances {
        let name = inst.name();
        let (g, cover, td) = inst.spec.materialize()?;
        let mut first: Option<(Backend, String)> = None;
        for &backend in &suite.backends {
            let mut times = Vec::with_capacity(suite.reps);
            let mut last = None;
            for _ in 0..suite.reps {
                let start = Instant::now();
                match run_backend(backend, &g, cover.as_deref(), td.as_ref()) {
                    Ok(result) => last = Some(result),
                    Err(e) if is_refusal(&e) => {
                        log::info!("{name} {backend}: skipped ({e})");
                        report.skipped.push(SkippedRun {
                            instance: name.clone(),
                            backend,
                            reason: e.to_string(),
                        });
                        break;
                    }
                    Err(e) => return Err(e),
                }
                times.push(millis(start.elapsed()));
            }
            let Some(result) = last else { continue };
            let sum = checksum(&result.sizes);
            match &first {
                None => first = Some((backend, sum.clone())),
                Some((b0, s0)) if *s0 != sum => {
                    return Err(RunError::ChecksumMismatch {
                        instance: name,
                        seed: inst.spec.seed(),
                        detail: format!("{b0} gave {s0}, {backend} gave {sum}"),
                    });
                }
                Some(_) => {}
            }
            log::info!("{name} {backend}: median {:.1} ms", median(&times));
            report.rows.push(BenchRow {
                instance: name.clone(),
                backend,
                n: g.n(),
                m: g.m(),
                parameter: result.parameter,
                median_ms: median(&times),
                times_ms: times,
                peak_table_entries: result.peak_table_entries,
                checksum: sum,
            });
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_choices() {
        assert_eq!("auto".parse(), Ok(BackendChoice::Auto));
        assert_eq!("tw".parse(), Ok(BackendChoice::Fixed(Backend::Tw)));
        assert!("nope".parse::<BackendChoice>().is_err());
        assert_eq!("csv".parse(), Ok(OutputFormat::Csv));
    }

    #[test]
    fn cover_files() {
        assert_eq!(parse_cover("c x\n0 2\n5\n", false).unwrap(), vec![0, 2, 5]);
        assert_eq!(parse_cover("s vc 4 2\n1\n3\n", true).unwrap(), vec![0, 2]);
        assert!(parse_cover("0\n", true).is_err());
        assert!(parse_cover("a\n", false).is_err());
    }

    #[test]
    fn suite_json() {
        let suite = BenchSuite::from_json(
            r#"{"instances":[{"kind":"grid","rows":3,"cols":4},
                {"name":"s","kind":"split","n":30,"t":4,"p":0.5,"seed":1},
                {"kind":"reduction","vars":4,"clauses":5,"seed":2}],"reps":2}"#,
        )
        .unwrap();
        assert_eq!(suite.backends, Backend::ALL.to_vec());
        assert_eq!(suite.instances[0].name(), "grid-3x4");
        assert_eq!(suite.instances[1].name(), "s");
        let report = bench(&suite).unwrap();
        assert_eq!(report.rows.len(), 9);
        for r in &report.rows {
            assert_eq!(r.times_ms.len(), 2);
            assert_eq!(
                r.checksum,
                report.row(&r.instance, Backend::Bfs).unwrap().checksum
            );
        }
        assert!(report.to_csv().lines().count() == 10);
        assert!(report.skipped.is_empty());
        // clause-side cover: m + 2
        assert_eq!(report.rows[7].parameter, Some(7));
    }

    #[test]
    fn capped_backends_are_skipped() {
        let suite = BenchSuite {
            instances: vec![BenchInstance {
                name: None,
                spec: InstanceSpec::Grid { rows: 4, cols: 50 },
            }],
            backends: Backend::ALL.to_vec(),
            reps: 1,
        };
        let report = bench(&suite).unwrap();
        assert_eq!(report.rows.len(), 2);
        assert_eq!(report.skipped.len(), 1);
        assert_eq!(report.skipped[0].backend, Backend::Vc);
    }

    #[test]
    fn median_of_even_and_odd() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
