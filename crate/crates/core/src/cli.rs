//! The `orient` command line.
//!
//! Exit codes: 0 success, 1 verification violation, 2 usage error,
//! 3 input error, 4 cap or budget exhausted without a result.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::exact::{
    brute_force_prob_with, ExactEngine, Limits, DEFAULT_EDGE_CAP, DEFAULT_STATE_CAP,
};
use crate::generators::{complete_graph, BiasPolicy, RandomFamily};
use crate::graph::{EventExpr, Graph, VertexId};
use crate::grid::{build_grid, find_nonmonotonicity_witness, grid_reach_stats, GridFlip, GridSpec, GridStats, Witness};
use crate::inequality::{
    alm_linusson_covariance, build_proof_quadruple_with, check_four_functions,
    hypothesis_violations, verify_mcdiarmid, verify_theorem_1, verify_theorem_2, CovarianceMode,
    SourcePolicy, VerificationReport, VerifyMode,
};
use crate::monte_carlo::{estimate_event, estimate_slack, McConfig};
use crate::rng::RandomStream;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INPUT: i32 = 3;
pub const EXIT_RESOURCE: i32 = 4;

/// Stream indices used for generated graphs, disjoint from sampling streams.
const GRAPH_STREAM_BASE: u64 = 1 << 62;

#[derive(Debug, Parser)]
#[command(name = "orient", version, about = "Connection probabilities in biased random orientations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact connection or joint probability.
    Exact(ExactCmd),
    /// Monte Carlo estimate of a connection/joint probability or slack.
    Mc(McCmd),
    /// Check P(s→a ∩ s→b) ≥ P(s→a)P(s→b) over all vertex triples.
    #[command(name = "verify-t1")]
    VerifyT1(VerifyT1Cmd),
    /// Same check with source sets.
    #[command(name = "verify-t2")]
    VerifyT2(VerifyT2Cmd),
    /// Build the conditioning quadruple for (S, a, b) and check the
    /// four-functions hypothesis on it.
    Fourfunc(FourFuncCmd),
    /// Compare unbiased reachable-set law with the percolation cluster law.
    Mcdiarmid(McDiarmidCmd),
    /// Cov(a→s, s→b) on the unbiased complete graph.
    #[command(name = "alm-linusson")]
    AlmLinusson(AlmLinussonCmd),
    /// Reachability statistics on biased grid orientations.
    #[command(name = "grid-stats")]
    GridStats(GridStatsCmd),
    /// Search for an edge flip that destroys a→b on a grid.
    Witness(WitnessCmd),
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct InputSource {
    /// Edge-list file.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Grid box `WxH`.
    #[arg(long)]
    grid: Option<String>,
    /// Complete graph K_n.
    #[arg(long)]
    complete: Option<usize>,
    /// Random graph `n=<k>,m=<k>` or `n=<k>,p=<x>` (needs --seed).
    #[arg(long)]
    random: Option<RandomFamily>,
}

#[derive(Debug, Args)]
struct InputArgs {
    #[command(flatten)]
    source: InputSource,
    /// Bias policy for generated graphs: `uniform`, `const:<p>` or `<p>`.
    /// Defaults to uniform for --random and 0.5 otherwise.
    #[arg(long)]
    bias: Option<BiasPolicy>,
    /// Number of random graphs to generate.
    #[arg(long, default_value_t = 1)]
    trials: u64,
}

#[derive(Debug, Args)]
struct CapArgs {
    #[arg(long, default_value_t = DEFAULT_EDGE_CAP)]
    edge_cap: usize,
    #[arg(long, default_value_t = DEFAULT_STATE_CAP)]
    state_cap: usize,
}

impl CapArgs {
    fn limits(&self) -> Limits {
        Limits {
            edge_cap: self.edge_cap,
            state_cap: self.state_cap,
        }
    }
}

#[derive(Debug, Args)]
struct SamplingArgs {
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 1)]
    streams: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Write machine output here instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Exact,
    Mc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ExactMethod {
    Recursion,
    Enumeration,
}

#[derive(Debug, Args)]
struct ExactCmd {
    #[command(flatten)]
    input: InputArgs,
    /// Source vertex or comma-separated source set.
    #[arg(long, required = true, value_delimiter = ',')]
    source: Vec<VertexId>,
    #[arg(long)]
    target: VertexId,
    /// Second target for the joint event.
    #[arg(long)]
    target2: Option<VertexId>,
    #[arg(long, value_enum, default_value = "recursion")]
    method: ExactMethod,
    #[command(flatten)]
    caps: CapArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct McCmd {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, required = true, value_delimiter = ',')]
    source: Vec<VertexId>,
    #[arg(long)]
    target: VertexId,
    #[arg(long)]
    target2: Option<VertexId>,
    /// Estimate the slack of the two targets instead of the joint event.
    #[arg(long, requires = "target2")]
    slack: bool,
    #[command(flatten)]
    sampling: SamplingArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct VerifyT1Cmd {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_enum, default_value = "exact")]
    mode: Mode,
    #[arg(long, default_value_t = 1e-9)]
    tolerance: f64,
    #[command(flatten)]
    caps: CapArgs,
    #[command(flatten)]
    sampling: SamplingArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct VerifyT2Cmd {
    #[command(flatten)]
    input: InputArgs,
    /// Check every source set with at most this many vertices.
    #[arg(long, conflicts_with = "random_sets")]
    max_size: Option<usize>,
    /// Check this many random source sets (needs --seed).
    #[arg(long)]
    random_sets: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 1e-9)]
    tolerance: f64,
    #[command(flatten)]
    caps: CapArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct FourFuncCmd {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, required = true, value_delimiter = ',')]
    source: Vec<VertexId>,
    #[arg(long)]
    target_a: VertexId,
    #[arg(long)]
    target_b: VertexId,
    #[arg(long, default_value_t = 1e-12)]
    tolerance: f64,
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    caps: CapArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct McDiarmidCmd {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, default_value_t = 0)]
    root: VertexId,
    #[arg(long, default_value_t = 1e-9)]
    tolerance: f64,
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    caps: CapArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct AlmLinussonCmd {
    /// One or more complete-graph sizes, comma-separated.
    #[arg(long, required = true, value_delimiter = ',')]
    n: Vec<usize>,
    #[arg(long, value_enum, default_value = "exact")]
    mode: Mode,
    #[command(flatten)]
    caps: CapArgs,
    #[command(flatten)]
    sampling: SamplingArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct GridStatsCmd {
    #[arg(long)]
    width: usize,
    #[arg(long)]
    height: usize,
    /// One or more biases, comma-separated.
    #[arg(long, required = true, value_delimiter = ',')]
    bias: Vec<f64>,
    /// Origin as `x,y`.
    #[arg(long, default_value = "0,0")]
    origin: String,
    #[command(flatten)]
    sampling: SamplingArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct WitnessCmd {
    #[arg(long)]
    width: usize,
    #[arg(long)]
    height: usize,
    #[arg(long, default_value_t = 0.5)]
    bias: f64,
    /// Start vertex as `x,y`.
    #[arg(long)]
    a: String,
    /// End vertex as `x,y`.
    #[arg(long)]
    b: String,
    /// `right`, `left`, `up`, `down` (one edge axis) or `toward-high` /
    /// `toward-low` (any edge).
    #[arg(long, default_value = "right")]
    flip: GridFlip,
    #[arg(long, default_value_t = 1_000_000)]
    budget: u64,
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    out: OutputArgs,
}

enum Failure {
    Usage(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Lib(Error::Io(e))
    }
}

type CmdResult = std::result::Result<i32, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn need_seed(seed: Option<u64>, what: &str) -> std::result::Result<u64, Failure> {
    seed.ok_or_else(|| usage(format!("--seed is required for {what}")))
}

/// Parses `argv` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = stdout.write_all(text.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = stderr.write_all(text.as_bytes());
                    EXIT_USAGE
                }
            };
        }
    };
    match dispatch(cli.command, stdout) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Lib(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            if e.is_resource() {
                EXIT_RESOURCE
            } else {
                EXIT_INPUT
            }
        }
    }
}

fn dispatch(command: Command, stdout: &mut dyn Write) -> CmdResult {
    match command {
        Command::Exact(c) => cmd_exact(c, stdout),
        Command::Mc(c) => cmd_mc(c, stdout),
        Command::VerifyT1(c) => cmd_verify_t1(c, stdout),
        Command::VerifyT2(c) => cmd_verify_t2(c, stdout),
        Command::Fourfunc(c) => cmd_fourfunc(c, stdout),
        Command::Mcdiarmid(c) => cmd_mcdiarmid(c, stdout),
        Command::AlmLinusson(c) => cmd_alm_linusson(c, stdout),
        Command::GridStats(c) => cmd_grid_stats(c, stdout),
        Command::Witness(c) => cmd_witness(c, stdout),
    }
}

fn parse_dims(text: &str) -> std::result::Result<(usize, usize), Failure> {
    let (w, h) = text
        .split_once(['x', 'X'])
        .ok_or_else(|| usage(format!("bad grid `{text}`, want WxH")))?;
    let parse = |s: &str| {
        s.trim()
            .parse::<usize>()
            .map_err(|_| usage(format!("bad grid `{text}`, want WxH")))
    };
    Ok((parse(w)?, parse(h)?))
}

fn parse_point(text: &str) -> std::result::Result<(usize, usize), Failure> {
    let (x, y) = text
        .split_once(',')
        .ok_or_else(|| usage(format!("bad point `{text}`, want x,y")))?;
    let parse = |s: &str| {
        s.trim()
            .parse::<usize>()
            .map_err(|_| usage(format!("bad point `{text}`, want x,y")))
    };
    Ok((parse(x)?, parse(y)?))
}

fn constant_bias(policy: Option<BiasPolicy>, what: &str) -> std::result::Result<f64, Failure> {
    match policy.unwrap_or(BiasPolicy::Constant(0.5)) {
        BiasPolicy::Constant(p) => Ok(p),
        BiasPolicy::Uniform => Err(usage(format!("{what} needs a constant --bias"))),
    }
}

/// Graphs named by the input flags; more than one only for `--random` with
/// `--trials > 1`.
fn load_graphs(input: &InputArgs, seed: Option<u64>) -> std::result::Result<Vec<Graph>, Failure> {
    if input.trials == 0 {
        return Err(usage("--trials must be at least 1"));
    }
    if input.trials > 1 && input.source.random.is_none() {
        return Err(usage("--trials only applies to --random"));
    }
    let src = &input.source;
    if let Some(path) = &src.graph {
        if input.bias.is_some() {
            return Err(usage("--bias does not apply to --graph input"));
        }
        let text = fs::read_to_string(path).map_err(|e| {
            Failure::Lib(Error::Input(format!("cannot read {}: {e}", path.display())))
        })?;
        return Ok(vec![Graph::parse(&text)?]);
    }
    if let Some(dims) = &src.grid {
        let (w, h) = parse_dims(dims)?;
        let p = constant_bias(input.bias, "--grid")?;
        return Ok(vec![build_grid(GridSpec::new(w, h, p))?.graph]);
    }
    if let Some(n) = src.complete {
        let policy = input.bias.unwrap_or(BiasPolicy::Constant(0.5));
        let mut stream = RandomStream::new(seed.unwrap_or(0), GRAPH_STREAM_BASE);
        if policy == BiasPolicy::Uniform && seed.is_none() {
            return Err(usage("--seed is required for random biases"));
        }
        return Ok(vec![complete_graph(n, policy, &mut stream)?]);
    }
    let family = src.random.expect("input group is required");
    let seed = need_seed(seed, "--random")?;
    let policy = input.bias.unwrap_or(BiasPolicy::Uniform);
    (0..input.trials)
        .map(|t| {
            let mut stream = RandomStream::new(seed, GRAPH_STREAM_BASE + t);
            family.generate(policy, &mut stream).map_err(Failure::from)
        })
        .collect()
}

fn load_single(input: &InputArgs, seed: Option<u64>) -> std::result::Result<Graph, Failure> {
    if input.trials != 1 {
        return Err(usage("this subcommand takes a single graph (--trials 1)"));
    }
    Ok(load_graphs(input, seed)?.remove(0))
}

fn emit_text(out: &OutputArgs, stdout: &mut dyn Write, text: &str) -> std::io::Result<()> {
    match &out.output {
        Some(path) => fs::write(path, text).map_err(|e| {
            std::io::Error::new(e.kind(), format!("cannot write {}: {e}", path.display()))
        }),
        None => stdout.write_all(text.as_bytes()),
    }
}

fn emit_json<T: Serialize>(out: &OutputArgs, stdout: &mut dyn Write, value: &T) -> std::result::Result<(), Failure> {
    if out.format == Some(Format::Csv) {
        return Err(usage("this subcommand only writes JSON"));
    }
    let mut text = serde_json::to_string(value).expect("reports are always serializable");
    text.push('\n');
    emit_text(out, stdout, &text)?;
    Ok(())
}

fn report_exit(report: &VerificationReport) -> i32 {
    if report.passed() {
        EXIT_OK
    } else {
        EXIT_VIOLATION
    }
}

fn label_trial(mut report: VerificationReport, trial: usize, trials: usize) -> VerificationReport {
    if trials > 1 {
        if report.instances_checked > 0 {
            report.worst_instance = format!("graph {trial}: {}", report.worst_instance);
        }
        for v in &mut report.violations {
            v.instance = format!("graph {trial}: {}", v.instance);
        }
        for e in &mut report.estimates {
            e.instance = format!("graph {trial}: {}", e.instance);
        }
    }
    report
}

fn cmd_exact(c: ExactCmd, stdout: &mut dyn Write) -> CmdResult {
    let graph = load_single(&c.input, None)?;
    let limits = c.caps.limits();
    let mut targets = vec![c.target];
    targets.extend(c.target2);
    let result = match c.method {
        ExactMethod::Recursion => {
            ExactEngine::with_limits(&graph, limits)?.conjunction(&c.source, &targets)?
        }
        ExactMethod::Enumeration => {
            let event = match c.target2 {
                Some(b) => EventExpr::joint(&c.source, c.target, b)?,
                None => EventExpr::connection(&c.source, c.target)?,
            };
            brute_force_prob_with(&graph, &event, limits)?
        }
    };
    emit_json(&c.out, stdout, &result)?;
    Ok(EXIT_OK)
}

fn cmd_mc(c: McCmd, stdout: &mut dyn Write) -> CmdResult {
    let seed = need_seed(c.sampling.seed, "mc")?;
    let graph = load_single(&c.input, Some(seed))?;
    let config = McConfig::new(c.sampling.samples, seed, c.sampling.streams);
    if c.slack {
        let b = c.target2.expect("clap enforces --target2");
        let est = estimate_slack(&graph, &c.source, c.target, b, config)?;
        emit_json(&c.out, stdout, &est)?;
    } else {
        let event = match c.target2 {
            Some(b) => EventExpr::joint(&c.source, c.target, b)?,
            None => EventExpr::connection(&c.source, c.target)?,
        };
        emit_json(&c.out, stdout, &estimate_event(&graph, &event, config)?)?;
    }
    Ok(EXIT_OK)
}

fn cmd_verify_t1(c: VerifyT1Cmd, stdout: &mut dyn Write) -> CmdResult {
    let mode = match c.mode {
        Mode::Exact => VerifyMode::Exact(c.caps.limits()),
        Mode::Mc => {
            let seed = need_seed(c.sampling.seed, "--mode mc")?;
            VerifyMode::MonteCarlo(McConfig::new(c.sampling.samples, seed, c.sampling.streams))
        }
    };
    let graphs = load_graphs(&c.input, c.sampling.seed)?;
    let mut report = VerificationReport::new();
    for (t, g) in graphs.iter().enumerate() {
        let r = verify_theorem_1(g, mode, c.tolerance)?;
        report = report.merge(label_trial(r, t, graphs.len()));
    }
    emit_json(&c.out, stdout, &report)?;
    Ok(report_exit(&report))
}

fn cmd_verify_t2(c: VerifyT2Cmd, stdout: &mut dyn Write) -> CmdResult {
    let policy = match (c.max_size, c.random_sets) {
        (_, Some(count)) => SourcePolicy::Random {
            count,
            seed: need_seed(c.seed, "--random-sets")?,
        },
        (k, None) => SourcePolicy::UpToSize(k.unwrap_or(3)),
    };
    let graphs = load_graphs(&c.input, c.seed)?;
    let mut report = VerificationReport::new();
    for (t, g) in graphs.iter().enumerate() {
        let r = verify_theorem_2(g, policy, c.caps.limits(), c.tolerance)?;
        report = report.merge(label_trial(r, t, graphs.len()));
    }
    emit_json(&c.out, stdout, &report)?;
    Ok(report_exit(&report))
}

#[derive(Debug, Serialize, Deserialize)]
struct FourFuncOutput {
    #[serde(flatten)]
    report: VerificationReport,
    ground: Vec<VertexId>,
    hypothesis_violations: usize,
    sum_alpha: f64,
    sum_beta: f64,
    sum_gamma: f64,
    sum_delta: f64,
}

fn cmd_fourfunc(c: FourFuncCmd, stdout: &mut dyn Write) -> CmdResult {
    let graph = load_single(&c.input, c.seed)?;
    let q = build_proof_quadruple_with(&graph, &c.source, c.target_a, c.target_b, c.caps.limits())?;
    let report = check_four_functions(&q, c.tolerance)?;
    let [sum_alpha, sum_beta, sum_gamma, sum_delta] = q.sums();
    let out = FourFuncOutput {
        hypothesis_violations: hypothesis_violations(&report),
        ground: q.ground().to_vec(),
        report,
        sum_alpha,
        sum_beta,
        sum_gamma,
        sum_delta,
    };
    emit_json(&c.out, stdout, &out)?;
    Ok(report_exit(&out.report))
}

#[derive(Debug, Serialize, Deserialize)]
struct McDiarmidOutput {
    root: VertexId,
    tv: f64,
}

fn cmd_mcdiarmid(c: McDiarmidCmd, stdout: &mut dyn Write) -> CmdResult {
    let graph = load_single(&c.input, c.seed)?;
    let tv = verify_mcdiarmid(&graph, c.root, c.caps.limits())?;
    emit_json(&c.out, stdout, &McDiarmidOutput { root: c.root, tv })?;
    Ok(if tv <= c.tolerance { EXIT_OK } else { EXIT_VIOLATION })
}

fn cmd_alm_linusson(c: AlmLinussonCmd, stdout: &mut dyn Write) -> CmdResult {
    let mode = match c.mode {
        Mode::Exact => CovarianceMode::Exact(c.caps.limits()),
        Mode::Mc => {
            let seed = need_seed(c.sampling.seed, "--mode mc")?;
            CovarianceMode::MonteCarlo(McConfig::new(c.sampling.samples, seed, c.sampling.streams))
        }
    };
    let reports = c
        .n
        .iter()
        .map(|&n| alm_linusson_covariance(n, mode))
        .collect::<crate::Result<Vec<_>>>()?;
    if reports.len() == 1 {
        emit_json(&c.out, stdout, &reports[0])?;
    } else {
        emit_json(&c.out, stdout, &reports)?;
    }
    Ok(EXIT_OK)
}

fn cmd_grid_stats(c: GridStatsCmd, stdout: &mut dyn Write) -> CmdResult {
    let seed = need_seed(c.sampling.seed, "grid-stats")?;
    let (ox, oy) = parse_point(&c.origin)?;
    if ox >= c.width || oy >= c.height {
        return Err(Failure::Lib(Error::Input(format!(
            "origin ({ox},{oy}) outside the {}x{} grid",
            c.width, c.height
        ))));
    }
    let config = McConfig::new(c.sampling.samples, seed, c.sampling.streams);
    let stats = c
        .bias
        .iter()
        .map(|&p| {
            let spec = GridSpec::new(c.width, c.height, p);
            grid_reach_stats(spec, spec.id(ox, oy), config)
        })
        .collect::<crate::Result<Vec<_>>>()?;
    match c.out.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut text = String::from(GridStats::CSV_HEADER);
            text.push('\n');
            for s in &stats {
                text.push_str(&s.csv_row());
                text.push('\n');
            }
            emit_text(&c.out, stdout, &text)?;
        }
        Format::Json => {
            let mut text = serde_json::to_string(&stats).expect("serializable");
            text.push('\n');
            emit_text(&c.out, stdout, &text)?;
        }
    }
    Ok(EXIT_OK)
}

#[derive(Debug, Serialize, Deserialize)]
struct WitnessOutput {
    found: bool,
    attempts: u64,
    seed: u64,
    witness: Option<Witness>,
    /// Endpoints of the flipped edge as `[[x, y], [x, y]]`, low first.
    edge_coords: Option<[(usize, usize); 2]>,
}

fn cmd_witness(c: WitnessCmd, stdout: &mut dyn Write) -> CmdResult {
    let seed = need_seed(c.seed, "witness")?;
    let spec = GridSpec::new(c.width, c.height, c.bias);
    let (ax, ay) = parse_point(&c.a)?;
    let (bx, by) = parse_point(&c.b)?;
    if ax >= c.width || ay >= c.height || bx >= c.width || by >= c.height {
        return Err(Failure::Lib(Error::Input("endpoint outside the grid".into())));
    }
    let search = find_nonmonotonicity_witness(spec, spec.id(ax, ay), spec.id(bx, by), c.flip, c.budget, seed)?;
    let grid = build_grid(spec)?;
    let edge_coords = search.witness.as_ref().map(|w| {
        let e = grid.graph.edge(w.edge);
        [grid.coords(e.low), grid.coords(e.high)]
    });
    let out = WitnessOutput {
        found: search.witness.is_some(),
        attempts: search.attempts,
        seed,
        witness: search.witness,
        edge_coords,
    };
    emit_json(&c.out, stdout, &out)?;
    Ok(if out.found { EXIT_OK } else { EXIT_RESOURCE })
}
