//! Command-line front end: `run`, `check`, `gen` and `bench`.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use gp2rt::benchlab::{
    fit_scaling, generate_into, run_benchmark, write_results, BenchConfig, GraphClass, Mode, Weights, RNG_ALGORITHM,
};
use gp2rt::frontend::{parse_host_graph_into, parse_program, print_host_graph};
use gp2rt::interp::{run_monitored, Limits, Monitor, Outcome, Program};
use gp2rt::mark::Mark;
use gp2rt::specimens::{self, check_with, default_monitors, fixed_inputs, random_input, CheckError, Specimen};
use gp2rt::store::HostGraph;

pub const EXIT_GRAPH: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;
pub const EXIT_TIMEOUT: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

#[derive(Parser, Debug)]
#[command(name = "gp2rt", version, about = "Run rooted graph programs on host graphs")]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Run a program on one host graph and print the result.
    Run(RunArgs),
    /// Compare a shipped program against its reference oracle on seeded inputs.
    Check(CheckArgs),
    /// Write a generated host graph.
    Gen(GenArgs),
    /// Time a program over graph classes and sizes.
    Bench(BenchArgs),
}

#[derive(Args, Debug, Clone)]
pub struct Exec {
    /// Node store: `bucketed` (mark-indexed) or `legacy` (single node list).
    #[arg(long, default_value = "bucketed")]
    pub mode: Mode,
    /// Print rule-call statistics to stderr.
    #[arg(long)]
    pub stats: bool,
    /// Check the program's invariants after every rule application.
    #[arg(long)]
    pub monitors: bool,
    /// Abort after this many rule calls plus loop iterations.
    #[arg(long, default_value_t = 1_000_000_000)]
    pub step_limit: u64,
    /// Abort after this many seconds.
    #[arg(long, default_value_t = 600.0)]
    pub wall_limit: f64,
}

impl Exec {
    fn limits(&self) -> Result<Limits> {
        let wall = Duration::try_from_secs_f64(self.wall_limit).map_err(|_| anyhow!("--wall-limit must be >= 0"))?;
        Ok(Limits { step_limit: self.step_limit, wall_limit: wall })
    }
}

#[derive(Args, Debug)]
pub struct RunArgs {
    /// Program file (.gpr) or shipped program name.
    pub program: String,
    /// Host graph file; `-` or absent reads stdin.
    pub input: Option<PathBuf>,
    /// Generate the input instead, e.g. `star:8` or `rooted-list:100`.
    #[arg(long, conflicts_with = "input")]
    pub gen: Option<String>,
    /// Edge weights for `--gen`: none, alternating, uniform:LO:HI[:seedN].
    #[arg(long, default_value = "none")]
    pub weights: Weights,
    /// Seed for uniform weights (overrides the seed in `--weights`).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write the output graph here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub exec: Exec,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    /// Shipped program name.
    pub specimen: String,
    /// Number of seeded random inputs.
    #[arg(long, default_value_t = 100)]
    pub cases: u64,
    /// Largest random input, in nodes.
    #[arg(long, default_value_t = 20)]
    pub max_n: usize,
    /// Largest random input, in edges (default twice `--max-n`).
    #[arg(long)]
    pub max_m: Option<usize>,
    /// Seed of the first random input; case i uses seed + i.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Extra host graph files to check.
    #[arg(long = "input")]
    pub inputs: Vec<PathBuf>,
    /// Write a report of every mismatch here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub exec: Exec,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    /// list, cycle, grid, tree, star, complete or discrete, optionally
    /// prefixed with `rooted-`.
    pub class: String,
    /// Node count (edge count for stars, perfect square for grids).
    pub size: usize,
    /// Edge weights: none, alternating, uniform:LO:HI[:seedN].
    #[arg(long, default_value = "none")]
    pub weights: Weights,
    /// Seed for uniform weights (overrides the seed in `--weights`).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Leave nodes unmarked instead of grey.
    #[arg(long)]
    pub unmarked: bool,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Program file (.gpr) or shipped program name.
    pub program: String,
    /// Comma-separated graph classes.
    #[arg(long, value_delimiter = ',', default_value = "list,cycle,grid,tree,star,complete")]
    pub classes: Vec<String>,
    /// Comma-separated size parameters, ascending.
    #[arg(long, value_delimiter = ',', required = true)]
    pub sizes: Vec<usize>,
    /// Timed repetitions per size (the median is reported).
    #[arg(long, default_value_t = 5)]
    pub reps: usize,
    /// Edge weights: none, alternating, uniform:LO:HI[:seedN].
    #[arg(long, default_value = "none")]
    pub weights: Weights,
    /// Seed for uniform weights (overrides the seed in `--weights`).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Results directory.
    #[arg(long, default_value = "results")]
    pub out: PathBuf,
    #[command(flatten)]
    pub exec: Exec,
}

/// Usage problems, reported with exit status 64.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct Usage(pub String);

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

pub fn exit_code(o: &Outcome) -> i32 {
    match o {
        Outcome::Graph => EXIT_GRAPH,
        Outcome::Fail => EXIT_FAIL,
        Outcome::RuntimeError(_) | Outcome::Violation { .. } => EXIT_RUNTIME,
        Outcome::Timeout(_) => EXIT_TIMEOUT,
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit status.
pub fn main_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(stderr, "{text}");
            } else {
                let _ = write!(stdout, "{text}");
            }
            return code;
        }
    };
    match dispatch(cli, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e:#}");
            EXIT_USAGE
        }
    }
}

fn dispatch(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    match cli.cmd {
        Cmd::Run(a) => cmd_run(a, stdout, stderr),
        Cmd::Check(a) => cmd_check(a, stdout, stderr),
        Cmd::Gen(a) => cmd_gen(a, stdout),
        Cmd::Bench(a) => cmd_bench(a, stdout, stderr),
    }
}

fn with_seed(w: Weights, seed: Option<u64>) -> Weights {
    match (w, seed) {
        (Weights::Uniform { lo, hi, .. }, Some(seed)) => Weights::Uniform { lo, hi, seed },
        _ => w,
    }
}

/// A program named on the command line, with the shipped specimen it
/// corresponds to (by name or file stem), if any.
struct Loaded {
    name: String,
    program: Program,
    specimen: Option<&'static dyn Specimen>,
}

fn load_program(arg: &str) -> Result<Loaded> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {arg}"))?;
        let program = parse_program(&text).map_err(|e| usage(format!("{arg}:{e}")))?;
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or(arg).to_string();
        return Ok(Loaded { specimen: specimens::lookup(&stem), name: stem, program });
    }
    match specimens::lookup(arg) {
        Some(s) => Ok(Loaded { name: arg.to_string(), program: s.program()?, specimen: Some(s) }),
        None => {
            let names: Vec<&str> = specimens::registry().iter().map(|s| s.name()).collect();
            Err(usage(format!("`{arg}` is neither a file nor a shipped program ({})", names.join(", "))))
        }
    }
}

fn read_input(path: Option<&Path>) -> Result<String> {
    let mut text = String::new();
    match path {
        None => {
            std::io::stdin().read_to_string(&mut text).context("reading stdin")?;
        }
        Some(p) if p.as_os_str() == "-" => {
            std::io::stdin().read_to_string(&mut text).context("reading stdin")?;
        }
        Some(p) => text = std::fs::read_to_string(p).map_err(|e| usage(format!("{}: {e}", p.display())))?,
    }
    Ok(text)
}

fn parse_gen_spec(spec: &str) -> Result<GraphClass> {
    let (class, size) = spec.rsplit_once(':').ok_or_else(|| usage(format!("--gen expects CLASS:SIZE, got `{spec}`")))?;
    let size: usize = size.parse().map_err(|_| usage(format!("bad size in `{spec}`")))?;
    GraphClass::parse(class, size).map_err(|e| usage(e.to_string()))
}

fn write_out(out: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => stdout.write_all(text.as_bytes()).context("writing stdout"),
    }
}

/// Counts evaluations of a wrapped monitor.
struct Counting {
    inner: Box<dyn Monitor>,
    evaluations: u64,
}

impl Monitor for Counting {
    fn name(&self) -> &str {
        self.inner.name()
    }

    fn check(&mut self, g: &HostGraph) -> std::result::Result<(), String> {
        self.evaluations += 1;
        self.inner.check(g)
    }
}

fn monitors_for(on: bool, specimen: Option<&dyn Specimen>) -> Vec<Counting> {
    match (on, specimen) {
        (true, Some(s)) => {
            default_monitors(s.name()).into_iter().map(|inner| Counting { inner, evaluations: 0 }).collect()
        }
        _ => Vec::new(),
    }
}

fn cmd_run(a: RunArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    let loaded = load_program(&a.program)?;
    let limits = a.exec.limits()?;
    let mut g = a.exec.mode.empty_graph();
    if let Some(spec) = &a.gen {
        let class = parse_gen_spec(spec)?.weights(with_seed(a.weights, a.seed));
        generate_into(&class, &mut g).map_err(|e| usage(e.to_string()))?;
    } else {
        let text = read_input(a.input.as_deref())?;
        g = parse_host_graph_into(&text, g).map_err(|e| usage(format!("input:{e}")))?;
    }
    let mut mons = monitors_for(a.exec.monitors, loaded.specimen);
    if a.exec.monitors && mons.is_empty() {
        writeln!(stderr, "note: no monitors are defined for `{}`", loaded.name)?;
    }
    let mut refs: Vec<&mut dyn Monitor> = mons.iter_mut().map(|m| m as &mut dyn Monitor).collect();
    let (outcome, stats) = run_monitored(&loaded.program, &mut g, limits, &mut refs);
    match &outcome {
        Outcome::Graph => write_out(a.out.as_deref(), &(print_host_graph(&g) + "\n"), stdout)?,
        other => writeln!(stderr, "{}: {other}", loaded.name)?,
    }
    if a.exec.stats {
        write!(stderr, "{}", stats.to_text())?;
        for m in &mons {
            writeln!(stderr, "monitor.{}.evaluations = {}", m.name(), m.evaluations)?;
        }
    }
    Ok(exit_code(&outcome))
}

fn rebuild(g: &HostGraph, mode: Mode) -> HostGraph {
    if mode == Mode::Bucketed {
        return g.clone();
    }
    parse_host_graph_into(&print_host_graph(g), mode.empty_graph()).expect("printed graph reparses")
}

fn cmd_check(a: CheckArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    let spec = specimens::lookup(&a.specimen).ok_or_else(|| usage(format!("unknown program `{}`", a.specimen)))?;
    let program = spec.program()?;
    let limits = a.exec.limits()?;
    let max_m = a.max_m.unwrap_or(2 * a.max_n);
    let mode = a.exec.mode;

    let mut inputs: Vec<(String, HostGraph)> = Vec::new();
    for (i, g) in fixed_inputs(spec.name()).into_iter().enumerate() {
        inputs.push((format!("example {}", i + 1), rebuild(&g, mode)));
    }
    for i in 0..a.cases {
        let mut rng = ChaCha8Rng::seed_from_u64(a.seed.wrapping_add(i));
        inputs.push((format!("seed {}", a.seed.wrapping_add(i)), random_input(spec.name(), &mut rng, a.max_n, max_m, mode.empty_graph())));
    }
    for p in &a.inputs {
        let text = read_input(Some(p))?;
        let g = parse_host_graph_into(&text, mode.empty_graph()).map_err(|e| usage(format!("{}:{e}", p.display())))?;
        inputs.push((p.display().to_string(), g));
    }

    let mut mons = monitors_for(a.exec.monitors, Some(spec));
    let (mut pass, mut skipped) = (0usize, 0usize);
    let mut report = String::new();
    for (label, g) in &inputs {
        let mut refs: Vec<&mut dyn Monitor> = mons.iter_mut().map(|m| m as &mut dyn Monitor).collect();
        match check_with(spec, &program, g, limits, &mut refs) {
            Ok(r) if r.verdict.is_pass() => pass += 1,
            Ok(r) => {
                report += &format!("{label}: {}\n  input: {}\n", r.verdict, print_host_graph(g));
            }
            Err(CheckError::Precondition(why)) => {
                skipped += 1;
                writeln!(stderr, "{label}: skipped, {why}")?;
            }
            Err(e) => return Err(e.into()),
        }
    }
    let judged = inputs.len() - skipped;
    writeln!(stdout, "{}: {pass}/{judged} pass, {skipped} skipped", spec.name())?;
    for m in &mons {
        writeln!(stdout, "monitor {}: {} evaluations", m.name(), m.evaluations)?;
    }
    if !report.is_empty() {
        write!(stderr, "{report}")?;
        if let Some(p) = &a.out {
            std::fs::write(p, &report).with_context(|| format!("writing {}", p.display()))?;
        }
    }
    Ok(if pass == judged { 0 } else { EXIT_FAIL })
}

fn cmd_gen(a: GenArgs, stdout: &mut dyn Write) -> Result<i32> {
    let mut class = GraphClass::parse(&a.class, a.size).map_err(|e| usage(e.to_string()))?;
    class = class.weights(with_seed(a.weights, a.seed));
    if a.unmarked {
        class = class.node_mark(Mark::None);
    }
    let g = gp2rt::benchlab::generate(&class).map_err(|e| usage(e.to_string()))?;
    write_out(a.out.as_deref(), &(print_host_graph(&g) + "\n"), stdout)?;
    Ok(0)
}

/// Grey nodes unless the program's input specification wants them unmarked.
fn node_mark_for(spec: Option<&dyn Specimen>, class: &GraphClass) -> Mark {
    let Some(spec) = spec else { return Mark::Grey };
    let sample = |m: Mark| {
        let c = GraphClass { size: 4, node_mark: m, ..*class };
        gp2rt::benchlab::generate(&c).map(|g| spec.validate_input(&g).is_ok()).unwrap_or(false)
    };
    if !sample(Mark::Grey) && sample(Mark::None) {
        Mark::None
    } else {
        Mark::Grey
    }
}

fn cmd_bench(a: BenchArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    if a.sizes.windows(2).any(|w| w[0] > w[1]) {
        bail!(usage("--sizes must be ascending"));
    }
    let loaded = load_program(&a.program)?;
    let cfg = BenchConfig { reps: a.reps.max(1), warmup: true, mode: a.exec.mode, limits: a.exec.limits()? };
    let weights = with_seed(a.weights, a.seed);
    let mut tables = Vec::new();
    for c in &a.classes {
        let mut class = GraphClass::parse(c, 0).map_err(|e| usage(e.to_string()))?.weights(weights);
        class = class.node_mark(node_mark_for(loaded.specimen, &class));
        let t = run_benchmark(&loaded.name, &loaded.program, class, &a.sizes, &cfg).map_err(|e| usage(e.to_string()))?;
        for r in t.rows.iter().filter(|r| r.timed_out) {
            writeln!(stderr, "{} {}: size {} timed out", loaded.name, t.class, r.size)?;
        }
        tables.push(t);
    }
    let mut manifest = format!(
        "program = {}\nclasses = {}\nsizes = {}\nweights = {weights}\nrng = {RNG_ALGORITHM}\nmode = {}\nreps = {}\nstep_limit = {}\nwall_limit_s = {}\n",
        loaded.name,
        a.classes.join(","),
        a.sizes.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(","),
        cfg.mode.name(),
        cfg.reps,
        cfg.limits.step_limit,
        cfg.limits.wall_limit.as_secs_f64(),
    );
    writeln!(stdout, "{:<18} {:>5} {:>8} {:>10}", "class", "rows", "slope", "max-x2")?;
    for t in &tables {
        let (slope, ratio) = match fit_scaling(&t.points()) {
            Ok(f) => (format!("{:.3}", f.slope), format!("{:.3}", f.max_doubling_ratio)),
            Err(_) => ("n/a".to_string(), "n/a".to_string()),
        };
        writeln!(stdout, "{:<18} {:>5} {:>8} {:>10}", t.class, t.rows.len(), slope, ratio)?;
        manifest += &format!("fit.{}.slope = {slope}\nfit.{}.max_doubling_ratio = {ratio}\n", t.class, t.class);
    }
    write_results(&a.out, &loaded.name, &tables, &manifest).with_context(|| format!("writing {}", a.out.display()))?;
    writeln!(stdout, "results written to {}", a.out.display())?;
    Ok(0)
}
