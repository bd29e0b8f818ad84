//! Benchmark driver. Only the interpreter run is timed.

use std::time::{Duration, Instant};

use crate::interp::{run, Limits, Outcome, Program, RunStats};
use crate::store::HostGraph;

use super::gen::{generate_into, GenError, GraphClass};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Mode {
    #[default]
    Bucketed,
    Legacy,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Bucketed => "bucketed",
            Mode::Legacy => "legacy",
        }
    }

    pub fn empty_graph(self) -> HostGraph {
        match self {
            Mode::Bucketed => HostGraph::new(),
            Mode::Legacy => HostGraph::new_legacy(),
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "bucketed" => Ok(Mode::Bucketed),
            "legacy" => Ok(Mode::Legacy),
            _ => Err(format!("unknown mode `{s}` (expected bucketed or legacy)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    /// n + m
    pub size: u64,
    pub n: u64,
    pub m: u64,
    pub reps: usize,
    pub time_ms: f64,
    /// Rule calls of one run.
    pub calls: u64,
    pub outcome: String,
    pub timed_out: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchTable {
    pub program: String,
    pub class: String,
    pub mode: Mode,
    pub rows: Vec<BenchRow>,
}

#[derive(Clone, Copy, Debug)]
pub struct BenchConfig {
    pub reps: usize,
    pub warmup: bool,
    pub mode: Mode,
    pub limits: Limits,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig { reps: 5, warmup: true, mode: Mode::Bucketed, limits: Limits::default() }
    }
}

/// One row per size parameter. `class.size` is overwritten by each entry of
/// `sizes`. A timed-out size is recorded and later sizes are skipped.
///
/// Repetitions are interleaved across sizes (one round visits every size)
/// so that slow drift in machine speed affects all rows alike.
pub fn run_benchmark(
    name: &str,
    program: &Program,
    class: GraphClass,
    sizes: &[usize],
    cfg: &BenchConfig,
) -> Result<BenchTable, GenError> {
    let mut cells = Vec::new();
    for &size in sizes {
        let class = GraphClass { size, ..class };
        let mut input = cfg.mode.empty_graph();
        generate_into(&class, &mut input)?;
        let mut cell = Cell::new(input);
        // The probe doubles as the warmup run.
        let probe = cell.time(program, cfg);
        if !cfg.warmup {
            cell.times.push(probe);
        }
        let stop = cell.timed_out();
        cells.push(cell);
        if stop {
            break;
        }
    }
    let reps = cfg.reps.max(1);
    for _ in 0..reps {
        for cell in cells.iter_mut() {
            if cell.timed_out() {
                break;
            }
            if cell.times.len() < reps {
                let t = cell.time(program, cfg);
                cell.times.push(t);
            }
        }
    }
    let rows = cells.into_iter().map(Cell::into_row).collect();
    Ok(BenchTable { program: name.to_string(), class: class.label(), mode: cfg.mode, rows })
}

/// Times `program` on fresh copies of `input`.
pub fn measure(program: &Program, input: &HostGraph, cfg: &BenchConfig) -> BenchRow {
    let mut cell = Cell::new(input.clone());
    if cfg.warmup {
        cell.time(program, cfg);
    }
    for _ in 0..cfg.reps.max(1) {
        let t = cell.time(program, cfg);
        cell.times.push(t);
        if cell.timed_out() {
            break;
        }
    }
    cell.into_row()
}

struct Cell {
    input: HostGraph,
    times: Vec<Duration>,
    last: Option<(Outcome, RunStats)>,
}

impl Cell {
    fn new(input: HostGraph) -> Cell {
        Cell { input, times: Vec::new(), last: None }
    }

    fn time(&mut self, program: &Program, cfg: &BenchConfig) -> Duration {
        let mut g = self.input.clone();
        let t = Instant::now();
        let r = run(program, &mut g, cfg.limits);
        let elapsed = t.elapsed();
        drop(g);
        self.last = Some(r);
        elapsed
    }

    fn timed_out(&self) -> bool {
        matches!(self.last, Some((Outcome::Timeout(_), _)))
    }

    fn into_row(mut self) -> BenchRow {
        let (n, m) = (self.input.node_count() as u64, self.input.edge_count() as u64);
        let timed_out = self.timed_out();
        let (outcome, stats) = self.last.expect("at least one run");
        if self.times.is_empty() {
            // Timed out during the warmup probe.
            self.times.push(stats.wall);
        }
        BenchRow {
            size: n + m,
            n,
            m,
            reps: self.times.len(),
            time_ms: median(&mut self.times).as_secs_f64() * 1e3,
            calls: stats.rules.iter().map(|(_, s)| s.calls).sum(),
            timed_out,
            outcome: outcome.to_string(),
        }
    }
}

fn median(ts: &mut [Duration]) -> Duration {
    ts.sort();
    let k = ts.len();
    if k % 2 == 1 {
        ts[k / 2]
    } else {
        (ts[k / 2 - 1] + ts[k / 2]) / 2
    }
}
