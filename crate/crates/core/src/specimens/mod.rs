//! Shipped programs, their input specifications, and oracle-based checks of
//! their results.

pub mod corpus;
pub mod oracle;

pub use corpus::{default_monitors, fixed_inputs, random_input};

use std::fmt;

use crate::frontend::{parse_program, ParseError};
use crate::interp::{run_monitored, Limits, Monitor, Outcome, Program, RunStats};
use crate::labels::{Atom, HostValue};
use crate::mark::Mark;
use crate::store::HostGraph;
use oracle::Plain;

/// A shipped program together with what it expects and what it promises.
pub trait Specimen: Sync {
    fn name(&self) -> &'static str;
    fn source(&self) -> &'static str;
    /// Input-specification check; `Err` names the violated condition.
    fn validate_input(&self, g: &HostGraph) -> Result<(), String>;
    /// Compare a finished run against the oracle.
    fn judge(&self, input: &HostGraph, outcome: &Outcome, output: &HostGraph) -> Verdict;

    fn program(&self) -> Result<Program, ParseError> {
        parse_program(self.source())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Mismatch(String),
}

impl Verdict {
    pub fn is_pass(&self) -> bool {
        *self == Verdict::Pass
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CheckError {
    #[error("unknown specimen `{0}`")]
    UnknownSpecimen(String),
    #[error("input violates the specimen's input specification: {0}")]
    Precondition(String),
    #[error("specimen source does not parse: {0}")]
    Parse(#[from] ParseError),
}

#[derive(Debug)]
pub struct CheckReport {
    pub verdict: Verdict,
    pub outcome: Outcome,
    pub stats: RunStats,
    pub output: HostGraph,
}

static IS_DISCRETE: IsDiscrete = IsDiscrete;
static IS_CONNECTED: IsConnected = IsConnected { old: false };
static IS_CONNECTED_OLD: IsConnected = IsConnected { old: true };
static IS_DAG: IsDag = IsDag;
static BELLMAN_FORD: BellmanFord = BellmanFord;
static TRANSITIVE_CLOSURE: TransitiveClosure = TransitiveClosure;

static REGISTRY: [&dyn Specimen; 6] =
    [&IS_DISCRETE, &IS_CONNECTED_OLD, &IS_CONNECTED, &IS_DAG, &BELLMAN_FORD, &TRANSITIVE_CLOSURE];

pub fn registry() -> &'static [&'static dyn Specimen] {
    &REGISTRY
}

pub fn lookup(name: &str) -> Option<&'static dyn Specimen> {
    REGISTRY.iter().copied().find(|s| s.name() == name)
}

/// Validate `g`, run the named specimen on a copy, and judge the result.
pub fn check_program_against_oracle(
    name: &str,
    g: &HostGraph,
    limits: Limits,
    monitors: &mut [&mut dyn Monitor],
) -> Result<CheckReport, CheckError> {
    let spec = lookup(name).ok_or_else(|| CheckError::UnknownSpecimen(name.to_string()))?;
    spec.validate_input(g).map_err(CheckError::Precondition)?;
    let program = spec.program()?;
    check_with(spec, &program, g, limits, monitors)
}

/// As [`check_program_against_oracle`] with an already-parsed program.
pub fn check_with(
    spec: &dyn Specimen,
    program: &Program,
    g: &HostGraph,
    limits: Limits,
    monitors: &mut [&mut dyn Monitor],
) -> Result<CheckReport, CheckError> {
    spec.validate_input(g).map_err(CheckError::Precondition)?;
    let mut output = g.clone();
    let (outcome, stats) = run_monitored(program, &mut output, limits, monitors);
    let verdict = match &outcome {
        Outcome::Violation { .. } | Outcome::RuntimeError(_) | Outcome::Timeout(_) => {
            Verdict::Mismatch(format!("run ended with {outcome}"))
        }
        _ => spec.judge(g, &outcome, &output),
    };
    Ok(CheckReport { verdict, outcome, stats, output })
}

// ---- input specifications ----

fn nodes_all(g: &HostGraph, mark: Mark, what: &str) -> Result<(), String> {
    match g.nodes().find(|&v| g.node_mark(v) != mark) {
        Some(v) => Err(format!("node {v} is {} but every node must be {what}", g.node_mark(v))),
        None => Ok(()),
    }
}

fn edges_unmarked(g: &HostGraph) -> Result<(), String> {
    match g.edges().find(|&e| g.edge_mark(e) != Mark::None) {
        Some(e) => Err(format!("edge {e} is {} but every edge must be unmarked", g.edge_mark(e))),
        None => Ok(()),
    }
}

fn no_roots(g: &HostGraph) -> Result<(), String> {
    if g.root_count() > 0 {
        return Err("nodes must be unrooted".into());
    }
    Ok(())
}

/// Grey unrooted nodes and unmarked edges.
pub fn validate_grey_input(g: &HostGraph) -> Result<(), String> {
    nodes_all(g, Mark::Grey, "grey")?;
    no_roots(g)?;
    edges_unmarked(g)
}

/// Grey nodes, exactly one root, unmarked integer-labelled edges, no loops.
pub fn validate_bellman_ford_input(g: &HostGraph) -> Result<(), String> {
    nodes_all(g, Mark::Grey, "grey")?;
    if g.root_count() != 1 {
        return Err(format!("exactly one root required, found {}", g.root_count()));
    }
    edges_unmarked(g)?;
    for e in g.edges() {
        if g.edge_label(e).as_int().is_none() {
            return Err(format!("edge {e} is labelled {} instead of an integer", g.edge_label(e)));
        }
        if g.source(e) == g.target(e) {
            return Err(format!("edge {e} is a loop"));
        }
    }
    Ok(())
}

/// Same nodes, edges, endpoints and labels; marks and roots may differ.
/// Items are compared slot by slot, which is an isomorphism when it holds.
fn same_up_to_marks(a: &HostGraph, b: &HostGraph) -> Result<(), String> {
    if a.node_count() != b.node_count() || a.edge_count() != b.edge_count() {
        return Err(format!(
            "size changed from {}+{} to {}+{}",
            a.node_count(),
            a.edge_count(),
            b.node_count(),
            b.edge_count()
        ));
    }
    for (x, y) in a.nodes().zip(b.nodes()) {
        if x.index() != y.index() || a.node_label(x) != b.node_label(y) {
            return Err(format!("node {x} changed"));
        }
    }
    for (x, y) in a.edges().zip(b.edges()) {
        if x.index() != y.index()
            || a.source(x).index() != b.source(y).index()
            || a.target(x).index() != b.target(y).index()
            || a.edge_label(x) != b.edge_label(y)
        {
            return Err(format!("edge {x} changed"));
        }
    }
    Ok(())
}

fn expect_graph_iff(ok: bool, outcome: &Outcome, input: &HostGraph, output: &HostGraph, prop: &str) -> Verdict {
    match (ok, outcome) {
        (true, Outcome::Graph) => match same_up_to_marks(input, output) {
            Ok(()) => Verdict::Pass,
            Err(m) => Verdict::Mismatch(format!("output is not the input up to marks: {m}")),
        },
        (false, Outcome::Fail) => Verdict::Pass,
        (true, o) => Verdict::Mismatch(format!("oracle says {prop}, program gave {o}")),
        (false, o) => Verdict::Mismatch(format!("oracle says not {prop}, program gave {o}")),
    }
}

// ---- specimens ----

struct IsDiscrete;

impl Specimen for IsDiscrete {
    fn name(&self) -> &'static str {
        "is-discrete"
    }
    fn source(&self) -> &'static str {
        include_str!("../../programs/is-discrete.gpr")
    }
    fn validate_input(&self, g: &HostGraph) -> Result<(), String> {
        nodes_all(g, Mark::None, "unmarked")?;
        no_roots(g)?;
        edges_unmarked(g)
    }
    fn judge(&self, input: &HostGraph, outcome: &Outcome, output: &HostGraph) -> Verdict {
        expect_graph_iff(input.edge_count() == 0, outcome, input, output, "discrete")
    }
}

struct IsConnected {
    old: bool,
}

impl Specimen for IsConnected {
    fn name(&self) -> &'static str {
        if self.old {
            "is-connected-old"
        } else {
            "is-connected"
        }
    }
    fn source(&self) -> &'static str {
        if self.old {
            include_str!("../../programs/is-connected-old.gpr")
        } else {
            include_str!("../../programs/is-connected.gpr")
        }
    }
    fn validate_input(&self, g: &HostGraph) -> Result<(), String> {
        validate_grey_input(g)
    }
    fn judge(&self, input: &HostGraph, outcome: &Outcome, output: &HostGraph) -> Verdict {
        expect_graph_iff(oracle::connected(input), outcome, input, output, "connected")
    }
}

struct IsDag;

impl Specimen for IsDag {
    fn name(&self) -> &'static str {
        "is-dag"
    }
    fn source(&self) -> &'static str {
        include_str!("../../programs/is-dag.gpr")
    }
    fn validate_input(&self, g: &HostGraph) -> Result<(), String> {
        validate_grey_input(g)
    }
    fn judge(&self, input: &HostGraph, outcome: &Outcome, output: &HostGraph) -> Verdict {
        expect_graph_iff(oracle::acyclic(input), outcome, input, output, "acyclic")
    }
}

struct BellmanFord;

impl Specimen for BellmanFord {
    fn name(&self) -> &'static str {
        "bellman-ford"
    }
    fn source(&self) -> &'static str {
        include_str!("../../programs/bellman-ford.gpr")
    }
    fn validate_input(&self, g: &HostGraph) -> Result<(), String> {
        validate_bellman_ford_input(g)
    }
    fn judge(&self, input: &HostGraph, outcome: &Outcome, output: &HostGraph) -> Verdict {
        let plain = Plain::of(input);
        let weights: Vec<i64> = input.edges().map(|e| input.edge_label(e).as_int().unwrap()).collect();
        let root = input.root_nodes().next().unwrap();
        let source = input.nodes().position(|v| v == root).unwrap();
        let sp = oracle::bellman_ford(&plain, &weights, source);
        match (sp.negative_cycle_reachable, outcome) {
            (true, Outcome::Fail) => return Verdict::Pass,
            (true, o) => return Verdict::Mismatch(format!("oracle found a reachable negative cycle, program gave {o}")),
            (false, Outcome::Graph) => {}
            (false, o) => return Verdict::Mismatch(format!("no reachable negative cycle, program gave {o}")),
        }
        if output.node_count() != input.node_count() || output.edge_count() != input.edge_count() {
            return Verdict::Mismatch("output size differs from input".into());
        }
        for (i, (v, w)) in input.nodes().zip(output.nodes()).enumerate() {
            let mut want = input.node_label(v).clone();
            want.push(match sp.dist[i] {
                Some(d) => Atom::Int(d),
                None => Atom::str("f"),
            });
            if output.node_label(w) != &want {
                return Verdict::Mismatch(format!("node {v}: expected label {want}, got {}", output.node_label(w)));
            }
            if output.indeg(w) + output.outdeg(w) == 0 && output.node_mark(w) != Mark::Grey {
                return Verdict::Mismatch(format!("isolated node {w} is {}", output.node_mark(w)));
            }
        }
        for (e, f) in input.edges().zip(output.edges()) {
            if output.edge_mark(f) != Mark::Blue {
                return Verdict::Mismatch(format!("edge {f} is {}", output.edge_mark(f)));
            }
            if output.edge_label(f) != input.edge_label(e)
                || output.source(f).index() != input.source(e).index()
                || output.target(f).index() != input.target(e).index()
            {
                return Verdict::Mismatch(format!("edge {e} changed"));
            }
        }
        Verdict::Pass
    }
}

struct TransitiveClosure;

impl Specimen for TransitiveClosure {
    fn name(&self) -> &'static str {
        "transitive-closure"
    }
    fn source(&self) -> &'static str {
        include_str!("../../programs/transitive-closure.gpr")
    }
    fn validate_input(&self, g: &HostGraph) -> Result<(), String> {
        validate_grey_input(g)
    }
    fn judge(&self, input: &HostGraph, outcome: &Outcome, output: &HostGraph) -> Verdict {
        if *outcome != Outcome::Graph {
            return Verdict::Mismatch(format!("program gave {outcome}"));
        }
        let before = Plain::of(input);
        let after = Plain::of(output);
        if before.n != after.n {
            return Verdict::Mismatch("node count changed".into());
        }
        let reach = oracle::reachability(&before);
        let mut adj = vec![vec![0usize; before.n]; before.n];
        for &(s, t) in &before.edges {
            adj[s][t] += 1;
        }
        let mut expected = before.edges.len();
        for (u, row) in reach.iter().enumerate() {
            for (v, &r) in row.iter().enumerate() {
                if r && u != v && adj[u][v] == 0 {
                    expected += 1;
                    adj[u][v] = 1;
                }
            }
        }
        let mut got = vec![vec![0usize; after.n]; after.n];
        for &(s, t) in &after.edges {
            got[s][t] += 1;
        }
        if after.edges.len() != expected || got != adj {
            return Verdict::Mismatch(format!(
                "expected {expected} edges forming the closure, got {}",
                after.edges.len()
            ));
        }
        let blank = HostValue::empty();
        for (e, f) in input.edges().zip(output.edges()) {
            if output.edge_label(f) != input.edge_label(e) {
                return Verdict::Mismatch(format!("edge {e} relabelled"));
            }
        }
        if output.edges().skip(input.edge_count()).any(|f| output.edge_label(f) != &blank) {
            return Verdict::Mismatch("new edges must be unlabelled".into());
        }
        Verdict::Pass
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Pass => f.write_str("pass"),
            Verdict::Mismatch(m) => write!(f, "mismatch: {m}"),
        }
    }
}

#[cfg(test)]
mod tests;
