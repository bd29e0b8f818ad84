//! Program execution over a journaled host graph.
//!
//! `if` always rolls its condition back; `try` keeps the condition's effect
//! on success; a loop body that fails is rolled back and ends the loop.
//! `or` runs its left branch only. Runtime errors abort the run.

mod ast;
mod effects;
mod monitor;

pub use ast::{Command, Procedure, Program};
pub use monitor::{DashedPath, Monitor, RedEdgeBound, RootBound};

pub use crate::rules::RuleStats;

use std::fmt::{self, Write as _};
use std::time::{Duration, Instant};

use effects::EffectMap;

use crate::labels::RuntimeError;
use crate::rules::Match;
use crate::store::HostGraph;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Budget of rule calls plus loop iterations.
    pub step_limit: u64,
    pub wall_limit: Duration,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { step_limit: 1_000_000_000, wall_limit: Duration::from_secs(600) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    /// The program produced a graph (left in the caller's `HostGraph`).
    Graph,
    Fail,
    RuntimeError(RuntimeError),
    Timeout(TimeoutKind),
    /// A monitor rejected the graph after an application of `rule`.
    Violation { monitor: String, rule: String, message: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TimeoutKind {
    Steps,
    Wall,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Graph => f.write_str("graph"),
            Outcome::Fail => f.write_str("fail"),
            Outcome::RuntimeError(e) => write!(f, "runtime error: {e}"),
            Outcome::Timeout(TimeoutKind::Steps) => f.write_str("timeout: step limit reached"),
            Outcome::Timeout(TimeoutKind::Wall) => f.write_str("timeout: wall-clock limit reached"),
            Outcome::Violation { monitor, rule, message } => {
                write!(f, "monitor {monitor} violated after rule {rule}: {message}")
            }
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct RunStats {
    /// Indexed like `Program::rules`.
    pub rules: Vec<(String, RuleStats)>,
    pub applications: u64,
    pub steps: u64,
    pub rollbacks: u64,
    pub loop_failures: u64,
    pub if_runs: u64,
    pub try_failures: u64,
    pub wall: Duration,
}

impl RunStats {
    /// Stats summed over rules that share a name (local rules may shadow).
    pub fn rule(&self, name: &str) -> RuleStats {
        let mut s = RuleStats::default();
        for (n, r) in &self.rules {
            if n == name {
                s.calls += r.calls;
                s.successes += r.successes;
                s.failures += r.failures;
                s.attempts += r.attempts;
            }
        }
        s
    }

    /// Flat `key = value` report.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "applications = {}", self.applications).unwrap();
        writeln!(s, "steps = {}", self.steps).unwrap();
        writeln!(s, "rollbacks = {}", self.rollbacks).unwrap();
        writeln!(s, "wall_seconds = {:.6}", self.wall.as_secs_f64()).unwrap();
        for (n, r) in &self.rules {
            writeln!(s, "rule.{n}.calls = {}", r.calls).unwrap();
            writeln!(s, "rule.{n}.successes = {}", r.successes).unwrap();
            writeln!(s, "rule.{n}.failures = {}", r.failures).unwrap();
            writeln!(s, "rule.{n}.attempts = {}", r.attempts).unwrap();
        }
        s
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("rule,calls,successes,failures,attempts\n");
        for (n, r) in &self.rules {
            writeln!(s, "{n},{},{},{},{}", r.calls, r.successes, r.failures, r.attempts).unwrap();
        }
        s
    }
}

enum Flow {
    Success,
    Fail,
    Break,
}

enum Abort {
    Error(RuntimeError),
    Timeout(TimeoutKind),
    Violation { monitor: String, rule: String, message: String },
}

struct Interp<'a, 'm, 'n> {
    p: &'a Program,
    matches: Vec<Match>,
    stats: RunStats,
    limits: Limits,
    start: Instant,
    monitors: &'m mut [&'n mut dyn Monitor],
    effects: EffectMap,
}

pub fn run(p: &Program, g: &mut HostGraph, limits: Limits) -> (Outcome, RunStats) {
    run_monitored(p, g, limits, &mut [])
}

/// Like [`run`], calling every monitor after each rule application.
pub fn run_monitored(
    p: &Program,
    g: &mut HostGraph,
    limits: Limits,
    monitors: &mut [&mut dyn Monitor],
) -> (Outcome, RunStats) {
    run_with(p, g, limits, monitors, EffectMap::new(p))
}

fn run_with(
    p: &Program,
    g: &mut HostGraph,
    limits: Limits,
    monitors: &mut [&mut dyn Monitor],
    effects: EffectMap,
) -> (Outcome, RunStats) {
    let stats = RunStats {
        rules: p.rules.iter().map(|r| (r.name.clone(), RuleStats::default())).collect(),
        ..RunStats::default()
    };
    let mut it = Interp {
        p,
        matches: p.rules.iter().map(|r| r.new_match()).collect(),
        stats,
        limits,
        start: Instant::now(),
        monitors,
        effects,
    };
    let depth = g.frame_depth();
    let r = it.exec(&p.main, g);
    // An aborted run leaves frames open; keep the graph as it stands.
    while g.frame_depth() > depth {
        g.commit_frame();
    }
    it.stats.wall = it.start.elapsed();
    let outcome = match r {
        Ok(Flow::Success) | Ok(Flow::Break) => Outcome::Graph,
        Ok(Flow::Fail) => Outcome::Fail,
        Err(Abort::Error(e)) => Outcome::RuntimeError(e),
        Err(Abort::Timeout(k)) => Outcome::Timeout(k),
        Err(Abort::Violation { monitor, rule, message }) => Outcome::Violation { monitor, rule, message },
    };
    (outcome, it.stats)
}

impl Interp<'_, '_, '_> {
    fn step(&mut self) -> Result<(), Abort> {
        self.stats.steps += 1;
        if self.stats.steps > self.limits.step_limit {
            return Err(Abort::Timeout(TimeoutKind::Steps));
        }
        if self.stats.steps % 1024 == 0 && self.start.elapsed() > self.limits.wall_limit {
            return Err(Abort::Timeout(TimeoutKind::Wall));
        }
        Ok(())
    }

    fn exec(&mut self, c: &Command, g: &mut HostGraph) -> Result<Flow, Abort> {
        match c {
            Command::RuleSet(ids) => {
                for &r in ids {
                    self.step()?;
                    let rule = &self.p.rules[r];
                    let applied = rule
                        .apply_once(g, &mut self.matches[r], &mut self.stats.rules[r].1)
                        .map_err(Abort::Error)?;
                    if applied {
                        self.stats.applications += 1;
                        for m in self.monitors.iter_mut() {
                            if let Err(message) = m.check(g) {
                                return Err(Abort::Violation {
                                    monitor: m.name().to_string(),
                                    rule: rule.name.clone(),
                                    message,
                                });
                            }
                        }
                        return Ok(Flow::Success);
                    }
                }
                Ok(Flow::Fail)
            }
            Command::Call(q) => self.exec(&self.p.procs[*q].body, g),
            Command::Seq(cs) => {
                for c in cs {
                    match self.exec(c, g)? {
                        Flow::Success => {}
                        other => return Ok(other),
                    }
                }
                Ok(Flow::Success)
            }
            Command::If { cond, then, els } => {
                // A condition that cannot write needs no frame to undo.
                let framed = self.effects.get(cond).writes;
                if framed {
                    g.begin_frame();
                }
                let r = self.exec(cond, g)?;
                if framed {
                    g.rollback_frame();
                }
                self.stats.rollbacks += 1;
                self.stats.if_runs += 1;
                match r {
                    Flow::Success => self.exec(then, g),
                    Flow::Fail => els.as_ref().map_or(Ok(Flow::Success), |e| self.exec(e, g)),
                    Flow::Break => Ok(Flow::Break),
                }
            }
            Command::Try { cond, then, els } => {
                let framed = self.effects.get(cond).dirty_fail;
                if framed {
                    g.begin_frame();
                }
                match self.exec(cond, g)? {
                    Flow::Success => {
                        if framed {
                            g.commit_frame();
                        }
                        then.as_ref().map_or(Ok(Flow::Success), |t| self.exec(t, g))
                    }
                    Flow::Fail => {
                        if framed {
                            g.rollback_frame();
                        }
                        self.stats.rollbacks += 1;
                        self.stats.try_failures += 1;
                        els.as_ref().map_or(Ok(Flow::Success), |e| self.exec(e, g))
                    }
                    Flow::Break => {
                        if framed {
                            g.commit_frame();
                        }
                        Ok(Flow::Break)
                    }
                }
            }
            Command::Loop(body) => {
                // Bodies that can only fail before writing are run unframed.
                let framed = self.effects.get(body).dirty_fail;
                loop {
                    self.step()?;
                    if framed {
                        g.begin_frame();
                    }
                    let r = self.exec(body, g)?;
                    match r {
                        Flow::Success | Flow::Break if framed => g.commit_frame(),
                        Flow::Fail if framed => g.rollback_frame(),
                        _ => {}
                    }
                    match r {
                        Flow::Success => {}
                        Flow::Fail => {
                            self.stats.rollbacks += 1;
                            self.stats.loop_failures += 1;
                            return Ok(Flow::Success);
                        }
                        Flow::Break => return Ok(Flow::Success),
                    }
                }
            }
            Command::Or(a, _) => self.exec(a, g),
            Command::Break => Ok(Flow::Break),
            Command::Skip => Ok(Flow::Success),
            Command::Fail => Ok(Flow::Fail),
        }
    }
}

#[cfg(test)]
mod tests;
