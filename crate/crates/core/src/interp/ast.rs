//! Program representation.

use crate::rules::Rule;

#[derive(Clone, Debug)]
pub struct Program {
    pub rules: Vec<Rule>,
    pub procs: Vec<Procedure>,
    pub main: Command,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Procedure {
    pub name: String,
    pub body: Command,
    /// Declarations local to this procedure (indices into the program's
    /// rule and procedure tables).
    pub local_rules: Vec<usize>,
    pub local_procs: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Command {
    /// Try the rules in order and apply the first that matches.
    RuleSet(Vec<usize>),
    Call(usize),
    Seq(Vec<Command>),
    If { cond: Box<Command>, then: Box<Command>, els: Option<Box<Command>> },
    Try { cond: Box<Command>, then: Option<Box<Command>>, els: Option<Box<Command>> },
    Loop(Box<Command>),
    /// Left-biased choice: the right branch never runs.
    Or(Box<Command>, Box<Command>),
    Break,
    Skip,
    Fail,
}

impl Program {
    pub fn rule_index(&self, name: &str) -> Option<usize> {
        self.rules.iter().position(|r| r.name == name)
    }

    pub fn proc_index(&self, name: &str) -> Option<usize> {
        self.procs.iter().position(|p| p.name == name)
    }

    /// Rules declared outside every procedure.
    pub(crate) fn top_level_rules(&self) -> Vec<usize> {
        let local: std::collections::HashSet<usize> =
            self.procs.iter().flat_map(|p| p.local_rules.iter().copied()).collect();
        (0..self.rules.len()).filter(|i| !local.contains(i)).collect()
    }

    /// Procedures declared outside every procedure.
    pub(crate) fn top_level_procs(&self) -> Vec<usize> {
        let local: std::collections::HashSet<usize> =
            self.procs.iter().flat_map(|p| p.local_procs.iter().copied()).collect();
        (0..self.procs.len()).filter(|i| !local.contains(i)).collect()
    }
}
