//! Static effect summary of commands, used to skip undo frames that could
//! never be rolled back over a change.

use std::collections::HashMap;

use super::ast::{Command, Program};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub(crate) struct Effects {
    /// May return `Fail`.
    pub fails: bool,
    /// May change the graph.
    pub writes: bool,
    /// May return `Fail` after changing the graph.
    pub dirty_fail: bool,
}

/// Effects of every command node reachable from `p.main` and the procedure
/// bodies, keyed by address. Valid while `p` is borrowed.
pub(crate) struct EffectMap {
    map: HashMap<*const Command, Effects>,
}

impl EffectMap {
    pub fn new(p: &Program) -> EffectMap {
        let mut procs = vec![None; p.procs.len()];
        let mut map = HashMap::new();
        for q in 0..p.procs.len() {
            proc_effects(p, q, &mut procs, &mut map);
        }
        walk(p, &p.main, &mut procs, &mut map);
        EffectMap { map }
    }

    /// Treats every command as failing after a write, so every frame is
    /// opened.
    #[cfg(test)]
    pub fn conservative() -> EffectMap {
        EffectMap { map: HashMap::new() }
    }

    pub fn get(&self, c: &Command) -> Effects {
        // Unknown commands get the conservative summary.
        self.map.get(&(c as *const Command)).copied().unwrap_or(Effects { fails: true, writes: true, dirty_fail: true })
    }
}

fn proc_effects(
    p: &Program,
    q: usize,
    procs: &mut Vec<Option<Effects>>,
    map: &mut HashMap<*const Command, Effects>,
) -> Effects {
    if let Some(e) = procs[q] {
        return e;
    }
    // Procedures are not recursive, so this terminates.
    let e = walk(p, &p.procs[q].body, procs, map);
    procs[q] = Some(e);
    e
}

fn walk(p: &Program, c: &Command, procs: &mut Vec<Option<Effects>>, map: &mut HashMap<*const Command, Effects>) -> Effects {
    let mut sub = |c: &Command| walk(p, c, procs, map);
    let e = match c {
        Command::RuleSet(ids) => Effects {
            fails: true,
            writes: ids.iter().any(|&r| !p.rules[r].is_identity()),
            // A rule either applies or leaves the graph alone.
            dirty_fail: false,
        },
        Command::Call(q) => {
            let q = *q;
            drop(sub);
            proc_effects(p, q, procs, map)
        }
        Command::Seq(cs) => {
            let mut acc = Effects::default();
            for c in cs {
                let e = sub(c);
                acc.dirty_fail |= e.dirty_fail || (e.fails && acc.writes);
                acc.fails |= e.fails;
                acc.writes |= e.writes;
            }
            acc
        }
        Command::If { cond, then, els } => {
            sub(cond);
            let t = sub(then);
            let e = els.as_deref().map(&mut sub).unwrap_or_default();
            Effects { fails: t.fails || e.fails, writes: t.writes || e.writes, dirty_fail: t.dirty_fail || e.dirty_fail }
        }
        Command::Try { cond, then, els } => {
            let c = sub(cond);
            let t = then.as_deref().map(&mut sub).unwrap_or_default();
            let e = els.as_deref().map(&mut sub).unwrap_or_default();
            Effects {
                fails: t.fails || (c.fails && e.fails),
                writes: c.writes || t.writes || e.writes,
                dirty_fail: t.dirty_fail || (c.writes && t.fails) || e.dirty_fail,
            }
        }
        Command::Loop(body) => Effects { fails: false, writes: sub(body).writes, dirty_fail: false },
        Command::Or(a, b) => {
            sub(b);
            sub(a)
        }
        Command::Break | Command::Skip => Effects::default(),
        Command::Fail => Effects { fails: true, ..Effects::default() },
    };
    map.insert(c as *const Command, e);
    e
}
