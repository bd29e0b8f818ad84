use std::time::Duration;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::frontend::{parse_host_graph, parse_program, print_host_graph};
use crate::mark::Mark;
use crate::specimens::lookup;

fn g(text: &str) -> HostGraph {
    parse_host_graph(text).unwrap()
}

fn prog(text: &str) -> Program {
    parse_program(text).unwrap_or_else(|e| panic!("{e}\n{text}"))
}

/// A specimen's declarations with a different main command.
fn with_main(specimen: &str, main: &str) -> Program {
    let src = lookup(specimen).unwrap().source();
    let mut out = String::new();
    let mut skipping = false;
    for line in src.lines() {
        if line.starts_with("Main") {
            skipping = true;
            continue;
        }
        // continuation lines of Main are indented
        if skipping && line.starts_with(' ') {
            continue;
        }
        skipping = false;
        out.push_str(line);
        out.push('\n');
    }
    prog(&format!("{out}\nMain = {main}"))
}

fn exec(p: &Program, h: &mut HostGraph) -> (Outcome, RunStats) {
    run(p, h, Limits::default())
}

const RULES: &str = "
grow(x:list) [ (1, x) | ] => [ (1, x) (2, x:1 # red) | (e, 1, 2, 0) ]
del(x:list) [ (1, x # red) | ] => [ | ]
paint(x, y, z:list) [ (1, x) (2, y) | (e, 1, 2, z) ] => [ (1, x # blue) (2, y) | (e, 1, 2, z:7 # dashed) ]
root(x:list) [ (1, x # blue) | ] => [ (1(R), x # grey) | ]
unroot(x:list) [ (1(R), x # grey) | ] => [ (1, x) | ]
";

fn rules_with(main: &str) -> Program {
    prog(&format!("{RULES}\nMain = {main}"))
}

#[test]
fn specimen_examples() {
    let conn = lookup("is-connected").unwrap().program().unwrap();
    let mut h = HostGraph::new();
    assert_eq!(exec(&conn, &mut h).0, Outcome::Graph);
    assert!(h.is_empty());
    assert_eq!(exec(&conn, &mut g("[ (1, 0 # grey) (2, 0 # grey) | ]")).0, Outcome::Fail);
    let dag = lookup("is-dag").unwrap().program().unwrap();
    let cyclic = "[ (1, 0 # grey) (2, 0 # grey) (3, 0 # grey) (4, 0 # grey) | \
                  (a, 4, 1, 0) (b, 1, 2, 0) (c, 2, 3, 0) (d, 3, 1, 0) ]";
    assert_eq!(exec(&dag, &mut g(cyclic)).0, Outcome::Fail);
}

#[test]
fn rule_set_order() {
    let p = with_main("bellman-ford", "{unvisited, reduce}");
    let mut h = g("[ (1(R), 0:3 # blue) (2, \"f\" # grey) | (e, 1, 2, 4 # red) ]");
    let (o, s) = exec(&p, &mut h);
    assert_eq!(o, Outcome::Graph);
    assert_eq!(s.rule("unvisited").successes, 1);
    assert_eq!(s.rule("reduce").calls, 0);
    assert_eq!(print_host_graph(&h), "[ (1(R), 0:3 # blue) (2, 7 # grey) | (e1, 1, 2, 4 # red) ]");
    let mut h = g("[ (1(R), 0:3 # blue) (2, 5 # grey) | (e, 1, 2, 4 # red) ]");
    let (o, s) = exec(&p, &mut h);
    assert_eq!(o, Outcome::Fail);
    assert_eq!((s.rule("unvisited").failures, s.rule("reduce").failures), (1, 1));
    let (o, _) = exec(&rules_with("{}"), &mut g("[ (1, 0) | ]"));
    assert_eq!(o, Outcome::Fail);
}

#[test]
fn if_always_rolls_back() {
    let check = with_main("is-connected", "if match then fail");
    assert_eq!(exec(&check, &mut g("[ (1, 0 # grey) | ]")).0, Outcome::Fail);
    let p = with_main("bellman-ford", "if flag then fail");
    assert_eq!(exec(&p, &mut g("[ (1, 3 # green) | ]")).0, Outcome::Graph);
    let p = rules_with("if skip then grow else del");
    let mut h = g("[ (1, 0) | ]");
    let (_, s) = exec(&p, &mut h);
    assert_eq!(h.node_count(), 2);
    assert_eq!((s.if_runs, s.rollbacks), (1, 1));
    let p = rules_with("if grow then skip");
    let mut h = g("[ (1, 0) | ]");
    exec(&p, &mut h);
    assert_eq!(print_host_graph(&h), "[ (1, 0) | ]");
}

#[test]
fn try_keeps_successful_condition() {
    let p = with_main("is-connected", "try init then next_edge");
    let mut h = g("[ (1, 0 # grey) (2, 0 # grey) | (e, 2, 1, 0) ]");
    assert_eq!(exec(&p, &mut h).0, Outcome::Graph);
    assert_eq!(print_host_graph(&h), "[ (1(R), 0 # blue) (2, 0 # grey) | (e1, 2, 1, 0 # red) ]");
    let p = with_main("is-connected", "(try back else break)!");
    let text = "[ (1(R), 0 # blue) (2, 0 # grey) | (e, 2, 1, 0) ]";
    let mut h = g(text);
    let (o, s) = exec(&p, &mut h);
    assert_eq!((o, s.try_failures), (Outcome::Graph, 1));
    assert_eq!(print_host_graph(&h), print_host_graph(&g(text)));
    let p = with_main("is-discrete", "(try isolated else break)!");
    let text = "[ (1(R), 0 # red) (2, 0) | (e, 1, 2, 0) ]";
    let mut h = g(text);
    let before = h.journal_len();
    assert_eq!(exec(&p, &mut h).0, Outcome::Graph);
    assert_eq!(print_host_graph(&h), print_host_graph(&g(text)));
    assert_eq!(h.journal_len(), before);
}

#[test]
fn loops() {
    let p = with_main("bellman-ford", "set_counter; count!");
    let mut h = g("[ (1(R), 0 # grey) (2, 0 # grey) (3, 0 # grey) (4, 0 # grey) (5, 0 # grey) | ]");
    assert_eq!(exec(&p, &mut h).0, Outcome::Graph);
    let c = h.nodes_with_mark(Mark::Green).next().unwrap();
    assert_eq!(h.node_label(c).as_int(), Some(4));
    let tc = lookup("transitive-closure").unwrap().program().unwrap();
    let mut h = g("[ (1, 0 # grey) (2, 0 # grey) (3, 0 # grey) | (a, 1, 2, 0) (b, 2, 3, 0) ]");
    let (_, s) = exec(&tc, &mut h);
    assert_eq!((h.edge_count(), s.rule("link").successes, s.loop_failures), (3, 1, 1));
    let mut h = g("[ (1, 0) | ]");
    let (o, s) = exec(&rules_with("fail!"), &mut h);
    assert_eq!((o, s.steps, s.loop_failures), (Outcome::Graph, 1, 1));
    assert_eq!(print_host_graph(&h), "[ (1, 0) | ]");
}

#[test]
fn break_leaves_innermost_loop_only() {
    // The inner loop breaks after one grow; the outer loop runs until del fails.
    let p = rules_with("((grow; break)!; del)!");
    let mut h = g("[ (1, 0) | ]");
    let (o, s) = exec(&p, &mut h);
    assert_eq!(o, Outcome::Graph);
    assert!(s.rule("grow").successes >= 1);
    let p = rules_with("(Q; grow)!\nQ = try del else break");
    let mut h = g("[ (1, 0) (2, 0 # red) (3, 0 # red) | ]");
    let (o, s) = exec(&p, &mut h);
    assert_eq!(o, Outcome::Graph);
    assert_eq!((s.rule("del").successes, s.rule("grow").successes), (2, 2));
}

#[test]
fn or_is_left_biased() {
    let mut h = g("[ (1, 0) | ]");
    assert_eq!(exec(&rules_with("skip or fail"), &mut h).0, Outcome::Graph);
    assert_eq!(exec(&rules_with("fail or skip"), &mut h).0, Outcome::Fail);
    let (o, s) = exec(&rules_with("(del!) or grow"), &mut h);
    assert_eq!((o, s.rule("grow").calls), (Outcome::Graph, 0));
}

#[test]
fn limits_and_errors() {
    let mut h = g("[ (1, 0) | ]");
    let lim = Limits { step_limit: 50, ..Limits::default() };
    let (o, s) = run(&rules_with("skip!"), &mut h, lim);
    assert_eq!((o, s.steps), (Outcome::Timeout(TimeoutKind::Steps), 51));
    let lim = Limits { wall_limit: Duration::ZERO, ..Limits::default() };
    assert_eq!(run(&rules_with("skip!"), &mut h, lim).0, Outcome::Timeout(TimeoutKind::Wall));
    let p = prog("bad(i:int) [ (1, i) | ] => [ (1, i / 0) | ]\nMain = if bad then skip");
    let mut h = g("[ (1, 3) | ]");
    let (o, s) = exec(&p, &mut h);
    assert!(matches!(o, Outcome::RuntimeError(_)), "{o}");
    assert_eq!(s.rule("bad").failures, 1);
    assert_eq!(print_host_graph(&h), "[ (1, 3) | ]");
    assert_eq!(h.frame_depth(), 0);
}

#[test]
fn monitor_violation_stops_run() {
    let p = rules_with("grow; root!");
    let mut h = g("[ (1, 0) (2, 0 # blue) | ]");
    let mut rb = RootBound(0);
    let (o, s) = run_monitored(&p, &mut h, Limits::default(), &mut [&mut rb]);
    assert!(matches!(&o, Outcome::Violation { monitor, rule, .. } if monitor == "root-count" && rule == "root"));
    assert_eq!(s.rule("root").successes, 1);
}

#[test]
fn stats_reports() {
    let p = rules_with("grow; del; del; del");
    let (o, s) = exec(&p, &mut g("[ (1, 0) (2, 0 # red) (3, 0 # red) | ]"));
    assert_eq!(o, Outcome::Fail);
    assert!(s.to_text().contains("rule.del.calls = 3\n"));
    assert!(s.to_text().contains("rule.del.failures = 1\n"));
    let csv = s.to_csv();
    assert_eq!(csv.lines().next().unwrap(), "rule,calls,successes,failures,attempts");
    assert!(csv.lines().any(|l| l.starts_with("del,3,2,1,")));
    assert_eq!(s.applications, 3);
}

fn random_command(rng: &mut ChaCha8Rng, depth: u32, in_loop: bool, nrules: usize) -> Command {
    if depth == 0 || rng.gen_bool(0.3) {
        return match rng.gen_range(0..8) {
            0 => Command::Skip,
            1 => Command::Fail,
            2 if in_loop => Command::Break,
            3 => Command::RuleSet((0..nrules).filter(|_| rng.gen_bool(0.5)).collect()),
            _ => Command::RuleSet(vec![rng.gen_range(0..nrules)]),
        };
    }
    let sub = |rng: &mut ChaCha8Rng, l| Box::new(random_command(rng, depth - 1, l, nrules));
    match rng.gen_range(0..5) {
        0 => Command::Seq((0..rng.gen_range(2..4)).map(|_| random_command(rng, depth - 1, in_loop, nrules)).collect()),
        1 => Command::Loop(sub(rng, true)),
        2 => Command::Or(sub(rng, in_loop), sub(rng, in_loop)),
        3 => Command::If { cond: sub(rng, in_loop), then: sub(rng, in_loop), els: rng.gen_bool(0.5).then(|| sub(rng, in_loop)) },
        _ => Command::Try {
            cond: sub(rng, in_loop),
            then: rng.gen_bool(0.5).then(|| sub(rng, in_loop)),
            els: rng.gen_bool(0.5).then(|| sub(rng, in_loop)),
        },
    }
}

fn random_host(rng: &mut ChaCha8Rng) -> HostGraph {
    let n = rng.gen_range(0..6);
    let mut s = String::from("[");
    for i in 0..n {
        let m = ["", " # red", " # blue", " # grey"][rng.gen_range(0..4)];
        let r = if m == " # grey" && rng.gen_bool(0.5) { "(R)" } else { "" };
        s += &format!(" ({i}{r}, {}{m})", rng.gen_range(0..3));
    }
    s += " |";
    if n > 0 {
        for j in 0..rng.gen_range(0..8) {
            s += &format!(" (e{j}, {}, {}, {})", rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..3));
        }
    }
    g(&(s + " ]"))
}

const SMALL: Limits = Limits { step_limit: 400, wall_limit: Duration::from_secs(10) };

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn rollback_restores_canonical_print(seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut p = rules_with("skip");
        p.main = random_command(&mut rng, 4, false, p.rules.len());
        let mut h = random_host(&mut rng);
        let before = print_host_graph(&h);
        h.begin_frame();
        let (_, s) = run(&p, &mut h, SMALL);
        h.rollback_frame();
        prop_assert_eq!(print_host_graph(&h), before);
        prop_assert!(h.check_invariants().is_ok());
        prop_assert_eq!(s.rollbacks, s.loop_failures + s.if_runs + s.try_failures);
        for (_, r) in &s.rules {
            prop_assert_eq!(r.calls, r.successes + r.failures);
        }
    }

    /// Skipping frames that could never undo a change is unobservable.
    #[test]
    fn skipped_frames_are_unobservable(seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut p = rules_with("skip");
        p.main = random_command(&mut rng, 4, false, p.rules.len());
        let h = random_host(&mut rng);
        let (mut a, mut b) = (h.clone(), h);
        let (oa, sa) = run(&p, &mut a, SMALL);
        let (ob, sb) = super::run_with(&p, &mut b, SMALL, &mut [], super::EffectMap::conservative());
        prop_assert_eq!(oa, ob);
        prop_assert_eq!(print_host_graph(&a), print_host_graph(&b));
        prop_assert_eq!(sa.to_csv(), sb.to_csv());
        prop_assert_eq!((sa.steps, sa.rollbacks), (sb.steps, sb.rollbacks));
    }

    #[test]
    fn finished_loop_body_fails_again(seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut p = rules_with("skip");
        let body = random_command(&mut rng, 3, false, p.rules.len());
        p.main = Command::Loop(Box::new(body.clone()));
        let mut h = random_host(&mut rng);
        let (o, s) = run(&p, &mut h, SMALL);
        if o != Outcome::Graph || s.loop_failures == 0 {
            // ran out of steps, or an inner loop absorbed the failure
            return Ok(());
        }
        let after = print_host_graph(&h);
        p.main = body.clone();
        h.begin_frame();
        let (o, _) = run(&p, &mut h, SMALL);
        h.rollback_frame();
        prop_assert_eq!(o, Outcome::Fail);
        p.main = Command::Try { cond: Box::new(body), then: None, els: None };
        let (o, _) = run(&p, &mut h, SMALL);
        prop_assert_eq!(o, Outcome::Graph);
        prop_assert_eq!(print_host_graph(&h), after);
    }
}

#[test]
fn frames_are_skipped_only_where_safe() {
    use super::effects::EffectMap;
    let dag = lookup("is-dag").unwrap().program().unwrap();
    let fx = EffectMap::new(&dag);
    let Command::Seq(main) = &dag.main else { panic!() };
    let Command::Loop(outer) = &main[0] else { panic!() };
    assert!(!fx.get(outer).dirty_fail);
    let dfs = &dag.procs[dag.proc_index("DFS").unwrap()].body;
    // `set_flag` could in principle fail after `next_edge` wrote.
    assert!(fx.get(dfs).dirty_fail);

    let conn = lookup("is-connected").unwrap().program().unwrap();
    let fx = EffectMap::new(&conn);
    let forward = &conn.procs[conn.proc_index("FORWARD").unwrap()].body;
    assert!(fx.get(forward).dirty_fail);
    let check = &conn.procs[conn.proc_index("Check").unwrap()].body;
    let Command::If { cond, .. } = check else { panic!("{check:?}") };
    assert!(!fx.get(cond).writes);
}
