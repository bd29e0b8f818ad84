use super::*;
use crate::frontend::{parse_host_graph, print_host_graph};
use crate::interp::{run, DashedPath, RedEdgeBound, RootBound};

fn g(text: &str) -> HostGraph {
    parse_host_graph(text).unwrap()
}

fn check(name: &str, input: &HostGraph) -> CheckReport {
    let r = check_program_against_oracle(name, input, Limits::default(), &mut []).unwrap();
    assert!(r.verdict.is_pass(), "{name} on {}: {}", print_host_graph(input), r.verdict);
    r
}

fn grey_star(k: usize) -> HostGraph {
    let mut s = String::from("[ (0, 0 # grey)");
    for i in 1..=k {
        s += &format!(" ({i}, 0 # grey)");
    }
    s += " |";
    for i in 1..=k {
        if i % 2 == 0 {
            s += &format!(" (e{i}, 0, {i}, 0)");
        } else {
            s += &format!(" (e{i}, {i}, 0, 0)");
        }
    }
    g(&(s + " ]"))
}

#[test]
fn every_specimen_parses() {
    for s in registry() {
        s.program().unwrap_or_else(|e| panic!("{}: {e}", s.name()));
    }
}

#[test]
fn is_connected_declarations() {
    let p = lookup("is-connected").unwrap().program().unwrap();
    assert_eq!(p.rules.len(), 6);
    let mut procs: Vec<&str> = p.procs.iter().map(|q| q.name.as_str()).collect();
    procs.sort();
    assert_eq!(procs, ["Check", "DFS", "FORWARD"]);
}

#[test]
fn is_connected_examples() {
    let r = check("is-connected", &HostGraph::new());
    assert_eq!(r.outcome, Outcome::Graph);
    let r = check("is-connected", &g("[ (1, 0 # grey) (2, 0 # grey) | ]"));
    assert_eq!(r.outcome, Outcome::Fail);
    let r = check("is-connected", &grey_star(8));
    assert_eq!(r.outcome, Outcome::Graph);
    let grid = "[ (1, 0 # grey) (2, 0 # grey) (3, 0 # grey) (4, 0 # grey) (5, 0 # grey) (6, 0 # grey) \
                (7, 0 # grey) (8, 0 # grey) (9, 0 # grey) | (a, 1, 2, 0) (b, 2, 3, 0) (c, 4, 5, 0) \
                (d, 5, 6, 0) (e, 7, 8, 0) (f, 8, 9, 0) (g, 1, 4, 0) (h, 4, 7, 0) (i, 2, 5, 0) \
                (j, 5, 8, 0) (k, 3, 6, 0) (l, 6, 9, 0) ]";
    assert_eq!(check("is-connected", &g(grid)).outcome, Outcome::Graph);
    assert_eq!(check("is-connected-old", &g(grid)).outcome, Outcome::Graph);
}

#[test]
fn is_connected_call_counts_on_star() {
    let r = check("is-connected", &grey_star(8));
    let m = 8;
    assert_eq!(r.stats.rule("init").calls, 1);
    assert_eq!(r.stats.rule("match").calls, 1);
    assert!(r.stats.rule("back").calls <= m + 1);
    // One failing call ends every FORWARD! and is followed by a back call,
    // so on a tree the count is m + n = 2m + 1.
    assert_eq!(r.stats.rule("next_edge").calls, 2 * m + 1);
}

#[test]
fn is_dag_examples() {
    let r = check("is-dag", &g("[ (1, 0 # grey) | (e, 1, 1, 0) ]"));
    assert_eq!(r.outcome, Outcome::Fail);
    // triangle with an incoming tail
    let cyclic = "[ (1, 0 # grey) (2, 0 # grey) (3, 0 # grey) (4, 0 # grey) | \
                  (a, 4, 1, 0) (b, 1, 2, 0) (c, 2, 3, 0) (d, 3, 1, 0) ]";
    assert_eq!(check("is-dag", &g(cyclic)).outcome, Outcome::Fail);
    let discrete = "[ (1, 0 # grey) (2, 0 # grey) (3, 0 # grey) (4, 0 # grey) (5, 0 # grey) | ]";
    let r = check("is-dag", &g(discrete));
    assert_eq!(r.outcome, Outcome::Graph);
    assert!(r.output.nodes().all(|v| r.output.node_mark(v) == Mark::Blue));
    let tree = "[ (1, 0 # grey) (2, 0 # grey) (3, 0 # grey) (4, 0 # grey) | (a, 1, 2, 0) (b, 1, 3, 0) (c, 2, 4, 0) ]";
    assert_eq!(check("is-dag", &g(tree)).outcome, Outcome::Graph);
    assert_eq!(check("is-dag", &grey_star(8)).outcome, Outcome::Graph);
}

#[test]
fn bellman_ford_two_nodes() {
    let r = check("bellman-ford", &g("[ (a(R), \"x\" # grey) (b, \"y\" # grey) | (e, a, b, 5) ]"));
    assert_eq!(r.outcome, Outcome::Graph);
    assert_eq!(print_host_graph(&r.output), "[ (1(R), \"x\":0 # grey) (2, \"y\":5 # grey) | (e1, 1, 2, 5 # blue) ]");
}

#[test]
fn bellman_ford_negative_cycle_fails() {
    let cyc = "[ (1(R), 0 # grey) (2, 0 # grey) (3, 0 # grey) (4, 0 # grey) | \
               (a, 1, 2, -2) (b, 2, 3, 1) (c, 3, 4, -2) (d, 4, 1, 1) ]";
    assert_eq!(check("bellman-ford", &g(cyc)).outcome, Outcome::Fail);
}

#[test]
fn bellman_ford_unreachable_and_isolated() {
    let text = "[ (1(R), empty # grey) (2, empty # grey) (3, empty # grey) (4, empty # grey) | \
                (a, 1, 2, 3) (b, 3, 2, -4) ]";
    let r = check("bellman-ford", &g(text));
    let labels: Vec<String> = r.output.nodes().map(|v| r.output.node_label(v).to_string()).collect();
    assert_eq!(labels, ["0", "3", "\"f\"", "\"f\""]);
    let pr = lookup("bellman-ford").unwrap().program().unwrap();
    let mut h = g(text);
    let (_, stats) = run(&pr, &mut h, Limits::default());
    assert_eq!(stats.rule("decrement").successes, 3);
    assert_eq!(stats.rule("count").calls, 4);
}

#[test]
fn bellman_ford_rejects_two_roots() {
    let e = check_program_against_oracle(
        "bellman-ford",
        &g("[ (1(R), 0 # grey) (2(R), 0 # grey) | ]"),
        Limits::default(),
        &mut [],
    )
    .unwrap_err();
    assert!(matches!(e, CheckError::Precondition(_)));
}

#[test]
fn transitive_closure_path() {
    let r = check("transitive-closure", &g("[ (1, 0 # grey) (2, 0 # grey) (3, 0 # grey) | (a, 1, 2, 0) (b, 2, 3, 0) ]"));
    assert_eq!(r.output.edge_count(), 3);
    let cyc = "[ (1, 0 # grey) (2, 0 # grey) (3, 0 # grey) (4, 0 # grey) | \
               (a, 1, 2, 0) (b, 2, 3, 0) (c, 3, 1, 0) (d, 3, 4, 0) (e, 4, 4, 0) ]";
    check("transitive-closure", &g(cyc));
}

#[test]
fn is_discrete_both_ways() {
    let r = check("is-discrete", &g("[ (1, 0) (2, 0) (3, 0) | ]"));
    assert_eq!(r.outcome, Outcome::Graph);
    let r = check("is-discrete", &g("[ (1, 0) (2, 0) (3, 0) | (e, 2, 3, 0) ]"));
    assert_eq!(r.outcome, Outcome::Fail);
    check("is-discrete", &HostGraph::new());
}

#[test]
fn monitors_hold_on_small_inputs() {
    let inputs = [
        grey_star(6),
        g("[ (1, 0 # grey) (2, 0 # grey) (3, 0 # grey) | (a, 1, 2, 0) (b, 2, 3, 0) (c, 3, 1, 0) ]"),
    ];
    for input in &inputs {
        let mut dp = DashedPath;
        let mut mons: [&mut dyn Monitor; 1] = [&mut dp];
        let r = check_program_against_oracle("is-connected", input, Limits::default(), &mut mons).unwrap();
        assert!(r.verdict.is_pass(), "{}", r.verdict);
        let (mut rb, mut re) = (RootBound(1), RedEdgeBound(1));
        let mut mons: [&mut dyn Monitor; 2] = [&mut rb, &mut re];
        let r = check_program_against_oracle("is-dag", input, Limits::default(), &mut mons).unwrap();
        assert!(r.verdict.is_pass(), "{}", r.verdict);
    }
}

#[test]
fn fixed_inputs_pass() {
    for s in registry() {
        let inputs = fixed_inputs(s.name());
        assert!(!inputs.is_empty(), "{}", s.name());
        for input in &inputs {
            check(s.name(), input);
        }
    }
}

proptest::proptest! {
    #[test]
    fn random_inputs_are_valid_and_pass(seed: u64, which in 0usize..6) {
        use rand::SeedableRng;
        let s = registry()[which];
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let input = random_input(s.name(), &mut rng, 12, 24, HostGraph::new());
        proptest::prop_assert!(s.validate_input(&input).is_ok());
        let mut mons = default_monitors(s.name());
        let mut refs: Vec<&mut dyn Monitor> = mons.iter_mut().map(|m| &mut **m as &mut dyn Monitor).collect();
        let r = check_program_against_oracle(s.name(), &input, Limits::default(), &mut refs).unwrap();
        proptest::prop_assert!(r.verdict.is_pass(), "{} on {}: {}", s.name(), print_host_graph(&input), r.verdict);
    }
}
