use std::collections::{HashMap, HashSet};

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::frontend::{parse_host_graph, parse_program, print_host_graph};
use crate::labels::HostValue;
use crate::specimens::lookup;
use crate::store::{EdgeId, HostGraph, NodeId};

fn g(text: &str) -> HostGraph {
    parse_host_graph(text).unwrap()
}

fn rule(text: &str) -> Rule {
    let name = text.split('(').next().unwrap().trim();
    let mut p = parse_program(&format!("{text}\nMain = {name}")).unwrap();
    p.rules.remove(0)
}

fn specimen_rule(program: &str, name: &str) -> Rule {
    let p = lookup(program).unwrap().program().unwrap();
    p.rules.into_iter().find(|r| r.name == name).unwrap()
}

fn apply(r: &Rule, h: &mut HostGraph) -> bool {
    let mut m = r.new_match();
    r.apply_once(h, &mut m, &mut RuleStats::default()).unwrap()
}

#[test]
fn back_plan_starts_at_root_and_extends() {
    let r = specimen_rule("is-connected", "back");
    let two = r.lhs.node_index("2").unwrap();
    assert_eq!(r.plan()[0], Step::Root(two));
    assert!(matches!(r.plan()[1], Step::Extend { edge: 0, from, .. } if from == two));
    assert_eq!(r.plan().len(), 2);
    assert!(r.is_rooted_plan());
}

#[test]
fn init_plan_is_one_scan() {
    let r = specimen_rule("is-connected", "init");
    assert_eq!(r.plan(), [Step::Scan(0)]);
    assert!(!r.is_rooted_plan());
}

#[test]
fn disconnected_left_side_scans_twice() {
    let r = rule("two(x, y:list) [ (a, x # red) (b, y # blue) | ] => [ (a, x # red) (b, y # blue) | ]");
    assert_eq!(r.plan(), [Step::Scan(0), Step::Scan(1)]);
}

#[test]
fn next_edge_matches_in_constant_inspections() {
    let r = specimen_rule("is-connected", "next_edge");
    let mut h = g("[ (1(R), 0 # blue) (2, 0 # grey) (3, 0 # grey) | (e, 1, 2, 0) (f, 3, 2, 0) ]");
    let mut m = r.new_match();
    assert!(r.find_match(&mut h, &mut m).unwrap());
    // one root plus one edge
    assert_eq!(m.attempts, 2);
    assert!(h.no_matched_flags());
}

#[test]
fn match_on_empty_grey_bucket_inspects_nothing() {
    let r = specimen_rule("is-connected", "match");
    let mut h = g("[ (1, 0 # blue) (2, 0 # red) | (e, 1, 2, 0) ]");
    let mut m = r.new_match();
    assert!(!r.find_match(&mut h, &mut m).unwrap());
    assert_eq!(m.attempts, 0);
}

#[test]
fn isolated_respects_dangling_condition() {
    let r = specimen_rule("is-discrete", "isolated");
    let mut h = g("[ (1(R), 0 # red) (2, 0) | (e, 1, 2, 0) ]");
    let before = print_host_graph(&h);
    assert!(!apply(&r, &mut h));
    assert_eq!(print_host_graph(&h), before);
    let mut h = g("[ (1(R), 0 # red) | ]");
    assert!(apply(&r, &mut h));
    assert_eq!(h.root_count(), 0);
}

#[test]
fn dangling_cases() {
    let del = rule("del(x:list) [ (1, x) | ] => [ | ]");
    assert!(apply(&del, &mut g("[ (1, 0) | ]")));
    assert!(!apply(&del, &mut g("[ (1, 0) | (l, 1, 1, 0) ]")));
    let both = rule("both(x, y, z:list) [ (1, x) (2, y) | (e, 1, 2, z) ] => [ (2, y) | ]");
    let mut h = g("[ (1, 0) (2, 0) | (e, 1, 2, 0) ]");
    assert!(apply(&both, &mut h));
    assert_eq!((h.node_count(), h.edge_count()), (1, 0));
    let mut h = g("[ (1, 0) (2, 0) | (e, 1, 2, 0) (f, 2, 1, 0) ]");
    assert!(!apply(&both, &mut h));
}

#[test]
fn set_counter_builds_counter() {
    let r = specimen_rule("bellman-ford", "set_counter");
    let mut h = g("[ (1(R), 7 # grey) | ]");
    assert!(apply(&r, &mut h));
    assert_eq!(print_host_graph(&h), "[ (1, 7:0 # blue) (2, 0 # green) | (e1, 2, 1, empty # dashed) ]");
}

#[test]
fn ignore_retires_red_edge() {
    let r = specimen_rule("is-connected", "ignore");
    let mut h = g("[ (1(R), 0 # blue) (2, 0 # blue) | (e, 2, 1, 5 # red) ]");
    assert!(apply(&r, &mut h));
    assert_eq!(print_host_graph(&h), "[ (1(R), 0 # blue) (2, 0 # blue) | (e1, 2, 1, 5 # blue) ]");
}

#[test]
fn identity_rule_changes_nothing() {
    let r = rule("id(x, y, z:list) [ (1, x # red) (2, y) | (e, 1, 2, z) ] => [ (1, x # red) (2, y) | (e, 1, 2, z) ]");
    let mut h = g("[ (1, 3 # red) (2, \"a\") | (e, 1, 2, 1:2) ]");
    let before = print_host_graph(&h);
    h.begin_frame();
    assert!(apply(&r, &mut h));
    assert_eq!(print_host_graph(&h), before);
    h.rollback_frame();
    assert_eq!(print_host_graph(&h), before);
}

#[test]
fn decrement_flag_and_empty_graph() {
    let dec = specimen_rule("bellman-ford", "decrement");
    assert!(!apply(&dec, &mut g("[ (1, 0 # green) | ]")));
    let mut h = g("[ (1, 2 # green) | ]");
    assert!(apply(&dec, &mut h));
    assert_eq!(print_host_graph(&h), "[ (1, 1 # green) | ]");
    let flag = specimen_rule("bellman-ford", "flag");
    let mut h = g("[ (1, -1 # green) | ]");
    assert!(apply(&flag, &mut h));
    assert_eq!(print_host_graph(&h), "[ (1, -1 # green) | ]");
    for s in crate::specimens::registry() {
        for r in s.program().unwrap().rules {
            let mut h = HostGraph::new();
            assert!(!apply(&r, &mut h), "{}", r.name);
        }
    }
}

#[test]
fn stats_count_calls() {
    let r = specimen_rule("is-connected", "init");
    let mut h = g("[ (1, 0 # grey) | ]");
    let (mut m, mut s) = (r.new_match(), RuleStats::default());
    assert!(r.apply_once(&mut h, &mut m, &mut s).unwrap());
    assert!(!r.apply_once(&mut h, &mut m, &mut s).unwrap());
    assert_eq!(s, RuleStats { calls: 2, successes: 1, failures: 1, attempts: 1 });
}

#[test]
fn rooted_specimen_rules_inspect_at_most_one_node() {
    let cases = [
        ("is-connected", "init", "[ (1, 0 # grey) (2, 0 # grey) (3, 0 # blue) | ]"),
        ("is-connected", "match", "[ (1, 0 # grey) (2, 0 # grey) | ]"),
        ("bellman-ford", "root1", "[ (1, 0 # blue) (2, 0 # blue) (3, 0 # grey) | ]"),
        ("bellman-ford", "flag", "[ (1, 3 # green) (2, 0 # grey) | ]"),
    ];
    for (p, name, host) in cases {
        let r = specimen_rule(p, name);
        let mut h = g(host);
        let mut m = r.new_match();
        r.find_match(&mut h, &mut m).unwrap();
        assert!(m.attempts <= 1, "{name}: {}", m.attempts);
    }
}

// Independent brute-force matcher and applier over a plain copy of the host.

#[derive(Clone, Debug)]
struct PNode {
    id: NodeId,
    label: HostValue,
    mark: Mark,
    root: bool,
}

#[derive(Clone, Debug)]
struct PEdge {
    id: EdgeId,
    s: usize,
    t: usize,
    label: HostValue,
    mark: Mark,
}

fn plain(h: &HostGraph) -> (Vec<PNode>, Vec<PEdge>) {
    let nodes: Vec<PNode> = h
        .nodes()
        .map(|v| PNode { id: v, label: h.node_label(v).clone(), mark: h.node_mark(v), root: h.is_root(v) })
        .collect();
    let ix: HashMap<NodeId, usize> = nodes.iter().enumerate().map(|(i, n)| (n.id, i)).collect();
    let edges = h
        .edges()
        .map(|e| PEdge {
            id: e,
            s: ix[&h.source(e)],
            t: ix[&h.target(e)],
            label: h.edge_label(e).clone(),
            mark: h.edge_mark(e),
        })
        .collect();
    (nodes, edges)
}

/// Left labels in the generated rules are a list variable or a constant.
fn lit(l: &crate::labels::LabelExpr, r: &Rule, alpha: &mut HashMap<String, HostValue>, v: &HostValue) -> bool {
    let text = l.display(&r.vars).to_string();
    if r.vars.iter().any(|d| d.name == text) {
        match alpha.get(&text) {
            Some(b) => b == v,
            None => {
                alpha.insert(text, v.clone());
                true
            }
        }
    } else {
        text == v.to_string()
    }
}

fn eval_rhs(l: &crate::labels::LabelExpr, r: &Rule, alpha: &HashMap<String, HostValue>) -> HostValue {
    let text = l.display(&r.vars).to_string();
    alpha.get(&text).cloned().unwrap_or_else(|| parse_host_graph(&format!("[ (1, {text}) | ]")).map(|h| {
        let v = h.nodes().next().unwrap();
        h.node_label(v).clone()
    }).unwrap())
}

type NaiveMatch = (Vec<usize>, Vec<usize>, HashMap<String, HostValue>);

fn naive_matches(r: &Rule, nodes: &[PNode], edges: &[PEdge]) -> Vec<NaiveMatch> {
    let mut out = Vec::new();
    let ln = r.lhs.nodes.len();
    let mut nm = vec![usize::MAX; ln];
    fn nodes_rec(
        r: &Rule,
        nodes: &[PNode],
        edges: &[PEdge],
        i: usize,
        nm: &mut Vec<usize>,
        out: &mut Vec<NaiveMatch>,
    ) {
        if i == nm.len() {
            let mut em = vec![usize::MAX; r.lhs.edges.len()];
            edges_rec(r, nodes, edges, 0, nm, &mut em, out);
            return;
        }
        for h in 0..nodes.len() {
            if nm[..i].contains(&h) {
                continue;
            }
            let (rn, hn) = (&r.lhs.nodes[i], &nodes[h]);
            if !rn.mark.matches(hn.mark) || (rn.rooted && !hn.root) {
                continue;
            }
            nm[i] = h;
            nodes_rec(r, nodes, edges, i + 1, nm, out);
        }
        nm[i] = usize::MAX;
    }
    fn edges_rec(
        r: &Rule,
        nodes: &[PNode],
        edges: &[PEdge],
        j: usize,
        nm: &[usize],
        em: &mut Vec<usize>,
        out: &mut Vec<NaiveMatch>,
    ) {
        if j == em.len() {
            let mut alpha = HashMap::new();
            for (i, rn) in r.lhs.nodes.iter().enumerate() {
                if !lit(&rn.label, r, &mut alpha, &nodes[nm[i]].label) {
                    return;
                }
            }
            for (k, re) in r.lhs.edges.iter().enumerate() {
                if !lit(&re.label, r, &mut alpha, &edges[em[k]].label) {
                    return;
                }
            }
            // dangling: every edge at a deleted node must be matched
            for (i, _) in r.lhs.nodes.iter().enumerate() {
                if r.interface().iter().any(|&(l, _)| l == i) {
                    continue;
                }
                for (k, e) in edges.iter().enumerate() {
                    if (e.s == nm[i] || e.t == nm[i]) && !em.contains(&k) {
                        return;
                    }
                }
            }
            out.push((nm.to_vec(), em.clone(), alpha));
            return;
        }
        let re = &r.lhs.edges[j];
        for (k, e) in edges.iter().enumerate() {
            if em[..j].contains(&k) || !re.mark.matches(e.mark) {
                continue;
            }
            let fwd = e.s == nm[re.src] && e.t == nm[re.tgt];
            let bwd = re.bidirectional && e.t == nm[re.src] && e.s == nm[re.tgt];
            if fwd || bwd {
                em[j] = k;
                edges_rec(r, nodes, edges, j + 1, nm, em, out);
            }
        }
        em[j] = usize::MAX;
    }
    nodes_rec(r, nodes, edges, 0, &mut nm, &mut out);
    out
}

/// Multiset description of a graph relative to the ids of `old`.
fn describe(
    nodes: &[(Option<NodeId>, String)],
    edges: &[(Option<EdgeId>, String, String, String)],
) -> (Vec<String>, Vec<String>) {
    let mut n: Vec<String> = nodes.iter().map(|(id, d)| format!("{id:?} {d}")).collect();
    let mut e: Vec<String> = edges.iter().map(|(id, s, t, d)| format!("{id:?} {s}->{t} {d}")).collect();
    n.sort();
    e.sort();
    (n, e)
}

fn describe_host(h: &HostGraph, old_n: &HashSet<NodeId>, old_e: &HashSet<EdgeId>) -> (Vec<String>, Vec<String>) {
    let nd = |v: NodeId| {
        format!("{}#{}{}", h.node_label(v), h.node_mark(v), if h.is_root(v) { "R" } else { "" })
    };
    let key = |v: NodeId| if old_n.contains(&v) { format!("{v:?}") } else { format!("new({})", nd(v)) };
    let nodes: Vec<_> = h.nodes().map(|v| (old_n.contains(&v).then_some(v), nd(v))).collect();
    let edges: Vec<_> = h
        .edges()
        .map(|e| {
            (
                old_e.contains(&e).then_some(e),
                key(h.source(e)),
                key(h.target(e)),
                format!("{}#{}", h.edge_label(e), h.edge_mark(e)),
            )
        })
        .collect();
    describe(&nodes, &edges)
}

fn naive_apply(
    r: &Rule,
    nodes: &[PNode],
    edges: &[PEdge],
    mt: &NaiveMatch,
) -> (Vec<String>, Vec<String>) {
    let (nm, em, alpha) = mt;
    let iface: HashMap<usize, usize> = r.interface().into_iter().collect();
    let kept_edges: HashMap<usize, usize> = r
        .lhs
        .edges
        .iter()
        .enumerate()
        .filter_map(|(j, le)| {
            let ri = r.rhs.edge_index(&le.name)?;
            let re = &r.rhs.edges[ri];
            let same = iface.get(&le.src) == Some(&re.src)
                && iface.get(&le.tgt) == Some(&re.tgt)
                && le.bidirectional == re.bidirectional;
            same.then_some((j, ri))
        })
        .collect();
    let mut out_nodes: Vec<(Option<NodeId>, String)> = Vec::new();
    let mut r_key: Vec<String> = vec![String::new(); r.rhs.nodes.len()];
    let mut host_key: HashMap<usize, String> = HashMap::new();
    let new_mark = |rm: Mark, old: Mark| if rm == Mark::Any { old } else { rm };
    for (h, n) in nodes.iter().enumerate() {
        let li = nm.iter().position(|&x| x == h);
        let (label, mark, root) = match li {
            None => (n.label.clone(), n.mark, n.root),
            Some(li) => match iface.get(&li) {
                None => continue,
                Some(&ri) => {
                    let (ln, rn) = (&r.lhs.nodes[li], &r.rhs.nodes[ri]);
                    let root = if ln.rooted != rn.rooted { rn.rooted } else { n.root };
                    (eval_rhs(&rn.label, r, alpha), new_mark(rn.mark, n.mark), root)
                }
            },
        };
        let d = format!("{label}#{mark}{}", if root { "R" } else { "" });
        host_key.insert(h, format!("{:?}", n.id));
        if let Some(li) = li {
            r_key[iface[&li]] = format!("{:?}", n.id);
        }
        out_nodes.push((Some(n.id), d));
    }
    for (ri, rn) in r.rhs.nodes.iter().enumerate() {
        if iface.values().any(|&x| x == ri) {
            continue;
        }
        let d = format!("{}#{}{}", eval_rhs(&rn.label, r, alpha), rn.mark, if rn.rooted { "R" } else { "" });
        r_key[ri] = format!("new({d})");
        out_nodes.push((None, d));
    }
    let mut out_edges = Vec::new();
    for (k, e) in edges.iter().enumerate() {
        match em.iter().position(|&x| x == k) {
            None => out_edges.push((Some(e.id), host_key[&e.s].clone(), host_key[&e.t].clone(), format!("{}#{}", e.label, e.mark))),
            Some(j) => {
                if let Some(&ri) = kept_edges.get(&j) {
                    let re = &r.rhs.edges[ri];
                    out_edges.push((
                        Some(e.id),
                        host_key[&e.s].clone(),
                        host_key[&e.t].clone(),
                        format!("{}#{}", eval_rhs(&re.label, r, alpha), new_mark(re.mark, e.mark)),
                    ));
                }
            }
        }
    }
    for (ri, re) in r.rhs.edges.iter().enumerate() {
        if kept_edges.values().any(|&x| x == ri) {
            continue;
        }
        out_edges.push((
            None,
            r_key[re.src].clone(),
            r_key[re.tgt].clone(),
            format!("{}#{}", eval_rhs(&re.label, r, alpha), re.mark),
        ));
    }
    describe(&out_nodes, &out_edges)
}

const NODE_MARKS: [&str; 4] = ["", " # grey", " # red", " # any"];
const EDGE_MARKS: [&str; 3] = ["", " # red", " # any"];

fn random_rule(rng: &mut ChaCha8Rng) -> String {
    let vars = ["x", "y"];
    let label = |rng: &mut ChaCha8Rng| {
        if rng.gen_bool(0.6) {
            vars[rng.gen_range(0..2)].to_string()
        } else {
            rng.gen_range(0..2).to_string()
        }
    };
    let ln = rng.gen_range(1..=3);
    let mut lnodes = Vec::new();
    for i in 0..ln {
        let root = if rng.gen_bool(0.3) { "(R)" } else { "" };
        lnodes.push((i, root, label(rng), NODE_MARKS[rng.gen_range(0..4)]));
    }
    let mut ledges = Vec::new();
    for j in 0..rng.gen_range(0..=3) {
        let (s, t) = (rng.gen_range(0..ln), rng.gen_range(0..ln));
        let b = if s != t && rng.gen_bool(0.3) { "(B)" } else { "" };
        ledges.push((j, b, s, t, label(rng), EDGE_MARKS[rng.gen_range(0..3)]));
    }
    let used: Vec<&str> = vars
        .iter()
        .copied()
        .filter(|v| lnodes.iter().any(|n| n.2 == *v) || ledges.iter().any(|e| e.4 == *v))
        .collect();
    let rlabel = |rng: &mut ChaCha8Rng| {
        if !used.is_empty() && rng.gen_bool(0.6) {
            used[rng.gen_range(0..used.len())].to_string()
        } else {
            rng.gen_range(0..3).to_string()
        }
    };
    let concrete_n = ["", " # grey", " # red", " # blue"];
    let mut rnodes = Vec::new();
    for (i, root, _, mark) in &lnodes {
        if rng.gen_bool(0.7) {
            let root = if rng.gen_bool(0.8) { *root } else if root.is_empty() { "(R)" } else { "" };
            let m = if *mark == " # any" && rng.gen_bool(0.5) { " # any" } else { concrete_n[rng.gen_range(0..4)] };
            rnodes.push((format!("n{i}"), root, rlabel(rng), m));
        }
    }
    if rng.gen_bool(0.4) {
        rnodes.push(("fresh".into(), "", rlabel(rng), concrete_n[rng.gen_range(0..4)]));
    }
    let mut redges = Vec::new();
    let kept: Vec<String> = rnodes.iter().map(|n| n.0.clone()).collect();
    for (j, b, s, t, _, mark) in &ledges {
        let (sn, tn) = (format!("n{s}"), format!("n{t}"));
        if kept.contains(&sn) && kept.contains(&tn) && rng.gen_bool(0.6) {
            let m = if *mark == " # any" && rng.gen_bool(0.5) { " # any" } else { ["", " # red", " # blue"][rng.gen_range(0..3)] };
            redges.push((format!("e{j}"), *b, sn, tn, rlabel(rng), m));
        }
    }
    if !kept.is_empty() && rng.gen_bool(0.4) {
        let s = kept[rng.gen_range(0..kept.len())].clone();
        let t = kept[rng.gen_range(0..kept.len())].clone();
        redges.push(("new".into(), "", s, t, rlabel(rng), " # dashed"));
    }
    let mut text = String::from("r(");
    if !used.is_empty() {
        text += &format!("{}:list", used.join(", "));
    }
    text += ") [";
    for (i, root, l, m) in &lnodes {
        text += &format!(" (n{i}{root}, {l}{m})");
    }
    text += " |";
    for (j, b, s, t, l, m) in &ledges {
        text += &format!(" (e{j}{b}, n{s}, n{t}, {l}{m})");
    }
    text += " ] => [";
    for (n, root, l, m) in &rnodes {
        text += &format!(" ({n}{root}, {l}{m})");
    }
    text += " |";
    for (e, b, s, t, l, m) in &redges {
        text += &format!(" ({e}{b}, {s}, {t}, {l}{m})");
    }
    text + " ]"
}

fn random_host(rng: &mut ChaCha8Rng) -> String {
    let n = rng.gen_range(1..=5);
    let mut s = String::from("[");
    for i in 0..n {
        let root = if rng.gen_bool(0.3) { "(R)" } else { "" };
        let m = ["", " # grey", " # red"][rng.gen_range(0..3)];
        s += &format!(" ({i}{root}, {}{m})", rng.gen_range(0..2));
    }
    s += " |";
    for j in 0..rng.gen_range(0..=6) {
        let m = ["", " # red"][rng.gen_range(0..2)];
        s += &format!(" (e{j}, {}, {}, {}{m})", rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..2));
    }
    s + " ]"
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6000))]

    #[test]
    fn matcher_and_application_agree_with_brute_force(seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let text = random_rule(&mut rng);
        let r = rule(&text);
        let mut h = g(&random_host(&mut rng));
        let (nodes, edges) = plain(&h);
        let all = naive_matches(&r, &nodes, &edges);
        let mut m = r.new_match();
        let found = r.find_match(&mut h, &mut m).unwrap();
        prop_assert!(h.no_matched_flags());
        prop_assert_eq!(found, !all.is_empty(), "{}", text);
        if !found {
            return Ok(());
        }
        let nix: HashMap<NodeId, usize> = nodes.iter().enumerate().map(|(i, n)| (n.id, i)).collect();
        let eix: HashMap<EdgeId, usize> = edges.iter().enumerate().map(|(i, e)| (e.id, i)).collect();
        let got_n: Vec<usize> = (0..r.lhs.nodes.len()).map(|i| nix[&m.node(i)]).collect();
        let got_e: Vec<usize> = (0..r.lhs.edges.len()).map(|j| eix[&m.edge(j)]).collect();
        let chosen = all.iter().find(|(n, e, _)| *n == got_n && *e == got_e);
        prop_assert!(chosen.is_some(), "match not valid for {}", text);
        let want = naive_apply(&r, &nodes, &edges, chosen.unwrap());
        let old_n: HashSet<NodeId> = nodes.iter().map(|n| n.id).collect();
        let old_e: HashSet<EdgeId> = edges.iter().map(|e| e.id).collect();
        let before = print_host_graph(&h);
        h.begin_frame();
        r.apply(&mut h, &m).unwrap();
        prop_assert_eq!(describe_host(&h, &old_n, &old_e), want, "{}", text);
        h.check_invariants().unwrap();
        h.rollback_frame();
        prop_assert_eq!(print_host_graph(&h), before);
    }
}
