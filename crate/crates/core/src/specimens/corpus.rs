//! Seeded random inputs and the fixed example inputs for each specimen.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::benchlab::{generate, GraphClass, Kind, Weights};
use crate::frontend::parse_host_graph;
use crate::interp::{DashedPath, Monitor, RedEdgeBound, RootBound};
use crate::labels::HostValue;
use crate::mark::Mark;
use crate::store::{HostGraph, NodeId};

/// A random input satisfying `name`'s input specification, built into `g`
/// (which must be empty). At most `max_n` nodes and `max_m` edges.
pub fn random_input<R: Rng>(name: &str, rng: &mut R, max_n: usize, max_m: usize, mut g: HostGraph) -> HostGraph {
    assert!(g.is_empty());
    match name {
        "bellman-ford" => weighted_rooted(rng, max_n.max(1), max_m, &mut g),
        "is-discrete" => {
            let n = rng.gen_range(0..=max_n);
            let m = if n == 0 || rng.gen_bool(0.5) { 0 } else { rng.gen_range(1..=max_m.clamp(1, 3)) };
            plain(rng, n, m, Mark::None, true, &mut g);
        }
        _ => {
            let n = rng.gen_range(0..=max_n);
            shaped(rng, n, max_m, &mut g);
        }
    }
    g
}

fn add_nodes(g: &mut HostGraph, n: usize, mark: Mark) -> Vec<NodeId> {
    (0..n).map(|_| g.add_node(HostValue::empty(), mark, false).expect("fresh node")).collect()
}

fn plain<R: Rng>(rng: &mut R, n: usize, m: usize, mark: Mark, loops: bool, g: &mut HostGraph) {
    let v = add_nodes(g, n, mark);
    if n == 0 {
        return;
    }
    for _ in 0..m {
        let (s, t) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if s == t && !loops {
            continue;
        }
        g.add_edge(v[s], v[t], HostValue::empty(), Mark::None).expect("endpoints exist");
    }
}

/// Grey graphs in three styles: connected (random spanning tree plus
/// extras), uniformly random (loops allowed), and acyclic.
fn shaped<R: Rng>(rng: &mut R, n: usize, max_m: usize, g: &mut HostGraph) {
    let v = add_nodes(g, n, Mark::Grey);
    if n == 0 {
        return;
    }
    let mut edges = Vec::new();
    let style = rng.gen_range(0..3);
    if style == 0 {
        for i in 1..n {
            let j = rng.gen_range(0..i);
            edges.push(if rng.gen_bool(0.5) { (i, j) } else { (j, i) });
        }
    }
    let extra = rng.gen_range(0..=max_m.saturating_sub(edges.len()).min(2 * n));
    let mut rank: Vec<usize> = (0..n).collect();
    rank.shuffle(rng);
    for _ in 0..extra {
        let (s, t) = (rng.gen_range(0..n), rng.gen_range(0..n));
        match style {
            2 if s == t => continue,
            2 => edges.push(if rank[s] < rank[t] { (s, t) } else { (t, s) }),
            _ => edges.push((s, t)),
        }
    }
    edges.truncate(max_m);
    for (s, t) in edges {
        g.add_edge(v[s], v[t], HostValue::empty(), Mark::None).expect("endpoints exist");
    }
}

fn weighted_rooted<R: Rng>(rng: &mut R, max_n: usize, max_m: usize, g: &mut HostGraph) {
    let n = rng.gen_range(1..=max_n);
    let v: Vec<NodeId> =
        (0..n).map(|i| g.add_node(HostValue::empty(), Mark::Grey, i == 0).expect("fresh node")).collect();
    let acyclic = rng.gen_bool(0.4);
    let m = rng.gen_range(0..=max_m.min(2 * n));
    for _ in 0..m {
        let (s, t) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if s == t || (acyclic && s > t) {
            continue;
        }
        let w = rng.gen_range(-10..=10);
        g.add_edge(v[s], v[t], HostValue::int(w), Mark::None).expect("endpoints exist");
    }
}

/// The hand-picked example inputs for `name`.
pub fn fixed_inputs(name: &str) -> Vec<HostGraph> {
    let gen = |k, n| generate(&GraphClass::new(k, n)).expect("valid class");
    let h = |t: &str| parse_host_graph(t).expect("fixed input parses");
    match name {
        "is-connected" | "is-connected-old" => vec![
            HostGraph::new(),
            h("[ (1, empty # grey) (2, empty # grey) | ]"),
            gen(Kind::Star, 8),
            gen(Kind::Grid, 9),
        ],
        "is-dag" => vec![
            h("[ (1, empty # grey) | (e, 1, 1, empty) ]"),
            h("[ (1, 0 # grey) (2, 0 # grey) (3, 0 # grey) (4, 0 # grey) | \
               (a, 4, 1, 0) (b, 1, 2, 0) (c, 2, 3, 0) (d, 3, 1, 0) ]"),
            gen(Kind::Star, 8),
            gen(Kind::Discrete, 5),
            gen(Kind::BinaryTree, 7),
        ],
        "bellman-ford" => vec![
            h("[ (a(R), empty # grey) (b, empty # grey) | (e, a, b, 5) ]"),
            generate(&GraphClass::new(Kind::Cycle, 4).rooted().weights(Weights::Alternating)).expect("valid class"),
            h("[ (1(R), empty # grey) (2, empty # grey) (3, empty # grey) (4, empty # grey) | \
               (a, 1, 2, 3) (b, 3, 2, -4) ]"),
        ],
        "is-discrete" => vec![h("[ (1, 0) (2, 0) (3, 0) | ]"), h("[ (1, 0) (2, 0) | (e, 1, 2, 0) ]")],
        "transitive-closure" => vec![gen(Kind::List, 3), gen(Kind::Cycle, 4)],
        _ => Vec::new(),
    }
}

/// Invariant monitors that apply to `name`.
pub fn default_monitors(name: &str) -> Vec<Box<dyn Monitor>> {
    match name {
        "is-connected" => vec![Box::new(DashedPath), Box::new(RedEdgeBound(1))],
        "is-dag" => vec![Box::new(RootBound(1)), Box::new(RedEdgeBound(1))],
        _ => Vec::new(),
    }
}
