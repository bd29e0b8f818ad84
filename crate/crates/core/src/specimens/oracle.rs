//! Reference algorithms over plain adjacency data, independent of the
//! rule engine.

use std::collections::VecDeque;

use crate::store::HostGraph;

/// Dense renumbering of a host graph: nodes `0..n` in slot order and edges
/// as `(source, target)` pairs.
pub struct Plain {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

impl Plain {
    pub fn of(g: &HostGraph) -> Plain {
        let mut dense = vec![usize::MAX; g.nodes().map(|v| v.index() + 1).max().unwrap_or(0)];
        for (i, v) in g.nodes().enumerate() {
            dense[v.index()] = i;
        }
        let edges = g.edges().map(|e| (dense[g.source(e).index()], dense[g.target(e).index()])).collect();
        Plain { n: g.node_count(), edges }
    }
}

struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), rank: vec![0; n] }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (a, b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        match self.rank[a].cmp(&self.rank[b]) {
            std::cmp::Ordering::Less => self.parent[a] = b,
            std::cmp::Ordering::Greater => self.parent[b] = a,
            std::cmp::Ordering::Equal => {
                self.parent[b] = a;
                self.rank[a] += 1;
            }
        }
        true
    }
}

/// Weak connectivity. The empty graph counts as connected.
pub fn connected(g: &HostGraph) -> bool {
    let p = Plain::of(g);
    let mut uf = UnionFind::new(p.n);
    let mut components = p.n;
    for &(s, t) in &p.edges {
        if uf.union(s, t) {
            components -= 1;
        }
    }
    components <= 1
}

/// No directed cycle; a loop is a cycle.
pub fn acyclic(g: &HostGraph) -> bool {
    let p = Plain::of(g);
    let mut indeg = vec![0usize; p.n];
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); p.n];
    for &(s, t) in &p.edges {
        indeg[t] += 1;
        out[s].push(t);
    }
    let mut queue: VecDeque<usize> = (0..p.n).filter(|&v| indeg[v] == 0).collect();
    let mut peeled = 0;
    while let Some(v) = queue.pop_front() {
        peeled += 1;
        for &t in &out[v] {
            indeg[t] -= 1;
            if indeg[t] == 0 {
                queue.push_back(t);
            }
        }
    }
    peeled == p.n
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShortestPaths {
    /// Per node in slot order; `None` when unreachable from the source.
    pub dist: Vec<Option<i64>>,
    pub negative_cycle_reachable: bool,
}

/// Textbook Bellman-Ford: `n - 1` rounds over every edge, then one
/// detection round. `weights` is parallel to `Plain::edges`.
pub fn bellman_ford(p: &Plain, weights: &[i64], source: usize) -> ShortestPaths {
    let mut dist: Vec<Option<i64>> = vec![None; p.n];
    dist[source] = Some(0);
    for _ in 1..p.n {
        let mut changed = false;
        for (&(s, t), &w) in p.edges.iter().zip(weights) {
            if let Some(ds) = dist[s] {
                let cand = ds + w;
                if dist[t].is_none_or(|dt| cand < dt) {
                    dist[t] = Some(cand);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let negative_cycle_reachable = p
        .edges
        .iter()
        .zip(weights)
        .any(|(&(s, t), &w)| matches!((dist[s], dist[t]), (Some(ds), Some(dt)) if ds + w < dt));
    ShortestPaths { dist, negative_cycle_reachable }
}

/// `reach[u][v]`: a non-empty directed path leads from `u` to `v`.
pub fn reachability(p: &Plain) -> Vec<Vec<bool>> {
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); p.n];
    for &(s, t) in &p.edges {
        out[s].push(t);
    }
    (0..p.n)
        .map(|u| {
            let mut seen = vec![false; p.n];
            let mut stack: Vec<usize> = out[u].clone();
            while let Some(v) = stack.pop() {
                if !seen[v] {
                    seen[v] = true;
                    stack.extend(&out[v]);
                }
            }
            seen
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse_host_graph;

    fn g(text: &str) -> HostGraph {
        parse_host_graph(text).unwrap()
    }

    #[test]
    fn connectivity() {
        assert!(connected(&HostGraph::new()));
        let star = "[ (c, 0 # grey) (1, 0 # grey) (2, 0 # grey) (3, 0 # grey) (4, 0 # grey) (5, 0 # grey) \
                    (6, 0 # grey) (7, 0 # grey) (8, 0 # grey) | (a, c, 1, 0) (b, 2, c, 0) (d, c, 3, 0) \
                    (e, 4, c, 0) (f, c, 5, 0) (h, 6, c, 0) (i, c, 7, 0) (j, 8, c, 0) ]";
        assert!(connected(&g(star)));
        assert!(!connected(&g("[ (1, 0 # grey) (2, 0 # grey) | ]")));
    }

    #[test]
    fn acyclicity() {
        assert!(!acyclic(&g("[ (1, 0) | (e, 1, 1, 0) ]")));
        let tree = "[ (1, 0) (2, 0) (3, 0) (4, 0) (5, 0) (6, 0) (7, 0) | \
                    (a, 1, 2, 0) (b, 1, 3, 0) (c, 2, 4, 0) (d, 2, 5, 0) (e, 3, 6, 0) (f, 3, 7, 0) ]";
        assert!(acyclic(&g(tree)));
        let tail = "[ (1, 0) (2, 0) (3, 0) (4, 0) | (a, 4, 1, 0) (b, 1, 2, 0) (c, 2, 3, 0) (d, 3, 1, 0) ]";
        assert!(!acyclic(&g(tail)));
    }

    #[test]
    fn shortest_paths() {
        let p = Plain { n: 2, edges: vec![(0, 1)] };
        let r = bellman_ford(&p, &[5], 0);
        assert_eq!(r.dist, vec![Some(0), Some(5)]);
        assert!(!r.negative_cycle_reachable);

        let p = Plain { n: 4, edges: vec![(0, 1), (1, 2), (2, 3), (3, 0)] };
        assert!(bellman_ford(&p, &[-2, 1, -2, 1], 0).negative_cycle_reachable);

        let p = Plain { n: 3, edges: vec![(0, 1)] };
        assert_eq!(bellman_ford(&p, &[7], 0).dist[2], None);

        // A negative cycle the source cannot reach is irrelevant.
        let p = Plain { n: 3, edges: vec![(1, 2), (2, 1)] };
        assert!(!bellman_ford(&p, &[-5, 1], 0).negative_cycle_reachable);
    }

    #[test]
    fn reach() {
        let p = Plain { n: 3, edges: vec![(0, 1), (1, 2)] };
        let r = reachability(&p);
        assert!(r[0][2] && r[0][1] && r[1][2]);
        assert!(!r[2][0] && !r[0][0]);
    }
}
