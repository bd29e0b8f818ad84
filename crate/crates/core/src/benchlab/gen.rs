//! Deterministic graph-class generators.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::labels::HostValue;
use crate::mark::Mark;
use crate::store::{HostGraph, NodeId};

/// Name of the generator behind `Weights::Uniform`, recorded in manifests.
pub const RNG_ALGORITHM: &str = "ChaCha8 (rand_chacha), seed_from_u64";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kind {
    List,
    Cycle,
    Grid,
    BinaryTree,
    Star,
    Complete,
    Discrete,
}

impl Kind {
    pub const ALL: [Kind; 7] =
        [Kind::List, Kind::Cycle, Kind::Grid, Kind::BinaryTree, Kind::Star, Kind::Complete, Kind::Discrete];

    pub fn name(self) -> &'static str {
        match self {
            Kind::List => "list",
            Kind::Cycle => "cycle",
            Kind::Grid => "grid",
            Kind::BinaryTree => "tree",
            Kind::Star => "star",
            Kind::Complete => "complete",
            Kind::Discrete => "discrete",
        }
    }

    /// Node count for size parameter `p`, or `None` when `p` is invalid.
    pub fn nodes_for(self, p: usize) -> Option<usize> {
        match self {
            Kind::Star => Some(p + 1),
            Kind::Grid => {
                let k = isqrt(p);
                (k * k == p).then_some(p)
            }
            _ => Some(p),
        }
    }
}

impl FromStr for Kind {
    type Err = GenError;
    fn from_str(s: &str) -> Result<Self, GenError> {
        Ok(match s {
            "list" => Kind::List,
            "cycle" => Kind::Cycle,
            "grid" => Kind::Grid,
            "tree" | "binary-tree" | "binaryTree" => Kind::BinaryTree,
            "star" => Kind::Star,
            "complete" => Kind::Complete,
            "discrete" => Kind::Discrete,
            _ => return Err(GenError::UnknownKind(s.to_string())),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Weights {
    None,
    /// Inclusive on both ends.
    Uniform { lo: i64, hi: i64, seed: u64 },
    /// -2, 1, -2, 1, ... in edge creation order.
    Alternating,
}

impl FromStr for Weights {
    type Err = GenError;
    /// `none`, `alternating`, or `uniform:LO:HI[:seedN]`.
    fn from_str(s: &str) -> Result<Self, GenError> {
        let bad = || GenError::BadWeights(s.to_string());
        match s {
            "none" => return Ok(Weights::None),
            "alternating" => return Ok(Weights::Alternating),
            _ => {}
        }
        let mut parts = s.split(':');
        if parts.next() != Some("uniform") {
            return Err(bad());
        }
        let lo: i64 = parts.next().and_then(|x| x.parse().ok()).ok_or_else(bad)?;
        let hi: i64 = parts.next().and_then(|x| x.parse().ok()).ok_or_else(bad)?;
        let seed = match parts.next() {
            None => 0,
            Some(x) => x.strip_prefix("seed").unwrap_or(x).parse().map_err(|_| bad())?,
        };
        if parts.next().is_some() || lo > hi {
            return Err(bad());
        }
        Ok(Weights::Uniform { lo, hi, seed })
    }
}

impl fmt::Display for Weights {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Weights::None => f.write_str("none"),
            Weights::Uniform { lo, hi, seed } => write!(f, "uniform:{lo}:{hi}:seed{seed}"),
            Weights::Alternating => f.write_str("alternating"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum GenError {
    #[error("unknown graph class `{0}`")]
    UnknownKind(String),
    #[error("bad weight spec `{0}` (expected none, alternating or uniform:LO:HI[:seedN])")]
    BadWeights(String),
    #[error("grid size must be a perfect square, got {0}")]
    NotSquare(usize),
    #[error("rooted {kind} needs at least {min} nodes")]
    RootedTooSmall { kind: &'static str, min: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GraphClass {
    pub kind: Kind,
    /// Node count, except for stars where it is the edge count.
    pub size: usize,
    pub rooted: bool,
    pub weights: Weights,
    pub node_mark: Mark,
}

impl GraphClass {
    pub fn new(kind: Kind, size: usize) -> Self {
        GraphClass { kind, size, rooted: false, weights: Weights::None, node_mark: Mark::Grey }
    }

    pub fn rooted(mut self) -> Self {
        self.rooted = true;
        self
    }

    pub fn weights(mut self, w: Weights) -> Self {
        self.weights = w;
        self
    }

    pub fn node_mark(mut self, m: Mark) -> Self {
        self.node_mark = m;
        self
    }

    /// `rooted-complete`, `star`, ...
    pub fn parse(name: &str, size: usize) -> Result<Self, GenError> {
        match name.strip_prefix("rooted-") {
            Some(k) => Ok(GraphClass::new(k.parse()?, size).rooted()),
            None => Ok(GraphClass::new(name.parse()?, size)),
        }
    }

    pub fn label(&self) -> String {
        if self.rooted {
            format!("rooted-{}", self.kind.name())
        } else {
            self.kind.name().to_string()
        }
    }

    /// (n, m) of the generated graph.
    pub fn shape(&self) -> Result<(usize, usize), GenError> {
        let n = self.kind.nodes_for(self.size).ok_or(GenError::NotSquare(self.size))?;
        let m = match self.kind {
            Kind::List => n.saturating_sub(1),
            Kind::Cycle => n,
            Kind::Grid => {
                let k = isqrt(n);
                2 * k * k.saturating_sub(1)
            }
            Kind::BinaryTree => n.saturating_sub(1),
            Kind::Star => self.size,
            Kind::Complete if self.rooted => n * n.saturating_sub(1),
            Kind::Complete => n * n,
            Kind::Discrete => 0,
        };
        Ok((n, m))
    }
}

fn isqrt(p: usize) -> usize {
    let mut k = (p as f64).sqrt() as usize;
    while k * k > p {
        k -= 1;
    }
    while (k + 1) * (k + 1) <= p {
        k += 1;
    }
    k
}

pub fn generate(class: &GraphClass) -> Result<HostGraph, GenError> {
    let mut g = HostGraph::new();
    generate_into(class, &mut g)?;
    Ok(g)
}

/// Adds the class's nodes and edges to `g` (normally empty, possibly in
/// legacy mode).
pub fn generate_into(class: &GraphClass, g: &mut HostGraph) -> Result<(), GenError> {
    let (n, _) = class.shape()?;
    // Rooted classes are bellman-ford inputs, which exclude loops.
    let min = if class.kind == Kind::Cycle { 2 } else { 1 };
    if class.rooted && n < min {
        return Err(GenError::RootedTooSmall { kind: class.kind.name(), min });
    }
    let pairs = edge_pairs(class.kind, class.size, n, !class.rooted);
    let weights = weights_for(class, &pairs);
    let v: Vec<NodeId> = (0..n)
        .map(|i| g.add_node(HostValue::empty(), class.node_mark, class.rooted && i == 0).expect("fresh node"))
        .collect();
    for (i, &(s, t)) in pairs.iter().enumerate() {
        let label = weights.as_ref().map_or_else(HostValue::empty, |w| HostValue::int(w[i]));
        g.add_edge(v[s], v[t], label, Mark::None).expect("endpoints exist");
    }
    Ok(())
}

fn edge_pairs(kind: Kind, size: usize, n: usize, loops: bool) -> Vec<(usize, usize)> {
    let mut e = Vec::new();
    match kind {
        Kind::List => e.extend((1..n).map(|i| (i - 1, i))),
        Kind::Cycle => {
            e.extend((1..n).map(|i| (i - 1, i)));
            if n > 0 {
                e.push((n - 1, 0));
            }
        }
        Kind::Grid => {
            let k = isqrt(n);
            for r in 0..k {
                for c in 0..k {
                    let i = r * k + c;
                    if c + 1 < k {
                        e.push((i, i + 1));
                    }
                    if r + 1 < k {
                        e.push((i, i + k));
                    }
                }
            }
        }
        Kind::BinaryTree => e.extend((1..n).map(|i| ((i - 1) / 2, i))),
        // Spokes alternate between outgoing and incoming.
        Kind::Star => e.extend((1..=size).map(|i| if i % 2 == 0 { (0, i) } else { (i, 0) })),
        Kind::Complete => {
            for s in 0..n {
                for t in 0..n {
                    if s != t || loops {
                        e.push((s, t));
                    }
                }
            }
        }
        Kind::Discrete => {}
    }
    e
}

fn weights_for(class: &GraphClass, pairs: &[(usize, usize)]) -> Option<Vec<i64>> {
    match class.weights {
        Weights::None => None,
        Weights::Alternating => Some((0..pairs.len()).map(|i| if i % 2 == 0 { -2 } else { 1 }).collect()),
        Weights::Uniform { lo, hi, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            loop {
                let w: Vec<i64> = (0..pairs.len()).map(|_| rng.gen_range(lo..=hi)).collect();
                // Random cycles are kept free of negative cycles.
                if class.kind != Kind::Cycle || w.iter().sum::<i64>() >= 0 || lo >= 0 || hi < 0 {
                    return Some(w);
                }
            }
        }
    }
}
