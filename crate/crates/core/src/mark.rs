//! Item marks.
//!
//! Nodes may be grey, edges may be dashed; red, green and blue are shared.
//! `Any` is a rule-side wildcard and never appears in a host graph.

use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mark {
    None,
    Red,
    Green,
    Blue,
    Grey,
    Dashed,
    Any,
}

/// Which kind of item a mark is attached to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ItemKind {
    Node,
    Edge,
}

impl Mark {
    /// Concrete node marks matched by `any`, in candidate order.
    pub const ANY_NODE_MARKS: [Mark; 4] = [Mark::Red, Mark::Green, Mark::Blue, Mark::Grey];
    /// Concrete edge marks matched by `any`, in candidate order.
    pub const ANY_EDGE_MARKS: [Mark; 4] = [Mark::Red, Mark::Green, Mark::Blue, Mark::Dashed];

    pub fn is_any(self) -> bool {
        self == Mark::Any
    }

    /// Legal on a host-graph node.
    pub fn is_host_node_mark(self) -> bool {
        !matches!(self, Mark::Dashed | Mark::Any)
    }

    /// Legal on a host-graph edge.
    pub fn is_host_edge_mark(self) -> bool {
        !matches!(self, Mark::Grey | Mark::Any)
    }

    pub fn is_legal_host(self, kind: ItemKind) -> bool {
        match kind {
            ItemKind::Node => self.is_host_node_mark(),
            ItemKind::Edge => self.is_host_edge_mark(),
        }
    }

    /// Legal inside a rule graph (host marks plus `any`).
    pub fn is_legal_rule(self, kind: ItemKind) -> bool {
        self == Mark::Any || self.is_legal_host(kind)
    }

    /// Whether a host item with mark `host` is compatible with rule mark `self`.
    /// `any` matches every concrete mark but not the unmarked state.
    pub fn matches(self, host: Mark) -> bool {
        match self {
            Mark::Any => host != Mark::None,
            m => m == host,
        }
    }

    /// Row of the node bucket array: none, grey, red, green, blue.
    pub(crate) fn node_bucket(self) -> usize {
        match self {
            Mark::None => 0,
            Mark::Grey => 1,
            Mark::Red => 2,
            Mark::Green => 3,
            Mark::Blue => 4,
            Mark::Dashed | Mark::Any => unreachable!("no node bucket for {self}"),
        }
    }

    /// Row of the per-node edge array: none, dashed, red, green, blue.
    pub(crate) fn edge_row(self) -> usize {
        match self {
            Mark::None => 0,
            Mark::Dashed => 1,
            Mark::Red => 2,
            Mark::Green => 3,
            Mark::Blue => 4,
            Mark::Grey | Mark::Any => unreachable!("no edge row for {self}"),
        }
    }

    pub fn keyword(self) -> &'static str {
        match self {
            Mark::None => "none",
            Mark::Red => "red",
            Mark::Green => "green",
            Mark::Blue => "blue",
            Mark::Grey => "grey",
            Mark::Dashed => "dashed",
            Mark::Any => "any",
        }
    }
}

impl fmt::Display for Mark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown mark `{0}`")]
pub struct UnknownMark(pub String);

impl FromStr for Mark {
    type Err = UnknownMark;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "none" => Mark::None,
            "red" => Mark::Red,
            "green" => Mark::Green,
            "blue" => Mark::Blue,
            "grey" => Mark::Grey,
            "dashed" => Mark::Dashed,
            "any" => Mark::Any,
            other => return Err(UnknownMark(other.to_string())),
        })
    }
}
