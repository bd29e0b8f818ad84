//! A runtime for rooted graph programs.
//!
//! Host graphs are stored with per-mark node buckets and per-node edge cells
//! indexed by mark and orientation, so that rooted rules match in constant
//! time. Programs are written in a small rule-and-command language and run
//! by an interpreter with journal-based rollback.

pub mod benchlab;
pub mod frontend;
pub mod interp;
pub mod labels;
pub mod mark;
pub mod rules;
pub mod specimens;
pub mod store;

pub use labels::{Atom, HostValue};
pub use mark::Mark;
pub use store::{EdgeId, HostGraph, NodeId, Orientation, StoreError};
pub use frontend::{parse_host_graph, parse_program, print_host_graph, ParseError};
pub use interp::{run, Limits, Outcome, Program, RunStats};
pub use rules::{Rule, RuleStats};
