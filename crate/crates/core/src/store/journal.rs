//! Undo log with nested frames.
//!
//! Entries are only recorded while at least one frame is open. Committing
//! the outermost frame discards the log; committing an inner frame folds its
//! entries into the enclosing one.

use crate::labels::HostValue;
use crate::mark::Mark;

#[derive(Clone, Debug)]
pub(crate) enum Undo {
    AddNode {
        index: u32,
        fresh: bool,
    },
    AddEdge {
        index: u32,
        fresh: bool,
    },
    DeleteNode {
        index: u32,
        generation: u32,
        label: HostValue,
        mark: Mark,
        rooted: bool,
        bucket_prev: u32,
        root_prev: u32,
    },
    DeleteEdge {
        index: u32,
        generation: u32,
        label: HostValue,
        mark: Mark,
        source: u32,
        target: u32,
        src_prev: u32,
        tgt_prev: u32,
    },
    NodeLabel {
        index: u32,
        label: HostValue,
    },
    NodeMark {
        index: u32,
        mark: Mark,
        bucket_prev: u32,
    },
    NodeRoot {
        index: u32,
        rooted: bool,
        root_prev: u32,
    },
    EdgeLabel {
        index: u32,
        label: HostValue,
    },
    EdgeMark {
        index: u32,
        mark: Mark,
        src_prev: u32,
        tgt_prev: u32,
    },
}

#[derive(Clone, Debug, Default)]
pub(crate) struct Journal {
    pub log: Vec<Undo>,
    pub frames: Vec<usize>,
}

impl Journal {
    #[inline]
    pub fn recording(&self) -> bool {
        !self.frames.is_empty()
    }

    pub fn begin(&mut self) {
        self.frames.push(self.log.len());
    }

    pub fn commit(&mut self) {
        self.frames.pop().expect("commit without an open frame");
        if self.frames.is_empty() {
            self.log.clear();
        }
    }

    /// Pop the innermost frame, returning the log position it started at.
    pub fn close_for_rollback(&mut self) -> usize {
        self.frames.pop().expect("rollback without an open frame")
    }
}
