//! Host label values: finite sequences of integer and string atoms.

use std::fmt;
use std::sync::Arc;

use smallvec::SmallVec;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    Int(i64),
    Str(Arc<str>),
}

impl Atom {
    pub fn str(s: &str) -> Atom {
        Atom::Str(Arc::from(s))
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Atom::Int(i) => Some(*i),
            Atom::Str(_) => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Atom::Str(s) => Some(s),
            Atom::Int(_) => None,
        }
    }
}

impl From<i64> for Atom {
    fn from(i: i64) -> Self {
        Atom::Int(i)
    }
}

impl From<&str> for Atom {
    fn from(s: &str) -> Self {
        Atom::str(s)
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Int(i) => write!(f, "{i}"),
            Atom::Str(s) => write!(f, "\"{s}\""),
        }
    }
}

/// Whether `s` may appear inside a string atom (printable ASCII, no quote).
pub fn is_valid_string(s: &str) -> bool {
    s.bytes().all(|b| (b' '..=b'~').contains(&b) && b != b'"')
}

/// A host list. The empty sequence is `empty`; a one-element sequence is
/// the same value as its atom.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HostValue(SmallVec<[Atom; 2]>);

impl HostValue {
    pub fn empty() -> Self {
        HostValue(SmallVec::new())
    }

    pub fn int(i: i64) -> Self {
        HostValue(smallvec::smallvec![Atom::Int(i)])
    }

    pub fn string(s: &str) -> Self {
        HostValue(smallvec::smallvec![Atom::str(s)])
    }

    pub fn atom(a: Atom) -> Self {
        HostValue(smallvec::smallvec![a])
    }

    pub fn from_atoms<I: IntoIterator<Item = Atom>>(atoms: I) -> Self {
        HostValue(atoms.into_iter().collect())
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, a: Atom) {
        self.0.push(a);
    }

    pub fn extend_from(&mut self, other: &HostValue) {
        self.0.extend(other.0.iter().cloned());
    }

    /// The single atom, if the list has length one.
    pub fn single(&self) -> Option<&Atom> {
        match self.0.as_slice() {
            [a] => Some(a),
            _ => None,
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        self.single().and_then(Atom::as_int)
    }

    pub fn as_str(&self) -> Option<&str> {
        self.single().and_then(Atom::as_str)
    }

    pub fn last(&self) -> Option<&Atom> {
        self.0.last()
    }
}

impl From<Atom> for HostValue {
    fn from(a: Atom) -> Self {
        HostValue::atom(a)
    }
}

impl From<i64> for HostValue {
    fn from(i: i64) -> Self {
        HostValue::int(i)
    }
}

impl fmt::Display for HostValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("empty");
        }
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(":")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}
