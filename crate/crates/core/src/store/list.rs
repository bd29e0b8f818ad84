//! Intrusive doubly-linked lists over slot vectors, linked by `u32` index.

pub(crate) const NIL: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Link {
    pub prev: u32,
    pub next: u32,
}

impl Default for Link {
    fn default() -> Self {
        Link { prev: NIL, next: NIL }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct List {
    pub head: u32,
    pub tail: u32,
}

impl Default for List {
    fn default() -> Self {
        List { head: NIL, tail: NIL }
    }
}

impl List {
    pub fn is_empty(&self) -> bool {
        self.head == NIL
    }
}

pub(crate) type LinkOf<T> = fn(&mut T) -> &mut Link;

pub(crate) fn push_back<T>(list: &mut List, slots: &mut [T], link: LinkOf<T>, i: u32) {
    insert_after(list, slots, link, i, list.tail);
}

/// Insert `i` directly after `prev`, or at the head when `prev` is `NIL`.
pub(crate) fn insert_after<T>(list: &mut List, slots: &mut [T], link: LinkOf<T>, i: u32, prev: u32) {
    let next = if prev == NIL { list.head } else { link(&mut slots[prev as usize]).next };
    {
        let l = link(&mut slots[i as usize]);
        l.prev = prev;
        l.next = next;
    }
    if prev == NIL {
        list.head = i;
    } else {
        link(&mut slots[prev as usize]).next = i;
    }
    if next == NIL {
        list.tail = i;
    } else {
        link(&mut slots[next as usize]).prev = i;
    }
}

/// Remove `i`, returning its former predecessor.
pub(crate) fn unlink<T>(list: &mut List, slots: &mut [T], link: LinkOf<T>, i: u32) -> u32 {
    let Link { prev, next } = *link(&mut slots[i as usize]);
    if prev == NIL {
        list.head = next;
    } else {
        link(&mut slots[prev as usize]).next = next;
    }
    if next == NIL {
        list.tail = prev;
    } else {
        link(&mut slots[next as usize]).prev = prev;
    }
    *link(&mut slots[i as usize]) = Link::default();
    prev
}
