//! Munn trees: the word problem of the free inverse monoid.

use alloc::collections::BTreeSet;

use crate::word::Word;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MunnTree {
    /// Reduced words naming the vertices of the Cayley-tree subtree.
    pub vertices: BTreeSet<Word>,
    pub endpoint: Word,
}

pub fn munn_tree(w: &Word) -> MunnTree {
    let mut vertices = BTreeSet::new();
    let mut cur = Word::empty();
    vertices.insert(cur.clone());
    for &l in w.iter() {
        if cur.last() == Some(&l.inverse()) {
            cur = cur.slice(0, cur.len() - 1);
        } else {
            cur.push(l);
        }
        vertices.insert(cur.clone());
    }
    MunnTree {
        vertices,
        endpoint: cur,
    }
}

/// Equality in the free inverse monoid.
pub fn fim_equal(u: &Word, v: &Word) -> bool {
    munn_tree(u) == munn_tree(v)
}
