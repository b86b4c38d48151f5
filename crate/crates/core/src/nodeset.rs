use smallvec::{smallvec, SmallVec};
use std::fmt;

use crate::error::{Error, Result};

/// Index of a node inside its owning structure.
pub type NodeId = usize;

type Words = SmallVec<[u64; 2]>;

fn word_count(universe: usize) -> usize {
    universe.div_ceil(64)
}

/// A subset of `{0, .., universe-1}` stored as a bitset.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct NodeSet {
    universe: usize,
    words: Words,
}

impl NodeSet {
    pub fn empty(universe: usize) -> Self {
        NodeSet { universe, words: smallvec![0; word_count(universe)] }
    }

    pub fn full(universe: usize) -> Self {
        let mut s = Self::empty(universe);
        for i in 0..universe {
            s.insert(i);
        }
        s
    }

    pub fn singleton(universe: usize, node: NodeId) -> Self {
        let mut s = Self::empty(universe);
        s.insert(node);
        s
    }

    pub fn from_nodes(universe: usize, nodes: impl IntoIterator<Item = NodeId>) -> Self {
        let mut s = Self::empty(universe);
        for n in nodes {
            s.insert(n);
        }
        s
    }

    /// Bit `i` of `mask` is node `i`. Bits at or above `universe` are ignored.
    pub fn from_mask(universe: usize, mask: u128) -> Self {
        let mut s = Self::empty(universe);
        for i in 0..universe.min(128) {
            if mask >> i & 1 == 1 {
                s.insert(i);
            }
        }
        s
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn contains(&self, node: NodeId) -> bool {
        node < self.universe && self.words[node / 64] >> (node % 64) & 1 == 1
    }

    pub fn insert(&mut self, node: NodeId) -> bool {
        assert!(node < self.universe, "node {node} outside universe of {}", self.universe);
        let had = self.contains(node);
        self.words[node / 64] |= 1 << (node % 64);
        !had
    }

    pub fn remove(&mut self, node: NodeId) -> bool {
        let had = self.contains(node);
        if had {
            self.words[node / 64] &= !(1 << (node % 64));
        }
        had
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let bit = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(wi * 64 + bit)
            })
        })
    }

    /// Low 64 nodes as a mask; `None` if the universe is larger.
    pub fn to_mask(&self) -> Option<u64> {
        match self.universe {
            0 => Some(0),
            1..=64 => Some(self.words[0]),
            _ => None,
        }
    }

    pub fn check_universe(&self, universe: usize) -> Result<()> {
        if self.universe == universe {
            Ok(())
        } else {
            Err(Error::UniverseMismatch { expected: universe, found: self.universe })
        }
    }

    fn zip(&self, other: &NodeSet, f: impl Fn(u64, u64) -> u64) -> NodeSet {
        assert_eq!(self.universe, other.universe, "node sets over different universes");
        NodeSet {
            universe: self.universe,
            words: self.words.iter().zip(&other.words).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    pub fn union(&self, other: &NodeSet) -> NodeSet {
        self.zip(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &NodeSet) -> NodeSet {
        self.zip(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &NodeSet) -> NodeSet {
        self.zip(other, |a, b| a & !b)
    }

    pub fn complement(&self) -> NodeSet {
        NodeSet::full(self.universe).difference(self)
    }

    pub fn union_with(&mut self, other: &NodeSet) {
        assert_eq!(self.universe, other.universe, "node sets over different universes");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn is_subset(&self, other: &NodeSet) -> bool {
        self.universe == other.universe
            && self.words.iter().zip(&other.words).all(|(&a, &b)| a & !b == 0)
    }

    pub fn intersects(&self, other: &NodeSet) -> bool {
        self.words.iter().zip(&other.words).any(|(&a, &b)| a & b != 0)
    }
}

impl fmt::Debug for NodeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// A binary relation over `{0, .., universe-1}` with successor and
/// predecessor rows kept in sync.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Relation {
    succ: Vec<NodeSet>,
    pred: Vec<NodeSet>,
}

impl Relation {
    pub fn new(universe: usize) -> Self {
        Relation {
            succ: vec![NodeSet::empty(universe); universe],
            pred: vec![NodeSet::empty(universe); universe],
        }
    }

    pub fn from_pairs(universe: usize, pairs: impl IntoIterator<Item = (NodeId, NodeId)>) -> Self {
        let mut r = Self::new(universe);
        for (a, b) in pairs {
            r.insert(a, b);
        }
        r
    }

    pub fn identity(universe: usize) -> Self {
        Self::from_pairs(universe, (0..universe).map(|i| (i, i)))
    }

    pub fn universe(&self) -> usize {
        self.succ.len()
    }

    pub fn insert(&mut self, a: NodeId, b: NodeId) -> bool {
        self.pred[b].insert(a);
        self.succ[a].insert(b)
    }

    pub fn contains(&self, a: NodeId, b: NodeId) -> bool {
        self.succ.get(a).is_some_and(|s| s.contains(b))
    }

    pub fn successors(&self, a: NodeId) -> &NodeSet {
        &self.succ[a]
    }

    pub fn predecessors(&self, b: NodeId) -> &NodeSet {
        &self.pred[b]
    }

    /// Pairs in lexicographic order.
    pub fn pairs(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.succ.iter().enumerate().flat_map(|(a, s)| s.iter().map(move |b| (a, b)))
    }

    pub fn len(&self) -> usize {
        self.succ.iter().map(NodeSet::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.succ.iter().all(NodeSet::is_empty)
    }

    pub fn converse(&self) -> Relation {
        Relation { succ: self.pred.clone(), pred: self.succ.clone() }
    }

    pub fn is_subset(&self, other: &Relation) -> bool {
        self.universe() == other.universe()
            && self.succ.iter().zip(&other.succ).all(|(a, b)| a.is_subset(b))
    }

    /// `Q[X]`: everything some member of `x` points to.
    pub fn image(&self, x: &NodeSet) -> Result<NodeSet> {
        x.check_universe(self.universe())?;
        let mut out = NodeSet::empty(self.universe());
        for w in x.iter() {
            out.union_with(&self.succ[w]);
        }
        Ok(out)
    }

    /// `<Q>(X)`: everything pointing into `x`.
    pub fn preimage(&self, x: &NodeSet) -> Result<NodeSet> {
        x.check_universe(self.universe())?;
        let mut out = NodeSet::empty(self.universe());
        for s in x.iter() {
            out.union_with(&self.pred[s]);
        }
        Ok(out)
    }

    /// (max out-degree, max in-degree); (0, 0) on the empty universe.
    pub fn max_degrees(&self) -> (usize, usize) {
        let out = self.succ.iter().map(NodeSet::len).max().unwrap_or(0);
        let inn = self.pred.iter().map(NodeSet::len).max().unwrap_or(0);
        (out, inn)
    }
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.pairs()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_ops_across_word_boundary() {
        let a = NodeSet::from_nodes(130, [0, 63, 64, 129]);
        let b = NodeSet::from_nodes(130, [63, 100]);
        assert_eq!(a.len(), 4);
        assert_eq!(a.iter().collect::<Vec<_>>(), vec![0, 63, 64, 129]);
        assert_eq!(a.intersection(&b).iter().collect::<Vec<_>>(), vec![63]);
        assert_eq!(a.union(&b).len(), 5);
        assert_eq!(a.complement().len(), 126);
        assert!(!a.is_subset(&b));
        assert!(a.intersection(&b).is_subset(&b));
        assert_eq!(a.to_mask(), None);
    }

    #[test]
    fn image_and_preimage() {
        let q = Relation::from_pairs(3, [(0, 1), (0, 2), (1, 2)]);
        let img = q.image(&NodeSet::singleton(3, 0)).unwrap();
        assert_eq!(img.iter().collect::<Vec<_>>(), vec![1, 2]);
        let pre = q.preimage(&NodeSet::singleton(3, 2)).unwrap();
        assert_eq!(pre.iter().collect::<Vec<_>>(), vec![0, 1]);
        assert!(q.image(&NodeSet::empty(4)).is_err());
    }
}
