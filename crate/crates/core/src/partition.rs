//! Equivalence relations on `0..n` in canonical least-element form.

use std::collections::BTreeSet;

use serde::ser::{Serialize, Serializer};

use crate::error::{Error, Result};

/// An equivalence relation on `0..n`. Each element stores the least element
/// of its block, so equal relations are structurally equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    ids: Vec<usize>,
}

impl Partition {
    /// The identity relation 0_A.
    pub fn bottom(n: usize) -> Self {
        Partition {
            ids: (0..n).collect(),
        }
    }

    /// The full relation 1_A.
    pub fn top(n: usize) -> Self {
        Partition { ids: vec![0; n] }
    }

    /// Builds from a list of blocks that must be disjoint and cover `0..n`.
    pub fn from_blocks(n: usize, blocks: &[Vec<usize>]) -> Result<Self> {
        let mut ids = vec![usize::MAX; n];
        for block in blocks {
            let least = *block
                .iter()
                .min()
                .ok_or_else(|| Error::InvalidArgument("empty block".into()))?;
            for &x in block {
                if x >= n {
                    return Err(Error::OutOfRange {
                        element: x,
                        size: n,
                    });
                }
                if ids[x] != usize::MAX {
                    return Err(Error::InvalidArgument(format!(
                        "element {x} appears in two blocks"
                    )));
                }
                ids[x] = least;
            }
        }
        if let Some(x) = ids.iter().position(|&i| i == usize::MAX) {
            return Err(Error::InvalidArgument(format!(
                "element {x} is in no block"
            )));
        }
        Ok(Partition { ids })
    }

    /// Builds from a binary relation, which must be an equivalence relation.
    pub fn from_relation(n: usize, related: impl Fn(usize, usize) -> bool) -> Result<Self> {
        let mut ids = vec![0; n];
        for (x, id) in ids.iter_mut().enumerate() {
            *id = (0..=x).find(|&y| related(x, y)).unwrap_or(x);
        }
        let p = Partition { ids };
        for x in 0..n {
            for y in 0..n {
                if related(x, y) != p.related(x, y) {
                    return Err(Error::InvalidArgument(format!(
                        "relation is not an equivalence (pair ({x},{y}))"
                    )));
                }
            }
        }
        Ok(p)
    }

    /// Builds from arbitrary labels: elements with equal labels share a block.
    pub fn from_labels<T: Eq + std::hash::Hash>(labels: &[T]) -> Self {
        let mut first = std::collections::HashMap::new();
        let ids = labels
            .iter()
            .enumerate()
            .map(|(i, l)| *first.entry(l).or_insert(i))
            .collect();
        Partition { ids }
    }

    pub(crate) fn from_union_find(uf: &mut UnionFind) -> Self {
        let n = uf.len();
        let mut least = vec![usize::MAX; n];
        let mut ids = vec![0; n];
        for (x, id) in ids.iter_mut().enumerate() {
            let r = uf.find(x);
            if least[r] == usize::MAX {
                least[r] = x;
            }
            *id = least[r];
        }
        Partition { ids }
    }

    pub fn size(&self) -> usize {
        self.ids.len()
    }

    /// Least element of the block containing `x`.
    #[inline]
    pub fn rep(&self, x: usize) -> usize {
        self.ids[x]
    }

    pub fn ids(&self) -> &[usize] {
        &self.ids
    }

    #[inline]
    pub fn related(&self, a: usize, b: usize) -> bool {
        self.ids[a] == self.ids[b]
    }

    /// Blocks sorted by least element, each block sorted.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut index = vec![usize::MAX; self.size()];
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for x in 0..self.size() {
            let r = self.ids[x];
            if index[r] == usize::MAX {
                index[r] = blocks.len();
                blocks.push(Vec::new());
            }
            blocks[index[r]].push(x);
        }
        blocks
    }

    /// Block number of each element, blocks numbered by least element.
    pub fn block_indices(&self) -> Vec<usize> {
        let mut index = vec![usize::MAX; self.size()];
        let mut next = 0;
        (0..self.size())
            .map(|x| {
                let r = self.ids[x];
                if index[r] == usize::MAX {
                    index[r] = next;
                    next += 1;
                }
                index[r]
            })
            .collect()
    }

    pub fn num_blocks(&self) -> usize {
        self.ids
            .iter()
            .enumerate()
            .filter(|&(x, &r)| x == r)
            .count()
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks().iter().map(Vec::len).collect()
    }

    pub fn is_bottom(&self) -> bool {
        self.ids.iter().enumerate().all(|(x, &r)| x == r)
    }

    pub fn is_top(&self) -> bool {
        self.ids.iter().all(|&r| r == 0)
    }

    /// Pairs (a, b) with a != b in the relation, in rank order.
    pub fn nontrivial_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.size();
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if a != b && self.related(a, b) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// Containment as relations.
    pub fn leq(&self, other: &Partition) -> bool {
        self.size() == other.size() && (0..self.size()).all(|x| other.related(x, self.ids[x]))
    }

    fn check_size(&self, other: &Partition) -> Result<()> {
        if self.size() != other.size() {
            return Err(Error::SizeMismatch(self.size(), other.size()));
        }
        Ok(())
    }

    /// Intersection.
    pub fn meet(&self, other: &Partition) -> Result<Partition> {
        self.check_size(other)?;
        let labels: Vec<(usize, usize)> = (0..self.size())
            .map(|x| (self.ids[x], other.ids[x]))
            .collect();
        Ok(Partition::from_labels(&labels))
    }

    /// Join as equivalence relations (transitive closure of the union).
    pub fn join(&self, other: &Partition) -> Result<Partition> {
        self.check_size(other)?;
        let mut uf = UnionFind::new(self.size());
        for x in 0..self.size() {
            uf.union(x, self.ids[x]);
            uf.union(x, other.ids[x]);
        }
        Ok(Partition::from_union_find(&mut uf))
    }

    /// Relational composition `self ∘ other`: pairs (a, b) with a self c and c other b.
    pub fn compose(&self, other: &Partition) -> Result<BTreeSet<(usize, usize)>> {
        self.check_size(other)?;
        let n = self.size();
        let mut out = BTreeSet::new();
        for a in 0..n {
            for c in (0..n).filter(|&c| self.related(a, c)) {
                for b in (0..n).filter(|&b| other.related(c, b)) {
                    out.insert((a, b));
                }
            }
        }
        Ok(out)
    }

    /// `self ∘ other == other ∘ self`.
    pub fn permutes_with(&self, other: &Partition) -> Result<bool> {
        Ok(self.compose(other)? == other.compose(self)?)
    }
}

impl Serialize for Partition {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.blocks().serialize(s)
    }
}

/// Union-find with path halving and union by size.
#[derive(Clone, Debug)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Merges the classes of `a` and `b`; returns true if they were distinct.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (big, small) = if self.size[ra] >= self.size[rb] {
            (ra, rb)
        } else {
            (rb, ra)
        };
        self.parent[small] = big;
        self.size[big] += self.size[small];
        true
    }
}
