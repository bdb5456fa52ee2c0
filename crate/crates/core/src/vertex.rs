//! Ground sets and vertex subsets.
//!
//! A [`VertexSet`] is a plain bitmask over the indices of a [`GroundSet`].
//! It does not carry a pointer to its ground set; the owning [`Relation`]
//! or [`Graph`] validates that every mask stays below `1 << p`.
//!
//! [`Relation`]: crate::Relation
//! [`Graph`]: crate::Graph

use std::collections::HashMap;
use std::fmt;
use std::ops::{BitAnd, BitOr, Not, Sub};
use std::sync::Arc;

use crate::error::{Error, Result};

/// Largest supported ground set; every subset fits a `u32` mask and every
/// ordered triple code fits a `u64`.
pub const MAX_VERTICES: usize = 16;

/// An ordered list of distinct vertex labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundSet {
    labels: Vec<String>,
    index: HashMap<String, usize>,
}

impl GroundSet {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() || labels.len() > MAX_VERTICES {
            return Err(Error::GroundSetSize {
                got: labels.len(),
                max: MAX_VERTICES,
            });
        }
        let mut index = HashMap::with_capacity(labels.len());
        for (i, label) in labels.iter().enumerate() {
            if !is_valid_label(label) {
                return Err(Error::InvalidLabel(label.clone()));
            }
            if index.insert(label.clone(), i).is_some() {
                return Err(Error::DuplicateLabel(label.clone()));
            }
        }
        Ok(GroundSet { labels, index })
    }

    /// Ground set labelled `a`, `b`, `c`, ...
    pub fn standard(p: usize) -> Result<Self> {
        if p == 0 || p > MAX_VERTICES {
            return Err(Error::GroundSetSize {
                got: p,
                max: MAX_VERTICES,
            });
        }
        GroundSet::new((0..p).map(|i| ((b'a' + i as u8) as char).to_string()))
    }

    pub fn shared(self) -> Arc<Self> {
        Arc::new(self)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, index: usize) -> &str {
        &self.labels[index]
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.index
            .get(label)
            .copied()
            .ok_or_else(|| Error::UnknownVertex(label.to_string()))
    }

    pub fn full(&self) -> VertexSet {
        VertexSet::full(self.len())
    }

    /// Builds a subset from labels.
    pub fn set<'a, I>(&self, labels: I) -> Result<VertexSet>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut bits = 0u32;
        for label in labels {
            bits |= 1 << self.index_of(label)?;
        }
        Ok(VertexSet(bits))
    }

    pub fn contains_set(&self, set: VertexSet) -> bool {
        set.0 & !self.full().0 == 0
    }

    /// Space-separated labels of `set`, in index order.
    pub fn format_set(&self, set: VertexSet) -> String {
        let mut out = String::new();
        for v in set.iter() {
            if !out.is_empty() {
                out.push(' ');
            }
            out.push_str(&self.labels[v]);
        }
        out
    }
}

fn is_valid_label(label: &str) -> bool {
    !label.is_empty()
        && !label
            .chars()
            .any(|c| c.is_whitespace() || c == ';' || c == '#' || c == ':')
}

/// A subset of a ground set, encoded as a bitmask over vertex indices.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexSet(pub(crate) u32);

impl VertexSet {
    pub const EMPTY: VertexSet = VertexSet(0);

    pub const fn from_bits(bits: u32) -> Self {
        VertexSet(bits)
    }

    pub const fn bits(self) -> u32 {
        self.0
    }

    pub fn singleton(v: usize) -> Self {
        debug_assert!(v < MAX_VERTICES);
        VertexSet(1 << v)
    }

    pub fn full(p: usize) -> Self {
        VertexSet(((1u64 << p) - 1) as u32)
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        VertexSet(indices.into_iter().fold(0, |acc, v| acc | (1 << v)))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_singleton(self) -> bool {
        self.0.is_power_of_two()
    }

    pub fn contains(self, v: usize) -> bool {
        self.0 >> v & 1 == 1
    }

    pub fn is_disjoint(self, other: VertexSet) -> bool {
        self.0 & other.0 == 0
    }

    pub fn is_subset(self, other: VertexSet) -> bool {
        self.0 & !other.0 == 0
    }

    /// Complement within a ground set of size `p`.
    pub fn complement(self, p: usize) -> Self {
        VertexSet(!self.0 & VertexSet::full(p).0)
    }

    /// Smallest vertex index, if any.
    pub fn first(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    /// Vertex indices in increasing order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let v = rest.trailing_zeros();
            rest &= rest - 1;
            Some(v as usize)
        })
    }

    /// All subsets of `self`, including the empty set and `self`.
    pub fn subsets(self) -> Subsets {
        Subsets {
            mask: self.0,
            next: Some(0),
        }
    }

    /// Nonempty subsets of `self`.
    pub fn nonempty_subsets(self) -> impl Iterator<Item = VertexSet> {
        self.subsets().filter(|s| !s.is_empty())
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, v) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("}")
    }
}

impl BitOr for VertexSet {
    type Output = VertexSet;
    fn bitor(self, rhs: Self) -> Self {
        VertexSet(self.0 | rhs.0)
    }
}

impl BitAnd for VertexSet {
    type Output = VertexSet;
    fn bitand(self, rhs: Self) -> Self {
        VertexSet(self.0 & rhs.0)
    }
}

impl Sub for VertexSet {
    type Output = VertexSet;
    fn sub(self, rhs: Self) -> Self {
        VertexSet(self.0 & !rhs.0)
    }
}

/// Unbounded complement; callers mask with the ground set.
impl Not for VertexSet {
    type Output = VertexSet;
    fn not(self) -> Self {
        VertexSet(!self.0)
    }
}

/// Submask enumeration in increasing numeric order.
#[derive(Clone, Debug)]
pub struct Subsets {
    mask: u32,
    next: Option<u32>,
}

impl Iterator for Subsets {
    type Item = VertexSet;

    fn next(&mut self) -> Option<VertexSet> {
        let cur = self.next?;
        self.next = if cur == self.mask {
            None
        } else {
            // Next submask in increasing order.
            Some((cur.wrapping_sub(self.mask)) & self.mask)
        };
        Some(VertexSet(cur))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ground_set_rejects_bad_input() {
        assert!(matches!(
            GroundSet::new(Vec::<String>::new()),
            Err(Error::GroundSetSize { got: 0, .. })
        ));
        assert!(matches!(
            GroundSet::new(["a", "b", "a"]),
            Err(Error::DuplicateLabel(_))
        ));
        assert!(matches!(
            GroundSet::new(["a;b"]),
            Err(Error::InvalidLabel(_))
        ));
        assert!(GroundSet::standard(17).is_err());
        assert_eq!(GroundSet::standard(16).unwrap().len(), 16);
    }

    #[test]
    fn label_index_bijection() {
        let g = GroundSet::new(["x", "y", "z"]).unwrap();
        for (i, l) in g.labels().iter().enumerate() {
            assert_eq!(g.index_of(l).unwrap(), i);
            assert_eq!(g.label(i), l);
        }
        assert!(g.index_of("w").is_err());
    }

    #[test]
    fn set_operations() {
        let a = VertexSet::from_indices([0, 2]);
        let b = VertexSet::from_indices([1]);
        assert!(a.is_disjoint(b));
        assert_eq!((a | b).len(), 3);
        assert_eq!(a.complement(4), VertexSet::from_indices([1, 3]));
        assert_eq!((a | b) - b, a);
        assert_eq!(a.iter().collect::<Vec<_>>(), vec![0, 2]);
        assert!(b.is_singleton());
        assert!(!a.is_singleton());
    }

    #[test]
    fn subsets_enumerates_each_submask_once() {
        let m = VertexSet::from_indices([0, 2, 3]);
        let subs: Vec<u32> = m.subsets().map(|s| s.bits()).collect();
        assert_eq!(subs, vec![0, 1, 4, 5, 8, 9, 12, 13]);
        assert_eq!(VertexSet::EMPTY.subsets().count(), 1);
        assert_eq!(m.nonempty_subsets().count(), 7);
    }
}
