//! Independence triples `(A,B|C)`.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::vertex::{GroundSet, VertexSet};

/// A canonical triple `(A,B|C)`: `A`, `B` nonempty, all three pairwise
/// disjoint, and `A < B` as bitmasks so that `(A,B|C)` and `(B,A|C)` share
/// one value.
///
/// Triples order by their [`code`](Triple::code).
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Triple {
    a: VertexSet,
    b: VertexSet,
    c: VertexSet,
}

impl Triple {
    pub fn new(a: VertexSet, b: VertexSet, c: VertexSet) -> Result<Self> {
        if a.is_empty() || b.is_empty() {
            return Err(Error::EmptySide);
        }
        if !a.is_disjoint(b) || !a.is_disjoint(c) || !b.is_disjoint(c) {
            return Err(Error::OverlappingSets);
        }
        Ok(Triple::canonical(a, b, c))
    }

    /// Canonicalizes without validating; the caller guarantees the
    /// disjointness and nonemptiness invariants.
    #[inline]
    pub(crate) fn canonical(a: VertexSet, b: VertexSet, c: VertexSet) -> Self {
        debug_assert!(!a.is_empty() && !b.is_empty());
        debug_assert!(a.is_disjoint(b) && a.is_disjoint(c) && b.is_disjoint(c));
        if a.bits() <= b.bits() {
            Triple { a, b, c }
        } else {
            Triple { a: b, b: a, c }
        }
    }

    /// Singleton pair `(u,v|c)`.
    pub fn pair(u: usize, v: usize, c: VertexSet) -> Result<Self> {
        Triple::new(VertexSet::singleton(u), VertexSet::singleton(v), c)
    }

    pub fn a(&self) -> VertexSet {
        self.a
    }

    pub fn b(&self) -> VertexSet {
        self.b
    }

    pub fn c(&self) -> VertexSet {
        self.c
    }

    pub fn support(&self) -> VertexSet {
        self.a | self.b | self.c
    }

    /// True when both independent sides are singletons.
    pub fn is_pairwise(&self) -> bool {
        self.a.is_singleton() && self.b.is_singleton()
    }

    /// `(A,B|C)` becomes `(A,B|V\ABC)` over a ground set of size `p`.
    pub fn dual(&self, p: usize) -> Triple {
        Triple {
            a: self.a,
            b: self.b,
            c: self.support().complement(p),
        }
    }

    /// Base-4 code with one digit per vertex: 0 absent, 1 in `A`, 2 in `B`,
    /// 3 in `C`. Codes of canonical triples are unique.
    #[inline]
    pub fn code(&self) -> u64 {
        ordered_code(self.a, self.b, self.c)
    }

    /// Inverse of [`code`](Triple::code) for codes of canonical triples.
    pub fn from_code(code: u64) -> Option<Triple> {
        let lo = compact(code & 0x5555_5555_5555_5555);
        let hi = compact((code >> 1) & 0x5555_5555_5555_5555);
        let a = VertexSet::from_bits(lo & !hi);
        let b = VertexSet::from_bits(hi & !lo);
        let c = VertexSet::from_bits(lo & hi);
        (!a.is_empty() && !b.is_empty() && a.bits() < b.bits()).then_some(Triple { a, b, c })
    }

    pub fn display<'a>(&'a self, ground: &'a GroundSet) -> TripleDisplay<'a> {
        TripleDisplay {
            triple: self,
            ground,
        }
    }
}

impl Ord for Triple {
    fn cmp(&self, other: &Self) -> Ordering {
        self.code().cmp(&other.code())
    }
}

impl PartialOrd for Triple {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?},{:?}|{:?})", self.a, self.b, self.c)
    }
}

/// Renders a triple as `A ; B ; C` with labels, the same shape as a line of
/// the relation text format.
pub struct TripleDisplay<'a> {
    triple: &'a Triple,
    ground: &'a GroundSet,
}

impl fmt::Display for TripleDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = self.triple;
        write!(
            f,
            "{} ; {} ;",
            self.ground.format_set(t.a),
            self.ground.format_set(t.b)
        )?;
        if !t.c.is_empty() {
            write!(f, " {}", self.ground.format_set(t.c))?;
        }
        Ok(())
    }
}

/// Code of an ordered (not necessarily canonical) assignment.
#[inline]
pub(crate) fn ordered_code(a: VertexSet, b: VertexSet, c: VertexSet) -> u64 {
    spread(a.bits() | c.bits()) | spread(b.bits() | c.bits()) << 1
}

/// Moves bit `v` of a 16-bit value to bit `2v`.
#[inline]
fn spread(x: u32) -> u64 {
    let mut x = u64::from(x & 0xFFFF);
    x = (x | x << 8) & 0x00FF_00FF;
    x = (x | x << 4) & 0x0F0F_0F0F;
    x = (x | x << 2) & 0x3333_3333;
    x = (x | x << 1) & 0x5555_5555;
    x
}

#[inline]
fn compact(x: u64) -> u32 {
    let mut x = x & 0x5555_5555;
    x = (x | x >> 1) & 0x3333_3333;
    x = (x | x >> 2) & 0x0F0F_0F0F;
    x = (x | x >> 4) & 0x00FF_00FF;
    x = (x | x >> 8) & 0x0000_FFFF;
    x as u32
}
