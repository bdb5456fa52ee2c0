//! Relations: symmetric sets of independence triples over a ground set.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::triple::{ordered_code, Triple};
use crate::vertex::{GroundSet, VertexSet};

/// Ground sets up to this size use a dense bitset of `4^p` bits indexed by
/// triple code; larger ones fall back to an ordered set of codes.
const DENSE_MAX_VERTICES: usize = 10;

#[derive(Clone, PartialEq, Eq)]
enum Store {
    Dense(Vec<u64>),
    Sparse(BTreeSet<u64>),
}

/// A subset of `T(V)`. Only canonical triples are stored, so membership of
/// `(A,B|C)` and `(B,A|C)` always agrees.
#[derive(Clone)]
pub struct Relation {
    ground: Arc<GroundSet>,
    store: Store,
    len: usize,
}

impl Relation {
    pub fn empty(ground: Arc<GroundSet>) -> Self {
        let p = ground.len();
        let store = if p <= DENSE_MAX_VERTICES {
            let bits = 1usize << (2 * p);
            Store::Dense(vec![0; bits.div_ceil(64)])
        } else {
            Store::Sparse(BTreeSet::new())
        };
        Relation {
            ground,
            store,
            len: 0,
        }
    }

    /// All of `T(V)`.
    pub fn full(ground: Arc<GroundSet>) -> Self {
        let p = ground.len();
        let mut r = Relation::empty(ground);
        for t in enumerate_triples(p) {
            r.insert_unchecked(t);
        }
        r
    }

    pub fn from_triples<I>(ground: Arc<GroundSet>, triples: I) -> Result<Self>
    where
        I: IntoIterator<Item = Triple>,
    {
        let mut r = Relation::empty(ground);
        for t in triples {
            r.insert(t)?;
        }
        Ok(r)
    }

    pub fn ground(&self) -> &Arc<GroundSet> {
        &self.ground
    }

    pub fn p(&self) -> usize {
        self.ground.len()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn same_ground(&self, other: &Relation) -> bool {
        Arc::ptr_eq(&self.ground, &other.ground) || *self.ground == *other.ground
    }

    pub fn contains(&self, t: &Triple) -> bool {
        self.contains_code(t.code())
    }

    /// Membership of `(a,b|c)` in either orientation. The sets must satisfy
    /// the triple invariants.
    #[inline]
    pub fn has(&self, a: VertexSet, b: VertexSet, c: VertexSet) -> bool {
        let code = if a.bits() <= b.bits() {
            ordered_code(a, b, c)
        } else {
            ordered_code(b, a, c)
        };
        self.contains_code(code)
    }

    #[inline]
    fn contains_code(&self, code: u64) -> bool {
        match &self.store {
            Store::Dense(words) => words[(code >> 6) as usize] >> (code & 63) & 1 == 1,
            Store::Sparse(set) => set.contains(&code),
        }
    }

    /// Inserts a triple, validating it against the ground set.
    pub fn insert(&mut self, t: Triple) -> Result<bool> {
        if !self.ground.contains_set(t.support()) {
            return Err(Error::VertexOutOfRange {
                index: 31 - t.support().bits().leading_zeros() as usize,
                size: self.p(),
            });
        }
        Ok(self.insert_unchecked(t))
    }

    #[inline]
    pub(crate) fn insert_unchecked(&mut self, t: Triple) -> bool {
        let code = t.code();
        let fresh = match &mut self.store {
            Store::Dense(words) => {
                let w = &mut words[(code >> 6) as usize];
                let mask = 1u64 << (code & 63);
                let fresh = *w & mask == 0;
                *w |= mask;
                fresh
            }
            Store::Sparse(set) => set.insert(code),
        };
        self.len += usize::from(fresh);
        fresh
    }

    pub fn remove(&mut self, t: &Triple) -> bool {
        let code = t.code();
        let present = match &mut self.store {
            Store::Dense(words) => {
                let w = &mut words[(code >> 6) as usize];
                let mask = 1u64 << (code & 63);
                let present = *w & mask != 0;
                *w &= !mask;
                present
            }
            Store::Sparse(set) => set.remove(&code),
        };
        self.len -= usize::from(present);
        present
    }

    /// Triples in canonical (code) order.
    pub fn iter(&self) -> Box<dyn Iterator<Item = Triple> + '_> {
        match &self.store {
            Store::Dense(words) => Box::new(words.iter().enumerate().flat_map(|(i, &w)| {
                let mut rest = w;
                std::iter::from_fn(move || {
                    if rest == 0 {
                        return None;
                    }
                    let bit = rest.trailing_zeros() as u64;
                    rest &= rest - 1;
                    Triple::from_code(((i as u64) << 6) | bit)
                })
            })),
            Store::Sparse(set) => Box::new(set.iter().filter_map(|&c| Triple::from_code(c))),
        }
    }

    /// `L^⌉ = {(A,B|C) : (A,B|V\ABC) ∈ L}`.
    pub fn dual(&self) -> Relation {
        let p = self.p();
        self.map_unchecked(|t| t.dual(p))
    }

    /// Members with singleton independent sides.
    pub fn pairwise_part(&self) -> Relation {
        self.filter(|t| t.is_pairwise())
    }

    pub fn filter(&self, mut keep: impl FnMut(&Triple) -> bool) -> Relation {
        let mut out = Relation::empty(self.ground.clone());
        for t in self.iter().filter(|t| keep(t)) {
            out.insert_unchecked(t);
        }
        out
    }

    fn map_unchecked(&self, f: impl Fn(Triple) -> Triple) -> Relation {
        let mut out = Relation::empty(self.ground.clone());
        for t in self.iter() {
            out.insert_unchecked(f(t));
        }
        out
    }

    pub fn union(&self, other: &Relation) -> Result<Relation> {
        self.zip_words(other, |x, y| x | y)
    }

    pub fn intersection(&self, other: &Relation) -> Result<Relation> {
        self.zip_words(other, |x, y| x & y)
    }

    pub fn difference(&self, other: &Relation) -> Result<Relation> {
        self.zip_words(other, |x, y| x & !y)
    }

    pub fn is_subset(&self, other: &Relation) -> Result<bool> {
        Ok(self.difference(other)?.is_empty())
    }

    fn zip_words(&self, other: &Relation, op: impl Fn(u64, u64) -> u64) -> Result<Relation> {
        if !self.same_ground(other) {
            return Err(Error::GroundMismatch);
        }
        let store = match (&self.store, &other.store) {
            (Store::Dense(x), Store::Dense(y)) => {
                Store::Dense(x.iter().zip(y).map(|(&a, &b)| op(a, b)).collect())
            }
            (Store::Sparse(x), Store::Sparse(y)) => Store::Sparse(
                x.union(y)
                    .copied()
                    .filter(|c| op(u64::from(x.contains(c)), u64::from(y.contains(c))) & 1 == 1)
                    .collect(),
            ),
            _ => unreachable!("store kind is a function of the ground set size"),
        };
        let len = match &store {
            Store::Dense(w) => w.iter().map(|x| x.count_ones() as usize).sum(),
            Store::Sparse(s) => s.len(),
        };
        Ok(Relation {
            ground: self.ground.clone(),
            store,
            len,
        })
    }
}

impl PartialEq for Relation {
    fn eq(&self, other: &Self) -> bool {
        self.same_ground(other) && self.store == other.store
    }
}

impl Eq for Relation {}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut list = f.debug_set();
        for t in self.iter() {
            list.entry(&format_args!("({})", t.display(&self.ground)));
        }
        list.finish()
    }
}

/// Every canonical triple over a ground set of size `p`, each exactly once.
///
/// Yields `(4^p - 2·3^p + 2^p) / 2` triples.
pub fn enumerate_triples(p: usize) -> impl Iterator<Item = Triple> {
    let full = VertexSet::full(p);
    full.subsets().flat_map(move |c| {
        (full - c)
            .subsets()
            .filter(|d| d.len() >= 2)
            .flat_map(move |d| {
                d.nonempty_subsets().filter_map(move |a| {
                    let b = d - a;
                    (!b.is_empty() && a.bits() < b.bits()).then(|| Triple::canonical(a, b, c))
                })
            })
    })
}
