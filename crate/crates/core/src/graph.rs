//! Simple undirected graphs, vertex separation and `[G]`.
//!
//! The same [`Graph`] value is read as an undirected (concentration) or a
//! bidirected (covariance) graph; separation is identical in both readings.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::relation::{enumerate_triples, Relation};
use crate::triple::Triple;
use crate::vertex::{GroundSet, VertexSet};

#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    ground: Arc<GroundSet>,
    /// Neighbour mask per vertex.
    adj: Vec<u32>,
}

impl Graph {
    pub fn empty(ground: Arc<GroundSet>) -> Self {
        let p = ground.len();
        Graph {
            ground,
            adj: vec![0; p],
        }
    }

    pub fn complete(ground: Arc<GroundSet>) -> Self {
        let full = ground.full().bits();
        let adj = (0..ground.len()).map(|v| full & !(1 << v)).collect();
        Graph { ground, adj }
    }

    pub fn from_edges<I>(ground: Arc<GroundSet>, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Graph::empty(ground);
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    /// Graph whose edge set is given by bit `k` of `mask`, for the `k`-th
    /// pair in [`Graph::pairs`] order.
    pub fn from_edge_mask(ground: Arc<GroundSet>, mask: u64) -> Self {
        let pairs = Graph::pairs(ground.len());
        let mut g = Graph::empty(ground);
        for (k, &(u, v)) in pairs.iter().enumerate() {
            if mask >> k & 1 == 1 {
                g.adj[u] |= 1 << v;
                g.adj[v] |= 1 << u;
            }
        }
        g
    }

    /// Unordered vertex pairs `(u, v)`, `u < v`, in lexicographic order.
    pub fn pairs(p: usize) -> Vec<(usize, usize)> {
        (0..p)
            .flat_map(|u| (u + 1..p).map(move |v| (u, v)))
            .collect()
    }

    /// All `2^(p choose 2)` graphs on `ground`.
    pub fn all(ground: Arc<GroundSet>) -> impl Iterator<Item = Graph> {
        let n = Graph::pairs(ground.len()).len();
        (0..1u64 << n).map(move |m| Graph::from_edge_mask(ground.clone(), m))
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        let p = self.p();
        for x in [u, v] {
            if x >= p {
                return Err(Error::VertexOutOfRange { index: x, size: p });
            }
        }
        if u == v {
            return Err(Error::SelfLoop(self.ground.label(u).to_string()));
        }
        self.adj[u] |= 1 << v;
        self.adj[v] |= 1 << u;
        Ok(())
    }

    pub fn ground(&self) -> &Arc<GroundSet> {
        &self.ground
    }

    pub fn p(&self) -> usize {
        self.ground.len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u] >> v & 1 == 1
    }

    pub fn neighbours(&self, v: usize) -> VertexSet {
        VertexSet::from_bits(self.adj[v])
    }

    /// Edges `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        Graph::pairs(self.p())
            .into_iter()
            .filter(|&(u, v)| self.has_edge(u, v))
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.adj
            .iter()
            .map(|m| m.count_ones() as usize)
            .sum::<usize>()
            / 2
    }

    /// Vertices reachable from `from` without entering `blocked`.
    pub fn reachable(&self, from: VertexSet, blocked: VertexSet) -> VertexSet {
        let mut seen = from - blocked;
        let mut frontier = seen;
        while !frontier.is_empty() {
            let mut next = 0u32;
            for v in frontier.iter() {
                next |= self.adj[v];
            }
            let next = VertexSet::from_bits(next) - blocked - seen;
            seen = seen | next;
            frontier = next;
        }
        seen
    }

    /// Whether every path from `A` to `B` meets `S`.
    pub fn separates(&self, a: VertexSet, b: VertexSet, s: VertexSet) -> Result<bool> {
        if a.is_empty() || b.is_empty() {
            return Err(Error::EmptySide);
        }
        if !a.is_disjoint(b) || !a.is_disjoint(s) || !b.is_disjoint(s) {
            return Err(Error::OverlappingSets);
        }
        if !self.ground.contains_set(a | b | s) {
            return Err(Error::VertexOutOfRange {
                index: 31 - (a | b | s).bits().leading_zeros() as usize,
                size: self.p(),
            });
        }
        Ok(self.separates_unchecked(a, b, s))
    }

    #[inline]
    pub(crate) fn separates_unchecked(&self, a: VertexSet, b: VertexSet, s: VertexSet) -> bool {
        self.reachable(a, s).is_disjoint(b)
    }

    pub fn separates_triple(&self, t: &Triple) -> bool {
        self.separates_unchecked(t.a(), t.b(), t.c())
    }

    /// `[G]`: every triple `(A,B|S)` such that `S` separates `A` from `B`.
    pub fn separation_relation(&self) -> Relation {
        let mut r = Relation::empty(self.ground.clone());
        for t in enumerate_triples(self.p()) {
            if self.separates_triple(&t) {
                r.insert_unchecked(t);
            }
        }
        r
    }

    /// Acyclic iff `|E| = p - #components`.
    pub fn is_forest(&self) -> bool {
        let mut dsu = DisjointSets::new(self.p());
        self.edges().into_iter().all(|(u, v)| dsu.union(u, v))
    }

    pub fn components(&self) -> usize {
        let mut dsu = DisjointSets::new(self.p());
        let mut merged = 0;
        for (u, v) in self.edges() {
            merged += usize::from(dsu.union(u, v));
        }
        self.p() - merged
    }

    /// 0/1 adjacency matrix, one row per line.
    pub fn adjacency_matrix(&self) -> String {
        let mut out = String::new();
        for u in 0..self.p() {
            let row: Vec<&str> = (0..self.p())
                .map(|v| if self.has_edge(u, v) { "1" } else { "0" })
                .collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges: Vec<String> = self
            .edges()
            .into_iter()
            .map(|(u, v)| format!("{}-{}", self.ground.label(u), self.ground.label(v)))
            .collect();
        write!(f, "Graph[{}]", edges.join(" "))
    }
}

/// Non-edge `(a,b)` iff `(a,b|V\ab) ∈ L`.
pub fn undirected_graph_of(l: &Relation) -> Graph {
    let p = l.p();
    let full = VertexSet::full(p);
    graph_by_pairs(l, |a, b| l.has(a, b, full - a - b), p)
}

/// Non-edge `(a,b)` iff `(a,b|∅) ∈ L`.
pub fn bidirected_graph_of(l: &Relation) -> Graph {
    graph_by_pairs(l, |a, b| l.has(a, b, VertexSet::EMPTY), l.p())
}

fn graph_by_pairs(
    l: &Relation,
    independent: impl Fn(VertexSet, VertexSet) -> bool,
    p: usize,
) -> Graph {
    let mut g = Graph::empty(l.ground().clone());
    for (u, v) in Graph::pairs(p) {
        if !independent(VertexSet::singleton(u), VertexSet::singleton(v)) {
            g.adj[u] |= 1 << v;
            g.adj[v] |= 1 << u;
        }
    }
    g
}

/// Union-find with path halving and union by size.
struct DisjointSets {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        DisjointSets {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// False if `x` and `y` were already joined.
    fn union(&mut self, x: usize, y: usize) -> bool {
        let (mut rx, mut ry) = (self.find(x), self.find(y));
        if rx == ry {
            return false;
        }
        if self.size[rx] < self.size[ry] {
            std::mem::swap(&mut rx, &mut ry);
        }
        self.parent[ry] = rx;
        self.size[rx] += self.size[ry];
        true
    }
}
