//! Simple graphs on at most [`MAX_VERTICES`] vertices, their tubes and
//! non-tubes, and recognition of iterated cones over discrete sets.
//!
//! Vertices are labeled `0..n`. Adjacency is stored as one bitmask row per
//! vertex, and vertex subsets are [`VertexSet`] bitmasks over the same range.

mod census;
mod parse;

pub use census::{canonical_code, connected_graphs, graphs_up_to_iso};
pub use parse::{parse_edge_list, parse_graph};

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Bitmask width guard for subset enumeration.
pub const MAX_VERTICES: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("a graph needs at least one vertex")]
    NoVertices,
    #[error("graph has {0} vertices; at most {MAX_VERTICES} are supported")]
    TooManyVertices(usize),
    #[error("vertex {vertex} is out of range for a graph on {num_vertices} vertices")]
    VertexOutOfRange { vertex: usize, num_vertices: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("the empty vertex set is neither a tube nor a non-tube")]
    EmptySet,
    #[error("invalid size range {min}..={max} for a graph on {num_vertices} vertices")]
    InvalidSizeRange {
        min: usize,
        max: usize,
        num_vertices: usize,
    },
    #[error("malformed graph spec {spec:?}: {reason}")]
    Parse { spec: String, reason: String },
    #[error("unsupported: disconnected non-discrete graph")]
    DisconnectedNonDiscrete,
}

/// A subset of the vertices `0..n` of some graph, stored as a bitmask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct VertexSet(u32);

impl VertexSet {
    pub const EMPTY: VertexSet = VertexSet(0);

    pub const fn from_bits(bits: u32) -> Self {
        VertexSet(bits)
    }

    pub const fn bits(self) -> u32 {
        self.0
    }

    pub fn singleton(v: usize) -> Self {
        VertexSet(1 << v)
    }

    /// The set `{0, .., n-1}`.
    pub fn full(n: usize) -> Self {
        if n >= 32 {
            VertexSet(u32::MAX)
        } else {
            VertexSet((1u32 << n) - 1)
        }
    }

    pub fn contains(self, v: usize) -> bool {
        v < 32 && self.0 >> v & 1 == 1
    }

    pub fn insert(&mut self, v: usize) {
        self.0 |= 1 << v;
    }

    pub fn with(self, v: usize) -> Self {
        VertexSet(self.0 | 1 << v)
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: Self) -> Self {
        VertexSet(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        VertexSet(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        VertexSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: Self) -> bool {
        self.0 & other.0 == 0
    }

    /// Lowest vertex in the set.
    pub fn first(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let v = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(v)
            }
        })
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }

    /// Iterates over all nonempty subsets of `self`, in ascending bitmask order.
    pub fn nonempty_subsets(self) -> impl Iterator<Item = VertexSet> {
        let full = self.0;
        let mut sub = 0u32;
        let mut done = full == 0;
        std::iter::from_fn(move || {
            if done {
                return None;
            }
            sub = sub.wrapping_sub(full) & full;
            if sub == full {
                done = true;
            }
            Some(VertexSet(sub))
        })
    }

    /// Ordering used for witnesses and W1/W2 scans: increasing size, then
    /// ascending bitmask.
    pub fn witness_order(a: &VertexSet, b: &VertexSet) -> std::cmp::Ordering {
        a.len().cmp(&b.len()).then(a.0.cmp(&b.0))
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = VertexSet::EMPTY;
        for v in iter {
            s.insert(v);
        }
        s
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for VertexSet {
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

impl Serialize for VertexSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for VertexSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let vs = Vec::<usize>::deserialize(deserializer)?;
        if let Some(&v) = vs.iter().find(|&&v| v >= 32) {
            return Err(serde::de::Error::custom(format!("vertex {v} out of range")));
        }
        Ok(vs.into_iter().collect())
    }
}

/// All masks over `0..n` with exactly `size` bits, ascending.
pub(crate) fn subsets_of_size(n: usize, size: usize) -> impl Iterator<Item = VertexSet> {
    // Gosper's hack
    let limit: u64 = 1u64 << n;
    let mut cur: u64 = if size == 0 { 0 } else { (1u64 << size) - 1 };
    let mut done = size > n;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let out = VertexSet(cur as u32);
        if cur == 0 {
            done = true;
        } else {
            let c = cur & cur.wrapping_neg();
            let r = cur + c;
            cur = (((r ^ cur) >> 2) / c) | r;
            if cur >= limit {
                done = true;
            }
        }
        Some(out)
    })
}

/// Subsets of `0..n` with size in `min..=max`, in witness order.
pub(crate) fn subsets_in_witness_order(
    n: usize,
    min: usize,
    max: usize,
) -> impl Iterator<Item = VertexSet> {
    (min..=max).flat_map(move |s| subsets_of_size(n, s))
}

/// A labeled finite simple graph.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    adj: Vec<u32>,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("num_vertices", &self.num_vertices())
            .field("edges", &self.edges().collect::<Vec<_>>())
            .finish()
    }
}

impl Graph {
    /// The discrete graph on `n` vertices.
    pub fn new(n: usize) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::NoVertices);
        }
        if n > MAX_VERTICES {
            return Err(GraphError::TooManyVertices(n));
        }
        Ok(Graph { adj: vec![0; n] })
    }

    pub fn from_edges(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        let mut g = Graph::new(n)?;
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    /// Adds the edge `u v`. Adding an existing edge is a no-op.
    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<(), GraphError> {
        let n = self.num_vertices();
        for x in [u, v] {
            if x >= n {
                return Err(GraphError::VertexOutOfRange {
                    vertex: x,
                    num_vertices: n,
                });
            }
        }
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        self.adj[u] |= 1 << v;
        self.adj[v] |= 1 << u;
        Ok(())
    }

    pub fn complete(n: usize) -> Result<Self, GraphError> {
        Self::from_edges(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))))
    }

    pub fn path(n: usize) -> Result<Self, GraphError> {
        Self::from_edges(n, (1..n).map(|v| (v - 1, v)))
    }

    /// Cycle `0-1-..-(n-1)-0`; needs `n >= 3`.
    pub fn cycle(n: usize) -> Result<Self, GraphError> {
        if n < 3 {
            return Err(GraphError::Parse {
                spec: format!("C{n}"),
                reason: "a cycle needs at least 3 vertices".into(),
            });
        }
        Self::from_edges(n, (0..n).map(|v| (v, (v + 1) % n)))
    }

    /// Star on `n` vertices with center 0.
    pub fn star(n: usize) -> Result<Self, GraphError> {
        Self::from_edges(n, (1..n).map(|v| (0, v)))
    }

    pub fn discrete(n: usize) -> Result<Self, GraphError> {
        Self::new(n)
    }

    /// Complete multipartite graph; parts are consecutive label blocks.
    pub fn complete_multipartite(parts: &[usize]) -> Result<Self, GraphError> {
        let n: usize = parts.iter().sum();
        let mut block = Vec::with_capacity(n);
        for (i, &p) in parts.iter().enumerate() {
            block.extend(std::iter::repeat_n(i, p));
        }
        let mut g = Graph::new(n)?;
        for u in 0..n {
            for v in u + 1..n {
                if block[u] != block[v] {
                    g.add_edge(u, v)?;
                }
            }
        }
        Ok(g)
    }

    pub fn complete_bipartite(m: usize, n: usize) -> Result<Self, GraphError> {
        Self::complete_multipartite(&[m, n])
    }

    pub fn num_vertices(&self) -> usize {
        self.adj.len()
    }

    pub fn vertices(&self) -> VertexSet {
        VertexSet::full(self.num_vertices())
    }

    pub fn neighbors(&self, v: usize) -> VertexSet {
        VertexSet(self.adj[v])
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count_ones() as usize
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u] >> v & 1 == 1
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.num_vertices()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }

    pub fn num_edges(&self) -> usize {
        self.adj
            .iter()
            .map(|r| r.count_ones() as usize)
            .sum::<usize>()
            / 2
    }

    fn check_subset(&self, s: VertexSet) -> Result<(), GraphError> {
        if !s.is_subset(self.vertices()) {
            let vertex = s.difference(self.vertices()).first().unwrap_or(0);
            return Err(GraphError::VertexOutOfRange {
                vertex,
                num_vertices: self.num_vertices(),
            });
        }
        Ok(())
    }

    /// Whether the induced subgraph on a nonempty `s` is connected.
    pub(crate) fn induces_connected(&self, s: VertexSet) -> bool {
        let Some(start) = s.first() else {
            return false;
        };
        let mut seen = VertexSet::singleton(start);
        let mut frontier = seen;
        while !frontier.is_empty() {
            let mut next = VertexSet::EMPTY;
            for v in frontier.iter() {
                next = next.union(self.neighbors(v));
            }
            frontier = next.intersection(s).difference(seen);
            seen = seen.union(frontier);
        }
        seen == s
    }

    /// True iff `s` induces no edge.
    pub fn is_independent(&self, s: VertexSet) -> bool {
        s.iter().all(|v| self.neighbors(v).is_disjoint(s))
    }

    /// A tube is a nonempty vertex set whose induced subgraph is connected.
    pub fn is_tube(&self, s: VertexSet) -> Result<bool, GraphError> {
        if s.is_empty() {
            return Err(GraphError::EmptySet);
        }
        self.check_subset(s)?;
        Ok(self.induces_connected(s))
    }

    /// A non-tube has at least two vertices and a disconnected induced subgraph.
    pub fn is_non_tube(&self, s: VertexSet) -> Result<bool, GraphError> {
        Ok(s.len() >= 2 && !self.is_tube(s)?)
    }

    /// Tubes with size in `min_size..=max_size`, by decreasing size and then
    /// ascending bitmask. This is the subdivision order of the fan builder.
    pub fn tubes(&self, min_size: usize, max_size: usize) -> Result<Vec<VertexSet>, GraphError> {
        let n = self.num_vertices();
        if min_size < 1 || min_size > max_size || max_size > n {
            return Err(GraphError::InvalidSizeRange {
                min: min_size,
                max: max_size,
                num_vertices: n,
            });
        }
        Ok((min_size..=max_size)
            .rev()
            .flat_map(|s| subsets_of_size(n, s))
            .filter(|&s| self.induces_connected(s))
            .collect())
    }

    /// Non-tubes, by increasing size and then ascending bitmask.
    pub fn non_tubes(&self) -> Vec<VertexSet> {
        let n = self.num_vertices();
        subsets_in_witness_order(n, 2, n)
            .filter(|&s| !self.induces_connected(s))
            .collect()
    }

    /// Adds a vertex labeled `n` adjacent to every existing vertex.
    pub fn cone(&self) -> Result<Graph, GraphError> {
        let n = self.num_vertices();
        if n + 1 > MAX_VERTICES {
            return Err(GraphError::TooManyVertices(n + 1));
        }
        let mut adj = self.adj.clone();
        for row in adj.iter_mut() {
            *row |= 1 << n;
        }
        adj.push(VertexSet::full(n).bits());
        Ok(Graph { adj })
    }

    pub fn iterated_cone(&self, times: usize) -> Result<Graph, GraphError> {
        let mut g = self.clone();
        for _ in 0..times {
            g = g.cone()?;
        }
        Ok(g)
    }

    /// Vertices adjacent to every other vertex.
    pub fn universal_vertices(&self) -> VertexSet {
        let n = self.num_vertices();
        (0..n).filter(|&v| self.degree(v) == n - 1).collect()
    }

    pub fn is_connected(&self) -> bool {
        self.induces_connected(self.vertices())
    }

    pub fn is_discrete(&self) -> bool {
        self.adj.iter().all(|&r| r == 0)
    }

    /// Rejects disconnected graphs that are not discrete; no associahedron is
    /// defined for those here.
    pub fn check_supported(&self) -> Result<(), GraphError> {
        if self.is_connected() || self.is_discrete() {
            Ok(())
        } else {
            Err(GraphError::DisconnectedNonDiscrete)
        }
    }

    /// Recognizes `g = Cone^l(D_k)`.
    ///
    /// The non-universal vertices must form an independent set. For a complete
    /// graph the lowest vertex is designated independent so that `k = 1`.
    pub fn classify_iterated_cone(&self) -> Option<ConeStructure> {
        let all = self.vertices();
        let universal = self.universal_vertices();
        let rest = all.difference(universal);
        if rest.is_empty() {
            let independent = VertexSet::singleton(0);
            return Some(ConeStructure {
                independent,
                cone_vertices: all.difference(independent),
            });
        }
        self.is_independent(rest).then_some(ConeStructure {
            independent: rest,
            cone_vertices: universal,
        })
    }

    /// The graph with vertex `v` renamed to `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Graph {
        let mut adj = vec![0u32; self.num_vertices()];
        for (u, v) in self.edges() {
            adj[perm[u]] |= 1 << perm[v];
            adj[perm[v]] |= 1 << perm[u];
        }
        Graph { adj }
    }
}

/// Decomposition of an iterated cone over a discrete set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConeStructure {
    pub independent: VertexSet,
    pub cone_vertices: VertexSet,
}

impl ConeStructure {
    /// Size of the discrete base.
    pub fn k(&self) -> usize {
        self.independent.len()
    }

    /// Number of coning steps.
    pub fn num_cones(&self) -> usize {
        self.cone_vertices.len()
    }

    /// `Cone^l(D_k)` with the base on `0..k` and cone vertices after it.
    pub fn reconstruct(&self) -> Result<Graph, GraphError> {
        Graph::discrete(self.k())?.iterated_cone(self.num_cones())
    }

    /// Permutation sending independent vertices (in label order) to `0..k` and
    /// cone vertices (in label order) to `k..n`.
    pub fn canonical_labeling(&self) -> Vec<usize> {
        let n = self.k() + self.num_cones();
        let mut perm = vec![0; n];
        for (i, v) in self
            .independent
            .iter()
            .chain(self.cone_vertices.iter())
            .enumerate()
        {
            perm[v] = i;
        }
        perm
    }
}
