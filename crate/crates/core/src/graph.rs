//! Simple undirected graphs and the bounded combinatorial enumerations
//! (small cliques, chordless cycles) that feed the separation oracles.
//!
//! Vertices are `0..n` internally. Everything user-facing (DIMACS files,
//! reports) is 1-based and converts at the boundary.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default cap on enumerated chordless cycles.
pub const DEFAULT_CYCLE_CAP: usize = 50_000;

/// Largest clique size the bounded enumeration supports.
pub const MAX_CLIQUE_SIZE: usize = 5;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Simple undirected graph with sorted adjacency lists and a bit matrix
/// for constant-time adjacency tests.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    m: usize,
    adj: Vec<Vec<usize>>,
    words: usize,
    bits: Vec<u64>,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n)
            .field("m", &self.m)
            .finish()
    }
}

impl Graph {
    /// Edgeless graph on `n` vertices.
    pub fn empty(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        Graph {
            n,
            m: 0,
            adj: vec![Vec::new(); n],
            words,
            bits: vec![0; n * words],
        }
    }

    /// Builds a graph from 0-based edge pairs. Duplicates (in either
    /// orientation) are collapsed; loops and out-of-range endpoints are errors.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Graph::empty(n);
        for (u, v) in edges {
            g.insert_edge(u, v)?;
        }
        for list in &mut g.adj {
            list.sort_unstable();
        }
        Ok(g)
    }

    /// Complete graph on `n` vertices.
    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)));
        Graph::from_edges(n, edges).expect("complete graph edges are valid")
    }

    fn insert_edge(&mut self, u: usize, v: usize) -> Result<bool, GraphError> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        if self.is_edge(u, v) {
            return Ok(false);
        }
        self.bits[u * self.words + v / 64] |= 1 << (v % 64);
        self.bits[v * self.words + u / 64] |= 1 << (u % 64);
        self.adj[u].push(v);
        self.adj[v].push(u);
        self.m += 1;
        Ok(true)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn check_vertex(&self, v: usize) -> Result<(), GraphError> {
        if v < self.n {
            Ok(())
        } else {
            Err(GraphError::VertexOutOfRange {
                vertex: v,
                n: self.n,
            })
        }
    }

    /// Adjacency test. Panics if either vertex is out of range.
    #[inline]
    pub fn is_edge(&self, u: usize, v: usize) -> bool {
        assert!(u < self.n && v < self.n, "vertex out of range");
        self.bits[u * self.words + v / 64] >> (v % 64) & 1 == 1
    }

    /// Sorted neighbor list. Panics if `v` is out of range.
    #[inline]
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// Edges as `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(i, list)| list.iter().filter(move |&&j| j > i).map(move |&j| (i, j)))
    }

    /// Checks the internal invariants: symmetric adjacency, no loops, sorted
    /// duplicate-free lists, and a consistent edge count.
    pub fn validate(&self) -> Result<(), GraphError> {
        let mut degree_sum = 0;
        for (u, list) in self.adj.iter().enumerate() {
            degree_sum += list.len();
            for w in list.windows(2) {
                if w[0] >= w[1] {
                    return Err(GraphError::Parse {
                        line: 0,
                        message: format!("adjacency of vertex {} not strictly sorted", u + 1),
                    });
                }
            }
            for &v in list {
                self.check_vertex(v)?;
                if u == v {
                    return Err(GraphError::SelfLoop(u));
                }
                if !self.adj[v].binary_search(&u).is_ok() || !self.is_edge(u, v) {
                    return Err(GraphError::Parse {
                        line: 0,
                        message: format!("asymmetric adjacency between {} and {}", u + 1, v + 1),
                    });
                }
            }
        }
        if degree_sum != 2 * self.m {
            return Err(GraphError::Parse {
                line: 0,
                message: format!("degree sum {degree_sum} does not match 2m = {}", 2 * self.m),
            });
        }
        Ok(())
    }

    /// Graph on the same vertices whose edges are exactly the non-edges of `self`.
    pub fn complement(&self) -> Graph {
        let n = self.n;
        let edges = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)));
        let edges: Vec<_> = edges.filter(|&(i, j)| !self.is_edge(i, j)).collect();
        Graph::from_edges(n, edges).expect("complement edges are valid")
    }

    /// Subgraph induced by `vertices` (relabelled `0..k` in the given order).
    pub fn induced(&self, vertices: &[usize]) -> Graph {
        let k = vertices.len();
        let mut edges = Vec::new();
        for a in 0..k {
            for b in a + 1..k {
                if self.is_edge(vertices[a], vertices[b]) {
                    edges.push((a, b));
                }
            }
        }
        Graph::from_edges(k, edges).expect("induced edges are valid")
    }

    /// True if every pair in `set` is adjacent.
    pub fn is_clique(&self, set: &[usize]) -> bool {
        set.iter()
            .enumerate()
            .all(|(a, &u)| set[a + 1..].iter().all(|&v| self.is_edge(u, v)))
    }

    /// True if no pair in `set` is adjacent.
    pub fn is_stable(&self, set: &[usize]) -> bool {
        set.iter()
            .enumerate()
            .all(|(a, &u)| set[a + 1..].iter().all(|&v| !self.is_edge(u, v)))
    }

    /// True if `set` is a clique that no outside vertex extends.
    pub fn is_maximal_clique(&self, set: &[usize]) -> bool {
        self.is_clique(set)
            && (0..self.n).all(|v| set.contains(&v) || !set.iter().all(|&u| self.is_edge(u, v)))
    }

    /// Row `v` of the adjacency bit matrix (`ceil(n/64)` words).
    pub(crate) fn bit_row(&self, v: usize) -> &[u64] {
        &self.bits[v * self.words..(v + 1) * self.words]
    }
}

/// Sorted list of distinct vertices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VertexSet(Vec<usize>);

impl VertexSet {
    /// Sorts and deduplicates.
    pub fn new(mut vertices: Vec<usize>) -> Self {
        vertices.sort_unstable();
        vertices.dedup();
        VertexSet(vertices)
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        let (mut a, mut b) = (0, 0);
        while a < self.0.len() && b < other.0.len() {
            match self.0[a].cmp(&other.0[b]) {
                std::cmp::Ordering::Less => a += 1,
                std::cmp::Ordering::Greater => b += 1,
                std::cmp::Ordering::Equal => return false,
            }
        }
        true
    }
}

impl std::ops::Deref for VertexSet {
    type Target = [usize];
    fn deref(&self) -> &[usize] {
        &self.0
    }
}

/// Closed walk `v1 .. vL` (back to `v1`) through distinct vertices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Cycle {
    vertices: Vec<usize>,
    chordless: bool,
}

impl Cycle {
    /// Validates the cycle against `g` and records whether it is chordless.
    pub fn new(g: &Graph, vertices: Vec<usize>) -> Result<Self, GraphError> {
        let len = vertices.len();
        if len < 3 {
            return Err(GraphError::Parse {
                line: 0,
                message: format!("cycle of length {len}"),
            });
        }
        for &v in &vertices {
            g.check_vertex(v)?;
        }
        if VertexSet::new(vertices.clone()).len() != len {
            return Err(GraphError::Parse {
                line: 0,
                message: "cycle repeats a vertex".into(),
            });
        }
        for a in 0..len {
            let (u, v) = (vertices[a], vertices[(a + 1) % len]);
            if !g.is_edge(u, v) {
                return Err(GraphError::Parse {
                    line: 0,
                    message: format!("cycle step {}-{} is not an edge", u + 1, v + 1),
                });
            }
        }
        let chordless = (0..len).all(|a| {
            (a + 2..len).all(|b| (a == 0 && b == len - 1) || !g.is_edge(vertices[a], vertices[b]))
        });
        Ok(Cycle {
            vertices,
            chordless,
        })
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn is_chordless(&self) -> bool {
        self.chordless
    }

    pub fn contains(&self, v: usize) -> bool {
        self.vertices.contains(&v)
    }
}

/// All cliques with `2..=max_size` vertices, each once, in lexicographic order.
///
/// Cliques are grown by ordered extension: a clique is only extended by
/// vertices larger than its maximum that are adjacent to every member.
pub fn enumerate_cliques(g: &Graph, max_size: usize) -> Vec<VertexSet> {
    assert!(
        (2..=MAX_CLIQUE_SIZE).contains(&max_size),
        "clique size bound must lie in 2..={MAX_CLIQUE_SIZE}"
    );
    fn extend(
        g: &Graph,
        current: &mut Vec<usize>,
        candidates: &[usize],
        max_size: usize,
        out: &mut Vec<VertexSet>,
    ) {
        for (idx, &v) in candidates.iter().enumerate() {
            current.push(v);
            out.push(VertexSet(current.clone()));
            if current.len() < max_size {
                let next: Vec<usize> = candidates[idx + 1..]
                    .iter()
                    .copied()
                    .filter(|&w| g.is_edge(v, w))
                    .collect();
                if !next.is_empty() {
                    extend(g, current, &next, max_size, out);
                }
            }
            current.pop();
        }
    }
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(max_size);
    for v in 0..g.n() {
        let higher: Vec<usize> = g.neighbors(v).iter().copied().filter(|&w| w > v).collect();
        if higher.is_empty() {
            continue;
        }
        current.push(v);
        extend(g, &mut current, &higher, max_size, &mut out);
        current.pop();
    }
    out
}

/// Chordless cycles of length exactly `len` (`len >= 4`), at most `cap`.
///
/// Each cycle is reported once in canonical orientation: the smallest vertex
/// first, and its smaller cycle neighbour second. Output is lexicographic,
/// so truncation at `cap` keeps the lexicographically first cycles.
pub fn enumerate_chordless_cycles(g: &Graph, len: usize, cap: usize) -> Vec<Cycle> {
    assert!(
        len >= 4,
        "chordless cycles of length < 4 are triangles or degenerate"
    );
    let mut out = Vec::new();
    if cap == 0 {
        return out;
    }
    let mut path = Vec::with_capacity(len);
    for start in 0..g.n() {
        path.push(start);
        if grow_cycle(g, len, cap, &mut path, &mut out) {
            break;
        }
        path.pop();
    }
    out
}

// Returns true once the cap is reached.
fn grow_cycle(
    g: &Graph,
    len: usize,
    cap: usize,
    path: &mut Vec<usize>,
    out: &mut Vec<Cycle>,
) -> bool {
    let start = path[0];
    let last = *path.last().expect("path is never empty");
    let depth = path.len();
    for &v in g.neighbors(last) {
        if v <= start || path.contains(&v) {
            continue;
        }
        // v must not touch any earlier path vertex except its predecessor,
        // and (only when closing) the start vertex.
        let closing = depth + 1 == len;
        let chord_free = path[..depth - 1].iter().enumerate().all(|(idx, &u)| {
            let allowed = closing && idx == 0;
            allowed || !g.is_edge(u, v)
        });
        if !chord_free {
            continue;
        }
        if closing {
            if !g.is_edge(v, start) || v < path[1] {
                continue;
            }
            path.push(v);
            out.push(Cycle {
                vertices: path.clone(),
                chordless: true,
            });
            path.pop();
            if out.len() >= cap {
                return true;
            }
        } else {
            path.push(v);
            let done = grow_cycle(g, len, cap, path, out);
            path.pop();
            if done {
                return true;
            }
        }
    }
    false
}

/// Chordless 5-cycles (induced C5 subgraphs), at most `cap`.
pub fn enumerate_chordless_5cycles(g: &Graph, cap: usize) -> Vec<Cycle> {
    enumerate_chordless_cycles(g, 5, cap)
}
