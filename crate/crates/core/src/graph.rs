//! Finite simple undirected graphs, vertex functions, local balls and the
//! edge-list text format.
//!
//! Every [`Graph`] is validated on construction: adjacency is symmetric,
//! there are no self-loops or repeated edges, every vertex has at least one
//! neighbor (the normalized Laplacian divides by the degree) and the graph is
//! connected. Once built a graph is immutable.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;
use std::ops::Index;

use thiserror::Error;

pub type Vertex = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("line {0}: expected two non-negative integers \"u v\"")]
    Parse(usize),
    #[error("self-loop at vertex {0}")]
    SelfLoop(Vertex),
    #[error("vertex {0} has no neighbors")]
    IsolatedVertex(Vertex),
    #[error("graph is not connected")]
    Disconnected,
    #[error("graph has no vertices")]
    Empty,
    #[error("edge ({0}, {1}) references a vertex outside 0..{2}")]
    VertexOutOfRange(Vertex, Vertex, usize),
    #[error("vertex function has length {got}, graph has {expected} vertices")]
    LengthMismatch { expected: usize, got: usize },
    #[error("vertex function value at {0} is not finite")]
    NonFinite(Vertex),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    adjacency: Vec<Vec<Vertex>>,
}

impl Graph {
    /// Builds a graph on `vertex_count` vertices. Duplicate edges (in either
    /// orientation) collapse into one.
    pub fn from_edges<I>(vertex_count: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (Vertex, Vertex)>,
    {
        if vertex_count == 0 {
            return Err(GraphError::Empty);
        }
        let mut sets = vec![BTreeSet::new(); vertex_count];
        for (u, v) in edges {
            if u >= vertex_count || v >= vertex_count {
                return Err(GraphError::VertexOutOfRange(u, v, vertex_count));
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            sets[u].insert(v);
            sets[v].insert(u);
        }
        let adjacency: Vec<Vec<Vertex>> =
            sets.into_iter().map(|s| s.into_iter().collect()).collect();
        if let Some(v) = adjacency.iter().position(Vec::is_empty) {
            return Err(GraphError::IsolatedVertex(v));
        }
        let g = Graph { adjacency };
        if g.distances_from(0).iter().any(Option::is_none) {
            return Err(GraphError::Disconnected);
        }
        Ok(g)
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn vertices(&self) -> std::ops::Range<Vertex> {
        0..self.adjacency.len()
    }

    /// Sorted neighbors of `x`.
    pub fn neighbors(&self, x: Vertex) -> &[Vertex] {
        &self.adjacency[x]
    }

    pub fn degree(&self, x: Vertex) -> usize {
        self.adjacency[x].len()
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    /// Undirected edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, ns)| ns.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }

    /// BFS distances from `source`; `None` for unreachable vertices.
    pub fn distances_from(&self, source: Vertex) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.vertex_count()];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap();
            for &w in &self.adjacency[u] {
                if dist[w].is_none() {
                    dist[w] = Some(du + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// The ball of the given radius around `x`.
    pub fn ball(&self, x: Vertex, radius: BallRadius) -> LocalBall {
        let first: Vec<Vertex> = self.adjacency[x].clone();
        let mut second = BTreeSet::new();
        if radius == BallRadius::Two {
            for &y in &first {
                for &z in &self.adjacency[y] {
                    if z != x && !self.has_edge(x, z) {
                        second.insert(z);
                    }
                }
            }
        }
        let second: Vec<Vertex> = second.into_iter().collect();
        let mut index = vec![None; self.vertex_count()];
        for (i, &v) in first.iter().chain(second.iter()).enumerate() {
            index[v] = Some(i);
        }
        LocalBall {
            center: x,
            first,
            second,
            index,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BallRadius {
    One,
    Two,
}

/// Spheres of radius one and two around a center, with a coordinate map that
/// numbers the first sphere and then the second. The center has no
/// coordinate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalBall {
    center: Vertex,
    first: Vec<Vertex>,
    second: Vec<Vertex>,
    index: Vec<Option<usize>>,
}

impl LocalBall {
    pub fn center(&self) -> Vertex {
        self.center
    }

    /// Vertices at distance exactly one, sorted.
    pub fn first_sphere(&self) -> &[Vertex] {
        &self.first
    }

    /// Vertices at distance exactly two, sorted.
    pub fn second_sphere(&self) -> &[Vertex] {
        &self.second
    }

    /// Number of coordinates (|S1| + |S2|).
    pub fn dim(&self) -> usize {
        self.first.len() + self.second.len()
    }

    pub fn coordinate(&self, v: Vertex) -> Option<usize> {
        self.index[v]
    }

    /// Vertex carried by coordinate `i`.
    pub fn vertex_at(&self, i: usize) -> Vertex {
        if i < self.first.len() {
            self.first[i]
        } else {
            self.second[i - self.first.len()]
        }
    }

    /// Center followed by every coordinate vertex.
    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        std::iter::once(self.center)
            .chain(self.first.iter().copied())
            .chain(self.second.iter().copied())
    }

    pub fn contains(&self, v: Vertex) -> bool {
        v == self.center || self.index[v].is_some()
    }
}

/// A real-valued function on the vertices of a graph.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexFunction(Vec<f64>);

impl VertexFunction {
    pub fn new(g: &Graph, values: Vec<f64>) -> Result<Self, GraphError> {
        if values.len() != g.vertex_count() {
            return Err(GraphError::LengthMismatch {
                expected: g.vertex_count(),
                got: values.len(),
            });
        }
        if let Some(v) = values.iter().position(|a| !a.is_finite()) {
            return Err(GraphError::NonFinite(v));
        }
        Ok(VertexFunction(values))
    }

    pub fn constant(g: &Graph, c: f64) -> Self {
        VertexFunction(vec![c; g.vertex_count()])
    }

    pub fn from_fn(g: &Graph, f: impl FnMut(Vertex) -> f64) -> Self {
        VertexFunction(g.vertices().map(f).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        VertexFunction(self.0.iter().map(|&a| f(a)).collect())
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        VertexFunction(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        )
    }

    pub(crate) fn from_vec_unchecked(values: Vec<f64>) -> Self {
        VertexFunction(values)
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

impl Index<Vertex> for VertexFunction {
    type Output = f64;

    fn index(&self, v: Vertex) -> &f64 {
        &self.0[v]
    }
}

fn parse_lines(text: &str) -> Result<Vec<(u64, u64)>, GraphError> {
    let mut pairs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut it = line.split_whitespace();
        let pair = match (it.next(), it.next(), it.next()) {
            (Some(a), Some(b), None) => a.parse::<u64>().ok().zip(b.parse::<u64>().ok()),
            _ => None,
        };
        pairs.push(pair.ok_or(GraphError::Parse(i + 1))?);
    }
    Ok(pairs)
}

/// Parses the edge-list format: blank lines, `#` comments, and `u v` lines.
/// The vertex set is `0..=max_id`; every id in that range must appear.
pub fn parse_edge_list(text: &str) -> Result<Graph, GraphError> {
    let pairs = parse_lines(text)?;
    if let Some(&(u, _)) = pairs.iter().find(|(u, v)| u == v) {
        return Err(GraphError::SelfLoop(u as usize));
    }
    let n = pairs
        .iter()
        .map(|&(u, v)| u.max(v) as usize + 1)
        .max()
        .ok_or(GraphError::Empty)?;
    Graph::from_edges(n, pairs.into_iter().map(|(u, v)| (u as usize, v as usize)))
}

/// Like [`parse_edge_list`] but relabels sparse ids to `0..n` in increasing
/// order. Returns the graph and the original id of each vertex.
pub fn parse_edge_list_compacting(text: &str) -> Result<(Graph, Vec<u64>), GraphError> {
    let pairs = parse_lines(text)?;
    if let Some(&(u, _)) = pairs.iter().find(|(u, v)| u == v) {
        return Err(GraphError::SelfLoop(u as usize));
    }
    let ids: BTreeMap<u64, usize> = pairs
        .iter()
        .flat_map(|&(u, v)| [u, v])
        .collect::<BTreeSet<_>>()
        .into_iter()
        .enumerate()
        .map(|(i, id)| (id, i))
        .collect();
    let original: Vec<u64> = ids.keys().copied().collect();
    if original
        .last()
        .is_some_and(|&m| m as usize + 1 != original.len())
    {
        log::warn!(
            "compacted {} sparse vertex ids (max id {})",
            original.len(),
            original.last().unwrap()
        );
    }
    let g = Graph::from_edges(original.len(), pairs.iter().map(|(u, v)| (ids[u], ids[v])))?;
    Ok((g, original))
}

/// One `u v` line per edge with `u < v`, lexicographic order, LF separated.
pub fn serialize_edge_list(g: &Graph) -> String {
    let mut out = String::new();
    for (i, (u, v)) in g.edges().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        write!(out, "{u} {v}").unwrap();
    }
    out
}
