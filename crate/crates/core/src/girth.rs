//! Shortest cycle through a vertex, and graph girth.

use std::cmp::Ordering;
use std::collections::VecDeque;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::graph::{Graph, Vertex};

/// Length of a shortest cycle, or `Infinite` when there is none.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GirthValue {
    Finite(usize),
    Infinite,
}

impl GirthValue {
    pub fn is_at_least(self, lower: usize) -> bool {
        match self {
            GirthValue::Finite(g) => g >= lower,
            GirthValue::Infinite => true,
        }
    }

    pub fn finite(self) -> Option<usize> {
        match self {
            GirthValue::Finite(g) => Some(g),
            GirthValue::Infinite => None,
        }
    }
}

impl Ord for GirthValue {
    fn cmp(&self, other: &Self) -> Ordering {
        use GirthValue::*;
        match (self, other) {
            (Finite(a), Finite(b)) => a.cmp(b),
            (Finite(_), Infinite) => Ordering::Less,
            (Infinite, Finite(_)) => Ordering::Greater,
            (Infinite, Infinite) => Ordering::Equal,
        }
    }
}

impl PartialOrd for GirthValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for GirthValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GirthValue::Finite(g) => write!(f, "{g}"),
            GirthValue::Infinite => f.write_str("inf"),
        }
    }
}

/// Finite values serialize as integers, `Infinite` as the string `"inf"`.
impl Serialize for GirthValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            GirthValue::Finite(g) => s.serialize_u64(*g as u64),
            GirthValue::Infinite => s.serialize_str("inf"),
        }
    }
}

/// Length of a shortest cycle through `x`.
///
/// A BFS from `x` tags every reached vertex with its distance and with the
/// neighbor of `x` its tree path leaves through. Any edge joining two
/// different branches closes a cycle through `x` of length
/// `dist(u) + dist(w) + 1`, and a shortest such cycle always shows up this
/// way. Edges inside one branch only close cycles that avoid `x`.
pub fn vertex_girth(g: &Graph, x: Vertex) -> GirthValue {
    let n = g.vertex_count();
    let mut dist = vec![usize::MAX; n];
    let mut branch = vec![usize::MAX; n];
    dist[x] = 0;
    let mut queue = VecDeque::new();
    for &y in g.neighbors(x) {
        dist[y] = 1;
        branch[y] = y;
        queue.push_back(y);
    }
    let mut best = usize::MAX;
    while let Some(u) = queue.pop_front() {
        // Nothing found later can beat a cycle already shorter than 2*dist(u)+1.
        if 2 * dist[u] + 1 >= best {
            break;
        }
        for &w in g.neighbors(u) {
            if w == x {
                continue;
            }
            if dist[w] == usize::MAX {
                dist[w] = dist[u] + 1;
                branch[w] = branch[u];
                queue.push_back(w);
            } else if branch[w] != branch[u] {
                best = best.min(dist[u] + dist[w] + 1);
            }
        }
    }
    if best == usize::MAX {
        GirthValue::Infinite
    } else {
        GirthValue::Finite(best)
    }
}

/// Minimum of [`vertex_girth`] over all vertices.
pub fn graph_girth(g: &Graph) -> GirthValue {
    g.vertices()
        .map(|x| vertex_girth(g, x))
        .min()
        .unwrap_or(GirthValue::Infinite)
}

/// `graph_girth(g) >= lower`; an acyclic graph passes every bound.
pub fn has_girth_at_least(g: &Graph, lower: usize) -> bool {
    graph_girth(g).is_at_least(lower)
}
