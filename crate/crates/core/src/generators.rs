//! Deterministic test-graph families.
//!
//! Seeded generators draw from `ChaCha8Rng::seed_from_u64(seed)`, a fixed,
//! portable stream, so the same seed yields the same graph everywhere.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{Graph, Vertex};

/// Consecutive rejected proposals (per requested edge) before
/// [`random_with_girth`] gives up.
pub const STALL_FACTOR: usize = 50;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("bad parameter: {0}")]
    BadParameter(String),
}

fn bad(msg: impl Into<String>) -> GenError {
    GenError::BadParameter(msg.into())
}

fn build(n: usize, edges: impl IntoIterator<Item = (Vertex, Vertex)>) -> Graph {
    Graph::from_edges(n, edges).expect("generator produced an invalid graph")
}

pub fn cycle(m: usize) -> Result<Graph, GenError> {
    if m < 3 {
        return Err(bad(format!("cycle needs at least 3 vertices, got {m}")));
    }
    Ok(build(m, (0..m).map(|i| (i, (i + 1) % m))))
}

/// Center 0 joined to leaves `1..=leaves`.
pub fn star(leaves: usize) -> Result<Graph, GenError> {
    if leaves < 1 {
        return Err(bad("star needs at least 1 leaf"));
    }
    Ok(build(leaves + 1, (1..=leaves).map(|i| (0, i))))
}

pub fn path(vertices: usize) -> Result<Graph, GenError> {
    if vertices < 2 {
        return Err(bad(format!(
            "path needs at least 2 vertices, got {vertices}"
        )));
    }
    Ok(build(vertices, (1..vertices).map(|i| (i - 1, i))))
}

pub fn complete(vertices: usize) -> Result<Graph, GenError> {
    if vertices < 2 {
        return Err(bad(format!(
            "complete graph needs at least 2 vertices, got {vertices}"
        )));
    }
    Ok(build(
        vertices,
        (0..vertices).flat_map(|u| (u + 1..vertices).map(move |v| (u, v))),
    ))
}

/// Outer 5-cycle `0..5`, spokes `i` to `i+5`, inner pentagram on `5..10`.
pub fn petersen() -> Graph {
    let outer = (0..5).map(|i| (i, (i + 1) % 5));
    let spokes = (0..5).map(|i| (i, i + 5));
    let inner = (0..5).map(|i| (5 + i, 5 + (i + 2) % 5));
    build(10, outer.chain(spokes).chain(inner))
}

fn attach_tree(vertices: usize, rng: &mut ChaCha8Rng) -> Vec<(Vertex, Vertex)> {
    (1..vertices).map(|v| (rng.gen_range(0..v), v)).collect()
}

/// Uniform-attachment tree: vertex `v` attaches to a uniform choice among `0..v`.
pub fn random_tree(vertices: usize, seed: u64) -> Result<Graph, GenError> {
    if vertices < 2 {
        return Err(bad(format!(
            "tree needs at least 2 vertices, got {vertices}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(build(vertices, attach_tree(vertices, &mut rng)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct GirthGraph {
    pub graph: Graph,
    /// True when the proposal loop stalled before reaching the edge target.
    pub stalled: bool,
}

/// Whether `v` is within `limit` steps of `u`.
fn within(adj: &[Vec<Vertex>], u: Vertex, v: Vertex, limit: usize) -> bool {
    let mut dist = vec![usize::MAX; adj.len()];
    dist[u] = 0;
    let mut queue = VecDeque::from([u]);
    while let Some(a) = queue.pop_front() {
        if a == v {
            return true;
        }
        if dist[a] == limit {
            continue;
        }
        for &b in &adj[a] {
            if dist[b] == usize::MAX {
                dist[b] = dist[a] + 1;
                queue.push_back(b);
            }
        }
    }
    false
}

/// Random connected graph whose girth is at least `min_girth`.
///
/// Starts from a seeded uniform-attachment spanning tree, then repeatedly
/// proposes a uniformly random non-edge `{u, v}` and adds it iff
/// `dist(u, v) ≥ min_girth − 1`, so every new cycle is long enough. Stops at
/// `target_edges` edges, or after `STALL_FACTOR × target_edges` consecutive
/// rejections with `stalled` set.
pub fn random_with_girth(
    vertices: usize,
    target_edges: usize,
    min_girth: usize,
    seed: u64,
) -> Result<GirthGraph, GenError> {
    if vertices < 2 {
        return Err(bad(format!("need at least 2 vertices, got {vertices}")));
    }
    if target_edges + 1 < vertices {
        return Err(bad(format!(
            "{target_edges} edges cannot connect {vertices} vertices"
        )));
    }
    if min_girth < 3 {
        return Err(bad(format!(
            "girth floor must be at least 3, got {min_girth}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut adj = vec![Vec::new(); vertices];
    let mut edges = attach_tree(vertices, &mut rng);
    for &(u, v) in &edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    let max_edges = vertices * (vertices - 1) / 2;
    let stall_limit = STALL_FACTOR * target_edges;
    let mut rejections = 0;
    let mut stalled = false;
    while edges.len() < target_edges {
        if edges.len() == max_edges || rejections >= stall_limit {
            stalled = true;
            break;
        }
        let (u, v) = loop {
            let u = rng.gen_range(0..vertices);
            let v = rng.gen_range(0..vertices);
            if u != v && !adj[u].contains(&v) {
                break (u.min(v), u.max(v));
            }
        };
        if within(&adj, u, v, min_girth - 2) {
            rejections += 1;
        } else {
            adj[u].push(v);
            adj[v].push(u);
            edges.push((u, v));
            rejections = 0;
        }
    }
    if stalled {
        log::warn!(
            "random_with_girth stalled at {} of {target_edges} edges (seed {seed})",
            edges.len()
        );
    }
    Ok(GirthGraph {
        graph: build(vertices, edges),
        stalled,
    })
}
