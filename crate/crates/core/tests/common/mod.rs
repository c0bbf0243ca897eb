//! Independent oracles and the shared test corpus.
//!
//! Nothing here calls the crate's operators or curvature code; the oracles
//! work on plain adjacency lists and value slices.
#![allow(dead_code)]

use gammacurv::generators::{petersen, random_tree, random_with_girth};
use gammacurv::{Graph, Vertex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn adjacency(g: &Graph) -> Vec<Vec<Vertex>> {
    g.vertices().map(|v| g.neighbors(v).to_vec()).collect()
}

// ---------------------------------------------------------------- operators

pub fn lap(adj: &[Vec<Vertex>], f: &[f64], x: Vertex) -> f64 {
    let s: f64 = adj[x].iter().map(|&y| f[y] - f[x]).sum();
    s / adj[x].len() as f64
}

pub fn lap_all(adj: &[Vec<Vertex>], f: &[f64]) -> Vec<f64> {
    (0..adj.len()).map(|x| lap(adj, f, x)).collect()
}

pub fn gamma_all(adj: &[Vec<Vertex>], f: &[f64], h: &[f64]) -> Vec<f64> {
    let fh: Vec<f64> = f.iter().zip(h).map(|(a, b)| a * b).collect();
    let (lfh, lf, lh) = (lap_all(adj, &fh), lap_all(adj, f), lap_all(adj, h));
    (0..adj.len())
        .map(|x| 0.5 * (lfh[x] - f[x] * lh[x] - h[x] * lf[x]))
        .collect()
}

pub fn gamma2_all(adj: &[Vec<Vertex>], f: &[f64]) -> Vec<f64> {
    let gf = gamma_all(adj, f, f);
    let lf = lap_all(adj, f);
    let lg = lap_all(adj, &gf);
    let cross = gamma_all(adj, f, &lf);
    (0..adj.len()).map(|x| 0.5 * lg[x] - cross[x]).collect()
}

/// `Γ₂(f) − Γ(f, Γ(f)/f) − (1/n)(Δf)²` over `Γ(f)` at `x`.
pub fn cde_ratio(adj: &[Vec<Vertex>], f: &[f64], x: Vertex, n: f64) -> f64 {
    let gf = gamma_all(adj, f, f);
    let q: Vec<f64> = gf.iter().zip(f).map(|(a, b)| a / b).collect();
    let mixed = gamma_all(adj, f, &q)[x];
    let l = lap(adj, f, x);
    (gamma2_all(adj, f)[x] - mixed - l * l / n) / gf[x]
}

// ---------------------------------------------------------------- girth

/// Shortest simple cycle through `x` by exhaustive path enumeration.
pub fn brute_vertex_girth(adj: &[Vec<Vertex>], x: Vertex) -> Option<usize> {
    fn dfs(
        adj: &[Vec<Vertex>],
        x: Vertex,
        v: Vertex,
        len: usize,
        on_path: &mut [bool],
        best: &mut Option<usize>,
    ) {
        for &w in &adj[v] {
            if w == x && len >= 2 {
                let c = len + 1;
                if best.is_none_or(|b| c < b) {
                    *best = Some(c);
                }
            } else if !on_path[w] && best.is_none_or(|b| len + 2 < b) {
                on_path[w] = true;
                dfs(adj, x, w, len + 1, on_path, best);
                on_path[w] = false;
            }
        }
    }
    let mut on_path = vec![false; adj.len()];
    on_path[x] = true;
    let mut best = None;
    dfs(adj, x, x, 0, &mut on_path, &mut best);
    best
}

/// Vertices within distance 2 of `x`, sorted.
pub fn brute_two_ball(adj: &[Vec<Vertex>], x: Vertex) -> Vec<Vertex> {
    let mut out = vec![x];
    for &y in &adj[x] {
        out.push(y);
        out.extend(adj[y].iter().copied());
    }
    out.sort_unstable();
    out.dedup();
    out
}

// ---------------------------------------------------------------- curvature

/// Quadratic forms over the two-ball coordinates (center fixed at 0), built
/// by polarizing the definitional operators above.
pub struct Forms {
    pub coords: Vec<Vertex>,
    pub first: usize,
    pub a: Vec<Vec<f64>>,
    pub b: Vec<Vec<f64>>,
}

pub fn polarized_forms(adj: &[Vec<Vertex>], x: Vertex, n: f64) -> Forms {
    let mut coords: Vec<Vertex> = adj[x].clone();
    let first = coords.len();
    for v in brute_two_ball(adj, x) {
        if v != x && !coords.contains(&v) {
            coords.push(v);
        }
    }
    let m = coords.len();
    let eval = |u: &[f64]| {
        let mut f = vec![0.0; adj.len()];
        for (i, &v) in coords.iter().enumerate() {
            f[v] = u[i];
        }
        let l = lap(adj, &f, x);
        let a = gamma2_all(adj, &f)[x] - l * l / n;
        let b = gamma_all(adj, &f, &f)[x];
        (a, b)
    };
    let unit = |i: usize, j: usize| {
        let mut u = vec![0.0; m];
        u[i] += 1.0;
        u[j] += 1.0;
        u
    };
    let diag: Vec<(f64, f64)> = (0..m)
        .map(|i| {
            let mut u = vec![0.0; m];
            u[i] = 1.0;
            eval(&u)
        })
        .collect();
    let mut a = vec![vec![0.0; m]; m];
    let mut b = vec![vec![0.0; m]; m];
    for i in 0..m {
        a[i][i] = diag[i].0;
        b[i][i] = diag[i].1;
        for j in 0..i {
            let (qa, qb) = eval(&unit(i, j));
            a[i][j] = 0.5 * (qa - diag[i].0 - diag[j].0);
            b[i][j] = 0.5 * (qb - diag[i].1 - diag[j].1);
            a[j][i] = a[i][j];
            b[j][i] = b[i][j];
        }
    }
    Forms {
        coords,
        first,
        a,
        b,
    }
}

fn quad(m: &[Vec<f64>], u: &[f64]) -> f64 {
    let mut s = 0.0;
    for (i, row) in m.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            s += u[i] * v * u[j];
        }
    }
    s
}

fn row_dot(m: &[Vec<f64>], i: usize, u: &[f64]) -> f64 {
    m[i].iter().zip(u).map(|(a, b)| a * b).sum()
}

/// Exact minimizer of `(a0 + 2a1 t + a2 t²) / (b0 + 2b1 t + b2 t²)` over `t`
/// with positive denominator, if it improves on `t = 0`.
fn line_min(a: [f64; 3], b: [f64; 3]) -> Option<f64> {
    let [a0, a1, a2] = a;
    let [b0, b1, b2] = b;
    let r = |t: f64| (a0 + 2.0 * a1 * t + a2 * t * t) / (b0 + 2.0 * b1 * t + b2 * t * t);
    // Stationarity: (a2 b1 − a1 b2) t² + (a2 b0 − a0 b2) t + (a1 b0 − a0 b1) = 0.
    let (p, q, s) = (a2 * b1 - a1 * b2, a2 * b0 - a0 * b2, a1 * b0 - a0 * b1);
    // Stable root pair; degrades to the linear root -s/q when p cancels to ~0.
    let disc = q * q - 4.0 * p * s;
    let mut roots = Vec::new();
    if disc >= 0.0 {
        let w = -0.5 * (q + q.signum() * disc.sqrt());
        if p != 0.0 {
            roots.push(w / p);
        }
        if w != 0.0 {
            roots.push(s / w);
        }
    }
    let base = r(0.0);
    roots
        .into_iter()
        .filter(|t| t.is_finite() && b0 + 2.0 * b1 * t + b2 * t * t > 1e-14)
        .map(|t| (t, r(t)))
        .filter(|&(_, v)| v < base)
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .map(|(t, _)| t)
}

fn descend(f: &Forms, u: &mut [f64]) -> f64 {
    let m = u.len();
    let mut prev = f64::INFINITY;
    for _ in 0..20_000 {
        for i in 0..m {
            let au = row_dot(&f.a, i, u);
            let bu = row_dot(&f.b, i, u);
            let (qa, qb) = (quad(&f.a, u), quad(&f.b, u));
            let a = [qa, au, f.a[i][i]];
            let bb = [qb, bu, f.b[i][i]];
            if let Some(t) = line_min(a, bb) {
                u[i] += t;
            }
        }
        let norm = u[..f.first].iter().map(|v| v * v).sum::<f64>().sqrt();
        for v in u.iter_mut() {
            *v /= norm;
        }
        let r = quad(&f.a, u) / quad(&f.b, u);
        if (prev - r).abs() <= 1e-15 * r.abs().max(1.0) {
            return r;
        }
        prev = r;
    }
    prev
}

/// Optimal curvature at `x` by random-restart Rayleigh minimization:
/// `restarts` uniform starts, then coordinate descent from the best few.
pub fn rayleigh_curvature(g: &Graph, x: Vertex, n: f64, restarts: usize, seed: u64) -> f64 {
    let adj = adjacency(g);
    let forms = polarized_forms(&adj, x, n);
    let m = forms.coords.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut starts: Vec<(f64, Vec<f64>)> = (0..restarts)
        .map(|_| {
            let u: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
            (quad(&forms.a, &u) / quad(&forms.b, &u), u)
        })
        .filter(|(r, _)| r.is_finite())
        .collect();
    starts.sort_by(|p, q| p.0.total_cmp(&q.0));
    starts
        .into_iter()
        .take(5)
        .map(|(_, mut u)| descend(&forms, &mut u))
        .fold(f64::INFINITY, f64::min)
}

// ---------------------------------------------------------------- corpus

/// Random connected graph: a seeded spanning tree plus each remaining pair
/// with probability `p`.
pub fn random_connected(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for v in 1..n {
        edges.push((rng.gen_range(0..v), v));
    }
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) && !edges.contains(&(u, v)) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges).unwrap()
}

/// 100 random connected graphs with at most 30 vertices and mixed density.
pub fn operator_corpus() -> Vec<Graph> {
    (0..100u64)
        .map(|s| {
            let n = 4 + (s as usize * 7) % 27;
            let p = [0.05, 0.1, 0.2, 0.4][s as usize % 4];
            random_connected(n, p, 1000 + s)
        })
        .collect()
}

pub fn random_function(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect()
}

pub struct Named {
    pub name: String,
    pub graph: Graph,
}

/// Petersen, 20 girth-five random graphs (10 to 40 vertices), 10 random trees.
pub fn theorem_corpus() -> Vec<Named> {
    let mut out = vec![Named {
        name: "petersen".into(),
        graph: petersen(),
    }];
    for s in 0..20u64 {
        let v = 10 + (s as usize * 3) % 31;
        let e = (v * 5).div_ceil(4);
        let r = random_with_girth(v, e, 5, s).unwrap();
        out.push(Named {
            name: format!("girth5-{v}-{e}-s{s}"),
            graph: r.graph,
        });
    }
    for s in 0..10u64 {
        let v = 6 + (s as usize * 5) % 25;
        out.push(Named {
            name: format!("tree-{v}-s{s}"),
            graph: random_tree(v, s).unwrap(),
        });
    }
    out
}
