//! Acceptance criteria, one PASS/FAIL line each. Run with
//! `cargo test --test acceptance`.

mod common;

use std::io::Write as _;
use std::time::{Duration, Instant};

use common::{adjacency, theorem_corpus, Named};
use gammacurv::cli;
use gammacurv::curvature_cde::{cde_estimate, STRUCTURED_GRID};
use gammacurv::generators::{self, petersen};
use gammacurv::operators::{gamma, gamma2, gamma2_local, gamma_iterate, gamma_local, laplacian};
use gammacurv::verify::{cd_bound_girth5, cd_witness_value, cde_bound_girth5};
use gammacurv::{
    cd_curvature, cde_ratio, parse_edge_list, serialize_edge_list, vertex_girth, GirthValue, Graph,
    VertexFunction,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const CDE_SAMPLES: usize = 10_000;
const CDE_SEED: u64 = 0;

struct Outcome {
    ok: bool,
    detail: String,
}

fn pass(detail: impl Into<String>) -> Outcome {
    Outcome {
        ok: true,
        detail: detail.into(),
    }
}

fn fail(detail: impl Into<String>) -> Outcome {
    Outcome {
        ok: false,
        detail: detail.into(),
    }
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

/// Operator corpus paired with ten random functions per graph.
fn operator_cases() -> Vec<(Graph, Vec<VertexFunction>)> {
    common::operator_corpus()
        .into_iter()
        .enumerate()
        .map(|(i, g)| {
            let mut rng = ChaCha8Rng::seed_from_u64(500 + i as u64);
            let fs = (0..10)
                .map(|_| {
                    VertexFunction::new(&g, common::random_function(g.vertex_count(), &mut rng))
                        .unwrap()
                })
                .collect();
            (g, fs)
        })
        .collect()
}

fn c1_gamma_local(cases: &[(Graph, Vec<VertexFunction>)]) -> Outcome {
    let mut worst = 0.0f64;
    for (g, fs) in cases {
        for f in fs {
            for x in g.vertices() {
                worst = worst.max(rel_err(gamma(g, f, f, x), gamma_local(g, f, x)));
            }
        }
    }
    if worst <= 1e-10 {
        pass(format!("max rel err {worst:.2e}"))
    } else {
        fail(format!("max rel err {worst:.2e} > 1e-10"))
    }
}

fn c2_gamma2_local(cases: &[(Graph, Vec<VertexFunction>)]) -> Outcome {
    let mut worst = 0.0f64;
    for (g, fs) in cases {
        for f in fs {
            for x in g.vertices() {
                worst = worst.max(rel_err(gamma2(g, f, x), gamma2_local(g, f, x)));
            }
        }
    }
    if worst <= 1e-10 {
        pass(format!("max rel err {worst:.2e}"))
    } else {
        fail(format!("max rel err {worst:.2e} > 1e-10"))
    }
}

fn c3_iteration(cases: &[(Graph, Vec<VertexFunction>)]) -> Outcome {
    let mut worst = 0.0f64;
    for (g, fs) in cases {
        for (j, f) in fs.iter().enumerate() {
            let h = &fs[(j + 1) % fs.len()];
            for x in g.vertices() {
                let g1 = gamma_iterate(g, f, h, x, 1).unwrap();
                worst = worst.max(rel_err(g1, gamma(g, f, h, x)));
                let g2 = gamma_iterate(g, f, f, x, 2).unwrap();
                worst = worst.max(rel_err(g2, gamma2(g, f, x)));
            }
        }
    }
    if worst <= 1e-12 {
        pass(format!("max rel err {worst:.2e}"))
    } else {
        fail(format!("max rel err {worst:.2e} > 1e-12"))
    }
}

fn c4_exact_values() -> Outcome {
    let star = generators::star(3).unwrap();
    let k_star = cd_curvature(&star, 0, 2.0).unwrap().curvature_k;
    let c6 = generators::cycle(6).unwrap();
    let k_c6: Vec<f64> = c6
        .vertices()
        .map(|x| cd_curvature(&c6, x, 2.0).unwrap().curvature_k)
        .collect();
    let star_ok = (k_star - 1.0).abs() <= 1e-8 && (cd_bound_girth5(&star, 0) - 1.0).abs() <= 1e-12;
    let c6_ok = k_c6.iter().all(|k| k.abs() <= 1e-8)
        && c6
            .vertices()
            .all(|x| cd_bound_girth5(&c6, x).abs() <= 1e-12);
    let detail = format!(
        "star3 center K={k_star:.12}, C6 K in [{:.3e}, {:.3e}]",
        k_c6.iter().copied().fold(f64::INFINITY, f64::min),
        k_c6.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    );
    if star_ok && c6_ok {
        pass(detail)
    } else {
        fail(detail)
    }
}

fn c5_cd_corpus(corpus: &[Named]) -> Outcome {
    let mut checked = 0;
    let mut worst = f64::INFINITY;
    for n in corpus {
        for x in n.graph.vertices() {
            let k = cd_curvature(&n.graph, x, 2.0).unwrap().curvature_k;
            let margin = k - cd_bound_girth5(&n.graph, x);
            worst = worst.min(margin);
            checked += 1;
            if margin < -1e-8 {
                return fail(format!(
                    "{} vertex {x}: K={k} below bound by {margin:e}",
                    n.name
                ));
            }
        }
    }
    let petersen_ok = corpus[0]
        .graph
        .vertices()
        .all(|x| (cd_bound_girth5(&corpus[0].graph, x) + 1.0 / 3.0).abs() <= 1e-15);
    if !petersen_ok {
        return fail("Petersen bound is not -1/3");
    }
    pass(format!("{checked} vertices, min margin {worst:.3e}"))
}

fn c6_witness(corpus: &[Named]) -> Outcome {
    let mut worst = 0.0f64;
    let mut pairs = 0;
    for n in corpus {
        let g = &n.graph;
        for x in g.vertices() {
            for (i, &y) in g.neighbors(x).iter().enumerate() {
                let k = g.degree(y) as f64;
                let w = cd_witness_value(g, x, i).unwrap();
                worst = worst.max((w + (k - 2.0) / k).abs());
                pairs += 1;
            }
        }
    }
    if worst <= 1e-12 {
        pass(format!("{pairs} pairs, max err {worst:.2e}"))
    } else {
        fail(format!("{pairs} pairs, max err {worst:.2e} > 1e-12"))
    }
}

fn c7_rayleigh(corpus: &[Named]) -> Outcome {
    let mut worst = 0.0f64;
    let mut checked = 0;
    for (j, n) in corpus.iter().step_by(3).take(10).enumerate() {
        for x in n.graph.vertices() {
            let k = cd_curvature(&n.graph, x, 2.0).unwrap().curvature_k;
            let oracle = common::rayleigh_curvature(
                &n.graph,
                x,
                2.0,
                10_000,
                77 + j as u64 * 1000 + x as u64,
            );
            let err = (k - oracle).abs();
            checked += 1;
            if err > 1e-6 {
                return fail(format!(
                    "{} vertex {x}: eigen {k} vs oracle {oracle}",
                    n.name
                ));
            }
            worst = worst.max(err);
        }
    }
    pass(format!(
        "{checked} vertices on 10 graphs, max diff {worst:.2e}"
    ))
}

fn c8_cde(corpus: &[Named]) -> Outcome {
    let mut checked = 0;
    let mut worst = f64::INFINITY;
    for n in corpus {
        let g = &n.graph;
        let adj = adjacency(g);
        for x in g.vertices() {
            let bound = cde_bound_girth5(g, x);
            let e = cde_estimate(g, x, 2.0, CDE_SAMPLES, CDE_SEED).unwrap();
            // The reported minimizer must be feasible and reproduce its ratio.
            let again = cde_ratio(g, x, 2.0, &e.argmin.function).unwrap();
            if rel_err(again, e.sampled_min) > 1e-12 {
                return fail(format!(
                    "{} vertex {x}: argmin ratio {again} != {}",
                    n.name, e.sampled_min
                ));
            }
            // The uniform structured functions f(x)=1, f(y)=c, f(z)=c² are covered.
            for &c in STRUCTURED_GRID.iter().filter(|&&c| c < 1.0) {
                let mut f = vec![1.0; g.vertex_count()];
                for &y in g.neighbors(x) {
                    f[y] = c;
                    for &z in g.neighbors(y) {
                        if z != x {
                            f[z] = c * c;
                        }
                    }
                }
                let r = common::cde_ratio(&adj, &f, x, 2.0);
                if r < bound - 1e-8 {
                    return fail(format!(
                        "{} vertex {x}: structured c={c} ratio {r} < {bound}",
                        n.name
                    ));
                }
                if e.sampled_min > r + 1e-9 * r.abs().max(1.0) {
                    return fail(format!(
                        "{} vertex {x}: structured c={c} not covered",
                        n.name
                    ));
                }
            }
            let margin = e.sampled_min - bound;
            worst = worst.min(margin);
            checked += 1;
            if margin < -1e-8 {
                return fail(format!(
                    "{} vertex {x}: sampled ratio {} below bound {bound}",
                    n.name, e.sampled_min
                ));
            }
        }
    }
    pass(format!("{checked} vertices, min margin {worst:.4}"))
}

fn c9_girth(corpus: &[Named]) -> Outcome {
    let mut graphs = 0;
    let mut extra: Vec<Named> = [3, 4, 5, 6, 7]
        .iter()
        .map(|&m| Named {
            name: format!("C{m}"),
            graph: generators::cycle(m).unwrap(),
        })
        .collect();
    extra.push(Named {
        name: "K5".into(),
        graph: generators::complete(5).unwrap(),
    });
    for n in corpus
        .iter()
        .chain(&extra)
        .filter(|n| n.graph.vertex_count() <= 12)
    {
        let adj = adjacency(&n.graph);
        for x in n.graph.vertices() {
            let want = match common::brute_vertex_girth(&adj, x) {
                Some(c) => GirthValue::Finite(c),
                None => GirthValue::Infinite,
            };
            let got = vertex_girth(&n.graph, x);
            if got != want {
                return fail(format!(
                    "{} vertex {x}: {got} vs brute force {want}",
                    n.name
                ));
            }
        }
        graphs += 1;
    }
    let trees_small = corpus
        .iter()
        .filter(|n| n.name.starts_with("tree") && n.graph.vertex_count() <= 12)
        .count();
    if gammacurv::graph_girth(&petersen()) != GirthValue::Finite(5) {
        return fail("Petersen girth is not 5");
    }
    if trees_small == 0 {
        return fail("no small tree in corpus");
    }
    pass(format!(
        "{graphs} graphs with <= 12 vertices ({trees_small} trees)"
    ))
}

fn c10_invariance(cases: &[(Graph, Vec<VertexFunction>)], corpus: &[Named]) -> Outcome {
    let mut worst_shift = 0.0f64;
    let mut worst_scale = 0.0f64;
    for (g, fs) in cases.iter().take(30) {
        for f in fs.iter().take(3) {
            let shifted = f.map(|v| v + 3.7);
            let scaled = f.map(|v| -2.5 * v);
            for x in g.vertices() {
                worst_shift = worst_shift
                    .max(rel_err(laplacian(g, &shifted, x), laplacian(g, f, x)))
                    .max(rel_err(gamma_local(g, &shifted, x), gamma_local(g, f, x)))
                    .max(rel_err(gamma(g, &shifted, &shifted, x), gamma(g, f, f, x)))
                    .max(rel_err(gamma2(g, &shifted, x), gamma2(g, f, x)));
                worst_scale = worst_scale
                    .max(rel_err(
                        gamma(g, &scaled, &scaled, x),
                        6.25 * gamma(g, f, f, x),
                    ))
                    .max(rel_err(gamma2(g, &scaled, x), 6.25 * gamma2(g, f, x)));
            }
        }
    }
    if worst_shift > 1e-12 {
        return fail(format!("add-constant error {worst_shift:.2e}"));
    }
    if worst_scale > 1e-10 {
        return fail(format!("scaling error {worst_scale:.2e}"));
    }

    let mut worst_cde = 0.0f64;
    let mut local_changes = 0;
    for n in corpus {
        let g = &n.graph;
        for x in g.vertices().step_by(3) {
            let e = cde_estimate(g, x, 2.0, 50, 3).unwrap();
            let f = &e.argmin.function;
            for c in [0.01, 0.5, 7.0, 1e3] {
                let r = cde_ratio(g, x, 2.0, &f.map(|v| c * v)).unwrap();
                worst_cde = worst_cde.max(rel_err(r, e.sampled_min));
            }
            let dist = g.distances_from(x);
            let perturbed = VertexFunction::from_fn(g, |v| {
                if dist[v].is_none_or(|d| d >= 3) {
                    f[v] + 5.0
                } else {
                    f[v]
                }
            });
            let same = laplacian(g, f, x) == laplacian(g, &perturbed, x)
                && gamma(g, f, f, x) == gamma(g, &perturbed, &perturbed, x)
                && gamma2(g, f, x) == gamma2(g, &perturbed, x)
                && cde_ratio(g, x, 2.0, f).unwrap() == cde_ratio(g, x, 2.0, &perturbed).unwrap();
            if !same {
                local_changes += 1;
            }
        }
    }
    if worst_cde > 1e-9 {
        return fail(format!("CDE scale error {worst_cde:.2e}"));
    }
    if local_changes > 0 {
        return fail(format!(
            "{local_changes} distance-3 perturbations changed a value"
        ));
    }
    pass(format!(
        "shift {worst_shift:.1e}, scale {worst_scale:.1e}, CDE scale {worst_cde:.1e}, locality exact"
    ))
}

fn run_cli(args: &[&str]) -> (i32, Vec<u8>) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = cli::run(
        std::iter::once("gammacurv").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    (code, out)
}

fn c11_cli() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let cases: [(&[&str], Graph); 4] = [
        (&["cycle", "6"], generators::cycle(6).unwrap()),
        (&["petersen"], petersen()),
        (
            &["random-tree", "25", "--seed", "9"],
            generators::random_tree(25, 9).unwrap(),
        ),
        (
            &[
                "random-girth",
                "20",
                "25",
                "--min-girth",
                "5",
                "--seed",
                "7",
            ],
            generators::random_with_girth(20, 25, 5, 7).unwrap().graph,
        ),
    ];
    for (i, (params, expected)) in cases.iter().enumerate() {
        let path = dir.path().join(format!("g{i}.txt"));
        let p = path.to_str().unwrap();
        let mut args = vec!["gen"];
        args.extend_from_slice(params);
        args.extend_from_slice(&["-o", p]);
        if run_cli(&args).0 != 0 {
            return fail(format!("gen {params:?} failed"));
        }
        let text = std::fs::read_to_string(&path).unwrap();
        let parsed = parse_edge_list(&text).unwrap();
        if &parsed != expected || parse_edge_list(&serialize_edge_list(&parsed)).unwrap() != parsed
        {
            return fail(format!("round trip mismatch for {params:?}"));
        }
    }
    let path = dir.path().join("petersen.txt");
    std::fs::write(&path, serialize_edge_list(&petersen())).unwrap();
    let p = path.to_str().unwrap();
    let (c1, o1) = run_cli(&["verify", p, "--seed", "11"]);
    let (c2, o2) = run_cli(&["verify", p, "--seed", "11"]);
    if c1 != 0 || c2 != 0 {
        return fail(format!("verify petersen exit codes {c1}, {c2}"));
    }
    if o1 != o2 {
        return fail("verify output differs between runs");
    }
    pass(format!(
        "4 families round-trip; verify petersen exit 0, {} identical bytes",
        o1.len()
    ))
}

struct Criterion {
    id: usize,
    name: &'static str,
    limit: Option<Duration>,
}

fn main() {
    let mut failures = 0;
    let mut report = |c: Criterion, run: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let mut outcome = run();
        let took = start.elapsed();
        if let Some(limit) = c.limit {
            if took > limit && outcome.ok {
                outcome = fail(format!(
                    "{} (took {took:.1?}, limit {limit:?})",
                    outcome.detail
                ));
            }
        }
        if !outcome.ok {
            failures += 1;
        }
        println!(
            "{} criterion {:>2} {}: {} [{took:.2?}]",
            if outcome.ok { "PASS" } else { "FAIL" },
            c.id,
            c.name,
            outcome.detail
        );
        std::io::stdout().flush().ok();
    };

    let cases = operator_cases();
    let corpus = theorem_corpus();
    let secs = Duration::from_secs;

    report(
        Criterion {
            id: 1,
            name: "gamma local formula",
            limit: Some(secs(10)),
        },
        &mut || c1_gamma_local(&cases),
    );
    report(
        Criterion {
            id: 2,
            name: "gamma2 local formula",
            limit: Some(secs(30)),
        },
        &mut || c2_gamma2_local(&cases),
    );
    report(
        Criterion {
            id: 3,
            name: "gamma iteration",
            limit: None,
        },
        &mut || c3_iteration(&cases),
    );
    report(
        Criterion {
            id: 4,
            name: "exact CD values",
            limit: None,
        },
        &mut c4_exact_values,
    );
    report(
        Criterion {
            id: 5,
            name: "CD bound on corpus",
            limit: Some(secs(60)),
        },
        &mut || c5_cd_corpus(&corpus),
    );
    report(
        Criterion {
            id: 6,
            name: "proof witness",
            limit: None,
        },
        &mut || c6_witness(&corpus),
    );
    report(
        Criterion {
            id: 7,
            name: "eigen vs Rayleigh oracle",
            limit: None,
        },
        &mut || c7_rayleigh(&corpus),
    );
    report(
        Criterion {
            id: 8,
            name: "CDE falsification search",
            limit: Some(secs(300)),
        },
        &mut || c8_cde(&corpus),
    );
    report(
        Criterion {
            id: 9,
            name: "girth oracle",
            limit: None,
        },
        &mut || c9_girth(&corpus),
    );
    report(
        Criterion {
            id: 10,
            name: "invariance suite",
            limit: None,
        },
        &mut || c10_invariance(&cases, &corpus),
    );
    report(
        Criterion {
            id: 11,
            name: "CLI determinism and round trip",
            limit: None,
        },
        &mut c11_cli,
    );

    println!("{} of 11 criteria passed", 11 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
