#![allow(dead_code)]

//! Shared corpus generation for the integration and acceptance suites.
//! Everything is seeded; runs are reproducible.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use framekit::biased::BiasedGraph;
use framekit::subset::Mask;
use framekit::Multigraph;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random connected multigraph with loops and parallel edges allowed.
pub fn random_multigraph(rng: &mut ChaCha8Rng, max_vertices: usize, max_edges: usize) -> Multigraph {
    loop {
        let nv = rng.gen_range(1..=max_vertices);
        let ne = rng.gen_range(1..=max_edges);
        let mut edges = Vec::new();
        for k in 0..ne {
            let u = rng.gen_range(0..nv);
            let v = if rng.gen_bool(0.15) {
                u
            } else {
                rng.gen_range(0..nv)
            };
            edges.push((format!("g{k}"), u, v));
        }
        let g = Multigraph::from_indexed(nv, edges);
        let all_used = (0..nv).all(|v| g.degree_in(g.full_edge_mask(), v) > 0);
        if g.is_connected() && all_used {
            return g;
        }
    }
}

/// A random theta-valid biased graph: half the time a k-signed graph,
/// otherwise a random valid balanced set found by rejection (falling back
/// to contrabalanced, which is always valid).
pub fn random_biased_graph(
    rng: &mut ChaCha8Rng,
    max_vertices: usize,
    max_edges: usize,
) -> BiasedGraph {
    let g = random_multigraph(rng, max_vertices, max_edges);
    let ne = g.edge_count();
    if rng.gen_bool(0.5) {
        let k = rng.gen_range(0..=2usize);
        let sigma: Vec<Mask> = (0..k)
            .map(|_| rng.gen::<u64>() & g.full_edge_mask())
            .collect();
        let _ = ne;
        BiasedGraph::signed_masks(g, sigma).expect("signed graphs are valid")
    } else {
        let cycles = g.cycles().expect("corpus graphs are small");
        for _ in 0..24 {
            let balanced: std::collections::BTreeSet<Mask> = cycles
                .iter()
                .copied()
                .filter(|_| rng.gen_bool(0.4))
                .collect();
            if let Ok(bg) = BiasedGraph::explicit_masks(g.clone(), &balanced) {
                return bg;
            }
        }
        BiasedGraph::contrabalanced(g).expect("contrabalanced is always valid")
    }
}

/// Nontrivial edge bipartitions with both sides connected, if any.
pub fn connected_bipartitions(g: &Multigraph, limit: usize) -> Vec<Mask> {
    let full = g.full_edge_mask();
    let ne = g.edge_count();
    let mut out = Vec::new();
    if ne < 2 {
        return out;
    }
    for x in 1..(1u64 << (ne - 1)) {
        let y = full & !x;
        if g.is_edge_connected(x) && g.is_edge_connected(y) {
            out.push(x);
            if out.len() >= limit {
                break;
            }
        }
    }
    out
}
