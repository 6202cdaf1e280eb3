#![allow(dead_code)]

use pnucleus::graph::{load_edge_list, ProbabilisticGraph, VertexId};
use rand::rngs::StdRng;
use rand::RngExt;

pub const SEVEN_VERTEX: &str = include_str!("../data/seven_vertex.txt");
pub const K5_P06: &str = include_str!("../data/k5_p06.txt");

pub fn seven_vertex() -> ProbabilisticGraph {
    load_edge_list(SEVEN_VERTEX.as_bytes()).unwrap()
}

pub fn complete(n: u64, p: f64) -> ProbabilisticGraph {
    let edges = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j, p)));
    ProbabilisticGraph::from_labeled_edges(edges).unwrap()
}

pub fn ids(g: &ProbabilisticGraph, labels: &[u64]) -> Vec<VertexId> {
    labels.iter().map(|&l| g.vertex_of(l).unwrap()).collect()
}

pub fn labels(g: &ProbabilisticGraph, vs: &[VertexId]) -> Vec<u64> {
    vs.iter().map(|&v| g.label(v)).collect()
}

/// Probability uniform in (0, 1].
pub fn open_unit(rng: &mut StdRng) -> f64 {
    1.0 - rng.random::<f64>()
}

/// Each pair of `0..n` kept with probability `density`, capped at
/// `max_edges`; `prob` draws each edge's probability. Never empty.
pub fn random_graph(
    rng: &mut StdRng,
    n: u64,
    density: f64,
    max_edges: usize,
    mut prob: impl FnMut(&mut StdRng) -> f64,
) -> ProbabilisticGraph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if edges.len() < max_edges && rng.random_bool(density) {
                edges.push((i, j, prob(rng)));
            }
        }
    }
    if edges.is_empty() {
        edges.push((0, 1, prob(rng)));
    }
    ProbabilisticGraph::from_labeled_edges(edges).unwrap()
}

/// `n` vertices with sparse background edges and dense planted groups of
/// 6 to 14 vertices; edge probabilities uniform in (0, 1].
pub fn planted_graph(rng: &mut StdRng, n: u64) -> ProbabilisticGraph {
    let mut pairs = std::collections::BTreeMap::new();
    let background = 3.0 / n as f64;
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(background) {
                pairs.insert((i, j), open_unit(rng));
            }
        }
    }
    let mut start = 0;
    while start < n {
        let size = rng.random_range(6..=14u64).min(n - start);
        for i in start..start + size {
            for j in i + 1..start + size {
                if rng.random_bool(0.8) {
                    pairs.insert((i, j), open_unit(rng));
                }
            }
        }
        start += size + rng.random_range(0..6u64);
    }
    ProbabilisticGraph::from_labeled_edges(pairs.into_iter().map(|((a, b), p)| (a, b, p))).unwrap()
}
