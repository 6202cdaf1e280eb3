//! Shared fixtures for unit tests.

use crate::graph::{load_edge_list, ProbabilisticGraph, VertexId};

pub const SEVEN_VERTEX: &str = "\
# seven vertices, dense block on 1..5
1 2 1
1 5 1
1 3 1
1 4 0.6
1 6 0.8
1 7 0.8
2 3 1
2 4 1
2 5 0.5
3 4 1
3 5 1
6 7 0.8
";

pub fn seven_vertex() -> ProbabilisticGraph {
    load_edge_list(SEVEN_VERTEX.as_bytes()).unwrap()
}

pub fn complete(n: u64, p: f64) -> ProbabilisticGraph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            edges.push((u, v, p));
        }
    }
    ProbabilisticGraph::from_labeled_edges(edges).unwrap()
}

pub fn ids(g: &ProbabilisticGraph, labels: &[u64]) -> Vec<VertexId> {
    labels.iter().map(|&l| g.vertex_of(l).unwrap()).collect()
}
