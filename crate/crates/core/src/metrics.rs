//! Probabilistic density and clustering coefficient of a subgraph.

use crate::det::MotifSet;
use crate::error::{Error, Result};
use crate::graph::SubgraphView;

/// Expected edge count over the number of vertex pairs.
pub fn pd(h: &SubgraphView<'_>) -> Result<f64> {
    let n = h.vertices().len();
    if n < 2 {
        return Err(Error::Domain(format!(
            "density needs at least 2 vertices, got {n}"
        )));
    }
    let g = h.parent();
    let mass: f64 = h.edge_ids().iter().map(|&e| g.prob(e)).sum();
    Ok(mass / (0.5 * n as f64 * (n as f64 - 1.0)))
}

/// Three times the expected triangle count over the expected number of
/// wedges (unordered neighbor pairs at each center).
pub fn pcc(h: &SubgraphView<'_>) -> Result<f64> {
    let g = h.parent();
    let mut wedges = 0.0;
    for v in h.vertices() {
        let (s, sq) = h
            .neighbors(v)
            .map(|nb| g.prob(nb.edge))
            .fold((0.0, 0.0), |(s, sq), p| (s + p, sq + p * p));
        wedges += (s * s - sq) / 2.0;
    }
    if wedges <= 0.0 {
        return Err(Error::Domain(
            "clustering coefficient needs at least one wedge".into(),
        ));
    }
    let m = MotifSet::from_view(h);
    let probs = m.edge_probs();
    let closed: f64 = m
        .triangles()
        .iter()
        .map(|t| t.edges.iter().map(|&e| probs[e as usize]).product::<f64>())
        .sum();
    Ok(3.0 * closed / wedges)
}
