//! Probabilistic graph model and edge-list ingestion.
//!
//! Vertices are remapped to contiguous ids `0..n` ordered by their original
//! label, so the internal order agrees with the input labelling. Edges are
//! stored canonically with `u < v` and sorted, and an edge id is its position
//! in that list.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};

/// Internal (contiguous) vertex id.
pub type VertexId = u32;

/// Position of an edge in [`ProbabilisticGraph::edges`].
pub type EdgeId = usize;

/// An undirected edge with its existence probability. Always `u < v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbEdge {
    pub u: VertexId,
    pub v: VertexId,
    pub p: f64,
}

/// Neighbor entry in an adjacency list.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor {
    pub vertex: VertexId,
    pub edge: EdgeId,
}

/// Immutable undirected graph whose edges exist independently with the
/// stored probabilities.
#[derive(Debug, Clone)]
pub struct ProbabilisticGraph {
    labels: Vec<u64>,
    label_index: HashMap<u64, VertexId>,
    edges: Vec<ProbEdge>,
    adjacency: Vec<Vec<Neighbor>>,
}

fn check_probability(line: usize, p: f64) -> Result<()> {
    if p > 0.0 && p <= 1.0 {
        Ok(())
    } else {
        Err(Error::BadProbability { line, p })
    }
}

impl ProbabilisticGraph {
    /// Builds a graph from `(label_u, label_v, p)` triples. Error line numbers
    /// refer to the 1-based position of the offending triple.
    pub fn from_labeled_edges<I>(edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u64, u64, f64)>,
    {
        let lines: Vec<(usize, u64, u64, f64)> = edges
            .into_iter()
            .enumerate()
            .map(|(i, (u, v, p))| (i + 1, u, v, p))
            .collect();
        Self::build(lines)
    }

    fn build(raw: Vec<(usize, u64, u64, f64)>) -> Result<Self> {
        let mut labels: Vec<u64> = Vec::with_capacity(raw.len() * 2);
        for &(line, u, v, p) in &raw {
            if u == v {
                return Err(Error::SelfLoop { line, vertex: u });
            }
            check_probability(line, p)?;
            labels.push(u);
            labels.push(v);
        }
        labels.sort_unstable();
        labels.dedup();
        let label_index: HashMap<u64, VertexId> = labels
            .iter()
            .enumerate()
            .map(|(i, &l)| (l, i as VertexId))
            .collect();

        let mut keyed: Vec<(VertexId, VertexId, f64, usize, u64, u64)> = raw
            .iter()
            .map(|&(line, lu, lv, p)| {
                let (a, b) = (label_index[&lu], label_index[&lv]);
                let (u, v) = if a < b { (a, b) } else { (b, a) };
                (u, v, p, line, lu, lv)
            })
            .collect();
        keyed.sort_by_key(|x| (x.0, x.1, x.3));
        for pair in keyed.windows(2) {
            if pair[0].0 == pair[1].0 && pair[0].1 == pair[1].1 {
                let dup = &pair[1];
                return Err(Error::DuplicateEdge {
                    line: dup.3,
                    u: dup.4,
                    v: dup.5,
                });
            }
        }

        let edges: Vec<ProbEdge> = keyed
            .iter()
            .map(|&(u, v, p, ..)| ProbEdge { u, v, p })
            .collect();
        let mut adjacency = vec![Vec::new(); labels.len()];
        for (id, e) in edges.iter().enumerate() {
            adjacency[e.u as usize].push(Neighbor {
                vertex: e.v,
                edge: id,
            });
            adjacency[e.v as usize].push(Neighbor {
                vertex: e.u,
                edge: id,
            });
        }
        for list in &mut adjacency {
            list.sort_unstable_by_key(|n| n.vertex);
        }

        Ok(Self {
            labels,
            label_index,
            edges,
            adjacency,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[ProbEdge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> ProbEdge {
        self.edges[id]
    }

    pub fn prob(&self, id: EdgeId) -> f64 {
        self.edges[id].p
    }

    /// Neighbors of `v`, sorted by vertex id.
    pub fn neighbors(&self, v: VertexId) -> &[Neighbor] {
        &self.adjacency[v as usize]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adjacency[v as usize].len()
    }

    pub fn edge_between(&self, u: VertexId, v: VertexId) -> Option<EdgeId> {
        let list = self.adjacency.get(u as usize)?;
        list.binary_search_by_key(&v, |n| n.vertex)
            .ok()
            .map(|i| list[i].edge)
    }

    /// Original input label of an internal vertex.
    pub fn label(&self, v: VertexId) -> u64 {
        self.labels[v as usize]
    }

    /// Internal id of an input label.
    pub fn vertex_of(&self, label: u64) -> Option<VertexId> {
        self.label_index.get(&label).copied()
    }

    /// Writes the canonical edge list in the input format, using original labels.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for e in &self.edges {
            writeln!(out, "{} {} {}", self.label(e.u), self.label(e.v), e.p)?;
        }
        Ok(())
    }
}

/// Parses the whitespace-separated `u v p` edge-list format. Lines starting
/// with `#` and blank lines are skipped; LF and CRLF endings are accepted.
pub fn load_edge_list<R: BufRead>(source: R) -> Result<ProbabilisticGraph> {
    let mut raw = Vec::new();
    for (i, line) in source.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = text.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected `u v p`, found {} field(s)", fields.len()),
            });
        }
        let vertex = |s: &str| {
            s.parse::<u64>().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("invalid vertex id `{s}`"),
            })
        };
        let u = vertex(fields[0])?;
        let v = vertex(fields[1])?;
        let p = fields[2].parse::<f64>().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("invalid probability `{}`", fields[2]),
        })?;
        raw.push((line_no, u, v, p));
    }
    ProbabilisticGraph::build(raw)
}

/// A subset of a parent graph's edges. Its vertex set is the set of
/// endpoints of the selected edges.
#[derive(Debug, Clone)]
pub struct SubgraphView<'g> {
    parent: &'g ProbabilisticGraph,
    mask: FixedBitSet,
    edges: Vec<EdgeId>,
}

impl<'g> SubgraphView<'g> {
    pub fn full(parent: &'g ProbabilisticGraph) -> Self {
        let mut mask = FixedBitSet::with_capacity(parent.edge_count());
        mask.insert_range(..);
        Self {
            parent,
            mask,
            edges: (0..parent.edge_count()).collect(),
        }
    }

    pub fn empty(parent: &'g ProbabilisticGraph) -> Self {
        Self {
            parent,
            mask: FixedBitSet::with_capacity(parent.edge_count()),
            edges: Vec::new(),
        }
    }

    /// All parent edges with both endpoints in `vertices`.
    pub fn induced_by_vertices(parent: &'g ProbabilisticGraph, vertices: &[VertexId]) -> Self {
        let mut keep = FixedBitSet::with_capacity(parent.vertex_count());
        for &v in vertices {
            if (v as usize) < parent.vertex_count() {
                keep.insert(v as usize);
            }
        }
        let edges: Vec<EdgeId> = parent
            .edges()
            .iter()
            .enumerate()
            .filter(|(_, e)| keep.contains(e.u as usize) && keep.contains(e.v as usize))
            .map(|(i, _)| i)
            .collect();
        Self::from_sorted(parent, edges)
    }

    fn from_sorted(parent: &'g ProbabilisticGraph, edges: Vec<EdgeId>) -> Self {
        let mut mask = FixedBitSet::with_capacity(parent.edge_count());
        for &e in &edges {
            mask.insert(e);
        }
        Self {
            parent,
            mask,
            edges,
        }
    }

    pub fn parent(&self) -> &'g ProbabilisticGraph {
        self.parent
    }

    /// Selected parent edge ids, ascending.
    pub fn edge_ids(&self) -> &[EdgeId] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn contains_edge(&self, id: EdgeId) -> bool {
        id < self.mask.len() && self.mask.contains(id)
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Endpoints of the selected edges, ascending.
    pub fn vertices(&self) -> Vec<VertexId> {
        let mut seen = FixedBitSet::with_capacity(self.parent.vertex_count());
        for &e in &self.edges {
            let edge = self.parent.edge(e);
            seen.insert(edge.u as usize);
            seen.insert(edge.v as usize);
        }
        seen.ones().map(|v| v as VertexId).collect()
    }

    /// Neighbors of `v` reachable through selected edges.
    pub fn neighbors(&self, v: VertexId) -> impl Iterator<Item = Neighbor> + '_ {
        self.parent
            .neighbors(v)
            .iter()
            .copied()
            .filter(move |n| self.mask.contains(n.edge))
    }

    pub fn edge_between(&self, u: VertexId, v: VertexId) -> Option<EdgeId> {
        self.parent
            .edge_between(u, v)
            .filter(|&e| self.mask.contains(e))
    }
}

/// View over the given parent edge ids.
pub fn induced_edge_subgraph<'g>(
    g: &'g ProbabilisticGraph,
    edges: impl IntoIterator<Item = EdgeId>,
) -> Result<SubgraphView<'g>> {
    let mut ids: Vec<EdgeId> = Vec::new();
    for e in edges {
        if e >= g.edge_count() {
            return Err(Error::Index(format!(
                "edge id {e} (graph has {} edges)",
                g.edge_count()
            )));
        }
        ids.push(e);
    }
    ids.sort_unstable();
    ids.dedup();
    Ok(SubgraphView::from_sorted(g, ids))
}
