//! Triangle enumeration and 4-clique extension profiles.
//!
//! Every 4-clique `{u, v, w, z}` containing a triangle `(u, v, w)` is
//! described by its extension vertex `z`: the three edges joining `z` to the
//! triangle form the extension set, present with probability
//! `p(u,z) p(v,z) p(w,z)`. The index stores these profiles per triangle
//! rather than materializing 4-cliques.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{EdgeId, ProbabilisticGraph, VertexId};

/// Position of a triangle in a [`TriangleIndex`].
pub type TriangleId = u32;

/// Vertex triple with `u < v < w`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triangle {
    pub u: VertexId,
    pub v: VertexId,
    pub w: VertexId,
}

impl Triangle {
    /// Sorts the three vertices into canonical order.
    pub fn new(a: VertexId, b: VertexId, c: VertexId) -> Self {
        let mut t = [a, b, c];
        t.sort_unstable();
        Self {
            u: t[0],
            v: t[1],
            w: t[2],
        }
    }

    pub fn vertices(&self) -> [VertexId; 3] {
        [self.u, self.v, self.w]
    }
}

/// A triangle's existence probability and the probabilities of each of its
/// 4-clique extensions, in ascending order of extension vertex.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExtensionProfile {
    pub tri_prob: f64,
    pub ext_probs: Vec<f64>,
    pub ext_vertices: Vec<VertexId>,
}

impl ExtensionProfile {
    /// Profile with no extension vertices recorded; handy for tests and
    /// callers that only care about the support distribution.
    pub fn from_probs(tri_prob: f64, ext_probs: Vec<f64>) -> Self {
        Self {
            tri_prob,
            ext_vertices: Vec::new(),
            ext_probs,
        }
    }

    /// Number of 4-cliques containing the triangle.
    pub fn clique_count(&self) -> usize {
        self.ext_probs.len()
    }
}

/// The triangle on the opposite side of a shared 4-clique.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NeighborTriangle {
    pub triangle: TriangleId,
    /// Sorted vertex set of the shared 4-clique.
    pub clique: [VertexId; 4],
}

/// All triangles of a graph with their extension profiles.
#[derive(Debug, Clone)]
pub struct TriangleIndex {
    triangles: Vec<Triangle>,
    lookup: HashMap<Triangle, TriangleId>,
    profiles: Vec<ExtensionProfile>,
    edges: Vec<[EdgeId; 3]>,
    // For extension i of triangle t: the other three triangles of that clique,
    // stored flat at offsets[t] + i.
    offsets: Vec<usize>,
    ext_neighbors: Vec<[TriangleId; 3]>,
}

/// Triangles of `g` in lexicographic order, found by orienting each edge
/// from lower to higher (degree, id) rank and intersecting forward lists.
fn enumerate_triangles(g: &ProbabilisticGraph) -> Vec<Triangle> {
    let n = g.vertex_count();
    let rank_key = |v: VertexId| (g.degree(v), v);
    let forward: Vec<Vec<VertexId>> = (0..n as VertexId)
        .map(|u| {
            let mut out: Vec<VertexId> = g
                .neighbors(u)
                .iter()
                .map(|nb| nb.vertex)
                .filter(|&v| rank_key(v) > rank_key(u))
                .collect();
            out.sort_unstable();
            out
        })
        .collect();

    let mut triangles: Vec<Triangle> = (0..n as VertexId)
        .into_par_iter()
        .flat_map_iter(|u| {
            let fu = &forward[u as usize];
            let mut found = Vec::new();
            for &v in fu {
                let fv = &forward[v as usize];
                let (mut i, mut j) = (0, 0);
                while i < fu.len() && j < fv.len() {
                    match fu[i].cmp(&fv[j]) {
                        std::cmp::Ordering::Less => i += 1,
                        std::cmp::Ordering::Greater => j += 1,
                        std::cmp::Ordering::Equal => {
                            found.push(Triangle::new(u, v, fu[i]));
                            i += 1;
                            j += 1;
                        }
                    }
                }
            }
            found
        })
        .collect();
    triangles.par_sort_unstable();
    triangles
}

/// Common neighbors of the three triangle vertices, ascending, with the
/// probability product of the three connecting edges.
fn extensions(g: &ProbabilisticGraph, t: &Triangle) -> (Vec<VertexId>, Vec<f64>) {
    let (a, b, c) = (g.neighbors(t.u), g.neighbors(t.v), g.neighbors(t.w));
    let (mut i, mut j, mut k) = (0, 0, 0);
    let mut verts = Vec::new();
    let mut probs = Vec::new();
    while i < a.len() && j < b.len() && k < c.len() {
        let (x, y, z) = (a[i].vertex, b[j].vertex, c[k].vertex);
        let m = x.max(y).max(z);
        if x == m && y == m && z == m {
            verts.push(m);
            probs.push(g.prob(a[i].edge) * g.prob(b[j].edge) * g.prob(c[k].edge));
            i += 1;
            j += 1;
            k += 1;
        } else {
            if x < m {
                i += 1;
            }
            if y < m {
                j += 1;
            }
            if z < m {
                k += 1;
            }
        }
    }
    (verts, probs)
}

impl TriangleIndex {
    pub fn build(g: &ProbabilisticGraph) -> Self {
        let triangles = enumerate_triangles(g);
        let lookup: HashMap<Triangle, TriangleId> = triangles
            .iter()
            .enumerate()
            .map(|(i, &t)| (t, i as TriangleId))
            .collect();

        let edge = |a, b| g.edge_between(a, b).expect("triangle edge exists");
        let built: Vec<(ExtensionProfile, [EdgeId; 3])> = triangles
            .par_iter()
            .map(|t| {
                let edges = [edge(t.u, t.v), edge(t.u, t.w), edge(t.v, t.w)];
                let tri_prob = edges.iter().map(|&e| g.prob(e)).product();
                let (ext_vertices, ext_probs) = extensions(g, t);
                let profile = ExtensionProfile {
                    tri_prob,
                    ext_probs,
                    ext_vertices,
                };
                (profile, edges)
            })
            .collect();
        let (profiles, edges): (Vec<_>, Vec<_>) = built.into_iter().unzip();

        let mut offsets = Vec::with_capacity(triangles.len() + 1);
        let mut total = 0;
        for p in &profiles {
            offsets.push(total);
            total += p.clique_count();
        }
        offsets.push(total);

        let ext_neighbors: Vec<[TriangleId; 3]> = triangles
            .par_iter()
            .zip(profiles.par_iter())
            .flat_map_iter(|(t, p)| {
                let lookup = &lookup;
                p.ext_vertices.iter().map(move |&z| {
                    let id = |a, b, c| lookup[&Triangle::new(a, b, c)];
                    [id(t.u, t.v, z), id(t.u, t.w, z), id(t.v, t.w, z)]
                })
            })
            .collect();

        Self {
            triangles,
            lookup,
            profiles,
            edges,
            offsets,
            ext_neighbors,
        }
    }

    pub fn len(&self) -> usize {
        self.triangles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    pub fn triangles(&self) -> &[Triangle] {
        &self.triangles
    }

    pub fn triangle(&self, id: TriangleId) -> Triangle {
        self.triangles[id as usize]
    }

    pub fn id_of(&self, t: &Triangle) -> Option<TriangleId> {
        self.lookup.get(t).copied()
    }

    pub fn profile(&self, id: TriangleId) -> &ExtensionProfile {
        &self.profiles[id as usize]
    }

    /// Edge ids `(u,v), (u,w), (v,w)` of a triangle.
    pub fn triangle_edges(&self, id: TriangleId) -> [EdgeId; 3] {
        self.edges[id as usize]
    }

    /// Other three triangles of the clique formed with extension `i`.
    pub fn extension_neighbors(&self, id: TriangleId, i: usize) -> [TriangleId; 3] {
        self.ext_neighbors[self.offsets[id as usize] + i]
    }

    /// Positions of the triangle's extensions in a flat array covering every
    /// (triangle, extension) pair; see [`TriangleIndex::slot_count`].
    pub fn slots(&self, id: TriangleId) -> std::ops::Range<usize> {
        self.offsets[id as usize]..self.offsets[id as usize + 1]
    }

    pub fn slot_count(&self) -> usize {
        self.ext_neighbors.len()
    }

    /// Index of extension vertex `z` in the profile of `id`.
    pub fn extension_slot(&self, id: TriangleId, z: VertexId) -> Option<usize> {
        self.profiles[id as usize]
            .ext_vertices
            .binary_search(&z)
            .ok()
    }

    /// Triangles sharing a 4-clique with `t`, each with that clique.
    pub fn neighbor_triangles(&self, t: &Triangle) -> Result<Vec<NeighborTriangle>> {
        let id = self
            .id_of(t)
            .ok_or_else(|| Error::Index(format!("{t:?} is not a triangle of the graph")))?;
        let profile = &self.profiles[id as usize];
        let mut out = Vec::with_capacity(3 * profile.clique_count());
        for (i, &z) in profile.ext_vertices.iter().enumerate() {
            let mut clique = [t.u, t.v, t.w, z];
            clique.sort_unstable();
            for triangle in self.extension_neighbors(id, i) {
                out.push(NeighborTriangle { triangle, clique });
            }
        }
        Ok(out)
    }

    /// Every 4-clique exactly once, as its four triangle ids in lexicographic
    /// order of triangle (the first is the clique's lowest three vertices).
    pub fn cliques(&self) -> impl Iterator<Item = [TriangleId; 4]> + '_ {
        self.triangles.iter().enumerate().flat_map(move |(id, t)| {
            let profile = &self.profiles[id];
            let start = profile.ext_vertices.partition_point(|&z| z < t.w);
            (start..profile.clique_count()).map(move |i| {
                let [a, b, c] = self.extension_neighbors(id as TriangleId, i);
                [id as TriangleId, a, b, c]
            })
        })
    }

    pub fn clique_count(&self) -> usize {
        self.profiles
            .iter()
            .map(|p| p.clique_count())
            .sum::<usize>()
            / 4
    }
}

/// Builds the triangle index of `g`.
pub fn build_index(g: &ProbabilisticGraph) -> TriangleIndex {
    TriangleIndex::build(g)
}
