//! Deterministic (3,4)-nucleus machinery evaluated on possible worlds.
//!
//! A [`MotifSet`] records the triangles and 4-cliques of a subgraph while
//! ignoring probabilities; a [`WorldGraph`] is one edge-presence mask over
//! it. Triangles and cliques of a world are the ones whose edges are all
//! present.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::graph::{EdgeId, SubgraphView, VertexId};
use crate::motif::Triangle;
use crate::unionfind::UnionFind;

/// Which indicator a tail probability is taken over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Triangle present with support at least `k`.
    Local,
    /// Triangle present and the whole world is a deterministic `k`-nucleus.
    Global,
    /// Triangle present and contained in some `k`-nucleus of the world.
    WeaklyGlobal,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Local => "local",
            Mode::Global => "global",
            Mode::WeaklyGlobal => "weakly-global",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LocalTriangle {
    pub vertices: [VertexId; 3],
    /// Local edge indices.
    pub edges: [u32; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LocalClique {
    pub vertices: [VertexId; 4],
    pub edges: [u32; 6],
    pub triangles: [u32; 4],
}

/// Triangles and 4-cliques of a subgraph, indexed locally.
#[derive(Debug, Clone)]
pub struct MotifSet {
    edge_ids: Vec<EdgeId>,
    edge_probs: Vec<f64>,
    triangles: Vec<LocalTriangle>,
    cliques: Vec<LocalClique>,
    tri_cliques: Vec<Vec<u32>>,
    lookup: HashMap<Triangle, u32>,
}

impl MotifSet {
    pub fn from_view(view: &SubgraphView<'_>) -> Self {
        let g = view.parent();
        let edge_ids = view.edge_ids().to_vec();
        let edge_probs = edge_ids.iter().map(|&e| g.prob(e)).collect();
        let vertices = view.vertices();
        let pos = |v: VertexId| vertices.binary_search(&v).expect("vertex of view");

        // neighbor lists restricted to the view, sorted by vertex
        let mut adj: Vec<Vec<(VertexId, u32)>> = vec![Vec::new(); vertices.len()];
        for (local, &e) in edge_ids.iter().enumerate() {
            let edge = g.edge(e);
            adj[pos(edge.u)].push((edge.v, local as u32));
            adj[pos(edge.v)].push((edge.u, local as u32));
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        let edge_of = |a: VertexId, b: VertexId| -> u32 {
            let list = &adj[pos(a)];
            list[list
                .binary_search_by_key(&b, |x| x.0)
                .expect("edge in view")]
            .1
        };

        let mut triangles = Vec::new();
        for (local, &e) in edge_ids.iter().enumerate() {
            let edge = g.edge(e);
            let (a, b) = (&adj[pos(edge.u)], &adj[pos(edge.v)]);
            let (mut i, mut j) = (0, 0);
            while i < a.len() && j < b.len() {
                match a[i].0.cmp(&b[j].0) {
                    std::cmp::Ordering::Less => i += 1,
                    std::cmp::Ordering::Greater => j += 1,
                    std::cmp::Ordering::Equal => {
                        let w = a[i].0;
                        if w > edge.v {
                            triangles.push(LocalTriangle {
                                vertices: [edge.u, edge.v, w],
                                edges: [local as u32, a[i].1, b[j].1],
                            });
                        }
                        i += 1;
                        j += 1;
                    }
                }
            }
        }
        triangles.sort_unstable_by_key(|t| t.vertices);
        let lookup: HashMap<Triangle, u32> = triangles
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let [u, v, w] = t.vertices;
                (Triangle { u, v, w }, i as u32)
            })
            .collect();

        let mut cliques = Vec::new();
        let mut tri_cliques = vec![Vec::new(); triangles.len()];
        for t in &triangles {
            let [u, v, w] = t.vertices;
            for &(z, _) in adj[pos(w)].iter().filter(|x| x.0 > w) {
                let linked = |x: VertexId| adj[pos(x)].binary_search_by_key(&z, |y| y.0).is_ok();
                if !(linked(u) && linked(v)) {
                    continue;
                }
                let tri = |a, b, c| lookup[&Triangle::new(a, b, c)];
                let id = cliques.len() as u32;
                let clique = LocalClique {
                    vertices: [u, v, w, z],
                    edges: [
                        edge_of(u, v),
                        edge_of(u, w),
                        edge_of(v, w),
                        edge_of(u, z),
                        edge_of(v, z),
                        edge_of(w, z),
                    ],
                    triangles: [tri(u, v, w), tri(u, v, z), tri(u, w, z), tri(v, w, z)],
                };
                for &tr in &clique.triangles {
                    tri_cliques[tr as usize].push(id);
                }
                cliques.push(clique);
            }
        }

        Self {
            edge_ids,
            edge_probs,
            triangles,
            cliques,
            tri_cliques,
            lookup,
        }
    }

    pub fn edge_count(&self) -> usize {
        self.edge_ids.len()
    }

    /// Parent edge id of each local edge.
    pub fn edge_ids(&self) -> &[EdgeId] {
        &self.edge_ids
    }

    pub fn edge_probs(&self) -> &[f64] {
        &self.edge_probs
    }

    pub fn triangles(&self) -> &[LocalTriangle] {
        &self.triangles
    }

    pub fn cliques(&self) -> &[LocalClique] {
        &self.cliques
    }

    /// Cliques containing a local triangle.
    pub fn cliques_of(&self, t: u32) -> &[u32] {
        &self.tri_cliques[t as usize]
    }

    pub fn triangle_id(&self, t: &Triangle) -> Option<u32> {
        self.lookup.get(t).copied()
    }

    /// The same edges with only the 4-cliques accepted by `keep`, and only
    /// the triangles of those cliques.
    pub fn restrict(&self, keep: impl Fn(&LocalClique) -> bool) -> MotifSet {
        let cliques: Vec<&LocalClique> = self.cliques.iter().filter(|c| keep(c)).collect();
        let mut new_id = vec![u32::MAX; self.triangles.len()];
        for c in &cliques {
            for &t in &c.triangles {
                new_id[t as usize] = 0;
            }
        }
        let mut triangles = Vec::new();
        for (t, id) in new_id.iter_mut().enumerate() {
            if *id == 0 {
                *id = triangles.len() as u32;
                triangles.push(self.triangles[t]);
            }
        }
        let mut tri_cliques = vec![Vec::new(); triangles.len()];
        let cliques: Vec<LocalClique> = cliques
            .into_iter()
            .enumerate()
            .map(|(i, c)| {
                let triangles = c.triangles.map(|t| new_id[t as usize]);
                for &t in &triangles {
                    tri_cliques[t as usize].push(i as u32);
                }
                LocalClique { triangles, ..*c }
            })
            .collect();
        let lookup = triangles
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let [u, v, w] = t.vertices;
                (Triangle { u, v, w }, i as u32)
            })
            .collect();
        MotifSet {
            edge_ids: self.edge_ids.clone(),
            edge_probs: self.edge_probs.clone(),
            triangles,
            cliques,
            tri_cliques,
            lookup,
        }
    }

    /// World in which every edge is present.
    pub fn full_world(&self) -> WorldGraph<'_> {
        let mut present = FixedBitSet::with_capacity(self.edge_count());
        present.insert_range(..);
        WorldGraph::new(self, present)
    }
}

/// One possible world: a presence bit per local edge of a [`MotifSet`].
#[derive(Debug, Clone)]
pub struct WorldGraph<'m> {
    motifs: &'m MotifSet,
    present: FixedBitSet,
}

impl<'m> WorldGraph<'m> {
    pub fn new(motifs: &'m MotifSet, mut present: FixedBitSet) -> Self {
        present.grow(motifs.edge_count());
        Self { motifs, present }
    }

    /// World whose present edges are the low bits of `mask`.
    pub fn from_mask(motifs: &'m MotifSet, mask: u64) -> Self {
        let mut present = FixedBitSet::with_capacity(motifs.edge_count());
        for i in 0..motifs.edge_count().min(64) {
            if mask >> i & 1 == 1 {
                present.insert(i);
            }
        }
        Self { motifs, present }
    }

    pub fn motifs(&self) -> &'m MotifSet {
        self.motifs
    }

    pub fn edge_present(&self, e: u32) -> bool {
        self.present.contains(e as usize)
    }

    pub fn present_edges(&self) -> &FixedBitSet {
        &self.present
    }

    pub fn triangle_present(&self, t: u32) -> bool {
        self.motifs.triangles[t as usize]
            .edges
            .iter()
            .all(|&e| self.edge_present(e))
    }

    pub fn clique_present(&self, c: u32) -> bool {
        self.motifs.cliques[c as usize]
            .edges
            .iter()
            .all(|&e| self.edge_present(e))
    }

    fn clique_mask(&self) -> Vec<bool> {
        (0..self.motifs.cliques.len() as u32)
            .map(|c| self.clique_present(c))
            .collect()
    }

    /// Number of present 4-cliques containing `t`.
    pub fn support(&self, t: u32) -> u32 {
        self.motifs.tri_cliques[t as usize]
            .iter()
            .filter(|&&c| self.clique_present(c))
            .count() as u32
    }

    /// Per-triangle indicator level: the indicator for `k` holds exactly when
    /// the entry is `Some(level)` with `level >= k`. Absent triangles are `None`.
    pub fn indicator_levels(&self, mode: Mode) -> Vec<Option<u32>> {
        match mode {
            Mode::Local => (0..self.motifs.triangles.len() as u32)
                .map(|t| self.triangle_present(t).then(|| self.support(t)))
                .collect(),
            Mode::WeaklyGlobal => det_scores(self),
            Mode::Global => {
                let level = nucleus_level(self);
                (0..self.motifs.triangles.len() as u32)
                    .map(|t| {
                        if self.triangle_present(t) {
                            level
                        } else {
                            None
                        }
                    })
                    .collect()
            }
        }
    }
}

/// Per-triangle tail probabilities `Pr(X >= k)` for `k = 0..len`, indexed by
/// local triangle id.
#[derive(Debug, Clone, PartialEq)]
pub struct TailTable {
    tails: Vec<Vec<f64>>,
}

impl TailTable {
    /// Builds tails from per-triangle level masses: `mass[t][k]` is the
    /// weight of worlds whose level for `t` is exactly `k` (the last entry
    /// collects every level at or above it).
    pub fn from_level_mass(mass: Vec<Vec<f64>>) -> Self {
        let tails = mass
            .into_iter()
            .map(|mut row| {
                let mut acc = 0.0;
                for x in row.iter_mut().rev() {
                    acc += *x;
                    *x = acc;
                }
                row
            })
            .collect();
        Self { tails }
    }

    pub fn len(&self) -> usize {
        self.tails.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tails.is_empty()
    }

    /// `Pr(X >= k)` for local triangle `t`; zero past the tracked range.
    pub fn tail(&self, t: u32, k: u32) -> f64 {
        self.tails[t as usize]
            .get(k as usize)
            .copied()
            .unwrap_or(0.0)
    }

    pub fn row(&self, t: u32) -> &[f64] {
        &self.tails[t as usize]
    }
}

/// Highest level any triangle of `m` can reach in any world.
pub fn max_level(m: &MotifSet) -> u32 {
    m.tri_cliques.iter().map(Vec::len).max().unwrap_or(0) as u32
}

/// Deterministic nucleusness of every present triangle, by repeatedly
/// removing a triangle of minimum remaining support. Absent triangles map to
/// `None`.
pub fn det_scores(w: &WorldGraph<'_>) -> Vec<Option<u32>> {
    let m = w.motifs;
    let n = m.triangles.len();
    let clique_alive = w.clique_mask();
    let mut alive = clique_alive.clone();
    let mut support = vec![0u32; n];
    for (c, clique) in m.cliques.iter().enumerate() {
        if clique_alive[c] {
            for &t in &clique.triangles {
                support[t as usize] += 1;
            }
        }
    }
    let mut scores: Vec<Option<u32>> = vec![None; n];
    let mut heap = BinaryHeap::new();
    let mut pending = 0;
    for t in 0..n as u32 {
        if w.triangle_present(t) {
            heap.push(Reverse((support[t as usize], t)));
            pending += 1;
        }
    }
    let mut done = vec![false; n];
    let mut level = 0;
    while pending > 0 {
        let Reverse((s, t)) = heap.pop().expect("pending triangles remain");
        if done[t as usize] || s != support[t as usize] {
            continue;
        }
        level = level.max(s);
        done[t as usize] = true;
        pending -= 1;
        scores[t as usize] = Some(level);
        for &c in &m.tri_cliques[t as usize] {
            if !alive[c as usize] {
                continue;
            }
            alive[c as usize] = false;
            for &o in &m.cliques[c as usize].triangles {
                if o != t && !done[o as usize] {
                    support[o as usize] -= 1;
                    heap.push(Reverse((support[o as usize], o)));
                }
            }
        }
    }
    scores
}

/// `Some(min support)` when the world is a union of 4-cliques whose
/// triangles are all 4-clique-connected; `None` otherwise, including for
/// the edgeless world.
pub fn nucleus_level(w: &WorldGraph<'_>) -> Option<u32> {
    let m = w.motifs;
    if w.present.count_ones(..) == 0 {
        return None;
    }
    let clique_alive = w.clique_mask();
    let mut covered = FixedBitSet::with_capacity(m.edge_count());
    let mut uf = UnionFind::new(m.triangles.len());
    for (c, clique) in m.cliques.iter().enumerate() {
        if clique_alive[c] {
            for &e in &clique.edges {
                covered.insert(e as usize);
            }
            for &t in &clique.triangles[1..] {
                uf.union(clique.triangles[0], t);
            }
        }
    }
    if !w.present.is_subset(&covered) {
        return None;
    }
    let mut root = None;
    let mut min_support = u32::MAX;
    for t in 0..m.triangles.len() as u32 {
        if !w.triangle_present(t) {
            continue;
        }
        let r = uf.find(t);
        match root {
            None => root = Some(r),
            Some(r0) if r0 != r => return None,
            _ => {}
        }
        min_support = min_support.min(w.support(t));
    }
    root.map(|_| min_support)
}

/// Whether the world as a whole is a deterministic `k`-nucleus.
pub fn is_k_nucleus(w: &WorldGraph<'_>, k: u32) -> bool {
    nucleus_level(w).is_some_and(|level| level >= k)
}

/// Largest `k` such that some `k`-nucleus inside the world contains the
/// local triangle `t`; `None` when `t` is absent.
pub fn max_k_nucleus_containing(w: &WorldGraph<'_>, t: u32) -> Option<u32> {
    if !w.triangle_present(t) {
        return None;
    }
    det_scores(w)[t as usize]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{ProbabilisticGraph, SubgraphView};
    use crate::testutil::{complete, ids, seven_vertex};
    use proptest::prelude::*;

    fn motifs_of(g: &ProbabilisticGraph) -> MotifSet {
        MotifSet::from_view(&SubgraphView::full(g))
    }

    #[test]
    fn complete_graphs() {
        for n in 4..=7u64 {
            let g = complete(n, 1.0);
            let m = motifs_of(&g);
            let w = m.full_world();
            let scores = det_scores(&w);
            assert!(scores.iter().all(|&s| s == Some(n as u32 - 3)), "K{n}");
            assert!(is_k_nucleus(&w, n as u32 - 3));
            assert!(!is_k_nucleus(&w, n as u32 - 2));
        }
    }

    #[test]
    fn triangle_free_world() {
        let g = ProbabilisticGraph::from_labeled_edges([(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let m = motifs_of(&g);
        assert!(det_scores(&m.full_world()).is_empty());
        assert!(!is_k_nucleus(&m.full_world(), 0));
    }

    #[test]
    fn edgeless_world_is_not_a_nucleus() {
        let g = complete(4, 1.0);
        let m = motifs_of(&g);
        let w = WorldGraph::from_mask(&m, 0);
        assert!(!is_k_nucleus(&w, 0));
        assert!(!is_k_nucleus(&w, 1));
    }

    #[test]
    fn sampled_world_of_block() {
        let g = seven_vertex();
        let v = ids(&g, &[1, 2, 3, 4, 5]);
        let view = SubgraphView::induced_by_vertices(&g, &v);
        let m = MotifSet::from_view(&view);
        let w = m.full_world();
        assert!(is_k_nucleus(&w, 1));
        assert!(!is_k_nucleus(&w, 2));

        // drop (2,5): triangle (1,3,5) loses its only 4-clique
        let e25 = g.edge_between(v[1], v[4]).unwrap();
        let local = m.edge_ids().iter().position(|&e| e == e25).unwrap();
        let mut present = w.present_edges().clone();
        present.set(local, false);
        let w2 = WorldGraph::new(&m, present);
        assert!(!is_k_nucleus(&w2, 1));
    }

    #[test]
    fn two_k4_sharing_a_vertex() {
        let mut edges = Vec::new();
        for group in [[0u64, 1, 2, 3], [3, 4, 5, 6]] {
            for i in 0..4 {
                for j in i + 1..4 {
                    edges.push((group[i], group[j], 1.0));
                }
            }
        }
        let g = ProbabilisticGraph::from_labeled_edges(edges).unwrap();
        let m = motifs_of(&g);
        let w = m.full_world();
        for t in 0..m.triangles().len() as u32 {
            assert_eq!(max_k_nucleus_containing(&w, t), Some(1));
        }
        // two disconnected nuclei: the world as a whole is not one
        assert!(!is_k_nucleus(&w, 1));
        let absent = WorldGraph::from_mask(&m, 0);
        assert_eq!(max_k_nucleus_containing(&absent, 0), None);
    }

    #[test]
    fn restriction_drops_incidental_triangles() {
        // two K4 {0,1,2,3} and {0,1,4,5} plus edges making triangle (2,3,4)
        let mut edges = Vec::new();
        for group in [[0u64, 1, 2, 3], [0, 1, 4, 5]] {
            for i in 0..4 {
                for j in i + 1..4 {
                    edges.push((group[i], group[j], 1.0));
                }
            }
        }
        edges.extend([(2, 4, 1.0), (3, 4, 1.0)]);
        edges.sort_by_key(|e| (e.0, e.1));
        edges.dedup_by_key(|e| (e.0, e.1));
        let g = ProbabilisticGraph::from_labeled_edges(edges).unwrap();
        let m = motifs_of(&g);
        let full = m.cliques().len();
        let r = m.restrict(|c| {
            c.vertices[..] == ids(&g, &[0, 1, 2, 3])[..]
                || c.vertices[..] == ids(&g, &[0, 1, 4, 5])[..]
        });
        assert!(full > 2);
        assert_eq!(r.cliques().len(), 2);
        assert_eq!(r.triangles().len(), 8);
        let v = ids(&g, &[2, 3, 4]);
        assert!(r.triangle_id(&Triangle::new(v[0], v[1], v[2])).is_none());
        assert!(m.triangle_id(&Triangle::new(v[0], v[1], v[2])).is_some());
        assert_eq!(r.edge_count(), m.edge_count());
        let w = r.full_world();
        assert_eq!(
            nucleus_level(&w),
            None,
            "edges (2,4), (3,4) lie in no kept clique"
        );
        let scores = det_scores(&w);
        assert!(scores.iter().all(|&s| s == Some(1)));
    }

    /// Subsets of the world's edges that form a k-nucleus containing `t`,
    /// searched exhaustively; returns the largest such k.
    fn brute_force_max_k(m: &MotifSet, world: u64, t: u32) -> Option<u32> {
        let tri_mask: u64 = m.triangles()[t as usize]
            .edges
            .iter()
            .map(|&e| 1u64 << e)
            .sum();
        if world & tri_mask != tri_mask {
            return None;
        }
        let mut best = None;
        let mut sub = world;
        loop {
            if sub & tri_mask == tri_mask {
                let w = WorldGraph::from_mask(m, sub);
                if let Some(level) = nucleus_level(&w) {
                    best = Some(best.map_or(level, |b: u32| b.max(level)));
                }
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & world;
        }
        Some(best.unwrap_or(0))
    }

    fn small_graph() -> impl Strategy<Value = Vec<(u64, u64)>> {
        // up to 9 distinct edges on 6 vertices
        prop::collection::btree_set((0u64..6, 0u64..6), 1..=14).prop_map(|pairs| {
            let mut seen = std::collections::BTreeSet::new();
            for (a, b) in pairs {
                if a != b {
                    seen.insert((a.min(b), a.max(b)));
                }
            }
            seen.into_iter().take(9).collect()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn scores_match_subgraph_search(edges in small_graph(), world in any::<u64>()) {
            prop_assume!(!edges.is_empty());
            let g = ProbabilisticGraph::from_labeled_edges(edges.iter().map(|&(a, b)| (a, b, 1.0))).unwrap();
            let m = motifs_of(&g);
            let world = world & ((1u64 << m.edge_count()) - 1);
            let w = WorldGraph::from_mask(&m, world);
            let scores = det_scores(&w);
            for t in 0..m.triangles().len() as u32 {
                prop_assert_eq!(scores[t as usize], brute_force_max_k(&m, world, t));
            }
        }

        #[test]
        fn nucleus_predicates_are_consistent(edges in small_graph(), world in any::<u64>()) {
            prop_assume!(!edges.is_empty());
            let g = ProbabilisticGraph::from_labeled_edges(edges.iter().map(|&(a, b)| (a, b, 1.0))).unwrap();
            let m = motifs_of(&g);
            let w = WorldGraph::from_mask(&m, world & ((1u64 << m.edge_count()) - 1));
            for k in 0..4 {
                if is_k_nucleus(&w, k + 1) {
                    prop_assert!(is_k_nucleus(&w, k));
                }
                if is_k_nucleus(&w, k) {
                    for t in 0..m.triangles().len() as u32 {
                        if w.triangle_present(t) {
                            prop_assert!(max_k_nucleus_containing(&w, t).unwrap() >= k);
                        }
                    }
                }
            }
        }
    }
}
