//! Local nucleus decomposition by probabilistic triangle peeling.

use std::collections::BTreeSet;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::det::Mode;
use crate::error::{Error, Result};
use crate::graph::{EdgeId, VertexId};
use crate::motif::{TriangleId, TriangleIndex};
use crate::support::{max_k_capped, select_method_for, ApproxMethod, Hyperparams};
use crate::unionfind::UnionFind;

/// How support tails are evaluated during peeling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Backend {
    /// Dynamic programming for every triangle.
    #[default]
    Exact,
    /// Per-triangle choice between DP and the statistical approximations.
    Hybrid,
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Backend::Exact),
            "hybrid" => Ok(Backend::Hybrid),
            other => Err(Error::Domain(format!("unknown backend {other:?}"))),
        }
    }
}

impl std::fmt::Display for Backend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Backend::Exact => "exact",
            Backend::Hybrid => "hybrid",
        })
    }
}

/// Per-triangle nucleusness at a fixed threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct NucleusScores {
    pub theta: f64,
    /// Final score; `None` for triangles less likely than `theta`.
    pub nu: Vec<Option<u32>>,
    /// Score computed from the full extension profile before peeling.
    pub initial: Vec<Option<u32>>,
    /// Scored triangles in the order they were finalized.
    pub order: Vec<TriangleId>,
}

impl NucleusScores {
    pub fn score(&self, t: TriangleId) -> Option<u32> {
        self.nu[t as usize]
    }

    /// Largest score, or 0 when nothing is scored.
    pub fn max_score(&self) -> u32 {
        self.nu.iter().flatten().copied().max().unwrap_or(0)
    }
}

/// A connected dense subgraph at level `k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Nucleus {
    pub mode: Mode,
    pub k: u32,
    pub theta: f64,
    pub triangles: Vec<TriangleId>,
    pub edges: Vec<EdgeId>,
    pub vertices: Vec<VertexId>,
}

impl Nucleus {
    /// Builds a nucleus from an edge set, collecting the triangles of `idx`
    /// whose three edges all belong to it.
    pub fn from_edges(
        idx: &TriangleIndex,
        mode: Mode,
        k: u32,
        theta: f64,
        mut edges: Vec<EdgeId>,
    ) -> Self {
        edges.sort_unstable();
        edges.dedup();
        let triangles = (0..idx.len() as TriangleId)
            .filter(|&t| {
                idx.triangle_edges(t)
                    .iter()
                    .all(|e| edges.binary_search(e).is_ok())
            })
            .collect::<Vec<_>>();
        let vertices = vertices_of(idx, &triangles);
        Self {
            mode,
            k,
            theta,
            triangles,
            edges,
            vertices,
        }
    }

    /// Builds a nucleus from its triangles; edges are those of the triangles.
    pub fn from_triangles(
        idx: &TriangleIndex,
        mode: Mode,
        k: u32,
        theta: f64,
        mut triangles: Vec<TriangleId>,
    ) -> Self {
        triangles.sort_unstable();
        triangles.dedup();
        let mut edges: Vec<EdgeId> = triangles
            .iter()
            .flat_map(|&t| idx.triangle_edges(t))
            .collect();
        edges.sort_unstable();
        edges.dedup();
        let vertices = vertices_of(idx, &triangles);
        Self {
            mode,
            k,
            theta,
            triangles,
            edges,
            vertices,
        }
    }
}

fn vertices_of(idx: &TriangleIndex, triangles: &[TriangleId]) -> Vec<VertexId> {
    let mut vertices: Vec<VertexId> = triangles
        .iter()
        .flat_map(|&t| idx.triangle(t).vertices())
        .collect();
    vertices.sort_unstable();
    vertices.dedup();
    vertices
}

/// Orders nuclei by descending `k`, then by edge set.
pub fn sort_nuclei(nuclei: &mut [Nucleus]) {
    nuclei.sort_by(|a, b| b.k.cmp(&a.k).then_with(|| a.edges.cmp(&b.edges)));
}

fn evaluate(
    tri_prob: f64,
    ext: &[f64],
    theta: f64,
    hp: &Hyperparams,
    backend: Backend,
    cap: Option<usize>,
) -> Option<u32> {
    let method = match backend {
        Backend::Exact => ApproxMethod::Dp,
        Backend::Hybrid => select_method_for(ext, hp),
    };
    max_k_capped(tri_prob, ext, theta, method, cap).map(|k| k as u32)
}

struct Peeler<'a> {
    idx: &'a TriangleIndex,
    theta: f64,
    hp: &'a Hyperparams,
    backend: Backend,
    alive: Vec<bool>,
}

impl Peeler<'_> {
    /// Marks the clique at `slot` of `t` destroyed in all four triangles and
    /// returns the other three.
    fn destroy(&mut self, t: TriangleId, slot: usize) -> [TriangleId; 3] {
        let idx = self.idx;
        let base = idx.slots(t).start;
        let others = idx.extension_neighbors(t, slot - base);
        let z = idx.profile(t).ext_vertices[slot - base];
        let mut clique = idx.triangle(t).vertices().to_vec();
        clique.push(z);
        self.alive[slot] = false;
        for &o in &others {
            let ov = idx.triangle(o).vertices();
            let missing = *clique
                .iter()
                .find(|v| !ov.contains(v))
                .expect("fourth vertex");
            let i = idx.extension_slot(o, missing).expect("shared clique");
            self.alive[idx.slots(o).start + i] = false;
        }
        others
    }

    fn alive_slots(&self, t: TriangleId) -> Vec<usize> {
        self.idx.slots(t).filter(|&s| self.alive[s]).collect()
    }

    fn recompute(&self, t: TriangleId, cap: u32) -> u32 {
        let idx = self.idx;
        let base = idx.slots(t).start;
        let profile = idx.profile(t);
        let ext: Vec<f64> = self
            .alive_slots(t)
            .into_iter()
            .map(|s| profile.ext_probs[s - base])
            .collect();
        evaluate(
            profile.tri_prob,
            &ext,
            self.theta,
            self.hp,
            self.backend,
            Some(cap as usize),
        )
        .unwrap_or(0)
    }
}

struct Buckets {
    sets: Vec<BTreeSet<TriangleId>>,
    lowest: usize,
}

impl Buckets {
    fn new(max: usize) -> Self {
        Self {
            sets: vec![BTreeSet::new(); max + 1],
            lowest: 0,
        }
    }

    fn insert(&mut self, key: u32, t: TriangleId) {
        self.sets[key as usize].insert(t);
        self.lowest = self.lowest.min(key as usize);
    }

    fn remove(&mut self, key: u32, t: TriangleId) {
        self.sets[key as usize].remove(&t);
    }

    fn pop_min(&mut self) -> Option<(u32, TriangleId)> {
        while self.lowest < self.sets.len() {
            if let Some(t) = self.sets[self.lowest].pop_first() {
                return Some((self.lowest as u32, t));
            }
            self.lowest += 1;
        }
        None
    }
}

/// Peels triangles in order of current score, lowest id first among ties.
///
/// Triangles below `theta` are removed before peeling starts, taking their
/// 4-cliques with them. A neighbor's recomputed score is clamped to the
/// score of the triangle being finalized, so finalized scores never
/// decrease along the peeling order.
pub fn compute_scores(
    idx: &TriangleIndex,
    theta: f64,
    hp: &Hyperparams,
    backend: Backend,
) -> Result<NucleusScores> {
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(Error::Domain(format!(
            "theta must lie in (0, 1], got {theta}"
        )));
    }
    let n = idx.len();
    let initial: Vec<Option<u32>> = (0..n as TriangleId)
        .into_par_iter()
        .map(|t| {
            let p = idx.profile(t);
            evaluate(p.tri_prob, &p.ext_probs, theta, hp, backend, None)
        })
        .collect();

    let mut peeler = Peeler {
        idx,
        theta,
        hp,
        backend,
        alive: vec![true; idx.slot_count()],
    };
    let mut kappa = initial.clone();

    let mut touched = BTreeSet::new();
    for t in 0..n as TriangleId {
        if kappa[t as usize].is_none() {
            for slot in peeler.alive_slots(t) {
                touched.extend(peeler.destroy(t, slot));
            }
        }
    }
    for t in touched {
        if let Some(k) = kappa[t as usize] {
            kappa[t as usize] = Some(peeler.recompute(t, k).min(k));
        }
    }

    let max_key = kappa.iter().flatten().copied().max().unwrap_or(0) as usize;
    let mut buckets = Buckets::new(max_key);
    for (t, k) in kappa.iter().enumerate() {
        if let Some(k) = k {
            buckets.insert(*k, t as TriangleId);
        }
    }

    let mut nu = vec![None; n];
    let mut order = Vec::with_capacity(n);
    while let Some((k, t)) = buckets.pop_min() {
        nu[t as usize] = Some(k);
        order.push(t);
        let mut affected = BTreeSet::new();
        for slot in peeler.alive_slots(t) {
            for o in peeler.destroy(t, slot) {
                if kappa[o as usize].is_some_and(|ko| ko > k) {
                    affected.insert(o);
                }
            }
        }
        for o in affected {
            let old = kappa[o as usize].expect("scored neighbor");
            let new = peeler.recompute(o, old).clamp(k, old);
            if new != old {
                buckets.remove(old, o);
                buckets.insert(new, o);
                kappa[o as usize] = Some(new);
            }
        }
    }

    Ok(NucleusScores {
        theta,
        nu,
        initial,
        order,
    })
}

/// Connected components of triangles scoring at least `k`, joined through
/// 4-cliques whose four triangles all score at least `k`. Triangles with no
/// such clique are left out. `k` must be at least 1 for a non-empty result.
pub fn assemble_nuclei(idx: &TriangleIndex, scores: &NucleusScores, k: u32) -> Vec<Nucleus> {
    assemble_from_levels(idx, &scores.nu, k, Mode::Local, scores.theta)
}

/// Component assembly shared by every mode: `levels` gives each triangle's
/// score, `None` for unscored.
pub fn assemble_from_levels(
    idx: &TriangleIndex,
    levels: &[Option<u32>],
    k: u32,
    mode: Mode,
    theta: f64,
) -> Vec<Nucleus> {
    if k == 0 {
        return Vec::new();
    }
    let qualifies = |t: TriangleId| levels[t as usize].is_some_and(|s| s >= k);
    let mut uf = UnionFind::new(idx.len());
    let mut in_clique = vec![false; idx.len()];
    for clique in idx.cliques() {
        if clique.iter().all(|&t| qualifies(t)) {
            for &t in &clique {
                in_clique[t as usize] = true;
                uf.union(clique[0], t);
            }
        }
    }
    let mut groups: std::collections::BTreeMap<u32, Vec<TriangleId>> = Default::default();
    for t in 0..idx.len() as TriangleId {
        if in_clique[t as usize] {
            groups.entry(uf.find(t)).or_default().push(t);
        }
    }
    let mut nuclei: Vec<Nucleus> = groups
        .into_values()
        .map(|triangles| Nucleus::from_triangles(idx, mode, k, theta, triangles))
        .collect();
    sort_nuclei(&mut nuclei);
    nuclei
}

/// Nuclei for every `k` from the largest score down to 1.
pub fn decompose(idx: &TriangleIndex, scores: &NucleusScores) -> Vec<Nucleus> {
    let mut all: Vec<Nucleus> = (1..=scores.max_score())
        .into_par_iter()
        .flat_map_iter(|k| assemble_nuclei(idx, scores, k))
        .collect();
    sort_nuclei(&mut all);
    all
}
