//! Global and weakly-global decompositions grown from local nuclei.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use rayon::prelude::*;

use crate::det::{Mode, MotifSet, TailTable};
use crate::error::Result;
use crate::graph::{induced_edge_subgraph, EdgeId, ProbabilisticGraph, VertexId};
use crate::local::{assemble_from_levels, assemble_nuclei, sort_nuclei, Nucleus, NucleusScores};
use crate::motif::{Triangle, TriangleId, TriangleIndex};
use crate::oracle::{exact_tail_table, OracleBudget};
use crate::sampling::{estimate_tail_table, SamplingConfig};
use crate::support::meets_threshold;
use crate::unionfind::UnionFind;

/// Source of `Pr(X >= k)` tables for candidate subgraphs.
pub trait TailEstimator: Sync {
    fn tail_table(&self, m: &MotifSet, mode: Mode) -> Result<TailTable>;
}

/// Sampled estimates.
#[derive(Debug, Clone, Copy)]
pub struct MonteCarlo(pub SamplingConfig);

impl TailEstimator for MonteCarlo {
    fn tail_table(&self, m: &MotifSet, mode: Mode) -> Result<TailTable> {
        Ok(estimate_tail_table(m, mode, &self.0))
    }
}

/// Exact probabilities by world enumeration; fails on oversized candidates.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExactOracle(pub OracleBudget);

impl TailEstimator for ExactOracle {
    fn tail_table(&self, m: &MotifSet, mode: Mode) -> Result<TailTable> {
        exact_tail_table(m, mode, &self.0)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct GlobalOptions {
    /// Restrict work to a single level.
    pub only_k: Option<u32>,
    /// Report every accepted candidate instead of the maximal ones.
    pub keep_nonmaximal: bool,
}

fn levels(scores: &NucleusScores, only_k: Option<u32>) -> Vec<u32> {
    let max = scores.max_score();
    match only_k {
        Some(k) if k >= 1 && k <= max => vec![k],
        Some(_) => Vec::new(),
        None => (1..=max).collect(),
    }
}

/// 4-cliques whose four triangles all score at least `k`, with the cliques
/// touching each triangle.
struct CliquePool {
    edges: Vec<Vec<EdgeId>>,
    vertices: Vec<[VertexId; 4]>,
    by_triangle: HashMap<TriangleId, Vec<usize>>,
}

impl CliquePool {
    fn new(idx: &TriangleIndex, scores: &NucleusScores, k: u32) -> Self {
        let mut pool = Self {
            edges: Vec::new(),
            vertices: Vec::new(),
            by_triangle: HashMap::new(),
        };
        for clique in idx.cliques() {
            if clique
                .iter()
                .all(|&t| scores.nu[t as usize].is_some_and(|s| s >= k))
            {
                let mut e: Vec<EdgeId> =
                    clique.iter().flat_map(|&t| idx.triangle_edges(t)).collect();
                e.sort_unstable();
                e.dedup();
                let mut v: Vec<VertexId> = clique
                    .iter()
                    .flat_map(|&t| idx.triangle(t).vertices())
                    .collect();
                v.sort_unstable();
                v.dedup();
                for &t in &clique {
                    pool.by_triangle
                        .entry(t)
                        .or_default()
                        .push(pool.edges.len());
                }
                pool.edges.push(e);
                pool.vertices.push([v[0], v[1], v[2], v[3]]);
            }
        }
        pool
    }

    /// Adds every pooled clique containing `t` to `h`; true if `h` grew.
    fn absorb(&self, t: TriangleId, h: &mut BTreeSet<EdgeId>) -> bool {
        let before = h.len();
        for &c in self.by_triangle.get(&t).into_iter().flatten() {
            h.extend(self.edges[c].iter().copied());
        }
        h.len() > before
    }
}

/// A candidate seen as the union of the pooled cliques inside its edge set:
/// motifs restricted to those cliques, and their triangles as parent ids.
struct Complex {
    motifs: MotifSet,
    triangles: Vec<TriangleId>,
}

fn complex(
    g: &ProbabilisticGraph,
    idx: &TriangleIndex,
    pool: &CliquePool,
    edges: &[EdgeId],
) -> Complex {
    let view = induced_edge_subgraph(g, edges.iter().copied()).expect("valid edge ids");
    let full = MotifSet::from_view(&view);
    let mut inside: HashSet<[VertexId; 4]> = HashSet::new();
    for tri in full.triangles() {
        let [u, v, w] = tri.vertices;
        let id = idx
            .id_of(&Triangle { u, v, w })
            .expect("triangle of parent");
        for &c in pool.by_triangle.get(&id).into_iter().flatten() {
            if pool.edges[c].iter().all(|e| edges.binary_search(e).is_ok()) {
                inside.insert(pool.vertices[c]);
            }
        }
    }
    let motifs = full.restrict(|c| {
        let mut v = c.vertices;
        v.sort_unstable();
        inside.contains(&v)
    });
    let triangles = motifs
        .triangles()
        .iter()
        .map(|t| {
            let [u, v, w] = t.vertices;
            idx.id_of(&Triangle { u, v, w })
                .expect("triangle of parent")
        })
        .collect();
    Complex { motifs, triangles }
}

/// Grows a candidate from `seed` until every one of its triangles lies in
/// at least `k` of its cliques or can grow no further.
fn closure(
    g: &ProbabilisticGraph,
    idx: &TriangleIndex,
    pool: &CliquePool,
    seed: TriangleId,
    k: u32,
) -> Vec<EdgeId> {
    let mut h = BTreeSet::new();
    pool.absorb(seed, &mut h);
    let mut expanded = BTreeSet::from([seed]);
    loop {
        let edges: Vec<EdgeId> = h.iter().copied().collect();
        let c = complex(g, idx, pool, &edges);
        let mut grew = false;
        for (local, &id) in c.triangles.iter().enumerate() {
            if c.motifs.cliques_of(local as u32).len() < k as usize && expanded.insert(id) {
                grew |= pool.absorb(id, &mut h);
            }
        }
        if !grew {
            return edges;
        }
    }
}

struct Judge<'a> {
    g: &'a ProbabilisticGraph,
    idx: &'a TriangleIndex,
    pool: &'a CliquePool,
    est: &'a dyn TailEstimator,
    k: u32,
    theta: f64,
}

impl Judge<'_> {
    /// Every triangle of the candidate meets `theta` under the global
    /// indicator.
    fn accepts(&self, edges: &[EdgeId]) -> Result<bool> {
        let c = complex(self.g, self.idx, self.pool, edges);
        if c.triangles.is_empty() {
            return Ok(false);
        }
        let table = self.est.tail_table(&c.motifs, Mode::Global)?;
        Ok((0..c.triangles.len() as u32)
            .all(|t| meets_threshold(table.tail(t, self.k), self.theta)))
    }

    fn triangles(&self, edges: &[EdgeId]) -> BTreeSet<TriangleId> {
        complex(self.g, self.idx, self.pool, edges)
            .triangles
            .into_iter()
            .collect()
    }
}

/// Grows the accepted set by unions of candidates sharing a triangle. Each
/// round first tries the union of every overlapping group at once; inside
/// groups whose union is rejected, members are merged greedily in order
/// into the first overlapping cluster that still passes.
fn merge_accepted(
    judge: &Judge<'_>,
    mut accepted: BTreeSet<Vec<EdgeId>>,
) -> Result<BTreeSet<Vec<EdgeId>>> {
    let mut rejected: BTreeSet<Vec<EdgeId>> = BTreeSet::new();
    let mut triangles: HashMap<Vec<EdgeId>, BTreeSet<TriangleId>> = HashMap::new();
    loop {
        let list: Vec<Vec<EdgeId>> = accepted.iter().cloned().collect();
        for c in &list {
            if !triangles.contains_key(c) {
                triangles.insert(c.clone(), judge.triangles(c));
            }
        }
        let mut uf = UnionFind::new(list.len());
        let mut owner: HashMap<TriangleId, u32> = HashMap::new();
        for (i, c) in list.iter().enumerate() {
            for &t in &triangles[c] {
                match owner.get(&t) {
                    Some(&j) => {
                        uf.union(i as u32, j);
                    }
                    None => {
                        owner.insert(t, i as u32);
                    }
                }
            }
        }
        let mut groups: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        for i in 0..list.len() {
            groups.entry(uf.find(i as u32)).or_default().push(i);
        }
        let groups: Vec<Vec<usize>> = groups.into_values().filter(|m| m.len() > 1).collect();

        let mut whole: Vec<Vec<EdgeId>> = groups
            .iter()
            .map(|members| {
                members
                    .iter()
                    .fold(Vec::new(), |acc, &i| union(&acc, &list[i]))
            })
            .filter(|u| !accepted.contains(u) && !rejected.contains(u))
            .collect();
        whole.sort();
        whole.dedup();
        let verdicts = whole
            .par_iter()
            .map(|u| judge.accepts(u))
            .collect::<Result<Vec<bool>>>()?;
        let mut grew = false;
        for (u, ok) in whole.into_iter().zip(verdicts) {
            if ok {
                grew |= accepted.insert(u);
            } else {
                rejected.insert(u);
            }
        }
        if grew {
            continue;
        }

        for members in &groups {
            let mut clusters: Vec<(Vec<EdgeId>, BTreeSet<TriangleId>)> = Vec::new();
            for &i in members {
                let tris = &triangles[&list[i]];
                let mut placed = false;
                for (edges, cluster_tris) in clusters.iter_mut() {
                    if cluster_tris.is_disjoint(tris) {
                        continue;
                    }
                    let u = union(edges, &list[i]);
                    let ok = if accepted.contains(&u) || u == *edges {
                        true
                    } else if rejected.contains(&u) {
                        false
                    } else if judge.accepts(&u)? {
                        true
                    } else {
                        rejected.insert(u.clone());
                        false
                    };
                    if ok {
                        *edges = u;
                        cluster_tris.extend(tris.iter().copied());
                        placed = true;
                        break;
                    }
                }
                if !placed {
                    clusters.push((list[i].clone(), tris.clone()));
                }
            }
            for (edges, _) in clusters {
                grew |= accepted.insert(edges);
            }
        }
        if !grew {
            return Ok(accepted);
        }
    }
}

fn union(a: &[EdgeId], b: &[EdgeId]) -> Vec<EdgeId> {
    let mut u: Vec<EdgeId> = a.iter().chain(b).copied().collect();
    u.sort_unstable();
    u.dedup();
    u
}

/// Fully global nuclei. For each level, candidates are closures of the
/// seed triangles within the union of local nuclei. A candidate is taken as
/// the union of the level's 4-cliques it contains, so triangles formed only
/// by edges of different cliques are not part of it. It is accepted
/// when every one of its triangles meets `theta` under the global
/// indicator. Accepted candidates sharing a triangle are then merged while
/// their union is also accepted, and non-maximal ones are dropped unless
/// `keep_nonmaximal` is set.
pub fn fg_decompose(
    g: &ProbabilisticGraph,
    idx: &TriangleIndex,
    scores: &NucleusScores,
    est: &dyn TailEstimator,
    opts: GlobalOptions,
) -> Result<Vec<Nucleus>> {
    let theta = scores.theta;
    let mut out = Vec::new();
    for k in levels(scores, opts.only_k) {
        let pool = CliquePool::new(idx, scores, k);
        let seeds: BTreeSet<TriangleId> = assemble_nuclei(idx, scores, k)
            .into_iter()
            .flat_map(|n| n.triangles)
            .collect();
        let candidates: BTreeSet<Vec<EdgeId>> = seeds
            .par_iter()
            .map(|&t| closure(g, idx, &pool, t, k))
            .collect::<Vec<_>>()
            .into_iter()
            .collect();
        let judge = Judge {
            g,
            idx,
            pool: &pool,
            est,
            k,
            theta,
        };
        let verdicts = candidates
            .par_iter()
            .map(|c| judge.accepts(c))
            .collect::<Result<Vec<bool>>>()?;
        let mut accepted: BTreeSet<Vec<EdgeId>> = candidates
            .into_iter()
            .zip(verdicts)
            .filter_map(|(c, ok)| ok.then_some(c))
            .collect();

        if !opts.keep_nonmaximal {
            accepted = merge_accepted(&judge, accepted)?;
            let all: Vec<Vec<EdgeId>> = accepted.iter().cloned().collect();
            accepted.retain(|c| {
                !all.iter()
                    .any(|o| o.len() > c.len() && c.iter().all(|e| o.binary_search(e).is_ok()))
            });
        }

        out.extend(accepted.into_iter().map(|edges| {
            Nucleus::from_triangles(
                idx,
                Mode::Global,
                k,
                theta,
                judge.triangles(&edges).into_iter().collect(),
            )
        }));
    }
    sort_nuclei(&mut out);
    Ok(out)
}

/// Weakly-global nuclei. Each local nucleus is sampled as the union of its
/// 4-cliques; a member
/// triangle qualifies when its estimated probability of lying in a
/// deterministic `k`-nucleus of the sampled world meets `theta`, and
/// qualifying triangles are grouped through 4-cliques made entirely of
/// qualifying triangles.
pub fn wg_decompose(
    g: &ProbabilisticGraph,
    idx: &TriangleIndex,
    scores: &NucleusScores,
    est: &dyn TailEstimator,
    opts: GlobalOptions,
) -> Result<Vec<Nucleus>> {
    let theta = scores.theta;
    let mut out = Vec::new();
    for k in levels(scores, opts.only_k) {
        let locals = assemble_nuclei(idx, scores, k);
        let pool = CliquePool::new(idx, scores, k);
        let qualified = locals
            .par_iter()
            .map(|l| -> Result<Vec<TriangleId>> {
                let m = complex(g, idx, &pool, &l.edges).motifs;
                let table = est.tail_table(&m, Mode::WeaklyGlobal)?;
                Ok(l.triangles
                    .iter()
                    .copied()
                    .filter(|&t| {
                        let local = m.triangle_id(&idx.triangle(t)).expect("member triangle");
                        meets_threshold(table.tail(local, k), theta)
                    })
                    .collect())
            })
            .collect::<Result<Vec<_>>>()?;
        let mut level = vec![None; idx.len()];
        for t in qualified.into_iter().flatten() {
            level[t as usize] = Some(k);
        }
        out.extend(assemble_from_levels(
            idx,
            &level,
            k,
            Mode::WeaklyGlobal,
            theta,
        ));
    }
    sort_nuclei(&mut out);
    Ok(out)
}

/// Groups nuclei by level.
pub fn by_level(nuclei: &[Nucleus]) -> BTreeMap<u32, Vec<&Nucleus>> {
    let mut map: BTreeMap<u32, Vec<&Nucleus>> = BTreeMap::new();
    for n in nuclei {
        map.entry(n.k).or_default().push(n);
    }
    map
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::local::{compute_scores, Backend};
    use crate::motif::build_index;
    use crate::support::Hyperparams;
    use crate::testutil::{complete, ids, seven_vertex};

    fn setup(g: &ProbabilisticGraph, theta: f64) -> (TriangleIndex, NucleusScores) {
        let idx = build_index(g);
        let s = compute_scores(&idx, theta, &Hyperparams::default(), Backend::Exact).unwrap();
        (idx, s)
    }

    fn vertex_sets(g: &ProbabilisticGraph, nuclei: &[Nucleus]) -> Vec<Vec<u64>> {
        let mut sets: Vec<Vec<u64>> = nuclei
            .iter()
            .map(|n| n.vertices.iter().map(|&v| g.label(v)).collect())
            .collect();
        sets.sort();
        sets
    }

    #[test]
    fn two_global_nuclei() {
        let g = seven_vertex();
        let (idx, s) = setup(&g, 0.42);
        let nuclei = fg_decompose(
            &g,
            &idx,
            &s,
            &ExactOracle::default(),
            GlobalOptions::default(),
        )
        .unwrap();
        assert_eq!(
            vertex_sets(&g, &nuclei),
            vec![vec![1, 2, 3, 4], vec![1, 2, 3, 5]]
        );
        assert!(nuclei
            .iter()
            .all(|n| n.k == 1 && n.mode == Mode::Global && n.edges.len() == 6));
    }

    #[test]
    fn whole_block_candidate_is_rejected() {
        let g = seven_vertex();
        let (idx, s) = setup(&g, 0.42);
        let pool = CliquePool::new(&idx, &s, 1);
        let judge = Judge {
            g: &g,
            idx: &idx,
            pool: &pool,
            est: &ExactOracle::default(),
            k: 1,
            theta: 0.42,
        };
        let v = ids(&g, &[1, 2, 3, 4, 5]);
        let view = crate::graph::SubgraphView::induced_by_vertices(&g, &v);
        assert!(!judge.accepts(view.edge_ids()).unwrap());
        let v = ids(&g, &[1, 2, 3, 5]);
        let view = crate::graph::SubgraphView::induced_by_vertices(&g, &v);
        assert!(judge.accepts(view.edge_ids()).unwrap());
    }

    #[test]
    fn seven_vertex_weakly_global() {
        let g = seven_vertex();
        let (idx, s) = setup(&g, 0.42);
        let nuclei = wg_decompose(
            &g,
            &idx,
            &s,
            &ExactOracle::default(),
            GlobalOptions::default(),
        )
        .unwrap();
        assert_eq!(vertex_sets(&g, &nuclei), vec![vec![1, 2, 3, 4, 5]]);
    }

    #[test]
    fn certain_k5() {
        let g = complete(5, 1.0);
        let (idx, s) = setup(&g, 0.7);
        let cfg = SamplingConfig::new(0.1, 0.1, None, 1).unwrap();
        for est in [
            &MonteCarlo(cfg) as &dyn TailEstimator,
            &ExactOracle::default(),
        ] {
            let opts = GlobalOptions {
                only_k: Some(2),
                ..Default::default()
            };
            let fg = fg_decompose(&g, &idx, &s, est, opts).unwrap();
            let wg = wg_decompose(&g, &idx, &s, est, opts).unwrap();
            for nuclei in [fg, wg] {
                assert_eq!(nuclei.len(), 1);
                assert_eq!((nuclei[0].k, nuclei[0].edges.len()), (2, 10));
            }
        }
    }

    #[test]
    fn k5_example_2_weakly_global_is_empty_at_level_2() {
        let g = complete(5, 0.6);
        let (idx, s) = setup(&g, 0.01);
        let opts = GlobalOptions {
            only_k: Some(2),
            ..Default::default()
        };
        assert!(wg_decompose(&g, &idx, &s, &ExactOracle::default(), opts)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn keep_nonmaximal_reports_raw_candidates() {
        // two K5 sharing a triangle: closures are the two K5 and the merge
        // joins them at k = 1
        let mut edges = Vec::new();
        for group in [[0u64, 1, 2, 3, 4], [0, 1, 2, 5, 6]] {
            for i in 0..5 {
                for j in i + 1..5 {
                    edges.push((group[i], group[j], 1.0));
                }
            }
        }
        edges.sort_by_key(|e| (e.0, e.1));
        edges.dedup_by_key(|e| (e.0, e.1));
        let g = ProbabilisticGraph::from_labeled_edges(edges).unwrap();
        let (idx, s) = setup(&g, 0.5);
        let cfg = MonteCarlo(SamplingConfig::new(0.1, 0.1, Some(20), 3).unwrap());
        let opts = GlobalOptions {
            only_k: Some(1),
            keep_nonmaximal: false,
        };
        let merged = fg_decompose(&g, &idx, &s, &cfg, opts).unwrap();
        let raw = fg_decompose(
            &g,
            &idx,
            &s,
            &cfg,
            GlobalOptions {
                keep_nonmaximal: true,
                ..opts
            },
        )
        .unwrap();
        assert_eq!(merged.len(), 1);
        assert_eq!(merged[0].vertices.len(), 7);
        assert!(raw.len() > 1);
        assert!(raw
            .iter()
            .all(|n| n.edges.iter().all(|e| merged[0].edges.contains(e))));
    }

    #[test]
    fn oracle_budget_errors_propagate() {
        let g = complete(7, 0.9);
        let (idx, s) = setup(&g, 0.1);
        let err = wg_decompose(
            &g,
            &idx,
            &s,
            &ExactOracle::default(),
            GlobalOptions::default(),
        );
        assert!(matches!(err, Err(crate::Error::Budget { .. })));
    }

    #[test]
    fn thread_count_does_not_change_output() {
        let g = complete(6, 0.8);
        let (idx, s) = setup(&g, 0.2);
        let est = MonteCarlo(SamplingConfig::new(0.1, 0.1, Some(200), 42).unwrap());
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| {
                    (
                        fg_decompose(&g, &idx, &s, &est, GlobalOptions::default()).unwrap(),
                        wg_decompose(&g, &idx, &s, &est, GlobalOptions::default()).unwrap(),
                    )
                })
        };
        assert_eq!(run(1), run(3));
    }
}
