//! Exact tail probabilities by enumerating every possible world.

use rayon::prelude::*;

use crate::det::{max_level, Mode, MotifSet, TailTable, WorldGraph};
use crate::error::{Error, Result};
use crate::graph::SubgraphView;
use crate::motif::Triangle;

pub const DEFAULT_MAX_EDGES: usize = 20;

const CHUNK_BITS: u32 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleBudget {
    pub max_edges: usize,
}

impl Default for OracleBudget {
    fn default() -> Self {
        Self {
            max_edges: DEFAULT_MAX_EDGES,
        }
    }
}

impl OracleBudget {
    pub fn check(&self, edges: usize) -> Result<()> {
        if edges > self.max_edges || edges >= 63 {
            return Err(Error::Budget {
                edges,
                max_edges: self.max_edges,
            });
        }
        Ok(())
    }
}

/// Neumaier compensated sum.
#[derive(Debug, Clone, Copy, Default)]
struct Sum {
    sum: f64,
    comp: f64,
}

impl Sum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

fn world_prob(probs: &[f64], mask: u64) -> f64 {
    probs
        .iter()
        .enumerate()
        .map(|(i, &p)| if mask >> i & 1 == 1 { p } else { 1.0 - p })
        .product()
}

/// Visits every world in fixed-size chunks of the mask range, folding each
/// chunk into its own accumulator and combining accumulators in chunk order.
fn enumerate<A, F, C>(
    m: &MotifSet,
    budget: &OracleBudget,
    init: impl Fn() -> A + Sync,
    visit: F,
    combine: C,
) -> Result<A>
where
    A: Send,
    F: Fn(&mut A, &WorldGraph<'_>, f64) + Sync,
    C: Fn(&mut A, A),
{
    let edges = m.edge_count();
    budget.check(edges)?;
    let total = 1u64 << edges;
    let chunk = 1u64 << CHUNK_BITS.min(edges as u32);
    let partials: Vec<A> = (0..total / chunk)
        .into_par_iter()
        .map(|c| {
            let mut acc = init();
            for mask in c * chunk..(c + 1) * chunk {
                let world = WorldGraph::from_mask(m, mask);
                visit(&mut acc, &world, world_prob(m.edge_probs(), mask));
            }
            acc
        })
        .collect();
    let mut out = init();
    for p in partials {
        combine(&mut out, p);
    }
    Ok(out)
}

/// Exact `Pr(X >= k)` for every triangle of `m` and every reachable `k`.
pub fn exact_tail_table(m: &MotifSet, mode: Mode, budget: &OracleBudget) -> Result<TailTable> {
    let width = max_level(m) as usize + 1;
    let rows = m.triangles().len();
    let sums = enumerate(
        m,
        budget,
        || vec![Sum::default(); rows * width],
        |acc, world, p| {
            for (t, level) in world.indicator_levels(mode).into_iter().enumerate() {
                if let Some(level) = level {
                    acc[t * width + (level as usize).min(width - 1)].add(p);
                }
            }
        },
        |acc, part| {
            for (a, b) in acc.iter_mut().zip(part) {
                a.add(b.sum);
                a.add(b.comp);
            }
        },
    )?;
    let mass = sums
        .chunks(width)
        .take(rows)
        .map(|row| row.iter().map(Sum::value).collect())
        .collect();
    Ok(TailTable::from_level_mass(mass))
}

/// Exact `Pr(X >= k)` of triangle `t` within the subgraph `h`.
pub fn exact_tail(
    h: &SubgraphView<'_>,
    t: &Triangle,
    k: u32,
    mode: Mode,
    budget: &OracleBudget,
) -> Result<f64> {
    budget.check(h.edge_count())?;
    let m = MotifSet::from_view(h);
    let local = m
        .triangle_id(t)
        .ok_or_else(|| Error::Index(format!("{t:?} is not a triangle of the subgraph")))?;
    Ok(exact_tail_table(&m, mode, budget)?.tail(local, k))
}

/// Total probability mass over all worlds of `m`; one up to rounding.
pub fn total_mass(m: &MotifSet, budget: &OracleBudget) -> Result<f64> {
    let s = enumerate(
        m,
        budget,
        Sum::default,
        |acc, _, p| acc.add(p),
        |acc, part| {
            acc.add(part.sum);
            acc.add(part.comp);
        },
    )?;
    Ok(s.value())
}
