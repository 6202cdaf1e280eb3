//! Possible-world sampling and Monte-Carlo tail estimates.

use fixedbitset::FixedBitSet;
use rand_chacha::rand_core::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::det::{max_level, Mode, MotifSet, TailTable, WorldGraph};
use crate::error::{Error, Result};

/// Sample count used when none is given explicitly and the Hoeffding bound
/// asks for fewer.
pub const DEFAULT_MIN_SAMPLES: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingConfig {
    pub epsilon: f64,
    pub delta: f64,
    pub n_override: Option<usize>,
    pub base_seed: u64,
}

impl SamplingConfig {
    pub fn new(
        epsilon: f64,
        delta: f64,
        n_override: Option<usize>,
        base_seed: u64,
    ) -> Result<Self> {
        required_samples(epsilon, delta)?;
        if n_override == Some(0) {
            return Err(Error::Domain("sample count must be positive".into()));
        }
        Ok(Self {
            epsilon,
            delta,
            n_override,
            base_seed,
        })
    }

    /// Effective number of samples.
    pub fn samples(&self) -> usize {
        self.n_override
            .unwrap_or_else(|| required_samples(self.epsilon, self.delta).expect("validated"))
    }
}

/// Smallest `n` with `n >= ln(2/delta) / (2 epsilon^2)`.
pub fn required_samples(epsilon: f64, delta: f64) -> Result<usize> {
    for (name, x) in [("epsilon", epsilon), ("delta", delta)] {
        if !(x > 0.0 && x <= 1.0) {
            return Err(Error::Domain(format!("{name} must lie in (0, 1], got {x}")));
        }
    }
    let bound = (2.0 / delta).ln() / (2.0 * epsilon * epsilon);
    // absorb rounding noise so that exact integers are not pushed up by one
    Ok(((bound - 1e-9).ceil() as usize).max(1))
}

/// Draws one world of `m`. Edge `e` of sample `i` is decided by the word
/// pair at offset `2 * parent_id(e)` of ChaCha stream `i`, so every draw
/// depends only on `(base_seed, i, e)`.
pub fn sample_world<'m>(
    m: &'m MotifSet,
    sample_index: u64,
    cfg: &SamplingConfig,
) -> WorldGraph<'m> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.base_seed);
    rng.set_stream(sample_index);
    let mut present = FixedBitSet::with_capacity(m.edge_count());
    let mut next_pos = None;
    for (local, (&parent, &p)) in m.edge_ids().iter().zip(m.edge_probs()).enumerate() {
        let pos = 2 * parent as u128;
        if next_pos != Some(pos) {
            rng.set_word_pos(pos);
        }
        next_pos = Some(pos + 2);
        let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        if u < p {
            present.insert(local);
        }
    }
    WorldGraph::new(m, present)
}

/// Estimated `Pr(X >= k)` for every triangle of `m` and every `k` up to the
/// largest reachable level, from one pass of sampled worlds.
pub fn estimate_tail_table(m: &MotifSet, mode: Mode, cfg: &SamplingConfig) -> TailTable {
    let n = cfg.samples();
    let width = max_level(m) as usize + 1;
    let rows = m.triangles().len();
    let counts = (0..n as u64)
        .into_par_iter()
        .fold(
            || vec![0u64; rows * width],
            |mut acc, i| {
                let world = sample_world(m, i, cfg);
                for (t, level) in world.indicator_levels(mode).into_iter().enumerate() {
                    if let Some(level) = level {
                        acc[t * width + (level as usize).min(width - 1)] += 1;
                    }
                }
                acc
            },
        )
        .reduce(
            || vec![0u64; rows * width],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    let mass = counts
        .chunks(width.max(1))
        .take(rows)
        .map(|row| row.iter().map(|&c| c as f64 / n as f64).collect())
        .collect();
    TailTable::from_level_mass(mass)
}

/// Estimated `Pr(X >= k)` for the listed local triangles.
pub fn estimate_tails(
    m: &MotifSet,
    triangles: &[u32],
    k: u32,
    mode: Mode,
    cfg: &SamplingConfig,
) -> Vec<f64> {
    let table = estimate_tail_table(m, mode, cfg);
    triangles.iter().map(|&t| table.tail(t, k)).collect()
}
