//! Distribution of a triangle's 4-clique support.
//!
//! The support count `ζ` of a triangle is a sum of independent Bernoulli
//! variables, one per extension, so it follows a Poisson-binomial law. The
//! probability that the triangle exists and has support at least `k` is
//! `tri_prob * Pr[ζ >= k]`. This module evaluates that tail exactly with the
//! classic dynamic program and approximately with Poisson, translated
//! Poisson, normal and binomial laws, and picks a method per triangle.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::motif::ExtensionProfile;

/// Absolute slack used when comparing a probability against a threshold, so
/// values that equal `theta` up to rounding are accepted reproducibly.
pub const THRESHOLD_TOLERANCE: f64 = 1e-12;

/// `prob >= theta`, up to [`THRESHOLD_TOLERANCE`].
#[inline]
pub fn meets_threshold(prob: f64, theta: f64) -> bool {
    prob >= theta - THRESHOLD_TOLERANCE
}

/// Thresholds of the method selector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Hyperparams {
    /// `A`: at or above this many extensions, use the normal approximation.
    pub clt_min_cliques: usize,
    /// `B`: Poisson is only considered below this many extensions.
    pub poisson_max_cliques: usize,
    /// `C`: Poisson requires every extension probability below this.
    pub poisson_max_prob: f64,
    /// `D`: binomial requires the variance ratio to be at least this.
    pub binomial_min_ratio: f64,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Self {
            clt_min_cliques: 200,
            poisson_max_cliques: 100,
            poisson_max_prob: 0.25,
            binomial_min_ratio: 0.9,
        }
    }
}

impl Hyperparams {
    pub fn new(a: usize, b: usize, c: f64, d: f64) -> Result<Self> {
        if !(a > b && b > 0) {
            return Err(Error::Domain(format!(
                "hyperparameters need A > B > 0, got A={a}, B={b}"
            )));
        }
        if !(c > 0.0 && c < 1.0) {
            return Err(Error::Domain(format!(
                "hyperparameter C must be in (0,1), got {c}"
            )));
        }
        if !(d > 0.0 && d <= 1.0) {
            return Err(Error::Domain(format!(
                "hyperparameter D must be in (0,1], got {d}"
            )));
        }
        Ok(Self {
            clt_min_cliques: a,
            poisson_max_cliques: b,
            poisson_max_prob: c,
            binomial_min_ratio: d,
        })
    }
}

/// Parses `A,B,C,D`.
impl FromStr for Hyperparams {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 4 {
            return Err(Error::Domain(format!("expected A,B,C,D, got `{s}`")));
        }
        let bad = |what: &str| Error::Domain(format!("invalid hyperparameter {what} in `{s}`"));
        Self::new(
            parts[0].parse().map_err(|_| bad("A"))?,
            parts[1].parse().map_err(|_| bad("B"))?,
            parts[2].parse().map_err(|_| bad("C"))?,
            parts[3].parse().map_err(|_| bad("D"))?,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ApproxMethod {
    Dp,
    Poisson,
    TranslatedPoisson,
    Clt,
    Binomial,
}

impl ApproxMethod {
    pub const ALL: [ApproxMethod; 5] = [
        ApproxMethod::Dp,
        ApproxMethod::Poisson,
        ApproxMethod::TranslatedPoisson,
        ApproxMethod::Clt,
        ApproxMethod::Binomial,
    ];
}

impl fmt::Display for ApproxMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            ApproxMethod::Dp => "dp",
            ApproxMethod::Poisson => "poisson",
            ApproxMethod::TranslatedPoisson => "translated-poisson",
            ApproxMethod::Clt => "clt",
            ApproxMethod::Binomial => "binomial",
        };
        f.write_str(name)
    }
}

/// Mean, variance and related sums of the extension probabilities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub count: usize,
    pub mean: f64,
    pub variance: f64,
    pub sum_squares: f64,
    pub max: f64,
}

impl Moments {
    pub fn of(ext: &[f64]) -> Self {
        let mean: f64 = ext.iter().sum();
        let sum_squares: f64 = ext.iter().map(|p| p * p).sum();
        Self {
            count: ext.len(),
            mean,
            variance: ext.iter().map(|p| p * (1.0 - p)).sum(),
            sum_squares,
            max: ext.iter().copied().fold(0.0, f64::max),
        }
    }

    /// Variance of the binomial law with `n = count` and `n p = mean`.
    pub fn binomial_variance(&self) -> f64 {
        if self.count == 0 {
            return 0.0;
        }
        self.mean * (1.0 - self.mean / self.count as f64)
    }
}

/// Exact distribution of the support of one triangle, already scaled by the
/// triangle's existence probability.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportDistribution {
    probs: Vec<f64>,
    tails: Vec<f64>,
}

impl SupportDistribution {
    /// `Pr(triangle exists and support = k)` for `k = 0..=c`.
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// `Pr(triangle exists and support >= k)`; zero beyond the clique count.
    pub fn tail(&self, k: usize) -> f64 {
        self.tails.get(k).copied().unwrap_or(0.0)
    }

    pub fn tri_prob(&self) -> f64 {
        self.tail(0)
    }

    /// Largest `k` whose tail meets `theta`.
    pub fn max_k(&self, theta: f64) -> Option<usize> {
        if !meets_threshold(self.tri_prob(), theta) {
            return None;
        }
        Some(
            self.tails
                .iter()
                .take_while(|&&t| meets_threshold(t, theta))
                .count()
                - 1,
        )
    }
}

/// `Pr[ζ = j]` for `j = 0..=limit`, where `ζ` counts realized extensions.
/// Entries up to `limit` are exact even though higher counts are dropped.
fn zeta_pmf(ext: &[f64], limit: usize) -> Vec<f64> {
    let limit = limit.min(ext.len());
    let mut row = vec![0.0; limit + 1];
    row[0] = 1.0;
    for (j, &p) in ext.iter().enumerate() {
        let top = limit.min(j + 1);
        for k in (1..=top).rev() {
            row[k] = p * row[k - 1] + (1.0 - p) * row[k];
        }
        row[0] *= 1.0 - p;
    }
    row
}

/// Full support distribution by dynamic programming over the extensions.
pub fn dp_distribution(profile: &ExtensionProfile) -> SupportDistribution {
    let c = profile.clique_count();
    let probs: Vec<f64> = zeta_pmf(&profile.ext_probs, c)
        .into_iter()
        .map(|x| x * profile.tri_prob)
        .collect();
    let mut tails = vec![0.0; c + 1];
    let mut acc = 0.0;
    for k in (0..=c).rev() {
        acc += probs[k];
        tails[k] = acc;
    }
    // pin the top of the tail to the triangle's own probability
    if let Some(t0) = tails.first_mut() {
        *t0 = profile.tri_prob;
    }
    SupportDistribution { probs, tails }
}

/// Tail of a Poisson law with rate `lambda`, built incrementally from
/// `Pr[Π < 1] = e^{-λ}` and `Pr[Π < k] = Pr[Π < k-1] + λ/(k-1) Pr[Π = k-2]`.
struct PoissonTail {
    lambda: f64,
    k: usize,
    below: f64,
    last_pmf: f64,
}

impl PoissonTail {
    fn new(lambda: f64) -> Self {
        Self {
            lambda,
            k: 0,
            below: 0.0,
            last_pmf: 0.0,
        }
    }

    /// `Pr[Π >= k]` for the next `k`, starting at `k = 0`.
    fn next_tail(&mut self) -> f64 {
        let k = self.k;
        self.k += 1;
        match k {
            0 => 1.0,
            1 => {
                self.last_pmf = (-self.lambda).exp();
                self.below = self.last_pmf;
                (1.0 - self.below).max(0.0)
            }
            _ => {
                self.last_pmf *= self.lambda / (k - 1) as f64;
                self.below += self.last_pmf;
                (1.0 - self.below).max(0.0)
            }
        }
    }
}

fn poisson_tails(lambda: f64, limit: usize) -> Vec<f64> {
    let mut tail = PoissonTail::new(lambda);
    (0..=limit).map(|_| tail.next_tail()).collect()
}

fn translated_poisson_tails(m: &Moments, limit: usize) -> Vec<f64> {
    let shift = (m.mean - m.variance).max(0.0).floor() as usize;
    let rate = (m.mean - shift as f64).max(0.0);
    let mut tail = PoissonTail::new(rate);
    (0..=limit)
        .map(|k| {
            if k <= shift {
                1.0
            } else {
                tail_at(&mut tail, k - shift)
            }
        })
        .collect()
}

fn tail_at(tail: &mut PoissonTail, k: usize) -> f64 {
    let mut value = 1.0;
    while tail.k <= k {
        value = tail.next_tail();
    }
    value
}

fn clt_tails(m: &Moments, limit: usize) -> Vec<f64> {
    let sigma = m.variance.max(0.0).sqrt();
    (0..=limit)
        .map(|k| {
            if k == 0 {
                1.0
            } else if sigma == 0.0 {
                // all extensions certain: point mass at the mean
                if (k as f64) <= m.mean + 1e-9 {
                    1.0
                } else {
                    0.0
                }
            } else {
                0.5 * erfc((k as f64 - m.mean) / (sigma * std::f64::consts::SQRT_2))
            }
        })
        .collect()
}

fn binomial_tails(m: &Moments, limit: usize) -> Vec<f64> {
    let n = m.count;
    if n == 0 {
        return (0..=limit)
            .map(|k| if k == 0 { 1.0 } else { 0.0 })
            .collect();
    }
    let p = (m.mean / n as f64).min(1.0);
    if p >= 1.0 {
        return (0..=limit)
            .map(|k| if k <= n { 1.0 } else { 0.0 })
            .collect();
    }
    let mut tails = Vec::with_capacity(limit + 1);
    let mut pmf = (1.0 - p).powi(n as i32);
    let mut below = 0.0;
    tails.push(1.0);
    for k in 1..=limit {
        below += pmf;
        tails.push((1.0 - below).max(0.0));
        // pmf(k) from pmf(k-1)
        pmf *= (n - k + 1) as f64 * p / (k as f64 * (1.0 - p));
    }
    tails
}

/// `Pr[ζ >= k]` for `k = 0..=limit` (clipped to the clique count) under
/// `method`. Does not include the triangle's existence probability.
pub fn zeta_tails(ext: &[f64], method: ApproxMethod, limit: usize) -> Vec<f64> {
    let limit = limit.min(ext.len());
    let m = Moments::of(ext);
    match method {
        ApproxMethod::Dp => {
            let pmf = zeta_pmf(ext, limit);
            let mut below = 0.0f64;
            pmf.iter()
                .map(|&x| {
                    let t = (1.0 - below).max(0.0);
                    below += x;
                    t
                })
                .collect()
        }
        ApproxMethod::Poisson => poisson_tails(m.mean, limit),
        ApproxMethod::TranslatedPoisson => translated_poisson_tails(&m, limit),
        ApproxMethod::Clt => clt_tails(&m, limit),
        ApproxMethod::Binomial => binomial_tails(&m, limit),
    }
}

fn scan_max_k(tri_prob: f64, theta: f64, tails: &[f64]) -> Option<usize> {
    if !meets_threshold(tri_prob, theta) {
        return None;
    }
    let mut best = 0;
    for (k, &t) in tails.iter().enumerate().skip(1) {
        if meets_threshold(tri_prob * t, theta) {
            best = k;
        } else {
            break;
        }
    }
    Some(best)
}

/// Largest `k` with `tri_prob * Pr[ζ >= k] >= theta` under `method`, never
/// exceeding `cap` when one is given. `None` when the triangle itself is
/// less likely than `theta`.
pub fn max_k_capped(
    tri_prob: f64,
    ext: &[f64],
    theta: f64,
    method: ApproxMethod,
    cap: Option<usize>,
) -> Option<usize> {
    if !meets_threshold(tri_prob, theta) {
        return None;
    }
    let mut limit = ext.len().min(cap.unwrap_or(usize::MAX));
    if method == ApproxMethod::Dp {
        // Markov: tri_prob * Pr[ζ >= k] <= tri_prob * mean / k
        let mean: f64 = ext.iter().sum();
        let bound = (tri_prob * mean / theta).ceil();
        if bound.is_finite() && bound >= 0.0 {
            limit = limit.min(bound as usize);
        }
    }
    let tails = zeta_tails(ext, method, limit);
    scan_max_k(tri_prob, theta, &tails)
}

pub fn max_k(profile: &ExtensionProfile, theta: f64, method: ApproxMethod) -> Option<usize> {
    max_k_capped(profile.tri_prob, &profile.ext_probs, theta, method, None)
}

pub fn poisson_max_k(profile: &ExtensionProfile, theta: f64) -> Option<usize> {
    max_k(profile, theta, ApproxMethod::Poisson)
}

pub fn translated_poisson_max_k(profile: &ExtensionProfile, theta: f64) -> Option<usize> {
    max_k(profile, theta, ApproxMethod::TranslatedPoisson)
}

pub fn clt_max_k(profile: &ExtensionProfile, theta: f64) -> Option<usize> {
    max_k(profile, theta, ApproxMethod::Clt)
}

pub fn binomial_max_k(profile: &ExtensionProfile, theta: f64) -> Option<usize> {
    max_k(profile, theta, ApproxMethod::Binomial)
}

/// Chooses the evaluation method for a set of extension probabilities.
pub fn select_method_for(ext: &[f64], hp: &Hyperparams) -> ApproxMethod {
    let m = Moments::of(ext);
    if m.count >= hp.clt_min_cliques {
        return ApproxMethod::Clt;
    }
    if m.count < hp.poisson_max_cliques && m.max < hp.poisson_max_prob {
        return ApproxMethod::Poisson;
    }
    if m.sum_squares > 1.0 {
        return ApproxMethod::TranslatedPoisson;
    }
    let (exact, binomial) = (m.variance, m.binomial_variance());
    let (lo, hi) = if exact <= binomial {
        (exact, binomial)
    } else {
        (binomial, exact)
    };
    let ratio = if hi <= 0.0 { 1.0 } else { lo / hi };
    if ratio >= hp.binomial_min_ratio {
        return ApproxMethod::Binomial;
    }
    ApproxMethod::Dp
}

pub fn select_method(profile: &ExtensionProfile, hp: &Hyperparams) -> ApproxMethod {
    select_method_for(&profile.ext_probs, hp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn profile(tri: f64, ext: &[f64]) -> ExtensionProfile {
        ExtensionProfile::from_probs(tri, ext.to_vec())
    }

    /// Brute force over all 2^c outcomes of the extension indicators.
    fn enumerate_tails(tri: f64, ext: &[f64]) -> Vec<f64> {
        let c = ext.len();
        let mut pmf = vec![0.0; c + 1];
        for mask in 0u32..(1 << c) {
            let mut pr = tri;
            for (i, &p) in ext.iter().enumerate() {
                pr *= if mask >> i & 1 == 1 { p } else { 1.0 - p };
            }
            pmf[mask.count_ones() as usize] += pr;
        }
        (0..=c).map(|k| pmf[k..].iter().sum()).collect()
    }

    #[test]
    fn single_extension_of_seven_vertex_graph() {
        let d = dp_distribution(&profile(1.0, &[0.5]));
        assert_relative_eq!(d.tail(1), 0.5);
        assert_eq!(
            max_k(&profile(1.0, &[0.5]), 0.42, ApproxMethod::Dp),
            Some(1)
        );
    }

    #[test]
    fn k5_triangle() {
        let p = profile(0.216, &[0.216, 0.216]);
        let d = dp_distribution(&p);
        assert_relative_eq!(d.tail(2), 0.216f64.powi(3), epsilon = 1e-15);
        assert_relative_eq!(d.tail(2), 0.010077696, epsilon = 1e-9);
        assert_eq!(max_k(&p, 0.01, ApproxMethod::Dp), Some(2));
    }

    #[test]
    fn empty_profile() {
        let d = dp_distribution(&profile(0.7, &[]));
        assert_relative_eq!(d.tail(0), 0.7);
        assert_eq!(d.tail(1), 0.0);
        for m in ApproxMethod::ALL {
            assert_eq!(max_k(&profile(0.7, &[]), 0.5, m), Some(0));
        }
    }

    #[test]
    fn absent_when_triangle_below_threshold() {
        for m in ApproxMethod::ALL {
            assert_eq!(max_k(&profile(0.3, &[0.9]), 0.42, m), None);
        }
    }

    #[test]
    fn poisson_tail_recursion() {
        let t = poisson_tails(1.0, 3);
        assert_relative_eq!(1.0 - t[1], (-1.0f64).exp(), epsilon = 1e-15);
        assert_relative_eq!(1.0 - t[1], 0.367879, epsilon = 1e-6);
        assert_relative_eq!(t[2], 1.0 - 2.0 * (-1.0f64).exp(), epsilon = 1e-15);
        let p = profile(1.0, &[0.05; 20]);
        assert_eq!(poisson_max_k(&p, 0.26), Some(2));
        // 1 - 2.5/e is about 0.0803 at k = 3
        assert_eq!(poisson_max_k(&p, 0.27), Some(1));
    }

    #[test]
    fn translated_poisson() {
        // lambda_2 tiny: no shift, identical to Poisson
        let small = [0.01; 30];
        assert_eq!(
            zeta_tails(&small, ApproxMethod::TranslatedPoisson, 30),
            zeta_tails(&small, ApproxMethod::Poisson, 30)
        );
        // shifted support: k <= floor(lambda_2) has tail 1
        let ext = [0.9; 10];
        let m = Moments::of(&ext);
        let shift = (m.mean - m.variance).floor() as usize;
        assert_eq!(shift, 8);
        let tails = zeta_tails(&ext, ApproxMethod::TranslatedPoisson, 10);
        assert!(tails[..=shift].iter().all(|&t| t == 1.0));
        let p = profile(0.5, &ext);
        assert!(translated_poisson_max_k(&p, 0.5).unwrap() >= shift);
        // variance gap of the translated law is the fractional part of lambda_2
        let gap = (m.mean - shift as f64) - m.variance;
        assert!((0.0..1.0).contains(&gap));

        let half = profile(1.0, &[0.5; 8]);
        let exact = max_k(&half, 0.5, ApproxMethod::Dp).unwrap() as i64;
        let approx = translated_poisson_max_k(&half, 0.5).unwrap() as i64;
        assert!((exact - approx).abs() <= 1);
    }

    #[test]
    fn clt_symmetry_and_quantiles() {
        let p = profile(1.0, &[0.5; 400]);
        assert_eq!(clt_max_k(&p, 0.5), Some(200));
        assert_eq!(max_k(&p, 0.5, ApproxMethod::Dp), Some(200));
        assert_eq!(clt_max_k(&p, 0.975), Some(180));
        assert_eq!(max_k(&p, 0.975, ApproxMethod::Dp), Some(180));
        // k equal to the mean gives tail one half
        let tails = zeta_tails(&[0.5; 4], ApproxMethod::Clt, 4);
        assert_relative_eq!(tails[2], 0.5, epsilon = 1e-12);
        assert_eq!(clt_max_k(&profile(0.8, &[0.5; 4]), 0.4), Some(2));
        assert_eq!(clt_max_k(&profile(0.8, &[0.5; 4]), 0.41), Some(1));
        // degenerate variance
        assert_eq!(clt_max_k(&profile(1.0, &[1.0; 5]), 0.9), Some(5));
    }

    #[test]
    fn binomial_cases() {
        assert_eq!(binomial_max_k(&profile(1.0, &[0.6, 0.6]), 0.36), Some(2));
        assert_eq!(
            binomial_max_k(&profile(1.0, &[1.0, 1.0, 1.0]), 1.0),
            Some(3)
        );
        for &theta in &[0.05, 0.2, 0.35, 0.5, 0.8, 0.95] {
            let p = profile(0.9, &[0.3; 12]);
            assert_eq!(
                binomial_max_k(&p, theta),
                max_k(&p, theta, ApproxMethod::Dp)
            );
        }
    }

    #[test]
    fn selector_rules() {
        let hp = Hyperparams::default();
        assert_eq!(select_method_for(&[0.5; 250], &hp), ApproxMethod::Clt);
        assert_eq!(select_method_for(&[0.1; 50], &hp), ApproxMethod::Poisson);
        assert_eq!(
            select_method_for(&[0.2; 150], &hp),
            ApproxMethod::TranslatedPoisson
        );
        assert_eq!(
            select_method_for(&[0.5, 0.5, 0.5], &hp),
            ApproxMethod::Binomial
        );
        // variance ratio 0.18 / 0.5 < D
        assert_eq!(select_method_for(&[0.1, 0.9], &hp), ApproxMethod::Dp);
        assert_eq!(select_method_for(&[], &hp), ApproxMethod::Poisson);
    }

    #[test]
    fn hyperparams_parse_and_validate() {
        let hp: Hyperparams = "200,100,0.25,0.9".parse().unwrap();
        assert_eq!(hp, Hyperparams::default());
        assert!("100,200,0.25,0.9".parse::<Hyperparams>().is_err());
        assert!("200,100,1.0,0.9".parse::<Hyperparams>().is_err());
        assert!("200,100,0.25,0".parse::<Hyperparams>().is_err());
        assert!("200,100,0.25".parse::<Hyperparams>().is_err());
    }

    #[test]
    fn cap_limits_the_answer() {
        let p = [0.9; 10];
        assert_eq!(
            max_k_capped(1.0, &p, 0.1, ApproxMethod::Dp, Some(4)),
            Some(4)
        );
        assert_eq!(max_k_capped(1.0, &p, 0.1, ApproxMethod::Dp, None), Some(10));
    }

    fn ext_strategy(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(1e-6f64..=1.0, 0..=max_len)
    }

    proptest! {
        #[test]
        fn dp_matches_enumeration(tri in 1e-3f64..=1.0, ext in ext_strategy(10)) {
            let d = dp_distribution(&profile(tri, &ext));
            let brute = enumerate_tails(tri, &ext);
            for (k, &b) in brute.iter().enumerate() {
                prop_assert!((d.tail(k) - b).abs() < 1e-9);
            }
            prop_assert_eq!(d.tail(ext.len() + 1), 0.0);
            let total: f64 = d.probs().iter().sum();
            prop_assert!((total - tri).abs() < 1e-9);
        }

        #[test]
        fn dp_tail_is_monotone(tri in 1e-3f64..=1.0, ext in ext_strategy(40)) {
            let d = dp_distribution(&profile(tri, &ext));
            prop_assert_eq!(d.tail(0), tri);
            for k in 0..=ext.len() {
                prop_assert!(d.tail(k + 1) <= d.tail(k) + 1e-15);
                prop_assert!(d.probs()[k] >= 0.0);
            }
        }

        #[test]
        fn permutation_invariance(tri in 1e-3f64..=1.0, mut ext in ext_strategy(20), seed in any::<u64>()) {
            let a = dp_distribution(&profile(tri, &ext));
            // deterministic shuffle
            let n = ext.len();
            let mut s = seed;
            for i in (1..n).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ext.swap(i, (s >> 33) as usize % (i + 1));
            }
            let b = dp_distribution(&profile(tri, &ext));
            for k in 0..=n {
                prop_assert!((a.tail(k) - b.tail(k)).abs() < 1e-12);
            }
        }

        #[test]
        fn truncated_dp_agrees_with_full(tri in 1e-3f64..=1.0, ext in ext_strategy(30), theta in 1e-3f64..=1.0) {
            let full = dp_distribution(&profile(tri, &ext)).max_k(theta);
            let fast = max_k(&profile(tri, &ext), theta, ApproxMethod::Dp);
            prop_assert_eq!(full, fast);
        }

        #[test]
        fn max_k_monotone_in_theta(tri in 1e-3f64..=1.0, ext in ext_strategy(60), a in 1e-3f64..=1.0, b in 1e-3f64..=1.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            for m in ApproxMethod::ALL {
                let p = profile(tri, &ext);
                let (x, y) = (max_k(&p, lo, m), max_k(&p, hi, m));
                prop_assert!(y.is_none_or(|y| x.is_some_and(|x| x >= y)), "{m}: {x:?} vs {y:?}");
            }
        }

        #[test]
        fn le_cam_bound(ext in ext_strategy(100)) {
            let pmf = zeta_pmf(&ext, ext.len());
            let lambda: f64 = ext.iter().sum();
            let mut poi = (-lambda).exp();
            let mut l1 = 0.0;
            for (k, &x) in pmf.iter().enumerate() {
                if k > 0 {
                    poi *= lambda / k as f64;
                }
                l1 += (x - poi).abs();
            }
            let bound = 2.0 * ext.iter().map(|p| p * p).sum::<f64>();
            prop_assert!(ext.is_empty() || l1 < bound);
        }

        #[test]
        fn selector_is_deterministic(ext in ext_strategy(250)) {
            let hp = Hyperparams::default();
            prop_assert_eq!(select_method_for(&ext, &hp), select_method_for(&ext.clone(), &hp));
        }
    }
}
