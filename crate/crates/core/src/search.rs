//! Site attribution: which sites, when removed, move lambda the most.
//!
//! The search enumerates every removal set of size `0..=removal_depth` and,
//! for each remaining set of sites, evaluates lambda under one of three
//! ordering strategies. The Benford matrix is ordering dependent from four
//! sites upward, so the strategy matters.
//!
//! Candidates are evaluated in parallel and reduced sequentially in
//! enumeration order. Lambda values within [`TIE_TOLERANCE`] of each other
//! count as ties; ties go to the lexicographically smallest removed id set
//! and then to the smallest ordering, where orderings are compared as rank
//! sequences relative to the canonical order (so the canonical ordering wins
//! every tie it takes part in).
//!
//! Degenerate evaluations (singular matrices) are skipped by the maximiser
//! and flagged in the per-site scores.

use std::collections::HashSet;

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{BenfordError, Result};
use crate::matrix::{
    canonical_order, lambda_for_counts, lambda_in_order, lambda_statistic, AnalysisResult,
    FrequencyVector, OrderMode,
};

/// Relative tolerance under which two lambda values are considered equal.
pub const TIE_TOLERANCE: f64 = 1e-12;

pub const DEFAULT_MAX_EXHAUSTIVE_N: usize = 8;
pub const DEFAULT_PERMUTATION_SAMPLES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderingMode {
    /// One ordering per site set: descending count, ties by id.
    Canonical,
    /// All `m!` orderings of the `m` remaining sites.
    ExhaustivePermutations,
    /// The canonical ordering plus distinct seeded random orderings.
    SampledPermutations,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    /// Maximum number of sites removed at once.
    pub removal_depth: usize,
    pub ordering_mode: OrderingMode,
    /// Orderings evaluated per site set in sampled mode, canonical included.
    pub permutation_sample_count: usize,
    pub seed: u64,
    pub max_exhaustive_n: usize,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            removal_depth: 1,
            ordering_mode: OrderingMode::Canonical,
            permutation_sample_count: DEFAULT_PERMUTATION_SAMPLES,
            seed: 0,
            max_exhaustive_n: DEFAULT_MAX_EXHAUSTIVE_N,
        }
    }
}

impl ScanConfig {
    pub fn with_depth(mut self, depth: usize) -> Self {
        self.removal_depth = depth;
        self
    }

    pub fn with_ordering(mut self, mode: OrderingMode) -> Self {
        self.ordering_mode = mode;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_samples(mut self, samples: usize) -> Self {
        self.permutation_sample_count = samples;
        self
    }

    fn validate(&self, n: usize) -> Result<()> {
        if n < 2 || self.removal_depth > n - 2 {
            return Err(BenfordError::Config(format!(
                "removal depth {} would leave fewer than 2 of {n} sites",
                self.removal_depth
            )));
        }
        match self.ordering_mode {
            OrderingMode::ExhaustivePermutations if n > self.max_exhaustive_n => {
                Err(BenfordError::SearchSpaceTooLarge {
                    n,
                    max: self.max_exhaustive_n,
                })
            }
            OrderingMode::SampledPermutations if self.permutation_sample_count == 0 => Err(
                BenfordError::Config("sampled ordering needs at least one sample".into()),
            ),
            _ => Ok(()),
        }
    }
}

/// Leave-one-out attribution for one site.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SiteScore {
    pub site_id: String,
    /// `lambda(all sites) - lambda(without this site)`. Positive means the
    /// site pushes the data away from the Benford mean. `None` when the
    /// reduced problem is degenerate.
    #[serde(with = "crate::extreal::option")]
    pub delta_lambda: Option<f64>,
    /// 1-based, by descending `|delta_lambda|`; undefined deltas rank last.
    pub rank: usize,
    pub degenerate: bool,
}

/// The lambda-maximising removal set and ordering.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaxLambdaSubset {
    /// Removed site ids, ascending.
    pub removed: Vec<String>,
    /// Remaining site ids in the maximising order.
    pub ordering: Vec<String>,
    pub lambda: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    /// Lambda of the full site set in canonical order.
    #[serde(with = "crate::extreal")]
    pub baseline_lambda: f64,
    pub ordering_mode: OrderingMode,
    pub removal_depth: usize,
    /// Sorted by rank. Empty when the removal depth is 0.
    pub per_site_scores: Vec<SiteScore>,
    /// `None` only if every evaluation was degenerate.
    pub max_lambda_subset: Option<MaxLambdaSubset>,
    /// Number of lambda evaluations (one per ordering per site set).
    pub computations_performed: u64,
    pub degenerate_evaluations: u64,
}

/// Leave-one-out scan: lambda of the full set against lambda with each site
/// removed, under `config.ordering_mode`. Needs at least 3 sites. The removal
/// depth is fixed at 1 here; `config.removal_depth` is ignored.
pub fn leave_one_out_scan(f: &FrequencyVector, config: &ScanConfig) -> Result<ScanResult> {
    if f.len() < 3 {
        return Err(BenfordError::InvalidFrequencies(format!(
            "leave-one-out scan needs at least 3 sites, got {}",
            f.len()
        )));
    }
    run_search(f, &config.clone().with_depth(1))
}

/// Maximises lambda over all removal sets up to `config.removal_depth` and
/// over orderings. Per-site scores are filled in when the depth is at least 1.
pub fn max_lambda_search(f: &FrequencyVector, config: &ScanConfig) -> Result<ScanResult> {
    run_search(f, config)
}

/// Lambda of `f` maximised over orderings of the full site set.
pub fn max_permutation_analysis(
    f: &FrequencyVector,
    config: &ScanConfig,
) -> Result<AnalysisResult> {
    if config.ordering_mode == OrderingMode::Canonical {
        return Ok(lambda_statistic(f));
    }
    let result = run_search(f, &config.clone().with_depth(0))?;
    Ok(match result.max_lambda_subset {
        Some(best) => {
            let position = |id: &String| {
                f.sites()
                    .iter()
                    .position(|s| &s.id == id)
                    .expect("known id")
            };
            let order: Vec<usize> = best.ordering.iter().map(position).collect();
            lambda_in_order(&f.reordered(&order)?, OrderMode::MaxPermutation)
        }
        None => lambda_in_order(&f.canonical(), OrderMode::MaxPermutation),
    })
}

struct SubsetBest {
    lambda: f64,
    /// Rank sequence relative to the canonical order of the kept sites.
    key: Vec<usize>,
}

struct SubsetEval {
    removed: Vec<usize>,
    kept_canonical: Vec<usize>,
    best: Option<SubsetBest>,
    evaluations: u64,
    degenerate: u64,
}

impl SubsetEval {
    /// Best lambda under the ordering strategy; `+inf` if every ordering was
    /// degenerate.
    fn mode_lambda(&self) -> f64 {
        self.best.as_ref().map_or(f64::INFINITY, |b| b.lambda)
    }

    fn is_degenerate(&self) -> bool {
        self.best.is_none()
    }
}

fn ties(a: f64, b: f64) -> bool {
    (a - b).abs() <= TIE_TOLERANCE * a.abs().max(b.abs()).max(1.0)
}

fn factorial_capped(m: usize, cap: usize) -> usize {
    let mut acc = 1usize;
    for k in 2..=m {
        acc = acc.saturating_mul(k);
        if acc > cap {
            return acc;
        }
    }
    acc
}

fn orderings(m: usize, config: &ScanConfig, stream: u64) -> Vec<Vec<usize>> {
    let identity: Vec<usize> = (0..m).collect();
    match config.ordering_mode {
        OrderingMode::Canonical => vec![identity],
        OrderingMode::ExhaustivePermutations => (0..m).permutations(m).collect(),
        OrderingMode::SampledPermutations => {
            let wanted = config.permutation_sample_count;
            if factorial_capped(m, wanted) <= wanted {
                return (0..m).permutations(m).collect();
            }
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(stream);
            let mut seen: HashSet<Vec<usize>> = HashSet::with_capacity(wanted);
            let mut out = Vec::with_capacity(wanted);
            seen.insert(identity.clone());
            out.push(identity.clone());
            let mut candidate = identity;
            while out.len() < wanted {
                candidate.shuffle(&mut rng);
                if seen.insert(candidate.clone()) {
                    out.push(candidate.clone());
                }
            }
            out
        }
    }
}

fn evaluate_subset(
    f: &FrequencyVector,
    removed: Vec<usize>,
    config: &ScanConfig,
    stream: u64,
) -> SubsetEval {
    let sites = f.sites();
    let kept: Vec<usize> = (0..f.len()).filter(|i| !removed.contains(i)).collect();
    let kept_canonical = canonical_order(sites, kept);
    let m = kept_canonical.len();

    let mut best: Option<SubsetBest> = None;
    let mut evaluations = 0;
    let mut degenerate = 0;
    let mut counts = vec![0.0; m];
    let mut candidates = Vec::new();
    for perm in orderings(m, config, stream) {
        for (slot, &p) in counts.iter_mut().zip(&perm) {
            *slot = sites[kept_canonical[p]].count;
        }
        let (ld, lambda) = lambda_for_counts(&counts);
        evaluations += 1;
        if ld.degenerate {
            degenerate += 1;
        } else {
            candidates.push(SubsetBest { lambda, key: perm });
        }
    }
    let top = candidates
        .iter()
        .map(|c| c.lambda)
        .fold(f64::NEG_INFINITY, f64::max);
    for c in candidates {
        if !ties(c.lambda, top) {
            continue;
        }
        match &best {
            Some(b) if b.key <= c.key => {}
            _ => best = Some(c),
        }
    }
    SubsetEval {
        removed,
        kept_canonical,
        best,
        evaluations,
        degenerate,
    }
}

fn run_search(f: &FrequencyVector, config: &ScanConfig) -> Result<ScanResult> {
    let n = f.len();
    config.validate(n)?;

    let removal_sets: Vec<Vec<usize>> = (0..=config.removal_depth)
        .flat_map(|k| (0..n).combinations(k))
        .collect();
    let evals: Vec<SubsetEval> = removal_sets
        .into_par_iter()
        .enumerate()
        .map(|(idx, removed)| evaluate_subset(f, removed, config, idx as u64))
        .collect();

    let computations_performed = evals.iter().map(|e| e.evaluations).sum();
    let degenerate_evaluations = evals.iter().map(|e| e.degenerate).sum();

    let ids =
        |idx: &[usize]| -> Vec<String> { idx.iter().map(|&i| f.sites()[i].id.clone()).collect() };
    let removed_key = |e: &SubsetEval| -> Vec<String> {
        let mut r = ids(&e.removed);
        r.sort();
        r
    };

    let top = evals
        .iter()
        .filter_map(|e| e.best.as_ref().map(|b| b.lambda))
        .fold(f64::NEG_INFINITY, f64::max);
    let mut winner: Option<(&SubsetEval, Vec<String>)> = None;
    for e in &evals {
        let Some(b) = &e.best else { continue };
        if !ties(b.lambda, top) {
            continue;
        }
        let key = removed_key(e);
        let better = match &winner {
            None => true,
            Some((w, wkey)) => {
                (&key, &b.key) < (wkey, &w.best.as_ref().expect("winner has best").key)
            }
        };
        if better {
            winner = Some((e, key));
        }
    }
    let max_lambda_subset = winner.map(|(e, removed)| {
        let b = e.best.as_ref().expect("winner has best");
        let order: Vec<usize> = b.key.iter().map(|&p| e.kept_canonical[p]).collect();
        MaxLambdaSubset {
            removed,
            ordering: ids(&order),
            lambda: b.lambda,
        }
    });

    let per_site_scores = if config.removal_depth >= 1 {
        let full = &evals[0];
        let full_lambda = full.mode_lambda();
        let mut scores: Vec<SiteScore> = evals[1..=n]
            .iter()
            .map(|e| {
                let site = &f.sites()[e.removed[0]];
                let delta = (!e.is_degenerate()).then(|| full_lambda - e.mode_lambda());
                SiteScore {
                    site_id: site.id.clone(),
                    delta_lambda: delta,
                    rank: 0,
                    degenerate: e.is_degenerate(),
                }
            })
            .collect();
        rank_scores(&mut scores);
        scores
    } else {
        Vec::new()
    };

    Ok(ScanResult {
        baseline_lambda: lambda_statistic(f).lambda,
        ordering_mode: config.ordering_mode,
        removal_depth: config.removal_depth,
        per_site_scores,
        max_lambda_subset,
        computations_performed,
        degenerate_evaluations,
    })
}

fn rank_scores(scores: &mut [SiteScore]) {
    scores.sort_by(|a, b| match (a.delta_lambda, b.delta_lambda) {
        (Some(x), Some(y)) => y
            .abs()
            .total_cmp(&x.abs())
            .then_with(|| a.site_id.cmp(&b.site_id)),
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => a.site_id.cmp(&b.site_id),
    });
    for (i, s) in scores.iter_mut().enumerate() {
        s.rank = i + 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::benford_mean;

    fn fv(counts: &[f64]) -> FrequencyVector {
        FrequencyVector::from_counts(counts).unwrap()
    }

    fn two_site_lambda(a: f64, b: f64) -> f64 {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        benford_mean() - (hi / lo - lo / hi).ln() / 2.0
    }

    #[test]
    fn leave_one_out_on_three_sites() {
        let f = fv(&[1.0, 2.0, 3.0]);
        let r = leave_one_out_scan(&f, &ScanConfig::default()).unwrap();
        assert_eq!(r.per_site_scores.len(), 3);
        let full = lambda_statistic(&f).lambda;
        let want = [
            ("s1", two_site_lambda(2.0, 3.0)),
            ("s2", two_site_lambda(1.0, 3.0)),
            ("s3", two_site_lambda(1.0, 2.0)),
        ];
        for (id, sub) in want {
            let s = r.per_site_scores.iter().find(|s| s.site_id == id).unwrap();
            assert!((s.delta_lambda.unwrap() - (full - sub)).abs() < 1e-12);
        }
        assert!((two_site_lambda(2.0, 3.0) - 2.18842).abs() < 1e-5);
        assert!((two_site_lambda(1.0, 3.0) - 1.6068494).abs() < 1e-6);
        assert!((two_site_lambda(1.0, 2.0) - 1.89453).abs() < 1e-5);
        let ranks: Vec<usize> = r.per_site_scores.iter().map(|s| s.rank).collect();
        assert_eq!(ranks, [1, 2, 3]);
        // max over {full, pairs} is the (2,3) pair, i.e. s1 removed
        let best = r.max_lambda_subset.unwrap();
        assert_eq!(best.removed, ["s1"]);
        assert_eq!(r.computations_performed, 4);
    }

    #[test]
    fn leave_one_out_needs_three_sites() {
        assert!(leave_one_out_scan(&fv(&[1.0, 2.0]), &ScanConfig::default()).is_err());
    }

    #[test]
    fn equal_counts_flag_every_site() {
        let r = leave_one_out_scan(&fv(&[3.0; 5]), &ScanConfig::default()).unwrap();
        assert!(r
            .per_site_scores
            .iter()
            .all(|s| s.degenerate && s.delta_lambda.is_none()));
        assert_eq!(r.baseline_lambda, f64::INFINITY);
        assert!(r.max_lambda_subset.is_none());
        let ranks: Vec<usize> = r.per_site_scores.iter().map(|s| s.rank).collect();
        assert_eq!(ranks, [1, 2, 3, 4, 5]);
    }

    #[test]
    fn depth_zero_is_baseline() {
        let f = fv(&[4.0, 9.0, 1.0, 30.0]);
        let r = max_lambda_search(&f, &ScanConfig::default().with_depth(0)).unwrap();
        assert!(r.per_site_scores.is_empty());
        assert_eq!(r.computations_performed, 1);
        let best = r.max_lambda_subset.unwrap();
        assert_eq!(best.lambda, r.baseline_lambda);
        assert!(best.removed.is_empty());
        assert_eq!(best.ordering, f.canonical().ids());
    }

    #[test]
    fn three_sites_exhaustive_keeps_canonical_order() {
        let f = fv(&[1.0, 2.0, 3.0]);
        let cfg = ScanConfig::default()
            .with_depth(0)
            .with_ordering(OrderingMode::ExhaustivePermutations);
        let r = max_lambda_search(&f, &cfg).unwrap();
        assert_eq!(r.computations_performed, 6);
        assert_eq!(r.max_lambda_subset.unwrap().ordering, ["s3", "s2", "s1"]);
    }

    #[test]
    fn exhaustive_counts_for_four_sites() {
        let f = fv(&[1.0, 2.0, 3.0, 1000.0]);
        let cfg = ScanConfig::default().with_ordering(OrderingMode::ExhaustivePermutations);
        assert_eq!(
            max_lambda_search(&f, &cfg).unwrap().computations_performed,
            48
        );
    }

    #[test]
    fn refuses_large_exhaustive_search() {
        let f = fv(&(1..=9).map(f64::from).collect::<Vec<_>>());
        let cfg = ScanConfig::default().with_ordering(OrderingMode::ExhaustivePermutations);
        let err = max_lambda_search(&f, &cfg).unwrap_err();
        assert_eq!(err, BenfordError::SearchSpaceTooLarge { n: 9, max: 8 });
        assert!(err.to_string().contains("sampled"));
    }

    #[test]
    fn depth_bounds_are_checked() {
        let f = fv(&[1.0, 2.0, 3.0, 4.0]);
        assert!(max_lambda_search(&f, &ScanConfig::default().with_depth(2)).is_ok());
        assert!(matches!(
            max_lambda_search(&f, &ScanConfig::default().with_depth(3)),
            Err(BenfordError::Config(_))
        ));
        let cfg = ScanConfig::default()
            .with_ordering(OrderingMode::SampledPermutations)
            .with_samples(0);
        assert!(max_lambda_search(&f, &cfg).is_err());
    }

    #[test]
    fn sampled_orderings_are_distinct_and_start_canonical() {
        let cfg = ScanConfig::default()
            .with_ordering(OrderingMode::SampledPermutations)
            .with_samples(50);
        let perms = orderings(6, &cfg, 3);
        assert_eq!(perms.len(), 50);
        assert_eq!(perms[0], (0..6).collect::<Vec<_>>());
        assert_eq!(perms.iter().collect::<HashSet<_>>().len(), 50);
        assert_eq!(perms, orderings(6, &cfg, 3));
        assert_ne!(perms, orderings(6, &cfg, 4));
        // sample count covering m! enumerates everything
        assert_eq!(orderings(4, &cfg, 0).len(), 24);
    }

    #[test]
    fn max_permutation_analysis_dominates_canonical() {
        let f = fv(&[3.0, 17.0, 5.0, 90.0, 41.0]);
        let cfg = ScanConfig::default().with_ordering(OrderingMode::ExhaustivePermutations);
        let best = max_permutation_analysis(&f, &cfg).unwrap();
        assert_eq!(best.order_mode, OrderMode::MaxPermutation);
        assert!(best.lambda >= lambda_statistic(&f).lambda - 1e-12);
        let canonical = max_permutation_analysis(&f, &ScanConfig::default()).unwrap();
        assert_eq!(canonical, lambda_statistic(&f));
    }
}
