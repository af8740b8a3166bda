//! Seeded simulations of Benford and non-Benford frequency data.
//!
//! Every trial draws from its own ChaCha8 stream, selected by the trial index
//! on top of the spec seed, so reports do not depend on how rayon schedules
//! the trials.

use std::collections::HashSet;

use rand::seq::index::sample as sample_indices;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{BenfordError, Result};
use crate::hypothesis::studentized_test;
use crate::matrix::{lambda_statistic, FrequencyVector, Site};
use crate::measure::sample_continuous;
use crate::search::{leave_one_out_scan, ScanConfig};

/// Redraw budget for the truncated normal before giving up.
const MAX_REJECTIONS: usize = 1_000_000;

const PLANTED_STREAM_BIT: u64 = 1 << 63;

/// Count generators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Sampler {
    /// `10^(U * orders_of_magnitude)` with `U ~ Uniform[0, 1)`. Leading
    /// digits of these draws follow the discrete Benford law.
    LogUniform {
        orders_of_magnitude: u32,
    },
    Uniform {
        low: f64,
        high: f64,
    },
    /// Normal draws, redrawn until positive.
    NormalTruncated {
        mean: f64,
        std: f64,
    },
    Exponential {
        rate: f64,
    },
    /// Inverse-CDF draws from the continuous law on `[1, e]`.
    ContinuousBenford,
    /// Always `value`. Produces degenerate matrices; useful as a control.
    Constant {
        value: f64,
    },
}

impl Sampler {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(BenfordError::Config(msg));
        match *self {
            Sampler::LogUniform {
                orders_of_magnitude,
            } if orders_of_magnitude < 1 => {
                bad("log-uniform sampler needs at least one order of magnitude".into())
            }
            Sampler::Uniform { low, high } if !(low > 0.0 && high >= low && high.is_finite()) => {
                bad(format!(
                    "uniform sampler needs 0 < low <= high, got [{low}, {high}]"
                ))
            }
            Sampler::NormalTruncated { mean, std }
                if !(std > 0.0 && std.is_finite() && mean.is_finite() && mean > -4.0 * std) =>
            {
                bad(format!(
                    "normal sampler needs std > 0 and mean > -4 std, got mean {mean}, std {std}"
                ))
            }
            Sampler::Exponential { rate } if !(rate > 0.0 && rate.is_finite()) => {
                bad(format!("exponential sampler needs rate > 0, got {rate}"))
            }
            Sampler::Constant { value } if !(value > 0.0 && value.is_finite()) => bad(format!(
                "constant sampler needs a positive value, got {value}"
            )),
            _ => Ok(()),
        }
    }

    /// One strictly positive draw.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<f64> {
        match *self {
            Sampler::LogUniform {
                orders_of_magnitude,
            } => {
                let u: f64 = rng.random();
                Ok(10f64.powf(u * f64::from(orders_of_magnitude)))
            }
            Sampler::Uniform { low, high } => {
                if low == high {
                    Ok(low)
                } else {
                    Ok(rng.random_range(low..=high))
                }
            }
            Sampler::NormalTruncated { mean, std } => {
                let normal =
                    Normal::new(mean, std).map_err(|e| BenfordError::Config(e.to_string()))?;
                positive_draw(|| normal.sample(rng))
            }
            Sampler::Exponential { rate } => {
                let exp = Exp::new(rate).map_err(|e| BenfordError::Config(e.to_string()))?;
                positive_draw(|| exp.sample(rng))
            }
            Sampler::ContinuousBenford => sample_continuous(rng.random()),
            Sampler::Constant { value } => Ok(value),
        }
    }
}

fn positive_draw(mut draw: impl FnMut() -> f64) -> Result<f64> {
    for _ in 0..MAX_REJECTIONS {
        let x = draw();
        if x > 0.0 && x.is_finite() {
            return Ok(x);
        }
    }
    Err(BenfordError::Config(
        "sampler failed to produce a positive draw".into(),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplerSpec {
    pub sampler: Sampler,
    pub seed: u64,
    /// Round draws to integers, clamping anything below 1 up to 1.
    #[serde(default)]
    pub round_to_integer: bool,
}

impl SamplerSpec {
    pub fn new(sampler: Sampler, seed: u64) -> Self {
        Self {
            sampler,
            seed,
            round_to_integer: false,
        }
    }

    pub fn rounded(mut self) -> Self {
        self.round_to_integer = true;
        self
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }

    fn draw_counts<R: Rng + ?Sized>(&self, rng: &mut R, k: usize) -> Result<Vec<f64>> {
        (0..k)
            .map(|_| {
                let x = self.sampler.draw(rng)?;
                Ok(if self.round_to_integer {
                    x.round().max(1.0)
                } else {
                    x
                })
            })
            .collect()
    }
}

/// Site ids `site-01, site-02, ...`, zero padded so they sort numerically.
pub fn site_ids(n: usize) -> Vec<String> {
    let width = n.to_string().len();
    (1..=n).map(|i| format!("site-{i:0width$}")).collect()
}

/// `n_sites` counts from stream 0 of the spec seed.
pub fn generate_frequencies(spec: &SamplerSpec, n_sites: usize) -> Result<FrequencyVector> {
    generate_trial(spec, n_sites, 0)
}

fn generate_trial(spec: &SamplerSpec, n_sites: usize, trial: u64) -> Result<FrequencyVector> {
    if n_sites < 2 {
        return Err(BenfordError::Config(format!(
            "need at least 2 sites, got {n_sites}"
        )));
    }
    spec.sampler.validate()?;
    let counts = spec.draw_counts(&mut spec.rng(trial), n_sites)?;
    FrequencyVector::new(
        site_ids(n_sites)
            .into_iter()
            .zip(counts)
            .map(|(id, c)| Site::new(id, c))
            .collect(),
    )
}

/// One planted-anomaly trial: `n_sites - planted` background counts from
/// `spec`, `planted` counts from `planted_spec`, placed at random site ids.
/// Returns the vector and the planted ids, ascending.
pub fn generate_planted_trial(
    spec: &SamplerSpec,
    n_sites: usize,
    planted: usize,
    planted_spec: &SamplerSpec,
    trial: u64,
) -> Result<(FrequencyVector, Vec<String>)> {
    if n_sites < 3 || planted > n_sites - 2 {
        return Err(BenfordError::Config(format!(
            "planted count {planted} must leave at least 2 background sites out of {n_sites}"
        )));
    }
    spec.sampler.validate()?;
    planted_spec.sampler.validate()?;
    let mut bg_rng = spec.rng(trial);
    // separate stream family so equal seeds do not replay the background
    let mut pl_rng = planted_spec.rng(trial | PLANTED_STREAM_BIT);
    let background = spec.draw_counts(&mut bg_rng, n_sites - planted)?;
    let outliers = planted_spec.draw_counts(&mut pl_rng, planted)?;
    let planted_slots: HashSet<usize> = sample_indices(&mut bg_rng, n_sites, planted)
        .into_iter()
        .collect();

    let ids = site_ids(n_sites);
    let mut bg = background.into_iter();
    let mut pl = outliers.into_iter();
    let mut planted_ids = Vec::with_capacity(planted);
    let mut sites = Vec::with_capacity(n_sites);
    for (slot, id) in ids.into_iter().enumerate() {
        let count = if planted_slots.contains(&slot) {
            planted_ids.push(id.clone());
            pl.next()
        } else {
            bg.next()
        }
        .expect("slot counts add up");
        sites.push(Site::new(id, count));
    }
    Ok((FrequencyVector::new(sites)?, planted_ids))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub trials: usize,
    pub sites_per_trial: usize,
    pub seed: u64,
    pub alpha: f64,
    /// Canonical-order lambda of each trial, in trial order.
    #[serde(with = "crate::extreal::vec")]
    pub lambda_samples: Vec<f64>,
    /// Mean `|lambda|` over the non-degenerate trials (NaN if there are none).
    #[serde(with = "crate::extreal")]
    pub mean_abs_lambda: f64,
    /// Non-degenerate trials where H0 was rejected.
    pub rejected: usize,
    pub not_rejected: usize,
    pub degenerate_trials: usize,
    /// Share of trials rejecting H0; degenerate trials count as rejections.
    pub rejection_rate: f64,
    pub planted_site_count: usize,
    pub detection_precision: f64,
    pub detection_recall: f64,
}

struct TrialOutcome {
    lambda: f64,
    degenerate: bool,
    rejected: bool,
    hits: usize,
}

fn summarize(
    outcomes: Vec<TrialOutcome>,
    sites_per_trial: usize,
    seed: u64,
    alpha: f64,
    planted: usize,
) -> SimulationReport {
    let trials = outcomes.len();
    let degenerate_trials = outcomes.iter().filter(|o| o.degenerate).count();
    let rejected = outcomes
        .iter()
        .filter(|o| !o.degenerate && o.rejected)
        .count();
    let not_rejected = trials - degenerate_trials - rejected;
    let finite: Vec<f64> = outcomes
        .iter()
        .filter(|o| !o.degenerate)
        .map(|o| o.lambda.abs())
        .collect();
    let mean_abs_lambda = if finite.is_empty() {
        f64::NAN
    } else {
        finite.iter().sum::<f64>() / finite.len() as f64
    };
    let detection = if planted == 0 {
        1.0
    } else {
        outcomes.iter().map(|o| o.hits).sum::<usize>() as f64 / (planted * trials) as f64
    };
    SimulationReport {
        trials,
        sites_per_trial,
        seed,
        alpha,
        lambda_samples: outcomes.iter().map(|o| o.lambda).collect(),
        mean_abs_lambda,
        rejected,
        not_rejected,
        degenerate_trials,
        rejection_rate: (rejected + degenerate_trials) as f64 / trials as f64,
        planted_site_count: planted,
        // the cutoff equals the planted count, so precision and recall share
        // a denominator
        detection_precision: detection,
        detection_recall: detection,
    }
}

fn check_trials(trials: usize) -> Result<()> {
    if trials < 1 {
        return Err(BenfordError::Config("need at least one trial".into()));
    }
    Ok(())
}

/// Runs `trials` independent analyses of freshly generated data.
pub fn run_trials(
    spec: &SamplerSpec,
    n_sites: usize,
    trials: usize,
    alpha: f64,
) -> Result<SimulationReport> {
    check_trials(trials)?;
    let outcomes = (0..trials)
        .into_par_iter()
        .map(|t| {
            let f = generate_trial(spec, n_sites, t as u64)?;
            let analysis = lambda_statistic(&f);
            let test = studentized_test(analysis.lambda, n_sites, alpha)?;
            Ok(TrialOutcome {
                lambda: analysis.lambda,
                degenerate: analysis.degenerate,
                rejected: test.reject_null,
                hits: 0,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize(outcomes, n_sites, spec.seed, alpha, 0))
}

/// Plants `planted` outlier sites in each trial and measures how often the
/// leave-one-out scan ranks them in the top `planted` positions.
pub fn run_planted_anomaly(
    spec: &SamplerSpec,
    n_sites: usize,
    planted: usize,
    planted_spec: &SamplerSpec,
    trials: usize,
    scan: &ScanConfig,
    alpha: f64,
) -> Result<SimulationReport> {
    check_trials(trials)?;
    if planted == 0 {
        let mut report = run_trials(spec, n_sites, trials, alpha)?;
        report.planted_site_count = 0;
        return Ok(report);
    }
    let outcomes = (0..trials)
        .into_par_iter()
        .map(|t| {
            let (f, planted_ids) =
                generate_planted_trial(spec, n_sites, planted, planted_spec, t as u64)?;
            let analysis = lambda_statistic(&f);
            let test = studentized_test(analysis.lambda, n_sites, alpha)?;
            let scan = leave_one_out_scan(&f, scan)?;
            let hits = scan
                .per_site_scores
                .iter()
                .take(planted)
                .filter(|s| planted_ids.contains(&s.site_id))
                .count();
            Ok(TrialOutcome {
                lambda: analysis.lambda,
                degenerate: analysis.degenerate,
                rejected: test.reject_null,
                hits,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize(outcomes, n_sites, spec.seed, alpha, planted))
}
