//! Report structures and their text rendering.
//!
//! Text output rounds every number to 7 significant digits; JSON output keeps
//! full double precision and writes infinities as `"inf"` / `"-inf"`.

use std::fmt::Write as _;

use benford_core::measure::published;
use benford_core::{AnalysisResult, HypothesisResult, MomentSet, ScanResult, SimulationReport};
use serde::{Deserialize, Serialize};

/// `x` rounded to 7 significant digits, trailing zeros trimmed.
pub fn sig7(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.6e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..7).contains(&exp) {
        let decimals = (6 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeReport {
    #[serde(flatten)]
    pub analysis: AnalysisResult,
    #[serde(flatten)]
    pub hypothesis: HypothesisResult,
}

impl AnalyzeReport {
    pub fn to_text(&self) -> String {
        let a = &self.analysis;
        let h = &self.hypothesis;
        let mut s = String::new();
        let order_mode = match a.order_mode {
            benford_core::OrderMode::Canonical => "canonical",
            benford_core::OrderMode::MaxPermutation => "max_permutation",
        };
        let _ = writeln!(s, "sites         {}", a.n);
        let _ = writeln!(s, "ordering      {}", a.ordering.join(","));
        let _ = writeln!(s, "order_mode    {order_mode}");
        let _ = writeln!(s, "log_abs_det   {}", sig7(a.log_abs_det));
        let _ = writeln!(s, "lambda        {}", sig7(a.lambda));
        let _ = writeln!(s, "degenerate    {}", yes_no(a.degenerate));
        let _ = writeln!(s, "t_statistic   {}", sig7(h.t_statistic));
        let _ = writeln!(s, "df            {}", h.degrees_of_freedom);
        let _ = writeln!(s, "p_value       {}", sig7(h.p_value));
        let _ = writeln!(s, "alpha         {}", sig7(h.alpha));
        let decision = if h.reject_null {
            "reject H0 (lambda != 0)"
        } else {
            "do not reject H0 (lambda = 0)"
        };
        let _ = writeln!(s, "decision      {decision}");
        s
    }
}

pub fn scan_text(r: &ScanResult) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "baseline_lambda         {}", sig7(r.baseline_lambda));
    let _ = writeln!(s, "removal_depth           {}", r.removal_depth);
    let _ = writeln!(s, "computations_performed  {}", r.computations_performed);
    let _ = writeln!(s, "degenerate_evaluations  {}", r.degenerate_evaluations);
    if !r.per_site_scores.is_empty() {
        let _ = writeln!(s, "\nrank  site  delta_lambda");
        for score in &r.per_site_scores {
            let delta = score
                .delta_lambda
                .map_or_else(|| "degenerate".to_string(), sig7);
            let _ = writeln!(s, "{:<5} {} {}", score.rank, score.site_id, delta);
        }
    }
    match &r.max_lambda_subset {
        Some(best) => {
            let removed = if best.removed.is_empty() {
                "-".to_string()
            } else {
                best.removed.join(",")
            };
            let _ = writeln!(s, "\nmax_lambda              {}", sig7(best.lambda));
            let _ = writeln!(s, "max_lambda_removed      {removed}");
            let _ = writeln!(s, "max_lambda_ordering     {}", best.ordering.join(","));
        }
        None => {
            let _ = writeln!(
                s,
                "\nmax_lambda              none (every evaluation degenerate)"
            );
        }
    }
    s
}

pub fn simulation_text(r: &SimulationReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "trials               {}", r.trials);
    let _ = writeln!(s, "sites_per_trial      {}", r.sites_per_trial);
    let _ = writeln!(s, "seed                 {}", r.seed);
    let _ = writeln!(s, "alpha                {}", sig7(r.alpha));
    let _ = writeln!(s, "mean_abs_lambda      {}", sig7(r.mean_abs_lambda));
    let _ = writeln!(s, "rejected             {}", r.rejected);
    let _ = writeln!(s, "not_rejected         {}", r.not_rejected);
    let _ = writeln!(s, "degenerate_trials    {}", r.degenerate_trials);
    let _ = writeln!(s, "rejection_rate       {}", sig7(r.rejection_rate));
    let _ = writeln!(s, "planted_site_count   {}", r.planted_site_count);
    let _ = writeln!(s, "detection_precision  {}", sig7(r.detection_precision));
    let _ = writeln!(s, "detection_recall     {}", sig7(r.detection_recall));
    s
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentsReport {
    pub computed: MomentSet,
    /// The four-decimal values commonly quoted for these moments.
    pub published: MomentSet,
    /// `sqrt(published.variance)`.
    pub sqrt_published_variance: f64,
    /// Whether `published.std_dev` agrees with `sqrt(published.variance)`
    /// to the four decimals it is quoted with.
    pub published_std_dev_consistent: bool,
    pub note: String,
}

impl MomentsReport {
    pub fn new(computed: MomentSet) -> Self {
        let published = MomentSet {
            mean: published::MEAN,
            second_moment: published::SECOND_MOMENT,
            variance: published::VARIANCE,
            std_dev: published::STD_DEV,
        };
        let root = published.variance.sqrt();
        let consistent = (root - published.std_dev).abs() < 5e-5;
        let note = if consistent {
            String::new()
        } else {
            format!(
                "published std_dev {} does not equal sqrt(published variance {}) = {}; \
                 the closed form gives {}",
                published.std_dev,
                published.variance,
                sig7(root),
                sig7(computed.std_dev)
            )
        };
        Self {
            computed,
            published,
            sqrt_published_variance: root,
            published_std_dev_consistent: consistent,
            note,
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{:<14} {:<12} published", "moment", "computed");
        let rows = [
            ("mean", self.computed.mean, self.published.mean),
            (
                "second_moment",
                self.computed.second_moment,
                self.published.second_moment,
            ),
            ("variance", self.computed.variance, self.published.variance),
            ("std_dev", self.computed.std_dev, self.published.std_dev),
        ];
        for (name, computed, quoted) in rows {
            let _ = writeln!(s, "{name:<14} {:<12} {quoted}", sig7(computed));
        }
        if !self.note.is_empty() {
            let _ = writeln!(s, "\nnote: {}", self.note);
        }
        s
    }
}
