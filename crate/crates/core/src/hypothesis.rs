//! Studentized test of `H0: lambda = 0` against `lambda != 0`.
//!
//! `t = (0 - lambda) / sigma`, where `sigma` is the standard deviation of the
//! continuous Benford distribution, evaluated against Student's t with
//! `n^2 - 1` degrees of freedom. The test is two-sided.

use serde::{Deserialize, Serialize};

use crate::error::{BenfordError, Result};
use crate::measure::benford_std_dev;
use crate::special::regularized_incomplete_beta;

/// 95% level of significance.
pub const DEFAULT_ALPHA: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisResult {
    /// `-inf` for a degenerate (infinite) lambda.
    #[serde(with = "crate::extreal")]
    pub t_statistic: f64,
    #[serde(rename = "df")]
    pub degrees_of_freedom: u64,
    pub p_value: f64,
    pub alpha: f64,
    #[serde(rename = "reject_h0")]
    pub reject_null: bool,
}

/// `(0 - lambda) / sigma`.
pub fn t_statistic(lambda: f64) -> Result<f64> {
    if !lambda.is_finite() {
        return Err(BenfordError::Domain(format!(
            "t statistic needs a finite lambda, got {lambda}"
        )));
    }
    Ok((0.0 - lambda) / benford_std_dev())
}

/// `P(T <= t)` for Student's t with `df` degrees of freedom.
pub fn student_t_cdf(t: f64, df: u64) -> Result<f64> {
    if df < 1 {
        return Err(BenfordError::Domain(
            "degrees of freedom must be at least 1".into(),
        ));
    }
    if t.is_nan() {
        return Err(BenfordError::Domain("t is NaN".into()));
    }
    if t == f64::INFINITY {
        return Ok(1.0);
    }
    if t == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    let nu = df as f64;
    let t2 = t * t;
    // P(|T| > |t|) = I_x(nu/2, 1/2) with x = nu / (nu + t^2)
    let x = nu / (nu + t2);
    let y = t2 / (nu + t2);
    let tail = 0.5 * regularized_incomplete_beta(0.5 * nu, 0.5, x, y);
    Ok(if t > 0.0 { 1.0 - tail } else { tail })
}

/// Two-sided p-value for `t`.
pub fn two_sided_p_value(t: f64, df: u64) -> Result<f64> {
    Ok((2.0 * student_t_cdf(-t.abs(), df)?).min(1.0))
}

/// `n^2 - 1`.
pub fn degrees_of_freedom(n: usize) -> u64 {
    let n = n as u64;
    n * n - 1
}

/// Tests `lambda` computed over `n` sites at level `alpha`.
///
/// A degenerate (infinite) lambda is an automatic rejection with `p = 0`.
pub fn studentized_test(lambda: f64, n: usize, alpha: f64) -> Result<HypothesisResult> {
    if n < 2 {
        return Err(BenfordError::Domain(format!(
            "need at least 2 sites, got {n}"
        )));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(BenfordError::Domain(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    if lambda.is_nan() {
        return Err(BenfordError::Domain("lambda is NaN".into()));
    }
    let df = degrees_of_freedom(n);
    if lambda.is_infinite() {
        return Ok(HypothesisResult {
            t_statistic: if lambda > 0.0 {
                f64::NEG_INFINITY
            } else {
                f64::INFINITY
            },
            degrees_of_freedom: df,
            p_value: 0.0,
            alpha,
            reject_null: true,
        });
    }
    let t = t_statistic(lambda)?;
    let p_value = two_sided_p_value(t, df)?;
    Ok(HypothesisResult {
        t_statistic: t,
        degrees_of_freedom: df,
        p_value,
        alpha,
        reject_null: p_value < alpha,
    })
}
