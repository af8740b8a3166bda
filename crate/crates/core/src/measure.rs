//! Discrete and continuous Benford distributions.
//!
//! The discrete law assigns leading digit `d` in base `b` the mass
//! `log_b(1 + 1/d)`. The continuous form used by the rest of the crate lives
//! on `[1, e]` with density `ln(x)`; its cumulative distribution is
//! `x ln(x) - x + 1` and its first two moments have closed forms.

use std::f64::consts::E;

use serde::{Deserialize, Serialize};

use crate::error::{BenfordError, Result};

/// Rounded moments as they are usually quoted (four decimals).
pub mod published {
    pub const MEAN: f64 = 2.0973;
    pub const SECOND_MOMENT: f64 = 4.5746;
    pub const VARIANCE: f64 = 0.1759;
    /// Quoted standard deviation. It disagrees with `sqrt(VARIANCE)`.
    pub const STD_DEV: f64 = 0.4149;
}

/// Tolerance of the inverse-CDF bisection, in `x`.
pub const SAMPLER_TOLERANCE: f64 = 1e-12;

/// The discrete leading-digit law in a fixed base.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscreteBenford {
    base: u32,
}

impl DiscreteBenford {
    pub fn new(base: u32) -> Result<Self> {
        if base < 2 {
            return Err(BenfordError::Domain(format!(
                "base must be at least 2, got {base}"
            )));
        }
        Ok(Self { base })
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    /// Probability that the leading digit equals `digit`.
    pub fn pmf(&self, digit: u32) -> Result<f64> {
        if digit == 0 || digit >= self.base {
            return Err(BenfordError::Domain(format!(
                "digit {digit} is not a leading digit in base {}",
                self.base
            )));
        }
        let d = f64::from(digit);
        Ok((1.0 + 1.0 / d).ln() / f64::from(self.base).ln())
    }

    /// Probabilities for digits `1..base`, in order.
    pub fn probabilities(&self) -> Vec<f64> {
        (1..self.base)
            .map(|d| self.pmf(d).expect("digit in range"))
            .collect()
    }
}

/// `log_base(1 + 1/digit)`.
pub fn discrete_pmf(digit: u32, base: u32) -> Result<f64> {
    DiscreteBenford::new(base)?.pmf(digit)
}

/// Closed-form moments of the continuous distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentSet {
    pub mean: f64,
    pub second_moment: f64,
    pub variance: f64,
    pub std_dev: f64,
}

/// The continuous Benford distribution on `[1, e]` with density `ln(x)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ContinuousBenford;

impl ContinuousBenford {
    pub const LOWER: f64 = 1.0;
    pub const UPPER: f64 = E;

    fn check_support(x: f64) -> Result<()> {
        if (Self::LOWER..=Self::UPPER).contains(&x) {
            Ok(())
        } else {
            Err(BenfordError::Domain(format!(
                "{x} lies outside the support [1, e]"
            )))
        }
    }

    pub fn pdf(&self, x: f64) -> Result<f64> {
        Self::check_support(x)?;
        Ok(x.ln())
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        Self::check_support(x)?;
        Ok(cdf_unchecked(x))
    }

    /// Inverse-transform sample for a uniform draw in `[0, 1]`.
    ///
    /// Bisection on the bracket `[1, e]` until the bracket is narrower than
    /// [`SAMPLER_TOLERANCE`]. The CDF has slope `ln(x) <= 1`, so the returned
    /// point reproduces the draw to the same absolute accuracy.
    pub fn sample(&self, uniform_draw: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&uniform_draw) {
            return Err(BenfordError::Domain(format!(
                "uniform draw {uniform_draw} is not in [0, 1]"
            )));
        }
        if uniform_draw == 0.0 {
            return Ok(Self::LOWER);
        }
        if uniform_draw == 1.0 {
            return Ok(Self::UPPER);
        }
        let (mut lo, mut hi) = (Self::LOWER, Self::UPPER);
        while hi - lo > SAMPLER_TOLERANCE {
            let mid = 0.5 * (lo + hi);
            if cdf_unchecked(mid) < uniform_draw {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    pub fn moments(&self) -> MomentSet {
        moments()
    }
}

fn cdf_unchecked(x: f64) -> f64 {
    x * x.ln() - x + 1.0
}

pub fn continuous_pdf(x: f64) -> Result<f64> {
    ContinuousBenford.pdf(x)
}

pub fn continuous_cdf(x: f64) -> Result<f64> {
    ContinuousBenford.cdf(x)
}

pub fn sample_continuous(uniform_draw: f64) -> Result<f64> {
    ContinuousBenford.sample(uniform_draw)
}

/// Mean of the continuous distribution, `(e^2 + 1) / 4`.
pub fn benford_mean() -> f64 {
    (E * E + 1.0) / 4.0
}

/// Standard deviation of the continuous distribution.
pub fn benford_std_dev() -> f64 {
    moments().std_dev
}

pub fn moments() -> MomentSet {
    let mean = benford_mean();
    let second_moment = (2.0 * E.powi(3) + 1.0) / 9.0;
    let variance = second_moment - mean * mean;
    MomentSet {
        mean,
        second_moment,
        variance,
        std_dev: variance.sqrt(),
    }
}

/// First significant digit of `value` written in `base`.
pub fn leading_digit(value: f64, base: u32) -> Result<u32> {
    if base < 2 {
        return Err(BenfordError::Domain(format!(
            "base must be at least 2, got {base}"
        )));
    }
    if !(value.is_finite() && value > 0.0) {
        return Err(BenfordError::Domain(format!(
            "leading digit needs a finite positive value, got {value}"
        )));
    }
    let b = f64::from(base);
    let exponent = (value.ln() / b.ln()).floor() as i32;
    let mut significand = value / b.powi(exponent);
    // the logarithm can land one off near exact powers of the base
    while significand >= b {
        significand /= b;
    }
    while significand < 1.0 {
        significand *= b;
    }
    Ok((significand.floor() as u32).clamp(1, base - 1))
}
