mod common {
    pub mod oracle;
}

use std::f64::consts::E;

use benford_core::measure::{
    continuous_cdf, continuous_pdf, leading_digit, moments, sample_continuous,
};
use common::oracle::integrate;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn pdf_integrates_to_one() {
    let total = integrate(|x| continuous_pdf(x).unwrap(), 1.0, E, 1e-13);
    assert!((total - 1.0).abs() < 1e-10, "{total}");
}

#[test]
fn moments_match_quadrature() {
    let m = moments();
    let mean = integrate(|x| x * x.ln(), 1.0, E, 1e-13);
    let second = integrate(|x| x * x * x.ln(), 1.0, E, 1e-13);
    assert!((m.mean - mean).abs() < 1e-9);
    assert!((m.second_moment - second).abs() < 1e-9);
}

#[test]
fn cdf_matches_integrated_pdf() {
    for i in 1..=20 {
        let x = 1.0 + (E - 1.0) * i as f64 / 20.0;
        let x = x.min(E);
        let q = integrate(|s| s.ln(), 1.0, x, 1e-13);
        assert!((continuous_cdf(x).unwrap() - q).abs() < 1e-10);
    }
}

#[test]
fn cdf_strictly_increasing() {
    let mut prev = continuous_cdf(1.0).unwrap();
    for i in 1..=1000 {
        let x = (1.0 + (E - 1.0) * i as f64 / 1000.0).min(E);
        let c = continuous_cdf(x).unwrap();
        assert!(c > prev);
        prev = c;
    }
}

#[test]
fn sampler_mean_converges() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let n = 1_000_000;
    let total: f64 = (0..n)
        .map(|_| sample_continuous(rng.random()).unwrap())
        .sum();
    let mean = total / n as f64;
    assert!((mean - 2.0973).abs() < 0.002, "{mean}");
    assert!(
        (mean - moments().mean).abs() < 3.0 * 0.4196 / (n as f64).sqrt() + 1e-9,
        "{mean}"
    );
}

proptest! {
    #[test]
    fn sampler_round_trips(u in 0.0f64..1.0) {
        let x = sample_continuous(u).unwrap();
        prop_assert!((1.0..=E).contains(&x));
        prop_assert!((continuous_cdf(x).unwrap() - u).abs() < 1e-10);
    }

    #[test]
    fn leading_digit_is_scale_invariant(
        base in 2u32..=16,
        digit_frac in 0.01f64..0.99,
        digit_seed in 0u32..1000,
        power in -12i32..=12,
    ) {
        let digit = 1 + digit_seed % (base - 1);
        let m = f64::from(digit) + digit_frac;
        let scaled = m * f64::from(base).powi(power);
        prop_assert_eq!(leading_digit(m, base).unwrap(), digit);
        prop_assert_eq!(leading_digit(scaled, base).unwrap(), digit);
    }
}
