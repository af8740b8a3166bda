mod common {
    pub mod oracle;
}

use benford_core::hypothesis::{student_t_cdf, studentized_test};
use benford_core::measure::moments;
use common::oracle::{t_cdf, two_sided_p};
use proptest::prelude::*;

#[test]
fn matches_quadrature_on_grid() {
    for df in [1, 3, 8, 35, 99] {
        for k in -20..=20 {
            let t = k as f64 * 0.25;
            let got = student_t_cdf(t, df).unwrap();
            let want = t_cdf(t, df);
            assert!((got - want).abs() < 1e-8, "df {df}, t {t}: {got} vs {want}");
        }
    }
}

#[test]
fn worked_values() {
    assert!((student_t_cdf(-1.0, 8).unwrap() - 0.1732968).abs() < 1e-7);
    assert!((student_t_cdf(-1.0, 8).unwrap() - t_cdf(-1.0, 8)).abs() < 1e-10);

    let lambda = 1.6374887941;
    let r = studentized_test(lambda, 3, 0.05).unwrap();
    let t = -lambda / moments().std_dev;
    assert!((r.t_statistic - t).abs() < 1e-12);
    assert!((r.t_statistic + 3.9026856).abs() < 1e-6);
    assert!((r.p_value - two_sided_p(t, 8)).abs() < 1e-10);
    assert!((r.p_value - 0.0045275).abs() < 1e-7);
}

#[test]
fn monotone_in_t() {
    for df in [1, 2, 5, 30, 200] {
        let mut prev = 0.0;
        for k in -400..=400 {
            let c = student_t_cdf(k as f64 * 0.025, df).unwrap();
            assert!(c >= prev);
            prev = c;
        }
    }
}

proptest! {
    #[test]
    fn symmetric(t in -50.0f64..50.0, df in 1u64..500) {
        let sum = student_t_cdf(t, df).unwrap() + student_t_cdf(-t, df).unwrap();
        prop_assert!((sum - 1.0).abs() < 1e-10);
    }

    #[test]
    fn p_value_in_unit_interval(lambda in -20.0f64..20.0, n in 2usize..30, alpha in 0.001f64..0.5) {
        let r = studentized_test(lambda, n, alpha).unwrap();
        prop_assert!((0.0..=1.0).contains(&r.p_value));
        prop_assert_eq!(r.reject_null, r.p_value < alpha);
        prop_assert_eq!(r.degrees_of_freedom, (n * n - 1) as u64);
        let mirrored = studentized_test(-lambda, n, alpha).unwrap();
        prop_assert_eq!(r.p_value, mirrored.p_value);
    }
}
