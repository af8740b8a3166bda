//! Benford-matrix analysis of site-visit frequency data.
//!
//! Given strictly positive visit counts for a set of sites, the crate builds
//! the cyclic ratio matrix of the counts, turns its log-determinant into the
//! `lambda` statistic, tests `lambda = 0` with a Studentized t test, and
//! searches over removed sites and orderings to find the sites that disturb
//! the statistic most.
//!
//! ```
//! use benford_core::{lambda_statistic, studentized_test, FrequencyVector};
//!
//! let f = FrequencyVector::from_counts(&[1.0, 2.0, 3.0]).unwrap();
//! let analysis = lambda_statistic(&f);
//! assert!((analysis.lambda - 1.6374884).abs() < 1e-6);
//!
//! let test = studentized_test(analysis.lambda, f.len(), 0.05).unwrap();
//! assert_eq!(test.degrees_of_freedom, 8);
//! assert!(test.reject_null);
//! ```
//!
//! The guide in `book/` walks through each piece; its code blocks are
//! compiled and run as doc-tests of this crate.

pub mod error;
pub mod extreal;
pub mod hypothesis;
pub mod matrix;
pub mod measure;
pub mod search;
pub mod simulation;
pub mod special;

pub use error::{BenfordError, Result};
pub use hypothesis::{
    student_t_cdf, studentized_test, t_statistic, HypothesisResult, DEFAULT_ALPHA,
};
pub use matrix::{
    build_matrix, lambda_statistic, log_abs_det, log_ratio, AnalysisResult, BenfordMatrix,
    FrequencyVector, LogDet, OrderMode, Site,
};
pub use measure::{
    continuous_cdf, continuous_pdf, discrete_pmf, leading_digit, moments, sample_continuous,
    ContinuousBenford, DiscreteBenford, MomentSet,
};
pub use search::{
    leave_one_out_scan, max_lambda_search, max_permutation_analysis, MaxLambdaSubset, OrderingMode,
    ScanConfig, ScanResult, SiteScore,
};
pub use simulation::{
    generate_frequencies, generate_planted_trial, run_planted_anomaly, run_trials, Sampler,
    SamplerSpec, SimulationReport,
};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub struct Introduction;
    #[doc = include_str!("../../../book/src/measure.md")]
    pub struct Measure;
    #[doc = include_str!("../../../book/src/matrix.md")]
    pub struct Matrix;
    #[doc = include_str!("../../../book/src/hypothesis.md")]
    pub struct Hypothesis;
    #[doc = include_str!("../../../book/src/search.md")]
    pub struct Search;
    #[doc = include_str!("../../../book/src/simulation.md")]
    pub struct Simulation;
}
