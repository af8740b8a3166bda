//! Benford matrices and the lambda statistic.
//!
//! For counts `f_0, ..., f_{n-1}` the Benford matrix is the cyclic ratio
//! matrix `A[i][j] = f_j / f_{(j + i) mod n}`. Row 0 is all ones and every
//! row multiplies out to one. `ln|det A|` summarises the accumulated log
//! ratios between sites, and
//!
//! ```text
//! lambda = (e^2 + 1)/4 - ln|det A| / n
//! ```
//!
//! measures how far the average log-volume sits from the continuous Benford
//! mean. A singular matrix is reported as `lambda = +inf` with a flag.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{BenfordError, Result};
use crate::measure::benford_mean;

/// Pivots below this fraction of the largest entry magnitude are singular.
pub const SINGULARITY_THRESHOLD: f64 = 1e-12;

/// One site and its visit count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Site {
    pub id: String,
    pub count: f64,
}

impl Site {
    pub fn new(id: impl Into<String>, count: f64) -> Self {
        Self {
            id: id.into(),
            count,
        }
    }
}

/// Strictly positive visit counts for two or more uniquely named sites.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrequencyVector {
    sites: Vec<Site>,
}

impl FrequencyVector {
    pub fn new(sites: Vec<Site>) -> Result<Self> {
        if sites.len() < 2 {
            return Err(BenfordError::InvalidFrequencies(format!(
                "need at least 2 sites, got {}",
                sites.len()
            )));
        }
        let mut seen = HashSet::with_capacity(sites.len());
        for site in &sites {
            if !(site.count.is_finite() && site.count > 0.0) {
                return Err(BenfordError::InvalidFrequencies(format!(
                    "site {:?} has non-positive or non-finite count {}",
                    site.id, site.count
                )));
            }
            if !seen.insert(site.id.as_str()) {
                return Err(BenfordError::InvalidFrequencies(format!(
                    "duplicate site id {:?}",
                    site.id
                )));
            }
        }
        Ok(Self { sites })
    }

    /// Builds a vector with generated ids `s1, s2, ...`.
    pub fn from_counts(counts: &[f64]) -> Result<Self> {
        Self::new(
            counts
                .iter()
                .enumerate()
                .map(|(i, &c)| Site::new(format!("s{}", i + 1), c))
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn counts(&self) -> Vec<f64> {
        self.sites.iter().map(|s| s.count).collect()
    }

    pub fn ids(&self) -> Vec<String> {
        self.sites.iter().map(|s| s.id.clone()).collect()
    }

    /// Every count multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.sites
                .iter()
                .map(|s| Site::new(s.id.clone(), s.count * factor))
                .collect(),
        )
    }

    /// Sites reordered so that position `k` holds site `order[k]`.
    pub fn reordered(&self, order: &[usize]) -> Result<Self> {
        let mut used = vec![false; self.len()];
        if order.len() != self.len()
            || order
                .iter()
                .any(|&i| i >= self.len() || std::mem::replace(&mut used[i], true))
        {
            return Err(BenfordError::Domain(
                "ordering is not a permutation of the sites".into(),
            ));
        }
        Ok(Self {
            sites: order.iter().map(|&i| self.sites[i].clone()).collect(),
        })
    }

    /// Indices that put the sites in canonical order: descending count, ties
    /// broken by ascending id.
    pub fn canonical_indices(&self) -> Vec<usize> {
        canonical_order(&self.sites, (0..self.len()).collect())
    }

    pub fn canonical(&self) -> Self {
        Self {
            sites: self
                .canonical_indices()
                .into_iter()
                .map(|i| self.sites[i].clone())
                .collect(),
        }
    }
}

/// Sorts `indices` into canonical order relative to `sites`.
pub(crate) fn canonical_order(sites: &[Site], mut indices: Vec<usize>) -> Vec<usize> {
    indices.sort_by(|&a, &b| {
        let (sa, sb) = (&sites[a], &sites[b]);
        sb.count
            .total_cmp(&sa.count)
            .then_with(|| sa.id.cmp(&sb.id))
    });
    indices
}

/// `ln(f_i) - ln(f_j)`, the continuously compounded relative change.
pub fn log_ratio(f_i: f64, f_j: f64) -> Result<f64> {
    if !(f_i > 0.0 && f_j > 0.0) {
        return Err(BenfordError::Domain(format!(
            "log ratio needs positive arguments, got {f_i} and {f_j}"
        )));
    }
    Ok(f_i.ln() - f_j.ln())
}

/// Dense row-major `n x n` cyclic ratio matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenfordMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl BenfordMatrix {
    /// Builds the matrix for counts taken in the given order.
    ///
    /// Counts are assumed positive; [`FrequencyVector`] enforces that.
    pub fn from_counts(counts: &[f64]) -> Self {
        let n = counts.len();
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(counts[j] / counts[(j + i) % n]);
            }
        }
        Self { n, entries }
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.n + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.entries[row * self.n..(row + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.entries.chunks(self.n)
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.rows().map(<[f64]>::to_vec).collect()
    }
}

/// Benford matrix of `f` in the order its sites are stored.
pub fn build_matrix(f: &FrequencyVector) -> BenfordMatrix {
    BenfordMatrix::from_counts(&f.counts())
}

/// Result of a log-determinant evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogDet {
    /// `ln|det A|`, or `-inf` when degenerate.
    pub value: f64,
    /// Sign of the determinant (`0` when degenerate).
    pub sign: i8,
    pub degenerate: bool,
}

/// `ln|det A|` by LU factorisation with partial pivoting.
///
/// The log-magnitudes of the pivots are summed, so large matrices do not
/// overflow. A pivot below [`SINGULARITY_THRESHOLD`] times the largest entry
/// magnitude of `A` marks the matrix degenerate.
pub fn log_abs_det(a: &BenfordMatrix) -> LogDet {
    log_abs_det_dense(a.n, a.entries.clone())
}

pub(crate) fn log_abs_det_dense(n: usize, mut lu: Vec<f64>) -> LogDet {
    let scale = lu.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let degenerate = LogDet {
        value: f64::NEG_INFINITY,
        sign: 0,
        degenerate: true,
    };
    if n == 0 || !(scale.is_finite() && scale > 0.0) {
        return degenerate;
    }
    let cutoff = SINGULARITY_THRESHOLD * scale;
    let mut log_sum = 0.0;
    let mut sign = 1i8;
    for k in 0..n {
        let (pivot_row, pivot_abs) =
            (k..n)
                .map(|r| (r, lu[r * n + k].abs()))
                .fold(
                    (k, -1.0),
                    |best, cur| if cur.1 > best.1 { cur } else { best },
                );
        if pivot_abs.is_nan() || pivot_abs < cutoff {
            return degenerate;
        }
        if pivot_row != k {
            for c in 0..n {
                lu.swap(k * n + c, pivot_row * n + c);
            }
            sign = -sign;
        }
        let pivot = lu[k * n + k];
        if pivot < 0.0 {
            sign = -sign;
        }
        log_sum += pivot_abs.ln();
        for r in (k + 1)..n {
            let factor = lu[r * n + k] / pivot;
            if factor == 0.0 {
                continue;
            }
            for c in (k + 1)..n {
                lu[r * n + c] -= factor * lu[k * n + c];
            }
        }
    }
    LogDet {
        value: log_sum,
        sign,
        degenerate: false,
    }
}

/// How the site ordering behind a lambda value was chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderMode {
    /// Descending count, ties by ascending site id.
    Canonical,
    /// The lambda-maximising ordering found by a permutation search.
    MaxPermutation,
}

/// Lambda together with the quantities it was derived from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisResult {
    pub n: usize,
    /// Site ids in the order used to build the matrix.
    pub ordering: Vec<String>,
    #[serde(with = "crate::extreal")]
    pub log_abs_det: f64,
    #[serde(with = "crate::extreal")]
    pub lambda: f64,
    pub degenerate: bool,
    pub order_mode: OrderMode,
}

/// Lambda from an already computed log-determinant.
pub fn lambda_from_log_det(log_det: &LogDet, n: usize) -> f64 {
    if log_det.degenerate {
        f64::INFINITY
    } else {
        benford_mean() - log_det.value / n as f64
    }
}

/// Lambda for counts in exactly the given order.
pub fn lambda_for_counts(counts: &[f64]) -> (LogDet, f64) {
    let n = counts.len();
    let a = BenfordMatrix::from_counts(counts);
    let ld = log_abs_det_dense(n, a.entries);
    let lambda = lambda_from_log_det(&ld, n);
    (ld, lambda)
}

/// Lambda of `f` with its sites taken as stored.
pub fn lambda_in_order(f: &FrequencyVector, order_mode: OrderMode) -> AnalysisResult {
    let (ld, lambda) = lambda_for_counts(&f.counts());
    AnalysisResult {
        n: f.len(),
        ordering: f.ids(),
        log_abs_det: ld.value,
        lambda,
        degenerate: ld.degenerate,
        order_mode,
    }
}

/// Lambda of `f` under the canonical ordering.
pub fn lambda_statistic(f: &FrequencyVector) -> AnalysisResult {
    lambda_in_order(&f.canonical(), OrderMode::Canonical)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fv(counts: &[f64]) -> FrequencyVector {
        FrequencyVector::from_counts(counts).unwrap()
    }

    #[test]
    fn frequency_vector_invariants() {
        assert!(FrequencyVector::from_counts(&[1.0]).is_err());
        assert!(FrequencyVector::from_counts(&[1.0, 0.0]).is_err());
        assert!(FrequencyVector::from_counts(&[1.0, -2.0]).is_err());
        assert!(FrequencyVector::from_counts(&[1.0, f64::NAN]).is_err());
        assert!(FrequencyVector::from_counts(&[1.0, f64::INFINITY]).is_err());
        let dup = vec![Site::new("a", 1.0), Site::new("a", 2.0)];
        assert!(matches!(
            FrequencyVector::new(dup),
            Err(BenfordError::InvalidFrequencies(_))
        ));
    }

    #[test]
    fn canonical_order_breaks_ties_by_id() {
        let f = FrequencyVector::new(vec![
            Site::new("b", 2.0),
            Site::new("c", 5.0),
            Site::new("a", 2.0),
        ])
        .unwrap();
        assert_eq!(f.canonical().ids(), ["c", "a", "b"]);
    }

    #[test]
    fn log_ratio_examples() {
        assert_eq!(log_ratio(100.0, 100.0).unwrap(), 0.0);
        assert!((log_ratio(110.0, 100.0).unwrap() - 0.09531).abs() < 1e-5);
        assert!((log_ratio(100.0, 110.0).unwrap() + 0.09531).abs() < 1e-5);
        assert!(log_ratio(0.0, 1.0).is_err());
        assert!(log_ratio(1.0, -1.0).is_err());
    }

    #[test]
    fn three_site_matrix_layout() {
        let a = build_matrix(&fv(&[1.0, 2.0, 3.0]));
        let expected = [
            [1.0, 1.0, 1.0],
            [1.0 / 2.0, 2.0 / 3.0, 3.0],
            [1.0 / 3.0, 2.0, 3.0 / 2.0],
        ];
        for (row, want) in a.rows().zip(expected) {
            assert_eq!(row, want);
        }
        let ones = build_matrix(&fv(&[5.0, 5.0, 5.0]));
        assert!(ones.entries().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn small_determinants() {
        let ld = log_abs_det(&build_matrix(&fv(&[1.0, 2.0, 3.0])));
        assert!(!ld.degenerate);
        assert_eq!(ld.sign, -1);
        assert!((ld.value - (143.0f64 / 36.0).ln()).abs() < 1e-12);

        let ld = log_abs_det(&build_matrix(&fv(&[1.0, 2.0])));
        assert!((ld.value - 1.5f64.ln()).abs() < 1e-12);

        let ld = log_abs_det(&build_matrix(&fv(&[5.0, 5.0, 5.0])));
        assert!(ld.degenerate);
        assert_eq!(ld.value, f64::NEG_INFINITY);
    }

    #[test]
    fn lambda_examples() {
        let r = lambda_statistic(&fv(&[1.0, 2.0, 3.0]));
        assert!((r.lambda - 1.6374884).abs() < 1e-6);
        assert_eq!(r.order_mode, OrderMode::Canonical);
        assert_eq!(r.ordering, ["s3", "s2", "s1"]);
        let r = lambda_statistic(&fv(&[1.0, 2.0]));
        assert!((r.lambda - 1.89453).abs() < 1e-5);
        let r = lambda_statistic(&fv(&[5.0, 5.0, 5.0]));
        assert!(r.degenerate);
        assert_eq!(r.lambda, f64::INFINITY);
    }

    #[test]
    fn equal_counts_are_always_degenerate() {
        for n in 2..=8 {
            let r = lambda_statistic(&fv(&vec![4.0; n]));
            assert!(r.degenerate, "n = {n}");
        }
    }

    #[test]
    fn reordered_rejects_non_permutations() {
        let f = fv(&[1.0, 2.0, 3.0]);
        assert!(f.reordered(&[0, 0, 1]).is_err());
        assert!(f.reordered(&[0, 1]).is_err());
        assert_eq!(f.reordered(&[2, 0, 1]).unwrap().counts(), [3.0, 1.0, 2.0]);
    }
}
