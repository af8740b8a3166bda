//! Reference computations that share no code with the library: Laplace
//! cofactor determinants, adaptive Simpson quadrature, and a Student t
//! density whose normalising constant comes from the gamma recurrence
//! rather than a Lanczos approximation.
#![allow(dead_code)]

use std::f64::consts::{E, PI};

/// Cyclic ratio matrix written out directly from its definition.
pub fn ratio_matrix(counts: &[f64]) -> Vec<Vec<f64>> {
    let n = counts.len();
    (0..n)
        .map(|i| (0..n).map(|j| counts[j] / counts[(j + i) % n]).collect())
        .collect()
}

/// Determinant by cofactor expansion along the first row.
pub fn cofactor_det(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    match n {
        0 => 1.0,
        1 => m[0][0],
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        _ => (0..n)
            .map(|col| {
                let minor: Vec<Vec<f64>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|&(c, _)| c != col)
                            .map(|(_, &v)| v)
                            .collect()
                    })
                    .collect();
                let sign = if col % 2 == 0 { 1.0 } else { -1.0 };
                sign * m[0][col] * cofactor_det(&minor)
            })
            .sum(),
    }
}

/// `(e^2 + 1)/4 - ln|det| / n` with the determinant from cofactors.
pub fn cofactor_lambda(counts: &[f64]) -> f64 {
    let det = cofactor_det(&ratio_matrix(counts));
    (E * E + 1.0) / 4.0 - det.abs().ln() / counts.len() as f64
}

fn simpson(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
    let m = 0.5 * (a + b);
    let fm = f(m);
    (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
}

#[allow(clippy::too_many_arguments)]
fn adaptive(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    fa: f64,
    b: f64,
    fb: f64,
    whole: f64,
    m: f64,
    fm: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let (lm, flm, left) = simpson(f, a, fa, m, fm);
    let (rm, frm, right) = simpson(f, m, fm, b, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    adaptive(f, a, fa, m, fm, left, lm, flm, tol / 2.0, depth - 1)
        + adaptive(f, m, fm, b, fb, right, rm, frm, tol / 2.0, depth - 1)
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute `tol`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let f = &f as &dyn Fn(f64) -> f64;
    let (fa, fb) = (f(a), f(b));
    let (m, fm, whole) = simpson(f, a, fa, b, fb);
    adaptive(f, a, fa, b, fb, whole, m, fm, tol, 50)
}

/// `Gamma((nu + 1)/2) / Gamma(nu/2)` by the two-step recurrence from
/// `nu = 1` (`1/sqrt(pi)`) and `nu = 2` (`sqrt(pi)/2`).
fn gamma_ratio(df: u64) -> f64 {
    let mut nu = if df % 2 == 1 { 1 } else { 2 };
    let mut r = if nu == 1 {
        1.0 / PI.sqrt()
    } else {
        PI.sqrt() / 2.0
    };
    while nu < df {
        r *= (nu as f64 + 1.0) / nu as f64;
        nu += 2;
    }
    r
}

pub fn t_density(t: f64, df: u64) -> f64 {
    let nu = df as f64;
    gamma_ratio(df) / (nu * PI).sqrt() * (1.0 + t * t / nu).powf(-(nu + 1.0) / 2.0)
}

/// `P(T <= t)` by integrating the density from 0.
pub fn t_cdf(t: f64, df: u64) -> f64 {
    let half = integrate(|x| t_density(x, df), 0.0, t.abs(), 1e-13);
    if t >= 0.0 {
        0.5 + half
    } else {
        0.5 - half
    }
}

/// Two-sided p-value from the quadrature cdf.
pub fn two_sided_p(t: f64, df: u64) -> f64 {
    2.0 * t_cdf(-t.abs(), df)
}
