//! Pieces shared by the Gaussian and Student-t EM fits.

use super::kmeans::{kmeans, KMeansOptions};
use super::linalg::{factor_with_ridge, CholFactor};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::par;
use crate::partition::Partition;

/// Components whose weight falls below this are re-initialized.
pub(crate) const COLLAPSE_WEIGHT: f64 = 1e-10;

/// Diagnostics raised during a mixture fit.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FitFlags {
    /// Components re-initialized at a random point after collapsing.
    pub reinitialized: usize,
    /// Times a covariance needed more than the configured ridge.
    pub ridge_escalations: usize,
    /// Degree-of-freedom updates whose root was not bracketed (t-mixture only).
    pub dof_not_bracketed: usize,
}

impl FitFlags {
    pub fn any(&self) -> bool {
        *self != FitFlags::default()
    }
}

pub(crate) fn validate(ds: &Dataset, k: usize, what: &str) -> Result<()> {
    if k == 0 || ds.n() < k {
        return Err(Error::invalid(format!(
            "{what} needs 1 <= k <= n, got k = {k}, n = {}",
            ds.n()
        )));
    }
    Ok(())
}

/// Hard k-means responsibilities (n×k) for the same seed.
pub(crate) fn kmeans_responsibilities(ds: &Dataset, k: usize, seed: u64) -> Result<Vec<f64>> {
    let fit = kmeans(ds, &KMeansOptions::new(k, seed))?;
    let mut resp = vec![0.0; ds.n() * k];
    for (i, &c) in fit.assignments.iter().enumerate() {
        resp[i * k + c] = 1.0;
    }
    Ok(resp)
}

/// Weighted covariance `Σ w_i (x_i − mu)(x_i − mu)ᵀ / norm` plus `ridge·I`.
pub(crate) fn weighted_covariance(
    ds: &Dataset,
    weight: impl Fn(usize) -> f64,
    mu: &[f64],
    norm: f64,
    ridge: f64,
) -> Vec<f64> {
    let d = ds.dim();
    let mut cov = vec![0.0; d * d];
    let mut centered = vec![0.0; d];
    for i in 0..ds.n() {
        let w = weight(i);
        if w == 0.0 {
            continue;
        }
        for ((c, x), m) in centered.iter_mut().zip(ds.row(i)).zip(mu) {
            *c = x - m;
        }
        for a in 0..d {
            let wa = w * centered[a];
            let row = &mut cov[a * d..a * d + a + 1];
            for (dst, cb) in row.iter_mut().zip(&centered[..=a]) {
                *dst += wa * cb;
            }
        }
    }
    let inv = 1.0 / norm;
    for a in 0..d {
        for b in 0..=a {
            let v = cov[a * d + b] * inv;
            cov[a * d + b] = v;
            cov[b * d + a] = v;
        }
        cov[a * d + a] += ridge;
    }
    cov
}

/// Plain covariance of the whole dataset plus ridge.
pub(crate) fn global_covariance(ds: &Dataset, ridge: f64) -> Vec<f64> {
    let mu = ds.mean();
    weighted_covariance(ds, |_| 1.0, &mu, ds.n() as f64, ridge)
}

/// Per-component weighted means, `Σ w_ic x_i / Σ w_ic`; components with zero
/// total weight keep a zero mean and report a zero total.
pub(crate) fn weighted_means(ds: &Dataset, w: &[f64], k: usize) -> (Vec<f64>, Vec<f64>) {
    let d = ds.dim();
    let mut sums = vec![0.0; k * d];
    let mut totals = vec![0.0; k];
    for i in 0..ds.n() {
        let x = ds.row(i);
        for c in 0..k {
            let wic = w[i * k + c];
            if wic == 0.0 {
                continue;
            }
            totals[c] += wic;
            for (s, xv) in sums[c * d..(c + 1) * d].iter_mut().zip(x) {
                *s += wic * xv;
            }
        }
    }
    for c in 0..k {
        if totals[c] > 0.0 {
            sums[c * d..(c + 1) * d].iter_mut().for_each(|s| *s /= totals[c]);
        }
    }
    (sums, totals)
}

/// Factors each covariance (in place) on the rayon pool; returns the
/// factors and the total ridge escalations.
pub(crate) fn factor_all(covs: &mut [Vec<f64>], d: usize, ridge: f64) -> (Vec<CholFactor>, usize) {
    let results = par::map_slice(covs, |cov| {
        let mut c = cov.clone();
        let (f, esc) = factor_with_ridge(&mut c, d, ridge);
        (c, f, esc)
    });
    let mut factors = Vec::with_capacity(covs.len());
    let mut escalations = 0;
    for (slot, (c, f, esc)) in covs.iter_mut().zip(results) {
        *slot = c;
        factors.push(f);
        escalations += esc;
    }
    (factors, escalations)
}

/// Normalizes a row of log-weights into responsibilities in place and
/// returns its log-sum-exp.
#[inline]
pub(crate) fn softmax_in_place(row: &mut [f64]) -> f64 {
    let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut total = 0.0;
    for v in row.iter_mut() {
        *v = (*v - max).exp();
        total += *v;
    }
    for v in row.iter_mut() {
        *v /= total;
    }
    max + total.ln()
}

/// Argmax responsibility per point, ties to the lower component, compacted.
pub(crate) fn hard_assignments(resp: &[f64], k: usize) -> (Vec<usize>, Partition) {
    let raw: Vec<usize> = resp
        .chunks_exact(k)
        .map(|row| {
            let mut best = 0;
            for c in 1..k {
                if row[c] > row[best] {
                    best = c;
                }
            }
            best
        })
        .collect();
    let p = Partition::from_labels(&raw);
    (raw, p)
}

/// Relative-improvement stopping rule.
pub(crate) fn converged(prev: f64, cur: f64, tol: f64) -> bool {
    (cur - prev) < tol * prev.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn softmax_rows_sum_to_one() {
        let mut row = [-1000.0, -1001.0, -1002.0];
        let lse = softmax_in_place(&mut row);
        assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        let direct = -1000.0 + (1.0 + (-1.0f64).exp() + (-2.0f64).exp()).ln();
        assert!((lse - direct).abs() < 1e-12);
    }

    #[test]
    fn covariance_of_known_points() {
        let ds = Dataset::from_rows(&[vec![0.0, 0.0], vec![2.0, 0.0], vec![0.0, 2.0], vec![2.0, 2.0]], None).unwrap();
        let cov = global_covariance(&ds, 0.0);
        assert_eq!(cov, vec![1.0, 0.0, 0.0, 1.0]);
    }
}
