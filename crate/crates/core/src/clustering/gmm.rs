use super::linalg::CholFactor;
use super::mixture::{
    converged, factor_all, global_covariance, hard_assignments, kmeans_responsibilities,
    softmax_in_place, validate, weighted_covariance, weighted_means, FitFlags, COLLAPSE_WEIGHT,
};
use crate::dataset::Dataset;
use crate::error::Result;
use crate::par;
use crate::partition::Partition;
use crate::rng::{derive_seed, rng_from_seed};

const LN_2PI: f64 = 1.837_877_066_409_345_5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GmmOptions {
    pub k: usize,
    pub seed: u64,
    pub max_iter: usize,
    pub tol: f64,
    /// Added to every covariance diagonal after each M-step.
    pub ridge: f64,
}

impl GmmOptions {
    pub fn new(k: usize, seed: u64) -> Self {
        GmmOptions {
            k,
            seed,
            max_iter: 200,
            tol: 1e-6,
            ridge: 1e-6,
        }
    }
}

/// Weights, means (k×d) and full covariances (k of d×d) of a Gaussian
/// mixture.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianMixtureParams {
    pub k: usize,
    pub d: usize,
    pub weights: Vec<f64>,
    pub means: Vec<f64>,
    pub covariances: Vec<Vec<f64>>,
}

impl GaussianMixtureParams {
    pub fn mean(&self, c: usize) -> &[f64] {
        &self.means[c * self.d..(c + 1) * self.d]
    }
}

#[derive(Debug, Clone)]
pub struct GmmFit {
    pub params: GaussianMixtureParams,
    pub partition: Partition,
    /// Argmax component per point, aligned with `params`.
    pub assignments: Vec<usize>,
    /// n×k responsibilities under `params`.
    pub responsibilities: Vec<f64>,
    /// Observed-data log-likelihood of `params`.
    pub loglik: f64,
    /// Log-likelihood at every E-step.
    pub history: Vec<f64>,
    pub n_iter: usize,
    pub converged: bool,
    pub flags: FitFlags,
}

/// EM for a full-covariance Gaussian mixture, started from the hard k-means
/// partition for the same seed.
pub fn gmm_fit(ds: &Dataset, opts: &GmmOptions) -> Result<GmmFit> {
    validate(ds, opts.k, "GMM")?;
    let k = opts.k;
    let mut flags = FitFlags::default();
    let mut reinit_rng = rng_from_seed(derive_seed(opts.seed, &[0x676d6d]));
    let global = global_covariance(ds, opts.ridge);

    let mut resp = kmeans_responsibilities(ds, k, opts.seed)?;
    let mut params = m_step(ds, &resp, opts, &global, &mut reinit_rng, &mut flags);
    let mut history = Vec::new();
    let mut done = false;
    let mut n_iter = 0;
    loop {
        let (factors, esc) = factor_all(&mut params.covariances, params.d, 0.0);
        flags.ridge_escalations += esc;
        let ll = e_step(ds, &params, &factors, &mut resp);
        if let Some(&prev) = history.last() {
            done = converged(prev, ll, opts.tol);
        }
        history.push(ll);
        n_iter += 1;
        if done || n_iter >= opts.max_iter {
            break;
        }
        params = m_step(ds, &resp, opts, &global, &mut reinit_rng, &mut flags);
    }
    let (assignments, partition) = hard_assignments(&resp, k);
    Ok(GmmFit {
        params,
        partition,
        assignments,
        responsibilities: resp,
        loglik: *history.last().unwrap(),
        history,
        n_iter,
        converged: done,
        flags,
    })
}

/// Fills `resp` and returns Σ_i log Σ_c w_c N(x_i | μ_c, Σ_c).
fn e_step(ds: &Dataset, p: &GaussianMixtureParams, factors: &[CholFactor], resp: &mut [f64]) -> f64 {
    let (k, d) = (p.k, p.d);
    let log_norm: Vec<f64> = (0..k)
        .map(|c| p.weights[c].ln() - 0.5 * (d as f64 * LN_2PI + factors[c].log_det()))
        .collect();
    let mut lse = vec![0.0; ds.n()];
    par::for_each_row_mut(resp, k, |i, row| {
        let x = ds.row(i);
        let mut buf = vec![0.0; d];
        for c in 0..k {
            let m = factors[c].mahalanobis_sq(x, p.mean(c), &mut buf);
            row[c] = log_norm[c] - 0.5 * m;
        }
    });
    for (i, row) in resp.chunks_exact_mut(k).enumerate() {
        lse[i] = softmax_in_place(row);
    }
    lse.iter().sum()
}

fn m_step(
    ds: &Dataset,
    resp: &[f64],
    opts: &GmmOptions,
    global: &[f64],
    rng: &mut crate::rng::Rng,
    flags: &mut FitFlags,
) -> GaussianMixtureParams {
    use rand::Rng;
    let (n, d, k) = (ds.n(), ds.dim(), opts.k);
    let (mut means, totals) = weighted_means(ds, resp, k);
    let mut weights: Vec<f64> = totals.iter().map(|t| t / n as f64).collect();
    let covs_or_none: Vec<Option<Vec<f64>>> = par::map_range(k, |c| {
        (weights[c] >= COLLAPSE_WEIGHT).then(|| {
            weighted_covariance(ds, |i| resp[i * k + c], &means[c * d..(c + 1) * d], totals[c], opts.ridge)
        })
    });
    let mut covariances = Vec::with_capacity(k);
    let mut reinit = false;
    for (c, cov) in covs_or_none.into_iter().enumerate() {
        match cov {
            Some(cov) => covariances.push(cov),
            None => {
                let i = rng.random_range(0..n);
                means[c * d..(c + 1) * d].copy_from_slice(ds.row(i));
                covariances.push(global.to_vec());
                weights[c] = 1.0 / k as f64;
                flags.reinitialized += 1;
                reinit = true;
            }
        }
    }
    if reinit {
        let s: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= s);
    }
    GaussianMixtureParams {
        k,
        d,
        weights,
        means,
        covariances,
    }
}
