use statrs::function::gamma::{digamma, ln_gamma};

use super::linalg::CholFactor;
use super::mixture::{
    converged, factor_all, global_covariance, hard_assignments, kmeans_responsibilities,
    softmax_in_place, validate, weighted_covariance, weighted_means, FitFlags, COLLAPSE_WEIGHT,
};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::par;
use crate::partition::Partition;
use crate::rng::{derive_seed, rng_from_seed};

/// Range the degree-of-freedom root search is confined to.
pub const DOF_MIN: f64 = 0.1;
pub const DOF_MAX: f64 = 200.0;
const LN_PI: f64 = 1.144_729_885_849_400_2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DofMode {
    Fixed(f64),
    /// Per-component estimate, started from the given value.
    Estimate { initial: f64 },
}

impl Default for DofMode {
    fn default() -> Self {
        DofMode::Estimate { initial: 4.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TmmOptions {
    pub k: usize,
    pub seed: u64,
    pub max_iter: usize,
    pub tol: f64,
    pub ridge: f64,
    pub dof: DofMode,
}

impl TmmOptions {
    pub fn new(k: usize, seed: u64) -> Self {
        TmmOptions {
            k,
            seed,
            max_iter: 200,
            tol: 1e-6,
            ridge: 1e-6,
            dof: DofMode::default(),
        }
    }
}

/// Student-t mixture parameters; `covariances` are the scale matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct TMixtureParams {
    pub k: usize,
    pub d: usize,
    pub weights: Vec<f64>,
    pub means: Vec<f64>,
    pub covariances: Vec<Vec<f64>>,
    pub dof: Vec<f64>,
}

impl TMixtureParams {
    pub fn mean(&self, c: usize) -> &[f64] {
        &self.means[c * self.d..(c + 1) * self.d]
    }
}

#[derive(Debug, Clone)]
pub struct TmmFit {
    pub params: TMixtureParams,
    pub partition: Partition,
    pub assignments: Vec<usize>,
    pub responsibilities: Vec<f64>,
    pub loglik: f64,
    pub history: Vec<f64>,
    pub n_iter: usize,
    pub converged: bool,
    pub flags: FitFlags,
}

/// EM for a mixture of multivariate t distributions.
///
/// Latent scale weights are `u_ic = (ν_c + d) / (ν_c + δ_ic)` with `δ_ic` the
/// squared Mahalanobis distance. In estimate mode each ν_c is the root of the
/// usual dof score equation, found by bisection on `[DOF_MIN, DOF_MAX]`; an
/// unbracketed root keeps the previous value.
pub fn tmm_fit(ds: &Dataset, opts: &TmmOptions) -> Result<TmmFit> {
    validate(ds, opts.k, "TMM")?;
    let k = opts.k;
    let d = ds.dim();
    let nu0 = match opts.dof {
        DofMode::Fixed(v) | DofMode::Estimate { initial: v } => v,
    };
    if !(nu0 > 0.0 && nu0.is_finite()) {
        return Err(Error::invalid(format!("degrees of freedom must be positive, got {nu0}")));
    }
    let mut flags = FitFlags::default();
    let mut reinit_rng = rng_from_seed(derive_seed(opts.seed, &[0x746d6d]));
    let global = global_covariance(ds, opts.ridge);

    // Start from the hard k-means partition with unit scale weights.
    let mut resp = kmeans_responsibilities(ds, k, opts.seed)?;
    let mut u = vec![1.0; ds.n() * k];
    let mut dof = vec![nu0; k];
    let mut params = m_step(ds, &resp, &u, &dof, opts, &global, &mut reinit_rng, &mut flags, false);
    let mut history = Vec::new();
    let mut done = false;
    let mut n_iter = 0;
    loop {
        let (factors, esc) = factor_all(&mut params.covariances, d, 0.0);
        flags.ridge_escalations += esc;
        let ll = e_step(ds, &params, &factors, &mut resp, &mut u);
        if let Some(&prev) = history.last() {
            done = converged(prev, ll, opts.tol);
        }
        history.push(ll);
        n_iter += 1;
        if done || n_iter >= opts.max_iter {
            break;
        }
        dof.clone_from(&params.dof);
        let estimate = matches!(opts.dof, DofMode::Estimate { .. });
        params = m_step(ds, &resp, &u, &dof, opts, &global, &mut reinit_rng, &mut flags, estimate);
    }
    let (assignments, partition) = hard_assignments(&resp, k);
    Ok(TmmFit {
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

/// log t_ν(x | μ, Σ) up to the Mahalanobis term.
fn log_t_norm(nu: f64, d: usize, log_det: f64) -> f64 {
    let df = d as f64;
    ln_gamma(0.5 * (nu + df)) - ln_gamma(0.5 * nu) - 0.5 * df * (nu.ln() + LN_PI) - 0.5 * log_det
}

fn e_step(
    ds: &Dataset,
    p: &TMixtureParams,
    factors: &[CholFactor],
    resp: &mut [f64],
    u: &mut [f64],
) -> f64 {
    let (k, d) = (p.k, p.d);
    let df = d as f64;
    let log_norm: Vec<f64> = (0..k)
        .map(|c| p.weights[c].ln() + log_t_norm(p.dof[c], d, factors[c].log_det()))
        .collect();
    let rows: Vec<(Vec<f64>, Vec<f64>)> = par::map_range(ds.n(), |i| {
        let x = ds.row(i);
        let mut buf = vec![0.0; d];
        let mut logp = vec![0.0; k];
        let mut ui = vec![0.0; k];
        for c in 0..k {
            let m = factors[c].mahalanobis_sq(x, p.mean(c), &mut buf);
            let nu = p.dof[c];
            logp[c] = log_norm[c] - 0.5 * (nu + df) * (m / nu).ln_1p();
            ui[c] = (nu + df) / (nu + m);
        }
        (logp, ui)
    });
    let mut total = 0.0;
    for (i, (mut logp, ui)) in rows.into_iter().enumerate() {
        total += softmax_in_place(&mut logp);
        resp[i * k..(i + 1) * k].copy_from_slice(&logp);
        u[i * k..(i + 1) * k].copy_from_slice(&ui);
    }
    total
}

#[allow(clippy::too_many_arguments)]
fn m_step(
    ds: &Dataset,
    resp: &[f64],
    u: &[f64],
    prev_dof: &[f64],
    opts: &TmmOptions,
    global: &[f64],
    rng: &mut crate::rng::Rng,
    flags: &mut FitFlags,
    estimate_dof: bool,
) -> TMixtureParams {
    use rand::Rng;
    let (n, d, k) = (ds.n(), ds.dim(), opts.k);
    let tu: Vec<f64> = resp.iter().zip(u).map(|(t, u)| t * u).collect();
    let (mut means, _) = weighted_means(ds, &tu, k);
    let totals: Vec<f64> = (0..k)
        .map(|c| (0..n).map(|i| resp[i * k + c]).sum::<f64>())
        .collect();
    let mut weights: Vec<f64> = totals.iter().map(|t| t / n as f64).collect();
    let covs: Vec<Option<Vec<f64>>> = par::map_range(k, |c| {
        (weights[c] >= COLLAPSE_WEIGHT).then(|| {
            weighted_covariance(ds, |i| tu[i * k + c], &means[c * d..(c + 1) * d], totals[c], opts.ridge)
        })
    });
    let mut dof = prev_dof.to_vec();
    let mut covariances = Vec::with_capacity(k);
    let mut reinit = false;
    for (c, cov) in covs.into_iter().enumerate() {
        match cov {
            Some(cov) => {
                covariances.push(cov);
                if estimate_dof {
                    let s: f64 = (0..n)
                        .map(|i| resp[i * k + c] * (u[i * k + c].ln() - u[i * k + c]))
                        .sum::<f64>()
                        / totals[c];
                    match solve_dof(prev_dof[c], d, s) {
                        Some(nu) => dof[c] = nu,
                        None => flags.dof_not_bracketed += 1,
                    }
                }
            }
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
    TMixtureParams {
        k,
        d,
        weights,
        means,
        covariances,
        dof,
    }
}

/// Root of `−ψ(ν/2) + ln(ν/2) + 1 + s + ψ((ν₀+d)/2) − ln((ν₀+d)/2)` where
/// `s` is the responsibility-weighted mean of `ln u − u`.
pub(crate) fn solve_dof(prev: f64, d: usize, s: f64) -> Option<f64> {
    let half = 0.5 * (prev + d as f64);
    let constant = 1.0 + s + digamma(half) - half.ln();
    let score = |nu: f64| -digamma(0.5 * nu) + (0.5 * nu).ln() + constant;
    let (mut lo, mut hi) = (DOF_MIN, DOF_MAX);
    let (f_lo, f_hi) = (score(lo), score(hi));
    if !(f_lo.is_finite() && f_hi.is_finite()) || f_lo.signum() == f_hi.signum() {
        return None;
    }
    // The score decreases in ν.
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if score(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-10 * mid.max(1.0) {
            break;
        }
    }
    Some(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clustering::gmm::{gmm_fit, GmmOptions};
    use crate::metrics::ari;
    use rand_distr::{ChiSquared, Distribution, StandardNormal};

    #[test]
    fn dof_root_solves_score() {
        let d = 3;
        let s = -1.2;
        let nu = solve_dof(5.0, d, s).unwrap();
        let half: f64 = 0.5 * (5.0 + d as f64);
        let f = -digamma(0.5 * nu) + (0.5 * nu).ln() + 1.0 + s + digamma(half) - half.ln();
        assert!(f.abs() < 1e-8, "residual {f}");
        // Gaussian-like data (s close to −1 − tiny) pushes ν past the range.
        assert!(solve_dof(199.0, d, -1.0).is_none());
    }

    #[test]
    fn recovers_heavy_tailed_dof() {
        let mut rng = rng_from_seed(12);
        let chi = ChiSquared::new(3.0).unwrap();
        // Multivariate t with ν = 3: x = z / sqrt(V/ν), V ~ χ²(ν).
        let rows: Vec<Vec<f64>> = (0..4000)
            .map(|_| {
                let v: f64 = chi.sample(&mut rng);
                let scale = 1.0 / (v / 3.0).sqrt();
                (0..2)
                    .map(|_| {
                        let z: f64 = StandardNormal.sample(&mut rng);
                        scale * z
                    })
                    .collect()
            })
            .collect();
        let ds = Dataset::from_rows(&rows, None).unwrap();
        let fit = tmm_fit(&ds, &TmmOptions::new(1, 0)).unwrap();
        let nu = fit.params.dof[0];
        assert!((1.5..6.0).contains(&nu), "estimated dof {nu}");
    }

    #[test]
    fn large_fixed_dof_matches_gmm() {
        let mut rng = rng_from_seed(7);
        let mut rows = Vec::new();
        for c in 0..3 {
            for _ in 0..100 {
                rows.push(
                    (0..2)
                        .map(|j| {
                            let z: f64 = StandardNormal.sample(&mut rng);
                            if j == 0 { 6.0 * c as f64 + z } else { z }
                        })
                        .collect(),
                );
            }
        }
        let ds = Dataset::from_rows(&rows, None).unwrap();
        let g = gmm_fit(&ds, &GmmOptions::new(3, 4)).unwrap();
        let mut o = TmmOptions::new(3, 4);
        o.dof = DofMode::Fixed(200.0);
        let t = tmm_fit(&ds, &o).unwrap();
        assert_eq!(ari(&g.partition, &t.partition).unwrap(), 1.0);
        assert!(t.params.dof.iter().all(|&v| v == 200.0));
    }

    #[test]
    fn loglik_is_monotone() {
        let mut rng = rng_from_seed(8);
        let rows: Vec<Vec<f64>> = (0..400)
            .map(|i| {
                (0..3)
                    .map(|_| {
                        let z: f64 = StandardNormal.sample(&mut rng);
                        z + if i % 2 == 0 { 2.0 } else { -2.0 }
                    })
                    .collect()
            })
            .collect();
        let ds = Dataset::from_rows(&rows, None).unwrap();
        let fit = tmm_fit(&ds, &TmmOptions::new(3, 1)).unwrap();
        for w in fit.history.windows(2) {
            assert!(w[1] >= w[0] - 1e-8 * w[0].abs(), "{:?}", fit.history);
        }
    }

    #[test]
    fn rejects_bad_dof() {
        let ds = Dataset::from_rows(&[vec![0.0], vec![1.0]], None).unwrap();
        let mut o = TmmOptions::new(1, 0);
        o.dof = DofMode::Fixed(0.0);
        assert!(tmm_fit(&ds, &o).is_err());
    }
}
