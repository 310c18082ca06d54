use std::io::Write;
use std::path::Path;

use rand::seq::SliceRandom;

use crate::dataset::Dataset;
use crate::distance::{condensed_distances, euclidean};
use crate::error::{Error, Result};
use crate::par;
use crate::rng::rng_from_seed;
use crate::stats::percentile_sorted;

/// Soft neighbor-count kernel. With `t = d / r`, `Gaussian` is `exp(-t²)` and
/// `Exponential` is `exp(-t)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum DensityKernel {
    #[default]
    Gaussian,
    Exponential,
}

impl DensityKernel {
    #[inline]
    fn eval(self, dist: f64, r: f64) -> f64 {
        let t = dist / r;
        match self {
            DensityKernel::Gaussian => (-t * t).exp(),
            DensityKernel::Exponential => (-t).exp(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityPeakProfile {
    pub rho: Vec<f64>,
    pub delta: Vec<f64>,
    pub gamma: Vec<f64>,
    pub r: f64,
    pub percentile: f64,
    pub kernel: DensityKernel,
}

/// `pth`-th percentile (linear interpolation) of all pairwise distances.
pub fn distance_percentile(ds: &Dataset, pth: f64) -> Result<f64> {
    Ok(distance_percentiles(ds, &[pth])?[0])
}

/// Several distance percentiles from one pass over the pairwise distances.
pub fn distance_percentiles(ds: &Dataset, pths: &[f64]) -> Result<Vec<f64>> {
    if ds.n() < 2 {
        return Err(Error::invalid("distance percentile needs at least two points"));
    }
    if let Some(p) = pths.iter().find(|&&p| !(p > 0.0 && p <= 100.0)) {
        return Err(Error::invalid(format!("percentile must be in (0, 100], got {p}")));
    }
    let mut dist = condensed_distances(ds);
    let m = dist.len();
    Ok(pths
        .iter()
        .map(|&pth| {
            let pos = pth / 100.0 * (m - 1) as f64;
            let lo = (pos.floor() as usize).min(m - 1);
            let (_, &mut lo_val, upper) = dist.select_nth_unstable_by(lo, f64::total_cmp);
            if upper.is_empty() {
                return lo_val;
            }
            let hi_val = upper.iter().copied().fold(f64::INFINITY, f64::min);
            lo_val + (pos - lo as f64) * (hi_val - lo_val)
        })
        .collect())
}

/// Gaussian-kernel soft neighbor counts within radius `r`.
pub fn local_density(ds: &Dataset, r: f64) -> Result<Vec<f64>> {
    local_density_with(ds, r, DensityKernel::Gaussian)
}

pub fn local_density_with(ds: &Dataset, r: f64, kernel: DensityKernel) -> Result<Vec<f64>> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::invalid(format!("density radius must be positive, got {r}")));
    }
    let n = ds.n();
    Ok(par::map_range(n, |i| {
        let xi = ds.row(i);
        (0..n)
            .filter(|&j| j != i)
            .map(|j| kernel.eval(euclidean(xi, ds.row(j)), r))
            .sum()
    }))
}

/// Distance from each point to its nearest denser point. Point `j` is denser
/// than `i` when `rho[j] > rho[i]`, or the two tie and `j < i`. The one point
/// with no denser point gets the largest pairwise distance.
pub fn delta_distances(ds: &Dataset, rho: &[f64]) -> Result<Vec<f64>> {
    let n = ds.n();
    if rho.len() != n {
        return Err(Error::invalid(format!("rho has {} entries for {n} points", rho.len())));
    }
    let denser = |j: usize, i: usize| rho[j] > rho[i] || (rho[j] == rho[i] && j < i);
    let scans: Vec<(f64, f64)> = par::map_range(n, |i| {
        let xi = ds.row(i);
        let mut nearest = f64::INFINITY;
        let mut farthest = 0.0f64;
        for j in 0..n {
            if j == i {
                continue;
            }
            let dist = euclidean(xi, ds.row(j));
            farthest = farthest.max(dist);
            if denser(j, i) {
                nearest = nearest.min(dist);
            }
        }
        (nearest, farthest)
    });
    let max_dist = scans.iter().map(|s| s.1).fold(0.0, f64::max);
    Ok(scans
        .into_iter()
        .map(|(near, _)| if near.is_finite() { near } else { max_dist })
        .collect())
}

/// ρ, δ and γ = ρ·δ with `r` taken at the `pth` distance percentile.
pub fn density_peak_profile(ds: &Dataset, pth: f64) -> Result<DensityPeakProfile> {
    density_peak_profile_with(ds, pth, DensityKernel::Gaussian)
}

pub fn density_peak_profile_with(ds: &Dataset, pth: f64, kernel: DensityKernel) -> Result<DensityPeakProfile> {
    let r = distance_percentile(ds, pth)?;
    profile_at(ds, pth, r, kernel)
}

/// Profiles for several percentiles, sharing the distance percentile pass.
pub fn density_peak_profiles(ds: &Dataset, pths: &[f64], kernel: DensityKernel) -> Result<Vec<DensityPeakProfile>> {
    let radii = distance_percentiles(ds, pths)?;
    pths.iter().zip(radii).map(|(&p, r)| profile_at(ds, p, r, kernel)).collect()
}

fn profile_at(ds: &Dataset, pth: f64, r: f64, kernel: DensityKernel) -> Result<DensityPeakProfile> {
    if r == 0.0 {
        return Err(Error::invalid(format!(
            "the {pth}th distance percentile is zero (duplicate points); choose a larger percentile"
        )));
    }
    let rho = local_density_with(ds, r, kernel)?;
    let delta = delta_distances(ds, &rho)?;
    let gamma = rho.iter().zip(&delta).map(|(a, b)| a * b).collect();
    Ok(DensityPeakProfile {
        rho,
        delta,
        gamma,
        r,
        percentile: pth,
        kernel,
    })
}

impl DensityPeakProfile {
    pub fn len(&self) -> usize {
        self.rho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho.is_empty()
    }

    /// The `m` largest γ values, descending, ties by index. `m` is clamped to `n`.
    pub fn top_gamma(&self, m: usize) -> Vec<(usize, f64)> {
        let n = self.len();
        let m = if m > n {
            log::warn!("top_gamma: requested {m} of {n} points, returning all");
            n
        } else {
            m
        };
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by(|&a, &b| self.gamma[b].total_cmp(&self.gamma[a]));
        idx.truncate(m);
        idx.into_iter().map(|i| (i, self.gamma[i])).collect()
    }

    /// Number of points ranked above the largest ratio between consecutive
    /// sorted γ values among the top `m`, or 0 when no ratio exceeds 2.
    pub fn gap_peaks(&self, m: usize) -> usize {
        let top = self.top_gamma(m);
        let mut best = (0, 2.0);
        for (pos, w) in top.windows(2).enumerate() {
            if w[1].1 <= 0.0 {
                if w[0].1 > 0.0 {
                    return if best.0 == 0 { pos + 1 } else { best.0 };
                }
                break;
            }
            let ratio = w[0].1 / w[1].1;
            if ratio > best.1 {
                best = (pos + 1, ratio);
            }
        }
        best.0
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "index,rho,delta,gamma")?;
        for i in 0..self.len() {
            writeln!(w, "{i},{},{},{}", self.rho[i], self.delta[i], self.gamma[i])?;
        }
        Ok(())
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = std::io::BufWriter::new(file);
        self.write_csv(&mut w).and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
    }
}

/// Copy of `ds` with every coordinate permuted independently across points:
/// same marginals, no joint structure.
pub fn shuffled_baseline(ds: &Dataset, seed: u64) -> Dataset {
    let (n, d) = (ds.n(), ds.dim());
    let mut rng = rng_from_seed(seed);
    let mut points = vec![0.0; n * d];
    let mut order: Vec<usize> = (0..n).collect();
    for c in 0..d {
        order.shuffle(&mut rng);
        for (i, &src) in order.iter().enumerate() {
            points[i * d + c] = ds.points()[src * d + c];
        }
    }
    Dataset::new(format!("{}-shuffled", ds.name()), points, n, d, None).expect("same shape as the source")
}

/// Points whose γ exceeds the 99th γ-percentile of the shuffled baseline at the
/// same distance percentile.
pub fn peaks_above_baseline(ds: &Dataset, pth: f64, seed: u64) -> Result<usize> {
    let profile = density_peak_profile(ds, pth)?;
    let base = density_peak_profile(&shuffled_baseline(ds, seed), pth)?;
    let mut g = base.gamma;
    g.sort_by(f64::total_cmp);
    let threshold = percentile_sorted(&g, 99.0);
    Ok(profile.gamma.iter().filter(|&&x| x > threshold).count())
}
