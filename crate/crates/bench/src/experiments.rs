use std::path::{Path, PathBuf};

use dimclust_core::classifier::cross_val_accuracy;
use dimclust_core::dataset::bootstrap_split;
use dimclust_core::density::{density_peak_profiles, s_dbw, DensityKernel, DensityPeakProfile};
use dimclust_core::metrics::{ari, pairwise_ari};
use dimclust_core::rng::{derive_seed, name_tag};
use dimclust_core::stats::mean_sd;
use dimclust_core::{par, Dataset, Partition};
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::data::{forest_params, Benchmark};
use crate::error::{BenchError, BenchResult};
use crate::method::Clusterer;

/// Seed of one (dimension, method, seed index) cell. Each cell gets its own
/// stream, so adding or removing a method leaves the others untouched.
pub fn cell_seed(global: u64, dim: usize, method: &str, seed_index: usize) -> u64 {
    derive_seed(global, &[dim as u64, name_tag(method), seed_index as u64])
}

/// Seed of the bootstrap split for global seed index `s`, shared by every dim.
pub fn split_seed(global: u64, seed_index: usize) -> u64 {
    derive_seed(global, &[name_tag("bootstrap-split"), seed_index as u64])
}

pub const SEED_RULE: &str = "cell seed = derive_seed(global, [dim, fnv1a(method), seed_index]) with \
derive_seed folding each tag through SplitMix64; bootstrap fit b uses derive_seed(cell seed, [fnv1a(\"bootstrap\"), b]); \
the split for seed index s uses derive_seed(global, [fnv1a(\"bootstrap-split\"), s])";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub count: usize,
    /// Absent when there is nothing to summarize.
    pub mean: Option<f64>,
    /// Population standard deviation.
    pub sd: Option<f64>,
}

impl Summary {
    pub fn of(values: &[f64]) -> Self {
        if values.is_empty() {
            return Summary {
                count: 0,
                mean: None,
                sd: None,
            };
        }
        let (m, s) = mean_sd(values);
        Summary {
            count: values.len(),
            mean: Some(m),
            sd: Some(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellFailure {
    pub seed_index: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedRun {
    pub seed_index: usize,
    pub seed: u64,
    pub ari: f64,
    pub clusters: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerformanceCell {
    pub dim: usize,
    pub method: String,
    pub runs: Vec<SeedRun>,
    pub summary: Summary,
    pub failures: Vec<CellFailure>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityCell {
    pub dim: usize,
    pub method: String,
    /// (seed index a, seed index b, ARI) for every pair of successful runs.
    pub pairs: Vec<(usize, usize, f64)>,
    pub summary: Summary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapRun {
    pub seed_index: usize,
    /// ARIs on the shared core for fit pairs (0,1), (0,2), (1,2).
    pub ari: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapCell {
    pub dim: usize,
    pub method: String,
    pub runs: Vec<BootstrapRun>,
    /// Over every pairwise ARI of every seed.
    pub summary: Summary,
    pub failures: Vec<CellFailure>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapSection {
    pub n: usize,
    pub fit_size: usize,
    pub shared_size: usize,
    pub split_seeds: Vec<u64>,
    pub cells: Vec<BootstrapCell>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaPoint {
    pub rank: usize,
    pub index: usize,
    pub rho: f64,
    pub delta: f64,
    pub gamma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityCell {
    pub dim: usize,
    pub percentile: f64,
    pub r: f64,
    pub top_gamma: Vec<GammaPoint>,
    /// Automatic gap-heuristic peak count; informational only.
    pub gap_peaks: usize,
    /// Full profile CSV, relative to the output directory.
    pub profile_csv: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SdbwCell {
    pub dim: usize,
    pub value: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RfCell {
    pub dim: usize,
    pub fold_accuracy: Vec<f64>,
    pub summary: Summary,
    pub stratified: bool,
}

/// Fitted partitions kept for the stability analysis: per cell, per seed.
pub type PartitionStore = Vec<(usize, String, Vec<Option<Partition>>)>;

fn truth_of(ds: &Dataset) -> BenchResult<Partition> {
    ds.labels()
        .map(Partition::from_labels)
        .ok_or_else(|| BenchError::Config(format!("dataset {} has no labels", ds.name())))
}

/// Fits every method on every full dataset once per seed and scores the
/// partitions against the ground truth.
pub fn run_performance(
    cfg: &ExperimentConfig,
    bench: &Benchmark,
    clusterers: &[&dyn Clusterer],
) -> BenchResult<(Vec<PerformanceCell>, PartitionStore)> {
    let truths: Vec<Partition> = bench.datasets.iter().map(|(_, ds)| truth_of(ds)).collect::<BenchResult<_>>()?;
    let jobs: Vec<(usize, usize, usize)> = (0..bench.datasets.len())
        .flat_map(|di| (0..clusterers.len()).flat_map(move |mi| (0..cfg.n_seeds).map(move |s| (di, mi, s))))
        .collect();
    let fits = par::map_slice(&jobs, |&(di, mi, s)| {
        let (dim, ds) = &bench.datasets[di];
        let c = clusterers[mi];
        let seed = cell_seed(cfg.seed, *dim, c.name(), s);
        let fit = c.fit(ds, seed).and_then(|p| ari(&p, &truths[di]).map(|a| (p, a)));
        (seed, fit)
    });

    let mut cells = Vec::new();
    let mut store = Vec::new();
    let mut fits = fits.into_iter();
    for (dim, _) in &bench.datasets {
        for c in clusterers {
            let mut runs = Vec::new();
            let mut failures = Vec::new();
            let mut parts = Vec::new();
            for s in 0..cfg.n_seeds {
                let (seed, fit) = fits.next().expect("one fit per job");
                match fit {
                    Ok((p, a)) => {
                        runs.push(SeedRun {
                            seed_index: s,
                            seed,
                            ari: a,
                            clusters: p.k(),
                        });
                        parts.push(Some(p));
                    }
                    Err(e) => {
                        log::warn!("{} at d = {dim}, seed {s}: {e}", c.name());
                        failures.push(CellFailure {
                            seed_index: s,
                            message: e.to_string(),
                        });
                        parts.push(None);
                    }
                }
            }
            let values: Vec<f64> = runs.iter().map(|r| r.ari).collect();
            cells.push(PerformanceCell {
                dim: *dim,
                method: c.name().to_string(),
                runs,
                summary: Summary::of(&values),
                failures,
            });
            store.push((*dim, c.name().to_string(), parts));
        }
    }
    Ok((cells, store))
}

/// Pairwise ARI between the seed runs of each cell.
pub fn run_seed_stability(store: &PartitionStore) -> Vec<StabilityCell> {
    store
        .iter()
        .map(|(dim, method, parts)| {
            let ok: Vec<(usize, &Partition)> =
                parts.iter().enumerate().filter_map(|(i, p)| p.as_ref().map(|p| (i, p))).collect();
            let mut pairs = Vec::new();
            if ok.len() >= 2 {
                let owned: Vec<Partition> = ok.iter().map(|x| x.1.clone()).collect();
                let pw = pairwise_ari(&owned).expect("same-length partitions");
                let mut v = pw.values.iter();
                for a in 0..ok.len() {
                    for b in a + 1..ok.len() {
                        pairs.push((ok[a].0, ok[b].0, *v.next().unwrap()));
                    }
                }
            }
            let values: Vec<f64> = pairs.iter().map(|p| p.2).collect();
            StabilityCell {
                dim: *dim,
                method: method.clone(),
                pairs,
                summary: Summary::of(&values),
            }
        })
        .collect()
}

/// Three overlapping subsample fits per seed, scored on the shared core.
pub fn run_bootstrap(
    cfg: &ExperimentConfig,
    bench: &Benchmark,
    clusterers: &[&dyn Clusterer],
) -> BenchResult<BootstrapSection> {
    let n = bench.n();
    let split_seeds: Vec<u64> = (0..cfg.n_seeds).map(|s| split_seed(cfg.seed, s)).collect();
    let splits = split_seeds.iter().map(|&s| bootstrap_split(n, s)).collect::<Result<Vec<_>, _>>()?;
    let shared_size = splits[0].shared.len();
    let fit_size = shared_size + splits[0].unique[0].len();
    let core: Vec<usize> = (0..shared_size).collect();

    let jobs: Vec<(usize, usize, usize)> = (0..bench.datasets.len())
        .flat_map(|di| (0..clusterers.len()).flat_map(move |mi| (0..cfg.n_seeds).map(move |s| (di, mi, s))))
        .collect();
    let results = par::map_slice(&jobs, |&(di, mi, s)| -> dimclust_core::Result<[f64; 3]> {
        let (dim, ds) = &bench.datasets[di];
        let c = clusterers[mi];
        let base = cell_seed(cfg.seed, *dim, c.name(), s);
        let mut parts = Vec::with_capacity(3);
        for b in 0..3 {
            let sub = ds.subset(&splits[s].bootstrap_indices(b))?;
            let p = c.fit(&sub, derive_seed(base, &[name_tag("bootstrap"), b as u64]))?;
            parts.push(p.restrict(&core));
        }
        Ok([ari(&parts[0], &parts[1])?, ari(&parts[0], &parts[2])?, ari(&parts[1], &parts[2])?])
    });

    let mut results = results.into_iter();
    let mut cells = Vec::new();
    for (dim, _) in &bench.datasets {
        for c in clusterers {
            let mut runs = Vec::new();
            let mut failures = Vec::new();
            for s in 0..cfg.n_seeds {
                match results.next().expect("one result per job") {
                    Ok(a) => runs.push(BootstrapRun { seed_index: s, ari: a }),
                    Err(e) => {
                        log::warn!("bootstrap {} at d = {dim}, seed {s}: {e}", c.name());
                        failures.push(CellFailure {
                            seed_index: s,
                            message: e.to_string(),
                        })
                    }
                }
            }
            let values: Vec<f64> = runs.iter().flat_map(|r| r.ari).collect();
            cells.push(BootstrapCell {
                dim: *dim,
                method: c.name().to_string(),
                runs,
                summary: Summary::of(&values),
                failures,
            });
        }
    }
    Ok(BootstrapSection {
        n,
        fit_size,
        shared_size,
        split_seeds,
        cells,
    })
}

pub fn profile_file_name(dim: usize, percentile: f64) -> PathBuf {
    Path::new("density").join(format!("profile_d{dim}_p{percentile}.csv"))
}

/// Density-peak profiles per (dimension, percentile). Profiles are returned
/// alongside the cells for CSV and plot emission.
pub fn run_density_scan(
    cfg: &ExperimentConfig,
    bench: &Benchmark,
) -> BenchResult<(Vec<DensityCell>, Vec<DensityPeakProfile>)> {
    let mut cells = Vec::new();
    let mut profiles = Vec::new();
    for (dim, ds) in &bench.datasets {
        for profile in density_peak_profiles(ds, &cfg.percentiles, DensityKernel::Gaussian)? {
            let top_gamma = profile
                .top_gamma(cfg.top_gamma)
                .into_iter()
                .enumerate()
                .map(|(rank, (index, gamma))| GammaPoint {
                    rank,
                    index,
                    rho: profile.rho[index],
                    delta: profile.delta[index],
                    gamma,
                })
                .collect();
            cells.push(DensityCell {
                dim: *dim,
                percentile: profile.percentile,
                r: profile.r,
                top_gamma,
                gap_peaks: profile.gap_peaks(cfg.top_gamma),
                profile_csv: profile_file_name(*dim, profile.percentile).to_string_lossy().into_owned(),
            });
            profiles.push(profile);
        }
    }
    Ok((cells, profiles))
}

/// S_Dbw of the ground-truth labelling per dimension.
pub fn run_sdbw(bench: &Benchmark) -> Vec<SdbwCell> {
    bench
        .datasets
        .iter()
        .map(|(dim, ds)| {
            let res = truth_of(ds).and_then(|t| Ok(s_dbw(ds, &t)?));
            match res {
                Ok(v) => SdbwCell {
                    dim: *dim,
                    value: Some(v),
                    error: None,
                },
                Err(e) => SdbwCell {
                    dim: *dim,
                    value: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect()
}

/// Cross-validated forest accuracy per dimension.
pub fn run_rf_check(cfg: &ExperimentConfig, bench: &Benchmark) -> BenchResult<Vec<RfCell>> {
    bench
        .datasets
        .iter()
        .map(|(dim, ds)| {
            let seed = derive_seed(cfg.seed, &[name_tag("forest"), *dim as u64]);
            let score = cross_val_accuracy(ds, &forest_params(&cfg.forest, seed), cfg.forest.folds, seed)?;
            Ok(RfCell {
                dim: *dim,
                summary: Summary {
                    count: score.fold_accuracy.len(),
                    mean: Some(score.mean),
                    sd: Some(score.sd),
                },
                fold_accuracy: score.fold_accuracy,
                stratified: score.stratified,
            })
        })
        .collect()
}
