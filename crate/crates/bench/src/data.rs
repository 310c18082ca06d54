use std::path::Path;

use dimclust_core::classifier::{cross_val_accuracy, ForestParams};
use dimclust_core::dataset::{generate_synthetic_mixture, load_csv, load_embeddings, SyntheticMixtureSpec};
use dimclust_core::rng::{derive_seed, name_tag};
use dimclust_core::Dataset;
use serde::{Deserialize, Serialize};

use crate::config::{DataSource, ExperimentConfig, ForestConfig};
use crate::error::{BenchError, BenchResult};

/// Where the separation scale came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub dim: usize,
    pub target_accuracy: f64,
    pub overlap: f64,
    pub accuracy: f64,
    /// Every (overlap, accuracy) evaluated, in order.
    pub steps: Vec<(f64, f64)>,
}

#[derive(Debug, Clone)]
pub struct Benchmark {
    /// One dataset per configured dimension, in config order.
    pub datasets: Vec<(usize, Dataset)>,
    pub overlap: Option<f64>,
    pub calibration: Option<Calibration>,
}

impl Benchmark {
    pub fn n(&self) -> usize {
        self.datasets.first().map_or(0, |d| d.1.n())
    }
}

pub fn synthetic_seed(global: u64, dim: usize) -> u64 {
    derive_seed(global, &[name_tag("data"), dim as u64])
}

pub fn synthetic_dataset(n: usize, classes: usize, dim: usize, overlap: f64, global: u64) -> BenchResult<Dataset> {
    Ok(generate_synthetic_mixture(&SyntheticMixtureSpec {
        k: classes,
        d: dim,
        n,
        overlap,
        seed: synthetic_seed(global, dim),
    })?)
}

pub fn forest_params(cfg: &ForestConfig, seed: u64) -> ForestParams {
    ForestParams {
        n_trees: cfg.n_trees,
        max_depth: cfg.max_depth,
        ..ForestParams::new(seed)
    }
}

/// Finds the separation scale at which forest accuracy at `dim` meets
/// `target`: doubling to bracket, then bisection on the fixed data draw.
pub fn calibrate_overlap(
    n: usize,
    classes: usize,
    dim: usize,
    target: f64,
    forest: &ForestConfig,
    global: u64,
) -> BenchResult<Calibration> {
    let seed = derive_seed(global, &[name_tag("calibrate"), dim as u64]);
    let mut steps = Vec::new();
    let mut eval = |c: f64| -> BenchResult<f64> {
        let ds = generate_synthetic_mixture(&SyntheticMixtureSpec { k: classes, d: dim, n, overlap: c, seed })?;
        let acc = cross_val_accuracy(&ds, &forest_params(forest, seed), forest.folds, seed)?.mean;
        log::info!("calibration: overlap {c:.4} -> accuracy {acc:.4}");
        steps.push((c, acc));
        Ok(acc)
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    let mut acc_hi = eval(hi)?;
    while acc_hi < target {
        if hi >= 1024.0 {
            return Err(BenchError::Config(format!("accuracy {target} not reachable at d = {dim}")));
        }
        lo = hi;
        hi *= 2.0;
        acc_hi = eval(hi)?;
    }
    let mut best = (hi, acc_hi);
    for _ in 0..12 {
        if (best.1 - target).abs() <= 0.005 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let acc = eval(mid)?;
        if (acc - target).abs() < (best.1 - target).abs() {
            best = (mid, acc);
        }
        if acc < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Calibration {
        dim,
        target_accuracy: target,
        overlap: best.0,
        accuracy: best.1,
        steps,
    })
}

pub fn load_dataset_file(path: &Path) -> BenchResult<Dataset> {
    let is_mnde = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("mnde"));
    Ok(if is_mnde {
        load_embeddings(path)?
    } else {
        load_csv(path, None)?
    })
}

/// Generates or loads the dataset for every configured dimension. All
/// datasets must have the same number of points so one bootstrap split
/// serves every dimension.
pub fn prepare(cfg: &ExperimentConfig) -> BenchResult<Benchmark> {
    let (datasets, overlap, calibration) = match &cfg.data {
        DataSource::Synthetic {
            n,
            classes,
            overlap,
            target_accuracy,
        } => {
            let (c, cal) = match overlap {
                Some(c) => (*c, None),
                None => {
                    let dim = *cfg.dims.iter().min().expect("validated non-empty");
                    let cal = calibrate_overlap(*n, *classes, dim, *target_accuracy, &cfg.forest, cfg.seed)?;
                    (cal.overlap, Some(cal))
                }
            };
            let mut v = Vec::new();
            for &d in &cfg.dims {
                v.push((d, synthetic_dataset(*n, *classes, d, c, cfg.seed)?));
            }
            (v, Some(c), cal)
        }
        DataSource::Files { pattern } => {
            let mut v = Vec::new();
            for &d in &cfg.dims {
                let path = pattern.replace("{d}", &d.to_string());
                let ds = load_dataset_file(Path::new(&path))?;
                if ds.dim() != d {
                    return Err(BenchError::Config(format!("{path} has {} columns, expected {d}", ds.dim())));
                }
                v.push((d, ds));
            }
            (v, None, None)
        }
    };
    if let Some(((d0, first), (d, other))) = datasets
        .first()
        .and_then(|f| datasets.iter().find(|o| o.1.n() != f.1.n()).map(|o| (f, o)))
    {
        return Err(BenchError::Config(format!(
            "datasets differ in size: d = {d0} has {} points, d = {d} has {}",
            first.n(),
            other.n()
        )));
    }
    Ok(Benchmark {
        datasets,
        overlap,
        calibration,
    })
}
