use rand::seq::SliceRandom;

use super::forest::{rf_fit, rf_predict, ForestParams};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::rng::{derive_seed, rng_from_seed};
use crate::stats::mean_sd;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Folds {
    /// Fold id of each point.
    pub assignment: Vec<usize>,
    pub k: usize,
    pub stratified: bool,
}

impl Folds {
    pub fn members(&self, fold: usize) -> Vec<usize> {
        (0..self.assignment.len()).filter(|&i| self.assignment[i] == fold).collect()
    }
}

/// Stratified fold ids: each class is shuffled and dealt round-robin, the
/// dealing position carrying over between classes. Falls back to a plain
/// shuffled deal when some class has fewer than `k` points.
pub fn fold_assignment(labels: &[usize], k: usize, seed: u64) -> Result<Folds> {
    let n = labels.len();
    if k < 2 || n < k {
        return Err(Error::invalid(format!("need 2 <= folds <= n, got folds = {k}, n = {n}")));
    }
    let mut rng = rng_from_seed(seed);
    let n_classes = labels.iter().max().map_or(0, |m| m + 1);
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); n_classes];
    for (i, &l) in labels.iter().enumerate() {
        by_class[l].push(i);
    }
    let stratified = by_class.iter().all(|c| c.is_empty() || c.len() >= k);
    if !stratified {
        log::warn!("a class has fewer than {k} points; using unstratified folds");
        by_class = vec![(0..n).collect()];
    }
    let mut assignment = vec![0; n];
    let mut next = 0;
    for members in &mut by_class {
        members.shuffle(&mut rng);
        for &i in members.iter() {
            assignment[i] = next % k;
            next += 1;
        }
    }
    Ok(Folds {
        assignment,
        k,
        stratified,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvScore {
    pub mean: f64,
    /// Population standard deviation over folds.
    pub sd: f64,
    pub fold_accuracy: Vec<f64>,
    pub stratified: bool,
}

/// k-fold cross-validated random-forest accuracy.
pub fn cross_val_accuracy(ds: &Dataset, params: &ForestParams, folds: usize, seed: u64) -> Result<CvScore> {
    let labels = ds
        .labels()
        .ok_or_else(|| Error::invalid("cross-validation needs a labelled dataset"))?;
    let plan = fold_assignment(labels, folds, seed)?;
    let mut fold_accuracy = Vec::with_capacity(folds);
    for f in 0..folds {
        let (test_idx, train_idx): (Vec<usize>, Vec<usize>) = (0..ds.n()).partition(|&i| plan.assignment[i] == f);
        let mut p = *params;
        p.seed = derive_seed(params.seed, &[f as u64]);
        let forest = rf_fit(&ds.subset(&train_idx)?, &p)?;
        let test = ds.subset(&test_idx)?;
        let pred = rf_predict(&forest, &test)?;
        let hits = pred.iter().zip(test.labels().unwrap()).filter(|(a, b)| a == b).count();
        fold_accuracy.push(hits as f64 / test_idx.len() as f64);
    }
    let (mean, sd) = mean_sd(&fold_accuracy);
    Ok(CvScore {
        mean,
        sd,
        fold_accuracy,
        stratified: plan.stratified,
    })
}
