use rand::Rng as _;

use super::tree::{TrainSet, Tree, TreeParams};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::par;
use crate::rng::{derive_seed, rng_from_seed};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForestParams {
    pub n_trees: usize,
    /// `None` grows trees to purity.
    pub max_depth: Option<usize>,
    /// Features searched per split; `None` means ⌈√d⌉.
    pub mtry: Option<usize>,
    pub min_leaf: usize,
    pub seed: u64,
}

impl ForestParams {
    pub fn new(seed: u64) -> Self {
        ForestParams {
            n_trees: 100,
            max_depth: None,
            mtry: None,
            min_leaf: 1,
            seed,
        }
    }

    pub fn resolved_mtry(&self, d: usize) -> usize {
        self.mtry.unwrap_or_else(|| (d as f64).sqrt().ceil() as usize)
    }
}

#[derive(Debug, Clone)]
pub struct Forest {
    trees: Vec<Tree>,
    d: usize,
    n_classes: usize,
}

impl Forest {
    pub fn trees(&self) -> &[Tree] {
        &self.trees
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// Majority vote; ties go to the smaller class id.
    pub fn predict_row(&self, x: &[f64]) -> usize {
        let mut votes = vec![0usize; self.n_classes];
        for t in &self.trees {
            votes[t.predict(x)] += 1;
        }
        let mut best = 0;
        for (c, &v) in votes.iter().enumerate() {
            if v > votes[best] {
                best = c;
            }
        }
        best
    }
}

/// Trains a random forest: each tree sees a bootstrap resample of the rows
/// and its own seed derived from `params.seed`.
pub fn rf_fit(ds: &Dataset, params: &ForestParams) -> Result<Forest> {
    let labels = ds
        .labels()
        .ok_or_else(|| Error::invalid("random forest needs a labelled dataset"))?;
    let (n, d) = (ds.n(), ds.dim());
    let n_classes = labels.iter().max().map_or(0, |m| m + 1);
    let mut present = vec![false; n_classes];
    labels.iter().for_each(|&l| present[l] = true);
    if present.iter().filter(|&&p| p).count() < 2 {
        return Err(Error::invalid("random forest needs at least two classes"));
    }
    if params.n_trees == 0 {
        return Err(Error::invalid("n_trees must be at least 1"));
    }
    let mtry = params.resolved_mtry(d);
    if mtry == 0 || mtry > d {
        return Err(Error::invalid(format!("mtry must be in 1..={d}, got {mtry}")));
    }
    if params.min_leaf == 0 {
        return Err(Error::invalid("min_leaf must be at least 1"));
    }
    let data = TrainSet::new(ds.points(), d, labels, n_classes);
    let tree_params = TreeParams {
        max_depth: params.max_depth,
        mtry,
        min_leaf: params.min_leaf,
    };
    let trees = par::map_range(params.n_trees, |t| {
        let mut rng = rng_from_seed(derive_seed(params.seed, &[t as u64]));
        let mut rows: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
        Tree::fit(&data, &mut rows, &tree_params, &mut rng)
    });
    Ok(Forest { trees, d, n_classes })
}

pub fn rf_predict(forest: &Forest, points: &Dataset) -> Result<Vec<usize>> {
    if points.dim() != forest.d {
        return Err(Error::invalid(format!(
            "forest was trained on {} features, got {}",
            forest.d,
            points.dim()
        )));
    }
    Ok(par::map_range(points.n(), |i| forest.predict_row(points.row(i))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{generate_synthetic_mixture, SyntheticMixtureSpec};

    fn blobs() -> Dataset {
        let rows: Vec<Vec<f64>> = (0..40)
            .map(|i| {
                let off = if i < 20 { 0.0 } else { 10.0 };
                vec![off + (i % 5) as f64 * 0.1, (i % 7) as f64 * 0.1]
            })
            .collect();
        Dataset::from_rows(&rows, Some((0..40).map(|i| i / 20).collect())).unwrap()
    }

    #[test]
    fn separable_training_accuracy() {
        let ds = blobs();
        let f = rf_fit(&ds, &ForestParams::new(3)).unwrap();
        assert_eq!(rf_predict(&f, &ds).unwrap(), ds.labels().unwrap());
    }

    #[test]
    fn one_tree_vote_identity() {
        let ds = generate_synthetic_mixture(&SyntheticMixtureSpec { k: 3, d: 4, n: 90, overlap: 2.0, seed: 1 }).unwrap();
        let mut p = ForestParams::new(5);
        p.n_trees = 1;
        let f = rf_fit(&ds, &p).unwrap();
        for x in ds.rows() {
            assert_eq!(f.predict_row(x), f.trees()[0].predict(x));
        }
    }

    #[test]
    fn one_point_per_class() {
        let ds = Dataset::from_rows(&[vec![0.0], vec![1.0]], Some(vec![0, 1])).unwrap();
        let f = rf_fit(&ds, &ForestParams::new(0)).unwrap();
        // A tree whose bootstrap holds both points splits them; one that drew
        // a single point predicts it everywhere.
        for t in f.trees() {
            let (a, b) = (t.predict(&[0.0]), t.predict(&[1.0]));
            assert!(t.n_nodes() == 1 && a == b || t.n_nodes() == 3 && (a, b) == (0, 1));
        }
    }

    #[test]
    fn deterministic_and_validated() {
        let ds = blobs();
        let p = ForestParams::new(9);
        let a = rf_predict(&rf_fit(&ds, &p).unwrap(), &ds).unwrap();
        let b = rf_predict(&rf_fit(&ds, &p).unwrap(), &ds).unwrap();
        assert_eq!(a, b);
        assert!(rf_fit(&ds.without_labels(), &p).is_err());
        let single = Dataset::from_rows(&[vec![0.0], vec![1.0]], Some(vec![1, 1])).unwrap();
        assert!(rf_fit(&single, &p).is_err());
        let mut bad = p;
        bad.mtry = Some(3);
        assert!(rf_fit(&ds, &bad).is_err());
        let f = rf_fit(&ds, &p).unwrap();
        assert!(rf_predict(&f, &Dataset::from_rows(&[vec![0.0]], None).unwrap()).is_err());
    }

    fn permute_columns(ds: &Dataset, cols: &[usize]) -> Dataset {
        let rows: Vec<Vec<f64>> = ds.rows().map(|r| cols.iter().map(|&c| r[c]).collect()).collect();
        Dataset::from_rows(&rows, ds.labels().map(<[usize]>::to_vec)).unwrap()
    }

    #[test]
    fn full_mtry_ignores_feature_order_and_duplicates() {
        let train = generate_synthetic_mixture(&SyntheticMixtureSpec { k: 4, d: 5, n: 200, overlap: 2.0, seed: 7 }).unwrap();
        let test = generate_synthetic_mixture(&SyntheticMixtureSpec { k: 4, d: 5, n: 100, overlap: 2.0, seed: 8 }).unwrap();
        let mut p = ForestParams::new(4);
        p.n_trees = 25;
        p.mtry = Some(5);
        let base = rf_predict(&rf_fit(&train, &p).unwrap(), &test).unwrap();

        let perm = [3, 0, 4, 1, 2];
        let permuted = rf_predict(&rf_fit(&permute_columns(&train, &perm), &p).unwrap(), &permute_columns(&test, &perm)).unwrap();
        assert_eq!(base, permuted);

        let dup = [0, 1, 2, 3, 4, 2];
        p.mtry = Some(6);
        let duplicated = rf_predict(&rf_fit(&permute_columns(&train, &dup), &p).unwrap(), &permute_columns(&test, &dup)).unwrap();
        assert_eq!(base, duplicated);
    }
}
