use crate::dataset::Dataset;
use crate::distance::euclidean;
use crate::error::{Error, Result};
use crate::par;
use crate::partition::Partition;

/// Mean silhouette coefficient. Points in singleton clusters score 0.
pub fn silhouette(ds: &Dataset, part: &Partition) -> Result<f64> {
    let n = ds.n();
    let k = part.k();
    if part.len() != n {
        return Err(Error::invalid(format!("partition has {} labels for {n} points", part.len())));
    }
    if k < 2 || k >= n {
        return Err(Error::invalid(format!("silhouette needs 2 <= k < n, got k = {k}, n = {n}")));
    }
    let labels = part.labels();
    let sizes = part.sizes();
    let scores = par::map_range(n, |i| {
        let own = labels[i];
        if sizes[own] <= 1 {
            return 0.0;
        }
        let mut sums = vec![0.0; k];
        for j in 0..n {
            if j != i {
                sums[labels[j]] += euclidean(ds.row(i), ds.row(j));
            }
        }
        let a = sums[own] / (sizes[own] - 1) as f64;
        let b = (0..k)
            .filter(|&c| c != own && sizes[c] > 0)
            .map(|c| sums[c] / sizes[c] as f64)
            .fold(f64::INFINITY, f64::min);
        let m = a.max(b);
        if m > 0.0 {
            (b - a) / m
        } else {
            0.0
        }
    });
    Ok(scores.iter().sum::<f64>() / n as f64)
}
