use crate::dataset::Dataset;
use crate::distance::sq_euclidean;
use crate::error::{Error, Result};
use crate::partition::Partition;

fn variance_norm(ds: &Dataset, members: &[usize]) -> (Vec<f64>, f64) {
    let d = ds.dim();
    let m = members.len() as f64;
    let mut mean = vec![0.0; d];
    for &i in members {
        for (acc, x) in mean.iter_mut().zip(ds.row(i)) {
            *acc += x;
        }
    }
    mean.iter_mut().for_each(|v| *v /= m);
    let mut var = vec![0.0; d];
    for &i in members {
        for ((acc, x), mu) in var.iter_mut().zip(ds.row(i)).zip(&mean) {
            *acc += (x - mu) * (x - mu);
        }
    }
    let norm = var.iter().map(|v| (v / m) * (v / m)).sum::<f64>().sqrt();
    (mean, norm)
}

/// S_Dbw validity index (lower is better): average relative scatter plus
/// inter-cluster density at pair midpoints.
///
/// A pair whose centers both have zero neighbors within `σ` contributes its
/// midpoint count unscaled, and 0 when that count is also zero.
pub fn s_dbw(ds: &Dataset, part: &Partition) -> Result<f64> {
    let k = part.k();
    if part.len() != ds.n() {
        return Err(Error::invalid(format!("partition has {} labels for {} points", part.len(), ds.n())));
    }
    if k < 2 {
        return Err(Error::invalid(format!("S_Dbw needs at least 2 clusters, got {k}")));
    }
    let members = part.members();
    if let Some(c) = members.iter().position(Vec::is_empty) {
        return Err(Error::invalid(format!("cluster {c} is empty")));
    }
    let all: Vec<usize> = (0..ds.n()).collect();
    let (_, total_norm) = variance_norm(ds, &all);
    if total_norm == 0.0 {
        return Err(Error::invalid("S_Dbw is undefined for a dataset with zero variance"));
    }
    let stats: Vec<(Vec<f64>, f64)> = members.iter().map(|m| variance_norm(ds, m)).collect();
    let kf = k as f64;
    let scat = stats.iter().map(|s| s.1).sum::<f64>() / (kf * total_norm);
    let sigma = stats.iter().map(|s| s.1).sum::<f64>().sqrt() / kf;
    let sigma_sq = sigma * sigma;

    let count = |p: &[f64], a: usize, b: usize| -> usize {
        members[a]
            .iter()
            .chain(&members[b])
            .filter(|&&i| sq_euclidean(p, ds.row(i)) <= sigma_sq)
            .count()
    };
    let mut dens = 0.0;
    for a in 0..k {
        for b in a + 1..k {
            let (ma, mb) = (&stats[a].0, &stats[b].0);
            let mid: Vec<f64> = ma.iter().zip(mb).map(|(x, y)| 0.5 * (x + y)).collect();
            let num = count(&mid, a, b) as f64;
            let den = count(ma, a, b).max(count(mb, a, b)) as f64;
            dens += if den > 0.0 { num / den } else { num };
        }
    }
    // Each unordered pair stands for both orderings.
    let dens_bw = 2.0 * dens / (kf * (kf - 1.0));
    Ok(scat + dens_bw)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use rand::Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn blob(rng: &mut crate::rng::Rng, n: usize, cx: f64, sd: f64) -> Vec<Vec<f64>> {
        (0..n)
            .map(|_| {
                let a: f64 = StandardNormal.sample(rng);
                let b: f64 = StandardNormal.sample(rng);
                vec![cx + sd * a, sd * b]
            })
            .collect()
    }

    #[test]
    fn separated_blobs_score_low() {
        let mut rng = rng_from_seed(1);
        let mut rows = blob(&mut rng, 100, 0.0, 0.1);
        rows.extend(blob(&mut rng, 100, 50.0, 0.1));
        let ds = Dataset::from_rows(&rows, None).unwrap();
        let p = Partition::from_labels(&(0..200).map(|i| i / 100).collect::<Vec<_>>());
        let s = s_dbw(&ds, &p).unwrap();
        assert!(s < 0.1, "{s}");
    }

    #[test]
    fn random_split_scores_high() {
        let mut rng = rng_from_seed(2);
        let rows = blob(&mut rng, 400, 0.0, 1.0);
        let ds = Dataset::from_rows(&rows, None).unwrap();
        let labels: Vec<usize> = (0..400).map(|_| rng.random_range(0..2)).collect();
        let s = s_dbw(&ds, &Partition::from_labels(&labels)).unwrap();
        assert!(s > 0.8, "{s}");
    }

    #[test]
    // Per-coordinate variances make the index invariant to translations,
    // reflections and axis swaps, but not to general rotations.
    fn relabel_and_axis_motion_invariance() {
        let mut rng = rng_from_seed(3);
        let mut rows = blob(&mut rng, 50, 0.0, 1.0);
        rows.extend(blob(&mut rng, 50, 3.0, 1.0));
        rows.extend(blob(&mut rng, 50, 6.0, 1.5));
        let labels: Vec<usize> = (0..150).map(|i| i / 50).collect();
        let ds = Dataset::from_rows(&rows, None).unwrap();
        let p = Partition::from_labels(&labels);
        let s = s_dbw(&ds, &p).unwrap();
        let swapped = Partition::from_labels(&labels.iter().map(|l| 2 - l).collect::<Vec<_>>());
        assert!((s_dbw(&ds, &swapped).unwrap() - s).abs() < 1e-12);
        let moved: Vec<Vec<f64>> = rows.iter().map(|r| vec![-r[1] + 4.0, r[0] - 1.0]).collect();
        let s2 = s_dbw(&Dataset::from_rows(&moved, None).unwrap(), &p).unwrap();
        assert!((s2 - s).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_partitions() {
        let ds = Dataset::from_rows(&[vec![0.0], vec![1.0], vec![2.0]], None).unwrap();
        assert!(s_dbw(&ds, &Partition::single(3)).is_err());
        assert!(s_dbw(&ds, &Partition::with_k(vec![0, 0, 2], 3).unwrap()).is_err());
        assert!(s_dbw(&ds, &Partition::from_labels(&[0, 1])).is_err());
    }
}
