use rand::Rng;

use crate::dataset::Dataset;
use crate::distance::sq_euclidean;
use crate::error::{Error, Result};
use crate::par;
use crate::partition::Partition;
use crate::rng::rng_from_seed;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KMeansOptions {
    pub k: usize,
    pub seed: u64,
    pub max_iter: usize,
    /// Stop once the relative inertia decrease falls below this.
    pub tol: f64,
}

impl KMeansOptions {
    pub fn new(k: usize, seed: u64) -> Self {
        KMeansOptions {
            k,
            seed,
            max_iter: 300,
            tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone)]
pub struct KMeansFit {
    pub partition: Partition,
    /// Raw cluster ids in `0..k`, aligned with `centroids`.
    pub assignments: Vec<usize>,
    pub inertia: f64,
    /// k×d, row-major.
    pub centroids: Vec<f64>,
    /// Inertia after each assignment step.
    pub history: Vec<f64>,
    pub n_iter: usize,
    pub converged: bool,
    /// Empty clusters re-seeded at the farthest point.
    pub reseeded: usize,
}

/// k-means++ seeding followed by Lloyd iterations.
///
/// A cluster that empties during an update is re-seeded at the point farthest
/// from its assigned centroid.
pub fn kmeans(ds: &Dataset, opts: &KMeansOptions) -> Result<KMeansFit> {
    let (n, k) = (ds.n(), opts.k);
    if k == 0 || k > n {
        return Err(Error::invalid(format!("k-means needs 1 <= k <= n, got k = {k}, n = {n}")));
    }
    let mut rng = rng_from_seed(opts.seed);
    let centroids = plus_plus_seeds(ds, k, &mut rng);
    Ok(lloyd(ds, centroids, opts))
}

fn lloyd(ds: &Dataset, mut centroids: Vec<f64>, opts: &KMeansOptions) -> KMeansFit {
    let (n, d, k) = (ds.n(), ds.dim(), opts.k);
    let mut history = Vec::new();
    let mut reseeded = 0;
    let mut converged = false;
    let mut assign;
    let mut n_iter = 0;
    loop {
        assign = assign_points(ds, &centroids, k);
        let inertia: f64 = assign.iter().map(|&(_, d2)| d2).sum();
        n_iter += 1;
        if let Some(&prev) = history.last() {
            if prev - inertia <= opts.tol * prev {
                converged = true;
            }
        }
        history.push(inertia);
        if converged || inertia == 0.0 || n_iter >= opts.max_iter {
            converged |= inertia == 0.0;
            break;
        }

        let mut sums = vec![0.0; k * d];
        let mut counts = vec![0usize; k];
        for (i, &(c, _)) in assign.iter().enumerate() {
            counts[c] += 1;
            for (s, x) in sums[c * d..(c + 1) * d].iter_mut().zip(ds.row(i)) {
                *s += x;
            }
        }
        let mut taken = vec![false; n];
        for c in 0..k {
            if counts[c] > 0 {
                let inv = 1.0 / counts[c] as f64;
                for (dst, s) in centroids[c * d..(c + 1) * d].iter_mut().zip(&sums[c * d..]) {
                    *dst = s * inv;
                }
            } else {
                let far = (0..n)
                    .filter(|&i| !taken[i])
                    .fold(None, |best: Option<usize>, i| match best {
                        Some(b) if assign[b].1 >= assign[i].1 => Some(b),
                        _ => Some(i),
                    })
                    .expect("k <= n leaves a point to re-seed from");
                taken[far] = true;
                centroids[c * d..(c + 1) * d].copy_from_slice(ds.row(far));
                reseeded += 1;
            }
        }
    }
    let inertia = *history.last().unwrap();
    let assignments: Vec<usize> = assign.iter().map(|&(c, _)| c).collect();
    KMeansFit {
        partition: Partition::from_labels(&assignments),
        assignments,
        inertia,
        centroids,
        history,
        n_iter,
        converged,
        reseeded,
    }
}

/// Nearest centroid and squared distance per point; ties go to the lower id.
fn assign_points(ds: &Dataset, centroids: &[f64], k: usize) -> Vec<(usize, f64)> {
    let d = ds.dim();
    par::map_range(ds.n(), |i| {
        let x = ds.row(i);
        let mut best = (0, f64::INFINITY);
        for c in 0..k {
            let d2 = sq_euclidean(x, &centroids[c * d..(c + 1) * d]);
            if d2 < best.1 {
                best = (c, d2);
            }
        }
        best
    })
}

fn plus_plus_seeds(ds: &Dataset, k: usize, rng: &mut impl Rng) -> Vec<f64> {
    let (n, d) = (ds.n(), ds.dim());
    let mut chosen = vec![false; n];
    let mut centroids = Vec::with_capacity(k * d);
    let first = rng.random_range(0..n);
    chosen[first] = true;
    centroids.extend_from_slice(ds.row(first));
    let mut d2: Vec<f64> = par::map_range(n, |i| sq_euclidean(ds.row(i), ds.row(first)));
    for _ in 1..k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = None;
            for (i, &w) in d2.iter().enumerate() {
                acc += w;
                if w > 0.0 && acc > target {
                    pick = Some(i);
                    break;
                }
            }
            pick.unwrap_or_else(|| d2.iter().rposition(|&w| w > 0.0).unwrap())
        } else {
            // Every remaining point coincides with a centroid.
            let free: Vec<usize> = (0..n).filter(|&i| !chosen[i]).collect();
            free[rng.random_range(0..free.len())]
        };
        chosen[next] = true;
        centroids.extend_from_slice(ds.row(next));
        let row = ds.row(next);
        let fresh: Vec<f64> = par::map_range(n, |i| sq_euclidean(ds.row(i), row));
        for (a, b) in d2.iter_mut().zip(fresh) {
            if b < *a {
                *a = b;
            }
        }
    }
    centroids
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::ari;
    use rand_distr::{Distribution, StandardNormal};

    fn two_blobs() -> Dataset {
        let mut rng = rng_from_seed(1);
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for i in 0..100 {
            let cx = if i < 50 { -10.0 } else { 10.0 };
            let a: f64 = StandardNormal.sample(&mut rng);
            let b: f64 = StandardNormal.sample(&mut rng);
            rows.push(vec![cx + a, b]);
            labels.push(usize::from(i >= 50));
        }
        Dataset::from_rows(&rows, Some(labels)).unwrap()
    }

    #[test]
    fn separates_far_blobs() {
        let ds = two_blobs();
        let fit = kmeans(&ds, &KMeansOptions::new(2, 3)).unwrap();
        let truth = Partition::from_labels(ds.labels().unwrap());
        assert_eq!(ari(&fit.partition, &truth).unwrap(), 1.0);
        assert!(fit.converged);
    }

    #[test]
    fn k_equals_n_has_zero_inertia() {
        let ds = Dataset::from_rows(&[vec![0.0], vec![1.0], vec![1.0], vec![5.0]], None).unwrap();
        let fit = kmeans(&ds, &KMeansOptions::new(4, 0)).unwrap();
        assert_eq!(fit.inertia, 0.0);
    }

    #[test]
    fn invalid_k() {
        let ds = two_blobs();
        assert!(kmeans(&ds, &KMeansOptions::new(0, 0)).is_err());
        assert!(kmeans(&ds, &KMeansOptions::new(101, 0)).is_err());
    }

    #[test]
    fn inertia_never_increases() {
        let mut rng = rng_from_seed(4);
        let rows: Vec<Vec<f64>> = (0..300)
            .map(|_| (0..5).map(|_| StandardNormal.sample(&mut rng)).collect())
            .collect();
        let ds = Dataset::from_rows(&rows, None).unwrap();
        for seed in 0..10 {
            let fit = kmeans(&ds, &KMeansOptions::new(7, seed)).unwrap();
            for w in fit.history.windows(2) {
                assert!(w[1] <= w[0] * (1.0 + 1e-12), "{:?}", fit.history);
            }
        }
    }

    #[test]
    fn empty_cluster_is_reseeded() {
        let ds = Dataset::from_rows(&[vec![0.0], vec![1.0], vec![10.0], vec![11.0]], None).unwrap();
        let fit = lloyd(&ds, vec![0.5, 10.5, 100.0], &KMeansOptions::new(3, 0));
        assert_eq!(fit.reseeded, 1);
        assert_eq!(fit.partition.k(), 3);
        assert!(fit.inertia < fit.history[0]);
    }

    #[test]
    fn deterministic() {
        let ds = two_blobs();
        let a = kmeans(&ds, &KMeansOptions::new(5, 9)).unwrap();
        let b = kmeans(&ds, &KMeansOptions::new(5, 9)).unwrap();
        assert_eq!(a.assignments, b.assignments);
        assert_eq!(a.inertia.to_bits(), b.inertia.to_bits());
    }
}
