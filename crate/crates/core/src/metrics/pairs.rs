use super::contingency::{contingency, ContingencyTable};
use crate::error::{Error, Result};
use crate::partition::Partition;

/// Adjusted Rand index.
///
/// With `I = Σ C(n_ij,2)`, `A = Σ C(a_i,2)`, `B = Σ C(b_j,2)` and
/// `N = C(n,2)`, the index is `(I − AB/N) / (½(A+B) − AB/N)`, evaluated here
/// as `(2IN − 2AB) / ((A+B)N − 2AB)` in integers. When the denominator is
/// zero (both partitions all singletons, both a single block, or n < 2) the
/// result is 1 for matching partitions and 0 otherwise.
pub fn ari(x: &Partition, y: &Partition) -> Result<f64> {
    Ok(ari_from_table(&contingency(x, y)?))
}

pub(crate) fn ari_from_table(t: &ContingencyTable) -> f64 {
    let n = t.total() as i128;
    let pairs = n * (n - 1) / 2;
    let index = t.pairs_together();
    let (a, b) = (t.row_pairs(), t.col_pairs());
    let num = 2 * index * pairs - 2 * a * b;
    let den = (a + b) * pairs - 2 * a * b;
    if den == 0 {
        return if t.is_matching() { 1.0 } else { 0.0 };
    }
    num as f64 / den as f64
}

/// A score together with whether it hit a degenerate convention.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairScore {
    pub value: f64,
    pub degenerate: bool,
}

/// Fowlkes–Mallows index `TP / sqrt((TP+FP)(TP+FN))` over point pairs.
///
/// If either partition puts no two points together the index is reported as
/// 0 and flagged degenerate.
pub fn fowlkes_mallows_detail(x: &Partition, y: &Partition) -> Result<PairScore> {
    let t = contingency(x, y)?;
    let tp = t.pairs_together();
    let (a, b) = (t.row_pairs(), t.col_pairs());
    if a == 0 || b == 0 {
        return Ok(PairScore {
            value: 0.0,
            degenerate: true,
        });
    }
    Ok(PairScore {
        value: tp as f64 / ((a as f64) * (b as f64)).sqrt(),
        degenerate: false,
    })
}

pub fn fowlkes_mallows(x: &Partition, y: &Partition) -> Result<f64> {
    fowlkes_mallows_detail(x, y).map(|s| s.value)
}

/// ARI over every pair of a set of partitions.
#[derive(Debug, Clone, PartialEq)]
pub struct PairwiseAri {
    /// Symmetric m×m matrix with unit diagonal, row-major.
    pub matrix: Vec<f64>,
    pub m: usize,
    /// Strict upper triangle, row by row.
    pub values: Vec<f64>,
    pub mean: f64,
    /// Population standard deviation of `values`.
    pub sd: f64,
}

pub fn pairwise_ari(parts: &[Partition]) -> Result<PairwiseAri> {
    let m = parts.len();
    if m < 2 {
        return Err(Error::invalid(format!("pairwise ARI needs at least 2 partitions, got {m}")));
    }
    let mut matrix = vec![1.0; m * m];
    let mut values = Vec::with_capacity(m * (m - 1) / 2);
    for i in 0..m {
        for j in (i + 1)..m {
            let a = ari(&parts[i], &parts[j])?;
            matrix[i * m + j] = a;
            matrix[j * m + i] = a;
            values.push(a);
        }
    }
    let (mean, sd) = crate::stats::mean_sd(&values);
    Ok(PairwiseAri {
        matrix,
        m,
        values,
        mean,
        sd,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use rand::seq::SliceRandom;
    use rand::Rng;

    fn p(l: &[usize]) -> Partition {
        Partition::from_labels(l)
    }

    #[test]
    fn hand_values() {
        assert_eq!(ari(&p(&[0, 0, 1, 1]), &p(&[0, 1, 0, 1])).unwrap(), -0.5);
        assert_eq!(ari(&p(&[0, 0, 1, 1]), &p(&[5, 5, 2, 2])).unwrap(), 1.0);
        assert_eq!(fowlkes_mallows(&p(&[0, 0, 1, 1]), &p(&[0, 1, 0, 1])).unwrap(), 0.0);
        assert_eq!(fowlkes_mallows(&p(&[0, 0, 1, 1]), &p(&[0, 0, 1, 1])).unwrap(), 1.0);
    }

    #[test]
    fn degenerate_conventions() {
        let single = Partition::single(5);
        let singles = Partition::singletons(5);
        assert_eq!(ari(&single, &single).unwrap(), 1.0);
        assert_eq!(ari(&singles, &singles).unwrap(), 1.0);
        assert_eq!(ari(&single, &singles).unwrap(), 0.0);
        assert_eq!(ari(&Partition::single(1), &Partition::single(1)).unwrap(), 1.0);
        let fm = fowlkes_mallows_detail(&singles, &singles).unwrap();
        assert!(fm.degenerate);
        assert_eq!(fm.value, 0.0);
    }

    #[test]
    fn symmetric_and_relabel_invariant() {
        let mut rng = rng_from_seed(5);
        for _ in 0..20 {
            let x: Vec<usize> = (0..150).map(|_| rng.random_range(0..5)).collect();
            let y: Vec<usize> = (0..150).map(|_| rng.random_range(0..7)).collect();
            let (px, py) = (p(&x), p(&y));
            assert_eq!(ari(&px, &py).unwrap().to_bits(), ari(&py, &px).unwrap().to_bits());
            assert_eq!(
                fowlkes_mallows(&px, &py).unwrap().to_bits(),
                fowlkes_mallows(&py, &px).unwrap().to_bits()
            );
            let mut perm: Vec<usize> = (0..5).collect();
            perm.shuffle(&mut rng);
            let xr: Vec<usize> = x.iter().map(|&l| perm[l] + 10).collect();
            assert_eq!(ari(&px, &py).unwrap().to_bits(), ari(&p(&xr), &py).unwrap().to_bits());
        }
    }

    #[test]
    fn pairwise_shapes() {
        let a = p(&[0, 0, 1, 1, 2]);
        let b = p(&[0, 1, 1, 1, 2]);
        let all = pairwise_ari(&[a.clone(), a.clone(), a.clone()]).unwrap();
        assert_eq!((all.mean, all.sd), (1.0, 0.0));
        assert_eq!(all.values.len(), 3);
        let two = pairwise_ari(&[a.clone(), b.clone()]).unwrap();
        let v = ari(&a, &b).unwrap();
        assert_eq!(two.matrix, vec![1.0, v, v, 1.0]);
        assert!(pairwise_ari(&[a]).is_err());
    }

    #[test]
    fn random_partitions_are_near_zero() {
        let mut rng = rng_from_seed(99);
        let parts: Vec<Partition> = (0..10)
            .map(|_| p(&(0..500).map(|_| rng.random_range(0..10)).collect::<Vec<_>>()))
            .collect();
        let pw = pairwise_ari(&parts).unwrap();
        assert_eq!(pw.values.len(), 45);
        assert!(pw.mean.abs() < 0.02, "mean {}", pw.mean);
    }

    #[test]
    fn large_n_is_exact() {
        // n = 10^5: C(n,2)·Σ products exceed 2^53 but stay exact in i128.
        let n = 100_000;
        let mut rng = rng_from_seed(8);
        let x: Vec<usize> = (0..n).map(|_| rng.random_range(0..10)).collect();
        let y: Vec<usize> = (0..n).map(|_| rng.random_range(0..10)).collect();
        let v = ari(&p(&x), &p(&y)).unwrap();
        assert!(v.abs() < 1e-3, "ari {v}");
        assert_eq!(ari(&p(&x), &p(&x)).unwrap(), 1.0);
    }
}
