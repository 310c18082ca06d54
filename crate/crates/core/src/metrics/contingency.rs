use crate::error::{Error, Result};
use crate::partition::Partition;

/// Co-membership counts `n_ij` of rows (clusters of x) against columns
/// (clusters of y).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    rows: usize,
    cols: usize,
    counts: Vec<u64>,
    row_sums: Vec<u64>,
    col_sums: Vec<u64>,
    total: u64,
}

pub fn contingency(x: &Partition, y: &Partition) -> Result<ContingencyTable> {
    if x.len() != y.len() {
        return Err(Error::invalid(format!(
            "partitions cover different point counts: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    let (rows, cols) = (x.k(), y.k());
    let mut counts = vec![0u64; rows * cols];
    for (&a, &b) in x.labels().iter().zip(y.labels()) {
        counts[a * cols + b] += 1;
    }
    let mut row_sums = vec![0u64; rows];
    let mut col_sums = vec![0u64; cols];
    for i in 0..rows {
        for j in 0..cols {
            let c = counts[i * cols + j];
            row_sums[i] += c;
            col_sums[j] += c;
        }
    }
    Ok(ContingencyTable {
        rows,
        cols,
        counts,
        row_sums,
        col_sums,
        total: x.len() as u64,
    })
}

impl ContingencyTable {
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.counts[i * self.cols + j]
    }

    pub fn row_sums(&self) -> &[u64] {
        &self.row_sums
    }

    pub fn col_sums(&self) -> &[u64] {
        &self.col_sums
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// Non-zero cells as `(row, col, count)`.
    pub fn nonzero(&self) -> impl Iterator<Item = (usize, usize, u64)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(move |(idx, &c)| (idx / self.cols, idx % self.cols, c))
    }

    pub fn transpose(&self) -> ContingencyTable {
        let mut counts = vec![0u64; self.rows * self.cols];
        for i in 0..self.rows {
            for j in 0..self.cols {
                counts[j * self.rows + i] = self.get(i, j);
            }
        }
        ContingencyTable {
            rows: self.cols,
            cols: self.rows,
            counts,
            row_sums: self.col_sums.clone(),
            col_sums: self.row_sums.clone(),
            total: self.total,
        }
    }

    /// Σ_ij C(n_ij, 2)
    pub(crate) fn pairs_together(&self) -> i128 {
        self.counts.iter().map(|&c| comb2(c)).sum()
    }

    /// Σ_i C(a_i, 2)
    pub(crate) fn row_pairs(&self) -> i128 {
        self.row_sums.iter().map(|&c| comb2(c)).sum()
    }

    /// Σ_j C(b_j, 2)
    pub(crate) fn col_pairs(&self) -> i128 {
        self.col_sums.iter().map(|&c| comb2(c)).sum()
    }

    /// True when the partitions are equal up to relabeling.
    pub(crate) fn is_matching(&self) -> bool {
        let per_row = |i: usize| (0..self.cols).filter(|&j| self.get(i, j) > 0).count();
        let per_col = |j: usize| (0..self.rows).filter(|&i| self.get(i, j) > 0).count();
        (0..self.rows).all(|i| self.row_sums[i] == 0 || per_row(i) == 1)
            && (0..self.cols).all(|j| self.col_sums[j] == 0 || per_col(j) == 1)
    }
}

#[inline]
pub(crate) fn comb2(c: u64) -> i128 {
    let c = c as i128;
    c * (c - 1) / 2
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn p(l: &[usize]) -> Partition {
        Partition::from_labels(l)
    }

    #[test]
    fn identical_and_crossed() {
        let t = contingency(&p(&[0, 0, 1, 1]), &p(&[0, 0, 1, 1])).unwrap();
        assert_eq!((t.get(0, 0), t.get(0, 1), t.get(1, 0), t.get(1, 1)), (2, 0, 0, 2));
        let t = contingency(&p(&[0, 0, 1, 1]), &p(&[0, 1, 0, 1])).unwrap();
        assert_eq!((t.get(0, 0), t.get(0, 1), t.get(1, 0), t.get(1, 1)), (1, 1, 1, 1));
        assert_eq!(t.row_sums(), &[2, 2]);
        assert_eq!(t.total(), 4);
    }

    #[test]
    fn length_mismatch() {
        assert!(contingency(&p(&[0, 1]), &p(&[0])).is_err());
    }

    // Oracle: count co-membership by scanning every point against every cell.
    #[test]
    fn matches_brute_force_scan() {
        let mut rng = crate::rng::rng_from_seed(17);
        let n = 200;
        let x: Vec<usize> = (0..n).map(|_| rng.random_range(0..6)).collect();
        let y: Vec<usize> = (0..n).map(|_| rng.random_range(0..4)).collect();
        let (px, py) = (Partition::with_k(x.clone(), 6).unwrap(), Partition::with_k(y.clone(), 4).unwrap());
        let t = contingency(&px, &py).unwrap();
        for i in 0..6 {
            for j in 0..4 {
                let brute = (0..n).filter(|&q| x[q] == i && y[q] == j).count() as u64;
                assert_eq!(t.get(i, j), brute);
            }
        }
        assert_eq!(t.row_sums().iter().sum::<u64>(), n as u64);
        assert_eq!(t.transpose().transpose(), t);
    }
}
