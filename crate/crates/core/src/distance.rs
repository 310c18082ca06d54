//! Euclidean distance kernels shared by the clustering and density code.

use crate::dataset::Dataset;
use crate::par;

#[inline]
pub fn sq_euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let t = x - y;
            t * t
        })
        .sum()
}

#[inline]
pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    sq_euclidean(a, b).sqrt()
}

/// Dense symmetric n×n distance matrix, row-major.
pub fn distance_matrix(ds: &Dataset) -> Vec<f64> {
    let n = ds.n();
    let mut out = vec![0.0; n * n];
    par::for_each_row_mut(&mut out, n, |i, row| {
        let xi = ds.row(i);
        for (j, slot) in row.iter_mut().enumerate() {
            if j != i {
                *slot = euclidean(xi, ds.row(j));
            }
        }
    });
    out
}

/// The n(n-1)/2 distances of the strict upper triangle, row by row.
pub fn condensed_distances(ds: &Dataset) -> Vec<f64> {
    let n = ds.n();
    let rows = par::map_range(n, |i| {
        let xi = ds.row(i);
        ((i + 1)..n)
            .map(|j| euclidean(xi, ds.row(j)))
            .collect::<Vec<_>>()
    });
    let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for r in rows {
        out.extend(r);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_and_condensed_agree() {
        let ds = Dataset::from_rows(&[vec![0.0, 0.0], vec![3.0, 4.0], vec![1.0, 0.0]], None).unwrap();
        let m = distance_matrix(&ds);
        assert_eq!(m[1], 5.0);
        assert_eq!(m[3], 5.0);
        assert_eq!(condensed_distances(&ds), vec![5.0, 1.0, euclidean(&[3.0, 4.0], &[1.0, 0.0])]);
    }
}
