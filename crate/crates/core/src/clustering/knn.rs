use crate::dataset::Dataset;
use crate::distance::sq_euclidean;
use crate::error::{Error, Result};
use crate::par;

/// Edge weight policy for the symmetrized kNN graph.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum EdgeWeight {
    #[default]
    Unit,
    /// `1 / (1 + distance)`.
    InverseDistance,
}

/// Undirected weighted graph without self-loops. Adjacency lists are sorted
/// by neighbor id and every edge appears in both endpoints' lists with the
/// same weight.
#[derive(Debug, Clone, PartialEq)]
pub struct KnnGraph {
    adjacency: Vec<Vec<(usize, f64)>>,
}

impl KnnGraph {
    /// Builds a graph from undirected edges; duplicate edges keep the largest weight.
    pub fn from_edges(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let mut adjacency: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for &(u, v, w) in edges {
            if u >= n || v >= n {
                return Err(Error::invalid(format!("edge ({u}, {v}) out of range for n = {n}")));
            }
            if u == v {
                return Err(Error::invalid(format!("self-loop at {u}")));
            }
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::invalid(format!("edge ({u}, {v}) has weight {w}")));
            }
            adjacency[u].push((v, w));
            adjacency[v].push((u, w));
        }
        for list in &mut adjacency {
            list.sort_by(|a, b| a.0.cmp(&b.0).then(b.1.total_cmp(&a.1)));
            list.dedup_by_key(|e| e.0);
        }
        Ok(KnnGraph { adjacency })
    }

    pub fn n(&self) -> usize {
        self.adjacency.len()
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, f64)] {
        &self.adjacency[v]
    }

    pub fn n_edges(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Weighted degree (strength).
    pub fn degree(&self, v: usize) -> f64 {
        self.adjacency[v].iter().map(|e| e.1).sum()
    }

    /// Sum of edge weights, each undirected edge once.
    pub fn total_weight(&self) -> f64 {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, l)| l.iter().filter(move |e| e.0 > u).map(|e| e.1))
            .sum()
    }

    pub fn weight(&self, u: usize, v: usize) -> Option<f64> {
        self.adjacency[u]
            .binary_search_by_key(&v, |e| e.0)
            .ok()
            .map(|i| self.adjacency[u][i].1)
    }
}

/// Exact directed k-nearest-neighbor lists: for each point, the ids of its
/// `k` closest other points in ascending (distance, id) order.
pub fn knn_indices(ds: &Dataset, k: usize) -> Result<Vec<Vec<(usize, f64)>>> {
    let n = ds.n();
    if k == 0 || n <= k {
        return Err(Error::invalid(format!("kNN needs 1 <= k < n, got k = {k}, n = {n}")));
    }
    Ok(par::map_range(n, |i| {
        let xi = ds.row(i);
        let mut cand: Vec<(f64, usize)> = (0..n)
            .filter(|&j| j != i)
            .map(|j| (sq_euclidean(xi, ds.row(j)), j))
            .collect();
        let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
        if k < cand.len() {
            cand.select_nth_unstable_by(k - 1, cmp);
            cand.truncate(k);
        }
        cand.sort_unstable_by(cmp);
        cand.into_iter().map(|(d2, j)| (j, d2.sqrt())).collect()
    }))
}

/// Exact kNN graph, symmetrized by union.
pub fn knn_graph(ds: &Dataset, n_neighbors: usize, weight: EdgeWeight) -> Result<KnnGraph> {
    let lists = knn_indices(ds, n_neighbors)?;
    let edges: Vec<(usize, usize, f64)> = lists
        .iter()
        .enumerate()
        .flat_map(|(i, l)| {
            l.iter().map(move |&(j, dist)| {
                let w = match weight {
                    EdgeWeight::Unit => 1.0,
                    EdgeWeight::InverseDistance => 1.0 / (1.0 + dist),
                };
                (i, j, w)
            })
        })
        .collect();
    KnnGraph::from_edges(ds.n(), &edges)
}
