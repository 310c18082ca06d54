use dimclust_core::clustering::{
    gmm_fit, kmeans, knn_graph, leiden, tmm_fit, EdgeWeight, GmmOptions, KMeansOptions, KnnGraph, LeidenOptions,
    TmmOptions,
};
use dimclust_core::dataset::{generate_synthetic_mixture, SyntheticMixtureSpec};
use dimclust_core::metrics::ari;
use dimclust_core::rng::rng_from_seed;
use dimclust_core::{Dataset, Partition};
use rand::seq::SliceRandom;
use rand::Rng;

fn connected(g: &KnnGraph, members: &[usize]) -> bool {
    let mut inside = vec![false; g.n()];
    members.iter().for_each(|&v| inside[v] = true);
    let mut seen = vec![false; g.n()];
    let mut stack = vec![members[0]];
    seen[members[0]] = true;
    let mut count = 1;
    while let Some(v) = stack.pop() {
        for &(u, _) in g.neighbors(v) {
            if inside[u] && !seen[u] {
                seen[u] = true;
                count += 1;
                stack.push(u);
            }
        }
    }
    count == members.len()
}

#[test]
fn brute_force_knn_oracle() {
    let mut rng = rng_from_seed(5);
    let rows: Vec<Vec<f64>> = (0..100).map(|_| (0..3).map(|_| rng.random::<f64>()).collect()).collect();
    let ds = Dataset::from_rows(&rows, None).unwrap();
    let g = knn_graph(&ds, 6, EdgeWeight::Unit).unwrap();
    for i in 0..100 {
        let mut order: Vec<(f64, usize)> = (0..100)
            .filter(|&j| j != i)
            .map(|j| (rows[i].iter().zip(&rows[j]).map(|(a, b)| (a - b) * (a - b)).sum(), j))
            .collect();
        order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for &(_, j) in &order[..6] {
            assert!(g.weight(i, j).is_some(), "{i} -> {j}");
        }
        // Every other edge of i comes from j choosing i.
        for &(j, _) in g.neighbors(i) {
            let mine = order[..6].iter().any(|o| o.1 == j);
            assert!(mine || g.neighbors(j).iter().any(|e| e.0 == i));
        }
    }
}

#[test]
fn leiden_communities_are_connected_on_random_knn_graphs() {
    for seed in 0..10 {
        let ds = generate_synthetic_mixture(&SyntheticMixtureSpec { k: 6, d: 3, n: 250, overlap: 3.0, seed }).unwrap();
        let g = knn_graph(&ds, 5, EdgeWeight::InverseDistance).unwrap();
        let fit = leiden(&g, &LeidenOptions::new(seed)).unwrap();
        for m in fit.partition.members() {
            assert!(connected(&g, &m), "seed {seed}");
        }
    }
}

#[test]
fn resolution_controls_granularity() {
    let ds = generate_synthetic_mixture(&SyntheticMixtureSpec { k: 5, d: 4, n: 400, overlap: 6.0, seed: 1 }).unwrap();
    let g = knn_graph(&ds, 15, EdgeWeight::Unit).unwrap();
    let coarse = leiden(&g, &LeidenOptions { resolution: 0.2, ..LeidenOptions::new(1) }).unwrap();
    let fine = leiden(&g, &LeidenOptions { resolution: 3.0, ..LeidenOptions::new(1) }).unwrap();
    assert!(coarse.partition.k() < fine.partition.k());
}

#[test]
fn permutation_equivariance_on_separated_blobs() {
    let ds = generate_synthetic_mixture(&SyntheticMixtureSpec { k: 4, d: 3, n: 200, overlap: 40.0, seed: 9 }).unwrap();
    let mut perm: Vec<usize> = (0..200).collect();
    perm.shuffle(&mut rng_from_seed(3));
    let shuffled = ds.subset(&perm).unwrap();
    let unpermute = |p: &Partition| {
        let mut labels = vec![0; 200];
        for (pos, &orig) in perm.iter().enumerate() {
            labels[orig] = p.labels()[pos];
        }
        Partition::from_labels(&labels)
    };
    let runs: Vec<(Partition, Partition)> = vec![
        (
            kmeans(&ds, &KMeansOptions::new(4, 1)).unwrap().partition,
            kmeans(&shuffled, &KMeansOptions::new(4, 1)).unwrap().partition,
        ),
        (
            gmm_fit(&ds, &GmmOptions::new(4, 1)).unwrap().partition,
            gmm_fit(&shuffled, &GmmOptions::new(4, 1)).unwrap().partition,
        ),
        (
            tmm_fit(&ds, &TmmOptions::new(4, 1)).unwrap().partition,
            tmm_fit(&shuffled, &TmmOptions::new(4, 1)).unwrap().partition,
        ),
        (
            leiden(&knn_graph(&ds, 15, EdgeWeight::Unit).unwrap(), &LeidenOptions::new(1)).unwrap().partition,
            leiden(&knn_graph(&shuffled, 15, EdgeWeight::Unit).unwrap(), &LeidenOptions::new(1)).unwrap().partition,
        ),
    ];
    for (i, (a, b)) in runs.iter().enumerate() {
        assert_eq!(ari(a, &unpermute(b)).unwrap(), 1.0, "method {i}");
        assert!(a.is_compact());
    }
}
