use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::Rng;

use super::knn::KnnGraph;
use crate::error::{Error, Result};
use crate::partition::Partition;
use crate::rng::{rng_from_seed, Rng as ChaRng};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeidenOptions {
    pub resolution: f64,
    pub seed: u64,
    pub max_passes: usize,
    /// Randomness of refinement merges.
    pub theta: f64,
}

impl LeidenOptions {
    pub fn new(seed: u64) -> Self {
        LeidenOptions {
            resolution: 1.0,
            seed,
            max_passes: 10,
            theta: 0.01,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LeidenFit {
    pub partition: Partition,
    /// Modularity of `partition` at the requested resolution.
    pub quality: f64,
    /// Modularity after each pass.
    pub history: Vec<f64>,
    pub passes: usize,
    /// The graph had no edges; every node is its own community.
    pub edgeless: bool,
    /// Communities split into connected components after the last pass.
    pub split_disconnected: usize,
}

/// Modularity of `p` on `g` with resolution `gamma`. Zero for an edgeless graph.
pub fn modularity(g: &KnnGraph, p: &Partition, gamma: f64) -> f64 {
    assert_eq!(g.n(), p.len(), "partition size does not match graph");
    let two_m = 2.0 * g.total_weight();
    if two_m == 0.0 {
        return 0.0;
    }
    let mut internal = vec![0.0; p.k()];
    let mut degree = vec![0.0; p.k()];
    let labels = p.labels();
    for u in 0..g.n() {
        let c = labels[u];
        for &(v, w) in g.neighbors(u) {
            degree[c] += w;
            if labels[v] == c {
                internal[c] += w;
            }
        }
    }
    internal
        .iter()
        .zip(&degree)
        .map(|(&a, &k)| a / two_m - gamma * (k / two_m) * (k / two_m))
        .sum()
}

/// Leiden community detection maximizing modularity.
pub fn leiden(g: &KnnGraph, opts: &LeidenOptions) -> Result<LeidenFit> {
    let n = g.n();
    if n == 0 {
        return Err(Error::invalid("Leiden needs a non-empty graph"));
    }
    if !(opts.resolution > 0.0 && opts.resolution.is_finite()) {
        return Err(Error::invalid(format!("resolution must be positive, got {}", opts.resolution)));
    }
    if !(opts.theta > 0.0) || opts.max_passes == 0 {
        return Err(Error::invalid("theta must be positive and max_passes at least 1"));
    }
    if g.n_edges() == 0 {
        log::warn!("Leiden on a graph with no edges: returning singletons");
        return Ok(LeidenFit {
            partition: Partition::singletons(n),
            quality: 0.0,
            history: Vec::new(),
            passes: 0,
            edgeless: true,
            split_disconnected: 0,
        });
    }

    let base = Graph::from_knn(g);
    let mut rng = rng_from_seed(opts.seed);
    let mut flat: Vec<usize> = (0..n).collect();
    let mut history = Vec::new();
    let mut passes = 0;
    for _ in 0..opts.max_passes {
        passes += 1;
        let next = compact(&one_pass(&base, &flat, opts, &mut rng)).0;
        let unchanged = next == flat;
        flat = next;
        history.push(modularity(g, &Partition::from_labels(&flat), opts.resolution));
        if unchanged {
            break;
        }
    }

    let (labels, split) = split_components(g, &flat);
    let partition = Partition::from_labels(&labels);
    let quality = modularity(g, &partition, opts.resolution);
    Ok(LeidenFit {
        partition,
        quality,
        history,
        passes,
        edgeless: false,
        split_disconnected: split,
    })
}

/// Weighted graph with self-loops, as produced by aggregation. `node_w` is the
/// strength including the self-loop.
#[derive(Debug, Clone)]
struct Graph {
    adj: Vec<Vec<(usize, f64)>>,
    self_w: Vec<f64>,
    node_w: Vec<f64>,
    two_m: f64,
}

impl Graph {
    fn from_knn(g: &KnnGraph) -> Self {
        let adj: Vec<Vec<(usize, f64)>> = (0..g.n()).map(|u| g.neighbors(u).to_vec()).collect();
        Self::build(adj, vec![0.0; g.n()])
    }

    fn build(adj: Vec<Vec<(usize, f64)>>, self_w: Vec<f64>) -> Self {
        let node_w: Vec<f64> = adj
            .iter()
            .zip(&self_w)
            .map(|(l, &s)| l.iter().map(|e| e.1).sum::<f64>() + s)
            .collect();
        let two_m = node_w.iter().sum();
        Graph { adj, self_w, node_w, two_m }
    }

    fn n(&self) -> usize {
        self.adj.len()
    }

    /// Collapses nodes by `group` (compact ids, `count` groups).
    fn aggregate(&self, group: &[usize], count: usize) -> Graph {
        let mut self_w = vec![0.0; count];
        let mut triples: Vec<Vec<(usize, f64)>> = vec![Vec::new(); count];
        for v in 0..self.n() {
            let a = group[v];
            self_w[a] += self.self_w[v];
            for &(u, w) in &self.adj[v] {
                let b = group[u];
                if a == b {
                    self_w[a] += w;
                } else {
                    triples[a].push((b, w));
                }
            }
        }
        let adj = triples
            .into_iter()
            .map(|mut l| {
                l.sort_by_key(|e| e.0);
                let mut merged: Vec<(usize, f64)> = Vec::with_capacity(l.len());
                for (b, w) in l {
                    match merged.last_mut() {
                        Some(last) if last.0 == b => last.1 += w,
                        _ => merged.push((b, w)),
                    }
                }
                merged
            })
            .collect();
        Graph::build(adj, self_w)
    }
}

fn compact(labels: &[usize]) -> (Vec<usize>, usize) {
    let p = Partition::from_labels(labels);
    let k = p.k();
    (p.into_labels(), k)
}

fn one_pass(base: &Graph, init: &[usize], opts: &LeidenOptions, rng: &mut ChaRng) -> Vec<usize> {
    let gamma = opts.resolution;
    let mut g = base.clone();
    let (mut comm, _) = compact(init);
    let mut node_map: Vec<usize> = (0..base.n()).collect();
    loop {
        move_nodes(&g, &mut comm, gamma, rng);
        let (c, n_comm) = compact(&comm);
        comm = c;
        if n_comm == g.n() {
            break;
        }
        let (mut group, mut n_group) = compact(&refine(&g, &comm, n_comm, gamma, opts.theta, rng));
        if n_group == g.n() {
            // Refinement kept every node alone; collapse by the partition itself.
            group = comm.clone();
            n_group = n_comm;
        }
        let mut next_comm = vec![0; n_group];
        for v in 0..g.n() {
            next_comm[group[v]] = comm[v];
        }
        for x in &mut node_map {
            *x = group[*x];
        }
        g = g.aggregate(&group, n_group);
        comm = next_comm;
    }
    node_map.iter().map(|&x| comm[x]).collect()
}

/// Queue-based local moving. Community ids must be below `g.n()`.
fn move_nodes(g: &Graph, comm: &mut [usize], gamma: f64, rng: &mut ChaRng) {
    let n = g.n();
    let scale = gamma / g.two_m;
    let mut comm_w = vec![0.0; n];
    let mut count = vec![0usize; n];
    for v in 0..n {
        comm_w[comm[v]] += g.node_w[v];
        count[comm[v]] += 1;
    }
    let mut empty: Vec<usize> = (0..n).filter(|&c| count[c] == 0).collect();

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut queue: VecDeque<usize> = order.into();
    let mut queued = vec![true; n];
    let mut link = vec![0.0; n];
    let mut touched: Vec<usize> = Vec::new();

    while let Some(v) = queue.pop_front() {
        queued[v] = false;
        let old = comm[v];
        let kv = g.node_w[v];
        for &(u, w) in &g.adj[v] {
            let c = comm[u];
            if link[c] == 0.0 {
                touched.push(c);
            }
            link[c] += w;
        }
        comm_w[old] -= kv;
        count[old] -= 1;
        if count[old] == 0 {
            empty.push(old);
        }

        let mut best = old;
        let mut best_gain = link[old] - scale * kv * comm_w[old];
        for &c in &touched {
            let gain = link[c] - scale * kv * comm_w[c];
            if gain > best_gain {
                best = c;
                best_gain = gain;
            }
        }
        if best_gain < 0.0 {
            if let Some(&e) = empty.last() {
                best = e;
            }
        }
        if count[best] == 0 {
            debug_assert_eq!(empty.last(), Some(&best));
            empty.pop();
        }
        comm[v] = best;
        comm_w[best] += kv;
        count[best] += 1;

        for &c in &touched {
            link[c] = 0.0;
        }
        touched.clear();

        if best != old {
            for &(u, _) in &g.adj[v] {
                if !queued[u] && comm[u] != best {
                    queued[u] = true;
                    queue.push_back(u);
                }
            }
        }
    }
}

/// Refines each community by randomized merging of well-connected singletons.
fn refine(g: &Graph, comm: &[usize], n_comm: usize, gamma: f64, theta: f64, rng: &mut ChaRng) -> Vec<usize> {
    let n = g.n();
    let scale = gamma / g.two_m;
    let mut comm_w = vec![0.0; n_comm];
    for v in 0..n {
        comm_w[comm[v]] += g.node_w[v];
    }
    let mut refined: Vec<usize> = (0..n).collect();
    let mut r_w = g.node_w.clone();
    let mut r_size = vec![1usize; n];
    // Weight from each refined community to the rest of its parent.
    let mut r_ext: Vec<f64> = (0..n)
        .map(|v| g.adj[v].iter().filter(|e| comm[e.0] == comm[v]).map(|e| e.1).sum())
        .collect();

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut link = vec![0.0; n];
    let mut touched: Vec<usize> = Vec::new();
    let mut cands: Vec<(usize, f64)> = Vec::new();

    for v in order {
        let own = refined[v];
        if r_size[own] != 1 {
            continue;
        }
        let c = comm[v];
        let kv = g.node_w[v];
        let total = comm_w[c];
        if r_ext[own] < scale * kv * (total - kv) {
            continue;
        }
        for &(u, w) in &g.adj[v] {
            if comm[u] != c {
                continue;
            }
            let s = refined[u];
            if link[s] == 0.0 {
                touched.push(s);
            }
            link[s] += w;
        }
        cands.clear();
        cands.push((own, 0.0));
        for &s in &touched {
            if r_ext[s] < scale * r_w[s] * (total - r_w[s]) {
                continue;
            }
            let gain = link[s] - scale * kv * r_w[s];
            if gain >= 0.0 {
                cands.push((s, gain));
            }
        }
        let top = cands.iter().map(|e| e.1).fold(0.0, f64::max);
        let weights: Vec<f64> = cands.iter().map(|e| ((e.1 - top) / theta).exp()).collect();
        let mut pick = rng.random::<f64>() * weights.iter().sum::<f64>();
        let mut chosen = cands[cands.len() - 1].0;
        for (e, &w) in cands.iter().zip(&weights) {
            if pick < w {
                chosen = e.0;
                break;
            }
            pick -= w;
        }
        if chosen != own {
            r_ext[chosen] += r_ext[own] - 2.0 * link[chosen];
            r_w[chosen] += kv;
            r_size[chosen] += 1;
            r_size[own] = 0;
            refined[v] = chosen;
        }
        for &s in &touched {
            link[s] = 0.0;
        }
        touched.clear();
    }
    refined
}

/// Splits each community into its connected components. Returns the new
/// labels and how many communities were split.
fn split_components(g: &KnnGraph, labels: &[usize]) -> (Vec<usize>, usize) {
    let n = g.n();
    let mut out = vec![usize::MAX; n];
    let mut pieces = vec![0usize; labels.iter().max().map_or(0, |m| m + 1)];
    let mut next = 0;
    let mut stack = Vec::new();
    for s in 0..n {
        if out[s] != usize::MAX {
            continue;
        }
        pieces[labels[s]] += 1;
        out[s] = next;
        stack.push(s);
        while let Some(v) = stack.pop() {
            for &(u, _) in g.neighbors(v) {
                if out[u] == usize::MAX && labels[u] == labels[s] {
                    out[u] = next;
                    stack.push(u);
                }
            }
        }
        next += 1;
    }
    (out, pieces.iter().filter(|&&p| p > 1).count())
}
