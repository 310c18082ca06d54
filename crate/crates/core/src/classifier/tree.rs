use rand::seq::SliceRandom;

use crate::rng::Rng;

/// Training data shared by every tree of a forest.
pub(crate) struct TrainSet<'a> {
    pub points: &'a [f64],
    pub d: usize,
    pub classes: &'a [usize],
    pub n_classes: usize,
    /// `ranks[f][row]`: position of the row in the sorted column `f`.
    pub ranks: Vec<Vec<u32>>,
    /// Order-free identity of each column; equal columns share a rank.
    pub column_rank: Vec<usize>,
}

impl<'a> TrainSet<'a> {
    pub fn new(points: &'a [f64], d: usize, classes: &'a [usize], n_classes: usize) -> Self {
        let n = classes.len();
        let value = |row: usize, f: usize| points[row * d + f];
        let ranks = (0..d)
            .map(|f| {
                let mut order: Vec<usize> = (0..n).collect();
                order.sort_by(|&a, &b| value(a, f).total_cmp(&value(b, f)).then(a.cmp(&b)));
                let mut r = vec![0u32; n];
                for (pos, &row) in order.iter().enumerate() {
                    r[row] = pos as u32;
                }
                r
            })
            .collect();
        let cmp_cols = |a: usize, b: usize| {
            (0..n)
                .map(|row| value(row, a).total_cmp(&value(row, b)))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        };
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&a, &b| cmp_cols(a, b));
        let mut column_rank = vec![0; d];
        for w in 1..d {
            let bump = cmp_cols(order[w - 1], order[w]).is_ne() as usize;
            column_rank[order[w]] = column_rank[order[w - 1]] + bump;
        }
        TrainSet {
            points,
            d,
            classes,
            n_classes,
            ranks,
            column_rank,
        }
    }

    #[inline]
    fn value(&self, row: usize, f: usize) -> f64 {
        self.points[row * self.d + f]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Node {
    Leaf(usize),
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tree {
    nodes: Vec<Node>,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct TreeParams {
    pub max_depth: Option<usize>,
    pub mtry: usize,
    pub min_leaf: usize,
}

struct Candidate {
    impurity: f64,
    column_rank: usize,
    pos: usize,
    feature: usize,
    threshold: f64,
}

impl Candidate {
    /// Lower impurity wins; ties go to the smaller column identity and then
    /// the earlier cut, which does not depend on feature order.
    fn better_than(&self, other: &Candidate) -> bool {
        self.impurity
            .total_cmp(&other.impurity)
            .then(self.column_rank.cmp(&other.column_rank))
            .then(self.pos.cmp(&other.pos))
            .is_lt()
    }
}

fn majority(counts: &[usize]) -> usize {
    let mut best = 0;
    for (c, &k) in counts.iter().enumerate() {
        if k > counts[best] {
            best = c;
        }
    }
    best
}

/// Weighted Gini of a split: `n_l·G_l + n_r·G_r`.
fn split_impurity(left: &[usize], right: &[usize], n_l: usize, n_r: usize) -> f64 {
    let side = |counts: &[usize], m: usize| {
        let ss: f64 = counts.iter().map(|&c| (c * c) as f64).sum();
        m as f64 - ss / m as f64
    };
    side(left, n_l) + side(right, n_r)
}

impl Tree {
    /// Grows a CART tree on `rows` (may repeat).
    pub(crate) fn fit(data: &TrainSet, rows: &mut [usize], params: &TreeParams, rng: &mut Rng) -> Tree {
        let mut tree = Tree { nodes: Vec::new() };
        let mut features: Vec<usize> = (0..data.d).collect();
        tree.grow(data, rows, 0, params, rng, &mut features);
        tree
    }

    fn grow(
        &mut self,
        data: &TrainSet,
        rows: &mut [usize],
        depth: usize,
        params: &TreeParams,
        rng: &mut Rng,
        features: &mut [usize],
    ) -> usize {
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf(0));
        let mut counts = vec![0usize; data.n_classes];
        for &r in rows.iter() {
            counts[data.classes[r]] += 1;
        }
        let label = majority(&counts);
        let pure = counts[label] == rows.len();
        let depth_done = params.max_depth.is_some_and(|m| depth >= m);
        if pure || depth_done || rows.len() < 2 * params.min_leaf {
            self.nodes[id] = Node::Leaf(label);
            return id;
        }
        let Some(best) = best_split(data, rows, &counts, params, rng, features) else {
            self.nodes[id] = Node::Leaf(label);
            return id;
        };
        let f = best.feature;
        rows.sort_unstable_by_key(|&r| data.ranks[f][r]);
        let (l, r) = rows.split_at_mut(best.pos);
        let left = self.grow(data, l, depth + 1, params, rng, features);
        let right = self.grow(data, r, depth + 1, params, rng, features);
        self.nodes[id] = Node::Split {
            feature: f,
            threshold: best.threshold,
            left,
            right,
        };
        id
    }

    pub fn predict(&self, x: &[f64]) -> usize {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Leaf(c) => return c,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => i = if x[feature] <= threshold { left } else { right },
            }
        }
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], i: usize) -> usize {
            match nodes[i] {
                Node::Leaf(_) => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, left).max(walk(nodes, right)),
            }
        }
        walk(&self.nodes, 0)
    }
}

/// Examines features in random order until `mtry` non-constant ones have been
/// searched, continuing past that when none gave a valid split.
fn best_split(
    data: &TrainSet,
    rows: &mut [usize],
    counts: &[usize],
    params: &TreeParams,
    rng: &mut Rng,
    features: &mut [usize],
) -> Option<Candidate> {
    if params.mtry < data.d {
        features.shuffle(rng);
    }
    let n = rows.len();
    let mut best: Option<Candidate> = None;
    let mut searched = 0;
    let mut left = vec![0usize; data.n_classes];
    let mut right = vec![0usize; data.n_classes];
    for &f in features.iter() {
        if searched >= params.mtry && best.is_some() {
            break;
        }
        rows.sort_unstable_by_key(|&r| data.ranks[f][r]);
        let first = data.value(rows[0], f);
        if data.value(rows[n - 1], f) == first {
            continue;
        }
        searched += 1;
        left.iter_mut().for_each(|c| *c = 0);
        right.copy_from_slice(counts);
        for pos in 1..n {
            let moved = data.classes[rows[pos - 1]];
            left[moved] += 1;
            right[moved] -= 1;
            let a = data.value(rows[pos - 1], f);
            let b = data.value(rows[pos], f);
            if a == b || pos < params.min_leaf || n - pos < params.min_leaf {
                continue;
            }
            let cand = Candidate {
                impurity: split_impurity(&left, &right, pos, n - pos),
                column_rank: data.column_rank[f],
                pos,
                feature: f,
                threshold: {
                    let mid = a + (b - a) / 2.0;
                    if mid >= b {
                        a
                    } else {
                        mid
                    }
                },
            };
            if best.as_ref().is_none_or(|cur| cand.better_than(cur)) {
                best = Some(cand);
            }
        }
    }
    best
}
