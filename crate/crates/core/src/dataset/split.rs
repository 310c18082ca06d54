use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct SplitSizes {
    shared: usize,
    unique: usize,
}

/// A 40% core shared by three bootstrap sets plus a disjoint 20% block
/// unique to each.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BootstrapSplit {
    pub n: usize,
    pub shared: Vec<usize>,
    pub unique: [Vec<usize>; 3],
}

impl BootstrapSplit {
    /// Indices of bootstrap dataset `i`: the shared core first, then its
    /// unique block. The shared core therefore occupies positions
    /// `0..shared.len()` of every fit.
    pub fn bootstrap_indices(&self, i: usize) -> Vec<usize> {
        let mut v = self.shared.clone();
        v.extend_from_slice(&self.unique[i]);
        v
    }

    /// Indices not assigned to any block.
    pub fn unassigned(&self) -> Vec<usize> {
        let mut used = vec![false; self.n];
        for &i in self.shared.iter().chain(self.unique.iter().flatten()) {
            used[i] = true;
        }
        (0..self.n).filter(|&i| !used[i]).collect()
    }
}

fn sizes(n: usize) -> SplitSizes {
    let unique = (0.2 * n as f64).round() as usize;
    // Rounding both blocks up can overshoot n (n mod 5 in {3, 4}); the
    // shared core absorbs the difference.
    let shared = ((0.4 * n as f64).round() as usize).min(n - 3 * unique);
    SplitSizes { shared, unique }
}

/// Cuts a seeded permutation of `0..n` into shared = first round(0.4n)
/// indices followed by three blocks of round(0.2n). Leftover indices are
/// discarded. Only index space is split, so the same split applies to every
/// embedding of the same points.
pub fn bootstrap_split(n: usize, seed: u64) -> Result<BootstrapSplit> {
    if n < 5 {
        return Err(Error::invalid(format!("bootstrap split needs n >= 5, got {n}")));
    }
    let SplitSizes { shared, unique } = sizes(n);
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng_from_seed(seed));
    let block = |b: usize| perm[shared + b * unique..shared + (b + 1) * unique].to_vec();
    Ok(BootstrapSplit {
        n,
        shared: perm[..shared].to_vec(),
        unique: [block(0), block(1), block(2)],
    })
}
