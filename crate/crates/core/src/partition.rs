use std::path::Path;

use crate::error::{Error, Result};

/// An assignment of n points to clusters `0..k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    labels: Vec<usize>,
    k: usize,
}

impl Partition {
    /// Relabels clusters by order of first appearance so the ids are compact.
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut map = std::collections::HashMap::new();
        let compact: Vec<usize> = labels
            .iter()
            .map(|&l| {
                let next = map.len();
                *map.entry(l).or_insert(next)
            })
            .collect();
        Partition {
            k: map.len(),
            labels: compact,
        }
    }

    /// Keeps ids as given; `k` may leave some ids unused.
    pub fn with_k(labels: Vec<usize>, k: usize) -> Result<Self> {
        if let Some(&bad) = labels.iter().find(|&&l| l >= k) {
            return Err(Error::invalid(format!("label {bad} >= k = {k}")));
        }
        Ok(Partition { labels, k })
    }

    /// Every point in cluster 0.
    pub fn single(n: usize) -> Self {
        Partition {
            labels: vec![0; n],
            k: usize::from(n > 0),
        }
    }

    pub fn singletons(n: usize) -> Self {
        Partition {
            labels: (0..n).collect(),
            k: n,
        }
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn into_labels(self) -> Vec<usize> {
        self.labels
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut s = vec![0; self.k];
        for &l in &self.labels {
            s[l] += 1;
        }
        s
    }

    /// Every id in `0..k` is used.
    pub fn is_compact(&self) -> bool {
        self.sizes().iter().all(|&s| s > 0)
    }

    /// Restriction to `indices`, compacted.
    pub fn restrict(&self, indices: &[usize]) -> Partition {
        let sub: Vec<usize> = indices.iter().map(|&i| self.labels[i]).collect();
        Partition::from_labels(&sub)
    }

    /// Members of each cluster in index order.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut m = vec![Vec::new(); self.k];
        for (i, &l) in self.labels.iter().enumerate() {
            m[l].push(i);
        }
        m
    }

    /// `index,label` CSV with header.
    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut out = String::from("index,label\n");
        for (i, l) in self.labels.iter().enumerate() {
            out.push_str(&format!("{i},{l}\n"));
        }
        std::fs::write(path, out).map_err(|e| Error::io(path, e))
    }

    /// Reads `index,label` rows; indices must be `0..n` in any order.
    pub fn load_csv(path: impl AsRef<Path>) -> Result<Partition> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut pairs = Vec::new();
        for (row, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || (row == 0 && line.starts_with("index")) {
                continue;
            }
            let mut it = line.split(',');
            let parse = |f: Option<&str>, column: usize| -> Result<usize> {
                f.and_then(|s| s.trim().parse().ok()).ok_or_else(|| Error::Parse {
                    row: row + 1,
                    column,
                    message: format!("expected `index,label`, got {line:?}"),
                })
            };
            let i = parse(it.next(), 1)?;
            let l = parse(it.next(), 2)?;
            pairs.push((i, l));
        }
        pairs.sort_unstable();
        if pairs.iter().enumerate().any(|(pos, &(i, _))| pos != i) {
            return Err(Error::invalid(format!(
                "{}: indices are not a permutation of 0..{}",
                path.display(),
                pairs.len()
            )));
        }
        let labels: Vec<usize> = pairs.into_iter().map(|(_, l)| l).collect();
        let k = labels.iter().max().map_or(0, |m| m + 1);
        Partition::with_k(labels, k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compaction_by_first_appearance() {
        let p = Partition::from_labels(&[7, 7, 3, 9, 3]);
        assert_eq!(p.labels(), &[0, 0, 1, 2, 1]);
        assert_eq!(p.k(), 3);
        assert!(p.is_compact());
    }

    #[test]
    fn with_k_validates() {
        assert!(Partition::with_k(vec![0, 2], 2).is_err());
        let p = Partition::with_k(vec![0, 2], 3).unwrap();
        assert!(!p.is_compact());
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = Partition::from_labels(&[0, 1, 1, 2, 0]);
        let path = dir.path().join("p.csv");
        p.save_csv(&path).unwrap();
        assert_eq!(Partition::load_csv(&path).unwrap(), p);
    }
}
