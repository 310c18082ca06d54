//! Point matrices with optional class labels, plus their file formats,
//! the synthetic surrogate generator and the bootstrap splitter.

mod csv_io;
mod mnde;
mod split;
mod synth;

pub use csv_io::{load_csv, save_csv};
pub use mnde::{load_embeddings, read_embeddings, save_embeddings, write_embeddings, MNDE_MAGIC};
pub use split::{bootstrap_split, BootstrapSplit};
pub use synth::{component_means, generate_synthetic_mixture, SyntheticMixtureSpec};

use crate::error::{Error, Result};

/// An n×d matrix of finite coordinates stored row-major, with optional class
/// labels in `[0, C)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    name: String,
    n: usize,
    d: usize,
    points: Vec<f64>,
    labels: Option<Vec<usize>>,
}

impl Dataset {
    pub fn new(
        name: impl Into<String>,
        points: Vec<f64>,
        n: usize,
        d: usize,
        labels: Option<Vec<usize>>,
    ) -> Result<Self> {
        if n == 0 || d == 0 {
            return Err(Error::invalid(format!("dataset must have n >= 1 and d >= 1, got {n}x{d}")));
        }
        if points.len() != n * d {
            return Err(Error::invalid(format!(
                "expected {} coordinates for a {n}x{d} matrix, got {}",
                n * d,
                points.len()
            )));
        }
        if let Some(pos) = points.iter().position(|x| !x.is_finite()) {
            return Err(Error::invalid(format!(
                "non-finite coordinate at row {}, column {}",
                pos / d,
                pos % d
            )));
        }
        if let Some(l) = &labels {
            if l.len() != n {
                return Err(Error::invalid(format!("{} labels for {n} points", l.len())));
            }
        }
        Ok(Dataset {
            name: name.into(),
            n,
            d,
            points,
            labels,
        })
    }

    /// Builds a dataset from equal-length rows.
    pub fn from_rows(rows: &[Vec<f64>], labels: Option<Vec<usize>>) -> Result<Self> {
        let d = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::invalid("rows have unequal lengths"));
        }
        let points = rows.iter().flatten().copied().collect();
        Dataset::new("", points, rows.len(), d, labels)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.points[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.points.chunks_exact(self.d)
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    /// Number of classes, `max(label) + 1`.
    pub fn n_classes(&self) -> Option<usize> {
        self.labels
            .as_ref()
            .map(|l| l.iter().copied().max().map_or(0, |m| m + 1))
    }

    pub fn without_labels(&self) -> Dataset {
        Dataset {
            labels: None,
            ..self.clone()
        }
    }

    /// Rows selected by `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Result<Dataset> {
        if let Some(&bad) = indices.iter().find(|&&i| i >= self.n) {
            return Err(Error::invalid(format!("index {bad} out of range for n = {}", self.n)));
        }
        let mut points = Vec::with_capacity(indices.len() * self.d);
        for &i in indices {
            points.extend_from_slice(self.row(i));
        }
        let labels = self
            .labels
            .as_ref()
            .map(|l| indices.iter().map(|&i| l[i]).collect());
        Dataset::new(self.name.clone(), points, indices.len(), self.d, labels)
    }

    /// Per-coordinate mean.
    pub fn mean(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.d];
        for r in self.rows() {
            for (a, x) in m.iter_mut().zip(r) {
                *a += x;
            }
        }
        m.iter_mut().for_each(|a| *a /= self.n as f64);
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_shapes_and_values() {
        assert!(Dataset::new("x", vec![], 0, 1, None).is_err());
        assert!(Dataset::new("x", vec![1.0, 2.0], 1, 3, None).is_err());
        assert!(Dataset::new("x", vec![f64::NAN], 1, 1, None).is_err());
        assert!(Dataset::new("x", vec![1.0, 2.0], 2, 1, Some(vec![0])).is_err());
    }

    #[test]
    fn subset_keeps_labels() {
        let ds = Dataset::from_rows(&[vec![0.0], vec![1.0], vec![2.0]], Some(vec![0, 1, 2])).unwrap();
        let s = ds.subset(&[2, 0]).unwrap();
        assert_eq!(s.points(), &[2.0, 0.0]);
        assert_eq!(s.labels(), Some(&[2, 0][..]));
        assert_eq!(ds.n_classes(), Some(3));
        assert!(ds.subset(&[3]).is_err());
    }
}
