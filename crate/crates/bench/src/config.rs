use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{BenchError, BenchResult};
use crate::method::Method;

pub const DEFAULT_PERCENTILES: [f64; 8] = [0.01, 0.1, 0.3, 0.5, 1.0, 2.0, 3.0, 5.0];
pub const DEFAULT_DIMS: [usize; 6] = [2, 4, 8, 16, 32, 64];

/// Where the per-dimension datasets come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DataSource {
    /// Gaussian mixture surrogate generated per dimension.
    Synthetic {
        n: usize,
        classes: usize,
        /// Mean separation scale. When absent it is calibrated at the
        /// smallest dimension so the forest reaches `target_accuracy`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        overlap: Option<f64>,
        #[serde(default = "default_target_accuracy")]
        target_accuracy: f64,
    },
    /// One embedding file per dimension; `{d}` in the pattern is replaced by
    /// the dimension. `.mnde` files are read as binary embeddings, anything
    /// else as CSV with a `label` column.
    Files { pattern: String },
}

fn default_target_accuracy() -> f64 {
    0.90
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LeidenConfig {
    pub resolution: f64,
    pub n_neighbors: usize,
    pub inverse_distance_weights: bool,
    pub max_passes: usize,
}

impl Default for LeidenConfig {
    fn default() -> Self {
        LeidenConfig {
            resolution: 1.0,
            n_neighbors: 15,
            inverse_distance_weights: false,
            max_passes: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForestConfig {
    pub n_trees: usize,
    pub folds: usize,
    pub max_depth: Option<usize>,
}

impl Default for ForestConfig {
    fn default() -> Self {
        ForestConfig {
            n_trees: 100,
            folds: 10,
            max_depth: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub dims: Vec<usize>,
    pub methods: Vec<Method>,
    /// Cluster count for centroid and mixture methods.
    pub k: usize,
    pub n_seeds: usize,
    pub percentiles: Vec<f64>,
    pub top_gamma: usize,
    pub out_dir: PathBuf,
    pub data: DataSource,
    pub leiden: LeidenConfig,
    pub forest: ForestConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: 0,
            dims: DEFAULT_DIMS.to_vec(),
            methods: Method::ALL.to_vec(),
            k: 10,
            n_seeds: 10,
            percentiles: DEFAULT_PERCENTILES.to_vec(),
            top_gamma: 30,
            out_dir: PathBuf::from("out"),
            data: DataSource::Synthetic {
                n: 5000,
                classes: 10,
                overlap: None,
                target_accuracy: default_target_accuracy(),
            },
            leiden: LeidenConfig::default(),
            forest: ForestConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: impl AsRef<Path>) -> BenchResult<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| BenchError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn from_toml(text: &str) -> BenchResult<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| BenchError::Config(e.to_string()))?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Checks the invariants every experiment relies on.
    pub fn validate(&self) -> BenchResult<()> {
        let bad = |msg: String| Err(BenchError::Config(msg));
        if self.dims.is_empty() {
            return bad("at least one dimension is required".into());
        }
        if let Some(d) = self.dims.iter().find(|&&d| d == 0) {
            return bad(format!("invalid dimension {d}"));
        }
        let mut seen = self.dims.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != self.dims.len() {
            return bad("dimensions must be distinct".into());
        }
        if self.n_seeds < 2 {
            return bad(format!("n_seeds must be at least 2, got {}", self.n_seeds));
        }
        if self.k < 2 {
            return bad(format!("k must be at least 2, got {}", self.k));
        }
        if let Some(p) = self.percentiles.iter().find(|&&p| !(p > 0.0 && p <= 100.0)) {
            return bad(format!("percentile {p} outside (0, 100]"));
        }
        if self.forest.folds < 2 || self.forest.n_trees == 0 {
            return bad("forest needs at least 2 folds and 1 tree".into());
        }
        if !(self.leiden.resolution > 0.0) || self.leiden.n_neighbors == 0 {
            return bad("Leiden needs a positive resolution and at least one neighbor".into());
        }
        match &self.data {
            DataSource::Synthetic {
                n,
                classes,
                overlap,
                target_accuracy,
            } => {
                if *n < 10 || *classes < 2 {
                    return bad("synthetic data needs n >= 10 and at least 2 classes".into());
                }
                if overlap.is_some_and(|c| !(c > 0.0 && c.is_finite())) {
                    return bad("overlap must be finite and positive".into());
                }
                let chance = 1.0 / *classes as f64;
                if overlap.is_none() && !(*target_accuracy > chance && *target_accuracy < 1.0) {
                    return bad(format!("target accuracy must lie in ({chance}, 1)"));
                }
            }
            DataSource::Files { pattern } => {
                if !pattern.contains("{d}") && self.dims.len() > 1 {
                    return bad("file pattern must contain {d} when several dims are used".into());
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate_and_round_trip() {
        let cfg = ExperimentConfig::default();
        cfg.validate().unwrap();
        assert_eq!(ExperimentConfig::from_toml(&cfg.to_toml()).unwrap(), cfg);
    }

    #[test]
    fn partial_file_fills_defaults() {
        let cfg = ExperimentConfig::from_toml(
            r#"
            seed = 7
            dims = [2, 64]
            methods = ["kmeans", "leiden"]
            [data]
            kind = "files"
            pattern = "emb/mnist-nd-{d}.mnde"
            [leiden]
            n_neighbors = 30
            "#,
        )
        .unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.k, 10);
        assert_eq!(cfg.leiden.n_neighbors, 30);
        assert_eq!(cfg.leiden.resolution, 1.0);
        assert_eq!(cfg.methods, vec![Method::KMeans, Method::Leiden]);
        cfg.validate().unwrap();
    }

    #[test]
    fn rejects_bad_values() {
        assert!(ExperimentConfig::from_toml("n_seeds = \"x\"").is_err());
        assert!(ExperimentConfig::from_toml("unknown = 1").is_err());
        let cfg = ExperimentConfig {
            n_seeds: 1,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = ExperimentConfig {
            dims: vec![],
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = ExperimentConfig {
            percentiles: vec![0.0],
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
    }
}
