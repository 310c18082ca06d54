use std::fmt;
use std::str::FromStr;

use dimclust_core::clustering::{
    gmm_fit, kmeans, knn_graph, leiden, tmm_fit, EdgeWeight, GmmOptions, KMeansOptions, LeidenOptions, TmmOptions,
};
use dimclust_core::{Dataset, Partition, Result};
use serde::{Deserialize, Serialize};

use crate::config::LeidenConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    KMeans,
    Gmm,
    Tmm,
    Leiden,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::KMeans, Method::Gmm, Method::Tmm, Method::Leiden];

    pub fn name(self) -> &'static str {
        match self {
            Method::KMeans => "kmeans",
            Method::Gmm => "gmm",
            Method::Tmm => "tmm",
            Method::Leiden => "leiden",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Method::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown method {s:?}; expected one of kmeans, gmm, tmm, leiden"))
    }
}

/// Anything that turns a dataset and a seed into a partition. Experiments run
/// over trait objects so tests can swap in stubs.
pub trait Clusterer: Sync {
    fn name(&self) -> &str;
    fn fit(&self, ds: &Dataset, seed: u64) -> Result<Partition>;
}

/// One of the four built-in methods with its knobs.
#[derive(Debug, Clone)]
pub struct MethodClusterer {
    pub method: Method,
    pub k: usize,
    pub leiden: LeidenConfig,
}

impl MethodClusterer {
    pub fn new(method: Method, k: usize, leiden: LeidenConfig) -> Self {
        MethodClusterer { method, k, leiden }
    }
}

impl Clusterer for MethodClusterer {
    fn name(&self) -> &str {
        self.method.name()
    }

    fn fit(&self, ds: &Dataset, seed: u64) -> Result<Partition> {
        Ok(match self.method {
            Method::KMeans => kmeans(ds, &KMeansOptions::new(self.k, seed))?.partition,
            Method::Gmm => gmm_fit(ds, &GmmOptions::new(self.k, seed))?.partition,
            Method::Tmm => tmm_fit(ds, &TmmOptions::new(self.k, seed))?.partition,
            Method::Leiden => {
                let weight = if self.leiden.inverse_distance_weights {
                    EdgeWeight::InverseDistance
                } else {
                    EdgeWeight::Unit
                };
                let graph = knn_graph(ds, self.leiden.n_neighbors, weight)?;
                let opts = LeidenOptions {
                    resolution: self.leiden.resolution,
                    max_passes: self.leiden.max_passes,
                    ..LeidenOptions::new(seed)
                };
                leiden(&graph, &opts)?.partition
            }
        })
    }
}
