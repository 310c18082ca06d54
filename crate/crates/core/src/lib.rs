//! Clustering benchmark core: datasets and their file formats, k-means,
//! Gaussian and Student-t mixtures, Leiden on kNN graphs, external agreement
//! scores, density-peak diagnostics, S_Dbw, and a random-forest separability
//! check.
//!
//! Inner loops (distance scans, E-steps, tree training) run on rayon when the
//! default `parallel` feature is on. Reductions are always sequential over
//! index-ordered results, so the sequential build produces identical numbers.

pub mod error;
pub mod par;
pub mod rng;
pub mod stats;
pub mod distance;
pub mod dataset;
pub mod partition;
pub mod metrics;
pub mod clustering;
pub mod density;
pub mod classifier;

pub use dataset::Dataset;
pub use error::{Error, Result};
pub use partition::Partition;
