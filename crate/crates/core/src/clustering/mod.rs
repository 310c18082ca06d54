//! k-means, Gaussian and Student-t mixtures, and Leiden over kNN graphs.

mod linalg;
pub mod gmm;
pub mod kmeans;
pub mod knn;
pub mod leiden;
pub mod mixture;
pub mod tmm;

pub use gmm::{gmm_fit, GaussianMixtureParams, GmmFit, GmmOptions};
pub use kmeans::{kmeans, KMeansFit, KMeansOptions};
pub use knn::{knn_graph, knn_indices, EdgeWeight, KnnGraph};
pub use leiden::{leiden, modularity, LeidenFit, LeidenOptions};
pub use mixture::FitFlags;
pub use tmm::{tmm_fit, DofMode, TMixtureParams, TmmFit, TmmOptions};
