//! Density-peak diagnostics (ρ, δ, γ), the S_Dbw validity index, and silhouette.

pub mod peaks;
pub mod sdbw;
pub mod silhouette;

pub use peaks::{
    delta_distances, density_peak_profile, density_peak_profile_with, density_peak_profiles,
    distance_percentile, distance_percentiles, local_density, local_density_with,
    peaks_above_baseline, shuffled_baseline, DensityKernel, DensityPeakProfile,
};
pub use sdbw::s_dbw;
pub use silhouette::silhouette;
