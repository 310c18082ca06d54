//! Benchmark runner: per-dimension clustering performance, seed stability and
//! bootstrap robustness, density-peak sweeps, S_Dbw and the random-forest
//! separability check, with JSON/CSV/SVG output.

pub mod config;
pub mod data;
pub mod error;
pub mod experiments;
pub mod method;
pub mod report;
pub mod svg;

use dimclust_core::density::DensityPeakProfile;

pub use config::ExperimentConfig;
pub use error::{BenchError, BenchResult};
pub use method::{Clusterer, Method, MethodClusterer};
pub use report::{emit_report, BenchmarkReport};

/// Which report sections to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Sections {
    pub performance: bool,
    pub stability: bool,
    pub bootstrap: bool,
    pub density: bool,
    pub rf: bool,
}

impl Sections {
    pub const ALL: Sections = Sections {
        performance: true,
        stability: true,
        bootstrap: true,
        density: true,
        rf: true,
    };
}

/// The configured built-in methods.
pub fn builtin_clusterers(cfg: &ExperimentConfig) -> Vec<MethodClusterer> {
    cfg.methods
        .iter()
        .map(|&m| MethodClusterer::new(m, cfg.k, cfg.leiden.clone()))
        .collect()
}

/// Runs the selected sections on prepared data.
pub fn run_sections(
    cfg: &ExperimentConfig,
    bench: &data::Benchmark,
    sections: Sections,
    clusterers: &[&dyn Clusterer],
) -> BenchResult<(BenchmarkReport, Vec<DensityPeakProfile>)> {
    let mut report = BenchmarkReport::empty(cfg);
    report.overlap = bench.overlap;
    report.calibration = bench.calibration.clone();
    if sections.performance || sections.stability {
        let (perf, store) = experiments::run_performance(cfg, bench, clusterers)?;
        if sections.performance {
            report.performance = perf;
        }
        if sections.stability {
            report.stability = experiments::run_seed_stability(&store);
        }
    }
    if sections.bootstrap {
        report.bootstrap = Some(experiments::run_bootstrap(cfg, bench, clusterers)?);
    }
    let mut profiles = Vec::new();
    if sections.density {
        let (cells, p) = experiments::run_density_scan(cfg, bench)?;
        report.density = cells;
        report.sdbw = experiments::run_sdbw(bench);
        profiles = p;
    }
    if sections.rf {
        report.rf = experiments::run_rf_check(cfg, bench)?;
    }
    Ok((report, profiles))
}

/// Validates the config, prepares data, runs the sections with the built-in
/// methods and writes everything to `cfg.out_dir`.
pub fn run(cfg: &ExperimentConfig, sections: Sections) -> BenchResult<BenchmarkReport> {
    cfg.validate()?;
    let bench = data::prepare(cfg)?;
    let owned = builtin_clusterers(cfg);
    let clusterers: Vec<&dyn Clusterer> = owned.iter().map(|c| c as &dyn Clusterer).collect();
    let (report, profiles) = run_sections(cfg, &bench, sections, &clusterers)?;
    emit_report(&report, &profiles, &cfg.out_dir)?;
    Ok(report)
}
