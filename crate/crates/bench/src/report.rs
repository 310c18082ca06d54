use std::fs;
use std::path::Path;

use dimclust_core::density::DensityPeakProfile;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;
use crate::data::Calibration;
use crate::error::{BenchError, BenchResult};
use crate::experiments::{
    BootstrapSection, DensityCell, PerformanceCell, RfCell, SdbwCell, StabilityCell, Summary, SEED_RULE,
};
use crate::svg::{bar_plot, line_band_plot, scatter_plot, Series};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub global_seed: u64,
    /// SHA-256 of the config serialized as JSON.
    pub config_hash: String,
    pub seed_rule: String,
    /// Wall-clock creation time. The only field that differs between reruns.
    pub generated_unix: u64,
}

impl Provenance {
    pub fn new(cfg: &ExperimentConfig) -> Self {
        Provenance {
            tool: "dimclust".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            global_seed: cfg.seed,
            config_hash: config_hash(cfg),
            seed_rule: SEED_RULE.into(),
            generated_unix: std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map_or(0, |d| d.as_secs()),
        }
    }
}

pub fn config_hash(cfg: &ExperimentConfig) -> String {
    let json = serde_json::to_string(cfg).expect("config serializes");
    Sha256::digest(json.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub provenance: Provenance,
    pub config: ExperimentConfig,
    /// Separation scale of synthetic data, when synthetic data was used.
    pub overlap: Option<f64>,
    pub calibration: Option<Calibration>,
    pub performance: Vec<PerformanceCell>,
    pub stability: Vec<StabilityCell>,
    pub bootstrap: Option<BootstrapSection>,
    pub density: Vec<DensityCell>,
    pub sdbw: Vec<SdbwCell>,
    pub rf: Vec<RfCell>,
}

impl BenchmarkReport {
    pub fn empty(cfg: &ExperimentConfig) -> Self {
        BenchmarkReport {
            provenance: Provenance::new(cfg),
            config: cfg.clone(),
            overlap: None,
            calibration: None,
            performance: Vec::new(),
            stability: Vec::new(),
            bootstrap: None,
            density: Vec::new(),
            sdbw: Vec::new(),
            rf: Vec::new(),
        }
    }

    /// Failed (cell, seed) fits across every section.
    pub fn failure_count(&self) -> usize {
        let perf: usize = self.performance.iter().map(|c| c.failures.len()).sum();
        let boot: usize = self.bootstrap.iter().flat_map(|b| &b.cells).map(|c| c.failures.len()).sum();
        let sdbw = self.sdbw.iter().filter(|c| c.error.is_some()).count();
        perf + boot + sdbw
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> BenchResult<Self> {
        serde_json::from_str(text).map_err(|e| BenchError::Report(format!("invalid report: {e}")))
    }

    pub fn load(path: impl AsRef<Path>) -> BenchResult<Self> {
        let path = path.as_ref();
        Self::from_json(&fs::read_to_string(path).map_err(|e| BenchError::io(path, e))?)
    }
}

fn write(path: &Path, contents: &str) -> BenchResult<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| BenchError::io(parent, e))?;
    }
    fs::write(path, contents).map_err(|e| BenchError::io(path, e))
}

fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn summary_row(dim: usize, method: &str, s: &Summary, failures: usize) -> Vec<String> {
    vec![
        dim.to_string(),
        method.to_string(),
        s.count.to_string(),
        opt(s.mean),
        opt(s.sd),
        failures.to_string(),
    ]
}

const SUMMARY_HEADER: [&str; 6] = ["dim", "method", "count", "mean", "sd", "failures"];

fn method_series<'a>(cells: impl Iterator<Item = (usize, &'a str, &'a Summary)>) -> Vec<Series> {
    let mut series: Vec<Series> = Vec::new();
    for (dim, method, s) in cells {
        let (Some(m), Some(sd)) = (s.mean, s.sd) else { continue };
        match series.iter_mut().find(|x| x.name == method) {
            Some(x) => x.points.push((dim as f64, m, sd)),
            None => series.push(Series {
                name: method.to_string(),
                points: vec![(dim as f64, m, sd)],
            }),
        }
    }
    series
}

/// Writes report.json, one CSV per table and the SVG views into `dir`.
/// Density profile CSVs are written only when `profiles` are supplied.
pub fn emit_report(report: &BenchmarkReport, profiles: &[DensityPeakProfile], dir: &Path) -> BenchResult<()> {
    fs::create_dir_all(dir).map_err(|e| BenchError::io(dir, e))?;
    write(&dir.join("report.json"), &report.to_json())?;

    if !report.performance.is_empty() {
        let rows = report.performance.iter().flat_map(|c| {
            c.runs.iter().map(move |r| {
                vec![
                    c.dim.to_string(),
                    c.method.clone(),
                    r.seed_index.to_string(),
                    r.seed.to_string(),
                    r.ari.to_string(),
                    r.clusters.to_string(),
                ]
            })
        });
        write(
            &dir.join("performance.csv"),
            &csv_text(&["dim", "method", "seed_index", "seed", "ari", "clusters"], rows),
        )?;
        let rows = report.performance.iter().map(|c| summary_row(c.dim, &c.method, &c.summary, c.failures.len()));
        write(&dir.join("performance_summary.csv"), &csv_text(&SUMMARY_HEADER, rows))?;
        let series = method_series(report.performance.iter().map(|c| (c.dim, c.method.as_str(), &c.summary)));
        write(
            &dir.join("performance.svg"),
            &line_band_plot("Ground-truth ARI", "latent dimension", "ARI", &series, true),
        )?;
    }

    if !report.stability.is_empty() {
        let rows = report.stability.iter().flat_map(|c| {
            c.pairs.iter().map(move |&(a, b, v)| {
                vec![c.dim.to_string(), c.method.clone(), a.to_string(), b.to_string(), v.to_string()]
            })
        });
        write(
            &dir.join("stability.csv"),
            &csv_text(&["dim", "method", "seed_a", "seed_b", "ari"], rows),
        )?;
        let rows = report.stability.iter().map(|c| summary_row(c.dim, &c.method, &c.summary, 0));
        write(&dir.join("stability_summary.csv"), &csv_text(&SUMMARY_HEADER, rows))?;
        let series = method_series(report.stability.iter().map(|c| (c.dim, c.method.as_str(), &c.summary)));
        write(
            &dir.join("stability.svg"),
            &line_band_plot("Seed stability (pairwise ARI)", "latent dimension", "ARI", &series, true),
        )?;
    }

    if let Some(b) = &report.bootstrap {
        let rows = b.cells.iter().flat_map(|c| {
            c.runs.iter().flat_map(move |r| {
                ["0-1", "0-2", "1-2"].iter().zip(r.ari).map(move |(pair, v)| {
                    vec![
                        c.dim.to_string(),
                        c.method.clone(),
                        r.seed_index.to_string(),
                        pair.to_string(),
                        v.to_string(),
                    ]
                })
            })
        });
        write(
            &dir.join("bootstrap.csv"),
            &csv_text(&["dim", "method", "seed_index", "pair", "ari"], rows),
        )?;
        let rows = b.cells.iter().map(|c| summary_row(c.dim, &c.method, &c.summary, c.failures.len()));
        write(&dir.join("bootstrap_summary.csv"), &csv_text(&SUMMARY_HEADER, rows))?;
        let series = method_series(b.cells.iter().map(|c| (c.dim, c.method.as_str(), &c.summary)));
        write(
            &dir.join("bootstrap.svg"),
            &line_band_plot("Bootstrap robustness (shared-core ARI)", "latent dimension", "ARI", &series, true),
        )?;
    }

    if !report.rf.is_empty() {
        let rows = report.rf.iter().flat_map(|c| {
            c.fold_accuracy
                .iter()
                .enumerate()
                .map(move |(f, a)| vec![c.dim.to_string(), f.to_string(), a.to_string()])
        });
        write(&dir.join("rf.csv"), &csv_text(&["dim", "fold", "accuracy"], rows))?;
        let rows = report.rf.iter().map(|c| summary_row(c.dim, "random_forest", &c.summary, 0));
        write(&dir.join("rf_summary.csv"), &csv_text(&SUMMARY_HEADER, rows))?;
        let series = method_series(report.rf.iter().map(|c| (c.dim, "random_forest", &c.summary)));
        write(
            &dir.join("rf.svg"),
            &line_band_plot("Cross-validated forest accuracy", "latent dimension", "accuracy", &series, true),
        )?;
    }

    if !report.sdbw.is_empty() {
        let rows = report.sdbw.iter().map(|c| vec![c.dim.to_string(), opt(c.value), c.error.clone().unwrap_or_default()]);
        write(&dir.join("sdbw.csv"), &csv_text(&["dim", "s_dbw", "error"], rows))?;
    }

    if !report.density.is_empty() {
        let rows = report.density.iter().flat_map(|c| {
            c.top_gamma.iter().map(move |g| {
                vec![
                    c.dim.to_string(),
                    c.percentile.to_string(),
                    c.r.to_string(),
                    g.rank.to_string(),
                    g.index.to_string(),
                    g.rho.to_string(),
                    g.delta.to_string(),
                    g.gamma.to_string(),
                ]
            })
        });
        write(
            &dir.join("density").join("top_gamma.csv"),
            &csv_text(&["dim", "percentile", "r", "rank", "index", "rho", "delta", "gamma"], rows),
        )?;
        for (i, cell) in report.density.iter().enumerate() {
            let csv_path = dir.join(&cell.profile_csv);
            if let Some(p) = profiles.get(i) {
                if let Some(parent) = csv_path.parent() {
                    fs::create_dir_all(parent).map_err(|e| BenchError::io(parent, e))?;
                }
                p.save_csv(&csv_path)?;
            }
            let stem = format!("d{}_p{}", cell.dim, cell.percentile);
            let top: Vec<usize> = cell.top_gamma.iter().map(|g| g.index).collect();
            if let Some(points) = read_rho_delta(&csv_path) {
                let title = format!("rho-delta, d = {}, {}th percentile", cell.dim, cell.percentile);
                write(
                    &dir.join("density").join(format!("rho_delta_{stem}.svg")),
                    &scatter_plot(&title, "rho", "delta", &points, &top),
                )?;
            }
            let gammas: Vec<f64> = cell.top_gamma.iter().map(|g| g.gamma).collect();
            let title = format!("largest gamma, d = {}, {}th percentile", cell.dim, cell.percentile);
            write(
                &dir.join("density").join(format!("gamma_{stem}.svg")),
                &bar_plot(&title, "rank", "gamma", &gammas),
            )?;
        }
    }
    Ok(())
}

fn read_rho_delta(path: &Path) -> Option<Vec<(f64, f64)>> {
    let mut r = csv::Reader::from_path(path).ok()?;
    r.records()
        .map(|rec| {
            let rec = rec.ok()?;
            Some((rec.get(1)?.parse().ok()?, rec.get(2)?.parse().ok()?))
        })
        .collect()
}
