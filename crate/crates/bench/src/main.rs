use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dimclust_core::dataset::{bootstrap_split, save_csv, save_embeddings};
use dimclust_core::metrics::external_scores;
use dimclust_core::Partition;
use dimclust_bench::data::{load_dataset_file, synthetic_dataset};
use dimclust_bench::{
    emit_report, run, BenchError, BenchResult, BenchmarkReport, Clusterer, ExperimentConfig, Method,
    MethodClusterer, Sections,
};

#[derive(Parser)]
#[command(name = "dimclust", version, about = "Clustering benchmarks across embedding dimensions")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML experiment config; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Comma-separated dimensions, e.g. 2,4,8.
    #[arg(long, global = true, value_delimiter = ',')]
    dims: Option<Vec<usize>>,
    /// Comma-separated methods: kmeans, gmm, tmm, leiden.
    #[arg(long, global = true, value_delimiter = ',')]
    methods: Option<Vec<Method>>,
    /// Comma-separated distance percentiles for the density sweep.
    #[arg(long, global = true, value_delimiter = ',')]
    percentiles: Option<Vec<f64>>,
}

#[derive(Subcommand)]
enum Command {
    /// Write synthetic mixtures, one MNDE file per dimension.
    GenSynth {
        #[arg(long, default_value_t = 5000)]
        n: usize,
        #[arg(long, default_value_t = 10)]
        classes: usize,
        #[arg(long)]
        overlap: f64,
        /// Also write CSV copies.
        #[arg(long)]
        csv: bool,
    },
    /// Write a bootstrap split of n points as JSON.
    Split {
        #[arg(long)]
        n: usize,
    },
    /// Cluster one dataset file and write index,label CSV.
    Cluster {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        method: Method,
        #[arg(long)]
        k: Option<usize>,
    },
    /// External scores of a predicted labelling against the truth.
    Eval {
        /// index,label CSV.
        #[arg(long)]
        pred: PathBuf,
        /// index,label CSV or a labelled dataset file.
        #[arg(long)]
        truth: PathBuf,
    },
    /// Ground-truth ARI per dimension and method.
    Performance,
    /// Pairwise ARI across seeds.
    Stability,
    /// Shared-core ARI across three overlapping subsamples.
    Bootstrap,
    /// Density-peak sweep and S_Dbw.
    Density,
    /// Cross-validated random-forest accuracy.
    RfCv,
    /// Re-emit CSV tables and SVG plots from an existing report.json.
    Report {
        #[arg(long)]
        input: PathBuf,
    },
    /// Every experiment.
    All,
}

fn build_config(c: &Common) -> BenchResult<ExperimentConfig> {
    let mut cfg = match &c.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = c.seed {
        cfg.seed = s;
    }
    if let Some(o) = &c.out {
        cfg.out_dir = o.clone();
    }
    if let Some(d) = &c.dims {
        cfg.dims = d.clone();
    }
    if let Some(m) = &c.methods {
        cfg.methods = m.clone();
    }
    if let Some(p) = &c.percentiles {
        cfg.percentiles = p.clone();
    }
    Ok(cfg)
}

fn create_dir(dir: &Path) -> BenchResult<()> {
    std::fs::create_dir_all(dir).map_err(|e| BenchError::io(dir, e))
}

fn load_labels(path: &Path) -> BenchResult<Partition> {
    if let Ok(p) = Partition::load_csv(path) {
        return Ok(p);
    }
    let ds = load_dataset_file(path)?;
    ds.labels()
        .map(Partition::from_labels)
        .ok_or_else(|| BenchError::Config(format!("{} has no labels", path.display())))
}

/// Returns the number of failed cells; the report is written either way.
fn execute(cli: Cli) -> BenchResult<usize> {
    let cfg = build_config(&cli.common)?;
    let sections = match &cli.command {
        Command::Performance => Some(Sections { performance: true, ..Default::default() }),
        Command::Stability => Some(Sections { stability: true, ..Default::default() }),
        Command::Bootstrap => Some(Sections { bootstrap: true, ..Default::default() }),
        Command::Density => Some(Sections { density: true, ..Default::default() }),
        Command::RfCv => Some(Sections { rf: true, ..Default::default() }),
        Command::All => Some(Sections::ALL),
        _ => None,
    };
    if let Some(s) = sections {
        let report = run(&cfg, s)?;
        println!("wrote {}", cfg.out_dir.join("report.json").display());
        return Ok(report.failure_count());
    }
    match cli.command {
        Command::GenSynth { n, classes, overlap, csv } => {
            create_dir(&cfg.out_dir)?;
            for &d in &cfg.dims {
                let ds = synthetic_dataset(n, classes, d, overlap, cfg.seed)?;
                let path = cfg.out_dir.join(format!("synth-d{d}.mnde"));
                save_embeddings(&ds, &path)?;
                if csv {
                    save_csv(&ds, path.with_extension("csv"))?;
                }
                println!("wrote {}", path.display());
            }
        }
        Command::Split { n } => {
            let split = bootstrap_split(n, cfg.seed)?;
            let json = serde_json::json!({
                "n": split.n,
                "seed": cfg.seed,
                "shared": split.shared,
                "unique": split.unique,
            });
            create_dir(&cfg.out_dir)?;
            let path = cfg.out_dir.join("split.json");
            std::fs::write(&path, format!("{json:#}\n")).map_err(|e| BenchError::io(&path, e))?;
            println!("wrote {}", path.display());
        }
        Command::Cluster { input, method, k } => {
            let ds = load_dataset_file(&input)?;
            let c = MethodClusterer::new(method, k.unwrap_or(cfg.k), cfg.leiden.clone());
            let p = c.fit(&ds, cfg.seed)?;
            create_dir(&cfg.out_dir)?;
            let path = cfg.out_dir.join(format!("labels_{method}.csv"));
            p.save_csv(&path)?;
            println!("wrote {} ({} clusters)", path.display(), p.k());
        }
        Command::Eval { pred, truth } => {
            let s = external_scores(&load_labels(&pred)?, &load_labels(&truth)?)?;
            let json = serde_json::json!({
                "ari": s.ari,
                "fowlkes_mallows": s.fowlkes_mallows,
                "homogeneity": s.homogeneity,
                "completeness": s.completeness,
                "v_measure": s.v_measure,
            });
            println!("{json:#}");
        }
        Command::Report { input } => {
            let report = BenchmarkReport::load(&input)?;
            emit_report(&report, &[], &cfg.out_dir)?;
            println!("wrote {}", cfg.out_dir.display());
            return Ok(report.failure_count());
        }
        _ => unreachable!("section commands handled above"),
    }
    Ok(0)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match execute(Cli::parse()) {
        Ok(0) => ExitCode::SUCCESS,
        Ok(failed) => {
            eprintln!("{failed} cell(s) failed; see report.json");
            ExitCode::from(3)
        }
        Err(e @ BenchError::Config(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
