//! `flad` — experiment driver for the federated-learning anomaly-detection
//! simulator.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage/config error.

mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use flad_core::data::gen_synthetic;
use flad_core::experiment::{build_data, detector_scores, run_single, DetectorKind, ExperimentConfig};
use flad_core::metrics::{roc_curve, sweep_sensitivity};
use flad_core::nn::run_gradcheck;
use flad_core::Error;

#[derive(Parser)]
#[command(name = "flad", version, about = "Federated learning with dual-channel anomaly screening")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment; writes rounds.csv, verdicts.csv and summary.json.
    Run {
        /// JSON experiment config.
        config: PathBuf,
        /// Override the config's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the config's output directory.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Sweep the sensitivity factor; writes sweep.csv and sweep_raw.csv.
    Sweep {
        config: PathBuf,
        /// Comma-separated sensitivity values, e.g. 0.5,1,2,3.
        #[arg(long, value_delimiter = ',', required = true)]
        sf_grid: Vec<f64>,
        /// Seeds per grid point (cfg.seed .. cfg.seed + seeds - 1).
        #[arg(long, default_value_t = 5)]
        seeds: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// ROC curve for one detector; writes roc_<detector>.csv and prints AUC.
    Roc {
        config: PathBuf,
        /// One of: combined, grad, recon, pca.
        #[arg(long)]
        detector: String,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Verify backprop against central finite differences (exit 0 iff < 1e-4).
    Gradcheck,
    /// Generate a synthetic dataset CSV.
    GenData {
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 100)]
        per_class: usize,
        #[arg(long, default_value_t = 16)]
        d_in: usize,
        #[arg(long, default_value_t = 0.8)]
        class_sep: f64,
        #[arg(long, default_value_t = 0.1)]
        std: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
}

fn load_config(path: &Path, seed: Option<u64>, out_dir: Option<&Path>) -> Result<ExperimentConfig, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::ConfigParse(format!("{}: {e}", path.display())))?;
    let mut cfg = ExperimentConfig::from_json(&text)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(d) = out_dir {
        cfg.output_dir = d.display().to_string();
    }
    Ok(cfg)
}

fn cmd_run(config: &Path, seed: Option<u64>, out_dir: Option<&Path>) -> Result<(), Error> {
    let cfg = load_config(config, seed, out_dir)?;
    let run = run_single(&cfg)?;
    let dir = PathBuf::from(&cfg.output_dir);
    std::fs::create_dir_all(&dir)?;
    let malicious: Vec<bool> = run.data.clients.iter().map(|c| c.is_malicious).collect();
    output::write_rounds_csv(&dir.join("rounds.csv"), &run.output.reports)?;
    output::write_verdicts_csv(&dir.join("verdicts.csv"), &run.output.reports, &malicious)?;
    output::write_summary_json(&dir.join("summary.json"), &run.summary)?;
    println!("final_accuracy {}", output::fmt_f64(run.summary.final_accuracy));
    println!("poisoned_eval_accuracy {}", output::fmt_f64(run.summary.poisoned_eval_accuracy));
    match run.summary.detection_auc {
        Some(auc) => println!("detection_auc {}", output::fmt_f64(auc)),
        None => println!("detection_auc undefined (no malicious clients)"),
    }
    println!("anomalies {} over {} rounds", run.summary.total_anomalies, run.output.reports.len());
    println!("outputs written to {}", dir.display());
    Ok(())
}

fn cmd_sweep(
    config: &Path,
    sf_grid: &[f64],
    seeds: usize,
    seed: Option<u64>,
    out_dir: Option<&Path>,
) -> Result<(), Error> {
    let cfg = load_config(config, seed, out_dir)?;
    let sweep = sweep_sensitivity(&cfg, sf_grid, seeds)?;
    let dir = PathBuf::from(&cfg.output_dir);
    std::fs::create_dir_all(&dir)?;
    output::write_sweep_csv(&dir, &sweep)?;
    for row in &sweep.rows {
        println!(
            "sf {:>6.3}: accuracy {:.4}, anomalies {:.2}, rounds-with-anomalies {:.2}",
            row.sf, row.final_accuracy, row.total_anomalies, row.rounds_with_anomalies
        );
    }
    println!("outputs written to {}", dir.display());
    Ok(())
}

fn cmd_roc(config: &Path, detector: &str, seed: Option<u64>, out_dir: Option<&Path>) -> Result<(), Error> {
    let kind: DetectorKind = detector.parse()?;
    let cfg = load_config(config, seed, out_dir)?;
    let (scores, labels) = match kind {
        DetectorKind::Pca => {
            // The PCA baseline scores client shards directly, no training run.
            let data = build_data(&cfg)?;
            detector_scores(kind, &data, None)?
        }
        _ => {
            let run = run_single(&cfg)?;
            detector_scores(kind, &run.data, Some(&run.output))?
        }
    };
    let roc = roc_curve(&scores, &labels)?;
    let dir = PathBuf::from(&cfg.output_dir);
    std::fs::create_dir_all(&dir)?;
    output::write_roc_csv(&dir.join(format!("roc_{}.csv", kind.name())), &roc)?;
    println!("detector {} AUC {}", kind.name(), output::fmt_f64(roc.auc));
    Ok(())
}

fn cmd_gradcheck() -> Result<bool, Error> {
    let reports = run_gradcheck(20)?;
    let mut worst = 0.0f64;
    for r in &reports {
        println!("{:<45} seeds {:>3}  max relative error {:.3e}", r.name, r.seeds, r.max_rel_error);
        worst = worst.max(r.max_rel_error);
    }
    println!("max relative error {worst:.3e} (tolerance 1e-4)");
    Ok(worst < 1e-4)
}

fn cmd_gen_data(
    k: usize,
    per_class: usize,
    d_in: usize,
    class_sep: f64,
    std: f64,
    seed: u64,
    out: &Path,
) -> Result<(), Error> {
    let ds = gen_synthetic(k, per_class, d_in, class_sep, std, seed)?;
    if let Some(parent) = out.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let file = std::fs::File::create(out)?;
    ds.write_csv(std::io::BufWriter::new(file))?;
    println!("wrote {} samples ({} classes, {} features) to {}", ds.n(), ds.k(), ds.d_in(), out.display());
    Ok(())
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::InvalidConfig { .. } | Error::ConfigParse(_) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("FLAD_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            if n > 0 {
                // Ignore failure: the pool may already exist in test harnesses.
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run { config, seed, out_dir } => cmd_run(config, *seed, out_dir.as_deref()).map(|_| true),
        Command::Sweep { config, sf_grid, seeds, seed, out_dir } => {
            cmd_sweep(config, sf_grid, *seeds, *seed, out_dir.as_deref()).map(|_| true)
        }
        Command::Roc { config, detector, seed, out_dir } => {
            cmd_roc(config, detector, *seed, out_dir.as_deref()).map(|_| true)
        }
        Command::Gradcheck => cmd_gradcheck(),
        Command::GenData { k, per_class, d_in, class_sep, std, seed, out } => {
            cmd_gen_data(*k, *per_class, *d_in, *class_sep, *std, *seed, out).map(|_| true)
        }
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
