//! Deterministic CSV/JSON writers. Floats carry 17 significant digits so a
//! rerun with the same config and seed reproduces every output byte.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use flad_core::experiment::RunSummary;
use flad_core::federation::RoundReport;
use flad_core::metrics::{RocCurve, SweepResult};
use flad_core::Result;

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn bit(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}

fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        0.0
    } else {
        values.iter().sum::<f64>() / values.len() as f64
    }
}

pub fn write_rounds_csv(path: &Path, reports: &[RoundReport]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(
        w,
        "round,global_loss,global_accuracy,poisoned_eval_accuracy,n_flagged,mean_grad_score,mean_recon_score"
    )?;
    for r in reports {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            r.round,
            fmt_f64(r.global_loss),
            fmt_f64(r.global_accuracy),
            fmt_f64(r.poisoned_eval_accuracy),
            r.n_flagged(),
            fmt_f64(mean(&r.grad_scores)),
            fmt_f64(mean(&r.recon_scores)),
        )?;
    }
    Ok(())
}

pub fn write_verdicts_csv(path: &Path, reports: &[RoundReport], malicious: &[bool]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "round,client,is_malicious,grad_score,recon_score,grad_flag,recon_flag,flagged")?;
    for r in reports {
        for v in &r.verdicts {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{}",
                v.round,
                v.client_id,
                bit(malicious[v.client_id]),
                fmt_f64(v.grad_score),
                fmt_f64(v.recon_score),
                bit(v.grad_flag),
                bit(v.recon_flag),
                bit(v.flagged),
            )?;
        }
    }
    Ok(())
}

pub fn write_summary_json(path: &Path, summary: &RunSummary) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    let text = serde_json::to_string_pretty(summary)
        .map_err(|e| flad_core::Error::ConfigParse(e.to_string()))?;
    writeln!(w, "{text}")?;
    Ok(())
}

pub fn write_sweep_csv(dir: &Path, sweep: &SweepResult) -> Result<()> {
    let mut w = BufWriter::new(File::create(dir.join("sweep.csv"))?);
    writeln!(
        w,
        "sf,final_accuracy,poisoned_eval_accuracy,total_anomalies,rounds_with_anomalies,mean_grad_score,mean_recon_score"
    )?;
    for r in &sweep.rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            fmt_f64(r.sf),
            fmt_f64(r.final_accuracy),
            fmt_f64(r.poisoned_eval_accuracy),
            fmt_f64(r.total_anomalies),
            fmt_f64(r.rounds_with_anomalies),
            fmt_f64(r.mean_grad_score),
            fmt_f64(r.mean_recon_score),
        )?;
    }
    let mut w = BufWriter::new(File::create(dir.join("sweep_raw.csv"))?);
    writeln!(
        w,
        "sf,seed,final_accuracy,poisoned_eval_accuracy,total_anomalies,rounds_with_anomalies,mean_grad_score,mean_recon_score"
    )?;
    for r in &sweep.raw {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            fmt_f64(r.sf),
            r.seed,
            fmt_f64(r.final_accuracy),
            fmt_f64(r.poisoned_eval_accuracy),
            fmt_f64(r.total_anomalies),
            fmt_f64(r.rounds_with_anomalies),
            fmt_f64(r.mean_grad_score),
            fmt_f64(r.mean_recon_score),
        )?;
    }
    Ok(())
}

pub fn write_roc_csv(path: &Path, roc: &RocCurve) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "fpr,tpr")?;
    for (fpr, tpr) in &roc.points {
        writeln!(w, "{},{}", fmt_f64(*fpr), fmt_f64(*tpr))?;
    }
    Ok(())
}
