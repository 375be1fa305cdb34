// Temporary development probe for canonical-config behavior.
use flad_core::experiment::{detector_scores, run_single, DetectorKind, ExperimentConfig, SfValue};
use flad_core::federation::run_fedavg;
use flad_core::metrics::roc_curve;

fn main() {
    let t0 = std::time::Instant::now();
    let mut acc_on = Vec::new();
    let mut acc_off = Vec::new();
    let mut aucs = Vec::new();
    let mut grad_aucs = Vec::new();
    let mut recon_aucs = Vec::new();
    let mut pca_aucs = Vec::new();
    let mut det_rates = Vec::new();
    let mut fprs = Vec::new();
    for s in 0..5 {
        let mut cfg = ExperimentConfig::canonical();
        cfg.seed = 42 + s;
        if let Ok(v) = std::env::var("LOCAL_EPOCHS") {
            cfg.federation.local_epochs = v.parse().unwrap();
        }
        if let Ok(v) = std::env::var("OPTIM") {
            if v == "sgd" {
                cfg.federation.optimizer = flad_core::nn::OptimizerKind::Sgd;
            }
        }
        if let Ok(v) = std::env::var("LR") {
            cfg.federation.lr = v.parse().unwrap();
        }
        if let Ok(v) = std::env::var("SF") {
            cfg.detection.sf = Some(SfValue(Some(v.parse().unwrap())));
        }
        let run = run_single(&cfg).unwrap();
        acc_on.push(run.summary.final_accuracy);
        aucs.push(run.summary.detection_auc.unwrap_or(f64::NAN));
        det_rates.push(run.summary.detection_rate);
        fprs.push(run.summary.false_positive_rate);
        for (kind, store) in [
            (DetectorKind::Grad, &mut grad_aucs),
            (DetectorKind::Recon, &mut recon_aucs),
            (DetectorKind::Pca, &mut pca_aucs),
        ] {
            let (scores, labels) = detector_scores(kind, &run.data, &run.output).unwrap();
            store.push(roc_curve(&scores, &labels).map(|r| r.auc).unwrap_or(f64::NAN));
        }

        // Detection-off arm (plain FedAvg path shares seeds).
        let off = run_fedavg(&run.data, &run.options).unwrap();
        acc_off.push(off.reports.last().unwrap().global_accuracy);

        if s == 0 {
            let accs: Vec<String> = run.output.reports.iter().map(|r| format!("{:.3}", r.global_accuracy)).collect();
            println!("round accuracies (on):  {}", accs.join(" "));
            let accs: Vec<String> = off.reports.iter().map(|r| format!("{:.3}", r.global_accuracy)).collect();
            println!("round accuracies (off): {}", accs.join(" "));
            let flags: Vec<String> = run.output.reports.iter().map(|r| r.n_flagged().to_string()).collect();
            println!("flagged per round: {}", flags.join(" "));
            println!("grad scores r0: {:?}", run.output.reports[0].grad_scores.iter().map(|v| (v * 1000.0).round() / 1000.0).collect::<Vec<_>>());
            println!("recon scores r0: {:?}", run.output.reports[0].recon_scores.iter().map(|v| (v * 10000.0).round() / 10000.0).collect::<Vec<_>>());
            println!("recon base: {:?}", run.output.recon_base);
        }
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    println!("acc with detection:    {:.4} {:?}", mean(&acc_on), acc_on.iter().map(|v| (v * 1000.0).round() / 1000.0).collect::<Vec<_>>());
    println!("acc without detection: {:.4} {:?}", mean(&acc_off), acc_off.iter().map(|v| (v * 1000.0).round() / 1000.0).collect::<Vec<_>>());
    println!("gap: {:.4}", mean(&acc_on) - mean(&acc_off));
    println!("combined AUC: {:.4} {:?}", mean(&aucs), aucs.iter().map(|v| (v * 100.0).round() / 100.0).collect::<Vec<_>>());
    println!("grad AUC:     {:.4}", mean(&grad_aucs));
    println!("recon AUC:    {:.4}", mean(&recon_aucs));
    println!("pca AUC:      {:.4}", mean(&pca_aucs));
    println!("detection rate: {:.4}  fpr: {:.4}", mean(&det_rates), mean(&fprs));

    // Clean-run false positive control at sf = 3.
    let mut clean_flag_rates = Vec::new();
    for s in 0..5 {
        let mut cfg = ExperimentConfig::canonical();
        cfg.seed = 200 + s;
        cfg.poison.kind = flad_core::experiment::PoisonKindConfig::None;
        cfg.poison.malicious_clients.clear();
        cfg.detection.sf = Some(SfValue(Some(3.0)));
        let run = run_single(&cfg).unwrap();
        let flagged: usize = run.summary.total_anomalies;
        clean_flag_rates.push(flagged as f64 / (cfg.federation.r * cfg.federation.n) as f64);
    }
    println!("clean flag rate at sf=3: {:.4} {:?}", mean(&clean_flag_rates), clean_flag_rates);
    println!("elapsed: {:.1?}", t0.elapsed());
}
