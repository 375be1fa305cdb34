//! One federation round: local training, screening, exclusion, aggregation.

use rayon::prelude::*;

use crate::detection::{detect_anom, recon_error, AeMode, AnomalyVerdict, GradScoreKind};
use crate::federation::config::{ClientState, ExperimentData, RunOptions, ServerState};
use crate::metrics::accuracy::{accuracy, eval_loss};
use crate::nn::{class_gradient, train_autoencoder, train_local, Autoencoder, Model, ParamVector};
use crate::seeds;
use crate::{Error, Result};

/// What one client sends back (plus its anomaly scores).
#[derive(Debug, Clone)]
pub struct LocalUpdate {
    pub local: Model,
    pub delta: ParamVector,
    pub grad_score: f64,
    pub recon_score: f64,
    pub size: usize,
}

/// Per-round outcome: verdicts for all clients, the accepted set, and the
/// global model's evaluation snapshot after aggregation.
#[derive(Debug, Clone)]
pub struct RoundReport {
    pub round: usize,
    pub verdicts: Vec<AnomalyVerdict>,
    pub accepted: Vec<usize>,
    pub global_loss: f64,
    pub global_accuracy: f64,
    pub poisoned_eval_accuracy: f64,
    pub grad_scores: Vec<f64>,
    pub recon_scores: Vec<f64>,
    /// True when every client was flagged and the global model stayed frozen.
    pub empty_accepted: bool,
}

impl RoundReport {
    pub fn n_flagged(&self) -> usize {
        self.verdicts.iter().filter(|v| v.flagged).count()
    }
}

/// Local training plus anomaly scoring for one client.
///
/// The client trains a copy of the global model on its shard, then reports
/// the parameter delta, the gradient score (distance between its post-training
/// loss gradient and the server's reference gradient, or the raw norm), and
/// the reconstruction error of its data under the detector autoencoder.
pub fn local_update(
    client: &ClientState,
    data: &ExperimentData,
    server: &ServerState,
    opts: &RunOptions,
    lr_t: f64,
    round: usize,
) -> Result<LocalUpdate> {
    let view = data.dataset.view(&client.indices);
    if view.is_empty() {
        return Err(Error::EmptyData("local_update"));
    }
    let features = view.features_tensor();
    let labels = view.labels_vec();
    let cfg = &opts.round;
    let seed = seeds::derive(cfg.seed, &[seeds::stream::CLIENT, client.id as u64, round as u64]);
    let local = train_local(
        &server.global,
        &features,
        &labels,
        lr_t,
        cfg.bs,
        cfg.local_epochs,
        cfg.optimizer,
        seed,
    )?;
    let delta = local.params.sub(&server.global.params)?;

    let grad_client = class_gradient(&local, &features, &labels)?;
    let grad_score = match opts.detection.grad_score {
        GradScoreKind::Deviation => {
            let ref_all: Vec<usize> = (0..server.d_ref.n()).collect();
            let ref_view = server.d_ref.view(&ref_all);
            let grad_ref = class_gradient(&server.global, &ref_view.features_tensor(), &ref_view.labels_vec())?;
            crate::detection::grad_deviation(&grad_client, &grad_ref)?
        }
        GradScoreKind::RawNorm => grad_client.l2_norm(),
    };

    let recon_score = match opts.detection.ae_mode {
        AeMode::ServerRef => recon_error(&server.detector_ae, &view)?,
        AeMode::PerClient => {
            // Algorithm-literal mode: the client trains its own autoencoder on
            // its own shard each round, from a fresh seeded init.
            let init_seed = seeds::derive(cfg.seed, &[seeds::stream::AE_INIT, client.id as u64, round as u64]);
            let train_seed = seeds::derive(cfg.seed, &[seeds::stream::AE_TRAIN, client.id as u64, round as u64]);
            let fresh = Autoencoder::init(
                data.dataset.d_in(),
                opts.ae.hidden,
                opts.ae.bottleneck,
                init_seed,
            )?;
            let trained = train_autoencoder(
                &fresh,
                &features,
                opts.ae.lr,
                opts.ae.bs,
                opts.ae.epochs,
                cfg.optimizer,
                train_seed,
            )?;
            recon_error(&trained, &view)?
        }
    };

    Ok(LocalUpdate { local, delta, grad_score, recon_score, size: view.len() })
}

/// Size-weighted mean of client deltas: `sum(|D_c| * delta_c) / sum(|D_c|)`.
pub fn aggregate(deltas: &[ParamVector], sizes: &[usize]) -> Result<ParamVector> {
    if deltas.is_empty() || sizes.is_empty() {
        return Err(Error::EmptyData("aggregate"));
    }
    if deltas.len() != sizes.len() {
        return Err(Error::shape("aggregate", deltas.len().to_string(), sizes.len().to_string()));
    }
    if sizes.iter().any(|&s| s == 0) {
        return Err(Error::config("sizes", "client dataset sizes must be positive"));
    }
    let total: f64 = sizes.iter().map(|&s| s as f64).sum();
    let mut acc = ParamVector::zeros(deltas[0].dim());
    for (delta, &size) in deltas.iter().zip(sizes) {
        acc.axpy(size as f64 / total, delta)?;
    }
    Ok(acc)
}

/// Runs every client's local update, screens the score vector, aggregates the
/// accepted deltas into the global model, and evaluates it.
pub fn flad_round(
    server: &mut ServerState,
    data: &ExperimentData,
    opts: &RunOptions,
    lr_t: f64,
    round: usize,
) -> Result<RoundReport> {
    let updates: Vec<LocalUpdate> = data
        .clients
        .par_iter()
        .map(|c| local_update(c, data, server, opts, lr_t, round))
        .collect::<Result<_>>()?;

    let grad_scores: Vec<f64> = updates.iter().map(|u| u.grad_score).collect();
    let recon_scores: Vec<f64> = updates.iter().map(|u| u.recon_score).collect();

    let mut verdicts = Vec::with_capacity(updates.len());
    for (client, update) in data.clients.iter().zip(&updates) {
        let flags = detect_anom(
            update.grad_score,
            &grad_scores,
            update.recon_score,
            &server.recon_base,
            &opts.round.sens,
            opts.detection.combine,
            opts.detection.robust_stats,
        )?;
        verdicts.push(AnomalyVerdict {
            client_id: client.id,
            round,
            grad_score: update.grad_score,
            recon_score: update.recon_score,
            grad_flag: flags.grad_flag,
            recon_flag: flags.recon_flag,
            flagged: flags.flagged,
        });
    }

    let accepted: Vec<usize> = verdicts.iter().filter(|v| !v.flagged).map(|v| v.client_id).collect();
    let empty_accepted = accepted.is_empty();
    if !empty_accepted {
        let deltas: Vec<ParamVector> = accepted.iter().map(|&c| updates[c].delta.clone()).collect();
        let sizes: Vec<usize> = accepted.iter().map(|&c| updates[c].size).collect();
        let agg = aggregate(&deltas, &sizes)?;
        server.global.params = server.global.params.add(&agg)?;
    }

    let test_all: Vec<usize> = (0..data.test.n()).collect();
    let test_view = data.test.view(&test_all);
    let poisoned_idx = data.poisoned_eval_indices();
    Ok(RoundReport {
        round,
        verdicts,
        accepted,
        global_loss: eval_loss(&server.global, &test_view)?,
        global_accuracy: accuracy(&server.global, &test_view)?,
        poisoned_eval_accuracy: accuracy(&server.global, &data.dataset.view(&poisoned_idx))?,
        grad_scores,
        recon_scores,
        empty_accepted,
    })
}
