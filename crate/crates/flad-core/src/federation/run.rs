//! Full runs: the screened FLAD loop and the plain FedAvg reference path.

use crate::detection::{calibrate_recon_baseline, ReconBaseline};
use crate::federation::config::{ExperimentData, RunOptions, ServerState};
use crate::federation::round::{aggregate, flad_round, RoundReport};
use crate::metrics::accuracy::{accuracy, eval_loss};
use crate::nn::{train_autoencoder, train_local, Autoencoder, Model, ParamVector};
use crate::seeds;
use crate::Result;

/// Final model plus the per-round reports (the anomaly record of the run).
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub final_model: Model,
    pub reports: Vec<RoundReport>,
    pub recon_base: ReconBaseline,
}

/// Builds the server: seeded global model, detector autoencoder trained once
/// on the clean reference before round 1, and the calibrated reconstruction
/// baseline.
///
/// The reference is split in half: the autoencoder trains on one half and the
/// baseline is calibrated on the other. Calibrating on the training half
/// would understate the error of unseen-but-clean data and flag every client.
pub fn prepare_server(data: &ExperimentData, opts: &RunOptions) -> Result<ServerState> {
    use rand::seq::SliceRandom;
    opts.round.validate()?;
    let global = Model::init(opts.model.clone(), opts.round.seed);
    let ae = Autoencoder::init(data.dataset.d_in(), opts.ae.hidden, opts.ae.bottleneck, opts.round.seed)?;
    let ref_n = data.reference.n();
    let mut order: Vec<usize> = (0..ref_n).collect();
    order.shuffle(&mut seeds::rng(opts.round.seed, &[seeds::stream::AE_TRAIN, 1]));
    let (train_half, calib_half) = order.split_at(ref_n / 2);
    if calib_half.len() < 2 * opts.ae.calib_chunk {
        return Err(crate::Error::InsufficientData {
            context: "prepare_server reference calibration",
            needed: 4 * opts.ae.calib_chunk,
            available: ref_n,
        });
    }
    let ref_features = data.reference.view(train_half).features_tensor();
    let trained = train_autoencoder(
        &ae,
        &ref_features,
        opts.ae.lr,
        opts.ae.bs,
        opts.ae.epochs,
        crate::nn::OptimizerKind::Adam,
        seeds::derive(opts.round.seed, &[seeds::stream::AE_TRAIN]),
    )?;
    let calib = data.reference.subset(calib_half);
    let recon_base = calibrate_recon_baseline(&trained, &calib, opts.ae.calib_chunk, opts.round.seed)?;
    Ok(ServerState {
        global,
        detector_ae: trained,
        recon_base,
        d_ref: data.reference.clone(),
    })
}

/// Runs `R` rounds of screened federated training.
pub fn run_flad(data: &ExperimentData, opts: &RunOptions) -> Result<RunOutput> {
    let mut server = prepare_server(data, opts)?;
    let lr_t = opts.round.lr_t();
    let mut reports = Vec::with_capacity(opts.round.rounds);
    for round in 0..opts.round.rounds {
        reports.push(flad_round(&mut server, data, opts, lr_t, round)?);
    }
    Ok(RunOutput {
        final_model: server.global,
        reports,
        recon_base: server.recon_base,
    })
}

/// Plain FedAvg reference: identical seed derivation and training path, no
/// screening — every client's delta is aggregated every round. With
/// sensitivity disabled, `run_flad` must match this bit for bit.
pub fn run_fedavg(data: &ExperimentData, opts: &RunOptions) -> Result<RunOutput> {
    opts.round.validate()?;
    let mut global = Model::init(opts.model.clone(), opts.round.seed);
    let lr_t = opts.round.lr_t();
    let cfg = &opts.round;
    let test_all: Vec<usize> = (0..data.test.n()).collect();
    let poisoned_idx = data.poisoned_eval_indices();
    let mut reports = Vec::with_capacity(cfg.rounds);
    for round in 0..cfg.rounds {
        let mut deltas = Vec::with_capacity(data.clients.len());
        let mut sizes = Vec::with_capacity(data.clients.len());
        for client in &data.clients {
            let view = data.dataset.view(&client.indices);
            let features = view.features_tensor();
            let labels = view.labels_vec();
            let seed = seeds::derive(cfg.seed, &[seeds::stream::CLIENT, client.id as u64, round as u64]);
            let local = train_local(&global, &features, &labels, lr_t, cfg.bs, cfg.local_epochs, cfg.optimizer, seed)?;
            deltas.push(local.params.sub(&global.params)?);
            sizes.push(view.len());
        }
        let agg = aggregate(&deltas, &sizes)?;
        global.params = global.params.add(&agg)?;
        let test_view = data.test.view(&test_all);
        reports.push(RoundReport {
            round,
            verdicts: Vec::new(),
            accepted: data.clients.iter().map(|c| c.id).collect(),
            global_loss: eval_loss(&global, &test_view)?,
            global_accuracy: accuracy(&global, &test_view)?,
            poisoned_eval_accuracy: accuracy(&global, &data.dataset.view(&poisoned_idx))?,
            grad_scores: Vec::new(),
            recon_scores: Vec::new(),
            empty_accepted: false,
        });
    }
    Ok(RunOutput {
        final_model: global,
        reports,
        recon_base: ReconBaseline { mu_r: 0.0, sigma_r: 0.0 },
    })
}

/// Exclusion soundness helper: recomputes the global trajectory from a
/// report's accepted sets and per-round deltas. Used by tests.
pub fn replay_accepted_deltas(
    init: &Model,
    per_round: &[(Vec<usize>, Vec<ParamVector>, Vec<usize>)],
) -> Result<ParamVector> {
    let mut params = init.params.clone();
    for (accepted, deltas, sizes) in per_round {
        if accepted.is_empty() {
            continue;
        }
        let sel_deltas: Vec<ParamVector> = accepted.iter().map(|&c| deltas[c].clone()).collect();
        let sel_sizes: Vec<usize> = accepted.iter().map(|&c| sizes[c]).collect();
        let agg = aggregate(&sel_deltas, &sel_sizes)?;
        params = params.add(&agg)?;
    }
    Ok(params)
}
