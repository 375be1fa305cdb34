//! Cross-module behavior of the federation loop: FedAvg degeneration,
//! exclusion soundness, determinism, degenerate rounds.

use flad_core::detection::ReconBaseline;
use flad_core::experiment::{build_data, DatasetConfig, ExperimentConfig, PoisonKindConfig, SfValue};
use flad_core::federation::{
    aggregate, flad_round, local_update, prepare_server, run_fedavg, run_flad,
};
use flad_core::nn::train_local;

fn small_config() -> ExperimentConfig {
    let mut cfg = ExperimentConfig::canonical();
    cfg.dataset = DatasetConfig::Synthetic { k: 2, per_class: 60, d_in: 8, class_sep: 0.8, std: 0.1 };
    cfg.federation.n = 4;
    cfg.federation.r = 3;
    cfg.poison.malicious_clients = vec![0];
    cfg.reference.m = 40;
    cfg.eval.test_fraction = 0.4;
    cfg
}

#[test]
fn disabled_sensitivity_degenerates_to_fedavg_bit_for_bit() {
    let mut cfg = small_config();
    cfg.detection.sf = Some(SfValue(None));
    let data = build_data(&cfg).unwrap();
    let options = cfg.build_options(data.dataset.d_in(), data.dataset.k()).unwrap();
    let flad = run_flad(&data, &options).unwrap();
    let fedavg = run_fedavg(&data, &options).unwrap();
    assert_eq!(flad.final_model.params, fedavg.final_model.params);
    for (a, b) in flad.reports.iter().zip(&fedavg.reports) {
        assert_eq!(a.global_loss, b.global_loss);
        assert_eq!(a.global_accuracy, b.global_accuracy);
        assert!(a.verdicts.iter().all(|v| !v.flagged));
    }
}

#[test]
fn flagged_deltas_contribute_nothing_to_the_global_model() {
    let cfg = small_config();
    let data = build_data(&cfg).unwrap();
    let options = cfg.build_options(data.dataset.d_in(), data.dataset.k()).unwrap();
    let mut server = prepare_server(&data, &options).unwrap();
    let lr_t = options.round.lr_t();
    for round in 0..options.round.rounds {
        // Recompute what every client will send (local_update is pure and
        // derives its own seed, so this mirrors the round exactly).
        let updates: Vec<_> = data
            .clients
            .iter()
            .map(|c| local_update(c, &data, &server, &options, lr_t, round).unwrap())
            .collect();
        let before = server.global.params.clone();
        let report = flad_round(&mut server, &data, &options, lr_t, round).unwrap();
        // Replay the aggregation over accepted clients only.
        let expected = if report.accepted.is_empty() {
            before
        } else {
            let deltas: Vec<_> = report.accepted.iter().map(|&c| updates[c].delta.clone()).collect();
            let sizes: Vec<usize> = report.accepted.iter().map(|&c| updates[c].size).collect();
            before.add(&aggregate(&deltas, &sizes).unwrap()).unwrap()
        };
        assert_eq!(server.global.params, expected, "round {round} global differs from accepted-only replay");
    }
}

#[test]
fn run_flad_is_bit_identical_under_a_fixed_seed() {
    let cfg = small_config();
    let data = build_data(&cfg).unwrap();
    let options = cfg.build_options(data.dataset.d_in(), data.dataset.k()).unwrap();
    let a = run_flad(&data, &options).unwrap();
    let b = run_flad(&data, &options).unwrap();
    assert_eq!(a.final_model.params, b.final_model.params);
    let flags_a: Vec<Vec<bool>> = a.reports.iter().map(|r| r.verdicts.iter().map(|v| v.flagged).collect()).collect();
    let flags_b: Vec<Vec<bool>> = b.reports.iter().map(|r| r.verdicts.iter().map(|v| v.flagged).collect()).collect();
    assert_eq!(flags_a, flags_b);
    assert_eq!(
        a.reports.iter().map(|r| r.global_loss).collect::<Vec<_>>(),
        b.reports.iter().map(|r| r.global_loss).collect::<Vec<_>>()
    );
}

#[test]
fn all_clients_flagged_freezes_the_global_model() {
    let mut cfg = small_config();
    // Reconstruction channel with beta = 0 against an impossible baseline:
    // every error exceeds mu_r, so every client is flagged.
    cfg.detection.sens = Some(flad_core::experiment::SensConfig {
        alpha: SfValue(None),
        beta: SfValue(Some(0.0)),
    });
    let data = build_data(&cfg).unwrap();
    let options = cfg.build_options(data.dataset.d_in(), data.dataset.k()).unwrap();
    let mut server = prepare_server(&data, &options).unwrap();
    server.recon_base = ReconBaseline { mu_r: -1.0, sigma_r: 0.0 };
    let before = server.global.params.clone();
    let report = flad_round(&mut server, &data, &options, options.round.lr_t(), 0).unwrap();
    assert!(report.empty_accepted);
    assert!(report.accepted.is_empty());
    assert_eq!(report.n_flagged(), data.clients.len());
    assert_eq!(server.global.params, before);
}

#[test]
fn degenerate_single_client_run_equals_one_local_training_pass() {
    let mut cfg = small_config();
    cfg.federation.n = 1;
    cfg.federation.r = 1;
    cfg.poison.kind = PoisonKindConfig::None;
    cfg.poison.malicious_clients.clear();
    cfg.detection.sf = Some(SfValue(None));
    cfg.detection.sens = None;
    let data = build_data(&cfg).unwrap();
    let options = cfg.build_options(data.dataset.d_in(), data.dataset.k()).unwrap();
    let out = run_flad(&data, &options).unwrap();

    // theta_final = theta_0 + (local - theta_0) = the locally trained model.
    let global0 = flad_core::nn::Model::init(options.model.clone(), cfg.seed);
    let view = data.dataset.view(&data.clients[0].indices);
    let seed = flad_core::seeds::derive(cfg.seed, &[flad_core::seeds::stream::CLIENT, 0, 0]);
    let local = train_local(
        &global0,
        &view.features_tensor(),
        &view.labels_vec(),
        options.round.lr_t(),
        options.round.bs,
        options.round.local_epochs,
        options.round.optimizer,
        seed,
    )
    .unwrap();
    assert_eq!(out.final_model.params, local.params);
}

#[test]
fn label_flipped_clients_have_larger_gradient_scores() {
    // Median over 20 seeds: round-0 score of a flipped client strictly above
    // the median clean score.
    let mut flipped = Vec::new();
    let mut clean = Vec::new();
    for s in 0..20 {
        let mut cfg = small_config();
        cfg.seed = 500 + s;
        let data = build_data(&cfg).unwrap();
        let options = cfg.build_options(data.dataset.d_in(), data.dataset.k()).unwrap();
        let server = prepare_server(&data, &options).unwrap();
        let lr_t = options.round.lr_t();
        for client in &data.clients {
            let u = local_update(client, &data, &server, &options, lr_t, 0).unwrap();
            if client.is_malicious {
                flipped.push(u.grad_score);
            } else {
                clean.push(u.grad_score);
            }
        }
    }
    let median = |v: &mut Vec<f64>| {
        v.sort_by(|a, b| a.total_cmp(b));
        v[v.len() / 2]
    };
    let fm = median(&mut flipped);
    let cm = median(&mut clean);
    assert!(fm > cm, "flipped median {fm} must exceed clean median {cm}");
}

#[test]
fn local_update_with_zero_epochs_sends_a_zero_delta() {
    let mut cfg = small_config();
    cfg.federation.local_epochs = 0;
    let data = build_data(&cfg).unwrap();
    let options = cfg.build_options(data.dataset.d_in(), data.dataset.k()).unwrap();
    let server = prepare_server(&data, &options).unwrap();
    let u = local_update(&data.clients[1], &data, &server, &options, options.round.lr_t(), 0).unwrap();
    assert_eq!(u.delta.l2_norm(), 0.0);
    // Same params, different data: the deviation is generally positive.
    assert!(u.grad_score > 0.0);
}
