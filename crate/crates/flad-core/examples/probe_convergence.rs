// Temporary development probe for the convex convergence setup.
use flad_core::data::gen_synthetic;
use flad_core::experiment::{build_data, ExperimentConfig};
use flad_core::federation::{run_flad, LrSchedule};
use flad_core::metrics::moving_average;
use flad_core::nn::{
    backward, loss_value, Activation, LossKind, LossTarget, MlpConfig, Model, OptimizerKind, OutputHead,
};

fn main() {
    // Overlapping blobs: interior optimum for convex linear + cross-entropy.
    let mut cfg = ExperimentConfig::canonical();
    cfg.dataset = flad_core::experiment::DatasetConfig::Synthetic {
        k: 2,
        per_class: 150,
        d_in: 8,
        class_sep: 0.5,
        std: 0.25,
    };
    cfg.poison.kind = flad_core::experiment::PoisonKindConfig::None;
    cfg.poison.malicious_clients.clear();
    cfg.federation.n = 5;
    cfg.federation.r = 200;
    cfg.federation.lr = std::env::var("LR").map(|v| v.parse().unwrap()).unwrap_or(0.7);
    cfg.federation.bs = 64;
    cfg.federation.local_epochs = 1;
    cfg.federation.lr_schedule = LrSchedule::InvSqrtT;
    cfg.federation.optimizer = OptimizerKind::Sgd;
    cfg.detection.sf = Some(flad_core::experiment::SfValue(None));
    cfg.reference.m = 40;
    cfg.eval.test_fraction = 0.2;
    cfg.seed = 7;

    let data = build_data(&cfg).unwrap();
    let mut options = cfg.build_options(data.dataset.d_in(), data.dataset.k()).unwrap();
    options.model = MlpConfig::new(vec![8, 2], Activation::Relu, OutputHead::SoftmaxLogits).unwrap();

    let t0 = std::time::Instant::now();
    let out = run_flad(&data, &options).unwrap();

    // Pooled training data (union of client shards).
    let mut pooled_idx: Vec<usize> = data.clients.iter().flat_map(|c| c.indices.iter().copied()).collect();
    pooled_idx.sort_unstable();
    let pooled = data.dataset.view(&pooled_idx);
    let feats = pooled.features_tensor();
    let labels = pooled.labels_vec();
    let fed_loss = loss_value(&out.final_model, &feats, &LossTarget::Classes(&labels), LossKind::CrossEntropy).unwrap();

    // Centralized oracle: full-batch GD with 10x the step budget at the same
    // effective step size, same init.
    let eta = options.round.lr_t();
    let mut oracle = Model::init(options.model.clone(), cfg.seed);
    for _ in 0..10 * cfg.federation.r {
        let grad = backward(&oracle, &feats, &LossTarget::Classes(&labels), LossKind::CrossEntropy).unwrap();
        oracle.params.axpy(-eta, &grad).unwrap();
    }
    let oracle_loss = loss_value(&oracle, &feats, &LossTarget::Classes(&labels), LossKind::CrossEntropy).unwrap();

    println!("eta = {eta:.4}");
    println!("fed final pooled loss    = {fed_loss:.6}");
    println!("oracle final pooled loss = {oracle_loss:.6}");
    println!("gap = {:.6}", (fed_loss - oracle_loss).abs());

    let losses: Vec<f64> = out.reports.iter().map(|r| r.global_loss).collect();
    let ma = moving_average(&losses, 5);
    let tail = &ma[50..];
    let mut violations = 0;
    let mut worst: f64 = 0.0;
    for w in tail.windows(2) {
        if w[1] > w[0] + 1e-9 {
            violations += 1;
            worst = worst.max(w[1] - w[0]);
        }
    }
    println!("tail monotonicity violations: {violations} (worst +{worst:.2e})");
    println!("loss[0]={:.4} loss[50]={:.4} loss[199]={:.4}", losses[0], losses[50], losses[199]);
    println!("elapsed: {:.1?}", t0.elapsed());

    // Sanity for the synthetic linear-classifier example: class_sep 0.8, std 0.1,
    // d_in 16 must exceed 95% accuracy with a linear model.
    let ds = gen_synthetic(2, 200, 16, 0.8, 0.1, 3).unwrap();
    let lin_cfg = MlpConfig::new(vec![16, 2], Activation::Relu, OutputHead::SoftmaxLogits).unwrap();
    let model = Model::init(lin_cfg, 1);
    let all: Vec<usize> = (0..ds.n()).collect();
    let view = ds.view(&all);
    let trained = flad_core::nn::train_local(&model, &view.features_tensor(), &view.labels_vec(), 0.1, 32, 60, OptimizerKind::Adam, 5).unwrap();
    let acc = flad_core::metrics::accuracy(&trained, &view).unwrap();
    println!("linear classifier on separable blobs: acc = {acc:.4}");
}
