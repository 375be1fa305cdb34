//! Losses over batches: cross-entropy on logits and mean squared error.

use crate::nn::tensor::Tensor;
use crate::{Error, Result};

/// Which loss a training step minimizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LossKind {
    CrossEntropy,
    Mse,
}

/// Target data for a loss: class indices or a dense value tensor.
#[derive(Debug, Clone, Copy)]
pub enum LossTarget<'a> {
    Classes(&'a [usize]),
    Values(&'a Tensor),
}

/// Row-wise softmax with max-subtraction.
pub fn softmax_rows(logits: &Tensor) -> Tensor {
    let (n, k) = (logits.rows(), logits.cols());
    let mut out = vec![0.0; n * k];
    for r in 0..n {
        let row = logits.row(r);
        let m = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let dst = &mut out[r * k..(r + 1) * k];
        let mut sum = 0.0;
        for (d, &z) in dst.iter_mut().zip(row) {
            *d = (z - m).exp();
            sum += *d;
        }
        for d in dst.iter_mut() {
            *d /= sum;
        }
    }
    Tensor::from_rows(n, k, out).expect("softmax shape")
}

/// Mean negative log-likelihood of `labels` under row-wise softmax of `logits`,
/// computed via log-sum-exp.
pub fn cross_entropy_loss(logits: &Tensor, labels: &[usize]) -> Result<f64> {
    let (n, k) = (logits.rows(), logits.cols());
    if labels.len() != n {
        return Err(Error::shape("cross_entropy_loss", format!("{n} labels"), labels.len().to_string()));
    }
    let mut total = 0.0;
    for (r, &y) in labels.iter().enumerate() {
        if y >= k {
            return Err(Error::InvalidLabel { label: y, classes: k });
        }
        let row = logits.row(r);
        let m = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lse = m + row.iter().map(|z| (z - m).exp()).sum::<f64>().ln();
        total += lse - row[y];
    }
    Ok(total / n as f64)
}

/// Mean over all entries of the squared difference.
pub fn mse_loss(x: &Tensor, x_hat: &Tensor) -> Result<f64> {
    if x.shape() != x_hat.shape() {
        return Err(Error::shape("mse_loss", format!("{:?}", x.shape()), format!("{:?}", x_hat.shape())));
    }
    let n = x.data().len();
    let sum: f64 = x.data().iter().zip(x_hat.data()).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok(sum / n as f64)
}

/// Loss of a model's pre-head output against the target.
pub(crate) fn loss_of_output(output: &Tensor, target: &LossTarget<'_>, loss: LossKind) -> Result<f64> {
    match (loss, target) {
        (LossKind::CrossEntropy, LossTarget::Classes(labels)) => cross_entropy_loss(output, labels),
        (LossKind::Mse, LossTarget::Values(t)) => mse_loss(t, output),
        (LossKind::CrossEntropy, LossTarget::Values(_)) => {
            Err(Error::UnsupportedLoss("cross-entropy needs class-index targets"))
        }
        (LossKind::Mse, LossTarget::Classes(_)) => {
            Err(Error::UnsupportedLoss("mse needs dense value targets"))
        }
    }
}

/// Gradient of the loss w.r.t. the pre-head output, already divided by the
/// batch size (and entry count for MSE) so downstream gradients are means.
pub(crate) fn output_delta(output: &Tensor, target: &LossTarget<'_>, loss: LossKind) -> Result<Tensor> {
    let (n, k) = (output.rows(), output.cols());
    match (loss, target) {
        (LossKind::CrossEntropy, LossTarget::Classes(labels)) => {
            if labels.len() != n {
                return Err(Error::shape("output_delta", format!("{n} labels"), labels.len().to_string()));
            }
            let mut delta = softmax_rows(output);
            for (r, &y) in labels.iter().enumerate() {
                if y >= k {
                    return Err(Error::InvalidLabel { label: y, classes: k });
                }
                let row = delta.row_mut(r);
                row[y] -= 1.0;
                for v in row.iter_mut() {
                    *v /= n as f64;
                }
            }
            Ok(delta)
        }
        (LossKind::Mse, LossTarget::Values(t)) => {
            if t.shape() != output.shape() {
                return Err(Error::shape("output_delta", format!("{:?}", t.shape()), format!("{:?}", output.shape())));
            }
            let scale = 2.0 / (n * k) as f64;
            let data = output
                .data()
                .iter()
                .zip(t.data())
                .map(|(o, t)| scale * (o - t))
                .collect();
            Tensor::from_rows(n, k, data)
        }
        (LossKind::CrossEntropy, LossTarget::Values(_)) => {
            Err(Error::UnsupportedLoss("cross-entropy needs class-index targets"))
        }
        (LossKind::Mse, LossTarget::Classes(_)) => {
            Err(Error::UnsupportedLoss("mse needs dense value targets"))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_logits_drive_loss_to_zero() {
        // Huge margin on the true class.
        let logits = Tensor::from_rows(2, 3, vec![50.0, 0.0, 0.0, 0.0, 50.0, 0.0]).unwrap();
        let loss = cross_entropy_loss(&logits, &[0, 1]).unwrap();
        assert!(loss < 1e-20, "loss = {loss}");
    }

    #[test]
    fn uniform_logits_give_ln_k() {
        let logits = Tensor::zeros(vec![4, 10]);
        let loss = cross_entropy_loss(&logits, &[0, 3, 7, 9]).unwrap();
        assert!((loss - (10.0f64).ln()).abs() < 1e-12);
    }

    #[test]
    fn cross_entropy_matches_scalar_log_sum_exp() {
        use rand::Rng;
        let mut rng = crate::seeds::rng(11, &[1]);
        let (n, k) = (6, 5);
        let data: Vec<f64> = (0..n * k).map(|_| rng.random_range(-4.0..4.0)).collect();
        let labels: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
        let logits = Tensor::from_rows(n, k, data.clone()).unwrap();
        let mut oracle = 0.0;
        for r in 0..n {
            let row = &data[r * k..(r + 1) * k];
            let lse = row.iter().map(|z| z.exp()).sum::<f64>().ln();
            oracle += lse - row[labels[r]];
        }
        oracle /= n as f64;
        let got = cross_entropy_loss(&logits, &labels).unwrap();
        assert!((got - oracle).abs() < 1e-12);
    }

    #[test]
    fn label_out_of_range_is_an_error() {
        let logits = Tensor::zeros(vec![1, 3]);
        assert!(matches!(
            cross_entropy_loss(&logits, &[3]),
            Err(crate::Error::InvalidLabel { label: 3, classes: 3 })
        ));
    }

    #[test]
    fn mse_basics() {
        let x = Tensor::from_rows(1, 2, vec![0.0, 0.0]).unwrap();
        let y = Tensor::from_rows(1, 2, vec![1.0, 1.0]).unwrap();
        assert_eq!(mse_loss(&x, &x).unwrap(), 0.0);
        assert_eq!(mse_loss(&x, &y).unwrap(), 1.0);
    }

    #[test]
    fn mse_matches_elementwise_oracle_and_is_symmetric() {
        use rand::Rng;
        let mut rng = crate::seeds::rng(12, &[2]);
        let data_a: Vec<f64> = (0..12).map(|_| rng.random_range(-1.0..1.0)).collect();
        let data_b: Vec<f64> = (0..12).map(|_| rng.random_range(-1.0..1.0)).collect();
        let a = Tensor::from_rows(3, 4, data_a.clone()).unwrap();
        let b = Tensor::from_rows(3, 4, data_b.clone()).unwrap();
        let oracle: f64 = data_a.iter().zip(&data_b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() / 12.0;
        assert!((mse_loss(&a, &b).unwrap() - oracle).abs() < 1e-15);
        assert_eq!(mse_loss(&a, &b).unwrap(), mse_loss(&b, &a).unwrap());
    }

    #[test]
    fn mse_rejects_shape_mismatch() {
        let a = Tensor::zeros(vec![2, 2]);
        let b = Tensor::zeros(vec![2, 3]);
        assert!(mse_loss(&a, &b).is_err());
    }

    #[test]
    fn softmax_rows_sum_to_one() {
        use rand::Rng;
        let mut rng = crate::seeds::rng(13, &[3]);
        let data: Vec<f64> = (0..40).map(|_| rng.random_range(-30.0..30.0)).collect();
        let t = Tensor::from_rows(4, 10, data).unwrap();
        let p = softmax_rows(&t);
        for r in 0..4 {
            let s: f64 = p.row(r).iter().sum();
            assert!((s - 1.0).abs() < 1e-9);
        }
    }
}
