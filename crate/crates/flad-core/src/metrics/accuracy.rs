//! Classification accuracy and evaluation loss.

use crate::data::DatasetView;
use crate::nn::{class_loss, Model};
use crate::{Error, Result};

/// Fraction of correctly classified samples; argmax over the model output
/// with ties broken toward the lowest class index.
pub fn accuracy(model: &Model, data: &DatasetView<'_>) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::EmptyData("accuracy"));
    }
    let out = model.forward(&data.features_tensor())?;
    let labels = data.labels_vec();
    let mut correct = 0usize;
    for (r, &y) in labels.iter().enumerate() {
        let row = out.row(r);
        let mut best = 0usize;
        for (j, &v) in row.iter().enumerate() {
            if v > row[best] {
                best = j;
            }
        }
        if best == y {
            correct += 1;
        }
    }
    Ok(correct as f64 / labels.len() as f64)
}

/// Classifier loss on a data view (cross-entropy for softmax heads).
pub fn eval_loss(model: &Model, data: &DatasetView<'_>) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::EmptyData("eval_loss"));
    }
    class_loss(model, &data.features_tensor(), &data.labels_vec())
}
