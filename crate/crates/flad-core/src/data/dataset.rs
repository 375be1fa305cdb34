//! Feature/label datasets and index-based views.

use std::io::Write;

use crate::nn::Tensor;
use crate::{Error, Result};

/// Labeled dataset with features normalized to `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Tensor,
    labels: Vec<usize>,
    k: usize,
}

impl Dataset {
    pub fn new(features: Tensor, labels: Vec<usize>, k: usize) -> Result<Self> {
        let n = features.rows();
        if labels.len() != n {
            return Err(Error::shape("Dataset::new", format!("{n} labels"), labels.len().to_string()));
        }
        if let Some(&bad) = labels.iter().find(|&&y| y >= k) {
            return Err(Error::InvalidLabel { label: bad, classes: k });
        }
        if features.data().iter().any(|&v| !(0.0..=1.0).contains(&v)) {
            return Err(Error::config("features", "entries must lie in [0, 1]"));
        }
        Ok(Self { features, labels, k })
    }

    pub fn n(&self) -> usize {
        self.features.rows()
    }

    pub fn d_in(&self) -> usize {
        self.features.cols()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn features(&self) -> &Tensor {
        &self.features
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub(crate) fn labels_mut(&mut self) -> &mut [usize] {
        &mut self.labels
    }

    pub(crate) fn features_mut(&mut self) -> &mut Tensor {
        &mut self.features
    }

    pub fn view<'a>(&'a self, indices: &'a [usize]) -> DatasetView<'a> {
        DatasetView { dataset: self, indices }
    }

    /// Materializes the subset selected by `indices` (in the given order).
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        let d = self.d_in();
        let mut data = Vec::with_capacity(indices.len() * d);
        let mut labels = Vec::with_capacity(indices.len());
        for &i in indices {
            data.extend_from_slice(self.features.row(i));
            labels.push(self.labels[i]);
        }
        Dataset {
            features: Tensor::from_rows(indices.len(), d, data).expect("subset shape"),
            labels,
            k: self.k,
        }
    }

    /// Per-class index lists, ordered by first occurrence within each class.
    pub fn indices_by_class(&self) -> Vec<Vec<usize>> {
        let mut by_class = vec![Vec::new(); self.k];
        for (i, &y) in self.labels.iter().enumerate() {
            by_class[y].push(i);
        }
        by_class
    }

    /// CSV with header `label,f0,...,f{d-1}`; floats at 17 significant digits
    /// so repeated runs emit identical bytes.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let d = self.d_in();
        write!(w, "label")?;
        for j in 0..d {
            write!(w, ",f{j}")?;
        }
        writeln!(w)?;
        for i in 0..self.n() {
            write!(w, "{}", self.labels[i])?;
            for v in self.features.row(i) {
                write!(w, ",{v:.16e}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// Borrowed subset of a dataset.
#[derive(Debug, Clone, Copy)]
pub struct DatasetView<'a> {
    dataset: &'a Dataset,
    indices: &'a [usize],
}

impl<'a> DatasetView<'a> {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[usize] {
        self.indices
    }

    pub fn dataset(&self) -> &'a Dataset {
        self.dataset
    }

    /// Gathers the viewed rows into a dense tensor.
    pub fn features_tensor(&self) -> Tensor {
        let d = self.dataset.d_in();
        let mut data = Vec::with_capacity(self.indices.len() * d);
        for &i in self.indices {
            data.extend_from_slice(self.dataset.features.row(i));
        }
        Tensor::from_rows(self.indices.len(), d, data).expect("view shape")
    }

    pub fn labels_vec(&self) -> Vec<usize> {
        self.indices.iter().map(|&i| self.dataset.labels[i]).collect()
    }
}
