//! MNIST IDX format: big-endian loader and fixture writer.
//!
//! Image files carry magic `0x00000803` and dims `[count, rows, cols]`;
//! label files carry magic `0x00000801` and dims `[count]`. Pixels are
//! unsigned bytes scaled to `[0, 1]` by division by 255.

use std::io::Write;
use std::path::Path;

use crate::data::dataset::Dataset;
use crate::nn::Tensor;
use crate::{Error, IdxErrorKind, Result};

pub const IMAGES_MAGIC: u32 = 0x0000_0803;
pub const LABELS_MAGIC: u32 = 0x0000_0801;

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
    path: &'a str,
}

impl<'a> Reader<'a> {
    fn u32(&mut self, field: &'static str) -> Result<u32> {
        let end = self.pos + 4;
        if end > self.bytes.len() {
            return Err(Error::IdxParse {
                path: self.path.to_string(),
                kind: IdxErrorKind::Truncated { field },
            });
        }
        let v = u32::from_be_bytes(self.bytes[self.pos..end].try_into().unwrap());
        self.pos = end;
        Ok(v)
    }

    fn take(&mut self, n: usize, field: &'static str) -> Result<&'a [u8]> {
        let end = self.pos + n;
        if end > self.bytes.len() {
            return Err(Error::IdxParse {
                path: self.path.to_string(),
                kind: IdxErrorKind::Truncated { field },
            });
        }
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }
}

fn check_magic(r: &mut Reader<'_>, expected: u32) -> Result<()> {
    let found = r.u32("magic")?;
    if found != expected {
        return Err(Error::IdxParse {
            path: r.path.to_string(),
            kind: IdxErrorKind::BadMagic { expected, found },
        });
    }
    Ok(())
}

/// Loads an image/label IDX pair into a dataset with `d_in = rows * cols`
/// and `k = max(label) + 1`.
pub fn load_idx(images_path: impl AsRef<Path>, labels_path: impl AsRef<Path>) -> Result<Dataset> {
    let images_path = images_path.as_ref();
    let labels_path = labels_path.as_ref();
    let img_bytes = std::fs::read(images_path)?;
    let lbl_bytes = std::fs::read(labels_path)?;

    let img_path_str = images_path.display().to_string();
    let mut ir = Reader { bytes: &img_bytes, pos: 0, path: &img_path_str };
    check_magic(&mut ir, IMAGES_MAGIC)?;
    let n_img = ir.u32("image count")? as usize;
    let rows = ir.u32("rows")? as usize;
    let cols = ir.u32("cols")? as usize;
    if rows == 0 || cols == 0 {
        return Err(Error::IdxParse {
            path: img_path_str.clone(),
            kind: IdxErrorKind::BadDimension { field: "rows*cols", value: rows * cols },
        });
    }
    let pixels = ir.take(n_img * rows * cols, "pixel data")?;

    let lbl_path_str = labels_path.display().to_string();
    let mut lr = Reader { bytes: &lbl_bytes, pos: 0, path: &lbl_path_str };
    check_magic(&mut lr, LABELS_MAGIC)?;
    let n_lbl = lr.u32("label count")? as usize;
    let raw_labels = lr.take(n_lbl, "label data")?;

    if n_img != n_lbl {
        return Err(Error::IdxCountMismatch { images: n_img, labels: n_lbl });
    }

    let data: Vec<f64> = pixels.iter().map(|&b| b as f64 / 255.0).collect();
    let labels: Vec<usize> = raw_labels.iter().map(|&b| b as usize).collect();
    let k = labels.iter().max().map_or(1, |&m| m + 1);
    Dataset::new(Tensor::from_rows(n_img, rows * cols, data)?, labels, k)
}

/// Writes a dataset as an IDX pair (single-row images of width `d_in`).
/// Pixels are quantized to bytes with `round(v * 255)`, so datasets that came
/// from `load_idx` round-trip exactly.
pub fn write_idx(
    dataset: &Dataset,
    images_path: impl AsRef<Path>,
    labels_path: impl AsRef<Path>,
) -> Result<()> {
    let mut img = Vec::with_capacity(16 + dataset.n() * dataset.d_in());
    img.extend_from_slice(&IMAGES_MAGIC.to_be_bytes());
    img.extend_from_slice(&(dataset.n() as u32).to_be_bytes());
    img.extend_from_slice(&1u32.to_be_bytes());
    img.extend_from_slice(&(dataset.d_in() as u32).to_be_bytes());
    for v in dataset.features().data() {
        img.push((v * 255.0).round() as u8);
    }

    let mut lbl = Vec::with_capacity(8 + dataset.n());
    lbl.extend_from_slice(&LABELS_MAGIC.to_be_bytes());
    lbl.extend_from_slice(&(dataset.n() as u32).to_be_bytes());
    for &y in dataset.labels() {
        lbl.push(y as u8);
    }

    std::fs::File::create(images_path)?.write_all(&img)?;
    std::fs::File::create(labels_path)?.write_all(&lbl)?;
    Ok(())
}
