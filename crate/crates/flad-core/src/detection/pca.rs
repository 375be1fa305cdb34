//! PCA baseline detector: power iteration with deflation on the covariance.

use rand::Rng;

use crate::data::{Dataset, DatasetView};
use crate::seeds;
use crate::{Error, Result};

const POWER_TOL: f64 = 1e-9;
const POWER_MAX_ITERS: usize = 1000;
/// Eigenvalues below this fraction of the leading one count as rank deficiency.
const RANK_EPS: f64 = 1e-12;

/// Principal subspace of clean data: column means plus `r` orthonormal
/// components (rows), ordered by explained variance.
#[derive(Debug, Clone)]
pub struct PcaModel {
    pub mean: Vec<f64>,
    pub components: Vec<Vec<f64>>,
    pub eigenvalues: Vec<f64>,
    /// Set when the data could not support the requested rank; fewer
    /// components are returned in that case.
    pub rank_deficient: bool,
}

fn covariance(data: &Dataset) -> (Vec<f64>, Vec<f64>) {
    let (n, d) = (data.n(), data.d_in());
    let x = data.features();
    let mut mean = vec![0.0; d];
    for i in 0..n {
        for (m, v) in mean.iter_mut().zip(x.row(i)) {
            *m += v;
        }
    }
    for m in &mut mean {
        *m /= n as f64;
    }
    let mut cov = vec![0.0; d * d];
    for i in 0..n {
        let row = x.row(i);
        for a in 0..d {
            let da = row[a] - mean[a];
            for b in a..d {
                cov[a * d + b] += da * (row[b] - mean[b]);
            }
        }
    }
    for a in 0..d {
        for b in a..d {
            let v = cov[a * d + b] / n as f64;
            cov[a * d + b] = v;
            cov[b * d + a] = v;
        }
    }
    (mean, cov)
}

fn mat_vec(m: &[f64], v: &[f64], d: usize) -> Vec<f64> {
    (0..d).map(|r| m[r * d..(r + 1) * d].iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn orthogonalize(v: &mut [f64], basis: &[Vec<f64>]) {
    for b in basis {
        let dot: f64 = v.iter().zip(b).map(|(a, c)| a * c).sum();
        for (x, c) in v.iter_mut().zip(b) {
            *x -= dot * c;
        }
    }
}

/// Fits the top-`r` principal components of the centered data by seeded power
/// iteration with deflation. Zero-variance directions terminate the fit early
/// with `rank_deficient` set.
pub fn pca_fit(clean: &Dataset, r: usize) -> Result<PcaModel> {
    let (n, d) = (clean.n(), clean.d_in());
    if n < 2 {
        return Err(Error::InsufficientData { context: "pca_fit", needed: 2, available: n });
    }
    if r > d.min(n) {
        return Err(Error::config("r", format!("rank {r} exceeds min(n, d_in) = {}", d.min(n))));
    }
    let (mean, mut cov) = covariance(clean);
    let trace: f64 = (0..d).map(|i| cov[i * d + i]).sum();
    let mut components: Vec<Vec<f64>> = Vec::with_capacity(r);
    let mut eigenvalues = Vec::with_capacity(r);
    let mut rank_deficient = false;
    for comp in 0..r {
        let mut rng = seeds::rng(0x9ca, &[seeds::stream::PCA, comp as u64]);
        let mut v: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
        orthogonalize(&mut v, &components);
        let nv = norm(&v);
        if nv == 0.0 {
            rank_deficient = true;
            break;
        }
        for x in &mut v {
            *x /= nv;
        }
        let mut converged = false;
        for _ in 0..POWER_MAX_ITERS {
            let mut next = mat_vec(&cov, &v, d);
            orthogonalize(&mut next, &components);
            let nn = norm(&next);
            if nn <= RANK_EPS * trace.max(1.0) {
                // Remaining variance is numerically zero.
                converged = false;
                break;
            }
            for x in &mut next {
                *x /= nn;
            }
            // Sign-align with the previous iterate before measuring movement.
            let dot: f64 = next.iter().zip(&v).map(|(a, b)| a * b).sum();
            if dot < 0.0 {
                for x in &mut next {
                    *x = -*x;
                }
            }
            let delta = next.iter().zip(&v).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            v = next;
            if delta < POWER_TOL {
                converged = true;
                break;
            }
        }
        let cv = mat_vec(&cov, &v, d);
        let lambda: f64 = v.iter().zip(&cv).map(|(a, b)| a * b).sum();
        if !converged && lambda <= RANK_EPS * trace.max(1.0) {
            rank_deficient = true;
            break;
        }
        // Deflate: cov -= lambda v v^T.
        for a in 0..d {
            for b in 0..d {
                cov[a * d + b] -= lambda * v[a] * v[b];
            }
        }
        components.push(v);
        eigenvalues.push(lambda.max(0.0));
    }
    Ok(PcaModel { mean, components, eigenvalues, rank_deficient })
}

/// Mean squared residual norm after projecting the centered rows onto the
/// retained components and back.
pub fn pca_score(model: &PcaModel, data: &DatasetView<'_>) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::EmptyData("pca_score"));
    }
    let d = model.mean.len();
    let x = data.features_tensor();
    x.expect_cols(d, "pca_score")?;
    let n = x.rows();
    let mut total = 0.0;
    for i in 0..n {
        let centered: Vec<f64> = x.row(i).iter().zip(&model.mean).map(|(v, m)| v - m).collect();
        let mut residual = centered.clone();
        for comp in &model.components {
            let dot: f64 = centered.iter().zip(comp).map(|(a, b)| a * b).sum();
            for (r, c) in residual.iter_mut().zip(comp) {
                *r -= dot * c;
            }
        }
        total += residual.iter().map(|v| v * v).sum::<f64>();
    }
    Ok(total / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::gen_synthetic;
    use crate::nn::Tensor;

    fn dataset_from_rows(rows: Vec<Vec<f64>>) -> Dataset {
        let n = rows.len();
        let d = rows[0].len();
        let data: Vec<f64> = rows.into_iter().flatten().collect();
        Dataset::new(Tensor::from_rows(n, d, data).unwrap(), vec![0; n], 1).unwrap()
    }

    #[test]
    fn line_in_2d_recovers_the_line_direction() {
        // Points on the diagonal y = x.
        let rows: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64 / 10.0, i as f64 / 10.0]).collect();
        let ds = dataset_from_rows(rows);
        let model = pca_fit(&ds, 1).unwrap();
        assert_eq!(model.components.len(), 1);
        let c = &model.components[0];
        let cosine = (c[0] + c[1]) / 2.0f64.sqrt();
        assert!(cosine.abs() > 0.999, "cosine = {cosine}");
    }

    #[test]
    fn full_rank_model_reconstructs_isotropic_data() {
        let ds = gen_synthetic(2, 30, 4, 0.5, 0.2, 8).unwrap();
        let model = pca_fit(&ds, 4).unwrap();
        let all: Vec<usize> = (0..ds.n()).collect();
        let res = pca_score(&model, &ds.view(&all)).unwrap();
        assert!(res < 1e-10, "residual = {res}");
    }

    #[test]
    fn components_are_orthonormal() {
        let ds = gen_synthetic(3, 40, 6, 0.6, 0.2, 9).unwrap();
        let model = pca_fit(&ds, 4).unwrap();
        for (i, a) in model.components.iter().enumerate() {
            for (j, b) in model.components.iter().enumerate() {
                let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((dot - expected).abs() < 1e-8, "<c{i}, c{j}> = {dot}");
            }
        }
    }

    #[test]
    fn explained_variance_matches_jacobi_eigensolver_oracle() {
        let ds = gen_synthetic(2, 25, 8, 0.7, 0.15, 10).unwrap();
        let model = pca_fit(&ds, 3).unwrap();
        let (_, cov) = covariance(&ds);
        let mut eig = jacobi_eigenvalues(&cov, 8);
        eig.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for (got, want) in model.eigenvalues.iter().zip(&eig) {
            assert!((got - want).abs() < 1e-6, "eigenvalue {got} vs oracle {want}");
        }
    }

    #[test]
    fn zero_variance_data_is_rank_deficient() {
        let rows = vec![vec![0.5, 0.5]; 6];
        let ds = dataset_from_rows(rows);
        let model = pca_fit(&ds, 2).unwrap();
        assert!(model.rank_deficient);
        assert!(model.components.len() < 2);
    }

    #[test]
    fn residual_decreases_with_rank_and_data_at_mean_scores_zero() {
        let ds = gen_synthetic(2, 30, 5, 0.5, 0.2, 11).unwrap();
        let all: Vec<usize> = (0..ds.n()).collect();
        let mut prev = f64::INFINITY;
        for r in 1..=5 {
            let model = pca_fit(&ds, r).unwrap();
            let res = pca_score(&model, &ds.view(&all)).unwrap();
            assert!(res >= -1e-12);
            assert!(res <= prev + 1e-12, "residual must not grow with rank");
            prev = res;
        }
        // A dataset equal to the mean everywhere scores 0 residual.
        let model = pca_fit(&ds, 2).unwrap();
        let mean_rows = vec![model.mean.clone(); 3];
        let mean_ds = dataset_from_rows(mean_rows);
        let idx = [0usize, 1, 2];
        assert!(pca_score(&model, &mean_ds.view(&idx)).unwrap() < 1e-24);
    }

    #[test]
    fn rank_one_model_sees_exactly_the_off_subspace_offset() {
        // Data spread along e0 with a constant offset eps along e1.
        // The top component is e0, so each residual is exactly eps^2 ... except
        // centering removes a constant offset, so alternate the sign instead.
        let eps = 0.05;
        let rows: Vec<Vec<f64>> = (0..10)
            .map(|i| vec![0.4 + 0.4 * ((i % 5) as f64 / 10.0), 0.5 + if i % 2 == 0 { eps } else { -eps }])
            .collect();
        let ds = dataset_from_rows(rows);
        let model = pca_fit(&ds, 1).unwrap();
        let all: Vec<usize> = (0..10).collect();
        let res = pca_score(&model, &ds.view(&all)).unwrap();
        assert!((res - eps * eps).abs() < 1e-4, "residual {res} vs {}", eps * eps);
    }

    /// Cyclic Jacobi eigenvalue iteration — the independent oracle for the
    /// power-iteration implementation.
    fn jacobi_eigenvalues(cov: &[f64], d: usize) -> Vec<f64> {
        let mut a = cov.to_vec();
        for _sweep in 0..100 {
            let mut off = 0.0;
            for p in 0..d {
                for q in (p + 1)..d {
                    off += a[p * d + q] * a[p * d + q];
                }
            }
            if off < 1e-24 {
                break;
            }
            for p in 0..d {
                for q in (p + 1)..d {
                    let apq = a[p * d + q];
                    if apq.abs() < 1e-30 {
                        continue;
                    }
                    let app = a[p * d + p];
                    let aqq = a[q * d + q];
                    let theta = 0.5 * (aqq - app) / apq;
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..d {
                        let akp = a[k * d + p];
                        let akq = a[k * d + q];
                        a[k * d + p] = c * akp - s * akq;
                        a[k * d + q] = s * akp + c * akq;
                    }
                    for k in 0..d {
                        let apk = a[p * d + k];
                        let aqk = a[q * d + k];
                        a[p * d + k] = c * apk - s * aqk;
                        a[q * d + k] = s * apk + c * aqk;
                    }
                }
            }
        }
        (0..d).map(|i| a[i * d + i]).collect()
    }
}
