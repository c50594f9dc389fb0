//! Gaussian kernel density estimation baseline with a diagonal Silverman
//! bandwidth.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, Matrix};
use crate::error::{Error, Result};
use crate::seed::rng_from_seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KdeModel {
    points: Dataset,
    bandwidth: Vec<f64>,
}

impl KdeModel {
    pub fn new(points: Dataset, bandwidth: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::invalid("KDE needs at least one kernel"));
        }
        if bandwidth.len() != points.dim() {
            return Err(Error::Dimension {
                context: "KDE bandwidth",
                expected: points.dim(),
                actual: bandwidth.len(),
            });
        }
        if bandwidth.iter().any(|h| !(*h > 0.0) || !h.is_finite()) {
            return Err(Error::invalid("KDE bandwidths must be positive"));
        }
        Ok(Self { points, bandwidth })
    }

    pub fn points(&self) -> &Dataset {
        &self.points
    }

    pub fn bandwidth(&self) -> &[f64] {
        &self.bandwidth
    }

    pub fn dim(&self) -> usize {
        self.points.dim()
    }
}

/// Silverman's rule per dimension, `h_j = σ_j (4 / ((d + 2) n))^(1 / (d + 4))`,
/// with σ_j the population standard deviation.
pub fn fit_kde(data: &Dataset) -> Result<KdeModel> {
    let n = data.len();
    if n < 2 {
        return Err(Error::invalid(format!(
            "KDE fit needs at least 2 points, got {n}"
        )));
    }
    let d = data.dim() as f64;
    let factor = (4.0 / ((d + 2.0) * n as f64)).powf(1.0 / (d + 4.0));
    let sigma = data.column_std();
    if let Some(j) = sigma.iter().position(|s| *s <= 0.0) {
        return Err(Error::invalid(format!("column {j} has zero variance")));
    }
    KdeModel::new(data.clone(), sigma.iter().map(|s| s * factor).collect())
}

pub fn kde_density(model: &KdeModel, x: &[f64]) -> Result<f64> {
    if x.len() != model.dim() {
        return Err(Error::Dimension {
            context: "KDE evaluation point",
            expected: model.dim(),
            actual: x.len(),
        });
    }
    let h = &model.bandwidth;
    let norm: f64 = h
        .iter()
        .map(|hj| hj * (2.0 * std::f64::consts::PI).sqrt())
        .product();
    let total: f64 = model
        .points
        .iter()
        .map(|p| {
            let q: f64 = p
                .iter()
                .zip(x)
                .zip(h)
                .map(|((pj, xj), hj)| {
                    let u = (xj - pj) / hj;
                    u * u
                })
                .sum();
            (-0.5 * q).exp()
        })
        .sum();
    Ok(total / (norm * model.points.len() as f64))
}

/// Smoothed bootstrap: pick a kernel uniformly, then add N(0, diag(h²)).
pub fn kde_sample(model: &KdeModel, n: usize, seed: u64) -> Dataset {
    let mut rng = rng_from_seed(seed);
    let d = model.dim();
    let mut out = Matrix::zeros(n, d);
    for r in 0..n {
        let k = rng.random_range(0..model.points.len());
        let center = model.points.row(k);
        for (j, v) in out.row_mut(r).iter_mut().enumerate() {
            let z: f64 = rng.sample(StandardNormal);
            *v = center[j] + model.bandwidth[j] * z;
        }
    }
    Dataset::new(model.points.names().to_vec(), out).expect("column count preserved")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_d(points: &[f64]) -> Dataset {
        Dataset::from_rows(&points.iter().map(|p| vec![*p]).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn two_point_bandwidth() {
        let m = fit_kde(&one_d(&[0.0, 1.0])).unwrap();
        let expected = 0.5 * (4.0f64 / 6.0).powf(0.2);
        assert!((m.bandwidth()[0] - expected).abs() < 1e-15);
    }

    #[test]
    fn fit_preconditions() {
        assert!(fit_kde(&one_d(&[3.0])).is_err());
        assert!(fit_kde(&one_d(&[3.0, 3.0, 3.0])).is_err());
    }

    #[test]
    fn standardized_bandwidth() {
        // a ±1 alternating pattern has population σ = 1 in both columns
        let rows: Vec<Vec<f64>> = (0..200)
            .map(|i| {
                let s = if i % 2 == 0 { 1.0 } else { -1.0 };
                let t = if (i / 2) % 2 == 0 { 1.0 } else { -1.0 };
                vec![s, t]
            })
            .collect();
        let m = fit_kde(&Dataset::from_rows(&rows).unwrap()).unwrap();
        let expected = (1.0f64 / 200.0).powf(1.0 / 6.0);
        for h in m.bandwidth() {
            assert!((h - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn single_kernel_peak_and_symmetry() {
        let m = KdeModel::new(one_d(&[2.0]), vec![0.7]).unwrap();
        let peak = kde_density(&m, &[2.0]).unwrap();
        assert!((peak - 1.0 / (0.7 * (2.0 * std::f64::consts::PI).sqrt())).abs() < 1e-15);

        let m = fit_kde(&one_d(&[-1.0, 3.0])).unwrap();
        for t in [0.1, 0.9, 2.5] {
            let a = kde_density(&m, &[1.0 + t]).unwrap();
            let b = kde_density(&m, &[1.0 - t]).unwrap();
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn density_integrates_to_one() {
        let data = Dataset::from_rows(&[
            vec![0.0, 0.0],
            vec![1.0, 2.0],
            vec![-1.5, 0.5],
            vec![2.0, -1.0],
        ])
        .unwrap();
        let m = fit_kde(&data).unwrap();
        // midpoint rule over [-8, 8]^2
        let steps = 320;
        let w = 16.0 / steps as f64;
        let mut total = 0.0;
        for i in 0..steps {
            for j in 0..steps {
                let x = -8.0 + (i as f64 + 0.5) * w;
                let y = -8.0 + (j as f64 + 0.5) * w;
                total += kde_density(&m, &[x, y]).unwrap() * w * w;
            }
        }
        assert!((total - 1.0).abs() < 1e-2, "{total}");
    }

    #[test]
    fn sampling_edges() {
        let m = fit_kde(&one_d(&[0.0, 5.0, 9.0])).unwrap();
        let s = kde_sample(&m, 0, 1);
        assert!(s.is_empty());
        assert_eq!(s.dim(), 1);
        assert_eq!(kde_sample(&m, 10, 4), kde_sample(&m, 10, 4));

        let sharp = KdeModel::new(one_d(&[0.0, 5.0, 9.0]), vec![1e-12]).unwrap();
        for r in kde_sample(&sharp, 50, 3).iter() {
            assert!([0.0, 5.0, 9.0].iter().any(|p| (r[0] - p).abs() < 1e-9));
        }
    }

    #[test]
    fn sample_mean_within_clt_bound() {
        let data = one_d(&[-2.0, 0.5, 1.0, 4.0, 7.5]);
        let m = fit_kde(&data).unwrap();
        let n = 20_000;
        let s = kde_sample(&m, n, 11);
        let mean = s.column_means()[0];
        let target = data.column_means()[0];
        // variance of one smoothed-bootstrap draw is σ² + h²
        let sd = (data.column_std()[0].powi(2) + m.bandwidth()[0].powi(2)).sqrt();
        assert!((mean - target).abs() <= 3.0 * sd / (n as f64).sqrt());
    }

    #[test]
    fn refit_recovers_bandwidth() {
        let rows: Vec<Vec<f64>> = (0..300)
            .map(|i| vec![(i as f64 * 0.37).sin() * 3.0, (i as f64 * 0.11).cos()])
            .collect();
        let m = fit_kde(&Dataset::from_rows(&rows).unwrap()).unwrap();
        let resampled = kde_sample(&m, 300, 5);
        let refit = fit_kde(&resampled).unwrap();
        for (a, b) in m.bandwidth().iter().zip(refit.bandwidth()) {
            assert!((a - b).abs() / a < 0.2);
        }
    }
}
