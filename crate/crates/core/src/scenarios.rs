//! Synthetic data generators for the bundled experiments.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, Matrix};
use crate::error::{Error, Result};
use crate::saa::{CcpSpec, ChanceRow};
use crate::seed::rng_from_seed;

/// Axis-aligned Gaussian mixture component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub weight: f64,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mixture {
    pub components: Vec<Component>,
}

impl Mixture {
    pub fn dim(&self) -> usize {
        self.components.first().map_or(0, |c| c.mean.len())
    }

    pub fn sample(&self, n: usize, seed: u64) -> Result<Dataset> {
        let d = self.dim();
        if d == 0
            || self
                .components
                .iter()
                .any(|c| c.mean.len() != d || c.std.len() != d)
        {
            return Err(Error::invalid(
                "mixture components must share a positive dimension",
            ));
        }
        let total: f64 = self.components.iter().map(|c| c.weight).sum();
        if !(total > 0.0) || self.components.iter().any(|c| c.weight < 0.0) {
            return Err(Error::invalid(
                "mixture weights must be non-negative with positive sum",
            ));
        }
        let mut rng = rng_from_seed(seed);
        let mut out = Matrix::zeros(n, d);
        for r in 0..n {
            let mut u = rng.random::<f64>() * total;
            let mut pick = self.components.len() - 1;
            for (i, c) in self.components.iter().enumerate() {
                if u < c.weight {
                    pick = i;
                    break;
                }
                u -= c.weight;
            }
            let c = &self.components[pick];
            for (j, v) in out.row_mut(r).iter_mut().enumerate() {
                let z: f64 = rng.sample(StandardNormal);
                *v = c.mean[j] + c.std[j] * z;
            }
        }
        Ok(Dataset::from_matrix(out))
    }

    pub fn density(&self, x: &[f64]) -> f64 {
        let total: f64 = self.components.iter().map(|c| c.weight).sum();
        self.components
            .iter()
            .map(|c| {
                let mut p = c.weight / total;
                for ((xj, m), s) in x.iter().zip(&c.mean).zip(&c.std) {
                    let u = (xj - m) / s;
                    p *= (-0.5 * u * u).exp() / (s * (2.0 * std::f64::consts::PI).sqrt());
                }
                p
            })
            .sum()
    }
}

fn isotropic(weight: f64, mean: &[f64], std: f64) -> Component {
    Component {
        weight,
        mean: mean.to_vec(),
        std: vec![std; mean.len()],
    }
}

/// Lower and upper corners of the square masked out of the missing-data
/// experiment.
pub const MASK_LOWER: [f64; 2] = [6.0, 6.0];
pub const MASK_UPPER: [f64; 2] = [8.0, 8.0];

/// Two-dimensional target of the missing-data experiment: two large clusters
/// on the diagonal and a small one centred in the masked square, which holds
/// roughly a tenth of the mass.
pub fn missing_data_mixture() -> Mixture {
    Mixture {
        components: vec![
            isotropic(0.4, &[4.0, 4.0], 0.9),
            isotropic(0.4, &[10.0, 10.0], 0.9),
            isotropic(0.13, &[7.0, 7.0], 0.6),
        ],
    }
}

pub fn inside_mask(row: &[f64]) -> bool {
    row.iter()
        .zip(MASK_LOWER.iter().zip(&MASK_UPPER))
        .all(|(v, (lo, hi))| v >= lo && v <= hi)
}

/// Three-dimensional uncertainty behind the motivating example. Values are
/// positive with overwhelming probability.
pub fn motivating_mixture() -> Mixture {
    Mixture {
        components: vec![
            Component {
                weight: 0.5,
                mean: vec![2.5, 3.0, 3.5],
                std: vec![0.5, 0.6, 0.5],
            },
            Component {
                weight: 0.5,
                mean: vec![4.0, 3.5, 2.5],
                std: vec![0.6, 0.5, 0.5],
            },
        ],
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveSense {
    /// `min x1 + x2 + x3` as stated; the optimum is `x = 0`.
    #[default]
    Minimize,
    /// `max x1 + x2 + x3`, solved as `min -(x1 + x2 + x3)`.
    Maximize,
}

/// The three-variable joint chance constrained program
/// `x1 + x2 + ζ1 <= 10`, `x2 + x3 + ζ2 <= 11`, `x1 + x3 + ζ3 <= 12`,
/// `x >= 0`, with `alpha = d = 0.1`. Each `x` is boxed at 12 so the
/// bound-based big-M stays finite.
pub fn motivating_spec(sense: ObjectiveSense) -> CcpSpec {
    let sign = match sense {
        ObjectiveSense::Minimize => 1.0,
        ObjectiveSense::Maximize => -1.0,
    };
    let row = |a: [f64; 3], k: usize, c: f64| {
        let mut b = vec![0.0; 3];
        b[k] = 1.0;
        ChanceRow {
            a: a.to_vec(),
            b,
            c,
        }
    };
    CcpSpec {
        lower: vec![0.0; 3],
        upper: vec![12.0; 3],
        cost: vec![sign; 3],
        chance_rows: vec![
            row([1.0, 1.0, 0.0], 0, 10.0),
            row([0.0, 1.0, 1.0], 1, 11.0),
            row([1.0, 0.0, 1.0], 2, 12.0),
        ],
        deterministic_rows: Vec::new(),
        alpha: 0.1,
        d: 0.1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mixture_sampling_is_seeded() {
        let m = missing_data_mixture();
        let a = m.sample(50, 4).unwrap();
        assert_eq!(a, m.sample(50, 4).unwrap());
        assert_ne!(a, m.sample(50, 5).unwrap());
        assert_eq!(a.dim(), 2);
    }

    #[test]
    fn mask_holds_about_a_tenth() {
        let d = missing_data_mixture().sample(20_000, 1).unwrap();
        let f = d.fraction_inside(&MASK_LOWER, &MASK_UPPER);
        assert!((0.08..0.16).contains(&f), "{f}");
        assert!(inside_mask(&[7.0, 6.0]));
        assert!(!inside_mask(&[7.0, 8.5]));
    }

    #[test]
    fn motivating_data_is_positive() {
        let d = motivating_mixture().sample(5000, 2).unwrap();
        assert!(d.iter().flatten().all(|v| *v > 0.0));
    }

    #[test]
    fn motivating_spec_signs() {
        let s = motivating_spec(ObjectiveSense::Maximize);
        s.validate().unwrap();
        assert_eq!(s.cost, vec![-1.0; 3]);
        assert!(!s.violated(&[5.0, 5.0, 5.0], &[0.0, 0.0, 0.0]));
        assert!(s.violated(&[5.0, 5.0, 5.0], &[0.5, 0.0, 0.0]));
    }

    #[test]
    fn density_integrates_on_grid() {
        let m = missing_data_mixture();
        let h = 0.05;
        let mut total = 0.0;
        for i in 0..360 {
            for j in 0..360 {
                total += m.density(&[-2.0 + h * i as f64, -2.0 + h * j as f64]) * h * h;
            }
        }
        assert!((total - 1.0).abs() < 1e-3, "{total}");
    }
}
