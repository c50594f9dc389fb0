//! φ-divergence ambiguity sets and the reduced risk level that turns a
//! distributionally robust chance constraint into an ordinary one.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum DivergenceKind {
    /// g(x) = |x - 1|
    #[default]
    Variation,
}

impl DivergenceKind {
    fn g(self, x: f64) -> f64 {
        match self {
            DivergenceKind::Variation => (x - 1.0).abs(),
        }
    }

    /// lim_{p -> inf} g(p) / p, the weight of mass where f0 vanishes.
    fn recession_slope(self) -> f64 {
        match self {
            DivergenceKind::Variation => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmbiguityParams {
    pub alpha: f64,
    pub d: f64,
    #[serde(default)]
    pub divergence_kind: DivergenceKind,
}

impl AmbiguityParams {
    pub fn new(alpha: f64, d: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::invalid(format!(
                "risk level alpha must lie in (0,1), got {alpha}"
            )));
        }
        if !(d >= 0.0 && d.is_finite()) {
            return Err(Error::invalid(format!(
                "divergence radius d must be >= 0, got {d}"
            )));
        }
        Ok(Self {
            alpha,
            d,
            divergence_kind: DivergenceKind::Variation,
        })
    }
}

/// Discrete φ-divergence `Σ g(f_i / f0_i) f0_i`, using the limit conventions
/// for cells where `f0_i = 0`.
pub fn phi_divergence(f: &[f64], f0: &[f64], kind: DivergenceKind) -> Result<f64> {
    if f.len() != f0.len() {
        return Err(Error::Dimension {
            context: "phi_divergence densities",
            expected: f0.len(),
            actual: f.len(),
        });
    }
    for (name, v) in [("f", f), ("f0", f0)] {
        if v.iter().any(|p| !(*p >= 0.0) || !p.is_finite()) {
            return Err(Error::invalid(format!(
                "{name} has negative or non-finite entries"
            )));
        }
        let total: f64 = v.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(format!(
                "{name} sums to {total}, expected 1"
            )));
        }
    }
    Ok(f.iter()
        .zip(f0)
        .map(|(&p, &q)| {
            if q > 0.0 {
                kind.g(p / q) * q
            } else if p > 0.0 {
                p * kind.recession_slope()
            } else {
                0.0
            }
        })
        .sum())
}

/// Closed-form modified risk level `max{0, alpha - d/2}` for the variation
/// distance.
pub fn modified_risk(params: &AmbiguityParams) -> f64 {
    match params.divergence_kind {
        DivergenceKind::Variation => (params.alpha - params.d / 2.0).max(0.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn divergence_examples() {
        let v = DivergenceKind::Variation;
        assert_eq!(phi_divergence(&[0.3, 0.7], &[0.3, 0.7], v).unwrap(), 0.0);
        assert_eq!(phi_divergence(&[1.0, 0.0], &[0.5, 0.5], v).unwrap(), 1.0);
        assert_eq!(phi_divergence(&[1.0, 0.0], &[0.0, 1.0], v).unwrap(), 2.0);
        assert_eq!(phi_divergence(&[0.0, 1.0], &[0.0, 1.0], v).unwrap(), 0.0);
    }

    #[test]
    fn divergence_rejects_bad_densities() {
        let v = DivergenceKind::Variation;
        assert!(phi_divergence(&[0.5, 0.6], &[0.5, 0.5], v).is_err());
        assert!(phi_divergence(&[-0.5, 1.5], &[0.5, 0.5], v).is_err());
        assert!(phi_divergence(&[1.0], &[0.5, 0.5], v).is_err());
    }

    #[test]
    fn modified_risk_examples() {
        let r = |a, d| modified_risk(&AmbiguityParams::new(a, d).unwrap());
        assert_eq!(r(0.10, 0.10), 0.05);
        assert_eq!(r(0.07, 0.0), 0.07);
        assert_eq!(r(0.05, 0.2), 0.0);
    }

    #[test]
    fn params_validate_ranges() {
        assert!(AmbiguityParams::new(0.0, 0.1).is_err());
        assert!(AmbiguityParams::new(1.0, 0.1).is_err());
        assert!(AmbiguityParams::new(0.1, -0.1).is_err());
    }

    fn density(len: usize) -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(0.0f64..1.0, len).prop_filter_map("non-zero mass", |w| {
            let s: f64 = w.iter().sum();
            (s > 1e-3).then(|| w.iter().map(|x| x / s).collect())
        })
    }

    proptest! {
        #[test]
        fn variation_divergence_is_l1_distance((f, f0) in (1usize..8).prop_flat_map(|n| (density(n), density(n)))) {
            let phi = phi_divergence(&f, &f0, DivergenceKind::Variation).unwrap();
            let l1: f64 = f.iter().zip(&f0).map(|(a, b)| (a - b).abs()).sum();
            prop_assert!((phi - l1).abs() < 1e-12);
            prop_assert!(phi_divergence(&f, &f, DivergenceKind::Variation).unwrap().abs() < 1e-12);
        }

        #[test]
        fn modified_risk_is_monotone(a1 in 0.001f64..0.999, a2 in 0.001f64..0.999, d1 in 0.0f64..2.0, d2 in 0.0f64..2.0) {
            let r = |a, d| modified_risk(&AmbiguityParams::new(a, d).unwrap());
            let (alo, ahi) = if a1 <= a2 { (a1, a2) } else { (a2, a1) };
            let (dlo, dhi) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
            prop_assert!(r(alo, d1) <= r(ahi, d1));
            prop_assert!(r(a1, dhi) <= r(a1, dlo));
            prop_assert!(r(a1, d1) <= a1);
            prop_assert!(r(a1, d1) >= 0.0);
        }
    }
}
