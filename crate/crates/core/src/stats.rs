//! Binomial and normal utilities behind the statistical upper and lower
//! bounds of the sample average approximation.

use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Standard normal quantile Φ⁻¹(p).
pub fn normal_quantile(p: f64) -> f64 {
    Normal::standard().inverse_cdf(p)
}

/// Binomial cumulative probability `P[X <= k]` for `X ~ Bin(n, p)`.
///
/// Terms are evaluated in log space: the binomial coefficient as a
/// compensated sum of `ln((n-j+1)/j)`, then combined by log-sum-exp.
/// `k < 0` yields 0.
pub fn binomial_cdf(k: i64, p: f64, n: u64) -> f64 {
    if k < 0 {
        return 0.0;
    }
    let k = k as u64;
    if k >= n || p <= 0.0 {
        return 1.0;
    }
    if p >= 1.0 {
        return 0.0;
    }
    let ln_p = p.ln();
    let ln_q = (-p).ln_1p();
    let nf = n as f64;
    let mut log_terms = Vec::with_capacity(k as usize + 1);
    // Neumaier-compensated running ln C(n, i)
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for i in 0..=k {
        if i > 0 {
            let inc = ((nf - i as f64 + 1.0) / i as f64).ln();
            let t = sum + inc;
            if sum.abs() >= inc.abs() {
                comp += (sum - t) + inc;
            } else {
                comp += (inc - t) + sum;
            }
            sum = t;
        }
        let ln_choose = sum + comp;
        log_terms.push(ln_choose + i as f64 * ln_p + (nf - i as f64) * ln_q);
    }
    let max = log_terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return 0.0;
    }
    let total: f64 = log_terms.iter().map(|l| (l - max).exp()).sum();
    (total.ln() + max).exp().min(1.0)
}

/// One-sided upper confidence bound on a violation probability,
/// `q + z_β sqrt(q (1 - q) / n')` with `z_β = Φ⁻¹(1 - β)`.
pub fn upper_confidence(q_hat: f64, n_prime: usize, beta: f64) -> f64 {
    let z = normal_quantile(1.0 - beta);
    q_hat + z * (q_hat * (1.0 - q_hat) / n_prime as f64).sqrt()
}

/// Number of scenarios the SAA problem may violate, `⌊γ N⌋`.
///
/// A 1e-9 slack absorbs representation error, so `0.05 * 200` counts as 10.
pub fn violation_budget(gamma: f64, n: usize) -> usize {
    (gamma * n as f64 + 1e-9).floor().max(0.0) as usize
}

/// Lower-bound order statistic parameters.
///
/// Returns `θ_N = B(⌊γN⌋; α', N)` and the largest `L` in `1..=M` with
/// `B(L-1; θ_N, M) <= β`.
pub fn lower_bound_params(
    gamma: f64,
    n: usize,
    alpha_prime: f64,
    m: usize,
    beta: f64,
) -> Result<(f64, usize)> {
    if n == 0 || m == 0 {
        return Err(Error::invalid("N and M must be at least 1"));
    }
    let theta = binomial_cdf(violation_budget(gamma, n) as i64, alpha_prime, n as u64);
    if binomial_cdf(0, theta, m as u64) > beta {
        return Err(Error::LowerBound(format!(
            "B(0; {theta:.6}, {m}) exceeds beta = {beta}"
        )));
    }
    let mut l = 1;
    while l < m && binomial_cdf(l as i64, theta, m as u64) <= beta {
        l += 1;
    }
    Ok((theta, l))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_edges() {
        assert_eq!(binomial_cdf(5, 0.3, 5), 1.0);
        assert!((binomial_cdf(0, 0.5, 2) - 0.25).abs() < 1e-15);
        assert_eq!(binomial_cdf(-1, 0.5, 2), 0.0);
        assert_eq!(binomial_cdf(0, 0.0, 9), 1.0);
        assert_eq!(binomial_cdf(3, 1.0, 9), 0.0);
    }

    #[test]
    fn binomial_underflowing_terms() {
        // 0.1^500 underflows in linear space
        let v = binomial_cdf(10, 0.9, 500);
        assert!(v >= 0.0 && v < 1e-300);
        assert!((binomial_cdf(499, 0.9, 500) - (1.0 - 0.9f64.powi(500))).abs() < 1e-15);
    }

    #[test]
    fn upper_confidence_examples() {
        assert_eq!(upper_confidence(0.0, 100, 0.05), 0.0);
        assert_eq!(upper_confidence(1.0, 100, 0.05), 1.0);
        // 0.03 + Φ⁻¹(0.95) sqrt(0.03 * 0.97 / 1000), quantile from 40-digit arithmetic
        let u = upper_confidence(0.03, 1000, 0.05);
        assert!((u - 0.038873066804334144).abs() < 1e-9, "{u}");
    }

    #[test]
    fn budget_floors_with_slack() {
        assert_eq!(violation_budget(0.05, 200), 10);
        assert_eq!(violation_budget(0.05, 30), 1);
        assert_eq!(violation_budget(0.0, 30), 0);
        assert_eq!(violation_budget(1.0 / 3.0, 6), 2);
    }

    #[test]
    fn lower_bound_examples() {
        // ⌊γN⌋ = N forces θ = 1, so every B(L-1; 1, M) with L-1 < M is 0
        let (theta, l) = lower_bound_params(1.0, 10, 0.05, 7, 0.05).unwrap();
        assert_eq!(theta, 1.0);
        assert_eq!(l, 7);

        // 1 - θ > β with M = 1
        assert!(matches!(
            lower_bound_params(0.0, 10, 0.05, 1, 0.05),
            Err(Error::LowerBound(_))
        ));

        // exact rational summation gives θ = 0.58306718..., B(7) = 0.0304, B(8) = 0.0768
        let (theta, l) = lower_bound_params(0.05, 200, 0.05, 20, 0.05).unwrap();
        assert!((theta - 0.5830671820811717).abs() < 1e-12);
        assert_eq!(l, 8);
    }
}
