//! Standard normal distribution helpers and a one-sample Kolmogorov–Smirnov
//! test against `N(0, 1)`.
//!
//! The CDF goes through `erfc` so that upper-tail probabilities keep full
//! relative precision far into the tail.

use libm::erfc;
use statrs::function::erf::erfc_inv;
use std::f64::consts::{PI, SQRT_2};

/// `Φ(x)`.
pub fn cdf(x: f64) -> f64 {
    0.5 * erfc(-x / SQRT_2)
}

/// `1 − Φ(x)`, computed without cancellation.
pub fn sf(x: f64) -> f64 {
    0.5 * erfc(x / SQRT_2)
}

/// `Φ⁻¹(p)` for `p ∈ (0, 1)`. Returns `±∞` at the endpoints and NaN outside.
pub fn quantile(p: f64) -> f64 {
    if !(0.0..=1.0).contains(&p) {
        return f64::NAN;
    }
    if p == 0.0 {
        return f64::NEG_INFINITY;
    }
    if p == 1.0 {
        return f64::INFINITY;
    }
    if p > 0.5 {
        return -quantile(1.0 - p);
    }
    let x = -SQRT_2 * erfc_inv(2.0 * p);
    // One Newton step against the accurate CDF.
    let density = (-0.5 * x * x).exp() / (2.0 * PI).sqrt();
    if density > 0.0 {
        x - (cdf(x) - p) / density
    } else {
        x
    }
}

/// Result of a one-sample KS test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsOutcome {
    pub statistic: f64,
    pub p_value: f64,
    pub sample_size: usize,
}

/// Two-sided one-sample KS test of `sample` against the standard normal.
///
/// The p-value uses the Kolmogorov limit law with Stephens' small-sample
/// adjustment `(√N + 0.12 + 0.11/√N)·D`.
pub fn ks_test_standard_normal(sample: &[f64]) -> KsOutcome {
    let mut xs: Vec<f64> = sample.iter().copied().filter(|x| !x.is_nan()).collect();
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n == 0 {
        return KsOutcome {
            statistic: f64::NAN,
            p_value: f64::NAN,
            sample_size: 0,
        };
    }
    let nf = n as f64;
    let d = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            let above = (i + 1) as f64 / nf - f;
            let below = f - i as f64 / nf;
            above.max(below)
        })
        .fold(0.0_f64, f64::max);
    let sqrt_n = nf.sqrt();
    let lambda = (sqrt_n + 0.12 + 0.11 / sqrt_n) * d;
    KsOutcome {
        statistic: d,
        p_value: kolmogorov_sf(lambda),
        sample_size: n,
    }
}

/// Survival function of the Kolmogorov distribution,
/// `Q(λ) = 2 Σ_{k≥1} (−1)^{k−1} exp(−2k²λ²)`.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    // The alternating series is useless for small λ; there the complementary
    // theta-function form converges quickly.
    if lambda < 1.0 {
        let t = std::f64::consts::PI.powi(2) / (8.0 * lambda * lambda);
        let mut s = 0.0;
        for k in 0..50 {
            let j = (2 * k + 1) as f64;
            s += (-j * j * t).exp();
        }
        let cdf = (2.0 * std::f64::consts::PI).sqrt() / lambda * s;
        return (1.0 - cdf).clamp(0.0, 1.0);
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-18 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cdf_reference_values() {
        assert!((cdf(0.0) - 0.5).abs() < 1e-15);
        // Φ(1.959963984540054) = 0.975
        assert!((cdf(1.959963984540054) - 0.975).abs() < 1e-13);
        assert!((sf(1.6448536269514722) - 0.05).abs() < 1e-13);
        // Deep tail keeps relative precision: 1 − Φ(10) ≈ 7.6198530241605e-24.
        assert!((sf(10.0) / 7.619853024160527e-24 - 1.0).abs() < 1e-10);
    }

    #[test]
    fn quantile_inverts_cdf() {
        for &p in &[1e-10, 0.01, 0.05, 0.3, 0.5, 0.8, 0.95, 0.999] {
            assert!((cdf(quantile(p)) - p).abs() < 1e-12 * p.max(1e-3), "p = {p}");
        }
        assert_eq!(quantile(0.0), f64::NEG_INFINITY);
        assert!(quantile(1.5).is_nan());
    }

    #[test]
    fn kolmogorov_branches_agree() {
        // Both series are valid around λ = 1; they must agree there.
        let lo = {
            let lambda: f64 = 1.0;
            let t = std::f64::consts::PI.powi(2) / (8.0 * lambda * lambda);
            let s: f64 = (0..50).map(|k| (-((2 * k + 1) as f64).powi(2) * t).exp()).sum();
            1.0 - (2.0 * std::f64::consts::PI).sqrt() / lambda * s
        };
        assert!((lo - kolmogorov_sf(1.0)).abs() < 1e-12);
        // Q(1.358) ≈ 0.05, Q(1.628) ≈ 0.01.
        assert!((kolmogorov_sf(1.3581) - 0.05).abs() < 1e-3);
        assert!((kolmogorov_sf(1.6276) - 0.01).abs() < 1e-3);
    }

    #[test]
    fn ks_rejects_shifted_sample() {
        let grid: Vec<f64> = (1..1000).map(|i| quantile(i as f64 / 1000.0)).collect();
        assert!(ks_test_standard_normal(&grid).p_value > 0.99);
        let shifted: Vec<f64> = grid.iter().map(|x| x + 0.5).collect();
        assert!(ks_test_standard_normal(&shifted).p_value < 1e-6);
    }
}
