//! Null laws, standardisation and the accept/reject rule.
//!
//! Every statistic is standardised as
//!
//! ```text
//! z = (scale · (raw − centering) − mean) / sqrt(variance)
//! ```
//!
//! with `scale` equal to `p` or `n` depending on the law. All four tests
//! reject in the upper tail: each raw statistic estimates a discrepancy that
//! is zero exactly when `Σ = I`, so departures inflate it. The limit ratio
//! `y` is replaced by `y_n = p/n` throughout.
//!
//! | statistic    | scale | centering                      | mean                       | variance          |
//! |--------------|-------|--------------------------------|----------------------------|-------------------|
//! | new CLRT     | p     | `1 + (1/y_n − 1) log(1 − y_n)` | `y(Δ/2 − 1) − 3/2 log(1−y)` | `−2y − 2 log(1−y)` |
//! | legacy CLRT  | p     | same                           | `−log(1−y)/2`              | same              |
//! | new LW       | p     | 0                              | 0                          | `4y²`             |
//! | legacy LW    | n     | 0                              | 1                          | 4                 |

use crate::covstats::{
    classic_covariance, clrt_statistic, legacy_lw_statistic, lw_finite_centering, lw_statistic,
    simplified_covariance, DataMatrix, StatisticKind, StatisticValue,
};
use crate::error::{Error, Result};
use crate::normal;
use serde::{Deserialize, Serialize};

/// Which dimension multiplies the centred statistic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scale {
    /// Multiply by `p`.
    Dimension,
    /// Multiply by `n`.
    SampleSize,
}

/// Asymptotic normal law of `scale · (raw − centering)` under `H0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NullLaw {
    pub centering: f64,
    pub scale: Scale,
    pub mean: f64,
    pub variance: f64,
}

impl NullLaw {
    fn new(centering: f64, scale: Scale, mean: f64, variance: f64) -> Result<Self> {
        if !(variance > 0.0 && variance.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "null variance must be positive, got {variance}"
            )));
        }
        Ok(Self {
            centering,
            scale,
            mean,
            variance,
        })
    }

    pub fn scale_factor(&self, p: usize, n: usize) -> f64 {
        match self.scale {
            Scale::Dimension => p as f64,
            Scale::SampleSize => n as f64,
        }
    }

    /// Standardised score of a raw statistic.
    pub fn z_score(&self, raw: f64, p: usize, n: usize) -> f64 {
        (self.scale_factor(p, n) * (raw - self.centering) - self.mean) / self.variance.sqrt()
    }
}

fn check_unit_ratio(y: f64) -> Result<()> {
    if y > 0.0 && y < 1.0 {
        Ok(())
    } else {
        Err(Error::DegenerateRatio { y, range: "(0, 1)" })
    }
}

/// `1 + (1/y − 1) log(1 − y)`: the integral of `x − log x − 1` against the
/// Marchenko–Pastur law with ratio `y`.
pub fn clrt_centering(y: f64) -> Result<f64> {
    check_unit_ratio(y)?;
    // (1/y − 1) log(1 − y) = (1 − y)·log1p(−y)/y; stays accurate as y → 0.
    Ok(1.0 + (1.0 - y) * (-y).ln_1p() / y)
}

/// `−2y − 2 log(1 − y)`, shared by both CLRT laws.
pub fn clrt_variance(y: f64) -> Result<f64> {
    check_unit_ratio(y)?;
    Ok(-2.0 * y - 2.0 * (-y).ln_1p())
}

/// Law of `p(L_n − centering)` for the mean-centred CLRT:
/// `N(y(Δ/2 − 1) − 3/2·log(1−y), −2y − 2 log(1−y))`.
pub fn new_clrt_null(y: f64, delta: f64) -> Result<NullLaw> {
    check_unit_ratio(y)?;
    let mean = y * (delta / 2.0 - 1.0) - 1.5 * (-y).ln_1p();
    NullLaw::new(clrt_centering(y)?, Scale::Dimension, mean, clrt_variance(y)?)
}

/// Law of `p(L̂_n − centering)` for the known-mean Gaussian CLRT:
/// `N(−log(1−y)/2, −2y − 2 log(1−y))`.
pub fn legacy_clrt_null(y: f64) -> Result<NullLaw> {
    check_unit_ratio(y)?;
    let mean = -0.5 * (-y).ln_1p();
    NullLaw::new(clrt_centering(y)?, Scale::Dimension, mean, clrt_variance(y)?)
}

/// Law of `p·W_n`: `N(0, 4y²)`, valid for every `y > 0`.
pub fn new_lw_null(y: f64) -> Result<NullLaw> {
    if !(y > 0.0 && y.is_finite()) {
        return Err(Error::DegenerateRatio { y, range: "(0, ∞)" });
    }
    NullLaw::new(0.0, Scale::Dimension, 0.0, 4.0 * y * y)
}

/// Law of `n·Ŵ_n` for Gaussian data: `N(1, 4)`.
pub fn legacy_lw_gaussian_null(n: usize) -> Result<NullLaw> {
    if n < 3 {
        return Err(Error::TooFewObservations { n, min: 3 });
    }
    NullLaw::new(0.0, Scale::SampleSize, 1.0, 4.0)
}

/// Law of `p·Ŵ_n` under a general entry distribution: `N(y(1+Δ), 4y²)`.
///
/// With `Δ = 0` this gives exactly the same z-score as
/// [`legacy_lw_gaussian_null`] once `y = p/n`.
pub fn legacy_lw_general_null(y: f64, delta: f64) -> Result<NullLaw> {
    if !(y > 0.0 && y.is_finite()) {
        return Err(Error::DegenerateRatio { y, range: "(0, ∞)" });
    }
    NullLaw::new(0.0, Scale::Dimension, y * (1.0 + delta), 4.0 * y * y)
}

/// Law of `p(Ŵ_n − ((n−2)(n−1)−2)/(n(n−1)²))` for Gaussian data: `N(0, 4y²)`.
pub fn legacy_lw_centered_null(y: f64, n: usize) -> Result<NullLaw> {
    if n < 3 {
        return Err(Error::TooFewObservations { n, min: 3 });
    }
    let mut law = new_lw_null(y)?;
    law.centering = lw_finite_centering(n);
    Ok(law)
}

/// Asymptotic rejection rate of the Gaussian legacy LW test on data with
/// excess kurtosis `Δ`: there `(nŴ_n − 1)/2 → N(Δ/2, 1)`, so the realised
/// size is `P(Z > Φ⁻¹(1 − α))` with `Z ~ N(Δ/2, 1)`.
pub fn legacy_lw_missize(delta: f64, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if delta == 0.0 {
        return Ok(alpha);
    }
    Ok(normal::sf(normal::quantile(1.0 - alpha) - delta / 2.0))
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("alpha must lie in (0, 1), got {alpha}")))
    }
}

/// The null law `run_test` uses for each statistic kind.
///
/// The legacy tests ignore `delta`: they are the Gaussian procedures and are
/// kept that way so their behaviour on non-Gaussian data can be studied.
pub fn null_law_for(kind: StatisticKind, p: usize, n: usize, delta: f64) -> Result<NullLaw> {
    let y = p as f64 / n as f64;
    match kind {
        StatisticKind::NewClrt => new_clrt_null(y, delta),
        StatisticKind::LegacyClrt => legacy_clrt_null(y),
        StatisticKind::NewLw => new_lw_null(y),
        StatisticKind::LegacyLw => legacy_lw_gaussian_null(n),
    }
}

/// `(p, n, y_n, Δ)` used to produce a report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestContext {
    pub p: usize,
    pub n: usize,
    pub y_n: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub statistic: StatisticValue,
    pub law: NullLaw,
    pub z_score: f64,
    /// One-sided upper tail, `1 − Φ(z)`.
    pub p_value: f64,
    pub reject: bool,
    pub alpha: f64,
    pub context: TestContext,
}

/// Standardises an already computed statistic and applies the decision rule.
pub fn decide(statistic: StatisticValue, alpha: f64, delta: f64) -> Result<TestReport> {
    check_alpha(alpha)?;
    let (p, n) = (statistic.p, statistic.n);
    let law = null_law_for(statistic.kind, p, n, delta)?;
    let z_score = law.z_score(statistic.raw, p, n);
    let p_value = normal::sf(z_score);
    Ok(TestReport {
        statistic,
        law,
        z_score,
        p_value,
        reject: p_value < alpha,
        alpha,
        context: TestContext {
            p,
            n,
            y_n: p as f64 / n as f64,
            delta,
        },
    })
}

/// Computes the requested statistic from raw data and tests `Σ = I`.
///
/// The legacy CLRT needs a known mean; this entry point assumes `μ = 0`.
/// Use [`run_test_with_mean`] to supply one.
pub fn run_test(x: &DataMatrix, kind: StatisticKind, alpha: f64, delta: f64) -> Result<TestReport> {
    run_test_with_mean(x, kind, alpha, delta, None)
}

/// As [`run_test`], with an explicit known mean for the legacy CLRT.
/// `mean` is ignored by the other statistics.
pub fn run_test_with_mean(
    x: &DataMatrix,
    kind: StatisticKind,
    alpha: f64,
    delta: f64,
    mean: Option<&[f64]>,
) -> Result<TestReport> {
    check_alpha(alpha)?;
    if !delta.is_finite() {
        return Err(Error::InvalidParameter(format!("delta must be finite, got {delta}")));
    }
    let (p, n) = (x.p(), x.n());
    // For the CLRT a rank-deficient estimate surfaces as `SingularCovariance`
    // from the statistic itself; the null law then rejects `y ≥ 1`.
    if !kind.is_clrt() && n < 3 {
        return Err(Error::TooFewObservations { n, min: 3 });
    }
    let stat = match kind {
        StatisticKind::NewClrt => clrt_statistic(&classic_covariance(x))?,
        StatisticKind::LegacyClrt => {
            let zero;
            let mu = match mean {
                Some(m) => m,
                None => {
                    zero = vec![0.0; p];
                    &zero
                }
            };
            clrt_statistic(&simplified_covariance(x, mu)?)?
        }
        StatisticKind::NewLw => lw_statistic(&classic_covariance(x), delta)?,
        StatisticKind::LegacyLw => legacy_lw_statistic(&classic_covariance(x))?,
    };
    decide(stat, alpha, delta)
}
