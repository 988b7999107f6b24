//! Covariance estimators and the identity-test statistics.
//!
//! Observations are stored as the columns of a `p × n` matrix. Three
//! estimators are provided:
//!
//! ```text
//! S_n  = 1/(n−1) Σ_k (X_k − X̄)(X_k − X̄)'     classic, mean-centred
//! B_n  = 1/n     Σ_k (X_k − μ)(X_k − μ)'      known mean μ
//! 𝔖_n = 1/n     Σ_k (X_k − X̄)(X_k − X̄)' = (n−1)/n · S_n
//! ```
//!
//! and four statistics:
//!
//! ```text
//! L_n  = tr(S_n)/p − log|S_n|/p − 1                                   (NewClrt)
//! L̂_n  = tr(B_n)/p − log|B_n|/p − 1                                   (LegacyClrt)
//! Ŵ_n  = tr(S_n − I)²/p − p/(n−1)·(tr(S_n)/p)²                        (LegacyLw)
//! W_n  = Ŵ_n − ((1+Δ)(n−2)(n−1) − 2) / (n(n−1)²)                      (NewLw)
//! ```

use crate::error::{Error, Result};
use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Relative tolerance on the smallest Cholesky pivot before a covariance
/// estimate is declared singular.
pub const SINGULARITY_TOL: f64 = 1e-12;

/// Relative asymmetry accepted by [`CovarianceEstimate::from_matrix`].
pub const SYMMETRY_TOL: f64 = 1e-12;

/// A `p × n` data matrix; column `k` is the observation `X_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    values: DMatrix<f64>,
}

impl DataMatrix {
    /// Wraps a `p × n` matrix whose columns are observations.
    pub fn from_columns(values: DMatrix<f64>) -> Result<Self> {
        let (p, n) = values.shape();
        if p == 0 {
            return Err(Error::InvalidInput("data has zero variables".into()));
        }
        if n < 2 {
            return Err(Error::TooFewObservations { n, min: 2 });
        }
        // Column-major walk; report coordinates in (variable, observation).
        for (idx, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    row: idx % p,
                    col: idx / p,
                });
            }
        }
        Ok(Self { values })
    }

    /// Wraps an `n × p` matrix whose rows are observations (the usual
    /// on-disk layout) by transposing it.
    pub fn from_observation_rows(rows: DMatrix<f64>) -> Result<Self> {
        Self::from_columns(rows.transpose())
    }

    /// Builds from row-major `p × n` values.
    pub fn from_row_major(p: usize, n: usize, data: &[f64]) -> Result<Self> {
        if data.len() != p * n {
            return Err(Error::DimensionMismatch {
                expected: p * n,
                got: data.len(),
            });
        }
        Self::from_columns(DMatrix::from_row_slice(p, n, data))
    }

    pub fn p(&self) -> usize {
        self.values.nrows()
    }

    pub fn n(&self) -> usize {
        self.values.ncols()
    }

    /// `y_n = p / n`.
    pub fn ratio(&self) -> f64 {
        self.p() as f64 / self.n() as f64
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.values
    }

    /// Sample mean vector `X̄`.
    pub fn column_mean(&self) -> DVector<f64> {
        self.values.column_mean()
    }

    /// Returns `X + c·1'`, i.e. adds `c` to every observation.
    pub fn shifted(&self, c: &[f64]) -> Result<Self> {
        if c.len() != self.p() {
            return Err(Error::DimensionMismatch {
                expected: self.p(),
                got: c.len(),
            });
        }
        let shift = DVector::from_column_slice(c);
        let mut values = self.values.clone();
        for mut col in values.column_iter_mut() {
            col += &shift;
        }
        Self::from_columns(values)
    }
}

/// Which estimator produced a [`CovarianceEstimate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimatorKind {
    /// `S_n`, divisor `n − 1`, centred at the sample mean.
    Classic,
    /// `B_n`, divisor `n`, centred at a known mean.
    Simplified,
    /// `𝔖_n`, divisor `n`, centred at the sample mean.
    Scaled,
}

/// A symmetric `p × p` covariance estimate tagged with its estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceEstimate {
    matrix: DMatrix<f64>,
    kind: EstimatorKind,
    n: usize,
}

impl CovarianceEstimate {
    /// Wraps an externally supplied matrix. Checks squareness, finiteness,
    /// symmetry (relative to the largest entry) and positive
    /// semi-definiteness; the matrix is then symmetrised exactly.
    pub fn from_matrix(matrix: DMatrix<f64>, kind: EstimatorKind, n: usize) -> Result<Self> {
        let (r, c) = matrix.shape();
        if r != c {
            return Err(Error::DimensionMismatch {
                expected: r,
                got: c,
            });
        }
        if r == 0 {
            return Err(Error::InvalidInput("empty covariance matrix".into()));
        }
        if n < 2 {
            return Err(Error::TooFewObservations { n, min: 2 });
        }
        for (idx, v) in matrix.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    row: idx % r,
                    col: idx / r,
                });
            }
        }
        let scale = matrix.amax().max(f64::MIN_POSITIVE);
        let asym = (&matrix - matrix.transpose()).amax();
        if asym > SYMMETRY_TOL * scale {
            return Err(Error::InvalidInput(format!(
                "matrix is not symmetric (max |S − S'| = {asym:.3e})"
            )));
        }
        let matrix = symmetrize(matrix);
        let eig = SymmetricEigen::new(matrix.clone()).eigenvalues;
        let norm = eig.amax();
        let min = eig.min();
        if min < -1e-10 * norm {
            return Err(Error::InvalidInput(format!(
                "matrix is not positive semi-definite (smallest eigenvalue {min:.3e})"
            )));
        }
        Ok(Self { matrix, kind, n })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn kind(&self) -> EstimatorKind {
        self.kind
    }

    /// Number of observations the estimate was built from.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace()
    }

    /// `tr(S − I)² = ‖S‖_F² − 2 tr S + p`.
    pub fn trace_sq_deviation(&self) -> f64 {
        self.matrix.norm_squared() - 2.0 * self.trace() + self.p() as f64
    }
}

fn symmetrize(mut m: DMatrix<f64>) -> DMatrix<f64> {
    let p = m.nrows();
    for j in 0..p {
        for i in (j + 1)..p {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

/// `Σ_k (X_k − c)(X_k − c)'` via a centred product.
fn centered_scatter(x: &DataMatrix, center: &DVector<f64>) -> DMatrix<f64> {
    let mut xc = x.values.clone();
    for mut col in xc.column_iter_mut() {
        col -= center;
    }
    let xt = xc.transpose();
    symmetrize(&xc * xt)
}

/// `S_n`. Two passes: the mean first, then centred outer products.
pub fn classic_covariance(x: &DataMatrix) -> CovarianceEstimate {
    let n = x.n();
    let scatter = centered_scatter(x, &x.column_mean());
    CovarianceEstimate {
        matrix: scatter / (n - 1) as f64,
        kind: EstimatorKind::Classic,
        n,
    }
}

/// `B_n` centred at the supplied mean.
pub fn simplified_covariance(x: &DataMatrix, mu: &[f64]) -> Result<CovarianceEstimate> {
    if mu.len() != x.p() {
        return Err(Error::DimensionMismatch {
            expected: x.p(),
            got: mu.len(),
        });
    }
    if let Some(i) = mu.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { row: i, col: 0 });
    }
    let n = x.n();
    let scatter = centered_scatter(x, &DVector::from_column_slice(mu));
    Ok(CovarianceEstimate {
        matrix: scatter / n as f64,
        kind: EstimatorKind::Simplified,
        n,
    })
}

/// `𝔖_n = (n−1)/n · S_n`.
pub fn scaled_covariance(x: &DataMatrix) -> CovarianceEstimate {
    let classic = classic_covariance(x);
    rescale_classic(&classic)
}

/// Converts an `S_n` into `𝔖_n` without touching the data again.
pub fn rescale_classic(s: &CovarianceEstimate) -> CovarianceEstimate {
    let n = s.n;
    CovarianceEstimate {
        matrix: &s.matrix * ((n - 1) as f64 / n as f64),
        kind: EstimatorKind::Scaled,
        n,
    }
}

/// The four identity-test statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StatisticKind {
    NewClrt,
    NewLw,
    LegacyClrt,
    LegacyLw,
}

impl StatisticKind {
    pub const ALL: [StatisticKind; 4] = [
        StatisticKind::NewClrt,
        StatisticKind::NewLw,
        StatisticKind::LegacyClrt,
        StatisticKind::LegacyLw,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            StatisticKind::NewClrt => "new-clrt",
            StatisticKind::NewLw => "new-lw",
            StatisticKind::LegacyClrt => "legacy-clrt",
            StatisticKind::LegacyLw => "legacy-lw",
        }
    }

    pub fn is_clrt(self) -> bool {
        matches!(self, StatisticKind::NewClrt | StatisticKind::LegacyClrt)
    }
}

impl fmt::Display for StatisticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StatisticKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        StatisticKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown test kind '{s}'")))
    }
}

/// A computed statistic together with the context needed to standardise it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StatisticValue {
    pub raw: f64,
    pub kind: StatisticKind,
    /// `Δ` entering the statistic or its null law (0 where unused).
    pub delta_used: f64,
    pub p: usize,
    pub n: usize,
}

/// `log|S|` via Cholesky. Fails with [`Error::SingularCovariance`] when the
/// estimate is structurally rank deficient, the factorisation breaks down,
/// or the smallest pivot is below `SINGULARITY_TOL` times the largest
/// diagonal entry.
pub fn log_det(s: &CovarianceEstimate) -> Result<f64> {
    let (p, n) = (s.p(), s.n);
    // Rank of S_n / 𝔖_n is at most n − 1, of B_n at most n.
    let max_rank = match s.kind {
        EstimatorKind::Classic | EstimatorKind::Scaled => n - 1,
        EstimatorKind::Simplified => n,
    };
    if p > max_rank {
        return Err(Error::SingularCovariance {
            p,
            n,
            reason: format!("rank is at most {max_rank} < p"),
        });
    }
    let diag_max = s.matrix.diagonal().max();
    let chol = Cholesky::new(s.matrix.clone()).ok_or_else(|| Error::SingularCovariance {
        p,
        n,
        reason: "Cholesky factorisation failed".into(),
    })?;
    let l = chol.l_dirty();
    let mut log_det = 0.0;
    for i in 0..p {
        let pivot = l[(i, i)] * l[(i, i)];
        if pivot <= SINGULARITY_TOL * diag_max {
            return Err(Error::SingularCovariance {
                p,
                n,
                reason: format!("pivot {i} is {pivot:.3e}"),
            });
        }
        log_det += pivot.ln();
    }
    Ok(log_det)
}

/// `tr(S)/p − log|S|/p − 1`.
///
/// A classic estimate yields [`StatisticKind::NewClrt`], a simplified one
/// [`StatisticKind::LegacyClrt`]. Scaled estimates are rejected.
pub fn clrt_statistic(s: &CovarianceEstimate) -> Result<StatisticValue> {
    let kind = match s.kind {
        EstimatorKind::Classic => StatisticKind::NewClrt,
        EstimatorKind::Simplified => StatisticKind::LegacyClrt,
        EstimatorKind::Scaled => {
            return Err(Error::InvalidInput(
                "CLRT is defined on S_n or B_n, not the scaled estimator".into(),
            ))
        }
    };
    let p = s.p() as f64;
    let raw = s.trace() / p - log_det(s)? / p - 1.0;
    Ok(StatisticValue {
        // x − log x − 1 ≥ 0 per eigenvalue; clamp away rounding below zero.
        raw: raw.max(0.0),
        kind,
        delta_used: 0.0,
        p: s.p(),
        n: s.n,
    })
}

/// `((n−2)(n−1) − 2) / (n(n−1)²)`: the exact null mean of `Ŵ_n` for
/// Gaussian data.
pub fn lw_finite_centering(n: usize) -> f64 {
    let n = n as f64;
    ((n - 2.0) * (n - 1.0) - 2.0) / (n * (n - 1.0).powi(2))
}

/// `((1+Δ)(n−2)(n−1) − 2) / (n(n−1)²)`: the term separating `W_n` from `Ŵ_n`.
pub fn lw_correction(n: usize, delta: f64) -> f64 {
    let n = n as f64;
    ((1.0 + delta) * (n - 2.0) * (n - 1.0) - 2.0) / (n * (n - 1.0).powi(2))
}

fn lw_core(s: &CovarianceEstimate) -> Result<f64> {
    if s.kind != EstimatorKind::Classic {
        return Err(Error::InvalidInput(
            "LW statistics are defined on the classic estimator S_n".into(),
        ));
    }
    if s.n < 3 {
        return Err(Error::TooFewObservations { n: s.n, min: 3 });
    }
    let p = s.p() as f64;
    let n = s.n as f64;
    let mean_eig = s.trace() / p;
    Ok(s.trace_sq_deviation() / p - p / (n - 1.0) * mean_eig * mean_eig)
}

/// `W_n` with the supplied excess kurtosis `Δ`.
pub fn lw_statistic(s: &CovarianceEstimate, delta: f64) -> Result<StatisticValue> {
    if !delta.is_finite() {
        return Err(Error::InvalidParameter(format!("delta must be finite, got {delta}")));
    }
    let raw = lw_core(s)? - lw_correction(s.n, delta);
    Ok(StatisticValue {
        raw,
        kind: StatisticKind::NewLw,
        delta_used: delta,
        p: s.p(),
        n: s.n,
    })
}

/// `Ŵ_n` exactly as originally defined, with `S_n` and the `p/(n−1)` ratio.
pub fn legacy_lw_statistic(s: &CovarianceEstimate) -> Result<StatisticValue> {
    Ok(StatisticValue {
        raw: lw_core(s)?,
        kind: StatisticKind::LegacyLw,
        delta_used: 0.0,
        p: s.p(),
        n: s.n,
    })
}

/// Ascending eigenvalues.
pub fn spectrum(s: &CovarianceEstimate) -> Vec<f64> {
    let mut eig: Vec<f64> = SymmetricEigen::new(s.matrix.clone())
        .eigenvalues
        .iter()
        .copied()
        .collect();
    eig.sort_by(f64::total_cmp);
    eig
}

/// Heuristic moment plug-in for `Δ`: the average fourth power of the
/// row-standardised residuals, minus 3.
///
/// No consistency guarantee is claimed; it exists so that experiments can
/// contrast known and estimated `Δ`. Rows with zero variance are skipped.
pub fn plugin_delta(x: &DataMatrix) -> f64 {
    let n = x.n() as f64;
    let mut sum = 0.0;
    let mut count = 0usize;
    for row in x.values.row_iter() {
        let mean = row.sum() / n;
        let var = row.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        if var <= 0.0 {
            continue;
        }
        sum += row
            .iter()
            .map(|v| (v - mean).powi(4) / (var * var))
            .sum::<f64>();
        count += x.n();
    }
    if count == 0 {
        0.0
    } else {
        sum / count as f64 - 3.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data(p: usize, n: usize, rows: &[f64]) -> DataMatrix {
        DataMatrix::from_row_major(p, n, rows).unwrap()
    }

    // Defining sum, written out element by element.
    fn brute_force_covariance(x: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let p = x.len();
        let n = x[0].len();
        let mean: Vec<f64> = x.iter().map(|r| r.iter().sum::<f64>() / n as f64).collect();
        let mut s = vec![vec![0.0; p]; p];
        for k in 0..n {
            for i in 0..p {
                for j in 0..p {
                    s[i][j] += (x[i][k] - mean[i]) * (x[j][k] - mean[j]);
                }
            }
        }
        for row in &mut s {
            for v in row.iter_mut() {
                *v /= (n - 1) as f64;
            }
        }
        s
    }

    #[test]
    fn rejects_bad_data() {
        assert!(matches!(
            DataMatrix::from_row_major(2, 1, &[1.0, 2.0]),
            Err(Error::TooFewObservations { n: 1, min: 2 })
        ));
        assert!(matches!(
            DataMatrix::from_row_major(2, 2, &[1.0, 2.0, f64::NAN, 0.0]),
            Err(Error::NonFinite { row: 1, col: 0 })
        ));
        assert!(DataMatrix::from_row_major(2, 2, &[1.0]).is_err());
    }

    #[test]
    fn identical_columns_give_zero_covariance() {
        let x = data(3, 2, &[1.0, 1.0, -2.0, -2.0, 0.5, 0.5]);
        assert_eq!(classic_covariance(&x).matrix().amax(), 0.0);
    }

    #[test]
    fn small_classic_covariance_matches_defining_sum() {
        let rows = vec![vec![1.0, 2.0, 3.0], vec![0.0, 1.0, 4.0]];
        let expected = brute_force_covariance(&rows);
        // Hand check: var(1,2,3) = 1, var(0,1,4) = 13/3, cov = 2.
        assert!((expected[0][0] - 1.0).abs() < 1e-15);
        assert!((expected[1][1] - 13.0 / 3.0).abs() < 1e-14);
        assert!((expected[0][1] - 2.0).abs() < 1e-15);
        let s = classic_covariance(&data(2, 3, &[1.0, 2.0, 3.0, 0.0, 1.0, 4.0]));
        for i in 0..2 {
            for j in 0..2 {
                assert!((s.matrix()[(i, j)] - expected[i][j]).abs() < 1e-14);
            }
        }
        let scaled = scaled_covariance(&data(2, 3, &[1.0, 2.0, 3.0, 0.0, 1.0, 4.0]));
        assert!((scaled.matrix()[(1, 1)] - 13.0 / 3.0 * 2.0 / 3.0).abs() < 1e-14);
        assert!((scaled.matrix()[(0, 1)] - 4.0 / 3.0).abs() < 1e-14);
        assert_eq!(scaled.kind(), EstimatorKind::Scaled);
    }

    #[test]
    fn scaled_at_n2_is_half_of_classic() {
        let x = data(2, 2, &[1.0, 3.0, -1.0, 4.0]);
        let s = classic_covariance(&x);
        let t = scaled_covariance(&x);
        assert_eq!(t.matrix(), &(s.matrix() * 0.5));
    }

    #[test]
    fn simplified_covariance_cases() {
        let x = data(1, 4, &[1.0, -1.0, 2.0, -2.0]);
        let b = simplified_covariance(&x, &[0.0]).unwrap();
        assert!((b.matrix()[(0, 0)] - 2.5).abs() < 1e-15);
        assert_eq!(b.kind(), EstimatorKind::Simplified);

        let at_mu = data(2, 3, &[0.5, 0.5, 0.5, -1.0, -1.0, -1.0]);
        let b = simplified_covariance(&at_mu, &[0.5, -1.0]).unwrap();
        assert_eq!(b.matrix().amax(), 0.0);

        let x = data(2, 3, &[1.0, 2.0, 3.0, 0.0, 1.0, 4.0]);
        let b = simplified_covariance(&x, &[0.0, 0.0]).unwrap();
        let direct = x.values() * x.values().transpose() / 3.0;
        assert!((b.matrix() - direct).amax() < 1e-14);

        assert!(matches!(
            simplified_covariance(&x, &[0.0]),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn clrt_closed_forms() {
        let eye = CovarianceEstimate::from_matrix(DMatrix::identity(4, 4), EstimatorKind::Classic, 10)
            .unwrap();
        let v = clrt_statistic(&eye).unwrap();
        assert!(v.raw.abs() < 1e-15);
        assert_eq!(v.kind, StatisticKind::NewClrt);

        let two = CovarianceEstimate::from_matrix(
            DMatrix::from_diagonal_element(2, 2, 2.0),
            EstimatorKind::Classic,
            10,
        )
        .unwrap();
        let v = clrt_statistic(&two).unwrap();
        assert!((v.raw - (1.0 - 2f64.ln())).abs() < 1e-14);

        let b = CovarianceEstimate::from_matrix(DMatrix::identity(2, 2), EstimatorKind::Simplified, 10)
            .unwrap();
        assert_eq!(clrt_statistic(&b).unwrap().kind, StatisticKind::LegacyClrt);
        let sc = CovarianceEstimate::from_matrix(DMatrix::identity(2, 2), EstimatorKind::Scaled, 10)
            .unwrap();
        assert!(clrt_statistic(&sc).is_err());
    }

    #[test]
    fn clrt_singular_when_p_not_below_n() {
        // p = 4, n = 4 → rank ≤ 3.
        let x = data(
            4,
            4,
            &[1.0, 2.0, 0.0, 3.0, 0.0, 1.0, 5.0, 2.0, 2.0, 2.0, 1.0, 0.0, 3.0, 1.0, 1.0, 1.0],
        );
        let s = classic_covariance(&x);
        assert!(matches!(clrt_statistic(&s), Err(Error::SingularCovariance { .. })));
        // An explicitly singular matrix with a large n is caught by the pivot check.
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        let s = CovarianceEstimate::from_matrix(m, EstimatorKind::Classic, 50).unwrap();
        assert!(matches!(clrt_statistic(&s), Err(Error::SingularCovariance { .. })));
    }

    #[test]
    fn lw_at_identity() {
        // S = I, p = 3, n = 10: tr(S−I)² = 0, (tr S/p)² = 1.
        let s = CovarianceEstimate::from_matrix(DMatrix::identity(3, 3), EstimatorKind::Classic, 10)
            .unwrap();
        let legacy = legacy_lw_statistic(&s).unwrap().raw;
        assert!((legacy - (-3.0 / 9.0)).abs() < 1e-15);
        let new = lw_statistic(&s, 0.0).unwrap().raw;
        // −3/9 − (8·9 − 2)/(10·81)
        assert!((new - (-3.0 / 9.0 - 70.0 / 810.0)).abs() < 1e-15);
        assert!((lw_correction(10, 0.0) - 70.0 / 810.0).abs() < 1e-16);
        assert_eq!(lw_correction(10, 0.0), lw_finite_centering(10));
    }

    #[test]
    fn lw_difference_is_the_correction_term() {
        let x = data(2, 5, &[1.0, 0.3, -2.0, 0.7, 1.1, 0.0, -0.4, 2.2, 1.9, -1.0]);
        let s = classic_covariance(&x);
        for &d in &[-2.0, -1.2, 0.0, 1.5, 6.0] {
            let diff = lw_statistic(&s, d).unwrap().raw - legacy_lw_statistic(&s).unwrap().raw;
            let n = 5.0;
            let expected = -((1.0 + d) * (n - 2.0) * (n - 1.0) - 2.0) / (n * (n - 1.0) * (n - 1.0));
            assert!((diff - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn lw_preconditions() {
        let x = data(2, 2, &[1.0, 0.0, 0.0, 1.0]);
        let s = classic_covariance(&x);
        assert!(matches!(
            lw_statistic(&s, 0.0),
            Err(Error::TooFewObservations { n: 2, min: 3 })
        ));
        let b = simplified_covariance(&data(1, 3, &[1.0, 2.0, 3.0]), &[0.0]).unwrap();
        assert!(lw_statistic(&b, 0.0).is_err());
    }

    #[test]
    fn spectrum_of_diagonals() {
        let s = CovarianceEstimate::from_matrix(DMatrix::identity(3, 3), EstimatorKind::Classic, 5)
            .unwrap();
        assert_eq!(spectrum(&s), vec![1.0, 1.0, 1.0]);
        let d = CovarianceEstimate::from_matrix(
            DMatrix::from_diagonal(&DVector::from_vec(vec![1.5, 0.5])),
            EstimatorKind::Classic,
            5,
        )
        .unwrap();
        let eig = spectrum(&d);
        assert!((eig[0] - 0.5).abs() < 1e-15 && (eig[1] - 1.5).abs() < 1e-15);
    }

    #[test]
    fn from_matrix_rejects_asymmetric_and_indefinite() {
        let asym = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.4, 1.0]);
        assert!(CovarianceEstimate::from_matrix(asym, EstimatorKind::Classic, 5).is_err());
        let indef = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(CovarianceEstimate::from_matrix(indef, EstimatorKind::Classic, 5).is_err());
    }

    #[test]
    fn kind_names_round_trip() {
        for k in StatisticKind::ALL {
            assert_eq!(k.as_str().parse::<StatisticKind>().unwrap(), k);
        }
        assert!("clrt".parse::<StatisticKind>().is_err());
    }

    #[test]
    fn plugin_delta_of_rademacher_rows() {
        // ±1 rows standardise to ±1, so the fourth moment is 1 and Δ̂ = −2.
        let x = data(2, 4, &[1.0, -1.0, 1.0, -1.0, -1.0, 1.0, 1.0, -1.0]);
        assert!((plugin_delta(&x) + 2.0).abs() < 1e-14);
    }
}
