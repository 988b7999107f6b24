//! Seeded synthesis of `X_i = Σ^{1/2} Y_i + μ`.
//!
//! Entries `Y_ij` are i.i.d. with mean 0, variance 1 and fourth moment
//! `3 + Δ`. The exception is [`EntryDistribution::ShiftedNormal`], which
//! deliberately has a nonzero mean. The population covariances are diagonal.
//!
//! Random streams come from ChaCha8: the master seed keys the generator and
//! the stream id selects one of its 2⁶⁴ independent streams, so a
//! replication's data depends only on `(master_seed, stream_id)`.

use crate::covstats::DataMatrix;
use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Recorded in experiment output so runs can be reproduced.
pub const RNG_ALGORITHM: &str = "chacha8/seed_from_u64(master_seed)/stream";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum EntryDistribution {
    /// `N(0, 1)`, `Δ = 0`.
    StdNormal,
    /// `N(mean, 1)`: unit variance and `Δ = 0` about its own mean.
    ShiftedNormal { mean: f64 },
    /// `(G − kθ)/(θ√k)` with `G ~ Gamma(shape k, scale θ)`; `Δ = 6/k`.
    CenteredGamma { shape: f64, scale: f64 },
    /// `(U − w/2)·√12/w` with `U ~ Uniform[0, w]`; `Δ = −1.2`.
    CenteredUniform { width: f64 },
    /// `−√((1−γ)/γ)` with probability `γ`, `√(γ/(1−γ))` otherwise.
    TwoPoint { gamma: f64 },
}

impl EntryDistribution {
    /// `Gamma[4, 0.5]`, with `Δ = 1.5`.
    pub const GAMMA_4_HALF: Self = Self::CenteredGamma {
        shape: 4.0,
        scale: 0.5,
    };

    /// `Uniform[0, 2√3]`, with `Δ = −1.2`.
    pub fn uniform_two_sqrt3() -> Self {
        Self::CenteredUniform {
            width: 2.0 * 3f64.sqrt(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidParameter(what.to_string()));
        match *self {
            Self::StdNormal => Ok(()),
            Self::ShiftedNormal { mean } if !mean.is_finite() => bad("shifted-normal mean must be finite"),
            Self::CenteredGamma { shape, scale }
                if !(shape > 0.0 && scale > 0.0 && shape.is_finite() && scale.is_finite()) =>
            {
                bad("gamma shape and scale must be positive")
            }
            Self::CenteredUniform { width } if !(width > 0.0 && width.is_finite()) => {
                bad("uniform width must be positive")
            }
            Self::TwoPoint { gamma } if !(gamma > 0.0 && gamma < 1.0) => bad("two-point gamma must lie in (0, 1)"),
            _ => Ok(()),
        }
    }

    /// Excess fourth moment `E(Y − EY)⁴ − 3` of the standardised entries.
    pub fn delta(&self) -> f64 {
        match *self {
            Self::StdNormal | Self::ShiftedNormal { .. } => 0.0,
            Self::CenteredGamma { shape, .. } => 6.0 / shape,
            Self::CenteredUniform { .. } => -1.2,
            Self::TwoPoint { gamma } => two_point_delta_unchecked(gamma),
        }
    }

    /// `E Y`.
    pub fn mean(&self) -> f64 {
        match *self {
            Self::ShiftedNormal { mean } => mean,
            _ => 0.0,
        }
    }

    /// Fills `out` with i.i.d. draws.
    pub fn fill<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) -> Result<()> {
        self.validate()?;
        match *self {
            Self::StdNormal => out.iter_mut().for_each(|v| *v = rng.sample(StandardNormal)),
            Self::ShiftedNormal { mean } => out
                .iter_mut()
                .for_each(|v| *v = mean + rng.sample::<f64, _>(StandardNormal)),
            Self::CenteredGamma { shape, scale } => {
                let gamma = Gamma::new(shape, scale)
                    .map_err(|e| Error::InvalidParameter(format!("gamma: {e}")))?;
                let mean = shape * scale;
                let sd = scale * shape.sqrt();
                out.iter_mut().for_each(|v| *v = (gamma.sample(rng) - mean) / sd);
            }
            Self::CenteredUniform { width } => {
                let k = 12f64.sqrt() / width;
                out.iter_mut()
                    .for_each(|v| *v = (rng.random::<f64>() * width - 0.5 * width) * k);
            }
            Self::TwoPoint { gamma } => {
                let lo = -((1.0 - gamma) / gamma).sqrt();
                let hi = (gamma / (1.0 - gamma)).sqrt();
                out.iter_mut()
                    .for_each(|v| *v = if rng.random::<f64>() < gamma { lo } else { hi });
            }
        }
        Ok(())
    }
}

impl fmt::Display for EntryDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::StdNormal => write!(f, "std-normal"),
            Self::ShiftedNormal { mean } => write!(f, "shifted-normal({mean})"),
            Self::CenteredGamma { shape, scale } => write!(f, "centered-gamma({shape};{scale})"),
            Self::CenteredUniform { width } => write!(f, "centered-uniform({width})"),
            Self::TwoPoint { gamma } => write!(f, "two-point({gamma})"),
        }
    }
}

fn two_point_delta_unchecked(gamma: f64) -> f64 {
    (1.0 - gamma).powi(2) / gamma + gamma * gamma / (1.0 - gamma) - 3.0
}

/// `Δ = (1−γ)²/γ + γ²/(1−γ) − 3` for the two-point law.
pub fn two_point_delta(gamma: f64) -> Result<f64> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "two-point gamma must lie in (0, 1), got {gamma}"
        )));
    }
    Ok(two_point_delta_unchecked(gamma))
}

/// Population covariance designs. All are diagonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CovarianceKind {
    Identity,
    /// First `⌊0.2p⌋` diagonal entries 1.5, the rest 1.
    Spiked15,
    /// First `⌊0.2p⌋` diagonal entries 0.5, the rest 1.
    Spiked05,
    Diagonal { values: Vec<f64> },
}

impl fmt::Display for CovarianceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Identity => f.write_str("identity"),
            Self::Spiked15 => f.write_str("spiked15"),
            Self::Spiked05 => f.write_str("spiked05"),
            Self::Diagonal { values } => {
                f.write_str("diagonal(")?;
                for (i, v) in values.iter().enumerate() {
                    if i > 0 {
                        f.write_str(";")?;
                    }
                    write!(f, "{v}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovarianceSpec {
    pub kind: CovarianceKind,
    pub p: usize,
}

impl CovarianceSpec {
    pub fn new(kind: CovarianceKind, p: usize) -> Self {
        Self { kind, p }
    }
}

/// A diagonal `Σ` and its elementwise square root.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalCovariance {
    pub diag: DVector<f64>,
    pub sqrt_diag: DVector<f64>,
}

impl DiagonalCovariance {
    pub fn matrix(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&self.diag)
    }

    pub fn sqrt_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&self.sqrt_diag)
    }
}

/// Builds `Σ_p` and `Σ_p^{1/2}`. Spike counts use integer truncation,
/// `⌊0.2p⌋ = ⌊p/5⌋`.
pub fn make_covariance(spec: &CovarianceSpec) -> Result<DiagonalCovariance> {
    let p = spec.p;
    if p == 0 {
        return Err(Error::InvalidParameter("covariance dimension must be positive".into()));
    }
    let spiked = |value: f64| {
        let k = p / 5;
        DVector::from_fn(p, |i, _| if i < k { value } else { 1.0 })
    };
    let diag = match &spec.kind {
        CovarianceKind::Identity => DVector::from_element(p, 1.0),
        CovarianceKind::Spiked15 => spiked(1.5),
        CovarianceKind::Spiked05 => spiked(0.5),
        CovarianceKind::Diagonal { values } => {
            if values.len() != p {
                return Err(Error::DimensionMismatch {
                    expected: p,
                    got: values.len(),
                });
            }
            DVector::from_column_slice(values)
        }
    };
    if let Some(v) = diag.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
        return Err(Error::InvalidParameter(format!(
            "diagonal covariance entries must be positive, got {v}"
        )));
    }
    let sqrt_diag = diag.map(f64::sqrt);
    Ok(DiagonalCovariance { diag, sqrt_diag })
}

/// One reproducible random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub master_seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        Self {
            master_seed,
            stream_id,
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

/// `p × n` matrix of i.i.d. entries.
pub fn sample_entries<R: Rng + ?Sized>(
    dist: &EntryDistribution,
    p: usize,
    n: usize,
    rng: &mut R,
) -> Result<DataMatrix> {
    let mut values = DMatrix::zeros(p, n);
    dist.fill(rng, values.as_mut_slice())?;
    DataMatrix::from_columns(values)
}

/// Reusable generator for one `(distribution, Σ, μ)` design.
#[derive(Debug, Clone)]
pub struct Synthesizer {
    dist: EntryDistribution,
    sqrt_diag: Option<DVector<f64>>,
    mu: Option<DVector<f64>>,
    p: usize,
}

impl Synthesizer {
    pub fn new(dist: EntryDistribution, cov: &CovarianceSpec, mu: &[f64]) -> Result<Self> {
        dist.validate()?;
        let p = cov.p;
        if mu.len() != p {
            return Err(Error::DimensionMismatch {
                expected: p,
                got: mu.len(),
            });
        }
        if mu.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("mean vector must be finite".into()));
        }
        let sigma = make_covariance(cov)?;
        // Skip the arithmetic entirely for Σ = I and μ = 0 so that X = Y exactly.
        let sqrt_diag = (!sigma.sqrt_diag.iter().all(|&v| v == 1.0)).then_some(sigma.sqrt_diag);
        let mu = mu.iter().any(|&v| v != 0.0).then(|| DVector::from_column_slice(mu));
        Ok(Self {
            dist,
            sqrt_diag,
            mu,
            p,
        })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn generate<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<DataMatrix> {
        let mut values = DMatrix::zeros(self.p, n);
        self.dist.fill(rng, values.as_mut_slice())?;
        for mut col in values.column_iter_mut() {
            if let Some(s) = &self.sqrt_diag {
                col.component_mul_assign(s);
            }
            if let Some(mu) = &self.mu {
                col += mu;
            }
        }
        DataMatrix::from_columns(values)
    }
}

/// `X = Σ^{1/2} Y + μ` with `n` observations.
pub fn synthesize<R: Rng + ?Sized>(
    dist: &EntryDistribution,
    cov: &CovarianceSpec,
    mu: &[f64],
    n: usize,
    rng: &mut R,
) -> Result<DataMatrix> {
    Synthesizer::new(*dist, cov, mu)?.generate(n, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covstats::classic_covariance;
    use crate::covstats::{clrt_statistic, lw_statistic};

    fn moments(xs: &[f64]) -> (f64, f64, f64) {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
        let m4 = xs.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / n;
        (mean, var, m4 / (var * var) - 3.0)
    }

    fn draws(dist: EntryDistribution, n: usize, seed: u64) -> Vec<f64> {
        let mut out = vec![0.0; n];
        dist.fill(&mut RngStream::new(seed, 0).rng(), &mut out).unwrap();
        out
    }

    #[test]
    fn standard_normal_moments() {
        let x = sample_entries(&EntryDistribution::StdNormal, 1000, 1000, &mut RngStream::new(1, 0).rng())
            .unwrap();
        let (mean, var, kurt) = moments(x.values().as_slice());
        assert!(mean.abs() < 0.01 && (var - 1.0).abs() < 0.02 && kurt.abs() < 0.1);
    }

    #[test]
    fn gamma_excess_kurtosis() {
        let (_, _, kurt) = moments(&draws(EntryDistribution::GAMMA_4_HALF, 1_000_000, 2));
        assert!((kurt - 1.5).abs() < 0.15, "{kurt}");
        // Gamma(4, 0.5) has mean 2 and variance 1 before centring.
        let (shape, scale): (f64, f64) = (4.0, 0.5);
        assert_eq!(shape * scale, 2.0);
        assert_eq!(shape * scale * scale, 1.0);
    }

    #[test]
    fn two_point_support_and_frequency() {
        let gamma = 0.2;
        let x = draws(EntryDistribution::TwoPoint { gamma }, 1_000_000, 3);
        let lo = -((1.0 - gamma) / gamma).sqrt();
        let hi = (gamma / (1.0 - gamma)).sqrt();
        assert!(x.iter().all(|&v| v == lo || v == hi));
        let frac = x.iter().filter(|&&v| v == lo).count() as f64 / x.len() as f64;
        assert!((frac - gamma).abs() < 0.003);
        let m4 = x.iter().map(|v| v.powi(4)).sum::<f64>() / x.len() as f64;
        assert!((m4 - 3.0 - two_point_delta(gamma).unwrap()).abs() < 0.05);
    }

    #[test]
    fn two_point_delta_values() {
        assert!((two_point_delta(0.5).unwrap() + 2.0).abs() < 1e-15);
        for g in [0.05, 0.2, 0.37, 0.6] {
            assert!((two_point_delta(g).unwrap() - two_point_delta(1.0 - g).unwrap()).abs() < 1e-12);
        }
        assert!(two_point_delta(0.0).is_err());
        assert!(two_point_delta(1.0).is_err());
    }

    #[test]
    fn standardisation_of_every_family() {
        let n = 1_000_000;
        let bound_mean = 4.0 / (n as f64).sqrt();
        let bound_var = 10.0 / (n as f64).sqrt();
        for (i, dist) in [
            EntryDistribution::StdNormal,
            EntryDistribution::GAMMA_4_HALF,
            EntryDistribution::CenteredGamma { shape: 2.0, scale: 3.0 },
            EntryDistribution::uniform_two_sqrt3(),
            EntryDistribution::CenteredUniform { width: 1.0 },
            EntryDistribution::TwoPoint { gamma: 0.5 },
            EntryDistribution::TwoPoint { gamma: 0.1 },
        ]
        .into_iter()
        .enumerate()
        {
            let (mean, var, _) = moments(&draws(dist, n, 10 + i as u64));
            assert!(mean.abs() < bound_mean, "{dist}: mean {mean}");
            assert!((var - 1.0).abs() < bound_var, "{dist}: var {var}");
        }
        let (mean, var, _) = moments(&draws(EntryDistribution::ShiftedNormal { mean: 0.25 }, n, 30));
        assert!((mean - 0.25).abs() < bound_mean && (var - 1.0).abs() < bound_var);
    }

    #[test]
    fn analytic_deltas() {
        assert_eq!(EntryDistribution::StdNormal.delta(), 0.0);
        assert_eq!(EntryDistribution::GAMMA_4_HALF.delta(), 1.5);
        assert_eq!(EntryDistribution::uniform_two_sqrt3().delta(), -1.2);
        assert_eq!(EntryDistribution::ShiftedNormal { mean: 0.25 }.delta(), 0.0);
        assert!(EntryDistribution::TwoPoint { gamma: 1.0 }.validate().is_err());
        assert!(EntryDistribution::CenteredGamma { shape: -1.0, scale: 1.0 }.validate().is_err());
    }

    #[test]
    fn covariance_designs() {
        let eye = make_covariance(&CovarianceSpec::new(CovarianceKind::Identity, 5)).unwrap();
        assert_eq!(eye.matrix(), DMatrix::identity(5, 5));
        let s1 = make_covariance(&CovarianceSpec::new(CovarianceKind::Spiked15, 10)).unwrap();
        assert_eq!(s1.diag.as_slice(), &[1.5, 1.5, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0]);
        assert!((s1.sqrt_diag[0] - 1.5f64.sqrt()).abs() < 1e-15);
        let s2 = make_covariance(&CovarianceSpec::new(CovarianceKind::Spiked05, 7)).unwrap();
        assert_eq!(s2.diag.iter().filter(|&&v| v == 0.5).count(), 1);
        let s2 = make_covariance(&CovarianceSpec::new(CovarianceKind::Spiked05, 4)).unwrap();
        assert!(s2.diag.iter().all(|&v| v == 1.0));
        assert!(make_covariance(&CovarianceSpec::new(
            CovarianceKind::Diagonal { values: vec![1.0, 0.0] },
            2
        ))
        .is_err());
        assert!(make_covariance(&CovarianceSpec::new(
            CovarianceKind::Diagonal { values: vec![1.0] },
            2
        ))
        .is_err());
    }

    #[test]
    fn identity_design_returns_raw_entries() {
        let cov = CovarianceSpec::new(CovarianceKind::Identity, 4);
        let x = synthesize(&EntryDistribution::StdNormal, &cov, &[0.0; 4], 6, &mut RngStream::new(5, 9).rng())
            .unwrap();
        let y = sample_entries(&EntryDistribution::StdNormal, 4, 6, &mut RngStream::new(5, 9).rng()).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn spiked_row_variance() {
        let cov = CovarianceSpec::new(CovarianceKind::Spiked15, 5);
        let x = synthesize(&EntryDistribution::StdNormal, &cov, &[0.0; 5], 100_000, &mut RngStream::new(6, 0).rng())
            .unwrap();
        let row: Vec<f64> = x.values().row(0).iter().copied().collect();
        let (_, var, _) = moments(&row);
        assert!((var - 1.5).abs() < 0.05);
    }

    #[test]
    fn mean_shift_leaves_classic_statistics_unchanged() {
        let cov = CovarianceSpec::new(CovarianceKind::Identity, 10);
        let stream = RngStream::new(7, 3);
        let x0 = synthesize(&EntryDistribution::StdNormal, &cov, &[0.0; 10], 40, &mut stream.rng()).unwrap();
        let x1 = synthesize(&EntryDistribution::StdNormal, &cov, &[2.5; 10], 40, &mut stream.rng()).unwrap();
        let (s0, s1) = (classic_covariance(&x0), classic_covariance(&x1));
        let l0 = clrt_statistic(&s0).unwrap().raw;
        let l1 = clrt_statistic(&s1).unwrap().raw;
        assert!((l0 - l1).abs() < 1e-10);
        let w0 = lw_statistic(&s0, 0.0).unwrap().raw;
        let w1 = lw_statistic(&s1, 0.0).unwrap().raw;
        assert!((w0 - w1).abs() < 1e-10);
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a = draws(EntryDistribution::StdNormal, 16, 42);
        let b = draws(EntryDistribution::StdNormal, 16, 42);
        assert_eq!(a, b);
        let mut c = vec![0.0; 16];
        EntryDistribution::StdNormal
            .fill(&mut RngStream::new(42, 1).rng(), &mut c)
            .unwrap();
        assert_ne!(a, c);
    }
}
