//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn jacobi_eigenvalues(a: &[Vec<f64>]) -> Vec<f64> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i][j] * m[i][j])
            .sum();
        let scale: f64 = (0..n).map(|i| m[i][i] * m[i][i]).sum::<f64>().max(1e-300);
        if off <= 1e-30 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[k][p], m[k][q]);
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[p][k], m[q][k]);
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| m[i][i]).collect();
    eig.sort_by(f64::total_cmp);
    eig
}

/// `(1/(n−1)) Σ_j (x_j − x̄)(x_j − x̄)ᵀ` by explicit sums; `x[i][j]` is
/// variable `i` of observation `j`.
pub fn brute_covariance(x: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let p = x.len();
    let n = x[0].len();
    let mean: Vec<f64> = x.iter().map(|row| row.iter().sum::<f64>() / n as f64).collect();
    let mut s = vec![vec![0.0; p]; p];
    for a in 0..p {
        for b in 0..p {
            let mut acc = 0.0;
            for j in 0..n {
                acc += (x[a][j] - mean[a]) * (x[b][j] - mean[b]);
            }
            s[a][b] = acc / (n as f64 - 1.0);
        }
    }
    s
}

/// `(1/n) Σ_j (x_j − μ)(x_j − μ)ᵀ`.
pub fn brute_known_mean_covariance(x: &[Vec<f64>], mu: &[f64]) -> Vec<Vec<f64>> {
    let p = x.len();
    let n = x[0].len();
    let mut s = vec![vec![0.0; p]; p];
    for a in 0..p {
        for b in 0..p {
            let mut acc = 0.0;
            for j in 0..n {
                acc += (x[a][j] - mu[a]) * (x[b][j] - mu[b]);
            }
            s[a][b] = acc / n as f64;
        }
    }
    s
}

/// Gaussian `p × n` table from a fixed seed, rows are variables.
pub fn gaussian_table(p: usize, n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..p)
        .map(|_| (0..n).map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal)).collect())
        .collect()
}

/// Random symmetric positive definite matrix `G Gᵀ / m + εI` with `m > p`.
pub fn random_spd(p: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = p + 1 + rng.random_range(0..p + 5);
    let g: Vec<Vec<f64>> = (0..p)
        .map(|_| (0..m).map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal)).collect())
        .collect();
    let eps = 0.05 + rng.random::<f64>();
    let mut a = vec![vec![0.0; p]; p];
    for i in 0..p {
        for j in 0..p {
            let mut acc = 0.0;
            for k in 0..m {
                acc += g[i][k] * g[j][k];
            }
            a[i][j] = acc / m as f64 + if i == j { eps } else { 0.0 };
        }
    }
    a
}

pub fn to_dmatrix(rows: &[Vec<f64>]) -> nalgebra::DMatrix<f64> {
    let r = rows.len();
    let c = rows[0].len();
    nalgebra::DMatrix::from_fn(r, c, |i, j| rows[i][j])
}
