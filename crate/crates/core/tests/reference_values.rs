//! Monte Carlo rates against reference cells, within five Monte
//! Carlo standard errors of the reference value.

use hidimtest::harness::{run_experiment, sweep_delta, GridPoint, MeanSpec};
use hidimtest::{CovarianceKind, DeltaPolicy, EntryDistribution, ExperimentConfig, StatisticKind};

fn config(
    tests: &[StatisticKind],
    distribution: EntryDistribution,
    covariance: CovarianceKind,
    grid: Vec<GridPoint>,
    replications: usize,
    master_seed: u64,
) -> ExperimentConfig {
    ExperimentConfig {
        name: "reference".into(),
        tests: tests.to_vec(),
        distribution,
        covariance,
        mu: MeanSpec::Constant(0.0),
        grid,
        alpha: 0.05,
        replications,
        master_seed,
        delta_policy: DeltaPolicy::Known,
        sweep_gammas: None,
    }
}

/// `(n, [y = 0.25, 0.5, 0.75])` for the new and the legacy CLRT.
type Block = [(usize, [f64; 3], [f64; 3]); 3];

fn check_clrt_block(covariance: CovarianceKind, block: &[(usize, [f64; 3], [f64; 3])], seed: u64) {
    let ys = [0.25, 0.5, 0.75];
    let grid: Vec<GridPoint> = block
        .iter()
        .flat_map(|(n, _, _)| ys.iter().map(move |&y| GridPoint::Ratio { y, n: *n }))
        .collect();
    let cfg = config(
        &[StatisticKind::NewClrt, StatisticKind::LegacyClrt],
        EntryDistribution::StdNormal,
        covariance.clone(),
        grid,
        1000,
        seed,
    );
    let result = run_experiment(&cfg, 0).unwrap();
    for (n, new_ref, legacy_ref) in block {
        for (k, &y) in ys.iter().enumerate() {
            let p = (y * *n as f64).round() as usize;
            for (test, reference) in [(StatisticKind::NewClrt, new_ref[k]), (StatisticKind::LegacyClrt, legacy_ref[k])] {
                let cell = result.find(test, p, *n).unwrap();
                let se = (reference * (1.0 - reference) / 1000.0).sqrt().max(1.0 / 1000.0);
                assert!(
                    (cell.rate - reference).abs() <= 5.0 * se,
                    "{covariance} {test} n={n} y={y}: {} vs {reference}",
                    cell.rate
                );
            }
        }
    }
}

#[test]
fn clrt_sizes_gaussian_identity() {
    let block: Block = [
        (40, [0.077, 0.072, 0.076], [0.071, 0.061, 0.062]),
        (80, [0.062, 0.061, 0.062], [0.060, 0.056, 0.055]),
        (160, [0.054, 0.053, 0.054], [0.053, 0.052, 0.053]),
    ];
    check_clrt_block(CovarianceKind::Identity, &block, 11);
}

#[test]
fn clrt_powers_spiked_up() {
    let block = [
        (40, [0.220, 0.182, 0.177], [0.214, 0.168, 0.162]),
        (80, [0.397, 0.342, 0.281], [0.397, 0.337, 0.275]),
        (160, [0.819, 0.769, 0.632], [0.816, 0.762, 0.625]),
        (200, [0.926, 0.889, 0.815], [0.925, 0.895, 0.816]),
    ];
    check_clrt_block(CovarianceKind::Spiked15, &block, 12);
}

#[test]
fn clrt_powers_spiked_down() {
    let block: Block = [
        (40, [0.371, 0.369, 0.272], [0.370, 0.367, 0.278]),
        (80, [0.841, 0.749, 0.618], [0.840, 0.762, 0.641]),
        (160, [1.0, 1.0, 0.986], [1.0, 0.999, 0.990]),
    ];
    check_clrt_block(CovarianceKind::Spiked05, &block, 13);
}

#[test]
fn new_lw_small_sample_sizes() {
    // Independent vectorised simulation of the same statistic, R = 2·10⁵
    // per cell (standard error ≤ 0.0007). Rows p, columns n = 5, 10, 50.
    let reference = [
        (5usize, [0.0830, 0.0821, 0.0804]),
        (10, [0.0937, 0.0844, 0.0708]),
        (50, [0.1072, 0.0846, 0.0613]),
        (100, [0.1097, 0.0864, 0.0595]),
    ];
    let ns = [5usize, 10, 50];
    let grid: Vec<GridPoint> = reference
        .iter()
        .flat_map(|(p, _)| ns.iter().map(move |&n| GridPoint::Dims { p: *p, n }))
        .collect();
    let cfg = config(
        &[StatisticKind::NewLw],
        EntryDistribution::StdNormal,
        CovarianceKind::Identity,
        grid,
        10_000,
        21,
    );
    let result = run_experiment(&cfg, 0).unwrap();
    for (p, row) in reference {
        for (k, &n) in ns.iter().enumerate() {
            let r: f64 = row[k];
            let se = (r * (1.0 - r) / 10_000.0).sqrt();
            let cell = result.find(StatisticKind::NewLw, p, n).unwrap();
            assert!((cell.rate - r).abs() <= 5.0 * se, "p={p} n={n}: {} vs {r}", cell.rate);
        }
    }
}

#[test]
fn z_scores_are_centred_under_the_null() {
    for (dist, seed) in [(EntryDistribution::StdNormal, 31), (EntryDistribution::uniform_two_sqrt3(), 32)] {
        let cfg = config(
            &[StatisticKind::NewClrt, StatisticKind::NewLw],
            dist,
            CovarianceKind::Identity,
            vec![GridPoint::Ratio { y: 0.5, n: 200 }],
            2000,
            seed,
        );
        let result = run_experiment(&cfg, 0).unwrap();
        for cell in &result.cells {
            assert!(cell.z_mean.abs() < 0.1, "{dist} {}: mean z {}", cell.test, cell.z_mean);
            assert!((cell.z_var - 1.0).abs() < 0.15, "{dist} {}: var z {}", cell.test, cell.z_var);
        }
    }
}

#[test]
fn sweep_near_zero_excess_kurtosis_is_nominal() {
    let gamma = (3.0 - 3f64.sqrt()) / 6.0;
    let points = sweep_delta(&[gamma], 50, 100, 0.05, 10_000, 41, 0).unwrap();
    assert!(points[0].delta.abs() < 1e-12);
    assert!((0.04..=0.07).contains(&points[0].rate), "{}", points[0].rate);
}

#[test]
fn power_ordering_depends_on_spike_direction() {
    let grid = vec![GridPoint::Ratio { y: 0.5, n: 80 }];
    let tests = [StatisticKind::NewClrt, StatisticKind::NewLw];
    let up = run_experiment(
        &config(&tests, EntryDistribution::StdNormal, CovarianceKind::Spiked15, grid.clone(), 1000, 51),
        0,
    )
    .unwrap();
    let down = run_experiment(
        &config(&tests, EntryDistribution::StdNormal, CovarianceKind::Spiked05, grid, 1000, 52),
        0,
    )
    .unwrap();
    let r = |res: &hidimtest::ExperimentResult, t| res.find(t, 40, 80).unwrap().rate;
    assert!(r(&up, StatisticKind::NewLw) > r(&up, StatisticKind::NewClrt));
    assert!(r(&down, StatisticKind::NewClrt) > r(&down, StatisticKind::NewLw));
}
