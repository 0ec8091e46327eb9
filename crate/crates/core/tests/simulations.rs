use std::f64::consts::PI;

use smeary_core::distributions::DistributionSpec;
use smeary_core::fss::{classify_fss_window, FssWindowOutcome};
use smeary_core::inference::Method;
use smeary_core::rng::substream;
use smeary_core::simlab::{fss_scale_table, log_grid, log_smeary_smoke, size_power_curve, variance_curve, ExperimentConfig};

fn config(two_sample: bool, grid: Vec<f64>, methods: Vec<Method>) -> ExperimentConfig {
    ExperimentConfig {
        specs: vec![DistributionSpec::vmm(3.0, 1.0, 0.0, 0.0)],
        n_grid: vec![100],
        reps: 100,
        b: 200,
        alpha: 0.05,
        grid,
        two_sample,
        methods,
        seed: None,
        workers: None,
    }
}

#[test]
fn power_saturates_at_the_antipode() {
    for two_sample in [false, true] {
        let rows = size_power_curve(&config(two_sample, vec![PI], vec![Method::Quantile, Method::Bootstrap]), 21).unwrap();
        for r in rows {
            assert!(r.reject_freq >= 0.99, "{r:?}");
        }
    }
}

#[test]
fn power_grows_away_from_the_null() {
    let rows = size_power_curve(&config(false, vec![0.0, 0.1, 0.3], vec![Method::Quantile]), 5).unwrap();
    assert!(rows[0].reject_freq < rows[1].reject_freq && rows[1].reject_freq < rows[2].reject_freq, "{rows:?}");
    assert!(rows.iter().all(|r| r.stderr <= 0.05 + 1e-12));
}

#[test]
fn log_smeary_means_shrink() {
    let med: Vec<f64> = [1_000, 10_000, 100_000]
        .iter()
        .map(|&n| log_smeary_smoke(1.0, n, 100, 8).unwrap().median_abs_mean)
        .collect();
    assert!(med[0] > med[1] && med[1] > med[2], "{med:?}");
}

#[test]
fn fss_scale_of_von_mises_is_one() {
    let rows = fss_scale_table(&[DistributionSpec::von_mises(3.0)], &[100], 500, 20, 4).unwrap();
    assert!((rows[0].median_scale - 1.0).abs() < 0.15, "{rows:?}");
}

#[test]
fn atom_families_have_finite_curves() {
    let specs = [
        DistributionSpec::PiecewiseAtom { t: vec![0.5, 1.5], w: vec![0.9, 0.4] },
        DistributionSpec::EquatorAtoms { epsilon: 0.1, weight_w: 0.2 },
    ];
    for spec in specs {
        let c = variance_curve(&spec, &[1, 10, 100], 200, &mut substream(2, 0, 0)).unwrap();
        assert!(c.points.iter().all(|p| p.scaled_var.is_finite() && p.stderr.is_finite()), "{c:?}");
    }
}

#[test]
fn mixture_curve_has_an_fss_window() {
    let spec = DistributionSpec::vmm(3.0, 0.5, 0.5, 0.0);
    let grid = log_grid(2, 3000, 5);
    let c = variance_curve(&spec, &grid, 400, &mut substream(6, 0, 0)).unwrap();
    let pts: Vec<(usize, f64)> = c.points.iter().map(|p| (p.n, p.scaled_var)).collect();
    match classify_fss_window(&pts).unwrap() {
        FssWindowOutcome::Detected(w) => {
            assert!(w.n_minus < w.n_plus);
            assert!(w.r_minus > 0.0 && w.r_plus > 0.0);
        }
        FssWindowOutcome::NotDetected => panic!("no window in {pts:?}"),
    }
    let flat = variance_curve(&DistributionSpec::Uniform { half_width: 1.0 }, &grid, 400, &mut substream(6, 0, 0)).unwrap();
    let pts: Vec<(usize, f64)> = flat.points.iter().map(|p| (p.n, p.scaled_var)).collect();
    assert_eq!(classify_fss_window(&pts).unwrap(), FssWindowOutcome::NotDetected);
}
