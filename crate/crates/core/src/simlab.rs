//! Seeded Monte Carlo experiments: scaled-variance curves, rejection
//! frequencies of the mean tests, FSS scale tables and the log-smeary
//! smoke test.
//!
//! Replication `i` of cell `c` always draws from stream `i` of the tag of
//! `c` under the master seed, so results do not depend on thread count.

use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::{theoretical_moments, DistributionSpec, Sampler};
use crate::error::{Error, Result};
use crate::fss::fss_test;
use crate::geometry::Angle;
use crate::inference::{circle, BootstrapOptions, Method};
use crate::mean::{mean_of_sorted, CircleSample};
use crate::rng::{substream, tag};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariancePoint {
    pub n: usize,
    /// n · mean over replications of d(μ̂ₙ, 0)².
    pub scaled_var: f64,
    pub scaled_var_over_sigma2: f64,
    /// Monte Carlo standard error of `scaled_var`.
    pub stderr: f64,
    pub normalizer_sigma_sq: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VarianceCurve {
    pub spec: DistributionSpec,
    pub replications: usize,
    pub points: Vec<VariancePoint>,
}

fn check_count(name: &str, v: usize) -> Result<()> {
    if v == 0 {
        return Err(Error::Parameter(format!("{name} must be at least 1")));
    }
    Ok(())
}

fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let k = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / k;
    if xs.len() < 2 {
        return (m, 0.0);
    }
    let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (k - 1.0);
    (m, v.sqrt())
}

/// Squared distances d(μ̂ₙ, 0)² over `reps` samples of size `n`.
fn squared_errors(sampler: &Sampler, n: usize, reps: usize, master: u64, cell: u64) -> Vec<f64> {
    (0..reps as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(master, cell, i);
            let xs = sampler.sample_sorted(n, &mut rng);
            mean_of_sorted(&xs, &mut rng).mean.radians().powi(2)
        })
        .collect()
}

/// Scaled variance n·E[d(μ̂ₙ, 0)²] along `n_grid`. Draws one `u64` from `rng`.
pub fn variance_curve<R: RngCore + ?Sized>(
    spec: &DistributionSpec,
    n_grid: &[usize],
    reps: usize,
    rng: &mut R,
) -> Result<VarianceCurve> {
    check_count("replications", reps)?;
    if n_grid.contains(&0) {
        return Err(Error::Parameter("sample sizes must be at least 1".into()));
    }
    let sampler = Sampler::new(spec)?;
    let sigma_sq = theoretical_moments(spec)?.sigma_sq;
    let master = rng.next_u64();
    let base = tag(&format!("variance_curve/{}", spec.label()));
    let points = n_grid
        .iter()
        .map(|&n| {
            let d2 = squared_errors(&sampler, n, reps, master, base ^ (n as u64).rotate_left(17));
            let (m, sd) = mean_sd(&d2);
            let nf = n as f64;
            VariancePoint {
                n,
                scaled_var: nf * m,
                scaled_var_over_sigma2: nf * m / sigma_sq,
                stderr: nf * sd / (reps as f64).sqrt(),
                normalizer_sigma_sq: sigma_sq,
            }
        })
        .collect();
    Ok(VarianceCurve { spec: spec.clone(), replications: reps, points })
}

/// Least-squares slope of log scaled variance against log n.
pub fn log_log_slope(points: &[VariancePoint]) -> f64 {
    let xs: Vec<f64> = points.iter().map(|p| (p.n as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.scaled_var.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Roughly `per_decade` log-spaced integers from `lo` to `hi`, inclusive.
pub fn log_grid(lo: usize, hi: usize, per_decade: usize) -> Vec<usize> {
    let (a, b) = ((lo.max(1) as f64).log10(), (hi.max(1) as f64).log10());
    let steps = ((b - a) * per_decade as f64).round().max(1.0) as usize;
    let mut out: Vec<usize> = (0..=steps)
        .map(|i| 10f64.powf(a + (b - a) * i as f64 / steps as f64).round() as usize)
        .collect();
    out.dedup();
    out
}

fn default_reps() -> usize {
    2000
}
fn default_b() -> usize {
    1000
}
fn default_alpha() -> f64 {
    0.05
}
fn default_grid() -> Vec<f64> {
    vec![0.0]
}
fn default_methods() -> Vec<Method> {
    vec![Method::Quantile]
}

/// JSON-configurable description of an experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub specs: Vec<DistributionSpec>,
    pub n_grid: Vec<usize>,
    #[serde(default = "default_reps")]
    pub reps: usize,
    #[serde(rename = "B", default = "default_b")]
    pub b: usize,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    /// μ₀ values (one-sample) or rotations of the second sample (two-sample).
    #[serde(default = "default_grid")]
    pub grid: Vec<f64>,
    #[serde(default)]
    pub two_sample: bool,
    #[serde(default = "default_methods")]
    pub methods: Vec<Method>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub workers: Option<usize>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.specs.is_empty() || self.n_grid.is_empty() || self.grid.is_empty() || self.methods.is_empty() {
            return Err(Error::Parameter("specs, n_grid, grid and methods must be non-empty".into()));
        }
        for s in &self.specs {
            s.validate()?;
        }
        check_count("reps", self.reps)?;
        check_count("B", self.b)?;
        if self.n_grid.contains(&0) {
            return Err(Error::Parameter("sample sizes must be at least 1".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Parameter(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        if self.grid.iter().any(|g| !g.is_finite()) {
            return Err(Error::Parameter("grid values must be finite".into()));
        }
        if self.workers == Some(0) {
            return Err(Error::Parameter("workers must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SizePowerRow {
    pub spec: String,
    pub n: usize,
    pub grid: f64,
    pub method: Method,
    pub reject_freq: f64,
    pub stderr: f64,
}

/// Rejection frequencies of each method at each grid point.
///
/// One-sample: samples of size n tested against μ₀ = grid value. Two-sample:
/// two samples of size n, the second rotated by the grid value. All methods
/// see the same samples within a replication.
pub fn size_power_curve(config: &ExperimentConfig, master: u64) -> Result<Vec<SizePowerRow>> {
    config.validate()?;
    let opts = BootstrapOptions::new(config.b);
    let mut rows = Vec::new();
    for spec in &config.specs {
        let sampler = Sampler::new(spec)?;
        for &n in &config.n_grid {
            for &g in &config.grid {
                let cell = tag(&format!("size_power/{}/{n}/{g}/{}", spec.label(), config.two_sample));
                let rejections: Vec<Vec<bool>> = (0..config.reps as u64)
                    .into_par_iter()
                    .map(|i| -> Result<Vec<bool>> {
                        let mut rng = substream(master, cell, i);
                        let x = sampler.sample(n, &mut rng)?;
                        let y = if config.two_sample {
                            Some(sampler.sample(n, &mut rng)?.rotated(g))
                        } else {
                            None
                        };
                        let mu0 = Angle::new(g)?;
                        config
                            .methods
                            .iter()
                            .map(|&m| {
                                let out = match (m, &y) {
                                    (Method::Quantile, None) => circle::quantile_one_sample(&x, mu0, config.alpha, &mut rng),
                                    (Method::Quantile, Some(y)) => circle::quantile_two_sample(&x, y, config.alpha, &mut rng),
                                    (Method::Bootstrap, None) => {
                                        circle::bootstrap_one_sample(&x, mu0, config.alpha, opts, &mut rng)
                                    }
                                    (Method::Bootstrap, Some(y)) => {
                                        circle::bootstrap_two_sample(&x, y, config.alpha, opts, &mut rng)
                                    }
                                };
                                Ok(out?.reject)
                            })
                            .collect()
                    })
                    .collect::<Result<_>>()?;
                for (k, &method) in config.methods.iter().enumerate() {
                    let hits = rejections.iter().filter(|r| r[k]).count();
                    let p = hits as f64 / config.reps as f64;
                    rows.push(SizePowerRow {
                        spec: spec.label(),
                        n,
                        grid: g,
                        method,
                        reject_freq: p,
                        stderr: (p * (1.0 - p) / config.reps as f64).sqrt(),
                    });
                }
            }
        }
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FssScaleRow {
    pub spec: String,
    pub n: usize,
    pub median_scale: f64,
    pub mean_scale: f64,
    pub reps: usize,
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_unstable_by(f64::total_cmp);
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

/// Median of S_FSS,n over `reps` fresh samples per (spec, n).
pub fn fss_scale_table(
    specs: &[DistributionSpec],
    n_list: &[usize],
    b: usize,
    reps: usize,
    master: u64,
) -> Result<Vec<FssScaleRow>> {
    check_count("reps", reps)?;
    let mut rows = Vec::new();
    for spec in specs {
        let sampler = Sampler::new(spec)?;
        for &n in n_list {
            let cell = tag(&format!("fss_table/{}/{n}", spec.label()));
            // replicates run sequentially; the bootstrap inside is parallel
            let mut scales = (0..reps as u64)
                .map(|i| {
                    let mut rng = substream(master, cell, i);
                    let x = sampler.sample(n, &mut rng)?;
                    Ok(fss_test(&x, b, 0.05, &mut rng)?.scale)
                })
                .collect::<Result<Vec<f64>>>()?;
            let mean_scale = scales.iter().sum::<f64>() / reps as f64;
            rows.push(FssScaleRow { spec: spec.label(), n, median_scale: median(&mut scales), mean_scale, reps });
        }
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogSmearySummary {
    pub r: f64,
    pub n: usize,
    pub reps: usize,
    /// Median of (log √n)^{1/r} · |μ̂ₙ|.
    pub median_rescaled: f64,
    pub positive_fraction: f64,
    pub median_abs_mean: f64,
}

/// Rescaled sample means of the logarithmically smeary law.
pub fn log_smeary_smoke(r: f64, n: usize, reps: usize, master: u64) -> Result<LogSmearySummary> {
    check_count("reps", reps)?;
    check_count("n", n)?;
    let sampler = Sampler::new(&DistributionSpec::LogSmeary { order_r: r })?;
    let cell = tag(&format!("log_smeary/{r}/{n}"));
    let means: Vec<f64> = (0..reps as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(master, cell, i);
            let xs = sampler.sample_sorted(n, &mut rng);
            mean_of_sorted(&xs, &mut rng).mean.radians()
        })
        .collect();
    let scale = (0.5 * (n as f64).ln()).powf(1.0 / r);
    let mut abs: Vec<f64> = means.iter().map(|m| m.abs()).collect();
    let median_abs_mean = median(&mut abs);
    Ok(LogSmearySummary {
        r,
        n,
        reps,
        median_rescaled: scale * median_abs_mean,
        positive_fraction: means.iter().filter(|&&m| m > 0.0).count() as f64 / reps as f64,
        median_abs_mean,
    })
}

/// Scaled variance at n = 1 equals σ² in expectation; convenience for checks.
pub fn single_draw_variance<R: RngCore + ?Sized>(spec: &DistributionSpec, reps: usize, rng: &mut R) -> Result<VariancePoint> {
    Ok(variance_curve(spec, &[1], reps, rng)?.points.remove(0))
}

/// A sample from `spec` for ad-hoc use.
pub fn draw<R: RngCore + ?Sized>(spec: &DistributionSpec, n: usize, rng: &mut R) -> Result<CircleSample> {
    Sampler::new(spec)?.sample(n, rng)
}
