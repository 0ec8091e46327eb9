//! One- and two-sample tests for Fréchet means on the circle and torus.
//!
//! Every statistic is a quadratic form in signed chart coordinates (see
//! [`crate::geometry::signed_residual`]). The quantile tests compare it with
//! a χ²ₖ quantile using plug-in residual dispersions; the bootstrap tests
//! replace both the dispersion and the critical value by two rounds of
//! n-out-of-n resampling.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{signed_residual, Angle, TorusPoint};
use crate::mean::{frechet_mean_torus, CircleSample, TorusSample};
use crate::resample::{self, SortedColumn};
use crate::rng::tag;
use crate::special::{chi2_quantile, chi2_sf};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Quantile,
    Bootstrap,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Quantile => "quantile",
            Method::Bootstrap => "bootstrap",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Method> {
        match s {
            "quantile" => Ok(Method::Quantile),
            "bootstrap" => Ok(Method::Bootstrap),
            other => Err(Error::Parameter(format!("unknown test method '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestOutcome {
    pub statistic: f64,
    pub critical_value: f64,
    pub p_value: f64,
    pub reject: bool,
    pub dimension_k: usize,
    pub method: Method,
    #[serde(rename = "B_used")]
    pub b_used: Option<usize>,
}

/// A symmetric positive-semidefinite k×k dispersion matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CovarianceEstimate {
    matrix: DMatrix<f64>,
}

impl CovarianceEstimate {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(Error::InvalidInput("covariance must be a non-empty square matrix".into()));
        }
        let scale = matrix.amax().max(f64::MIN_POSITIVE);
        let asym = (&matrix - matrix.transpose()).amax();
        if asym > 1e-12 * scale {
            return Err(Error::InvalidInput(format!("covariance is not symmetric (gap {asym:e})")));
        }
        let min_eig = matrix.clone().symmetric_eigenvalues().min();
        if min_eig < -1e-12 * scale {
            return Err(Error::InvalidInput(format!("covariance has negative eigenvalue {min_eig:e}")));
        }
        Ok(CovarianceEstimate { matrix })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Inverse-form evaluator, optionally after adding `ridge`·I.
    fn precision(&self, ridge: Option<f64>) -> Result<Precision> {
        let mut a = self.matrix.clone();
        if let Some(eps) = ridge {
            if !(eps >= 0.0 && eps.is_finite()) {
                return Err(Error::Parameter(format!("ridge must be finite and >= 0, got {eps}")));
            }
            for i in 0..a.nrows() {
                a[(i, i)] += eps;
            }
        }
        let eig = a.clone().symmetric_eigenvalues();
        let (lo, hi) = (eig.min(), eig.max());
        if hi.is_nan() || hi <= 0.0 || lo <= 1e-12 * hi {
            return Err(Error::DegenerateDispersion(format!(
                "dispersion matrix is singular (eigenvalues in [{lo:e}, {hi:e}])"
            )));
        }
        let chol = a
            .cholesky()
            .ok_or_else(|| Error::DegenerateDispersion("Cholesky factorization failed".into()))?;
        Ok(Precision { chol })
    }
}

struct Precision {
    chol: nalgebra::Cholesky<f64, nalgebra::Dyn>,
}

impl Precision {
    /// vᵀ A⁻¹ v.
    fn form(&self, v: &DVector<f64>) -> f64 {
        let x = self.chol.solve(v);
        v.dot(&x).max(0.0)
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Parameter(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    Ok(())
}

/// Signed chart coordinates of `p` at `base`, coordinatewise.
fn chart(base: &TorusPoint, p: &[Angle]) -> DVector<f64> {
    DVector::from_iterator(
        p.len(),
        base.coords().iter().zip(p).map(|(&b, &x)| signed_residual(b, x)),
    )
}

/// Σ rrᵀ of residuals at `mean`, not normalized.
fn residual_scatter(sample: &TorusSample, mean: &TorusPoint) -> DMatrix<f64> {
    let k = sample.dim();
    let cols: Vec<Vec<f64>> = sample
        .marginals()
        .iter()
        .zip(mean.coords())
        .map(|(c, &m)| c.points().iter().map(|&x| signed_residual(m, x)).collect())
        .collect();
    DMatrix::from_fn(k, k, |i, j| cols[i].iter().zip(&cols[j]).map(|(a, b)| a * b).sum())
}

fn chi2_outcome(statistic: f64, k: usize, alpha: f64) -> Result<TestOutcome> {
    let critical_value = chi2_quantile(k, 1.0 - alpha)?;
    Ok(TestOutcome {
        statistic,
        critical_value,
        p_value: chi2_sf(k, statistic).max(f64::MIN_POSITIVE),
        reject: statistic >= critical_value,
        dimension_k: k,
        method: Method::Quantile,
        b_used: None,
    })
}

fn check_dims(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::Dimension { expected: a, got: b });
    }
    Ok(())
}

/// T¹ = n·δᵀΣ̂⁻¹δ with δ the chart coordinate of μ̂ₙ at μ₀ and Σ̂ the
/// residual second-moment matrix at μ̂ₙ (V̂ₙ on the circle).
pub fn quantile_one_sample<R: RngCore + ?Sized>(
    sample: &TorusSample,
    mu0: &TorusPoint,
    alpha: f64,
    rng: &mut R,
) -> Result<TestOutcome> {
    check_alpha(alpha)?;
    check_dims(sample.dim(), mu0.dim())?;
    let n = sample.len() as f64;
    let mean = frechet_mean_torus(sample, rng).mean;
    let sigma = CovarianceEstimate::new(residual_scatter(sample, &mean) / n)?;
    let delta = chart(mu0, mean.coords());
    let t = n * sigma.precision(None)?.form(&delta);
    chi2_outcome(t, sample.dim(), alpha)
}

/// T² = δᵀ(Σ̂_pool (1/n + 1/m))⁻¹δ, δ the chart coordinate of μ̂(X) at
/// μ̂(Y), Σ̂_pool the residual scatter of both samples about their own
/// means divided by n + m.
pub fn quantile_two_sample<R: RngCore + ?Sized>(
    x: &TorusSample,
    y: &TorusSample,
    alpha: f64,
    rng: &mut R,
) -> Result<TestOutcome> {
    check_alpha(alpha)?;
    check_dims(x.dim(), y.dim())?;
    let (n, m) = (x.len() as f64, y.len() as f64);
    let mx = frechet_mean_torus(x, rng).mean;
    let my = frechet_mean_torus(y, rng).mean;
    let pooled = (residual_scatter(x, &mx) + residual_scatter(y, &my)) / (n + m);
    let sigma = CovarianceEstimate::new(pooled * (1.0 / n + 1.0 / m))?;
    let delta = chart(&my, mx.coords());
    let t = sigma.precision(None)?.form(&delta);
    chi2_outcome(t, x.dim(), alpha)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BootstrapOptions {
    #[serde(rename = "B")]
    pub b: usize,
    /// Adds ridge·I to singular dispersions instead of failing.
    pub ridge: Option<f64>,
}

impl Default for BootstrapOptions {
    fn default() -> Self {
        BootstrapOptions { b: 1000, ridge: None }
    }
}

impl BootstrapOptions {
    pub fn new(b: usize) -> Self {
        BootstrapOptions { b, ridge: None }
    }

    fn check(&self) -> Result<()> {
        if self.b < 100 {
            return Err(Error::Parameter(format!("bootstrap size B must be at least 100, got {}", self.b)));
        }
        Ok(())
    }
}

/// Both bootstrap rounds of one sample.
#[derive(Clone, Debug)]
pub struct BootstrapSummary {
    pub n: usize,
    pub mean: TorusPoint,
    /// Round 1: covariance of the chart images of the bootstrap means at μ̂.
    pub sigma: CovarianceEstimate,
    /// Round 2: chart coordinates of fresh bootstrap means at μ̂.
    pub deviations: Vec<DVector<f64>>,
}

/// Draws the sample mean's tie seeds, then one master seed for both
/// resampling rounds.
pub fn bootstrap_summary<R: RngCore + ?Sized>(sample: &TorusSample, b: usize, rng: &mut R) -> Result<BootstrapSummary> {
    BootstrapOptions::new(b).check()?;
    let k = sample.dim();
    let mean = frechet_mean_torus(sample, rng).mean;
    let master = rng.next_u64();
    let cols: Vec<SortedColumn> = sample.marginals().iter().map(SortedColumn::new).collect();

    let round1: Vec<DVector<f64>> = resample::bootstrap_means(&cols, b, master, tag("inference/round1"))
        .iter()
        .map(|row| chart(&mean, row))
        .collect();
    let bf = b as f64;
    let center = round1.iter().fold(DVector::zeros(k), |acc, v| acc + v) / bf;
    let mut cov = DMatrix::zeros(k, k);
    for v in &round1 {
        let d = v - &center;
        cov += &d * d.transpose();
    }
    cov /= bf;
    // exact symmetry for the eigen check
    let cov = (&cov + cov.transpose()) * 0.5;

    let deviations = resample::bootstrap_means(&cols, b, master, tag("inference/round2"))
        .iter()
        .map(|row| chart(&mean, row))
        .collect();
    Ok(BootstrapSummary { n: sample.len(), mean, sigma: CovarianceEstimate::new(cov)?, deviations })
}

/// Order statistic T*_(j) with j = ⌈(1-α)B⌉.
fn bootstrap_critical(stats: &mut [f64], alpha: f64) -> f64 {
    stats.sort_unstable_by(f64::total_cmp);
    let b = stats.len();
    let j = (((1.0 - alpha) * b as f64) - 1e-9).ceil().clamp(1.0, b as f64) as usize;
    stats[j - 1]
}

fn bootstrap_outcome(statistic: f64, mut stats: Vec<f64>, alpha: f64, k: usize) -> TestOutcome {
    let b = stats.len();
    let exceed = stats.iter().filter(|&&t| t >= statistic).count();
    let critical_value = bootstrap_critical(&mut stats, alpha);
    TestOutcome {
        statistic,
        critical_value,
        p_value: (1 + exceed) as f64 / (b + 1) as f64,
        reject: statistic >= critical_value,
        dimension_k: k,
        method: Method::Bootstrap,
        b_used: Some(b),
    }
}

pub fn bootstrap_one_sample<R: RngCore + ?Sized>(
    sample: &TorusSample,
    mu0: &TorusPoint,
    alpha: f64,
    opts: BootstrapOptions,
    rng: &mut R,
) -> Result<TestOutcome> {
    check_alpha(alpha)?;
    opts.check()?;
    check_dims(sample.dim(), mu0.dim())?;
    let s = bootstrap_summary(sample, opts.b, rng)?;
    let prec = s.sigma.precision(opts.ridge)?;
    let stats: Vec<f64> = s.deviations.iter().map(|d| prec.form(d)).collect();
    let t = prec.form(&chart(mu0, s.mean.coords()));
    Ok(bootstrap_outcome(t, stats, alpha, sample.dim()))
}

/// Two-sample bootstrap test from precomputed per-sample summaries.
/// Swapping the arguments leaves the outcome unchanged.
pub fn bootstrap_two_sample_from(
    x: &BootstrapSummary,
    y: &BootstrapSummary,
    alpha: f64,
    ridge: Option<f64>,
) -> Result<TestOutcome> {
    check_alpha(alpha)?;
    check_dims(x.mean.dim(), y.mean.dim())?;
    if x.deviations.len() != y.deviations.len() {
        return Err(Error::Parameter("both samples need the same bootstrap size".into()));
    }
    let a = CovarianceEstimate::new(x.sigma.matrix() + y.sigma.matrix())?;
    let prec = a.precision(ridge)?;
    let stats: Vec<f64> = x
        .deviations
        .iter()
        .zip(&y.deviations)
        .map(|(dx, dy)| prec.form(&(dx - dy)))
        .collect();
    let t = prec.form(&chart(&y.mean, x.mean.coords()));
    Ok(bootstrap_outcome(t, stats, alpha, x.mean.dim()))
}

pub fn bootstrap_two_sample<R: RngCore + ?Sized>(
    x: &TorusSample,
    y: &TorusSample,
    alpha: f64,
    opts: BootstrapOptions,
    rng: &mut R,
) -> Result<TestOutcome> {
    check_alpha(alpha)?;
    opts.check()?;
    check_dims(x.dim(), y.dim())?;
    let sx = bootstrap_summary(x, opts.b, rng)?;
    let sy = bootstrap_summary(y, opts.b, rng)?;
    bootstrap_two_sample_from(&sx, &sy, alpha, opts.ridge)
}

/// Circle convenience wrappers.
pub mod circle {
    use super::*;

    pub fn quantile_one_sample<R: RngCore + ?Sized>(
        sample: &CircleSample,
        mu0: Angle,
        alpha: f64,
        rng: &mut R,
    ) -> Result<TestOutcome> {
        super::quantile_one_sample(&TorusSample::from(sample.clone()), &mu0.into(), alpha, rng)
    }

    pub fn quantile_two_sample<R: RngCore + ?Sized>(
        x: &CircleSample,
        y: &CircleSample,
        alpha: f64,
        rng: &mut R,
    ) -> Result<TestOutcome> {
        super::quantile_two_sample(&x.clone().into(), &y.clone().into(), alpha, rng)
    }

    pub fn bootstrap_one_sample<R: RngCore + ?Sized>(
        sample: &CircleSample,
        mu0: Angle,
        alpha: f64,
        opts: BootstrapOptions,
        rng: &mut R,
    ) -> Result<TestOutcome> {
        super::bootstrap_one_sample(&sample.clone().into(), &mu0.into(), alpha, opts, rng)
    }

    pub fn bootstrap_two_sample<R: RngCore + ?Sized>(
        x: &CircleSample,
        y: &CircleSample,
        alpha: f64,
        opts: BootstrapOptions,
        rng: &mut R,
    ) -> Result<TestOutcome> {
        super::bootstrap_two_sample(&x.clone().into(), &y.clone().into(), alpha, opts, rng)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BhResult {
    pub reject: Vec<bool>,
    pub adjusted: Vec<f64>,
}

/// Benjamini–Hochberg step-up procedure, in input order.
pub fn bh_adjust(p_values: &[f64], alpha: f64) -> Result<BhResult> {
    check_alpha(alpha)?;
    if let Some(&bad) = p_values.iter().find(|&&p| !(p > 0.0 && p <= 1.0)) {
        return Err(Error::Parameter(format!("p-values must lie in (0, 1], got {bad}")));
    }
    let m = p_values.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| p_values[a].total_cmp(&p_values[b]));
    let k = (1..=m)
        .rev()
        .find(|&i| p_values[order[i - 1]] <= alpha * i as f64 / m as f64)
        .unwrap_or(0);
    let mut reject = vec![false; m];
    for &idx in &order[..k] {
        reject[idx] = true;
    }
    let mut adjusted = vec![0.0; m];
    let mut running = 1.0f64;
    for i in (1..=m).rev() {
        let idx = order[i - 1];
        running = running.min(p_values[idx] * m as f64 / i as f64);
        adjusted[idx] = running.min(1.0);
    }
    Ok(BhResult { reject, adjusted })
}
