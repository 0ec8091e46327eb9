//! Finite sample smeariness: the bootstrap scale S = n·V̂*/V̂ₙ, the test for
//! the presence of FSS, and a heuristic description of the FSS window of a
//! scaled-variance curve.

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Angle;
use crate::mean::{frechet_mean_circle, CircleSample};
use crate::resample::{self, SortedColumn};
use crate::rng::tag;
use crate::special::{normal_quantile, normal_sf};

/// Dispersion of bootstrap means about their own Fréchet mean.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BootstrapMoments {
    #[serde(rename = "B")]
    pub b: usize,
    pub bootstrap_means: Vec<Angle>,
    /// μ̂*, the Fréchet mean of the bootstrap means.
    pub center: Angle,
    /// V̂* = (1/B) Σ d(μ̂*, μ*_b)².
    pub v_star: f64,
    /// Ŵ* = (1/B) Σ d(μ̂*, μ*_b)⁴.
    pub w_star: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FssReport {
    pub n: usize,
    #[serde(rename = "B")]
    pub b: usize,
    pub scale: f64,
    pub threshold: f64,
    #[serde(rename = "reject")]
    pub reject_absence: bool,
    pub p_value: f64,
}

/// Heuristic power-law window of a rising scaled-variance curve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FssWindow {
    pub n_minus: usize,
    pub n_plus: usize,
    pub r_minus: f64,
    pub r_plus: f64,
    pub c_minus: f64,
    pub c_plus: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum FssWindowOutcome {
    Detected(FssWindow),
    NotDetected,
}

fn check_b(b: usize, min: usize) -> Result<()> {
    if b < min {
        return Err(Error::Parameter(format!("bootstrap size B must be at least {min}, got {b}")));
    }
    Ok(())
}

/// B Fréchet means of n-out-of-n resamples. Draws one `u64` from `rng`;
/// replicate streams are derived from it by counter.
pub fn bootstrap_means<R: RngCore + ?Sized>(sample: &CircleSample, b: usize, rng: &mut R) -> Result<Vec<Angle>> {
    check_b(b, 2)?;
    let master = rng.next_u64();
    Ok(resample::bootstrap_means(&[SortedColumn::new(sample)], b, master, tag("fss/bootstrap"))
        .into_iter()
        .map(|row| row[0])
        .collect())
}

pub fn bootstrap_moments<R: RngCore + ?Sized>(means: &[Angle], rng: &mut R) -> Result<BootstrapMoments> {
    check_b(means.len(), 2)?;
    let m = frechet_mean_circle(&CircleSample::new(means.to_vec())?, rng);
    Ok(BootstrapMoments {
        b: means.len(),
        bootstrap_means: means.to_vec(),
        center: m.mean,
        v_star: m.frechet_variance,
        w_star: m.fourth_moment,
    })
}

/// S = n·V̂*/V̂ₙ.
pub fn fss_scale(v_star: f64, v_n: f64, n: usize) -> Result<f64> {
    if v_n.is_nan() || v_n <= 0.0 {
        return Err(Error::DegenerateSample(format!(
            "sample Fréchet variance must be positive, got {v_n}"
        )));
    }
    Ok(n as f64 * v_star / v_n)
}

/// Test for the presence of FSS at sample size n.
///
/// Rejects the absence of FSS when S − 1 exceeds
/// h = z₁₋α · (n/√B) · √(Ŵ* − V̂*²)/V̂ₙ. The p-value uses the same normal
/// approximation and is floored at 1/B.
pub fn fss_test<R: RngCore + ?Sized>(sample: &CircleSample, b: usize, alpha: f64, rng: &mut R) -> Result<FssReport> {
    check_b(b, 100)?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Parameter(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let n = sample.len();
    let v_n = frechet_mean_circle(sample, rng).frechet_variance;
    if v_n == 0.0 {
        return Err(Error::DegenerateSample("all sample points coincide".into()));
    }
    let means = bootstrap_means(sample, b, rng)?;
    let mom = bootstrap_moments(&means, rng)?;
    let scale = fss_scale(mom.v_star, v_n, n)?;
    let z = normal_quantile(1.0 - alpha)?;
    let gap = (mom.w_star - mom.v_star * mom.v_star).max(0.0);
    let sd = n as f64 / (b as f64).sqrt() * gap.sqrt() / v_n;
    let threshold = z * sd;
    let excess = scale - 1.0;
    let p_raw = if sd > 0.0 {
        normal_sf(excess / sd)
    } else if excess > 0.0 {
        0.0
    } else if excess == 0.0 {
        0.5
    } else {
        1.0
    };
    Ok(FssReport {
        n,
        b,
        scale,
        threshold,
        reject_absence: excess > threshold,
        p_value: p_raw.max(1.0 / b as f64),
    })
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

const MIN_WINDOW: usize = 4;

/// Heuristic FSS window of a curve (n, n·E[d(μ̂ₙ, μ)²]).
///
/// The window starts at the smallest n, extends while the curve stays above
/// its starting value, and ends where the rise reaches 95% of its maximum.
/// Local log-log slopes s over 4-point windows give r = s/(1 − s).
pub fn classify_fss_window(curve: &[(usize, f64)]) -> Result<FssWindowOutcome> {
    if curve.len() < MIN_WINDOW {
        return Err(Error::Parameter(format!(
            "curve needs at least {MIN_WINDOW} points, got {}",
            curve.len()
        )));
    }
    if curve.windows(2).any(|w| w[1].0 <= w[0].0) || curve[0].0 == 0 {
        return Err(Error::Parameter("sample sizes must be positive and strictly increasing".into()));
    }
    if curve.iter().any(|p| !(p.1 > 0.0 && p.1.is_finite())) {
        return Err(Error::Parameter("scaled variances must be positive and finite".into()));
    }
    let base = curve[0].1;
    let above = curve[1..].iter().take_while(|p| p.1 > base).count();
    let head = &curve[..=above];
    let peak = head.iter().map(|p| p.1).fold(base, f64::max);
    let end = head
        .iter()
        .position(|p| p.1 >= base + 0.95 * (peak - base))
        .unwrap_or(above);
    let win = &head[..=end];
    if win.len() < MIN_WINDOW {
        return Ok(FssWindowOutcome::NotDetected);
    }
    let lx: Vec<f64> = win.iter().map(|p| (p.0 as f64).ln()).collect();
    let ly: Vec<f64> = win.iter().map(|p| p.1.ln()).collect();
    let slopes: Vec<f64> = (0..=win.len() - MIN_WINDOW)
        .map(|i| slope(&lx[i..i + MIN_WINDOW], &ly[i..i + MIN_WINDOW]))
        .collect();
    let s_min = slopes.iter().copied().fold(f64::INFINITY, f64::min);
    let s_max = slopes.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if s_min <= 0.0 {
        return Ok(FssWindowOutcome::NotDetected);
    }
    const S_CAP: f64 = 1.0 - 1e-9;
    let (s_lo, s_hi) = (s_min.min(S_CAP), s_max.min(S_CAP));
    let c_minus = win.iter().map(|p| p.1 / (p.0 as f64).powf(s_lo)).fold(f64::INFINITY, f64::min);
    let c_plus = win.iter().map(|p| p.1 / (p.0 as f64).powf(s_hi)).fold(0.0, f64::max);
    let n_minus = win[0].0;
    let n_plus = win[win.len() - 1].0;
    let lhs = c_plus * (n_minus as f64).powf(s_hi);
    let rhs = c_minus * (n_plus as f64).powf(s_lo);
    if lhs > rhs * (1.0 + 1e-12) {
        return Ok(FssWindowOutcome::NotDetected);
    }
    Ok(FssWindowOutcome::Detected(FssWindow {
        n_minus,
        n_plus,
        r_minus: s_lo / (1.0 - s_lo),
        r_plus: s_hi / (1.0 - s_hi),
        c_minus,
        c_plus,
    }))
}
