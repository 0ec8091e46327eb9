//! Sample Fréchet means on the circle and the torus.
//!
//! On the circle every local minimizer of the sample Fréchet function
//! Fₙ(x) = (1/n) Σ d(x, Xⱼ)² is one of the n points θ̄ + 2πk/n, where θ̄ is
//! the plain average of the representatives in [-π, π). At such a point the
//! data are lifted to the window [x-π, x+π) and x is their Euclidean mean.
//! With the data sorted, the lift at any x is a prefix or suffix of the
//! sorted array, so Fₙ on all candidates costs O(n log n).
//!
//! On the torus with the product metric the Fréchet function separates,
//! and means are computed coordinate by coordinate.

use std::f64::consts::PI;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{circle_dist, signed_residual, wrap_angle, Angle, TorusPoint, TAU};
use crate::rng::index_from_u64;

/// Relative tolerance under which two Fréchet function values count as tied.
pub const TIE_RTOL: f64 = 1e-9;
const TIE_ATOL: f64 = 1e-18;
/// Minimizers closer than this are merged.
const DEDUP_TOL: f64 = 1e-9;
/// Candidates whose prefix-sum value is this close to the best one are
/// re-evaluated directly.
const REFINE_RTOL: f64 = 1e-6;
const REFINE_MAX_N: usize = 4096;
const REFINE_MAX_COUNT: usize = 64;

/// A non-empty sample of angles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Angle>", into = "Vec<Angle>")]
pub struct CircleSample {
    points: Vec<Angle>,
}

impl CircleSample {
    pub fn new(points: Vec<Angle>) -> Result<CircleSample> {
        if points.is_empty() {
            return Err(Error::EmptyInput("circle sample has no points".into()));
        }
        Ok(CircleSample { points })
    }

    pub fn from_radians(xs: &[f64]) -> Result<CircleSample> {
        CircleSample::new(xs.iter().map(|&x| wrap_angle(x)).collect::<Result<_>>()?)
    }

    pub fn from_degrees(xs: &[f64]) -> Result<CircleSample> {
        CircleSample::new(xs.iter().map(|&x| Angle::from_degrees(x)).collect::<Result<_>>()?)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn points(&self) -> &[Angle] {
        &self.points
    }

    pub fn radians(&self) -> Vec<f64> {
        self.points.iter().map(|a| a.radians()).collect()
    }

    /// Sorted radians, the working representation of the mean routines.
    pub fn sorted_radians(&self) -> Vec<f64> {
        let mut v = self.radians();
        v.sort_unstable_by(f64::total_cmp);
        v
    }

    pub fn rotated(&self, delta: f64) -> CircleSample {
        CircleSample { points: self.points.iter().map(|a| a.rotate(delta)).collect() }
    }
}

impl TryFrom<Vec<Angle>> for CircleSample {
    type Error = Error;

    fn try_from(v: Vec<Angle>) -> Result<CircleSample> {
        CircleSample::new(v)
    }
}

impl From<CircleSample> for Vec<Angle> {
    fn from(s: CircleSample) -> Vec<Angle> {
        s.points
    }
}

/// A non-empty sample on the m-torus, stored as its m marginal samples.
#[derive(Clone, Debug, PartialEq)]
pub struct TorusSample {
    marginals: Vec<CircleSample>,
}

impl TorusSample {
    pub fn new(points: &[TorusPoint]) -> Result<TorusSample> {
        let first = points
            .first()
            .ok_or_else(|| Error::EmptyInput("torus sample has no points".into()))?;
        let m = first.dim();
        let mut cols = vec![Vec::with_capacity(points.len()); m];
        for p in points {
            if p.dim() != m {
                return Err(Error::Dimension { expected: m, got: p.dim() });
            }
            for (col, &a) in cols.iter_mut().zip(p.coords()) {
                col.push(a);
            }
        }
        TorusSample::from_marginals(cols.into_iter().map(CircleSample::new).collect::<Result<_>>()?)
    }

    /// Builds a sample from columns of equal length.
    pub fn from_marginals(marginals: Vec<CircleSample>) -> Result<TorusSample> {
        let first = marginals
            .first()
            .ok_or_else(|| Error::EmptyInput("torus sample needs at least one coordinate".into()))?;
        let n = first.len();
        if let Some(bad) = marginals.iter().find(|c| c.len() != n) {
            return Err(Error::Dimension { expected: n, got: bad.len() });
        }
        Ok(TorusSample { marginals })
    }

    pub fn dim(&self) -> usize {
        self.marginals.len()
    }

    pub fn len(&self) -> usize {
        self.marginals[0].len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn marginals(&self) -> &[CircleSample] {
        &self.marginals
    }

    pub fn point(&self, i: usize) -> TorusPoint {
        TorusPoint::new(self.marginals.iter().map(|c| c.points[i]).collect())
            .expect("torus sample has at least one coordinate")
    }

    pub fn points(&self) -> Vec<TorusPoint> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }

    pub fn rotated(&self, delta: &[f64]) -> Result<TorusSample> {
        if delta.len() != self.dim() {
            return Err(Error::Dimension { expected: self.dim(), got: delta.len() });
        }
        Ok(TorusSample {
            marginals: self.marginals.iter().zip(delta).map(|(c, &d)| c.rotated(d)).collect(),
        })
    }
}

impl From<CircleSample> for TorusSample {
    fn from(c: CircleSample) -> TorusSample {
        TorusSample { marginals: vec![c] }
    }
}

/// Sample Fréchet mean on the circle with its tie set and empirical moments.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircleMean {
    pub mean: Angle,
    /// Every global minimizer of Fₙ, sorted; contains `mean`.
    pub tied_minimizers: Vec<Angle>,
    /// V̂ₙ = Fₙ(mean).
    pub frechet_variance: f64,
    /// Ŵₙ = (1/n) Σ d(mean, Xⱼ)⁴.
    pub fourth_moment: f64,
    /// The u64 drawn from the caller's stream to pick among ties.
    pub selection_seed_used: u64,
}

/// Sample Fréchet mean on the torus.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusMean {
    pub mean: TorusPoint,
    /// Per-coordinate results; the tie set is their Cartesian product.
    pub marginals: Vec<CircleMean>,
    /// Sum of the coordinate Fréchet variances.
    pub frechet_variance: f64,
    /// (1/n) Σ d(mean, Xⱼ)⁴ in the product metric.
    pub fourth_moment: f64,
    pub selection_seeds_used: Vec<u64>,
}

impl TorusMean {
    pub fn tie_count(&self) -> usize {
        self.marginals.iter().map(|m| m.tied_minimizers.len()).product()
    }

    /// The full Cartesian tie set, in lexicographic order.
    pub fn tied_minimizers(&self) -> Vec<TorusPoint> {
        let mut out: Vec<Vec<Angle>> = vec![Vec::new()];
        for m in &self.marginals {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    m.tied_minimizers.iter().map(move |&a| {
                        let mut p = prefix.clone();
                        p.push(a);
                        p
                    })
                })
                .collect();
        }
        out.into_iter()
            .map(|c| TorusPoint::new(c).expect("non-empty"))
            .collect()
    }
}

/// Fₙ(x) = (1/n) Σ d(x, Xⱼ)².
pub fn frechet_value(sample: &CircleSample, x: Angle) -> f64 {
    let n = sample.len() as f64;
    sample.points.iter().map(|&p| circle_dist(x, p).powi(2)).sum::<f64>() / n
}

/// Fₙ on the torus with the product metric.
pub fn frechet_value_torus(sample: &TorusSample, x: &TorusPoint) -> Result<f64> {
    if x.dim() != sample.dim() {
        return Err(Error::Dimension { expected: sample.dim(), got: x.dim() });
    }
    Ok(sample
        .marginals
        .iter()
        .zip(x.coords())
        .map(|(c, &a)| frechet_value(c, a))
        .sum())
}

fn direct_value(sorted: &[f64], x: f64) -> f64 {
    let x = Angle::wrap_finite(x);
    sorted
        .iter()
        .map(|&a| signed_residual(x, Angle::wrap_finite(a)).powi(2))
        .sum::<f64>()
        / sorted.len() as f64
}

fn mean_residual(sorted: &[f64], x: Angle) -> f64 {
    sorted
        .iter()
        .map(|&a| signed_residual(x, Angle::wrap_finite(a)))
        .sum::<f64>()
        / sorted.len() as f64
}

/// Stationary candidates θ̄ + 2πk/n followed by the data antipodes.
pub fn circle_mean_candidates(sample: &CircleSample) -> Vec<Angle> {
    let n = sample.len();
    let theta_bar = sample.points.iter().map(|a| a.radians()).sum::<f64>() / n as f64;
    let mut out: Vec<Angle> = (0..n)
        .map(|k| Angle::wrap_finite(theta_bar + TAU * k as f64 / n as f64))
        .collect();
    out.extend(sample.points.iter().map(|a| a.antipode()));
    out
}

/// Prefix sums over sorted data for O(log n) evaluation of Fₙ.
struct Prefix<'a> {
    sorted: &'a [f64],
    s1: Vec<f64>,
    s2: Vec<f64>,
}

impl<'a> Prefix<'a> {
    fn new(sorted: &'a [f64]) -> Self {
        let mut s1 = Vec::with_capacity(sorted.len() + 1);
        let mut s2 = Vec::with_capacity(sorted.len() + 1);
        let (mut a1, mut a2) = (0.0, 0.0);
        s1.push(0.0);
        s2.push(0.0);
        for &a in sorted {
            a1 += a;
            a2 += a * a;
            s1.push(a1);
            s2.push(a2);
        }
        Prefix { sorted, s1, s2 }
    }

    fn n(&self) -> usize {
        self.sorted.len()
    }

    fn below(&self, t: f64) -> usize {
        self.sorted.partition_point(|&a| a < t)
    }

    /// Signed lift count at x: points lifted by +2π count positive,
    /// points lifted by -2π negative.
    fn lift(&self, x: f64) -> i64 {
        if x >= 0.0 {
            self.below(x - PI) as i64
        } else {
            -((self.n() - self.below(x + PI)) as i64)
        }
    }

    fn value(&self, x: f64) -> f64 {
        let n = self.n();
        let (tot1, tot2) = (self.s1[n], self.s2[n]);
        let (sy, sy2) = if x >= 0.0 {
            let c = self.below(x - PI);
            let p1 = self.s1[c];
            let cf = c as f64;
            (tot1 + TAU * cf, tot2 + 2.0 * TAU * p1 + TAU * TAU * cf)
        } else {
            let idx = self.below(x + PI);
            let cf = (n - idx) as f64;
            let p1 = tot1 - self.s1[idx];
            (tot1 - TAU * cf, tot2 - 2.0 * TAU * p1 + TAU * TAU * cf)
        };
        let nf = n as f64;
        ((nf * x * x - 2.0 * x * sy + sy2) / nf).max(0.0)
    }
}

/// Exact Fréchet mean of sorted radians in [-π, π).
///
/// Draws exactly one `u64` from `rng`.
pub(crate) fn mean_of_sorted<R: RngCore + ?Sized>(sorted: &[f64], rng: &mut R) -> CircleMean {
    let n = sorted.len();
    debug_assert!(n > 0);
    let seed = rng.next_u64();
    let prefix = Prefix::new(sorted);
    let nf = n as f64;
    let theta_bar = prefix.s1[n] / nf;

    let stationary = |x: f64| {
        let l = prefix.lift(x);
        let target = Angle::wrap_finite(theta_bar + TAU * l as f64 / nf);
        circle_dist(target, Angle::wrap_finite(x)) < PI / nf
    };

    let lattice = (0..n).map(|k| theta_bar + TAU * k as f64 / nf);
    let antipodes = sorted.iter().map(|&a| a + PI);
    let all: Vec<f64> = lattice.chain(antipodes).map(|x| Angle::wrap_finite(x).radians()).collect();
    let mut cands: Vec<f64> = all.iter().copied().filter(|&x| stationary(x)).collect();
    if cands.is_empty() {
        cands = all;
    }

    let fast: Vec<f64> = cands.iter().map(|&x| prefix.value(x)).collect();
    let best_fast = fast.iter().copied().fold(f64::INFINITY, f64::min);
    let near: Vec<usize> = (0..cands.len())
        .filter(|&i| fast[i] <= best_fast * (1.0 + REFINE_RTOL) + 1e-14)
        .collect();

    // Newton-polish near-optimal candidates and evaluate them directly
    // when that is affordable.
    let refine = n <= REFINE_MAX_N || near.len() <= REFINE_MAX_COUNT;
    let mut scored: Vec<(f64, f64)> = near
        .into_iter()
        .map(|i| {
            if refine {
                let x = Angle::wrap_finite(cands[i]);
                let polished = x.rotate(mean_residual(sorted, x)).radians();
                (polished, direct_value(sorted, polished))
            } else {
                (cands[i], fast[i])
            }
        })
        .collect();

    let best = scored.iter().map(|s| s.1).fold(f64::INFINITY, f64::min);
    scored.retain(|s| s.1 <= best + TIE_RTOL * best + TIE_ATOL);
    scored.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));

    let mut ties: Vec<Angle> = Vec::with_capacity(scored.len());
    for &(x, _) in &scored {
        let a = Angle::wrap_finite(x);
        if ties.iter().all(|&t| circle_dist(t, a) > DEDUP_TOL) {
            ties.push(a);
        }
    }

    let mean = ties[index_from_u64(seed, ties.len())];
    let (v, w) = moments_at(sorted, mean);
    CircleMean {
        mean,
        tied_minimizers: ties,
        frechet_variance: v,
        fourth_moment: w,
        selection_seed_used: seed,
    }
}

/// (V, W) = ((1/n) Σ d², (1/n) Σ d⁴) about `x`.
fn moments_at(sorted: &[f64], x: Angle) -> (f64, f64) {
    let (mut s2, mut s4) = (0.0, 0.0);
    for &a in sorted {
        let d2 = circle_dist(x, Angle::wrap_finite(a)).powi(2);
        s2 += d2;
        s4 += d2 * d2;
    }
    let nf = sorted.len() as f64;
    (s2 / nf, s4 / nf)
}

/// Exact sample Fréchet mean; ties are broken uniformly using one draw
/// from `rng`.
pub fn frechet_mean_circle<R: RngCore + ?Sized>(sample: &CircleSample, rng: &mut R) -> CircleMean {
    mean_of_sorted(&sample.sorted_radians(), rng)
}

/// Coordinatewise Fréchet mean on the torus. Draws one `u64` per coordinate.
pub fn frechet_mean_torus<R: RngCore + ?Sized>(sample: &TorusSample, rng: &mut R) -> TorusMean {
    let marginals: Vec<CircleMean> =
        sample.marginals.iter().map(|c| frechet_mean_circle(c, rng)).collect();
    let mean = TorusPoint::new(marginals.iter().map(|m| m.mean).collect()).expect("non-empty");
    let n = sample.len();
    let mut w = 0.0;
    for i in 0..n {
        let d2: f64 = sample
            .marginals
            .iter()
            .zip(&marginals)
            .map(|(c, m)| circle_dist(m.mean, c.points[i]).powi(2))
            .sum();
        w += d2 * d2;
    }
    TorusMean {
        mean,
        frechet_variance: marginals.iter().map(|m| m.frechet_variance).sum(),
        fourth_moment: w / n as f64,
        selection_seeds_used: marginals.iter().map(|m| m.selection_seed_used).collect(),
        marginals,
    }
}

/// Convenience wrapper taking a list of torus points.
pub fn frechet_mean_torus_points<R: RngCore + ?Sized>(
    points: &[TorusPoint],
    rng: &mut R,
) -> Result<TorusMean> {
    Ok(frechet_mean_torus(&TorusSample::new(points)?, rng))
}

/// Result of the brute-force grid search.
#[derive(Clone, Debug, PartialEq)]
pub struct GridOracle {
    pub argmin: Vec<Angle>,
    pub min_value: f64,
}

/// Brute-force minimization of Fₙ over {-π + 2πi/grid_size}.
///
/// A grid point is kept when its value is within the discretization error
/// of the minimum: Fₙ has curvature at most 2, so a point half a step away
/// from a true minimizer is off by at most step²/4.
pub fn grid_oracle_mean(sample: &CircleSample, grid_size: usize) -> Result<GridOracle> {
    if grid_size < 10 {
        return Err(Error::Parameter(format!("grid_size must be at least 10, got {grid_size}")));
    }
    let step = TAU / grid_size as f64;
    let values: Vec<f64> = (0..grid_size)
        .map(|i| frechet_value(sample, Angle::wrap_finite(-PI + step * i as f64)))
        .collect();
    let min_value = values.iter().copied().fold(f64::INFINITY, f64::min);
    let tol = TIE_RTOL * min_value + step * step;
    let argmin = values
        .iter()
        .enumerate()
        .filter(|(_, &v)| v <= min_value + tol)
        .map(|(i, _)| Angle::wrap_finite(-PI + step * i as f64))
        .collect();
    Ok(GridOracle { argmin, min_value })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;
    use proptest::prelude::*;

    fn cs(xs: &[f64]) -> CircleSample {
        CircleSample::from_radians(xs).unwrap()
    }

    fn rng() -> crate::rng::StreamRng {
        substream(11, 0, 0)
    }

    #[test]
    fn empty_sample_rejected() {
        assert!(matches!(CircleSample::new(vec![]), Err(Error::EmptyInput(_))));
        assert!(TorusSample::new(&[]).is_err());
    }

    #[test]
    fn frechet_value_examples() {
        assert!((frechet_value(&cs(&[PI / 2.0, -PI / 2.0]), Angle::ZERO) - PI * PI / 4.0).abs() < 1e-15);
        assert_eq!(frechet_value(&cs(&[0.5]), Angle::new(0.5).unwrap()), 0.0);
        let v = frechet_value(&cs(&[0.1, 0.2, 0.3]), Angle::new(0.2).unwrap());
        assert!((v - 0.02 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn candidate_examples() {
        let c = circle_mean_candidates(&cs(&[0.5]));
        assert_eq!(c.len(), 2);
        assert_eq!(c[0].radians(), 0.5);
        assert!((c[1].radians() - (0.5 - PI)).abs() < 1e-15);

        let c = circle_mean_candidates(&cs(&[0.1, 0.3]));
        assert!(c.iter().any(|a| (a.radians() - 0.2).abs() < 1e-15));
        assert!(c.iter().any(|a| circle_dist(*a, Angle::new(0.2 + PI).unwrap()) < 1e-15));

        let six: Vec<f64> = (0..6).map(|j| -PI + TAU * j as f64 / 6.0).collect();
        let c = circle_mean_candidates(&cs(&six));
        for j in 1..=6 {
            let mid = Angle::new(-PI + TAU * (2 * j - 1) as f64 / 12.0).unwrap();
            assert!(c.iter().any(|&a| circle_dist(a, mid) < 1e-12), "midpoint {j}");
        }
    }

    #[test]
    fn mean_examples() {
        let m = frechet_mean_circle(&cs(&[0.1, 0.2, 0.3]), &mut rng());
        assert!((m.mean.radians() - 0.2).abs() < 1e-15);
        assert_eq!(m.tied_minimizers.len(), 1);
        assert!((m.frechet_variance - 0.02 / 3.0).abs() < 1e-15);

        let m = frechet_mean_circle(&cs(&[-PI / 2.0, PI / 2.0]), &mut rng());
        assert_eq!(m.tied_minimizers.len(), 2);
        assert_eq!(m.tied_minimizers[0].radians(), -PI);
        assert!(m.tied_minimizers[1].radians().abs() < 1e-15);
        assert!(m.tied_minimizers.contains(&m.mean));
    }

    #[test]
    fn tie_selection_is_uniform_and_seeded() {
        let s = cs(&[-PI / 2.0, PI / 2.0]);
        let mut hits = 0;
        let reps = 4000;
        for i in 0..reps {
            let m = frechet_mean_circle(&s, &mut substream(3, 9, i));
            if m.mean.radians().abs() < 1e-12 {
                hits += 1;
            }
            let again = frechet_mean_circle(&s, &mut substream(3, 9, i));
            assert_eq!(m, again);
        }
        let p = hits as f64 / reps as f64;
        assert!((p - 0.5).abs() < 0.03, "p = {p}");
    }

    #[test]
    fn six_equally_spaced_points() {
        let six: Vec<f64> = (0..6).map(|j| -PI + TAU * j as f64 / 6.0).collect();
        let m = frechet_mean_circle(&cs(&six), &mut rng());
        assert_eq!(m.tied_minimizers.len(), 6);
        for (j, t) in m.tied_minimizers.iter().enumerate() {
            let mid = -PI + TAU * (2 * j + 1) as f64 / 12.0;
            assert!((t.radians() - mid).abs() < 1e-12);
        }
    }

    #[test]
    fn torus_examples() {
        let pts: Vec<TorusPoint> = (0..6)
            .map(|j| {
                let a = -PI + TAU * j as f64 / 6.0;
                TorusPoint::from_radians(&[a, a]).unwrap()
            })
            .collect();
        let m = frechet_mean_torus_points(&pts, &mut rng()).unwrap();
        assert_eq!(m.tie_count(), 36);
        assert_eq!(m.tied_minimizers().len(), 36);

        let same = vec![TorusPoint::from_radians(&[0.4, -1.0]).unwrap(); 5];
        let m = frechet_mean_torus_points(&same, &mut rng()).unwrap();
        assert_eq!(m.mean, same[0]);
        assert_eq!(m.frechet_variance, 0.0);

        let bad = vec![
            TorusPoint::from_radians(&[0.0, 0.0]).unwrap(),
            TorusPoint::from_radians(&[0.0]).unwrap(),
        ];
        assert!(matches!(TorusSample::new(&bad), Err(Error::Dimension { .. })));
    }

    #[test]
    fn torus_with_one_coordinate_is_the_circle() {
        let s = cs(&[0.3, -2.9, 3.0, 1.1, -0.4]);
        let c = frechet_mean_circle(&s, &mut rng());
        let t = frechet_mean_torus(&TorusSample::from(s), &mut rng());
        assert_eq!(t.mean.coords()[0], c.mean);
        assert_eq!(t.frechet_variance, c.frechet_variance);
        assert!((t.fourth_moment - c.fourth_moment).abs() <= 1e-15 * c.fourth_moment);
    }

    #[test]
    fn grid_oracle_examples() {
        let g = grid_oracle_mean(&cs(&[0.1, 0.2, 0.3]), 100_000).unwrap();
        assert!(g.argmin.iter().all(|&a| (a.radians() - 0.2).abs() <= TAU / 1e5 * 2.0));
        let g = grid_oracle_mean(&cs(&[-PI / 2.0, PI / 2.0]), 100_000).unwrap();
        assert!(g.argmin.iter().any(|a| a.radians().abs() < 1e-4));
        assert!(g.argmin.iter().any(|a| (a.radians() + PI).abs() < 1e-4));
        let g = grid_oracle_mean(&cs(&[0.5]), 100_000).unwrap();
        assert!(g.argmin.iter().all(|&a| (a.radians() - 0.5).abs() <= TAU / 1e5 * 2.0));
        assert!(grid_oracle_mean(&cs(&[0.5]), 9).is_err());
    }

    #[test]
    fn point_mass() {
        let m = frechet_mean_circle(&cs(&[1.0; 7]), &mut rng());
        assert_eq!(m.mean.radians(), 1.0);
        assert_eq!(m.tied_minimizers.len(), 1);
        assert_eq!(m.frechet_variance, 0.0);
    }

    #[test]
    fn serde_round_trip() {
        let s = cs(&[0.1, -3.0]);
        let j = serde_json::to_string(&s).unwrap();
        let back: CircleSample = serde_json::from_str(&j).unwrap();
        assert_eq!(s, back);
        assert!(serde_json::from_str::<CircleSample>("[]").is_err());
    }

    fn sample_strategy() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-PI..PI, 1..40)
    }

    proptest! {
        #[test]
        fn mean_beats_every_candidate(xs in sample_strategy(), seed in any::<u64>()) {
            let s = cs(&xs);
            let m = frechet_mean_circle(&s, &mut substream(seed, 0, 0));
            let fm = frechet_value(&s, m.mean);
            prop_assert!((fm - m.frechet_variance).abs() <= 1e-12 * fm.max(1e-300) + 1e-300);
            for c in circle_mean_candidates(&s) {
                prop_assert!(fm <= frechet_value(&s, c) + TIE_RTOL * fm + 1e-15);
            }
            prop_assert!(m.tied_minimizers.contains(&m.mean));
            prop_assert!(m.fourth_moment + 1e-15 >= m.frechet_variance.powi(2));
        }

        #[test]
        fn half_circle_mean_is_euclidean(
            xs in prop::collection::vec(-1.5f64..1.5, 1..60),
            c in -PI..PI,
        ) {
            let s = cs(&xs).rotated(c);
            let m = frechet_mean_circle(&s, &mut substream(1, 0, 0));
            prop_assert_eq!(m.tied_minimizers.len(), 1);
            let base = Angle::new(c).unwrap();
            let lifted = s.points().iter().map(|&p| c + signed_residual(base, p)).sum::<f64>()
                / s.len() as f64;
            prop_assert!(circle_dist(m.mean, Angle::new(lifted).unwrap()) <= 1e-12);
        }

        #[test]
        fn torus_matches_marginals(
            xs in prop::collection::vec((-PI..PI, -PI..PI), 1..30),
            seed in any::<u64>(),
        ) {
            let pts: Vec<TorusPoint> =
                xs.iter().map(|&(a, b)| TorusPoint::from_radians(&[a, b]).unwrap()).collect();
            let t = frechet_mean_torus_points(&pts, &mut substream(seed, 0, 0)).unwrap();
            let ts = TorusSample::new(&pts).unwrap();
            let mut r = substream(seed, 0, 0);
            for (k, c) in ts.marginals().iter().enumerate() {
                let m = frechet_mean_circle(c, &mut r);
                prop_assert_eq!(m.mean, t.mean.coords()[k]);
            }
        }
    }
}
