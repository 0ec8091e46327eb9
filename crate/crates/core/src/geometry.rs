//! Angles on S¹ = [-π, π), the arc-length metric, the product metric on
//! the m-torus, and the signed geodesic chart used by the tests.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const TAU: f64 = 2.0 * PI;

/// A point on the circle, stored in radians in `[-π, π)`.
#[derive(Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Angle(f64);

impl Angle {
    pub const ZERO: Angle = Angle(0.0);

    /// Wraps `x` into `[-π, π)`. Fails on NaN or infinite input.
    pub fn new(x: f64) -> Result<Angle> {
        wrap_angle(x)
    }

    pub fn from_degrees(deg: f64) -> Result<Angle> {
        wrap_angle(deg.to_radians())
    }

    /// Wrap for values already known to be finite.
    #[inline]
    pub(crate) fn wrap_finite(x: f64) -> Angle {
        debug_assert!(x.is_finite());
        Angle(wrap_raw(x))
    }

    #[inline]
    pub fn radians(self) -> f64 {
        self.0
    }

    /// Rotation by `delta` radians.
    #[inline]
    pub fn rotate(self, delta: f64) -> Angle {
        Angle::wrap_finite(self.0 + delta)
    }

    #[inline]
    pub fn antipode(self) -> Angle {
        self.rotate(PI)
    }
}

impl fmt::Debug for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Angle({})", self.0)
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl TryFrom<f64> for Angle {
    type Error = Error;

    fn try_from(x: f64) -> Result<Angle> {
        wrap_angle(x)
    }
}

impl From<Angle> for f64 {
    fn from(a: Angle) -> f64 {
        a.0
    }
}

#[inline]
fn wrap_raw(x: f64) -> f64 {
    if (-PI..PI).contains(&x) {
        return x;
    }
    let mut y = (x + PI).rem_euclid(TAU) - PI;
    // rem_euclid may round up to TAU itself
    if y >= PI {
        y -= TAU;
    }
    if y < -PI {
        y += TAU;
    }
    y
}

/// The representative of `x` modulo 2π in `[-π, π)`.
pub fn wrap_angle(x: f64) -> Result<Angle> {
    if !x.is_finite() {
        return Err(Error::InvalidInput(format!("angle must be finite, got {x}")));
    }
    Ok(Angle(wrap_raw(x)))
}

/// Arc-length distance, in `[0, π]`.
#[inline]
pub fn circle_dist(a: Angle, b: Angle) -> f64 {
    let d = (a.0 - b.0).abs();
    d.min(TAU - d)
}

/// A point on the m-torus, one angle per coordinate circle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TorusPoint(Vec<Angle>);

impl TorusPoint {
    pub fn new(coords: Vec<Angle>) -> Result<TorusPoint> {
        if coords.is_empty() {
            return Err(Error::EmptyInput("torus point needs at least one coordinate".into()));
        }
        Ok(TorusPoint(coords))
    }

    pub fn from_radians(coords: &[f64]) -> Result<TorusPoint> {
        let coords = coords.iter().map(|&x| wrap_angle(x)).collect::<Result<Vec<_>>>()?;
        TorusPoint::new(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Angle] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<Angle> {
        self.0
    }
}

impl From<Angle> for TorusPoint {
    fn from(a: Angle) -> TorusPoint {
        TorusPoint(vec![a])
    }
}

/// Product-metric distance on the torus.
pub fn torus_dist(p: &TorusPoint, q: &TorusPoint) -> Result<f64> {
    if p.dim() != q.dim() {
        return Err(Error::Dimension { expected: p.dim(), got: q.dim() });
    }
    if p.dim() == 1 {
        return Ok(circle_dist(p.0[0], q.0[0]));
    }
    Ok(p.0
        .iter()
        .zip(&q.0)
        .map(|(&a, &b)| circle_dist(a, b).powi(2))
        .sum::<f64>()
        .sqrt())
}

/// Signed geodesic coordinate of a point in the chart centred at `base`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChartCoord {
    /// Residual in `(-π, π]`.
    pub value: f64,
    /// Set when the point is the antipode of `base`; the value is then `+π`.
    pub antipodal: bool,
}

/// Signed residual `v` with `wrap(base + v) = p` and `|v| = d(base, p)`.
pub fn log_chart(base: Angle, p: Angle) -> ChartCoord {
    let value = signed_residual(base, p);
    ChartCoord { value, antipodal: value == PI }
}

/// Same as [`log_chart`] without the boundary flag.
#[inline]
pub fn signed_residual(base: Angle, p: Angle) -> f64 {
    let mut v = p.0 - base.0;
    if v > PI {
        v -= TAU;
    } else if v <= -PI {
        v += TAU;
    }
    v
}

pub fn exp_chart(base: Angle, v: f64) -> Result<Angle> {
    if !v.is_finite() {
        return Err(Error::InvalidInput(format!("chart coordinate must be finite, got {v}")));
    }
    Ok(Angle::wrap_finite(base.0 + v))
}
