//! Circular distribution families with their densities, samplers and
//! theoretical moments about the population mean 0.
//!
//! Densities are with respect to arc length on [-π, π). Every family here
//! is symmetric about 0.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Angle, TAU};
use crate::mean::CircleSample;
use crate::quad::integrate_pieces;
use crate::special::bessel_i0;

/// A circular distribution, tagged by `family` in JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum DistributionSpec {
    /// β·vM(0, κ) + (1-β)·vM(π, λ), pushed through the cut-and-mirror map
    /// of radius `cut_radius` about -π.
    VonMisesMixture { kappa: f64, beta: f64, lambda: f64, cut_radius: f64 },
    /// Uniform centre on [-1/2, 1/2] with antipodal density
    /// (1 - s^r)/(2π) at distance s ≤ 1 from π.
    PowerSmeary { order_r: f64 },
    /// Uniform centre on [-1/2, 1/2] with antipodal density
    /// max{1 - G'_r(s), 0}/(2π), G_r(s) = exp(-s^-r), for s ≤ 1/2.
    LogSmeary { order_r: f64 },
    /// Step density w_i/(2π) at distance [t_{i-1}, t_i) from π plus an atom
    /// at 0 carrying the remaining mass.
    PiecewiseAtom { t: Vec<f64>, w: Vec<f64> },
    /// Mass 1-2w uniform on [-1/2, 1/2] and atoms of mass w at ±(π/2 + ε).
    EquatorAtoms { epsilon: f64, weight_w: f64 },
    /// Uniform on [-h, h].
    Uniform { half_width: f64 },
}

/// CLT regime of the sample mean.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Regime {
    Nonsmeary,
    PowerSmeary { r: f64 },
    LogSmeary { r: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoreticalMoments {
    /// σ² = E[d(X, 0)²].
    pub sigma_sq: f64,
    /// Continuous density at the antipode -π.
    pub antipodal_density: f64,
    pub regime: Regime,
    /// σ²/(1 - 2πf(-π))², the limit of n·E[d(μ̂ₙ, 0)²].
    pub asymptotic_scaled_variance: Option<f64>,
}

/// Continuous density at a point together with all atoms of the law.
#[derive(Clone, Debug, PartialEq)]
pub struct Density {
    pub continuous: f64,
    pub atoms: Vec<(Angle, f64)>,
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Parameter(msg()))
    }
}

fn finite(name: &str, x: f64) -> Result<()> {
    check(x.is_finite(), || format!("{name} must be finite, got {x}"))
}

impl DistributionSpec {
    pub fn von_mises(kappa: f64) -> Self {
        DistributionSpec::VonMisesMixture { kappa, beta: 1.0, lambda: 0.0, cut_radius: 0.0 }
    }

    pub fn vmm(kappa: f64, beta: f64, lambda: f64, cut_radius: f64) -> Self {
        DistributionSpec::VonMisesMixture { kappa, beta, lambda, cut_radius }
    }

    /// Short human-readable label, used as a key in result tables.
    pub fn label(&self) -> String {
        let list = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("/");
        match self {
            DistributionSpec::VonMisesMixture { kappa, beta, lambda, cut_radius } => {
                format!("vmm(kappa={kappa};beta={beta};lambda={lambda};cut={cut_radius})")
            }
            DistributionSpec::PowerSmeary { order_r } => format!("power_smeary(r={order_r})"),
            DistributionSpec::LogSmeary { order_r } => format!("log_smeary(r={order_r})"),
            DistributionSpec::PiecewiseAtom { t, w } => {
                format!("piecewise_atom(t={};w={})", list(t), list(w))
            }
            DistributionSpec::EquatorAtoms { epsilon, weight_w } => {
                format!("equator_atoms(epsilon={epsilon};w={weight_w})")
            }
            DistributionSpec::Uniform { half_width } => format!("uniform(h={half_width})"),
        }
    }

    /// Checks every parameter constraint of the family.
    pub fn validate(&self) -> Result<()> {
        match self {
            DistributionSpec::VonMisesMixture { kappa, beta, lambda, cut_radius } => {
                for (n, v) in [("kappa", kappa), ("beta", beta), ("lambda", lambda), ("cut_radius", cut_radius)] {
                    finite(n, *v)?;
                }
                check(*kappa >= 0.0, || format!("kappa must be >= 0, got {kappa}"))?;
                check(*lambda >= 0.0, || format!("lambda must be >= 0, got {lambda}"))?;
                check((0.0..=1.0).contains(beta), || format!("beta must lie in [0, 1], got {beta}"))?;
                check((0.0..=FRAC_PI_2).contains(cut_radius), || {
                    format!("cut_radius must lie in [0, pi/2], got {cut_radius}")
                })
            }
            DistributionSpec::PowerSmeary { order_r } | DistributionSpec::LogSmeary { order_r } => {
                finite("order_r", *order_r)?;
                check(*order_r > 0.0, || format!("order_r must be > 0, got {order_r}"))
            }
            DistributionSpec::PiecewiseAtom { t, w } => {
                check(!t.is_empty(), || "t must not be empty".into())?;
                check(t.len() == w.len(), || {
                    format!("t and w must have equal lengths, got {} and {}", t.len(), w.len())
                })?;
                let mut prev = 0.0;
                for &ti in t {
                    finite("t", ti)?;
                    check(ti > prev && ti < PI, || {
                        "t must be strictly increasing inside (0, pi)".to_string()
                    })?;
                    prev = ti;
                }
                for &wi in w {
                    check((0.0..=1.0).contains(&wi), || format!("w entries must lie in [0, 1], got {wi}"))?;
                }
                let k = atom_mass(t, w);
                if k < -1e-15 {
                    return Err(Error::InfeasibleSpec(format!(
                        "step weights leave negative mass {k} for the atom at 0"
                    )));
                }
                Ok(())
            }
            DistributionSpec::EquatorAtoms { epsilon, weight_w } => {
                finite("epsilon", *epsilon)?;
                finite("weight_w", *weight_w)?;
                check((-FRAC_PI_2..FRAC_PI_2).contains(epsilon), || {
                    format!("epsilon must lie in [-pi/2, pi/2), got {epsilon}")
                })?;
                check(*weight_w > 0.0 && *weight_w <= 0.25, || {
                    format!("weight_w must lie in (0, 1/4], got {weight_w}")
                })
            }
            DistributionSpec::Uniform { half_width } => {
                finite("half_width", *half_width)?;
                check(*half_width > 0.0 && *half_width < PI, || {
                    format!("half_width must lie in (0, pi), got {half_width}")
                })
            }
        }
    }

    /// Points where the continuous density may jump, inside [-π, π].
    fn breakpoints(&self) -> Vec<f64> {
        let mut b = vec![-PI, 0.0, PI];
        match self {
            DistributionSpec::VonMisesMixture { cut_radius, .. } => {
                let r = *cut_radius;
                b.extend([-r, r, -PI + r, PI - r]);
            }
            DistributionSpec::PowerSmeary { .. } => b.extend([-0.5, 0.5, -PI + 1.0, PI - 1.0]),
            DistributionSpec::LogSmeary { order_r } => {
                b.extend([-0.5, 0.5, -PI + 0.5, PI - 0.5]);
                for s in log_clamp_roots(*order_r).into_iter().flatten() {
                    if s < 0.5 {
                        b.extend([-PI + s, PI - s]);
                    }
                }
            }
            DistributionSpec::PiecewiseAtom { t, .. } => {
                for &ti in t {
                    b.extend([-PI + ti, PI - ti]);
                }
            }
            DistributionSpec::EquatorAtoms { .. } => b.extend([-0.5, 0.5]),
            DistributionSpec::Uniform { half_width } => b.extend([-half_width, *half_width]),
        }
        b.retain(|x| (-PI..=PI).contains(x));
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }
}

fn atom_mass(t: &[f64], w: &[f64]) -> f64 {
    let mut prev = 0.0;
    let mut s = 0.0;
    for (&ti, &wi) in t.iter().zip(w) {
        s += wi * (ti - prev);
        prev = ti;
    }
    1.0 - s / PI
}

fn vm_density(x: f64, kappa: f64) -> f64 {
    (kappa * x.cos()).exp() / (TAU * bessel_i0(kappa))
}

fn vmm_density(x: f64, kappa: f64, beta: f64, lambda: f64) -> f64 {
    beta * vm_density(x, kappa) + (1.0 - beta) * vm_density(x + PI, lambda)
}

/// Identity on [-π+r, π-r); rotates the two caps of radius r about -π by π.
pub fn cut_mirror_map(r: f64, p: Angle) -> Result<Angle> {
    if !(0.0..=FRAC_PI_2).contains(&r) {
        return Err(Error::Parameter(format!("cut radius must lie in [0, pi/2], got {r}")));
    }
    Ok(cut_mirror_raw(r, p))
}

fn cut_mirror_raw(r: f64, p: Angle) -> Angle {
    let x = p.radians();
    if x < -PI + r {
        Angle::wrap_finite(x + PI)
    } else if x >= PI - r {
        Angle::wrap_finite(x - PI)
    } else {
        p
    }
}

// ---- smeary tails -------------------------------------------------------

/// ln G'_r(s) for G_r(s) = exp(-s^-r).
fn ln_g_prime(r: f64, s: f64) -> f64 {
    r.ln() - (r + 1.0) * s.ln() - s.powf(-r)
}

fn g_r(r: f64, s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else {
        (-s.powf(-r)).exp()
    }
}

fn g_prime(r: f64, s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else {
        ln_g_prime(r, s).exp()
    }
}

/// Roots of G'_r = 1 around its unimodal peak, when the peak exceeds 1.
fn log_clamp_roots(r: f64) -> Option<[f64; 2]> {
    let peak = (r / (r + 1.0)).powf(1.0 / r);
    if ln_g_prime(r, peak) <= 0.0 {
        return None;
    }
    let root = |mut lo: f64, mut hi: f64, increasing: bool| {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if (ln_g_prime(r, mid) < 0.0) == increasing {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let mut hi = peak * 2.0;
    while ln_g_prime(r, hi) > 0.0 {
        hi *= 2.0;
    }
    Some([root(0.0, peak, true), root(peak, hi, false)])
}

/// ∫₀^s max{1 - G'_r(u), 0} du.
fn log_tail_integral(r: f64, s: f64, roots: Option<[f64; 2]>) -> f64 {
    let piece = |a: f64, b: f64| if b > a { (b - a) - (g_r(r, b) - g_r(r, a)) } else { 0.0 };
    match roots {
        None => piece(0.0, s),
        Some([s1, s2]) => piece(0.0, s.min(s1)) + piece(s2, s),
    }
}

fn log_tail_density(r: f64, s: f64) -> f64 {
    (1.0 - g_prime(r, s)).max(0.0) / TAU
}

fn power_center(r: f64) -> f64 {
    (PI * r + PI - r) / (PI * r + PI)
}

fn log_center(r: f64) -> f64 {
    1.0 - 2.0 * log_tail_integral(r, 0.5, log_clamp_roots(r)) / TAU
}

/// Continuous density at `x` and the atom list.
pub fn density(spec: &DistributionSpec, x: Angle) -> Result<Density> {
    spec.validate()?;
    Ok(Density { continuous: continuous_density(spec, x.radians()), atoms: atoms(spec) })
}

pub fn atoms(spec: &DistributionSpec) -> Vec<(Angle, f64)> {
    match spec {
        DistributionSpec::PiecewiseAtom { t, w } => {
            let k = atom_mass(t, w).max(0.0);
            if k > 0.0 {
                vec![(Angle::ZERO, k)]
            } else {
                vec![]
            }
        }
        DistributionSpec::EquatorAtoms { epsilon, weight_w } => {
            let a = FRAC_PI_2 + epsilon;
            if a == 0.0 {
                vec![(Angle::ZERO, 2.0 * weight_w)]
            } else {
                vec![(Angle::wrap_finite(-a), *weight_w), (Angle::wrap_finite(a), *weight_w)]
            }
        }
        _ => vec![],
    }
}

/// Continuous density at raw radians `x` in [-π, π]. Assumes a valid spec.
fn continuous_density(spec: &DistributionSpec, x: f64) -> f64 {
    let ax = x.abs();
    let s = PI - ax;
    match spec {
        DistributionSpec::VonMisesMixture { kappa, beta, lambda, cut_radius } => {
            let g = |y: f64| vmm_density(y, *kappa, *beta, *lambda);
            let r = *cut_radius;
            if r == 0.0 {
                return g(x);
            }
            let mut d = 0.0;
            if x >= -PI + r && x < PI - r {
                d += g(x);
            }
            if (0.0..r).contains(&x) {
                d += g(x - PI);
            }
            if (-r..0.0).contains(&x) {
                d += g(x + PI);
            }
            d
        }
        DistributionSpec::PowerSmeary { order_r } => {
            let r = *order_r;
            let mut d = if ax <= 0.5 { power_center(r) } else { 0.0 };
            if s <= 1.0 {
                d += (1.0 - s.powf(r)) / TAU;
            }
            d
        }
        DistributionSpec::LogSmeary { order_r } => {
            let r = *order_r;
            let mut d = if ax <= 0.5 { log_center(r) } else { 0.0 };
            if s <= 0.5 {
                d += log_tail_density(r, s);
            }
            d
        }
        DistributionSpec::PiecewiseAtom { t, w } => {
            let mut prev = 0.0;
            for (&ti, &wi) in t.iter().zip(w) {
                if s >= prev && s < ti {
                    return wi / TAU;
                }
                prev = ti;
            }
            0.0
        }
        DistributionSpec::EquatorAtoms { weight_w, .. } => {
            if ax <= 0.5 {
                1.0 - 2.0 * weight_w
            } else {
                0.0
            }
        }
        DistributionSpec::Uniform { half_width } => {
            if ax <= *half_width {
                0.5 / half_width
            } else {
                0.0
            }
        }
    }
}

/// Total mass of the continuous part plus atoms, by quadrature.
pub fn total_mass(spec: &DistributionSpec) -> Result<f64> {
    spec.validate()?;
    let cont = integrate_pieces(|x| continuous_density(spec, x), &spec.breakpoints(), 1e-11)?;
    Ok(cont + atoms(spec).iter().map(|a| a.1).sum::<f64>())
}

/// Integral of the continuous density over `[a, b] ⊂ [-π, π]`.
pub fn continuous_mass(spec: &DistributionSpec, a: f64, b: f64) -> Result<f64> {
    spec.validate()?;
    let mut br: Vec<f64> = spec.breakpoints().into_iter().filter(|&x| x > a && x < b).collect();
    br.insert(0, a);
    br.push(b);
    integrate_pieces(|x| continuous_density(spec, x), &br, 1e-12)
}

pub fn theoretical_moments(spec: &DistributionSpec) -> Result<TheoreticalMoments> {
    spec.validate()?;
    let cont = integrate_pieces(|x| x * x * continuous_density(spec, x), &spec.breakpoints(), 1e-11)?;
    let sigma_sq = cont
        + atoms(spec)
            .iter()
            .map(|(a, m)| a.radians().powi(2) * m)
            .sum::<f64>();

    let f_anti = match spec {
        DistributionSpec::VonMisesMixture { kappa, beta, lambda, cut_radius } => {
            if *cut_radius > 0.0 {
                0.0
            } else {
                vmm_density(-PI, *kappa, *beta, *lambda)
            }
        }
        DistributionSpec::PowerSmeary { .. } | DistributionSpec::LogSmeary { .. } => 1.0 / TAU,
        DistributionSpec::PiecewiseAtom { w, .. } => w[0] / TAU,
        DistributionSpec::EquatorAtoms { .. } | DistributionSpec::Uniform { .. } => 0.0,
    };
    if f_anti > 1.0 / TAU * (1.0 + 1e-12) {
        return Err(Error::InfeasibleSpec(format!(
            "antipodal density {f_anti} exceeds 1/(2pi); the mean is not at 0"
        )));
    }
    let regime = match spec {
        DistributionSpec::PowerSmeary { order_r } => Regime::PowerSmeary { r: *order_r },
        DistributionSpec::LogSmeary { order_r } => Regime::LogSmeary { r: *order_r },
        _ => Regime::Nonsmeary,
    };
    let h = 1.0 - TAU * f_anti;
    let asymptotic_scaled_variance =
        (regime == Regime::Nonsmeary && h > 1e-12).then(|| sigma_sq / (h * h));
    Ok(TheoreticalMoments { sigma_sq, antipodal_density: f_anti, regime, asymptotic_scaled_variance })
}

// ---- sampling -----------------------------------------------------------

/// Best–Fisher envelope constants for vM(0, κ).
#[derive(Clone, Copy, Debug)]
struct VonMises {
    kappa: f64,
    r: f64,
}

impl VonMises {
    fn new(kappa: f64) -> Self {
        let r = if kappa < 1e-3 {
            0.0
        } else {
            let tau = 1.0 + (1.0 + 4.0 * kappa * kappa).sqrt();
            let rho = (tau - (2.0 * tau).sqrt()) / (2.0 * kappa);
            (1.0 + rho * rho) / (2.0 * rho)
        };
        VonMises { kappa, r }
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if self.kappa == 0.0 {
            return rng.gen_range(-PI..PI);
        }
        if self.kappa < 1e-3 {
            // plain rejection from the uniform; acceptance ≥ e^{-2κ}
            loop {
                let x = rng.gen_range(-PI..PI);
                if rng.gen::<f64>() <= (self.kappa * (x.cos() - 1.0)).exp() {
                    return x;
                }
            }
        }
        loop {
            let u1: f64 = rng.gen();
            let u2: f64 = rng.gen();
            let u3: f64 = rng.gen();
            let z = (PI * u1).cos();
            let f = (1.0 + self.r * z) / (self.r + z);
            let c = self.kappa * (self.r - f);
            if c * (2.0 - c) - u2 > 0.0 || (c / u2).ln() + 1.0 - c >= 0.0 {
                let theta = f.clamp(-1.0, 1.0).acos();
                return if u3 < 0.5 { -theta } else { theta };
            }
        }
    }
}

/// Inverts a continuous increasing CDF on `[0, hi]` with a safeguarded
/// Newton iteration, to absolute tolerance 1e-12 in the argument.
fn invert_cdf(target: f64, hi: f64, cdf: impl Fn(f64) -> f64, pdf: impl Fn(f64) -> f64) -> f64 {
    let (mut lo, mut hi) = (0.0, hi);
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let fx = cdf(x) - target;
        if fx > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        if hi - lo <= 1e-12 {
            break;
        }
        let d = pdf(x);
        let newton = if d > 0.0 { x - fx / d } else { f64::NAN };
        x = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if (cdf(x) - target).abs() <= 1e-15 {
            break;
        }
    }
    x
}

#[derive(Clone, Debug)]
enum Kind {
    Vmm { beta: f64, a: VonMises, b: VonMises, cut: f64 },
    Power { r: f64, center: f64, tail: f64 },
    Log { r: f64, center: f64, tail: f64, roots: Option<[f64; 2]> },
    Piecewise { atom: f64, cum: Vec<f64>, t: Vec<f64> },
    Equator { atom: f64, w: f64 },
    Uniform { h: f64 },
}

/// A validated spec with precomputed sampling constants.
#[derive(Clone, Debug)]
pub struct Sampler {
    kind: Kind,
}

impl Sampler {
    pub fn new(spec: &DistributionSpec) -> Result<Sampler> {
        spec.validate()?;
        let kind = match spec {
            DistributionSpec::VonMisesMixture { kappa, beta, lambda, cut_radius } => Kind::Vmm {
                beta: *beta,
                a: VonMises::new(*kappa),
                b: VonMises::new(*lambda),
                cut: *cut_radius,
            },
            DistributionSpec::PowerSmeary { order_r } => {
                let r = *order_r;
                let center = power_center(r);
                Kind::Power { r, center, tail: 0.5 * (1.0 - center) }
            }
            DistributionSpec::LogSmeary { order_r } => {
                let r = *order_r;
                let center = log_center(r);
                Kind::Log { r, center, tail: 0.5 * (1.0 - center), roots: log_clamp_roots(r) }
            }
            DistributionSpec::PiecewiseAtom { t, w } => {
                let mut cum = Vec::with_capacity(t.len());
                let mut prev = 0.0;
                let mut acc = 0.0;
                for (&ti, &wi) in t.iter().zip(w) {
                    acc += wi * (ti - prev) / PI;
                    cum.push(acc);
                    prev = ti;
                }
                Kind::Piecewise { atom: atom_mass(t, w).max(0.0), cum, t: t.clone() }
            }
            DistributionSpec::EquatorAtoms { epsilon, weight_w } => {
                Kind::Equator { atom: FRAC_PI_2 + epsilon, w: *weight_w }
            }
            DistributionSpec::Uniform { half_width } => Kind::Uniform { h: *half_width },
        };
        Ok(Sampler { kind })
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Angle {
        let x = match &self.kind {
            Kind::Vmm { beta, a, b, cut } => {
                let x = if rng.gen::<f64>() < *beta { a.draw(rng) } else { b.draw(rng) + PI };
                return cut_mirror_raw(*cut, Angle::wrap_finite(x));
            }
            Kind::Power { r, center, tail } => {
                let u: f64 = rng.gen();
                if u < *center {
                    rng.gen_range(-0.5..=0.5)
                } else {
                    let r = *r;
                    let mass = tail * TAU;
                    let v = rng.gen::<f64>() * mass;
                    let s = invert_cdf(
                        v,
                        1.0,
                        |s| s - s.powf(r + 1.0) / (r + 1.0),
                        |s| 1.0 - s.powf(r),
                    );
                    if u < center + tail {
                        -PI + s
                    } else {
                        PI - s
                    }
                }
            }
            Kind::Log { r, center, tail, roots } => {
                let u: f64 = rng.gen();
                if u < *center {
                    rng.gen_range(-0.5..=0.5)
                } else {
                    let r = *r;
                    let v = rng.gen::<f64>() * tail * TAU;
                    let s = invert_cdf(
                        v,
                        0.5,
                        |s| log_tail_integral(r, s, *roots),
                        |s| (1.0 - g_prime(r, s)).max(0.0),
                    );
                    if u < center + tail {
                        -PI + s
                    } else {
                        PI - s
                    }
                }
            }
            Kind::Piecewise { atom, cum, t } => {
                let u: f64 = rng.gen();
                if u < *atom {
                    0.0
                } else {
                    // half of the step mass on each side of the antipode
                    let v = (u - atom) / (1.0 - atom).max(f64::MIN_POSITIVE) * cum[cum.len() - 1];
                    let i = cum.partition_point(|&c| c <= v).min(cum.len() - 1);
                    let lo = if i == 0 { 0.0 } else { t[i - 1] };
                    let s = rng.gen_range(lo..t[i]);
                    if rng.gen::<bool>() {
                        -PI + s
                    } else {
                        PI - s
                    }
                }
            }
            Kind::Equator { atom, w } => {
                let u: f64 = rng.gen();
                if u < *w {
                    -atom
                } else if u < 2.0 * w {
                    *atom
                } else {
                    rng.gen_range(-0.5..=0.5)
                }
            }
            Kind::Uniform { h } => rng.gen_range(-h..=*h),
        };
        Angle::wrap_finite(x)
    }

    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<CircleSample> {
        if n == 0 {
            return Err(Error::Parameter("sample size must be at least 1".into()));
        }
        CircleSample::new((0..n).map(|_| self.draw(rng)).collect())
    }

    /// Draws into sorted radians, the input format of the mean routines.
    pub fn sample_sorted<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<f64> {
        let mut v: Vec<f64> = (0..n).map(|_| self.draw(rng).radians()).collect();
        v.sort_unstable_by(f64::total_cmp);
        v
    }
}

/// n i.i.d. draws from `spec`.
pub fn sample<R: Rng + ?Sized>(spec: &DistributionSpec, n: usize, rng: &mut R) -> Result<CircleSample> {
    Sampler::new(spec)?.sample(n, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::circle_dist;
    use crate::rng::substream;
    use crate::special::chi2_sf;
    use proptest::prelude::*;

    fn at(spec: &DistributionSpec, x: f64) -> f64 {
        density(spec, Angle::new(x).unwrap()).unwrap().continuous
    }

    fn examples() -> Vec<DistributionSpec> {
        vec![
            DistributionSpec::von_mises(3.0),
            DistributionSpec::vmm(3.0, 0.5, 0.5, 0.0),
            DistributionSpec::vmm(3.0, 0.5, 0.5, 0.1),
            DistributionSpec::vmm(3.0, 1.0, 0.0, FRAC_PI_2),
            DistributionSpec::vmm(0.0, 1.0, 0.0, 0.0),
            DistributionSpec::PowerSmeary { order_r: 1.0 },
            DistributionSpec::PowerSmeary { order_r: 2.0 },
            DistributionSpec::LogSmeary { order_r: 1.0 },
            DistributionSpec::LogSmeary { order_r: 0.1 },
            DistributionSpec::PiecewiseAtom { t: vec![1.5], w: vec![0.5] },
            DistributionSpec::PiecewiseAtom { t: vec![0.1, 0.2, 0.5, 2.0], w: vec![0.5, 0.8, 0.0, 1.0] },
            DistributionSpec::PiecewiseAtom { t: vec![0.1, 0.2, 0.5, 2.0], w: vec![0.0, 0.85, 0.0, 1.0] },
            DistributionSpec::EquatorAtoms { epsilon: 0.2, weight_w: 0.25 },
            DistributionSpec::EquatorAtoms { epsilon: -0.2, weight_w: 0.1 },
            DistributionSpec::Uniform { half_width: 0.5 },
        ]
    }

    #[test]
    fn density_examples() {
        let unif = DistributionSpec::vmm(0.0, 1.0, 0.0, 0.0);
        for x in [-3.0, 0.0, 1.7] {
            assert!((at(&unif, x) - 1.0 / TAU).abs() < 1e-15);
        }
        let vm3 = DistributionSpec::von_mises(3.0);
        let f = at(&vm3, -PI);
        assert!((f - (-3.0f64).exp() / (TAU * 4.880_792_585_865_024)).abs() < 1e-15);
        assert!((f - 1.623e-3).abs() < 1e-6);
        let p1 = DistributionSpec::PowerSmeary { order_r: 1.0 };
        assert!((at(&p1, 0.0) - (1.0 - 1.0 / TAU)).abs() < 1e-15);
        let l1 = DistributionSpec::LogSmeary { order_r: 1.0 };
        let c1 = 1.0 - (1.0 - 2.0 * (-2.0f64).exp()) / TAU;
        assert!((at(&l1, 0.0) - c1).abs() < 1e-14);
        assert!((c1 - 0.88392).abs() < 1e-5);
    }

    #[test]
    fn log_center_matches_quadrature() {
        // independent check of the closed form: integrate the clamped tail
        for r in [0.1, 0.5, 1.0, 3.0] {
            let tail = crate::quad::integrate(|s| (1.0 - g_prime(r, s)).max(0.0), 0.0, 0.5, 1e-13);
            let tail = match log_clamp_roots(r) {
                Some([s1, s2]) if s1 < 0.5 => {
                    integrate_pieces(|s| (1.0 - g_prime(r, s)).max(0.0), &[0.0, s1, s2.min(0.5), 0.5], 1e-13).unwrap()
                }
                _ => tail.unwrap(),
            };
            assert!((log_center(r) - (1.0 - 2.0 * tail / TAU)).abs() < 1e-10, "r={r}");
        }
        assert!(log_clamp_roots(1.0).is_none());
        assert!(log_clamp_roots(0.1).is_some());
    }

    #[test]
    fn invalid_parameters() {
        let bad = [
            DistributionSpec::vmm(-1.0, 0.5, 0.0, 0.0),
            DistributionSpec::vmm(1.0, 1.5, 0.0, 0.0),
            DistributionSpec::vmm(1.0, 0.5, 0.0, 2.0),
            DistributionSpec::PowerSmeary { order_r: 0.0 },
            DistributionSpec::LogSmeary { order_r: f64::NAN },
            DistributionSpec::PiecewiseAtom { t: vec![2.0, 1.0], w: vec![0.1, 0.1] },
            DistributionSpec::PiecewiseAtom { t: vec![1.0], w: vec![] },
            DistributionSpec::EquatorAtoms { epsilon: FRAC_PI_2, weight_w: 0.1 },
            DistributionSpec::EquatorAtoms { epsilon: 0.0, weight_w: 0.3 },
            DistributionSpec::Uniform { half_width: 0.0 },
        ];
        for spec in bad {
            assert!(matches!(spec.validate(), Err(Error::Parameter(_))), "{spec:?}");
        }
        // the largest admissible step mass still leaves a positive atom
        let full = DistributionSpec::PiecewiseAtom { t: vec![3.0], w: vec![1.0] };
        assert!(full.validate().is_ok());
        assert!((atoms(&full)[0].1 - (1.0 - 3.0 / PI)).abs() < 1e-15);
    }

    #[test]
    fn cut_mirror_examples() {
        let a = |x: f64| Angle::new(x).unwrap();
        assert_eq!(cut_mirror_map(0.1, a(0.3)).unwrap(), a(0.3));
        assert!((cut_mirror_map(0.1, a(-PI + 0.05)).unwrap().radians() - 0.05).abs() < 1e-15);
        assert!((cut_mirror_map(0.1, a(PI - 0.05)).unwrap().radians() + 0.05).abs() < 1e-15);
        for x in [-PI, -1.0, 0.0, 3.1] {
            assert_eq!(cut_mirror_map(0.0, a(x)).unwrap(), a(x));
        }
        assert!(cut_mirror_map(1.6, a(0.0)).is_err());
        assert!(cut_mirror_map(-0.1, a(0.0)).is_err());
    }

    #[test]
    fn masses_integrate_to_one() {
        for spec in examples() {
            let m = total_mass(&spec).unwrap();
            assert!((m - 1.0).abs() < 1e-8, "{spec:?}: {m}");
        }
    }

    #[test]
    fn moments_examples() {
        let u = theoretical_moments(&DistributionSpec::Uniform { half_width: 0.5 }).unwrap();
        assert!((u.sigma_sq - 1.0 / 12.0).abs() < 1e-12);
        assert_eq!(u.antipodal_density, 0.0);
        assert!((u.asymptotic_scaled_variance.unwrap() - 1.0 / 12.0).abs() < 1e-12);

        let vm = theoretical_moments(&DistributionSpec::von_mises(3.0)).unwrap();
        let factor = vm.asymptotic_scaled_variance.unwrap() / vm.sigma_sq;
        assert!((factor - 1.0207).abs() < 1e-4, "{factor}");

        let p2 = theoretical_moments(&DistributionSpec::PowerSmeary { order_r: 2.0 }).unwrap();
        assert_eq!(p2.regime, Regime::PowerSmeary { r: 2.0 });
        assert!(p2.asymptotic_scaled_variance.is_none());
        assert!((p2.antipodal_density - 1.0 / TAU).abs() < 1e-15);

        let l = theoretical_moments(&DistributionSpec::LogSmeary { order_r: 1.0 }).unwrap();
        assert_eq!(l.regime, Regime::LogSmeary { r: 1.0 });

        // σ² of PowerSmeary in closed form: centre/12 + 2·(1/2π)∫₀¹(π-s)²(1-s^r) ds
        let r = 1.0;
        let tail = (PI * PI * (1.0 - 1.0 / (r + 1.0)) - 2.0 * PI * (0.5 - 1.0 / (r + 2.0))
            + (1.0 / 3.0 - 1.0 / (r + 3.0)))
            / PI;
        let p1 = theoretical_moments(&DistributionSpec::PowerSmeary { order_r: r }).unwrap();
        assert!((p1.sigma_sq - (power_center(r) / 12.0 + tail)).abs() < 1e-10);

        // atoms contribute a²·m
        let e = theoretical_moments(&DistributionSpec::EquatorAtoms { epsilon: 0.0, weight_w: 0.25 }).unwrap();
        assert!((e.sigma_sq - (0.5 / 12.0 + 0.5 * FRAC_PI_2 * FRAC_PI_2)).abs() < 1e-10);
    }

    #[test]
    fn antipodal_density_by_cut() {
        let cut = theoretical_moments(&DistributionSpec::vmm(3.0, 0.5, 0.5, 0.1)).unwrap();
        assert_eq!(cut.antipodal_density, 0.0);
        let plain = theoretical_moments(&DistributionSpec::vmm(3.0, 0.5, 0.5, 0.0)).unwrap();
        assert!(plain.antipodal_density > 0.0);
        assert!(plain.asymptotic_scaled_variance.unwrap() >= plain.sigma_sq);
        let heavy = DistributionSpec::vmm(0.5, 0.2, 3.0, 0.0);
        assert!(matches!(theoretical_moments(&heavy), Err(Error::InfeasibleSpec(_))));
    }

    #[test]
    fn sampling_is_deterministic() {
        for spec in examples() {
            let a = sample(&spec, 50, &mut substream(5, 1, 2)).unwrap();
            let b = sample(&spec, 50, &mut substream(5, 1, 2)).unwrap();
            assert_eq!(a, b);
        }
        assert!(sample(&DistributionSpec::von_mises(1.0), 0, &mut substream(0, 0, 0)).is_err());
    }

    #[test]
    fn cut_support_respected() {
        let spec = DistributionSpec::vmm(3.0, 1.0, 0.0, 0.1);
        let s = sample(&spec, 20_000, &mut substream(2, 0, 0)).unwrap();
        let anti = Angle::new(-PI).unwrap();
        assert!(s.points().iter().all(|&p| circle_dist(p, anti) >= 0.1));
    }

    #[test]
    fn von_mises_sample_mean_near_zero() {
        let s = sample(&DistributionSpec::von_mises(3.0), 100_000, &mut substream(4, 0, 0)).unwrap();
        let m = s.radians().iter().sum::<f64>() / 1e5;
        assert!(m.abs() < 0.02, "{m}");
    }

    /// Pearson chi-square goodness of fit on 60 equal-width bins; bins with
    /// atoms are skipped and their counts checked separately.
    fn chi_square_gof(spec: &DistributionSpec, n: usize, seed: u64) -> f64 {
        let bins = 60;
        let width = TAU / bins as f64;
        let s = Sampler::new(spec).unwrap();
        let mut rng = substream(seed, 77, 0);
        let mut counts = vec![0usize; bins];
        let atoms = atoms(spec);
        let mut atom_counts = vec![0usize; atoms.len()];
        for _ in 0..n {
            let x = s.draw(&mut rng);
            if let Some(i) = atoms.iter().position(|a| a.0 == x) {
                atom_counts[i] += 1;
                continue;
            }
            let b = (((x.radians() + PI) / width) as usize).min(bins - 1);
            counts[b] += 1;
        }
        for (i, a) in atoms.iter().enumerate() {
            let sd = (n as f64 * a.1 * (1.0 - a.1)).sqrt();
            assert!((atom_counts[i] as f64 - n as f64 * a.1).abs() < 5.0 * sd.max(1.0));
        }
        let mut stat = 0.0;
        let mut df = 0usize;
        for (b, &c) in counts.iter().enumerate() {
            let lo = -PI + b as f64 * width;
            let e = n as f64 * continuous_mass(spec, lo, lo + width).unwrap();
            if e < 5.0 {
                assert!(c as f64 <= e + 5.0 * e.sqrt() + 5.0, "bin {b}: {c} vs {e}");
                continue;
            }
            stat += (c as f64 - e).powi(2) / e;
            df += 1;
        }
        chi2_sf(df - 1, stat)
    }

    #[test]
    fn pushforward_sampler_fits_density() {
        let p = chi_square_gof(&DistributionSpec::vmm(3.0, 1.0, 0.0, 0.1), 100_000, 1);
        assert!(p > 0.01, "p = {p}");
        let p = chi_square_gof(&DistributionSpec::vmm(3.0, 0.5, 0.5, 0.3), 100_000, 1);
        assert!(p > 0.01, "p = {p}");
    }

    #[test]
    fn other_samplers_fit_density() {
        for spec in examples() {
            let p = chi_square_gof(&spec, 50_000, 2);
            assert!(p > 0.001, "{spec:?}: p = {p}");
        }
    }

    #[test]
    fn json_round_trip() {
        for spec in examples() {
            let j = serde_json::to_string(&spec).unwrap();
            let back: DistributionSpec = serde_json::from_str(&j).unwrap();
            assert_eq!(spec, back);
        }
        let j = r#"{"family":"von_mises_mixture","kappa":3.0,"beta":0.5,"lambda":0.5,"cut_radius":0.0}"#;
        let s: DistributionSpec = serde_json::from_str(j).unwrap();
        assert_eq!(s, DistributionSpec::vmm(3.0, 0.5, 0.5, 0.0));
        assert!(serde_json::from_str::<DistributionSpec>(r#"{"family":"bingham"}"#).is_err());
    }

    proptest! {
        #[test]
        fn symmetric_about_zero(x in 0.0..PI, which in 0usize..15) {
            let spec = &examples()[which];
            // skip measure-zero jump points
            prop_assume!(spec.breakpoints().iter().all(|b| (b.abs() - x).abs() > 1e-9));
            let a = continuous_density(spec, x);
            let b = continuous_density(spec, -x);
            prop_assert!((a - b).abs() <= 1e-12, "{a} vs {b}");
        }

        #[test]
        fn random_vmm_mass(kappa in 0.0..5.0f64, beta in 0.0..=1.0f64, lambda in 0.0..5.0f64, cut in 0.0..FRAC_PI_2) {
            let m = total_mass(&DistributionSpec::vmm(kappa, beta, lambda, cut)).unwrap();
            prop_assert!((m - 1.0).abs() < 1e-8);
        }

        #[test]
        fn random_piecewise_mass(
            steps in prop::collection::vec((0.01..0.7f64, 0.0..=1.0f64), 1..5),
        ) {
            let mut t = Vec::new();
            let mut acc = 0.0;
            for (dt, _) in &steps {
                acc += dt;
                t.push(acc);
            }
            let w: Vec<f64> = steps.iter().map(|s| s.1).collect();
            let spec = DistributionSpec::PiecewiseAtom { t, w };
            if spec.validate().is_ok() {
                prop_assert!((total_mass(&spec).unwrap() - 1.0).abs() < 1e-8);
            }
        }

        #[test]
        fn random_smeary_mass(r in 0.05..6.0f64, eps in -1.5..1.5f64, w in 0.01..=0.25f64) {
            for spec in [
                DistributionSpec::PowerSmeary { order_r: r },
                DistributionSpec::LogSmeary { order_r: r },
                DistributionSpec::EquatorAtoms { epsilon: eps, weight_w: w },
            ] {
                prop_assert!((total_mass(&spec).unwrap() - 1.0).abs() < 1e-8);
            }
        }
    }
}
