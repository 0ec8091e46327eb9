//! Special functions: log-gamma, regularized incomplete gamma, chi-square
//! and normal distribution functions, and the modified Bessel function I₀.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection
        return (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    let t = x + LANCZOS_G + 0.5;
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

const GAMMA_EPS: f64 = 1e-16;
const GAMMA_MAX_ITER: usize = 10_000;

fn gamma_p_series(a: f64, x: f64) -> f64 {
    let mut ap = a;
    let mut del = 1.0 / a;
    let mut sum = del;
    for _ in 0..GAMMA_MAX_ITER {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if del.abs() < sum.abs() * GAMMA_EPS {
            break;
        }
    }
    sum * (-x + a * x.ln() - ln_gamma(a)).exp()
}

// Modified Lentz continued fraction for Q(a, x).
fn gamma_q_cont_frac(a: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..GAMMA_MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < GAMMA_EPS {
            break;
        }
    }
    (-x + a * x.ln() - ln_gamma(a)).exp() * h
}

/// Regularized lower incomplete gamma P(a, x).
pub fn gamma_p(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x < a + 1.0 {
        gamma_p_series(a, x)
    } else {
        1.0 - gamma_q_cont_frac(a, x)
    }
}

/// Regularized upper incomplete gamma Q(a, x) = 1 − P(a, x).
pub fn gamma_q(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        1.0
    } else if x < a + 1.0 {
        1.0 - gamma_p_series(a, x)
    } else {
        gamma_q_cont_frac(a, x)
    }
}

pub fn chi2_cdf(k: usize, x: f64) -> f64 {
    gamma_p(k as f64 / 2.0, x / 2.0)
}

/// Upper tail 1 − F(x), accurate far into the tail.
pub fn chi2_sf(k: usize, x: f64) -> f64 {
    gamma_q(k as f64 / 2.0, x / 2.0)
}

/// The `p`-quantile of χ²ₖ, by bisection on the regularized incomplete gamma.
pub fn chi2_quantile(k: usize, p: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::Parameter("chi-square needs k >= 1 degrees of freedom".into()));
    }
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return Err(Error::Parameter(format!("probability must lie in [0, 1), got {p}")));
    }
    if p == 1.0 {
        return Err(Error::Unbounded("the 1-quantile of chi-square is +inf".into()));
    }
    if p == 0.0 {
        return Ok(0.0);
    }
    let mut hi = (k as f64).max(1.0);
    while chi2_cdf(k, hi) < p {
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::Numeric("chi-square quantile bracket overflow".into()));
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if chi2_cdf(k, mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-14 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Standard normal CDF Φ.
pub fn normal_cdf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let half_tail = 0.5 * gamma_q(0.5, 0.5 * x * x);
    if x < 0.0 {
        half_tail
    } else {
        1.0 - half_tail
    }
}

/// Φ(−x), without cancellation for large positive x.
pub fn normal_sf(x: f64) -> f64 {
    normal_cdf(-x)
}

/// Φ⁻¹(p): Acklam's rational approximation followed by two Newton steps.
pub fn normal_quantile(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return Err(Error::Parameter(format!("probability must lie in [0, 1], got {p}")));
    }
    if p == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    if p == 1.0 {
        return Ok(f64::INFINITY);
    }
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const P_LOW: f64 = 0.024_25;
    let mut x = if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    for _ in 0..2 {
        let pdf = (-0.5 * x * x).exp() / (2.0 * PI).sqrt();
        if pdf <= 0.0 {
            break;
        }
        let err = if x < 0.0 { normal_cdf(x) - p } else { (1.0 - p) - normal_sf(x) };
        x -= err / pdf;
    }
    Ok(x)
}

/// Modified Bessel function of the first kind, order zero.
///
/// Power series up to 15, asymptotic expansion above.
pub fn bessel_i0(x: f64) -> f64 {
    let ax = x.abs();
    if ax <= 15.0 {
        let q = 0.25 * ax * ax;
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut k = 1.0;
        loop {
            term *= q / (k * k);
            sum += term;
            if term < 1e-16 * sum {
                break;
            }
            k += 1.0;
        }
        sum
    } else {
        // Σ ((2j-1)!!)² / (j! (8x)^j), truncated at the smallest term
        let mut term = 1.0;
        let mut sum = 1.0;
        for j in 1..30 {
            let jf = j as f64;
            let next = term * (2.0 * jf - 1.0).powi(2) / (jf * 8.0 * ax);
            if next.abs() > term.abs() {
                break;
            }
            term = next;
            sum += term;
            if term < 1e-17 * sum {
                break;
            }
        }
        ax.exp() / (2.0 * PI * ax).sqrt() * sum
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_gamma_known_values() {
        assert!((ln_gamma(1.0)).abs() < 1e-14);
        assert!((ln_gamma(5.0) - 24f64.ln()).abs() < 1e-13);
        assert!((ln_gamma(0.5) - PI.sqrt().ln()).abs() < 1e-13);
    }

    #[test]
    fn chi2_quantile_examples() {
        assert!((chi2_quantile(1, 0.95).unwrap() - 3.841_458_820_694_124).abs() < 1e-8);
        let q2 = chi2_quantile(2, 0.95).unwrap();
        assert!((q2 + 2.0 * 0.05f64.ln()).abs() < 1e-10);
        assert_eq!(chi2_quantile(3, 0.0).unwrap(), 0.0);
        assert!(matches!(chi2_quantile(1, 1.0), Err(Error::Unbounded(_))));
        assert!(chi2_quantile(0, 0.5).is_err());
    }

    #[test]
    fn even_dof_closed_form() {
        // 1 - F(x) = exp(-x/2) Σ_{j<k/2} (x/2)^j / j!
        for k in [2usize, 4, 6] {
            for x in [0.3, 1.0, 4.0, 11.0, 30.0] {
                let h = x / 2.0;
                let mut term = 1.0;
                let mut s = 0.0;
                for j in 0..k / 2 {
                    if j > 0 {
                        term *= h / j as f64;
                    }
                    s += term;
                }
                let sf = (-h).exp() * s;
                assert!((chi2_sf(k, x) - sf).abs() < 1e-13, "k={k} x={x}");
            }
        }
    }

    #[test]
    fn normal_values() {
        assert!((normal_cdf(0.0) - 0.5).abs() < 1e-15);
        assert!((normal_cdf(1.959_963_984_540_054) - 0.975).abs() < 1e-12);
        assert!((normal_quantile(0.95).unwrap() - 1.644_853_626_951_472_2).abs() < 1e-12);
        assert!((normal_quantile(0.001).unwrap() + 3.090_232_306_167_813_5).abs() < 1e-10);
        assert!((normal_sf(8.0) - 6.220_960_574_271_785e-16).abs() < 1e-26);
    }

    #[test]
    fn bessel_i0_values() {
        // independent check: Simpson on (1/π)∫₀^π e^{x cos t} dt
        for &x in &[0.0, 0.5, 1.0, 3.0, 10.0, 14.9, 15.1, 30.0] {
            let m = 20_000;
            let h = PI / m as f64;
            let mut s = 0.0;
            for i in 0..=m {
                let w = if i == 0 || i == m { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
                s += w * (x * (i as f64 * h).cos()).exp();
            }
            let quad = s * h / 3.0 / PI;
            assert!((bessel_i0(x) / quad - 1.0).abs() < 1e-10, "x={x}");
        }
        assert!((bessel_i0(3.0) - 4.880_792_585_865_024).abs() < 1e-12);
    }
}
