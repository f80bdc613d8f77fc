//! Normalizing constants and the functions `F_beta` on the real and imaginary axes.

use core::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::error::{domain, Result};
use crate::quadrature::{anchored_integral, lncosh};

const SQRT_PI: f64 = 1.772_453_850_905_516;

/// `ln |Gamma(x)|` and the sign of `Gamma(x)`; `None` at the poles.
fn ln_gamma_signed(x: f64) -> Option<(f64, f64)> {
    if x <= 0.0 && x == libm::floor(x) {
        return None;
    }
    let (lg, sign) = libm::lgamma_r(x);
    Some((lg, if sign < 0 { -1.0 } else { 1.0 }))
}

/// `Gamma(x + 1/2) / Gamma(x)` for `x > 0`.
///
/// The large-argument branch avoids cancelling two huge log-gamma values.
pub fn gamma_half_ratio(x: f64) -> f64 {
    if x >= 1e4 {
        let r = 1.0 / x;
        let series = 1.0 - r / 8.0 + r * r / 128.0 + 5.0 * r * r * r / 1024.0 - 21.0 * r * r * r * r / 32768.0;
        libm::sqrt(x) * series
    } else {
        libm::exp(libm::lgamma(x + 0.5) - libm::lgamma(x))
    }
}

/// `Gamma(a) / Gamma(b)` for positive arguments.
pub fn gamma_ratio(a: f64, b: f64) -> f64 {
    libm::exp(libm::lgamma(a) - libm::lgamma(b))
}

/// `c_beta = Gamma(beta + 3/2) / (sqrt(pi) Gamma(beta + 1))`, continued meromorphically.
///
/// Returns 0 at the poles of `Gamma(beta + 1)` and infinity at the poles of
/// `Gamma(beta + 3/2)`.
pub fn c_ext(beta: f64) -> f64 {
    if beta > -1.0 {
        return gamma_half_ratio(beta + 1.0) / SQRT_PI;
    }
    match (ln_gamma_signed(beta + 1.5), ln_gamma_signed(beta + 1.0)) {
        (_, None) => 0.0,
        (None, Some(_)) => f64::INFINITY,
        (Some((ln, sn)), Some((ld, sd))) => sn * sd * libm::exp(ln - ld) / SQRT_PI,
    }
}

/// `1 / c_beta`, with the same continuation as [`c_ext`].
pub fn inv_c(beta: f64) -> f64 {
    if beta > -1.0 {
        return SQRT_PI / gamma_half_ratio(beta + 1.0);
    }
    match (ln_gamma_signed(beta + 1.5), ln_gamma_signed(beta + 1.0)) {
        (None, _) => 0.0,
        (Some(_), None) => f64::INFINITY,
        (Some((ln, sn)), Some((ld, sd))) => sn * sd * SQRT_PI * libm::exp(ld - ln),
    }
}

/// The one-dimensional beta normalizing constant `c_beta`.
pub fn c_const(beta: f64) -> Result<f64> {
    if !(beta > -1.5) || !beta.is_finite() {
        return Err(domain!("c_beta requires beta > -3/2, got {beta}"));
    }
    Ok(c_ext(beta))
}

/// Volume of the unit ball in dimension `d`.
pub fn kappa(d: usize) -> f64 {
    let h = d as f64 / 2.0;
    libm::exp(h * libm::log(PI) - libm::lgamma(h + 1.0))
}

/// Regularized incomplete beta function `I_x(a, b)` by Lentz's continued fraction.
pub fn reg_inc_beta(x: f64, a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) {
        return Err(domain!("incomplete beta needs a, b > 0, got ({a}, {b})"));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(domain!("incomplete beta argument {x} outside [0, 1]"));
    }
    if x == 0.0 || x == 1.0 {
        return Ok(x);
    }
    let ln_front = a * libm::log(x) + b * libm::log1p(-x) - ln_beta(a, b);
    // The fraction converges fast for x below the mean; use the mirror otherwise.
    if x < (a + 1.0) / (a + b + 2.0) {
        Ok(libm::exp(ln_front) * beta_fraction(x, a, b) / a)
    } else {
        Ok(1.0 - libm::exp(ln_front) * beta_fraction(1.0 - x, b, a) / b)
    }
}

fn ln_beta(a: f64, b: f64) -> f64 {
    libm::lgamma(a) + libm::lgamma(b) - libm::lgamma(a + b)
}

fn beta_fraction(x: f64, a: f64, b: f64) -> f64 {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-15;
    let clamp = |v: f64| if v.abs() < TINY { TINY } else { v };
    let mut c = 1.0;
    let mut d = 1.0 / clamp(1.0 - (a + b) * x / (a + 1.0));
    let mut h = d;
    let max_iter = 200 + 20 * libm::sqrt(a.max(b)) as usize;
    for m in 1..=max_iter {
        let m = m as f64;
        let m2 = 2.0 * m;
        let even = m * (b - m) * x / ((a + m2 - 1.0) * (a + m2));
        d = 1.0 / clamp(1.0 + even * d);
        c = clamp(1.0 + even / c);
        h *= d * c;
        let odd = -(a + m) * (a + b + m) * x / ((a + m2) * (a + m2 + 1.0));
        d = 1.0 / clamp(1.0 + odd * d);
        c = clamp(1.0 + odd / c);
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// `F_beta(x) = int_{-pi/2}^x cos^beta(y) dy` for real `x`.
pub fn f_real(beta: f64, x: f64) -> Result<f64> {
    if !(beta > -1.0) {
        return Err(domain!("F_beta requires beta > -1, got {beta}"));
    }
    if !(-FRAC_PI_2..=FRAC_PI_2).contains(&x) {
        return Err(domain!("F_beta argument {x} outside [-pi/2, pi/2]"));
    }
    // s = sin y, u = (1 + s)/2 = sin^2(y/2 + pi/4). The left half is
    // evaluated directly and the right half by reflection, so u stays small.
    let full = inv_c(0.5 * (beta - 1.0));
    let a = 0.5 * (beta + 1.0);
    let s = libm::sin(-0.5 * x.abs() + 0.25 * PI);
    let left = reg_inc_beta((s * s).min(1.0), a, a)? * full;
    Ok(if x > 0.0 { full - left } else { left })
}

/// `S_m(z) = int_0^z (cosh y / cosh z)^m dy` over the panel `[lo, hi]`, `0 <= lo < hi`.
///
/// Only the panel part `int_lo^hi (cosh y / cosh hi)^m dy` is returned.
pub(crate) fn cosh_power_panel(m: f64, lo: f64, hi: f64) -> f64 {
    if m == 0.0 {
        return hi - lo;
    }
    let top = lncosh(hi);
    let sm = libm::sqrt(m);
    anchored_integral(
        hi - lo,
        |s| m * (lncosh(hi - s) - top),
        |s| 2.0 / (m * libm::tanh(hi - s) + sm),
    )
}

/// `int_lo^hi sech^m(y) dy` for `0 <= lo < hi`.
pub(crate) fn sech_power_panel(m: f64, lo: f64, hi: f64) -> f64 {
    if m == 0.0 {
        return hi - lo;
    }
    let base = lncosh(lo);
    let sm = libm::sqrt(m);
    libm::exp(-m * base)
        * anchored_integral(
            hi - lo,
            |s| -m * (lncosh(lo + s) - base),
            |s| 2.0 / (m * libm::tanh(lo + s) + sm),
        )
}

/// `int_0^x cosh^beta(y) dy`, odd in `x`.
pub fn cosh_power_integral(beta: f64, x: f64) -> f64 {
    let z = x.abs();
    let mut scaled = 0.0;
    let mut lo = 0.0;
    while lo < z {
        let hi = (lo + 0.25).min(z);
        scaled = scaled * libm::exp(beta * (lncosh(lo) - lncosh(hi))) + cosh_power_panel(beta, lo, hi);
        lo = hi;
    }
    let v = scaled * libm::exp(beta * lncosh(z));
    if x < 0.0 {
        -v
    } else {
        v
    }
}

/// `F_beta(i x) = 1/(2 c_{(beta-1)/2}) + i int_0^x cosh^beta(y) dy`.
pub fn f_imag(beta: f64, x: f64) -> Result<Complex64> {
    if !(beta >= 0.0) {
        return Err(domain!("F_beta(ix) requires beta >= 0, got {beta}"));
    }
    Ok(Complex64::new(0.5 * inv_c(0.5 * (beta - 1.0)), cosh_power_integral(beta, x)))
}
