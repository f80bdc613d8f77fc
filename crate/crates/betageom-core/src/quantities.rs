//! The `a`, `a1`, `b`, `b1` integrals and the quantities built from them.
//!
//! Every integral is taken over the real line. A factor `F_alpha(ix)`
//! grows like `cosh^alpha`, so it is stored scaled by `sech^alpha`. The
//! scaled inner integral
//! `S_m(z) = int_0^z (cosh y / cosh z)^m dy`
//! is marched outward along the trapezoid grid. The `b` side uses the
//! substitution `x = gd(u)`, under which `F_alpha(x)` becomes an
//! integral of `sech^{alpha+1}` up to `u`.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::multiset::GammaMultiset;
use crate::quadrature::{integrate_interval, lncosh, refine, QuadConfig, TailBound};
use crate::special::{c_ext, cosh_power_panel, inv_c, reg_inc_beta, sech_power_panel};
use crate::subsets::{check_size, members, CompensatedSum};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    LineRepresentation,
    IntervalRepresentation,
    ClosedFormEmpty,
    ClosedFormSingle,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantityValue {
    pub value: f64,
    /// Magnitude of the discarded part that must vanish mathematically.
    pub imag_residual: f64,
    pub method: Method,
}

impl QuantityValue {
    fn closed(value: f64, method: Method) -> Self {
        Self {
            value,
            imag_residual: 0.0,
            method,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kernel {
    A,
    A1,
    B,
    B1,
}

impl Kernel {
    fn imaginary_axis(self) -> bool {
        matches!(self, Kernel::A | Kernel::A1)
    }

    fn odd_weight(self) -> bool {
        matches!(self, Kernel::A1 | Kernel::B1)
    }
}

/// One factor of the product: `offset * sech^m + i * scale * S_m` on the
/// `a` side, `offset + scale * int_0^u sech^m` on the `b` side.
#[derive(Debug, Clone, Copy)]
struct Factor {
    offset: f64,
    scale: f64,
    exponent: f64,
}

/// Real part and discarded residual of
/// `int sech^weight (tanh)? prod factors` over the line.
fn line_kernel(kind: Kernel, weight: f64, factors: &[Factor], cfg: &QuadConfig) -> Result<(f64, f64)> {
    let mut bound = TailBound::new(weight);
    let max_exp = factors.iter().fold(1.0f64, |m, f| m.max(f.exponent));
    bound.width = 1.5 / libm::sqrt(max_exp);
    if kind.imaginary_axis() {
        bound.degree = factors.len() as f64;
        bound.log_scale = factors.iter().map(|f| libm::log(f.offset.max(f.scale))).sum();
    } else {
        bound.log_scale = factors
            .iter()
            .map(|f| libm::log(f.offset + f.scale * 0.5 * inv_c(0.5 * (f.exponent - 2.0))))
            .sum();
    }
    if !(weight > 0.0) {
        return Err(Error::InvalidDecay(weight));
    }
    let x_max = bound.truncation_point(cfg);
    let h0 = 0.5f64
        .min(x_max / 8.0)
        .min(bound.width)
        .min(1.5 / libm::sqrt(weight.max(1.0)));

    let mut state: Vec<f64> = alloc::vec![0.0; factors.len()];
    let result = refine(x_max, h0, cfg, |h, n| {
        state.iter_mut().for_each(|s| *s = 0.0);
        let mut total = if kind.odd_weight() {
            Complex64::new(0.0, 0.0)
        } else if kind.imaginary_axis() {
            factors.iter().fold(Complex64::new(1.0, 0.0), |p, f| p * f.offset)
        } else {
            Complex64::new(factors.iter().map(|f| f.offset).product(), 0.0)
        };
        let mut prev_z = 0.0;
        let mut prev_lnc = 0.0;
        for k in 1..=n {
            let z = k as f64 * h;
            let lnc = lncosh(z);
            let mut w = libm::exp(-weight * lnc);
            if kind.odd_weight() {
                w *= libm::tanh(z);
            }
            let w_neg = if kind.odd_weight() { -w } else { w };
            if kind.imaginary_axis() {
                let mut p = Complex64::new(1.0, 0.0);
                for (f, s) in factors.iter().zip(state.iter_mut()) {
                    *s = *s * libm::exp(f.exponent * (prev_lnc - lnc)) + cosh_power_panel(f.exponent, prev_z, z);
                    p *= Complex64::new(f.offset * libm::exp(-f.exponent * lnc), f.scale * *s);
                }
                total += p * w + p.conj() * w_neg;
            } else {
                let mut plus = 1.0;
                let mut minus = 1.0;
                for (f, s) in factors.iter().zip(state.iter_mut()) {
                    *s += sech_power_panel(f.exponent, prev_z, z);
                    plus *= f.offset + f.scale * *s;
                    minus *= f.offset - f.scale * *s;
                }
                total += Complex64::new(plus * w + minus * w_neg, 0.0);
            }
            prev_z = z;
            prev_lnc = lnc;
        }
        (total * h, 2 * n + 1)
    })?;
    let v = result.value;
    let (value, residual) = match kind {
        Kernel::A => (v.re, v.im.abs()),
        Kernel::A1 => (-v.im, v.re.abs()),
        Kernel::B | Kernel::B1 => (v.re, v.im.abs()),
    };
    if residual > 1e-8 * value.abs().max(1.0) {
        return Err(Error::ImaginaryResidual { value, residual });
    }
    Ok((value, residual))
}

fn line_value(kind: Kernel, weight: f64, factors: &[Factor], prefactor: f64, cfg: &QuadConfig) -> Result<QuantityValue> {
    let (value, residual) = line_kernel(kind, weight, factors, cfg)?;
    Ok(QuantityValue {
        value: prefactor * value,
        imag_residual: prefactor.abs() * residual,
        method: Method::LineRepresentation,
    })
}

fn a_factors(args: &GammaMultiset) -> Vec<Factor> {
    args.iter()
        .map(|m| Factor {
            offset: 0.5 * inv_c(0.5 * (m - 1.0)),
            scale: 1.0,
            exponent: m,
        })
        .collect()
}

fn b_factors(args: &GammaMultiset) -> Vec<Factor> {
    args.iter()
        .map(|m| Factor {
            offset: 0.5 * inv_c(0.5 * (m - 1.0)),
            scale: 1.0,
            exponent: m + 1.0,
        })
        .collect()
}

fn require_a_convergence(alpha: f64, args: &GammaMultiset) -> Result<()> {
    if alpha > args.sum() {
        Ok(())
    } else {
        Err(Error::ConvergenceDomain(alloc::format!(
            "a-quantity needs alpha > {} (sum of arguments), got {alpha}",
            args.sum()
        )))
    }
}

/// `a(alpha; args) = int cosh^{-alpha}(x) prod F_{alpha_j}(ix) dx`.
pub fn a_quantity(alpha: f64, args: &GammaMultiset, cfg: &QuadConfig) -> Result<QuantityValue> {
    match args.as_slice() {
        [] => Ok(QuantityValue::closed(inv_c(0.5 * alpha - 1.0), Method::ClosedFormEmpty)),
        [a1] => Ok(QuantityValue::closed(
            0.5 * inv_c(0.5 * (a1 - 1.0)) * inv_c(0.5 * (alpha - 2.0)),
            Method::ClosedFormSingle,
        )),
        _ => {
            require_a_convergence(alpha, args)?;
            line_value(Kernel::A, alpha - args.sum(), &a_factors(args), 1.0, cfg)
        }
    }
}

/// `a1(alpha; args) = i int cosh^{-alpha-1}(x) sinh(x) prod F_{alpha_j}(ix) dx`.
pub fn a1_quantity(alpha: f64, args: &GammaMultiset, cfg: &QuadConfig) -> Result<QuantityValue> {
    if args.is_empty() {
        return Ok(QuantityValue::closed(0.0, Method::ClosedFormEmpty));
    }
    require_a_convergence(alpha, args)?;
    line_value(Kernel::A1, alpha - args.sum(), &a_factors(args), 1.0, cfg)
}

/// `b(alpha; args) = int_{-pi/2}^{pi/2} cos^alpha(x) prod F_{alpha_j}(x) dx`.
pub fn b_quantity(alpha: f64, args: &GammaMultiset, cfg: &QuadConfig) -> Result<QuantityValue> {
    match args.as_slice() {
        [] => Ok(QuantityValue::closed(inv_c(0.5 * (alpha - 1.0)), Method::ClosedFormEmpty)),
        [a1] => Ok(QuantityValue::closed(
            0.5 * inv_c(0.5 * (a1 - 1.0)) * inv_c(0.5 * (alpha - 1.0)),
            Method::ClosedFormSingle,
        )),
        _ => {
            if !(alpha > -1.0) {
                return Err(domain!("b-quantity needs alpha > -1, got {alpha}"));
            }
            line_value(Kernel::B, alpha + 1.0, &b_factors(args), 1.0, cfg)
        }
    }
}

/// `b1(alpha; args) = int cos^{alpha-1}(x) sin(x) prod F_{alpha_j}(x) dx`.
pub fn b1_quantity(alpha: f64, args: &GammaMultiset, cfg: &QuadConfig) -> Result<QuantityValue> {
    if !(alpha > 0.0) {
        return Err(domain!("b1-quantity needs alpha > 0, got {alpha}"));
    }
    if args.is_empty() {
        return Ok(QuantityValue::closed(0.0, Method::ClosedFormEmpty));
    }
    line_value(Kernel::B1, alpha, &b_factors(args), 1.0, cfg)
}

/// Arguments `(x; Y; Z)` of the theta function.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaArgs {
    pub x: f64,
    pub y: GammaMultiset,
    pub z: GammaMultiset,
}

impl ThetaArgs {
    pub fn new(x: f64, y: GammaMultiset, z: GammaMultiset) -> Self {
        Self { x, y, z }
    }

    pub fn from_slices(x: f64, y: &[f64], z: &[f64]) -> Result<Self> {
        Ok(Self {
            x,
            y: GammaMultiset::new(y.iter().copied())?,
            z: GammaMultiset::new(z.iter().copied())?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaValue {
    pub value: f64,
    /// `Theta(x; Y; {})`.
    pub internal: f64,
    /// `Theta(x + sum Y; {}; Z)`.
    pub external: f64,
    pub imag_residual: f64,
}

/// `Theta(x; Y; {})`, the expected internal angle factor.
pub fn theta_internal(x: f64, y: &GammaMultiset, cfg: &QuadConfig) -> Result<(f64, f64)> {
    match y.len() {
        0 => Ok((1.0, 0.0)),
        1 => Ok((0.5, 0.0)),
        _ => {
            if !(x > -1.0) {
                return Err(Error::ConvergenceDomain(alloc::format!(
                    "theta needs x > -1 when #Y >= 2, got {x}"
                )));
            }
            let alpha = x + y.sum();
            let factors: Vec<Factor> = y
                .iter()
                .map(|w| Factor {
                    offset: 0.5,
                    scale: c_ext(w - 0.5),
                    exponent: 2.0 * w,
                })
                .collect();
            let v = line_value(Kernel::A, 2.0 * x + 2.0, &factors, c_ext(alpha), cfg)?;
            Ok((v.value, v.imag_residual))
        }
    }
}

/// `Theta(alpha; {}; Z)`, the expected external angle factor.
pub fn theta_external(alpha: f64, z: &GammaMultiset, cfg: &QuadConfig) -> Result<f64> {
    match z.len() {
        0 => Ok(1.0),
        1 => Ok(0.5),
        _ => {
            if !(alpha > -0.5) {
                return Err(Error::ConvergenceDomain(alloc::format!(
                    "theta needs x + sum(Y) > -1/2 when #Z >= 2, got {alpha}"
                )));
            }
            let factors: Vec<Factor> = z
                .iter()
                .map(|w| Factor {
                    offset: 0.5,
                    scale: c_ext(w - 0.5),
                    exponent: 2.0 * w + 1.0,
                })
                .collect();
            Ok(line_value(Kernel::B, 2.0 * alpha + 1.0, &factors, c_ext(alpha - 0.5), cfg)?.value)
        }
    }
}

/// The theta function, as the product of its internal and external factors.
pub fn theta(args: &ThetaArgs, cfg: &QuadConfig) -> Result<ThetaValue> {
    if !(args.x >= -0.5) || !args.x.is_finite() {
        return Err(domain!("theta needs finite x >= -1/2, got {}", args.x));
    }
    let (internal, imag_residual) = theta_internal(args.x, &args.y, cfg)?;
    let external = theta_external(args.x + args.y.sum(), &args.z, cfg)?;
    Ok(ThetaValue {
        value: internal * external,
        internal,
        external,
        imag_residual,
    })
}

fn check_betas(beta: f64, betas: &[f64], min: f64, strict: bool) -> Result<()> {
    let ok = |b: f64| b.is_finite() && if strict { b > min } else { b >= min };
    if !ok(beta) || !betas.iter().all(|b| ok(*b)) {
        let op = if strict { ">" } else { ">=" };
        return Err(domain!("parameters must be {op} {min}"));
    }
    Ok(())
}

/// Expected internal angle `Int(beta; betas)` of a beta simplex at its apex.
///
/// Parameters may go down to `min(-1, -d/2)`; theta is defined on that range.
pub fn int_quantity(beta: f64, betas: &[f64], cfg: &QuadConfig) -> Result<f64> {
    let d = betas.len() as f64;
    check_betas(beta, betas, (-d / 2.0).min(-1.0), false)?;
    match betas.len() {
        0 => Ok(1.0),
        1 => Ok(0.5),
        _ => {
            let y = GammaMultiset::new(betas.iter().map(|b| b + d / 2.0))?;
            Ok(theta_internal(beta + d / 2.0, &y, cfg)?.0)
        }
    }
}

/// Expected external quantity `Ext(beta; betas)`.
///
/// Parameters may go down to `-(d+1)/2`. When some `beta_i + d/2` is
/// negative, theta is undefined and the double integral is used instead.
pub fn ext_quantity(beta: f64, betas: &[f64], cfg: &QuadConfig) -> Result<f64> {
    let d = betas.len() as f64;
    check_betas(beta, betas, -(d + 1.0) / 2.0, true)?;
    match betas.len() {
        0 => Ok(1.0),
        1 => Ok(0.5),
        _ if betas.iter().all(|b| b + d / 2.0 >= 0.0) => {
            let z = GammaMultiset::new(betas.iter().map(|b| b + d / 2.0))?;
            theta_external(beta + d / 2.0, &z, cfg)
        }
        _ => ext_double_integral(beta, betas, cfg),
    }
}

/// `Ext(beta; betas)` from its double integral over `(-1, 1)`.
pub fn ext_double_integral(beta: f64, betas: &[f64], cfg: &QuadConfig) -> Result<f64> {
    let d = betas.len() as f64;
    check_betas(beta, betas, -(d + 1.0) / 2.0, true)?;
    if betas.is_empty() {
        return Ok(1.0);
    }
    let p = beta + (d - 1.0) / 2.0;
    let shapes: Vec<f64> = betas.iter().map(|b| b + (d - 1.0) / 2.0 + 1.0).collect();
    let front = c_ext(p);
    let g = |t: f64| {
        let u = (0.5 * (1.0 + t)).clamp(0.0, 1.0);
        let prod: f64 = shapes.iter().map(|a| reg_inc_beta(u, *a, *a).unwrap_or(f64::NAN)).product();
        Complex64::new(front * prod, 0.0)
    };
    let r = integrate_interval(g, -1.0, 1.0, (p, p), cfg)?;
    if r.value.re.is_nan() {
        return Err(domain!("incomplete beta failed inside the Ext double integral"));
    }
    Ok(r.value.re)
}

/// `A(gamma; gammas)` through the c-prefactored a-quantity.
pub fn big_a(gamma: f64, gammas: &GammaMultiset, cfg: &QuadConfig) -> Result<f64> {
    match gammas.len() {
        0 => return Ok(1.0),
        1 => return Ok(0.5),
        _ => {}
    }
    let s = gammas.sum();
    let front = c_ext(gamma + s) * gammas.iter().map(|g| c_ext(g - 0.5)).product::<f64>();
    let a = a_quantity(2.0 * gamma + 2.0 * s + 2.0, &gammas.scaled(2.0), cfg)?;
    Ok(front * a.value)
}

/// `B(gamma; gammas)` through the c-prefactored b-quantity.
pub fn big_b(gamma: f64, gammas: &GammaMultiset, cfg: &QuadConfig) -> Result<f64> {
    match gammas.len() {
        0 => return Ok(1.0),
        1 => return Ok(0.5),
        _ => {}
    }
    let s = gammas.sum();
    let front = c_ext(gamma - s - 0.5) * gammas.iter().map(|g| c_ext(g - 0.5)).product::<f64>();
    let b = b_quantity(2.0 * gamma - 2.0 * s, &gammas.scaled(2.0), cfg)?;
    Ok(front * b.value)
}

/// `s_{d,zeta}(lambda) = sum_I zeta^{#I} a(lambda+S_I+2; I) (lambda+S_I+1) b(lambda+S_I; I^c)`.
pub fn s_sum(lambda: f64, lambdas: &[f64], zeta: i32, cfg: &QuadConfig) -> Result<f64> {
    if !(lambda > -1.0) {
        return Err(domain!("s-sum needs lambda > -1, got {lambda}"));
    }
    if zeta != 1 && zeta != -1 {
        return Err(domain!("zeta must be +1 or -1, got {zeta}"));
    }
    let d = lambdas.len();
    check_size(d)?;
    let mut acc = CompensatedSum::default();
    for mask in 0u32..(1u32 << d) {
        let inside: Vec<f64> = members(mask).map(|i| lambdas[i]).collect();
        let outside: Vec<f64> = (0..d).filter(|i| mask & (1 << i) == 0).map(|i| lambdas[i]).collect();
        let s: f64 = inside.iter().sum();
        let a = a_quantity(lambda + s + 2.0, &GammaMultiset::new(inside.iter().copied())?, cfg)?.value;
        let b = b_quantity(lambda + s, &GammaMultiset::new(outside)?, cfg)?.value;
        let sign = if zeta == -1 && inside.len() % 2 == 1 { -1.0 } else { 1.0 };
        acc.add(sign * a * (lambda + s + 1.0) * b);
    }
    Ok(acc.value())
}
