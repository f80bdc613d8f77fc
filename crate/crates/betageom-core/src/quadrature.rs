//! Trapezoidal quadrature on the real line and on finite intervals.
//!
//! Integrands that decay like a power of `sech` are analytic in a strip
//! around the real axis. For those, the trapezoidal rule converges
//! geometrically in the inverse step size. The integrators halve the
//! step until two consecutive levels agree. Finite intervals with
//! algebraic endpoint behaviour are mapped to the line by `t = tanh x`.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerances and limits for every integral in the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Number of step halvings allowed after the initial grid.
    pub max_refinements: u32,
    /// Decades of decay the integrand bound must reach at the truncation point.
    pub truncation_margin: f64,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_refinements: 18,
            truncation_margin: 40.0,
        }
    }
}

impl QuadConfig {
    /// Same config with `rel_tol` replaced; `abs_tol` follows at a 1/100 ratio.
    pub fn with_tol(tol: f64) -> Self {
        Self {
            rel_tol: tol,
            abs_tol: tol * 1e-2,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.rel_tol > 0.0
            && self.abs_tol > 0.0
            && self.max_refinements >= 1
            && self.truncation_margin > 0.0
            && self.rel_tol.is_finite()
            && self.abs_tol.is_finite();
        if ok {
            Ok(())
        } else {
            Err(crate::error::domain!("invalid quadrature config {:?}", self))
        }
    }

    fn tolerance_for(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value)
    }

    fn tail_log_target(&self) -> f64 {
        let margin = -self.truncation_margin * core::f64::consts::LN_10;
        margin.min(libm::log(self.abs_tol * 0.1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: Complex64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

/// Upper bound `scale * (1 + |x|)^degree * sech(x)^rate` for an integrand on the line.
///
/// `width` is the length scale of the narrowest feature, used to pick the
/// starting step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailBound {
    pub rate: f64,
    pub degree: f64,
    pub log_scale: f64,
    pub width: f64,
}

impl TailBound {
    pub fn new(rate: f64) -> Self {
        Self {
            rate,
            degree: 0.0,
            log_scale: 0.0,
            width: 1.0,
        }
    }

    fn log_bound(&self, x: f64) -> f64 {
        self.log_scale + self.degree * libm::log1p(x) - self.rate * lncosh(x)
    }

    /// Smallest grid radius at which the bound falls below the tail target.
    pub fn truncation_point(&self, cfg: &QuadConfig) -> f64 {
        let target = cfg.tail_log_target();
        let mut hi = 1.0;
        while self.log_bound(hi) > target {
            hi *= 2.0;
        }
        let mut lo = 0.0;
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if self.log_bound(mid) > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }

    fn initial_step(&self, x_max: f64) -> f64 {
        let feature = self.width.min(1.5 / libm::sqrt(self.rate.max(1.0)));
        0.5f64.min(x_max / 8.0).min(feature)
    }
}

/// `ln cosh x` without overflow.
pub fn lncosh(x: f64) -> f64 {
    let a = x.abs();
    a + libm::log1p(libm::exp(-2.0 * a)) - core::f64::consts::LN_2
}

const GL_NODES: [f64; 5] = [
    0.148_874_338_981_631_2,
    0.433_395_394_129_247_2,
    0.679_409_568_299_024_4,
    0.865_063_366_688_984_5,
    0.973_906_528_517_171_7,
];
const GL_WEIGHTS: [f64; 5] = [
    0.295_524_224_714_752_9,
    0.269_266_719_309_996_3,
    0.219_086_362_515_982,
    0.149_451_349_150_580_6,
    0.066_671_344_308_688_1,
];

/// Ten-point Gauss-Legendre rule on `[a, b]`.
pub fn gauss_legendre<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut sum = 0.0;
    for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS.iter()) {
        sum += w * (f(mid - half * x) + f(mid + half * x));
    }
    sum * half
}

// exp(-60) is far below any tolerance relative to the anchor value.
const LOG_NEGLIGIBLE: f64 = 60.0;

/// `int_0^w exp(phi(s)) ds` for `phi(0) = 0` and `phi` nonincreasing.
///
/// `step(s)` is a width over which `phi` changes by at most about 2, so
/// each Gauss-Legendre panel sees a gently varying integrand. Sharp
/// boundary layers near the anchor are resolved this way.
pub(crate) fn anchored_integral<P, S>(w: f64, phi: P, step: S) -> f64
where
    P: Fn(f64) -> f64,
    S: Fn(f64) -> f64,
{
    let mut s = 0.0;
    let mut total = 0.0;
    while s < w {
        if phi(s) < -LOG_NEGLIGIBLE {
            break;
        }
        let ds = step(s).min(0.5).min(w - s);
        let e = s + ds;
        total += gauss_legendre(|t| libm::exp(phi(t)), s, e);
        s = e;
    }
    total
}

/// Trapezoidal refinement driver.
///
/// `level(h, n)` must return `h * sum_{|k| <= n} f(k h)` and the number of
/// evaluations it used. Each level halves `h` and doubles `n`.
pub(crate) fn refine<F>(x_max: f64, h0: f64, cfg: &QuadConfig, mut level: F) -> Result<QuadResult>
where
    F: FnMut(f64, usize) -> (Complex64, usize),
{
    cfg.validate()?;
    let n0 = libm::ceil(x_max / h0).max(1.0) as usize;
    let mut h = x_max / n0 as f64;
    let mut n = n0;
    let (mut prev, mut evaluations) = level(h, n);
    let mut difference = f64::INFINITY;
    for l in 1..=cfg.max_refinements {
        h *= 0.5;
        n *= 2;
        let (cur, e) = level(h, n);
        evaluations += e;
        difference = (cur - prev).norm();
        if l >= 2 && difference <= cfg.tolerance_for(cur.norm()) {
            return Ok(QuadResult {
                value: cur,
                error_estimate: difference,
                evaluations,
            });
        }
        prev = cur;
    }
    Err(Error::NonConvergence {
        refinements: cfg.max_refinements,
        difference,
    })
}

/// Integral over the real line of `f` under an explicit tail bound.
///
/// Nodes of the previous level are reused, so the cost is that of the
/// finest grid.
pub fn integrate_line_bounded<F>(f: F, bound: TailBound, cfg: &QuadConfig) -> Result<QuadResult>
where
    F: Fn(f64) -> Complex64,
{
    if !(bound.rate > 0.0) {
        return Err(Error::InvalidDecay(bound.rate));
    }
    let x_max = bound.truncation_point(cfg);
    let h0 = bound.initial_step(x_max);
    let mut raw = Complex64::new(0.0, 0.0);
    let mut last_n = 0usize;
    refine(x_max, h0, cfg, |h, n| {
        let mut evals = 0;
        if last_n == 0 {
            raw = f(0.0);
            evals += 1;
            for k in 1..=n {
                let x = k as f64 * h;
                raw += f(x) + f(-x);
                evals += 2;
            }
        } else {
            for k in (1..=n).step_by(2) {
                let x = k as f64 * h;
                raw += f(x) + f(-x);
                evals += 2;
            }
        }
        last_n = n;
        (raw * h, evals)
    })
}

/// Integral over the real line of `f` with `|f(x)| <= C e^{-decay_rate |x|}`, `C` of order one.
pub fn integrate_real_line<F>(f: F, decay_rate: f64, cfg: &QuadConfig) -> Result<QuadResult>
where
    F: Fn(f64) -> Complex64,
{
    integrate_line_bounded(f, TailBound::new(decay_rate), cfg)
}

/// `int_lo^hi g(t) (t - lo)^p (hi - t)^q dt` for a smooth `g`.
///
/// The weight is applied here, in the transformed variable, so that it
/// stays accurate where `t` rounds to an endpoint.
pub fn integrate_interval<G>(g: G, lo: f64, hi: f64, endpoint_exponents: (f64, f64), cfg: &QuadConfig) -> Result<QuadResult>
where
    G: Fn(f64) -> Complex64,
{
    let (p, q) = endpoint_exponents;
    if !(p > -1.0 && q > -1.0) {
        return Err(Error::InvalidExponent(p, q));
    }
    if !(hi > lo) {
        return Err(crate::error::domain!("empty interval ({lo}, {hi})"));
    }
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let log_half = libm::log(half) * (p + q + 1.0);
    let integrand = |x: f64| {
        let t = mid + half * libm::tanh(x);
        let w = libm::exp(log_half + (p - q) * x - (p + q + 2.0) * lncosh(x));
        g(t) * w
    };
    let mut bound = TailBound::new(2.0 * p.min(q) + 2.0);
    // The weight is not symmetric, so bound the slower side by the
    // faster-decaying envelope shifted by the exponent imbalance.
    bound.log_scale = log_half.max(0.0) + (p - q).abs() * core::f64::consts::LN_2;
    integrate_line_bounded(integrand, bound, cfg)
}
