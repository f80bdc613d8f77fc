//! Linear combinations of theta values.
//!
//! Every expectation of the cone and polytope layers is a weighted sum of
//! `Theta(x; {gamma_i : i in I}; {gamma_i : i in U \ I})` over subsets `I`
//! of some pool `U`. Terms with the same canonical arguments are merged
//! before any quadrature runs, so repeated parameters cost one evaluation.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::error::Result;
use crate::multiset::GammaMultiset;
use crate::quadrature::QuadConfig;
use crate::quantities::{theta, ThetaArgs};
use crate::subsets::{binomial, check_size, members, CompensatedSum};

type TermKey = (u64, Vec<u64>, Vec<u64>);

fn key_of(args: &ThetaArgs) -> TermKey {
    (
        (args.x + 0.0).to_bits(),
        args.y.iter().map(f64::to_bits).collect(),
        args.z.iter().map(f64::to_bits).collect(),
    )
}

#[derive(Debug, Clone, Default)]
pub struct ThetaSum {
    terms: BTreeMap<TermKey, (ThetaArgs, f64)>,
}

fn is_constant(pool: &[f64]) -> bool {
    let (lo, hi) = pool
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(*v), hi.max(*v)));
    pool.len() >= 2 && hi - lo <= 1e-12
}

impl ThetaSum {
    pub fn new() -> Self {
        Self::default()
    }

    /// Number of distinct theta evaluations the sum needs.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&mut self, coef: f64, args: ThetaArgs) {
        if coef == 0.0 {
            return;
        }
        self.terms
            .entry(key_of(&args))
            .and_modify(|(_, c)| *c += coef)
            .or_insert((args, coef));
    }

    /// Adds every term of `other`, scaled by `factor`.
    pub fn add_all(&mut self, other: &ThetaSum, factor: f64) {
        for (args, coef) in other.terms.values() {
            self.add(coef * factor, args.clone());
        }
    }

    /// Adds `coef * weight(#I) * Theta(x; pool_I; pool_{I^c})` for every `I`.
    ///
    /// A pool of equal values collapses to one term per subset size.
    pub fn add_split<W: Fn(usize) -> f64>(&mut self, coef: f64, x: f64, pool: &[f64], weight: W) -> Result<()> {
        let n = pool.len();
        if is_constant(pool) {
            let g = pool[0];
            for s in 0..=n {
                let w = weight(s);
                if w != 0.0 {
                    let y = GammaMultiset::new(core::iter::repeat_n(g, s))?;
                    let z = GammaMultiset::new(core::iter::repeat_n(g, n - s))?;
                    self.add(coef * w * binomial(n, s), ThetaArgs::new(x, y, z));
                }
            }
            return Ok(());
        }
        check_size(n)?;
        for mask in 0u32..(1u32 << n) {
            let w = weight(mask.count_ones() as usize);
            if w == 0.0 {
                continue;
            }
            let y = GammaMultiset::new(members(mask).map(|i| pool[i]))?;
            let z = GammaMultiset::new((0..n).filter(|i| mask & (1 << i) == 0).map(|i| pool[i]))?;
            self.add(coef * w, ThetaArgs::new(x, y, z));
        }
        Ok(())
    }

    pub fn evaluate(&self, cfg: &QuadConfig) -> Result<f64> {
        let mut acc = CompensatedSum::default();
        for (args, coef) in self.terms.values() {
            if *coef != 0.0 {
                acc.add(coef * theta(args, cfg)?.value);
            }
        }
        Ok(acc.value())
    }
}

/// Weight `1` on sizes `first, first + 2, ..` (all sizes of that parity from `first` up).
pub fn parity_from(first: i64) -> impl Fn(usize) -> f64 {
    move |s| {
        let s = s as i64;
        if s >= first && (s - first) % 2 == 0 {
            1.0
        } else {
            0.0
        }
    }
}

/// Weight `1` on sizes `top, top - 2, ..` down to zero.
pub fn parity_down_from(top: i64) -> impl Fn(usize) -> f64 {
    move |s| {
        let s = s as i64;
        if s <= top && (top - s) % 2 == 0 {
            1.0
        } else {
            0.0
        }
    }
}

/// Weight `1` on exactly one size.
pub fn exactly(size: usize) -> impl Fn(usize) -> f64 {
    move |s| if s == size { 1.0 } else { 0.0 }
}

/// Weight `1` on sizes at least `min`.
pub fn at_least(min: usize) -> impl Fn(usize) -> f64 {
    move |s| if s >= min { 1.0 } else { 0.0 }
}

/// Weight `(-1)^{top - s}` on sizes `s <= top`.
pub fn alternating_up_to(top: i64) -> impl Fn(usize) -> f64 {
    move |s| {
        let s = s as i64;
        match s {
            s if s > top => 0.0,
            s if (top - s) % 2 == 0 => 1.0,
            _ => -1.0,
        }
    }
}

/// Evaluates a single split sum.
pub fn split_sum<W: Fn(usize) -> f64>(x: f64, pool: &[f64], weight: W, cfg: &QuadConfig) -> Result<f64> {
    let mut sum = ThetaSum::new();
    sum.add_split(1.0, x, pool, weight)?;
    sum.evaluate(cfg)
}
