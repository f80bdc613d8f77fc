//! Beta points on the unit ball.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution, StandardNormal};

use super::linalg::norm;
use crate::error::{domain, Result};

/// Seed and stream index of one generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RngSpec {
    pub seed: u64,
    pub stream: u64,
}

impl RngSpec {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

/// Uniform direction on the sphere `S^{d-1}`.
pub fn sample_direction<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let g: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
        let r = norm(&g);
        if r > 0.0 {
            return g.into_iter().map(|x| x / r).collect();
        }
    }
}

/// Standard Gaussian vector in `R^d`.
pub fn sample_gaussian<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<f64> {
    (0..d).map(|_| StandardNormal.sample(rng)).collect()
}

/// Sampler for `f_{d, beta}`: `X = r U` with `r^2 ~ Beta(d/2, beta + 1)`.
#[derive(Debug, Clone)]
pub struct BetaPointSampler {
    d: usize,
    radial: Option<Beta<f64>>,
}

impl BetaPointSampler {
    pub fn new(d: usize, beta: f64) -> Result<Self> {
        if d == 0 {
            return Err(domain!("dimension must be at least 1"));
        }
        if !beta.is_finite() || beta < -1.0 {
            return Err(domain!("beta must be finite and >= -1, got {beta}"));
        }
        let radial = if beta == -1.0 {
            None
        } else {
            Some(Beta::new(d as f64 / 2.0, beta + 1.0).map_err(|e| domain!("radial law: {e}"))?)
        };
        Ok(Self { d, radial })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let u = sample_direction(self.d, rng);
        match &self.radial {
            None => u,
            Some(b) => {
                let r = libm::sqrt(b.sample(rng));
                u.into_iter().map(|x| r * x).collect()
            }
        }
    }
}

/// One draw from `f_{d, beta}`.
pub fn sample_beta_point<R: Rng + ?Sized>(d: usize, beta: f64, rng: &mut R) -> Result<Vec<f64>> {
    Ok(BetaPointSampler::new(d, beta)?.sample(rng))
}
