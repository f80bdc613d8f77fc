//! Nonnegative least squares (Lawson-Hanson active set).

use alloc::vec::Vec;

use super::linalg::{dot, least_squares, norm, sub};
use crate::error::{Error, Result};

/// Residual (relative to `|b|`) below which `b` counts as a member of the cone.
pub const MEMBER_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct NnlsSolution {
    /// Coefficients, one per generator, all `>= 0`.
    pub coef: Vec<f64>,
    /// `|A x - b|`.
    pub residual: f64,
}

impl NnlsSolution {
    /// Number of generators with positive weight.
    pub fn support(&self) -> usize {
        self.coef.iter().filter(|c| **c > 0.0).count()
    }
}

fn combine(gens: &[Vec<f64>], x: &[f64], d: usize) -> Vec<f64> {
    let mut out = alloc::vec![0.0; d];
    for (g, c) in gens.iter().zip(x) {
        if *c != 0.0 {
            out.iter_mut().zip(g).for_each(|(o, v)| *o += c * v);
        }
    }
    out
}

/// `min |sum_i x_i g_i - b|` over `x >= 0`.
pub fn nnls(gens: &[Vec<f64>], b: &[f64]) -> Result<NnlsSolution> {
    let n = gens.len();
    let d = b.len();
    let scale = gens.iter().map(|g| norm(g)).fold(0.0, f64::max).max(1e-300) * norm(b).max(1e-300);
    let tol = 1e-13 * scale;
    let mut x = alloc::vec![0.0; n];
    let mut passive = alloc::vec![false; n];
    let mut excluded = alloc::vec![false; n];
    for _ in 0..10 * n + 10 {
        let r = sub(b, &combine(gens, &x, d));
        let grad: Vec<f64> = gens.iter().map(|g| dot(g, &r)).collect();
        let pick = (0..n)
            .filter(|j| !passive[*j] && !excluded[*j] && grad[*j] > tol)
            .max_by(|i, j| grad[*i].total_cmp(&grad[*j]));
        let Some(j) = pick else {
            return Ok(NnlsSolution {
                residual: norm(&r),
                coef: x,
            });
        };
        passive[j] = true;
        for _ in 0..n + 1 {
            let idx: Vec<usize> = (0..n).filter(|i| passive[*i]).collect();
            let cols: Vec<&[f64]> = idx.iter().map(|i| gens[*i].as_slice()).collect();
            let Some(s) = least_squares(&cols, b) else {
                // the newest column is dependent on the passive set
                passive[j] = false;
                excluded[j] = true;
                break;
            };
            excluded.iter_mut().for_each(|e| *e = false);
            if s.iter().all(|v| *v > 0.0) {
                x.iter_mut().for_each(|v| *v = 0.0);
                idx.iter().zip(&s).for_each(|(i, v)| x[*i] = *v);
                break;
            }
            let mut alpha = f64::INFINITY;
            let mut blocking = idx[0];
            for (i, v) in idx.iter().zip(&s) {
                if *v <= 0.0 {
                    let step = x[*i] / (x[*i] - v);
                    if step < alpha {
                        alpha = step;
                        blocking = *i;
                    }
                }
            }
            for (i, v) in idx.iter().zip(&s) {
                x[*i] += alpha * (v - x[*i]);
                if *i == blocking || x[*i] <= 0.0 {
                    x[*i] = 0.0;
                    passive[*i] = false;
                }
            }
        }
    }
    Err(Error::DegenerateInput("nonnegative least squares did not terminate".into()))
}

/// `true` iff `b` lies in `pos(gens)` up to [`MEMBER_TOL`].
pub fn in_cone(gens: &[Vec<f64>], b: &[f64]) -> Result<bool> {
    let s = nnls(gens, b)?;
    Ok(s.residual <= MEMBER_TOL * norm(b))
}
