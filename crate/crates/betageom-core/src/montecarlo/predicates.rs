//! Face events decided as absorption events.
//!
//! `[x_K]` is a face of `[x_1, .., x_n]` iff the other points, projected
//! onto the orthogonal complement of the affine hull of `x_K` and shifted
//! so that the hull lands at the origin, do not positively span that
//! complement. The conical version uses the linear hull instead.

use alloc::vec::Vec;

use super::linalg::{complement, coordinates, extend_basis, sub};
use super::lp::cone_is_full_space;
use crate::error::{Error, Result};

/// Relative tolerance for a rank-deficient face hull.
pub const SPAN_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaceMode {
    /// `points` are the vertices of a polytope; `1 <= #K <= d`.
    Polytope,
    /// `points` are the generators of a cone; `0 <= #K <= d - 1`.
    Cone,
}

fn check_indices(n: usize, face: &[usize]) -> Result<()> {
    let mut seen = alloc::vec![false; n];
    for &i in face {
        if i >= n || seen[i] {
            return Err(Error::Index(alloc::format!(
                "face index set {face:?} is not a set of distinct indices below {n}"
            )));
        }
        seen[i] = true;
    }
    Ok(())
}

/// `true` iff `[x_K]` (or `pos(x_K)`) is a face.
pub fn is_face(points: &[Vec<f64>], face: &[usize], mode: FaceMode) -> Result<bool> {
    let n = points.len();
    let d = points.first().map_or(0, Vec::len);
    check_indices(n, face)?;
    let (origin, span): (Vec<f64>, Vec<Vec<f64>>) = match mode {
        FaceMode::Polytope => {
            if face.is_empty() || face.len() > d {
                return Err(Error::Index(alloc::format!("#K = {} outside 1..={d}", face.len())));
            }
            let o = points[face[0]].clone();
            (o.clone(), face[1..].iter().map(|i| sub(&points[*i], &o)).collect())
        }
        FaceMode::Cone => {
            if face.len() >= d {
                return Err(Error::Index(alloc::format!(
                    "#K = {} outside 0..={}",
                    face.len(),
                    d.saturating_sub(1)
                )));
            }
            (alloc::vec![0.0; d], face.iter().map(|i| points[*i].clone()).collect())
        }
    };
    let mut basis = Vec::new();
    for v in &span {
        if !extend_basis(&mut basis, v, SPAN_TOL) {
            return Err(Error::DegenerateInput(alloc::format!(
                "the hull of {face:?} is rank deficient"
            )));
        }
    }
    let perp = complement(&basis, d);
    let mut inside = alloc::vec![false; n];
    face.iter().for_each(|i| inside[*i] = true);
    let rest: Vec<Vec<f64>> = (0..n)
        .filter(|i| !inside[*i])
        .map(|i| coordinates(&sub(&points[i], &origin), &perp))
        .collect();
    if rest.is_empty() {
        return Ok(true);
    }
    Ok(!cone_is_full_space(&rest)?)
}

/// `true` iff `y` lies in the convex hull of `points` (absorption form).
pub fn hull_contains(points: &[Vec<f64>], y: &[f64]) -> Result<bool> {
    let v: Vec<Vec<f64>> = points.iter().map(|p| sub(p, y)).collect();
    cone_is_full_space(&v)
}
