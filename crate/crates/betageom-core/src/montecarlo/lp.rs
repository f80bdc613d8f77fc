//! Full-space test for finitely generated cones.
//!
//! `pos(v_1, .., v_n) = R^d` iff no `u != 0` has `<u, v_i> <= 0` for all
//! `i`. With normalized generators this is the linear program
//!
//! ```text
//! maximize m  subject to  <u, v_i> + m <= 0,  -1 <= u_j <= 1,  0 <= m <= 1,
//! ```
//!
//! whose optimum is positive exactly when some open half-space holds
//! every generator. It is solved by a dense tableau simplex with Bland's
//! rule, starting from the slack basis (all right-hand sides are `>= 0`).

use alloc::vec::Vec;

use super::linalg::norm;
use crate::error::{Error, Result};

/// Margins at or below this count as zero.
pub const MARGIN_TOL: f64 = 1e-9;

const PIVOT_EPS: f64 = 1e-12;

struct Tableau {
    rows: usize,
    cols: usize,
    // row-major, `rows + 1` rows (last is the objective) and `cols + 1` columns (last is rhs)
    a: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    fn at(&self, r: usize, c: usize) -> f64 {
        self.a[r * (self.cols + 1) + c]
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let w = self.cols + 1;
        let p = self.at(pr, pc);
        for c in 0..w {
            self.a[pr * w + c] /= p;
        }
        for r in 0..=self.rows {
            if r == pr {
                continue;
            }
            let f = self.a[r * w + pc];
            if f != 0.0 {
                for c in 0..w {
                    self.a[r * w + c] -= f * self.a[pr * w + c];
                }
            }
        }
        self.basis[pr] = pc;
    }

    /// Maximizes; the objective row stores negated costs.
    fn solve(&mut self) -> Result<f64> {
        let limit = 50 * (self.rows + self.cols);
        for _ in 0..limit {
            let Some(pc) = (0..self.cols).find(|c| self.at(self.rows, *c) < -PIVOT_EPS) else {
                return Ok(self.at(self.rows, self.cols));
            };
            let mut best: Option<(f64, usize, usize)> = None;
            for r in 0..self.rows {
                let v = self.at(r, pc);
                if v > PIVOT_EPS {
                    let ratio = self.at(r, self.cols) / v;
                    let better = match best {
                        None => true,
                        Some((br, _, bvar)) => ratio < br - PIVOT_EPS || (ratio <= br + PIVOT_EPS && self.basis[r] < bvar),
                    };
                    if better {
                        best = Some((ratio, r, self.basis[r]));
                    }
                }
            }
            let Some((_, pr, _)) = best else {
                return Err(Error::DegenerateInput("unbounded margin program".into()));
            };
            self.pivot(pr, pc);
        }
        Err(Error::DegenerateInput("simplex iteration limit reached".into()))
    }
}

/// Largest margin `m` of a half-space `{<u, .> <= -m}` holding all normalized generators.
pub fn max_margin(vectors: &[Vec<f64>]) -> Result<f64> {
    let d = vectors.first().map_or(0, Vec::len);
    let n = vectors.len();
    // variables: u+ (d), u- (d), m (1); constraints: n generator rows, 2d box rows, 1 cap row
    let vars = 2 * d + 1;
    let rows = n + 2 * d + 1;
    let cols = vars + rows;
    let w = cols + 1;
    let mut a = alloc::vec![0.0; (rows + 1) * w];
    for (i, v) in vectors.iter().enumerate() {
        if v.len() != d {
            return Err(Error::DegenerateInput("generators of different dimensions".into()));
        }
        let s = norm(v);
        if !(s > 1e-300) || !s.is_finite() {
            return Err(Error::DegenerateInput(alloc::format!("generator {i} is numerically zero")));
        }
        for j in 0..d {
            a[i * w + j] = v[j] / s;
            a[i * w + d + j] = -v[j] / s;
        }
        a[i * w + 2 * d] = 1.0;
    }
    for j in 0..2 * d {
        let r = n + j;
        a[r * w + j] = 1.0;
        a[r * w + cols] = 1.0;
    }
    let r = n + 2 * d;
    a[r * w + 2 * d] = 1.0;
    a[r * w + cols] = 1.0;
    for r in 0..rows {
        a[r * w + vars + r] = 1.0;
    }
    a[rows * w + 2 * d] = -1.0;
    let mut t = Tableau {
        rows,
        cols,
        a,
        basis: (vars..vars + rows).collect(),
    };
    t.solve()
}

/// `true` iff the generators positively span `R^d`.
pub fn cone_is_full_space(vectors: &[Vec<f64>]) -> Result<bool> {
    let Some(first) = vectors.first() else {
        return Err(Error::DegenerateInput("a cone needs at least one generator".into()));
    };
    let d = first.len();
    if d == 0 {
        return Ok(true);
    }
    if vectors.len() <= d {
        for (i, v) in vectors.iter().enumerate() {
            if !(norm(v) > 1e-300) {
                return Err(Error::DegenerateInput(alloc::format!("generator {i} is numerically zero")));
            }
        }
        return Ok(false);
    }
    Ok(max_margin(vectors)? <= MARGIN_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn cross_spans_the_plane() {
        let v = vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]];
        assert!(cone_is_full_space(&v).unwrap());
    }

    #[test]
    fn single_vector_is_proper() {
        assert!(!cone_is_full_space(&[vec![0.3, -2.0]]).unwrap());
        assert!(max_margin(&[vec![0.3, -2.0]]).unwrap() > 0.5);
    }

    #[test]
    fn perturbed_positive_basis() {
        let eps = 1e-3;
        let v = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0 + eps, -1.0]];
        assert!(cone_is_full_space(&v).unwrap());
        let v = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, -1.0], vec![0.5, 0.5]];
        assert!(!cone_is_full_space(&v).unwrap());
    }

    #[test]
    fn half_plane_boundary_is_not_full() {
        // a thin but positive margin
        let v = vec![vec![1.0, 0.0], vec![-1.0, 1e-3], vec![0.0, 1.0]];
        assert!(!cone_is_full_space(&v).unwrap());
    }

    #[test]
    fn zero_generator_is_rejected() {
        assert!(matches!(
            cone_is_full_space(&[vec![0.0, 0.0], vec![1.0, 0.0]]),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn simplex_around_origin_in_three_dimensions() {
        let v = vec![
            vec![1.0, 1.0, 1.0],
            vec![1.0, -1.0, -1.0],
            vec![-1.0, 1.0, -1.0],
            vec![-1.0, -1.0, 1.0],
        ];
        assert!(cone_is_full_space(&v).unwrap());
        let shifted: Vec<Vec<f64>> = v.iter().map(|p| vec![p[0] + 1.5, p[1], p[2]]).collect();
        assert!(!cone_is_full_space(&shifted).unwrap());
    }
}
