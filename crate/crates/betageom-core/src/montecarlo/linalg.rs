//! Dense helpers for the tiny systems of the simulation layer.

use alloc::vec::Vec;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    libm::sqrt(dot(a, a))
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Removes the components of `v` along the orthonormal `basis`, twice for stability.
pub fn reject(v: &mut [f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for q in basis {
            let c = dot(v, q);
            v.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
        }
    }
}

/// Extends `basis` by `v` if it is independent at relative tolerance `tol`.
///
/// Returns `false` when `v` is (numerically) in the span.
pub fn extend_basis(basis: &mut Vec<Vec<f64>>, v: &[f64], tol: f64) -> bool {
    let scale = norm(v);
    let mut w = v.to_vec();
    reject(&mut w, basis);
    let r = norm(&w);
    if scale == 0.0 || r <= tol * scale {
        return false;
    }
    w.iter_mut().for_each(|x| *x /= r);
    basis.push(w);
    true
}

/// Orthonormal basis of the orthogonal complement of span(`basis`) in `R^d`.
pub fn complement(basis: &[Vec<f64>], d: usize) -> Vec<Vec<f64>> {
    let mut all = basis.to_vec();
    let mut out = Vec::new();
    for i in 0..d {
        if all.len() == d {
            break;
        }
        let mut e = alloc::vec![0.0; d];
        e[i] = 1.0;
        // the unit vectors are well separated from a span of dimension < d
        // for at least one index, so a loose threshold picks a stable vector
        if extend_basis(&mut all, &e, 0.3) {
            out.push(all.last().unwrap().clone());
        }
    }
    if all.len() < d {
        for i in 0..d {
            let mut e = alloc::vec![0.0; d];
            e[i] = 1.0;
            if extend_basis(&mut all, &e, 1e-6) {
                out.push(all.last().unwrap().clone());
            }
        }
    }
    out
}

/// Coordinates of `v` in the orthonormal `basis`.
pub fn coordinates(v: &[f64], basis: &[Vec<f64>]) -> Vec<f64> {
    basis.iter().map(|q| dot(v, q)).collect()
}

/// Projection of `v` onto span(`basis`).
pub fn project(v: &[f64], basis: &[Vec<f64>]) -> Vec<f64> {
    let mut out = alloc::vec![0.0; v.len()];
    for q in basis {
        let c = dot(v, q);
        out.iter_mut().zip(q).for_each(|(x, y)| *x += c * y);
    }
    out
}

/// Least squares `min |A s - b|` over the columns `cols`, by modified Gram-Schmidt.
///
/// Returns `None` if the columns are numerically dependent.
pub fn least_squares(cols: &[&[f64]], b: &[f64]) -> Option<Vec<f64>> {
    let k = cols.len();
    let mut q: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut r = alloc::vec![alloc::vec![0.0; k]; k];
    for (j, c) in cols.iter().enumerate() {
        let mut v = c.to_vec();
        let scale = norm(&v);
        for (i, qi) in q.iter().enumerate() {
            let p = dot(&v, qi);
            r[i][j] = p;
            v.iter_mut().zip(qi).for_each(|(x, y)| *x -= p * y);
        }
        let nv = norm(&v);
        if scale == 0.0 || nv <= 1e-12 * scale {
            return None;
        }
        r[j][j] = nv;
        v.iter_mut().for_each(|x| *x /= nv);
        q.push(v);
    }
    let mut s: Vec<f64> = q.iter().map(|qi| dot(b, qi)).collect();
    for i in (0..k).rev() {
        for j in i + 1..k {
            s[i] -= r[i][j] * s[j];
        }
        s[i] /= r[i][i];
    }
    Some(s)
}

/// `sqrt(det G) / k!` for the Gram matrix of `p_i - p_0`, the `k`-volume of a simplex.
pub fn simplex_volume(points: &[&[f64]]) -> f64 {
    let mut basis = Vec::new();
    let mut vol = 1.0;
    for (i, p) in points.iter().enumerate().skip(1) {
        let mut w = sub(p, points[0]);
        reject(&mut w, &basis);
        let h = norm(&w);
        if h == 0.0 {
            return 0.0;
        }
        w.iter_mut().for_each(|x| *x /= h);
        basis.push(w);
        vol *= h / i as f64;
    }
    vol
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complement_is_orthonormal() {
        let mut b = Vec::new();
        assert!(extend_basis(&mut b, &[1.0, 1.0, 0.0], 1e-9));
        assert!(!extend_basis(&mut b, &[2.0, 2.0, 0.0], 1e-9));
        let c = complement(&b, 3);
        assert_eq!(c.len(), 2);
        for x in &c {
            assert!((norm(x) - 1.0).abs() < 1e-14);
            assert!(dot(x, &b[0]).abs() < 1e-14);
        }
        assert!(dot(&c[0], &c[1]).abs() < 1e-14);
    }

    #[test]
    fn least_squares_solves_square_systems() {
        let s = least_squares(&[&[2.0, 0.0], &[1.0, 1.0]], &[3.0, 1.0]).unwrap();
        assert!((s[0] - 1.0).abs() < 1e-14 && (s[1] - 1.0).abs() < 1e-14);
        assert!(least_squares(&[&[1.0, 0.0], &[2.0, 0.0]], &[1.0, 1.0]).is_none());
    }

    #[test]
    fn simplex_volumes() {
        let tri = simplex_volume(&[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]]);
        assert!((tri - 0.5).abs() < 1e-15);
        let seg = simplex_volume(&[&[0.0, 0.0, 0.0], &[1.0, 2.0, 2.0]]);
        assert!((seg - 3.0).abs() < 1e-15);
        let tet = simplex_volume(&[&[0.0, 0.0, 0.0], &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]]);
        assert!((tet - 1.0 / 6.0).abs() < 1e-15);
    }
}
