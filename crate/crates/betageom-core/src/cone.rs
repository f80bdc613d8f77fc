//! Expectations for beta cones `pos(Z_1 - Z, .., Z_n - Z)` in `R^d`.
//!
//! With `gamma = beta + d/2` and `gamma_i = beta_i + d/2`, every quantity
//! is a signed sum of theta values over subsets of the point parameters.

use alloc::vec::Vec;

use num_rational::Ratio;

use crate::error::{domain, Error, Result};
use crate::multiset::GammaMultiset;
use crate::quadrature::QuadConfig;
use crate::quantities::{ext_quantity, theta, ThetaArgs};
use crate::subsets::{binomial, check_size, CompensatedSum};
use crate::terms::{alternating_up_to, at_least, exactly, parity_down_from, parity_from, split_sum, ThetaSum};

/// Parameters of a beta cone.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeSpec {
    d: usize,
    apex_beta: f64,
    point_betas: Vec<f64>,
}

pub(crate) fn check_beta(beta: f64, d: usize) -> Result<()> {
    if !beta.is_finite() || beta < -1.0 {
        return Err(domain!("beta parameters must be finite and >= -1, got {beta}"));
    }
    if d == 1 && beta == -1.0 {
        return Err(domain!(
            "beta = -1 is not allowed in dimension 1: points at +-1 coincide with positive probability"
        ));
    }
    Ok(())
}

impl ConeSpec {
    pub fn new(d: usize, apex_beta: f64, point_betas: Vec<f64>) -> Result<Self> {
        if d == 0 {
            return Err(domain!("dimension must be at least 1"));
        }
        if point_betas.is_empty() {
            return Err(domain!("a beta cone needs at least one point"));
        }
        check_beta(apex_beta, d)?;
        for b in &point_betas {
            check_beta(*b, d)?;
        }
        Ok(Self {
            d,
            apex_beta,
            point_betas,
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.point_betas.len()
    }

    pub fn apex_beta(&self) -> f64 {
        self.apex_beta
    }

    pub fn point_betas(&self) -> &[f64] {
        &self.point_betas
    }

    pub fn gamma(&self) -> f64 {
        self.apex_beta + self.d as f64 / 2.0
    }

    pub fn gammas(&self) -> Vec<f64> {
        let h = self.d as f64 / 2.0;
        self.point_betas.iter().map(|b| b + h).collect()
    }

    fn m(&self) -> usize {
        self.n().min(self.d)
    }

    /// Checks `K` and returns `(gamma + sum_K gamma_i, gammas off K)`.
    fn shifted(&self, face: &[usize]) -> Result<(f64, Vec<f64>)> {
        let n = self.n();
        let mut seen = alloc::vec![false; n];
        for &i in face {
            if i >= n || seen[i] {
                return Err(Error::Index(alloc::format!(
                    "face index set {face:?} is not a set of distinct indices below {n}"
                )));
            }
            seen[i] = true;
        }
        let g = self.gammas();
        let mut acc = CompensatedSum::default();
        acc.add(self.gamma());
        face.iter().for_each(|i| acc.add(g[*i]));
        let rest = (0..n).filter(|i| !seen[*i]).map(|i| g[i]).collect();
        Ok((acc.value(), rest))
    }
}

fn index_error(what: &str, k: usize, max: usize) -> Error {
    Error::Index(alloc::format!("{what} = {k} outside 0..={max}"))
}

/// `P[C = R^d]`.
pub fn prob_full_space(spec: &ConeSpec, cfg: &QuadConfig) -> Result<f64> {
    if spec.n() <= spec.d {
        return Ok(0.0);
    }
    Ok(2.0 * split_sum(spec.gamma(), &spec.gammas(), parity_from(spec.d as i64 + 1), cfg)?)
}

/// `P[C != R^d]`.
pub fn prob_proper(spec: &ConeSpec, cfg: &QuadConfig) -> Result<f64> {
    if spec.n() <= spec.d {
        return Ok(1.0);
    }
    Ok(2.0 * split_sum(spec.gamma(), &spec.gammas(), parity_down_from(spec.d as i64 - 1), cfg)?)
}

/// Expected `k`-th conic intrinsic volume, `0 <= k <= min(n, d)`.
pub fn expected_upsilon(spec: &ConeSpec, k: usize, cfg: &QuadConfig) -> Result<f64> {
    let m = spec.m();
    if k > m {
        return Err(index_error("k", k, m));
    }
    if k == spec.d {
        return split_sum(spec.gamma(), &spec.gammas(), at_least(spec.d), cfg);
    }
    split_sum(spec.gamma(), &spec.gammas(), exactly(k), cfg)
}

/// Expected solid angle of the cone inside its linear hull.
pub fn expected_solid_angle(spec: &ConeSpec, cfg: &QuadConfig) -> Result<f64> {
    expected_upsilon(spec, spec.m(), cfg)
}

/// `E[alpha(C) 1{C != R^d}]`.
pub fn expected_solid_angle_on_proper(spec: &ConeSpec, cfg: &QuadConfig) -> Result<f64> {
    if spec.n() < spec.d {
        return expected_solid_angle(spec, cfg);
    }
    split_sum(spec.gamma(), &spec.gammas(), alternating_up_to(spec.d as i64 - 1), cfg)
}

fn check_face_size(spec: &ConeSpec, face: &[usize]) -> Result<()> {
    let m = spec.m();
    if face.len() + 1 > m {
        return Err(index_error("#K", face.len(), m - 1));
    }
    Ok(())
}

/// `P[pos(Z_i - Z : i in K) is a face of C]`.
pub fn face_probability_cone(spec: &ConeSpec, face: &[usize], cfg: &QuadConfig) -> Result<f64> {
    check_face_size(spec, face)?;
    let (x, rest) = spec.shifted(face)?;
    if spec.n() <= spec.d {
        return Ok(1.0);
    }
    let top = spec.d as i64 - face.len() as i64 - 1;
    Ok(2.0 * split_sum(x, &rest, parity_down_from(top), cfg)?)
}

/// `P[pos(Z_i - Z : i in K) is not a face of C]`.
pub fn face_probability_cone_complement(spec: &ConeSpec, face: &[usize], cfg: &QuadConfig) -> Result<f64> {
    check_face_size(spec, face)?;
    let (x, rest) = spec.shifted(face)?;
    if spec.n() <= spec.d {
        return Ok(0.0);
    }
    let first = spec.d as i64 - face.len() as i64 + 1;
    Ok(2.0 * split_sum(x, &rest, parity_from(first), cfg)?)
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub(crate) fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < n - k + i {
                break;
            }
        }
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// Expected number of `k`-dimensional faces, `0 <= k <= d - 1`.
pub fn expected_fk_cone(spec: &ConeSpec, k: usize, cfg: &QuadConfig) -> Result<f64> {
    let (n, d) = (spec.n(), spec.d);
    if k >= d {
        return Err(index_error("k", k, d - 1));
    }
    if n <= d {
        return Ok(binomial(n, k));
    }
    let g = spec.gammas();
    let top = d as i64 - k as i64 - 1;
    if GammaMultiset::new(g.iter().copied())?.is_constant() {
        let face: Vec<usize> = (0..k).collect();
        return Ok(binomial(n, k) * face_probability_cone(spec, &face, cfg)?);
    }
    check_size(n)?;
    let mut sum = ThetaSum::new();
    for face in k_subsets(n, k) {
        let (x, rest) = spec.shifted(&face)?;
        sum.add_split(2.0, x, &rest, parity_down_from(top))?;
    }
    sum.evaluate(cfg)
}

/// Which angle-type expectation of a possible face `G_K` to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaceAngle {
    /// `E alpha(G_K)`.
    FaceAngle,
    /// `E[alpha(T(G_K, C)) 1{G_K face}]`.
    InternalOnFaceEvent,
    /// `E[alpha(N(G_K, C)) 1{G_K face}]`.
    ExternalOnFaceEvent,
    /// `E alpha(N(G_K, C))`, with `N = {0}` off the face event.
    NormalAngle,
    /// `E upsilon_l(T(G_K, C))`, with `T = R^d` off the face event.
    UpsilonOfTangent(usize),
}

pub fn expected_face_angles_cone(spec: &ConeSpec, face: &[usize], which: FaceAngle, cfg: &QuadConfig) -> Result<f64> {
    let (n, d, k, m) = (spec.n(), spec.d, face.len(), spec.m());
    if which == FaceAngle::FaceAngle {
        if k > m {
            return Err(index_error("#K", k, m));
        }
        spec.shifted(face)?;
        let g = spec.gammas();
        let y = GammaMultiset::new(face.iter().map(|i| g[*i]))?;
        return Ok(theta(&ThetaArgs::new(spec.gamma(), y, GammaMultiset::empty()), cfg)?.value);
    }
    check_face_size(spec, face)?;
    let (x, rest) = spec.shifted(face)?;
    match which {
        FaceAngle::FaceAngle => unreachable!(),
        FaceAngle::InternalOnFaceEvent => {
            if n <= d {
                let y = GammaMultiset::new(rest)?;
                Ok(theta(&ThetaArgs::new(x, y, GammaMultiset::empty()), cfg)?.value)
            } else {
                split_sum(x, &rest, alternating_up_to(d as i64 - k as i64 - 1), cfg)
            }
        }
        FaceAngle::ExternalOnFaceEvent => {
            let z = GammaMultiset::new(rest)?;
            Ok(theta(&ThetaArgs::new(x, GammaMultiset::empty(), z), cfg)?.value)
        }
        FaceAngle::NormalAngle => {
            let z = GammaMultiset::new(rest)?;
            let on_face = theta(&ThetaArgs::new(x, GammaMultiset::empty(), z), cfg)?.value;
            Ok(on_face + face_probability_cone_complement(spec, face, cfg)?)
        }
        FaceAngle::UpsilonOfTangent(l) => {
            if l < k || l > m {
                return Err(Error::Index(alloc::format!("l = {l} outside {k}..={m}")));
            }
            if l == m {
                split_sum(x, &rest, at_least((n - k).min(d - k)), cfg)
            } else {
                split_sum(x, &rest, exactly(l - k), cfg)
            }
        }
    }
}

/// `E[alpha(N(G_K, C)) 1{G_K face}]` as an external quantity.
pub fn external_on_face_event_via_ext(spec: &ConeSpec, face: &[usize], cfg: &QuadConfig) -> Result<f64> {
    check_face_size(spec, face)?;
    let (x, rest) = spec.shifted(face)?;
    let shift = rest.len() as f64 / 2.0;
    let betas: Vec<f64> = rest.iter().map(|g| g - shift).collect();
    ext_quantity(x - shift, &betas, cfg)
}

/// Quantities with exact values for the limiting cones as all betas grow.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WendelQuantity {
    ProbProper,
    Upsilon(usize),
    Fk(usize),
    UpsilonD,
    UpsilonDOnProper,
}

fn binom(n: usize, k: usize) -> u128 {
    if k > n {
        0
    } else {
        num_integer::binomial(n as u128, k as u128)
    }
}

/// Exact value of a quantity for the limiting cone of `n` points in `R^d`, `n >= d >= 1`.
pub fn wendel_reference(n: usize, d: usize, quantity: WendelQuantity) -> Result<Ratio<u128>> {
    if d == 0 || n < d || n > 120 {
        return Err(Error::Index(alloc::format!(
            "need n >= d >= 1 and n <= 120, got n = {n}, d = {d}"
        )));
    }
    let pow = |e: usize| 1u128 << e;
    let r = match quantity {
        WendelQuantity::ProbProper => Ratio::new((0..d).map(|l| binom(n - 1, l)).sum(), pow(n - 1)),
        WendelQuantity::Upsilon(k) => {
            if k >= d {
                return Err(index_error("k", k, d - 1));
            }
            Ratio::new(binom(n, k), pow(n))
        }
        WendelQuantity::UpsilonD => Ratio::new((d..=n).map(|l| binom(n, l)).sum(), pow(n)),
        WendelQuantity::UpsilonDOnProper => Ratio::new(binom(n - 1, d - 1), pow(n)),
        WendelQuantity::Fk(k) => {
            if k >= d {
                return Err(index_error("k", k, d - 1));
            }
            let s: u128 = (0..d - k).map(|l| binom(n - k - 1, l)).sum();
            Ratio::new(binom(n, k) * s, pow(n - k - 1))
        }
    };
    Ok(r)
}

pub fn ratio_to_f64(r: &Ratio<u128>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> QuadConfig {
        QuadConfig::default()
    }

    #[test]
    fn spec_validation() {
        assert!(ConeSpec::new(1, -1.0, alloc::vec![0.0]).is_err());
        assert!(ConeSpec::new(2, -1.0, alloc::vec![-1.0]).is_ok());
        assert!(ConeSpec::new(2, 0.0, alloc::vec![]).is_err());
        assert!(ConeSpec::new(2, -1.5, alloc::vec![0.0]).is_err());
    }

    #[test]
    fn full_space_examples() {
        let s = ConeSpec::new(2, 0.3, alloc::vec![0.0, 2.0]).unwrap();
        assert_eq!(prob_full_space(&s, &cfg()).unwrap(), 0.0);
        let s = ConeSpec::new(2, -1.0, alloc::vec![0.0, 1.5, 3.0]).unwrap();
        assert!(prob_full_space(&s, &cfg()).unwrap().abs() < 1e-8);
        // Only the apex parameter is sent to infinity in the limiting cone.
        let s = ConeSpec::new(2, 1e6, alloc::vec![0.0, 1.0, -0.5, 3.0]).unwrap();
        assert!((prob_proper(&s, &cfg()).unwrap() - 0.5).abs() < 0.005);
    }

    #[test]
    fn upsilon_examples() {
        let s = ConeSpec::new(3, 0.0, alloc::vec![0.0; 3]).unwrap();
        let total: f64 = (0..=3).map(|k| expected_upsilon(&s, k, &cfg()).unwrap()).sum();
        assert!((total - 1.0).abs() < 1e-8);
        let s = ConeSpec::new(2, 0.7, alloc::vec![0.7, 0.7]).unwrap();
        assert!((expected_upsilon(&s, 2, &cfg()).unwrap() - 1.0 / 6.0).abs() < 1e-9);
        assert!((expected_solid_angle(&s, &cfg()).unwrap() - 1.0 / 6.0).abs() < 1e-9);
        assert!(expected_upsilon(&s, 3, &cfg()).is_err());
    }

    #[test]
    fn solid_angle_split() {
        let s = ConeSpec::new(2, 0.5, alloc::vec![0.0, 1.0, -0.5, 2.0]).unwrap();
        let a = expected_solid_angle(&s, &cfg()).unwrap();
        let b = expected_solid_angle_on_proper(&s, &cfg()).unwrap();
        let p = prob_full_space(&s, &cfg()).unwrap();
        assert!((a - b - p).abs() < 1e-9);
    }

    #[test]
    fn face_examples() {
        let s = ConeSpec::new(3, 0.0, alloc::vec![0.5, 1.0, 2.0]).unwrap();
        assert_eq!(face_probability_cone(&s, &[1], &cfg()).unwrap(), 1.0);
        let s = ConeSpec::new(2, 0.4, alloc::vec![0.0, 1.0, -0.5, 2.0]).unwrap();
        let p0 = face_probability_cone(&s, &[], &cfg()).unwrap();
        assert!((p0 - prob_proper(&s, &cfg()).unwrap()).abs() < 1e-12);
        let p = face_probability_cone(&s, &[2], &cfg()).unwrap();
        let q = face_probability_cone_complement(&s, &[2], &cfg()).unwrap();
        assert!((p + q - 1.0).abs() < 1e-9);
        assert!(face_probability_cone(&s, &[0, 1], &cfg()).is_err());
        assert!(face_probability_cone(&s, &[7], &cfg()).is_err());
    }

    #[test]
    fn fk_examples() {
        let s = ConeSpec::new(3, 0.0, alloc::vec![0.5, 1.0, 2.0]).unwrap();
        assert_eq!(expected_fk_cone(&s, 2, &cfg()).unwrap(), 3.0);
        let s = ConeSpec::new(3, 1e6, alloc::vec![0.0, 1.0, -0.5, 3.0]).unwrap();
        assert!((expected_fk_cone(&s, 1, &cfg()).unwrap() - 3.0).abs() < 0.03);
    }

    #[test]
    fn fk_fast_path_matches_general_sum() {
        let s = ConeSpec::new(2, 0.2, alloc::vec![0.5; 5]).unwrap();
        let fast = expected_fk_cone(&s, 1, &cfg()).unwrap();
        let slow: f64 = (0..5).map(|i| face_probability_cone(&s, &[i], &cfg()).unwrap()).sum();
        assert!((fast - slow).abs() < 1e-12);
    }

    #[test]
    fn face_angle_examples() {
        let s = ConeSpec::new(3, 0.0, alloc::vec![0.5, 1.0, 2.0, 0.0]).unwrap();
        assert_eq!(
            expected_face_angles_cone(&s, &[2], FaceAngle::FaceAngle, &cfg()).unwrap(),
            0.5
        );
        let s = ConeSpec::new(3, 0.0, alloc::vec![0.5, 1.0, 2.0]).unwrap();
        let v = expected_face_angles_cone(&s, &[], FaceAngle::NormalAngle, &cfg()).unwrap();
        let w = expected_upsilon(&s, 0, &cfg()).unwrap();
        assert!((v - w).abs() < 1e-12);
    }

    #[test]
    fn external_angle_matches_ext_form() {
        let s = ConeSpec::new(3, 0.2, alloc::vec![0.5, 1.0, 2.0, 0.0, -0.3]).unwrap();
        for face in [&[][..], &[1], &[0, 3]] {
            let a = expected_face_angles_cone(&s, face, FaceAngle::ExternalOnFaceEvent, &cfg()).unwrap();
            let b = external_on_face_event_via_ext(&s, face, &cfg()).unwrap();
            assert!((a - b).abs() < 1e-9, "{face:?}: {a} vs {b}");
        }
    }

    #[test]
    fn wendel_examples() {
        assert_eq!(wendel_reference(4, 2, WendelQuantity::ProbProper).unwrap(), Ratio::new(1, 2));
        assert_eq!(wendel_reference(5, 3, WendelQuantity::Upsilon(1)).unwrap(), Ratio::new(5, 32));
        assert_eq!(
            wendel_reference(4, 3, WendelQuantity::UpsilonDOnProper).unwrap(),
            Ratio::new(3, 16)
        );
        assert_eq!(wendel_reference(4, 3, WendelQuantity::Fk(1)).unwrap(), Ratio::new(3, 1));
        assert!(wendel_reference(2, 3, WendelQuantity::ProbProper).is_err());
    }

    #[test]
    fn wendel_upsilons_sum_to_one() {
        for (n, d) in [(4, 2), (5, 3), (9, 4)] {
            let mut s = wendel_reference(n, d, WendelQuantity::UpsilonD).unwrap();
            for k in 0..d {
                s += wendel_reference(n, d, WendelQuantity::Upsilon(k)).unwrap();
            }
            assert_eq!(s, Ratio::from_integer(1));
        }
    }

    #[test]
    fn subsets_in_order() {
        assert_eq!(k_subsets(4, 2).len(), 6);
        assert_eq!(k_subsets(3, 0), alloc::vec![Vec::<usize>::new()]);
        assert_eq!(k_subsets(3, 3), alloc::vec![alloc::vec![0, 1, 2]]);
        assert!(k_subsets(2, 3).is_empty());
    }
}
