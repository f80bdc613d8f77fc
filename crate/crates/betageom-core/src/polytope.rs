//! Expectations for beta polytopes `[X_1, .., X_n]` in `R^d`.
//!
//! With `gamma_i = beta_i + d/2`, the tangent cone at a face `F_K` is a
//! beta cone of lower dimension, so most quantities reduce to the same
//! theta split sums as in [`crate::cone`].

use alloc::vec::Vec;

use crate::cone::{check_beta, k_subsets, prob_full_space, ConeSpec};
use crate::error::{domain, Error, Result};
use crate::multiset::GammaMultiset;
use crate::quadrature::QuadConfig;
use crate::quantities::{theta, ThetaArgs};
use crate::special::kappa;
use crate::subsets::{binomial, check_size, CompensatedSum};
use crate::terms::{alternating_up_to, exactly, parity_down_from, parity_from, split_sum, ThetaSum};

/// Parameters of a beta polytope.
#[derive(Debug, Clone, PartialEq)]
pub struct PolySpec {
    d: usize,
    point_betas: Vec<f64>,
}

impl PolySpec {
    pub fn new(d: usize, point_betas: Vec<f64>) -> Result<Self> {
        if d == 0 {
            return Err(domain!("dimension must be at least 1"));
        }
        if point_betas.len() < 2 {
            return Err(domain!("a beta polytope needs at least two points"));
        }
        for b in &point_betas {
            check_beta(*b, d)?;
        }
        Ok(Self { d, point_betas })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.point_betas.len()
    }

    pub fn point_betas(&self) -> &[f64] {
        &self.point_betas
    }

    pub fn gammas(&self) -> Vec<f64> {
        let h = self.d as f64 / 2.0;
        self.point_betas.iter().map(|b| b + h).collect()
    }

    fn m(&self) -> usize {
        self.d.min(self.n() - 1)
    }

    fn is_equal_beta(&self) -> bool {
        GammaMultiset::new(self.gammas()).map(|g| g.is_constant()).unwrap_or(false)
    }

    /// Checks `K` and returns `(sum_K gamma_i, gammas off K)`.
    fn split_face(&self, face: &[usize]) -> Result<(f64, Vec<f64>)> {
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
        face.iter().for_each(|i| acc.add(g[*i]));
        let rest = (0..n).filter(|i| !seen[*i]).map(|i| g[i]).collect();
        Ok((acc.value(), rest))
    }

    fn check_face(&self, face: &[usize]) -> Result<()> {
        let m = self.m();
        if face.is_empty() || face.len() > m {
            return Err(Error::Index(alloc::format!("#K = {} outside 1..={m}", face.len())));
        }
        Ok(())
    }
}

fn require_full_dim(spec: &PolySpec) -> Result<()> {
    if spec.d < 2 || spec.n() < spec.d + 1 {
        return Err(domain!("needs d >= 2 and n >= d + 1, got d = {}, n = {}", spec.d, spec.n()));
    }
    Ok(())
}

/// The beta cone isometric to the tangent cone at `F_K`, modulo its lineality space `R^{k-1}`.
pub fn tangent_cone_dictionary(spec: &PolySpec, face: &[usize]) -> Result<ConeSpec> {
    spec.check_face(face)?;
    let (s, rest) = spec.split_face(face)?;
    let dim = spec.d - face.len() + 1;
    let h = dim as f64 / 2.0;
    ConeSpec::new(dim, s - h, rest.iter().map(|g| g - h).collect())
}

fn subset_count<W: Fn(usize) -> f64>(pool: &[f64], weight: &W) -> f64 {
    (0..=pool.len())
        .filter(|s| weight(*s) != 0.0)
        .map(|s| binomial(pool.len(), s))
        .sum()
}

/// `P[F_K is a face of P]`, `1 <= #K <= min(d, n - 1)`.
///
/// Evaluates whichever of the face and non-face sums has fewer terms.
pub fn face_probability_poly(spec: &PolySpec, face: &[usize], cfg: &QuadConfig) -> Result<f64> {
    spec.check_face(face)?;
    let (s, rest) = spec.split_face(face)?;
    let gap = spec.d as i64 - face.len() as i64;
    let yes = parity_down_from(gap);
    let no = parity_from(gap + 2);
    if subset_count(&rest, &no) < subset_count(&rest, &yes) {
        Ok(1.0 - 2.0 * split_sum(s, &rest, no, cfg)?)
    } else {
        Ok(2.0 * split_sum(s, &rest, yes, cfg)?)
    }
}

/// `(P[F_K face], P[F_K not a face])`, each from its own sum.
pub fn face_probability_poly_both(spec: &PolySpec, face: &[usize], cfg: &QuadConfig) -> Result<(f64, f64)> {
    spec.check_face(face)?;
    let (s, rest) = spec.split_face(face)?;
    let gap = spec.d as i64 - face.len() as i64;
    Ok((
        2.0 * split_sum(s, &rest, parity_down_from(gap), cfg)?,
        2.0 * split_sum(s, &rest, parity_from(gap + 2), cfg)?,
    ))
}

fn sum_over_faces<F>(spec: &PolySpec, k: usize, mut add: F) -> Result<ThetaSum>
where
    F: FnMut(&mut ThetaSum, &[usize], f64, &[f64]) -> Result<()>,
{
    let mut sum = ThetaSum::new();
    if spec.is_equal_beta() {
        // every k-subset contributes the same terms
        let face: Vec<usize> = (0..k).collect();
        let (s, rest) = spec.split_face(&face)?;
        let mut one = ThetaSum::new();
        add(&mut one, &face, s, &rest)?;
        sum.add_all(&one, binomial(spec.n(), k));
        return Ok(sum);
    }
    check_size(spec.n())?;
    for face in k_subsets(spec.n(), k) {
        let (s, rest) = spec.split_face(&face)?;
        add(&mut sum, &face, s, &rest)?;
    }
    Ok(sum)
}

/// Expected number of `l`-dimensional faces, `0 <= l <= min(d, n - 1) - 1`.
pub fn expected_fk_poly(spec: &PolySpec, l: usize, cfg: &QuadConfig) -> Result<f64> {
    let m = spec.m();
    if l + 1 > m {
        return Err(Error::Index(alloc::format!("l = {l} outside 0..={}", m - 1)));
    }
    let k = l + 1;
    let gap = spec.d as i64 - k as i64;
    sum_over_faces(spec, k, |sum, _, s, rest| sum.add_split(2.0, s, rest, parity_down_from(gap)))?.evaluate(cfg)
}

/// `C(n, l + 1)` minus the expected number of `(l+1)`-subsets that are not faces.
pub fn expected_fk_poly_complement(spec: &PolySpec, l: usize, cfg: &QuadConfig) -> Result<f64> {
    let m = spec.m();
    if l + 1 > m {
        return Err(Error::Index(alloc::format!("l = {l} outside 0..={}", m - 1)));
    }
    let k = l + 1;
    let gap = spec.d as i64 - k as i64;
    let missing = sum_over_faces(spec, k, |sum, _, s, rest| sum.add_split(2.0, s, rest, parity_from(gap + 2)))?.evaluate(cfg)?;
    Ok(binomial(spec.n(), k) - missing)
}

/// `E Cont_beta(P) = P[Y in P]` for an independent `Y ~ f_{d, beta}`.
pub fn expected_beta_content(spec: &PolySpec, beta: f64, cfg: &QuadConfig) -> Result<f64> {
    require_full_dim(spec)?;
    check_beta(beta, spec.d)?;
    let x = beta + spec.d as f64 / 2.0;
    Ok(2.0 * split_sum(x, &spec.gammas(), parity_from(spec.d as i64 + 1), cfg)?)
}

/// The same content from the complementary sum.
pub fn expected_beta_content_complement(spec: &PolySpec, beta: f64, cfg: &QuadConfig) -> Result<f64> {
    require_full_dim(spec)?;
    check_beta(beta, spec.d)?;
    let x = beta + spec.d as f64 / 2.0;
    Ok(1.0 - 2.0 * split_sum(x, &spec.gammas(), parity_down_from(spec.d as i64 - 1), cfg)?)
}

/// Expected volume, from the sum over `(d+1)`-subsets.
pub fn expected_volume(spec: &PolySpec, cfg: &QuadConfig) -> Result<f64> {
    require_full_dim(spec)?;
    let kd = kappa(spec.d);
    Ok(2.0 * kd * split_sum(spec.d as f64 / 2.0, &spec.gammas(), exactly(spec.d + 1), cfg)?)
}

/// Expected volume, from the complementary parity sum.
pub fn expected_volume_complement(spec: &PolySpec, cfg: &QuadConfig) -> Result<f64> {
    require_full_dim(spec)?;
    let kd = kappa(spec.d);
    let rest = split_sum(spec.d as f64 / 2.0, &spec.gammas(), parity_down_from(spec.d as i64 - 1), cfg)?;
    Ok(kd - 2.0 * kd * rest)
}

/// `E[Vol_k^p]` of the simplex spanned by points with parameters `gammas` in `R^d`, `k = #gammas - 1`.
pub fn simplex_moment_from_gammas(d: usize, gammas: &[f64], p: f64) -> Result<f64> {
    if gammas.is_empty() || gammas.len() > d + 1 {
        return Err(domain!(
            "a k-simplex in R^{d} needs 1..={} points, got {}",
            d + 1,
            gammas.len()
        ));
    }
    if !(p >= 0.0) || !p.is_finite() {
        return Err(domain!("moment order must be finite and >= 0, got {p}"));
    }
    if p == 0.0 {
        return Ok(1.0);
    }
    let k = gammas.len() - 1;
    let sum: f64 = gammas.iter().sum();
    let kf = k as f64;
    let mut log = -p * libm::lgamma(kf + 1.0);
    log += libm::lgamma((kf + 1.0) * p / 2.0 + 1.0 + sum) - libm::lgamma(kf * p / 2.0 + 1.0 + sum);
    for g in gammas {
        log += libm::lgamma(g + 1.0) - libm::lgamma(g + p / 2.0 + 1.0);
    }
    let df = d as f64;
    for i in 1..=k {
        let i = i as f64;
        log += libm::lgamma((df + 1.0 + p - i) / 2.0) - libm::lgamma((df + 1.0 - i) / 2.0);
    }
    Ok(libm::exp(log))
}

/// `E[Vol_k^p]` of a beta simplex, `k = n - 1 <= d`.
pub fn simplex_volume_moment(spec: &PolySpec, p: f64) -> Result<f64> {
    if spec.n() > spec.d + 1 {
        return Err(domain!("simplex moments need n <= d + 1, got n = {}", spec.n()));
    }
    simplex_moment_from_gammas(spec.d, &spec.gammas(), p)
}

/// Expected intrinsic volume `V_k`, `0 <= k <= min(d, n - 1) - 1`.
pub fn expected_intrinsic_volume(spec: &PolySpec, k: usize, cfg: &QuadConfig) -> Result<f64> {
    let m = spec.m();
    if k + 1 > m {
        return Err(Error::Index(alloc::format!("k = {k} outside 0..={}", m - 1)));
    }
    let d = spec.d;
    let front = 2.0 * binomial(d, k) * kappa(d) / kappa(d - k);
    Ok(front * split_sum(k as f64 / 2.0, &spec.gammas(), exactly(k + 1), cfg)?)
}

/// `P[the n = d + 2 points are not in convex position]`.
pub fn sylvester_probability(spec: &PolySpec, cfg: &QuadConfig) -> Result<f64> {
    if spec.n() != spec.d + 2 || spec.d < 2 {
        return Err(domain!(
            "Sylvester's problem needs d >= 2 and n = d + 2, got d = {}, n = {}",
            spec.d,
            spec.n()
        ));
    }
    let g = spec.gammas();
    let mut sum = ThetaSum::new();
    for j in 0..g.len() {
        let others = GammaMultiset::new(g.iter().enumerate().filter(|(i, _)| *i != j).map(|(_, v)| *v))?;
        sum.add(2.0, ThetaArgs::new(g[j], others, GammaMultiset::empty()));
    }
    sum.evaluate(cfg)
}

/// The same probability as a sum of absorption probabilities of cones.
pub fn sylvester_via_cones(spec: &PolySpec, cfg: &QuadConfig) -> Result<f64> {
    if spec.n() != spec.d + 2 || spec.d < 2 {
        return Err(domain!(
            "Sylvester's problem needs d >= 2 and n = d + 2, got d = {}, n = {}",
            spec.d,
            spec.n()
        ));
    }
    let b = spec.point_betas();
    let mut acc = CompensatedSum::default();
    for j in 0..b.len() {
        let others = b.iter().enumerate().filter(|(i, _)| *i != j).map(|(_, v)| *v).collect();
        acc.add(prob_full_space(&ConeSpec::new(spec.d, b[j], others)?, cfg)?);
    }
    Ok(acc.value())
}

/// Expected `sum_F Vol_k(F)^p` over the `k`-faces, `0 <= k <= min(d, n - 1) - 1`.
pub fn skeleton_lp_volume(spec: &PolySpec, k: usize, p: f64, cfg: &QuadConfig) -> Result<f64> {
    let m = spec.m();
    if k + 1 > m {
        return Err(Error::Index(alloc::format!("k = {k} outside 0..={}", m - 1)));
    }
    let g = spec.gammas();
    let top = spec.d as i64 - k as i64 - 1;
    let shift = k as f64 * p / 2.0;
    sum_over_faces(spec, k + 1, |sum, face, s, rest| {
        let own: Vec<f64> = face.iter().map(|i| g[*i]).collect();
        let moment = simplex_moment_from_gammas(spec.d, &own, p)?;
        sum.add_split(2.0 * moment, shift + s, rest, parity_down_from(top))
    })?
    .evaluate(cfg)
}

/// `sum_{F k-face} E upsilon_l(T(F, P))`, `0 <= k <= min(d, n-1) - 1`, `k <= l <= min(d, n-1)`.
pub fn conic_volume_sums(spec: &PolySpec, k: usize, l: usize, cfg: &QuadConfig) -> Result<f64> {
    let m = spec.m();
    if k + 1 > m || l < k || l > m {
        return Err(Error::Index(alloc::format!(
            "need 0 <= k < {m} and k <= l <= {m}, got k = {k}, l = {l}"
        )));
    }
    let top = l as i64 - k as i64 - 1;
    sum_over_faces(spec, k + 1, |sum, _, s, rest| {
        if l == m {
            sum.add_split(1.0, s, rest, alternating_up_to(top))
        } else {
            sum.add_split(1.0, s, rest, exactly(l - k))
        }
    })?
    .evaluate(cfg)
}

/// Which equal-parameter simplex angle to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimplexAngle {
    /// `J_{n,k}(x)`: internal angle at a `(k-1)`-face.
    Internal,
    /// `I_{n,k}(2x + n - 1)`: external angle at a `(k-1)`-face.
    External,
}

/// Expected angles of a simplex spanned by `n` points `f_{n-1, x}` in `R^{n-1}`.
pub fn equal_beta_angles(n: usize, k: usize, x: f64, which: SimplexAngle, cfg: &QuadConfig) -> Result<f64> {
    if k == 0 || k > n {
        return Err(Error::Index(alloc::format!("k = {k} outside 1..={n}")));
    }
    if !(x >= -1.0) || !x.is_finite() {
        return Err(domain!("x must be finite and >= -1, got {x}"));
    }
    let g = x + (n as f64 - 1.0) / 2.0;
    let rest = GammaMultiset::new(core::iter::repeat_n(g, n - k))?;
    let args = match which {
        SimplexAngle::Internal => ThetaArgs::new(k as f64 * g, rest, GammaMultiset::empty()),
        SimplexAngle::External => ThetaArgs::new(k as f64 * g, GammaMultiset::empty(), rest),
    };
    Ok(theta(&args, cfg)?.value)
}
