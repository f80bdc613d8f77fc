//! Chunked estimators.
//!
//! Replications are split into chunks of [`CHUNK`] draws; chunk `i` uses
//! stream `base.stream + i` of the base seed. Chunk tallies are merged in
//! chunk order, so any scheduler that merges in that order reproduces the
//! sequential result bit for bit.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::linalg::{complement, coordinates, dot, extend_basis, project, simplex_volume, sub};
use super::lp::cone_is_full_space;
use super::nnls::{in_cone, nnls};
use super::predicates::{hull_contains, is_face, FaceMode, SPAN_TOL};
use super::sampler::{sample_direction, sample_gaussian, BetaPointSampler, RngSpec};
use crate::cone::{k_subsets, ConeSpec};
use crate::error::{domain, Error, Result};
use crate::polytope::PolySpec;
use crate::special::kappa;

/// Replications per chunk.
pub const CHUNK: u64 = 4096;

/// Largest number of points for exhaustive face enumeration.
pub const MAX_FACE_POINTS: usize = 8;

/// Discordance threshold in standard errors.
pub const SIGMA_LEVEL: f64 = 3.0;

/// Differences at or below this are never discordant.
pub const ABS_FLOOR: f64 = 1e-6;

/// Streaming mean and sum of squared deviations.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Accumulator {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Accumulator {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &Accumulator) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n = self.count + other.count;
        let delta = other.mean - self.mean;
        let (na, nb, nf) = (self.count as f64, other.count as f64, n as f64);
        self.mean += delta * nb / nf;
        self.m2 += other.m2 + delta * delta * na * nb / nf;
        self.count = n;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Standard error of the mean, from the unbiased sample variance.
    pub fn std_error(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        let n = self.count as f64;
        libm::sqrt((self.m2 / (n - 1.0)).max(0.0) / n)
    }
}

/// Monte Carlo estimate of one expectation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: u64,
    /// Base generator; chunk `i` used stream `seed.stream + i`.
    pub seed: RngSpec,
}

impl Estimate {
    /// `|exact - mean| / std_error`, infinite for a mismatch with zero spread.
    pub fn z_score(&self, exact: f64) -> f64 {
        let diff = (exact - self.mean).abs();
        if diff == 0.0 {
            0.0
        } else {
            diff / self.std_error
        }
    }

    pub fn is_discordant(&self, exact: f64) -> bool {
        let diff = (exact - self.mean).abs();
        diff > SIGMA_LEVEL * self.std_error && diff > ABS_FLOOR
    }
}

/// Named accumulators with a fixed key order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Tally {
    keys: Vec<String>,
    accs: Vec<Accumulator>,
}

impl Tally {
    fn with_keys(keys: Vec<String>) -> Self {
        let accs = alloc::vec![Accumulator::default(); keys.len()];
        Self { keys, accs }
    }

    pub fn keys(&self) -> &[String] {
        &self.keys
    }

    fn push_row(&mut self, row: &[f64]) {
        self.accs.iter_mut().zip(row).for_each(|(a, x)| a.push(*x));
    }

    /// Merges `other`, which must carry the same keys (or be empty).
    pub fn merge(&mut self, other: &Tally) {
        if self.keys.is_empty() {
            *self = other.clone();
            return;
        }
        debug_assert_eq!(self.keys, other.keys);
        self.accs.iter_mut().zip(&other.accs).for_each(|(a, b)| a.merge(b));
    }

    pub fn estimates(&self, seed: RngSpec) -> BTreeMap<String, Estimate> {
        self.keys
            .iter()
            .zip(&self.accs)
            .map(|(k, a)| {
                (
                    k.clone(),
                    Estimate {
                        mean: a.mean(),
                        std_error: a.std_error(),
                        samples: a.count(),
                        seed,
                    },
                )
            })
            .collect()
    }
}

/// `(stream, replications)` for each chunk of a run.
pub fn chunks(base: RngSpec, samples: u64) -> impl Iterator<Item = (RngSpec, u64)> {
    let full = samples / CHUNK;
    let tail = samples % CHUNK;
    let count = full + u64::from(tail > 0);
    (0..count).map(move |i| {
        let size = if i < full { CHUNK } else { tail };
        (RngSpec::new(base.seed, base.stream.wrapping_add(i)), size)
    })
}

fn run_chunks<F: Fn(RngSpec, u64) -> Result<Tally>>(base: RngSpec, samples: u64, chunk: F) -> Result<BTreeMap<String, Estimate>> {
    if samples == 0 {
        return Err(domain!("at least one replication is needed"));
    }
    let mut total = Tally::default();
    for (rng, size) in chunks(base, samples) {
        total.merge(&chunk(rng, size)?);
    }
    Ok(total.estimates(base))
}

fn jitter<R: Rng + ?Sized>(points: &[Vec<f64>], rng: &mut R) -> Vec<Vec<f64>> {
    points
        .iter()
        .map(|p| {
            p.iter()
                .map(|x| {
                    let e: f64 = StandardNormal.sample(rng);
                    x + 1e-12 * e
                })
                .collect()
        })
        .collect()
}

/// Runs `f`, and once more on jittered points after a degenerate tie.
fn with_jitter<R: Rng + ?Sized, T>(points: &[Vec<f64>], rng: &mut R, f: impl Fn(&[Vec<f64>]) -> Result<T>) -> Result<T> {
    match f(points) {
        Err(Error::DegenerateInput(_)) => f(&jitter(points, rng)),
        other => other,
    }
}

/// Orthonormal basis of the linear hull of `vectors`.
fn span_basis(vectors: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut basis = Vec::new();
    for v in vectors {
        extend_basis(&mut basis, v, SPAN_TOL);
    }
    basis
}

/// `true` iff the projection of `g` onto lin(`vectors`) lies in pos(`vectors`).
fn direction_in_cone(vectors: &[Vec<f64>], g: &[f64]) -> Result<bool> {
    let h = project(g, &span_basis(vectors));
    in_cone(vectors, &h)
}

/// Solid angle of `pos(vectors)` inside its linear hull.
pub fn estimate_solid_angle(vectors: &[Vec<f64>], rng: RngSpec, samples: u64) -> Result<Estimate> {
    let d = vectors.first().map_or(0, Vec::len);
    if d == 0 || samples == 0 {
        return Err(Error::DegenerateInput("need nonempty generators and samples".into()));
    }
    let basis = span_basis(vectors);
    let mut gen = rng.rng();
    let mut acc = Accumulator::default();
    for _ in 0..samples {
        let g = sample_gaussian(d, &mut gen);
        let h = project(&g, &basis);
        acc.push(if in_cone(vectors, &h)? { 1.0 } else { 0.0 });
    }
    Ok(Estimate {
        mean: acc.mean(),
        std_error: acc.std_error(),
        samples,
        seed: rng,
    })
}

/// Which cone statistics to record.
#[derive(Debug, Clone, PartialEq)]
pub struct ConePlan {
    /// `f_k` counts and `face_first_k` indicators (`n <= 8`).
    pub faces: bool,
    /// `upsilon_k` by metric projection of a Gaussian vector.
    pub upsilon: bool,
    /// `solid_angle`, `solid_angle_on_proper` and `face_angle_first_k`.
    pub angles: bool,
}

impl Default for ConePlan {
    fn default() -> Self {
        Self {
            faces: true,
            upsilon: true,
            angles: true,
        }
    }
}

impl ConePlan {
    pub fn keys(&self, spec: &ConeSpec) -> Vec<String> {
        let (n, d) = (spec.n(), spec.d());
        let m = n.min(d);
        let mut keys = alloc::vec!["prob_full_space".to_string(), "prob_proper".to_string()];
        if self.faces && n <= MAX_FACE_POINTS {
            keys.extend((0..d).map(|k| alloc::format!("f_{k}")));
            keys.extend((0..m).map(|k| alloc::format!("face_first_{k}")));
        }
        if self.upsilon {
            keys.extend((0..=m).map(|k| alloc::format!("upsilon_{k}")));
        }
        if self.angles {
            keys.push("solid_angle".into());
            keys.push("solid_angle_on_proper".into());
            keys.extend((1..=m).map(|k| alloc::format!("face_angle_first_{k}")));
        }
        keys
    }
}

fn cone_row(spec: &ConeSpec, plan: &ConePlan, v: &[Vec<f64>], g: &[f64]) -> Result<Vec<f64>> {
    let (n, d) = (spec.n(), spec.d());
    let m = n.min(d);
    let ind = |b: bool| if b { 1.0 } else { 0.0 };
    let full = cone_is_full_space(v)?;
    let mut row = alloc::vec![ind(full), ind(!full)];
    if plan.faces && n <= MAX_FACE_POINTS {
        for k in 0..d {
            let mut count = 0.0;
            if k <= n {
                for face in k_subsets(n, k) {
                    if is_face(v, &face, FaceMode::Cone)? {
                        count += 1.0;
                    }
                }
            }
            row.push(count);
        }
        for k in 0..m {
            let face: Vec<usize> = (0..k).collect();
            row.push(ind(is_face(v, &face, FaceMode::Cone)?));
        }
    }
    if plan.upsilon {
        let k = nnls(v, g)?.support();
        row.extend((0..=m).map(|j| ind(j == k)));
    }
    if plan.angles {
        let inside = direction_in_cone(v, g)?;
        row.push(ind(inside));
        row.push(ind(inside && !full));
        for k in 1..=m {
            row.push(ind(direction_in_cone(&v[..k], g)?));
        }
    }
    Ok(row)
}

/// One chunk of cone replications.
pub fn cone_chunk(spec: &ConeSpec, plan: &ConePlan, rng: RngSpec, samples: u64) -> Result<Tally> {
    let d = spec.d();
    let apex = BetaPointSampler::new(d, spec.apex_beta())?;
    let points: Vec<BetaPointSampler> = spec
        .point_betas()
        .iter()
        .map(|b| BetaPointSampler::new(d, *b))
        .collect::<Result<_>>()?;
    let mut tally = Tally::with_keys(plan.keys(spec));
    let mut gen = rng.rng();
    for _ in 0..samples {
        let z = apex.sample(&mut gen);
        let v: Vec<Vec<f64>> = points.iter().map(|s| sub(&s.sample(&mut gen), &z)).collect();
        let g = sample_gaussian(d, &mut gen);
        let row = with_jitter(&v, &mut gen, |v| cone_row(spec, plan, v, &g))?;
        tally.push_row(&row);
    }
    Ok(tally)
}

/// Estimates for a beta cone, keyed by statistic name.
pub fn estimate_cone_statistics(
    spec: &ConeSpec,
    plan: &ConePlan,
    rng: RngSpec,
    samples: u64,
) -> Result<BTreeMap<String, Estimate>> {
    run_chunks(rng, samples, |r, s| cone_chunk(spec, plan, r, s))
}

/// Which polytope statistics to record.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyPlan {
    /// `f_l` counts and `skeleton_l` volume sums (`n <= 8`).
    pub faces: bool,
    /// Largest face dimension enumerated for `faces` and `conic_sums`.
    pub max_face_dim: usize,
    /// `conic_sum_k_l`: sums of tangent-cone intrinsic volumes over `k`-faces (`n <= 8`).
    pub conic_sums: bool,
    /// `content_<beta>` hit indicators for each listed beta.
    pub content_betas: Vec<f64>,
    /// `volume`, the ball-scaled uniform hit indicator.
    pub volume: bool,
    /// `sylvester`, when `n = d + 2`.
    pub sylvester: bool,
    /// `intrinsic_volume_1` from the width in a random direction.
    pub mean_width: bool,
}

impl Default for PolyPlan {
    fn default() -> Self {
        Self {
            faces: true,
            max_face_dim: usize::MAX,
            conic_sums: true,
            content_betas: alloc::vec![1.0],
            volume: true,
            sylvester: true,
            mean_width: true,
        }
    }
}

fn full_dim(spec: &PolySpec) -> bool {
    spec.d() >= 2 && spec.n() > spec.d()
}

impl PolyPlan {
    fn enumerates(&self, spec: &PolySpec) -> bool {
        spec.n() <= MAX_FACE_POINTS
    }

    /// Number of face dimensions enumerated.
    fn face_dims(&self, spec: &PolySpec) -> usize {
        spec.d().min(spec.n() - 1).min(self.max_face_dim.saturating_add(1))
    }

    pub fn keys(&self, spec: &PolySpec) -> Vec<String> {
        let (n, d) = (spec.n(), spec.d());
        let m = d.min(n - 1);
        let dims = self.face_dims(spec);
        let mut keys = Vec::new();
        if self.faces && self.enumerates(spec) {
            keys.extend((0..dims).map(|l| alloc::format!("f_{l}")));
            keys.extend((1..dims).map(|l| alloc::format!("skeleton_{l}")));
        }
        if self.conic_sums && self.enumerates(spec) {
            for k in 0..dims {
                keys.extend((k..=m).map(|l| alloc::format!("conic_sum_{k}_{l}")));
            }
        }
        if full_dim(spec) {
            keys.extend(self.content_betas.iter().map(|b| alloc::format!("content_{b}")));
            if self.volume {
                keys.push("volume".into());
            }
        }
        if self.sylvester && d >= 2 && n == d + 2 {
            keys.push("sylvester".into());
        }
        if self.mean_width {
            keys.push("intrinsic_volume_1".into());
        }
        keys
    }
}

struct PolyDraws {
    content: Vec<Vec<f64>>,
    uniform: Vec<f64>,
    gaussian: Vec<f64>,
    direction: Vec<f64>,
}

fn poly_row(spec: &PolySpec, plan: &PolyPlan, x: &[Vec<f64>], draws: &PolyDraws) -> Result<Vec<f64>> {
    let (n, d) = (spec.n(), spec.d());
    let m = d.min(n - 1);
    let ind = |b: bool| if b { 1.0 } else { 0.0 };
    let mut row = Vec::new();
    let mut vertices = None;
    if (plan.faces || plan.conic_sums) && plan.enumerates(spec) {
        let dims = plan.face_dims(spec);
        let mut counts = alloc::vec![0.0; dims];
        let mut skeleton = alloc::vec![0.0; dims];
        let mut conic = alloc::vec![alloc::vec![0.0; m + 1]; dims];
        for l in 0..dims {
            for face in k_subsets(n, l + 1) {
                if !is_face(x, &face, FaceMode::Polytope)? {
                    continue;
                }
                counts[l] += 1.0;
                if plan.faces && l >= 1 {
                    let pts: Vec<&[f64]> = face.iter().map(|i| x[*i].as_slice()).collect();
                    skeleton[l] += simplex_volume(&pts);
                }
                if plan.conic_sums {
                    conic[l][l + tangent_support(x, &face, &draws.gaussian)?] += 1.0;
                }
            }
        }
        vertices = counts.first().copied();
        if plan.faces {
            row.extend(&counts);
            row.extend(&skeleton[1..]);
        }
        if plan.conic_sums {
            for (k, c) in conic.iter().enumerate() {
                row.extend(&c[k..]);
            }
        }
    }
    if full_dim(spec) {
        for y in &draws.content {
            row.push(ind(hull_contains(x, y)?));
        }
        if plan.volume {
            row.push(kappa(d) * ind(hull_contains(x, &draws.uniform)?));
        }
    }
    if plan.sylvester && d >= 2 && n == d + 2 {
        let f0 = match vertices {
            Some(v) => v,
            None => {
                let mut c = 0.0;
                for j in 0..n {
                    c += ind(is_face(x, &[j], FaceMode::Polytope)?);
                }
                c
            }
        };
        row.push(ind(f0 < n as f64));
    }
    if plan.mean_width {
        let (lo, hi) = x
            .iter()
            .map(|p| dot(p, &draws.direction))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), t| (lo.min(t), hi.max(t)));
        let scale = d as f64 * kappa(d) / (2.0 * kappa(d - 1));
        row.push(scale * (hi - lo));
    }
    Ok(row)
}

/// Number of generators in the support of the metric projection of `g`
/// onto the tangent cone at a face, modulo the face's own directions.
fn tangent_support(x: &[Vec<f64>], face: &[usize], g: &[f64]) -> Result<usize> {
    let d = g.len();
    let o = &x[face[0]];
    let mut basis = Vec::new();
    for i in &face[1..] {
        if !extend_basis(&mut basis, &sub(&x[*i], o), SPAN_TOL) {
            return Err(Error::DegenerateInput("rank-deficient face".into()));
        }
    }
    let perp = complement(&basis, d);
    let rest: Vec<Vec<f64>> = (0..x.len())
        .filter(|i| !face.contains(i))
        .map(|i| coordinates(&sub(&x[i], o), &perp))
        .collect();
    Ok(nnls(&rest, &coordinates(g, &perp))?.support())
}

/// One chunk of polytope replications.
pub fn polytope_chunk(spec: &PolySpec, plan: &PolyPlan, rng: RngSpec, samples: u64) -> Result<Tally> {
    let d = spec.d();
    let points: Vec<BetaPointSampler> = spec
        .point_betas()
        .iter()
        .map(|b| BetaPointSampler::new(d, *b))
        .collect::<Result<_>>()?;
    let content: Vec<BetaPointSampler> = plan
        .content_betas
        .iter()
        .map(|b| BetaPointSampler::new(d, *b))
        .collect::<Result<_>>()?;
    for b in &plan.content_betas {
        crate::cone::check_beta(*b, d)?;
    }
    let uniform = BetaPointSampler::new(d, 0.0)?;
    let mut tally = Tally::with_keys(plan.keys(spec));
    let mut gen = rng.rng();
    for _ in 0..samples {
        let x: Vec<Vec<f64>> = points.iter().map(|s| s.sample(&mut gen)).collect();
        let draws = PolyDraws {
            content: content.iter().map(|s| s.sample(&mut gen)).collect(),
            uniform: uniform.sample(&mut gen),
            gaussian: sample_gaussian(d, &mut gen),
            direction: sample_direction(d, &mut gen),
        };
        let row = with_jitter(&x, &mut gen, |x| poly_row(spec, plan, x, &draws))?;
        tally.push_row(&row);
    }
    Ok(tally)
}

/// Estimates for a beta polytope, keyed by statistic name.
pub fn estimate_polytope_statistics(
    spec: &PolySpec,
    plan: &PolyPlan,
    rng: RngSpec,
    samples: u64,
) -> Result<BTreeMap<String, Estimate>> {
    run_chunks(rng, samples, |r, s| polytope_chunk(spec, plan, r, s))
}
