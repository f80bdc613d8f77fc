//! Dispatch from quantity names to the exact formulas, with diagnostics.

use betageom_core::cone::{
    self, expected_face_angles_cone, expected_fk_cone, expected_solid_angle, expected_solid_angle_on_proper, expected_upsilon,
    external_on_face_event_via_ext, face_probability_cone, face_probability_cone_complement, ConeSpec, FaceAngle,
};
use betageom_core::polytope::{
    self, conic_volume_sums, expected_beta_content, expected_beta_content_complement, expected_fk_poly,
    expected_fk_poly_complement, expected_intrinsic_volume, expected_volume, expected_volume_complement, face_probability_poly,
    face_probability_poly_both, simplex_volume_moment, skeleton_lp_volume, sylvester_probability, sylvester_via_cones, PolySpec,
};
use betageom_core::special::kappa;
use betageom_core::subsets::{binomial, masks_of_size, members};
use betageom_core::QuadConfig;

use crate::error::{usage, CliResult};
use crate::request::Request;

pub const CONE_QUANTITIES: &[&str] = &[
    "prob-full-space",
    "prob-proper",
    "upsilon",
    "solid-angle",
    "solid-angle-on-proper",
    "fk",
    "face-probability",
    "face-angle",
    "internal-angle",
    "external-angle",
    "normal-angle",
    "tangent-upsilon",
];

pub const POLYTOPE_QUANTITIES: &[&str] = &[
    "fk",
    "face-probability",
    "volume",
    "beta-content",
    "intrinsic-volume",
    "sylvester",
    "skeleton",
    "conic-sum",
    "simplex-moment",
];

/// Largest point count for diagnostics that enumerate subsets one by one.
const DIAGNOSTIC_POINTS: usize = 12;

/// An exact value, the branch that produced it, and residuals of identities it satisfies.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub value: f64,
    pub method: &'static str,
    pub diagnostics: Vec<(&'static str, f64)>,
}

impl Evaluation {
    fn new(value: f64, method: &'static str) -> Self {
        Self {
            value,
            method,
            diagnostics: Vec::new(),
        }
    }

    fn with(mut self, name: &'static str, residual: f64) -> Self {
        self.diagnostics.push((name, residual));
        self
    }
}

fn need<T: Copy>(v: Option<T>, flag: &str, quantity: &str) -> CliResult<T> {
    v.ok_or_else(|| usage(format!("quantity {quantity} needs --{flag}")))
}

fn quantity(req: &Request) -> CliResult<&str> {
    req.quantity
        .as_deref()
        .ok_or_else(|| usage(format!("{} needs --quantity", req.command)))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

pub fn cone_spec(req: &Request) -> CliResult<ConeSpec> {
    let apex = req.apex_beta.ok_or_else(|| usage("a cone needs --apex-beta"))?;
    Ok(ConeSpec::new(
        req.d.unwrap_or(0),
        apex,
        req.betas.clone().unwrap_or_default(),
    )?)
}

pub fn poly_spec(req: &Request) -> CliResult<PolySpec> {
    Ok(PolySpec::new(req.d.unwrap_or(0), req.betas.clone().unwrap_or_default())?)
}

fn face_of(req: &Request, q: &str) -> CliResult<Vec<usize>> {
    req.face.clone().ok_or_else(|| usage(format!("quantity {q} needs --face")))
}

fn upsilon_total(spec: &ConeSpec, cfg: &QuadConfig) -> CliResult<f64> {
    let m = spec.n().min(spec.d());
    let mut total = 0.0;
    for j in 0..=m {
        total += expected_upsilon(spec, j, cfg)?;
    }
    Ok(total)
}

pub fn evaluate_cone(spec: &ConeSpec, req: &Request, cfg: &QuadConfig) -> CliResult<Evaluation> {
    let q = quantity(req)?;
    let split = "parity-weighted Theta sum over subsets of the points";
    let eval = match q {
        "prob-full-space" | "prob-proper" => {
            let full = cone::prob_full_space(spec, cfg)?;
            let proper = cone::prob_proper(spec, cfg)?;
            let v = if q == "prob-proper" { proper } else { full };
            Evaluation::new(v, split).with("complement_residual", (full + proper - 1.0).abs())
        }
        "upsilon" => {
            let v = expected_upsilon(spec, need(req.k, "k", q)?, cfg)?;
            Evaluation::new(v, "Theta sum over subsets of size k")
                .with("sum_to_one_residual", (upsilon_total(spec, cfg)? - 1.0).abs())
        }
        "solid-angle" => {
            let v = expected_solid_angle(spec, cfg)?;
            Evaluation::new(v, "top conic intrinsic volume").with("sum_to_one_residual", (upsilon_total(spec, cfg)? - 1.0).abs())
        }
        "solid-angle-on-proper" => {
            let v = expected_solid_angle_on_proper(spec, cfg)?;
            let full = cone::prob_full_space(spec, cfg)?;
            let total = expected_solid_angle(spec, cfg)?;
            Evaluation::new(v, "alternating Theta sum").with("full_space_residual", (total - v - full).abs())
        }
        "fk" => {
            let k = need(req.k, "k", q)?;
            let v = expected_fk_cone(spec, k, cfg)?;
            let mut e = Evaluation::new(v, "sum of face probabilities");
            if spec.n() > spec.d() && spec.n() <= DIAGNOSTIC_POINTS {
                let mut missing = 0.0;
                for mask in masks_of_size(spec.n(), k) {
                    let face: Vec<usize> = members(mask).collect();
                    missing += face_probability_cone_complement(spec, &face, cfg)?;
                }
                e = e.with("complement_residual", (binomial(spec.n(), k) - missing - v).abs());
            }
            e
        }
        "face-probability" => {
            let face = face_of(req, q)?;
            let yes = face_probability_cone(spec, &face, cfg)?;
            let no = face_probability_cone_complement(spec, &face, cfg)?;
            Evaluation::new(yes, split).with("complement_residual", (yes + no - 1.0).abs())
        }
        "face-angle" => {
            let v = expected_face_angles_cone(spec, &face_of(req, q)?, FaceAngle::FaceAngle, cfg)?;
            Evaluation::new(v, "single Theta value")
        }
        "internal-angle" => {
            let v = expected_face_angles_cone(spec, &face_of(req, q)?, FaceAngle::InternalOnFaceEvent, cfg)?;
            Evaluation::new(v, "alternating Theta sum on the face event")
        }
        "external-angle" => {
            let face = face_of(req, q)?;
            let v = expected_face_angles_cone(spec, &face, FaceAngle::ExternalOnFaceEvent, cfg)?;
            let dual = external_on_face_event_via_ext(spec, &face, cfg)?;
            Evaluation::new(v, "single Theta value").with("dual_path_residual", (v - dual).abs())
        }
        "normal-angle" => {
            let v = expected_face_angles_cone(spec, &face_of(req, q)?, FaceAngle::NormalAngle, cfg)?;
            Evaluation::new(v, "external angle plus non-face probability")
        }
        "tangent-upsilon" => {
            let l = need(req.l, "l", q)?;
            let v = expected_face_angles_cone(spec, &face_of(req, q)?, FaceAngle::UpsilonOfTangent(l), cfg)?;
            Evaluation::new(v, "Theta sum over subsets of the remaining points")
        }
        other => {
            return Err(usage(format!(
                "unknown cone quantity {other:?}; expected one of {}",
                CONE_QUANTITIES.join(", ")
            )))
        }
    };
    Ok(eval)
}

/// `E V_k` through the volume of a `k`-dimensional beta polytope with shifted parameters.
pub fn kubota_reduced(spec: &PolySpec, k: usize, cfg: &QuadConfig) -> CliResult<f64> {
    let d = spec.d();
    let shift = (d - k) as f64 / 2.0;
    let reduced = PolySpec::new(k, spec.point_betas().iter().map(|b| b + shift).collect())?;
    let flag = binomial(d, k) * kappa(d) / (kappa(k) * kappa(d - k));
    Ok(flag * expected_volume(&reduced, cfg)?)
}

pub fn evaluate_polytope(spec: &PolySpec, req: &Request, cfg: &QuadConfig) -> CliResult<Evaluation> {
    let q = quantity(req)?;
    let (n, d) = (spec.n(), spec.d());
    let eval = match q {
        "fk" => {
            let k = need(req.k, "k", q)?;
            let v = expected_fk_poly(spec, k, cfg)?;
            let c = expected_fk_poly_complement(spec, k, cfg)?;
            Evaluation::new(v, "sum over (k+1)-subsets of face probabilities").with("complement_residual", (v - c).abs())
        }
        "face-probability" => {
            let face = face_of(req, q)?;
            let v = face_probability_poly(spec, &face, cfg)?;
            let (yes, no) = face_probability_poly_both(spec, &face, cfg)?;
            Evaluation::new(v, "shorter of the face and non-face Theta sums").with("complement_residual", (yes + no - 1.0).abs())
        }
        "volume" => {
            let v = expected_volume(spec, cfg)?;
            let c = expected_volume_complement(spec, cfg)?;
            let mut e = Evaluation::new(v, "Theta sum over (d+1)-subsets").with("complement_residual", rel(v, c));
            if n == d + 1 {
                e = e.with("gamma_product_residual", rel(v, simplex_volume_moment(spec, 1.0)?));
            }
            e
        }
        "beta-content" => {
            let b = need(req.content_beta, "content-beta", q)?;
            let v = expected_beta_content(spec, b, cfg)?;
            let c = expected_beta_content_complement(spec, b, cfg)?;
            Evaluation::new(v, "absorption probability as a parity Theta sum").with("complement_residual", (v - c).abs())
        }
        "intrinsic-volume" => {
            let k = need(req.k, "k", q)?;
            let v = expected_intrinsic_volume(spec, k, cfg)?;
            let mut e = Evaluation::new(v, "Theta sum over (k+1)-subsets");
            if k >= 2 {
                e = e.with("kubota_residual", rel(v, kubota_reduced(spec, k, cfg)?));
            }
            e
        }
        "sylvester" => {
            let v = sylvester_probability(spec, cfg)?;
            let c = sylvester_via_cones(spec, cfg)?;
            Evaluation::new(v, "sum of vertex absorption Theta values").with("dual_path_residual", (v - c).abs())
        }
        "skeleton" => {
            let k = need(req.k, "k", q)?;
            let v = skeleton_lp_volume(spec, k, req.p.unwrap_or(1.0), cfg)?;
            Evaluation::new(v, "simplex moments times face Theta sums")
        }
        "conic-sum" => {
            let v = conic_volume_sums(spec, need(req.k, "k", q)?, need(req.l, "l", q)?, cfg)?;
            Evaluation::new(v, "Theta sum over subsets of the remaining points")
        }
        "simplex-moment" => {
            let p = need(req.p, "p", q)?;
            let v = simplex_volume_moment(spec, p)?;
            let mut e = Evaluation::new(v, "Gamma product");
            if p == 1.0 && n == d + 1 && d >= 2 {
                e = e.with("theta_sum_residual", rel(v, expected_volume(spec, cfg)?));
            }
            e
        }
        other => {
            return Err(usage(format!(
                "unknown polytope quantity {other:?}; expected one of {}",
                POLYTOPE_QUANTITIES.join(", ")
            )))
        }
    };
    Ok(eval)
}

/// Exact values matching the simulation keys used by `verify`.
pub fn cone_reference(spec: &ConeSpec, key: &str, cfg: &QuadConfig) -> CliResult<Option<f64>> {
    Ok(match key {
        "prob_full_space" => Some(cone::prob_full_space(spec, cfg)?),
        "prob_proper" => Some(cone::prob_proper(spec, cfg)?),
        _ => None,
    })
}

pub fn polytope_reference(spec: &PolySpec, key: &str, cfg: &QuadConfig) -> CliResult<Option<f64>> {
    if let Some(l) = key.strip_prefix("f_").and_then(|s| s.parse().ok()) {
        return Ok(Some(expected_fk_poly(spec, l, cfg)?));
    }
    if let Some(b) = key.strip_prefix("content_").and_then(|s| s.parse().ok()) {
        return Ok(Some(expected_beta_content(spec, b, cfg)?));
    }
    Ok(match key {
        "volume" => Some(expected_volume(spec, cfg)?),
        "sylvester" => Some(polytope::sylvester_probability(spec, cfg)?),
        _ => None,
    })
}
