//! The subcommands.

use std::collections::BTreeMap;
use std::time::Instant;

use serde_json::{Map, Value};

use betageom_core::montecarlo::stats::CHUNK;
use betageom_core::montecarlo::{ConePlan, Estimate, PolyPlan, RngSpec};
use betageom_core::quantities::{theta, ThetaArgs};

use crate::error::{usage, CliResult};
use crate::formulas::{
    self, cone_reference, cone_spec, evaluate_cone, evaluate_polytope, poly_spec, polytope_reference, Evaluation,
};
use crate::parallel::{cone_statistics, polytope_statistics};
use crate::report::{self, envelope, fixed, num, render_csv, render_json};
use crate::request::{Format, Request};

/// Rendered output and exit code of a successful run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
}

impl Output {
    fn ok(stdout: String) -> Self {
        Self { code: 0, stdout }
    }
}

pub fn execute(req: &Request) -> CliResult<Output> {
    match req.command {
        "theta" => run_theta(req),
        "cone" | "polytope" => run_formula(req),
        "simulate" => run_simulate(req),
        "verify" => run_verify(req),
        "tables" => run_tables(req),
        other => Err(usage(format!("unknown command {other}"))),
    }
}

fn run_theta(req: &Request) -> CliResult<Output> {
    let cfg = req.quad_config();
    cfg.validate()?;
    let start = Instant::now();
    let args = ThetaArgs::from_slices(
        req.x.unwrap_or_default(),
        req.y.as_deref().unwrap_or_default(),
        req.z.as_deref().unwrap_or_default(),
    )?;
    let t = theta(&args, &cfg)?;
    let elapsed = start.elapsed().as_secs_f64();
    if req.format == Format::Csv {
        let row = vec![fixed(t.value), fixed(t.internal), fixed(t.external), fixed(t.imag_residual)];
        return Ok(Output::ok(render_csv(
            &["value", "internal", "external", "imag_residual"],
            &[row],
        )));
    }
    let mut m = envelope(req);
    m.insert("value".into(), num(t.value));
    m.insert("internal".into(), num(t.internal));
    m.insert("external".into(), num(t.external));
    m.insert("method".into(), Value::from("product of the internal and external factors"));
    let mut diag = Map::new();
    diag.insert("imag_residual".into(), num(t.imag_residual));
    m.insert("diagnostics".into(), Value::Object(diag));
    m.insert("quad_config".into(), report::quad_config(&cfg));
    m.insert("wall_time_seconds".into(), num(elapsed));
    Ok(Output::ok(render_json(&Value::Object(m))))
}

fn evaluate(req: &Request) -> CliResult<Evaluation> {
    let cfg = req.quad_config();
    cfg.validate()?;
    match req.command {
        "cone" => evaluate_cone(&cone_spec(req)?, req, &cfg),
        _ => evaluate_polytope(&poly_spec(req)?, req, &cfg),
    }
}

fn run_formula(req: &Request) -> CliResult<Output> {
    let start = Instant::now();
    let e = evaluate(req)?;
    let elapsed = start.elapsed().as_secs_f64();
    let q = req.quantity.clone().unwrap_or_default();
    if req.format == Format::Csv {
        let mut header = vec!["quantity", "value", "method"];
        let mut row = vec![q, fixed(e.value), e.method.to_string()];
        for (name, r) in &e.diagnostics {
            header.push(name);
            row.push(fixed(*r));
        }
        return Ok(Output::ok(render_csv(&header, &[row])));
    }
    let mut m = envelope(req);
    m.insert("quantity".into(), Value::from(q));
    m.insert("value".into(), num(e.value));
    m.insert("method".into(), Value::from(e.method));
    let diag: Map<String, Value> = e.diagnostics.iter().map(|(k, v)| (k.to_string(), num(*v))).collect();
    m.insert("diagnostics".into(), Value::Object(diag));
    m.insert("quad_config".into(), report::quad_config(&req.quad_config()));
    m.insert("wall_time_seconds".into(), num(elapsed));
    Ok(Output::ok(render_json(&Value::Object(m))))
}

fn base_rng(req: &Request) -> RngSpec {
    RngSpec::new(req.seed.unwrap_or(crate::request::DEFAULT_SEED), 0)
}

fn model(req: &Request) -> CliResult<&str> {
    match req.model.as_deref() {
        Some(m @ ("cone" | "polytope")) => Ok(m),
        Some(other) => Err(usage(format!("--model must be cone or polytope, got {other:?}"))),
        None => Err(usage(format!("{} needs --model cone or --model polytope", req.command))),
    }
}

fn estimates_json(estimates: &BTreeMap<String, Estimate>) -> Value {
    Value::Object(estimates.iter().map(|(k, e)| (k.clone(), report::estimate(e))).collect())
}

fn rng_json(base: RngSpec, samples: u64) -> Value {
    let mut m = Map::new();
    m.insert("base".into(), report::rng_spec(&base));
    m.insert("chunk".into(), Value::from(CHUNK));
    m.insert("streams".into(), Value::from(samples.div_ceil(CHUNK)));
    Value::Object(m)
}

fn run_simulate(req: &Request) -> CliResult<Output> {
    let samples = req.samples.unwrap_or(crate::request::DEFAULT_SIMULATE_SAMPLES);
    let base = base_rng(req);
    let estimates = match model(req)? {
        "cone" => cone_statistics(&cone_spec(req)?, &ConePlan::default(), base, samples, req.jobs)?,
        _ => {
            let plan = PolyPlan {
                content_betas: vec![req.content_beta.unwrap_or(1.0)],
                ..PolyPlan::default()
            };
            polytope_statistics(&poly_spec(req)?, &plan, base, samples, req.jobs)?
        }
    };
    if req.format == Format::Csv {
        let rows: Vec<Vec<String>> = estimates
            .iter()
            .map(|(k, e)| {
                vec![
                    k.clone(),
                    fixed(e.mean),
                    fixed(e.std_error),
                    e.samples.to_string(),
                    e.seed.seed.to_string(),
                    e.seed.stream.to_string(),
                ]
            })
            .collect();
        return Ok(Output::ok(render_csv(
            &["statistic", "mean", "std_error", "samples", "seed", "stream"],
            &rows,
        )));
    }
    let mut m = envelope(req);
    m.insert("model".into(), Value::from(req.model.clone()));
    m.insert("rng".into(), rng_json(base, samples));
    m.insert("estimates".into(), estimates_json(&estimates));
    Ok(Output::ok(render_json(&Value::Object(m))))
}

/// One formula against one estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub quantity: String,
    pub formula: f64,
    pub estimate: Estimate,
}

impl Comparison {
    pub fn z_score(&self) -> f64 {
        self.estimate.z_score(self.formula)
    }

    pub fn discordant(&self) -> bool {
        self.estimate.is_discordant(self.formula)
    }
}

/// Matched formulas and simulations: the absorption probability of the cone
/// with the given apex, and f_0, f_1, volume, beta content and Sylvester's
/// probability of the polytope, as far as each is defined.
pub fn comparisons(req: &Request) -> CliResult<Vec<Comparison>> {
    let cfg = req.quad_config();
    cfg.validate()?;
    let samples = req.samples.unwrap_or(crate::request::DEFAULT_VERIFY_SAMPLES);
    let base = base_rng(req);
    let mut out = Vec::new();
    let which = req.model.as_deref();
    if which.is_some() {
        model(req)?;
    }
    if which != Some("polytope") {
        let spec = betageom_core::cone::ConeSpec::new(
            req.d.unwrap_or(0),
            req.apex_beta.unwrap_or(0.0),
            req.betas.clone().unwrap_or_default(),
        )?;
        let plan = ConePlan {
            faces: false,
            upsilon: false,
            angles: false,
        };
        let est = cone_statistics(&spec, &plan, base, samples, req.jobs)?;
        let e = est["prob_full_space"];
        let formula = cone_reference(&spec, "prob_full_space", &cfg)?.expect("known key");
        out.push(Comparison {
            quantity: "cone.prob_full_space".into(),
            formula,
            estimate: e,
        });
    }
    if which != Some("cone") {
        let spec = poly_spec(req)?;
        let plan = PolyPlan {
            faces: true,
            max_face_dim: 1,
            conic_sums: false,
            content_betas: vec![req.content_beta.unwrap_or(1.0)],
            volume: true,
            sylvester: true,
            mean_width: false,
        };
        // polytope streams start past the cone streams
        let poly_base = RngSpec::new(base.seed, base.stream + samples.div_ceil(CHUNK));
        let est = polytope_statistics(&spec, &plan, poly_base, samples, req.jobs)?;
        for (key, e) in &est {
            if key.starts_with("skeleton_") {
                continue;
            }
            if let Some(formula) = polytope_reference(&spec, key, &cfg)? {
                out.push(Comparison {
                    quantity: format!("polytope.{key}"),
                    formula,
                    estimate: *e,
                });
            }
        }
    }
    Ok(out)
}

fn run_verify(req: &Request) -> CliResult<Output> {
    let list = comparisons(req)?;
    let bad = list.iter().filter(|c| c.discordant()).count();
    let code = i32::from(bad > 0);
    if req.format == Format::Csv {
        let rows: Vec<Vec<String>> = list
            .iter()
            .map(|c| {
                vec![
                    c.quantity.clone(),
                    fixed(c.formula),
                    fixed(c.estimate.mean),
                    fixed(c.estimate.std_error),
                    fixed(c.z_score()),
                    c.discordant().to_string(),
                ]
            })
            .collect();
        let out = render_csv(&["quantity", "formula", "mean", "std_error", "z_score", "discordant"], &rows);
        return Ok(Output { code, stdout: out });
    }
    let mut m = envelope(req);
    let items: Vec<Value> = list
        .iter()
        .map(|c| {
            let mut o = Map::new();
            o.insert("quantity".into(), Value::from(c.quantity.clone()));
            o.insert("formula".into(), num(c.formula));
            o.insert("estimate".into(), report::estimate(&c.estimate));
            o.insert("z_score".into(), num(c.z_score()));
            o.insert("discordant".into(), Value::from(c.discordant()));
            Value::Object(o)
        })
        .collect();
    m.insert("sigma_level".into(), num(betageom_core::montecarlo::stats::SIGMA_LEVEL));
    m.insert("comparisons".into(), Value::from(items));
    m.insert("discordant".into(), Value::from(bad));
    m.insert("passed".into(), Value::from(bad == 0));
    m.insert("quad_config".into(), report::quad_config(&req.quad_config()));
    Ok(Output {
        code,
        stdout: render_json(&Value::Object(m)),
    })
}

fn sweep_grid(req: &Request) -> CliResult<Vec<f64>> {
    let from = req.from.ok_or_else(|| usage("tables needs --from"))?;
    let to = req.to.ok_or_else(|| usage("tables needs --to"))?;
    let steps = req.steps.unwrap_or(11);
    if steps == 0 {
        return Err(usage("--steps must be at least 1"));
    }
    if steps == 1 {
        return Ok(vec![from]);
    }
    Ok((0..steps)
        .map(|i| from + (to - from) * i as f64 / (steps - 1) as f64)
        .collect())
}

fn run_tables(req: &Request) -> CliResult<Output> {
    let sweep = req.sweep.as_deref().unwrap_or("betas");
    let grid = sweep_grid(req)?;
    let which = model(req)?;
    let q = req.quantity.clone().ok_or_else(|| usage("tables needs --quantity"))?;
    let mut rows = Vec::new();
    for &t in &grid {
        let mut point = req.clone();
        point.command = if which == "cone" { "cone" } else { "polytope" };
        match sweep {
            "betas" => {
                let n = req
                    .n()
                    .ok_or_else(|| usage("a betas sweep needs --betas (and --n for uniform:) to fix the point count"))?;
                point.betas = Some(vec![t; n]);
            }
            "apex-beta" => point.apex_beta = Some(t),
            "content-beta" => point.content_beta = Some(t),
            other => {
                return Err(usage(format!(
                    "--sweep must be betas, apex-beta or content-beta, got {other:?}"
                )))
            }
        }
        crate::request::check_line_sphere(point.d, &[t])?;
        rows.push((t, evaluate(&point)?.value));
    }
    if req.format == Format::Json {
        let mut m = envelope(req);
        m.insert("sweep".into(), Value::from(sweep));
        m.insert("quantity".into(), Value::from(q));
        let items: Vec<Value> = rows.iter().map(|(t, v)| Value::from(vec![num(*t), num(*v)])).collect();
        m.insert("rows".into(), Value::from(items));
        m.insert("quad_config".into(), report::quad_config(&req.quad_config()));
        return Ok(Output::ok(render_json(&Value::Object(m))));
    }
    let text: Vec<Vec<String>> = rows.iter().map(|(t, v)| vec![fixed(*t), fixed(*v)]).collect();
    Ok(Output::ok(render_csv(&[sweep, &q], &text)))
}

pub use formulas::{CONE_QUANTITIES, POLYTOPE_QUANTITIES};
