//! JSON and CSV rendering.

use serde_json::{Map, Number, Value};

use betageom_core::montecarlo::{Estimate, RngSpec};
use betageom_core::QuadConfig;

use crate::error::CliError;
use crate::request::Request;

pub const SCHEMA: &str = "betageom/1";

/// A real with 17 significant digits; non-finite values become `null`.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        Value::Number(fixed(x).parse::<Number>().expect("formatted float is a JSON number"))
    } else {
        Value::Null
    }
}

/// `x` with 17 significant digits, as in JSON output.
pub fn fixed(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn quad_config(cfg: &QuadConfig) -> Value {
    let mut m = Map::new();
    m.insert("rel_tol".into(), num(cfg.rel_tol));
    m.insert("abs_tol".into(), num(cfg.abs_tol));
    m.insert("max_refinements".into(), Value::from(cfg.max_refinements));
    m.insert("truncation_margin".into(), num(cfg.truncation_margin));
    Value::Object(m)
}

pub fn rng_spec(rng: &RngSpec) -> Value {
    let mut m = Map::new();
    m.insert("seed".into(), Value::from(rng.seed));
    m.insert("stream".into(), Value::from(rng.stream));
    Value::Object(m)
}

pub fn estimate(e: &Estimate) -> Value {
    let mut m = Map::new();
    m.insert("mean".into(), num(e.mean));
    m.insert("std_error".into(), num(e.std_error));
    m.insert("samples".into(), Value::from(e.samples));
    m.insert("seed".into(), rng_spec(&e.seed));
    Value::Object(m)
}

/// The request echo: its argv and its resolved fields.
pub fn request(req: &Request) -> Value {
    let mut m = Map::new();
    m.insert("command".into(), Value::from(req.command));
    m.insert("argv".into(), Value::from(req.argv()));
    let mut fields = Map::new();
    for (flag, value) in req.fields() {
        fields.insert(flag.into(), Value::from(value));
    }
    m.insert("flags".into(), Value::Object(fields));
    Value::Object(m)
}

/// Top-level object with the schema tag and the echo.
pub fn envelope(req: &Request) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("schema".into(), Value::from(SCHEMA));
    m.insert("command".into(), Value::from(req.command));
    m.insert("request".into(), request(req));
    m
}

pub fn error_object(err: &CliError) -> String {
    let mut inner = Map::new();
    inner.insert("kind".into(), Value::from(err.kind()));
    inner.insert("message".into(), Value::from(err.to_string()));
    inner.insert("exit_code".into(), Value::from(err.exit_code()));
    let mut m = Map::new();
    m.insert("schema".into(), Value::from(SCHEMA));
    m.insert("error".into(), Value::Object(inner));
    render_json(&Value::Object(m))
}

pub fn render_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

/// Comma-separated rows with a header; fields are quoted when needed.
pub fn render_csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let quote = |s: &str| {
        if s.contains([',', '"', '\n']) {
            format!("\"{}\"", s.replace('"', "\"\""))
        } else {
            s.to_string()
        }
    };
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.iter().map(|s| quote(s)).collect::<Vec<_>>().join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_keep_seventeen_digits() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 1e6, 0.0, f64::MIN_POSITIVE] {
            let text = serde_json::to_string(&num(x)).unwrap();
            let mantissa = text.split('e').next().unwrap().trim_start_matches('-').replace('.', "");
            assert_eq!(mantissa.len(), 17, "{text}");
            assert_eq!(text.parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
        assert_eq!(num(f64::NAN), Value::Null);
    }

    #[test]
    fn csv_quotes_commas() {
        let s = render_csv(&["a", "b"], &[vec!["1,2".into(), "x".into()]]);
        assert_eq!(s, "a,b\n\"1,2\",x\n");
    }
}
