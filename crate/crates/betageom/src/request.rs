//! Command-line flags, config files, and the resolved request.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{usage, CliResult};

pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_SIMULATE_SAMPLES: u64 = 100_000;
pub const DEFAULT_VERIFY_SAMPLES: u64 = 200_000;

#[derive(Debug, Parser)]
#[command(
    name = "betageom",
    version,
    about = "Exact expectations for random beta polytopes and beta cones"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Theta(x; Y; Z) with its internal and external factors
    Theta(ThetaFlags),
    /// One expectation for a beta cone
    Cone(ModelFlags),
    /// One expectation for a beta polytope
    Polytope(ModelFlags),
    /// Monte Carlo estimates for a cone or polytope
    Simulate(ModelFlags),
    /// Formulas against simulation; exits 1 on a 3-sigma discordance
    Verify(ModelFlags),
    /// CSV sweep of a quantity over a parameter range
    Tables(ModelFlags),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    fn as_str(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct ThetaFlags {
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<f64>,
    /// Comma list of the Y multiset (may be empty)
    #[arg(long = "Y", allow_hyphen_values = true)]
    pub y: Option<String>,
    /// Comma list of the Z multiset (may be empty)
    #[arg(long = "Z", allow_hyphen_values = true)]
    pub z: Option<String>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ModelFlags {
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Comma list of point parameters, or "uniform:BETA" with --n
    #[arg(long, allow_hyphen_values = true)]
    pub betas: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub apex_beta: Option<f64>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub l: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub p: Option<f64>,
    /// Comma list of point indices
    #[arg(long)]
    pub face: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub content_beta: Option<f64>,
    #[arg(long)]
    pub quantity: Option<String>,
    /// cone or polytope (simulate, tables)
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Swept parameter for tables: betas or content-beta
    #[arg(long)]
    pub sweep: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub from: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub to: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
}

/// A fully resolved request; `argv()` reproduces it.
#[derive(Debug, Clone, PartialEq)]
pub struct Request {
    pub command: &'static str,
    pub d: Option<usize>,
    pub betas: Option<Vec<f64>>,
    pub apex_beta: Option<f64>,
    pub k: Option<usize>,
    pub l: Option<usize>,
    pub p: Option<f64>,
    pub face: Option<Vec<usize>>,
    pub content_beta: Option<f64>,
    pub quantity: Option<String>,
    pub model: Option<String>,
    pub samples: Option<u64>,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub tol: Option<f64>,
    pub format: Format,
    pub sweep: Option<String>,
    pub from: Option<f64>,
    pub to: Option<f64>,
    pub steps: Option<usize>,
    pub x: Option<f64>,
    pub y: Option<Vec<f64>>,
    pub z: Option<Vec<f64>>,
}

impl Request {
    fn empty(command: &'static str) -> Self {
        Self {
            command,
            d: None,
            betas: None,
            apex_beta: None,
            k: None,
            l: None,
            p: None,
            face: None,
            content_beta: None,
            quantity: None,
            model: None,
            samples: None,
            seed: None,
            jobs: None,
            tol: None,
            format: Format::Json,
            sweep: None,
            from: None,
            to: None,
            steps: None,
            x: None,
            y: None,
            z: None,
        }
    }

    pub fn n(&self) -> Option<usize> {
        self.betas.as_ref().map(Vec::len)
    }

    /// `(flag, value)` pairs in a fixed order; `--jobs` is left out since it never changes a result.
    pub fn fields(&self) -> Vec<(&'static str, String)> {
        let mut out = Vec::new();
        let mut put = |flag: &'static str, v: Option<String>| {
            if let Some(v) = v {
                out.push((flag, v));
            }
        };
        put("x", self.x.map(|v| v.to_string()));
        put("Y", self.y.as_deref().map(join_f64));
        put("Z", self.z.as_deref().map(join_f64));
        put("model", self.model.clone());
        put("d", self.d.map(|v| v.to_string()));
        put("n", self.n().map(|v| v.to_string()));
        put("betas", self.betas.as_deref().map(join_f64));
        put("apex-beta", self.apex_beta.map(|v| v.to_string()));
        put("quantity", self.quantity.clone());
        put("k", self.k.map(|v| v.to_string()));
        put("l", self.l.map(|v| v.to_string()));
        put("p", self.p.map(|v| v.to_string()));
        put(
            "face",
            self.face
                .as_ref()
                .map(|f| f.iter().map(usize::to_string).collect::<Vec<_>>().join(",")),
        );
        put("content-beta", self.content_beta.map(|v| v.to_string()));
        put("sweep", self.sweep.clone());
        put("from", self.from.map(|v| v.to_string()));
        put("to", self.to.map(|v| v.to_string()));
        put("steps", self.steps.map(|v| v.to_string()));
        put("samples", self.samples.map(|v| v.to_string()));
        put("seed", self.seed.map(|v| v.to_string()));
        put("tol", self.tol.map(|v| v.to_string()));
        out.push(("format", self.format.as_str().to_string()));
        out
    }

    /// Arguments that rerun this request.
    pub fn argv(&self) -> Vec<String> {
        let mut argv = vec![self.command.to_string()];
        for (flag, value) in self.fields() {
            argv.push(format!("--{flag}"));
            argv.push(value);
        }
        argv
    }

    pub fn quad_config(&self) -> betageom_core::QuadConfig {
        self.tol
            .map_or_else(betageom_core::QuadConfig::default, betageom_core::QuadConfig::with_tol)
    }
}

fn join_f64(v: &[f64]) -> String {
    v.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
}

fn parse_f64(item: &str, what: &str) -> CliResult<f64> {
    let v: f64 = item
        .trim()
        .parse()
        .map_err(|_| usage(format!("{what}: cannot parse {item:?} as a number")))?;
    if !v.is_finite() {
        return Err(usage(format!("{what}: {item:?} is not finite")));
    }
    Ok(v)
}

/// A comma list of reals; the empty string is the empty list.
pub fn parse_list(s: &str, what: &str) -> CliResult<Vec<f64>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(|item| parse_f64(item, what)).collect()
}

/// `--betas`: a comma list, or `uniform:BETA` repeated `n` times.
pub fn parse_betas(s: &str, n: Option<usize>) -> CliResult<Vec<f64>> {
    let betas = if let Some(rest) = s.trim().strip_prefix("uniform:") {
        let n = n.ok_or_else(|| usage("--betas uniform:BETA needs --n"))?;
        vec![parse_f64(rest, "--betas")?; n]
    } else {
        parse_list(s, "--betas")?
    };
    if betas.is_empty() {
        return Err(usage("--betas is empty"));
    }
    if let Some(n) = n {
        if n != betas.len() {
            return Err(usage(format!("--n {n} disagrees with {} entries in --betas", betas.len())));
        }
    }
    Ok(betas)
}

fn parse_face(s: &str) -> CliResult<Vec<usize>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|item| {
            item.trim()
                .parse()
                .map_err(|_| usage(format!("--face: cannot parse {item:?} as an index")))
        })
        .collect()
}

/// Rejects beta = -1 on the line: two points at the same endpoint coincide with positive probability.
pub fn check_line_sphere(d: Option<usize>, betas: &[f64]) -> CliResult<()> {
    if d == Some(1) && betas.contains(&-1.0) {
        return Err(usage(
            "beta = -1 is excluded in dimension 1: the law sits on {-1, +1}, so points coincide with \
             positive probability and are not in general position",
        ));
    }
    Ok(())
}

/// Keys of a `key = value` config file, normalized to flag spelling.
#[derive(Debug, Default)]
struct ConfigFile {
    values: BTreeMap<String, toml::Value>,
}

impl ConfigFile {
    fn load(path: Option<&Path>) -> CliResult<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
        let table: toml::Table = toml::from_str(&text).map_err(|e| usage(format!("config {}: {e}", path.display())))?;
        let values = table.into_iter().map(|(k, v)| (k.replace('_', "-"), v)).collect();
        Ok(Self { values })
    }

    fn take(&mut self, key: &str) -> Option<toml::Value> {
        self.values.remove(key)
    }

    fn f64(&mut self, key: &str, flag: Option<f64>) -> CliResult<Option<f64>> {
        let from_file = self.take(key);
        if flag.is_some() {
            return Ok(flag);
        }
        match from_file {
            None => Ok(None),
            Some(toml::Value::Float(v)) => Ok(Some(v)),
            Some(toml::Value::Integer(v)) => Ok(Some(v as f64)),
            Some(toml::Value::String(s)) => parse_f64(&s, key).map(Some),
            Some(v) => Err(usage(format!("config key {key}: expected a number, got {v}"))),
        }
    }

    fn uint(&mut self, key: &str, flag: Option<u64>) -> CliResult<Option<u64>> {
        let from_file = self.take(key);
        if flag.is_some() {
            return Ok(flag);
        }
        match from_file {
            None => Ok(None),
            Some(toml::Value::Integer(v)) if v >= 0 => Ok(Some(v as u64)),
            Some(toml::Value::String(s)) => s
                .trim()
                .parse()
                .map(Some)
                .map_err(|_| usage(format!("config key {key}: bad integer {s:?}"))),
            Some(v) => Err(usage(format!("config key {key}: expected a nonnegative integer, got {v}"))),
        }
    }

    fn usize(&mut self, key: &str, flag: Option<usize>) -> CliResult<Option<usize>> {
        Ok(self.uint(key, flag.map(|v| v as u64))?.map(|v| v as usize))
    }

    fn string(&mut self, key: &str, flag: Option<String>) -> CliResult<Option<String>> {
        let from_file = self.take(key);
        if flag.is_some() {
            return Ok(flag);
        }
        let scalar = |v: &toml::Value| match v {
            toml::Value::String(s) => Ok(s.clone()),
            toml::Value::Integer(i) => Ok(i.to_string()),
            toml::Value::Float(f) => Ok(f.to_string()),
            other => Err(usage(format!("config key {key}: unsupported value {other}"))),
        };
        match from_file {
            None => Ok(None),
            Some(toml::Value::Array(items)) => Ok(Some(items.iter().map(scalar).collect::<CliResult<Vec<_>>>()?.join(","))),
            Some(v) => scalar(&v).map(Some),
        }
    }

    fn format(&mut self, flag: Option<Format>) -> CliResult<Option<Format>> {
        match self.string("format", None)? {
            _ if flag.is_some() => Ok(flag),
            None => Ok(None),
            Some(s) => Format::from_str(&s, true)
                .map(Some)
                .map_err(|_| usage(format!("config key format: {s:?}"))),
        }
    }

    fn finish(self) -> CliResult<()> {
        match self.values.keys().next() {
            None => Ok(()),
            Some(k) => Err(usage(format!("unknown config key {k:?}"))),
        }
    }
}

fn resolve_theta(flags: &ThetaFlags) -> CliResult<Request> {
    let mut cfg = ConfigFile::load(flags.config.as_deref())?;
    let mut req = Request::empty("theta");
    req.x = Some(cfg.f64("x", flags.x)?.ok_or_else(|| usage("theta needs --x"))?);
    req.y = Some(parse_list(&cfg.string("Y", flags.y.clone())?.unwrap_or_default(), "--Y")?);
    req.z = Some(parse_list(&cfg.string("Z", flags.z.clone())?.unwrap_or_default(), "--Z")?);
    req.tol = cfg.f64("tol", flags.tol)?;
    req.format = cfg.format(flags.format)?.unwrap_or(Format::Json);
    cfg.finish()?;
    Ok(req)
}

fn resolve_model(command: &'static str, flags: &ModelFlags) -> CliResult<Request> {
    let mut cfg = ConfigFile::load(flags.config.as_deref())?;
    let mut req = Request::empty(command);
    req.d = cfg.usize("d", flags.d)?;
    let n = cfg.usize("n", flags.n)?;
    req.betas = cfg
        .string("betas", flags.betas.clone())?
        .map(|s| parse_betas(&s, n))
        .transpose()?;
    if n.is_some() && req.betas.is_none() {
        return Err(usage("--n needs --betas"));
    }
    req.apex_beta = cfg.f64("apex-beta", flags.apex_beta)?;
    req.k = cfg.usize("k", flags.k)?;
    req.l = cfg.usize("l", flags.l)?;
    req.p = cfg.f64("p", flags.p)?;
    req.face = cfg.string("face", flags.face.clone())?.map(|s| parse_face(&s)).transpose()?;
    req.content_beta = cfg.f64("content-beta", flags.content_beta)?;
    req.quantity = cfg.string("quantity", flags.quantity.clone())?;
    req.model = cfg.string("model", flags.model.clone())?;
    req.samples = cfg.uint("samples", flags.samples)?;
    req.seed = cfg.uint("seed", flags.seed)?;
    req.jobs = cfg.usize("jobs", flags.jobs)?;
    req.tol = cfg.f64("tol", flags.tol)?;
    req.sweep = cfg.string("sweep", flags.sweep.clone())?;
    req.from = cfg.f64("from", flags.from)?;
    req.to = cfg.f64("to", flags.to)?;
    req.steps = cfg.usize("steps", flags.steps)?;
    let default_format = if command == "tables" { Format::Csv } else { Format::Json };
    req.format = cfg.format(flags.format)?.unwrap_or(default_format);
    cfg.finish()?;

    if req.d.is_none() {
        return Err(usage(format!("{command} needs --d")));
    }
    if req.betas.is_none() && command != "tables" {
        return Err(usage(format!("{command} needs --betas")));
    }
    let mut all = req.betas.clone().unwrap_or_default();
    all.extend(req.apex_beta);
    all.extend(req.content_beta);
    check_line_sphere(req.d, &all)?;
    if req.jobs == Some(0) {
        return Err(usage("--jobs must be at least 1"));
    }
    if let Some(tol) = req.tol {
        if tol.is_nan() || tol <= 0.0 {
            return Err(usage("--tol must be positive"));
        }
    }
    match command {
        "simulate" | "verify" => {
            req.seed = Some(req.seed.unwrap_or(DEFAULT_SEED));
            let default = if command == "verify" {
                DEFAULT_VERIFY_SAMPLES
            } else {
                DEFAULT_SIMULATE_SAMPLES
            };
            req.samples = Some(req.samples.unwrap_or(default));
            if command == "verify" {
                req.apex_beta = Some(req.apex_beta.unwrap_or(0.0));
            }
            if req.samples == Some(0) {
                return Err(usage("--samples must be at least 1"));
            }
        }
        _ => {}
    }
    Ok(req)
}

/// Resolves parsed flags and any config file into a request.
pub fn resolve(command: &Command) -> CliResult<Request> {
    match command {
        Command::Theta(f) => resolve_theta(f),
        Command::Cone(f) => resolve_model("cone", f),
        Command::Polytope(f) => resolve_model("polytope", f),
        Command::Simulate(f) => resolve_model("simulate", f),
        Command::Verify(f) => resolve_model("verify", f),
        Command::Tables(f) => resolve_model("tables", f),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> CliResult<Request> {
        let cli =
            Cli::try_parse_from(std::iter::once("betageom").chain(args.iter().copied())).map_err(|e| usage(e.to_string()))?;
        resolve(&cli.command)
    }

    #[test]
    fn betas_lists_and_uniform() {
        assert_eq!(parse_betas("0,-1,1e6", None).unwrap(), vec![0.0, -1.0, 1e6]);
        assert_eq!(parse_betas("uniform:-0.5", Some(3)).unwrap(), vec![-0.5; 3]);
        assert!(parse_betas("uniform:1", None).is_err());
        assert!(parse_betas("1,2", Some(3)).is_err());
        assert!(parse_betas("1,x", None).is_err());
        assert!(parse_betas("", None).is_err());
        assert!(parse_betas("inf", None).is_err());
    }

    #[test]
    fn empty_lists_for_theta() {
        let r = parse(&["theta", "--x", "3.0", "--Y", "", "--Z", ""]).unwrap();
        assert_eq!(r.y, Some(vec![]));
        assert_eq!(r.z, Some(vec![]));
    }

    #[test]
    fn sphere_on_the_line_is_rejected() {
        let e = parse(&["polytope", "--d", "1", "--betas", "-1,0", "--quantity", "fk", "--k", "0"]).unwrap_err();
        assert_eq!(e.exit_code(), 2);
        assert!(parse(&["polytope", "--d", "2", "--betas", "-1,0,0", "--quantity", "volume"]).is_ok());
        let e = parse(&[
            "cone",
            "--d",
            "1",
            "--betas",
            "0,0",
            "--apex-beta",
            "-1",
            "--quantity",
            "prob-proper",
        ])
        .unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn argv_round_trips() {
        let r = parse(&[
            "cone",
            "--d",
            "3",
            "--betas",
            "0.1,2,1e-3,-1",
            "--apex-beta",
            "0.5",
            "--quantity",
            "upsilon",
            "--k",
            "1",
        ])
        .unwrap();
        let again: Vec<String> = r.argv();
        let strs: Vec<&str> = again.iter().map(String::as_str).collect();
        assert_eq!(parse(&strs).unwrap(), r);
    }

    #[test]
    fn config_fills_missing_flags_only() {
        let dir = std::env::temp_dir().join(format!("betageom-config-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.toml");
        std::fs::write(
            &path,
            "d = 3\nbetas = [0, 1.5, 2]\nquantity = \"volume\"\nseed = 9\napex_beta = 0.25\n",
        )
        .unwrap();
        let p = path.to_str().unwrap();
        let r = parse(&["polytope", "--config", p, "--d", "2"]).unwrap();
        assert_eq!(r.d, Some(2));
        assert_eq!(r.betas, Some(vec![0.0, 1.5, 2.0]));
        assert_eq!(r.apex_beta, Some(0.25));
        assert_eq!(r.quantity.as_deref(), Some("volume"));
        std::fs::write(&path, "d = 2\nbetas = \"0,0,0\"\nwidth = 3\n").unwrap();
        assert!(parse(&["polytope", "--config", p]).is_err());
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn simulation_defaults_are_echoed() {
        let r = parse(&["simulate", "--model", "cone", "--d", "2", "--betas", "0,0,0"]).unwrap();
        assert_eq!(r.seed, Some(DEFAULT_SEED));
        assert_eq!(r.samples, Some(DEFAULT_SIMULATE_SAMPLES));
        assert!(r.argv().contains(&"--seed".to_string()));
    }
}
