//! Flat `key = value` run configuration.
//!
//! ```text
//! # comment
//! domain = ball
//! domain.center = 0,0
//! domain.radius = 1
//! boundary = exp_cos
//! boundary.a = 0.7071067811865476,0.7071067811865476
//! query.t = 0.25,0.5,1
//! query.x = 0,0; 0.5,0
//! n = 1000000
//! ```
//!
//! Lists are comma separated; points in `query.x` are separated by `;`.
//! A CSV output file is also a valid config: its `#@ key = value` header
//! lines are the resolved configuration. JSON outputs carry the same pairs
//! in their `config` object.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::boundary::{BoundaryData, TabulatedData};
use crate::estimator::{Backend, Coupling, EstimatorConfig, Method};
use crate::geometry::{Domain, Point, Region};
use crate::stats::default_partitions;

/// Prefix of config echo lines in CSV output.
pub const ECHO_PREFIX: &str = "#@";

/// Where a setting came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Origin {
    Line(usize),
    Flag,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Line(n) => write!(f, "line {n}"),
            Origin::Flag => f.write_str("--set"),
        }
    }
}

/// A configuration problem, located where possible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub origin: Option<Origin>,
    pub key: Option<String>,
    pub message: String,
}

impl ConfigError {
    fn new(message: impl Into<String>) -> Self {
        ConfigError { origin: None, key: None, message: message.into() }
    }

    fn at(origin: &Origin, key: Option<&str>, message: impl Into<String>) -> Self {
        ConfigError { origin: Some(origin.clone()), key: key.map(str::to_owned), message: message.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.origin, &self.key) {
            (Some(o), Some(k)) => write!(f, "{o}: {k}: {}", self.message),
            (Some(o), None) => write!(f, "{o}: {}", self.message),
            (None, Some(k)) => write!(f, "{k}: {}", self.message),
            (None, None) => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone)]
struct Entry {
    value: String,
    origin: Origin,
}

/// Unvalidated key/value pairs.
#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    entries: BTreeMap<String, Entry>,
}

impl RawConfig {
    pub fn new() -> Self {
        Self::default()
    }

    /// Parses config text. A file whose first non-blank line starts with
    /// `#@` is read as an output echo: only its `#@` lines count. Text
    /// starting with `{` is read as a JSON report's `config` object.
    pub fn parse_str(text: &str) -> Result<Self, ConfigError> {
        let first = text.lines().map(str::trim).find(|l| !l.is_empty()).unwrap_or("");
        if first.starts_with('{') {
            return Self::parse_json(text);
        }
        let echo = first.starts_with(ECHO_PREFIX);
        let mut raw = RawConfig::new();
        for (i, line) in text.lines().enumerate() {
            let origin = Origin::Line(i + 1);
            let mut body = line.trim();
            if echo {
                match body.strip_prefix(ECHO_PREFIX) {
                    Some(rest) => body = rest.trim(),
                    None => continue,
                }
            }
            if body.is_empty() || body.starts_with('#') {
                continue;
            }
            let (key, value) = body
                .split_once('=')
                .ok_or_else(|| ConfigError::at(&origin, None, format!("expected 'key = value', got '{body}'")))?;
            raw.insert(key.trim(), value.trim(), origin)?;
        }
        Ok(raw)
    }

    fn parse_json(text: &str) -> Result<Self, ConfigError> {
        let doc: serde_json::Value =
            serde_json::from_str(text).map_err(|e| ConfigError::new(format!("invalid JSON: {e}")))?;
        let obj = doc
            .get("config")
            .and_then(|c| c.as_object())
            .ok_or_else(|| ConfigError::new("JSON config needs a 'config' object"))?;
        let mut raw = RawConfig::new();
        for (k, v) in obj {
            let value = v
                .as_str()
                .ok_or_else(|| ConfigError { origin: None, key: Some(k.clone()), message: "value must be a string".into() })?;
            raw.insert(k, value, Origin::Flag)?;
        }
        Ok(raw)
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse_str(&text).map_err(|mut e| {
            e.message = format!("{} ({})", e.message, path.display());
            e
        })
    }

    fn insert(&mut self, key: &str, value: &str, origin: Origin) -> Result<(), ConfigError> {
        if !KNOWN_KEYS.contains(&key) {
            return Err(ConfigError::at(&origin, Some(key), "unknown key"));
        }
        if let Some(prev) = self.entries.get(key) {
            if let (Origin::Line(_), Origin::Line(_)) = (&prev.origin, &origin) {
                return Err(ConfigError::at(&origin, Some(key), format!("duplicate key (first set on {})", prev.origin)));
            }
        }
        self.entries.insert(key.to_owned(), Entry { value: value.to_owned(), origin });
        Ok(())
    }

    /// Applies a `key=value` override.
    pub fn set(&mut self, assignment: &str) -> Result<(), ConfigError> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| ConfigError::at(&Origin::Flag, None, format!("expected key=value, got '{assignment}'")))?;
        self.insert(key.trim(), value.trim(), Origin::Flag)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|e| e.value.as_str())
    }
}

const KNOWN_KEYS: &[&str] = &[
    "domain",
    "domain.lo",
    "domain.hi",
    "domain.center",
    "domain.radius",
    "boundary",
    "boundary.a",
    "boundary.value",
    "boundary.axis",
    "boundary.threshold",
    "boundary.file",
    "method",
    "coupling",
    "query.t",
    "query.x",
    "n",
    "seed",
    "partitions",
    "em.base_step",
    "em.boundary_slowdown",
    "em.max_steps",
    "em.snap_tolerance",
    "wos.epsilon",
    "wos.max_jumps",
    "quad.radius",
    "quad.nodes",
    "quad.max_tail",
    "mixed.n_inner",
    "verify.fd_step",
    "verify.backend",
    "verify.s",
    "verify.decay_t",
    "verify.decay_tolerance",
    "output",
    "format",
];

/// Output format.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn as_str(&self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Named boundary data as configured.
#[derive(Debug, Clone)]
pub struct BoundarySpec {
    pub data: BoundaryData,
    /// Source of tabulated data.
    pub file: Option<PathBuf>,
}

/// Settings used by `verify`.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifySettings {
    pub fd_step: f64,
    pub backend: Backend,
    pub s_values: Vec<f64>,
    pub decay_t: Vec<f64>,
    pub decay_tolerance: f64,
}

/// A fully validated run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub domain: Domain,
    pub boundary: BoundarySpec,
    pub method: Method,
    pub coupling: Coupling,
    pub t_values: Vec<f64>,
    pub x_values: Vec<Point>,
    pub n: u64,
    pub seed: u64,
    pub estimator: EstimatorConfig,
    pub verify: VerifySettings,
    pub output: Option<PathBuf>,
    pub format: Format,
}

struct Reader<'a> {
    raw: &'a RawConfig,
    used: BTreeSet<&'static str>,
}

impl<'a> Reader<'a> {
    fn entry(&mut self, key: &'static str) -> Option<&'a Entry> {
        self.used.insert(key);
        self.raw.entries.get(key)
    }

    fn err(&self, key: &'static str, message: impl Into<String>) -> ConfigError {
        match self.raw.entries.get(key) {
            Some(e) => ConfigError::at(&e.origin, Some(key), message),
            None => ConfigError { origin: None, key: Some(key.into()), message: message.into() },
        }
    }

    fn parsed<T>(&mut self, key: &'static str, default: T) -> Result<T, ConfigError>
    where
        T: FromStr,
        T::Err: fmt::Display,
    {
        match self.entry(key) {
            None => Ok(default),
            Some(e) => e.value.parse().map_err(|err| ConfigError::at(&e.origin, Some(key), format!("'{}': {err}", e.value))),
        }
    }

    fn required<T>(&mut self, key: &'static str) -> Result<T, ConfigError>
    where
        T: FromStr,
        T::Err: fmt::Display,
    {
        match self.entry(key) {
            None => Err(self.err(key, "required key is missing")),
            Some(e) => e.value.parse().map_err(|err| ConfigError::at(&e.origin, Some(key), format!("'{}': {err}", e.value))),
        }
    }

    fn list(&mut self, key: &'static str, default: Vec<f64>) -> Result<Vec<f64>, ConfigError> {
        match self.entry(key) {
            None => Ok(default),
            Some(e) => parse_list(&e.value).map_err(|m| ConfigError::at(&e.origin, Some(key), m)),
        }
    }

    fn required_list(&mut self, key: &'static str) -> Result<Vec<f64>, ConfigError> {
        if self.raw.entries.contains_key(key) {
            self.list(key, Vec::new())
        } else {
            Err(self.err(key, "required key is missing"))
        }
    }

    /// Keys present in the input but not consulted for this configuration.
    fn check_unused(&self) -> Result<(), ConfigError> {
        for (k, e) in &self.raw.entries {
            if !self.used.contains(k.as_str()) {
                return Err(ConfigError::at(&e.origin, Some(k), "key does not apply to this configuration"));
            }
        }
        Ok(())
    }
}

fn parse_list(text: &str) -> Result<Vec<f64>, String> {
    let items: Result<Vec<f64>, String> = text
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|e| format!("'{}': {e}", s.trim())))
        .collect();
    let items = items?;
    if items.iter().any(|v| !v.is_finite()) {
        return Err("values must be finite".into());
    }
    Ok(items)
}

fn parse_points(text: &str) -> Result<Vec<Point>, String> {
    text.split(';')
        .map(|p| parse_list(p).and_then(|v| Point::new(v).map_err(|e| e.to_string())))
        .collect()
}

/// Shortest round-trip decimal form.
pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

fn fmt_list(v: &[f64]) -> String {
    v.iter().map(|c| fmt_f64(*c)).collect::<Vec<_>>().join(",")
}

fn domain_center(domain: &Domain) -> Point {
    let c = match domain {
        Domain::Interval { lo, hi } => vec![0.5 * (lo + hi)],
        Domain::Ball { center, .. } => center.clone(),
        Domain::Box { lo, hi } => lo.iter().zip(hi).map(|(l, h)| 0.5 * (l + h)).collect(),
    };
    Point::from_vec_unchecked(c)
}

impl RunConfig {
    /// Validates `raw`; nothing is sampled or written here.
    pub fn resolve(raw: &RawConfig) -> Result<Self, ConfigError> {
        let mut r = Reader { raw, used: BTreeSet::new() };

        let shape: String = r.parsed("domain", "interval".to_string())?;
        let domain = match shape.as_str() {
            "interval" => {
                let lo = r.parsed("domain.lo", -1.0)?;
                let hi = r.parsed("domain.hi", 1.0)?;
                Domain::interval(lo, hi).map_err(|e| r.err("domain", e.to_string()))?
            }
            "ball" => {
                let center = r.required_list("domain.center")?;
                let radius = r.parsed("domain.radius", 1.0)?;
                Domain::ball(center, radius).map_err(|e| r.err("domain", e.to_string()))?
            }
            "box" => {
                let lo = r.required_list("domain.lo")?;
                let hi = r.required_list("domain.hi")?;
                Domain::cuboid(lo, hi).map_err(|e| r.err("domain", e.to_string()))?
            }
            other => return Err(r.err("domain", format!("unknown shape '{other}' (interval, ball, box)"))),
        };
        let dim = domain.dim();

        let kind: String = r.parsed("boundary", "paper".to_string())?;
        let mut file = None;
        let data = match kind.as_str() {
            "paper" => BoundaryData::Paper,
            "exp_cos" => BoundaryData::ExpCos { a: r.required_list("boundary.a")? },
            "constant" => BoundaryData::Constant { value: r.required("boundary.value")? },
            "indicator" => BoundaryData::Indicator {
                axis: r.parsed("boundary.axis", 0)?,
                threshold: r.parsed("boundary.threshold", 0.0)?,
            },
            "tabulated" => {
                let path: PathBuf = r.required::<String>("boundary.file")?.into();
                let table = TabulatedData::from_json_file(&path).map_err(|e| r.err("boundary.file", e.to_string()))?;
                file = Some(path);
                BoundaryData::Tabulated(table)
            }
            other => {
                return Err(r.err("boundary", format!("unknown boundary '{other}' (paper, exp_cos, constant, indicator, tabulated)")))
            }
        };
        data.validate(&domain).map_err(|e| r.err("boundary", e.to_string()))?;

        let method: Method = r.parsed("method", Method::Mixed)?;
        let coupling = match r.parsed::<String>("coupling", "common".into())?.as_str() {
            "common" => Coupling::Common,
            "independent" => Coupling::Independent,
            other => return Err(r.err("coupling", format!("unknown coupling '{other}' (common, independent)"))),
        };

        let t_values = r.list("query.t", vec![0.5])?;
        if let Some(t) = t_values.iter().find(|t| **t <= 0.0) {
            return Err(r.err("query.t", format!("t must be > 0, got {t}")));
        }
        let x_values = match r.entry("query.x") {
            None => vec![domain_center(&domain)],
            Some(e) => parse_points(&e.value).map_err(|m| ConfigError::at(&e.origin, Some("query.x"), m))?,
        };
        for x in &x_values {
            if x.dim() != dim {
                return Err(r.err("query.x", format!("point {x} has dimension {}, domain has {dim}", x.dim())));
            }
            if !domain.contains(x).unwrap_or(false) {
                return Err(r.err("query.x", format!("point {x} is not inside the domain")));
            }
        }

        let n: u64 = r.parsed("n", 100_000)?;
        if n < 2 {
            return Err(r.err("n", "n must be ≥ 2"));
        }
        let seed: u64 = r.parsed("seed", 42)?;

        let mut estimator = EstimatorConfig::for_domain(&domain);
        estimator.partitions = r.parsed("partitions", default_partitions())?;
        if estimator.partitions == 0 {
            return Err(r.err("partitions", "partitions must be ≥ 1"));
        }
        estimator.em.base_step = r.parsed("em.base_step", estimator.em.base_step)?;
        estimator.em.boundary_slowdown = r.parsed("em.boundary_slowdown", estimator.em.boundary_slowdown)?;
        estimator.em.max_steps = r.parsed("em.max_steps", estimator.em.max_steps)?;
        estimator.em.snap_tolerance = r.parsed("em.snap_tolerance", estimator.em.snap_tolerance)?;
        estimator.em.validate().map_err(|e| r.err("em.base_step", e.to_string()))?;
        estimator.wos.epsilon = r.parsed("wos.epsilon", estimator.wos.epsilon)?;
        estimator.wos.max_jumps = r.parsed("wos.max_jumps", estimator.wos.max_jumps)?;
        estimator.wos.validate().map_err(|e| r.err("wos.epsilon", e.to_string()))?;
        estimator.quadrature.radius = r.parsed("quad.radius", estimator.quadrature.radius)?;
        estimator.quadrature.nodes = r.parsed("quad.nodes", estimator.quadrature.nodes)?;
        estimator.quadrature.max_tail = r.parsed("quad.max_tail", estimator.quadrature.max_tail)?;
        estimator.quadrature.validate().map_err(|e| r.err("quad.radius", e.to_string()))?;
        estimator.n_inner = r.parsed("mixed.n_inner", 1)?;
        if estimator.n_inner == 0 {
            return Err(r.err("mixed.n_inner", "n_inner must be ≥ 1"));
        }

        let fd_step: f64 = r.parsed("verify.fd_step", 0.05)?;
        if !(fd_step > 0.0 && fd_step.is_finite()) {
            return Err(r.err("verify.fd_step", "fd_step must be > 0"));
        }
        let backend: Backend = r.parsed("verify.backend", Backend::Wos)?;
        let s_values = r.list("verify.s", vec![0.0])?;
        let decay_t = r.list("verify.decay_t", vec![1.0, 4.0, 16.0, 64.0])?;
        if decay_t.iter().any(|t| *t < 1.0) || decay_t.windows(2).any(|w| w[1] <= w[0]) {
            return Err(r.err("verify.decay_t", "decay times must be ≥ 1 and strictly ascending"));
        }
        let decay_tolerance: f64 = r.parsed("verify.decay_tolerance", 0.01)?;
        if decay_tolerance.is_nan() || decay_tolerance < 0.0 {
            return Err(r.err("verify.decay_tolerance", "tolerance must be ≥ 0"));
        }

        let output = r.entry("output").map(|e| PathBuf::from(&e.value));
        let format = match r.parsed::<String>("format", "csv".into())?.as_str() {
            "csv" => Format::Csv,
            "json" => Format::Json,
            other => return Err(r.err("format", format!("unknown format '{other}' (csv, json)"))),
        };

        r.check_unused()?;
        Ok(RunConfig {
            domain,
            boundary: BoundarySpec { data, file },
            method,
            coupling,
            t_values,
            x_values,
            n,
            seed,
            estimator,
            verify: VerifySettings { fd_step, backend, s_values, decay_t, decay_tolerance },
            output,
            format,
        })
    }

    /// The resolved configuration as ordered `key = value` pairs. Feeding
    /// them back through [`RawConfig`] and [`RunConfig::resolve`] reproduces
    /// this configuration exactly. The output path is left out so that
    /// identical runs produce identical files wherever they are written.
    pub fn echo(&self) -> Vec<(String, String)> {
        let mut out: Vec<(String, String)> = Vec::new();
        let mut put = |k: &str, v: String| out.push((k.to_owned(), v));
        put("domain", self.domain.shape_name().into());
        match &self.domain {
            Domain::Interval { lo, hi } => {
                put("domain.lo", fmt_f64(*lo));
                put("domain.hi", fmt_f64(*hi));
            }
            Domain::Ball { center, radius } => {
                put("domain.center", fmt_list(center));
                put("domain.radius", fmt_f64(*radius));
            }
            Domain::Box { lo, hi } => {
                put("domain.lo", fmt_list(lo));
                put("domain.hi", fmt_list(hi));
            }
        }
        match &self.boundary.data {
            BoundaryData::Paper => put("boundary", "paper".into()),
            BoundaryData::ExpCos { a } => {
                put("boundary", "exp_cos".into());
                put("boundary.a", fmt_list(a));
            }
            BoundaryData::Constant { value } => {
                put("boundary", "constant".into());
                put("boundary.value", fmt_f64(*value));
            }
            BoundaryData::Indicator { axis, threshold } => {
                put("boundary", "indicator".into());
                put("boundary.axis", axis.to_string());
                put("boundary.threshold", fmt_f64(*threshold));
            }
            BoundaryData::Tabulated(_) => {
                put("boundary", "tabulated".into());
                let file = self.boundary.file.as_ref().map(|p| p.display().to_string()).unwrap_or_default();
                put("boundary.file", file);
            }
            other => put("boundary", other.name()),
        }
        put("method", self.method.to_string());
        put(
            "coupling",
            match self.coupling {
                Coupling::Common => "common",
                Coupling::Independent => "independent",
            }
            .into(),
        );
        put("query.t", fmt_list(&self.t_values));
        put("query.x", self.x_values.iter().map(|p| fmt_list(p)).collect::<Vec<_>>().join(";"));
        put("n", self.n.to_string());
        put("seed", self.seed.to_string());
        put("partitions", self.estimator.partitions.to_string());
        let e = &self.estimator;
        put("em.base_step", fmt_f64(e.em.base_step));
        put("em.boundary_slowdown", fmt_f64(e.em.boundary_slowdown));
        put("em.max_steps", e.em.max_steps.to_string());
        put("em.snap_tolerance", fmt_f64(e.em.snap_tolerance));
        put("wos.epsilon", fmt_f64(e.wos.epsilon));
        put("wos.max_jumps", e.wos.max_jumps.to_string());
        put("quad.radius", fmt_f64(e.quadrature.radius));
        put("quad.nodes", e.quadrature.nodes.to_string());
        put("quad.max_tail", fmt_f64(e.quadrature.max_tail));
        put("mixed.n_inner", e.n_inner.to_string());
        let v = &self.verify;
        put("verify.fd_step", fmt_f64(v.fd_step));
        put(
            "verify.backend",
            match v.backend {
                Backend::Em => "em",
                Backend::Wos => "wos",
            }
            .into(),
        );
        put("verify.s", fmt_list(&v.s_values));
        put("verify.decay_t", fmt_list(&v.decay_t));
        put("verify.decay_tolerance", fmt_f64(v.decay_tolerance));
        put("format", self.format.as_str().into());
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn resolve(text: &str) -> Result<RunConfig, ConfigError> {
        RunConfig::resolve(&RawConfig::parse_str(text)?)
    }

    #[test]
    fn defaults() {
        let c = resolve("").unwrap();
        assert_eq!(c.domain, Domain::interval(-1.0, 1.0).unwrap());
        assert_eq!(c.method, Method::Mixed);
        assert_eq!(c.x_values, vec![Point::from(0.0)]);
        assert_eq!(c.verify.fd_step, 0.05);
        assert_eq!(c.estimator.wos.epsilon, 2e-5);
    }

    #[test]
    fn n_below_two_is_rejected_with_line() {
        let e = resolve("# header\nn = 1\n").unwrap_err();
        assert_eq!(e.origin, Some(Origin::Line(2)));
        assert_eq!(e.to_string(), "line 2: n: n must be ≥ 2");
    }

    #[test]
    fn diagnostics_point_at_the_line() {
        let e = resolve("domain = ball\ndomain.center = 0,0\nquery.x = 0.9,0.9\n").unwrap_err();
        assert_eq!(e.origin, Some(Origin::Line(3)));
        let e = resolve("n = 10\nbogus = 3\n").unwrap_err();
        assert_eq!(e.to_string(), "line 2: bogus: unknown key");
        let e = resolve("n = ten\n").unwrap_err();
        assert_eq!(e.origin, Some(Origin::Line(1)));
        let e = resolve("just words\n").unwrap_err();
        assert_eq!(e.origin, Some(Origin::Line(1)));
        let e = resolve("domain.radius = 2\n").unwrap_err();
        assert!(e.message.contains("does not apply"));
        let e = resolve("query.t = 0.5,-1\n").unwrap_err();
        assert!(e.message.contains("t must be > 0"));
    }

    #[test]
    fn set_overrides_file() {
        let mut raw = RawConfig::parse_str("n = 100\n").unwrap();
        raw.set("n=200").unwrap();
        assert_eq!(RunConfig::resolve(&raw).unwrap().n, 200);
        assert!(raw.set("n").is_err());
    }

    #[test]
    fn echo_round_trips() {
        let text = "domain = ball\ndomain.center = 0,0\ndomain.radius = 1\nboundary = exp_cos\nboundary.a = 0.7071067811865476,0.7071067811865476\nquery.t = 0.25,0.5\nquery.x = 0,0; 0.1,-0.2\nn = 1000\nseed = 7\npartitions = 3\nwos.epsilon = 0.00001\nformat = json\n";
        let c = resolve(text).unwrap();
        let echo: String = c.echo().iter().map(|(k, v)| format!("{ECHO_PREFIX} {k} = {v}\n")).collect();
        let again = resolve(&format!("{echo}t,x_1,x_2,mean\n0.25,0,0,1\n")).unwrap();
        assert_eq!(again.echo(), c.echo());
        assert_eq!(again.estimator, c.estimator);
        assert_eq!(again.x_values, c.x_values);
    }

    #[test]
    fn json_config_object_is_accepted() {
        let c = resolve("n = 500\nseed = 3\n").unwrap();
        let obj: serde_json::Map<String, serde_json::Value> =
            c.echo().into_iter().map(|(k, v)| (k, serde_json::Value::String(v))).collect();
        let doc = serde_json::json!({ "schema": "wavewalk/1", "config": obj });
        let again = resolve(&doc.to_string()).unwrap();
        assert_eq!(again.echo(), c.echo());
    }
}
