//! Monte Carlo estimators of the wave solution `u(t, x)` and its harmonic
//! lift `v(s, x)`.
//!
//! With `X` standard Cauchy, `Z` standard normal and `(τ, B_τ)` the Brownian
//! exit data from `x`,
//!
//! ```text
//! u(t, x) = E f(tX + √τ Z, B_τ)                      (direct)
//! v(s, x) = E f(s + √τ Z, B_τ) = E_{(s,x)} f(V_σ)    (EM or cylinder walk)
//! u(t, x) = E v(tX, x)                               (mixed)
//!         = ∫ t v(y, x) / (π (t² + y²)) dy           (quadrature)
//! ```
//!
//! Every replicate draws, in this order, one Cauchy variate, one normal
//! variate and then its exit data from a single [`RngStream`]. Replicate `i`
//! uses `seed.offset(i)`, so two estimates with the same [`SeedSpec`] see the
//! same random inputs (common random numbers), whichever query they target.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::boundary::{BoundaryData, Checked};
use crate::error::{Error, Result};
use crate::exit::{em_exit_into, wos_displacement, EmConfig, WosConfig};
use crate::geometry::{Domain, Point};
use crate::sampling::{sample_standard_cauchy, sample_standard_normal, RngStream, SeedSpec};
use crate::stats::{default_partitions, run_partitioned, Estimate, Welford};

/// How `u` is estimated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Direct,
    Mixed,
    Quadrature,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Direct => "direct",
            Method::Mixed => "mixed",
            Method::Quadrature => "quadrature",
        }
    }

    fn backend(&self) -> Backend {
        match self {
            Method::Direct => Backend::Em,
            Method::Mixed | Method::Quadrature => Backend::Wos,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(Method::Direct),
            "mixed" => Ok(Method::Mixed),
            "quadrature" => Ok(Method::Quadrature),
            _ => Err(Error::InvalidArgument(format!("unknown method '{s}' (direct, mixed, quadrature)"))),
        }
    }
}

/// Exit sampler used for `v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Em,
    Wos,
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "em" => Ok(Backend::Em),
            "wos" => Ok(Backend::Wos),
            _ => Err(Error::InvalidArgument(format!("unknown backend '{s}' (em, wos)"))),
        }
    }
}

/// Trapezoid rule on `[-radius, radius]` for the Poisson-kernel integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub radius: f64,
    pub nodes: usize,
    /// Largest acceptable truncation bound `sup|f| · (1 - (2/π) atan(R/t))`.
    pub max_tail: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { radius: 50.0, nodes: 400, max_tail: 0.1 }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.radius > 0.0 && self.radius.is_finite() && self.nodes >= 2 && self.max_tail >= 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("bad quadrature specification {self:?}")))
        }
    }

    pub fn node_positions(&self) -> Vec<f64> {
        let step = 2.0 * self.radius / (self.nodes - 1) as f64;
        (0..self.nodes).map(|k| -self.radius + k as f64 * step).collect()
    }

    /// Trapezoid weight times the Cauchy–Poisson kernel `t / (π (t² + y²))`,
    /// rescaled so the weights sum to the exact kernel mass on `[-R, R]`.
    /// Constants are then integrated exactly up to the tail.
    pub fn kernel_weights(&self, t: f64) -> Vec<f64> {
        let step = 2.0 * self.radius / (self.nodes - 1) as f64;
        let last = self.nodes - 1;
        let mut w: Vec<f64> = self
            .node_positions()
            .iter()
            .enumerate()
            .map(|(k, y)| {
                let w = if k == 0 || k == last { 0.5 * step } else { step };
                w * t / (PI * (t * t + y * y))
            })
            .collect();
        let scale = (1.0 - self.tail_mass(t)) / w.iter().sum::<f64>();
        w.iter_mut().for_each(|w| *w *= scale);
        w
    }

    /// Kernel mass outside `[-R, R]`.
    pub fn tail_mass(&self, t: f64) -> f64 {
        1.0 - (2.0 / PI) * (self.radius / t).atan()
    }
}

/// Sampler settings shared by all estimators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    pub em: EmConfig,
    pub wos: WosConfig,
    pub quadrature: QuadratureSpec,
    /// Cylinder walks per Cauchy draw in the mixed and quadrature estimators.
    pub n_inner: u64,
    /// Fixed partition count; results are bitwise reproducible for a given value.
    pub partitions: usize,
}

impl EstimatorConfig {
    pub fn for_domain(domain: &Domain) -> Self {
        EstimatorConfig {
            em: EmConfig::for_domain(domain),
            wos: WosConfig::for_domain(domain),
            quadrature: QuadratureSpec::default(),
            n_inner: 1,
            partitions: default_partitions(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.em.validate()?;
        self.wos.validate()?;
        self.quadrature.validate()?;
        if self.n_inner == 0 {
            return Err(Error::InvalidArgument("n_inner must be >= 1".into()));
        }
        Ok(())
    }
}

/// A space-time query `(t, x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryPoint {
    pub t: f64,
    pub x: Point,
}

impl QueryPoint {
    pub fn new(t: f64, x: Point) -> Self {
        QueryPoint { t, x }
    }
}

/// Quadrature result with its truncation bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureEstimate {
    pub estimate: Estimate,
    pub tail_bound: f64,
}

enum ExitDraw {
    Em { tau: f64, point: Vec<f64> },
    /// `(Δs, y)` per cylinder walk started at `(0, x)`.
    Walks(Vec<(f64, Vec<f64>)>),
}

/// The random inputs of one replicate at one spatial point.
pub(crate) struct Replicate {
    cauchy: f64,
    normal: f64,
    exit: ExitDraw,
}

impl Replicate {
    pub(crate) fn draw(
        domain: &Domain,
        x: &[f64],
        backend: Backend,
        cfg: &EstimatorConfig,
        seed: SeedSpec,
    ) -> Result<Self> {
        let mut stream = RngStream::new(seed);
        let cauchy = sample_standard_cauchy(&mut stream);
        let normal = sample_standard_normal(&mut stream);
        let exit = match backend {
            Backend::Em => {
                let mut point = vec![0.0; x.len()];
                let tau = em_exit_into(domain, x, &cfg.em, &mut stream, &mut point)?;
                ExitDraw::Em { tau, point }
            }
            Backend::Wos => {
                let walks = (0..cfg.n_inner)
                    .map(|_| {
                        let mut y = vec![0.0; x.len()];
                        let ds = wos_displacement(domain, x, &cfg.wos, &mut stream, &mut y)?;
                        Ok((ds, y))
                    })
                    .collect::<Result<Vec<_>>>()?;
                ExitDraw::Walks(walks)
            }
        };
        Ok(Replicate { cauchy, normal, exit })
    }

    pub(crate) fn cauchy(&self) -> f64 {
        self.cauchy
    }

    /// One sample of `v(s, x)`.
    #[inline]
    pub(crate) fn v_value(&self, f: &Checked, s: f64) -> Result<f64> {
        match &self.exit {
            ExitDraw::Em { tau, point } => f.eval(s + tau.sqrt() * self.normal, point),
            ExitDraw::Walks(walks) => {
                let mut sum = 0.0;
                for (ds, y) in walks {
                    sum += f.eval(s + ds, y)?;
                }
                Ok(sum / walks.len() as f64)
            }
        }
    }
}

/// Evaluates the `u`-samples of a replicate at a fixed list of times.
pub(crate) struct TimeProbe<'a> {
    f: Checked<'a>,
    method: Method,
    ts: Vec<f64>,
    nodes: Vec<f64>,
    kernel: Vec<Vec<f64>>,
}

impl<'a> TimeProbe<'a> {
    pub(crate) fn new(f: Checked<'a>, method: Method, ts: &[f64], cfg: &EstimatorConfig) -> Self {
        let (nodes, kernel) = if method == Method::Quadrature {
            (cfg.quadrature.node_positions(), ts.iter().map(|t| cfg.quadrature.kernel_weights(*t)).collect())
        } else {
            (Vec::new(), Vec::new())
        };
        TimeProbe { f, method, ts: ts.to_vec(), nodes, kernel }
    }

    pub(crate) fn backend(&self) -> Backend {
        self.method.backend()
    }

    pub(crate) fn eval(&self, rep: &Replicate, out: &mut [f64]) -> Result<()> {
        match self.method {
            Method::Direct | Method::Mixed => {
                for (o, t) in out.iter_mut().zip(&self.ts) {
                    *o = rep.v_value(&self.f, t * rep.cauchy())?;
                }
            }
            Method::Quadrature => {
                let vals = self.nodes.iter().map(|y| rep.v_value(&self.f, *y)).collect::<Result<Vec<_>>>()?;
                for (o, w) in out.iter_mut().zip(&self.kernel) {
                    *o = w.iter().zip(&vals).map(|(w, v)| w * v).sum();
                }
            }
        }
        Ok(())
    }
}

fn check_query(domain: &Domain, q: &QueryPoint) -> Result<()> {
    if !(q.t > 0.0 && q.t.is_finite()) {
        return Err(Error::InvalidArgument(format!("t must be positive and finite, got {}", q.t)));
    }
    domain.require_interior(&q.x)
}

/// Runs `n` replicates at `x`, returning one accumulator per probe time.
pub(crate) fn probe_times(
    domain: &Domain,
    probe: &TimeProbe,
    x: &Point,
    n: u64,
    cfg: &EstimatorConfig,
    seed: SeedSpec,
) -> Result<Vec<Welford>> {
    run_partitioned(n, cfg.partitions, probe.ts.len(), |i, out| {
        let rep = Replicate::draw(domain, x, probe.backend(), cfg, seed.offset(i))?;
        probe.eval(&rep, out)
    })
}

fn estimate_u_with(
    domain: &Domain,
    f: &BoundaryData,
    q: &QueryPoint,
    n: u64,
    method: Method,
    cfg: &EstimatorConfig,
    seed: SeedSpec,
) -> Result<Estimate> {
    cfg.validate()?;
    check_query(domain, q)?;
    let checked = Checked::new(f, domain)?;
    let probe = TimeProbe::new(checked, method, &[q.t], cfg);
    let acc = probe_times(domain, &probe, &q.x, n, cfg, seed)?;
    let mut est = Estimate::from_welford(&acc[0], seed);
    if method != Method::Direct {
        est.n = n * cfg.n_inner;
    }
    Ok(est)
}

/// `u(t, x) = E_x f(tX + √τ Z, B_τ)` with `(τ, B_τ)` from the EM sampler.
pub fn estimate_u_direct(
    domain: &Domain,
    f: &BoundaryData,
    q: &QueryPoint,
    n: u64,
    cfg: &EstimatorConfig,
    seed: SeedSpec,
) -> Result<Estimate> {
    estimate_u_with(domain, f, q, n, Method::Direct, cfg, seed)
}

/// `u(t, x) = E v(tX, x)`: a cylinder walk from `(tX, x)` per Cauchy draw.
///
/// `n_inner` walks share each Cauchy draw. The mean is over all
/// `n_outer · n_inner` evaluations; the standard error is computed from the
/// `n_outer` per-draw averages, which are the independent units.
pub fn estimate_u_mixed(
    domain: &Domain,
    f: &BoundaryData,
    q: &QueryPoint,
    n_outer: u64,
    n_inner: u64,
    cfg: &EstimatorConfig,
    seed: SeedSpec,
) -> Result<Estimate> {
    let cfg = EstimatorConfig { n_inner, ..*cfg };
    estimate_u_with(domain, f, q, n_outer, Method::Mixed, &cfg, seed)
}

/// Poisson-kernel quadrature `Σ_k w_k K_t(y_k) v̂(y_k, x)`.
///
/// Each replicate runs one cylinder walk from `(0, x)`; its translate serves
/// every node, which is exactly the common-random-numbers walk from
/// `(y_k, x)`. Errors if the truncation bound exceeds `max_tail`.
pub fn estimate_u_quadrature(
    domain: &Domain,
    f: &BoundaryData,
    q: &QueryPoint,
    n: u64,
    cfg: &EstimatorConfig,
    seed: SeedSpec,
) -> Result<QuadratureEstimate> {
    cfg.validate()?;
    check_query(domain, q)?;
    let tail_bound = quadrature_tail_bound(domain, f, q.t, &cfg.quadrature)?;
    let estimate = estimate_u_with(domain, f, q, n, Method::Quadrature, cfg, seed)?;
    Ok(QuadratureEstimate { estimate, tail_bound })
}

/// Truncation bound of the quadrature at time `t`, or an error when it
/// exceeds the spec's tolerance.
pub fn quadrature_tail_bound(domain: &Domain, f: &BoundaryData, t: f64, spec: &QuadratureSpec) -> Result<f64> {
    let bound = f.bound(domain) * spec.tail_mass(t);
    if bound > spec.max_tail {
        return Err(Error::TailTooLarge { bound, tolerance: spec.max_tail });
    }
    Ok(bound)
}

/// Dispatches to the estimator selected by `method`.
pub fn estimate_u(
    domain: &Domain,
    f: &BoundaryData,
    q: &QueryPoint,
    n: u64,
    method: Method,
    cfg: &EstimatorConfig,
    seed: SeedSpec,
) -> Result<Estimate> {
    match method {
        Method::Quadrature => estimate_u_quadrature(domain, f, q, n, cfg, seed).map(|r| r.estimate),
        _ => estimate_u_with(domain, f, q, n, method, cfg, seed),
    }
}

/// Harmonic lift `v(s, x)`; any real `s` is allowed.
#[allow(clippy::too_many_arguments)]
pub fn estimate_v(
    domain: &Domain,
    f: &BoundaryData,
    s: f64,
    x: &Point,
    n: u64,
    backend: Backend,
    cfg: &EstimatorConfig,
    seed: SeedSpec,
) -> Result<Estimate> {
    cfg.validate()?;
    if !s.is_finite() {
        return Err(Error::InvalidArgument(format!("s must be finite, got {s}")));
    }
    domain.require_interior(x)?;
    let checked = Checked::new(f, domain)?;
    let acc = run_partitioned(n, cfg.partitions, 1, |i, out| {
        let rep = Replicate::draw(domain, x, backend, cfg, seed.offset(i))?;
        out[0] = rep.v_value(&checked, s)?;
        Ok(())
    })?;
    let mut est = Estimate::from_welford(&acc[0], seed);
    if backend == Backend::Wos {
        est.n = n * cfg.n_inner;
    }
    Ok(est)
}

/// Seed assignment across grid points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Coupling {
    /// Every point uses the caller's stream: common random numbers.
    #[default]
    Common,
    /// Point `j` (row-major over t, then x) uses stream `stream_id + j`.
    Independent,
}

/// One row of a grid evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct GridRow {
    pub query: QueryPoint,
    pub method: Method,
    pub result: Result<Estimate>,
}

/// Evaluates `u` on `t_values × x_values`, rows ordered by `t` then `x`.
///
/// Errors are reported per row; the run continues.
#[allow(clippy::too_many_arguments)]
pub fn evaluate_grid(
    domain: &Domain,
    f: &BoundaryData,
    t_values: &[f64],
    x_values: &[Point],
    n: u64,
    method: Method,
    coupling: Coupling,
    cfg: &EstimatorConfig,
    seed: SeedSpec,
) -> Vec<GridRow> {
    let mut cells: Vec<Vec<Option<Result<Estimate>>>> = vec![vec![None; x_values.len()]; t_values.len()];

    if coupling == Coupling::Common {
        // Under common random numbers the replicates at x do not depend on t,
        // so all times are read off the same replicates.
        for (j, x) in x_values.iter().enumerate() {
            if let Ok(ests) = estimate_u_times(domain, f, t_values, x, n, method, cfg, seed) {
                for (k, e) in ests.into_iter().enumerate() {
                    cells[k][j] = Some(Ok(e));
                }
            }
        }
    }

    let mut rows = Vec::with_capacity(t_values.len() * x_values.len());
    for (k, t) in t_values.iter().enumerate() {
        for (j, x) in x_values.iter().enumerate() {
            let q = QueryPoint::new(*t, x.clone());
            let result = match cells[k][j].take() {
                Some(r) => r,
                None => {
                    let point_seed = match coupling {
                        Coupling::Common => seed,
                        Coupling::Independent => {
                            seed.with_stream(seed.stream_id.wrapping_add((k * x_values.len() + j) as u64))
                        }
                    };
                    estimate_u(domain, f, &q, n, method, cfg, point_seed)
                }
            };
            rows.push(GridRow { query: q, method, result });
        }
    }
    rows
}

/// `u` at several times and one point from the same replicates. Each entry is
/// bitwise equal to the single-time estimate with the same seed.
#[allow(clippy::too_many_arguments)]
pub fn estimate_u_times(
    domain: &Domain,
    f: &BoundaryData,
    t_values: &[f64],
    x: &Point,
    n: u64,
    method: Method,
    cfg: &EstimatorConfig,
    seed: SeedSpec,
) -> Result<Vec<Estimate>> {
    cfg.validate()?;
    for t in t_values {
        check_query(domain, &QueryPoint::new(*t, x.clone()))?;
        if method == Method::Quadrature {
            quadrature_tail_bound(domain, f, *t, &cfg.quadrature)?;
        }
    }
    let checked = Checked::new(f, domain)?;
    let probe = TimeProbe::new(checked, method, t_values, cfg);
    let acc = probe_times(domain, &probe, x, n, cfg, seed)?;
    Ok(acc
        .iter()
        .map(|a| {
            let mut e = Estimate::from_welford(a, seed);
            if method != Method::Direct {
                e.n = n * cfg.n_inner;
            }
            e
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> (Domain, EstimatorConfig) {
        let d = Domain::interval(-1.0, 1.0).unwrap();
        let mut cfg = EstimatorConfig::for_domain(&d);
        cfg.em.base_step = 1e-2;
        cfg.partitions = 3;
        (d, cfg)
    }

    #[test]
    fn constant_data_is_exact() {
        let (d, cfg) = setup();
        let f = BoundaryData::Constant { value: 7.0 };
        let q = QueryPoint::new(0.8, Point::from(0.1));
        for method in [Method::Direct, Method::Mixed] {
            let e = estimate_u(&d, &f, &q, 200, method, &cfg, SeedSpec::from_base(1)).unwrap();
            assert_eq!(e.mean, 7.0);
            assert_eq!(e.stderr, 0.0);
        }
        for backend in [Backend::Em, Backend::Wos] {
            let e = estimate_v(&d, &f, -3.0, &q.x, 200, backend, &cfg, SeedSpec::from_base(1)).unwrap();
            assert_eq!((e.mean, e.stderr), (7.0, 0.0));
        }
    }

    #[test]
    fn quadrature_of_constant_is_kernel_mass() {
        let (d, cfg) = setup();
        let f = BoundaryData::Constant { value: 3.0 };
        let q = QueryPoint::new(0.5, Point::from(0.0));
        let r = estimate_u_quadrature(&d, &f, &q, 50, &cfg, SeedSpec::from_base(2)).unwrap();
        assert_eq!(r.estimate.stderr, 0.0);
        assert!((r.estimate.mean - 3.0).abs() <= r.tail_bound * (1.0 + 1e-9));
        let mass: f64 = cfg.quadrature.kernel_weights(0.5).iter().sum();
        assert!((r.estimate.mean - 3.0 * mass).abs() < 1e-12);
        assert!((mass - (1.0 - cfg.quadrature.tail_mass(0.5))).abs() < 1e-14);
    }

    #[test]
    fn quadrature_tail_error() {
        let (d, mut cfg) = setup();
        cfg.quadrature.radius = 1.0;
        let q = QueryPoint::new(1.0, Point::from(0.0));
        let r = estimate_u_quadrature(&d, &BoundaryData::Paper, &q, 10, &cfg, SeedSpec::from_base(0));
        assert!(matches!(r, Err(Error::TailTooLarge { .. })));
    }

    #[test]
    fn preconditions() {
        let (d, cfg) = setup();
        let f = BoundaryData::Paper;
        let s = SeedSpec::from_base(0);
        assert!(estimate_u_direct(&d, &f, &QueryPoint::new(0.0, Point::from(0.0)), 10, &cfg, s).is_err());
        assert!(estimate_u_direct(&d, &f, &QueryPoint::new(1.0, Point::from(1.0)), 10, &cfg, s).is_err());
        assert!(estimate_u_direct(&d, &f, &QueryPoint::new(1.0, Point::from(0.0)), 1, &cfg, s).is_err());
    }

    #[test]
    fn grid_reports_errors_per_row() {
        let (d, cfg) = setup();
        let xs = vec![Point::from(0.0), Point::from(2.0)];
        let rows = evaluate_grid(&d, &BoundaryData::Paper, &[0.5], &xs, 50, Method::Mixed, Coupling::Common, &cfg, SeedSpec::from_base(0));
        assert_eq!(rows.len(), 2);
        assert!(rows[0].result.is_ok());
        assert!(matches!(rows[1].result, Err(Error::NotInterior(_))));
    }

    #[test]
    fn one_point_grid_matches_single_estimate() {
        let (d, cfg) = setup();
        let seed = SeedSpec::new(11, 2, 5);
        for method in [Method::Direct, Method::Mixed, Method::Quadrature] {
            let q = QueryPoint::new(0.7, Point::from(-0.2));
            let single = estimate_u(&d, &BoundaryData::Paper, &q, 300, method, &cfg, seed).unwrap();
            let rows = evaluate_grid(&d, &BoundaryData::Paper, &[0.7], std::slice::from_ref(&q.x), 300, method, Coupling::Common, &cfg, seed);
            assert_eq!(rows[0].result.as_ref().unwrap(), &single);
        }
    }

    #[test]
    fn multi_time_estimates_match_single_time() {
        let (d, cfg) = setup();
        let seed = SeedSpec::from_base(3);
        let x = Point::from(0.4);
        let ts = [0.25, 1.0, 2.0];
        let many = estimate_u_times(&d, &BoundaryData::Paper, &ts, &x, 200, Method::Quadrature, &cfg, seed).unwrap();
        for (t, e) in ts.iter().zip(&many) {
            let one = estimate_u(&d, &BoundaryData::Paper, &QueryPoint::new(*t, x.clone()), 200, Method::Quadrature, &cfg, seed).unwrap();
            assert_eq!(&one, e);
        }
    }

    #[test]
    fn mixed_inner_walks_count() {
        let (d, cfg) = setup();
        let e = estimate_u_mixed(&d, &BoundaryData::Paper, &QueryPoint::new(1.0, Point::from(0.0)), 100, 4, &cfg, SeedSpec::from_base(0)).unwrap();
        assert_eq!(e.n, 400);
    }
}
