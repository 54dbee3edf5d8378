//! Executable checks of the representation: closed-form oracles, the
//! finite-difference wave residual, harmonicity of the lift, and the large-`t`
//! decay of `∂_t u`.
//!
//! Every finite difference is formed sample by sample: all stencil points of
//! replicate `i` use the same [`SeedSpec`], and the reported standard errors
//! come from the per-sample differences.

use serde::{Deserialize, Serialize};

use crate::boundary::{BoundaryData, Checked};
use crate::error::{Error, Result};
use crate::estimator::{
    estimate_u, quadrature_tail_bound, Backend, EstimatorConfig, Method, QueryPoint, Replicate, TimeProbe,
};
use crate::geometry::{Domain, Point, Region};
use crate::sampling::SeedSpec;
use crate::stats::{combined_stderr, run_partitioned, z_score, Estimate, Welford};

/// Acceptance band in standard errors.
pub const Z_THRESHOLD: f64 = 3.0;

/// Finite-difference check of a second-order identity `dtt - lap ≈ 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    /// For harmonicity reports `t` holds the cylinder coordinate `s`.
    pub query: QueryPoint,
    pub dtt: Estimate,
    pub lap: Estimate,
    pub residual: Estimate,
    pub fd_step: f64,
    pub z_score: f64,
}

impl ResidualReport {
    pub fn passed(&self) -> bool {
        self.z_score.abs() < Z_THRESHOLD
    }

    fn from_accumulators(query: QueryPoint, acc: &[Welford], fd_step: f64, seed: SeedSpec) -> Self {
        let dtt = Estimate::from_welford(&acc[0], seed);
        let lap = Estimate::from_welford(&acc[1], seed);
        let mut residual = Estimate::from_welford(&acc[2], seed);
        residual.mean = dtt.mean - lap.mean;
        let z = z_score(residual.mean, residual.stderr);
        ResidualReport { query, dtt, lap, residual, fd_step, z_score: z }
    }
}

/// Closed-form solutions used as oracles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum OracleFamily {
    /// `f = e^y cos s` on a one-dimensional domain, `u = e^{x-t}`.
    Paper1d,
    /// `f = e^{⟨a,y⟩} cos(|a| s)`, `u = e^{⟨a,x⟩ - |a| t}`.
    ExpCos { a: Vec<f64> },
}

impl OracleFamily {
    pub fn validate(&self, dim: usize) -> Result<()> {
        let expected = match self {
            OracleFamily::Paper1d => 1,
            OracleFamily::ExpCos { a } => {
                if a.iter().any(|c| !c.is_finite()) {
                    return Err(Error::InvalidArgument("exp_cos coefficients must be finite".into()));
                }
                a.len()
            }
        };
        if expected != dim {
            return Err(Error::DimensionMismatch { expected, got: dim });
        }
        Ok(())
    }

    pub fn boundary_data(&self) -> BoundaryData {
        match self {
            OracleFamily::Paper1d => BoundaryData::Paper,
            OracleFamily::ExpCos { a } => BoundaryData::ExpCos { a: a.clone() },
        }
    }

    fn rate_and_exponent(&self, x: &[f64]) -> (f64, f64) {
        match self {
            OracleFamily::Paper1d => (1.0, x[0]),
            OracleFamily::ExpCos { a } => {
                (a.iter().map(|c| c * c).sum::<f64>().sqrt(), a.iter().zip(x).map(|(a, x)| a * x).sum())
            }
        }
    }

    /// `u(t, x)`.
    pub fn exact_u(&self, t: f64, x: &[f64]) -> f64 {
        let (k, e) = self.rate_and_exponent(x);
        (e - k * t).exp()
    }

    /// `∂_t u(t, x)`.
    pub fn exact_dt(&self, t: f64, x: &[f64]) -> f64 {
        let (k, _) = self.rate_and_exponent(x);
        -k * self.exact_u(t, x)
    }

    /// `∂_t² u(t, x)`, which equals `Δu`.
    pub fn exact_dtt(&self, t: f64, x: &[f64]) -> f64 {
        let (k, _) = self.rate_and_exponent(x);
        k * k * self.exact_u(t, x)
    }

    /// `v(s, x) = e^{⟨a,x⟩} cos(|a| s)`.
    pub fn exact_v(&self, s: f64, x: &[f64]) -> f64 {
        let (k, e) = self.rate_and_exponent(x);
        e.exp() * (k * s).cos()
    }
}

/// Estimated value against its closed form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub query: QueryPoint,
    pub estimated: Estimate,
    pub exact: f64,
    pub z_score: f64,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.z_score.abs() < Z_THRESHOLD
    }
}

/// Compares `û(q)` with the oracle family's closed form.
pub fn check_oracle(
    domain: &Domain,
    family: &OracleFamily,
    q: &QueryPoint,
    n: u64,
    method: Method,
    cfg: &EstimatorConfig,
    seed: SeedSpec,
) -> Result<OracleReport> {
    family.validate(domain.dim())?;
    let f = family.boundary_data();
    let estimated = estimate_u(domain, &f, q, n, method, cfg, seed)?;
    let exact = family.exact_u(q.t, &q.x);
    Ok(OracleReport { query: q.clone(), estimated, exact, z_score: estimated.z_score(exact) })
}

fn check_step(h: f64) -> Result<()> {
    if h > 0.0 && h.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("fd_step must be positive, got {h}")))
    }
}

/// Errors unless the closed ball of radius `h` around `x` lies inside `D`.
fn check_spatial_stencil(domain: &Domain, x: &Point, h: f64) -> Result<()> {
    let dist = domain.distance_to_boundary(x)?;
    if dist <= h {
        return Err(Error::InvalidArgument(format!(
            "finite-difference stencil of radius {h} leaves the domain (distance to boundary {dist})"
        )));
    }
    Ok(())
}

/// `x ± h e_i`, in the order `+e_0, -e_0, +e_1, ...`.
fn axis_neighbours(x: &Point, h: f64) -> Vec<Point> {
    let mut out = Vec::with_capacity(2 * x.dim());
    for i in 0..x.dim() {
        for sign in [1.0, -1.0] {
            let mut p = x.clone();
            p[i] += sign * h;
            out.push(p);
        }
    }
    out
}

fn check_times(domain: &Domain, f: &BoundaryData, method: Method, cfg: &EstimatorConfig, ts: &[f64]) -> Result<()> {
    for t in ts {
        if !(*t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidArgument(format!("stencil time {t} is not positive")));
        }
        if method == Method::Quadrature {
            quadrature_tail_bound(domain, f, *t, &cfg.quadrature)?;
        }
    }
    Ok(())
}

/// Central-difference residual `∂_t²û − Δû` at `q` over the `2d + 3` point
/// stencil, with one shared seed per replicate across the stencil.
#[allow(clippy::too_many_arguments)]
pub fn residual_wave(
    domain: &Domain,
    f: &BoundaryData,
    q: &QueryPoint,
    fd_step: f64,
    n: u64,
    method: Method,
    cfg: &EstimatorConfig,
    seed: SeedSpec,
) -> Result<ResidualReport> {
    cfg.validate()?;
    check_step(fd_step)?;
    let h = fd_step;
    if q.t - h <= 0.0 {
        return Err(Error::InvalidArgument(format!("t - fd_step must be positive, got t = {}, fd_step = {h}", q.t)));
    }
    check_spatial_stencil(domain, &q.x, h)?;
    check_times(domain, f, method, cfg, &[q.t - h, q.t, q.t + h])?;

    let checked = Checked::new(f, domain)?;
    let centre = TimeProbe::new(checked, method, &[q.t - h, q.t, q.t + h], cfg);
    let side = TimeProbe::new(checked, method, &[q.t], cfg);
    let neighbours = axis_neighbours(&q.x, h);
    let h2 = h * h;

    let acc = run_partitioned(n, cfg.partitions, 3, |i, out| {
        let s = seed.offset(i);
        let mut c = [0.0; 3];
        centre.eval(&Replicate::draw(domain, &q.x, centre.backend(), cfg, s)?, &mut c)?;
        let dtt = (c[2] - 2.0 * c[1] + c[0]) / h2;
        let mut lap = 0.0;
        for pair in neighbours.chunks_exact(2) {
            let mut up = [0.0];
            let mut down = [0.0];
            side.eval(&Replicate::draw(domain, &pair[0], side.backend(), cfg, s)?, &mut up)?;
            side.eval(&Replicate::draw(domain, &pair[1], side.backend(), cfg, s)?, &mut down)?;
            lap += (up[0] - 2.0 * c[1] + down[0]) / h2;
        }
        out[0] = dtt;
        out[1] = lap;
        out[2] = dtt - lap;
        Ok(())
    })?;
    Ok(ResidualReport::from_accumulators(q.clone(), &acc, h, seed))
}

/// Discrete Laplacian of `v̂` in the `d + 1` dimensional cylinder at `(s, x)`.
///
/// The report's `dtt` is `∂_s² v̂`, `lap` is `−Δ_x v̂`, so the residual is the
/// full cylinder Laplacian `∂_s² v̂ + Δ_x v̂`.
#[allow(clippy::too_many_arguments)]
pub fn check_harmonicity_v(
    domain: &Domain,
    f: &BoundaryData,
    s: f64,
    x: &Point,
    fd_step: f64,
    n: u64,
    backend: Backend,
    cfg: &EstimatorConfig,
    seed: SeedSpec,
) -> Result<ResidualReport> {
    cfg.validate()?;
    check_step(fd_step)?;
    if !s.is_finite() {
        return Err(Error::InvalidArgument(format!("s must be finite, got {s}")));
    }
    let h = fd_step;
    check_spatial_stencil(domain, x, h)?;
    let checked = Checked::new(f, domain)?;
    let neighbours = axis_neighbours(x, h);
    let h2 = h * h;

    let acc = run_partitioned(n, cfg.partitions, 3, |i, out| {
        let seed_i = seed.offset(i);
        let rep = Replicate::draw(domain, x, backend, cfg, seed_i)?;
        let centre = rep.v_value(&checked, s)?;
        let dss = (rep.v_value(&checked, s + h)? - 2.0 * centre + rep.v_value(&checked, s - h)?) / h2;
        let mut lap_x = 0.0;
        for pair in neighbours.chunks_exact(2) {
            let up = Replicate::draw(domain, &pair[0], backend, cfg, seed_i)?.v_value(&checked, s)?;
            let down = Replicate::draw(domain, &pair[1], backend, cfg, seed_i)?.v_value(&checked, s)?;
            lap_x += (up - 2.0 * centre + down) / h2;
        }
        out[0] = dss;
        out[1] = -lap_x;
        out[2] = dss + lap_x;
        Ok(())
    })?;
    Ok(ResidualReport::from_accumulators(QueryPoint::new(s, x.clone()), &acc, h, seed))
}

/// Outcome of the decay statistic on a sequence of `∂_t u` values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecayVerdict {
    /// `|d_{k+1}| ≤ |d_k| + 3 · combined stderr` for every consecutive pair.
    pub monotone: bool,
    /// `|d_last| < |d_first| + 3 · combined stderr`.
    pub endpoints: bool,
    /// `|d_last| < tolerance + 3 · stderr_last`.
    pub small_at_end: bool,
}

impl DecayVerdict {
    pub fn passed(&self) -> bool {
        self.monotone && self.endpoints && self.small_at_end
    }
}

/// Applies the decay statistic to `(value, stderr)` pairs ordered by `t`.
pub fn decay_statistic(derivatives: &[(f64, f64)], tolerance: f64) -> DecayVerdict {
    let band = |a: &(f64, f64), b: &(f64, f64)| b.0.abs() <= a.0.abs() + Z_THRESHOLD * combined_stderr(a.1, b.1);
    let monotone = derivatives.windows(2).all(|w| band(&w[0], &w[1]));
    let (first, last) = match (derivatives.first(), derivatives.last()) {
        (Some(f), Some(l)) => (f, l),
        _ => return DecayVerdict { monotone, endpoints: true, small_at_end: true },
    };
    let endpoints = derivatives.len() < 2 || band(first, last);
    let small_at_end = last.0.abs() < tolerance + Z_THRESHOLD * last.1;
    DecayVerdict { monotone, endpoints, small_at_end }
}

/// Central first differences of `û` in `t` at a fixed `x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub x: Point,
    pub t_values: Vec<f64>,
    pub derivatives: Vec<Estimate>,
    pub fd_step: f64,
    pub tolerance: f64,
    pub verdict: DecayVerdict,
}

impl DecayReport {
    pub fn passed(&self) -> bool {
        self.verdict.passed()
    }
}

/// `∂_t û(t_k, x) ≈ (û(t_k + h) − û(t_k − h)) / 2h` for ascending `t_k ≥ 1`,
/// all from the same replicates.
#[allow(clippy::too_many_arguments)]
pub fn check_large_t_decay(
    domain: &Domain,
    f: &BoundaryData,
    x: &Point,
    t_values: &[f64],
    fd_step: f64,
    tolerance: f64,
    n: u64,
    method: Method,
    cfg: &EstimatorConfig,
    seed: SeedSpec,
) -> Result<DecayReport> {
    cfg.validate()?;
    check_step(fd_step)?;
    if t_values.is_empty() || t_values.iter().any(|t| !(*t >= 1.0 && t.is_finite())) {
        return Err(Error::InvalidArgument("decay times must be finite and >= 1".into()));
    }
    if t_values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("decay times must be strictly ascending".into()));
    }
    domain.require_interior(x)?;
    let h = fd_step;
    let stencil: Vec<f64> = t_values.iter().flat_map(|t| [t - h, t + h]).collect();
    check_times(domain, f, method, cfg, &stencil)?;

    let checked = Checked::new(f, domain)?;
    let probe = TimeProbe::new(checked, method, &stencil, cfg);
    let acc = run_partitioned(n, cfg.partitions, t_values.len(), |i, out| {
        let rep = Replicate::draw(domain, x, probe.backend(), cfg, seed.offset(i))?;
        let mut vals = vec![0.0; stencil.len()];
        probe.eval(&rep, &mut vals)?;
        for (o, pair) in out.iter_mut().zip(vals.chunks_exact(2)) {
            *o = (pair[1] - pair[0]) / (2.0 * h);
        }
        Ok(())
    })?;
    let derivatives: Vec<Estimate> = acc.iter().map(|a| Estimate::from_welford(a, seed)).collect();
    let pairs: Vec<(f64, f64)> = derivatives.iter().map(|e| (e.mean, e.stderr)).collect();
    Ok(DecayReport {
        x: x.clone(),
        t_values: t_values.to_vec(),
        derivatives,
        fd_step: h,
        tolerance,
        verdict: decay_statistic(&pairs, tolerance),
    })
}

/// Probe times `π/2 + 2πk`, where `sin t = 1`.
pub fn probe_times() -> Vec<f64> {
    use std::f64::consts::{FRAC_PI_2, PI};
    [0.0, 1.0, 3.0, 10.0].iter().map(|k| FRAC_PI_2 + 2.0 * PI * k).collect()
}

/// The decay statistic applied to the analytic solution `cos x cos t`, which
/// solves the wave equation but is not of the representable form, next to the
/// Monte Carlo statistic for the paper data on the same grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub x: f64,
    pub t_values: Vec<f64>,
    /// `∂_t (cos x cos t) = −cos x sin t`.
    pub analytic: Vec<f64>,
    pub analytic_verdict: DecayVerdict,
    pub representable: DecayReport,
}

impl ProbeReport {
    /// The counterexample fails the statistic while the representable data pass.
    pub fn passed(&self) -> bool {
        !self.analytic_verdict.passed() && self.representable.passed()
    }
}

/// Runs the non-representability probe on `(-1, 1)` at the point `x`.
///
/// The analytic part uses exact derivatives (stderr 0); the Monte Carlo part
/// runs [`check_large_t_decay`] for `f = e^y cos s` at `x`, or at `0` when
/// `x` is outside the interval.
#[allow(clippy::too_many_arguments)]
pub fn check_nonrepresentable_probe(
    x: f64,
    fd_step: f64,
    tolerance: f64,
    n: u64,
    method: Method,
    cfg: &EstimatorConfig,
    seed: SeedSpec,
) -> Result<ProbeReport> {
    let domain = Domain::interval(-1.0, 1.0)?;
    if !x.is_finite() {
        return Err(Error::InvalidArgument(format!("x must be finite, got {x}")));
    }
    let t_values = probe_times();
    let analytic: Vec<f64> = t_values.iter().map(|t| -x.cos() * t.sin()).collect();
    let pairs: Vec<(f64, f64)> = analytic.iter().map(|d| (*d, 0.0)).collect();
    let analytic_verdict = decay_statistic(&pairs, tolerance);
    let mc_x = Point::from(if x.abs() < 1.0 { x } else { 0.0 });
    let representable =
        check_large_t_decay(&domain, &BoundaryData::Paper, &mc_x, &t_values, fd_step, tolerance, n, method, cfg, seed)?;
    Ok(ProbeReport { x, t_values, analytic, analytic_verdict, representable })
}

/// Bias of the central second difference in `t` against the exact `∂_t² u`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiasProfile {
    pub query: QueryPoint,
    pub steps: Vec<f64>,
    pub dtt: Vec<Estimate>,
    pub exact: f64,
    /// `|dtt.mean − exact|` per step.
    pub bias: Vec<f64>,
    /// Least-squares slope of `log bias` against `log h`.
    pub slope: f64,
}

impl BiasProfile {
    /// Every bias exceeds three standard errors of its estimate.
    pub fn resolved(&self) -> bool {
        self.bias.iter().zip(&self.dtt).all(|(b, e)| *b > Z_THRESHOLD * e.stderr)
    }
}

/// Least-squares slope of `ys` on `xs`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Estimates `∂_t² û` at `q` for each step in `steps` from one set of
/// replicates and fits the log-log slope of the bias.
#[allow(clippy::too_many_arguments)]
pub fn fd_bias_profile(
    domain: &Domain,
    family: &OracleFamily,
    q: &QueryPoint,
    steps: &[f64],
    n: u64,
    method: Method,
    cfg: &EstimatorConfig,
    seed: SeedSpec,
) -> Result<BiasProfile> {
    cfg.validate()?;
    family.validate(domain.dim())?;
    domain.require_interior(&q.x)?;
    if steps.len() < 2 {
        return Err(Error::InvalidArgument("need at least two finite-difference steps".into()));
    }
    for h in steps {
        check_step(*h)?;
    }
    let f = family.boundary_data();
    let mut times = vec![q.t];
    times.extend(steps.iter().flat_map(|h| [q.t - h, q.t + h]));
    check_times(domain, &f, method, cfg, &times)?;

    let checked = Checked::new(&f, domain)?;
    let probe = TimeProbe::new(checked, method, &times, cfg);
    let acc = run_partitioned(n, cfg.partitions, steps.len(), |i, out| {
        let rep = Replicate::draw(domain, &q.x, probe.backend(), cfg, seed.offset(i))?;
        let mut vals = vec![0.0; times.len()];
        probe.eval(&rep, &mut vals)?;
        for (k, (o, h)) in out.iter_mut().zip(steps).enumerate() {
            *o = (vals[1 + 2 * k] - 2.0 * vals[0] + vals[2 + 2 * k]) / (h * h);
        }
        Ok(())
    })?;
    let dtt: Vec<Estimate> = acc.iter().map(|a| Estimate::from_welford(a, seed)).collect();
    let exact = family.exact_dtt(q.t, &q.x);
    let bias: Vec<f64> = dtt.iter().map(|e| (e.mean - exact).abs()).collect();
    let log_h: Vec<f64> = steps.iter().map(|h| h.ln()).collect();
    let log_b: Vec<f64> = bias.iter().map(|b| b.ln()).collect();
    let slope = fit_slope(&log_h, &log_b);
    Ok(BiasProfile { query: q.clone(), steps: steps.to_vec(), dtt, exact, bias, slope })
}

/// Result of a check run under the single-retry policy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Retried<R> {
    pub first: R,
    /// Present when the first attempt failed; run with [`SeedSpec::retry`].
    pub retry: Option<R>,
}

impl<R> Retried<R> {
    /// The attempt that decides the outcome.
    pub fn last(&self) -> &R {
        self.retry.as_ref().unwrap_or(&self.first)
    }
}

/// Runs `check` with `seed`; on failure runs it once more with `seed.retry()`.
/// Two consecutive failures fail.
pub fn with_retry<R, C, P>(seed: SeedSpec, check: C, passed: P) -> Result<(Retried<R>, bool)>
where
    C: Fn(SeedSpec) -> Result<R>,
    P: Fn(&R) -> bool,
{
    let first = check(seed)?;
    if passed(&first) {
        return Ok((Retried { first, retry: None }, true));
    }
    let second = check(seed.retry())?;
    let ok = passed(&second);
    Ok((Retried { first, retry: Some(second) }, ok))
}
