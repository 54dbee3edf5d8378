//! `eval`, `verify` and `reproduce-paper`.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{json, Value};

use super::config::{fmt_f64, Format, RunConfig};
use super::output::{config_object, grid_csv, grid_json, json_text, write_atomic, SCHEMA};
use super::{CliError, Suite};
use crate::boundary::BoundaryData;
use crate::error::Error;
use crate::estimator::{evaluate_grid, Coupling, EstimatorConfig, Method, QueryPoint};
use crate::geometry::{Domain, Point, Region};
use crate::sampling::SeedSpec;
use crate::verify::{
    check_harmonicity_v, check_large_t_decay, check_oracle, residual_wave, with_retry, OracleFamily, Retried,
};

/// Sorts library errors into exit-code classes.
pub fn classify(e: Error) -> CliError {
    match e {
        Error::Truncated { .. } | Error::BoundViolation { .. } => CliError::Runtime(e.to_string()),
        _ => CliError::Validation(e.to_string()),
    }
}

fn emit(cfg: &RunConfig, text: &str) -> Result<(), CliError> {
    match &cfg.output {
        Some(path) => write_atomic(path, text.as_bytes())
            .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Evaluates `u` on the configured grid and writes one row per query point.
///
/// Rows whose sampler failed carry the error in the `error` column; the file
/// is still written and the exit status is the runtime-error code.
pub fn cmd_eval(cfg: &RunConfig) -> Result<(), CliError> {
    let seed = SeedSpec::from_base(cfg.seed);
    if cfg.method == Method::Quadrature {
        for t in &cfg.t_values {
            crate::estimator::quadrature_tail_bound(&cfg.domain, &cfg.boundary.data, *t, &cfg.estimator.quadrature)
                .map_err(classify)?;
        }
    }
    let rows = evaluate_grid(
        &cfg.domain,
        &cfg.boundary.data,
        &cfg.t_values,
        &cfg.x_values,
        cfg.n,
        cfg.method,
        cfg.coupling,
        &cfg.estimator,
        seed,
    );
    let echo = cfg.echo();
    let text = match cfg.format {
        Format::Csv => grid_csv(&echo, cfg.domain.dim(), &rows),
        Format::Json => json_text(&grid_json(&echo, seed, &rows)),
    };
    emit(cfg, &text)?;
    let failed: Vec<String> = rows.iter().filter_map(|r| r.result.as_ref().err().map(|e| e.to_string())).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Runtime(format!("{} of {} rows failed: {}", failed.len(), rows.len(), failed[0])))
    }
}

/// One executed check.
struct CheckOutcome {
    kind: &'static str,
    label: String,
    statistic: String,
    passed: bool,
    attempts: Value,
}

fn record<R: Serialize>(kind: &'static str, label: String, run: (Retried<R>, bool), stat: impl Fn(&R) -> String) -> CheckOutcome {
    let (retried, passed) = run;
    let statistic = stat(retried.last());
    let mut attempts = vec![serde_json::to_value(&retried.first).unwrap_or(Value::Null)];
    if let Some(r) = &retried.retry {
        attempts.push(serde_json::to_value(r).unwrap_or(Value::Null));
    }
    CheckOutcome { kind, label, statistic, passed, attempts: Value::Array(attempts) }
}

fn fmt_point(p: &Point) -> String {
    format!("({})", p.iter().map(|c| fmt_f64(*c)).collect::<Vec<_>>().join(","))
}

fn oracle_family(f: &BoundaryData, domain: &Domain) -> Option<OracleFamily> {
    match f {
        BoundaryData::Paper if domain.dim() == 1 => Some(OracleFamily::Paper1d),
        BoundaryData::ExpCos { a } => Some(OracleFamily::ExpCos { a: a.clone() }),
        _ => None,
    }
}

fn stencil_clear(domain: &Domain, x: &Point, h: f64, what: &str) -> Result<(), CliError> {
    let dist = domain.distance_to_boundary(x).map_err(classify)?;
    if dist <= h {
        return Err(CliError::Validation(format!(
            "{what}: stencil of radius {h} around {} leaves the domain",
            fmt_point(x)
        )));
    }
    Ok(())
}

/// Runs the selected verification suite.
pub fn cmd_verify(cfg: &RunConfig, suite: Suite) -> Result<(), CliError> {
    let domain = &cfg.domain;
    let f = &cfg.boundary.data;
    let est: &EstimatorConfig = &cfg.estimator;
    let v = &cfg.verify;
    let h = v.fd_step;
    let seed = SeedSpec::from_base(cfg.seed);
    let wants = |s: Suite| suite == Suite::All || suite == s;

    let family = oracle_family(f, domain);
    if suite == Suite::Oracle && family.is_none() {
        return Err(CliError::Validation(
            "oracle suite needs boundary = exp_cos, or boundary = paper on a one-dimensional domain".into(),
        ));
    }
    // All preconditions are checked before any sampling starts.
    if wants(Suite::Residual) {
        for t in &cfg.t_values {
            if *t <= h {
                return Err(CliError::Validation(format!("residual: t = {t} must exceed verify.fd_step = {h}")));
            }
        }
        for x in &cfg.x_values {
            stencil_clear(domain, x, h, "residual")?;
        }
    }
    if wants(Suite::Harmonicity) {
        for x in &cfg.x_values {
            stencil_clear(domain, x, h, "harmonicity")?;
        }
    }

    let mut checks: Vec<CheckOutcome> = Vec::new();
    if let (true, Some(family)) = (wants(Suite::Oracle), &family) {
        for t in &cfg.t_values {
            for x in &cfg.x_values {
                let q = QueryPoint::new(*t, x.clone());
                let run = with_retry(seed, |s| check_oracle(domain, family, &q, cfg.n, cfg.method, est, s), |r| r.passed())
                    .map_err(classify)?;
                checks.push(record("oracle", format!("t={t} x={}", fmt_point(x)), run, |r| format!("z={:.3}", r.z_score)));
            }
        }
    }
    if wants(Suite::Residual) {
        for t in &cfg.t_values {
            for x in &cfg.x_values {
                let q = QueryPoint::new(*t, x.clone());
                let run = with_retry(seed, |s| residual_wave(domain, f, &q, h, cfg.n, cfg.method, est, s), |r| r.passed())
                    .map_err(classify)?;
                checks.push(record("residual", format!("t={t} x={}", fmt_point(x)), run, |r| format!("z={:.3}", r.z_score)));
            }
        }
    }
    if wants(Suite::Harmonicity) {
        for s_val in &v.s_values {
            for x in &cfg.x_values {
                let run = with_retry(
                    seed,
                    |s| check_harmonicity_v(domain, f, *s_val, x, h, cfg.n, v.backend, est, s),
                    |r| r.passed(),
                )
                .map_err(classify)?;
                checks.push(record("harmonicity", format!("s={s_val} x={}", fmt_point(x)), run, |r| {
                    format!("z={:.3}", r.z_score)
                }));
            }
        }
    }
    if wants(Suite::Decay) {
        for x in &cfg.x_values {
            let run = with_retry(
                seed,
                |s| check_large_t_decay(domain, f, x, &v.decay_t, h, v.decay_tolerance, cfg.n, cfg.method, est, s),
                |r| r.passed(),
            )
            .map_err(classify)?;
            checks.push(record("decay", format!("x={}", fmt_point(x)), run, |r| {
                let last = r.derivatives.last().map(|e| e.mean).unwrap_or(0.0);
                format!("|du/dt(t_max)|={:.2e}", last.abs())
            }));
        }
    }

    let all_passed = checks.iter().all(|c| c.passed);
    let mut table = String::new();
    let _ = writeln!(table, "{:<12} {:<28} {:<24} {:>8} result", "check", "query", "statistic", "attempts");
    for c in &checks {
        let attempts = c.attempts.as_array().map(|a| a.len()).unwrap_or(1);
        let verdict = if c.passed { "pass" } else { "FAIL" };
        let _ = writeln!(table, "{:<12} {:<28} {:<24} {:>8} {verdict}", c.kind, c.label, c.statistic, attempts);
    }
    let _ = writeln!(table, "{} checks, {}", checks.len(), if all_passed { "all passed" } else { "FAILED" });
    print!("{table}");

    let report = json!({
        "schema": SCHEMA,
        "command": "verify",
        "suite": suite.as_str(),
        "config": config_object(&cfg.echo()),
        "seed": seed,
        "retry_seed": seed.retry(),
        "passed": all_passed,
        "checks": checks.iter().map(|c| json!({
            "check": c.kind,
            "query": c.label,
            "statistic": c.statistic,
            "passed": c.passed,
            "attempts": c.attempts,
        })).collect::<Vec<_>>(),
    });
    if let Some(path) = &cfg.output {
        write_atomic(path, json_text(&report).as_bytes())
            .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))?;
    }
    if all_passed {
        Ok(())
    } else {
        Err(CliError::Verification(format!("{} of {} checks failed", checks.iter().filter(|c| !c.passed).count(), checks.len())))
    }
}

/// The worked example on its canonical grid.
pub const PAPER_T: [f64; 4] = [0.25, 0.5, 1.0, 2.0];
pub const PAPER_X: [f64; 3] = [-0.5, 0.0, 0.5];

/// One row of the reproduction table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PaperRow {
    pub t: f64,
    pub x: f64,
    pub mean: f64,
    pub stderr: f64,
    pub exact: f64,
    pub z: f64,
}

/// Estimates `u` for `f = e^y cos s` on `(-1, 1)` over the canonical grid.
pub fn reproduce_paper_rows(
    seed: u64,
    n: u64,
    method: Method,
    partitions: usize,
) -> Result<Vec<PaperRow>, CliError> {
    let domain = Domain::interval(-1.0, 1.0).map_err(classify)?;
    let mut cfg = EstimatorConfig::for_domain(&domain);
    cfg.partitions = partitions;
    if method == Method::Quadrature {
        // Node spacing must resolve the narrowest kernel, at t = 0.25.
        cfg.quadrature.nodes = 801;
    }
    let xs: Vec<Point> = PAPER_X.iter().map(|x| Point::from(*x)).collect();
    let rows = evaluate_grid(
        &domain,
        &BoundaryData::Paper,
        &PAPER_T,
        &xs,
        n,
        method,
        Coupling::Common,
        &cfg,
        SeedSpec::from_base(seed),
    );
    rows.into_iter()
        .map(|row| {
            let e = row.result.map_err(classify)?;
            let (t, x) = (row.query.t, row.query.x[0]);
            let exact = (x - t).exp();
            Ok(PaperRow { t, x, mean: e.mean, stderr: e.stderr, exact, z: e.z_score(exact) })
        })
        .collect()
}

pub fn paper_table(rows: &[PaperRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:>6} {:>6} {:>12} {:>10} {:>12} {:>8}", "t", "x", "estimate", "stderr", "exact", "z");
    for r in rows {
        let _ = writeln!(
            out,
            "{:>6} {:>6} {:>12.6} {:>10.2e} {:>12.6} {:>8.3}",
            fmt_f64(r.t),
            fmt_f64(r.x),
            r.mean,
            r.stderr,
            r.exact,
            r.z
        );
    }
    out
}

/// Prints the reproduction table; fails with the verification code if any
/// `|z| ≥ 3`.
pub fn cmd_reproduce_paper(
    seed: u64,
    n: u64,
    method: Method,
    partitions: usize,
    output: Option<&std::path::Path>,
) -> Result<(), CliError> {
    if n < 2 {
        return Err(CliError::Validation("n must be ≥ 2".into()));
    }
    let rows = reproduce_paper_rows(seed, n, method, partitions)?;
    let table = paper_table(&rows);
    print!("{table}");
    if let Some(path) = output {
        let doc = json!({
            "schema": SCHEMA,
            "command": "reproduce-paper",
            "seed": SeedSpec::from_base(seed),
            "n": n,
            "method": method.as_str(),
            "partitions": partitions,
            "rows": rows,
        });
        write_atomic(path, json_text(&doc).as_bytes())
            .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))?;
    }
    let bad = rows.iter().filter(|r| r.z.abs() >= 3.0).count();
    if bad == 0 {
        Ok(())
    } else {
        Err(CliError::Verification(format!("{bad} of {} rows outside 3 standard errors", rows.len())))
    }
}
