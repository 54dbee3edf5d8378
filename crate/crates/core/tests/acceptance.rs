//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Statistical criteria use three-standard-error bands. Each may be rerun
//! once with `SeedSpec::retry`; two consecutive failures fail the criterion.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use wavewalk::boundary::TabulatedData;
use wavewalk::cli::commands::reproduce_paper_rows;
use wavewalk::estimator::{estimate_u_times, Backend, EstimatorConfig, Method, QuadratureSpec, QueryPoint};
use wavewalk::exit::{em_exit_into, EmConfig};
use wavewalk::sampling::{sample_standard_cauchy, RngStream};
use wavewalk::stats::{combined_stderr, run_partitioned, Estimate};
use wavewalk::verify::{
    check_harmonicity_v, check_large_t_decay, check_nonrepresentable_probe, fd_bias_profile, residual_wave, with_retry,
    OracleFamily,
};
use wavewalk::{BoundaryData, Domain, Point, Result, SeedSpec};

const Z: f64 = 3.0;
const N: u64 = 1_000_000;
const PARTITIONS: usize = 8;
const FD_STEP: f64 = 0.05;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn interval() -> Domain {
    Domain::interval(-1.0, 1.0).unwrap()
}

fn config(domain: &Domain) -> EstimatorConfig {
    let mut cfg = EstimatorConfig::for_domain(domain);
    cfg.partitions = PARTITIONS;
    cfg
}

fn pt(c: &[f64]) -> Point {
    Point::new(c.to_vec()).unwrap()
}

/// Runs `attempt` with `seed` and, on failure, once with `seed.retry()`.
fn retried(seed: SeedSpec, attempt: impl Fn(SeedSpec) -> Result<Outcome>) -> Outcome {
    match with_retry(seed, &attempt, |o| o.passed) {
        Ok((run, passed)) => match run.retry {
            None => run.first,
            Some(second) => outcome(passed, format!("{}; retry: {}", run.first.detail, second.detail)),
        },
        Err(e) => outcome(false, format!("error: {e}")),
    }
}

// 1 ---------------------------------------------------------------------------

fn paper_example() -> Outcome {
    let start = Instant::now();
    let rows = match reproduce_paper_rows(42, N, Method::Mixed, PARTITIONS) {
        Ok(r) => r,
        Err(e) => return outcome(false, format!("{e}")),
    };
    let secs = start.elapsed().as_secs_f64();
    let worst_z = rows.iter().map(|r| r.z.abs()).fold(0.0, f64::max);
    let worst_se = rows.iter().map(|r| r.stderr).fold(0.0, f64::max);
    let passed = rows.len() == 12 && worst_z < Z && worst_se <= 2e-3 && secs <= 300.0;
    outcome(passed, format!("12 points, max |z| = {worst_z:.2}, max stderr = {worst_se:.2e}, {secs:.1} s"))
}

// 2, 7 and 10 share Euler-Maruyama runs ---------------------------------------

/// Per path: τ, e^{B_τ − τ/2}, 1{B_τ = 1}.
fn em_interval_run(x: f64, base_step: f64, n: u64, seed: SeedSpec) -> Result<Vec<Estimate>> {
    let d = interval();
    let em = EmConfig { base_step, ..EmConfig::for_domain(&d) };
    let acc = run_partitioned(n, PARTITIONS, 3, |i, out| {
        let mut stream = RngStream::new(seed.offset(i));
        let mut b = [0.0];
        let tau = em_exit_into(&d, &[x], &em, &mut stream, &mut b)?;
        out[0] = tau;
        out[1] = (b[0] - tau / 2.0).exp();
        out[2] = if b[0] > 0.0 { 1.0 } else { 0.0 };
        Ok(())
    })?;
    Ok(acc.iter().map(|a| Estimate::from_welford(a, seed)).collect())
}

struct EmRuns {
    /// Keyed by start point at h₀ = 1e-4.
    fine: Vec<(f64, Vec<Estimate>)>,
    seed: SeedSpec,
}

fn em_runs(seed: SeedSpec) -> Result<EmRuns> {
    let mut fine = Vec::new();
    for x in [-0.5, 0.0, 0.5] {
        fine.push((x, em_interval_run(x, 1e-4, N, seed)?));
    }
    Ok(EmRuns { fine, seed })
}

fn martingale_from(runs: &EmRuns) -> Outcome {
    let mut parts = Vec::new();
    let mut passed = true;
    for (x, est) in &runs.fine {
        let z = est[1].z_score(x.exp());
        passed &= z.abs() < Z;
        parts.push(format!("x={x}: z={z:.2}"));
    }
    outcome(passed, parts.join(", "))
}

fn martingale() -> (Outcome, Option<EmRuns>) {
    let seed = SeedSpec::from_base(2);
    let first = match em_runs(seed) {
        Ok(r) => r,
        Err(e) => return (outcome(false, format!("error: {e}")), None),
    };
    let o = martingale_from(&first);
    if o.passed {
        return (o, Some(first));
    }
    match em_runs(seed.retry()) {
        Ok(second) => {
            let r = martingale_from(&second);
            (outcome(r.passed, format!("{}; retry: {}", o.detail, r.detail)), Some(second))
        }
        Err(e) => (outcome(false, format!("{}; retry error: {e}", o.detail)), Some(first)),
    }
}

fn ball_exit_time(dim: usize, seed: SeedSpec) -> Result<Estimate> {
    let d = Domain::unit_ball(dim)?;
    let em = EmConfig { base_step: 1e-4, ..EmConfig::for_domain(&d) };
    let acc = run_partitioned(200_000, PARTITIONS, 1, |i, out| {
        let mut stream = RngStream::new(seed.offset(i));
        let mut b = vec![0.0; dim];
        out[0] = em_exit_into(&d, &vec![0.0; dim], &em, &mut stream, &mut b)?;
        Ok(())
    })?;
    Ok(Estimate::from_welford(&acc[0], seed))
}

fn exit_oracles(runs: Option<&EmRuns>) -> Outcome {
    let Some(runs) = runs else { return outcome(false, "no interval runs") };
    let at = |x: f64| &runs.fine.iter().find(|(y, _)| *y == x).unwrap().1;
    let tau0 = at(0.0)[0];
    let p = at(0.5)[2];
    let mut parts = vec![format!("E τ(0) z={:.2}", tau0.z_score(1.0)), format!("P(+1 | 0.5) z={:.2}", p.z_score(0.75))];
    let mut passed = tau0.z_score(1.0).abs() < Z && p.z_score(0.75).abs() < Z;
    for dim in [2usize, 3] {
        let o = retried(runs.seed.with_stream(dim as u64), |s| {
            let e = ball_exit_time(dim, s)?;
            let z = e.z_score(1.0 / dim as f64);
            Ok(outcome(z.abs() < Z, format!("E τ ball d={dim} z={z:.2}")))
        });
        passed &= o.passed;
        parts.push(o.detail);
    }
    outcome(passed, parts.join(", "))
}

// 3 ---------------------------------------------------------------------------

fn cauchy_cf() -> Outcome {
    retried(SeedSpec::from_base(3), |seed| {
        let ts = [0.5, 1.0, 2.0];
        let acc = run_partitioned(N, PARTITIONS, 2 * ts.len(), |i, out| {
            let x = sample_standard_cauchy(&mut RngStream::new(seed.offset(i)));
            for (k, t) in ts.iter().enumerate() {
                out[2 * k] = (t * x).cos();
                out[2 * k + 1] = (t * x).sin();
            }
            Ok(())
        })?;
        let mut passed = true;
        let mut parts = Vec::new();
        for (k, t) in ts.iter().enumerate() {
            let re = Estimate::from_welford(&acc[2 * k], seed).z_score((-t).exp());
            let im = Estimate::from_welford(&acc[2 * k + 1], seed).z_score(0.0);
            passed &= re.abs() < Z && im.abs() < Z;
            parts.push(format!("t={t}: z_re={re:.2} z_im={im:.2}"));
        }
        Ok(outcome(passed, parts.join(", ")))
    })
}

// 4 ---------------------------------------------------------------------------

/// Piecewise-linear table, `0.5 sin s` on the left end and `cos(s/2)` on the right.
fn tabulated_data() -> BoundaryData {
    let s: Vec<f64> = (0..=1600).map(|k| -40.0 + 0.05 * k as f64).collect();
    let left = s.iter().map(|v| 0.5 * v.sin()).collect();
    let right = s.iter().map(|v| (0.5 * v).cos()).collect();
    BoundaryData::Tabulated(TabulatedData { bound: 1.0, s, points: vec![vec![-1.0], vec![1.0]], values: vec![left, right] })
}

fn residuals(label: &str, domain: &Domain, f: &BoundaryData, points: &[QueryPoint], seed: SeedSpec) -> Outcome {
    let cfg = config(domain);
    let mut passed = true;
    let mut worst: f64 = 0.0;
    let mut retries = 0;
    for (k, q) in points.iter().enumerate() {
        let run = with_retry(seed.with_stream(k as u64), |s| residual_wave(domain, f, q, FD_STEP, N, Method::Mixed, &cfg, s), |r| {
            r.passed()
        });
        match run {
            Ok((r, ok)) => {
                passed &= ok;
                retries += usize::from(r.retry.is_some());
                worst = worst.max(r.last().z_score.abs());
            }
            Err(e) => return outcome(false, format!("{label}: error {e}")),
        }
    }
    outcome(passed, format!("{label}: max |z| = {worst:.2} ({retries} retried)"))
}

fn wave_residual() -> Outcome {
    let seed = SeedSpec::from_base(4);
    let d1 = interval();
    let one_d: Vec<QueryPoint> = [(0.5, 0.0), (1.0, 0.3), (0.25, -0.5), (2.0, 0.5), (0.75, -0.2)]
        .iter()
        .map(|(t, x)| QueryPoint::new(*t, Point::from(*x)))
        .collect();
    let ball2 = Domain::unit_ball(2).unwrap();
    let two_d: Vec<QueryPoint> = [(0.5, [0.0, 0.0]), (1.0, [0.3, -0.2]), (0.25, [-0.5, 0.4]), (2.0, [0.6, 0.1]), (0.75, [0.0, -0.7])]
        .iter()
        .map(|(t, x)| QueryPoint::new(*t, pt(x)))
        .collect();
    let ball3 = Domain::unit_ball(3).unwrap();
    let three_d: Vec<QueryPoint> = [
        (0.5, [0.0, 0.0, 0.0]),
        (1.0, [0.3, -0.2, 0.1]),
        (0.25, [-0.5, 0.4, 0.0]),
        (2.0, [0.1, 0.1, 0.6]),
        (0.75, [0.0, -0.7, 0.2]),
    ]
    .iter()
    .map(|(t, x)| QueryPoint::new(*t, pt(x)))
    .collect();
    let runs = [
        residuals("paper d=1", &d1, &BoundaryData::Paper, &one_d, seed.with_stream(100)),
        residuals("exp_cos d=2", &ball2, &BoundaryData::ExpCos { a: vec![0.6, 0.8] }, &two_d, seed.with_stream(200)),
        residuals("exp_cos d=3", &ball3, &BoundaryData::ExpCos { a: vec![0.48, 0.6, 0.64] }, &three_d, seed.with_stream(300)),
        residuals("tabulated d=1", &d1, &tabulated_data(), &one_d, seed.with_stream(400)),
    ];
    outcome(runs.iter().all(|o| o.passed), runs.iter().map(|o| o.detail.as_str()).collect::<Vec<_>>().join("; "))
}

// 5 ---------------------------------------------------------------------------

fn harmonicity() -> Outcome {
    let d = interval();
    let cfg = config(&d);
    let points = [(0.0, 0.0), (1.0, 0.5), (-2.0, -0.5), (0.5, 0.8), (3.0, -0.2)];
    let mut passed = true;
    let mut worst: f64 = 0.0;
    for (k, (s, x)) in points.iter().enumerate() {
        let seed = SeedSpec::new(5, k as u64, 0);
        let run = with_retry(
            seed,
            |sd| check_harmonicity_v(&d, &BoundaryData::Paper, *s, &Point::from(*x), FD_STEP, N, Backend::Wos, &cfg, sd),
            |r| r.passed(),
        );
        match run {
            Ok((r, ok)) => {
                passed &= ok;
                worst = worst.max(r.last().z_score.abs());
            }
            Err(e) => return outcome(false, format!("error: {e}")),
        }
    }
    outcome(passed, format!("5 cylinder points, max |z| = {worst:.2}"))
}

// 6 ---------------------------------------------------------------------------

const PAPER_T: [f64; 4] = [0.25, 0.5, 1.0, 2.0];
const PAPER_X: [f64; 3] = [-0.5, 0.0, 0.5];

fn representations(seed: SeedSpec) -> Result<Outcome> {
    let d = interval();
    let f = BoundaryData::Paper;
    let mut cfg = config(&d);
    cfg.quadrature = QuadratureSpec { nodes: 801, ..QuadratureSpec::default() };
    let tails: Vec<f64> = PAPER_T.iter().map(|t| f.bound(&d) * cfg.quadrature.tail_mass(*t)).collect();
    let mut worst: f64 = 0.0;
    let mut passed = true;
    for x in PAPER_X {
        let x = Point::from(x);
        let direct = estimate_u_times(&d, &f, &PAPER_T, &x, 200_000, Method::Direct, &cfg, seed)?;
        let mixed = estimate_u_times(&d, &f, &PAPER_T, &x, N, Method::Mixed, &cfg, seed)?;
        let quad = estimate_u_times(&d, &f, &PAPER_T, &x, 200_000, Method::Quadrature, &cfg, seed)?;
        for k in 0..PAPER_T.len() {
            for (a, b, tail) in [(direct[k], mixed[k], 0.0), (direct[k], quad[k], tails[k]), (mixed[k], quad[k], tails[k])] {
                let gap = (a.mean - b.mean).abs();
                let allowed = Z * combined_stderr(a.stderr, b.stderr) + tail;
                passed &= gap <= allowed;
                worst = worst.max(gap / allowed);
            }
        }
    }
    Ok(outcome(passed, format!("36 pairs, max gap / allowance = {worst:.2}")))
}

fn representation_equivalence() -> Outcome {
    retried(SeedSpec::from_base(6), representations)
}

// 8 ---------------------------------------------------------------------------

fn decay() -> Outcome {
    let d = interval();
    let cfg = config(&d);
    let ts = [1.0, 4.0, 16.0, 64.0];
    let mc = retried(SeedSpec::from_base(8), |s| {
        let r = check_large_t_decay(&d, &BoundaryData::Paper, &Point::from(0.0), &ts, FD_STEP, 0.01, N, Method::Mixed, &cfg, s)?;
        let mags: Vec<String> = r.derivatives.iter().map(|e| format!("{:.1e}±{:.0e}", e.mean.abs(), e.stderr)).collect();
        Ok(outcome(r.passed(), format!("|∂_t û| = [{}]", mags.join(", "))))
    });
    let probe = retried(SeedSpec::from_base(8).with_stream(1), |s| {
        let r = check_nonrepresentable_probe(0.0, FD_STEP, 0.01, N, Method::Mixed, &cfg, s)?;
        Ok(outcome(r.passed(), format!("cos x cos t violates the statistic: {}", !r.analytic_verdict.passed())))
    });
    outcome(mc.passed && probe.passed, format!("{}; {}", mc.detail, probe.detail))
}

// 9 ---------------------------------------------------------------------------

fn scratch() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("wavewalk-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn cli(args: &[&str]) -> std::io::Result<bool> {
    Command::new(env!("CARGO_BIN_EXE_wavewalk")).args(args).output().map(|o| o.status.success())
}

fn run_to(out: &Path, threads: &str, format: &str) -> std::io::Result<Vec<u8>> {
    let o = format!("output={}", out.display());
    let fmt = format!("format={format}");
    let args = [
        "eval", "--threads", threads, "--set", "n=20000", "--set", "partitions=6", "--set", "query.t=0.25,0.5,1,2",
        "--set", "query.x=-0.5;0;0.5", "--set", &fmt, "--set", &o,
    ];
    if !cli(&args)? {
        return Err(std::io::Error::other("eval failed"));
    }
    std::fs::read(out)
}

fn determinism() -> Outcome {
    let dir = scratch();
    let mut passed = true;
    let mut parts = Vec::new();
    for format in ["csv", "json"] {
        let runs: std::io::Result<Vec<Vec<u8>>> = [("a", "1"), ("b", "1"), ("c", "4")]
            .iter()
            .map(|(name, threads)| run_to(&dir.join(format!("{name}.{format}")), threads, format))
            .collect();
        match runs {
            Ok(r) => {
                let same = r[0] == r[1] && r[0] == r[2];
                passed &= same;
                parts.push(format!("{format}: {}", if same { "identical" } else { "differ" }));
            }
            Err(e) => {
                passed = false;
                parts.push(format!("{format}: {e}"));
            }
        }
    }
    let _ = std::fs::remove_dir_all(&dir);
    outcome(passed, format!("2 runs + 4 threads vs 1: {}", parts.join(", ")))
}

// 10 --------------------------------------------------------------------------

fn bias_decay(runs: Option<&EmRuns>) -> Outcome {
    let Some(runs) = runs else { return outcome(false, "no interval runs") };
    let fine = runs.fine.iter().find(|(x, _)| *x == 0.0).unwrap().1[0];
    let mut taus = Vec::new();
    for h in [1e-2, 1e-3] {
        match em_interval_run(0.0, h, N, runs.seed.with_stream(10)) {
            Ok(e) => taus.push(e[0]),
            Err(e) => return outcome(false, format!("error: {e}")),
        }
    }
    taus.push(fine);
    let bias: Vec<f64> = taus.iter().map(|e| (e.mean - 1.0).abs()).collect();
    let monotone = taus
        .windows(2)
        .zip(bias.windows(2))
        .all(|(e, b)| b[1] <= b[0] + Z * combined_stderr(e[0].stderr, e[1].stderr));
    let em_detail = format!(
        "EM |E τ − 1| at h₀ = 1e-2, 1e-3, 1e-4: {:.1e}, {:.1e}, {:.1e} (stderr {:.0e})",
        bias[0], bias[1], bias[2], taus[2].stderr
    );

    // Oracle point next to the boundary, where the lift is nearly deterministic
    // and the finite-difference bias dominates the noise.
    let d = interval();
    let mut cfg = config(&d);
    cfg.wos.epsilon = 1e-7;
    cfg.quadrature = QuadratureSpec { radius: 25.0, nodes: 201, ..QuadratureSpec::default() };
    let q = QueryPoint::new(1.0, Point::from(0.999));
    let fd = retried(SeedSpec::from_base(10), |s| {
        let p = fd_bias_profile(&d, &OracleFamily::Paper1d, &q, &[0.2, 0.1, 0.05], 2_000_000, Method::Quadrature, &cfg, s)?;
        let ok = p.slope >= 1.8 && p.resolved();
        Ok(outcome(ok, format!("FD bias slope {:.3} (resolved: {})", p.slope, p.resolved())))
    });
    outcome(monotone && fd.passed, format!("{em_detail}; {}", fd.detail))
}

fn report(k: usize, name: &str, o: &Outcome, secs: f64) {
    let verdict = if o.passed { "PASS" } else { "FAIL" };
    println!("criterion {k:>2} {verdict} {name} [{secs:.0} s]: {}", o.detail);
}

fn main() {
    let mut results = Vec::new();
    let mut timed = |k: usize, name: &str, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let o = f();
        report(k, name, &o, start.elapsed().as_secs_f64());
        results.push((k, o.passed));
    };
    let mut em: Option<EmRuns> = None;
    timed(1, "paper example reproduction", &mut paper_example);
    timed(2, "martingale identity", &mut || {
        let (o, runs) = martingale();
        em = runs;
        o
    });
    timed(3, "Cauchy characteristic function", &mut cauchy_cf);
    timed(4, "wave-equation residual", &mut wave_residual);
    timed(5, "cylinder harmonicity", &mut harmonicity);
    timed(6, "representation equivalence", &mut representation_equivalence);
    timed(7, "exit-sampler oracles", &mut || exit_oracles(em.as_ref()));
    timed(8, "large-t decay", &mut decay);
    timed(9, "determinism", &mut determinism);
    timed(10, "bias decay", &mut || bias_decay(em.as_ref()));
    results.sort_by_key(|r| r.0);
    let failed: Vec<usize> = results.iter().filter(|r| !r.1).map(|r| r.0).collect();
    println!("acceptance: {} of {} criteria passed", results.len() - failed.len(), results.len());
    if !failed.is_empty() {
        println!("failed: {failed:?}");
        std::process::exit(1);
    }
}
