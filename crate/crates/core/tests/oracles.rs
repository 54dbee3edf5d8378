//! Independent numerical checks of the closed forms the other tests rely on.

use std::f64::consts::PI;

use wavewalk::estimator::{estimate_v, Backend, EstimatorConfig};
use wavewalk::sampling::{sample_standard_cauchy, sample_standard_normal, sample_uniform_sphere, RngStream};
use wavewalk::verify::OracleFamily;
use wavewalk::{BoundaryData, Domain, Point, SeedSpec};

/// Solves `g'' = k² g` on `(-1, 1)` with `g(±1) = e^{±k}` by second-order
/// finite differences and the Thomas algorithm; returns `(x_i, g_i)`.
fn bvp_profile(k: f64, cells: usize) -> (Vec<f64>, Vec<f64>) {
    let h = 2.0 / cells as f64;
    let m = cells - 1;
    let x: Vec<f64> = (1..cells).map(|i| -1.0 + i as f64 * h).collect();
    let diag = -2.0 - k * k * h * h;
    let mut rhs = vec![0.0; m];
    rhs[0] -= (-k).exp();
    rhs[m - 1] -= k.exp();
    let mut c = vec![0.0; m];
    let mut d = vec![0.0; m];
    c[0] = 1.0 / diag;
    d[0] = rhs[0] / diag;
    for i in 1..m {
        let denom = diag - c[i - 1];
        c[i] = 1.0 / denom;
        d[i] = (rhs[i] - d[i - 1]) / denom;
    }
    let mut g = vec![0.0; m];
    g[m - 1] = d[m - 1];
    for i in (0..m - 1).rev() {
        g[i] = d[i] - c[i] * g[i + 1];
    }
    (x, g)
}

fn profile_at(x: &[f64], g: &[f64], at: f64) -> f64 {
    let i = x.iter().position(|v| (v - at).abs() < 1e-9).expect("grid node");
    g[i]
}

/// `∫ K_t(y) cos(k y) dy` by the substitution `y = t tan θ` and composite Simpson.
fn poisson_cos(t: f64, k: f64, panels: usize) -> f64 {
    let a = -PI / 2.0;
    let h = PI / panels as f64;
    let g = |th: f64| (k * t * th.tan()).cos();
    let mut s = 0.0;
    for i in 1..panels {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * g(a + i as f64 * h);
    }
    // Endpoint values oscillate without limit; their weight is zero in the limit.
    s * h / 3.0 / PI
}

#[test]
fn lifted_paper_data_is_exp_x_cos_s() {
    // v(s, x) = g(x) cos s with g'' = g, g(±1) = e^{±1}.
    let (x, g) = bvp_profile(1.0, 2000);
    let g0 = profile_at(&x, &g, 0.0);
    assert!((g0 - 1.0).abs() < 1e-5, "g(0) = {g0}");
    assert!((profile_at(&x, &g, 0.5) - 0.5f64.exp()).abs() < 1e-5);
    // The value (e + 1/e)/2 · e^{-1/2} is not the lift at the origin.
    let other = 0.5 * (1f64.exp() + (-1f64).exp()) * (-0.5f64).exp();
    assert!((g0 - other).abs() > 0.05);
}

#[test]
fn exp_cos_oracle_by_numerical_integration_in_one_dimension() {
    for &(a, t, x0) in &[(1.0, 0.5, 0.0), (0.7, 1.3, 0.5), (-1.5, 0.25, -0.4), (2.0, 2.0, 0.2)] {
        let k: f64 = f64::abs(a);
        let (x, g) = bvp_profile(k, 2000);
        // g(x) = e^{a x} when a > 0, and the mirror image otherwise.
        let gx = if a > 0.0 { profile_at(&x, &g, x0) } else { profile_at(&x, &g, -x0) };
        let u = gx * poisson_cos(t, k, 2_000_000);
        let fam = OracleFamily::ExpCos { a: vec![a] };
        let exact = fam.exact_u(t, &[x0]);
        assert!((u - exact).abs() < 2e-4 * exact.max(1.0), "a={a} t={t} x={x0}: {u} vs {exact}");
    }
}

#[test]
fn paper_lift_estimates_match_the_bvp() {
    let d = Domain::interval(-1.0, 1.0).unwrap();
    let mut cfg = EstimatorConfig::for_domain(&d);
    cfg.em.base_step = 1e-3;
    let (x, g) = bvp_profile(1.0, 2000);
    let exact = profile_at(&x, &g, 0.0);
    for backend in [Backend::Wos, Backend::Em] {
        let n = if backend == Backend::Em { 100_000 } else { 400_000 };
        let e = estimate_v(&d, &BoundaryData::Paper, 0.0, &Point::from(0.0), n, backend, &cfg, SeedSpec::from_base(11)).unwrap();
        assert!(e.z_score(exact).abs() < 4.0, "{backend:?}: {e:?} vs {exact}");
    }
}

/// Kolmogorov–Smirnov statistic of `xs` against `cdf`.
fn ks(mut xs: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, x)| {
            let c = cdf(*x);
            (c - i as f64 / n).abs().max((c - (i + 1) as f64 / n).abs())
        })
        .fold(0.0, f64::max)
}

// Critical value at level 0.001: 1.95 / sqrt(n).
const KS_CRIT: f64 = 1.95;

fn erf(x: f64) -> f64 {
    // Abramowitz–Stegun 7.1.26 is too coarse for KS at large n; use a series
    // and continued fraction instead.
    if x.abs() < 2.5 {
        let mut sum = x;
        let mut term = x;
        for k in 1..200 {
            term *= -x * x / k as f64;
            let add = term / (2 * k + 1) as f64;
            sum += add;
            if add.abs() < 1e-17 {
                break;
            }
        }
        2.0 / PI.sqrt() * sum
    } else {
        let z = x.abs();
        let mut f = 0.0;
        for k in (1..60).rev() {
            f = (k as f64 / 2.0) / (z + f);
        }
        let erfc = (-z * z).exp() / PI.sqrt() / (z + f);
        x.signum() * (1.0 - erfc)
    }
}

#[test]
fn normal_and_cauchy_pass_ks() {
    let n = 200_000;
    let mut s = RngStream::new(SeedSpec::new(3, 1, 0));
    let normals: Vec<f64> = (0..n).map(|_| sample_standard_normal(&mut s)).collect();
    let d = ks(normals, |x| 0.5 * (1.0 + erf(x / 2f64.sqrt())));
    assert!(d < KS_CRIT / (n as f64).sqrt(), "normal KS {d}");
    let cauchy: Vec<f64> = (0..n).map(|_| sample_standard_cauchy(&mut s)).collect();
    let d = ks(cauchy, |x| 0.5 + x.atan() / PI);
    assert!(d < KS_CRIT / (n as f64).sqrt(), "Cauchy KS {d}");
}

#[test]
fn sphere_coordinate_is_uniform_in_three_dimensions() {
    // Archimedes: one coordinate of a uniform point on S² is uniform on [-1, 1].
    let n = 100_000;
    let mut s = RngStream::new(SeedSpec::new(4, 0, 0));
    let zs: Vec<f64> = (0..n).map(|_| sample_uniform_sphere(&mut s, 3)[2]).collect();
    let d = ks(zs, |z| (z + 1.0) / 2.0);
    assert!(d < KS_CRIT / (n as f64).sqrt(), "sphere KS {d}");
}

#[test]
fn neighbouring_streams_are_uncorrelated() {
    let n = 100_000u64;
    for (a, b) in [
        (SeedSpec::new(1, 0, 0), SeedSpec::new(1, 1, 0)),
        (SeedSpec::new(1, 0, 0), SeedSpec::new(2, 0, 0)),
    ] {
        let mut sum = 0.0;
        for i in 0..n {
            let x = sample_standard_normal(&mut RngStream::new(a.offset(i)));
            let y = sample_standard_normal(&mut RngStream::new(b.offset(i)));
            sum += x * y;
        }
        // Under independence the sample correlation has sd 1/sqrt(n).
        let r = sum / n as f64;
        assert!(r.abs() < 4.0 / (n as f64).sqrt(), "{a:?} {b:?}: {r}");
    }
    let mut sum = 0.0;
    for i in 0..n {
        let x = sample_standard_normal(&mut RngStream::new(SeedSpec::new(9, 0, i)));
        let y = sample_standard_normal(&mut RngStream::new(SeedSpec::new(9, 0, i + 1)));
        sum += x * y;
    }
    assert!((sum / n as f64).abs() < 4.0 / (n as f64).sqrt());
}
