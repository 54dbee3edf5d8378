//! Brownian exit samplers.
//!
//! * [`em_exit_sample`] simulates the path with Gaussian increments and
//!   returns the joint pair `(τ, B_τ)`.
//! * [`wos_exit_sample`] runs walk-on-spheres in the cylinder `R × D` and
//!   returns the exit point `(s, y)` directly. It never produces `τ`.
//!
//! The cylinder walk's jump radius depends only on the spatial coordinate,
//! so walks started at `(s, x)` and `(s', x)` from the same stream are exact
//! translates of each other in `s`. [`wos_displacement`] exposes the walk
//! started at `s = 0`; estimators add the start time afterwards, which keeps
//! that translation property bitwise.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{CylinderPoint, Point, Region};
use crate::sampling::{fill_uniform_sphere, sample_standard_normal, RngStream, SeedSpec};
use crate::stats::{run_scalar, Estimate};

/// Euler–Maruyama step control.
///
/// The step is `h = min(base_step, boundary_slowdown · dist²)`; the walk stops
/// at the first state outside `D`, or once it is within `snap_tolerance` of
/// the boundary, and the exit point is the boundary projection of that state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmConfig {
    pub base_step: f64,
    pub boundary_slowdown: f64,
    pub max_steps: u64,
    pub snap_tolerance: f64,
}

impl Default for EmConfig {
    fn default() -> Self {
        EmConfig { base_step: 1e-3, boundary_slowdown: 0.1, max_steps: 10_000_000, snap_tolerance: 1e-6 }
    }
}

impl EmConfig {
    /// Defaults with the snap tolerance scaled to the domain diameter.
    pub fn for_domain<D: Region + ?Sized>(domain: &D) -> Self {
        EmConfig { snap_tolerance: 1e-6 * domain.diameter(), ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.base_step > 0.0
            && self.base_step.is_finite()
            && self.boundary_slowdown > 0.0
            && self.boundary_slowdown.is_finite()
            && self.max_steps > 0
            && self.snap_tolerance >= 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("bad EM configuration {self:?}")))
        }
    }
}

/// Walk-on-spheres termination control.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WosConfig {
    pub epsilon: f64,
    pub max_jumps: u64,
}

impl Default for WosConfig {
    fn default() -> Self {
        WosConfig { epsilon: 1e-5, max_jumps: 1_000_000 }
    }
}

impl WosConfig {
    /// Defaults with `epsilon = 1e-5 × diameter`.
    pub fn for_domain<D: Region + ?Sized>(domain: &D) -> Self {
        WosConfig { epsilon: 1e-5 * domain.diameter(), ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.epsilon > 0.0 && self.epsilon.is_finite() && self.max_jumps > 0 {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("bad walk-on-spheres configuration {self:?}")))
        }
    }
}

/// One draw of `(τ, B_τ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExitSample {
    pub tau: f64,
    pub exit_point: Point,
}

/// One draw of the cylinder exit point `V_σ = (s, y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CylinderExit {
    pub s: f64,
    pub y: Point,
}

fn check_start<D: Region + ?Sized>(domain: &D, x0: &[f64]) -> Result<f64> {
    if x0.len() != domain.dim() {
        return Err(Error::DimensionMismatch { expected: domain.dim(), got: x0.len() });
    }
    domain.interior_distance(x0).ok_or_else(|| Error::NotInterior(x0.to_vec()))
}

/// Euler–Maruyama exit from `x0`, writing `B_τ` into `exit` and returning `τ`.
pub fn em_exit_into<D: Region + ?Sized>(
    domain: &D,
    x0: &[f64],
    cfg: &EmConfig,
    stream: &mut RngStream,
    exit: &mut [f64],
) -> Result<f64> {
    let mut dist = check_start(domain, x0)?;
    let x = exit;
    x.copy_from_slice(x0);
    let mut tau = 0.0;
    let mut steps = 0u64;
    let base_sd = cfg.base_step.sqrt();
    loop {
        // Away from the boundary the step is constant. A separate loop keeps
        // the square root off the per-step dependency chain.
        let slowed = cfg.boundary_slowdown * dist * dist;
        let (h, sd) = if slowed >= cfg.base_step { (cfg.base_step, base_sd) } else { (slowed, slowed.sqrt()) };
        let mut far = slowed >= cfg.base_step;
        loop {
            for xi in x.iter_mut() {
                *xi += sd * sample_standard_normal(stream);
            }
            tau += h;
            steps += 1;
            match domain.interior_distance(x) {
                Some(d) if d >= cfg.snap_tolerance => dist = d,
                _ => {
                    let crossing = x.to_vec();
                    domain.project(&crossing, x);
                    return Ok(tau);
                }
            }
            if steps >= cfg.max_steps {
                return Err(Error::Truncated { steps });
            }
            far = far && cfg.boundary_slowdown * dist * dist >= cfg.base_step;
            if !far {
                break;
            }
        }
    }
}

/// Samples `(τ, B_τ)` for Brownian motion started at `x0`.
pub fn em_exit_sample<D: Region + ?Sized>(
    domain: &D,
    x0: &Point,
    cfg: &EmConfig,
    stream: &mut RngStream,
) -> Result<ExitSample> {
    let mut exit = vec![0.0; x0.dim()];
    let tau = em_exit_into(domain, x0, cfg, stream, &mut exit)?;
    Ok(ExitSample { tau, exit_point: Point::from_vec_unchecked(exit) })
}

/// Walk-on-spheres in `R × D` from `(0, x0)`. Writes the spatial exit point
/// into `exit` and returns the time-coordinate displacement.
pub fn wos_displacement<D: Region + ?Sized>(
    domain: &D,
    x0: &[f64],
    cfg: &WosConfig,
    stream: &mut RngStream,
    exit: &mut [f64],
) -> Result<f64> {
    let mut r = check_start(domain, x0)?;
    let x = exit;
    x.copy_from_slice(x0);
    let mut dir = vec![0.0; x0.len() + 1];
    let mut ds = 0.0;
    let mut jumps = 0u64;
    loop {
        if r < cfg.epsilon {
            let inner = x.to_vec();
            domain.project(&inner, x);
            return Ok(ds);
        }
        fill_uniform_sphere(stream, &mut dir);
        ds += r * dir[0];
        for (xi, di) in x.iter_mut().zip(&dir[1..]) {
            *xi += r * di;
        }
        jumps += 1;
        match domain.interior_distance(x) {
            Some(d) => r = d,
            // Rounding can land a jump exactly on (or a hair past) the boundary.
            None => r = 0.0,
        }
        if r >= cfg.epsilon && jumps >= cfg.max_jumps {
            return Err(Error::Truncated { steps: jumps });
        }
    }
}

/// Samples the exit point of the cylinder walk started at `start`.
pub fn wos_exit_sample<D: Region + ?Sized>(
    domain: &D,
    start: &CylinderPoint,
    cfg: &WosConfig,
    stream: &mut RngStream,
) -> Result<CylinderExit> {
    let mut y = vec![0.0; start.x.dim()];
    let ds = wos_displacement(domain, &start.x, cfg, stream, &mut y)?;
    Ok(CylinderExit { s: start.s + ds, y: Point::from_vec_unchecked(y) })
}

/// Monte Carlo mean exit time from `x0` using the EM sampler.
pub fn exit_mean_time<D: Region + ?Sized>(
    domain: &D,
    x0: &Point,
    n: u64,
    cfg: &EmConfig,
    partitions: usize,
    seed: SeedSpec,
) -> Result<Estimate> {
    cfg.validate()?;
    check_start(domain, x0)?;
    run_scalar(n, partitions, seed, |i| {
        let mut stream = RngStream::new(seed.offset(i));
        let mut exit = vec![0.0; x0.dim()];
        em_exit_into(domain, x0, cfg, &mut stream, &mut exit)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Domain;

    fn unit_interval() -> Domain {
        Domain::interval(-1.0, 1.0).unwrap()
    }

    #[test]
    fn em_exit_lands_on_the_boundary() {
        let d = Domain::unit_ball(2).unwrap();
        let cfg = EmConfig { base_step: 1e-2, ..EmConfig::for_domain(&d) };
        for i in 0..200 {
            let mut s = RngStream::new(SeedSpec::new(1, 0, i));
            let e = em_exit_sample(&d, &Point::new(vec![0.3, -0.2]).unwrap(), &cfg, &mut s).unwrap();
            let r = e.exit_point.iter().map(|c| c * c).sum::<f64>().sqrt();
            assert!((r - 1.0).abs() < 1e-12);
            assert!(e.tau > 0.0);
        }
    }

    #[test]
    fn em_rejects_boundary_start() {
        let d = unit_interval();
        let mut s = RngStream::new(SeedSpec::from_base(0));
        let r = em_exit_sample(&d, &Point::from(1.0), &EmConfig::default(), &mut s);
        assert!(matches!(r, Err(Error::NotInterior(_))));
    }

    #[test]
    fn em_truncation_is_explicit() {
        let d = unit_interval();
        let cfg = EmConfig { base_step: 1e-6, max_steps: 10, ..EmConfig::default() };
        let mut s = RngStream::new(SeedSpec::from_base(0));
        let r = em_exit_sample(&d, &Point::from(0.0), &cfg, &mut s);
        assert_eq!(r, Err(Error::Truncated { steps: 10 }));
    }

    #[test]
    fn wos_truncation_is_explicit() {
        let d = unit_interval();
        let cfg = WosConfig { epsilon: 1e-300, max_jumps: 3 };
        let mut s = RngStream::new(SeedSpec::from_base(0));
        let r = wos_exit_sample(&d, &CylinderPoint::new(0.0, Point::from(0.0)), &cfg, &mut s);
        assert_eq!(r, Err(Error::Truncated { steps: 3 }));
    }

    #[test]
    fn wos_exits_within_snap_tolerance() {
        let d = Domain::cuboid(vec![0.0, 0.0, 0.0], vec![1.0, 2.0, 1.0]).unwrap();
        let cfg = WosConfig::for_domain(&d);
        for i in 0..200 {
            let mut s = RngStream::new(SeedSpec::new(3, 0, i));
            let start = CylinderPoint::new(0.5, Point::new(vec![0.5, 0.5, 0.5]).unwrap());
            let e = wos_exit_sample(&d, &start, &cfg, &mut s).unwrap();
            assert!(!d.contains(&e.y).unwrap());
            let on_face = e.y.iter().zip([1.0, 2.0, 1.0]).any(|(c, h)| *c == 0.0 || *c == h);
            assert!(on_face, "{:?}", e.y);
        }
    }

    #[test]
    fn wos_walks_translate_in_s() {
        let d = unit_interval();
        let cfg = WosConfig::for_domain(&d);
        let x = Point::from(0.3);
        for i in 0..50 {
            let a = wos_exit_sample(&d, &CylinderPoint::new(0.0, x.clone()), &cfg, &mut RngStream::new(SeedSpec::new(4, 0, i))).unwrap();
            let b = wos_exit_sample(&d, &CylinderPoint::new(2.5, x.clone()), &cfg, &mut RngStream::new(SeedSpec::new(4, 0, i))).unwrap();
            assert_eq!(a.y, b.y);
            assert_eq!(b.s, 2.5 + a.s);
        }
    }

    #[test]
    fn exit_time_is_reproducible() {
        let d = unit_interval();
        let cfg = EmConfig { base_step: 1e-2, ..EmConfig::for_domain(&d) };
        let a = exit_mean_time(&d, &Point::from(0.2), 500, &cfg, 3, SeedSpec::from_base(8)).unwrap();
        let b = exit_mean_time(&d, &Point::from(0.2), 500, &cfg, 3, SeedSpec::from_base(8)).unwrap();
        assert_eq!(a, b);
    }
}
