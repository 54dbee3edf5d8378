//! Bounded domains and the geometric queries used by the exit samplers.
//!
//! Domains are open sets: a point on the boundary is *not* contained. Every
//! sampler stops exactly when membership fails, so the open-set convention is
//! what makes "first time the path touches the boundary" well defined here.
//!
//! The hot paths work on raw coordinate slices through the [`Region`] trait.
//! [`Domain`] adds the checked, `Point`-based API on top.

use std::fmt;
use std::ops::{Deref, DerefMut};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of `R^d` with finite coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidArgument("a point needs at least one coordinate".into()));
        }
        if let Some(c) = coords.iter().find(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite coordinate {c}")));
        }
        Ok(Point(coords))
    }

    /// Builds a point without validation. Callers guarantee finiteness.
    pub(crate) fn from_vec_unchecked(coords: Vec<f64>) -> Self {
        Point(coords)
    }

    pub fn origin(dim: usize) -> Self {
        Point(vec![0.0; dim.max(1)])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl From<f64> for Point {
    fn from(x: f64) -> Self {
        Point(vec![x])
    }
}

impl Deref for Point {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl DerefMut for Point {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// A point `(s, x)` of the cylinder `R × D`.
#[derive(Debug, Clone, PartialEq)]
pub struct CylinderPoint {
    pub s: f64,
    pub x: Point,
}

impl CylinderPoint {
    pub fn new(s: f64, x: Point) -> Self {
        CylinderPoint { s, x }
    }
}

/// Unchecked geometric queries on coordinate slices.
///
/// Implementors must be bounded, open and connected. `interior_distance`
/// must be exact: walk-on-spheres uses it as the jump radius.
pub trait Region: Send + Sync {
    fn dim(&self) -> usize;

    /// Distance to the boundary if `p` is strictly inside, `None` otherwise.
    fn interior_distance(&self, p: &[f64]) -> Option<f64>;

    /// Writes a nearest boundary point of `p` into `out`. Works for points on
    /// either side of the boundary.
    fn project(&self, p: &[f64], out: &mut [f64]);

    /// Upper bound on the distance between two points of the closure.
    fn diameter(&self) -> f64;
}

/// The shipped domain shapes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum Domain {
    Interval { lo: f64, hi: f64 },
    Ball { center: Vec<f64>, radius: f64 },
    Box { lo: Vec<f64>, hi: Vec<f64> },
}

impl Domain {
    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
            return Err(Error::InvalidDomain(format!("interval needs finite lo < hi, got ({lo}, {hi})")));
        }
        Ok(Domain::Interval { lo, hi })
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        if center.is_empty() {
            return Err(Error::InvalidDomain("ball center has no coordinates".into()));
        }
        if center.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidDomain("ball center must be finite".into()));
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidDomain(format!("ball radius must be positive, got {radius}")));
        }
        Ok(Domain::Ball { center, radius })
    }

    pub fn unit_ball(dim: usize) -> Result<Self> {
        Self::ball(vec![0.0; dim], 1.0)
    }

    pub fn cuboid(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.is_empty() || lo.len() != hi.len() {
            return Err(Error::InvalidDomain(format!(
                "box corners must have equal non-zero length, got {} and {}",
                lo.len(),
                hi.len()
            )));
        }
        for (i, (l, h)) in lo.iter().zip(&hi).enumerate() {
            if !(l.is_finite() && h.is_finite()) || l >= h {
                return Err(Error::InvalidDomain(format!("box axis {i} needs finite lo < hi, got ({l}, {h})")));
            }
        }
        Ok(Domain::Box { lo, hi })
    }

    /// Re-checks the shape invariants, e.g. after deserialisation.
    pub fn validate(&self) -> Result<()> {
        match self {
            Domain::Interval { lo, hi } => Self::interval(*lo, *hi).map(|_| ()),
            Domain::Ball { center, radius } => Self::ball(center.clone(), *radius).map(|_| ()),
            Domain::Box { lo, hi } => Self::cuboid(lo.clone(), hi.clone()).map(|_| ()),
        }
    }

    fn check_dim(&self, p: &[f64]) -> Result<()> {
        if p.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: p.len() });
        }
        Ok(())
    }

    /// Strict interior membership.
    pub fn contains(&self, p: &Point) -> Result<bool> {
        self.check_dim(p)?;
        Ok(self.interior_distance(p).is_some())
    }

    /// Exact distance from an interior point to the boundary.
    pub fn distance_to_boundary(&self, p: &Point) -> Result<f64> {
        self.check_dim(p)?;
        self.interior_distance(p).ok_or_else(|| Error::NotInterior(p.to_vec()))
    }

    /// Nearest boundary point. Ties go to the lowest axis index, and to the
    /// lower face before the upper one on the same axis.
    pub fn project_to_boundary(&self, p: &Point) -> Result<Point> {
        self.check_dim(p)?;
        let mut out = vec![0.0; self.dim()];
        self.project(p, &mut out);
        Ok(Point::from_vec_unchecked(out))
    }

    /// Errors unless `p` has the right dimension and lies strictly inside.
    pub fn require_interior(&self, p: &Point) -> Result<()> {
        if self.contains(p)? {
            Ok(())
        } else {
            Err(Error::NotInterior(p.to_vec()))
        }
    }

    pub fn shape_name(&self) -> &'static str {
        match self {
            Domain::Interval { .. } => "interval",
            Domain::Ball { .. } => "ball",
            Domain::Box { .. } => "box",
        }
    }
}

impl Region for Domain {
    fn dim(&self) -> usize {
        match self {
            Domain::Interval { .. } => 1,
            Domain::Ball { center, .. } => center.len(),
            Domain::Box { lo, .. } => lo.len(),
        }
    }

    #[inline]
    fn interior_distance(&self, p: &[f64]) -> Option<f64> {
        let d = match self {
            Domain::Interval { lo, hi } => (p[0] - lo).min(hi - p[0]),
            Domain::Ball { center, radius } => {
                let r2: f64 = p.iter().zip(center).map(|(a, c)| (a - c) * (a - c)).sum();
                radius - r2.sqrt()
            }
            Domain::Box { lo, hi } => {
                let mut d = f64::INFINITY;
                for ((x, l), h) in p.iter().zip(lo).zip(hi) {
                    d = d.min(x - l).min(h - x);
                }
                d
            }
        };
        (d > 0.0).then_some(d)
    }

    fn project(&self, p: &[f64], out: &mut [f64]) {
        match self {
            Domain::Interval { lo, hi } => {
                out[0] = if p[0] - lo <= hi - p[0] { *lo } else { *hi };
            }
            Domain::Ball { center, radius } => {
                let r: f64 = p.iter().zip(center).map(|(a, c)| (a - c) * (a - c)).sum::<f64>().sqrt();
                if r == 0.0 {
                    out.copy_from_slice(center);
                    out[0] += radius;
                } else {
                    for ((o, a), c) in out.iter_mut().zip(p).zip(center) {
                        *o = c + radius * (a - c) / r;
                    }
                }
            }
            Domain::Box { lo, hi } => {
                let outside = p.iter().zip(lo).zip(hi).any(|((x, l), h)| x <= l || x >= h);
                if outside {
                    // The clamp of an exterior (or boundary) point is its nearest boundary point.
                    for (((o, x), l), h) in out.iter_mut().zip(p).zip(lo).zip(hi) {
                        *o = x.clamp(*l, *h);
                    }
                    return;
                }
                out.copy_from_slice(p);
                let mut best = f64::INFINITY;
                let mut face = (0, *lo.first().unwrap_or(&0.0));
                for (i, (l, h)) in lo.iter().zip(hi).enumerate() {
                    if p[i] - l < best {
                        best = p[i] - l;
                        face = (i, *l);
                    }
                    if h - p[i] < best {
                        best = h - p[i];
                        face = (i, *h);
                    }
                }
                out[face.0] = face.1;
            }
        }
    }

    fn diameter(&self) -> f64 {
        match self {
            Domain::Interval { lo, hi } => hi - lo,
            Domain::Ball { radius, .. } => 2.0 * radius,
            Domain::Box { lo, hi } => lo.iter().zip(hi).map(|(l, h)| (h - l) * (h - l)).sum::<f64>().sqrt(),
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::Interval { lo, hi } => write!(f, "Interval({lo}, {hi})"),
            Domain::Ball { center, radius } => write!(f, "Ball({}, {radius})", Point(center.clone())),
            Domain::Box { lo, hi } => write!(f, "Box({}, {})", Point(lo.clone()), Point(hi.clone())),
        }
    }
}
