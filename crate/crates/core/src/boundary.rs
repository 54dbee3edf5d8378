//! Boundary data `f(s, y)` on `R × ∂D`.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Domain, Region};

/// Relative slack on the bound check, for rounding in `exp`/`cos`.
const BOUND_SLACK: f64 = 1e-12;

type BoundaryFn = dyn Fn(f64, &[f64]) -> f64 + Send + Sync;

/// User-supplied boundary data with a declared bound.
#[derive(Clone)]
pub struct CustomData {
    pub name: String,
    pub bound: f64,
    pub func: Arc<BoundaryFn>,
}

impl fmt::Debug for CustomData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomData").field("name", &self.name).field("bound", &self.bound).finish()
    }
}

/// Table of boundary values: piecewise-linear in `s` (held constant outside
/// the node range), nearest-neighbour over the listed boundary points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TabulatedData {
    pub bound: f64,
    /// Strictly increasing time nodes.
    pub s: Vec<f64>,
    /// Boundary points; ties in the nearest-neighbour search go to the lowest index.
    pub points: Vec<Vec<f64>>,
    /// `values[p][k]` is `f(s[k], points[p])`.
    pub values: Vec<Vec<f64>>,
}

impl TabulatedData {
    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Tabulated(format!("cannot read {}: {e}", path.display())))?;
        let table: TabulatedData =
            serde_json::from_str(&text).map_err(|e| Error::Tabulated(format!("{}: {e}", path.display())))?;
        table.check_shape()?;
        Ok(table)
    }

    fn check_shape(&self) -> Result<()> {
        if !(self.bound.is_finite() && self.bound > 0.0) {
            return Err(Error::Tabulated(format!("bound must be positive, got {}", self.bound)));
        }
        if self.s.is_empty() || self.s.iter().any(|v| !v.is_finite()) || self.s.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Tabulated("s nodes must be finite and strictly increasing".into()));
        }
        if self.points.is_empty() || self.points.len() != self.values.len() {
            return Err(Error::Tabulated(format!(
                "{} points but {} value rows",
                self.points.len(),
                self.values.len()
            )));
        }
        for (p, row) in self.values.iter().enumerate() {
            if row.len() != self.s.len() {
                return Err(Error::Tabulated(format!("value row {p} has {} entries, expected {}", row.len(), self.s.len())));
            }
            if let Some(v) = row.iter().find(|v| !v.is_finite() || v.abs() > self.bound) {
                return Err(Error::Tabulated(format!("value {v} in row {p} violates bound {}", self.bound)));
            }
        }
        Ok(())
    }

    fn validate(&self, dim: usize) -> Result<()> {
        self.check_shape()?;
        if let Some(p) = self.points.iter().find(|p| p.len() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, got: p.len() });
        }
        Ok(())
    }

    fn nearest(&self, y: &[f64]) -> usize {
        let mut best = (0, f64::INFINITY);
        for (i, p) in self.points.iter().enumerate() {
            let d2: f64 = p.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
            if d2 < best.1 {
                best = (i, d2);
            }
        }
        best.0
    }

    pub fn eval(&self, s: f64, y: &[f64]) -> f64 {
        let row = &self.values[self.nearest(y)];
        let nodes = &self.s;
        if s <= nodes[0] {
            return row[0];
        }
        let last = nodes.len() - 1;
        if s >= nodes[last] {
            return row[last];
        }
        let k = nodes.partition_point(|v| *v <= s) - 1;
        let w = (s - nodes[k]) / (nodes[k + 1] - nodes[k]);
        row[k] + w * (row[k + 1] - row[k])
    }
}

/// The boundary "evolution" `f(s, y)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoundaryData {
    /// `f ≡ value`.
    Constant { value: f64 },
    /// `e^{y₁} cos s`, the one-dimensional worked example.
    Paper,
    /// `e^{⟨a, y⟩} cos(|a| s)`.
    ExpCos { a: Vec<f64> },
    /// `1` when `y[axis] > threshold`, else `0`. Time independent.
    Indicator { axis: usize, threshold: f64 },
    Tabulated(TabulatedData),
    /// `Σ cᵢ fᵢ`.
    Combination { terms: Vec<(f64, BoundaryData)> },
    #[serde(skip)]
    Custom(CustomData),
}

impl BoundaryData {
    pub fn custom<F>(name: impl Into<String>, bound: f64, func: F) -> Self
    where
        F: Fn(f64, &[f64]) -> f64 + Send + Sync + 'static,
    {
        BoundaryData::Custom(CustomData { name: name.into(), bound, func: Arc::new(func) })
    }

    pub fn name(&self) -> String {
        match self {
            BoundaryData::Constant { .. } => "constant".into(),
            BoundaryData::Paper => "paper".into(),
            BoundaryData::ExpCos { .. } => "exp_cos".into(),
            BoundaryData::Indicator { .. } => "indicator".into(),
            BoundaryData::Tabulated(_) => "tabulated".into(),
            BoundaryData::Combination { .. } => "combination".into(),
            BoundaryData::Custom(c) => c.name.clone(),
        }
    }

    /// Whether `f` does not depend on `s`.
    pub fn is_time_independent(&self) -> bool {
        match self {
            BoundaryData::Constant { .. } | BoundaryData::Indicator { .. } => true,
            BoundaryData::ExpCos { a } => a.iter().all(|c| *c == 0.0),
            BoundaryData::Combination { terms } => terms.iter().all(|(_, f)| f.is_time_independent()),
            _ => false,
        }
    }

    /// Checks the data against the domain's dimension.
    pub fn validate(&self, domain: &Domain) -> Result<()> {
        let dim = domain.dim();
        match self {
            BoundaryData::Constant { value } if !value.is_finite() => {
                Err(Error::InvalidArgument(format!("constant boundary value {value} is not finite")))
            }
            BoundaryData::ExpCos { a } if a.len() != dim => Err(Error::DimensionMismatch { expected: dim, got: a.len() }),
            BoundaryData::ExpCos { a } if a.iter().any(|c| !c.is_finite()) => {
                Err(Error::InvalidArgument("exp_cos coefficients must be finite".into()))
            }
            BoundaryData::Indicator { axis, .. } if *axis >= dim => {
                Err(Error::InvalidArgument(format!("indicator axis {axis} out of range for dimension {dim}")))
            }
            BoundaryData::Tabulated(t) => t.validate(dim),
            BoundaryData::Combination { terms } => terms.iter().try_for_each(|(_, f)| f.validate(domain)),
            BoundaryData::Custom(c) if !(c.bound.is_finite() && c.bound > 0.0) => {
                Err(Error::InvalidArgument(format!("custom boundary data '{}' needs a positive bound", c.name)))
            }
            _ => Ok(()),
        }
    }

    /// `sup |f|` over `R × ∂D`.
    pub fn bound(&self, domain: &Domain) -> f64 {
        match self {
            BoundaryData::Constant { value } => value.abs(),
            BoundaryData::Paper => max_linear(domain, &unit_first_axis(domain.dim())).exp(),
            BoundaryData::ExpCos { a } => max_linear(domain, a).exp(),
            BoundaryData::Indicator { .. } => 1.0,
            BoundaryData::Tabulated(t) => t.bound,
            BoundaryData::Combination { terms } => terms.iter().map(|(c, f)| c.abs() * f.bound(domain)).sum(),
            BoundaryData::Custom(c) => c.bound,
        }
    }

    #[inline]
    pub fn eval(&self, s: f64, y: &[f64]) -> f64 {
        match self {
            BoundaryData::Constant { value } => *value,
            BoundaryData::Paper => y[0].exp() * s.cos(),
            BoundaryData::ExpCos { a } => {
                let dot: f64 = a.iter().zip(y).map(|(a, y)| a * y).sum();
                let norm = a.iter().map(|a| a * a).sum::<f64>().sqrt();
                dot.exp() * (norm * s).cos()
            }
            BoundaryData::Indicator { axis, threshold } => f64::from(u8::from(y[*axis] > *threshold)),
            BoundaryData::Tabulated(t) => t.eval(s, y),
            BoundaryData::Combination { terms } => terms.iter().map(|(c, f)| c * f.eval(s, y)).sum(),
            BoundaryData::Custom(c) => (c.func)(s, y),
        }
    }
}

fn unit_first_axis(dim: usize) -> Vec<f64> {
    let mut a = vec![0.0; dim.max(1)];
    a[0] = 1.0;
    a
}

/// `max ⟨a, y⟩` over the closure of the domain (attained on the boundary).
fn max_linear(domain: &Domain, a: &[f64]) -> f64 {
    match domain {
        Domain::Interval { lo, hi } => (a[0] * lo).max(a[0] * hi),
        Domain::Ball { center, radius } => {
            let dot: f64 = a.iter().zip(center).map(|(a, c)| a * c).sum();
            dot + radius * a.iter().map(|a| a * a).sum::<f64>().sqrt()
        }
        Domain::Box { lo, hi } => a.iter().zip(lo.iter().zip(hi)).map(|(a, (l, h))| (a * l).max(a * h)).sum(),
    }
}

/// Boundary data bound to a domain: evaluation with the bound enforced.
#[derive(Debug, Clone, Copy)]
pub struct Checked<'a> {
    data: &'a BoundaryData,
    bound: f64,
}

impl<'a> Checked<'a> {
    pub fn new(data: &'a BoundaryData, domain: &Domain) -> Result<Self> {
        data.validate(domain)?;
        Ok(Checked { data, bound: data.bound(domain) })
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn data(&self) -> &'a BoundaryData {
        self.data
    }

    /// Evaluates `f(s, y)`; a value beyond the declared bound aborts the run.
    #[inline]
    pub fn eval(&self, s: f64, y: &[f64]) -> Result<f64> {
        let v = self.data.eval(s, y);
        if v.abs() <= self.bound * (1.0 + BOUND_SLACK) {
            Ok(v)
        } else {
            Err(Error::BoundViolation { name: self.data.name(), value: v, bound: self.bound })
        }
    }
}
