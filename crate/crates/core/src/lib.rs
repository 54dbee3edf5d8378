//! Monte Carlo solver for the wave equation in the Cauchy-mixing form
//! `u(t, x) = E f(tX + √τ Z, B_τ)`.
//!
//! `f` is given on `R × ∂D`; `(τ, B_τ)` is the exit of Brownian motion from
//! the bounded domain `D`, `X` is standard Cauchy and `Z` standard normal.

pub mod boundary;
pub mod cli;
pub mod error;
pub mod estimator;
pub mod exit;
pub mod geometry;
pub mod sampling;
pub mod stats;
pub mod verify;

pub use boundary::BoundaryData;
pub use error::{Error, Result};
pub use estimator::{Backend, Coupling, EstimatorConfig, Method, QueryPoint};
pub use geometry::{Domain, Point};
pub use sampling::SeedSpec;
pub use stats::Estimate;
