//! Winding-number statistics of the parametric chiral unitary two-matrix model
//! `K(p) = a(p) K₁ + b(p) K₂` with complex Ginibre `K₁, K₂`.
//!
//! The closed forms live in [`analytic`]; [`ensemble`], [`winding`] and
//! [`stats`] form the Monte Carlo side that validates them.

pub mod analytic;
pub mod coeff_model;
pub mod ensemble;
pub mod error;
pub mod linalg;
pub mod models;
pub mod quadrature;
pub mod stats;
pub mod winding;

pub use coeff_model::{CoefficientField, LaurentSeries, ParallelPoint};
pub use error::{Error, Result};

/// Gauge grid used when no size is requested.
pub const DEFAULT_GAUGE_GRID: usize = 4096;
