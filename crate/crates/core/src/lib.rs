//! Figure-eight choreographies of three identical bodies under
//! Lennard-Jones-type and homogeneous pair potentials.
//!
//! The search starts every trajectory from an isosceles configuration fixed
//! by `(x0, y0, v)`, integrates to the first collinear configuration and
//! measures how far it is from an Euler configuration. Zeros of those
//! residuals are figure-eight solutions; they come in one-parameter families
//! that are traced by pseudo-arclength continuation.

pub mod config;
pub mod continuation;
pub mod error;
pub mod export;
pub mod geometry;
pub mod integrator;
pub mod numeric;
pub mod orbit;
pub mod reproduce;
pub mod shooting;

pub use error::{Error, Result};
pub use geometry::{PotentialKind, PotentialSpec, ShootingParams, ThreeBodyState, Vec2};

/// Version string embedded in every output file.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
