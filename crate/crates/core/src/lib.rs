//! Continuous time random walk whose waiting times repeat in blocks of
//! zeta-distributed length, producing power-law memory in the inter-event
//! times without a fat-tailed waiting-time law.
//!
//! Everything numeric is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the scalar to `f64`, which is what the command-line tool uses.

pub mod analytic;
pub mod data;
pub mod dist;
pub mod error;
pub mod estim;
pub mod quad;
pub mod rng;
pub mod scalar;
pub mod series;
pub mod sim;
pub mod special;

pub use error::{CtrwError, Result};
pub use scalar::Real;

pub type RepetitionDistribution = dist::RepetitionLaw<f64>;
pub type ZetaDistribution = dist::ZetaLaw<f64>;
pub type WaitingTimes = dist::WaitingTimeModel<f64>;
pub type Increments = dist::IncrementModel<f64>;
pub type Events = series::EventSeries<f64>;
pub type Simulation = sim::SimConfig<f64>;
