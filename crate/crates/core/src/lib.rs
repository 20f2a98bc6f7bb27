//! Law-invariant functionals on finitely supported distributions.
//!
//! The numerical core is generic over the [`Scalar`] type (`f32` or `f64`);
//! the aliases at the crate root fix it to `f64`, which is what the command
//! line front end uses.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod capacities;
pub mod cli;
pub mod collapse;
mod error;
pub mod json;
pub mod laws;
pub mod optimizer;
pub mod probes;
pub mod rearrange;
pub mod riskmeasures;
mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Law = laws::DiscreteLaw<f64>;
pub type Sample = laws::UniformSample<f64>;
pub type Quantile = laws::QuantileFn<f64>;
pub type Capacity = capacities::Capacity<f64>;
pub type Crm = riskmeasures::ConsistentRiskMeasure<f64>;
pub type InvariantSet = riskmeasures::LawInvariantSet<f64>;
pub type Domain = optimizer::DomainSpec<f64>;
