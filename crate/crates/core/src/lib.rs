//! Momentum methods (gradient descent, classical momentum, Nesterov, and the
//! Wibisono–Wilson–Jordan scheme) treated as discrete variational integrators
//! of time-dependent Lagrangians, with tools to check their geometry.
//!
//! Everything is generic over the floating point type through [`Scalar`];
//! the `*64` and `*32` aliases at the crate root fix the precision.
//!
//! ```
//! use accelvi::{integrators::{run, Method, StopRule}, objectives::make_quadratic, schedules::classical_schedule};
//!
//! let f = make_quadratic(0.9, 10).unwrap();
//! let s = classical_schedule(3, 0.1).unwrap();
//! let t = run(&f, Method::Nag, &s, &[1.0; 10], &StopRule::iterations(500)).unwrap();
//! assert!(t.last().f < 1e-3);
//! ```

// `!(x > y)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod geometry;
pub mod integrators;
pub mod linalg;
pub mod objectives;
pub mod scalar;
pub mod schedules;
pub mod wwj;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Matrix64 = linalg::Matrix<f64>;
pub type Matrix32 = linalg::Matrix<f32>;
pub type Schedule64 = schedules::Schedule<f64>;
pub type Schedule32 = schedules::Schedule<f32>;
pub type LagrangianCoefficients64 = schedules::DiscreteLagrangianCoefficients<f64>;
pub type LagrangianCoefficients32 = schedules::DiscreteLagrangianCoefficients<f32>;
pub type Trajectory64 = integrators::Trajectory<f64>;
pub type Trajectory32 = integrators::Trajectory<f32>;
pub type StopRule64 = integrators::StopRule<f64>;
pub type StopRule32 = integrators::StopRule<f32>;
pub type Algorithm64 = integrators::Algorithm<f64>;
pub type Algorithm32 = integrators::Algorithm<f32>;
pub type WwjParams64 = wwj::WwjParams<f64>;
pub type WwjParams32 = wwj::WwjParams<f32>;
pub type PhasePoint64 = geometry::PhasePoint<f64>;
pub type PhasePoint32 = geometry::PhasePoint<f32>;
pub type Dataset64 = objectives::Dataset<f64>;
pub type Dataset32 = objectives::Dataset<f32>;
