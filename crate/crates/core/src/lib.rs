//! Scaled step-up multiple testing.
//!
//! The crate is organised around the step-up procedure with thresholds
//! `t_i = alpha * s(i) / m` for a nondecreasing positive scaling function `s`:
//!
//! * [`scaling`] and [`mixture`] hold the shared domain types,
//! * [`procedures`] runs step-up rejections and scores them with the
//!   `lambda * V - T` loss,
//! * [`exact`] evaluates finite-`m` distributions of the number of rejections
//!   and the scaled false discovery proportion under the two-groups model,
//! * [`optimality`] covers the two-test Gaussian model case,
//! * [`asymptotic`] solves the large-`m` threshold equation and the optimal
//!   scaling exponent,
//! * [`simulation`] and [`estimation`] drive the Monte Carlo study and the
//!   EM plug-in estimates,
//! * [`cli`] is the command-line layer.

pub mod asymptotic;
pub mod cli;
pub mod error;
pub mod estimation;
pub mod exact;
pub mod mixture;
pub mod normal;
pub mod optimality;
pub mod procedures;
pub mod roots;
pub mod scaling;
pub mod simulation;
mod summation;

pub use error::{Error, Result};
pub use mixture::{Cdf, MixtureModel};
pub use procedures::{LossSpec, RejectionOutcome};
pub use scaling::{build_thresholds, ScalingFunction, ThresholdSequence};
