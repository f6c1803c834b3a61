//! Chaos-control toolkit for the Mackey–Glass delay differential equation
//!
//! ```text
//! x'(t) = -mu x(t) + p x(t-tau) / (1 + x(t-tau)^n)
//! ```
//!
//! The crate computes the analytic thresholds under which constant,
//! proportional, Pyragas and state-dependent-delay control force every
//! solution into a region where the delayed feedback is monotone (so the
//! dynamics settle on an equilibrium or a periodic orbit), simulates the
//! controlled system with a method-of-steps integrator, and classifies the
//! resulting trajectory tails.
//!
//! The numerical core is generic over the scalar type via [`Real`];
//! `*64` aliases at the crate root pin the common `f64` instantiations.

// Frozen oracle constants keep their full printed precision, and the
// `!(x > y)` guards are deliberate: they reject NaN where `x <= y` would
// let it through.
#![allow(clippy::excessive_precision)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod dde;
pub mod design;
pub mod diagnostics;
pub mod io;
pub mod model;
pub mod presets;
pub mod report;
mod rootfind;
pub mod scalar;
pub mod scenario;

pub use scalar::Real;

pub type MgParams64 = model::MgParams<f64>;
pub type Landmarks64 = model::Landmarks<f64>;
pub type ConditionReport64 = model::ConditionReport<f64>;
pub type ConstantThresholds64 = design::ConstantThresholds<f64>;
pub type ProportionalThresholds64 = design::ProportionalThresholds<f64>;
pub type PyragasDesign64 = design::PyragasDesign<f64>;
pub type DelayDesign64 = design::DelayDesign<f64>;
pub type Trajectory64 = dde::Trajectory<f64>;
pub type History64 = dde::History<f64>;
pub type Schedule64 = scenario::Schedule<f64>;
pub type ControlLaw64 = scenario::ControlLaw<f64>;
pub type InitialFunction64 = scenario::InitialFunction<f64>;
pub type ScenarioConfig64 = scenario::ScenarioConfig<f64>;
pub type TailClassification64 = diagnostics::TailClassification<f64>;
pub type Verdict64 = diagnostics::Verdict<f64>;
