//! Simulation and inference laboratory for support boundary recovery from
//! Poisson point process data.
//!
//! The observation model is a Poisson point process on `[0, T] × ℝ` with
//! intensity `n·1(f(x) ≤ y)`: points fill the epigraph of an unknown
//! boundary `f`, and only the lower envelope of the data is informative.
//! The crate provides
//!
//! - exact band-restricted simulation of the model ([`point_set`]),
//! - frequentist estimators: blockwise histogram minima, the monotone
//!   staircase MLE, the K-jump dynamic program, bias-corrected and blockwise
//!   integral estimators ([`mle`]),
//! - random-histogram, compound-Poisson and Gamma-subordinator priors
//!   ([`prior`]) with exact and reversible-jump posterior samplers
//!   ([`posterior`], [`rjmcmc`]),
//! - the explicit posterior limit laws and closed-form coverage oracles
//!   ([`limitlaw`]),
//! - experiment runners that audit frequentist coverage of credible sets at
//!   desk scale ([`exp`]).
//!
//! Start with the runnable programs in `examples/`; each one exercises a
//! single capability end to end.

pub mod classes;
pub mod error;
pub mod exp;
pub mod limitlaw;
pub mod mle;
pub mod numeric;
pub mod point_set;
pub mod posterior;
pub mod prior;
pub mod rjmcmc;
pub mod rmq;
pub mod rng;
pub mod stats;
pub mod step_fn;
pub mod truth;

pub use classes::{is_member, make_ms_truth, ClassSpec, MembershipReport};
pub use error::{Error, Result};
pub use point_set::PointSet;
pub use step_fn::StepFn;
pub use truth::{Truth, TruthKind};
