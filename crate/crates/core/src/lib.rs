//! Geomagnetic navigation without satellite positioning.
//!
//! The crate is organised bottom-up:
//!
//! * [`field`] evaluates the IGRF main field (or an analytic stand-in) and
//!   derives the seven geomagnetic elements and their horizontal gradients.
//! * [`env`] is the navigation decision process: kinematics, objective,
//!   composite reward, termination and episode traces.
//! * [`neural`] and [`td3`] provide the actor-critic learner.
//! * [`baselines`] holds the GA / PSO / AFSA step-wise searchers.
//! * [`navigator`] puts every method behind one trait and a name registry.
//! * [`eval`] generates tasks, runs benchmarks and computes metrics.

pub mod baselines;
pub mod config;
pub mod env;
pub mod error;
pub mod eval;
pub mod field;
pub mod geo;
pub mod navigator;
pub mod neural;
pub mod seed;
pub mod td3;

pub use error::{Error, Result};
