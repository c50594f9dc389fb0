//! GAN-based data-driven distributionally robust chance constrained
//! programming.
//!
//! The pipeline learns a scenario generator from historical samples
//! ([`gan`]), converts a φ-divergence distributionally robust chance
//! constraint into an ordinary one with a reduced risk level
//! ([`ambiguity`]), solves the sample average approximation as a MILP
//! ([`milp`], [`saa`]) and validates upper and lower bounds statistically
//! ([`stats`]). [`supply_chain`] applies it to a three-echelon network
//! design model.

pub mod ambiguity;
pub mod dataset;
pub mod error;
pub mod experiments;
pub mod gan;
pub mod io;
pub mod kde;
pub mod milp;
pub mod nn;
pub mod saa;
pub mod scenarios;
pub mod seed;
pub mod stats;
pub mod supply_chain;

pub use dataset::{Dataset, Matrix};
pub use error::{Error, Result};
