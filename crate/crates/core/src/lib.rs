//! Separable two-layer temporal exponential random graph models for dynamic
//! signed networks.
//!
//! A signed wave `y_t` is split into an interaction layer `x_t` and a sign
//! layer `z_t`; each transition is further split into formation (union) and
//! persistence (intersection) networks. The four resulting processes are
//! simulated with constrained-support MCMC ([`sim`]) and fitted with an
//! adaptive approximate exchange algorithm ([`infer`]).

pub mod diag;
pub mod error;
pub mod infer;
pub mod netcore;
pub mod sim;
pub mod stats;

pub use error::{Error, Result};
