//! Multi-lane traffic microsimulation with heterogeneous E-IDM/MOBIL
//! controllers, and a variance-based sensitivity toolkit for studying how
//! controller heterogeneity affects throughput, lane-change rate and
//! acceleration.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod engine;
pub mod error;
pub mod experiments;
pub mod model;
pub mod network;
pub mod sampler;
pub mod sensitivity;

pub use error::{Error, Result};
