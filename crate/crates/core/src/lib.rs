//! Quantum-assisted learning of restricted Boltzmann machines on an
//! emulated annealer with an unknown effective temperature.

pub mod annealer;
pub mod data;
pub mod error;
pub mod harness;
pub mod learning;
pub mod model;
pub mod seed;
pub mod stats;
pub mod thermometry;
pub mod topology;

pub use error::{Error, Result};
