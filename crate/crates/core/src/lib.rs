//! Pauli-transfer-matrix simulation of small stabilizer-code memory
//! experiments under a superconducting-qubit error model.

pub mod analysis;
pub mod circuit;
pub mod compile;
pub mod error;
pub mod io;
pub mod instrument;
pub mod noise;
pub mod parallel;
pub mod pauli;
pub mod runner;
pub mod verify;

pub use error::{Error, Result};
