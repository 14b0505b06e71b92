//! Jaynes-Cummings and quantum Rabi models on a truncated Fock space:
//! spectra, Born-Oppenheimer surfaces and Berry phases.

pub mod berry;
pub mod error;
pub mod exec;
pub mod fock;
pub mod linalg;
pub mod models;
pub mod spectra;
pub mod surfaces;
pub mod verify;

pub use error::{Error, Result};
pub use exec::Exec;
