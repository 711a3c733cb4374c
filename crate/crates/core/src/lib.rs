//! Teleportation of a single qubit through a thermal two-qubit Heisenberg
//! channel, with deterministic and postselected fidelity figures of merit.

pub mod averaging;
pub mod classical_limit;
pub mod closed_form;
pub mod densmat;
pub mod error;
pub mod optimize;
pub mod spin_models;
pub mod sweeps;
pub mod teleport;

pub use error::{Error, Result};
