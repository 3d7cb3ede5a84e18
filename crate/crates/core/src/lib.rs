//! Simulation of off-resonant modulated driving in few-level quantum systems.

pub mod bloch;
pub mod error;
pub mod integrate;
pub mod linalg;
pub mod multilevel;
pub mod open_system;
pub mod optimizer;
pub mod rabi;
pub mod state;
pub mod trajectory;
pub mod two_level;

pub use bloch::{interaction_hamiltonian, su2_propagator, BlochHamiltonian};
pub use error::{Error, Result};
pub use integrate::{Hamiltonian, TimeGrid};
pub use state::QuantumState;
pub use trajectory::{SeriesKind, Trajectory};
