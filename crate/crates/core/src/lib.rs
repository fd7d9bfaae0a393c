//! Numerical workbench for the quantum-to-classical transition of spin
//! systems: Leggett-Garg tests under sharp and coarse-grained measurements,
//! spin-coherent POVMs, cat-state dynamics with decoherence, collective
//! entanglement in harmonic chains and spin ensembles, and the decidability
//! calculus of Pauli strings.

pub mod cat;
pub mod chain;
pub mod coarse;
pub mod ensemble;
pub mod config;
pub mod error;
pub mod lg;
pub mod selftest;
pub mod special;
pub mod spin;
pub mod undecidable;

pub use config::Tolerances;
pub use error::{Error, Result};
pub use spin::{Direction, Evolution, Hamiltonian, Ket, Operator, RotationX, SpinLength, SpinState, StateRepr};

pub use num_complex::Complex64 as C64;
pub use nalgebra as na;
