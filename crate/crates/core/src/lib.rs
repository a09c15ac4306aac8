//! Spin-network cloning laboratory.
//!
//! Qubit networks evolving under a fixed XXZ Hamiltonian can act as
//! approximate cloning machines: an input qubit placed on one site spreads
//! onto a set of blank sites, and each blank ends up holding an imperfect
//! copy. This crate assembles those Hamiltonians on configurable graphs,
//! evolves states exactly, measures clone fidelities, optimizes over field
//! and time, and stress-tests the protocol under static disorder, classical
//! parameter noise, and a Bloch-Redfield bath. A gate-circuit baseline is
//! included for head-to-head comparison under the same bath.
//!
//! # Conventions
//!
//! * Site 0 is the most significant bit of a computational-basis index, so
//!   `|q_0 q_1 ... q_{n-1}>` has index `sum q_k 2^(n-1-k)`.
//! * `|0>` is spin up (`sigma_z = +1`), `|1>` is spin down.
//! * Energies are in units of the exchange coupling `J`, times in `1/J`.
//!
//! Data-parallel loops (parameter scans, disorder ensembles, bath-strength
//! grids) run on rayon when the default `parallel` feature is on and fall
//! back to plain iterators otherwise; results are identical either way.

pub mod circuits;
pub mod cloner;
pub mod disorder;
pub mod dynamics;
mod error;
pub mod hilbert;
pub mod josephson;
pub mod network;
mod optim;
pub mod par;
pub mod redfield;

pub use error::{Error, Result};

/// Crate version, recorded in run metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;

pub use cloner::{CloneReport, CloneTask};
pub use dynamics::Spectrum;
pub use hilbert::{BlochInput, QuantumState};
pub use network::{HamiltonianSpec, SpinGraph, Topology};
pub use redfield::BathSpec;
