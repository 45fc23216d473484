//! Non-Gaussianity of bosonic quantum states from homodyne quadrature
//! distributions.
//!
//! The library computes the quadrature-negentropy measure N_KL (the maximum
//! negentropy over all linear-network quadrature directions), the quantum
//! relative entropy measure N_QR, Hilbert-Schmidt quantities and their
//! cross bounds, plus a non-Gaussianity-boosted PPT entanglement witness,
//! for one- and two-mode states in a truncated Fock basis.

pub mod bench;
pub mod entanglement;
pub mod error;
pub mod fock;
pub mod gaussian;
pub mod info;
pub mod linalg;
pub mod measures;
pub mod quadrature;
pub mod rng;
pub mod states;

pub use error::{Error, Result};
