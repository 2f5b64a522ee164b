//! Fictitious-copy error mitigation with the simulators and estimators around it.
//!
//! Squaring and renormalizing measured outcome distributions approximates
//! measuring an observable on two copies of the noisy state. This crate
//! provides that correction, the dense virtual-distillation references it
//! approximates, noisy dense and Pauli-frame simulators to produce data, and
//! the fourth-order computed-moments energy estimator.

pub mod bits;
pub mod frame;
pub mod error;
pub mod experiment;
pub mod io;
pub mod linalg;
pub mod mitigation;
pub mod pauli;
pub mod qcm;
pub mod sim;

pub use bits::BitString;
pub use error::{Error, Result};
pub use pauli::{Basis, PauliString, PauliSum, Tpb};
