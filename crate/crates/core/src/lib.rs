//! Numerical certification of device-independent randomness from Bell tests on
//! partially entangled two-qubit states.
//!
//! The crate builds the ideal state `cos(θ/2)|00> + sin(θ/2)|11>` and the
//! measurements that attain three Bell expressions, checks the self-test
//! witnesses spectrally, reconstructs qubit POVMs from their correlations with
//! Pauli settings, and constructs an undetectable conjugation attack on
//! schemes where both parties use four-outcome POVMs.
//!
//! Module map:
//! - [`matkernel`]: dense complex linear algebra.
//! - [`qobjects`]: states, observables, POVMs and their constructors.
//! - [`belltest`]: Bell values, spectral self-test, projective two-bit scheme.
//! - [`tomography`]: correlation tables, POVM reconstruction, dilations.
//! - [`adversary`]: the conjugation attack, guessing probability, min-entropy.
//! - [`serial`]: JSON and CSV formats.

pub mod adversary;
pub mod belltest;
pub mod error;
pub mod matkernel;
pub mod paulis;
pub mod qobjects;
pub mod sample;
pub mod serial;
pub mod tol;
pub mod tomography;

pub use error::{Error, Result};
pub use matkernel::{CMat, SubsystemShape, C64};
pub use qobjects::{Angle, Dichotomic, Povm, QState};
