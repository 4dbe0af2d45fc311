// SPDX-License-Identifier: Apache-2.0

//! Stabilizer-group tools for GHZ-type hyperentangled photon states.
//!
//! - [`pauli`]: exact Pauli-string arithmetic and a dense-matrix oracle.
//! - [`stabilizer`]: GHZ block generators, Gray-code group enumeration and
//!   negative-sign counts.
//! - [`closed_forms`]: binomial and four-branch closed forms and the ten
//!   state-comparison differences.
//! - [`bell`]: Bell-operator values, all-plus bounds and local hidden variable
//!   maxima.
//! - [`photonic`]: exact amplitude simulation of the four-photon generation
//!   protocol.
//! - [`report`]: report assembly for the command-line front end.

pub mod bell;
pub mod closed_forms;
pub mod error;
pub mod pauli;
pub mod photonic;
pub mod report;
pub mod stabilizer;

pub use bell::{Assignment, BellReport, Observable};
pub use error::{Error, Result};
pub use pauli::{DenseOperator, GaussInt, Letter, PauliString, Sign};
pub use photonic::{AmplitudeState, Scenario};
pub use stabilizer::{
    count_negative, count_negative_closed, element_for_subset, enumerate_group, generators, EnumOptions, GhzBlock,
    HyperState, StabilizerElement,
};
