//! Holonomic one- and two-qubit gates on Rydberg superatoms.
//!
//! Frequencies are in rad/μs and times in μs throughout; see [`units`].

pub mod error;
pub mod experiment;
pub mod one_qubit;
pub mod parallel;
pub mod quantum;
pub mod superatom;
pub mod trace;
pub mod two_qubit;
pub mod units;

pub use error::{Error, Result};
pub use parallel::Execution;
pub use trace::{FidelityTrace, TraceRow};
