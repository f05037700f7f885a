//! Compiler for error-syndrome-measurement circuits of stabilizer codes on
//! sparse hardware coupling graphs.
//!
//! The pipeline maps a code's data qubits onto physical qubits and allocates
//! a connected ancilla bridge per stabilizer (MaxSAT, [`stage1`]), then
//! schedules the five-phase measurement circuits at minimal depth (iterated
//! SAT, [`stage2`]). A Pauli back-propagation oracle ([`verifier`])
//! independently proves that every emitted circuit measures exactly its
//! stabilizer. Large codes are split into balanced stabilizer subsets that
//! are compiled separately and stitched with SWAP routing ([`partition`]).

pub mod arch;
pub mod circuit;
pub mod code;
pub mod config;
pub mod error;
pub mod partition;
pub mod pipeline;
pub mod stage1;
pub mod stage2;
pub mod tag;
pub mod verifier;

pub use error::{Error, Result};
pub mod cli;
