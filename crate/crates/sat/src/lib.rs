//! SAT infrastructure for constraint-based circuit synthesis.
//!
//! This crate provides the Boolean layer that the compiler stages build on:
//!
//! - [`Cnf`] / [`Wcnf`] clause databases with a typed [`VarRegistry`] mapping
//!   solver variables back to their semantic roles,
//! - cardinality, parity and ordering encodings ([`encode`]),
//! - an incremental CDCL solver with assumptions, phase hints and deadlines
//!   ([`Solver`]),
//! - a stratified linear-search MaxSAT engine ([`maxsat`]),
//! - DIMACS CNF/WCNF export and parsing ([`dimacs`]) plus an external-solver
//!   process hook ([`external`]).
//!
//! The solver is deliberately not competitive with modern CDCL engines; it is
//! a sound and complete backend with deterministic behaviour, which is what
//! the synthesis pipeline needs for reproducible artifacts.

pub mod check;
pub mod dimacs;
pub mod encode;
pub mod external;
pub mod maxsat;
pub mod registry;
pub mod solver;
pub mod types;

pub use maxsat::{solve_maxsat, MaxSatOptions, MaxSatResult};
pub use registry::{AuxTag, Builder, VarRegistry};
pub use solver::{SolveOutcome, Solver};
pub use types::{Lit, Model, SoftClause, Var, Wcnf};

/// Errors produced by the SAT layer.
#[derive(Debug, thiserror::Error)]
pub enum SatError {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("hard clauses are unsatisfiable")]
    HardUnsat,
    #[error("malformed DIMACS input: {0}")]
    Dimacs(String),
    #[error("external solver failure: {0}")]
    External(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
