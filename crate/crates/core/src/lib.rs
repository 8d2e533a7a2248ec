//! Blackbox identity testing for set-depth arithmetic formulas.
//!
//! The crate builds exact hitting sets from nothing but class parameters,
//! and carries the whole rank-concentration toolkit behind them: Hadamard
//! algebras, transfer matrices, shift constructions, plus brute-force
//! oracles that check each structural claim on small instances.

pub mod algebra;
pub mod concentrate;
pub mod error;
pub mod formula;
pub mod hadamard;
pub mod hitgen;
pub mod oracle;
pub mod sparsepit;
pub mod transfer;
pub mod util;

pub use error::{Error, Result};
