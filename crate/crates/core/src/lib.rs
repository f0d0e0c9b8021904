//! Exact commuting probabilities of finite groups.
//!
//! Groups are enumerated from a textual descriptor ([`catalog`]), their
//! centralizer structure is compressed into a [`branching::BranchingMatrix`],
//! and `cp_n(G)` for any `n` follows from powers of that matrix.

pub mod branching;
pub mod cache;
pub mod catalog;
pub mod cli;
pub mod error;
pub mod feitfine;
pub mod formulas;
pub mod gf;
pub mod groups;
pub mod oracle;
pub mod rational;

pub use error::{Error, Result};
