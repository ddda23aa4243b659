//! Test support: seeded random model generators and brute-force oracles.
//!
//! The oracles here deliberately share no code with the library's
//! algorithms; they enumerate subsets and recompute fixed points from the
//! plain definitions.

pub mod dot;
pub mod gen;
pub mod oracle;

pub use gen::{random_adoption, random_model, upgrade, GenConfig};
