//! Numerical verification of binomial-sum supercongruences.

pub mod error;
pub mod exact;
pub mod fit;
pub mod modular;
pub mod padic;
pub mod quadform;
pub mod registry;
pub mod runner;
pub mod selftest;
pub mod sequences;
pub mod special;
