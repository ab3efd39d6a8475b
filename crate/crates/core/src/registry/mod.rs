//! Conjecture description language: AST, parser, printer and evaluator.

mod ast;
mod eval;
mod parser;
mod printer;

pub use ast::*;
pub use eval::{r7_factors, recheck_exact, verify, verify_with, CaseResult, CaseStatus, PrimeEnv};
pub use parser::{parse, parse_condition, parse_expr, parse_sum};

/// The registry shipped with the crate.
pub const BUILTIN: &str = include_str!("../../data/builtin.conj");
