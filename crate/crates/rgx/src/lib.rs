//! Variable regex (RGX).
//!
//! The AST, a concrete syntax with a parser and printer, the brute-force
//! pair semantics used as the reference oracle, and the syntactic classes
//! (functional, sequential, spanRGX).

mod ast;
mod classify;
#[cfg(feature = "gen")]
pub mod gen;
mod parse;
mod print;
mod semantics;

pub use ast::Rgx;
pub use classify::{is_functional, is_functional_wrt, is_sequential, is_span_rgx};
pub use parse::{parse_rgx, parse_rgx_over, parse_span_rgx, ParseError};
pub use semantics::{dot_semantics, eval_rgx, eval_rgx_with, pair_semantics, pair_semantics_with, PairSemantics};

use spanex_core::BudgetExceeded;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RgxError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
}
