//! Variable-set automata (VA).
//!
//! States are dense indices `0..n`; final states form a set. Wildcards are
//! expanded against an explicit alphabet at compile time, so every letter
//! transition carries a concrete symbol.

mod algebra;
mod automaton;
mod compile;
mod determinize;
mod elim;
mod paths;
mod runs;
mod sequential;

pub use algebra::{va_join, va_project, va_union};
pub use automaton::{Label, Transition, Va};
pub use compile::compile_rgx;
pub use determinize::{determinize, is_deterministic};
pub use paths::{decompose_paths, path_to_rgx, path_union, sequentialize, va_to_rgx, Op, Path, PathItem};
pub use runs::{enumerate_runs, enumerate_runs_with, Policy};
pub use sequential::is_sequential_va;

use spanex_core::BudgetExceeded;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VaError {
    #[error("malformed automaton: {0}")]
    Malformed(String),
    #[error("automaton is not hierarchical: {0}")]
    NonHierarchical(String),
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
}
