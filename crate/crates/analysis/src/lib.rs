//! Static analysis of spanners: satisfiability, containment and
//! point-disjointness, plus the reductions used to show hardness.

pub use spanex_rules::classify;

mod containment;
mod gadgets;
mod sat;

pub use containment::{containment_det_seq_pd, containment_general, point_disjoint_check, Containment, MacroState};
pub use gadgets::{gadget_1in3_rule, gadget_1in3_spanrgx, gadget_dnf_containment, gadget_hamiltonian};
pub use sat::{sat_rgx, sat_rule, sat_rule_with, sat_seq_va, sat_va, SatVerdict};

use spanex_core::{BudgetExceeded, Document, Mapping};
use spanex_rules::RuleError;
use spanex_va::VaError;

/// A document and a mapping produced on it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SatWitness {
    pub document: Document,
    pub mapping: Mapping,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AnalysisError {
    #[error("automaton is not sequential")]
    NotSequential,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("malformed clause: {0}")]
    MalformedClause(String),
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
    #[error(transparent)]
    Va(#[from] VaError),
    #[error(transparent)]
    Rule(#[from] RuleError),
}

/// Bit index of each variable; at most 128.
pub(crate) struct VarIndex(Vec<String>);

impl VarIndex {
    pub(crate) fn new<I: IntoIterator<Item = String>>(vars: I, budget: &spanex_core::Budget) -> Result<Self, BudgetExceeded> {
        let mut v: Vec<String> = vars.into_iter().collect();
        v.sort();
        v.dedup();
        budget.check_vars(v.len())?;
        spanex_core::Budget::unlimited().with_vars(128).check_vars(v.len())?;
        Ok(VarIndex(v))
    }

    pub(crate) fn bit(&self, x: &str) -> u128 {
        1u128 << self.0.binary_search_by(|v| v.as_str().cmp(x)).expect("indexed variable")
    }

    pub(crate) fn names(&self, mask: u128) -> impl Iterator<Item = &String> {
        self.0.iter().enumerate().filter(move |(i, _)| mask >> i & 1 == 1).map(|(_, x)| x)
    }

    pub(crate) fn all(&self) -> u128 {
        if self.0.len() == 128 {
            u128::MAX
        } else {
            (1u128 << self.0.len()) - 1
        }
    }
}
