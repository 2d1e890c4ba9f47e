//! Extraction rules: the root expression plus constraints `x.φ` that
//! restrict the content of a variable's span.

mod cycles;
mod graph;
mod rule;
mod semantics;
mod transform;
mod tree_eval;

pub use cycles::{eliminate_cycles, unsatisfiable_rule};
pub use graph::{nu, Colour, Node, RuleGraph};
pub use rule::{parse_rule, ExtractionRule, RuleUnion};
pub use semantics::{eval_rule_oracle, eval_rule_oracle_with, ivar};
pub use transform::{
    dag_to_tree_union, dag_to_tree_union_with, rgx_to_rule_union, to_functional_union, to_functional_union_with, tree_to_rgx,
};
pub use tree_eval::{enumerate_tree_rule, eval_tree_rule, tree_rule_witness};

use spanex_core::{BudgetExceeded, CoreError};
use spanex_rgx::{is_functional, is_sequential, ParseError};
use spanex_va::VaError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RuleError {
    #[error("syntax error at offset {offset}: {source}")]
    Syntax { offset: usize, source: ParseError },
    #[error("not a spanRGX: {0}")]
    NotSpanRgx(String),
    #[error("a rule has a single root, found a second one: {0}")]
    SecondRoot(String),
    #[error("rule is not simple: {0}")]
    NotSimple(String),
    #[error("rule is not functional: {0}")]
    NotFunctional(String),
    #[error("rule is not dag-like: {0}")]
    NotDagLike(String),
    #[error("rule is not tree-like: {0}")]
    NotTreeLike(String),
    #[error("rule is not sequential: {0}")]
    NotSequential(String),
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
    #[error(transparent)]
    Va(#[from] VaError),
    #[error(transparent)]
    Constraint(#[from] CoreError),
}

impl RuleError {
    /// Whether the rule lies outside the fragment an operation requires.
    pub fn is_fragment(&self) -> bool {
        matches!(
            self,
            RuleError::NotSimple(_)
                | RuleError::NotFunctional(_)
                | RuleError::NotDagLike(_)
                | RuleError::NotTreeLike(_)
                | RuleError::NotSequential(_)
        )
    }
}

/// Membership of a rule in the syntactic fragments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RuleClass {
    pub simple: bool,
    pub functional: bool,
    pub sequential: bool,
    pub dag_like: bool,
    pub tree_like: bool,
}

pub fn classify(rule: &ExtractionRule) -> RuleClass {
    let simple = rule.is_simple();
    let g = RuleGraph::new(rule);
    let acyclic = g.is_acyclic();
    RuleClass {
        simple,
        functional: is_functional(&rule.root) && rule.bodies().all(is_functional),
        sequential: is_sequential(&rule.root) && rule.bodies().all(is_sequential),
        dag_like: simple && acyclic,
        tree_like: simple && g.is_tree(),
    }
}

pub fn is_functional_rule(rule: &ExtractionRule) -> bool {
    classify(rule).functional
}

pub fn is_dag_like(rule: &ExtractionRule) -> bool {
    classify(rule).dag_like
}

pub fn is_tree_like(rule: &ExtractionRule) -> bool {
    classify(rule).tree_like
}

pub(crate) fn require(ok: bool, err: impl FnOnce(String) -> RuleError, rule: &ExtractionRule) -> Result<(), RuleError> {
    if ok {
        Ok(())
    } else {
        Err(err(rule.to_string()))
    }
}
