//! Deciding `Eval` and enumerating mappings with polynomial delay.

mod enumerate;
mod fpt;
mod seq;

use std::borrow::Cow;

use spanex_core::{BudgetExceeded, CoreError, Document, ExtendedMapping, Mapping};
use spanex_rgx::Rgx;
use spanex_va::{compile_rgx, is_sequential_va, Va};

pub use enumerate::{delay_audit, enumerate, DelayAudit, Enumerator};
pub use fpt::{eval_decision_fpt, eval_decision_fpt_with};
pub use seq::eval_decision_seq;

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("target is not sequential")]
    NotSequential,
    #[error("invalid constraint: {0}")]
    Constraint(#[from] CoreError),
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
}

/// Something evaluable over a document: an automaton, or an expression
/// compiled on entry. `@` is expanded against the document's own symbols,
/// which is exact for that document.
pub trait Target {
    fn automaton(&self, d: &Document) -> Cow<'_, Va>;
}

impl Target for Va {
    fn automaton(&self, _: &Document) -> Cow<'_, Va> {
        Cow::Borrowed(self)
    }
}

impl Target for Rgx {
    fn automaton(&self, d: &Document) -> Cow<'_, Va> {
        Cow::Owned(compile_rgx(self, &d.alphabet()))
    }
}

/// `Eval`, dispatching to the polynomial procedure when the automaton is
/// sequential and to the FPT search otherwise.
pub fn eval_decision<T: Target + ?Sized>(target: &T, d: &Document, mu: &ExtendedMapping) -> Result<bool, EvalError> {
    let a = target.automaton(d);
    if is_sequential_va(&a) {
        eval_decision_seq(a.as_ref(), d, mu)
    } else {
        eval_decision_fpt(a.as_ref(), d, mu)
    }
}

/// `μ ∈ ⟦γ⟧d`, as `Eval` at `μ_⊥`.
pub fn model_check<T: Target + ?Sized>(target: &T, d: &Document, m: &Mapping) -> Result<bool, EvalError> {
    let a = target.automaton(d);
    let mu = ExtendedMapping::closed_over(m, &a.mentioned_vars());
    eval_decision(a.as_ref(), d, &mu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use spanex_core::Span;
    use spanex_rgx::parse_rgx;

    #[test]
    fn model_check_examples() {
        let g = parse_rgx("x{a*} y{b*}").unwrap();
        let d = Document::new("aaabbb");
        let full = Mapping::from_pairs([("x", Span::new(1, 4)), ("y", Span::new(4, 7))]);
        assert!(model_check(&g, &d, &full).unwrap());
        assert!(!model_check(&g, &d, &Mapping::singleton("x", Span::new(1, 4))).unwrap());
        assert!(model_check(&Rgx::Eps, &Document::new(""), &Mapping::new()).unwrap());
    }

    #[test]
    fn dispatch_handles_non_sequential() {
        let g = parse_rgx("x{a*} x{b*}").unwrap();
        let d = Document::new("aaabbb");
        assert!(!eval_decision(&g, &d, &ExtendedMapping::new()).unwrap());
    }
}
