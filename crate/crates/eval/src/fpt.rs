use std::collections::HashSet;

use spanex_core::{Binding, Budget, Document, ExtendedMapping, Var};
use spanex_va::{Label, Va};

use crate::EvalError;

const AVAIL: u8 = 0;
const OPEN: u8 = 1;
const CLOSED: u8 = 2;

/// `Eval` for arbitrary automata; exponential only in the number of
/// variables (at most 8 under the default budget).
pub fn eval_decision_fpt(a: &Va, d: &Document, mu: &ExtendedMapping) -> Result<bool, EvalError> {
    eval_decision_fpt_with(a, d, mu, &Budget::fpt())
}

/// Exact search over configurations `(state, position, status of each
/// variable)`. Constrained operations may fire only at their pinned
/// positions; a `⊥` variable may be opened but never closed.
pub fn eval_decision_fpt_with(a: &Va, d: &Document, mu: &ExtendedMapping, budget: &Budget) -> Result<bool, EvalError> {
    mu.check(d)?;
    let vars: Vec<Var> = a.mentioned_vars().into_iter().collect();
    budget.check_vars(vars.len())?;
    if mu.bound().any(|(x, _)| vars.binary_search(x).is_err()) {
        return Ok(false);
    }
    let pins: Vec<Option<Binding>> = vars.iter().map(|x| mu.get(x)).collect();
    let n = d.len();
    let start = (a.initial(), 1usize, vec![AVAIL; vars.len()]);
    let mut seen = HashSet::from([start.clone()]);
    let mut stack = vec![start];
    while let Some((q, pos, st)) = stack.pop() {
        if pos == n + 1
            && a.is_final(q)
            && pins.iter().zip(&st).all(|(p, s)| !matches!(p, Some(Binding::Span(_))) || *s == CLOSED)
        {
            return Ok(true);
        }
        for (label, t) in a.out(q) {
            let next = match label {
                Label::Eps => (*t, pos, st.clone()),
                Label::Letter(c) if d.symbol(pos) == Some(*c) => (*t, pos + 1, st.clone()),
                Label::Letter(_) => continue,
                Label::Open(x) | Label::Close(x) => {
                    let i = vars.binary_search(x).expect("mentioned variable");
                    let open = matches!(label, Label::Open(_));
                    let allowed = match (&pins[i], open) {
                        (_, true) if st[i] != AVAIL => false,
                        (_, false) if st[i] != OPEN => false,
                        (Some(Binding::Span(s)), true) => s.start == pos,
                        (Some(Binding::Span(s)), false) => s.end == pos,
                        (Some(Binding::Bottom), false) => false,
                        _ => true,
                    };
                    if !allowed {
                        continue;
                    }
                    let mut ns = st.clone();
                    ns[i] = if open { OPEN } else { CLOSED };
                    (*t, pos, ns)
                }
            };
            if seen.insert(next.clone()) {
                budget.check_items(seen.len())?;
                stack.push(next);
            }
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use spanex_core::{Alphabet, Span};
    use spanex_rgx::parse_rgx;
    use spanex_va::{compile_rgx, enumerate_runs, Policy};

    #[test]
    fn double_use_agrees_with_runs() {
        // Opens and closes x on both branches of a concatenation.
        let a = compile_rgx(&parse_rgx("(x{a}|b) (x{a}|b)").unwrap(), &Alphabet::new());
        for w in ["aa", "ab", "ba", "bb"] {
            let d = Document::new(w);
            let nonempty = !enumerate_runs(&a, &d, Policy::Set).unwrap().is_empty();
            assert_eq!(eval_decision_fpt(&a, &d, &ExtendedMapping::new()).unwrap(), nonempty, "{w}");
        }
    }

    #[test]
    fn bottom_allows_dangling_open() {
        let mut a = Va::with_states(3);
        a.add_transition(0, Label::Open("x".into()), 1);
        a.add_transition(1, Label::Letter('a'), 2);
        a.set_final(2);
        let d = Document::new("a");
        assert!(eval_decision_fpt(&a, &d, &ExtendedMapping::new().with("x", Binding::Bottom)).unwrap());
        let pinned = ExtendedMapping::new().with("x", Binding::Span(Span::new(1, 2)));
        assert!(!eval_decision_fpt(&a, &d, &pinned).unwrap());
    }

    #[test]
    fn variable_guard() {
        let mut a = Va::with_states(1);
        for i in 0..9 {
            a.add_transition(0, Label::Open(format!("v{i}")), 0);
        }
        a.set_final(0);
        assert!(matches!(
            eval_decision_fpt(&a, &Document::new(""), &ExtendedMapping::new()),
            Err(EvalError::Budget(_))
        ));
    }
}
