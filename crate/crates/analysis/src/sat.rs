use std::collections::{HashMap, VecDeque};

use spanex_core::{Alphabet, Budget, Document, Mapping, Span};
use spanex_rgx::Rgx;
use spanex_rules::{
    dag_to_tree_union_with, eval_rule_oracle_with, to_functional_union_with, tree_rule_witness, ExtractionRule,
};
use spanex_va::{compile_rgx, is_sequential_va, Label, Va};

use crate::{AnalysisError, SatWitness, VarIndex};

/// Outcome of a satisfiability check. `bounded` marks answers obtained by
/// searching documents up to a fixed length only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SatVerdict {
    pub witness: Option<SatWitness>,
    pub bounded: bool,
}

type Key = (usize, u128, u128);

/// Breadth-first search over (state, opened, closed). The first accepting
/// configuration gives a shortest run, whose letters form the document.
pub fn sat_va(a: &Va, budget: &Budget) -> Result<Option<SatWitness>, AnalysisError> {
    let idx = VarIndex::new(a.mentioned_vars(), budget)?;
    let start: Key = (a.initial(), 0, 0);
    let mut parent: HashMap<Key, Option<(Key, Label)>> = HashMap::from([(start, None)]);
    let mut todo = VecDeque::from([start]);
    while let Some(k @ (q, opened, closed)) = todo.pop_front() {
        if a.is_final(q) {
            let mut labels = Vec::new();
            let mut cur = k;
            while let Some((prev, l)) = parent[&cur].clone() {
                labels.push(l);
                cur = prev;
            }
            labels.reverse();
            return Ok(Some(witness_from_labels(&labels)));
        }
        for (label, to) in a.out(q) {
            let next = match label {
                Label::Eps | Label::Letter(_) => Some((*to, opened, closed)),
                Label::Open(x) => {
                    let b = idx.bit(x);
                    (opened & b == 0).then_some((*to, opened | b, closed))
                }
                Label::Close(x) => {
                    let b = idx.bit(x);
                    (opened & b != 0 && closed & b == 0).then_some((*to, opened, closed | b))
                }
            };
            if let Some(n) = next {
                if !parent.contains_key(&n) {
                    parent.insert(n, Some((k, label.clone())));
                    budget.check_items(parent.len())?;
                    todo.push_back(n);
                }
            }
        }
    }
    Ok(None)
}

/// Document and mapping spelled by a valid label sequence; variables left
/// open are not bound.
pub(crate) fn witness_from_labels(labels: &[Label]) -> SatWitness {
    let mut text = Vec::new();
    let mut starts: HashMap<&str, usize> = HashMap::new();
    let mut mapping = Mapping::new();
    for l in labels {
        match l {
            Label::Letter(c) => text.push(*c),
            Label::Open(x) => {
                starts.insert(x, text.len() + 1);
            }
            Label::Close(x) => mapping.insert(x.clone(), Span::new(starts[x.as_str()], text.len() + 1)),
            Label::Eps => {}
        }
    }
    SatWitness { document: Document::from_symbols(text), mapping }
}

/// For sequential automata every path is a valid run, so satisfiability is
/// reachability of a final state.
pub fn sat_seq_va(a: &Va) -> Result<bool, AnalysisError> {
    if !is_sequential_va(a) {
        return Err(AnalysisError::NotSequential);
    }
    let mut seen = vec![false; a.num_states()];
    let mut stack = vec![a.initial()];
    seen[a.initial()] = true;
    while let Some(q) = stack.pop() {
        if a.is_final(q) {
            return Ok(true);
        }
        for (_, to) in a.out(q) {
            if !seen[*to] {
                seen[*to] = true;
                stack.push(*to);
            }
        }
    }
    Ok(false)
}

/// Letters of the expression, or `a` when it has none; `@` can always be
/// read as one of them.
fn witness_alphabet(letters: Alphabet) -> Alphabet {
    if letters.is_empty() {
        Alphabet::from(['a'])
    } else {
        letters
    }
}

pub fn sat_rgx(g: &Rgx, budget: &Budget) -> Result<Option<SatWitness>, AnalysisError> {
    sat_va(&compile_rgx(g, &witness_alphabet(g.letters())), budget)
}

/// Documents searched for rules outside the exact fragment.
const RULE_BOUND: usize = 4;

pub fn sat_rule(rule: &ExtractionRule) -> Result<SatVerdict, AnalysisError> {
    sat_rule_with(rule, &Budget::search())
}

/// Simple rules go through the rewriting pipeline: a functional
/// decomposition, then tree-like unions, each member of which is satisfiable
/// by its pre-order witness. Auxiliary variables are projected away.
/// Other rules fall back to the oracle on documents of length at most 4.
pub fn sat_rule_with(rule: &ExtractionRule, budget: &Budget) -> Result<SatVerdict, AnalysisError> {
    let vars = rule.vars();
    if rule.is_simple() {
        for f in to_functional_union_with(rule, budget)? {
            if let Some(t) = dag_to_tree_union_with(&f, budget)?.into_iter().next() {
                let (document, m) = tree_rule_witness(&t)?;
                return Ok(SatVerdict {
                    witness: Some(SatWitness { document, mapping: m.restrict(&vars) }),
                    bounded: false,
                });
            }
        }
        return Ok(SatVerdict { witness: None, bounded: false });
    }
    let sigma: Vec<char> = witness_alphabet(rule.letters()).into_iter().collect();
    let oracle = Budget::oracle().with_vars(budget.max_vars);
    for n in 0..=RULE_BOUND {
        let total = sigma.len().pow(n as u32);
        for mut code in 0..total {
            let mut text = Vec::with_capacity(n);
            for _ in 0..n {
                text.push(sigma[code % sigma.len()]);
                code /= sigma.len();
            }
            let d = Document::from_symbols(text);
            if let Some(m) = eval_rule_oracle_with(rule, &d, &oracle)?.iter().next() {
                return Ok(SatVerdict { witness: Some(SatWitness { document: d, mapping: m.clone() }), bounded: true });
            }
        }
    }
    Ok(SatVerdict { witness: None, bounded: true })
}

#[cfg(test)]
mod tests {
    use super::*;
    use spanex_rgx::parse_rgx;
    use spanex_rules::parse_rule;
    use spanex_va::{enumerate_runs, Policy};

    #[test]
    fn single_capture() {
        let w = sat_rgx(&parse_rgx("x{a}").unwrap(), &Budget::search()).unwrap().unwrap();
        assert_eq!(w.document, Document::new("a"));
        assert_eq!(w.mapping, Mapping::singleton("x", Span::new(1, 2)));
    }

    #[test]
    fn disjoint_domains_are_unsat() {
        assert_eq!(sat_rgx(&parse_rgx("x{a} x{b}").unwrap(), &Budget::search()).unwrap(), None);
        assert!(sat_rgx(&parse_rgx("(x{a} | b) x{b}").unwrap(), &Budget::search()).unwrap().is_some());
    }

    #[test]
    fn sequential_reachability() {
        let a = compile_rgx(&parse_rgx("x{a*} b").unwrap(), &Alphabet::new());
        assert!(sat_seq_va(&a).unwrap());
        let mut b = Va::with_states(2);
        b.set_final(1);
        assert!(!sat_seq_va(&b).unwrap());
        let c = compile_rgx(&parse_rgx("x{a} x{b}").unwrap(), &Alphabet::new());
        assert_eq!(sat_seq_va(&c), Err(AnalysisError::NotSequential));
    }

    #[test]
    fn witness_is_a_run() {
        let a = compile_rgx(&parse_rgx("a (x{b y{c}} | z{a}) d").unwrap(), &Alphabet::new());
        let w = sat_va(&a, &Budget::search()).unwrap().unwrap();
        assert!(enumerate_runs(&a, &w.document, Policy::Set).unwrap().contains(&w.mapping));
    }

    #[test]
    fn rules() {
        let abcd: Alphabet = "abcd".chars().collect();
        let r = parse_rule("(x @* y) && x.(a z b*) && y.(b* z a) && z.(@*)", &abcd).unwrap();
        let v = sat_rule(&r).unwrap();
        let w = v.witness.unwrap();
        assert!(!v.bounded);
        assert_eq!(w.document, Document::new("aa"));
        assert!(sat_rule(&spanex_rules::unsatisfiable_rule()).unwrap().witness.is_none());
        let r = parse_rule("x && x.(a y a a) && x.(a a z a)", &abcd).unwrap();
        let v = sat_rule(&r).unwrap();
        assert!(v.bounded);
        assert_eq!(v.witness.unwrap().document, Document::new("aaa"));
    }
}
