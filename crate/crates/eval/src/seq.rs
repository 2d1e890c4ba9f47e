use std::collections::{BTreeMap, BTreeSet, VecDeque};

use spanex_core::{Binding, Document, ExtendedMapping};
use spanex_va::{is_sequential_va, Label, Va};

use crate::EvalError;

/// How an edge behaves inside a group once the constraint is fixed.
enum Edge {
    Free,
    /// Operation of a constrained variable, allowed only in its group.
    Group,
    Blocked,
}

fn classify(label: &Label, mu: &ExtendedMapping) -> Edge {
    match label {
        // Letters are consumed between groups, not inside them.
        Label::Letter(_) => Edge::Blocked,
        Label::Eps => Edge::Free,
        Label::Open(x) | Label::Close(x) => match mu.get(x) {
            None => Edge::Free,
            Some(Binding::Bottom) => Edge::Blocked,
            Some(Binding::Span(_)) => Edge::Group,
        },
    }
}

/// `Eval` for sequential automata in polynomial time.
///
/// Constrained operations are grouped by document position. Between two
/// letters the run must take exactly the operations of that position's
/// group, each once, interleaved with ε-moves; sequentiality makes counting
/// them sufficient. The letter word is then simulated on sets of states.
pub fn eval_decision_seq(a: &Va, d: &Document, mu: &ExtendedMapping) -> Result<bool, EvalError> {
    if !is_sequential_va(a) {
        return Err(EvalError::NotSequential);
    }
    mu.check(d)?;
    let mut groups: BTreeMap<usize, BTreeSet<Label>> = BTreeMap::new();
    for (x, s) in mu.bound() {
        groups.entry(s.start).or_default().insert(Label::Open(x.clone()));
        groups.entry(s.end).or_default().insert(Label::Close(x.clone()));
    }
    let empty = BTreeSet::new();
    let mut current: BTreeSet<usize> = BTreeSet::from([a.initial()]);
    for pos in 1..=d.len() + 1 {
        let group = groups.get(&pos).unwrap_or(&empty);
        current = group_step(a, mu, &current, group);
        if let Some(c) = d.symbol(pos) {
            current = current
                .iter()
                .flat_map(|&q| a.out(q).iter())
                .filter(|(l, _)| *l == Label::Letter(c))
                .map(|(_, t)| *t)
                .collect();
        }
        if current.is_empty() {
            return Ok(false);
        }
    }
    Ok(current.iter().any(|q| a.is_final(*q)))
}

/// States reachable from `from` by free moves and exactly `|group|` group
/// operations drawn from `group`.
fn group_step(a: &Va, mu: &ExtendedMapping, from: &BTreeSet<usize>, group: &BTreeSet<Label>) -> BTreeSet<usize> {
    let need = group.len();
    let mut seen: BTreeSet<(usize, usize)> = from.iter().map(|&q| (q, 0)).collect();
    let mut todo: VecDeque<(usize, usize)> = seen.iter().copied().collect();
    while let Some((q, k)) = todo.pop_front() {
        for (label, t) in a.out(q) {
            let next = match classify(label, mu) {
                Edge::Free => (*t, k),
                Edge::Group if k < need && group.contains(label) => (*t, k + 1),
                _ => continue,
            };
            if seen.insert(next) {
                todo.push_back(next);
            }
        }
    }
    seen.into_iter().filter(|&(_, k)| k == need).map(|(q, _)| q).collect()
}
