use std::collections::{BTreeMap, BTreeSet, VecDeque};

use spanex_core::Budget;

use crate::automaton::{Label, State, Va};
use crate::VaError;

fn eps_closure(a: &Va, set: BTreeSet<State>) -> BTreeSet<State> {
    let mut out = set.clone();
    let mut stack: Vec<State> = set.into_iter().collect();
    while let Some(q) = stack.pop() {
        for (label, to) in a.out(q) {
            if *label == Label::Eps && out.insert(*to) {
                stack.push(*to);
            }
        }
    }
    out
}

/// Subset construction treating variable operations as ordinary symbols.
/// The result is ε-free, deterministic and has the same semantics, since a
/// run's mapping depends only on its label sequence.
pub fn determinize(a: &Va, budget: &Budget) -> Result<Va, VaError> {
    let start = eps_closure(a, BTreeSet::from([a.initial()]));
    let mut ids: BTreeMap<BTreeSet<State>, State> = BTreeMap::new();
    let mut out = Va::new();
    ids.insert(start.clone(), 0);
    let mut todo = VecDeque::from([start]);
    while let Some(set) = todo.pop_front() {
        let id = ids[&set];
        if set.iter().any(|q| a.is_final(*q)) {
            out.set_final(id);
        }
        let mut moves: BTreeMap<Label, BTreeSet<State>> = BTreeMap::new();
        for &q in &set {
            for (label, to) in a.out(q) {
                if *label != Label::Eps {
                    moves.entry(label.clone()).or_default().insert(*to);
                }
            }
        }
        for (label, targets) in moves {
            let next = eps_closure(a, targets);
            let nid = match ids.get(&next) {
                Some(&n) => n,
                None => {
                    let n = out.add_state();
                    budget.check_items(n + 1)?;
                    ids.insert(next.clone(), n);
                    todo.push_back(next);
                    n
                }
            };
            out.add_transition(id, label, nid);
        }
    }
    Ok(out)
}

/// No ε-transitions and at most one successor per state and label.
pub fn is_deterministic(a: &Va) -> bool {
    (0..a.num_states()).all(|q| {
        let mut seen = BTreeSet::new();
        a.out(q).iter().all(|(label, _)| *label != Label::Eps && seen.insert(label))
    })
}
