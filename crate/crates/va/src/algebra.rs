use std::collections::{BTreeSet, HashMap, VecDeque};

use spanex_core::{Budget, Var};

use crate::automaton::{Label, State, Va};
use crate::VaError;

/// `⟦A1⟧ ∪ ⟦A2⟧` via a fresh initial state.
pub fn va_union(a1: &Va, a2: &Va) -> Va {
    let mut a = Va::new();
    for part in [a1, a2] {
        let off = a.embed(part);
        a.add_transition(0, Label::Eps, off + part.initial());
        for &f in part.finals() {
            a.set_final(off + f);
        }
    }
    a
}

/// Restriction of every mapping to `keep`. Operations of dropped variables
/// become ε, but their status is still tracked so runs misusing them stay
/// rejected.
pub fn va_project(a: &Va, keep: &BTreeSet<Var>, budget: &Budget) -> Result<Va, VaError> {
    let dropped: Vec<Var> = a.mentioned_vars().difference(keep).cloned().collect();
    let mut ids: HashMap<(State, Vec<u8>), State> = HashMap::new();
    let mut out = Va::new();
    let start = (a.initial(), vec![0u8; dropped.len()]);
    ids.insert(start.clone(), 0);
    let mut todo = VecDeque::from([start]);
    while let Some((q, st)) = todo.pop_front() {
        let id = ids[&(q, st.clone())];
        if a.is_final(q) {
            out.set_final(id);
        }
        for (label, to) in a.out(q) {
            let (label, next) = match label.var().and_then(|x| dropped.binary_search(x).ok()) {
                None => (label.clone(), st.clone()),
                Some(i) => {
                    let want = if matches!(label, Label::Open(_)) { 0 } else { 1 };
                    if st[i] != want {
                        continue;
                    }
                    let mut n = st.clone();
                    n[i] += 1;
                    (Label::Eps, n)
                }
            };
            let key = (*to, next);
            let nid = match ids.get(&key) {
                Some(&n) => n,
                None => {
                    let n = out.add_state();
                    budget.check_items(n + 1)?;
                    ids.insert(key.clone(), n);
                    todo.push_back(key);
                    n
                }
            };
            out.add_transition(id, label, nid);
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
enum Pattern {
    /// Both sides bind the variable, to the same span.
    Both,
    /// Only the first side binds it.
    Only1,
    Only2,
    Neither,
}

/// Per shared variable: the guessed pattern and progress.
///
/// Under `Both`, phases are 0 none, 1/2 opened by side 1/2 only (other side
/// pending), 3 both open, 4/5 closed by side 1/2 only (pending), 6 done.
/// Otherwise bits 0 and 1 record a non-binding open by side 1 and side 2.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
struct Sync {
    pattern: Pattern,
    phase: u8,
}

impl Sync {
    fn pending(&self) -> bool {
        self.pattern == Pattern::Both && matches!(self.phase, 1 | 2 | 4 | 5)
    }

    /// Effect of an operation by `side` (0 or 1): the emitted label and the
    /// new phase, or `None` when the operation is not allowed.
    fn step(&self, side: u8, label: &Label) -> Option<(Label, u8)> {
        let open = matches!(label, Label::Open(_));
        let binds = match self.pattern {
            Pattern::Both => true,
            Pattern::Only1 => side == 0,
            Pattern::Only2 => side == 1,
            Pattern::Neither => false,
        };
        if !binds {
            let bit = 1 << side;
            return (open && self.phase & bit == 0).then_some((Label::Eps, self.phase | bit));
        }
        if self.pattern != Pattern::Both {
            // The output run checks this side's use of the variable.
            return Some((label.clone(), self.phase));
        }
        let (first, second) = if open { ((0, 1 + side), (2 - side, 3)) } else { ((3, 4 + side), (5 - side, 6)) };
        if self.phase == first.0 {
            Some((label.clone(), first.1))
        } else if self.phase == second.0 {
            Some((Label::Eps, second.1))
        } else {
            None
        }
    }
}

type JoinKey = (State, State, Vec<Sync>);

/// `⟦A1⟧ ⋈ ⟦A2⟧`: both automata run in parallel on the same letters, and
/// shared variables are opened and closed by both at the same positions.
pub fn va_join(a1: &Va, a2: &Va, budget: &Budget) -> Result<Va, VaError> {
    let shared: Vec<Var> = a1.mentioned_vars().intersection(&a2.mentioned_vars()).cloned().collect();
    budget.check_vars(shared.len())?;
    let combos = 4usize.checked_pow(shared.len() as u32).unwrap_or(usize::MAX);
    budget.check_items(combos)?;
    let mut out = Va::new();
    let mut ids: HashMap<JoinKey, State> = HashMap::new();
    let mut todo: VecDeque<JoinKey> = VecDeque::new();
    let patterns = [Pattern::Both, Pattern::Only1, Pattern::Only2, Pattern::Neither];
    for mut c in 0..combos {
        let mut syncs = Vec::with_capacity(shared.len());
        for _ in 0..shared.len() {
            syncs.push(Sync { pattern: patterns[c % 4], phase: 0 });
            c /= 4;
        }
        let key = (a1.initial(), a2.initial(), syncs);
        let id = out.add_state();
        ids.insert(key.clone(), id);
        out.add_transition(0, Label::Eps, id);
        todo.push_back(key);
    }
    while let Some(key) = todo.pop_front() {
        let id = ids[&key];
        let (q1, q2, syncs) = &key;
        let blocked = syncs.iter().any(Sync::pending);
        if a1.is_final(*q1) && a2.is_final(*q2) && !blocked {
            out.set_final(id);
        }
        let mut moves: Vec<(Label, JoinKey)> = Vec::new();
        if !blocked {
            for (l1, t1) in a1.out(*q1) {
                if let Label::Letter(c) = l1 {
                    for (l2, t2) in a2.out(*q2) {
                        if *l2 == Label::Letter(*c) {
                            moves.push((l1.clone(), (*t1, *t2, syncs.clone())));
                        }
                    }
                }
            }
        }
        for side in 0..2u8 {
            let (a, q) = if side == 0 { (a1, *q1) } else { (a2, *q2) };
            for (label, t) in a.out(q) {
                let target = |syncs: Vec<Sync>| if side == 0 { (*t, *q2, syncs) } else { (*q1, *t, syncs) };
                match label {
                    Label::Letter(_) => {}
                    Label::Eps => moves.push((Label::Eps, target(syncs.clone()))),
                    Label::Open(x) | Label::Close(x) => match shared.binary_search(x) {
                        Err(_) => moves.push((label.clone(), target(syncs.clone()))),
                        Ok(i) => {
                            if let Some((emit, phase)) = syncs[i].step(side, label) {
                                let mut next = syncs.clone();
                                next[i].phase = phase;
                                moves.push((emit, target(next)));
                            }
                        }
                    },
                }
            }
        }
        for (label, next) in moves {
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
