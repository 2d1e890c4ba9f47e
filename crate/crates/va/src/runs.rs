use std::collections::HashSet;

use spanex_core::{Budget, BudgetExceeded, Document, Mapping, MappingSet, Span, Var};

use crate::automaton::{Label, State, Va};

/// Discipline imposed on variable operations along a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Policy {
    /// Each variable is opened at most once and closed at most once, after
    /// its open.
    Set,
    /// As `Set`, and closes follow the LIFO order of opens.
    Stack,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum St {
    Avail,
    Open(usize),
    Closed(usize, usize),
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct Config {
    q: State,
    pos: usize,
    status: Vec<St>,
    stack: Vec<u16>,
}

/// `⟦A⟧ᵈ` by exhaustive search over run configurations.
pub fn enumerate_runs(a: &Va, d: &Document, policy: Policy) -> Result<MappingSet, BudgetExceeded> {
    enumerate_runs_with(a, d, policy, &Budget::search())
}

pub fn enumerate_runs_with(a: &Va, d: &Document, policy: Policy, budget: &Budget) -> Result<MappingSet, BudgetExceeded> {
    let vars: Vec<Var> = a.mentioned_vars().into_iter().collect();
    budget.check_vars(vars.len())?;
    let idx = |x: &Var| vars.binary_search(x).expect("variable indexed");
    let n = d.len();
    let start = Config { q: a.initial(), pos: 0, status: vec![St::Avail; vars.len()], stack: Vec::new() };
    let mut seen: HashSet<Config> = HashSet::new();
    let mut todo = vec![start.clone()];
    seen.insert(start);
    let mut out = MappingSet::new();
    while let Some(c) = todo.pop() {
        if c.pos == n && a.is_final(c.q) {
            let mut m = Mapping::new();
            for (i, st) in c.status.iter().enumerate() {
                if let St::Closed(s, e) = st {
                    m.insert(vars[i].clone(), Span::new(s + 1, e + 1));
                }
            }
            out.insert(m);
        }
        for (label, to) in a.out(c.q) {
            let next = match label {
                Label::Eps => Some(Config { q: *to, ..c.clone() }),
                Label::Letter(ch) => (c.pos < n && d.symbols()[c.pos] == *ch)
                    .then(|| Config { q: *to, pos: c.pos + 1, ..c.clone() }),
                Label::Open(x) => {
                    let i = idx(x);
                    (c.status[i] == St::Avail).then(|| {
                        let mut nc = Config { q: *to, ..c.clone() };
                        nc.status[i] = St::Open(c.pos);
                        if policy == Policy::Stack {
                            nc.stack.push(i as u16);
                        }
                        nc
                    })
                }
                Label::Close(x) => {
                    let i = idx(x);
                    match c.status[i] {
                        St::Open(s) if policy == Policy::Set || c.stack.last() == Some(&(i as u16)) => {
                            let mut nc = Config { q: *to, ..c.clone() };
                            nc.status[i] = St::Closed(s, c.pos);
                            if policy == Policy::Stack {
                                nc.stack.pop();
                            }
                            Some(nc)
                        }
                        _ => None,
                    }
                }
            };
            if let Some(nc) = next {
                if !seen.contains(&nc) {
                    seen.insert(nc.clone());
                    budget.check_items(seen.len())?;
                    todo.push(nc);
                }
            }
        }
    }
    Ok(out)
}
