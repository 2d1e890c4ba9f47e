use std::collections::VecDeque;

use crate::automaton::{Label, Va};

#[derive(Clone, Copy, PartialEq, Eq)]
enum St {
    Avail,
    Open,
    Closed,
    Error,
}

impl St {
    fn idx(self) -> usize {
        self as usize
    }
}

/// Every path from the initial state to a final state opens each variable
/// at most once and, when it does, closes it exactly once afterwards.
///
/// Checked per variable by reachability over `(state, status)`; a final
/// state reached with the variable still open, or after a misuse, is a
/// witness of non-sequentiality.
pub fn is_sequential_va(a: &Va) -> bool {
    a.mentioned_vars().iter().all(|x| {
        let n = a.num_states();
        let mut seen = vec![[false; 4]; n];
        let mut todo = VecDeque::new();
        seen[a.initial()][St::Avail.idx()] = true;
        todo.push_back((a.initial(), St::Avail));
        while let Some((q, st)) = todo.pop_front() {
            if a.is_final(q) && matches!(st, St::Open | St::Error) {
                return false;
            }
            for (label, to) in a.out(q) {
                let next = match label {
                    Label::Open(y) if y == x => {
                        if st == St::Avail {
                            St::Open
                        } else {
                            St::Error
                        }
                    }
                    Label::Close(y) if y == x => {
                        if st == St::Open {
                            St::Closed
                        } else {
                            St::Error
                        }
                    }
                    _ => st,
                };
                if !seen[*to][next.idx()] {
                    seen[*to][next.idx()] = true;
                    todo.push_back((*to, next));
                }
            }
        }
        true
    })
}
