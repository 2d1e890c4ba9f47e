use spanex_core::Alphabet;
use spanex_rgx::Rgx;

use crate::automaton::{Label, State, Va};

/// Thompson-style compilation. State 0 is initial, state 1 is the only
/// final state; `@` becomes one letter transition per symbol of `sigma`.
pub fn compile_rgx(g: &Rgx, sigma: &Alphabet) -> Va {
    let mut a = Va::with_states(2);
    a.set_final(1);
    fragment(&mut a, g, sigma, 0, 1);
    a
}

/// Wires `g` between `from` and `to`. No fragment adds edges leaving `to`
/// or entering `from`, so fragments can share their endpoints.
fn fragment(a: &mut Va, g: &Rgx, sigma: &Alphabet, from: State, to: State) {
    match g {
        Rgx::Eps => a.add_transition(from, Label::Eps, to),
        Rgx::Letter(c) => a.add_transition(from, Label::Letter(*c), to),
        Rgx::Any => {
            for &c in sigma {
                a.add_transition(from, Label::Letter(c), to);
            }
        }
        Rgx::Capture(x, body) => {
            let s = a.add_state();
            let t = a.add_state();
            a.add_transition(from, Label::Open(x.clone()), s);
            fragment(a, body, sigma, s, t);
            a.add_transition(t, Label::Close(x.clone()), to);
        }
        Rgx::Concat(l, r) => {
            let mid = a.add_state();
            fragment(a, l, sigma, from, mid);
            fragment(a, r, sigma, mid, to);
        }
        Rgx::Disj(l, r) => {
            fragment(a, l, sigma, from, to);
            fragment(a, r, sigma, from, to);
        }
        Rgx::Star(body) => {
            let p = a.add_state();
            a.add_transition(from, Label::Eps, p);
            fragment(a, body, sigma, p, p);
            a.add_transition(p, Label::Eps, to);
        }
    }
}
