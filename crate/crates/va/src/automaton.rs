use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use spanex_core::{Alphabet, Var};

use crate::VaError;

pub type State = usize;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum Label {
    Letter(char),
    Open(Var),
    Close(Var),
    Eps,
}

impl Label {
    pub fn is_op(&self) -> bool {
        matches!(self, Label::Open(_) | Label::Close(_))
    }

    pub fn var(&self) -> Option<&Var> {
        match self {
            Label::Open(x) | Label::Close(x) => Some(x),
            _ => None,
        }
    }
}

impl std::fmt::Display for Label {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Label::Letter(c) => write!(f, "{c:?}"),
            Label::Open(x) => write!(f, "⊢{x}"),
            Label::Close(x) => write!(f, "⊣{x}"),
            Label::Eps => write!(f, "ε"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Transition {
    pub from: State,
    pub label: Label,
    pub to: State,
}

/// A variable-set automaton with a set of final states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Va {
    initial: State,
    finals: BTreeSet<State>,
    out: Vec<Vec<(Label, State)>>,
}

impl Default for Va {
    fn default() -> Self {
        Va::new()
    }
}

impl Va {
    /// One state, which is initial and not final.
    pub fn new() -> Self {
        Va { initial: 0, finals: BTreeSet::new(), out: vec![Vec::new()] }
    }

    pub fn with_states(n: usize) -> Self {
        assert!(n > 0, "an automaton has at least one state");
        Va { initial: 0, finals: BTreeSet::new(), out: vec![Vec::new(); n] }
    }

    pub fn num_states(&self) -> usize {
        self.out.len()
    }

    pub fn initial(&self) -> State {
        self.initial
    }

    pub fn set_initial(&mut self, q: State) {
        assert!(q < self.num_states());
        self.initial = q;
    }

    pub fn finals(&self) -> &BTreeSet<State> {
        &self.finals
    }

    pub fn is_final(&self, q: State) -> bool {
        self.finals.contains(&q)
    }

    pub fn set_final(&mut self, q: State) {
        assert!(q < self.num_states());
        self.finals.insert(q);
    }

    pub fn add_state(&mut self) -> State {
        self.out.push(Vec::new());
        self.out.len() - 1
    }

    /// Adds a transition unless already present.
    pub fn add_transition(&mut self, from: State, label: Label, to: State) {
        assert!(from < self.num_states() && to < self.num_states(), "transition endpoint out of range");
        let edges = &mut self.out[from];
        if !edges.iter().any(|(l, t)| *t == to && *l == label) {
            edges.push((label, to));
        }
    }

    pub fn out(&self, q: State) -> &[(Label, State)] {
        &self.out[q]
    }

    pub fn transitions(&self) -> impl Iterator<Item = Transition> + '_ {
        self.out
            .iter()
            .enumerate()
            .flat_map(|(from, es)| es.iter().map(move |(label, to)| Transition { from, label: label.clone(), to: *to }))
    }

    pub fn num_transitions(&self) -> usize {
        self.out.iter().map(Vec::len).sum()
    }

    /// `var(A)`: variables with an open transition.
    pub fn vars(&self) -> BTreeSet<Var> {
        self.labels()
            .filter_map(|l| match l {
                Label::Open(x) => Some(x.clone()),
                _ => None,
            })
            .collect()
    }

    /// Variables with any operation, including close-only ones.
    pub fn mentioned_vars(&self) -> BTreeSet<Var> {
        self.labels().filter_map(|l| l.var().cloned()).collect()
    }

    pub fn letters(&self) -> Alphabet {
        self.labels()
            .filter_map(|l| match l {
                Label::Letter(c) => Some(*c),
                _ => None,
            })
            .collect()
    }

    pub fn labels(&self) -> impl Iterator<Item = &Label> {
        self.out.iter().flat_map(|es| es.iter().map(|(l, _)| l))
    }

    pub fn has_eps(&self) -> bool {
        self.labels().any(|l| *l == Label::Eps)
    }

    /// Copies every state of `other` into `self`, returning the offset.
    pub fn embed(&mut self, other: &Va) -> usize {
        let offset = self.num_states();
        for _ in 0..other.num_states() {
            self.add_state();
        }
        for t in other.transitions() {
            self.add_transition(t.from + offset, t.label, t.to + offset);
        }
        offset
    }

    /// Equivalent automaton with a single final state reached by ε-edges.
    pub fn to_single_final(&self) -> (Va, State) {
        let mut a = self.clone();
        a.finals.clear();
        let qf = a.add_state();
        for &f in &self.finals {
            a.add_transition(f, Label::Eps, qf);
        }
        a.set_final(qf);
        (a, qf)
    }

    /// States reachable from the initial state that reach a final state.
    pub fn useful_states(&self) -> BTreeSet<State> {
        let n = self.num_states();
        let mut fwd = vec![false; n];
        let mut stack = vec![self.initial];
        fwd[self.initial] = true;
        while let Some(q) = stack.pop() {
            for (_, t) in &self.out[q] {
                if !fwd[*t] {
                    fwd[*t] = true;
                    stack.push(*t);
                }
            }
        }
        let mut rev: Vec<Vec<State>> = vec![Vec::new(); n];
        for t in self.transitions() {
            rev[t.to].push(t.from);
        }
        let mut bwd = vec![false; n];
        let mut stack: Vec<State> = self.finals.iter().copied().collect();
        for &f in &stack {
            bwd[f] = true;
        }
        while let Some(q) = stack.pop() {
            for &p in &rev[q] {
                if !bwd[p] {
                    bwd[p] = true;
                    stack.push(p);
                }
            }
        }
        (0..n).filter(|&q| fwd[q] && bwd[q]).collect()
    }

    /// Removes useless states and renumbers densely; the initial state is
    /// always kept.
    pub fn trim(&self) -> Va {
        let mut keep = self.useful_states();
        keep.insert(self.initial);
        let index: BTreeMap<State, State> = keep.iter().enumerate().map(|(i, q)| (*q, i)).collect();
        let mut a = Va::with_states(keep.len());
        a.initial = index[&self.initial];
        for t in self.transitions() {
            if let (Some(&f), Some(&g)) = (index.get(&t.from), index.get(&t.to)) {
                a.add_transition(f, t.label, g);
            }
        }
        for f in &self.finals {
            if let Some(&g) = index.get(f) {
                a.set_final(g);
            }
        }
        a
    }

    pub fn to_json(&self) -> String {
        let doc = JsonVa {
            states: (0..self.num_states()).map(Value::from).collect(),
            initial: Value::from(self.initial),
            finals: self.finals.iter().map(|&q| Value::from(q)).collect(),
            transitions: self
                .transitions()
                .map(|t| JsonTransition { from: Value::from(t.from), label: t.label, to: Value::from(t.to) })
                .collect(),
        };
        serde_json::to_string(&doc).expect("automaton serializes")
    }

    /// Loads the JSON form. State ids may be numbers or strings and are
    /// renumbered in order of the `states` list. Returns load warnings.
    pub fn from_json(text: &str) -> Result<(Va, Vec<String>), VaError> {
        let doc: JsonVa = serde_json::from_str(text).map_err(|e| VaError::Malformed(e.to_string()))?;
        if doc.states.is_empty() {
            return Err(VaError::Malformed("no states".into()));
        }
        let mut index: BTreeMap<String, State> = BTreeMap::new();
        for (i, s) in doc.states.iter().enumerate() {
            if index.insert(id_key(s)?, i).is_some() {
                return Err(VaError::Malformed(format!("duplicate state {s}")));
            }
        }
        let lookup = |v: &Value| -> Result<State, VaError> {
            index.get(&id_key(v)?).copied().ok_or_else(|| VaError::Malformed(format!("unknown state {v}")))
        };
        let mut a = Va::with_states(doc.states.len());
        a.initial = lookup(&doc.initial)?;
        for f in &doc.finals {
            a.finals.insert(lookup(f)?);
        }
        for t in &doc.transitions {
            a.add_transition(lookup(&t.from)?, t.label.clone(), lookup(&t.to)?);
        }
        let opened = a.vars();
        let warnings = a
            .mentioned_vars()
            .difference(&opened)
            .map(|x| format!("variable {x} is closed but never opened; its close transitions can never fire"))
            .collect();
        Ok((a, warnings))
    }
}

fn id_key(v: &Value) -> Result<String, VaError> {
    match v {
        Value::Number(n) => Ok(format!("n{n}")),
        Value::String(s) => Ok(format!("s{s}")),
        other => Err(VaError::Malformed(format!("state id must be a number or string, got {other}"))),
    }
}

#[derive(Serialize, Deserialize)]
struct JsonVa {
    states: Vec<Value>,
    initial: Value,
    finals: Vec<Value>,
    transitions: Vec<JsonTransition>,
}

#[derive(Serialize, Deserialize)]
struct JsonTransition {
    from: Value,
    label: Label,
    to: Value,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Va {
        let mut a = Va::with_states(4);
        a.add_transition(0, Label::Open("x".into()), 1);
        a.add_transition(1, Label::Letter('a'), 2);
        a.add_transition(2, Label::Close("x".into()), 3);
        a.add_transition(2, Label::Eps, 3);
        a.set_final(3);
        a
    }

    #[test]
    fn json_roundtrip_is_exact() {
        let a = sample();
        let j = a.to_json();
        let (b, warnings) = Va::from_json(&j).unwrap();
        assert!(warnings.is_empty());
        assert_eq!(a, b);
        assert_eq!(b.to_json(), j);
        assert!(j.contains(r#"{"kind":"letter","value":"a"}"#));
        assert!(j.contains(r#"{"kind":"eps"}"#));
    }

    #[test]
    fn loader_remaps_ids_and_warns() {
        let j = r#"{"states":["q0",7,"f"],"initial":"q0","finals":["f"],
            "transitions":[{"from":"q0","label":{"kind":"close","value":"y"},"to":7},
                           {"from":7,"label":{"kind":"letter","value":"b"},"to":"f"}]}"#;
        let (a, warnings) = Va::from_json(j).unwrap();
        assert_eq!(a.num_states(), 3);
        assert!(a.is_final(2));
        assert_eq!(warnings.len(), 1);
        assert!(a.vars().is_empty());
        assert_eq!(a.mentioned_vars().len(), 1);
    }

    #[test]
    fn loader_rejects_unknown_states() {
        let j = r#"{"states":[0],"initial":1,"finals":[],"transitions":[]}"#;
        assert!(Va::from_json(j).is_err());
    }

    #[test]
    fn vars_and_trim() {
        let mut a = sample();
        let dead = a.add_state();
        a.add_transition(0, Label::Letter('z'), dead);
        assert_eq!(a.vars().into_iter().collect::<Vec<_>>(), vec!["x".to_string()]);
        let t = a.trim();
        assert_eq!(t.num_states(), 4);
        assert!(!t.letters().contains(&'z'));
        let (s, qf) = a.to_single_final();
        assert_eq!(s.finals().len(), 1);
        assert!(s.is_final(qf));
    }
}
