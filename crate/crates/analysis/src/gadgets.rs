//! Reductions from NP- and coNP-hard problems, used as test generators.

use std::collections::BTreeSet;

use spanex_rgx::Rgx;
use spanex_rules::ExtractionRule;
use spanex_va::{Label, Va};

use crate::AnalysisError;

fn check_distinct<T: Ord + Copy + std::fmt::Debug>(i: usize, lits: [T; 3]) -> Result<(), AnalysisError> {
    if BTreeSet::from(lits).len() < 3 {
        return Err(AnalysisError::MalformedClause(format!("clause {} repeats a variable: {lits:?}", i + 1)));
    }
    Ok(())
}

fn x_var(i: usize, j: usize) -> String {
    format!("x_{}_{}", i + 1, j + 1)
}

fn y_var(i: usize, j: usize, k: usize, l: usize) -> String {
    format!("y_{}_{}_{}_{}", i + 1, j + 1, k + 1, l + 1)
}

/// `p_{i,j}` conflicts with `p_{k,l}` when `i < k` and making the first
/// true forces the second false.
fn conflict(clauses: &[[usize; 3]], i: usize, j: usize, k: usize, l: usize) -> bool {
    i < k && (0..3).any(|m| (clauses[i][j] == clauses[k][m] && m != l) || (clauses[i][m] == clauses[k][l] && m != j))
}

/// Expression over positive 1-in-3 clauses that is satisfiable, on the empty
/// document, exactly when some assignment makes one literal per clause true.
/// `x_i_j` marks the chosen literal of clause i; `y_i_j_k_l` records a
/// conflict and may be bound only once.
pub fn gadget_1in3_spanrgx(clauses: &[[usize; 3]]) -> Result<Rgx, AnalysisError> {
    for (i, c) in clauses.iter().enumerate() {
        check_distinct(i, *c)?;
    }
    let n = clauses.len();
    let gamma = |i: usize| {
        let branches = (0..3).map(|j| {
            let mut parts = vec![Rgx::mention(x_var(i, j))];
            for k in 0..n {
                for l in 0..3 {
                    if conflict(clauses, i, j, k, l) {
                        parts.push(Rgx::mention(y_var(i, j, k, l)));
                    }
                    if conflict(clauses, k, l, i, j) {
                        parts.push(Rgx::mention(y_var(k, l, i, j)));
                    }
                }
            }
            Rgx::concat_all(parts)
        });
        Rgx::disj_all(branches).expect("three branches")
    };
    Ok(Rgx::concat_all((0..n).map(gamma)))
}

/// Functional dag-like rule that matches the document `#` exactly when the
/// clauses have a 1-in-3 assignment. Variables spanning `(1,1)` are true.
pub fn gadget_1in3_rule(clauses: &[[usize; 3]]) -> Result<ExtractionRule, AnalysisError> {
    for (i, c) in clauses.iter().enumerate() {
        check_distinct(i, *c)?;
    }
    let m = |x: &str| Rgx::mention(x);
    let p = |v: usize| m(&format!("p{v}"));
    let c = |i: usize| format!("c{}", i + 1);
    let mut rule = ExtractionRule::plain(Rgx::concat_all([m("T"), m(&c(0)), m("F")]));
    let middle = Rgx::concat_all([m("T"), Rgx::letter('#'), m("F")]);
    if clauses.is_empty() {
        return Ok(rule.with(c(0), middle));
    }
    for (i, cl) in clauses.iter().enumerate() {
        let inner = if i + 1 == clauses.len() { middle.clone() } else { m(&c(i + 1)) };
        let branches = (0..3).map(|j| {
            let rest = (0..3).filter(|&o| o != j).map(|o| p(cl[o]));
            Rgx::concat_all([p(cl[j]), inner.clone()].into_iter().chain(rest))
        });
        rule = rule.with(c(i), Rgx::disj_all(branches).expect("three branches"));
    }
    Ok(rule)
}

/// Automaton with a run on the empty document exactly when the directed
/// graph on `0..n` has a Hamiltonian path. All variables are opened at the
/// start; the order of the closes spells the path.
pub fn gadget_hamiltonian(n: usize, edges: &[(usize, usize)]) -> Va {
    let x = |v: usize| format!("x{v}");
    let mut a = Va::with_states(2 + n * n);
    let (q0, qf) = (0, 1);
    let p = |v: usize, i: usize| 2 + v * n + i;
    a.set_final(qf);
    for v in 0..n {
        a.add_transition(q0, Label::Open(x(v)), q0);
        a.add_transition(q0, Label::Close(x(v)), p(v, 0));
        a.add_transition(p(v, n - 1), Label::Eps, qf);
    }
    for &(u, v) in edges {
        for i in 0..n.saturating_sub(1) {
            a.add_transition(p(u, i), Label::Close(x(v)), p(v, i + 1));
        }
    }
    a
}

/// Opens and closes `x` in succession through a fresh middle state.
fn touch(a: &mut Va, from: usize, x: &str, to: usize) {
    let r = a.add_state();
    a.add_transition(from, Label::Open(x.to_string()), r);
    a.add_transition(r, Label::Close(x.to_string()), to);
}

fn literal(l: i32) -> String {
    if l > 0 {
        format!("p{l}")
    } else {
        format!("np{}", -l)
    }
}

/// Deterministic sequential automata `(A1, A2)` with `⟦A1⟧ ⊆ ⟦A2⟧` exactly
/// when the 3-DNF over `p1..pn` is valid. Literals are signed variable
/// indices. `A1` binds one of `p_i`, `np_i` per variable and then every
/// clause variable; branch i of `A2` accepts the valuations satisfying
/// clause i.
pub fn gadget_dnf_containment(n: usize, clauses: &[[i32; 3]]) -> Result<(Va, Va), AnalysisError> {
    for (i, c) in clauses.iter().enumerate() {
        check_distinct(i, c.map(i32::unsigned_abs))?;
        if let Some(l) = c.iter().find(|l| **l == 0 || l.unsigned_abs() as usize > n) {
            return Err(AnalysisError::MalformedClause(format!("clause {} has literal {l} outside 1..={n}", i + 1)));
        }
    }
    let cv = |i: usize| format!("c{}", i + 1);
    let mut a1 = Va::with_states(1);
    let mut cur = 0;
    for v in 1..=n as i32 {
        let next = a1.add_state();
        touch(&mut a1, cur, &literal(v), next);
        touch(&mut a1, cur, &literal(-v), next);
        cur = next;
    }
    for i in 0..clauses.len() {
        let next = a1.add_state();
        touch(&mut a1, cur, &cv(i), next);
        cur = next;
    }
    a1.set_final(cur);

    let mut a2 = Va::with_states(2);
    a2.set_final(1);
    for (i, cl) in clauses.iter().enumerate() {
        let mut steps: Vec<Vec<String>> = vec![vec![cv(i)]];
        steps.extend(cl.iter().map(|l| vec![literal(*l)]));
        let used: BTreeSet<u32> = cl.iter().map(|l| l.unsigned_abs()).collect();
        for v in (1..=n as i32).filter(|v| !used.contains(&v.unsigned_abs())) {
            steps.push(vec![literal(v), literal(-v)]);
        }
        steps.extend((0..clauses.len()).filter(|&k| k != i).map(|k| vec![cv(k)]));
        let mut cur = 0;
        let last = steps.len() - 1;
        for (s, xs) in steps.iter().enumerate() {
            let next = if s == last { 1 } else { a2.add_state() };
            for x in xs {
                touch(&mut a2, cur, x, next);
            }
            cur = next;
        }
    }
    Ok((a1, a2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use spanex_core::{Budget, Document};
    use spanex_rules::eval_rule_oracle_with;
    use spanex_va::{is_deterministic, is_sequential_va};

    use crate::{containment_general, sat_rgx, sat_va};

    #[test]
    fn conflict_example() {
        // p_{1,1} = p_{2,1} conflicts with p_{2,2}.
        let clauses = [[1, 2, 3], [1, 4, 5]];
        assert!(conflict(&clauses, 0, 0, 1, 1));
        assert!(!conflict(&clauses, 0, 0, 1, 0));
        assert!(conflict(&clauses, 0, 1, 1, 0));
        let g = gadget_1in3_spanrgx(&clauses).unwrap();
        assert!(g.to_string().contains("y_1_1_2_2"));
    }

    #[test]
    fn spanrgx_small_cases() {
        let b = Budget::search();
        assert_eq!(gadget_1in3_spanrgx(&[]).unwrap(), Rgx::Eps);
        assert!(sat_rgx(&gadget_1in3_spanrgx(&[[1, 2, 3]]).unwrap(), &b).unwrap().is_some());
        // Each of p1, p2 forces the other false and p3 false, but clause 3 needs one of them.
        let unsat = [[1, 2, 3], [1, 2, 4], [3, 4, 1], [3, 4, 2]];
        assert!(sat_rgx(&gadget_1in3_spanrgx(&unsat).unwrap(), &b).unwrap().is_none());
        assert!(matches!(gadget_1in3_spanrgx(&[[1, 1, 2]]), Err(AnalysisError::MalformedClause(_))));
    }

    #[test]
    fn rule_small_cases() {
        let hash = Document::new("#");
        let budget = Budget::oracle().with_vars(16);
        let sat = |c: &[[usize; 3]]| !eval_rule_oracle_with(&gadget_1in3_rule(c).unwrap(), &hash, &budget).unwrap().is_empty();
        assert!(sat(&[]));
        assert!(sat(&[[1, 2, 3]]));
        assert!(sat(&[[1, 2, 3], [1, 4, 5]]));
        assert!(!sat(&[[1, 2, 3], [1, 2, 4], [3, 4, 1], [3, 4, 2]]));
        let r = gadget_1in3_rule(&[[1, 2, 3], [3, 4, 5]]).unwrap();
        assert!(crate::sat::sat_rule(&r).unwrap().witness.is_some());
        assert!(crate::classify(&r).functional && crate::classify(&r).dag_like);
    }

    #[test]
    fn hamiltonian_triangle() {
        let a = gadget_hamiltonian(3, &[(0, 1), (0, 2), (1, 2)]);
        let w = sat_va(&a, &Budget::search()).unwrap().unwrap();
        assert_eq!(w.document, Document::new(""));
        assert_eq!(w.mapping.len(), 3);
        assert!(sat_va(&gadget_hamiltonian(2, &[]), &Budget::search()).unwrap().is_none());
        assert!(sat_va(&gadget_hamiltonian(3, &[(0, 1), (0, 2)]), &Budget::search()).unwrap().is_none());
    }

    #[test]
    fn dnf_cases() {
        let b = Budget::search();
        let taut = [[1, 2, 3], [1, -2, 3], [-1, 2, 3], [-1, -2, 3], [1, 2, -3], [1, -2, -3], [-1, 2, -3], [-1, -2, -3]];
        let (a1, a2) = gadget_dnf_containment(3, &taut).unwrap();
        assert!(is_deterministic(&a1) && is_deterministic(&a2));
        assert!(is_sequential_va(&a1) && is_sequential_va(&a2));
        assert!(containment_general(&a1, &a2, &b).unwrap().holds());
        let (a1, a2) = gadget_dnf_containment(3, &[[1, 2, 3]]).unwrap();
        assert!(!containment_general(&a1, &a2, &b).unwrap().holds());
        let (a1, a2) = gadget_dnf_containment(3, &[]).unwrap();
        assert!(!containment_general(&a1, &a2, &b).unwrap().holds());
        assert!(gadget_dnf_containment(3, &[[1, -1, 2]]).is_err());
        assert!(gadget_dnf_containment(2, &[[1, 2, 3]]).is_err());
    }
}
