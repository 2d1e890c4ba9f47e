use std::collections::{BTreeMap, BTreeSet};

use spanex_core::Var;
use spanex_rgx::Rgx;

use crate::graph::{cat, nu, Node, RuleGraph};
use crate::{classify, require, ExtractionRule, RuleError};

/// `doc: x y && x.(z a) && y.(a z)`: `z` would have to lie inside two
/// disjoint spans while avoiding their common endpoint.
pub fn unsatisfiable_rule() -> ExtractionRule {
    let m = Rgx::mention;
    let a = Rgx::Letter('a');
    ExtractionRule::new(
        Rgx::concat(m("x"), m("y")),
        vec![("x".into(), Rgx::concat(m("z"), a.clone())), ("y".into(), Rgx::concat(a, m("z")))],
    )
}

/// Replaces mentions by `f`'s choice and drops the resulting `ε` factors.
fn replace(r: &Rgx, f: &dyn Fn(&Var) -> Option<Rgx>) -> Rgx {
    match r {
        Rgx::Capture(x, b) => f(x).unwrap_or_else(|| Rgx::capture(x.clone(), replace(b, f))),
        Rgx::Concat(a, b) => cat(replace(a, f), replace(b, f)),
        Rgx::Disj(a, b) => {
            let (l, r) = (replace(a, f), replace(b, f));
            if l == r {
                l
            } else {
                Rgx::disj(l, r)
            }
        }
        Rgx::Star(a) => Rgx::star(replace(a, f)),
        Rgx::Eps | Rgx::Letter(_) | Rgx::Any => r.clone(),
    }
}

fn fresh(used: &mut BTreeSet<Var>) -> Var {
    let name = std::iter::once("w".to_string())
        .chain((1..).map(|i| format!("w{i}")))
        .find(|n| !used.contains(n))
        .expect("unbounded names");
    used.insert(name.clone());
    name
}

/// Equivalent dag-like rule for a simple functional rule.
///
/// Variables of a cyclic component all share one span, and everything below
/// them is empty. A simple cycle is broken after its first variable, whose
/// mention in the last body becomes `@*`; any other cyclic component, and
/// anything downstream of a cycle, is forced empty. Mentions of a rewritten
/// component from above are redirected to auxiliary variables `w`, `w1`, ….
///
/// Components never reached from `doc` are rewritten the same way but do not
/// make the rule unsatisfiable, and only force components that are
/// themselves unreached.
pub fn eliminate_cycles(rule: &ExtractionRule) -> Result<ExtractionRule, RuleError> {
    let class = classify(rule);
    require(class.simple, RuleError::NotSimple, rule)?;
    require(class.functional, RuleError::NotFunctional, rule)?;
    let g = RuleGraph::new(rule);
    if g.is_acyclic() {
        return Ok(rule.clone());
    }
    let colours = g.colours(rule);
    let live = g.reachable(&Node::Doc);
    let mut used = rule.vars();
    let mut root = rule.root.clone();
    let mut out: Vec<(Var, Rgx)> = Vec::new();
    let mut forced_live: BTreeSet<Node> = BTreeSet::new();
    let mut forced_any: BTreeSet<Node> = BTreeSet::new();
    let body = |x: &Var| rule.constraint(x).cloned().unwrap_or_else(Rgx::sigma_star);

    for scc in g.sccs() {
        let vars: Vec<Var> = scc
            .iter()
            .filter_map(|n| match n {
                Node::Var(x) => Some(x.clone()),
                Node::Doc => None,
            })
            .collect();
        if vars.is_empty() {
            continue;
        }
        let head = Node::Var(vars[0].clone());
        let is_live = live.contains(&head);
        let cyclic = vars.len() > 1 || g.has_edge(&head, &head);
        let forced = if is_live { forced_live.contains(&head) } else { forced_any.contains(&head) };
        if !cyclic && !forced {
            if let Some(b) = rule.constraint(&vars[0]) {
                out.push((vars[0].clone(), b.clone()));
            }
            continue;
        }
        let red = vars.iter().any(|x| colours[x].is_red());
        if red && is_live {
            return Ok(unsatisfiable_rule());
        }
        if cyclic || forced {
            let members: BTreeSet<&Node> = scc.iter().collect();
            for n in &scc {
                for m in g.reachable(n) {
                    if !members.contains(&m) {
                        if is_live {
                            forced_live.insert(m.clone());
                        }
                        forced_any.insert(m);
                    }
                }
            }
        }
        if red {
            // Never instantiated: dropping the constraints is enough.
            continue;
        }
        let in_scc: BTreeSet<&Var> = vars.iter().collect();
        if !cyclic {
            let y = &vars[0];
            let b = replace(&nu(&body(y)).expect("green"), &|v| (v == y).then_some(Rgx::Eps));
            out.push((y.clone(), b));
            continue;
        }
        let simple_cycle = scc.iter().all(|n| g.successors(n).iter().filter(|m| scc.contains(m)).count() == 1);
        let (order, aux_body): (Vec<Var>, Rgx) = if simple_cycle && !forced {
            let mut order = vec![vars[0].clone()];
            loop {
                let last = Node::Var(order.last().expect("non-empty").clone());
                let next = g.successors(&last).into_iter().find(|m| scc.contains(m)).expect("cycle successor");
                match next {
                    Node::Var(v) if v != order[0] => order.push(v),
                    _ => break,
                }
            }
            let m0 = Rgx::mention(order[0].clone());
            (order, m0)
        } else {
            let all = Rgx::concat_all(vars.iter().cloned().map(Rgx::mention));
            (vars.clone(), all)
        };

        // Redirect mentions from above; a body naming several members gets
        // one auxiliary per member so it stays functional.
        let mut auxes: Vec<Var> = Vec::new();
        let mut redirect = |r: &Rgx, auxes: &mut Vec<Var>| -> Rgx {
            let named: Vec<Var> = r.vars_in_order().into_iter().filter(|v| in_scc.contains(v)).collect();
            while auxes.len() < named.len() {
                auxes.push(fresh(&mut used));
            }
            let map: BTreeMap<Var, Var> = named.into_iter().zip(auxes.iter().cloned()).collect();
            replace(r, &|v| map.get(v).map(|a| Rgx::mention(a.clone())))
        };
        root = redirect(&root, &mut auxes);
        for (_, b) in out.iter_mut() {
            *b = redirect(b, &mut auxes);
        }
        if auxes.is_empty() {
            auxes.push(fresh(&mut used));
        }
        for a in &auxes {
            out.push((a.clone(), aux_body.clone()));
        }
        if simple_cycle && !forced {
            let k = order.len();
            for (j, y) in order.iter().enumerate() {
                let mut b = nu(&body(y)).expect("green");
                if j + 1 == k {
                    b = replace(&b, &|v| (*v == order[0]).then(Rgx::sigma_star));
                }
                out.push((y.clone(), b));
            }
        } else {
            for y in &order {
                let b = replace(&nu(&body(y)).expect("green"), &|v| in_scc.contains(v).then_some(Rgx::Eps));
                out.push((y.clone(), b));
            }
        }
    }
    Ok(ExtractionRule::new(root, out))
}
