use std::collections::{BTreeMap, BTreeSet};

use petgraph::algo::{is_cyclic_directed, tarjan_scc};
use petgraph::graph::{DiGraph, NodeIndex};
use petgraph::visit::{Dfs, Reversed};
use petgraph::Direction;

use spanex_core::Var;
use spanex_rgx::Rgx;

use crate::ExtractionRule;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Node {
    Doc,
    Var(Var),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Colour {
    /// The body cannot match the empty word even with empty variables, or
    /// it mentions its own variable, which no mapping can bind twice.
    Black,
    /// Reaches a black node.
    Red,
    Green,
}

impl Colour {
    pub fn is_red(self) -> bool {
        self != Colour::Green
    }
}

/// Edges `x → y` when `y` occurs in a body of `x`, and `doc → x` when `x`
/// occurs in the root.
#[derive(Debug, Clone)]
pub struct RuleGraph {
    graph: DiGraph<Node, ()>,
    index: BTreeMap<Node, NodeIndex>,
}

impl RuleGraph {
    pub fn new(rule: &ExtractionRule) -> Self {
        let mut g = RuleGraph { graph: DiGraph::new(), index: BTreeMap::new() };
        g.node(Node::Doc);
        for x in rule.vars() {
            g.node(Node::Var(x));
        }
        let mut edges = BTreeSet::new();
        for y in rule.root.vars() {
            edges.insert((Node::Doc, Node::Var(y)));
        }
        for (x, b) in &rule.constraints {
            for y in b.vars() {
                edges.insert((Node::Var(x.clone()), Node::Var(y)));
            }
        }
        for (u, v) in edges {
            let (u, v) = (g.index[&u], g.index[&v]);
            g.graph.add_edge(u, v, ());
        }
        g
    }

    fn node(&mut self, n: Node) -> NodeIndex {
        if let Some(&i) = self.index.get(&n) {
            return i;
        }
        let i = self.graph.add_node(n.clone());
        self.index.insert(n, i);
        i
    }

    pub fn nodes(&self) -> impl Iterator<Item = &Node> {
        self.index.keys()
    }

    pub fn edges(&self) -> BTreeSet<(Node, Node)> {
        self.graph
            .edge_indices()
            .map(|e| {
                let (u, v) = self.graph.edge_endpoints(e).expect("edge");
                (self.graph[u].clone(), self.graph[v].clone())
            })
            .collect()
    }

    pub fn has_edge(&self, u: &Node, v: &Node) -> bool {
        self.graph.find_edge(self.index[u], self.index[v]).is_some()
    }

    pub fn successors(&self, n: &Node) -> BTreeSet<Node> {
        self.graph.neighbors_directed(self.index[n], Direction::Outgoing).map(|i| self.graph[i].clone()).collect()
    }

    pub fn predecessors(&self, n: &Node) -> BTreeSet<Node> {
        self.graph.neighbors_directed(self.index[n], Direction::Incoming).map(|i| self.graph[i].clone()).collect()
    }

    pub fn is_acyclic(&self) -> bool {
        !is_cyclic_directed(&self.graph)
    }

    /// Acyclic, every variable has exactly one parent and is reached from
    /// `doc`.
    pub fn is_tree(&self) -> bool {
        self.is_acyclic()
            && self.index.keys().all(|n| *n == Node::Doc || self.predecessors(n).len() == 1)
            && self.reachable(&Node::Doc).len() == self.index.len()
    }

    pub fn reachable(&self, from: &Node) -> BTreeSet<Node> {
        let mut dfs = Dfs::new(&self.graph, self.index[from]);
        let mut out = BTreeSet::new();
        while let Some(i) = dfs.next(&self.graph) {
            out.insert(self.graph[i].clone());
        }
        out
    }

    /// Strongly connected components, upstream components first.
    pub fn sccs(&self) -> Vec<Vec<Node>> {
        let mut out: Vec<Vec<Node>> = tarjan_scc(&self.graph)
            .into_iter()
            .map(|c| {
                let mut c: Vec<Node> = c.into_iter().map(|i| self.graph[i].clone()).collect();
                c.sort();
                c
            })
            .collect();
        out.reverse();
        out
    }

    /// Black nodes, and red for everything reaching one.
    pub fn colours(&self, rule: &ExtractionRule) -> BTreeMap<Var, Colour> {
        let mut out: BTreeMap<Var, Colour> = BTreeMap::new();
        for n in self.index.keys() {
            if let Node::Var(x) = n {
                let black = rule.constraint(x).is_some_and(|b| nu(b).is_none() || b.vars().contains(x));
                out.insert(x.clone(), if black { Colour::Black } else { Colour::Green });
            }
        }
        let rev = Reversed(&self.graph);
        let blacks: Vec<Var> = out.iter().filter(|(_, c)| **c == Colour::Black).map(|(x, _)| x.clone()).collect();
        for x in blacks {
            let mut dfs = Dfs::new(rev, self.index[&Node::Var(x)]);
            while let Some(i) = dfs.next(rev) {
                if let Node::Var(y) = &self.graph[i] {
                    let c = out.get_mut(y).expect("coloured");
                    if *c == Colour::Green {
                        *c = Colour::Red;
                    }
                }
            }
        }
        out
    }
}

pub(crate) fn cat(a: Rgx, b: Rgx) -> Rgx {
    match (a, b) {
        (Rgx::Eps, b) => b,
        (a, Rgx::Eps) => a,
        (a, b) => Rgx::concat(a, b),
    }
}

/// `ν`: letters become `∅` (here `None`), stars become `ε` and mentions are
/// kept, so `ν(φ) = ∅` exactly when every word of `φ` carries a letter of its
/// own.
pub fn nu(g: &Rgx) -> Option<Rgx> {
    match g {
        Rgx::Eps | Rgx::Star(_) => Some(Rgx::Eps),
        Rgx::Letter(_) | Rgx::Any => None,
        Rgx::Capture(x, _) => Some(Rgx::mention(x.clone())),
        Rgx::Concat(a, b) => Some(cat(nu(a)?, nu(b)?)),
        Rgx::Disj(a, b) => match (nu(a), nu(b)) {
            (Some(l), Some(r)) if l == r => Some(l),
            (Some(l), Some(r)) => Some(Rgx::disj(l, r)),
            (l, r) => l.or(r),
        },
    }
}
