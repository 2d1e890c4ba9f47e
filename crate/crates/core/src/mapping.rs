use std::collections::{btree_map, btree_set, BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{CoreError, Document, Span, Var};

/// A partial function from variables to spans.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Mapping(BTreeMap<Var, Span>);

impl Mapping {
    pub fn new() -> Self {
        Mapping(BTreeMap::new())
    }

    /// `[x -> s]`.
    pub fn singleton(x: impl Into<Var>, s: Span) -> Self {
        let mut m = Mapping::new();
        m.0.insert(x.into(), s);
        m
    }

    pub fn from_pairs<I, V>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (V, Span)>,
        V: Into<Var>,
    {
        Mapping(pairs.into_iter().map(|(v, s)| (v.into(), s)).collect())
    }

    pub fn get(&self, x: &str) -> Option<Span> {
        self.0.get(x).copied()
    }

    /// Binds `x`, replacing any previous binding.
    pub fn insert(&mut self, x: impl Into<Var>, s: Span) {
        self.0.insert(x.into(), s);
    }

    pub fn remove(&mut self, x: &str) -> Option<Span> {
        self.0.remove(x)
    }

    pub fn contains_var(&self, x: &str) -> bool {
        self.0.contains_key(x)
    }

    pub fn dom(&self) -> BTreeSet<Var> {
        self.0.keys().cloned().collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> btree_map::Iter<'_, Var, Span> {
        self.0.iter()
    }

    pub fn compatible(&self, other: &Mapping) -> bool {
        compatible(self, other)
    }

    /// Domain restriction to `vars`.
    pub fn restrict<'a, I>(&self, vars: I) -> Mapping
    where
        I: IntoIterator<Item = &'a Var>,
    {
        let keep: BTreeSet<&Var> = vars.into_iter().collect();
        Mapping(self.0.iter().filter(|(k, _)| keep.contains(k)).map(|(k, v)| (k.clone(), *v)).collect())
    }

    /// Renders the mapping with span contents, for messages.
    pub fn describe(&self, d: &Document) -> String {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(x, s)| format!("{x}={s}:{:?}", d.content(*s).unwrap_or_default()))
            .collect();
        format!("{{{}}}", parts.join(", "))
    }
}

impl fmt::Display for Mapping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (x, s)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x}->{s}")?;
        }
        f.write_str("}")
    }
}

impl<'a> IntoIterator for &'a Mapping {
    type Item = (&'a Var, &'a Span);
    type IntoIter = btree_map::Iter<'a, Var, Span>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// `μ1 ~ μ2`: agreement on every shared variable.
pub fn compatible(m1: &Mapping, m2: &Mapping) -> bool {
    let (small, large) = if m1.len() <= m2.len() { (m1, m2) } else { (m2, m1) };
    small.0.iter().all(|(x, s)| large.0.get(x).is_none_or(|t| t == s))
}

/// `μ1 ∪ μ2` for compatible mappings.
pub fn merge(m1: &Mapping, m2: &Mapping) -> Result<Mapping, CoreError> {
    let mut out = m1.clone();
    for (x, s) in &m2.0 {
        match out.0.get(x) {
            Some(t) if t != s => return Err(CoreError::IncompatibleMappings(x.clone())),
            _ => {
                out.0.insert(x.clone(), *s);
            }
        }
    }
    Ok(out)
}

/// Every pair of bound spans is nested or disjoint.
pub fn is_hierarchical(m: &Mapping) -> bool {
    let spans: Vec<Span> = m.0.values().copied().collect();
    spans.iter().enumerate().all(|(i, a)| {
        spans[i + 1..].iter().all(|b| a.contains(*b) || b.contains(*a) || a.disjoint(*b))
    })
}

/// Spans of distinct variables share no endpoint.
pub fn is_point_disjoint(m: &Mapping) -> bool {
    let spans: Vec<Span> = m.0.values().copied().collect();
    spans
        .iter()
        .enumerate()
        .all(|(i, a)| spans[i + 1..].iter().all(|b| !a.shares_endpoint(*b)))
}

/// A set of mappings.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MappingSet(BTreeSet<Mapping>);

impl MappingSet {
    pub fn new() -> Self {
        MappingSet(BTreeSet::new())
    }

    /// `{∅}`, the identity of join.
    pub fn unit() -> Self {
        let mut s = MappingSet::new();
        s.insert(Mapping::new());
        s
    }

    pub fn insert(&mut self, m: Mapping) -> bool {
        self.0.insert(m)
    }

    pub fn contains(&self, m: &Mapping) -> bool {
        self.0.contains(m)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> btree_set::Iter<'_, Mapping> {
        self.0.iter()
    }

    pub fn extend<I: IntoIterator<Item = Mapping>>(&mut self, it: I) {
        self.0.extend(it)
    }

    pub fn union(&self, other: &MappingSet) -> MappingSet {
        MappingSet(self.0.union(&other.0).cloned().collect())
    }

    pub fn is_subset(&self, other: &MappingSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn difference(&self, other: &MappingSet) -> MappingSet {
        MappingSet(self.0.difference(&other.0).cloned().collect())
    }

    pub fn join(&self, other: &MappingSet) -> MappingSet {
        join_sets(self, other)
    }

    pub fn project<'a, I>(&self, vars: I) -> MappingSet
    where
        I: IntoIterator<Item = &'a Var>,
    {
        let vars: Vec<&Var> = vars.into_iter().collect();
        self.0.iter().map(|m| m.restrict(vars.iter().copied())).collect()
    }

    pub fn into_vec(self) -> Vec<Mapping> {
        self.0.into_iter().collect()
    }
}

impl FromIterator<Mapping> for MappingSet {
    fn from_iter<I: IntoIterator<Item = Mapping>>(iter: I) -> Self {
        MappingSet(iter.into_iter().collect())
    }
}

impl IntoIterator for MappingSet {
    type Item = Mapping;
    type IntoIter = btree_set::IntoIter<Mapping>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

impl<'a> IntoIterator for &'a MappingSet {
    type Item = &'a Mapping;
    type IntoIter = btree_set::Iter<'a, Mapping>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl fmt::Display for MappingSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, m) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{m}")?;
        }
        f.write_str("}")
    }
}

/// `M1 ⋈ M2`.
pub fn join_sets(m1: &MappingSet, m2: &MappingSet) -> MappingSet {
    let mut out = MappingSet::new();
    for a in &m1.0 {
        for b in &m2.0 {
            if compatible(a, b) {
                out.insert(merge(a, b).expect("compatible mappings merge"));
            }
        }
    }
    out
}

/// `M ⋈ {all total maps vars -> sub(d)}`.
pub fn totalize(m: &MappingSet, vars: &BTreeSet<Var>, d: &Document) -> MappingSet {
    let mut total = MappingSet::unit();
    for x in vars {
        let options: MappingSet = d.spans().map(|s| Mapping::singleton(x.clone(), s)).collect();
        total = join_sets(&total, &options);
    }
    join_sets(m, &total)
}

/// Value of an extended mapping: a span or `⊥`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Binding {
    Span(Span),
    Bottom,
}

impl Serialize for Binding {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Binding::Span(s) => s.serialize(serializer),
            Binding::Bottom => serializer.serialize_none(),
        }
    }
}

impl<'de> Deserialize<'de> for Binding {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        Ok(match Option::<Span>::deserialize(deserializer)? {
            Some(s) => Binding::Span(s),
            None => Binding::Bottom,
        })
    }
}

/// A partial function from variables to spans or `⊥`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ExtendedMapping(BTreeMap<Var, Binding>);

impl ExtendedMapping {
    pub fn new() -> Self {
        ExtendedMapping(BTreeMap::new())
    }

    pub fn get(&self, x: &str) -> Option<Binding> {
        self.0.get(x).copied()
    }

    pub fn set(&mut self, x: impl Into<Var>, b: Binding) {
        self.0.insert(x.into(), b);
    }

    /// `μ[x -> b]`.
    pub fn with(&self, x: impl Into<Var>, b: Binding) -> Self {
        let mut out = self.clone();
        out.set(x, b);
        out
    }

    pub fn remove(&mut self, x: &str) {
        self.0.remove(x);
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> btree_map::Iter<'_, Var, Binding> {
        self.0.iter()
    }

    /// Variables pinned to spans.
    pub fn bound(&self) -> impl Iterator<Item = (&Var, Span)> {
        self.0.iter().filter_map(|(x, b)| match b {
            Binding::Span(s) => Some((x, *s)),
            Binding::Bottom => None,
        })
    }

    /// Variables pinned to `⊥`.
    pub fn bottoms(&self) -> impl Iterator<Item = &Var> {
        self.0.iter().filter(|(_, b)| **b == Binding::Bottom).map(|(x, _)| x)
    }

    /// The mapping obtained by dropping `⊥` entries.
    pub fn to_mapping(&self) -> Mapping {
        Mapping(self.bound().map(|(x, s)| (x.clone(), s)).collect())
    }

    /// `μ ⊆ μ'` for an ordinary mapping: bound entries agree, `⊥` entries are absent.
    pub fn is_extended_by(&self, m: &Mapping) -> bool {
        self.0.iter().all(|(x, b)| match b {
            Binding::Span(s) => m.get(x) == Some(*s),
            Binding::Bottom => !m.contains_var(x),
        })
    }

    /// `μ_⊥`: every variable of `vars` outside `dom(m)` pinned to `⊥`.
    pub fn closed_over<'a, I>(m: &Mapping, vars: I) -> Self
    where
        I: IntoIterator<Item = &'a Var>,
    {
        let mut out = ExtendedMapping::from(m);
        for x in vars {
            if !m.contains_var(x) {
                out.set(x.clone(), Binding::Bottom);
            }
        }
        out
    }

    pub fn check(&self, d: &Document) -> Result<(), CoreError> {
        self.bound().try_for_each(|(_, s)| d.check(s))
    }
}

impl From<&Mapping> for ExtendedMapping {
    fn from(m: &Mapping) -> Self {
        ExtendedMapping(m.0.iter().map(|(x, s)| (x.clone(), Binding::Span(*s))).collect())
    }
}

impl fmt::Display for ExtendedMapping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (x, b)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            match b {
                Binding::Span(s) => write!(f, "{x}->{s}")?,
                Binding::Bottom => write!(f, "{x}->⊥")?,
            }
        }
        f.write_str("}")
    }
}
