//! Utility networks.
//!
//! A utility network is a DAG over boolean variables with one conditional
//! utility table (CUT) per variable. The product of the CUT entries along a
//! complete assignment is that assignment's share of a utility distribution,
//! exactly as a Bayesian network factors a joint probability. Variables stand
//! for factor-set events ("love of art", "money"); complete assignments are
//! the atoms of the induced distribution.
//!
//! CUT rows are indexed by the parent assignment's rank in binary order, the
//! first listed parent being the most significant bit. Each row holds
//! `[u(v = 0 | parents), u(v = 1 | parents)]`.

mod dsep;
pub mod inference;

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::factor_core::DEFAULT_TOL;
use inference::{eliminate, Factor};

/// Most parents a single variable may have.
pub const MAX_PARENTS: usize = 20;
/// Most variables brute-force enumeration will visit.
pub const MAX_ENUMERATION_VARIABLES: usize = 30;
/// Most variables a marginal table may keep.
pub const MAX_TABLE_VARIABLES: usize = 24;
/// Most terms in a union event (inclusion–exclusion is exponential in it).
pub const MAX_UNION_TERMS: usize = 16;

/// Conditional utility table of one variable, as declared.
#[derive(Clone, Debug, PartialEq)]
pub struct CutDef {
    pub variable: String,
    pub parents: Vec<String>,
    pub rows: Vec<[f64; 2]>,
}

/// Unvalidated description of a network, as read from a document.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct NetworkDef {
    pub variables: Vec<String>,
    pub edges: Vec<(String, String)>,
    pub cuts: Vec<CutDef>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ValidationIssue {
    EmptyName,
    DuplicateVariable(String),
    UnknownVariable { context: String, name: String },
    DuplicateEdge(String, String),
    SelfLoop(String),
    Cycle(Vec<String>),
    MissingCut(String),
    DuplicateCut(String),
    ParentMismatch { variable: String, declared: Vec<String>, from_edges: Vec<String> },
    TooManyParents(String),
    RowCount { variable: String, expected: usize, found: usize },
    OutOfRange { variable: String, parents: String, value: f64 },
    Normalization { variable: String, parents: String, sum: f64 },
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use ValidationIssue::*;
        match self {
            EmptyName => write!(f, "variable names must be nonempty"),
            DuplicateVariable(v) => write!(f, "variable `{v}` declared twice"),
            UnknownVariable { context, name } => write!(f, "{context}: unknown variable `{name}`"),
            DuplicateEdge(a, b) => write!(f, "edge {a} -> {b} listed twice"),
            SelfLoop(v) => write!(f, "cycle: self-loop on `{v}`"),
            Cycle(path) => write!(f, "cycle: {}", path.join(" -> ")),
            MissingCut(v) => write!(f, "variable `{v}` has no CUT"),
            DuplicateCut(v) => write!(f, "variable `{v}` has more than one CUT"),
            ParentMismatch { variable, declared, from_edges } => write!(
                f,
                "CUT of `{variable}` lists parents [{}] but edges give [{}]",
                declared.join(", "),
                from_edges.join(", ")
            ),
            TooManyParents(v) => write!(f, "variable `{v}` has more than {MAX_PARENTS} parents"),
            RowCount { variable, expected, found } => write!(
                f,
                "CUT of `{variable}` has {found} rows, expected {expected}"
            ),
            OutOfRange { variable, parents, value } => write!(
                f,
                "CUT of `{variable}` at parents ({parents}) has entry {value} outside [0, 1]"
            ),
            Normalization { variable, parents, sum } => write!(
                f,
                "CUT of `{variable}` at parents ({parents}) sums to {sum}, not 1"
            ),
        }
    }
}

fn parent_label(parents: &[String], rank: usize) -> String {
    let k = parents.len();
    if k == 0 {
        return "none".into();
    }
    parents
        .iter()
        .enumerate()
        .map(|(i, p)| format!("{p}={}", rank >> (k - 1 - i) & 1))
        .collect::<Vec<_>>()
        .join(",")
}

impl NetworkDef {
    /// Every structural and numeric problem with the definition.
    pub fn validate(&self) -> std::result::Result<(), Vec<ValidationIssue>> {
        use ValidationIssue::*;
        let mut issues = Vec::new();
        let mut index = HashMap::new();
        for (i, v) in self.variables.iter().enumerate() {
            if v.is_empty() {
                issues.push(EmptyName);
            } else if index.insert(v.as_str(), i).is_some() {
                issues.push(DuplicateVariable(v.clone()));
            }
        }
        let n = self.variables.len();
        let mut parents: Vec<Vec<String>> = vec![Vec::new(); n];
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut seen_edges = HashSet::new();
        for (a, b) in &self.edges {
            let (Some(&ia), Some(&ib)) = (index.get(a.as_str()), index.get(b.as_str())) else {
                for x in [a, b] {
                    if !index.contains_key(x.as_str()) {
                        issues.push(UnknownVariable {
                            context: format!("edge {a} -> {b}"),
                            name: x.clone(),
                        });
                    }
                }
                continue;
            };
            if !seen_edges.insert((ia, ib)) {
                issues.push(DuplicateEdge(a.clone(), b.clone()));
                continue;
            }
            if ia == ib {
                issues.push(SelfLoop(a.clone()));
                continue;
            }
            parents[ib].push(a.clone());
            adj[ia].push(ib);
        }
        if let Some(cycle) = find_cycle(&adj) {
            issues.push(Cycle(
                cycle.into_iter().map(|i| self.variables[i].clone()).collect(),
            ));
        }
        let mut has_cut = vec![false; n];
        for cut in &self.cuts {
            let Some(&vi) = index.get(cut.variable.as_str()) else {
                issues.push(UnknownVariable {
                    context: "CUT".into(),
                    name: cut.variable.clone(),
                });
                continue;
            };
            if std::mem::replace(&mut has_cut[vi], true) {
                issues.push(DuplicateCut(cut.variable.clone()));
                continue;
            }
            let mut declared = cut.parents.clone();
            declared.sort();
            let mut from_edges = parents[vi].clone();
            from_edges.sort();
            if declared != from_edges {
                issues.push(ParentMismatch {
                    variable: cut.variable.clone(),
                    declared,
                    from_edges,
                });
                continue;
            }
            if cut.parents.len() > MAX_PARENTS {
                issues.push(TooManyParents(cut.variable.clone()));
                continue;
            }
            let expected = 1usize << cut.parents.len();
            if cut.rows.len() != expected {
                issues.push(RowCount {
                    variable: cut.variable.clone(),
                    expected,
                    found: cut.rows.len(),
                });
                continue;
            }
            for (rank, row) in cut.rows.iter().enumerate() {
                let label = || parent_label(&cut.parents, rank);
                if let Some(&value) = row.iter().find(|x| !(0.0..=1.0).contains(*x)) {
                    issues.push(OutOfRange {
                        variable: cut.variable.clone(),
                        parents: label(),
                        value,
                    });
                    continue;
                }
                let sum = row[0] + row[1];
                if (sum - 1.0).abs() > DEFAULT_TOL {
                    issues.push(Normalization {
                        variable: cut.variable.clone(),
                        parents: label(),
                        sum,
                    });
                }
            }
        }
        for (i, v) in self.variables.iter().enumerate() {
            if !has_cut[i] && index.get(v.as_str()) == Some(&i) {
                issues.push(MissingCut(v.clone()));
            }
        }
        if issues.is_empty() {
            Ok(())
        } else {
            Err(issues)
        }
    }
}

/// Some directed cycle, as a closed vertex path, if the graph has one.
fn find_cycle(adj: &[Vec<usize>]) -> Option<Vec<usize>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Active,
        Done,
    }
    let n = adj.len();
    let mut mark = vec![Mark::New; n];
    let mut parent = vec![usize::MAX; n];
    for root in 0..n {
        if mark[root] != Mark::New {
            continue;
        }
        let mut stack = vec![(root, 0usize)];
        mark[root] = Mark::Active;
        while let Some(&mut (v, ref mut next)) = stack.last_mut() {
            if let Some(&w) = adj[v].get(*next) {
                *next += 1;
                match mark[w] {
                    Mark::New => {
                        mark[w] = Mark::Active;
                        parent[w] = v;
                        stack.push((w, 0));
                    }
                    Mark::Active => {
                        let mut path = vec![w];
                        let mut u = v;
                        while u != w {
                            path.push(u);
                            u = parent[u];
                        }
                        path.push(w);
                        path[1..].reverse();
                        return Some(path);
                    }
                    Mark::Done => {}
                }
            } else {
                mark[v] = Mark::Done;
                stack.pop();
            }
        }
    }
    None
}

/// A value (`false`/`true`) for some of a network's variables.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment(BTreeMap<String, bool>);

impl Assignment {
    pub fn new() -> Self {
        Assignment::default()
    }

    pub fn with(mut self, var: impl Into<String>, value: bool) -> Self {
        self.0.insert(var.into(), value);
        self
    }

    pub fn set(&mut self, var: impl Into<String>, value: bool) {
        self.0.insert(var.into(), value);
    }

    pub fn get(&self, var: &str) -> Option<bool> {
        self.0.get(var).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, bool)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromIterator<(String, bool)> for Assignment {
    fn from_iter<T: IntoIterator<Item = (String, bool)>>(iter: T) -> Self {
        Assignment(iter.into_iter().collect())
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.iter().map(|(k, v)| format!("{k}={}", u8::from(v))).collect();
        f.write_str(&parts.join(","))
    }
}

/// A set of complete assignments: the union of the extensions of one or
/// more partial assignments. A single empty term is the whole space; no
/// terms at all is the null event.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UEvent {
    terms: Vec<Assignment>,
}

impl UEvent {
    /// Every complete assignment.
    pub fn all() -> Self {
        UEvent {
            terms: vec![Assignment::new()],
        }
    }

    pub fn term(a: Assignment) -> Self {
        UEvent { terms: vec![a] }
    }

    pub fn union(terms: Vec<Assignment>) -> Self {
        UEvent { terms }
    }

    pub fn terms(&self) -> &[Assignment] {
        &self.terms
    }

    /// Pairwise merge of terms; inconsistent pairs drop out.
    pub fn intersect(&self, other: &UEvent) -> UEvent {
        let mut terms = Vec::new();
        for a in &self.terms {
            'pair: for b in &other.terms {
                let mut m = a.clone();
                for (k, v) in b.iter() {
                    match m.get(k) {
                        Some(x) if x != v => continue 'pair,
                        _ => m.set(k, v),
                    }
                }
                if !terms.contains(&m) {
                    terms.push(m);
                }
            }
        }
        UEvent { terms }
    }
}

impl fmt::Display for UEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("{}");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|t| if t.is_empty() { "*".into() } else { t.to_string() })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

/// Internal term: sorted `(variable index, value)` pairs.
type Term = Vec<(usize, bool)>;

/// Elimination ordering used by variable elimination.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum EliminationOrder {
    #[default]
    MinDegree,
    /// Eliminate these variables first, in order; the rest by min-degree.
    Fixed(Vec<String>),
}

/// A validated utility network. Immutable after construction.
#[derive(Clone, Debug, PartialEq)]
pub struct UtilityNetwork {
    names: Vec<String>,
    index: BTreeMap<String, usize>,
    /// Parents in CUT order (first = most significant bit of the row rank).
    parents: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
    rows: Vec<Vec<[f64; 2]>>,
    /// Each CUT as a factor over the variable and its parents.
    factors: Vec<Factor>,
}

impl UtilityNetwork {
    pub fn new(def: &NetworkDef) -> Result<Self> {
        if let Err(issues) = def.validate() {
            let msgs: Vec<String> = issues.iter().map(ToString::to_string).collect();
            return Err(Error::Validation(msgs.join("; ")));
        }
        let index: BTreeMap<String, usize> = def
            .variables
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), i))
            .collect();
        let n = def.variables.len();
        let mut parents = vec![Vec::new(); n];
        let mut children = vec![Vec::new(); n];
        let mut rows = vec![Vec::new(); n];
        for cut in &def.cuts {
            let v = index[&cut.variable];
            parents[v] = cut.parents.iter().map(|p| index[p]).collect();
            rows[v] = cut.rows.clone();
            for &p in &parents[v] {
                children[p].push(v);
            }
        }
        for c in &mut children {
            c.sort_unstable();
        }
        let mut net = UtilityNetwork {
            names: def.variables.clone(),
            index,
            parents,
            children,
            rows,
            factors: Vec::new(),
        };
        net.factors = (0..n).map(|v| net.cut_factor(v)).collect();
        Ok(net)
    }

    /// The definition this network was built from, in canonical form.
    pub fn to_def(&self) -> NetworkDef {
        let mut edges = Vec::new();
        let mut cuts = Vec::new();
        for (v, name) in self.names.iter().enumerate() {
            let ps: Vec<String> = self.parents[v].iter().map(|&p| self.names[p].clone()).collect();
            edges.extend(ps.iter().map(|p| (p.clone(), name.clone())));
            cuts.push(CutDef {
                variable: name.clone(),
                parents: ps,
                rows: self.rows[v].clone(),
            });
        }
        NetworkDef {
            variables: self.names.clone(),
            edges,
            cuts,
        }
    }

    pub fn variables(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn parents_of(&self, var: &str) -> Result<Vec<&str>> {
        let v = self.var(var)?;
        Ok(self.parents[v].iter().map(|&p| self.names[p].as_str()).collect())
    }

    pub(crate) fn var(&self, name: &str) -> Result<usize> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::validation(format!("unknown variable `{name}`")))
    }

    pub(crate) fn vars(&self, names: &[&str]) -> Result<Vec<usize>> {
        names.iter().map(|n| self.var(n)).collect()
    }

    fn to_term(&self, a: &Assignment) -> Result<Term> {
        let mut t: Term = a
            .iter()
            .map(|(k, v)| Ok((self.var(k)?, v)))
            .collect::<Result<_>>()?;
        t.sort_unstable();
        Ok(t)
    }

    fn cut_entry(&self, v: usize, value: impl Fn(usize) -> bool) -> f64 {
        let rank = self.parents[v]
            .iter()
            .fold(0usize, |acc, &p| acc << 1 | usize::from(value(p)));
        self.rows[v][rank][usize::from(value(v))]
    }

    /// Product of CUT entries along a complete assignment.
    pub fn joint_utility(&self, a: &Assignment) -> Result<f64> {
        let term = self.to_term(a)?;
        if term.len() != self.len() {
            let missing: Vec<&str> = self
                .names
                .iter()
                .filter(|n| a.get(n).is_none())
                .map(String::as_str)
                .collect();
            return Err(Error::validation(format!(
                "assignment is incomplete, missing {}",
                missing.join(", ")
            )));
        }
        let values: Vec<bool> = term.iter().map(|(_, v)| *v).collect();
        Ok(self.joint_at(|v| values[v]))
    }

    fn joint_at(&self, value: impl Fn(usize) -> bool + Copy) -> f64 {
        (0..self.len()).map(|v| self.cut_entry(v, value)).product()
    }

    /// CUT of `v` as a factor over `v` and its parents.
    fn cut_factor(&self, v: usize) -> Factor {
        let mut scope = self.parents[v].clone();
        scope.push(v);
        scope.sort_unstable();
        let values = (0..1usize << scope.len())
            .map(|i| {
                let value = |x: usize| {
                    let pos = scope.binary_search(&x).unwrap_or_default();
                    i >> pos & 1 == 1
                };
                self.cut_entry(v, value)
            })
            .collect();
        Factor::new(scope, values)
    }

    /// `seeds` plus all their ancestors.
    pub(crate) fn ancestral_closure(&self, seeds: impl IntoIterator<Item = usize>) -> Vec<bool> {
        let mut mark = vec![false; self.len()];
        let mut stack: Vec<usize> = seeds.into_iter().collect();
        while let Some(v) = stack.pop() {
            if !std::mem::replace(&mut mark[v], true) {
                stack.extend(&self.parents[v]);
            }
        }
        mark
    }

    fn resolve_order(&self, order: &EliminationOrder) -> Result<Option<Vec<usize>>> {
        match order {
            EliminationOrder::MinDegree => Ok(None),
            EliminationOrder::Fixed(names) => names
                .iter()
                .map(|n| self.var(n))
                .collect::<Result<Vec<_>>>()
                .map(Some),
        }
    }

    /// Variable elimination on the ancestral subnetwork of `keep ∪ evidence`;
    /// variables outside it are barren and sum to one.
    fn eliminate_with(&self, evidence: &Term, keep: &[usize], order: Option<&[usize]>) -> Factor {
        let relevant = self.ancestral_closure(evidence.iter().map(|(v, _)| *v).chain(keep.iter().copied()));
        let factors = (0..self.len())
            .filter(|&v| relevant[v])
            .map(|v| {
                evidence
                    .iter()
                    .fold(self.factors[v].clone(), |f, &(x, val)| f.restrict(x, val))
            })
            .collect();
        eliminate(factors, keep, order)
    }

    fn term_mass(&self, term: &Term, order: Option<&[usize]>) -> f64 {
        self.eliminate_with(term, &[], order).values()[0]
    }

    fn event_terms(&self, e: &UEvent) -> Result<Vec<Term>> {
        if e.terms.len() > MAX_UNION_TERMS {
            return Err(Error::Resource(format!(
                "events are limited to {MAX_UNION_TERMS} union terms"
            )));
        }
        let mut terms: Vec<Term> = Vec::new();
        for a in &e.terms {
            let t = self.to_term(a)?;
            if !terms.contains(&t) {
                terms.push(t);
            }
        }
        Ok(terms)
    }

    /// Utility of a union of terms by inclusion–exclusion.
    fn union_mass(&self, terms: &[Term], order: Option<&[usize]>) -> f64 {
        let k = terms.len();
        let mut total = 0.0;
        for mask in 1u32..(1 << k) {
            let mut merged: BTreeMap<usize, bool> = BTreeMap::new();
            let consistent = (0..k).filter(|i| mask >> i & 1 == 1).all(|i| {
                terms[i]
                    .iter()
                    .all(|&(v, val)| *merged.entry(v).or_insert(val) == val)
            });
            if !consistent {
                continue;
            }
            let term: Term = merged.into_iter().collect();
            let m = self.term_mass(&term, order);
            if mask.count_ones() % 2 == 1 {
                total += m;
            } else {
                total -= m;
            }
        }
        total
    }

    /// Utility of an event, by variable elimination.
    pub fn marginal_utility(&self, e: &UEvent) -> Result<f64> {
        self.marginal_utility_ordered(e, &EliminationOrder::MinDegree)
    }

    pub fn marginal_utility_ordered(&self, e: &UEvent, order: &EliminationOrder) -> Result<f64> {
        let order = self.resolve_order(order)?;
        let terms = self.event_terms(e)?;
        Ok(self.union_mass(&terms, order.as_deref()))
    }

    pub fn enumerate_marginal(&self, e: &UEvent) -> Result<f64> {
        self.enumerate_marginal_with(e, Execution::default())
    }

    /// Utility of an event by summing the joint over every complete
    /// assignment in it. Exponential; kept as an independent check on
    /// variable elimination.
    pub fn enumerate_marginal_with(&self, e: &UEvent, mode: Execution) -> Result<f64> {
        let n = self.len();
        if n > MAX_ENUMERATION_VARIABLES {
            return Err(Error::Resource(format!(
                "enumeration is limited to {MAX_ENUMERATION_VARIABLES} variables"
            )));
        }
        let terms = self.event_terms(e)?;
        Ok(exec::sum_indices(mode, 1u64 << n, |bits| {
            let value = |v: usize| bits >> v & 1 == 1;
            let inside = terms
                .iter()
                .any(|t| t.iter().all(|&(v, val)| value(v) == val));
            if inside {
                self.joint_at(value)
            } else {
                0.0
            }
        }))
    }

    /// `u(x | y) = u(x ∩ y) / u(y)`.
    pub fn conditional_utility(&self, x: &UEvent, y: &UEvent) -> Result<f64> {
        let uy = self.marginal_utility(y)?;
        if uy <= 0.0 {
            return Err(Error::ConditioningOnNull(format!("event {y} has zero utility")));
        }
        // validate x's names even when the intersection is empty
        self.event_terms(x)?;
        let terms = self.event_terms(&x.intersect(y))?;
        Ok(self.union_mass(&terms, None) / uy)
    }

    /// Joint marginal table over `vars`, by variable elimination.
    pub fn marginal_table(&self, vars: &[&str]) -> Result<Factor> {
        let keep = self.vars(vars)?;
        if keep.len() > MAX_TABLE_VARIABLES {
            return Err(Error::Resource(format!(
                "marginal tables are limited to {MAX_TABLE_VARIABLES} variables"
            )));
        }
        Ok(self.eliminate_with(&Vec::new(), &keep, None))
    }

    fn disjoint_sets(&self, sets: [&[&str]; 3]) -> Result<[Vec<usize>; 3]> {
        let [x, y, z] = sets.map(|s| self.vars(s));
        let (x, y, z) = (x?, y?, z?);
        let mut seen = vec![false; self.len()];
        for &v in x.iter().chain(&y).chain(&z) {
            if std::mem::replace(&mut seen[v], true) {
                return Err(Error::validation(format!(
                    "variable `{}` appears in more than one set",
                    self.names[v]
                )));
            }
        }
        Ok([x, y, z])
    }

    /// Whether `X` and `Y` are d-separated given `Z`.
    pub fn d_separated(&self, x: &[&str], y: &[&str], z: &[&str]) -> Result<bool> {
        let [x, y, z] = self.disjoint_sets([x, y, z])?;
        Ok(dsep::d_separated(self, &x, &y, &z))
    }

    pub fn numerically_independent(&self, x: &[&str], y: &[&str], z: &[&str], tol: f64) -> Result<bool> {
        self.numerically_independent_with(x, y, z, tol, Execution::default())
    }

    /// Whether `u(x ∧ y | z) = u(x | z)·u(y | z)` for every value assignment
    /// of `X`, `Y` and `Z`, within `tol`. Assignments `z` of zero utility
    /// are skipped.
    pub fn numerically_independent_with(
        &self,
        x: &[&str],
        y: &[&str],
        z: &[&str],
        tol: f64,
        mode: Execution,
    ) -> Result<bool> {
        if tol.is_nan() || tol < 0.0 {
            return Err(Error::validation("tolerance must be nonnegative"));
        }
        let [xi, yi, zi] = self.disjoint_sets([x, y, z])?;
        let keep: Vec<usize> = xi.iter().chain(&yi).chain(&zi).copied().collect();
        if keep.len() > MAX_TABLE_VARIABLES {
            return Err(Error::Resource(format!(
                "independence checks are limited to {MAX_TABLE_VARIABLES} variables"
            )));
        }
        let table = self.eliminate_with(&Vec::new(), &keep, None);
        // table offset of every joint assignment of each set
        let offsets = |set: &[usize]| -> Vec<usize> {
            let pos: Vec<usize> = set
                .iter()
                .map(|v| table.vars().binary_search(v).unwrap_or_default())
                .collect();
            (0..1usize << set.len())
                .map(|a| {
                    pos.iter()
                        .enumerate()
                        .fold(0, |acc, (k, &p)| acc | (a >> k & 1) << p)
                })
                .collect()
        };
        let (xo, yo, zo) = (offsets(&xi), offsets(&yi), offsets(&zi));
        let values = table.values();
        let (nx, ny) = (xo.len(), yo.len());
        let violation = exec::find_first(mode, zo.len() as u64, |za| {
            let zb = zo[za as usize];
            let mut cells = vec![0.0; nx * ny];
            let (mut ux, mut uy) = (vec![0.0; nx], vec![0.0; ny]);
            for (i, &xb) in xo.iter().enumerate() {
                for (j, &yb) in yo.iter().enumerate() {
                    let c = values[zb | xb | yb];
                    cells[i * ny + j] = c;
                    ux[i] += c;
                    uy[j] += c;
                }
            }
            let uz: f64 = ux.iter().sum();
            if uz <= 0.0 {
                return None;
            }
            (0..nx * ny).find(|&k| {
                let joint = cells[k] / uz;
                (joint - (ux[k / ny] / uz) * (uy[k % ny] / uz)).abs() > tol
            })
        });
        Ok(violation.is_none())
    }
}
