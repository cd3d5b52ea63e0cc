//! Tabulated multiattribute utility functions.
//!
//! A [`TabulatedUtility`] stores one real utility per state of a finite
//! [`AttributeSpace`]. Lotteries over the states are compared by expected
//! utility, and the `independence` submodule decides the classical
//! independence conditions (utility, singulary, mutual, additive) together
//! with TIOLI detection.

mod independence;

pub use independence::{
    AdditiveDecomposition, AdditiveWitness, IndependenceReport, MutualWitness, TioliMode,
    UiWitness, Verdict,
};

use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::factor_core::DEFAULT_TOL;

/// A named attribute with an ordered finite domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Attribute {
    name: String,
    values: Vec<String>,
}

impl Attribute {
    pub fn new<S: Into<String>>(
        name: impl Into<String>,
        values: impl IntoIterator<Item = S>,
    ) -> Result<Self> {
        let name = name.into();
        let values: Vec<String> = values.into_iter().map(Into::into).collect();
        if name.is_empty() {
            return Err(Error::validation("attribute names must be nonempty"));
        }
        if values.len() < 2 {
            return Err(Error::validation(format!(
                "attribute `{name}` needs at least two values"
            )));
        }
        let mut seen = HashSet::new();
        if let Some(dup) = values.iter().find(|v| !seen.insert(v.as_str())) {
            return Err(Error::validation(format!(
                "attribute `{name}` repeats value `{dup}`"
            )));
        }
        Ok(Attribute { name, values })
    }

    /// Boolean attribute with values `0` and `1`.
    pub fn boolean(name: impl Into<String>) -> Result<Self> {
        Attribute::new(name, ["0", "1"])
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn values(&self) -> &[String] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value_index(&self, label: &str) -> Option<usize> {
        self.values.iter().position(|v| v == label)
    }
}

/// Ordered list of attributes; states are the Cartesian product of their
/// domains, enumerated with the first attribute most significant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttributeSpace {
    attributes: Vec<Attribute>,
    strides: Vec<usize>,
    size: usize,
}

/// Largest state space a table may cover.
pub const MAX_STATES: usize = 1 << 26;

impl AttributeSpace {
    pub fn new(attributes: Vec<Attribute>) -> Result<Self> {
        if attributes.is_empty() {
            return Err(Error::validation("an attribute space needs at least one attribute"));
        }
        let mut seen = HashSet::new();
        if let Some(dup) = attributes.iter().find(|a| !seen.insert(a.name.as_str())) {
            return Err(Error::validation(format!(
                "duplicate attribute `{}`",
                dup.name
            )));
        }
        let mut strides = vec![0; attributes.len()];
        let mut size = 1usize;
        for (i, a) in attributes.iter().enumerate().rev() {
            strides[i] = size;
            size = size
                .checked_mul(a.len())
                .filter(|&s| s <= MAX_STATES)
                .ok_or_else(|| Error::Resource("state space too large".into()))?;
        }
        Ok(AttributeSpace {
            attributes,
            strides,
            size,
        })
    }

    pub fn attributes(&self) -> &[Attribute] {
        &self.attributes
    }

    pub fn len(&self) -> usize {
        self.attributes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.attributes.is_empty()
    }

    /// Number of states.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn attribute_index(&self, name: &str) -> Result<usize> {
        self.attributes
            .iter()
            .position(|a| a.name == name)
            .ok_or_else(|| Error::validation(format!("unknown attribute `{name}`")))
    }

    pub fn attribute_indices(&self, names: &[&str]) -> Result<Vec<usize>> {
        names.iter().map(|n| self.attribute_index(n)).collect()
    }

    pub fn is_boolean(&self) -> bool {
        self.attributes.iter().all(|a| a.len() == 2)
    }

    pub(crate) fn stride(&self, attr: usize) -> usize {
        self.strides[attr]
    }

    /// Rank of a state in enumeration order.
    pub fn index_of(&self, state: &State) -> usize {
        state
            .0
            .iter()
            .zip(&self.strides)
            .map(|(v, s)| v * s)
            .sum()
    }

    pub fn state_at(&self, mut index: usize) -> State {
        let mut values = Vec::with_capacity(self.len());
        for (a, s) in self.attributes.iter().zip(&self.strides) {
            values.push(index / s);
            index %= s;
            debug_assert!(values.last().copied().unwrap_or(0) < a.len());
        }
        State(values)
    }

    pub fn states(&self) -> impl Iterator<Item = State> + '_ {
        (0..self.size).map(|i| self.state_at(i))
    }

    /// Value index of attribute `attr` in the state with rank `index`.
    pub(crate) fn value_at(&self, index: usize, attr: usize) -> usize {
        (index / self.strides[attr]) % self.attributes[attr].len()
    }

    /// Parses a state from value labels given in attribute order.
    pub fn state<S: AsRef<str>>(&self, labels: &[S]) -> Result<State> {
        if labels.len() != self.len() {
            return Err(Error::validation(format!(
                "state has {} values, expected {}",
                labels.len(),
                self.len()
            )));
        }
        labels
            .iter()
            .zip(&self.attributes)
            .map(|(l, a)| {
                a.value_index(l.as_ref()).ok_or_else(|| {
                    Error::validation(format!(
                        "`{}` is not a value of attribute `{}`",
                        l.as_ref(),
                        a.name
                    ))
                })
            })
            .collect::<Result<Vec<_>>>()
            .map(State)
    }

    pub fn labels(&self, state: &State) -> Vec<&str> {
        state
            .0
            .iter()
            .zip(&self.attributes)
            .map(|(&v, a)| a.values[v].as_str())
            .collect()
    }

    pub(crate) fn describe(&self, index: usize) -> String {
        let st = self.state_at(index);
        let parts: Vec<String> = self
            .attributes
            .iter()
            .zip(self.labels(&st))
            .map(|(a, l)| format!("{}={}", a.name, l))
            .collect();
        parts.join(",")
    }
}

/// One value index per attribute, in attribute order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct State(pub Vec<usize>);

/// Total utility table over an attribute space.
#[derive(Clone, Debug, PartialEq)]
pub struct TabulatedUtility {
    space: AttributeSpace,
    values: Vec<f64>,
}

impl TabulatedUtility {
    /// Builds a table from values listed in state enumeration order.
    pub fn from_values(space: AttributeSpace, values: Vec<f64>) -> Result<Self> {
        if values.len() != space.size() {
            return Err(Error::validation(format!(
                "table has {} entries, state space has {}",
                values.len(),
                space.size()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::validation(format!("utility {v} is not finite")));
        }
        Ok(TabulatedUtility { space, values })
    }

    /// Builds a table from `(state labels, utility)` entries; every state must
    /// appear exactly once.
    pub fn from_entries<S: AsRef<str>>(
        space: AttributeSpace,
        entries: impl IntoIterator<Item = (Vec<S>, f64)>,
    ) -> Result<Self> {
        let mut values = vec![None; space.size()];
        for (labels, u) in entries {
            let st = space.state(&labels)?;
            let i = space.index_of(&st);
            if values[i].replace(u).is_some() {
                return Err(Error::validation(format!(
                    "state ({}) listed twice",
                    space.describe(i)
                )));
            }
        }
        if let Some(missing) = values.iter().position(Option::is_none) {
            return Err(Error::validation(format!(
                "table is missing state ({})",
                space.describe(missing)
            )));
        }
        let values = values.into_iter().map(|v| v.unwrap_or_default()).collect();
        Self::from_values(space, values)
    }

    pub fn space(&self) -> &AttributeSpace {
        &self.space
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn utility(&self, state: &State) -> f64 {
        self.values[self.space.index_of(state)]
    }

    /// `a + b·u`, for any `b`.
    pub fn affine(&self, a: f64, b: f64) -> TabulatedUtility {
        TabulatedUtility {
            space: self.space.clone(),
            values: self.values.iter().map(|u| a + b * u).collect(),
        }
    }

    /// Absolute tolerance for equality checks: `1e-9` on tables with
    /// `max |u| ≤ 1`, scaled by `max |u|` otherwise.
    pub fn tolerance(&self) -> f64 {
        let m = self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        DEFAULT_TOL * m.max(1.0)
    }

    /// Restricts the table by fixing one attribute to a value, removing that
    /// attribute from the space.
    pub fn restrict(&self, attribute: &str, value: &str) -> Result<TabulatedUtility> {
        let ai = self.space.attribute_index(attribute)?;
        let attr = &self.space.attributes[ai];
        let vi = attr.value_index(value).ok_or_else(|| {
            Error::validation(format!("`{value}` is not a value of attribute `{attribute}`"))
        })?;
        let rest: Vec<Attribute> = self
            .space
            .attributes
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != ai)
            .map(|(_, a)| a.clone())
            .collect();
        let space = AttributeSpace::new(rest)?;
        let values = (0..self.space.size())
            .filter(|&i| self.space.value_at(i, ai) == vi)
            .map(|i| self.values[i])
            .collect();
        Self::from_values(space, values)
    }
}

/// A probability distribution over the states of a space.
#[derive(Clone, Debug, PartialEq)]
pub struct Lottery {
    space: AttributeSpace,
    probs: Vec<f64>,
}

impl Lottery {
    pub fn from_dense(space: AttributeSpace, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != space.size() {
            return Err(Error::validation("lottery length differs from state space size"));
        }
        if let Some(p) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::validation(format!("probability {p} is negative or not finite")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > DEFAULT_TOL {
            return Err(Error::validation(format!(
                "lottery probabilities sum to {total}, not 1"
            )));
        }
        Ok(Lottery { space, probs })
    }

    /// Sparse constructor; unlisted states get probability zero.
    pub fn new(space: &AttributeSpace, entries: impl IntoIterator<Item = (State, f64)>) -> Result<Self> {
        let mut probs = vec![0.0; space.size()];
        for (st, p) in entries {
            if st.0.len() != space.len()
                || st.0.iter().zip(space.attributes()).any(|(v, a)| *v >= a.len())
            {
                return Err(Error::validation("lottery state outside the space"));
            }
            probs[space.index_of(&st)] += p;
        }
        Self::from_dense(space.clone(), probs)
    }

    pub fn point(space: &AttributeSpace, state: &State) -> Result<Self> {
        Self::new(space, [(state.clone(), 1.0)])
    }

    pub fn uniform(space: &AttributeSpace) -> Self {
        let n = space.size();
        Lottery {
            space: space.clone(),
            probs: vec![1.0 / n as f64; n],
        }
    }

    pub fn space(&self) -> &AttributeSpace {
        &self.space
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn probability(&self, state: &State) -> f64 {
        self.probs[self.space.index_of(state)]
    }

    /// Marginal distribution of one attribute.
    pub fn marginal(&self, attr: usize) -> Vec<f64> {
        let mut m = vec![0.0; self.space.attributes[attr].len()];
        for (i, p) in self.probs.iter().enumerate() {
            m[self.space.value_at(i, attr)] += p;
        }
        m
    }

    /// Restricts to states with `attribute = value` and renormalizes.
    pub fn condition(&self, attribute: &str, value: &str) -> Result<Lottery> {
        let ai = self.space.attribute_index(attribute)?;
        let vi = self.space.attributes[ai].value_index(value).ok_or_else(|| {
            Error::validation(format!("`{value}` is not a value of attribute `{attribute}`"))
        })?;
        let mass: f64 = self
            .probs
            .iter()
            .enumerate()
            .filter(|(i, _)| self.space.value_at(*i, ai) == vi)
            .map(|(_, p)| p)
            .sum();
        if mass <= 0.0 {
            return Err(Error::ConditioningOnNull(format!(
                "lottery gives {attribute}={value} probability zero"
            )));
        }
        let probs = self
            .probs
            .iter()
            .enumerate()
            .map(|(i, p)| if self.space.value_at(i, ai) == vi { p / mass } else { 0.0 })
            .collect();
        Ok(Lottery {
            space: self.space.clone(),
            probs,
        })
    }

    pub(crate) fn describe(&self) -> String {
        let parts: Vec<String> = self
            .probs
            .iter()
            .enumerate()
            .filter(|(_, p)| **p > 0.0)
            .map(|(i, p)| format!("({})={}", self.space.describe(i), p))
            .collect();
        format!("{{{}}}", parts.join(" "))
    }
}

/// Outcome of comparing two lotteries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preference {
    First,
    Second,
    Indifferent,
}

impl fmt::Display for Preference {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Preference::First => "first",
            Preference::Second => "second",
            Preference::Indifferent => "indifferent",
        })
    }
}

impl TabulatedUtility {
    /// `Σ_s p(s)·u(s)`.
    pub fn expected_utility(&self, p: &Lottery) -> Result<f64> {
        if p.space != self.space {
            return Err(Error::validation("lottery is over a different state space"));
        }
        Ok(p.probs.iter().zip(&self.values).map(|(p, u)| p * u).sum())
    }

    /// Compares two lotteries by expected utility; indifferent when the
    /// difference is within `tol`.
    pub fn prefers(&self, p1: &Lottery, p2: &Lottery, tol: f64) -> Result<Preference> {
        let d = self.expected_utility(p1)? - self.expected_utility(p2)?;
        Ok(if d.abs() <= tol {
            Preference::Indifferent
        } else if d > 0.0 {
            Preference::First
        } else {
            Preference::Second
        })
    }

    /// Compares two lotteries after conditioning both on `attribute = value`.
    pub fn conditional_prefers(
        &self,
        p1: &Lottery,
        p2: &Lottery,
        evidence: (&str, &str),
        tol: f64,
    ) -> Result<Preference> {
        let (a, v) = evidence;
        let c1 = p1.condition(a, v)?;
        let c2 = p2.condition(a, v)?;
        self.prefers(&c1, &c2, tol)
    }
}
