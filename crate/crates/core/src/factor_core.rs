//! Factors, factor sets and utility distributions.
//!
//! A utility distribution assigns each factor a weight in `[0, 1]`, with the
//! weights summing to one. The utility of a set of factors is the sum of its
//! members' weights, so the distribution behaves exactly like a probability
//! distribution over atoms. Conditional utility and utility independence are
//! then the direct analogues of their probabilistic counterparts.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::error::{Error, Result};

/// Default absolute tolerance for sums and equality checks.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Label of a single utility factor.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FactorId(String);

impl FactorId {
    pub fn new(label: impl Into<String>) -> Result<Self> {
        let label = label.into();
        if label.is_empty() {
            return Err(Error::validation("factor labels must be nonempty"));
        }
        Ok(FactorId(label))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for FactorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A finite set of factor labels. Membership in a particular universe is
/// checked when the set is used in a query.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FactorSet(BTreeSet<FactorId>);

impl FactorSet {
    pub fn empty() -> Self {
        FactorSet::default()
    }

    pub fn from_labels<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        labels
            .into_iter()
            .map(FactorId::new)
            .collect::<Result<BTreeSet<_>>>()
            .map(FactorSet)
    }

    pub fn intersection(&self, other: &FactorSet) -> FactorSet {
        FactorSet(self.0.intersection(&other.0).cloned().collect())
    }

    pub fn union(&self, other: &FactorSet) -> FactorSet {
        FactorSet(self.0.union(&other.0).cloned().collect())
    }

    pub fn is_subset(&self, other: &FactorSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = &FactorId> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn insert(&mut self, id: FactorId) -> bool {
        self.0.insert(id)
    }
}

impl FromIterator<FactorId> for FactorSet {
    fn from_iter<T: IntoIterator<Item = FactorId>>(iter: T) -> Self {
        FactorSet(iter.into_iter().collect())
    }
}

impl fmt::Display for FactorSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, id) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{id}")?;
        }
        f.write_str("}")
    }
}

/// Normalized nonnegative weights over a finite, closed factor universe.
#[derive(Clone, Debug, PartialEq)]
pub struct UtilityDistribution {
    factors: Vec<(FactorId, f64)>,
    index: HashMap<FactorId, usize>,
}

impl UtilityDistribution {
    pub fn new<S: Into<String>>(weights: impl IntoIterator<Item = (S, f64)>) -> Result<Self> {
        Self::with_tolerance(weights, DEFAULT_TOL)
    }

    /// Builds a distribution, accepting a weight sum within `tol` of one.
    pub fn with_tolerance<S: Into<String>>(
        weights: impl IntoIterator<Item = (S, f64)>,
        tol: f64,
    ) -> Result<Self> {
        let mut factors = Vec::new();
        let mut index = HashMap::new();
        for (label, w) in weights {
            let id = FactorId::new(label)?;
            if !w.is_finite() || !(0.0..=1.0).contains(&w) {
                return Err(Error::validation(format!(
                    "weight of factor `{id}` is {w}, outside [0, 1]"
                )));
            }
            if index.insert(id.clone(), factors.len()).is_some() {
                return Err(Error::validation(format!("duplicate factor `{id}`")));
            }
            factors.push((id, w));
        }
        if factors.is_empty() {
            return Err(Error::validation("a distribution needs at least one factor"));
        }
        let total: f64 = factors.iter().map(|(_, w)| w).sum();
        if (total - 1.0).abs() > tol {
            return Err(Error::validation(format!(
                "factor weights sum to {total}, not 1"
            )));
        }
        Ok(UtilityDistribution { factors, index })
    }

    /// Factors with their weights, in declaration order.
    pub fn factors(&self) -> impl Iterator<Item = (&FactorId, f64)> {
        self.factors.iter().map(|(id, w)| (id, *w))
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn weight(&self, label: &str) -> Option<f64> {
        let id = FactorId(label.to_string());
        self.index.get(&id).map(|&i| self.factors[i].1)
    }

    pub fn universe(&self) -> FactorSet {
        self.factors.iter().map(|(id, _)| id.clone()).collect()
    }

    fn check_members(&self, s: &FactorSet) -> Result<()> {
        match s.iter().find(|id| !self.index.contains_key(*id)) {
            Some(id) => Err(Error::UnknownFactor(id.to_string())),
            None => Ok(()),
        }
    }

    /// Utility of a factor set: the sum of its members' weights.
    pub fn utility(&self, s: &FactorSet) -> Result<f64> {
        self.check_members(s)?;
        Ok(s.iter().map(|id| self.factors[self.index[id]].1).sum())
    }

    /// Subjective conditional utility `u(x | y) = u(x ∩ y) / u(y)`.
    pub fn conditional_utility(&self, x: &FactorSet, y: &FactorSet) -> Result<f64> {
        self.check_members(x)?;
        let uy = self.utility(y)?;
        if uy <= 0.0 {
            return Err(Error::ConditioningOnNull(format!(
                "factor set {y} has zero utility"
            )));
        }
        Ok(self.utility(&x.intersection(y))? / uy)
    }

    /// `x` is utility-independent of `y` iff `u(x | y) = u(x)` (within `tol`).
    pub fn is_subjectively_independent(
        &self,
        x: &FactorSet,
        y: &FactorSet,
        tol: f64,
    ) -> Result<bool> {
        if tol.is_nan() || tol < 0.0 {
            return Err(Error::validation("tolerance must be nonnegative"));
        }
        let cond = self.conditional_utility(x, y)?;
        Ok((cond - self.utility(x)?).abs() <= tol)
    }
}

/// A "take it or leave it" utility function `u(x) = Σ k_i x_i` over boolean
/// factors. Weights may have any sign.
#[derive(Clone, Debug, PartialEq)]
pub struct TioliFunction {
    weights: Vec<(FactorId, f64)>,
}

impl TioliFunction {
    pub fn new<S: Into<String>>(weights: impl IntoIterator<Item = (S, f64)>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for (label, k) in weights {
            let id = FactorId::new(label)?;
            if !k.is_finite() {
                return Err(Error::validation(format!("weight of `{id}` is not finite")));
            }
            if !seen.insert(id.clone()) {
                return Err(Error::validation(format!("duplicate factor `{id}`")));
            }
            out.push((id, k));
        }
        if out.is_empty() {
            return Err(Error::validation("a TIOLI function needs at least one factor"));
        }
        Ok(TioliFunction { weights: out })
    }

    pub fn weights(&self) -> impl Iterator<Item = (&FactorId, f64)> {
        self.weights.iter().map(|(id, k)| (id, *k))
    }

    pub fn weight(&self, label: &str) -> Option<f64> {
        self.weights
            .iter()
            .find(|(id, _)| id.as_str() == label)
            .map(|(_, k)| *k)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Evaluates the function on the factors that are present (`x_i = 1`).
    pub fn evaluate(&self, present: &FactorSet) -> f64 {
        self.weights
            .iter()
            .filter(|(id, _)| present.0.contains(id))
            .map(|(_, k)| k)
            .sum()
    }

    /// Translates and scales the weights into a utility distribution.
    ///
    /// A negative weight `k_i` is absorbed by flipping the factor's polarity:
    /// `k_i·x_i = k_i + |k_i|·(1 − x_i)`. The constant `k_i` goes into the
    /// record's offset, and the flipped factor stands for the complement
    /// indicator `1 − x_i` under the same label.
    pub fn normalize(&self) -> Result<(UtilityDistribution, AffineRecord)> {
        let scale: f64 = self.weights.iter().map(|(_, k)| k.abs()).sum();
        if scale == 0.0 {
            return Err(Error::Degenerate(
                "all TIOLI weights are zero".to_string(),
            ));
        }
        let mut flipped = FactorSet::empty();
        let mut offset = 0.0;
        let mut weights = Vec::with_capacity(self.weights.len());
        for (id, k) in &self.weights {
            if *k < 0.0 {
                flipped.insert(id.clone());
                offset += k;
            }
            weights.push((id.0.clone(), k.abs() / scale));
        }
        let dist = UtilityDistribution::new(weights)?;
        let record = AffineRecord::new(scale, flipped, offset)?;
        Ok((dist, record))
    }
}

/// Positive affine transform from normalized utility mass back to the
/// original function: `original = offset + scale · normalized`, after
/// un-flipping the factors in `flipped`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineRecord {
    scale: f64,
    flipped: FactorSet,
    offset: f64,
}

impl AffineRecord {
    pub fn new(scale: f64, flipped: FactorSet, offset: f64) -> Result<Self> {
        if scale.is_nan() || scale <= 0.0 || !scale.is_finite() || !offset.is_finite() {
            return Err(Error::validation(format!(
                "affine record needs a finite positive scale, got {scale}"
            )));
        }
        Ok(AffineRecord {
            scale,
            flipped,
            offset,
        })
    }

    pub fn identity() -> Self {
        AffineRecord {
            scale: 1.0,
            flipped: FactorSet::empty(),
            offset: 0.0,
        }
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn flipped(&self) -> &FactorSet {
        &self.flipped
    }

    /// Maps a normalized utility back to the original scale.
    pub fn apply(&self, normalized: f64) -> f64 {
        self.offset + self.scale * normalized
    }

    /// Which normalized factors are active when the original factors in
    /// `present` hold: flipped factors are active exactly when absent.
    pub fn active_factors(&self, dist: &UtilityDistribution, present: &FactorSet) -> FactorSet {
        dist.factors()
            .map(|(id, _)| id)
            .filter(|id| present.0.contains(*id) != self.flipped.0.contains(*id))
            .cloned()
            .collect()
    }

    /// Original utility of the assignment where exactly `present` holds.
    pub fn reconstruct(&self, dist: &UtilityDistribution, present: &FactorSet) -> Result<f64> {
        let active = self.active_factors(dist, present);
        Ok(self.apply(dist.utility(&active)?))
    }
}
