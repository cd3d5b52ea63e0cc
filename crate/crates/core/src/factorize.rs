//! Factor spaces for arbitrary utility tables.
//!
//! Any tabulated utility can be rebuilt from a set of factors carrying a
//! utility distribution: each state maps to a factor set whose utility,
//! rescaled by an affine record, is the state's original utility. Two
//! constructions are provided. [`prefix_chain`] uses one factor per distinct
//! utility level (linear in the number of levels); [`binary_factorization`]
//! uses one factor per bit of the quantized utility (logarithmic).

use crate::error::{Error, Result};
use crate::factor_core::{AffineRecord, FactorId, FactorSet, UtilityDistribution};
use crate::maut::{AttributeSpace, TabulatedUtility};

/// Denominator bound for quantum inference.
pub const MAX_DENOMINATOR: u64 = 1_000_000;

/// Slack accepted when recognizing a ratio of utilities as a
/// rational number. Covers floating-point noise, not approximation.
const RATIO_TOL: f64 = 1e-13;

#[derive(Clone, Debug, PartialEq)]
pub struct FactorSpace {
    space: AttributeSpace,
    distribution: UtilityDistribution,
    raw_weights: Vec<f64>,
    state_map: Vec<FactorSet>,
    affine: AffineRecord,
}

impl FactorSpace {
    pub fn distribution(&self) -> &UtilityDistribution {
        &self.distribution
    }

    /// Factor weights before normalization, in factor order.
    pub fn raw_weights(&self) -> &[f64] {
        &self.raw_weights
    }

    pub fn affine(&self) -> &AffineRecord {
        &self.affine
    }

    pub fn space(&self) -> &AttributeSpace {
        &self.space
    }

    pub fn factor_count(&self) -> usize {
        self.distribution.len()
    }

    /// Factor set of the state with rank `index`.
    pub fn factors_of(&self, index: usize) -> &FactorSet {
        &self.state_map[index]
    }

    pub fn state_map(&self) -> &[FactorSet] {
        &self.state_map
    }

    /// Original utility of the state with rank `index`, rebuilt from factors.
    pub fn reconstruct(&self, index: usize) -> Result<f64> {
        Ok(self.affine.apply(self.distribution.utility(&self.state_map[index])?))
    }

    /// Checks the reconstruction invariant against the source table.
    pub fn verify(&self, u: &TabulatedUtility) -> Result<()> {
        if u.space() != &self.space {
            return Err(Error::SelfCheck("factor space built for another table".into()));
        }
        let tol = u.tolerance();
        for (i, &v) in u.values().iter().enumerate() {
            let r = self.reconstruct(i)?;
            if (r - v).abs() > tol {
                return Err(Error::SelfCheck(format!(
                    "state ({}) reconstructs to {r}, table has {v}",
                    self.space.describe(i)
                )));
            }
        }
        Ok(())
    }
}

fn shifted(u: &TabulatedUtility) -> Result<(f64, Vec<f64>)> {
    let values = u.values();
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max - min <= u.tolerance() {
        return Err(Error::Degenerate("utility table is constant".into()));
    }
    Ok((min, values.iter().map(|v| v - min).collect()))
}

fn build(
    u: &TabulatedUtility,
    labels: Vec<String>,
    raw_weights: Vec<f64>,
    members: Vec<Vec<usize>>,
    offset: f64,
) -> Result<FactorSpace> {
    let total: f64 = raw_weights.iter().sum();
    let distribution =
        UtilityDistribution::new(labels.iter().cloned().zip(raw_weights.iter().map(|w| w / total)))?;
    let ids: Vec<FactorId> = labels.into_iter().map(FactorId::new).collect::<Result<_>>()?;
    let state_map = members
        .into_iter()
        .map(|m| m.into_iter().map(|j| ids[j].clone()).collect())
        .collect();
    let fs = FactorSpace {
        space: u.space().clone(),
        distribution,
        raw_weights,
        state_map,
        affine: AffineRecord::new(total, FactorSet::empty(), offset)?,
    };
    fs.verify(u)?;
    Ok(fs)
}

/// One factor per distinct nonzero utility level (after shifting the
/// minimum to zero). A state at level `j` holds factors `f1..fj`.
pub fn prefix_chain(u: &TabulatedUtility) -> Result<FactorSpace> {
    let tol = u.tolerance();
    let (min, shifted) = shifted(u)?;
    let mut sorted = shifted.clone();
    sorted.sort_by(f64::total_cmp);
    let mut levels: Vec<f64> = Vec::new();
    for v in sorted {
        let start = levels.last().copied().unwrap_or(0.0);
        if v - start > tol {
            levels.push(v);
        }
    }
    let raw_weights: Vec<f64> = levels
        .iter()
        .scan(0.0, |prev, &v| {
            let w = v - *prev;
            *prev = v;
            Some(w)
        })
        .collect();
    let labels = (1..=levels.len()).map(|j| format!("f{j}")).collect();
    let members = shifted
        .iter()
        .map(|&v| {
            let depth = levels.iter().take_while(|&&l| l <= v + tol).count();
            (0..depth).collect()
        })
        .collect();
    build(u, labels, raw_weights, members, min)
}

/// Smallest-denominator rational within `RATIO_TOL` of `r ∈ [0, 1]`, via
/// continued-fraction convergents.
fn rational(r: f64) -> Option<(u64, u64)> {
    let (mut h0, mut h1) = (0u64, 1u64);
    let (mut k0, mut k1) = (1u64, 0u64);
    let mut x = r;
    for _ in 0..64 {
        let a = x.floor();
        if a > MAX_DENOMINATOR as f64 {
            return None;
        }
        let a = a as u64;
        let h = a.checked_mul(h1)?.checked_add(h0)?;
        let k = a.checked_mul(k1)?.checked_add(k0)?;
        if k > MAX_DENOMINATOR {
            return None;
        }
        if (r - h as f64 / k as f64).abs() <= RATIO_TOL {
            return Some((h, k));
        }
        (h0, h1, k0, k1) = (h1, h, k1, k);
        let frac = x - a as f64;
        if frac <= 0.0 {
            return None;
        }
        x = 1.0 / frac;
    }
    None
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Largest quantum dividing every shifted utility, by rational
/// reconstruction of each value's ratio to the maximum.
fn infer_quantum(shifted: &[f64]) -> Option<f64> {
    let max = shifted.iter().copied().fold(0.0, f64::max);
    let mut fracs = Vec::new();
    let mut lcm = 1u64;
    for &v in shifted {
        let (p, q) = rational(v / max)?;
        lcm = lcm.checked_mul(q / gcd(lcm, q))?;
        if lcm > MAX_DENOMINATOR {
            return None;
        }
        fracs.push((p, q));
    }
    let g = fracs
        .iter()
        .fold(lcm, |g, &(p, q)| gcd(g, p * (lcm / q)));
    Some(max * g as f64 / lcm as f64)
}

/// One factor per bit of `(u − min) / quantum`, with raw weight
/// `quantum · 2^j`. The quantum is inferred when not given.
pub fn binary_factorization(u: &TabulatedUtility, quantum: Option<f64>) -> Result<FactorSpace> {
    let tol = u.tolerance();
    let (min, shifted) = shifted(u)?;
    let quantum = match quantum {
        Some(q) if q > 0.0 && q.is_finite() => q,
        Some(q) => return Err(Error::validation(format!("quantum must be positive, got {q}"))),
        None => infer_quantum(&shifted).ok_or_else(|| {
            Error::NonQuantizable(
                "no common quantum with denominator within 10^6; use the prefix method".into(),
            )
        })?,
    };
    let mut levels = Vec::with_capacity(shifted.len());
    for (i, &v) in shifted.iter().enumerate() {
        let n = (v / quantum).round();
        if (v - n * quantum).abs() > tol || n > (1u64 << 52) as f64 {
            return Err(Error::NonQuantizable(format!(
                "utility of state ({}) is not a multiple of {quantum}; use the prefix method",
                u.space().describe(i)
            )));
        }
        levels.push(n as u64);
    }
    let max = levels.iter().copied().max().unwrap_or(0);
    let bits = (u64::BITS - max.leading_zeros()) as usize;
    let raw_weights = (0..bits).map(|j| quantum * (1u64 << j) as f64).collect();
    let labels = (0..bits).map(|j| format!("b{j}")).collect();
    let members = levels
        .iter()
        .map(|&n| (0..bits).filter(|j| n >> j & 1 == 1).collect())
        .collect();
    build(u, labels, raw_weights, members, min)
}
