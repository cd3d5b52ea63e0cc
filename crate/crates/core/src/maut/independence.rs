//! Deciders for the classical independence conditions on tabulated utilities.
//!
//! Utility independence of `Y` from `Z` is decided slice-wise: under expected
//! utility, preferences over lotteries on `Y` are the same for every `z` iff
//! each slice `u(·, z)` is a positive affine transform of a reference slice.
//! Constant slices (total indifference) are compatible with anything.

use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::factor_core::TioliFunction;

use super::{AttributeSpace, Lottery, TabulatedUtility};

/// Largest attribute count for exhaustive subset iteration.
pub const MAX_MUTUAL_ATTRIBUTES: usize = 20;

/// Result of a decider, carrying a counterexample when the property fails.
#[derive(Clone, Debug, PartialEq)]
pub enum Verdict<W> {
    Holds,
    Fails(W),
}

impl<W> Verdict<W> {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }

    pub fn witness(&self) -> Option<&W> {
        match self {
            Verdict::Holds => None,
            Verdict::Fails(w) => Some(w),
        }
    }
}

/// Two assignments of `Z` whose slices over `Y` are not positively affinely
/// related.
#[derive(Clone, Debug, PartialEq)]
pub struct UiWitness {
    pub y: Vec<String>,
    pub z: Vec<String>,
    /// `(attribute, value)` pairs of the reference conditioning assignment.
    pub reference: Vec<(String, String)>,
    pub conflicting: Vec<(String, String)>,
}

/// Failure of mutual independence: the first subset (in bitmask order) that
/// is not utility independent of its complement.
pub type MutualWitness = UiWitness;

/// Two lotteries with identical single-attribute marginals but different
/// expected utilities, built on a 2×2 sub-square with nonzero interaction.
#[derive(Clone, Debug, PartialEq)]
pub struct AdditiveWitness {
    pub attributes: (String, String),
    /// Uniform over the four corners of the square.
    pub uniform: Lottery,
    /// Half on the low-low corner, half on the high-high corner.
    pub diagonal: Lottery,
    pub eu_uniform: f64,
    pub eu_diagonal: f64,
}

impl std::fmt::Display for AdditiveWitness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "attributes {} and {} interact: EU {} under {} vs {} under {}",
            self.attributes.0,
            self.attributes.1,
            self.eu_uniform,
            self.uniform.describe(),
            self.eu_diagonal,
            self.diagonal.describe()
        )
    }
}

/// `u(x) = constant + Σ_i component_i(x_i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AdditiveDecomposition {
    space: AttributeSpace,
    constant: f64,
    components: Vec<Vec<f64>>,
}

impl AdditiveDecomposition {
    pub fn constant(&self) -> f64 {
        self.constant
    }

    pub fn space(&self) -> &AttributeSpace {
        &self.space
    }

    /// Per-value utilities of one attribute, in domain order.
    pub fn component(&self, attribute: &str) -> Result<&[f64]> {
        let i = self.space.attribute_index(attribute)?;
        Ok(&self.components[i])
    }

    pub fn components(&self) -> &[Vec<f64>] {
        &self.components
    }

    fn value_at(&self, index: usize) -> f64 {
        self.constant
            + self
                .components
                .iter()
                .enumerate()
                .map(|(a, c)| c[self.space.value_at(index, a)])
                .sum::<f64>()
    }

    pub fn to_table(&self) -> TabulatedUtility {
        let values = (0..self.space.size()).map(|i| self.value_at(i)).collect();
        TabulatedUtility {
            space: self.space.clone(),
            values,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TioliMode {
    /// `u(0,…,0)` must be zero.
    Strict,
    /// The constant `u(0,…,0)` is dropped as an affine shift.
    UpToAffine,
}

/// Outcome of running every decider on one table.
#[derive(Clone, Debug, PartialEq)]
pub struct IndependenceReport {
    /// Each attribute checked against its complement.
    pub pairwise: Vec<(String, Verdict<UiWitness>)>,
    pub singular: Verdict<UiWitness>,
    pub mutual: Verdict<MutualWitness>,
    pub additive: Verdict<AdditiveWitness>,
    /// `None` when not TIOLI or when the domains are not boolean.
    pub tioli_strict: Option<TioliFunction>,
    pub tioli_affine: Option<TioliFunction>,
}

/// Table offsets of every joint assignment of `attrs`, in enumeration order
/// (first listed attribute most significant).
fn assignment_offsets(space: &AttributeSpace, attrs: &[usize]) -> Vec<usize> {
    let mut offsets = vec![0usize];
    for &a in attrs {
        let stride = space.stride(a);
        let n = space.attributes()[a].len();
        offsets = offsets
            .iter()
            .flat_map(|&o| (0..n).map(move |v| o + v * stride))
            .collect();
    }
    offsets
}

fn range(slice: &[f64]) -> (usize, usize, f64) {
    let (mut lo, mut hi) = (0, 0);
    for (i, v) in slice.iter().enumerate() {
        if *v < slice[lo] {
            lo = i;
        }
        if *v > slice[hi] {
            hi = i;
        }
    }
    (lo, hi, slice[hi] - slice[lo])
}

/// First pair `(reference z, conflicting z)` violating positive affine
/// relatedness of the slices, if any.
fn slice_conflict(
    values: &[f64],
    y_off: &[usize],
    z_off: &[usize],
    tol: f64,
) -> Option<(usize, usize)> {
    let slice = |z: usize| -> Vec<f64> { y_off.iter().map(|&o| values[o + z_off[z]]).collect() };
    let (z_ref, r) = (0..z_off.len())
        .map(|z| (z, slice(z)))
        .find(|(_, s)| range(s).2 > tol)?;
    let (lo, hi, r_range) = range(&r);
    for z in 0..z_off.len() {
        if z == z_ref {
            continue;
        }
        let s = slice(z);
        if range(&s).2 <= tol {
            continue;
        }
        let b = (s[hi] - s[lo]) / r_range;
        let a = s[lo] - b * r[lo];
        let fits = b > 0.0 && s.iter().zip(&r).all(|(sv, rv)| (sv - (a + b * rv)).abs() <= tol);
        if !fits {
            return Some((z_ref, z));
        }
    }
    None
}

impl TabulatedUtility {
    fn names(&self, attrs: &[usize]) -> Vec<String> {
        attrs
            .iter()
            .map(|&a| self.space.attributes()[a].name().to_string())
            .collect()
    }

    fn assignment(&self, attrs: &[usize], offset: usize) -> Vec<(String, String)> {
        attrs
            .iter()
            .map(|&a| {
                let attr = &self.space.attributes()[a];
                (
                    attr.name().to_string(),
                    attr.values()[self.space.value_at(offset, a)].clone(),
                )
            })
            .collect()
    }

    fn ui_by_index(&self, y: &[usize], z: &[usize], tol: f64) -> Verdict<UiWitness> {
        let y_off = assignment_offsets(&self.space, y);
        let z_off = assignment_offsets(&self.space, z);
        match slice_conflict(&self.values, &y_off, &z_off, tol) {
            None => Verdict::Holds,
            Some((zr, zb)) => Verdict::Fails(UiWitness {
                y: self.names(y),
                z: self.names(z),
                reference: self.assignment(z, z_off[zr]),
                conflicting: self.assignment(z, z_off[zb]),
            }),
        }
    }

    /// Whether `Y` is utility independent of `Z`. `Y` and `Z` must be
    /// nonempty, disjoint, and together cover every attribute; restrict the
    /// table first to fix any other attributes.
    pub fn is_utility_independent(&self, y: &[&str], z: &[&str]) -> Result<Verdict<UiWitness>> {
        if y.is_empty() || z.is_empty() {
            return Err(Error::validation("Y and Z must be nonempty"));
        }
        let yi = self.space.attribute_indices(y)?;
        let zi = self.space.attribute_indices(z)?;
        let mut seen = vec![false; self.space.len()];
        for &a in yi.iter().chain(&zi) {
            if std::mem::replace(&mut seen[a], true) {
                return Err(Error::validation(format!(
                    "attribute `{}` appears twice in Y and Z",
                    self.space.attributes()[a].name()
                )));
            }
        }
        if let Some(a) = seen.iter().position(|s| !s) {
            return Err(Error::validation(format!(
                "attribute `{}` is in neither Y nor Z; restrict the table to fix it",
                self.space.attributes()[a].name()
            )));
        }
        Ok(self.ui_by_index(&yi, &zi, self.tolerance()))
    }

    fn require_two_attributes(&self) -> Result<()> {
        if self.space.len() < 2 {
            return Err(Error::validation(
                "independence conditions need at least two attributes",
            ));
        }
        Ok(())
    }

    fn complement(&self, attrs: &[usize]) -> Vec<usize> {
        (0..self.space.len()).filter(|a| !attrs.contains(a)).collect()
    }

    fn singular_entries(&self) -> Vec<(String, Verdict<UiWitness>)> {
        let tol = self.tolerance();
        (0..self.space.len())
            .map(|i| {
                let name = self.space.attributes()[i].name().to_string();
                (name, self.ui_by_index(&[i], &self.complement(&[i]), tol))
            })
            .collect()
    }

    /// Every single attribute is utility independent of its complement
    /// ("singulary" utility independence).
    pub fn is_singularly_independent(&self) -> Result<Verdict<UiWitness>> {
        self.require_two_attributes()?;
        Ok(first_failure(self.singular_entries()))
    }

    pub fn is_mutually_independent(&self) -> Result<Verdict<MutualWitness>> {
        self.is_mutually_independent_with(Execution::default())
    }

    /// Every nonempty proper subset is utility independent of its
    /// complement. Subsets are swept as bitmasks, in parallel when `mode`
    /// allows; the reported witness is always the lowest failing mask.
    pub fn is_mutually_independent_with(&self, mode: Execution) -> Result<Verdict<MutualWitness>> {
        self.require_two_attributes()?;
        let n = self.space.len();
        if n > MAX_MUTUAL_ATTRIBUTES {
            return Err(Error::Resource(format!(
                "mutual independence is limited to {MAX_MUTUAL_ATTRIBUTES} attributes, table has {n}"
            )));
        }
        let tol = self.tolerance();
        let masks = (1u64 << n) - 2;
        let found = exec::find_first(mode, masks, |k| {
            let mask = k + 1;
            let (y, z): (Vec<usize>, Vec<usize>) = (0..n).partition(|a| mask >> a & 1 == 1);
            self.ui_by_index(&y, &z, tol).witness().cloned()
        });
        Ok(found.map_or(Verdict::Holds, Verdict::Fails))
    }

    /// Additive candidate `û(x) = u(x⁰) + Σ_i [u(x_i, x⁰_{−i}) − u(x⁰)]`, with
    /// `x⁰` the first value of every domain.
    fn additive_candidate(&self) -> AdditiveDecomposition {
        let base = self.values[0];
        let components = (0..self.space.len())
            .map(|a| {
                let stride = self.space.stride(a);
                (0..self.space.attributes()[a].len())
                    .map(|v| self.values[v * stride] - base)
                    .collect()
            })
            .collect();
        AdditiveDecomposition {
            space: self.space.clone(),
            constant: base,
            components,
        }
    }

    fn is_reproduced_by(&self, d: &AdditiveDecomposition, tol: f64) -> bool {
        (0..self.space.size()).all(|i| (d.value_at(i) - self.values[i]).abs() <= tol)
    }

    /// Lotteries with equal marginals and different expected utilities, from
    /// the first 2×2 sub-square whose interaction exceeds `tol` (or the
    /// largest interaction if none does).
    fn interaction_witness(&self, tol: f64) -> AdditiveWitness {
        let space = &self.space;
        let n = space.len();
        let mut best: Option<(f64, [usize; 4], usize, usize)> = None;
        'search: for i in 0..n {
            for j in i + 1..n {
                let (si, sj) = (space.stride(i), space.stride(j));
                let (di, dj) = (space.attributes()[i].len(), space.attributes()[j].len());
                for ctx in 0..space.size() {
                    if space.value_at(ctx, i) != 0 || space.value_at(ctx, j) != 0 {
                        continue;
                    }
                    for a in 0..di {
                        for a2 in a + 1..di {
                            for b in 0..dj {
                                for b2 in b + 1..dj {
                                    let c = [
                                        ctx + a * si + b * sj,
                                        ctx + a2 * si + b2 * sj,
                                        ctx + a * si + b2 * sj,
                                        ctx + a2 * si + b * sj,
                                    ];
                                    let v = &self.values;
                                    let inter = (v[c[0]] + v[c[1]] - v[c[2]] - v[c[3]]).abs();
                                    if best.is_none_or(|(m, ..)| inter > m) {
                                        best = Some((inter, c, i, j));
                                    }
                                    if inter > tol {
                                        break 'search;
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        let (_, corners, i, j) = best.expect("at least two attributes");
        let mut uniform = vec![0.0; space.size()];
        let mut diagonal = vec![0.0; space.size()];
        for &c in &corners {
            uniform[c] = 0.25;
        }
        diagonal[corners[0]] = 0.5;
        diagonal[corners[1]] = 0.5;
        let uniform = Lottery {
            space: space.clone(),
            probs: uniform,
        };
        let diagonal = Lottery {
            space: space.clone(),
            probs: diagonal,
        };
        let eu_uniform = self.expected_utility(&uniform).unwrap_or(f64::NAN);
        let eu_diagonal = self.expected_utility(&diagonal).unwrap_or(f64::NAN);
        AdditiveWitness {
            attributes: (
                space.attributes()[i].name().to_string(),
                space.attributes()[j].name().to_string(),
            ),
            uniform,
            diagonal,
            eu_uniform,
            eu_diagonal,
        }
    }

    /// Preferences over lotteries depend only on the single-attribute
    /// marginals, i.e. the table decomposes additively.
    pub fn is_additive_independent(&self) -> Result<Verdict<AdditiveWitness>> {
        self.require_two_attributes()?;
        let tol = self.tolerance();
        let candidate = self.additive_candidate();
        if self.is_reproduced_by(&candidate, tol) {
            Ok(Verdict::Holds)
        } else {
            Ok(Verdict::Fails(self.interaction_witness(tol)))
        }
    }

    pub fn additive_decomposition(&self) -> Result<AdditiveDecomposition> {
        match self.is_additive_independent()? {
            Verdict::Holds => Ok(self.additive_candidate()),
            Verdict::Fails(w) => Err(Error::NotAdditive(Box::new(w))),
        }
    }

    /// Returns the TIOLI weights `k_i = u(e_i) − u(0)` when the table has the
    /// form `Σ k_i x_i` (plus a constant, in [`TioliMode::UpToAffine`]).
    pub fn is_tioli(&self, mode: TioliMode) -> Result<Option<TioliFunction>> {
        if !self.space.is_boolean() {
            return Err(Error::validation("TIOLI detection needs boolean attributes"));
        }
        let tol = self.tolerance();
        let candidate = self.additive_candidate();
        if !self.is_reproduced_by(&candidate, tol) {
            return Ok(None);
        }
        if mode == TioliMode::Strict && candidate.constant.abs() > tol {
            return Ok(None);
        }
        let weights = self
            .space
            .attributes()
            .iter()
            .zip(&candidate.components)
            .map(|(a, c)| (a.name().to_string(), c[1]));
        TioliFunction::new(weights).map(Some)
    }

    pub fn classify(&self) -> Result<IndependenceReport> {
        self.classify_with(Execution::default())
    }

    pub fn classify_with(&self, mode: Execution) -> Result<IndependenceReport> {
        self.require_two_attributes()?;
        let pairwise = self.singular_entries();
        let singular = first_failure(pairwise.clone());
        let mutual = self.is_mutually_independent_with(mode)?;
        let additive = self.is_additive_independent()?;
        let (tioli_strict, tioli_affine) = if self.space.is_boolean() {
            (
                self.is_tioli(TioliMode::Strict)?,
                self.is_tioli(TioliMode::UpToAffine)?,
            )
        } else {
            (None, None)
        };
        Ok(IndependenceReport {
            pairwise,
            singular,
            mutual,
            additive,
            tioli_strict,
            tioli_affine,
        })
    }
}

fn first_failure(entries: Vec<(String, Verdict<UiWitness>)>) -> Verdict<UiWitness> {
    entries
        .into_iter()
        .find_map(|(_, v)| match v {
            Verdict::Fails(w) => Some(Verdict::Fails(w)),
            Verdict::Holds => None,
        })
        .unwrap_or(Verdict::Holds)
}
