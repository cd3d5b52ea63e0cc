//! Exact inference by variable elimination over boolean factors.

use std::collections::BTreeSet;

/// A nonnegative function over a set of boolean variables. Variables are
/// kept sorted; bit `i` of a row index is the value of `vars[i]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Factor {
    vars: Vec<usize>,
    values: Vec<f64>,
}

impl Factor {
    pub(crate) fn new(vars: Vec<usize>, values: Vec<f64>) -> Self {
        debug_assert!(vars.windows(2).all(|w| w[0] < w[1]));
        debug_assert_eq!(values.len(), 1 << vars.len());
        Factor { vars, values }
    }

    pub fn scalar(v: f64) -> Self {
        Factor {
            vars: Vec::new(),
            values: vec![v],
        }
    }

    pub fn vars(&self) -> &[usize] {
        &self.vars
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value at a full assignment of this factor's variables, given as a
    /// lookup from variable to value.
    pub fn value(&self, assign: impl Fn(usize) -> bool) -> f64 {
        let idx = self
            .vars
            .iter()
            .enumerate()
            .filter(|(_, v)| assign(**v))
            .fold(0usize, |acc, (i, _)| acc | 1 << i);
        self.values[idx]
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    fn position(&self, var: usize) -> Option<usize> {
        self.vars.binary_search(&var).ok()
    }

    /// Fixes `var = val`, dropping it from the scope.
    pub(crate) fn restrict(&self, var: usize, val: bool) -> Factor {
        let Some(p) = self.position(var) else {
            return self.clone();
        };
        let mut vars = self.vars.clone();
        vars.remove(p);
        let low = (1usize << p) - 1;
        let values = (0..1usize << vars.len())
            .map(|i| {
                let src = (i & low) | ((i & !low) << 1) | (usize::from(val) << p);
                self.values[src]
            })
            .collect();
        Factor { vars, values }
    }

    pub(crate) fn multiply(&self, other: &Factor) -> Factor {
        let vars = merge(&self.vars, &other.vars);
        let (sa, sb) = (steps(&vars, &self.vars), steps(&vars, &other.vars));
        let n = 1usize << vars.len();
        let mut values = Vec::with_capacity(n);
        let (mut ia, mut ib) = (0isize, 0isize);
        for i in 0..n {
            values.push(self.values[ia as usize] * other.values[ib as usize]);
            if i + 1 < n {
                let t = (i + 1).trailing_zeros() as usize;
                ia += sa[t];
                ib += sb[t];
            }
        }
        Factor { vars, values }
    }

    pub(crate) fn sum_out(&self, var: usize) -> Factor {
        if self.position(var).is_none() {
            return self.clone();
        }
        let lo = self.restrict(var, false);
        let hi = self.restrict(var, true);
        let values = lo.values.iter().zip(&hi.values).map(|(a, b)| a + b).collect();
        Factor {
            vars: lo.vars,
            values,
        }
    }
}

/// Per-bit increments for walking a sub-scope index alongside a scope
/// index. Incrementing the scope index clears its trailing ones and sets
/// bit `t`; the sub-scope index changes by `steps[t]`.
fn steps(scope: &[usize], sub: &[usize]) -> Vec<isize> {
    let mut cleared = 0isize;
    scope
        .iter()
        .map(|v| {
            let c = sub.binary_search(v).map_or(0, |p| 1isize << p);
            let step = c - cleared;
            cleared += c;
            step
        })
        .collect()
}

/// Sorted union of two sorted variable lists.
fn merge(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Greedy min-degree choice: the variable whose elimination touches the
/// fewest other variables, ties broken by lowest index.
fn min_degree(factors: &[Factor], candidates: &BTreeSet<usize>) -> usize {
    let degree = |v: usize| -> usize {
        let neighbours = factors
            .iter()
            .filter(|f| f.position(v).is_some())
            .fold(Vec::new(), |acc, f| merge(&acc, &f.vars));
        neighbours.len() - 1
    };
    candidates
        .iter()
        .copied()
        .min_by_key(|&v| (degree(v), v))
        .expect("nonempty candidate set")
}

fn eliminate_var(factors: &mut Vec<Factor>, var: usize) {
    let (touching, rest): (Vec<Factor>, Vec<Factor>) =
        factors.drain(..).partition(|f| f.position(var).is_some());
    *factors = rest;
    if let Some(product) = touching.into_iter().reduce(|a, b| a.multiply(&b)) {
        factors.push(product.sum_out(var));
    }
}

/// Sums out every variable not in `keep` and returns the product of what is
/// left, a factor over `keep` (restricted to variables that occur).
///
/// `order` fixes the elimination sequence; variables missing from it are
/// eliminated afterwards by min-degree. With `None` the whole sequence is
/// min-degree.
pub fn eliminate(mut factors: Vec<Factor>, keep: &[usize], order: Option<&[usize]>) -> Factor {
    let mut pending: BTreeSet<usize> = factors
        .iter()
        .flat_map(|f| f.vars.iter().copied())
        .filter(|v| !keep.contains(v))
        .collect();
    for &v in order.unwrap_or(&[]) {
        if pending.remove(&v) {
            eliminate_var(&mut factors, v);
        }
    }
    while !pending.is_empty() {
        let v = min_degree(&factors, &pending);
        pending.remove(&v);
        eliminate_var(&mut factors, v);
    }
    factors
        .into_iter()
        .reduce(|a, b| a.multiply(&b))
        .unwrap_or_else(|| Factor::scalar(1.0))
}
