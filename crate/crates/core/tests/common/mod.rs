//! Seeded generators and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use udist::maut::{Attribute, AttributeSpace, Lottery, TabulatedUtility};
use udist::unet::{Assignment, CutDef, NetworkDef, UEvent};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn space(rng: &mut impl Rng, max_attrs: usize, max_domain: usize) -> AttributeSpace {
    let n = rng.gen_range(2..=max_attrs.max(2));
    let attrs = (0..n)
        .map(|i| {
            let d = rng.gen_range(2..=max_domain);
            Attribute::new(format!("x{i}"), (0..d).map(|v| format!("v{v}"))).unwrap()
        })
        .collect();
    AttributeSpace::new(attrs).unwrap()
}

/// A table drawn from a mix of shapes so that every branch of the
/// independence hierarchy is exercised: additive, multiplicative,
/// small-integer noise and continuous noise.
pub fn table(rng: &mut impl Rng, max_attrs: usize, max_domain: usize) -> TabulatedUtility {
    let space = space(rng, max_attrs, max_domain);
    let comps: Vec<Vec<f64>> = space
        .attributes()
        .iter()
        .map(|a| (0..a.len()).map(|_| rng.gen_range(0..4) as f64).collect())
        .collect();
    let shape = rng.gen_range(0..5);
    let values = space
        .states()
        .map(|s| match shape {
            0 => s.0.iter().zip(&comps).map(|(&v, c)| c[v]).sum(),
            1 => s.0.iter().zip(&comps).map(|(&v, c)| c[v] + 1.0).product(),
            2 => rng.gen_range(0..3) as f64,
            3 => rng.gen_range(-1.0..1.0),
            _ => s.0.iter().zip(&comps).map(|(&v, c)| c[v]).sum::<f64>() + rng.gen_range(0..2) as f64,
        })
        .collect();
    TabulatedUtility::from_values(space, values).unwrap()
}

pub fn boolean_table(rng: &mut impl Rng, n: usize) -> TabulatedUtility {
    let attrs = (0..n).map(|i| Attribute::boolean(format!("x{i}")).unwrap()).collect();
    let space = AttributeSpace::new(attrs).unwrap();
    let continuous = rng.gen_bool(0.5);
    let values = (0..space.size())
        .map(|_| {
            if continuous {
                rng.gen_range(-2.0..2.0)
            } else {
                rng.gen_range(0..3) as f64
            }
        })
        .collect();
    TabulatedUtility::from_values(space, values).unwrap()
}

fn probability(rng: &mut impl Rng) -> f64 {
    match rng.gen_range(0..10) {
        0 => 0.0,
        1 => 1.0,
        _ => rng.gen(),
    }
}

/// Random CUT rows for a fixed topology.
pub fn parameterize(rng: &mut impl Rng, variables: &[String], edges: &[(String, String)]) -> NetworkDef {
    let cuts = variables
        .iter()
        .map(|v| {
            let parents: Vec<String> = edges
                .iter()
                .filter(|(_, c)| c == v)
                .map(|(p, _)| p.clone())
                .collect();
            let rows = (0..1usize << parents.len())
                .map(|_| {
                    let p1 = probability(rng);
                    [1.0 - p1, p1]
                })
                .collect();
            CutDef {
                variable: v.clone(),
                parents,
                rows,
            }
        })
        .collect();
    NetworkDef {
        variables: variables.to_vec(),
        edges: edges.to_vec(),
        cuts,
    }
}

/// A random DAG over `v0..v{n-1}` with at most `max_parents` parents per
/// node, declared in a shuffled order.
pub fn network(rng: &mut impl Rng, max_vars: usize, max_parents: usize, prefix: &str) -> NetworkDef {
    let n = rng.gen_range(1..=max_vars);
    let names: Vec<String> = (0..n).map(|i| format!("{prefix}{i}")).collect();
    let mut edges = Vec::new();
    for child in 1..n {
        let k = rng.gen_range(0..=max_parents.min(child));
        let mut candidates: Vec<usize> = (0..child).collect();
        candidates.shuffle(rng);
        for &p in &candidates[..k] {
            edges.push((names[p].clone(), names[child].clone()));
        }
    }
    let mut declared = names.clone();
    declared.shuffle(rng);
    parameterize(rng, &declared, &edges)
}

pub fn assignment(rng: &mut impl Rng, vars: &[String], max_len: usize) -> Assignment {
    let mut pool = vars.to_vec();
    pool.shuffle(rng);
    let k = rng.gen_range(0..=max_len.min(pool.len()));
    pool[..k]
        .iter()
        .fold(Assignment::new(), |a, v| a.with(v.clone(), rng.gen_bool(0.5)))
}

pub fn event(rng: &mut impl Rng, vars: &[String]) -> UEvent {
    let terms = rng.gen_range(1..=3);
    UEvent::union((0..terms).map(|_| assignment(rng, vars, 3)).collect())
}

/// Product of CUT entries for a full assignment, read straight off the
/// definition.
pub fn brute_joint(def: &NetworkDef, full: &dyn Fn(&str) -> bool) -> f64 {
    def.cuts
        .iter()
        .map(|c| {
            let row = c
                .parents
                .iter()
                .fold(0usize, |acc, p| acc << 1 | usize::from(full(p)));
            c.rows[row][usize::from(full(&c.variable))]
        })
        .product()
}

fn matches(e: &UEvent, full: &dyn Fn(&str) -> bool) -> bool {
    e.terms()
        .iter()
        .any(|t| t.iter().all(|(v, b)| full(v) == b))
}

/// Σ of the joint over all assignments in `e`, by exhaustive enumeration.
pub fn brute_marginal(def: &NetworkDef, e: &UEvent) -> f64 {
    let n = def.variables.len();
    (0..1u64 << n)
        .map(|bits| {
            let full = |name: &str| {
                let i = def.variables.iter().position(|v| v == name).unwrap();
                bits >> i & 1 == 1
            };
            if matches(e, &full) {
                brute_joint(def, &full)
            } else {
                0.0
            }
        })
        .sum()
}

pub fn brute_conditional(def: &NetworkDef, x: &UEvent, y: &UEvent) -> Option<f64> {
    let d = brute_marginal(def, y);
    (d > 0.0).then(|| brute_marginal(def, &x.intersect(y)) / d)
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn table_tol(u: &TabulatedUtility) -> f64 {
    1e-9 * u.values().iter().fold(1.0f64, |m, v| m.max(v.abs()))
}

/// Preference between two lotteries over `y` (probability on the second
/// value) with `z` held at `zv`; -1, 0 or 1.
fn two_point_preference(u: &TabulatedUtility, y: usize, zv: usize, p: f64, q: f64, tol: f64) -> i8 {
    let at = |yv: usize| {
        let mut s = vec![0; 2];
        s[y] = yv;
        s[1 - y] = zv;
        u.utility(&udist::maut::State(s))
    };
    let eu = |r: f64| (1.0 - r) * at(0) + r * at(1);
    let d = eu(p) - eu(q);
    if d.abs() <= tol {
        0
    } else if d > 0.0 {
        1
    } else {
        -1
    }
}

/// Utility independence of attribute `y` from the other attribute of a
/// two-attribute boolean table, decided by comparing preference orderings
/// over every pair of two-point lotteries with denominators up to 8.
///
/// A value of `z` under which every lottery is indifferent constrains
/// nothing: total indifference is the same ordering under any reading.
pub fn classical_ui_oracle(u: &TabulatedUtility, y: usize) -> bool {
    let tol = table_tol(u);
    let grid: Vec<f64> = (1..=8u32)
        .flat_map(|d| (0..=d).map(move |k| f64::from(k) / f64::from(d)))
        .collect();
    let orderings: Vec<Vec<i8>> = (0..2)
        .map(|zv| {
            grid.iter()
                .flat_map(|&p| grid.iter().map(move |&q| (p, q)))
                .map(|(p, q)| two_point_preference(u, y, zv, p, q, tol))
                .collect()
        })
        .collect();
    let informative: Vec<&Vec<i8>> = orderings.iter().filter(|o| o.iter().any(|&x| x != 0)).collect();
    informative.windows(2).all(|w| w[0] == w[1])
}

/// A random lottery with full support and a second lottery with the same
/// single-attribute marginals, made by moving mass around 2×2 squares.
pub fn matched_lotteries(rng: &mut impl Rng, space: &AttributeSpace) -> (Lottery, Lottery) {
    let n = space.size();
    let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..1.5)).collect();
    let total: f64 = raw.iter().sum();
    let p1: Vec<f64> = raw.iter().map(|x| x / total).collect();
    let mut p2 = p1.clone();
    let k = space.len();
    if k >= 2 {
        for _ in 0..4 {
            let i = rng.gen_range(0..k);
            let j = (i + rng.gen_range(1..k)) % k;
            let mut s = space.state_at(rng.gen_range(0..n));
            let di = space.attributes()[i].len();
            let dj = space.attributes()[j].len();
            let (a, a2) = (rng.gen_range(0..di), rng.gen_range(0..di - 1));
            let a2 = if a2 >= a { a2 + 1 } else { a2 };
            let (b, b2) = (rng.gen_range(0..dj), rng.gen_range(0..dj - 1));
            let b2 = if b2 >= b { b2 + 1 } else { b2 };
            let mut idx = |x: usize, y: usize| {
                s.0[i] = x;
                s.0[j] = y;
                space.index_of(&s)
            };
            let plus = [idx(a, b), idx(a2, b2)];
            let minus = [idx(a, b2), idx(a2, b)];
            let room_up = minus.iter().map(|&m| p2[m]).fold(f64::INFINITY, f64::min);
            let room_down = plus.iter().map(|&m| p2[m]).fold(f64::INFINITY, f64::min);
            let eps = rng.gen_range(-room_down..=room_up);
            for m in plus {
                p2[m] += eps;
            }
            for m in minus {
                p2[m] -= eps;
            }
        }
    }
    for x in &mut p2 {
        *x = x.max(0.0);
    }
    let p2_total: f64 = p2.iter().sum();
    let p2 = p2.iter().map(|x| x / p2_total).collect();
    (
        Lottery::from_dense(space.clone(), p1).unwrap(),
        Lottery::from_dense(space.clone(), p2).unwrap(),
    )
}

/// Whether every sampled marginal-matched pair has equal expected utility.
pub fn lottery_oracle(rng: &mut impl Rng, u: &TabulatedUtility, pairs: usize) -> bool {
    let tol = table_tol(u);
    (0..pairs).all(|_| {
        let (p1, p2) = matched_lotteries(rng, u.space());
        let d = u.expected_utility(&p1).unwrap() - u.expected_utility(&p2).unwrap();
        d.abs() <= tol
    })
}

/// Expected utility over a bi-network computed from the two definitions by
/// exhaustive enumeration on each side. `None` when either evidence event
/// has measure zero.
pub fn dual_enumeration(
    pdef: &NetworkDef,
    udef: &NetworkDef,
    bridges: &[(UEvent, UEvent)],
    p_evidence: &UEvent,
    u_evidence: &UEvent,
) -> Option<f64> {
    let mut total = 0.0;
    for (pe, ue) in bridges {
        let p = brute_conditional(pdef, pe, p_evidence)?;
        let u = brute_conditional(udef, ue, u_evidence)?;
        total += p * u;
    }
    if bridges.is_empty() && (brute_marginal(pdef, p_evidence) <= 0.0 || brute_marginal(udef, u_evidence) <= 0.0) {
        return None;
    }
    Some(total)
}

/// A random bi-network: two independent random nets and up to four bridges
/// between random events.
pub fn binetwork(rng: &mut impl Rng) -> (NetworkDef, NetworkDef, Vec<(UEvent, UEvent)>) {
    let pdef = network(rng, 6, 2, "p");
    let udef = network(rng, 6, 2, "u");
    let k = rng.gen_range(1..=4);
    let bridges = (0..k)
        .map(|_| (event(rng, &pdef.variables), event(rng, &udef.variables)))
        .collect();
    (pdef, udef, bridges)
}
