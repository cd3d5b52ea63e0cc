//! End-to-end acceptance run: one PASS/FAIL line per criterion.

mod common;

use std::time::{Duration, Instant};

use rand::Rng;

use udist::binet::{BiNetwork, Bridge, ProbabilityNetwork};
use udist::factor_core::{FactorSet, TioliFunction, UtilityDistribution, DEFAULT_TOL};
use udist::factorize::{binary_factorization, prefix_chain};
use udist::maut::{Attribute, AttributeSpace, TabulatedUtility};
use udist::unet::{UEvent, UtilityNetwork};
use udist::{Execution, Result};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome { pass, detail: detail.into() })
}

fn set(labels: &[&str]) -> FactorSet {
    FactorSet::from_labels(labels.iter().copied()).unwrap()
}

fn health_wealth(hw: f64) -> TabulatedUtility {
    let space = AttributeSpace::new(vec![
        Attribute::new("H", ["sick", "healthy"]).unwrap(),
        Attribute::new("W", ["poor", "wealthy"]).unwrap(),
    ])
    .unwrap();
    TabulatedUtility::from_entries(
        space,
        [
            (vec!["healthy", "wealthy"], hw),
            (vec!["healthy", "poor"], 2.0),
            (vec!["sick", "wealthy"], 1.0),
            (vec!["sick", "poor"], 0.0),
        ],
    )
    .unwrap()
}

fn car_conditional() -> Result<Outcome> {
    let d = UtilityDistribution::new([("r", 0.1), ("m", 0.2), ("f", 0.7)])?;
    let v = d.conditional_utility(&set(&["f"]), &set(&["f", "m"]))?;
    outcome((v - 0.777777778).abs() <= 1e-9, format!("u(f|fm) = {v:.12}"))
}

fn four_car_independence() -> Result<Outcome> {
    let d = UtilityDistribution::new([("r", 6.0 / 30.0), ("m", 3.0 / 30.0), ("f", 14.0 / 30.0), ("t", 7.0 / 30.0)])?;
    let (fr, rm) = (set(&["f", "r"]), set(&["r", "m"]));
    let cond = d.conditional_utility(&fr, &rm)?;
    let plain = d.utility(&fr)?;
    let indep = d.is_subjectively_independent(&fr, &rm, DEFAULT_TOL)?;
    let pass = (cond - 2.0 / 3.0).abs() <= 1e-9 && (plain - 2.0 / 3.0).abs() <= 1e-9 && indep;
    outcome(pass, format!("u(fr|rm) = {cond:.12}, u(fr) = {plain:.12}, independent = {indep}"))
}

fn health_wealth_classification() -> Result<Outcome> {
    let r = health_wealth(5.0).classify()?;
    let w = r.additive.witness();
    let eus = w.map(|w| (w.eu_uniform, w.eu_diagonal));
    let original = r.singular.holds() && r.mutual.holds() && !r.additive.holds() && eus == Some((2.0, 2.5));
    let m = health_wealth(3.0).classify()?;
    let k = m.tioli_strict.as_ref().map(|k| (k.weight("H"), k.weight("W")));
    let modified = m.additive.holds() && k == Some((Some(2.0), Some(1.0)));
    outcome(
        original && modified,
        format!(
            "original: singular={} mutual={} additive={} witness EUs={eus:?}; modified: additive={} strict k={k:?}",
            r.singular.holds(),
            r.mutual.holds(),
            r.additive.holds(),
            m.additive.holds()
        ),
    )
}

fn normalization() -> Result<Outcome> {
    let k = TioliFunction::new([("H", 2.0), ("W", 1.0)])?;
    let (d, rec) = k.normalize()?;
    let (h, w) = (d.weight("H").unwrap(), d.weight("W").unwrap());
    let sum_ok = (h + w - 1.0).abs() <= 1e-12 && (h - 2.0 / 3.0).abs() <= 1e-12 && (w - 1.0 / 3.0).abs() <= 1e-12;
    let u = health_wealth(3.0);
    let mut exact = true;
    for s in u.space().states() {
        let present: Vec<&str> = [("H", s.0[0]), ("W", s.0[1])]
            .into_iter()
            .filter(|(_, v)| *v == 1)
            .map(|(n, _)| n)
            .collect();
        exact &= rec.reconstruct(&d, &set(&present))? == u.utility(&s);
    }
    outcome(sum_ok && exact, format!("weights ({h:.12}, {w:.12}), exact round-trip = {exact}"))
}

fn factorization_bounds() -> Result<Outcome> {
    let u = health_wealth(3.0);
    let b = binary_factorization(&u, None)?;
    let p = prefix_chain(&u)?;
    b.verify(&u)?;
    p.verify(&u)?;
    let mut max_err = 0.0f64;
    for (i, s) in u.space().states().enumerate() {
        max_err = max_err
            .max((b.reconstruct(i)? - u.utility(&s)).abs())
            .max((p.reconstruct(i)? - u.utility(&s)).abs());
    }
    let pass = b.factor_count() == 2 && b.raw_weights() == [1.0, 2.0] && p.factor_count() == 3 && max_err <= 1e-9;
    outcome(
        pass,
        format!(
            "binary: {} factors raw {:?}; prefix: {} factors; max reconstruction error {max_err:e}",
            b.factor_count(),
            b.raw_weights(),
            p.factor_count()
        ),
    )
}

fn sfmoma_topology() -> (Vec<String>, Vec<(String, String)>) {
    let vars = ["GSPD", "OwnGSPD", "DirtBike", "Art", "SFMOMA", "deKooning", "Money"];
    let edges = [
        ("GSPD", "OwnGSPD"),
        ("GSPD", "DirtBike"),
        ("Art", "SFMOMA"),
        ("Art", "deKooning"),
        ("OwnGSPD", "Money"),
        ("deKooning", "Money"),
    ];
    (
        vars.iter().map(|s| s.to_string()).collect(),
        edges.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
    )
}

/// Every (X, Y, Z) of pairwise disjoint variable sets with X and Y nonempty
/// and X listed before Y (the relation is symmetric).
fn all_triples(vars: &[String]) -> Vec<[Vec<String>; 3]> {
    let n = vars.len() as u32;
    let mut out = Vec::new();
    for code in 0..4usize.pow(n) {
        let mut sets: [Vec<String>; 3] = Default::default();
        let mut c = code;
        for v in vars {
            if c % 4 < 3 {
                sets[c % 4].push(v.clone());
            }
            c /= 4;
        }
        if !sets[0].is_empty() && !sets[1].is_empty() && sets[0] < sets[1] {
            out.push(sets);
        }
    }
    out
}

fn refs(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

fn sfmoma_separation() -> Result<Outcome> {
    let (vars, edges) = sfmoma_topology();
    let mut rng = common::rng(6);
    let net = UtilityNetwork::new(&common::parameterize(&mut rng, &vars, &edges))?;
    let given = net.d_separated(&["Money"], &["GSPD"], &["OwnGSPD"])?;
    let marginal = net.d_separated(&["Money"], &["GSPD"], &[])?;
    let mut separated = Vec::new();
    for [x, y, z] in all_triples(&vars) {
        if net.d_separated(&refs(&x), &refs(&y), &refs(&z))? {
            separated.push([x, y, z]);
        }
    }
    let mut failures = 0usize;
    for _ in 0..50 {
        let net = UtilityNetwork::new(&common::parameterize(&mut rng, &vars, &edges))?;
        for [x, y, z] in &separated {
            if !net.numerically_independent(&refs(x), &refs(y), &refs(z), 1e-9)? {
                failures += 1;
            }
        }
    }
    outcome(
        given && !marginal && failures == 0,
        format!(
            "dsep(Money,GSPD|OwnGSPD)={given}, dsep(Money,GSPD)={marginal}; {} separated triples x 50 CUT sets, {failures} numeric failures",
            separated.len()
        ),
    )
}

fn inference_equivalence() -> Result<Outcome> {
    let mut rng = common::rng(7);
    let mut max_dev = 0.0f64;
    let mut max_brute = 0.0f64;
    for _ in 0..200 {
        let def = common::network(&mut rng, 10, 3, "v");
        let net = UtilityNetwork::new(&def)?;
        for _ in 0..50 {
            let e = common::event(&mut rng, &def.variables);
            let ve = net.marginal_utility(&e)?;
            max_dev = max_dev.max((ve - net.enumerate_marginal(&e)?).abs());
            max_brute = max_brute.max((ve - common::brute_marginal(&def, &e)).abs());
        }
    }
    outcome(
        max_dev <= 1e-9 && max_brute <= 1e-9,
        format!("10000 events: max |VE - enumeration| = {max_dev:e}, max |VE - definition| = {max_brute:e}"),
    )
}

fn implication_chain() -> Result<Outcome> {
    let mut rng = common::rng(8);
    let mut violations = 0usize;
    let mut affine_mismatches = 0usize;
    let mut counts = [0usize; 3];
    for _ in 0..500 {
        let u = common::table(&mut rng, 3, 3);
        let r = u.classify()?;
        let (a, m, s) = (r.additive.holds(), r.mutual.holds(), r.singular.holds());
        counts[0] += usize::from(a);
        counts[1] += usize::from(m);
        counts[2] += usize::from(s);
        if (a && !m) || (m && !s) {
            violations += 1;
        }
        let base = (s, m, a, r.tioli_affine.is_some());
        for _ in 0..20 {
            let (sh, sc) = (rng.gen_range(-10.0..10.0), rng.gen_range(0.01..100.0));
            let t = u.affine(sh, sc).classify()?;
            if (t.singular.holds(), t.mutual.holds(), t.additive.holds(), t.tioli_affine.is_some()) != base {
                affine_mismatches += 1;
            }
        }
    }
    outcome(
        violations == 0 && affine_mismatches == 0,
        format!(
            "500 tables (additive {}, mutual {}, singular {}): {violations} chain violations, {affine_mismatches} affine mismatches in 10000 transforms",
            counts[0], counts[1], counts[2]
        ),
    )
}

fn classical_ui_oracle() -> Result<Outcome> {
    let mut rng = common::rng(9);
    let mut disagreements = 0usize;
    let mut holds = 0usize;
    for _ in 0..200 {
        let u = common::boolean_table(&mut rng, 2);
        for (y, z, yi) in [("x0", "x1", 0), ("x1", "x0", 1)] {
            let got = u.is_utility_independent(&[y], &[z])?.holds();
            holds += usize::from(got);
            if got != common::classical_ui_oracle(&u, yi) {
                disagreements += 1;
            }
        }
    }
    outcome(
        disagreements == 0,
        format!("400 checks ({holds} independent): {disagreements} disagreements"),
    )
}

fn binet_separation() -> Result<Outcome> {
    let mut rng = common::rng(10);
    let mut max_dev = 0.0f64;
    let mut max_err = 0.0f64;
    let mut mismatched_nulls = 0usize;
    for _ in 0..50 {
        let (pdef, udef, pairs) = common::binetwork(&mut rng);
        let bridges = pairs
            .iter()
            .map(|(p, u)| Bridge { p_event: p.clone(), u_event: u.clone() })
            .collect();
        let b = BiNetwork::new(ProbabilityNetwork::new(&pdef)?, UtilityNetwork::new(&udef)?, bridges)?;
        let probes: Vec<UEvent> = (0..5).map(|_| common::event(&mut rng, &pdef.variables)).collect();
        let before: Vec<f64> = probes.iter().map(|e| b.pnet().probability(e)).collect::<Result<_>>()?;
        let ue = common::event(&mut rng, &udef.variables);
        let pe = common::event(&mut rng, &pdef.variables);
        if let Ok(terms) = b.bridge_terms(None, Some(&ue), Execution::Parallel) {
            let plain = b.bridge_terms(None, None, Execution::Sequential)?;
            for ((p0, _), (p1, _)) in plain.iter().zip(&terms) {
                max_dev = max_dev.max((p0 - p1).abs());
            }
        }
        let after: Vec<f64> = probes.iter().map(|e| b.pnet().probability(e)).collect::<Result<_>>()?;
        for (x, y) in before.iter().zip(&after) {
            max_dev = max_dev.max((x - y).abs());
        }
        let oracle = common::dual_enumeration(&pdef, &udef, &pairs, &pe, &ue);
        match (b.expected_utility_query(Some(&pe), Some(&ue)), oracle) {
            (Ok(v), Some(o)) => max_err = max_err.max((v - o).abs()),
            (Err(udist::Error::ConditioningOnNull(_)), None) => {}
            _ => mismatched_nulls += 1,
        }
        let unconditioned = common::dual_enumeration(&pdef, &udef, &pairs, &UEvent::all(), &UEvent::all()).unwrap();
        max_err = max_err.max((b.expected_utility_query(None, None)? - unconditioned).abs());
    }
    outcome(
        max_dev == 0.0 && max_err <= 1e-9 && mismatched_nulls == 0,
        format!("max p-net deviation {max_dev:e}, max |EU - oracle| {max_err:e}, null mismatches {mismatched_nulls}"),
    )
}

type Criterion = (&'static str, Duration, fn() -> Result<Outcome>);

fn main() {
    let criteria: [Criterion; 10] = [
        ("car conditional utility", Duration::from_secs(1), car_conditional),
        ("four-car independence", Duration::from_secs(1), four_car_independence),
        ("health/wealth classification", Duration::from_secs(1), health_wealth_classification),
        ("TIOLI normalization", Duration::from_secs(1), normalization),
        ("factorization bounds", Duration::from_secs(1), factorization_bounds),
        ("SFMOMA d-separation", Duration::from_secs(5), sfmoma_separation),
        ("inference oracle equivalence", Duration::from_secs(60), inference_equivalence),
        ("implication chain", Duration::from_secs(60), implication_chain),
        ("classical-UI oracle", Duration::from_secs(30), classical_ui_oracle),
        ("bi-network separation", Duration::from_secs(30), binet_separation),
    ];
    let mut failed = 0;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let took = start.elapsed();
        let (pass, detail) = match result {
            Ok(o) => (o.pass && took <= *budget, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        failed += usize::from(!pass);
        println!(
            "criterion {:>2} {:<30} {}  [{:.2}s / {}s]  {detail}",
            i + 1,
            name,
            if pass { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
