use proptest::prelude::*;

use udist::factor_core::{FactorSet, TioliFunction, UtilityDistribution, DEFAULT_TOL};

const LABELS: [&str; 6] = ["a", "b", "c", "d", "e", "f"];

/// Integer weights over the first `n` labels, normalized; at least one
/// weight is positive.
fn int_weights() -> impl Strategy<Value = Vec<u32>> {
    (2usize..=6)
        .prop_flat_map(|n| prop::collection::vec(0u32..6, n))
        .prop_filter("some positive weight", |w| w.iter().any(|&x| x > 0))
}

fn distribution(w: &[u32]) -> UtilityDistribution {
    let total: u32 = w.iter().sum();
    UtilityDistribution::new(
        w.iter()
            .enumerate()
            .map(|(i, &x)| (LABELS[i], f64::from(x) / f64::from(total))),
    )
    .unwrap()
}

fn subset(n: usize, mask: u32) -> FactorSet {
    FactorSet::from_labels((0..n).filter(|i| mask >> i & 1 == 1).map(|i| LABELS[i])).unwrap()
}

fn int_utility(w: &[u32], mask: u32) -> u32 {
    w.iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .map(|(_, &x)| x)
        .sum()
}

proptest! {
    #[test]
    fn chain_rule_on_nested_sets(w in int_weights(), a in any::<u32>(), b in any::<u32>()) {
        let n = w.len();
        let full = (1u32 << n) - 1;
        let y = a & full;
        let z = y & b;
        let d = distribution(&w);
        let (ys, zs) = (subset(n, y), subset(n, z));
        let uy = d.utility(&ys).unwrap();
        prop_assume!(uy > 0.0);
        let uz = d.utility(&zs).unwrap();
        let lhs = d.conditional_utility(&zs, &ys).unwrap() * uy;
        prop_assert!((lhs - uz).abs() <= 1e-12 * uz.abs().max(f64::MIN_POSITIVE));
    }

    #[test]
    fn utility_is_monotone(w in int_weights(), a in any::<u32>(), b in any::<u32>()) {
        let n = w.len();
        let t = a & ((1u32 << n) - 1);
        let s = t & b;
        let d = distribution(&w);
        prop_assert!(d.utility(&subset(n, s)).unwrap() <= d.utility(&subset(n, t)).unwrap());
    }

    /// With integer weights the multiplicative form can be decided exactly;
    /// any failure is at least 1/total² away, far above the tolerance.
    #[test]
    fn independence_agrees_with_multiplicative_form(w in int_weights(), a in any::<u32>(), b in any::<u32>()) {
        let n = w.len();
        let full = (1u32 << n) - 1;
        let (x, y) = (a & full, b & full);
        let (ux, uy) = (int_utility(&w, x), int_utility(&w, y));
        prop_assume!(ux > 0 && uy > 0);
        let total: u32 = w.iter().sum();
        let exact = int_utility(&w, x & y) * total == ux * uy;
        let d = distribution(&w);
        let got = d.is_subjectively_independent(&subset(n, x), &subset(n, y), DEFAULT_TOL).unwrap();
        prop_assert_eq!(got, exact);
        let (fx, fy) = (d.utility(&subset(n, x)).unwrap(), d.utility(&subset(n, y)).unwrap());
        let fxy = d.utility(&subset(n, x & y)).unwrap();
        prop_assert_eq!((fxy - fx * fy).abs() <= DEFAULT_TOL, got);
    }

    #[test]
    fn normalization_round_trip(k in prop::collection::vec((-8i32..=8).prop_filter("nonzero", |x| *x != 0), 1..=6)) {
        let n = k.len();
        let f = TioliFunction::new(k.iter().enumerate().map(|(i, &x)| (LABELS[i], f64::from(x)))).unwrap();
        let (dist, rec) = f.normalize().unwrap();
        let sum: f64 = dist.factors().map(|(_, w)| w).sum();
        prop_assert!((sum - 1.0).abs() <= 1e-12);
        // scale·(|k|/scale) can be off by an ulp, so "exact" means round-off
        let scale = rec.scale();
        for mask in 0..1u32 << n {
            let present = subset(n, mask);
            let diff = rec.reconstruct(&dist, &present).unwrap() - f.evaluate(&present);
            prop_assert!(diff.abs() <= 1e-12 * scale, "{diff}");
        }
    }

    #[test]
    fn normalization_round_trip_reals(k in prop::collection::vec(prop_oneof![-10.0..-0.01f64, 0.01..10.0f64], 1..=6)) {
        let n = k.len();
        let f = TioliFunction::new(k.iter().enumerate().map(|(i, &x)| (LABELS[i], x))).unwrap();
        let (dist, rec) = f.normalize().unwrap();
        let scale: f64 = k.iter().map(|x| x.abs()).sum();
        for mask in 0..1u32 << n {
            let present = subset(n, mask);
            let diff = rec.reconstruct(&dist, &present).unwrap() - f.evaluate(&present);
            prop_assert!(diff.abs() <= 1e-12 * scale);
        }
    }
}
