//! Bi-networks: a probability network and a utility network joined by
//! weightless bridge links.
//!
//! Each bridge pairs an event of the probability network with an event of
//! the utility network. The two networks are conditioned independently of
//! one another, and the expected utility is aggregated over the bridges as
//! `Σ P(p_event | p_evidence) · U(u_event | u_evidence)`.

use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::unet::{NetworkDef, UEvent, UtilityNetwork};

/// A Bayesian network over boolean variables. Shares the utility network
/// engine; only the reading of the numbers differs.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbabilityNetwork(UtilityNetwork);

impl ProbabilityNetwork {
    pub fn new(def: &NetworkDef) -> Result<Self> {
        UtilityNetwork::new(def).map(ProbabilityNetwork)
    }

    pub fn engine(&self) -> &UtilityNetwork {
        &self.0
    }

    pub fn probability(&self, e: &UEvent) -> Result<f64> {
        self.0.marginal_utility(e)
    }

    pub fn conditional_probability(&self, x: &UEvent, given: &UEvent) -> Result<f64> {
        self.0.conditional_utility(x, given)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Bridge {
    pub p_event: UEvent,
    pub u_event: UEvent,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BiNetwork {
    pnet: ProbabilityNetwork,
    unet: UtilityNetwork,
    bridges: Vec<Bridge>,
}

/// Which half of a bi-network a query or error refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Probability,
    Utility,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Side::Probability => "p-net",
            Side::Utility => "u-net",
        })
    }
}

fn check_event(net: &UtilityNetwork, e: &UEvent, side: Side, what: &str) -> Result<()> {
    if e.terms().is_empty() {
        return Err(Error::validation(format!("{side} {what} is empty")));
    }
    for t in e.terms() {
        for (name, _) in t.iter() {
            if net.var(name).is_err() {
                return Err(Error::validation(format!(
                    "{side} {what} names unknown variable `{name}`"
                )));
            }
        }
    }
    Ok(())
}

/// Sum of `P · U` over bridges.
pub fn aggregate(terms: impl IntoIterator<Item = (f64, f64)>) -> f64 {
    terms.into_iter().map(|(p, u)| p * u).sum()
}

/// `P(e | evidence)`-style query on one side, with null evidence reported
/// against that side.
fn side_values(
    net: &UtilityNetwork,
    events: impl Iterator<Item = UEvent>,
    evidence: Option<&UEvent>,
    side: Side,
) -> Result<Vec<f64>> {
    if let Some(ev) = evidence {
        if net.marginal_utility(ev)? <= 0.0 {
            return Err(Error::ConditioningOnNull(format!(
                "{side} evidence {ev} has measure zero"
            )));
        }
    }
    events
        .map(|e| match evidence {
            Some(ev) => net.conditional_utility(&e, ev),
            None => net.marginal_utility(&e),
        })
        .collect()
}

impl BiNetwork {
    pub fn new(pnet: ProbabilityNetwork, unet: UtilityNetwork, bridges: Vec<Bridge>) -> Result<Self> {
        for (i, b) in bridges.iter().enumerate() {
            check_event(pnet.engine(), &b.p_event, Side::Probability, &format!("bridge {i}"))?;
            check_event(&unet, &b.u_event, Side::Utility, &format!("bridge {i}"))?;
        }
        Ok(BiNetwork {
            pnet,
            unet,
            bridges,
        })
    }

    pub fn pnet(&self) -> &ProbabilityNetwork {
        &self.pnet
    }

    pub fn unet(&self) -> &UtilityNetwork {
        &self.unet
    }

    pub fn bridges(&self) -> &[Bridge] {
        &self.bridges
    }

    /// `(P(p_event | p_evidence), U(u_event | u_evidence))` for each bridge.
    pub fn bridge_terms(
        &self,
        p_evidence: Option<&UEvent>,
        u_evidence: Option<&UEvent>,
        mode: Execution,
    ) -> Result<Vec<(f64, f64)>> {
        if let Some(e) = p_evidence {
            check_event(self.pnet.engine(), e, Side::Probability, "evidence")?;
        }
        if let Some(e) = u_evidence {
            check_event(&self.unet, e, Side::Utility, "evidence")?;
        }
        let (ps, us) = exec::join(
            mode,
            || {
                side_values(
                    self.pnet.engine(),
                    self.bridges.iter().map(|b| b.p_event.clone()),
                    p_evidence,
                    Side::Probability,
                )
            },
            || {
                side_values(
                    &self.unet,
                    self.bridges.iter().map(|b| b.u_event.clone()),
                    u_evidence,
                    Side::Utility,
                )
            },
        );
        Ok(ps?.into_iter().zip(us?).collect())
    }

    pub fn expected_utility_query(
        &self,
        p_evidence: Option<&UEvent>,
        u_evidence: Option<&UEvent>,
    ) -> Result<f64> {
        self.expected_utility_query_with(p_evidence, u_evidence, Execution::default())
    }

    pub fn expected_utility_query_with(
        &self,
        p_evidence: Option<&UEvent>,
        u_evidence: Option<&UEvent>,
        mode: Execution,
    ) -> Result<f64> {
        Ok(aggregate(self.bridge_terms(p_evidence, u_evidence, mode)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::unet::{Assignment, CutDef};

    fn root(name: &str, p1: f64) -> NetworkDef {
        NetworkDef {
            variables: vec![name.into()],
            edges: vec![],
            cuts: vec![CutDef {
                variable: name.into(),
                parents: vec![],
                rows: vec![[1.0 - p1, p1]],
            }],
        }
    }

    fn ev(name: &str, v: bool) -> UEvent {
        UEvent::term(Assignment::new().with(name, v))
    }

    #[test]
    fn degenerate_probability() {
        let p = ProbabilityNetwork::new(&root("rain", 1.0)).unwrap();
        let u = UtilityNetwork::new(&root("dry", 0.7)).unwrap();
        let b = BiNetwork::new(p, u, vec![Bridge { p_event: ev("rain", true), u_event: ev("dry", true) }]).unwrap();
        assert!((b.expected_utility_query(None, None).unwrap() - 0.7).abs() < 1e-12);
    }

    #[test]
    fn two_bridges() {
        let p = ProbabilityNetwork::new(&root("a", 0.5)).unwrap();
        let u = UtilityNetwork::new(&root("x", 0.4)).unwrap();
        let b = BiNetwork::new(
            p,
            u,
            vec![
                Bridge { p_event: ev("a", true), u_event: ev("x", true) },
                Bridge { p_event: ev("a", false), u_event: ev("x", false) },
            ],
        )
        .unwrap();
        assert!((b.expected_utility_query(None, None).unwrap() - 0.5).abs() < 1e-12);
        for mode in [Execution::Sequential, Execution::Parallel] {
            let t = b.bridge_terms(None, None, mode).unwrap();
            assert!((t[0].0 - 0.5).abs() < 1e-12 && (t[1].1 - 0.6).abs() < 1e-12);
        }
    }

    #[test]
    fn evidence_and_null_sides() {
        let pdef = NetworkDef {
            variables: vec!["a".into(), "b".into()],
            edges: vec![("a".into(), "b".into())],
            cuts: vec![
                CutDef { variable: "a".into(), parents: vec![], rows: vec![[0.5, 0.5]] },
                CutDef { variable: "b".into(), parents: vec!["a".into()], rows: vec![[1.0, 0.0], [0.0, 1.0]] },
            ],
        };
        let p = ProbabilityNetwork::new(&pdef).unwrap();
        let u = UtilityNetwork::new(&root("x", 0.2)).unwrap();
        let b = BiNetwork::new(p, u, vec![Bridge { p_event: ev("a", true), u_event: ev("x", true) }]).unwrap();
        assert!((b.expected_utility_query(None, None).unwrap() - 0.1).abs() < 1e-12);
        let v = b.expected_utility_query(Some(&ev("b", true)), None).unwrap();
        assert!((v - 0.2).abs() < 1e-12);

        let null_p = UEvent::term(Assignment::new().with("a", true).with("b", false));
        match b.expected_utility_query(Some(&null_p), None) {
            Err(Error::ConditioningOnNull(m)) => assert!(m.contains("p-net")),
            other => panic!("{other:?}"),
        }
        let u0 = BiNetwork::new(
            b.pnet().clone(),
            UtilityNetwork::new(&root("x", 0.0)).unwrap(),
            b.bridges().to_vec(),
        )
        .unwrap();
        match u0.expected_utility_query(None, Some(&ev("x", true))) {
            Err(Error::ConditioningOnNull(m)) => assert!(m.contains("u-net")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bridge_endpoints_validated() {
        let p = ProbabilityNetwork::new(&root("a", 0.5)).unwrap();
        let u = UtilityNetwork::new(&root("x", 0.4)).unwrap();
        let bad = vec![Bridge { p_event: ev("x", true), u_event: ev("x", true) }];
        assert!(BiNetwork::new(p, u, bad).is_err());
    }
}
