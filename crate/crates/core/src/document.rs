//! Declarative JSON documents for every input kind.
//!
//! Each document is one JSON object with a `kind` tag:
//!
//! ```json
//! {"kind": "distribution", "factors": [{"label": "r", "weight": 0.1}, ...]}
//! {"kind": "table", "attributes": [{"name": "H", "values": ["sick", "healthy"]}],
//!  "entries": [{"state": ["healthy"], "utility": 5}]}
//! {"kind": "network", "variables": ["A", "B"], "edges": [["A", "B"]],
//!  "cuts": [{"variable": "B", "parents": ["A"], "rows": [[1, 0], [0, 1]]}]}
//! {"kind": "binetwork", "pnet": "p.json", "unet": "u.json",
//!  "bridges": [{"p_event": {"A": 1}, "u_event": [{"B": 1}, {"C": 0}]}]}
//! {"kind": "query", "target": "cars.json", "queries": [{"op": "utility", "set": ["f"]}]}
//! ```
//!
//! Network CUT rows are listed in binary parent-assignment order (first
//! parent most significant), each row giving the entries for the variable
//! being 0 and 1. Events are a partial assignment object, or an array of
//! them for a union.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::binet::Bridge;
use crate::error::{Error, Result};
use crate::factor_core::UtilityDistribution;
use crate::maut::{Attribute, AttributeSpace, TabulatedUtility};
use crate::unet::{Assignment, CutDef, NetworkDef, UEvent, UtilityNetwork};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Document {
    Distribution(DistributionDoc),
    Table(TableDoc),
    Network(NetworkDoc),
    Binetwork(BiNetworkDoc),
    Query(QueryDoc),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorDoc {
    pub label: String,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistributionDoc {
    pub factors: Vec<FactorDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttributeDoc {
    pub name: String,
    pub values: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntryDoc {
    pub state: Vec<String>,
    pub utility: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableDoc {
    pub attributes: Vec<AttributeDoc>,
    pub entries: Vec<EntryDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CutDoc {
    pub variable: String,
    #[serde(default)]
    pub parents: Vec<String>,
    pub rows: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetworkDoc {
    pub variables: Vec<String>,
    #[serde(default)]
    pub edges: Vec<[String; 2]>,
    pub cuts: Vec<CutDoc>,
}

/// A partial assignment (`{"A": 1}`) or a union of them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EventDoc {
    Term(BTreeMap<String, u8>),
    Union(Vec<BTreeMap<String, u8>>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BridgeDoc {
    pub p_event: EventDoc,
    pub u_event: EventDoc,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BiNetworkDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pnet: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unet: Option<String>,
    pub bridges: Vec<BridgeDoc>,
}

/// One query against the target document of a query file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase", deny_unknown_fields)]
pub enum QueryOp {
    /// Distribution: utility of a factor set.
    Utility { set: Vec<String> },
    /// Distribution (factor lists) or network (events).
    Conditional { x: serde_json::Value, y: serde_json::Value },
    /// Distribution: subjective independence of two factor sets.
    Independent {
        x: Vec<String>,
        y: Vec<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tol: Option<f64>,
    },
    /// Network: joint utility of a complete assignment.
    Joint { assignment: BTreeMap<String, u8> },
    /// Network: utility of an event.
    Marginal { event: EventDoc },
    /// Network: graphical independence.
    Dsep {
        x: Vec<String>,
        y: Vec<String>,
        #[serde(default)]
        z: Vec<String>,
    },
    /// Network: numeric conditional independence.
    Indep {
        x: Vec<String>,
        y: Vec<String>,
        #[serde(default)]
        z: Vec<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tol: Option<f64>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QueryDoc {
    pub target: String,
    pub queries: Vec<QueryOp>,
}

pub fn parse(text: &str) -> Result<Document> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

pub fn load(path: &Path) -> Result<Document> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse(&text)
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::Distribution(_) => "distribution",
            Document::Table(_) => "table",
            Document::Network(_) => "network",
            Document::Binetwork(_) => "binetwork",
            Document::Query(_) => "query",
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).unwrap_or_default()
    }

    fn wrong_kind(&self, want: &str) -> Error {
        Error::validation(format!("expected a {want} document, found {}", self.kind()))
    }

    pub fn into_distribution(self) -> Result<UtilityDistribution> {
        self.into_distribution_with_tolerance(crate::factor_core::DEFAULT_TOL)
    }

    /// As [`Document::into_distribution`], accepting weight sums within
    /// `tol` of one.
    pub fn into_distribution_with_tolerance(self, tol: f64) -> Result<UtilityDistribution> {
        match self {
            Document::Distribution(d) => UtilityDistribution::with_tolerance(
                d.factors.into_iter().map(|f| (f.label, f.weight)),
                tol,
            ),
            other => Err(other.wrong_kind("distribution")),
        }
    }

    pub fn into_table(self) -> Result<TabulatedUtility> {
        match self {
            Document::Table(t) => {
                let attrs = t
                    .attributes
                    .into_iter()
                    .map(|a| Attribute::new(a.name, a.values))
                    .collect::<Result<Vec<_>>>()?;
                let space = AttributeSpace::new(attrs)?;
                TabulatedUtility::from_entries(space, t.entries.into_iter().map(|e| (e.state, e.utility)))
            }
            other => Err(other.wrong_kind("table")),
        }
    }

    pub fn into_network_def(self) -> Result<NetworkDef> {
        match self {
            Document::Network(n) => Ok(NetworkDef {
                variables: n.variables,
                edges: n.edges.into_iter().map(|[a, b]| (a, b)).collect(),
                cuts: n
                    .cuts
                    .into_iter()
                    .map(|c| CutDef {
                        variable: c.variable,
                        parents: c.parents,
                        rows: c.rows,
                    })
                    .collect(),
            }),
            other => Err(other.wrong_kind("network")),
        }
    }

    pub fn into_network(self) -> Result<UtilityNetwork> {
        UtilityNetwork::new(&self.into_network_def()?)
    }

    pub fn from_distribution(d: &UtilityDistribution) -> Self {
        Document::Distribution(DistributionDoc {
            factors: d
                .factors()
                .map(|(id, w)| FactorDoc {
                    label: id.to_string(),
                    weight: w,
                })
                .collect(),
        })
    }

    pub fn from_table(u: &TabulatedUtility) -> Self {
        let space = u.space();
        Document::Table(TableDoc {
            attributes: space
                .attributes()
                .iter()
                .map(|a| AttributeDoc {
                    name: a.name().to_string(),
                    values: a.values().to_vec(),
                })
                .collect(),
            entries: space
                .states()
                .zip(u.values())
                .map(|(s, &v)| EntryDoc {
                    state: space.labels(&s).into_iter().map(String::from).collect(),
                    utility: v,
                })
                .collect(),
        })
    }

    pub fn from_network(net: &UtilityNetwork) -> Self {
        let def = net.to_def();
        Document::Network(NetworkDoc {
            variables: def.variables,
            edges: def.edges.into_iter().map(|(a, b)| [a, b]).collect(),
            cuts: def
                .cuts
                .into_iter()
                .map(|c| CutDoc {
                    variable: c.variable,
                    parents: c.parents,
                    rows: c.rows,
                })
                .collect(),
        })
    }
}

fn term_from_map(map: &BTreeMap<String, u8>) -> Result<Assignment> {
    map.iter()
        .map(|(k, &v)| match v {
            0 => Ok((k.clone(), false)),
            1 => Ok((k.clone(), true)),
            _ => Err(Error::validation(format!("value of `{k}` must be 0 or 1, got {v}"))),
        })
        .collect()
}

impl EventDoc {
    pub fn to_event(&self) -> Result<UEvent> {
        match self {
            EventDoc::Term(m) => Ok(UEvent::term(term_from_map(m)?)),
            EventDoc::Union(ms) => ms
                .iter()
                .map(term_from_map)
                .collect::<Result<Vec<_>>>()
                .map(UEvent::union),
        }
    }

    pub fn from_event(e: &UEvent) -> Self {
        let map = |a: &Assignment| -> BTreeMap<String, u8> {
            a.iter().map(|(k, v)| (k.to_string(), u8::from(v))).collect()
        };
        match e.terms() {
            [one] => EventDoc::Term(map(one)),
            many => EventDoc::Union(many.iter().map(map).collect()),
        }
    }
}

pub fn assignment_from_map(map: &BTreeMap<String, u8>) -> Result<Assignment> {
    term_from_map(map)
}

impl BridgeDoc {
    pub fn to_bridge(&self) -> Result<Bridge> {
        Ok(Bridge {
            p_event: self.p_event.to_event()?,
            u_event: self.u_event.to_event()?,
        })
    }
}
