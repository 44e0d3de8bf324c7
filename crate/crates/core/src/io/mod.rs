//! The JSON network format and report rendering.
//!
//! A document lists variables, relations, optional conditional tables and
//! evidence. Focal elements are explicit lists of configurations, each a list
//! of state labels in the order of the valuation's `variables`. Conditional
//! tables are ballooned into relations when the document is loaded.
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "variables": [{ "name": "X", "states": ["T", "F"] }],
//!   "evidence": [{
//!     "id": "e",
//!     "variable": "X",
//!     "focal_elements": [
//!       { "configs": [["T"]], "mass": 0.6 },
//!       { "configs": [["T"], ["F"]], "mass": 0.4 }
//!     ]
//!   }]
//! }
//! ```

mod report;

pub use report::{serialize_report, BeliefRow, Format, Report};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frames::{ConfigSet, Domain, Variable};
use crate::mass::{ballooning, MassFunction};
use crate::network::{Diagnostic, Evidence, Relation, ValuationNetwork};

pub const SCHEMA_VERSION: u32 = 1;

const CAPTAIN: &str = include_str!("../../data/captain.json");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkDocument {
    pub schema_version: u32,
    pub variables: Vec<VariableSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub relations: Vec<RelationSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub conditionals: Vec<ConditionalSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub evidence: Vec<EvidenceSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariableSpec {
    pub name: String,
    pub states: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FocalSpec {
    pub configs: Vec<Vec<String>>,
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelationSpec {
    pub label: String,
    pub variables: Vec<String>,
    pub focal_elements: Vec<FocalSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
}

/// Belief about `target` for each state of `given`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConditionalSpec {
    pub label: String,
    pub target: String,
    pub given: String,
    pub table: Vec<ConditionalRow>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConditionalRow {
    pub given_state: String,
    /// Configurations of the target variable alone.
    pub focal_elements: Vec<FocalSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvidenceSpec {
    pub id: String,
    pub variable: String,
    pub focal_elements: Vec<FocalSpec>,
}

fn invalid(message: String) -> Error {
    Error::InvalidNetwork(vec![Diagnostic::error(message)])
}

impl NetworkDocument {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Syntax {
            line: e.line(),
            column: e.column(),
            message: strip_position(&e.to_string()),
        })
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("documents always serialize");
        text.push('\n');
        text
    }

    /// Builds the network, ballooning conditionals into relations, and
    /// returns it with any warnings. Any error-level diagnostic fails the load.
    pub fn to_network(&self) -> Result<(ValuationNetwork, Vec<Diagnostic>)> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(invalid(format!(
                "unsupported schema_version {}, expected {SCHEMA_VERSION}",
                self.schema_version
            )));
        }
        let mut variables = Vec::with_capacity(self.variables.len());
        for v in &self.variables {
            variables.push(Variable::new(v.name.as_str(), v.states.iter().map(String::as_str)).map_err(|e| invalid(e.to_string()))?);
        }
        let lookup = |name: &str, context: &str| {
            variables
                .iter()
                .find(|v| v.name() == name)
                .cloned()
                .ok_or_else(|| invalid(format!("{context} uses undeclared variable `{name}`")))
        };
        let build = |context: &str, names: &[String], focals: &[FocalSpec]| -> Result<MassFunction> {
            let vars = names.iter().map(|n| lookup(n, context)).collect::<Result<Vec<_>>>()?;
            let domain = Domain::new(vars).map_err(|e| invalid(format!("{context}: {e}")))?;
            let sets = focals
                .iter()
                .map(|f| Ok((ConfigSet::from_configs(&domain, names, &f.configs)?, f.mass)))
                .collect::<Result<Vec<_>>>()
                .map_err(|e| invalid(format!("{context}: {e}")))?;
            MassFunction::new(&domain, sets).map_err(|e| invalid(format!("{context}: {e}")))
        };

        let mut relations = Vec::new();
        for r in &self.relations {
            let context = format!("relation `{}`", r.label);
            relations.push(Relation {
                label: r.label.clone(),
                valuation: build(&context, &r.variables, &r.focal_elements)?,
            });
        }
        for c in &self.conditionals {
            let context = format!("conditional `{}`", c.label);
            let target = lookup(&c.target, &context)?;
            let given = lookup(&c.given, &context)?;
            let rows = c
                .table
                .iter()
                .map(|row| Ok((row.given_state.as_str(), build(&context, std::slice::from_ref(&c.target), &row.focal_elements)?)))
                .collect::<Result<Vec<_>>>()?;
            let valuation = ballooning(&target, &given, &rows).map_err(|e| invalid(format!("{context}: {e}")))?;
            relations.push(Relation {
                label: c.label.clone(),
                valuation,
            });
        }
        let mut evidence = Vec::new();
        for e in &self.evidence {
            let context = format!("evidence `{}`", e.id);
            evidence.push(Evidence {
                id: e.id.clone(),
                valuation: build(&context, std::slice::from_ref(&e.variable), &e.focal_elements)?,
            });
        }

        let net = ValuationNetwork::new(variables, relations, evidence);
        let (errors, warnings): (Vec<_>, Vec<_>) = net.validate().into_iter().partition(Diagnostic::is_error);
        if !errors.is_empty() {
            return Err(Error::InvalidNetwork(errors));
        }
        Ok((net, warnings))
    }

    /// The document describing `net`. Conditionals come back as the
    /// relations they were ballooned into.
    pub fn from_network(net: &ValuationNetwork) -> Self {
        NetworkDocument {
            schema_version: SCHEMA_VERSION,
            variables: net
                .variables()
                .iter()
                .map(|v| VariableSpec {
                    name: v.name().to_string(),
                    states: v.states().to_vec(),
                })
                .collect(),
            relations: net
                .relations()
                .iter()
                .map(|r| RelationSpec {
                    label: r.label.clone(),
                    variables: r.valuation.domain().names().map(String::from).collect(),
                    focal_elements: focal_specs(&r.valuation),
                    notes: None,
                })
                .collect(),
            conditionals: Vec::new(),
            evidence: net
                .evidence()
                .iter()
                .map(|e| EvidenceSpec {
                    id: e.id.clone(),
                    variable: e.variable().unwrap_or_default().to_string(),
                    focal_elements: focal_specs(&e.valuation),
                })
                .collect(),
        }
    }
}

fn focal_specs(m: &MassFunction) -> Vec<FocalSpec> {
    let domain = m.domain();
    m.focal_elements()
        .map(|(set, mass)| FocalSpec {
            configs: set
                .indices()
                .map(|i| domain.labels(i).into_iter().map(String::from).collect())
                .collect(),
            mass,
        })
        .collect()
}

// serde_json appends " at line L column C" to its messages; we report those separately.
fn strip_position(message: &str) -> String {
    match message.rfind(" at line ") {
        Some(i) => message[..i].to_string(),
        None => message.to_string(),
    }
}

/// Parses a semicolon-separated list of brace sets of state labels, such as
/// `{0,1};{2,3};{4,5,6}`, into subsets of a single-variable frame.
pub fn parse_subsets(domain: &Domain, text: &str) -> Result<Vec<ConfigSet>> {
    let malformed = |part: &str| Error::InvalidParameter(format!("malformed subset `{part}`, expected e.g. {{0,1}}"));
    text.split(';')
        .map(str::trim)
        .filter(|part| !part.is_empty())
        .map(|part| {
            let inner = part
                .strip_prefix('{')
                .and_then(|p| p.strip_suffix('}'))
                .ok_or_else(|| malformed(part))?;
            let labels: Vec<&str> = inner.split(',').map(str::trim).filter(|l| !l.is_empty()).collect();
            if labels.iter().any(|l| l.contains(['{', '}'])) {
                return Err(malformed(part));
            }
            ConfigSet::from_states(domain, &labels)
        })
        .collect()
}

/// Parses and validates a network document.
pub fn parse_network(text: &str) -> Result<ValuationNetwork> {
    Ok(NetworkDocument::parse(text)?.to_network()?.0)
}

/// Parses a document and returns the network with its warnings.
pub fn load_network(text: &str) -> Result<(ValuationNetwork, Vec<Diagnostic>)> {
    NetworkDocument::parse(text)?.to_network()
}

pub fn serialize_network(net: &ValuationNetwork) -> String {
    NetworkDocument::from_network(net).to_json()
}

/// The ship-arrival example: eight variables, five relations (one given as a
/// conditional table) and priors on loading, forecast and maintenance.
pub fn captain_document() -> &'static str {
    CAPTAIN
}

pub fn captain_network() -> ValuationNetwork {
    parse_network(CAPTAIN).expect("bundled network is valid")
}
