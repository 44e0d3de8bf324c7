//! Valuation networks and marginal computation by fusion.
//!
//! A network holds relational valuations (generic knowledge on several
//! variables) and identified evidence (priors on single variables).
//! [`ValuationNetwork::marginal`] eliminates variables one at a time,
//! combining only the valuations that mention the variable being removed,
//! so the global belief function is never built. [`ValuationNetwork::global_oracle`]
//! builds it anyway, for testing on small networks.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::frames::{Domain, Variable, DEFAULT_FRAME_CAP};
use crate::mass::{MassFunction, MASS_TOLERANCE};

/// Largest universe the global oracle will build.
pub const ORACLE_CAP: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
pub struct Relation {
    pub label: String,
    pub valuation: MassFunction,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evidence {
    pub id: String,
    pub valuation: MassFunction,
}

impl Evidence {
    /// The single variable this evidence bears on.
    pub fn variable(&self) -> Option<&str> {
        match self.valuation.domain().len() {
            1 => self.valuation.domain().names().next(),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub message: String,
}

impl Diagnostic {
    pub(crate) fn error(message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Error,
            message: message.into(),
        }
    }

    pub(crate) fn warning(message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Warning,
            message: message.into(),
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{tag}: {}", self.message)
    }
}

/// How the greedy elimination heuristic breaks ties between equally cheap variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    #[default]
    Ascending,
    Descending,
}

/// Variables in the order fusion eliminates them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EliminationOrder(Vec<String>);

impl EliminationOrder {
    pub fn new(order: Vec<String>) -> Self {
        EliminationOrder(order)
    }

    pub fn as_slice(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValuationNetwork {
    variables: Vec<Variable>,
    relations: Vec<Relation>,
    evidence: Vec<Evidence>,
    frame_cap: usize,
}

impl ValuationNetwork {
    /// Assembles a network without checking it; see [`ValuationNetwork::validate`].
    pub fn new(variables: Vec<Variable>, relations: Vec<Relation>, evidence: Vec<Evidence>) -> Self {
        ValuationNetwork {
            variables,
            relations,
            evidence,
            frame_cap: DEFAULT_FRAME_CAP,
        }
    }

    /// Assembles a network and rejects it if validation reports any error.
    pub fn checked(variables: Vec<Variable>, relations: Vec<Relation>, evidence: Vec<Evidence>) -> Result<Self> {
        let net = ValuationNetwork::new(variables, relations, evidence);
        let errors: Vec<Diagnostic> = net.validate().into_iter().filter(Diagnostic::is_error).collect();
        if errors.is_empty() {
            Ok(net)
        } else {
            Err(Error::InvalidNetwork(errors))
        }
    }

    /// Limit on intermediate frames built during fusion.
    pub fn with_frame_cap(mut self, cap: usize) -> Self {
        self.frame_cap = cap;
        self
    }

    pub fn frame_cap(&self) -> usize {
        self.frame_cap
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn evidence(&self) -> &[Evidence] {
        &self.evidence
    }

    pub fn evidence_ids(&self) -> impl Iterator<Item = &str> {
        self.evidence.iter().map(|e| e.id.as_str())
    }

    pub fn evidence_by_id(&self, id: &str) -> Result<&Evidence> {
        self.evidence
            .iter()
            .find(|e| e.id == id)
            .ok_or_else(|| Error::UnknownEvidence(id.to_string()))
    }

    pub fn variable(&self, name: &str) -> Result<&Variable> {
        self.variables
            .iter()
            .find(|v| v.name() == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    /// Domain over the named variables of this network.
    pub fn domain<S: AsRef<str>>(&self, names: &[S]) -> Result<Domain> {
        let vars = names
            .iter()
            .map(|n| self.variable(n.as_ref()).cloned())
            .collect::<Result<Vec<_>>>()?;
        Domain::with_cap(vars, self.frame_cap)
    }

    /// A copy with evidence `id` replaced by `valuation`.
    pub fn with_evidence(&self, id: &str, valuation: MassFunction) -> Result<ValuationNetwork> {
        let mut net = self.clone();
        let slot = net
            .evidence
            .iter_mut()
            .find(|e| e.id == id)
            .ok_or_else(|| Error::UnknownEvidence(id.to_string()))?;
        slot.valuation = valuation;
        Ok(net)
    }

    /// Structural and numerical problems; empty iff the network is well formed.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut diags = Vec::new();
        let mut names = BTreeSet::new();
        for v in &self.variables {
            if !names.insert(v.name()) {
                diags.push(Diagnostic::error(format!("variable `{}` declared twice", v.name())));
            }
        }

        let mut used = BTreeSet::new();
        let mut check_valuation = |kind: &str, label: &str, m: &MassFunction, diags: &mut Vec<Diagnostic>| {
            for v in m.domain().variables() {
                used.insert(v.name().to_string());
                match self.variables.iter().find(|d| d.name() == v.name()) {
                    None => diags.push(Diagnostic::error(format!(
                        "{kind} `{label}` uses undeclared variable `{}`",
                        v.name()
                    ))),
                    Some(d) if d != v => diags.push(Diagnostic::error(format!(
                        "{kind} `{label}` uses variable `{}` with states that differ from its declaration",
                        v.name()
                    ))),
                    Some(_) => {}
                }
            }
            let total = m.total();
            if (total - 1.0).abs() > MASS_TOLERANCE {
                diags.push(Diagnostic::error(format!("{kind} `{label}` has masses summing to {total}")));
            }
        };

        for r in &self.relations {
            check_valuation("relation", &r.label, &r.valuation, &mut diags);
        }
        let mut ids = BTreeSet::new();
        for e in &self.evidence {
            check_valuation("evidence", &e.id, &e.valuation, &mut diags);
            if !ids.insert(e.id.as_str()) {
                diags.push(Diagnostic::error(format!("evidence id `{}` used twice", e.id)));
            }
            if e.valuation.domain().len() != 1 {
                diags.push(Diagnostic::error(format!(
                    "evidence `{}` must bear on exactly one variable, found {}",
                    e.id,
                    e.valuation.domain()
                )));
            }
            if !e.valuation.is_non_dogmatic() {
                diags.push(Diagnostic::error(format!(
                    "dogmatic evidence `{}`: no mass on the whole frame",
                    e.id
                )));
            }
        }
        for v in &self.variables {
            if !used.contains(v.name()) {
                diags.push(Diagnostic::warning(format!(
                    "variable `{}` is not used by any valuation",
                    v.name()
                )));
            }
        }
        diags
    }

    fn included(&self, excluded: &[&str]) -> Result<Vec<&MassFunction>> {
        for id in excluded {
            self.evidence_by_id(id)?;
        }
        Ok(self
            .relations
            .iter()
            .map(|r| &r.valuation)
            .chain(
                self.evidence
                    .iter()
                    .filter(|e| !excluded.contains(&e.id.as_str()))
                    .map(|e| &e.valuation),
            )
            .collect())
    }

    fn target_domain(&self, target: &[&str]) -> Result<Domain> {
        if target.is_empty() {
            return Err(Error::EmptyTarget);
        }
        self.domain(target)
    }

    /// Greedy elimination order for all variables outside `target`.
    ///
    /// At each step the variable whose elimination builds the smallest
    /// combined frame goes next; ties go to the alphabetically first name.
    pub fn elimination_order(&self, target: &[&str]) -> Result<EliminationOrder> {
        self.elimination_order_with(target, TieBreak::Ascending)
    }

    pub fn elimination_order_with(&self, target: &[&str], tie: TieBreak) -> Result<EliminationOrder> {
        self.target_domain(target)?;
        let domains = self
            .included(&[])?
            .into_iter()
            .map(|m| m.domain().names().map(String::from).collect())
            .collect();
        Ok(self.greedy_order(domains, target, tie))
    }

    fn greedy_order(&self, mut domains: Vec<BTreeSet<String>>, target: &[&str], tie: TieBreak) -> EliminationOrder {
        let card = |name: &str| {
            self.variables
                .iter()
                .find(|v| v.name() == name)
                .map_or(1, Variable::cardinality)
        };
        let mut remaining: Vec<&str> = self
            .variables
            .iter()
            .map(Variable::name)
            .filter(|n| !target.contains(n))
            .collect();
        remaining.sort_unstable();
        if tie == TieBreak::Descending {
            remaining.reverse();
        }
        let mut order = Vec::with_capacity(remaining.len());
        while !remaining.is_empty() {
            let mut best: Option<(usize, usize)> = None;
            for (i, &name) in remaining.iter().enumerate() {
                let merged: BTreeSet<&str> = domains
                    .iter()
                    .filter(|d| d.contains(name))
                    .flat_map(|d| d.iter().map(String::as_str))
                    .collect();
                let cost = merged
                    .iter()
                    .fold(1usize, |acc, n| acc.saturating_mul(card(n)));
                if best.is_none_or(|(_, c)| cost < c) {
                    best = Some((i, cost));
                }
            }
            let (i, _) = best.expect("remaining is non-empty");
            let name = remaining.remove(i);
            let (touching, mut rest): (Vec<_>, Vec<_>) = domains.into_iter().partition(|d| d.contains(name));
            if !touching.is_empty() {
                let mut merged: BTreeSet<String> = touching.into_iter().flatten().collect();
                merged.remove(name);
                rest.push(merged);
            }
            domains = rest;
            order.push(name.to_string());
        }
        EliminationOrder(order)
    }

    /// Marginal of the combination of all valuations, except the listed
    /// evidence, on the target variables.
    pub fn marginal(&self, target: &[&str], excluded: &[&str]) -> Result<MassFunction> {
        self.target_domain(target)?;
        let domains = self
            .included(excluded)?
            .into_iter()
            .map(|m| m.domain().names().map(String::from).collect())
            .collect();
        let order = self.greedy_order(domains, target, TieBreak::Ascending);
        self.marginal_with_order(target, excluded, &order)
    }

    /// Like [`ValuationNetwork::marginal`] with an explicit elimination order,
    /// which must list exactly the variables outside `target`.
    pub fn marginal_with_order(
        &self,
        target: &[&str],
        excluded: &[&str],
        order: &EliminationOrder,
    ) -> Result<MassFunction> {
        let target_domain = self.target_domain(target)?;
        let expected: BTreeSet<&str> = self
            .variables
            .iter()
            .map(Variable::name)
            .filter(|n| !target.contains(n))
            .collect();
        let given: BTreeSet<&str> = order.0.iter().map(String::as_str).collect();
        if given != expected || given.len() != order.len() {
            return Err(Error::InvalidParameter(format!(
                "elimination order {:?} is not a permutation of the non-target variables",
                order.0
            )));
        }

        let mut pool: Vec<MassFunction> = self.included(excluded)?.into_iter().cloned().collect();
        for name in &order.0 {
            let (touching, rest): (Vec<_>, Vec<_>) = pool.into_iter().partition(|m| m.domain().contains(name));
            pool = rest;
            let mut touching = touching.into_iter();
            let Some(first) = touching.next() else {
                continue;
            };
            let combined = touching.try_fold(first, |acc, m| acc.combine_with_cap(&m, self.frame_cap))?;
            let reduced = combined.domain().without(name);
            pool.push(combined.project_to(&reduced)?);
        }
        let mut result = MassFunction::vacuous(&target_domain);
        for m in &pool {
            result = result.combine_with_cap(m, self.frame_cap)?;
        }
        result.project_to(&target_domain)
    }

    /// The global belief function: a left fold of ⊕ over every included
    /// valuation, relations first, on the whole universe.
    pub fn global_oracle(&self, excluded: &[&str]) -> Result<MassFunction> {
        let universe = Domain::with_cap(self.variables.iter().cloned(), ORACLE_CAP)?;
        let mut result = MassFunction::vacuous(&universe);
        for m in self.included(excluded)? {
            result = result.combine_with_cap(m, ORACLE_CAP)?;
        }
        Ok(result)
    }
}
