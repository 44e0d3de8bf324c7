//! Explanations for a hypothesis variable: how each piece of evidence moves
//! belief and plausibility on chosen subsets, and how much information it
//! contributes to the hypothesis marginal.
//!
//! Sensitivities are exact differences: in the unnormalized calculus the
//! marginal belief is affine in the discount rate of any one piece of
//! evidence, so the derivative with respect to that rate equals the change
//! from dropping the evidence altogether. Three routes compute it and are
//! expected to agree:
//!
//! * [`SensitivityMethod::Exact`] re-runs fusion without the evidence,
//! * [`SensitivityMethod::Removal`] removes the evidence from the joint
//!   marginal on the hypothesis and the evidence variable,
//! * [`SensitivityMethod::Numeric`] discounts the evidence slightly and forms
//!   a difference quotient.
//!
//! Information content is `I(bel) = -Σ log q(a)` over every subset of the
//! frame; it is additive under combination of distinct evidence.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::frames::{ConfigSet, Domain};
use crate::mass::{MassFunction, DEFAULT_DENSE_CAP};
use crate::network::ValuationNetwork;

/// Sensitivities smaller than this in magnitude count as zero when labelling.
pub const SIGN_TOLERANCE: f64 = 1e-9;

/// Logarithm base for information content.
///
/// Base 10 is the default: it is the base under which the captain example's
/// published information values for the loading and forecast evidence are
/// reproduced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LogBase {
    E,
    Two,
    #[default]
    Ten,
}

impl LogBase {
    pub fn log(self, x: f64) -> f64 {
        match self {
            LogBase::E => x.ln(),
            LogBase::Two => x.log2(),
            LogBase::Ten => x.log10(),
        }
    }

    pub fn all() -> [LogBase; 3] {
        [LogBase::E, LogBase::Two, LogBase::Ten]
    }
}

impl Serialize for LogBase {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl fmt::Display for LogBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LogBase::E => "e",
            LogBase::Two => "2",
            LogBase::Ten => "10",
        })
    }
}

impl FromStr for LogBase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "e" | "E" | "ln" => Ok(LogBase::E),
            "2" => Ok(LogBase::Two),
            "10" => Ok(LogBase::Ten),
            other => Err(Error::InvalidParameter(format!("unknown log base `{other}`"))),
        }
    }
}

/// Information content of a non-dogmatic bba.
pub fn info_content(m: &MassFunction, base: LogBase) -> Result<f64> {
    info_content_with_cap(m, base, DEFAULT_DENSE_CAP)
}

pub fn info_content_with_cap(m: &MassFunction, base: LogBase, cap: usize) -> Result<f64> {
    if !m.is_non_dogmatic() {
        return Err(Error::InfiniteInformation(format!("bba on {}", m.domain())));
    }
    let q = m.commonality_with_cap(cap)?;
    Ok(-q.values().iter().map(|&v| base.log(v)).sum::<f64>())
}

/// Qualitative reading of a `(bel^, pl^)` pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Impact {
    Supports,
    ArguesAgainst,
    DecreasesIgnorance,
    AddsConfusion,
    Neutral,
}

impl Impact {
    /// Both positive supports, both negative argues against, `(+, -)`
    /// narrows the belief interval and `(-, +)` widens it. A zero next to a
    /// signed value takes the reading of the signed one.
    pub fn classify(bel_hat: f64, pl_hat: f64) -> Impact {
        let sign = |x: f64| {
            if x > SIGN_TOLERANCE {
                1
            } else if x < -SIGN_TOLERANCE {
                -1
            } else {
                0
            }
        };
        match (sign(bel_hat), sign(pl_hat)) {
            (0, 0) => Impact::Neutral,
            (1, 1) | (1, 0) | (0, 1) => Impact::Supports,
            (-1, -1) | (-1, 0) | (0, -1) => Impact::ArguesAgainst,
            (1, -1) => Impact::DecreasesIgnorance,
            _ => Impact::AddsConfusion,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Impact::Supports => "supports",
            Impact::ArguesAgainst => "argues-against",
            Impact::DecreasesIgnorance => "decreases-ignorance",
            Impact::AddsConfusion => "adds-confusion",
            Impact::Neutral => "neutral",
        }
    }
}

impl fmt::Display for Impact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum SensitivityMethod {
    #[default]
    Exact,
    Removal,
    Numeric {
        delta: f64,
    },
}

impl Serialize for SensitivityMethod {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl fmt::Display for SensitivityMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SensitivityMethod::Exact => f.write_str("exact"),
            SensitivityMethod::Removal => f.write_str("removal"),
            SensitivityMethod::Numeric { delta } => write!(f, "numeric(delta={delta})"),
        }
    }
}

pub(crate) fn set_as_string<S: Serializer>(set: &ConfigSet, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&set.to_string())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SensitivityRow {
    pub evidence: String,
    #[serde(serialize_with = "set_as_string")]
    pub query: ConfigSet,
    pub bel_hat: f64,
    pub pl_hat: f64,
    pub impact: Impact,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SensitivityReport {
    pub variable: String,
    pub method: SensitivityMethod,
    pub rows: Vec<SensitivityRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InfoRow {
    pub evidence: String,
    /// Information the evidence adds given all the other evidence.
    pub delta_info: f64,
    /// Information the evidence brings on its own.
    pub info_individual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubsetInfo {
    pub evidence: Vec<String>,
    pub delta_info: f64,
    pub info_individual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InfoReport {
    pub variable: String,
    pub base: LogBase,
    /// Information in the hypothesis marginal with all evidence.
    pub info_full: f64,
    /// Information in the hypothesis marginal with every prior vacuous.
    pub info_baseline: f64,
    pub rows: Vec<InfoRow>,
    pub subset: Option<SubsetInfo>,
}

/// When an increase in information is too small to keep adding evidence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "value")]
pub enum Negligible {
    /// Fraction of the information already selected.
    Relative(f64),
    Absolute(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelevanceParams {
    pub epsilon: Negligible,
    /// A member is pruned when its own contribution falls below this
    /// fraction of what the rest of the selection contributes.
    pub prune_ratio: f64,
}

impl Default for RelevanceParams {
    fn default() -> Self {
        RelevanceParams {
            epsilon: Negligible::Relative(0.01),
            prune_ratio: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceStep {
    /// Size of the selection after this step.
    pub step: usize,
    pub evidence: String,
    /// Information of the selection including `evidence`.
    pub delta_info: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Pruned {
    pub evidence: String,
    /// Its contribution given all other evidence.
    pub delta_info: f64,
    /// Contribution of the rest of the selection without it.
    pub delta_info_rest: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelevanceResult {
    pub variable: String,
    pub selected: Vec<String>,
    pub trace: Vec<TraceStep>,
    /// The best remaining candidate whose increase was negligible, if any.
    pub stopped_at: Option<TraceStep>,
    pub pruned: Vec<Pruned>,
    pub epsilon: Negligible,
    pub prune_ratio: f64,
}

/// Outcome of a conditional-independence check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CiResult {
    pub independent: bool,
    pub max_deviation: f64,
}

/// Explanation queries about one hypothesis variable of a network.
///
/// The all-evidence marginal on the hypothesis is computed once, up front.
#[derive(Debug, Clone)]
pub struct Explainer<'a> {
    net: &'a ValuationNetwork,
    variable: String,
    domain: Domain,
    base: LogBase,
    full: MassFunction,
}

impl<'a> Explainer<'a> {
    pub fn new(net: &'a ValuationNetwork, variable: &str) -> Result<Self> {
        let domain = net.domain(&[variable])?;
        let full = net.marginal(&[variable], &[])?;
        Ok(Explainer {
            net,
            variable: variable.to_string(),
            domain,
            base: LogBase::default(),
            full,
        })
    }

    pub fn with_base(mut self, base: LogBase) -> Self {
        self.base = base;
        self
    }

    pub fn base(&self) -> LogBase {
        self.base
    }

    pub fn variable(&self) -> &str {
        &self.variable
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn network(&self) -> &ValuationNetwork {
        self.net
    }

    /// The hypothesis marginal with all evidence.
    pub fn full_marginal(&self) -> &MassFunction {
        &self.full
    }

    /// A subset of the hypothesis frame from state labels.
    pub fn subset<S: AsRef<str>>(&self, states: &[S]) -> Result<ConfigSet> {
        ConfigSet::from_states(&self.domain, states)
    }

    fn marginal_without(&self, excluded: &[&str]) -> Result<MassFunction> {
        if excluded.is_empty() {
            return Ok(self.full.clone());
        }
        self.net.marginal(&[&self.variable], excluded)
    }

    fn rows(
        &self,
        id: &str,
        queries: &[ConfigSet],
        reference: &MassFunction,
        scale: f64,
    ) -> Result<Vec<SensitivityRow>> {
        queries
            .iter()
            .map(|x| {
                let bel_hat = (self.full.bel(x)? - reference.bel(x)?) / scale;
                let pl_hat = (self.full.pl(x)? - reference.pl(x)?) / scale;
                Ok(SensitivityRow {
                    evidence: id.to_string(),
                    query: x.clone(),
                    bel_hat,
                    pl_hat,
                    impact: Impact::classify(bel_hat, pl_hat),
                })
            })
            .collect()
    }

    /// Change in bel and pl on each query when evidence `id` is dropped.
    pub fn sensitivity_exact(&self, id: &str, queries: &[ConfigSet]) -> Result<Vec<SensitivityRow>> {
        self.net.evidence_by_id(id)?;
        let without = self.marginal_without(&[id])?;
        self.rows(id, queries, &without, 1.0)
    }

    /// The same quantity by removing the evidence from the joint marginal
    /// on the hypothesis and the evidence variable.
    ///
    /// Needs the joint frame to fit the dense-transform cap; otherwise
    /// [`Error::DenseTooLarge`] is returned and the exact route should be used.
    pub fn sensitivity_removal(&self, id: &str, queries: &[ConfigSet]) -> Result<Vec<SensitivityRow>> {
        let without = self.marginal_by_removal(id)?;
        self.rows(id, queries, &without, 1.0)
    }

    /// The hypothesis marginal with evidence `id` taken out of the all-evidence
    /// belief by removal.
    pub fn marginal_by_removal(&self, id: &str) -> Result<MassFunction> {
        let evidence = self.net.evidence_by_id(id)?;
        let ev_var = evidence
            .variable()
            .ok_or_else(|| Error::InvalidParameter(format!("evidence `{id}` is not on a single variable")))?;
        let mut target = vec![self.variable.as_str()];
        if ev_var != self.variable {
            target.push(ev_var);
        }
        let joint = self.net.marginal(&target, &[])?;
        joint.remove(&evidence.valuation)?.marginalize(&self.domain)
    }

    /// Difference quotient after discounting evidence `id` to credibility `1 - delta`.
    pub fn sensitivity_numeric(&self, id: &str, queries: &[ConfigSet], delta: f64) -> Result<Vec<SensitivityRow>> {
        if !(delta > 0.0 && delta <= 0.1) {
            return Err(Error::InvalidDelta(delta));
        }
        let evidence = self.net.evidence_by_id(id)?;
        let weakened = self.net.with_evidence(id, evidence.valuation.discount(1.0 - delta)?)?;
        let reference = weakened.marginal(&[&self.variable], &[])?;
        self.rows(id, queries, &reference, delta)
    }

    pub fn sensitivity(&self, id: &str, queries: &[ConfigSet], method: SensitivityMethod) -> Result<Vec<SensitivityRow>> {
        match method {
            SensitivityMethod::Exact => self.sensitivity_exact(id, queries),
            SensitivityMethod::Removal => self.sensitivity_removal(id, queries),
            SensitivityMethod::Numeric { delta } => self.sensitivity_numeric(id, queries, delta),
        }
    }

    /// Rows for every listed evidence id (all evidence when `ids` is empty),
    /// grouped by query subset.
    pub fn sensitivity_report(
        &self,
        ids: &[&str],
        queries: &[ConfigSet],
        method: SensitivityMethod,
    ) -> Result<SensitivityReport> {
        for q in queries {
            if q.domain() != &self.domain {
                return Err(Error::DomainMismatch {
                    expected: self.domain.to_string(),
                    found: q.domain().to_string(),
                });
            }
        }
        let ids: Vec<&str> = if ids.is_empty() {
            self.net.evidence_ids().collect()
        } else {
            ids.to_vec()
        };
        let per_evidence = ids
            .iter()
            .map(|id| self.sensitivity(id, queries, method))
            .collect::<Result<Vec<_>>>()?;
        let mut rows = Vec::with_capacity(ids.len() * queries.len());
        for qi in 0..queries.len() {
            for ev_rows in &per_evidence {
                rows.push(ev_rows[qi].clone());
            }
        }
        Ok(SensitivityReport {
            variable: self.variable.clone(),
            method,
            rows,
        })
    }

    fn info(&self, m: &MassFunction) -> Result<f64> {
        info_content(m, self.base)
    }

    /// Information in the all-evidence hypothesis marginal.
    pub fn info_full(&self) -> Result<f64> {
        self.info(&self.full)
    }

    /// Information in the hypothesis marginal with every prior vacuous.
    pub fn info_baseline(&self) -> Result<f64> {
        let all: Vec<&str> = self.net.evidence_ids().collect();
        self.info(&self.marginal_without(&all)?)
    }

    /// Information the listed evidence adds to the hypothesis given all the
    /// other evidence, computed by excluding it and re-running fusion.
    pub fn delta_info(&self, ids: &[&str]) -> Result<f64> {
        for id in ids {
            self.net.evidence_by_id(id)?;
        }
        if ids.is_empty() {
            return Ok(0.0);
        }
        Ok(self.info_full()? - self.info(&self.marginal_without(ids)?)?)
    }

    /// [`Explainer::delta_info`] for one evidence id via removal.
    pub fn delta_info_removal(&self, id: &str) -> Result<f64> {
        Ok(self.info_full()? - self.info(&self.marginal_by_removal(id)?)?)
    }

    /// Information the listed evidence brings to the hypothesis on its own,
    /// i.e. with every other prior vacuous.
    pub fn info_individual(&self, ids: &[&str]) -> Result<f64> {
        for id in ids {
            self.net.evidence_by_id(id)?;
        }
        let all: Vec<&str> = self.net.evidence_ids().collect();
        let others: Vec<&str> = all.iter().copied().filter(|id| !ids.contains(id)).collect();
        let with = self.info(&self.marginal_without(&others)?)?;
        let baseline = self.info(&self.marginal_without(&all)?)?;
        Ok(with - baseline)
    }

    pub fn info_report(&self, subset: Option<&[&str]>) -> Result<InfoReport> {
        let rows = self
            .net
            .evidence_ids()
            .map(|id| {
                Ok(InfoRow {
                    evidence: id.to_string(),
                    delta_info: self.delta_info(&[id])?,
                    info_individual: self.info_individual(&[id])?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let subset = subset
            .map(|ids| {
                Ok::<_, Error>(SubsetInfo {
                    evidence: ids.iter().map(|s| s.to_string()).collect(),
                    delta_info: self.delta_info(ids)?,
                    info_individual: self.info_individual(ids)?,
                })
            })
            .transpose()?;
        Ok(InfoReport {
            variable: self.variable.clone(),
            base: self.base,
            info_full: self.info_full()?,
            info_baseline: self.info_baseline()?,
            rows,
            subset,
        })
    }

    /// Greedy search for a small set of evidence that carries most of the
    /// information about the hypothesis.
    ///
    /// Starts from the single most informative piece, keeps adding the piece
    /// that maximizes the joint contribution until the increase becomes
    /// negligible, then prunes members whose own contribution is tiny next to
    /// what the rest of the selection brings. Ties go to the smaller id.
    pub fn stepwise_relevant(&self, params: RelevanceParams) -> Result<RelevanceResult> {
        let eps_ok = match params.epsilon {
            Negligible::Relative(e) | Negligible::Absolute(e) => e > 0.0 && e.is_finite(),
        };
        if !eps_ok {
            return Err(Error::InvalidParameter(format!("epsilon must be positive, got {:?}", params.epsilon)));
        }
        if !(params.prune_ratio > 0.0 && params.prune_ratio < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "prune ratio must lie in (0, 1), got {}",
                params.prune_ratio
            )));
        }
        let mut ids: Vec<&str> = self.net.evidence_ids().collect();
        if ids.is_empty() {
            return Err(Error::NoEvidence);
        }
        ids.sort_unstable();

        let individual: Vec<(&str, f64)> = ids
            .iter()
            .map(|&id| Ok((id, self.delta_info(&[id])?)))
            .collect::<Result<_>>()?;
        let (first, first_value) = argmax(&individual);
        let mut selected = vec![first];
        let mut current = first_value;
        let mut trace = vec![TraceStep {
            step: 1,
            evidence: first.to_string(),
            delta_info: current,
        }];
        let mut stopped_at = None;

        loop {
            let candidates: Vec<(&str, f64)> = ids
                .iter()
                .filter(|id| !selected.contains(id))
                .map(|&id| {
                    let mut set = selected.clone();
                    set.push(id);
                    Ok((id, self.delta_info(&set)?))
                })
                .collect::<Result<_>>()?;
            if candidates.is_empty() {
                break;
            }
            let (best, value) = argmax(&candidates);
            let threshold = match params.epsilon {
                Negligible::Relative(e) => e * current.abs(),
                Negligible::Absolute(e) => e,
            };
            let step = TraceStep {
                step: selected.len() + 1,
                evidence: best.to_string(),
                delta_info: value,
            };
            if value - current < threshold {
                stopped_at = Some(step);
                break;
            }
            selected.push(best);
            current = value;
            trace.push(step);
        }

        let mut pruned = Vec::new();
        loop {
            let mut worst: Option<(usize, f64, Pruned)> = None;
            for (i, &id) in selected.iter().enumerate() {
                let rest: Vec<&str> = selected.iter().copied().filter(|&s| s != id).collect();
                let alone = individual.iter().find(|(e, _)| *e == id).expect("known id").1;
                let rest_value = self.delta_info(&rest)?;
                if alone < params.prune_ratio * rest_value {
                    let ratio = alone / rest_value;
                    if worst.as_ref().is_none_or(|(_, r, _)| ratio < *r) {
                        worst = Some((
                            i,
                            ratio,
                            Pruned {
                                evidence: id.to_string(),
                                delta_info: alone,
                                delta_info_rest: rest_value,
                            },
                        ));
                    }
                }
            }
            match worst {
                Some((i, _, p)) => {
                    selected.remove(i);
                    pruned.push(p);
                }
                None => break,
            }
        }

        Ok(RelevanceResult {
            variable: self.variable.clone(),
            selected: selected.into_iter().map(String::from).collect(),
            trace,
            stopped_at,
            pruned,
            epsilon: params.epsilon,
            prune_ratio: params.prune_ratio,
        })
    }
}

/// First entry with the largest value; entries are expected in id order.
fn argmax<'s>(values: &[(&'s str, f64)]) -> (&'s str, f64) {
    let mut best = values[0];
    for &(id, v) in &values[1..] {
        if v > best.1 {
            best = (id, v);
        }
    }
    best
}

/// Tests whether `left` and `right` are conditionally independent given
/// `given`: the all-evidence marginal on their union must equal the
/// combination of the marginals on `given ∪ left` and `given ∪ right`.
///
/// Focal sets are compared after dropping numerical zeros; masses must agree
/// within `tol`. An empty `left` or `right` is trivially independent.
pub fn check_ci(net: &ValuationNetwork, left: &[&str], right: &[&str], given: &[&str], tol: f64) -> Result<CiResult> {
    for name in left.iter().chain(right).chain(given) {
        net.variable(name)?;
    }
    for (a, b) in [(left, right), (left, given), (right, given)] {
        if let Some(shared) = a.iter().find(|n| b.contains(n)) {
            return Err(Error::OverlappingSets(shared.to_string()));
        }
    }
    if left.is_empty() || right.is_empty() {
        return Ok(CiResult {
            independent: true,
            max_deviation: 0.0,
        });
    }
    let xs: Vec<&str> = given.iter().chain(left).copied().collect();
    let xt: Vec<&str> = given.iter().chain(right).copied().collect();
    let xst: Vec<&str> = given.iter().chain(left).chain(right).copied().collect();
    let joint = net.marginal(&xst, &[])?;
    let factored = net
        .marginal(&xs, &[])?
        .combine_with_cap(&net.marginal(&xt, &[])?, net.frame_cap())?;
    let cmp = joint.compare(&factored)?;
    Ok(CiResult {
        independent: cmp.same_support && cmp.max_deviation <= tol,
        max_deviation: cmp.max_deviation,
    })
}
