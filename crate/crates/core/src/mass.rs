//! Basic belief assignments and the operations on them.
//!
//! Everything here is the unnormalized calculus: combination may leave mass
//! on the empty set, and that conflict is reported but never renormalized.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::frames::{image, preimage, Bits, ConfigSet, Domain, Variable, DEFAULT_FRAME_CAP};

/// Tolerance on the total mass of a constructed bba.
pub const MASS_TOLERANCE: f64 = 1e-9;
/// Inputs whose total is off by at most this much are rescaled instead of rejected.
pub const RENORMALIZE_LIMIT: f64 = 1e-6;
/// Dense-transform outputs below this magnitude are treated as exact zeros.
pub const ZERO_THRESHOLD: f64 = 1e-12;
/// Dense transforms reject negative masses beyond this.
pub const NEGATIVE_TOLERANCE: f64 = 1e-9;
/// Default largest frame (in configurations) for dense subset-lattice transforms.
pub const DEFAULT_DENSE_CAP: usize = 16;
/// Hard ceiling on the dense cap; the lattice has `2^cap` entries.
pub const MAX_DENSE_CAP: usize = 20;

/// A basic belief assignment on the frame of a [`Domain`].
///
/// Focal elements are kept in canonical bit-vector order and only strictly
/// positive masses are stored. The empty set may carry mass.
#[derive(Clone)]
pub struct MassFunction {
    domain: Domain,
    focals: BTreeMap<Bits, f64>,
    deviation: f64,
}

impl MassFunction {
    /// Builds a bba from `(focal set, mass)` pairs.
    ///
    /// Repeated sets are merged and zero masses dropped. A total within
    /// [`RENORMALIZE_LIMIT`] of one is rescaled to one and the deviation is
    /// kept (see [`MassFunction::input_deviation`]); anything further off is
    /// rejected.
    pub fn new(domain: &Domain, focals: impl IntoIterator<Item = (ConfigSet, f64)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (set, mass) in focals {
            if set.domain() != domain {
                return Err(Error::DomainMismatch {
                    expected: domain.to_string(),
                    found: set.domain().to_string(),
                });
            }
            if !mass.is_finite() || !(0.0..=1.0 + RENORMALIZE_LIMIT).contains(&mass) {
                return Err(Error::InvalidMass {
                    subset: set.to_string(),
                    mass,
                });
            }
            if mass > 0.0 {
                *map.entry(set.into_bits()).or_insert(0.0) += mass;
            }
        }
        let total: f64 = map.values().sum();
        let deviation = total - 1.0;
        if deviation.abs() > RENORMALIZE_LIMIT {
            return Err(Error::MassSum { sum: total });
        }
        if deviation.abs() > MASS_TOLERANCE {
            for m in map.values_mut() {
                *m /= total;
            }
        }
        Ok(MassFunction {
            domain: domain.clone(),
            focals: map,
            deviation,
        })
    }

    /// All mass on the whole frame.
    pub fn vacuous(domain: &Domain) -> Self {
        let mut focals = BTreeMap::new();
        focals.insert(Bits::ones(domain.cardinality()), 1.0);
        MassFunction {
            domain: domain.clone(),
            focals,
            deviation: 0.0,
        }
    }

    fn from_map(domain: &Domain, mut focals: BTreeMap<Bits, f64>) -> Self {
        focals.retain(|_, m| *m > 0.0);
        MassFunction {
            domain: domain.clone(),
            focals,
            deviation: 0.0,
        }
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    /// Number of focal elements.
    pub fn len(&self) -> usize {
        self.focals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.focals.is_empty()
    }

    /// Focal elements and their masses in canonical order.
    pub fn focal_elements(&self) -> impl Iterator<Item = (ConfigSet, f64)> + '_ {
        self.focals
            .iter()
            .map(|(bits, &m)| (ConfigSet::from_bits(&self.domain, bits.clone()), m))
    }

    /// Signed amount by which the constructor input missed a total of one.
    pub fn input_deviation(&self) -> f64 {
        self.deviation
    }

    pub fn total(&self) -> f64 {
        self.focals.values().sum()
    }

    fn check(&self, a: &ConfigSet) -> Result<()> {
        if a.domain() != &self.domain {
            return Err(Error::DomainMismatch {
                expected: self.domain.to_string(),
                found: a.domain().to_string(),
            });
        }
        Ok(())
    }

    /// The mass assigned to exactly `a`.
    pub fn mass(&self, a: &ConfigSet) -> Result<f64> {
        self.check(a)?;
        Ok(self.focals.get(a.bits()).copied().unwrap_or(0.0))
    }

    /// Mass on the whole frame.
    pub fn frame_mass(&self) -> f64 {
        self.focals
            .get(&Bits::ones(self.domain.cardinality()))
            .copied()
            .unwrap_or(0.0)
    }

    /// True iff the whole frame is a focal element.
    pub fn is_non_dogmatic(&self) -> bool {
        self.frame_mass() > 0.0
    }

    pub fn is_vacuous(&self) -> bool {
        self.focals.len() == 1 && self.frame_mass() > 0.0
    }

    /// Mass on the empty set.
    pub fn conflict(&self) -> f64 {
        self.focals
            .get(&Bits::zeros(self.domain.cardinality()))
            .copied()
            .unwrap_or(0.0)
    }

    /// The normalization factor `1 - m(∅)`. Reported only; never applied.
    pub fn norm_factor(&self) -> f64 {
        1.0 - self.conflict()
    }

    /// Total mass of the non-empty focal elements contained in `a`.
    pub fn bel(&self, a: &ConfigSet) -> Result<f64> {
        self.check(a)?;
        Ok(self
            .focals
            .iter()
            .filter(|(b, _)| !b.is_zero() && b.is_subset(a.bits()))
            .map(|(_, m)| m)
            .sum())
    }

    /// `bel(Θ) - bel(ā)`, zero on the empty set.
    pub fn pl(&self, a: &ConfigSet) -> Result<f64> {
        self.check(a)?;
        if a.is_empty() {
            return Ok(0.0);
        }
        Ok(self
            .focals
            .iter()
            .filter(|(b, _)| b.intersects(a.bits()))
            .map(|(_, m)| m)
            .sum())
    }

    /// Commonality: total mass of focal supersets of `a`.
    pub fn q(&self, a: &ConfigSet) -> Result<f64> {
        self.check(a)?;
        Ok(self
            .focals
            .iter()
            .filter(|(b, _)| a.bits().is_subset(b))
            .map(|(_, m)| m)
            .sum())
    }

    /// Unnormalized Dempster combination on the union of both domains.
    pub fn combine(&self, other: &MassFunction) -> Result<MassFunction> {
        self.combine_with_cap(other, DEFAULT_FRAME_CAP)
    }

    pub fn combine_with_cap(&self, other: &MassFunction, cap: usize) -> Result<MassFunction> {
        let union = self.domain.union_with_cap(&other.domain, cap)?;
        let left = self.extended_focals(&union)?;
        let right = other.extended_focals(&union)?;
        let mut out: BTreeMap<Bits, f64> = BTreeMap::new();
        for (a, ma) in &left {
            for (b, mb) in &right {
                *out.entry(a.and(b)).or_insert(0.0) += ma * mb;
            }
        }
        Ok(MassFunction::from_map(&union, out))
    }

    fn extended_focals(&self, sup: &Domain) -> Result<Vec<(Bits, f64)>> {
        if *sup == self.domain {
            return Ok(self.focals.iter().map(|(b, &m)| (b.clone(), m)).collect());
        }
        let map = sup.projection_map(&self.domain)?;
        Ok(self
            .focals
            .iter()
            .map(|(b, &m)| (preimage(b, &map), m))
            .collect())
    }

    /// Marginal on a non-empty subdomain.
    pub fn marginalize(&self, sub: &Domain) -> Result<MassFunction> {
        if sub.is_empty() {
            return Err(Error::EmptyTarget);
        }
        self.project_to(sub)
    }

    /// Marginalization that also accepts the empty domain, whose frame has a
    /// single configuration; used when fusion eliminates a valuation's last
    /// variable, so that conflict mass survives.
    pub(crate) fn project_to(&self, sub: &Domain) -> Result<MassFunction> {
        if *sub == self.domain {
            return Ok(self.clone());
        }
        let map = self.domain.projection_map(sub)?;
        let mut out: BTreeMap<Bits, f64> = BTreeMap::new();
        for (b, &m) in &self.focals {
            *out.entry(image(b, &map, sub.cardinality())).or_insert(0.0) += m;
        }
        Ok(MassFunction::from_map(sub, out))
    }

    /// Vacuous extension: each focal element replaced by its cylinder.
    pub fn extend(&self, sup: &Domain) -> Result<MassFunction> {
        let focals = self.extended_focals(sup).map_err(|_| Error::DomainMismatch {
            expected: format!("a superset of {}", self.domain),
            found: sup.to_string(),
        })?;
        Ok(MassFunction::from_map(sup, focals.into_iter().collect()))
    }

    /// Discounting with credibility `alpha`: every non-frame mass is scaled
    /// by `alpha` and the remainder moves to the frame.
    pub fn discount(&self, alpha: f64) -> Result<MassFunction> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidDiscount(alpha));
        }
        let frame = Bits::ones(self.domain.cardinality());
        let mut out: BTreeMap<Bits, f64> = self
            .focals
            .iter()
            .filter(|(b, _)| **b != frame)
            .map(|(b, &m)| (b.clone(), alpha * m))
            .collect();
        out.insert(frame, 1.0 - alpha + alpha * self.frame_mass());
        Ok(MassFunction::from_map(&self.domain, out))
    }

    /// Dense commonality function over every subset of the frame.
    pub fn commonality(&self) -> Result<DenseCommonality> {
        self.commonality_with_cap(DEFAULT_DENSE_CAP)
    }

    pub fn commonality_with_cap(&self, cap: usize) -> Result<DenseCommonality> {
        let n = check_dense(&self.domain, cap)?;
        let mut values = vec![0.0; 1 << n];
        for (b, &m) in &self.focals {
            values[b.low_word() as usize] += m;
        }
        // superset-sum (zeta) transform
        for i in 0..n {
            let bit = 1usize << i;
            for mask in 0..values.len() {
                if mask & bit == 0 {
                    values[mask] += values[mask | bit];
                }
            }
        }
        Ok(DenseCommonality {
            domain: self.domain.clone(),
            values,
        })
    }

    /// Removal: the inverse of combination, by pointwise division of
    /// commonalities on the union domain.
    ///
    /// `removed` must be non-dogmatic. If it was never combined into `self`
    /// the quotient need not be a belief function, and that is reported as
    /// [`Error::NotABeliefFunction`].
    pub fn remove(&self, removed: &MassFunction) -> Result<MassFunction> {
        self.remove_with_cap(removed, DEFAULT_DENSE_CAP)
    }

    pub fn remove_with_cap(&self, removed: &MassFunction, cap: usize) -> Result<MassFunction> {
        if !removed.is_non_dogmatic() {
            return Err(Error::Dogmatic(format!(
                "cannot remove a bba on {} with no mass on the frame",
                removed.domain
            )));
        }
        let union = self.domain.union(&removed.domain)?;
        check_dense(&union, cap)?;
        let mut q = self.extend(&union)?.commonality_with_cap(cap)?;
        let r = removed.extend(&union)?.commonality_with_cap(cap)?;
        for (a, b) in q.values.iter_mut().zip(&r.values) {
            *a /= b;
        }
        q.to_mass()
    }

    /// Focal sets and masses after dropping numerical zeros.
    fn thresholded(&self) -> BTreeMap<&Bits, f64> {
        self.focals
            .iter()
            .filter(|(_, m)| m.abs() > ZERO_THRESHOLD)
            .map(|(b, &m)| (b, m))
            .collect()
    }

    /// Largest absolute mass difference over the union of both supports,
    /// and whether the supports coincide (ignoring masses below
    /// [`ZERO_THRESHOLD`]). Both must be on the same domain.
    pub fn compare(&self, other: &MassFunction) -> Result<Comparison> {
        if self.domain != other.domain {
            return Err(Error::DomainMismatch {
                expected: self.domain.to_string(),
                found: other.domain.to_string(),
            });
        }
        let a = self.thresholded();
        let b = other.thresholded();
        let same_support = a.len() == b.len() && a.keys().all(|k| b.contains_key(k));
        let max_deviation = a
            .keys()
            .chain(b.keys())
            .map(|k| (a.get(k).unwrap_or(&0.0) - b.get(k).unwrap_or(&0.0)).abs())
            .fold(0.0, f64::max);
        Ok(Comparison {
            same_support,
            max_deviation,
        })
    }

    /// Same domain, same support and every mass within `tol`.
    pub fn approx_eq(&self, other: &MassFunction, tol: f64) -> bool {
        self.compare(other)
            .map(|c| c.same_support && c.max_deviation <= tol)
            .unwrap_or(false)
    }
}

/// Result of [`MassFunction::compare`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Comparison {
    pub same_support: bool,
    pub max_deviation: f64,
}

impl PartialEq for MassFunction {
    fn eq(&self, other: &Self) -> bool {
        self.domain == other.domain && self.focals == other.focals
    }
}

impl fmt::Debug for MassFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut map = f.debug_map();
        for (set, m) in self.focal_elements() {
            map.entry(&set, &m);
        }
        map.finish()
    }
}

fn check_dense(domain: &Domain, cap: usize) -> Result<usize> {
    let cap = cap.min(MAX_DENSE_CAP);
    let n = domain.cardinality();
    if n > cap {
        return Err(Error::DenseTooLarge {
            domain: domain.to_string(),
            cardinality: n,
            cap,
        });
    }
    Ok(n)
}

/// Commonality values for every subset of a small frame, indexed by subset
/// bitmask (bit `k` set iff configuration `k` is in the subset).
#[derive(Debug, Clone)]
pub struct DenseCommonality {
    domain: Domain,
    values: Vec<f64>,
}

impl DenseCommonality {
    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, a: &ConfigSet) -> Result<f64> {
        if a.domain() != &self.domain {
            return Err(Error::DomainMismatch {
                expected: self.domain.to_string(),
                found: a.domain().to_string(),
            });
        }
        Ok(self.values[a.bits().low_word() as usize])
    }

    /// Möbius inversion back to masses.
    pub fn to_mass(&self) -> Result<MassFunction> {
        let n = self.domain.cardinality();
        let mut values = self.values.clone();
        for i in 0..n {
            let bit = 1usize << i;
            for mask in 0..values.len() {
                if mask & bit == 0 {
                    values[mask] -= values[mask | bit];
                }
            }
        }
        let mut focals = BTreeMap::new();
        for (mask, &m) in values.iter().enumerate() {
            if m < -NEGATIVE_TOLERANCE {
                let bits = Bits::from_low_word(n, mask as u64);
                return Err(Error::NotABeliefFunction {
                    subset: ConfigSet::from_bits(&self.domain, bits).to_string(),
                    mass: m,
                });
            }
            if m > ZERO_THRESHOLD {
                focals.insert(Bits::from_low_word(n, mask as u64), m);
            }
        }
        let total: f64 = focals.values().sum();
        if (total - 1.0).abs() > RENORMALIZE_LIMIT {
            return Err(Error::MassSum { sum: total });
        }
        Ok(MassFunction::from_map(&self.domain, focals))
    }
}

/// Ballooning extension of a conditional belief function.
///
/// `conditionals` gives, for states of `given`, a bba on `target` alone.
/// Each conditional focal set `a` under state `x` becomes
/// `(a × {x}) ∪ (Θ_target × (Θ_given ∖ {x}))` on the product frame, and the
/// deconditionalized bbas are combined. States without an entry are vacuous.
pub fn ballooning<S: AsRef<str>>(
    target: &Variable,
    given: &Variable,
    conditionals: &[(S, MassFunction)],
) -> Result<MassFunction> {
    let target_domain = Domain::new([target.clone()])?;
    let product = Domain::new([target.clone(), given.clone()])?;
    let t_pos = product.position(target.name()).expect("target in product");
    let g_pos = product.position(given.name()).expect("given in product");
    let mut result = MassFunction::vacuous(&product);
    let mut seen = Vec::new();
    for (state, conditional) in conditionals {
        let state = state.as_ref();
        let x = given.state_index(state).ok_or_else(|| {
            Error::InvalidAssignment(format!("`{state}` is not a state of `{}`", given.name()))
        })?;
        if seen.contains(&x) {
            return Err(Error::InvalidAssignment(format!(
                "conditional for {}={state} given twice",
                given.name()
            )));
        }
        seen.push(x);
        if conditional.domain() != &target_domain {
            return Err(Error::DomainMismatch {
                expected: target_domain.to_string(),
                found: conditional.domain().to_string(),
            });
        }
        let mut focals = BTreeMap::new();
        for (a, m) in conditional.focal_elements() {
            let mut bits = Bits::zeros(product.cardinality());
            for k in 0..product.cardinality() {
                let states = product.decode(k);
                if states[g_pos] != x || a.contains(states[t_pos]) {
                    bits.set(k);
                }
            }
            *focals.entry(bits).or_insert(0.0) += m;
        }
        result = result.combine(&MassFunction::from_map(&product, focals))?;
    }
    Ok(result)
}
