//! Variables, product frames and subsets of frames.
//!
//! A [`Domain`] is a set of variables kept in canonical order (sorted by
//! name). Its configurations are numbered in mixed radix with the last
//! variable varying fastest, so two domains over the same variables always
//! agree on indexing and a [`ConfigSet`] is just a bit vector over those
//! indices.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Largest frame a [`Domain`] may have unless a different cap is requested.
pub const DEFAULT_FRAME_CAP: usize = 1 << 16;

/// A variable with a finite, ordered list of state labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Variable {
    name: String,
    states: Vec<String>,
}

impl Variable {
    pub fn new<N, S, I>(name: N, states: I) -> Result<Self>
    where
        N: Into<String>,
        S: Into<String>,
        I: IntoIterator<Item = S>,
    {
        let name = name.into();
        let states: Vec<String> = states.into_iter().map(Into::into).collect();
        if name.is_empty() {
            return Err(Error::InvalidVariable {
                name,
                reason: "empty name".into(),
            });
        }
        if states.is_empty() {
            return Err(Error::InvalidVariable {
                name,
                reason: "no states".into(),
            });
        }
        for (i, s) in states.iter().enumerate() {
            if states[..i].contains(s) {
                return Err(Error::InvalidVariable {
                    name,
                    reason: format!("state `{s}` listed twice"),
                });
            }
        }
        Ok(Variable { name, states })
    }

    /// A two-state variable with states `T` and `F`, in that order.
    pub fn binary(name: impl Into<String>) -> Self {
        Variable::new(name, ["T", "F"]).expect("binary variable is well formed")
    }

    /// A variable whose states are the integers `0..n` rendered as labels.
    pub fn integer(name: impl Into<String>, n: usize) -> Result<Self> {
        Variable::new(name, (0..n).map(|i| i.to_string()))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn cardinality(&self) -> usize {
        self.states.len()
    }

    pub fn state_index(&self, label: &str) -> Option<usize> {
        self.states.iter().position(|s| s == label)
    }
}

struct DomainInner {
    vars: Vec<Variable>,
    strides: Vec<usize>,
    cardinality: usize,
}

/// An ordered set of variables and the product of their frames.
#[derive(Clone)]
pub struct Domain {
    inner: Arc<DomainInner>,
}

impl Domain {
    pub fn new(vars: impl IntoIterator<Item = Variable>) -> Result<Self> {
        Self::with_cap(vars, DEFAULT_FRAME_CAP)
    }

    /// Builds a domain, failing if the frame has more than `cap` configurations.
    pub fn with_cap(vars: impl IntoIterator<Item = Variable>, cap: usize) -> Result<Self> {
        let mut vars: Vec<Variable> = vars.into_iter().collect();
        vars.sort_by(|a, b| a.name.cmp(&b.name));
        for pair in vars.windows(2) {
            if pair[0].name == pair[1].name {
                return Err(Error::DuplicateVariable(pair[0].name.clone()));
            }
        }
        let mut cardinality: usize = 1;
        for v in &vars {
            cardinality = cardinality.saturating_mul(v.cardinality());
        }
        if cardinality > cap {
            return Err(Error::FrameTooLarge {
                domain: names_of(&vars),
                cardinality,
                cap,
            });
        }
        let mut strides = vec![1; vars.len()];
        for i in (0..vars.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * vars[i + 1].cardinality();
        }
        Ok(Domain {
            inner: Arc::new(DomainInner {
                vars,
                strides,
                cardinality,
            }),
        })
    }

    /// The domain with no variables. Its frame has exactly one (empty) configuration.
    pub fn empty() -> Self {
        Domain::new([]).expect("empty domain")
    }

    pub fn variables(&self) -> &[Variable] {
        &self.inner.vars
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.inner.vars.iter().map(|v| v.name.as_str())
    }

    pub fn len(&self) -> usize {
        self.inner.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inner.vars.is_empty()
    }

    pub fn cardinality(&self) -> usize {
        self.inner.cardinality
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.inner
            .vars
            .binary_search_by(|v| v.name.as_str().cmp(name))
            .ok()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.position(name).is_some()
    }

    pub fn variable(&self, name: &str) -> Option<&Variable> {
        self.position(name).map(|i| &self.inner.vars[i])
    }

    /// True if every variable of `other` is in `self`.
    pub fn includes(&self, other: &Domain) -> bool {
        other
            .variables()
            .iter()
            .all(|v| self.variable(&v.name) == Some(v))
    }

    pub fn union(&self, other: &Domain) -> Result<Domain> {
        self.union_with_cap(other, DEFAULT_FRAME_CAP)
    }

    pub fn union_with_cap(&self, other: &Domain, cap: usize) -> Result<Domain> {
        let shortcut = if self == other || self.includes(other) {
            Some(self)
        } else if other.includes(self) {
            Some(other)
        } else {
            None
        };
        if let Some(d) = shortcut {
            if d.cardinality() > cap {
                return Err(Error::FrameTooLarge {
                    domain: d.to_string(),
                    cardinality: d.cardinality(),
                    cap,
                });
            }
            return Ok(d.clone());
        }
        let mut vars = self.inner.vars.clone();
        for v in other.variables() {
            match self.variable(&v.name) {
                Some(mine) if mine != v => {
                    return Err(Error::DomainMismatch {
                        expected: format!("{} with states {:?}", mine.name, mine.states),
                        found: format!("{} with states {:?}", v.name, v.states),
                    })
                }
                Some(_) => {}
                None => vars.push(v.clone()),
            }
        }
        Domain::with_cap(vars, cap)
    }

    /// The domain without the named variable (unchanged if absent).
    pub fn without(&self, name: &str) -> Domain {
        if !self.contains(name) {
            return self.clone();
        }
        Domain::with_cap(self.inner.vars.iter().filter(|v| v.name != name).cloned(), usize::MAX)
            .expect("subdomain of a valid domain")
    }

    /// Mixed-radix index of a full assignment given as `(variable, state)` pairs.
    pub fn config_index<N: AsRef<str>, S: AsRef<str>>(&self, assignment: &[(N, S)]) -> Result<usize> {
        if assignment.len() != self.len() {
            return Err(Error::InvalidAssignment(format!(
                "expected {} variables ({}), got {}",
                self.len(),
                self,
                assignment.len()
            )));
        }
        let mut seen = vec![false; self.len()];
        let mut index = 0;
        for (name, label) in assignment {
            let (name, label) = (name.as_ref(), label.as_ref());
            let pos = self
                .position(name)
                .ok_or_else(|| Error::InvalidAssignment(format!("variable `{name}` not in {self}")))?;
            if seen[pos] {
                return Err(Error::InvalidAssignment(format!("variable `{name}` assigned twice")));
            }
            seen[pos] = true;
            let state = self.inner.vars[pos]
                .state_index(label)
                .ok_or_else(|| Error::InvalidAssignment(format!("`{label}` is not a state of `{name}`")))?;
            index += state * self.inner.strides[pos];
        }
        Ok(index)
    }

    /// Index from per-variable state indices given in canonical variable order.
    pub fn index_of_states(&self, states: &[usize]) -> Result<usize> {
        if states.len() != self.len() {
            return Err(Error::InvalidAssignment(format!(
                "expected {} states, got {}",
                self.len(),
                states.len()
            )));
        }
        let mut index = 0;
        for ((&s, v), stride) in states.iter().zip(&self.inner.vars).zip(&self.inner.strides) {
            if s >= v.cardinality() {
                return Err(Error::InvalidAssignment(format!(
                    "state index {s} out of range for `{}`",
                    v.name
                )));
            }
            index += s * stride;
        }
        Ok(index)
    }

    /// Per-variable state indices of a configuration, in canonical order.
    pub fn decode(&self, index: usize) -> Vec<usize> {
        assert!(index < self.cardinality(), "configuration index out of range");
        self.inner
            .vars
            .iter()
            .zip(&self.inner.strides)
            .map(|(v, stride)| (index / stride) % v.cardinality())
            .collect()
    }

    /// State labels of a configuration, in canonical order.
    pub fn labels(&self, index: usize) -> Vec<&str> {
        self.decode(index)
            .into_iter()
            .zip(&self.inner.vars)
            .map(|(s, v)| v.states[s].as_str())
            .collect()
    }

    /// For every configuration of `self`, the index of its projection onto `sub`.
    pub(crate) fn projection_map(&self, sub: &Domain) -> Result<Vec<usize>> {
        if !self.includes(sub) {
            return Err(Error::DomainMismatch {
                expected: format!("a subset of {self}"),
                found: sub.to_string(),
            });
        }
        // stride in `sub` for each variable of `self` (0 when projected away)
        let sub_strides: Vec<usize> = self
            .variables()
            .iter()
            .map(|v| sub.position(&v.name).map_or(0, |p| sub.inner.strides[p]))
            .collect();
        let radices: Vec<usize> = self.variables().iter().map(Variable::cardinality).collect();
        let mut map = Vec::with_capacity(self.cardinality());
        let mut digits = vec![0usize; self.len()];
        let mut current = 0usize;
        for _ in 0..self.cardinality() {
            map.push(current);
            for k in (0..digits.len()).rev() {
                digits[k] += 1;
                current += sub_strides[k];
                if digits[k] < radices[k] {
                    break;
                }
                current -= sub_strides[k] * radices[k];
                digits[k] = 0;
            }
        }
        Ok(map)
    }
}

fn names_of(vars: &[Variable]) -> String {
    let names: Vec<&str> = vars.iter().map(|v| v.name.as_str()).collect();
    format!("{{{}}}", names.join(","))
}

impl PartialEq for Domain {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner.vars == other.inner.vars
    }
}

impl Eq for Domain {}

impl std::hash::Hash for Domain {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.inner.vars.hash(state);
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&names_of(&self.inner.vars))
    }
}

impl fmt::Debug for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Domain{self}")
    }
}

/// Fixed-length bit vector; ordering is lexicographic over the words, which
/// gives focal elements their canonical order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct Bits {
    words: Vec<u64>,
}

impl Bits {
    pub(crate) fn zeros(len: usize) -> Self {
        Bits {
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub(crate) fn ones(len: usize) -> Self {
        let mut bits = Bits::zeros(len);
        for i in 0..len {
            bits.set(i);
        }
        bits
    }

    #[inline]
    pub(crate) fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    pub(crate) fn set(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub(crate) fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub(crate) fn and(&self, other: &Bits) -> Bits {
        Bits {
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect(),
        }
    }

    pub(crate) fn or(&self, other: &Bits) -> Bits {
        Bits {
            words: self.words.iter().zip(&other.words).map(|(a, b)| a | b).collect(),
        }
    }

    pub(crate) fn intersects(&self, other: &Bits) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub(crate) fn is_subset(&self, other: &Bits) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub(crate) fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let tz = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + tz)
            })
        })
    }

    /// The low word, for frames small enough to use as a subset bitmask.
    pub(crate) fn low_word(&self) -> u64 {
        self.words.first().copied().unwrap_or(0)
    }

    pub(crate) fn from_low_word(len: usize, mask: u64) -> Bits {
        debug_assert!(len <= 64);
        let mut bits = Bits::zeros(len);
        if let Some(w) = bits.words.first_mut() {
            *w = mask;
        }
        bits
    }
}

/// Image of a set under a configuration map into a frame of `len` configurations.
pub(crate) fn image(bits: &Bits, map: &[usize], len: usize) -> Bits {
    let mut out = Bits::zeros(len);
    for i in bits.iter_ones() {
        out.set(map[i]);
    }
    out
}

/// Pulls a set back through a configuration map: bit `x` is set iff `map[x]` is.
pub(crate) fn preimage(bits: &Bits, map: &[usize]) -> Bits {
    let mut out = Bits::zeros(map.len());
    for (x, &y) in map.iter().enumerate() {
        if bits.get(y) {
            out.set(x);
        }
    }
    out
}

/// A subset of the frame of a [`Domain`].
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ConfigSet {
    domain: Domain,
    bits: Bits,
}

impl ConfigSet {
    pub fn empty(domain: &Domain) -> Self {
        ConfigSet {
            domain: domain.clone(),
            bits: Bits::zeros(domain.cardinality()),
        }
    }

    pub fn full(domain: &Domain) -> Self {
        ConfigSet {
            domain: domain.clone(),
            bits: Bits::ones(domain.cardinality()),
        }
    }

    pub fn from_indices(domain: &Domain, indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut set = ConfigSet::empty(domain);
        for i in indices {
            if i >= domain.cardinality() {
                return Err(Error::InvalidAssignment(format!(
                    "configuration {i} out of range for {domain}"
                )));
            }
            set.bits.set(i);
        }
        Ok(set)
    }

    /// Builds a set on a single-variable domain from state labels.
    pub fn from_states<S: AsRef<str>>(domain: &Domain, states: &[S]) -> Result<Self> {
        if domain.len() != 1 {
            return Err(Error::InvalidAssignment(format!(
                "state-label sets need a single-variable domain, got {domain}"
            )));
        }
        let var = &domain.variables()[0];
        let indices = states
            .iter()
            .map(|s| {
                var.state_index(s.as_ref()).ok_or_else(|| {
                    Error::InvalidAssignment(format!("`{}` is not a state of `{}`", s.as_ref(), var.name()))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        ConfigSet::from_indices(domain, indices)
    }

    /// Builds a set from configurations whose labels are listed in the order
    /// of `order` (which must be a permutation of the domain's variables).
    pub fn from_configs<N, S>(domain: &Domain, order: &[N], configs: &[Vec<S>]) -> Result<Self>
    where
        N: AsRef<str>,
        S: AsRef<str>,
    {
        let mut set = ConfigSet::empty(domain);
        for config in configs {
            if config.len() != order.len() {
                return Err(Error::InvalidAssignment(format!(
                    "configuration has {} labels, expected {}",
                    config.len(),
                    order.len()
                )));
            }
            let assignment: Vec<(&str, &str)> = order
                .iter()
                .zip(config)
                .map(|(n, s)| (n.as_ref(), s.as_ref()))
                .collect();
            set.bits.set(domain.config_index(&assignment)?);
        }
        Ok(set)
    }

    pub(crate) fn from_bits(domain: &Domain, bits: Bits) -> Self {
        ConfigSet {
            domain: domain.clone(),
            bits,
        }
    }

    pub(crate) fn bits(&self) -> &Bits {
        &self.bits
    }

    pub(crate) fn into_bits(self) -> Bits {
        self.bits
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn contains(&self, index: usize) -> bool {
        index < self.domain.cardinality() && self.bits.get(index)
    }

    pub fn len(&self) -> usize {
        self.bits.count()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_zero()
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.domain.cardinality()
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter_ones()
    }

    fn check_same(&self, other: &ConfigSet) -> Result<()> {
        if self.domain != other.domain {
            return Err(Error::DomainMismatch {
                expected: self.domain.to_string(),
                found: other.domain.to_string(),
            });
        }
        Ok(())
    }

    pub fn intersection(&self, other: &ConfigSet) -> Result<ConfigSet> {
        self.check_same(other)?;
        Ok(ConfigSet::from_bits(&self.domain, self.bits.and(&other.bits)))
    }

    pub fn union(&self, other: &ConfigSet) -> Result<ConfigSet> {
        self.check_same(other)?;
        Ok(ConfigSet::from_bits(&self.domain, self.bits.or(&other.bits)))
    }

    pub fn complement(&self) -> ConfigSet {
        let mut out = ConfigSet::empty(&self.domain);
        for i in 0..self.domain.cardinality() {
            if !self.bits.get(i) {
                out.bits.set(i);
            }
        }
        out
    }

    pub fn is_subset(&self, other: &ConfigSet) -> Result<bool> {
        self.check_same(other)?;
        Ok(self.bits.is_subset(&other.bits))
    }

    /// Projection onto a subdomain: the image of coordinate deletion.
    pub fn project(&self, sub: &Domain) -> Result<ConfigSet> {
        let map = self.domain.projection_map(sub)?;
        Ok(ConfigSet::from_bits(sub, image(&self.bits, &map, sub.cardinality())))
    }

    /// Cylindric extension to a superdomain.
    pub fn extend(&self, sup: &Domain) -> Result<ConfigSet> {
        if *sup == self.domain {
            return Ok(self.clone());
        }
        let map = sup.projection_map(&self.domain).map_err(|_| Error::DomainMismatch {
            expected: format!("a superset of {}", self.domain),
            found: sup.to_string(),
        })?;
        Ok(ConfigSet::from_bits(sup, preimage(&self.bits, &map)))
    }
}

impl PartialOrd for ConfigSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Canonical order of sets on the same domain (bit-vector order).
impl Ord for ConfigSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.bits.cmp(&other.bits)
    }
}

/// Renders as a brace list: `{0,1,2}` on one variable, `{(T,F),(F,F)}` on several.
impl fmt::Display for ConfigSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let single = self.domain.len() == 1;
        let items: Vec<String> = self
            .indices()
            .map(|i| {
                let labels = self.domain.labels(i);
                if single {
                    labels[0].to_string()
                } else {
                    format!("({})", labels.join(","))
                }
            })
            .collect();
        write!(f, "{{{}}}", items.join(","))
    }
}

impl fmt::Debug for ConfigSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.domain, self)
    }
}
