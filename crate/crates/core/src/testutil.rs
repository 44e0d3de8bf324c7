//! Shared fixtures for unit tests.

use proptest::prelude::*;

use crate::frames::{ConfigSet, Domain, Variable};
use crate::mass::MassFunction;

pub(crate) fn binary(name: &str) -> Variable {
    Variable::binary(name)
}

pub(crate) fn domain(vars: &[Variable]) -> Domain {
    Domain::new(vars.iter().cloned()).unwrap()
}

pub(crate) fn set(d: &Domain, states: &[&str]) -> ConfigSet {
    ConfigSet::from_states(d, states).unwrap()
}

pub(crate) fn all_subsets(d: &Domain) -> Vec<ConfigSet> {
    let n = d.cardinality();
    (0u64..1 << n)
        .map(|mask| ConfigSet::from_indices(d, (0..n).filter(|i| mask >> i & 1 == 1)).unwrap())
        .collect()
}

/// Random bba on a single integer-valued variable `X` with `n` states.
/// Non-dogmatic unless `dogmatic` is set, in which case the frame may lack mass.
pub(crate) fn arb_mass(n: usize, dogmatic: bool) -> impl Strategy<Value = MassFunction> {
    let d = domain(&[Variable::integer("X", n).unwrap()]);
    let full = (1u64 << n) - 1;
    (
        prop::collection::vec((0..=full, 1u32..100), 1..5),
        if dogmatic { 0u32..100 } else { 1u32..100 },
    )
        .prop_map(move |(focals, frame_weight)| {
            let total: f64 = focals.iter().map(|(_, w)| *w as f64).sum::<f64>() + frame_weight as f64;
            let mut items: Vec<(ConfigSet, f64)> = focals
                .iter()
                .map(|(mask, w)| {
                    let s = ConfigSet::from_indices(&d, (0..n).filter(|i| mask >> i & 1 == 1)).unwrap();
                    (s, *w as f64 / total)
                })
                .collect();
            items.push((ConfigSet::full(&d), frame_weight as f64 / total));
            MassFunction::new(&d, items).unwrap()
        })
}
