//! Random corpora and brute-force reference computations shared by the
//! integration suites.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use evidential::{ConfigSet, Domain, Evidence, MassFunction, Relation, ValuationNetwork, Variable};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn simple(d: &Domain, states: &[&str], mass: f64) -> MassFunction {
    MassFunction::new(
        d,
        [
            (ConfigSet::from_states(d, states).unwrap(), mass),
            (ConfigSet::full(d), 1.0 - mass),
        ],
    )
    .unwrap()
}

/// Random bba with one to four focal sets; the frame always carries mass
/// unless `dogmatic` is set.
pub fn random_mass<R: Rng>(rng: &mut R, d: &Domain, dogmatic: bool) -> MassFunction {
    let n = d.cardinality();
    let count = rng.gen_range(1..=4);
    let mut items: Vec<(ConfigSet, f64)> = (0..count)
        .map(|_| {
            let set = ConfigSet::from_indices(d, (0..n).filter(|_| rng.gen_bool(0.5))).unwrap();
            (set, rng.gen_range(1..100) as f64)
        })
        .collect();
    let frame_weight = if dogmatic { rng.gen_range(0..100) } else { rng.gen_range(1..100) };
    items.push((ConfigSet::full(d), frame_weight as f64));
    let total: f64 = items.iter().map(|(_, w)| w).sum();
    MassFunction::new(d, items.into_iter().map(|(s, w)| (s, w / total))).unwrap()
}

/// Up to five binary or ternary variables carrying up to four valuations
/// on one to three variables each. Single-variable valuations become
/// non-dogmatic evidence, the rest relations.
pub fn random_network<R: Rng>(rng: &mut R) -> ValuationNetwork {
    let n_vars = rng.gen_range(2..=5);
    let names = ["A", "B", "C", "D", "E"];
    let variables: Vec<Variable> = names[..n_vars]
        .iter()
        .map(|name| Variable::integer(*name, rng.gen_range(2..=3)).unwrap())
        .collect();
    let mut relations = Vec::new();
    let mut evidence = Vec::new();
    for k in 0..rng.gen_range(1..=4) {
        let size = rng.gen_range(1..=3.min(n_vars));
        let vars: Vec<Variable> = variables.choose_multiple(rng, size).cloned().collect();
        let d = Domain::new(vars).unwrap();
        if size == 1 {
            evidence.push(Evidence {
                id: format!("e{k}"),
                valuation: random_mass(rng, &d, false),
            });
        } else {
            let dogmatic = rng.gen_bool(0.5);
            relations.push(Relation {
                label: format!("r{k}"),
                valuation: random_mass(rng, &d, dogmatic),
            });
        }
    }
    ValuationNetwork::new(variables, relations, evidence)
}

/// Set-of-configurations view of a bba, independent of the bit encoding.
pub type Naive = BTreeMap<BTreeSet<Vec<String>>, f64>;

pub fn naive(m: &MassFunction) -> Naive {
    let d = m.domain();
    let mut out = Naive::new();
    for (set, mass) in m.focal_elements() {
        let configs = set
            .indices()
            .map(|i| d.labels(i).into_iter().map(String::from).collect())
            .collect();
        *out.entry(configs).or_insert(0.0) += mass;
    }
    out
}

/// Every configuration of `names` (each with its state list), in lexicographic order.
fn configurations(vars: &[(String, Vec<String>)]) -> Vec<Vec<String>> {
    vars.iter().fold(vec![Vec::new()], |acc, (_, states)| {
        acc.into_iter()
            .flat_map(|prefix| {
                states.iter().map(move |s| {
                    let mut c = prefix.clone();
                    c.push(s.clone());
                    c
                })
            })
            .collect()
    })
}

fn var_list(d: &Domain) -> Vec<(String, Vec<String>)> {
    d.variables()
        .iter()
        .map(|v| (v.name().to_string(), v.states().to_vec()))
        .collect()
}

/// Unnormalized Dempster combination by direct enumeration of the joint
/// configurations.
pub fn naive_combine(a: &MassFunction, b: &MassFunction) -> Naive {
    let mut union: Vec<(String, Vec<String>)> = var_list(a.domain());
    for v in var_list(b.domain()) {
        if !union.iter().any(|(n, _)| n == &v.0) {
            union.push(v);
        }
    }
    union.sort();
    let all = configurations(&union);
    let restrict = |config: &[String], d: &Domain| -> Vec<String> {
        d.variables()
            .iter()
            .map(|v| config[union.iter().position(|(n, _)| n == v.name()).unwrap()].clone())
            .collect()
    };
    let (na, nb) = (naive(a), naive(b));
    let mut out = Naive::new();
    for (sa, ma) in &na {
        for (sb, mb) in &nb {
            let meet: BTreeSet<Vec<String>> = all
                .iter()
                .filter(|c| sa.contains(&restrict(c, a.domain())) && sb.contains(&restrict(c, b.domain())))
                .cloned()
                .collect();
            *out.entry(meet).or_insert(0.0) += ma * mb;
        }
    }
    out
}

pub fn naive_close(a: &Naive, b: &Naive, tol: f64) -> bool {
    let keys: BTreeSet<_> = a
        .iter()
        .chain(b.iter())
        .filter(|(_, m)| **m > 1e-12)
        .map(|(k, _)| k)
        .collect();
    keys.into_iter()
        .all(|k| (a.get(k).copied().unwrap_or(0.0) - b.get(k).copied().unwrap_or(0.0)).abs() <= tol)
}

/// `-Σ log q(a)` by enumerating every subset and summing the masses of its supersets.
pub fn naive_info(m: &MassFunction) -> f64 {
    let n = m.domain().cardinality();
    let focals: Vec<(u64, f64)> = m
        .focal_elements()
        .map(|(s, mass)| (s.indices().fold(0u64, |acc, i| acc | 1 << i), mass))
        .collect();
    (0u64..1 << n)
        .map(|a| {
            let q: f64 = focals.iter().filter(|(f, _)| f & a == a).map(|(_, mass)| mass).sum();
            -q.ln()
        })
        .sum()
}

/// `S - X - T` where both relations marginalize to vacuous on X, with
/// evidence on S and T.
pub fn branches(seed: u64) -> ValuationNetwork {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let [s, x, t] = [("S", 2), ("X", 3), ("T", 2)].map(|(n, k)| Variable::integer(n, k).unwrap());
    let copy = |a: &Variable, b: &Variable, r: &mut ChaCha8Rng| {
        // every X state reachable from every focal element keeps the X-marginal vacuous
        let d = Domain::new([a.clone(), b.clone()]).unwrap();
        let pa = d.position(a.name()).unwrap();
        let rule: Vec<usize> = (0..d.cardinality())
            .filter(|&i| {
                let st = d.decode(i);
                let (av, bv) = (st[pa], st[1 - pa]);
                if a.name() == "X" { bv == av % 2 } else { av == bv % 2 }
            })
            .collect();
        let strength = r.gen_range(0.2..0.9);
        MassFunction::new(&d, [(ConfigSet::from_indices(&d, rule).unwrap(), strength), (ConfigSet::full(&d), 1.0 - strength)])
            .unwrap()
    };
    let rs = copy(&s, &x, &mut r);
    let rt = copy(&x, &t, &mut r);
    let ds = Domain::new([s.clone()]).unwrap();
    let dt = Domain::new([t.clone()]).unwrap();
    ValuationNetwork::checked(
        vec![s, x, t],
        vec![
            Relation { label: "s-x".into(), valuation: rs },
            Relation { label: "x-t".into(), valuation: rt },
        ],
        vec![
            Evidence { id: "s".into(), valuation: random_mass(&mut r, &ds, false) },
            Evidence { id: "t".into(), valuation: random_mass(&mut r, &dt, false) },
        ],
    )
    .unwrap()
}

/// S and T reach X only through one joint rule `X = S xor T`.
pub fn shared_rule() -> ValuationNetwork {
    let [s, x, t] = ["S", "X", "T"].map(Variable::binary);
    let d = Domain::new([s.clone(), x.clone(), t.clone()]).unwrap();
    let xor = ConfigSet::from_configs(
        &d,
        &["S", "T", "X"],
        &[vec!["T", "T", "F"], vec!["T", "F", "T"], vec!["F", "T", "T"], vec!["F", "F", "F"]],
    )
    .unwrap();
    let rule = MassFunction::new(&d, [(xor, 0.9), (ConfigSet::full(&d), 0.1)]).unwrap();
    let ds = Domain::new([s.clone()]).unwrap();
    let dt = Domain::new([t.clone()]).unwrap();
    ValuationNetwork::checked(
        vec![s, x, t],
        vec![Relation { label: "xor".into(), valuation: rule }],
        vec![
            Evidence { id: "s".into(), valuation: simple(&ds, &["T"], 0.8) },
            Evidence { id: "t".into(), valuation: simple(&dt, &["T"], 0.8) },
        ],
    )
    .unwrap()
}
