//! Strategies and brute-force oracles shared by the integration tests. The
//! oracles work straight from the definitions and never call the engine's
//! search code, so agreement is meaningful.
#![allow(dead_code)]

use std::sync::Arc;

use disocc_core::events::Event;
use disocc_core::rational::{ratio, Rational};
use disocc_core::space::{Factor, Outcome, ProductSpace};
use fixedbitset::FixedBitSet;
use proptest::prelude::*;

/// A random partial order on `1..=max_size` elements with small integer
/// weights (zeros allowed). Strict relations only go from lower to higher
/// index, so the closure is always antisymmetric; every finite poset has such
/// a labelling.
pub fn arb_factor(max_size: usize) -> impl Strategy<Value = Factor> {
    (1..=max_size).prop_flat_map(|m| {
        (
            proptest::collection::vec(any::<bool>(), m * (m - 1) / 2),
            proptest::collection::vec(0i64..=4, m),
        )
            .prop_map(move |(rel, raw)| {
                let mut pairs = Vec::new();
                let mut it = rel.into_iter();
                for a in 0..m {
                    for b in a + 1..m {
                        if it.next().unwrap() {
                            pairs.push((a, b));
                        }
                    }
                }
                let labels = (0..m).map(|i| format!("e{i}")).collect();
                Factor::new(labels, &pairs, normalize(&raw)).unwrap()
            })
    })
}

/// A random chain with small integer weights (zeros allowed).
pub fn arb_chain(max_size: usize) -> impl Strategy<Value = Factor> {
    (1..=max_size).prop_flat_map(|m| {
        proptest::collection::vec(0i64..=4, m).prop_map(|raw| Factor::chain(normalize(&raw)).unwrap())
    })
}

pub fn normalize(raw: &[i64]) -> Vec<Rational> {
    let total: i64 = raw.iter().sum();
    if total == 0 {
        let mut w = vec![ratio(0, 1); raw.len()];
        w[0] = ratio(1, 1);
        return w;
    }
    raw.iter().map(|&x| ratio(x, total)).collect()
}

fn build_space(factors: Vec<Factor>) -> Arc<ProductSpace> {
    Arc::new(ProductSpace::new(factors).unwrap())
}

fn small_enough(factors: &[Factor], max_outcomes: usize) -> bool {
    factors.iter().map(Factor::len).product::<usize>() <= max_outcomes
}

pub fn arb_space(max_coords: usize, max_size: usize, max_outcomes: usize) -> impl Strategy<Value = Arc<ProductSpace>> {
    proptest::collection::vec(arb_factor(max_size), 1..=max_coords)
        .prop_filter("too many outcomes", move |f| small_enough(f, max_outcomes))
        .prop_map(build_space)
}

pub fn arb_linear_space(max_coords: usize, max_size: usize, max_outcomes: usize) -> impl Strategy<Value = Arc<ProductSpace>> {
    proptest::collection::vec(arb_chain(max_size), 1..=max_coords)
        .prop_filter("too many outcomes", move |f| small_enough(f, max_outcomes))
        .prop_map(build_space)
}

/// An arbitrary event on `space` from a membership vector.
pub fn event_from_bits(space: &Arc<ProductSpace>, bits: &[bool]) -> Event {
    let mut m = FixedBitSet::with_capacity(bits.len());
    for (i, &b) in bits.iter().enumerate() {
        m.set(i, b);
    }
    Event::from_members(space.clone(), m).unwrap()
}

/// A space with `1..=max_events` arbitrary events on it.
pub fn arb_instance(
    space: impl Strategy<Value = Arc<ProductSpace>>,
    max_events: usize,
) -> impl Strategy<Value = (Arc<ProductSpace>, Vec<Event>)> {
    space.prop_flat_map(move |s| {
        let count = s.enumerable_count().unwrap();
        let fam = proptest::collection::vec(proptest::collection::vec(any::<bool>(), count), 1..=max_events);
        (Just(s), fam).prop_map(|(s, bits)| {
            let events = bits.iter().map(|b| event_from_bits(&s, b)).collect();
            (s, events)
        })
    })
}

/// A space with `1..=max_events` up-sets, each generated by one or two
/// random outcomes.
pub fn arb_up_set_instance(
    space: impl Strategy<Value = Arc<ProductSpace>>,
    max_events: usize,
) -> impl Strategy<Value = (Arc<ProductSpace>, Vec<Event>)> {
    space.prop_flat_map(move |s| {
        let count = s.enumerable_count().unwrap();
        let gens = proptest::collection::vec(proptest::collection::vec(0..count, 1..=2), 1..=max_events);
        (Just(s), gens).prop_map(|(s, gens)| {
            let events = gens
                .iter()
                .map(|g| Event::up_set(s.clone(), g.iter().map(|&i| s.outcome(i)).collect()).unwrap())
                .collect();
            (s, events)
        })
    })
}

// ---------------------------------------------------------------------------
// Oracles
// ---------------------------------------------------------------------------

/// Every outcome, by odometer over the factor sizes.
pub fn all_outcomes(space: &ProductSpace) -> Vec<Outcome> {
    let sizes: Vec<usize> = space.factors().iter().map(Factor::len).collect();
    let mut out = Vec::new();
    let mut cur = vec![0; sizes.len()];
    loop {
        out.push(Outcome::new(cur.clone()));
        let mut i = sizes.len();
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            cur[i] += 1;
            if cur[i] < sizes[i] {
                break;
            }
            cur[i] = 0;
        }
    }
}

pub fn product_leq(space: &ProductSpace, a: &Outcome, b: &Outcome) -> bool {
    (0..space.dim()).all(|i| space.factor(i).leq(a.0[i], b.0[i]))
}

pub fn weight(space: &ProductSpace, w: &Outcome) -> Rational {
    (0..space.dim()).map(|i| space.factor(i).weight(w.0[i]).clone()).product()
}

pub fn probability(space: &ProductSpace, e: &Event) -> Rational {
    all_outcomes(space)
        .iter()
        .filter(|w| e.contains(w).unwrap())
        .map(|w| weight(space, w))
        .sum()
}

/// `S` (a bitmask) witnesses `w ∈ E`, straight from the definition.
pub fn witnesses(space: &ProductSpace, e: &Event, w: &Outcome, set: u64) -> bool {
    all_outcomes(space)
        .iter()
        .filter(|v| (0..space.dim()).all(|i| set >> i & 1 == 0 || v.0[i] == w.0[i]))
        .all(|v| e.contains(v).unwrap())
}

/// Every witness set (minimal or not) of `w ∈ E`.
pub fn all_witness_sets(space: &ProductSpace, e: &Event, w: &Outcome) -> Vec<u64> {
    (0..1u64 << space.dim()).filter(|&s| witnesses(space, e, w, s)).collect()
}

pub fn minimal_sets(sets: &[u64]) -> Vec<u64> {
    let mut out: Vec<u64> = sets
        .iter()
        .copied()
        .filter(|&s| !sets.iter().any(|&t| t != s && t & s == t))
        .collect();
    out.sort_unstable();
    out
}

/// X at `w` by trying every subfamily and every tuple of witness sets.
pub fn oracle_x(space: &ProductSpace, events: &[Event], w: &Outcome) -> usize {
    let lists: Vec<Vec<u64>> = events.iter().map(|e| all_witness_sets(space, e, w)).collect();
    let k = events.len();
    let mut best = 0;
    for family in 0u32..1 << k {
        let members: Vec<usize> = (0..k).filter(|i| family >> i & 1 == 1).collect();
        if members.len() > best && some_disjoint_system(&members, &lists, 0) {
            best = members.len();
        }
    }
    best
}

fn some_disjoint_system(members: &[usize], lists: &[Vec<u64>], used: u64) -> bool {
    let Some((&first, rest)) = members.split_first() else { return true };
    lists[first].iter().any(|&s| s & used == 0 && some_disjoint_system(rest, lists, used | s))
}

/// Mutual independence straight from the definition.
pub fn oracle_independent(space: &ProductSpace, events: &[Event]) -> bool {
    let k = events.len();
    let outcomes = all_outcomes(space);
    (0u32..1 << k).all(|family| {
        let idx: Vec<usize> = (0..k).filter(|i| family >> i & 1 == 1).collect();
        let inter: Rational = outcomes
            .iter()
            .filter(|w| idx.iter().all(|&i| events[i].contains(w).unwrap()))
            .map(|w| weight(space, w))
            .sum();
        let product: Rational = idx.iter().map(|&i| probability(space, &events[i])).product();
        inter == product
    })
}

/// Z at `w` by trying every subfamily.
pub fn oracle_z(space: &ProductSpace, events: &[Event], w: &Outcome) -> usize {
    let k = events.len();
    (0u32..1 << k)
        .filter(|&family| {
            let sub: Vec<Event> = (0..k).filter(|i| family >> i & 1 == 1).map(|i| events[i].clone()).collect();
            sub.iter().all(|e| e.contains(w).unwrap()) && oracle_independent(space, &sub)
        })
        .map(|f| f.count_ones() as usize)
        .max()
        .unwrap_or(0)
}

pub fn oracle_increasing(space: &ProductSpace, e: &Event) -> bool {
    let outcomes = all_outcomes(space);
    outcomes.iter().all(|a| {
        !e.contains(a).unwrap() || outcomes.iter().filter(|b| product_leq(space, a, b)).all(|b| e.contains(b).unwrap())
    })
}

pub fn oracle_decreasing(space: &ProductSpace, e: &Event) -> bool {
    let outcomes = all_outcomes(space);
    outcomes.iter().all(|a| {
        !e.contains(a).unwrap() || outcomes.iter().filter(|b| product_leq(space, b, a)).all(|b| e.contains(b).unwrap())
    })
}

pub fn oracle_affects(space: &ProductSpace, e: &Event, i: usize) -> bool {
    let outcomes = all_outcomes(space);
    outcomes.iter().any(|a| {
        e.contains(a).unwrap()
            && outcomes.iter().any(|b| {
                !e.contains(b).unwrap() && (0..space.dim()).all(|j| j == i || a.0[j] == b.0[j])
            })
    })
}

/// Up-closed element subsets of a factor, as bitmasks.
pub fn oracle_up_sets(f: &Factor) -> Vec<u32> {
    let m = f.len();
    (0u32..1 << m)
        .filter(|&s| (0..m).all(|a| s >> a & 1 == 0 || (0..m).all(|b| !f.leq(a, b) || s >> b & 1 == 1)))
        .collect()
}

/// Positive association by a double loop over up-set pairs.
pub fn oracle_pa(f: &Factor) -> bool {
    let mass = |s: u32| -> Rational { (0..f.len()).filter(|i| s >> i & 1 == 1).map(|i| f.weight(i).clone()).sum() };
    let ups = oracle_up_sets(f);
    ups.iter().all(|&a| ups.iter().all(|&b| mass(a & b) >= mass(a) * mass(b)))
}
