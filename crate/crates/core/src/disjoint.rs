//! Disjoint occurrence: the box operator, the counts X (disjointly occurring)
//! and Z (independent and jointly occurring), the Bernoulli-sum comparison Y,
//! and stochastic domination between count laws.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use fixedbitset::FixedBitSet;
use num_traits::{One, Signed, Zero};

use crate::events::{self, common_space, Event, WitnessSet, SUBFAMILY_CAP};
use crate::packing;
use crate::rational::{self, Rational};
use crate::space::{Outcome, ProductSpace};
use crate::{Error, Result};

/// Proof that the events indexed by `indices` occur disjointly at `outcome`:
/// `witnesses[j]` witnesses `outcome ∈ A_{indices[j]}` and the witness sets
/// are pairwise disjoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DisjointnessCertificate {
    pub outcome: Outcome,
    pub indices: Vec<usize>,
    pub witnesses: Vec<WitnessSet>,
}

impl DisjointnessCertificate {
    /// Re-checks the certificate from scratch with exhaustive witness checks.
    pub fn verify(&self, events: &[Event]) -> bool {
        if self.indices.len() != self.witnesses.len() {
            return false;
        }
        for (a, sa) in self.witnesses.iter().enumerate() {
            for sb in &self.witnesses[a + 1..] {
                if !sa.is_disjoint(*sb) {
                    return false;
                }
            }
        }
        self.indices.iter().zip(&self.witnesses).all(|(&i, &s)| {
            let Some(e) = events.get(i) else { return false };
            match e.space().index_of(&self.outcome) {
                Ok(idx) => e.is_witness_exhaustive(idx, s),
                Err(_) => false,
            }
        })
    }
}

/// An exact probability mass function on `{0, …, k}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountDistribution {
    pmf: Vec<Rational>,
}

impl CountDistribution {
    /// Validates nonnegativity and normalization.
    pub fn new(pmf: Vec<Rational>) -> Result<Self> {
        if pmf.is_empty() {
            return Err(Error::Domain("empty pmf".into()));
        }
        if let Some(p) = pmf.iter().find(|p| p.is_negative()) {
            return Err(Error::ProbabilityOutOfRange(rational::format_rational(p)));
        }
        let total: Rational = pmf.iter().sum();
        if !total.is_one() {
            return Err(Error::Domain(format!("pmf sums to {}", rational::format_rational(&total))));
        }
        Ok(CountDistribution { pmf })
    }

    pub fn point_mass(value: usize, k: usize) -> Self {
        let mut pmf = vec![Rational::zero(); k.max(value) + 1];
        pmf[value] = Rational::one();
        CountDistribution { pmf }
    }

    /// Largest value in the support range, `k`.
    pub fn max_value(&self) -> usize {
        self.pmf.len() - 1
    }

    pub fn pmf(&self, value: usize) -> Rational {
        self.pmf.get(value).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn pmf_values(&self) -> &[Rational] {
        &self.pmf
    }

    /// `Pr(V ≥ r)`.
    pub fn survival(&self, r: usize) -> Rational {
        self.pmf.iter().skip(r).sum()
    }

    /// `Pr(V ≥ x)` for a real threshold.
    pub fn tail_at_least(&self, x: &Rational) -> Rational {
        let c = rational::ceil(x);
        if !c.is_positive() {
            return Rational::one();
        }
        match usize::try_from(c) {
            Ok(r) => self.survival(r),
            Err(_) => Rational::zero(),
        }
    }

    pub fn mean(&self) -> Rational {
        self.pmf.iter().enumerate().map(|(v, p)| p * rational::from_usize(v)).sum()
    }
}

/// First integer `r` with `Pr(lower ≥ r) > Pr(upper ≥ r)`, if any.
pub fn domination_violation(lower: &CountDistribution, upper: &CountDistribution) -> Option<usize> {
    let top = lower.max_value().max(upper.max_value());
    (0..=top).find(|&r| lower.survival(r) > upper.survival(r))
}

/// `lower ≼ upper`: every survival value of `lower` is at most that of `upper`.
pub fn stochastically_dominates(lower: &CountDistribution, upper: &CountDistribution) -> bool {
    domination_violation(lower, upper).is_none()
}

fn family_space(events: &[Event]) -> Result<Option<&ProductSpace>> {
    Ok(common_space(events)?.map(|s| &**s))
}

fn check_indices(indices: &[usize], k: usize) -> Result<Vec<usize>> {
    let mut v = indices.to_vec();
    v.sort_unstable();
    v.dedup();
    if let Some(&bad) = v.iter().find(|&&i| i >= k) {
        return Err(Error::Domain(format!("event index {bad} out of range for {k} events")));
    }
    Ok(v)
}

/// Minimal witness bitmasks of every event at the outcome `index`.
pub(crate) fn witness_masks(events: &[Event], index: usize) -> Vec<Vec<u64>> {
    events
        .iter()
        .map(|e| e.minimal_witnesses_index(index).into_iter().map(|s| s.0).collect())
        .collect()
}

fn certificate_from_masks(masks: &[Vec<u64>], w: &Outcome, indices: &[usize]) -> Option<DisjointnessCertificate> {
    let lists: Vec<&[u64]> = indices.iter().map(|&i| masks[i].as_slice()).collect();
    let chosen = packing::pack_all(&lists)?;
    Some(DisjointnessCertificate {
        outcome: w.clone(),
        indices: indices.to_vec(),
        witnesses: chosen.into_iter().map(WitnessSet).collect(),
    })
}

/// Whether the events indexed by `indices` (0-based) occur disjointly at `w`.
/// When several witness systems exist, the one with lexicographically
/// smallest bitmasks is returned.
pub fn box_occurs_at(events: &[Event], w: &Outcome, indices: &[usize]) -> Result<Option<DisjointnessCertificate>> {
    let indices = check_indices(indices, events.len())?;
    let Some(space) = family_space(events)? else {
        return Ok(Some(DisjointnessCertificate { outcome: w.clone(), indices, witnesses: vec![] }));
    };
    let index = space.index_of(w)?;
    let sub: Vec<Event> = indices.iter().map(|&i| events[i].clone()).collect();
    let masks = witness_masks(&sub, index);
    let local: Vec<usize> = (0..sub.len()).collect();
    Ok(certificate_from_masks(&masks, w, &local).map(|mut c| {
        c.indices = indices;
        c
    }))
}

/// The event `□_{i∈I} A_i`.
pub fn box_event(events: &[Event], indices: &[usize]) -> Result<Event> {
    let indices = check_indices(indices, events.len())?;
    let space = common_space(events)?
        .ok_or_else(|| Error::Domain("box of an empty event list has no space".into()))?
        .clone();
    let count = space.enumerable_count()?;
    let sub: Vec<Event> = indices.iter().map(|&i| events[i].clone()).collect();
    let mut members = FixedBitSet::with_capacity(count);
    for idx in 0..count {
        if sub.iter().any(|e| !e.contains_index(idx)) {
            continue;
        }
        let masks = witness_masks(&sub, idx);
        let lists: Vec<&[u64]> = masks.iter().map(Vec::as_slice).collect();
        if packing::pack_all(&lists).is_some() {
            members.insert(idx);
        }
    }
    Event::from_members(space, members)
}

/// X at the outcome with the given index.
pub fn x_at_index(events: &[Event], index: usize) -> usize {
    packing::max_packing(&witness_masks(events, index)).0
}

/// The largest number of events occurring disjointly at `w`.
pub fn x_at(events: &[Event], w: &Outcome) -> Result<usize> {
    let Some(space) = family_space(events)? else {
        return Ok(0);
    };
    Ok(x_at_index(events, space.index_of(w)?))
}

/// A certificate of maximum size at `w`: the lexicographically smallest index
/// set among the maximum ones, then the smallest witness bitmasks.
pub fn x_certificate(events: &[Event], w: &Outcome) -> Result<DisjointnessCertificate> {
    let Some(space) = family_space(events)? else {
        return Ok(DisjointnessCertificate { outcome: w.clone(), indices: vec![], witnesses: vec![] });
    };
    let index = space.index_of(w)?;
    let masks = witness_masks(events, index);
    let best = packing::max_packing(&masks).0;
    let occurring: Vec<usize> = (0..events.len()).filter(|&i| !masks[i].is_empty()).collect();
    let mut found = None;
    lex_combinations(&occurring, best, &mut |subset| {
        if found.is_none() {
            found = certificate_from_masks(&masks, w, subset);
        }
        found.is_some()
    });
    Ok(found.expect("maximum packing has a certificate"))
}

/// Calls `visit` on each `k`-subset of `items` in lexicographic order until it
/// returns true.
fn lex_combinations(items: &[usize], k: usize, visit: &mut dyn FnMut(&[usize]) -> bool) {
    fn go(items: &[usize], k: usize, start: usize, cur: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        if cur.len() == k {
            return visit(cur);
        }
        for i in start..items.len() {
            if items.len() - i < k - cur.len() {
                break;
            }
            cur.push(items[i]);
            if go(items, k, i + 1, cur, visit) {
                return true;
            }
            cur.pop();
        }
        false
    }
    go(items, k, 0, &mut Vec::with_capacity(k), visit);
}

/// Unnormalized pmf contributions of X from the outcomes in `range`. Partial
/// results over a partition of the outcome range add up to the full law.
pub fn x_pmf_over(events: &[Event], range: Range<usize>) -> Result<Vec<Rational>> {
    let mut pmf = vec![Rational::zero(); events.len() + 1];
    let Some(space) = family_space(events)? else {
        pmf[0] = Rational::one();
        return Ok(pmf);
    };
    let count = space.enumerable_count()?;
    for idx in range.start..range.end.min(count) {
        let weight = space.weight_of_index(idx);
        if weight.is_zero() {
            continue;
        }
        pmf[x_at_index(events, idx)] += weight;
    }
    Ok(pmf)
}

/// Exact law of X.
pub fn x_distribution(events: &[Event]) -> Result<CountDistribution> {
    let count = match family_space(events)? {
        Some(space) => space.enumerable_count()?,
        None => 1,
    };
    CountDistribution::new(x_pmf_over(events, 0..count)?)
}

/// Exact law of a sum of independent Bernoulli variables (Poisson-binomial),
/// by convolution.
pub fn y_distribution(probs: &[Rational]) -> Result<CountDistribution> {
    let mut pmf = vec![Rational::one()];
    for p in probs {
        if p.is_negative() || *p > Rational::one() {
            return Err(Error::ProbabilityOutOfRange(rational::format_rational(p)));
        }
        let q = Rational::one() - p;
        let mut next = vec![Rational::zero(); pmf.len() + 1];
        for (j, m) in pmf.iter().enumerate() {
            next[j] += m * &q;
            next[j + 1] += m * p;
        }
        pmf = next;
    }
    Ok(CountDistribution { pmf })
}

/// Mutually independent subfamilies of an event family, found by extending
/// independent families one event at a time. Families containing a dependent
/// subfamily are never visited.
#[derive(Debug, Clone)]
pub struct ZSolver<'a> {
    events: &'a [Event],
    /// Independent subfamily bitmasks, largest first.
    independent: Vec<u32>,
}

impl<'a> ZSolver<'a> {
    pub fn new(events: &'a [Event]) -> Result<Self> {
        Self::restricted(events, u32::MAX)
    }

    fn restricted(events: &'a [Event], allowed: u32) -> Result<Self> {
        let k = events.len();
        if k > SUBFAMILY_CAP {
            return Err(Error::TooManyEvents { count: k, cap: SUBFAMILY_CAP });
        }
        let Some(space) = family_space(events)? else {
            return Ok(ZSolver { events, independent: vec![0] });
        };
        let probs: Vec<Rational> = events.iter().map(Event::probability).collect();
        let mut memo: BTreeMap<u32, Rational> = BTreeMap::new();
        memo.insert(0, Rational::one());
        let measure = |mask: u32, memo: &mut BTreeMap<u32, Rational>| -> Rational {
            if let Some(m) = memo.get(&mask) {
                return m.clone();
            }
            let mut inter = FixedBitSet::with_capacity(events[0].members().len());
            inter.insert_range(..);
            for j in (0..k).filter(|j| mask >> j & 1 == 1) {
                inter.intersect_with(events[j].members());
            }
            let m = events::measure_of(space, &inter);
            memo.insert(mask, m.clone());
            m
        };

        let mut independent = vec![0u32];
        let mut frontier = vec![0u32];
        while let Some(family) = frontier.pop() {
            let start = if family == 0 { 0 } else { 32 - family.leading_zeros() as usize };
            for j in start..k {
                if allowed >> j & 1 == 0 {
                    continue;
                }
                let bit = 1u32 << j;
                // S ∪ {j} is independent iff μ(∩T ∩ A_j) = μ(∩T)·μ(A_j) for
                // every T ⊆ S, given that S itself is.
                let mut ok = true;
                let mut sub = family;
                loop {
                    let lhs = measure(sub | bit, &mut memo);
                    let rhs = measure(sub, &mut memo) * &probs[j];
                    if lhs != rhs {
                        ok = false;
                        break;
                    }
                    if sub == 0 {
                        break;
                    }
                    sub = (sub - 1) & family;
                }
                if ok {
                    independent.push(family | bit);
                    frontier.push(family | bit);
                }
            }
        }
        independent.sort_by(|a, b| b.count_ones().cmp(&a.count_ones()).then(a.cmp(b)));
        Ok(ZSolver { events, independent })
    }

    /// Bitmasks of all mutually independent subfamilies, largest first.
    pub fn independent_families(&self) -> &[u32] {
        &self.independent
    }

    pub fn z_at_index(&self, index: usize) -> usize {
        let occurring = self
            .events
            .iter()
            .enumerate()
            .filter(|(_, e)| e.contains_index(index))
            .fold(0u32, |m, (j, _)| m | (1 << j));
        self.independent
            .iter()
            .find(|&&f| f & !occurring == 0)
            .map_or(0, |f| f.count_ones() as usize)
    }

    pub fn pmf_over(&self, range: Range<usize>) -> Result<Vec<Rational>> {
        let mut pmf = vec![Rational::zero(); self.events.len() + 1];
        let Some(space) = family_space(self.events)? else {
            pmf[0] = Rational::one();
            return Ok(pmf);
        };
        let count = space.enumerable_count()?;
        for idx in range.start..range.end.min(count) {
            let weight = space.weight_of_index(idx);
            if !weight.is_zero() {
                pmf[self.z_at_index(idx)] += weight;
            }
        }
        Ok(pmf)
    }

    pub fn distribution(&self) -> Result<CountDistribution> {
        let count = match family_space(self.events)? {
            Some(space) => space.enumerable_count()?,
            None => 1,
        };
        CountDistribution::new(self.pmf_over(0..count)?)
    }
}

/// The largest mutually independent subfamily all of whose events contain `w`.
pub fn z_at(events: &[Event], w: &Outcome) -> Result<usize> {
    let Some(space) = family_space(events)? else {
        return Ok(0);
    };
    if events.len() > SUBFAMILY_CAP {
        return Err(Error::TooManyEvents { count: events.len(), cap: SUBFAMILY_CAP });
    }
    let index = space.index_of(w)?;
    let occurring = events
        .iter()
        .enumerate()
        .filter(|(_, e)| e.contains_index(index))
        .fold(0u32, |m, (j, _)| m | (1 << j));
    Ok(ZSolver::restricted(events, occurring)?.z_at_index(index))
}

/// Exact law of Z.
pub fn z_distribution(events: &[Event]) -> Result<CountDistribution> {
    ZSolver::new(events)?.distribution()
}

/// Flags by subfamily bitmask: which subfamilies occur disjointly at `index`.
pub(crate) fn disjoint_subfamilies_at(events: &[Event], index: usize) -> Vec<bool> {
    packing::packable_subfamilies(&witness_masks(events, index))
}

/// The probabilities `Pr(A_i)` as a list, for feeding [`y_distribution`].
pub fn probabilities(events: &[Event]) -> Vec<Rational> {
    events.iter().map(Event::probability).collect()
}
