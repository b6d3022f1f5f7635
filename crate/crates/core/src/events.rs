//! Events over a product space, witness sets, and the structural relations
//! between events (monotonicity, influence, independence).

use alloc::boxed::Box;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use fixedbitset::FixedBitSet;
use num_traits::Zero;

use crate::rational::Rational;
use crate::space::{Outcome, ProductSpace};
use crate::{Error, Result};

/// Cap on family sizes for operations that enumerate every subfamily.
pub const SUBFAMILY_CAP: usize = 20;

/// A set of coordinates, as a bitmask over `0..n`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WitnessSet(pub u64);

impl WitnessSet {
    pub const EMPTY: WitnessSet = WitnessSet(0);

    pub fn full(n: usize) -> Self {
        if n >= 64 {
            WitnessSet(u64::MAX)
        } else {
            WitnessSet((1u64 << n) - 1)
        }
    }

    pub fn from_coords<I: IntoIterator<Item = usize>>(coords: I) -> Self {
        WitnessSet(coords.into_iter().fold(0, |m, i| m | (1 << i)))
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(self, other: WitnessSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: WitnessSet) -> bool {
        self.0 & other.0 == 0
    }

    pub fn union(self, other: WitnessSet) -> Self {
        WitnessSet(self.0 | other.0)
    }

    pub fn coords(self) -> impl Iterator<Item = usize> {
        (0..64).filter(move |&i| self.contains(i))
    }
}

impl fmt::Display for WitnessSet {
    /// 1-based coordinates, e.g. `{1,3}`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.coords().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", i + 1)?;
        }
        write!(f, "}}")
    }
}

/// How an event was defined. Membership is always materialized; this is kept
/// so events can be written back out in the form they were given.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EventDef {
    Explicit(Vec<Outcome>),
    UpSet(Vec<Outcome>),
    DownSet(Vec<Outcome>),
    /// Coordinate (0-based) and the allowed element indices.
    Cylinder { coord: usize, values: Vec<usize> },
    Not(Box<EventDef>),
    And(Vec<EventDef>),
    Or(Vec<EventDef>),
    /// Built from a predicate or raw membership set.
    Members,
}

/// A subset of a product space, materialized as a membership bitset over the
/// enumerated outcomes.
#[derive(Debug, Clone)]
pub struct Event {
    space: Arc<ProductSpace>,
    def: EventDef,
    members: FixedBitSet,
    increasing: bool,
    decreasing: bool,
    affecting: u64,
}

impl PartialEq for Event {
    /// Equal as sets on the same space; the definition form is ignored.
    fn eq(&self, other: &Self) -> bool {
        same_space(&self.space, &other.space) && self.members == other.members
    }
}

impl Eq for Event {}

pub(crate) fn same_space(a: &Arc<ProductSpace>, b: &Arc<ProductSpace>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// The space shared by every event of a family, or `None` for an empty family.
pub fn common_space(events: &[Event]) -> Result<Option<&Arc<ProductSpace>>> {
    let Some(first) = events.first() else {
        return Ok(None);
    };
    if events.iter().any(|e| !same_space(&first.space, &e.space)) {
        return Err(Error::SpaceMismatch);
    }
    Ok(Some(&first.space))
}

impl Event {
    pub fn from_members(space: Arc<ProductSpace>, members: FixedBitSet) -> Result<Self> {
        Self::build(space, EventDef::Members, members)
    }

    fn build(space: Arc<ProductSpace>, def: EventDef, members: FixedBitSet) -> Result<Self> {
        let count = space.enumerable_count()?;
        if members.len() != count {
            return Err(Error::DimensionMismatch { expected: count, got: members.len() });
        }
        let (increasing, decreasing, affecting) = structure(&space, &members);
        Ok(Event { space, def, members, increasing, decreasing, affecting })
    }

    pub fn from_fn<F>(space: Arc<ProductSpace>, mut pred: F) -> Result<Self>
    where
        F: FnMut(&Outcome) -> bool,
    {
        let mut members = FixedBitSet::with_capacity(space.enumerable_count()?);
        for (i, w) in space.enumerate_outcomes()?.enumerate() {
            if pred(&w) {
                members.insert(i);
            }
        }
        Self::build(space, EventDef::Members, members)
    }

    pub fn full(space: Arc<ProductSpace>) -> Result<Self> {
        let mut members = FixedBitSet::with_capacity(space.enumerable_count()?);
        members.insert_range(..);
        Self::build(space, EventDef::Members, members)
    }

    pub fn empty(space: Arc<ProductSpace>) -> Result<Self> {
        let members = FixedBitSet::with_capacity(space.enumerable_count()?);
        Self::build(space, EventDef::Members, members)
    }

    pub fn explicit(space: Arc<ProductSpace>, outcomes: Vec<Outcome>) -> Result<Self> {
        let mut members = FixedBitSet::with_capacity(space.enumerable_count()?);
        for w in &outcomes {
            members.insert(space.index_of(w)?);
        }
        Self::build(space, EventDef::Explicit(outcomes), members)
    }

    /// `{ω : g ≤ ω for some generator g}`.
    pub fn up_set(space: Arc<ProductSpace>, generators: Vec<Outcome>) -> Result<Self> {
        let members = generated(&space, &generators, true)?;
        let e = Self::build(space, EventDef::UpSet(generators), members)?;
        if !e.increasing {
            return Err(Error::NotMonotone("increasing"));
        }
        Ok(e)
    }

    /// `{ω : ω ≤ g for some generator g}`.
    pub fn down_set(space: Arc<ProductSpace>, generators: Vec<Outcome>) -> Result<Self> {
        let members = generated(&space, &generators, false)?;
        let e = Self::build(space, EventDef::DownSet(generators), members)?;
        if !e.decreasing {
            return Err(Error::NotMonotone("decreasing"));
        }
        Ok(e)
    }

    /// `{ω : ω_coord ∈ values}` with a 0-based coordinate.
    pub fn cylinder(space: Arc<ProductSpace>, coord: usize, values: Vec<usize>) -> Result<Self> {
        if coord >= space.dim() {
            return Err(Error::DimensionMismatch { expected: space.dim(), got: coord + 1 });
        }
        let m = space.factor(coord).len();
        if let Some(&v) = values.iter().find(|&&v| v >= m) {
            return Err(Error::OutOfRange { coord, index: v });
        }
        let count = space.enumerable_count()?;
        let mut members = FixedBitSet::with_capacity(count);
        for i in 0..count {
            if values.contains(&space.coord(i, coord)) {
                members.insert(i);
            }
        }
        Self::build(space, EventDef::Cylinder { coord, values }, members)
    }

    pub fn complement(&self) -> Result<Self> {
        let mut members = self.members.clone();
        members.toggle_range(..);
        Self::build(self.space.clone(), EventDef::Not(Box::new(self.def.clone())), members)
    }

    pub fn intersection(events: &[Event]) -> Result<Self> {
        Self::combine(events, true)
    }

    pub fn union(events: &[Event]) -> Result<Self> {
        Self::combine(events, false)
    }

    fn combine(events: &[Event], and: bool) -> Result<Self> {
        let space = common_space(events)?
            .ok_or_else(|| Error::Domain("boolean combination of no events".into()))?
            .clone();
        let mut members = events[0].members.clone();
        for e in &events[1..] {
            if and {
                members.intersect_with(&e.members);
            } else {
                members.union_with(&e.members);
            }
        }
        let defs = events.iter().map(|e| e.def.clone()).collect();
        let def = if and { EventDef::And(defs) } else { EventDef::Or(defs) };
        Self::build(space, def, members)
    }

    pub fn space(&self) -> &Arc<ProductSpace> {
        &self.space
    }

    pub fn definition(&self) -> &EventDef {
        &self.def
    }

    pub fn members(&self) -> &FixedBitSet {
        &self.members
    }

    pub fn contains(&self, w: &Outcome) -> Result<bool> {
        Ok(self.members.contains(self.space.index_of(w)?))
    }

    #[inline]
    pub fn contains_index(&self, index: usize) -> bool {
        self.members.contains(index)
    }

    pub fn is_increasing(&self) -> bool {
        self.increasing
    }

    pub fn is_decreasing(&self) -> bool {
        self.decreasing
    }

    pub fn is_full(&self) -> bool {
        self.members.is_full()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_clear()
    }

    pub fn probability(&self) -> Rational {
        measure_of(&self.space, &self.members)
    }

    /// True iff some `ω ∈ E` and `ω′ ∉ E` differ only in coordinate `i`
    /// (0-based).
    pub fn affects(&self, i: usize) -> bool {
        i < 64 && self.affecting >> i & 1 == 1
    }

    /// Coordinates that affect this event.
    pub fn affecting(&self) -> WitnessSet {
        WitnessSet(self.affecting)
    }

    /// Whether `S` witnesses `ω ∈ E`: every outcome agreeing with `ω` on `S`
    /// lies in `E`.
    pub fn is_witness(&self, w: &Outcome, set: WitnessSet) -> Result<bool> {
        Ok(self.is_witness_index(self.space.index_of(w)?, set))
    }

    /// [`Event::is_witness`] by outcome index. Uses the extremal-element
    /// shortcut for monotone events when every factor has the needed
    /// extremum, and sub-product enumeration otherwise.
    pub fn is_witness_index(&self, index: usize, set: WitnessSet) -> bool {
        if !self.members.contains(index) {
            return false;
        }
        let free = !set.0 & WitnessSet::full(self.space.dim()).0;
        if free & self.affecting == 0 {
            return true;
        }
        if let Some(floor) = self.monotone_floor() {
            let probe = (0..self.space.dim())
                .filter(|&i| free >> i & 1 == 1)
                .fold(index, |acc, i| self.space.with_coord(acc, i, floor[i]));
            return self.members.contains(probe);
        }
        self.witness_by_enumeration(index, free)
    }

    /// [`Event::is_witness_index`] without any shortcut.
    pub fn is_witness_exhaustive(&self, index: usize, set: WitnessSet) -> bool {
        if !self.members.contains(index) {
            return false;
        }
        let free = !set.0 & WitnessSet::full(self.space.dim()).0;
        self.witness_by_enumeration(index, free)
    }

    fn monotone_floor(&self) -> Option<&[usize]> {
        if self.increasing {
            if let Some(l) = self.space.least_elements() {
                return Some(l);
            }
        }
        if self.decreasing {
            if let Some(g) = self.space.greatest_elements() {
                return Some(g);
            }
        }
        None
    }

    fn witness_by_enumeration(&self, index: usize, free: u64) -> bool {
        let space = &*self.space;
        let free: Vec<usize> = (0..space.dim()).filter(|&i| free >> i & 1 == 1).collect();
        let base = free.iter().fold(index, |acc, &i| space.with_coord(acc, i, 0));
        let mut digits = vec![0usize; free.len()];
        loop {
            let idx = free
                .iter()
                .zip(&digits)
                .fold(base, |acc, (&i, &d)| acc + d * space.strides()[i]);
            if !self.members.contains(idx) {
                return false;
            }
            let mut k = 0;
            loop {
                if k == free.len() {
                    return true;
                }
                digits[k] += 1;
                if digits[k] < space.factor(free[k]).len() {
                    break;
                }
                digits[k] = 0;
                k += 1;
            }
        }
    }

    /// Inclusion-minimal witness sets of `ω ∈ E`, sorted by bitmask.
    pub fn minimal_witnesses(&self, w: &Outcome) -> Result<MinimalWitnessFamily> {
        let index = self.space.index_of(w)?;
        Ok(MinimalWitnessFamily { outcome: w.clone(), sets: self.minimal_witnesses_index(index) })
    }

    pub fn minimal_witnesses_index(&self, index: usize) -> Vec<WitnessSet> {
        if !self.members.contains(index) {
            return Vec::new();
        }
        // Coordinates that do not affect the event never appear in a minimal
        // witness, and neither do coordinates already at the monotone floor.
        let mut candidates = self.affecting;
        if let Some(floor) = self.monotone_floor() {
            for (i, &f) in floor.iter().enumerate() {
                if self.space.coord(index, i) == f {
                    candidates &= !(1 << i);
                }
            }
        }
        let positions: Vec<usize> = (0..64).filter(|&i| candidates >> i & 1 == 1).collect();
        let c = positions.len();
        let mut found: Vec<WitnessSet> = Vec::new();
        for size in 0..=c {
            for local in combinations(c, size) {
                let mask = positions
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| local >> k & 1 == 1)
                    .fold(0u64, |m, (_, &i)| m | (1 << i));
                let set = WitnessSet(mask);
                if found.iter().any(|f| f.is_subset(set)) {
                    continue;
                }
                if self.is_witness_index(index, set) {
                    found.push(set);
                }
            }
        }
        found.sort();
        found
    }
}

/// The antichain of inclusion-minimal witness sets for one outcome.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinimalWitnessFamily {
    pub outcome: Outcome,
    pub sets: Vec<WitnessSet>,
}

/// Bitmasks over `0..n` with exactly `k` bits set, in increasing order.
pub(crate) fn combinations(n: usize, k: usize) -> impl Iterator<Item = u64> {
    let limit: u64 = if n >= 64 { u64::MAX } else { 1 << n };
    let mut cur = if k == 0 {
        Some(0u64)
    } else if k > n {
        None
    } else if k == 64 {
        Some(u64::MAX)
    } else {
        Some((1u64 << k) - 1)
    };
    core::iter::from_fn(move || {
        let out = cur?;
        cur = if out == 0 || k == 64 {
            None
        } else {
            // Gosper's hack.
            let c = out & out.wrapping_neg();
            let r = out.wrapping_add(c);
            if r == 0 {
                None
            } else {
                let next = (((r ^ out) >> 2) / c) | r;
                (n == 64 || next < limit).then_some(next)
            }
        };
        Some(out)
    })
}

fn generated(space: &ProductSpace, generators: &[Outcome], upward: bool) -> Result<FixedBitSet> {
    let count = space.enumerable_count()?;
    let gens = generators.iter().map(|g| space.index_of(g)).collect::<Result<Vec<_>>>()?;
    let mut members = FixedBitSet::with_capacity(count);
    for i in 0..count {
        let hit = gens
            .iter()
            .any(|&g| if upward { space.leq_index(g, i) } else { space.leq_index(i, g) });
        if hit {
            members.insert(i);
        }
    }
    Ok(members)
}

/// Increasing flag, decreasing flag, affecting mask. Monotonicity only needs
/// single-coordinate steps since the product order is generated by them.
fn structure(space: &ProductSpace, members: &FixedBitSet) -> (bool, bool, u64) {
    let mut increasing = true;
    let mut decreasing = true;
    let mut affecting = 0u64;
    for idx in 0..members.len() {
        let inside = members.contains(idx);
        for i in 0..space.dim() {
            let f = space.factor(i);
            let v = space.coord(idx, i);
            for b in 0..f.len() {
                if b == v {
                    continue;
                }
                let other = members.contains(space.with_coord(idx, i, b));
                if other != inside {
                    affecting |= 1 << i;
                    if f.lt(v, b) {
                        // Moving up leaves the event, or enters it.
                        if inside {
                            increasing = false;
                        } else {
                            decreasing = false;
                        }
                    }
                }
            }
        }
    }
    (increasing, decreasing, affecting)
}

pub(crate) fn measure_of(space: &ProductSpace, members: &FixedBitSet) -> Rational {
    let mut total = Rational::zero();
    for i in members.ones() {
        total += space.weight_of_index(i);
    }
    total
}

/// Number of coordinates that affect at least two of the events.
pub fn psi(events: &[Event]) -> Result<usize> {
    let Some(space) = common_space(events)? else {
        return Ok(0);
    };
    Ok((0..space.dim())
        .filter(|&i| events.iter().filter(|e| e.affects(i)).count() >= 2)
        .count())
}

/// Mutual independence: `μ(∩_{j∈J} A_j) = ∏_{j∈J} μ(A_j)` for every
/// subfamily `J`, checked exactly.
pub fn are_independent(events: &[Event]) -> Result<bool> {
    let k = events.len();
    if k > SUBFAMILY_CAP {
        return Err(Error::TooManyEvents { count: k, cap: SUBFAMILY_CAP });
    }
    let Some(space) = common_space(events)? else {
        return Ok(true);
    };
    let probs: Vec<Rational> = events.iter().map(Event::probability).collect();
    for size in 2..=k {
        for mask in combinations(k, size) {
            let mut inter = FixedBitSet::with_capacity(events[0].members.len());
            inter.insert_range(..);
            let mut product = crate::rational::one();
            for j in (0..k).filter(|j| mask >> j & 1 == 1) {
                inter.intersect_with(&events[j].members);
                product *= &probs[j];
            }
            if measure_of(space, &inter) != product {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Every up-set of the space's product order, as membership bitsets.
/// Fails once more than `limit` up-sets have been produced.
pub fn all_up_sets(space: &ProductSpace, limit: usize) -> Result<Vec<FixedBitSet>> {
    let count = space.enumerable_count()?;
    // Larger down-sets first is a reverse linear extension.
    let below: Vec<usize> = (0..count)
        .map(|a| (0..count).filter(|&b| space.leq_index(b, a)).count())
        .collect();
    let mut order: Vec<usize> = (0..count).collect();
    order.sort_by(|&a, &b| below[b].cmp(&below[a]).then(a.cmp(&b)));
    let above: Vec<Vec<usize>> = (0..count)
        .map(|a| (0..count).filter(|&b| b != a && space.leq_index(a, b)).collect())
        .collect();

    let mut out = Vec::new();
    let mut current = FixedBitSet::with_capacity(count);
    fn walk(
        pos: usize,
        order: &[usize],
        above: &[Vec<usize>],
        current: &mut FixedBitSet,
        out: &mut Vec<FixedBitSet>,
        limit: usize,
    ) -> Result<()> {
        if pos == order.len() {
            if out.len() >= limit {
                return Err(Error::InstanceTooLarge(alloc::format!("more than {limit} up-sets")));
            }
            out.push(current.clone());
            return Ok(());
        }
        let x = order[pos];
        walk(pos + 1, order, above, current, out, limit)?;
        if above[x].iter().all(|&y| current.contains(y)) {
            current.insert(x);
            walk(pos + 1, order, above, current, out, limit)?;
            current.set(x, false);
        }
        Ok(())
    }
    walk(0, &order, &above, &mut current, &mut out, limit)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use crate::space::Factor;

    fn cube(n: usize) -> Arc<ProductSpace> {
        Arc::new(ProductSpace::bernoulli(n, ratio(1, 2)).unwrap())
    }

    fn o(c: &[usize]) -> Outcome {
        Outcome(c.to_vec())
    }

    fn differ(space: &Arc<ProductSpace>) -> Event {
        Event::from_fn(space.clone(), |w| w.0[0] != w.0[1]).unwrap()
    }

    #[test]
    fn membership() {
        let s = cube(2);
        let full = Event::full(s.clone()).unwrap();
        let empty = Event::empty(s.clone()).unwrap();
        let cyl = Event::cylinder(s.clone(), 0, vec![1]).unwrap();
        for w in s.enumerate_outcomes().unwrap() {
            assert!(full.contains(&w).unwrap());
            assert!(!empty.contains(&w).unwrap());
        }
        assert!(cyl.contains(&o(&[1, 0])).unwrap());
        assert!(!cyl.contains(&o(&[0, 1])).unwrap());
        assert!(cyl.contains(&o(&[1, 0, 0])).is_err());
    }

    #[test]
    fn monotonicity() {
        let s = cube(2);
        let up = Event::up_set(s.clone(), vec![o(&[1, 0])]).unwrap();
        assert_eq!(up, Event::explicit(s.clone(), vec![o(&[1, 0]), o(&[1, 1])]).unwrap());
        assert!(up.is_increasing());
        let bottom = Event::explicit(s.clone(), vec![o(&[0, 0])]).unwrap();
        assert!(!bottom.is_increasing());
        assert!(bottom.is_decreasing());
        let anti = Event::explicit(s.clone(), vec![o(&[0, 1]), o(&[1, 0])]).unwrap();
        assert!(!anti.is_increasing());
        assert!(!anti.is_decreasing());
        let down = Event::down_set(s.clone(), vec![o(&[0, 1])]).unwrap();
        assert!(down.is_decreasing());
        assert!(down.complement().unwrap().is_increasing());
    }

    #[test]
    fn witness_examples() {
        let s = cube(2);
        let cyl = Event::cylinder(s.clone(), 0, vec![1]).unwrap();
        let w = o(&[1, 0]);
        assert!(cyl.is_witness(&w, WitnessSet::full(2)).unwrap());
        assert!(cyl.is_witness(&w, WitnessSet::from_coords([0])).unwrap());
        assert!(!cyl.is_witness(&w, WitnessSet::from_coords([1])).unwrap());
        assert!(!cyl.is_witness(&w, WitnessSet::EMPTY).unwrap());
        let full = Event::full(s.clone()).unwrap();
        assert!(full.is_witness(&w, WitnessSet::EMPTY).unwrap());
        // Not in the event: nothing witnesses it.
        assert!(!cyl.is_witness(&o(&[0, 0]), WitnessSet::full(2)).unwrap());
    }

    #[test]
    fn minimal_witness_examples() {
        let s = cube(2);
        let full = Event::full(s.clone()).unwrap();
        assert_eq!(full.minimal_witnesses(&o(&[0, 1])).unwrap().sets, vec![WitnessSet::EMPTY]);
        let cyl = Event::cylinder(s.clone(), 0, vec![1]).unwrap();
        assert_eq!(cyl.minimal_witnesses(&o(&[1, 1])).unwrap().sets, vec![WitnessSet::from_coords([0])]);
        let d = differ(&s);
        assert_eq!(d.minimal_witnesses(&o(&[0, 1])).unwrap().sets, vec![WitnessSet::from_coords([0, 1])]);
        assert!(d.minimal_witnesses(&o(&[0, 0])).unwrap().sets.is_empty());
    }

    #[test]
    fn minimal_witnesses_of_an_or() {
        // {ω1 = 1} ∪ {ω2 = 1} at (1,1): two incomparable minimal witnesses.
        let s = cube(2);
        let a = Event::cylinder(s.clone(), 0, vec![1]).unwrap();
        let b = Event::cylinder(s.clone(), 1, vec![1]).unwrap();
        let u = Event::union(&[a, b]).unwrap();
        assert_eq!(
            u.minimal_witnesses_index(3),
            vec![WitnessSet::from_coords([0]), WitnessSet::from_coords([1])]
        );
    }

    #[test]
    fn affects_examples() {
        let s = cube(2);
        for e in [Event::full(s.clone()).unwrap(), Event::empty(s.clone()).unwrap()] {
            assert!(!e.affects(0) && !e.affects(1));
        }
        let cyl = Event::cylinder(s.clone(), 0, vec![1]).unwrap();
        assert!(cyl.affects(0));
        assert!(!cyl.affects(1));
        let d = differ(&s);
        assert!(d.affects(0) && d.affects(1));
    }

    #[test]
    fn psi_examples() {
        let s = Arc::new(ProductSpace::bernoulli(1, ratio(1, 2)).unwrap());
        let a1 = Event::explicit(s.clone(), vec![o(&[0])]).unwrap();
        let a2 = Event::explicit(s.clone(), vec![o(&[1])]).unwrap();
        assert_eq!(psi(&[a1, a2]).unwrap(), 1);
        let s = cube(3);
        let cyls: Vec<_> = (0..3).map(|i| Event::cylinder(s.clone(), i, vec![1]).unwrap()).collect();
        assert_eq!(psi(&cyls).unwrap(), 0);
        let copies = vec![cyls[0].clone(); 4];
        assert_eq!(psi(&copies).unwrap(), 1);
        assert_eq!(psi(&[]).unwrap(), 0);
    }

    #[test]
    fn independence_examples() {
        let s = cube(3);
        let cyls: Vec<_> = (0..3).map(|i| Event::cylinder(s.clone(), i, vec![1]).unwrap()).collect();
        assert!(are_independent(&cyls).unwrap());
        let a = cyls[0].clone();
        assert!(!are_independent(&[a.clone(), a]).unwrap());

        // A_i = {ω_i ≠ ω_4}, i ≤ 3, on uniform {0,1}^4.
        let s = cube(4);
        let fam: Vec<_> =
            (0..3).map(|i| Event::from_fn(s.clone(), move |w| w.0[i] != w.0[3]).unwrap()).collect();
        assert!(are_independent(&fam).unwrap());
        // Pairwise independent but not mutually: XOR triple.
        let s = cube(2);
        let x = Event::cylinder(s.clone(), 0, vec![1]).unwrap();
        let y = Event::cylinder(s.clone(), 1, vec![1]).unwrap();
        let z = differ(&s);
        assert!(are_independent(&[x.clone(), z.clone()]).unwrap());
        assert!(!are_independent(&[x, y, z]).unwrap());
    }

    #[test]
    fn independence_cap() {
        let s = cube(1);
        let e = Event::full(s).unwrap();
        let many = vec![e; 21];
        assert_eq!(are_independent(&many), Err(Error::TooManyEvents { count: 21, cap: 20 }));
    }

    #[test]
    fn probabilities() {
        let s = cube(2);
        assert_eq!(Event::full(s.clone()).unwrap().probability(), ratio(1, 1));
        assert_eq!(differ(&s).probability(), ratio(1, 2));
        let s = Arc::new(
            ProductSpace::new(vec![Factor::bernoulli(ratio(1, 3)).unwrap(), Factor::bernoulli(ratio(1, 2)).unwrap()])
                .unwrap(),
        );
        assert_eq!(Event::cylinder(s, 0, vec![1]).unwrap().probability(), ratio(1, 3));
    }

    #[test]
    fn space_mismatch() {
        let a = Event::full(cube(2)).unwrap();
        let b = Event::full(cube(3)).unwrap();
        assert_eq!(psi(&[a.clone(), b.clone()]), Err(Error::SpaceMismatch));
        assert!(Event::intersection(&[a, b]).is_err());
        // Structurally equal spaces are the same space.
        let c = Event::full(cube(2)).unwrap();
        let d = Event::full(cube(2)).unwrap();
        assert_eq!(psi(&[c, d]).unwrap(), 0);
    }

    #[test]
    fn up_set_counts() {
        // Dedekind numbers for {0,1}^n.
        assert_eq!(all_up_sets(&cube(1), 100).unwrap().len(), 3);
        assert_eq!(all_up_sets(&cube(2), 100).unwrap().len(), 6);
        assert_eq!(all_up_sets(&cube(3), 100).unwrap().len(), 20);
        assert_eq!(all_up_sets(&cube(4), 1000).unwrap().len(), 168);
        assert!(all_up_sets(&cube(3), 10).is_err());
        for m in all_up_sets(&cube(3), 100).unwrap() {
            assert!(Event::from_members(cube(3), m).unwrap().is_increasing());
        }
    }

    #[test]
    fn combinations_enumerate_exactly() {
        assert_eq!(combinations(4, 2).collect::<Vec<_>>(), vec![0b0011, 0b0101, 0b0110, 0b1001, 0b1010, 0b1100]);
        assert_eq!(combinations(3, 0).collect::<Vec<_>>(), vec![0]);
        assert_eq!(combinations(3, 3).collect::<Vec<_>>(), vec![0b111]);
        assert_eq!(combinations(2, 3).count(), 0);
        assert_eq!(combinations(10, 4).count(), 210);
    }

    #[test]
    fn display_is_one_based() {
        assert_eq!(WitnessSet::from_coords([0, 2]).to_string(), "{1,3}");
        assert_eq!(WitnessSet::EMPTY.to_string(), "{}");
    }
}
