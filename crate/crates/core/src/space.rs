//! Finite partially ordered factors and their product spaces.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Signed, Zero};

use crate::rational::{self, Rational};
use crate::{Error, Result};

/// Default cap on the number of outcomes an enumeration may visit.
pub const DEFAULT_OUTCOME_CAP: usize = 1 << 24;

/// Largest factor for which positive association is checked by enumerating
/// every pair of up-sets.
pub const PA_ELEMENT_CAP: usize = 12;

/// Weight caches are only kept for spaces up to this many outcomes.
const WEIGHT_CACHE_CAP: usize = 1 << 16;

/// A finite partially ordered set carrying a probability weight per element.
///
/// The order supplied at construction is reflexively and transitively closed,
/// so callers may give covering pairs only. Axioms that closure cannot repair
/// (antisymmetry, normalization) are reported by [`Factor::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factor {
    labels: Vec<String>,
    leq: Vec<bool>,
    weights: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FactorIssue {
    Empty,
    WeightSum(Rational),
    NegativeWeight { label: String, weight: Rational },
    WeightAboveOne { label: String, weight: Rational },
    Antisymmetry { a: String, b: String },
}

impl fmt::Display for FactorIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FactorIssue::Empty => write!(f, "factor has no elements"),
            FactorIssue::WeightSum(s) => {
                write!(f, "weights sum to {} ≠ 1", rational::format_rational(s))
            }
            FactorIssue::NegativeWeight { label, weight } => write!(
                f,
                "weight of `{label}` is negative ({})",
                rational::format_rational(weight)
            ),
            FactorIssue::WeightAboveOne { label, weight } => write!(
                f,
                "weight of `{label}` exceeds 1 ({})",
                rational::format_rational(weight)
            ),
            FactorIssue::Antisymmetry { a, b } => {
                write!(f, "antisymmetry violated: `{a}` ≤ `{b}` and `{b}` ≤ `{a}`")
            }
        }
    }
}

/// Every axiom a factor violates. Empty for a valid factor.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub issues: Vec<FactorIssue>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.issues.is_empty() {
            return write!(f, "valid");
        }
        for (i, issue) in self.issues.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{issue}")?;
        }
        Ok(())
    }
}

impl Factor {
    /// Builds a factor from labels, order pairs `(a, b)` meaning `a ≤ b`
    /// (by element index), and one weight per element.
    ///
    /// Fails only on structural problems: duplicate labels, out-of-range
    /// order pairs, or a weight count that does not match.
    pub fn new(labels: Vec<String>, order: &[(usize, usize)], weights: Vec<Rational>) -> Result<Self> {
        let m = labels.len();
        if weights.len() != m {
            return Err(Error::InvalidFactor(format!(
                "{} weights for {} elements",
                weights.len(),
                m
            )));
        }
        let distinct: BTreeSet<&str> = labels.iter().map(String::as_str).collect();
        if distinct.len() != m {
            return Err(Error::InvalidFactor("duplicate element labels".into()));
        }
        let mut leq = vec![false; m * m];
        for i in 0..m {
            leq[i * m + i] = true;
        }
        for &(a, b) in order {
            if a >= m || b >= m {
                return Err(Error::InvalidFactor(format!("order pair ({a}, {b}) out of range")));
            }
            leq[a * m + b] = true;
        }
        // Warshall closure.
        for k in 0..m {
            for i in 0..m {
                if leq[i * m + k] {
                    for j in 0..m {
                        if leq[k * m + j] {
                            leq[i * m + j] = true;
                        }
                    }
                }
            }
        }
        Ok(Factor { labels, leq, weights })
    }

    /// Like [`Factor::new`] with the order given by label pairs.
    pub fn with_labels(labels: &[&str], order: &[(&str, &str)], weights: Vec<Rational>) -> Result<Self> {
        let owned: Vec<String> = labels.iter().map(|s| s.to_string()).collect();
        let find = |l: &str| {
            labels
                .iter()
                .position(|x| *x == l)
                .ok_or_else(|| Error::InvalidFactor(format!("unknown element `{l}` in order")))
        };
        let pairs = order
            .iter()
            .map(|(a, b)| Ok((find(a)?, find(b)?)))
            .collect::<Result<Vec<_>>>()?;
        Factor::new(owned, &pairs, weights)
    }

    /// A chain `0 < 1 < … < m-1` labelled by its indices.
    pub fn chain(weights: Vec<Rational>) -> Result<Self> {
        let m = weights.len();
        let labels = (0..m).map(|i| i.to_string()).collect();
        let order: Vec<_> = (1..m).map(|i| (i - 1, i)).collect();
        Factor::new(labels, &order, weights)
    }

    /// The two-element chain `0 < 1` with weight `p` on `1`.
    pub fn bernoulli(p: Rational) -> Result<Self> {
        Factor::chain(vec![Rational::one() - p.clone(), p])
    }

    /// Elements `0..m` with no strict comparabilities.
    pub fn antichain(weights: Vec<Rational>) -> Result<Self> {
        let labels = (0..weights.len()).map(|i| i.to_string()).collect();
        Factor::new(labels, &[], weights)
    }

    /// The four-element diamond `bot < a, b < top` with `a`, `b` incomparable.
    /// Weights are given in the order `bot, a, b, top`.
    pub fn diamond(weights: [Rational; 4]) -> Result<Self> {
        Factor::with_labels(
            &["bot", "a", "b", "top"],
            &[("bot", "a"), ("bot", "b"), ("a", "top"), ("b", "top")],
            weights.into(),
        )
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn weight(&self, i: usize) -> &Rational {
        &self.weights[i]
    }

    /// `a ≤ b` in the closed order.
    #[inline]
    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.leq[a * self.len() + b]
    }

    #[inline]
    pub fn lt(&self, a: usize, b: usize) -> bool {
        a != b && self.leq(a, b)
    }

    /// All strict pairs `a < b`.
    pub fn strict_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let m = self.len();
        (0..m).flat_map(move |a| (0..m).filter(move |&b| self.lt(a, b)).map(move |b| (a, b)))
    }

    /// The element below every other element, if one exists.
    pub fn least(&self) -> Option<usize> {
        (0..self.len()).find(|&a| (0..self.len()).all(|b| self.leq(a, b)))
    }

    /// The element above every other element, if one exists.
    pub fn greatest(&self) -> Option<usize> {
        (0..self.len()).find(|&a| (0..self.len()).all(|b| self.leq(b, a)))
    }

    pub fn validate(&self) -> ValidationReport {
        let mut issues = Vec::new();
        let m = self.len();
        if m == 0 {
            issues.push(FactorIssue::Empty);
        }
        for a in 0..m {
            for b in (a + 1)..m {
                if self.leq(a, b) && self.leq(b, a) {
                    issues.push(FactorIssue::Antisymmetry {
                        a: self.labels[a].clone(),
                        b: self.labels[b].clone(),
                    });
                }
            }
        }
        for (label, w) in self.labels.iter().zip(&self.weights) {
            if w.is_negative() {
                issues.push(FactorIssue::NegativeWeight { label: label.clone(), weight: w.clone() });
            } else if *w > Rational::one() {
                issues.push(FactorIssue::WeightAboveOne { label: label.clone(), weight: w.clone() });
            }
        }
        let sum: Rational = self.weights.iter().sum();
        if m > 0 && !sum.is_one() {
            issues.push(FactorIssue::WeightSum(sum));
        }
        ValidationReport { issues }
    }

    /// True iff every pair of elements is comparable.
    pub fn is_linear(&self) -> bool {
        let m = self.len();
        (0..m).all(|a| (0..m).all(|b| self.leq(a, b) || self.leq(b, a)))
    }

    /// Every up-set of the factor as an element bitmask.
    pub fn up_sets(&self) -> Result<Vec<u32>> {
        let m = self.len();
        if m > PA_ELEMENT_CAP {
            return Err(Error::FactorTooLarge { size: m, cap: PA_ELEMENT_CAP });
        }
        // above[a] = elements strictly above a.
        let above: Vec<u32> = (0..m)
            .map(|a| (0..m).filter(|&b| self.lt(a, b)).fold(0u32, |acc, b| acc | (1 << b)))
            .collect();
        Ok((0u32..(1 << m))
            .filter(|&set| (0..m).all(|a| set & (1 << a) == 0 || above[a] & !set == 0))
            .collect())
    }

    fn mask_weight(&self, mask: u32) -> Rational {
        (0..self.len())
            .filter(|&a| mask & (1 << a) != 0)
            .map(|a| self.weights[a].clone())
            .sum()
    }

    /// Exhaustive positive-association check: `m(A∩B) ≥ m(A)m(B)` for every
    /// pair of up-sets `A`, `B`.
    pub fn is_positively_associated(&self) -> Result<bool> {
        let ups = self.up_sets()?;
        let weights: Vec<Rational> = ups.iter().map(|&u| self.mask_weight(u)).collect();
        for (i, &a) in ups.iter().enumerate() {
            for (j, &b) in ups.iter().enumerate().skip(i + 1) {
                if self.mask_weight(a & b) < &weights[i] * &weights[j] {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// Free-function form of [`Factor::validate`].
pub fn validate_factor(f: &Factor) -> ValidationReport {
    f.validate()
}

/// A point of a product space: one element index per factor.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Outcome(pub Vec<usize>);

impl Outcome {
    pub fn new(coords: Vec<usize>) -> Self {
        Outcome(coords)
    }

    pub fn coords(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `ω_S`: the `(coordinate, element)` pairs on the coordinates in `mask`.
    pub fn restrict(&self, mask: u64) -> Vec<(usize, usize)> {
        self.0
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(i, &v)| (i, v))
            .collect()
    }
}

impl From<Vec<usize>> for Outcome {
    fn from(v: Vec<usize>) -> Self {
        Outcome(v)
    }
}

/// A finite product of partially ordered probability spaces.
#[derive(Debug, Clone)]
pub struct ProductSpace {
    factors: Vec<Factor>,
    strides: Vec<usize>,
    count: u128,
    cap: usize,
    weight_cache: Option<Vec<Rational>>,
    least: Option<Vec<usize>>,
    greatest: Option<Vec<usize>>,
}

impl PartialEq for ProductSpace {
    fn eq(&self, other: &Self) -> bool {
        self.factors == other.factors
    }
}

impl Eq for ProductSpace {}

impl ProductSpace {
    /// Builds the product of `factors`, each of which must validate.
    pub fn new(factors: Vec<Factor>) -> Result<Self> {
        Self::with_outcome_cap(factors, DEFAULT_OUTCOME_CAP)
    }

    pub fn with_outcome_cap(factors: Vec<Factor>, cap: usize) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidFactor("a product space needs at least one factor".into()));
        }
        if factors.len() > 64 {
            return Err(Error::TooManyCoordinates(factors.len()));
        }
        for (i, f) in factors.iter().enumerate() {
            let report = f.validate();
            if !report.is_valid() {
                return Err(Error::InvalidFactor(format!("factor {}: {report}", i + 1)));
            }
        }
        let count = factors
            .iter()
            .try_fold(1u128, |acc, f| acc.checked_mul(f.len() as u128))
            .unwrap_or(u128::MAX);
        let mut strides = vec![0usize; factors.len()];
        if count <= cap as u128 {
            let mut s = 1usize;
            for i in (0..factors.len()).rev() {
                strides[i] = s;
                s *= factors[i].len();
            }
        }
        let least = factors.iter().map(Factor::least).collect();
        let greatest = factors.iter().map(Factor::greatest).collect();
        let mut space = ProductSpace { factors, strides, count, cap, weight_cache: None, least, greatest };
        if count <= WEIGHT_CACHE_CAP.min(cap) as u128 {
            let weights = (0..count as usize).map(|i| space.compute_weight(i)).collect();
            space.weight_cache = Some(weights);
        }
        Ok(space)
    }

    /// `{0,1}^n` with weight `p` on `1` in every coordinate.
    pub fn bernoulli(n: usize, p: Rational) -> Result<Self> {
        let f = Factor::bernoulli(p)?;
        ProductSpace::new(vec![f; n])
    }

    pub fn dim(&self) -> usize {
        self.factors.len()
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn factor(&self, i: usize) -> &Factor {
        &self.factors[i]
    }

    /// Total number of outcomes (saturating).
    pub fn outcome_count(&self) -> u128 {
        self.count
    }

    pub fn outcome_cap(&self) -> usize {
        self.cap
    }

    /// Outcome count, or an error when it exceeds the enumeration cap.
    pub fn enumerable_count(&self) -> Result<usize> {
        if self.count > self.cap as u128 {
            Err(Error::SpaceTooLarge { count: self.count, cap: self.cap })
        } else {
            Ok(self.count as usize)
        }
    }

    /// Per-coordinate least elements, when every factor has one.
    pub fn least_elements(&self) -> Option<&[usize]> {
        self.least.as_deref()
    }

    /// Per-coordinate greatest elements, when every factor has one.
    pub fn greatest_elements(&self) -> Option<&[usize]> {
        self.greatest.as_deref()
    }

    pub fn all_linear(&self) -> bool {
        self.factors.iter().all(Factor::is_linear)
    }

    pub fn check_outcome(&self, w: &Outcome) -> Result<()> {
        if w.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: w.len() });
        }
        for (i, (&v, f)) in w.0.iter().zip(&self.factors).enumerate() {
            if v >= f.len() {
                return Err(Error::OutOfRange { coord: i, index: v });
            }
        }
        Ok(())
    }

    /// Position of `w` in lexicographic enumeration order.
    pub fn index_of(&self, w: &Outcome) -> Result<usize> {
        self.check_outcome(w)?;
        self.enumerable_count()?;
        Ok(w.0.iter().zip(&self.strides).map(|(v, s)| v * s).sum())
    }

    /// Inverse of [`ProductSpace::index_of`]. Requires an enumerable space.
    pub fn outcome(&self, index: usize) -> Outcome {
        Outcome((0..self.dim()).map(|i| self.coord(index, i)).collect())
    }

    #[inline]
    pub fn coord(&self, index: usize, i: usize) -> usize {
        (index / self.strides[i]) % self.factors[i].len()
    }

    /// Index of the outcome equal to `index` except coordinate `i` set to `v`.
    #[inline]
    pub fn with_coord(&self, index: usize, i: usize, v: usize) -> usize {
        let cur = self.coord(index, i);
        index - cur * self.strides[i] + v * self.strides[i]
    }

    pub fn strides(&self) -> &[usize] {
        &self.strides
    }

    /// Coordinatewise order.
    pub fn leq(&self, a: &Outcome, b: &Outcome) -> Result<bool> {
        self.check_outcome(a)?;
        self.check_outcome(b)?;
        Ok(a.0.iter().zip(&b.0).zip(&self.factors).all(|((&x, &y), f)| f.leq(x, y)))
    }

    pub fn leq_index(&self, a: usize, b: usize) -> bool {
        (0..self.dim()).all(|i| self.factors[i].leq(self.coord(a, i), self.coord(b, i)))
    }

    fn compute_weight(&self, index: usize) -> Rational {
        let mut w = Rational::one();
        for (i, f) in self.factors.iter().enumerate() {
            let x = f.weight(self.coord(index, i));
            if x.is_zero() {
                return Rational::zero();
            }
            w *= x;
        }
        w
    }

    /// Product weight of the outcome at `index`.
    pub fn weight_of_index(&self, index: usize) -> Rational {
        match &self.weight_cache {
            Some(c) => c[index].clone(),
            None => self.compute_weight(index),
        }
    }

    pub fn outcome_weight(&self, w: &Outcome) -> Result<Rational> {
        self.check_outcome(w)?;
        Ok(w.0.iter().zip(&self.factors).map(|(&v, f)| f.weight(v).clone()).product())
    }

    /// Product measure of a set of outcomes. Duplicates count once.
    pub fn measure<'a, I>(&self, outcomes: I) -> Result<Rational>
    where
        I: IntoIterator<Item = &'a Outcome>,
    {
        let mut seen = BTreeSet::new();
        let mut total = Rational::zero();
        for w in outcomes {
            self.check_outcome(w)?;
            if seen.insert(w.clone()) {
                total += self.outcome_weight(w)?;
            }
        }
        Ok(total)
    }

    /// All outcomes in lexicographic coordinate order.
    pub fn enumerate_outcomes(&self) -> Result<Outcomes<'_>> {
        self.enumerable_count()?;
        Ok(Outcomes { space: self, next: Some(vec![0; self.dim()]) })
    }
}

/// Iterator returned by [`ProductSpace::enumerate_outcomes`].
pub struct Outcomes<'a> {
    space: &'a ProductSpace,
    next: Option<Vec<usize>>,
}

impl Iterator for Outcomes<'_> {
    type Item = Outcome;

    fn next(&mut self) -> Option<Outcome> {
        let cur = self.next.take()?;
        let mut succ = cur.clone();
        let mut i = succ.len();
        let mut done = true;
        while i > 0 {
            i -= 1;
            succ[i] += 1;
            if succ[i] < self.space.factors[i].len() {
                done = false;
                break;
            }
            succ[i] = 0;
        }
        if !done {
            self.next = Some(succ);
        }
        Some(Outcome(cur))
    }
}
