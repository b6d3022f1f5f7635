//! Upper-tail bounds for counts of disjointly occurring events.
//!
//! All bound formulas are evaluated in `f64`; exact tails stay rational. The
//! factorial-moment verifier ([`markov_chain_verify`]) works entirely in exact
//! arithmetic.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::disjoint::{self, CountDistribution};
use crate::events::{combinations, common_space, Event, SUBFAMILY_CAP};
use crate::rational::{self, Rational};
use crate::{Error, Result};

/// Slack granted to a float bound when comparing it with an exact tail.
pub const FLOAT_SLACK: f64 = 1e-12;

fn check_nonnegative(name: &str, x: f64) -> Result<()> {
    if x.is_nan() || x < 0.0 {
        Err(Error::Domain(format!("{name} must be nonnegative, got {x}")))
    } else {
        Ok(())
    }
}

/// `φ(x) = (1+x)·log(1+x) − x` for `x > −1`, with `φ(−1) = 1`.
pub fn phi(x: f64) -> Result<f64> {
    if x.is_nan() || x < -1.0 {
        return Err(Error::Domain(format!("phi is defined for x ≥ -1, got {x}")));
    }
    if x == -1.0 {
        return Ok(1.0);
    }
    Ok((1.0 + x) * libm::log1p(x) - x)
}

/// `exp[−λ·φ(t/λ)]`; 1 at `t = 0` and 0 for `λ = 0 < t`.
pub fn bk_chernoff(lambda: f64, t: f64) -> Result<f64> {
    check_nonnegative("lambda", lambda)?;
    check_nonnegative("t", t)?;
    if t == 0.0 {
        return Ok(1.0);
    }
    if lambda == 0.0 {
        return Ok(0.0);
    }
    Ok(libm::exp(-lambda * phi(t / lambda)?))
}

/// The same formula as [`bk_chernoff`], named for the bound on Z (mutually
/// independent jointly occurring events).
pub fn janson_bound(lambda: f64, t: f64) -> Result<f64> {
    bk_chernoff(lambda, t)
}

/// `exp[−t² / (2(λ + t/3))]`, the Bernstein-type relaxation.
pub fn bernstein(lambda: f64, t: f64) -> Result<f64> {
    check_nonnegative("lambda", lambda)?;
    check_nonnegative("t", t)?;
    if t == 0.0 {
        return Ok(1.0);
    }
    Ok(libm::exp(-t * t / (2.0 * (lambda + t / 3.0))))
}

/// `(x)_r = x(x−1)⋯(x−r+1)`.
pub fn falling_factorial(x: f64, r: u32) -> f64 {
    (0..r).map(|i| x - f64::from(i)).product()
}

/// Exact falling factorial.
pub fn falling_factorial_exact(x: &Rational, r: usize) -> Rational {
    (0..r).map(|i| x - rational::from_usize(i)).product()
}

/// `λ^r / (λ+t)_r`: the Markov bound on `Pr(X ≥ λ+t)` from the `r`-th
/// factorial moment. Requires `1 ≤ r ≤ t`.
pub fn factorial_moment_bound(lambda: f64, t: u32, r: u32) -> Result<f64> {
    if lambda.is_nan() || lambda <= 0.0 {
        return Err(Error::Domain(format!("lambda must be positive, got {lambda}")));
    }
    if r == 0 || r > t {
        return Err(Error::Domain(format!("need 1 ≤ r ≤ t, got r = {r}, t = {t}")));
    }
    let top = lambda + f64::from(t);
    Ok((0..r).map(|i| lambda / (top - f64::from(i))).product())
}

/// `λ^t / (λ+t)_t`, the factorial-moment bound at `r = t`.
pub fn product_bound(lambda: f64, t: u32) -> Result<f64> {
    if t == 0 {
        return Err(Error::Domain("product bound needs t ≥ 1".into()));
    }
    factorial_moment_bound(lambda, t, t)
}

/// Every bound applicable at `(λ, t)`, optionally beside an exact tail.
#[derive(Debug, Clone, PartialEq)]
pub struct TailBoundReport {
    pub lambda: f64,
    pub t: f64,
    pub chernoff: f64,
    pub bernstein: f64,
    /// Factorial-moment bound, present when `λ > 0` and `t` is a positive
    /// integer.
    pub product: Option<f64>,
    /// The moment order used for `product`.
    pub product_order: Option<u32>,
    /// Set when `t` exceeds the number of events, so `r = t` was unavailable
    /// and `product` is the minimum over `r ∈ [1, k]`.
    pub order_capped: bool,
    pub exact_tail: Option<Rational>,
}

impl TailBoundReport {
    /// `product ≤ chernoff ≤ bernstein` and the exact tail, if any, is below
    /// the Chernoff bound up to [`FLOAT_SLACK`]. A capped-order `product` is
    /// still a valid tail bound but need not sit below the Chernoff bound, so
    /// it is left out of the chain.
    pub fn is_consistent(&self) -> bool {
        let product_ok = self.order_capped || self.product.map_or(true, |p| p <= self.chernoff + FLOAT_SLACK);
        let chain = product_ok && self.chernoff <= self.bernstein + FLOAT_SLACK;
        let exact = self
            .exact_tail
            .as_ref()
            .map_or(true, |e| rational::to_f64(e) <= self.chernoff + FLOAT_SLACK);
        chain && exact
    }
}

/// Assembles all bounds at `(λ, t)`. With `events = Some(k)` and an integer
/// `t > k`, the moment order is capped at `k` and minimized over `[1, k]`.
pub fn tail_report(lambda: f64, t: f64, exact_tail: Option<Rational>, events: Option<usize>) -> Result<TailBoundReport> {
    let chernoff = bk_chernoff(lambda, t)?;
    let bernstein = bernstein(lambda, t)?;
    let mut product = None;
    let mut product_order = None;
    let mut order_capped = false;
    if lambda > 0.0 && t >= 1.0 && libm::trunc(t) == t && t <= f64::from(u32::MAX) {
        let ti = t as u32;
        match events {
            Some(k) if (k as u64) < u64::from(ti) => {
                order_capped = true;
                if k > 0 {
                    let kmax = k as u32;
                    let (r, b) = (1..=kmax)
                        .map(|r| (r, factorial_moment_bound(lambda, ti, r).unwrap_or(f64::INFINITY)))
                        .fold((1, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
                    product = Some(b);
                    product_order = Some(r);
                }
            }
            _ => {
                product = Some(product_bound(lambda, ti)?);
                product_order = Some(ti);
            }
        }
    }
    Ok(TailBoundReport { lambda, t, chernoff, bernstein, product, product_order, order_capped, exact_tail })
}

/// Exact quantities of the factorial-moment argument for one order `r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkovReport {
    pub r: usize,
    /// `λ = Σ μ(A_i)`.
    pub lambda: Rational,
    /// `E χ = r! Σ_{|I|=r} μ(□_{i∈I} A_i)`.
    pub expected_chi: Rational,
    pub lambda_pow_r: Rational,
    /// `Pr(X ≥ λ + r)`.
    pub tail: Rational,
    /// `λ^r / (λ+r)_r`.
    pub tail_bound: Rational,
}

impl MarkovReport {
    pub fn moment_holds(&self) -> bool {
        self.expected_chi <= self.lambda_pow_r
    }

    pub fn tail_holds(&self) -> bool {
        self.tail <= self.tail_bound
    }
}

/// Computes the factorial-moment chain exactly for orders `1..=k` on a space
/// of linearly ordered factors.
pub fn markov_chain_verify_all(events: &[Event]) -> Result<Vec<MarkovReport>> {
    let k = events.len();
    let setup = markov_setup(events)?;
    (1..=k).map(|r| setup.report(r)).collect()
}

/// [`markov_chain_verify_all`] for a single order `1 ≤ r ≤ k`.
pub fn markov_chain_verify(events: &[Event], r: usize) -> Result<MarkovReport> {
    if r == 0 || r > events.len() {
        return Err(Error::Domain(format!("order r = {r} must lie in [1, {}]", events.len())));
    }
    markov_setup(events)?.report(r)
}

struct MarkovSetup {
    k: usize,
    lambda: Rational,
    /// `Σ_{|I|=r} μ(□_I)` indexed by `r`.
    box_sums: Vec<Rational>,
    x: CountDistribution,
}

fn markov_setup(events: &[Event]) -> Result<MarkovSetup> {
    let k = events.len();
    if k > SUBFAMILY_CAP {
        return Err(Error::TooManyEvents { count: k, cap: SUBFAMILY_CAP });
    }
    let space = common_space(events)?.ok_or_else(|| Error::Domain("no events".into()))?;
    if let Some(i) = (0..space.dim()).find(|&i| !space.factor(i).is_linear()) {
        return Err(Error::NonLinearFactor(i));
    }
    let count = space.enumerable_count()?;
    let lambda: Rational = events.iter().map(Event::probability).sum();
    let mut box_sums = vec![Rational::zero(); k + 1];
    let mut x_pmf = vec![Rational::zero(); k + 1];
    for idx in 0..count {
        let weight = space.weight_of_index(idx);
        if weight.is_zero() {
            continue;
        }
        let occurs = disjoint::disjoint_subfamilies_at(events, idx);
        let mut best = 0;
        for r in 0..=k {
            let hits = combinations(k, r).filter(|&m| occurs[m as usize]).count();
            if hits > 0 {
                best = r;
            }
            box_sums[r] += &weight * rational::from_usize(hits);
        }
        x_pmf[best] += weight;
    }
    Ok(MarkovSetup { k, lambda, box_sums, x: CountDistribution::new(x_pmf)? })
}

impl MarkovSetup {
    fn report(&self, r: usize) -> Result<MarkovReport> {
        debug_assert!(r >= 1 && r <= self.k);
        let factorial: Rational = (1..=r).map(rational::from_usize).product();
        let expected_chi = factorial * &self.box_sums[r];
        let lambda_pow_r = rational::pow(&self.lambda, r);
        let top = &self.lambda + rational::from_usize(r);
        let tail = self.x.tail_at_least(&top);
        let tail_bound = if self.lambda.is_zero() {
            Rational::zero()
        } else {
            &lambda_pow_r / falling_factorial_exact(&top, r)
        };
        Ok(MarkovReport { r, lambda: self.lambda.clone(), expected_chi, lambda_pow_r, tail, tail_bound })
    }
}

/// Checks an exact count law against [`bk_chernoff`] at every integer
/// `t ≥ 1` with `λ + t ≤ k`, returning the first violating `t`.
pub fn chernoff_violation(dist: &CountDistribution, lambda: &Rational) -> Option<u32> {
    let lf = rational::to_f64(lambda);
    let k = dist.max_value();
    (1..=k as u32 + 1).find(|&t| {
        let threshold = lambda + rational::from_usize(t as usize);
        let tail = rational::to_f64(&dist.tail_at_least(&threshold));
        let bound = bk_chernoff(lf, f64::from(t)).unwrap_or(1.0);
        tail > bound + FLOAT_SLACK
    })
}

/// `λ` as an exact rational.
pub fn lambda_of(events: &[Event]) -> Rational {
    events.iter().map(Event::probability).fold(Rational::zero(), |a, p| a + p)
}
