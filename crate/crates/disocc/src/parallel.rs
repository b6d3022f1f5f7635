//! Rayon drivers over the core's range-partial primitives. Partitions are
//! fixed-size, and partial results merge by exact addition, so every result
//! is identical to the sequential one regardless of the thread count.

use disocc_core::disjoint::{self, CountDistribution, ZSolver};
use disocc_core::events::Event;
use disocc_core::percolation::{self, Graph, MonteCarloReport, MonteCarloTally, TerminalPairs};
use disocc_core::rational::{self, Rational};
use disocc_core::{Error, Result};
use rayon::prelude::*;

/// Outcomes per work item for distribution sweeps.
const OUTCOME_CHUNK: usize = 1 << 10;
/// Samples per work item for Monte Carlo runs.
const SAMPLE_CHUNK: u64 = 1 << 12;

fn chunks(count: usize) -> Vec<std::ops::Range<usize>> {
    (0..count).step_by(OUTCOME_CHUNK).map(|s| s..(s + OUTCOME_CHUNK).min(count)).collect()
}

fn add_pmfs(mut a: Vec<Rational>, b: Vec<Rational>) -> Vec<Rational> {
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
    a
}

fn sweep<F>(events: &[Event], partial: F) -> Result<CountDistribution>
where
    F: Fn(std::ops::Range<usize>) -> Result<Vec<Rational>> + Send + Sync,
{
    let k = events.len();
    let Some(space) = disocc_core::events::common_space(events)? else {
        return Ok(CountDistribution::point_mass(0, 0));
    };
    let count = space.enumerable_count()?;
    let pmf = chunks(count)
        .into_par_iter()
        .map(partial)
        .try_reduce(|| vec![rational::zero(); k + 1], |a, b| Ok(add_pmfs(a, b)))?;
    CountDistribution::new(pmf)
}

/// The law of X, computed in parallel over outcome ranges.
pub fn x_distribution(events: &[Event]) -> Result<CountDistribution> {
    sweep(events, |range| disjoint::x_pmf_over(events, range))
}

/// The law of Z, computed in parallel over outcome ranges.
pub fn z_distribution(events: &[Event]) -> Result<CountDistribution> {
    if events.is_empty() {
        return Ok(CountDistribution::point_mass(0, 0));
    }
    let solver = ZSolver::new(events)?;
    sweep(events, |range| solver.pmf_over(range))
}

/// Monte Carlo run over sample indices `0..samples`, in parallel. Each sample
/// draws from its own `(seed, index)` substream, so the tally does not depend
/// on how samples are split between threads.
pub fn monte_carlo_tail(
    graph: &Graph,
    pairs: &TerminalPairs,
    p: &Rational,
    samples: u64,
    seed: u64,
) -> Result<MonteCarloReport> {
    if *p < rational::zero() || *p > rational::one() {
        return Err(Error::ProbabilityOutOfRange(rational::format_rational(p)));
    }
    let pf = rational::to_f64(p);
    let ranges: Vec<_> = (0..samples).step_by(SAMPLE_CHUNK as usize).map(|s| s..(s + SAMPLE_CHUNK).min(samples)).collect();
    let tally = ranges
        .into_par_iter()
        .map(|r| percolation::monte_carlo_tally(graph, pairs, pf, seed, r))
        .try_reduce(|| MonteCarloTally::empty(pairs.len()), |a, b| Ok(a.merge(&b)))?;
    let lambda = percolation::exact_lambda(graph, pairs, p)?;
    MonteCarloReport::from_tally(pf, seed, &tally, lambda)
}
