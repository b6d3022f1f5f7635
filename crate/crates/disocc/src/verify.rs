//! Verification corpora: exhaustive small-instance sweeps plus seeded random
//! corpora, each reported as a pass/fail suite with the smallest failing
//! instance serialized as a spec file.

use std::sync::Arc;

use disocc_core::bounds::{self, FLOAT_SLACK};
use disocc_core::disjoint::{self, CountDistribution};
use disocc_core::events::{self, Event};
use disocc_core::rational::{self, format_rational, ratio, Rational};
use disocc_core::space::{Factor, Outcome, ProductSpace};
use disocc_core::Result;
use fixedbitset::FixedBitSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::spec_file::InstanceSpec;

/// Largest outcome count of a space in the exhaustive corpora.
pub const EXHAUSTIVE_OUTCOME_CAP: usize = 9;
/// Largest outcome count for which every pair of arbitrary events is tried.
pub const ALL_EVENTS_OUTCOME_CAP: usize = 4;
const UP_SET_LIMIT: usize = 100_000;

/// Budgets for [`verify_all`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyConfig {
    /// Largest number of coordinates `n`.
    pub max_coords: usize,
    /// Largest factor size (chains of size 2 up to this are used).
    pub max_factor_size: usize,
    /// Largest family size `k` in the exhaustive corpora.
    pub max_family: usize,
    /// Largest family size `k` in the seeded random corpora.
    pub random_max_family: usize,
    /// Instances in each seeded random corpus.
    pub random_instances: usize,
    pub seed: u64,
    /// Mutation switch: admit factors that fail the positive-association
    /// check into the partial-order corpus. A correct engine must then
    /// report a violation.
    pub skip_pa_check: bool,
}

impl VerifyConfig {
    pub fn new(seed: u64) -> Self {
        VerifyConfig {
            max_coords: 3,
            max_factor_size: 3,
            max_family: 3,
            random_max_family: 4,
            random_instances: 10_000,
            seed,
            skip_pa_check: false,
        }
    }
}

/// A failing instance: what failed, and the instance as a spec file when it
/// has a space and events.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub description: String,
    pub instance: Option<InstanceSpec>,
}

impl Counterexample {
    fn new(description: String, space: &ProductSpace, events: &[Event]) -> Self {
        Counterexample { description, instance: Some(InstanceSpec::from_events(space, events)) }
    }

    fn bare(description: String) -> Self {
        Counterexample { description, instance: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteResult {
    pub name: String,
    pub instances: u64,
    pub violations: u64,
    /// The first failing instance in corpus order; corpora are ordered by
    /// size, so this is a smallest one.
    pub counterexample: Option<Counterexample>,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    /// One summary line, e.g. `PASS theorem1-increasing: 68470 instances, 0 violations`.
    pub fn summary(&self) -> String {
        format!(
            "{} {}: {} instances, {} violations",
            if self.passed() { "PASS" } else { "FAIL" },
            self.name,
            self.instances,
            self.violations
        )
    }
}

/// Per-suite accumulator; merging keeps the failure with the smallest id.
#[derive(Debug, Default)]
struct Tally {
    instances: u64,
    violations: u64,
    first: Option<(u64, Counterexample)>,
}

impl Tally {
    fn one(id: u64, violation: Option<Counterexample>) -> Self {
        Tally {
            instances: 1,
            violations: u64::from(violation.is_some()),
            first: violation.map(|c| (id, c)),
        }
    }

    fn skip() -> Self {
        Tally::default()
    }

    fn merge(mut self, other: Tally) -> Self {
        self.instances += other.instances;
        self.violations += other.violations;
        self.first = match (self.first, other.first) {
            (Some(a), Some(b)) => Some(if a.0 <= b.0 { a } else { b }),
            (a, b) => a.or(b),
        };
        self
    }

    fn finish(self, name: &str) -> SuiteResult {
        SuiteResult {
            name: name.to_string(),
            instances: self.instances,
            violations: self.violations,
            counterexample: self.first.map(|(_, c)| c),
        }
    }
}

fn merge_all<const N: usize>(a: [Tally; N], b: [Tally; N]) -> [Tally; N] {
    let mut out = a.map(Some);
    for (slot, t) in out.iter_mut().zip(b) {
        *slot = Some(slot.take().expect("filled").merge(t));
    }
    out.map(|t| t.expect("filled"))
}

fn empty_tallies<const N: usize>() -> [Tally; N] {
    std::array::from_fn(|_| Tally::default())
}

/// Errors inside a corpus instance count as violations of that instance.
fn failed(e: disocc_core::Error, space: &ProductSpace, events: &[Event]) -> Option<Counterexample> {
    Some(Counterexample::new(format!("error: {e}"), space, events))
}

// ---------------------------------------------------------------------------
// Spaces and event families
// ---------------------------------------------------------------------------

/// Weightings used for chains in the exhaustive corpora: uniform and one
/// skewed weighting per size.
pub fn chain_weightings(size: usize) -> Vec<Vec<Rational>> {
    match size {
        2 => vec![vec![ratio(1, 2), ratio(1, 2)], vec![ratio(1, 3), ratio(2, 3)]],
        3 => vec![vec![ratio(1, 3), ratio(1, 3), ratio(1, 3)], vec![ratio(1, 6), ratio(1, 3), ratio(1, 2)]],
        m => vec![vec![ratio(1, m as i64); m]],
    }
}

/// Every product of `1..=max_coords` factors drawn from `factors`, in order
/// of dimension and then factor choice, keeping spaces with at most `cap`
/// outcomes.
pub fn product_spaces(factors: &[Factor], max_coords: usize, cap: usize) -> Vec<Arc<ProductSpace>> {
    let mut out = Vec::new();
    if factors.is_empty() {
        return out;
    }
    for n in 1..=max_coords {
        let total = factors.len().pow(n as u32);
        for code in 0..total {
            let mut c = code;
            let mut chosen = Vec::with_capacity(n);
            for _ in 0..n {
                chosen.push(factors[c % factors.len()].clone());
                c /= factors.len();
            }
            chosen.reverse();
            let count: usize = chosen.iter().map(Factor::len).product();
            if count <= cap {
                out.push(Arc::new(ProductSpace::new(chosen).expect("corpus factors are valid")));
            }
        }
    }
    out
}

/// Chains of sizes `2..=max_factor_size` with the weightings of
/// [`chain_weightings`].
pub fn chain_factors(max_factor_size: usize) -> Vec<Factor> {
    (2..=max_factor_size)
        .flat_map(|m| chain_weightings(m).into_iter().map(|w| Factor::chain(w).expect("valid chain")))
        .collect()
}

/// The spaces of the exhaustive Theorem 1 corpus.
pub fn exhaustive_spaces(max_coords: usize, max_factor_size: usize) -> Vec<Arc<ProductSpace>> {
    product_spaces(&chain_factors(max_factor_size), max_coords, EXHAUSTIVE_OUTCOME_CAP)
}

/// All uniform and (1/3, 2/3)-weighted Bernoulli product spaces with
/// `1..=max_coords` coordinates.
pub fn bernoulli_spaces(max_coords: usize) -> Vec<Arc<ProductSpace>> {
    product_spaces(&chain_factors(2), max_coords, usize::MAX)
}

/// Increasing events of a space (every up-set) and the matching decreasing
/// events (their complements).
pub fn monotone_events(space: &Arc<ProductSpace>) -> Result<(Vec<Event>, Vec<Event>)> {
    let ups = events::all_up_sets(space, UP_SET_LIMIT)?;
    let inc = ups
        .into_iter()
        .map(|m| Event::from_members(space.clone(), m))
        .collect::<Result<Vec<_>>>()?;
    let dec = inc.iter().map(Event::complement).collect::<Result<Vec<_>>>()?;
    Ok((inc, dec))
}

/// Decodes `code` as a `k`-tuple over `0..m` (first entry most significant).
fn tuple(code: usize, k: usize, m: usize) -> Vec<usize> {
    let mut t = vec![0; k];
    let mut c = code;
    for slot in t.iter_mut().rev() {
        *slot = c % m;
        c /= m;
    }
    t
}

fn pick(events: &[Event], indices: &[usize]) -> Vec<Event> {
    indices.iter().map(|&i| events[i].clone()).collect()
}

/// Items `(space, k, code)` enumerating every ordered `k`-tuple for
/// `k = 1..=max_family`, by space and then by `k`.
fn tuple_items(sizes: &[usize], max_family: usize) -> Vec<(usize, usize, usize)> {
    let mut items = Vec::new();
    for (s, &m) in sizes.iter().enumerate() {
        for k in 1..=max_family {
            let total = m.checked_pow(k as u32).expect("tuple count fits");
            items.extend((0..total).map(|code| (s, k, code)));
        }
    }
    items
}

// ---------------------------------------------------------------------------
// Theorem 1: X ≼ Y for monotone families
// ---------------------------------------------------------------------------

fn domination_failure(x: &CountDistribution, y: &CountDistribution, what: &str) -> Option<String> {
    disjoint::domination_violation(x, y).map(|r| {
        format!(
            "{what} not dominated at r = {r}: Pr({what} ≥ {r}) = {} > {} = Pr(Y ≥ {r})",
            format_rational(&x.survival(r)),
            format_rational(&y.survival(r))
        )
    })
}

/// Checks `X ≼ Y` for one family.
pub fn check_domination(events: &[Event]) -> Result<Option<String>> {
    let x = disjoint::x_distribution(events)?;
    let y = disjoint::y_distribution(&disjoint::probabilities(events))?;
    Ok(domination_failure(&x, &y, "X"))
}

/// Checks that `ψ = 0` forces the laws of X and Y to agree. `None` when
/// `ψ > 0` (the instance is not in scope).
pub fn check_psi_zero(events: &[Event]) -> Result<Option<Option<String>>> {
    if events::psi(events)? != 0 {
        return Ok(None);
    }
    let x = disjoint::x_distribution(events)?;
    let y = disjoint::y_distribution(&disjoint::probabilities(events))?;
    Ok(Some((x != y).then(|| "ψ = 0 but the laws of X and Y differ".to_string())))
}

pub struct Theorem1Results {
    pub increasing: SuiteResult,
    pub decreasing: SuiteResult,
    pub psi_zero: SuiteResult,
}

/// Every ordered family of `1..=max_family` increasing events on each space
/// (and the same families complemented), checking `X ≼ Y`, plus the `ψ = 0`
/// exactness check on the increasing families.
pub fn theorem1_exhaustive(spaces: &[Arc<ProductSpace>], max_family: usize) -> Result<Theorem1Results> {
    let families: Vec<(Vec<Event>, Vec<Event>)> = spaces.iter().map(monotone_events).collect::<Result<_>>()?;
    let sizes: Vec<usize> = families.iter().map(|(inc, _)| inc.len()).collect();
    let items = tuple_items(&sizes, max_family);
    let [inc, dec, psi] = items
        .par_iter()
        .enumerate()
        .map(|(id, &(s, k, code))| {
            let id = id as u64;
            let space = &spaces[s];
            let (ups, downs) = &families[s];
            let idx = tuple(code, k, ups.len());
            let check = |fam: &[Event]| match check_domination(fam) {
                Ok(v) => v.map(|d| Counterexample::new(d, space, fam)),
                Err(e) => failed(e, space, fam),
            };
            let up_fam = pick(ups, &idx);
            let down_fam = pick(downs, &idx);
            let psi = match check_psi_zero(&up_fam) {
                Ok(None) => Tally::skip(),
                Ok(Some(v)) => Tally::one(id, v.map(|d| Counterexample::new(d, space, &up_fam))),
                Err(e) => Tally::one(id, failed(e, space, &up_fam)),
            };
            [Tally::one(id, check(&up_fam)), Tally::one(id, check(&down_fam)), psi]
        })
        .reduce(empty_tallies, merge_all);
    Ok(Theorem1Results {
        increasing: inc.finish("theorem1-increasing"),
        decreasing: dec.finish("theorem1-decreasing"),
        psi_zero: psi.finish("psi-zero-exactness"),
    })
}

/// The per-instance generator of the seeded corpora: instance `index` draws
/// from substream `index` of the seed, so corpora are reproducible and
/// independent of scheduling.
pub fn instance_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// A random chain with small integer weights (zero weights allowed).
fn random_chain(rng: &mut ChaCha8Rng, max_factor_size: usize) -> Factor {
    let m = rng.random_range(2..=max_factor_size.max(2));
    loop {
        let raw: Vec<i64> = (0..m).map(|_| rng.random_range(0..=4)).collect();
        let total: i64 = raw.iter().sum();
        if total > 0 {
            return Factor::chain(raw.iter().map(|&w| ratio(w, total)).collect()).expect("valid chain");
        }
    }
}

fn random_linear_space(rng: &mut ChaCha8Rng, max_coords: usize, max_factor_size: usize) -> Arc<ProductSpace> {
    let n = rng.random_range(1..=max_coords);
    let factors = (0..n).map(|_| random_chain(rng, max_factor_size)).collect();
    Arc::new(ProductSpace::new(factors).expect("valid random space"))
}

fn random_outcome(rng: &mut ChaCha8Rng, space: &ProductSpace) -> Outcome {
    Outcome::new(space.factors().iter().map(|f| rng.random_range(0..f.len())).collect())
}

/// A random event: each outcome is a member independently, with a density
/// drawn per event.
fn random_event(rng: &mut ChaCha8Rng, space: &Arc<ProductSpace>) -> Result<Event> {
    let density = [0.25, 0.5, 0.75][rng.random_range(0..3)];
    let count = space.enumerable_count()?;
    let mut members = FixedBitSet::with_capacity(count);
    for i in 0..count {
        members.set(i, rng.random_bool(density));
    }
    Event::from_members(space.clone(), members)
}

/// Random linearly ordered space with `1..=max_family` arbitrary events.
pub fn random_linear_instance(
    seed: u64,
    index: u64,
    max_coords: usize,
    max_factor_size: usize,
    max_family: usize,
) -> Result<(Arc<ProductSpace>, Vec<Event>)> {
    let mut rng = instance_rng(seed, index);
    let space = random_linear_space(&mut rng, max_coords, max_factor_size);
    let k = rng.random_range(1..=max_family);
    let events = (0..k).map(|_| random_event(&mut rng, &space)).collect::<Result<Vec<_>>>()?;
    Ok((space, events))
}

/// Random linearly ordered space with `1..=max_family` up-sets (or
/// down-sets), each generated by one or two random outcomes.
pub fn random_monotone_instance(
    seed: u64,
    index: u64,
    max_coords: usize,
    max_factor_size: usize,
    max_family: usize,
    increasing: bool,
) -> Result<(Arc<ProductSpace>, Vec<Event>)> {
    let mut rng = instance_rng(seed, index);
    let space = random_linear_space(&mut rng, max_coords, max_factor_size);
    let k = rng.random_range(1..=max_family);
    let events = (0..k)
        .map(|_| {
            let g = rng.random_range(1..=2);
            let gens = (0..g).map(|_| random_outcome(&mut rng, &space)).collect();
            if increasing {
                Event::up_set(space.clone(), gens)
            } else {
                Event::down_set(space.clone(), gens)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((space, events))
}

/// Seeded random monotone families on larger linearly ordered spaces.
pub fn theorem1_random(config: &VerifyConfig) -> Result<[SuiteResult; 2]> {
    let run = |increasing: bool| {
        (0..config.random_instances as u64)
            .into_par_iter()
            .map(|id| {
                let inst = random_monotone_instance(
                    config.seed,
                    id,
                    config.max_coords,
                    config.max_factor_size,
                    config.max_family,
                    increasing,
                );
                match inst {
                    Ok((space, fam)) => Tally::one(
                        id,
                        match check_domination(&fam) {
                            Ok(v) => v.map(|d| Counterexample::new(d, &space, &fam)),
                            Err(e) => failed(e, &space, &fam),
                        },
                    ),
                    Err(e) => Tally::one(id, Some(Counterexample::bare(format!("instance {id}: {e}")))),
                }
            })
            .reduce(Tally::default, Tally::merge)
    };
    Ok([
        run(true).finish("theorem1-random-increasing"),
        run(false).finish("theorem1-random-decreasing"),
    ])
}

// ---------------------------------------------------------------------------
// Partially ordered factors
// ---------------------------------------------------------------------------

/// Diamond weightings (bottom, a, b, top) used by the partial-order corpus.
pub fn diamond_weightings() -> [[Rational; 4]; 3] {
    [
        [ratio(1, 4), ratio(1, 4), ratio(1, 4), ratio(1, 4)],
        [ratio(1, 4), ratio(1, 8), ratio(1, 8), ratio(1, 2)],
        [ratio(1, 3), ratio(1, 6), ratio(1, 6), ratio(1, 3)],
    ]
}

/// Candidate factors for the partial-order corpus: the three diamonds and a
/// uniform two-element antichain (which is not positively associated).
pub fn pa_candidates() -> Vec<Factor> {
    let mut out: Vec<Factor> = diamond_weightings().into_iter().map(|w| Factor::diamond(w).expect("valid diamond")).collect();
    out.push(Factor::antichain(vec![ratio(1, 2), ratio(1, 2)]).expect("valid antichain"));
    out
}

/// Theorem 1 over products of partially ordered factors (`n ≤ max_coords`,
/// `k ≤ max_family`). Candidates failing the positive-association check are
/// dropped unless `skip_pa_check` is set.
pub fn pa_variant(max_coords: usize, max_family: usize, skip_pa_check: bool) -> Result<SuiteResult> {
    let mut factors = Vec::new();
    for f in pa_candidates() {
        if skip_pa_check || f.is_positively_associated()? {
            factors.push(f);
        }
    }
    let spaces = product_spaces(&factors, max_coords, usize::MAX);
    let results = theorem1_exhaustive(&spaces, max_family)?;
    let tally = |r: SuiteResult| Tally {
        instances: r.instances,
        violations: r.violations,
        first: r.counterexample.map(|c| (0, c)),
    };
    Ok(tally(results.increasing).merge(tally(results.decreasing)).finish("pa-poset-variant"))
}

// ---------------------------------------------------------------------------
// BK and Reimer-type inequalities
// ---------------------------------------------------------------------------

/// Checks `μ(□_{i∈I} A_i) ≤ ∏_{i∈I} μ(A_i)` for every `I` with `|I| ≥ 2`.
pub fn check_box_product(events: &[Event]) -> Result<Option<String>> {
    let k = events.len();
    for mask in 0u32..(1 << k) {
        if mask.count_ones() < 2 {
            continue;
        }
        let idx: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 1).collect();
        let boxed = disjoint::box_event(events, &idx)?.probability();
        let product: Rational = idx.iter().map(|&i| events[i].probability()).product();
        if boxed > product {
            return Ok(Some(format!(
                "μ(□ over {idx:?}) = {} > {} = ∏ μ(A_i)",
                format_rational(&boxed),
                format_rational(&product)
            )));
        }
    }
    Ok(None)
}

fn run_families(name: &str, space: &Arc<ProductSpace>, families: Vec<Vec<Event>>) -> SuiteResult {
    families
        .par_iter()
        .enumerate()
        .map(|(id, fam)| {
            Tally::one(
                id as u64,
                match check_box_product(fam) {
                    Ok(v) => v.map(|d| Counterexample::new(d, space, fam)),
                    Err(e) => failed(e, space, fam),
                },
            )
        })
        .reduce(Tally::default, Tally::merge)
        .finish(name)
}

/// `μ(A □ B) ≤ μ(A) μ(B)` for every ordered pair of increasing events.
pub fn bk_recovery(space: &Arc<ProductSpace>) -> Result<SuiteResult> {
    let (inc, _) = monotone_events(space)?;
    let families = inc
        .iter()
        .flat_map(|a| inc.iter().map(move |b| vec![a.clone(), b.clone()]))
        .collect();
    Ok(run_families("bk-recovery", space, families))
}

/// `μ(A □ B) ≤ μ(A) μ(B)` for every ordered pair of arbitrary events on a
/// space with at most [`ALL_EVENTS_OUTCOME_CAP`] outcomes.
pub fn reimer_exhaustive(space: &Arc<ProductSpace>) -> Result<SuiteResult> {
    let count = space.enumerable_count()?;
    if count > ALL_EVENTS_OUTCOME_CAP {
        return Err(disocc_core::Error::InstanceTooLarge(format!(
            "{count} outcomes; every event pair is enumerated only up to {ALL_EVENTS_OUTCOME_CAP}"
        )));
    }
    let all: Vec<Event> = (0u32..1 << count)
        .map(|mask| {
            let mut m = FixedBitSet::with_capacity(count);
            (0..count).filter(|i| mask >> i & 1 == 1).for_each(|i| m.insert(i));
            Event::from_members(space.clone(), m)
        })
        .collect::<Result<_>>()?;
    let families = all
        .iter()
        .flat_map(|a| all.iter().map(move |b| vec![a.clone(), b.clone()]))
        .collect();
    Ok(run_families("reimer-exhaustive", space, families))
}

/// The box-product inequality on seeded random families of arbitrary events
/// on linearly ordered spaces.
pub fn reimer_random(seed: u64, count: usize, max_coords: usize, max_factor_size: usize, max_family: usize) -> SuiteResult {
    (0..count as u64)
        .into_par_iter()
        .map(|id| match random_linear_instance(seed, id, max_coords, max_factor_size, max_family) {
            Ok((space, fam)) => Tally::one(
                id,
                match check_box_product(&fam) {
                    Ok(v) => v.map(|d| Counterexample::new(d, &space, &fam)),
                    Err(e) => failed(e, &space, &fam),
                },
            ),
            Err(e) => Tally::one(id, Some(Counterexample::bare(format!("instance {id}: {e}")))),
        })
        .reduce(Tally::default, Tally::merge)
        .finish("reimer-random")
}

// ---------------------------------------------------------------------------
// Theorem 2 and the independent-subfamily bound
// ---------------------------------------------------------------------------

fn tail_failure(dist: &CountDistribution, lambda: &Rational, what: &str) -> Option<String> {
    bounds::chernoff_violation(dist, lambda).map(|t| {
        let threshold = lambda + rational::from_usize(t as usize);
        format!(
            "Pr({what} ≥ λ + {t}) = {} exceeds exp(−λφ(t/λ)) = {} at λ = {}",
            format_rational(&dist.tail_at_least(&threshold)),
            bounds::bk_chernoff(rational::to_f64(lambda), f64::from(t)).unwrap_or(f64::NAN),
            format_rational(lambda)
        )
    })
}

/// The three Theorem 2 checks on one family: the Chernoff-type tail of X,
/// the same tail for Z, and the exact factorial-moment chain.
pub fn check_theorem2(events: &[Event]) -> Result<[Option<String>; 3]> {
    let lambda = bounds::lambda_of(events);
    let x = disjoint::x_distribution(events)?;
    let z = disjoint::z_distribution(events)?;
    let chain = bounds::markov_chain_verify_all(events)?
        .into_iter()
        .find(|r| !r.moment_holds() || !r.tail_holds())
        .map(|r| {
            format!(
                "order r = {}: E χ = {} vs λ^r = {}; Pr(X ≥ λ+r) = {} vs bound {}",
                r.r,
                format_rational(&r.expected_chi),
                format_rational(&r.lambda_pow_r),
                format_rational(&r.tail),
                format_rational(&r.tail_bound)
            )
        });
    Ok([tail_failure(&x, &lambda, "X"), tail_failure(&z, &lambda, "Z"), chain])
}

pub struct Theorem2Results {
    pub chernoff_x: SuiteResult,
    pub janson_z: SuiteResult,
    pub moment_chain: SuiteResult,
}

/// Seeded random corpus of arbitrary events on linearly ordered spaces.
pub fn theorem2_random(
    seed: u64,
    count: usize,
    max_coords: usize,
    max_factor_size: usize,
    max_family: usize,
) -> Theorem2Results {
    let [x, z, chain] = (0..count as u64)
        .into_par_iter()
        .map(|id| {
            let outcome = random_linear_instance(seed, id, max_coords, max_factor_size, max_family)
                .and_then(|(space, fam)| check_theorem2(&fam).map(|r| (space, fam, r)));
            match outcome {
                Ok((space, fam, results)) => {
                    results.map(|v| Tally::one(id, v.map(|d| Counterexample::new(d, &space, &fam))))
                }
                Err(e) => std::array::from_fn(|_| {
                    Tally::one(id, Some(Counterexample::bare(format!("instance {id}: {e}"))))
                }),
            }
        })
        .reduce(empty_tallies, merge_all);
    Theorem2Results {
        chernoff_x: x.finish("theorem2-chernoff-x"),
        janson_z: z.finish("janson-z"),
        moment_chain: chain.finish("theorem2-moment-chain"),
    }
}

// ---------------------------------------------------------------------------
// Bound formulas
// ---------------------------------------------------------------------------

/// `λ ∈ {0.1, 0.2, …, 10}` × `t ∈ {1, …, 20}`.
pub fn bound_grid() -> impl Iterator<Item = (f64, u32)> {
    (1..=100).flat_map(|i| (1..=20).map(move |t| (f64::from(i) / 10.0, t)))
}

/// `product ≤ chernoff ≤ bernstein ≤ 1` on [`bound_grid`].
pub fn bound_chain() -> SuiteResult {
    let mut tally = Tally::default();
    for (id, (lambda, t)) in bound_grid().enumerate() {
        let tf = f64::from(t);
        let violation = match (
            bounds::product_bound(lambda, t),
            bounds::bk_chernoff(lambda, tf),
            bounds::bernstein(lambda, tf),
        ) {
            (Ok(p), Ok(c), Ok(b)) => (!(p <= c + FLOAT_SLACK && c <= b + FLOAT_SLACK && b <= 1.0))
                .then(|| format!("λ = {lambda}, t = {t}: product {p}, chernoff {c}, bernstein {b}")),
            (p, c, b) => Some(format!("λ = {lambda}, t = {t}: {p:?} {c:?} {b:?}")),
        };
        tally = tally.merge(Tally::one(id as u64, violation.map(Counterexample::bare)));
    }
    tally.finish("bound-chain")
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance
/// `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = (a + b) / 2.0;
        let fm = f(m);
        (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
    }
    #[allow(clippy::too_many_arguments)]
    fn go<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        m: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (lm, flm, left) = simpson(f, a, fa, m, fm);
        let (rm, frm, right) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        go(f, a, fa, m, fm, lm, flm, left, tol / 2.0, depth - 1) + go(f, m, fm, b, fb, rm, frm, right, tol / 2.0, depth - 1)
    }
    let (fa, fb) = (f(a), f(b));
    let (m, fm, whole) = simpson(f, a, fa, b, fb);
    go(f, a, fa, b, fb, m, fm, whole, tol, 50)
}

/// `∫_0^t log(λ/(λ+t−x)) dx = −λ φ(t/λ)` on [`bound_grid`], to `1e−9`.
pub fn quadrature_identity() -> SuiteResult {
    let mut tally = Tally::default();
    for (id, (lambda, t)) in bound_grid().enumerate() {
        let tf = f64::from(t);
        let integral = adaptive_simpson(&|x: f64| (lambda / (lambda + tf - x)).ln(), 0.0, tf, 1e-12);
        let closed = bounds::phi(tf / lambda).map(|p| -lambda * p);
        let violation = match closed {
            Ok(c) if (integral - c).abs() < 1e-9 => None,
            Ok(c) => Some(format!("λ = {lambda}, t = {t}: quadrature {integral} vs closed form {c}")),
            Err(e) => Some(format!("λ = {lambda}, t = {t}: {e}")),
        };
        tally = tally.merge(Tally::one(id as u64, violation.map(Counterexample::bare)));
    }
    tally.finish("quadrature-identity")
}

// ---------------------------------------------------------------------------
// Independent increasing events occur disjointly
// ---------------------------------------------------------------------------

/// Checks `μ(□_{i∈I} A_i) = μ(∩_{i∈I} A_i)` for every `I`.
pub fn check_box_equals_intersection(events: &[Event]) -> Result<Option<String>> {
    let k = events.len();
    for mask in 1u32..(1 << k) {
        let idx: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 1).collect();
        let sub = pick(events, &idx);
        let boxed = disjoint::box_event(events, &idx)?.probability();
        let inter = Event::intersection(&sub)?.probability();
        if boxed != inter {
            return Ok(Some(format!(
                "μ(□ over {idx:?}) = {} ≠ {} = μ(∩ over {idx:?})",
                format_rational(&boxed),
                format_rational(&inter)
            )));
        }
    }
    Ok(None)
}

/// Every mutually independent family of 2 or 3 distinct increasing events on
/// each space; each family is one instance.
pub fn harris(spaces: &[Arc<ProductSpace>]) -> Result<SuiteResult> {
    let mut items = Vec::new();
    let mut families = Vec::new();
    for (s, space) in spaces.iter().enumerate() {
        let (inc, _) = monotone_events(space)?;
        let m = inc.len();
        for a in 0..m {
            for b in a + 1..m {
                items.push((s, vec![a, b]));
                for c in b + 1..m {
                    items.push((s, vec![a, b, c]));
                }
            }
        }
        families.push(inc);
    }
    items.sort_by_key(|(s, idx)| (*s, idx.len()));
    Ok(items
        .par_iter()
        .enumerate()
        .map(|(id, (s, idx))| {
            let space = &spaces[*s];
            let fam = pick(&families[*s], idx);
            match events::are_independent(&fam) {
                Ok(false) => Tally::skip(),
                Ok(true) => Tally::one(
                    id as u64,
                    match check_box_equals_intersection(&fam) {
                        Ok(v) => v.map(|d| Counterexample::new(d, space, &fam)),
                        Err(e) => failed(e, space, &fam),
                    },
                ),
                Err(e) => Tally::one(id as u64, failed(e, space, &fam)),
            }
        })
        .reduce(Tally::default, Tally::merge)
        .finish("harris-disjointness"))
}

// ---------------------------------------------------------------------------
// Everything
// ---------------------------------------------------------------------------

/// Runs every corpus within the budgets. A zero coordinate or family budget
/// gives an empty (passing) report.
pub fn verify_all(config: &VerifyConfig) -> Result<Vec<SuiteResult>> {
    if config.max_coords == 0 || config.max_family == 0 {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let n = config.max_coords;
    let k = config.max_family;
    let size = config.max_factor_size.max(2);

    let t1 = theorem1_exhaustive(&exhaustive_spaces(n, size), k)?;
    out.extend([t1.increasing, t1.decreasing, t1.psi_zero]);
    out.extend(theorem1_random(&VerifyConfig { max_factor_size: size, max_family: k, ..config.clone() })?);
    out.push(pa_variant(n.min(2), k.min(2), config.skip_pa_check)?);

    let uniform = |d: usize| Arc::new(ProductSpace::bernoulli(d, ratio(1, 2)).expect("valid cube"));
    let mut bk = Tally::default();
    for d in 1..=n {
        let r = bk_recovery(&uniform(d))?;
        bk = bk.merge(Tally { instances: r.instances, violations: r.violations, first: r.counterexample.map(|c| (d as u64, c)) });
    }
    out.push(bk.finish("bk-recovery"));
    out.push(reimer_exhaustive(&uniform(n.min(2)))?);
    out.push(reimer_random(config.seed, config.random_instances, n, size, k.min(3)));

    let rk = config.random_max_family.max(1);
    let t2 = theorem2_random(config.seed, config.random_instances, n, size, rk);
    out.extend([t2.chernoff_x, t2.janson_z, t2.moment_chain]);
    out.push(bound_chain());
    out.push(quadrature_identity());
    out.push(harris(&bernoulli_spaces(n))?);
    Ok(out)
}
