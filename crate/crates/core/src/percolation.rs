//! Terminal-pair connection events under Bernoulli edge percolation on a
//! fixed host graph.
//!
//! Coordinates of the underlying product space are edges, so a witness of a
//! connection event is a set of open edges and disjoint occurrence means
//! edge-disjoint open paths.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use fixedbitset::FixedBitSet;
use num_traits::{One, Zero};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::bounds;
use crate::events::Event;
use crate::packing;
use crate::rational::{self, Rational};
use crate::space::{Factor, Outcome, ProductSpace};
use crate::{Error, Result};

/// Most terminal pairs the exact disjoint-path search accepts.
pub const MAX_PAIRS: usize = 6;
/// Most open edges the exact disjoint-path search accepts.
pub const MAX_OPEN_EDGES: usize = 32;
/// Most edges for exact enumeration of connection probabilities.
pub const MAX_EXACT_EDGES: usize = 20;

/// An undirected multigraph without self-loops. Vertices and edges are
/// 0-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(vertex_count: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        for &(u, v) in &edges {
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {u}")));
            }
            if u >= vertex_count || v >= vertex_count {
                return Err(Error::InvalidGraph(format!("edge ({u}, {v}) out of range")));
            }
        }
        Ok(Graph { vertex_count, edges })
    }

    /// `rows × cols` grid, vertices numbered row-major.
    pub fn grid(rows: usize, cols: usize) -> Self {
        let mut edges = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                let v = r * cols + c;
                if c + 1 < cols {
                    edges.push((v, v + 1));
                }
                if r + 1 < rows {
                    edges.push((v, v + cols));
                }
            }
        }
        Graph { vertex_count: rows * cols, edges }
    }

    pub fn cycle(n: usize) -> Self {
        let edges = if n < 3 { Vec::new() } else { (0..n).map(|i| (i, (i + 1) % n)).collect() };
        Graph { vertex_count: n, edges }
    }

    pub fn path(n: usize) -> Self {
        Graph { vertex_count: n, edges: (1..n).map(|i| (i - 1, i)).collect() }
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        Graph { vertex_count: n, edges }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }
}

/// Terminal pairs `(x_i, y_i)` with all `2k` vertices distinct.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TerminalPairs(Vec<(usize, usize)>);

impl TerminalPairs {
    pub fn new(graph: &Graph, pairs: Vec<(usize, usize)>) -> Result<Self> {
        let mut seen = Vec::with_capacity(2 * pairs.len());
        for &(x, y) in &pairs {
            for v in [x, y] {
                if v >= graph.vertex_count() {
                    return Err(Error::InvalidGraph(format!("terminal {v} out of range")));
                }
                if seen.contains(&v) {
                    return Err(Error::InvalidGraph(format!("terminal {v} used twice")));
                }
                seen.push(v);
            }
        }
        Ok(TerminalPairs(pairs))
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Open/closed state per edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeConfiguration {
    open: FixedBitSet,
}

impl EdgeConfiguration {
    pub fn all_open(edges: usize) -> Self {
        let mut open = FixedBitSet::with_capacity(edges);
        open.insert_range(..);
        EdgeConfiguration { open }
    }

    pub fn all_closed(edges: usize) -> Self {
        EdgeConfiguration { open: FixedBitSet::with_capacity(edges) }
    }

    /// Bit `e` of `mask` opens edge `e`.
    pub fn from_mask(edges: usize, mask: u64) -> Self {
        let mut open = FixedBitSet::with_capacity(edges);
        for e in (0..edges.min(64)).filter(|e| mask >> e & 1 == 1) {
            open.insert(e);
        }
        EdgeConfiguration { open }
    }

    pub fn from_open(edges: usize, open_edges: &[usize]) -> Self {
        let mut open = FixedBitSet::with_capacity(edges);
        for &e in open_edges {
            open.insert(e);
        }
        EdgeConfiguration { open }
    }

    pub fn len(&self) -> usize {
        self.open.len()
    }

    pub fn is_empty(&self) -> bool {
        self.open.len() == 0
    }

    pub fn is_open(&self, e: usize) -> bool {
        self.open.contains(e)
    }

    pub fn set(&mut self, e: usize, open: bool) {
        self.open.set(e, open);
    }

    pub fn open_count(&self) -> usize {
        self.open.count_ones(..)
    }

    pub fn open_edges(&self) -> impl Iterator<Item = usize> + '_ {
        self.open.ones()
    }

    /// The configuration as an outcome of the edge product space
    /// (`1` = open).
    pub fn to_outcome(&self) -> Outcome {
        Outcome((0..self.len()).map(|e| usize::from(self.is_open(e))).collect())
    }
}

/// Per-sample generator: a ChaCha8 stream keyed by `seed`, with the sample
/// index as the stream number. Sample `i` draws the same configuration no
/// matter how samples are split across workers.
pub fn sample_rng(seed: u64, sample: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(sample);
    rng
}

/// Opens each edge independently with probability `p`, in edge order, one
/// 64-bit draw per edge (top 53 bits as a uniform in `[0, 1)`).
pub fn sample_configuration<R: RngCore>(graph: &Graph, p: f64, rng: &mut R) -> EdgeConfiguration {
    let mut config = EdgeConfiguration::all_closed(graph.edge_count());
    for e in 0..graph.edge_count() {
        let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        if u < p {
            config.open.insert(e);
        }
    }
    config
}

struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        DisjointSets { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}

fn components(graph: &Graph, config: &EdgeConfiguration) -> DisjointSets {
    let mut dsu = DisjointSets::new(graph.vertex_count());
    for e in config.open_edges() {
        let (u, v) = graph.edges[e];
        dsu.union(u, v);
    }
    dsu
}

/// Whether `x` and `y` are joined by a path of open edges.
pub fn path_exists(graph: &Graph, config: &EdgeConfiguration, x: usize, y: usize) -> bool {
    x == y || {
        let mut dsu = components(graph, config);
        dsu.find(x) == dsu.find(y)
    }
}

/// Edge sets (as bitmasks over `local` edge numbering) of all simple open
/// paths from `x` to `y`.
fn simple_paths(adj: &[Vec<(usize, usize)>], x: usize, y: usize) -> Vec<u64> {
    fn go(v: usize, y: usize, adj: &[Vec<(usize, usize)>], visited: &mut [bool], used: u64, out: &mut Vec<u64>) {
        if v == y {
            out.push(used);
            return;
        }
        for &(w, e) in &adj[v] {
            if !visited[w] {
                visited[w] = true;
                go(w, y, adj, visited, used | (1 << e), out);
                visited[w] = false;
            }
        }
    }
    let mut visited = vec![false; adj.len()];
    visited[x] = true;
    let mut out = Vec::new();
    go(x, y, adj, &mut visited, 0, &mut out);
    out.sort_unstable();
    out.dedup();
    out
}

/// The largest number of terminal pairs that can be joined simultaneously by
/// pairwise edge-disjoint open paths.
pub fn max_disjoint_connected_pairs(graph: &Graph, config: &EdgeConfiguration, pairs: &TerminalPairs) -> Result<usize> {
    if pairs.len() > MAX_PAIRS {
        return Err(Error::InstanceTooLarge(format!("{} pairs exceeds {MAX_PAIRS}", pairs.len())));
    }
    if config.len() != graph.edge_count() {
        return Err(Error::DimensionMismatch { expected: graph.edge_count(), got: config.len() });
    }
    let open: Vec<usize> = config.open_edges().collect();
    if open.len() > MAX_OPEN_EDGES {
        return Err(Error::InstanceTooLarge(format!("{} open edges exceeds {MAX_OPEN_EDGES}", open.len())));
    }
    let mut dsu = components(graph, config);
    let mut adj = vec![Vec::new(); graph.vertex_count()];
    for (local, &e) in open.iter().enumerate() {
        let (u, v) = graph.edges[e];
        adj[u].push((v, local));
        adj[v].push((u, local));
    }
    let choices: Vec<Vec<u64>> = pairs
        .pairs()
        .iter()
        .map(|&(x, y)| if dsu.find(x) == dsu.find(y) { simple_paths(&adj, x, y) } else { Vec::new() })
        .collect();
    Ok(packing::max_packing(&choices).0)
}

/// `Pr(x ↔ y)` by enumerating all `2^|E|` configurations.
pub fn exact_pair_probability(graph: &Graph, p: &Rational, x: usize, y: usize) -> Result<Rational> {
    let m = graph.edge_count();
    if m > MAX_EXACT_EDGES {
        return Err(Error::InstanceTooLarge(format!("{m} edges exceeds {MAX_EXACT_EDGES}")));
    }
    check_probability(p)?;
    if x >= graph.vertex_count() || y >= graph.vertex_count() {
        return Err(Error::InvalidGraph("terminal out of range".into()));
    }
    // Connected configurations grouped by number of open edges.
    let mut by_open = vec![0u64; m + 1];
    for mask in 0u64..(1 << m) {
        if path_exists(graph, &EdgeConfiguration::from_mask(m, mask), x, y) {
            by_open[mask.count_ones() as usize] += 1;
        }
    }
    let q = Rational::one() - p;
    Ok(by_open
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(j, &c)| Rational::from_integer(c.into()) * rational::pow(p, j) * rational::pow(&q, m - j))
        .sum())
}

fn check_probability(p: &Rational) -> Result<()> {
    if *p < Rational::zero() || *p > Rational::one() {
        return Err(Error::ProbabilityOutOfRange(rational::format_rational(p)));
    }
    Ok(())
}

/// Embeds the instance in `{0,1}^E` with product Bernoulli(`p`) measure and
/// returns the connection events, one per pair.
pub fn path_events(graph: &Graph, pairs: &TerminalPairs, p: &Rational) -> Result<(Arc<ProductSpace>, Vec<Event>)> {
    check_probability(p)?;
    let m = graph.edge_count();
    if m == 0 || m > MAX_EXACT_EDGES {
        return Err(Error::InstanceTooLarge(format!("{m} edges; embedding needs 1..={MAX_EXACT_EDGES}")));
    }
    let space = Arc::new(ProductSpace::new(vec![Factor::bernoulli(p.clone())?; m])?);
    let events = pairs
        .pairs()
        .iter()
        .map(|&(x, y)| {
            Event::from_fn(space.clone(), |w| {
                let open: Vec<usize> = (0..m).filter(|&e| w.0[e] == 1).collect();
                path_exists(graph, &EdgeConfiguration::from_open(m, &open), x, y)
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((space, events))
}

/// Counts from a batch of samples. Tallies over disjoint sample ranges merge
/// by addition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonteCarloTally {
    pub samples: u64,
    /// `x_counts[v]`: samples with X = v.
    pub x_counts: Vec<u64>,
    /// Samples in which pair `i` was connected.
    pub pair_hits: Vec<u64>,
}

impl MonteCarloTally {
    pub fn empty(k: usize) -> Self {
        MonteCarloTally { samples: 0, x_counts: vec![0; k + 1], pair_hits: vec![0; k] }
    }

    pub fn merge(mut self, other: &MonteCarloTally) -> Self {
        self.samples += other.samples;
        for (a, b) in self.x_counts.iter_mut().zip(&other.x_counts) {
            *a += b;
        }
        for (a, b) in self.pair_hits.iter_mut().zip(&other.pair_hits) {
            *a += b;
        }
        self
    }
}

/// Runs the samples with indices in `range`.
pub fn monte_carlo_tally(
    graph: &Graph,
    pairs: &TerminalPairs,
    p: f64,
    seed: u64,
    range: Range<u64>,
) -> Result<MonteCarloTally> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::ProbabilityOutOfRange(format!("{p}")));
    }
    let mut tally = MonteCarloTally::empty(pairs.len());
    for i in range {
        let config = sample_configuration(graph, p, &mut sample_rng(seed, i));
        let x = max_disjoint_connected_pairs(graph, &config, pairs)?;
        tally.x_counts[x] += 1;
        let mut dsu = components(graph, &config);
        for (j, &(a, b)) in pairs.pairs().iter().enumerate() {
            if dsu.find(a) == dsu.find(b) {
                tally.pair_hits[j] += 1;
            }
        }
        tally.samples += 1;
    }
    Ok(tally)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloRow {
    pub r: usize,
    pub survival: f64,
    pub std_err: f64,
    /// `r − λ` and the Chernoff bound there, when `r > λ`.
    pub t: Option<f64>,
    pub chernoff: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloReport {
    pub p: f64,
    pub samples: u64,
    pub seed: u64,
    pub lambda: f64,
    /// Exact `λ` when the host graph was small enough to enumerate; `None`
    /// means `lambda` is the sample estimate.
    pub lambda_exact: Option<Rational>,
    pub rows: Vec<MonteCarloRow>,
}

impl MonteCarloReport {
    /// Builds the survival table for `r = 1..=k` from a merged tally.
    pub fn from_tally(p: f64, seed: u64, tally: &MonteCarloTally, lambda_exact: Option<Rational>) -> Result<Self> {
        let n = tally.samples;
        let nf = n as f64;
        let lambda = match &lambda_exact {
            Some(l) => rational::to_f64(l),
            None if n == 0 => 0.0,
            None => tally.pair_hits.iter().map(|&h| h as f64 / nf).sum(),
        };
        let k = tally.pair_hits.len();
        let mut rows = Vec::with_capacity(k);
        for r in 1..=k {
            let at_least: u64 = tally.x_counts[r..].iter().sum();
            let (survival, std_err) = if n == 0 {
                (0.0, 0.0)
            } else {
                let s = at_least as f64 / nf;
                (s, libm::sqrt(s * (1.0 - s) / nf))
            };
            let (t, chernoff) = if (r as f64) > lambda {
                let t = r as f64 - lambda;
                (Some(t), Some(bounds::bk_chernoff(lambda, t)?))
            } else {
                (None, None)
            };
            rows.push(MonteCarloRow { r, survival, std_err, t, chernoff });
        }
        Ok(MonteCarloReport { p, samples: n, seed, lambda, lambda_exact, rows })
    }

    /// Rows where the empirical survival exceeds the bound by more than
    /// `slack` standard errors.
    pub fn bound_violations(&self, slack: f64) -> Vec<usize> {
        self.rows
            .iter()
            .filter(|row| row.chernoff.is_some_and(|b| row.survival - slack * row.std_err > b))
            .map(|row| row.r)
            .collect()
    }
}

/// Exact `λ = Σ_i Pr(x_i ↔ y_i)` when the host graph has at most
/// [`MAX_EXACT_EDGES`] edges.
pub fn exact_lambda(graph: &Graph, pairs: &TerminalPairs, p: &Rational) -> Result<Option<Rational>> {
    if graph.edge_count() > MAX_EXACT_EDGES {
        return Ok(None);
    }
    let mut total = Rational::zero();
    for &(x, y) in pairs.pairs() {
        total += exact_pair_probability(graph, p, x, y)?;
    }
    Ok(Some(total))
}

/// Sequential Monte Carlo estimate of the law of X with the Chernoff bound
/// alongside.
pub fn monte_carlo_tail(
    graph: &Graph,
    pairs: &TerminalPairs,
    p: &Rational,
    samples: u64,
    seed: u64,
) -> Result<MonteCarloReport> {
    check_probability(p)?;
    let pf = rational::to_f64(p);
    let tally = monte_carlo_tally(graph, pairs, pf, seed, 0..samples)?;
    MonteCarloReport::from_tally(pf, seed, &tally, exact_lambda(graph, pairs, p)?)
}
