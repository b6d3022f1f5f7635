//! Worked examples. Each case builds its instance in code, recomputes every
//! quantity with the core engine, and checks the expected facts against the
//! computed values.

use std::fmt::Write as _;
use std::sync::Arc;

use disocc_core::disjoint::{self, CountDistribution, ZSolver};
use disocc_core::events::{self, Event};
use disocc_core::rational::{format_rational, ratio, Rational};
use disocc_core::space::ProductSpace;
use disocc_core::{Error, Result};

use crate::verify;

pub const CASES: [&str; 5] = ["remark-ii", "remark-iv", "theorem2-example", "harris", "bk-recovery"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fact {
    pub statement: String,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GalleryReport {
    pub name: String,
    /// Human-readable derivation, one line per step.
    pub lines: Vec<String>,
    pub facts: Vec<Fact>,
}

impl GalleryReport {
    fn new(name: &str) -> Self {
        GalleryReport { name: name.to_string(), lines: Vec::new(), facts: Vec::new() }
    }

    fn line(&mut self, text: impl Into<String>) {
        self.lines.push(text.into());
    }

    fn fact(&mut self, statement: impl Into<String>, holds: bool) {
        self.facts.push(Fact { statement: statement.into(), holds });
    }

    pub fn passed(&self) -> bool {
        self.facts.iter().all(|f| f.holds)
    }

    pub fn render(&self) -> String {
        let mut s = format!("== {} ==\n", self.name);
        for l in &self.lines {
            let _ = writeln!(s, "  {l}");
        }
        for f in &self.facts {
            let _ = writeln!(s, "  [{}] {}", if f.holds { "ok" } else { "FAILED" }, f.statement);
        }
        s
    }
}

fn law(d: &CountDistribution) -> String {
    let parts: Vec<String> = d
        .pmf_values()
        .iter()
        .enumerate()
        .map(|(v, p)| format!("{v}: {}", format_rational(p)))
        .collect();
    format!("{{{}}}", parts.join(", "))
}

/// `Ω = {0,1}` uniform with `A_1 = {0}` and `A_2 = {1}`.
pub fn two_point_instance() -> Result<(Arc<ProductSpace>, Vec<Event>)> {
    let space = Arc::new(ProductSpace::bernoulli(1, ratio(1, 2))?);
    let a1 = Event::cylinder(space.clone(), 0, vec![0])?;
    let a2 = Event::cylinder(space.clone(), 0, vec![1])?;
    Ok((space, vec![a1, a2]))
}

/// Uniform `{0,1}^n` with `A_i = {ω_i ≠ ω_n}` for `i < n`.
pub fn theorem2_instance(n: usize) -> Result<(Arc<ProductSpace>, Vec<Event>)> {
    if n < 2 {
        return Err(Error::Domain(format!("the example needs n ≥ 2, got {n}")));
    }
    let space = Arc::new(ProductSpace::bernoulli(n, ratio(1, 2))?);
    let last = n - 1;
    let events = (0..last)
        .map(|i| {
            let cyl = |c: usize, v: usize| Event::cylinder(space.clone(), c, vec![v]);
            let zero_one = Event::intersection(&[cyl(i, 0)?, cyl(last, 1)?])?;
            let one_zero = Event::intersection(&[cyl(i, 1)?, cyl(last, 0)?])?;
            Event::union(&[zero_one, one_zero])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((space, events))
}

/// Uniform `{0,1}^3` with the coordinate cylinders `{ω_i = 1}`.
pub fn harris_instance() -> Result<(Arc<ProductSpace>, Vec<Event>)> {
    let space = Arc::new(ProductSpace::bernoulli(3, ratio(1, 2))?);
    let events = (0..3).map(|i| Event::cylinder(space.clone(), i, vec![1])).collect::<Result<Vec<_>>>()?;
    Ok((space, events))
}

/// Uniform `{0,1}^2` with `A = {ω_1 = 1}` and `B = {ω_2 = 1}`.
pub fn bk_instance() -> Result<(Arc<ProductSpace>, Vec<Event>)> {
    let space = Arc::new(ProductSpace::bernoulli(2, ratio(1, 2))?);
    let events = (0..2).map(|i| Event::cylinder(space.clone(), i, vec![1])).collect::<Result<Vec<_>>>()?;
    Ok((space, events))
}

/// The instance a gallery case is built on (`theorem2-example` uses `n = 5`).
pub fn case_instance(name: &str) -> Result<(Arc<ProductSpace>, Vec<Event>)> {
    match name {
        "remark-ii" | "remark-iv" => two_point_instance(),
        "theorem2-example" => theorem2_instance(5),
        "harris" => harris_instance(),
        "bk-recovery" => bk_instance(),
        _ => Err(Error::Domain(format!("unknown gallery case `{name}`; expected one of {}", CASES.join(", ")))),
    }
}

pub fn run_case(name: &str) -> Result<GalleryReport> {
    match name {
        "remark-ii" => remark_ii(),
        "remark-iv" => remark_iv(),
        "theorem2-example" => theorem2_example(5),
        "harris" => harris(),
        "bk-recovery" => bk_recovery(),
        _ => case_instance(name).map(|_| unreachable!("case_instance rejects unknown names")),
    }
}

fn monotonicity(events: &[Event]) -> String {
    let inc = events.iter().all(Event::is_increasing);
    let dec = events.iter().all(Event::is_decreasing);
    match (inc, dec) {
        (true, _) => "events all increasing".into(),
        (false, true) => "events all decreasing".into(),
        (false, false) => "events not all increasing (nor all decreasing)".into(),
    }
}

pub fn remark_ii() -> Result<GalleryReport> {
    let (_, events) = two_point_instance()?;
    let mut r = GalleryReport::new("remark-ii");
    r.line("Ω = {0,1} uniform, A_1 = {0}, A_2 = {1}");
    r.line(monotonicity(&events));
    let x = disjoint::x_distribution(&events)?;
    let y = disjoint::y_distribution(&disjoint::probabilities(&events))?;
    r.line(format!("law of X: {}", law(&x)));
    r.line(format!("law of Y: {}", law(&y)));
    let (px, py) = (x.survival(1), y.survival(1));
    r.line(format!("Pr(X ≥ 1) = {}, Pr(Y ≥ 1) = {}", format_rational(&px), format_rational(&py)));
    r.fact("Pr(X ≥ 1) = 1", px == ratio(1, 1));
    r.fact("Pr(Y ≥ 1) = 3/4", py == ratio(3, 4));
    let violation = disjoint::domination_violation(&x, &y);
    r.fact("X ≼ Y fails, first at r = 1", violation == Some(1));
    r.fact(
        "the monotonicity hypothesis fails",
        !events.iter().all(Event::is_increasing) && !events.iter().all(Event::is_decreasing),
    );
    Ok(r)
}

pub fn remark_iv() -> Result<GalleryReport> {
    let (_, events) = two_point_instance()?;
    let mut r = GalleryReport::new("remark-iv");
    r.line("Ω = {0,1} uniform, A_1 = {0}, A_2 = {1}");
    let independent_pair = events::are_independent(&events)?;
    r.line(format!("A_1, A_2 independent: {independent_pair}"));
    let z = disjoint::z_distribution(&events)?;
    let y = disjoint::y_distribution(&disjoint::probabilities(&events))?;
    r.line(format!("law of Z: {}", law(&z)));
    r.line(format!("law of Y: {}", law(&y)));
    r.fact("the pair is not independent", !independent_pair);
    r.fact("Pr(Z ≥ 1) = 1", z.survival(1) == ratio(1, 1));
    r.fact("Pr(Y ≥ 1) = 3/4", y.survival(1) == ratio(3, 4));
    r.fact("Z ≼ Y fails", !disjoint::stochastically_dominates(&z, &y));
    Ok(r)
}

pub fn theorem2_example(n: usize) -> Result<GalleryReport> {
    let (space, events) = theorem2_instance(n)?;
    let mut r = GalleryReport::new("theorem2-example");
    r.line(format!("Ω = {{0,1}}^{n} uniform, A_i = {{ω_i ≠ ω_{n}}} for i = 1..{}", n - 1));
    let count = space.enumerable_count()?;
    let max_x = (0..count).map(|i| disjoint::x_at_index(&events, i)).max().unwrap_or(0);
    r.line(format!("max over all {count} outcomes of X = {max_x}"));
    let independent = events::are_independent(&events)?;
    r.line(format!("the family is mutually independent: {independent}"));
    let solver = ZSolver::new(&events)?;
    let top = n - 1;
    let witness = (0..count).find(|&i| solver.z_at_index(i) == top);
    let z = solver.distribution()?;
    r.line(format!("law of Z: {}", law(&z)));
    if let Some(i) = witness {
        let w = space.outcome(i);
        let labels: Vec<String> = w.coords().iter().map(|c| c.to_string()).collect();
        r.line(format!("Z = {top} at ω = ({}), where every A_i occurs", labels.join(",")));
    }
    r.fact("max_ω X(ω) = 1", max_x == 1);
    r.fact("the family is mutually independent", independent);
    r.fact(format!("an outcome with Z = {top} exists"), witness.is_some());
    r.fact(format!("Pr(Z = {top}) > 0"), z.pmf(top) > Rational::from_integer(0.into()));
    Ok(r)
}

pub fn harris() -> Result<GalleryReport> {
    let (_, events) = harris_instance()?;
    let mut r = GalleryReport::new("harris");
    r.line("Ω = {0,1}^3 uniform, A_i = {ω_i = 1}");
    r.fact("the events are increasing", events.iter().all(Event::is_increasing));
    r.fact("the family is mutually independent", events::are_independent(&events)?);
    for mask in 1u32..8 {
        let idx: Vec<usize> = (0..3).filter(|i| mask >> i & 1 == 1).collect();
        let sub: Vec<Event> = idx.iter().map(|&i| events[i].clone()).collect();
        let boxed = disjoint::box_event(&events, &idx)?.probability();
        let inter = Event::intersection(&sub)?.probability();
        let names: Vec<String> = idx.iter().map(|i| format!("A_{}", i + 1)).collect();
        r.line(format!(
            "I = {{{}}}: μ(□) = {}, μ(∩) = {}",
            names.join(","),
            format_rational(&boxed),
            format_rational(&inter)
        ));
        r.fact(format!("μ(□) = μ(∩) for I = {{{}}}", names.join(",")), boxed == inter);
    }
    Ok(r)
}

pub fn bk_recovery() -> Result<GalleryReport> {
    let (space, events) = bk_instance()?;
    let mut r = GalleryReport::new("bk-recovery");
    r.line("Ω = {0,1}^2 uniform, A = {ω_1 = 1}, B = {ω_2 = 1}");
    let boxed = disjoint::box_event(&events, &[0, 1])?;
    let product = events[0].probability() * events[1].probability();
    r.line(format!(
        "μ(A □ B) = {}, μ(A)μ(B) = {}",
        format_rational(&boxed.probability()),
        format_rational(&product)
    ));
    let x = disjoint::x_distribution(&events)?;
    let y = disjoint::y_distribution(&disjoint::probabilities(&events))?;
    r.line(format!("law of X: {}; Pr(X ≥ 2) = μ(A □ B)", law(&x)));
    r.fact("μ(A □ B) ≤ μ(A)μ(B)", boxed.probability() <= product);
    r.fact("Pr(X ≥ 2) = μ(A □ B)", x.survival(2) == boxed.probability());
    r.fact("X ≼ Y", disjoint::stochastically_dominates(&x, &y));
    let sweep = verify::bk_recovery(&space)?;
    r.line(format!(
        "all ordered pairs of increasing events on this space: {} checked, {} violations",
        sweep.instances, sweep.violations
    ));
    r.fact("μ(A □ B) ≤ μ(A)μ(B) for all 36 increasing pairs", sweep.instances == 36 && sweep.passed());
    Ok(r)
}
