//! The `disocc` command line. [`run`] parses arguments, executes one
//! subcommand and returns the process exit code: 0 on success, 1 when a
//! verification or assertion fails, 2 on usage, parse or input errors.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand};
use disocc_core::bounds;
use disocc_core::disjoint::{self, CountDistribution};
use disocc_core::events::Event;
use disocc_core::rational::{format_rational, parse_rational};

use crate::gallery;
use crate::graph_spec;
use crate::parallel;
use crate::report;
use crate::spec_file::{EventSpec, SpaceSpec};
use crate::verify::{self, VerifyConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "disocc", version, about = "Exact disjoint-occurrence counts, domination checks and tail bounds")]
struct Cli {
    /// Output path (default: stdout). For `dist` this is a directory
    /// receiving x.csv, y.csv, z.csv and verdict.txt.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for every randomized computation; required where randomness is used.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact laws of X, Y and Z for a space and event family, with the X ≼ Y verdict.
    Dist {
        /// Space spec file (JSON).
        #[arg(long)]
        space: PathBuf,
        /// Events spec file (JSON).
        #[arg(long)]
        events: PathBuf,
    },
    /// Exhaustive and seeded random verification corpora.
    Verify {
        #[arg(long, default_value_t = 3)]
        max_coords: usize,
        #[arg(long, default_value_t = 3)]
        max_factor_size: usize,
        /// Largest family size in the exhaustive corpora.
        #[arg(long, default_value_t = 3)]
        families: usize,
        /// Largest family size in the random corpora.
        #[arg(long, default_value_t = 4)]
        random_families: usize,
        /// Instances per seeded random corpus.
        #[arg(long, default_value_t = 10_000)]
        random_instances: usize,
        /// Mutation test: admit factors that fail the positive-association
        /// check. The run is then expected to report a violation.
        #[arg(long)]
        skip_pa_check: bool,
    },
    /// Worked examples, recomputed and checked.
    Gallery {
        /// Case name, or `all`.
        name: String,
    },
    /// Tail bounds at (λ, t).
    Bounds {
        #[arg(long)]
        lambda: f64,
        /// One or more t values (repeat the flag or separate with commas).
        #[arg(long, value_delimiter = ',', required = true)]
        t: Vec<f64>,
        /// Number of events, used to cap the moment order when t > k.
        #[arg(long)]
        events: Option<usize>,
        /// An exact tail probability to compare against the bounds (single t only).
        #[arg(long)]
        exact_tail: Option<String>,
    },
    /// Monte Carlo law of X for path events in edge percolation.
    Percolation {
        /// gridRxC, cycleN, pathN, completeN or file:<path>.
        #[arg(long, default_value = "grid3x3")]
        graph: String,
        /// Terminal pairs, 1-based, e.g. "1-9,3-7".
        #[arg(long, default_value = "1-9,3-7")]
        pairs: String,
        /// Edge probability as a decimal or p/q.
        #[arg(long)]
        p: String,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
    },
}

/// Errors that map to the usage exit code.
#[derive(Debug)]
struct Usage(anyhow::Error);

type Outcome = Result<i32, Usage>;

impl<E: Into<anyhow::Error>> From<E> for Usage {
    fn from(e: E) -> Self {
        Usage(e.into())
    }
}

/// Runs the CLI with `args` (including the program name).
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let target: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(target, "{}", e.render());
            return e.exit_code();
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads.unwrap_or(0)).build() {
        Ok(pool) => pool,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_USAGE;
        }
    };
    // Output is buffered so the command can run inside the pool.
    let (code, out, mut err) = pool.install(|| {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = execute(&cli, &mut out, &mut err);
        (code, out, err)
    });
    let code = match code {
        Ok(code) => code,
        Err(Usage(e)) => {
            let _ = writeln!(err, "error: {e:#}");
            EXIT_USAGE
        }
    };
    let _ = stdout.write_all(&out);
    let _ = stderr.write_all(&err);
    code
}

fn require_seed(cli: &Cli, command: &str) -> Result<u64, Usage> {
    cli.seed.ok_or_else(|| Usage(anyhow!("`{command}` is randomized and requires --seed")))
}

/// Writes to `--out` when given, else to stdout.
fn with_output(cli: &Cli, stdout: &mut dyn Write, body: impl FnOnce(&mut dyn Write) -> anyhow::Result<()>) -> Result<(), Usage> {
    match &cli.out {
        Some(path) => {
            let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
            let mut w = BufWriter::new(file);
            body(&mut w)?;
            w.flush()?;
        }
        None => body(stdout)?,
    }
    Ok(())
}

fn execute(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Outcome {
    match &cli.command {
        Command::Dist { space, events } => dist(cli, space, events, stdout),
        Command::Verify { max_coords, max_factor_size, families, random_families, random_instances, skip_pa_check } => {
            let config = VerifyConfig {
                max_coords: *max_coords,
                max_factor_size: *max_factor_size,
                max_family: *families,
                random_max_family: *random_families,
                random_instances: *random_instances,
                seed: require_seed(cli, "verify")?,
                skip_pa_check: *skip_pa_check,
            };
            run_verify(cli, &config, stdout, stderr)
        }
        Command::Gallery { name } => run_gallery(cli, name, stdout),
        Command::Bounds { lambda, t, events, exact_tail } => run_bounds(cli, *lambda, t, *events, exact_tail.as_deref(), stdout),
        Command::Percolation { graph, pairs, p, samples } => {
            let seed = require_seed(cli, "percolation")?;
            run_percolation(cli, graph, pairs, p, *samples, seed, stdout, stderr)
        }
    }
}

/// The X ≼ Y verdict and the Theorem 1 hypothesis report for a family.
pub fn verdict(events: &[Event], x: &CountDistribution, y: &CountDistribution) -> (bool, bool, Vec<String>) {
    let dominated = disjoint::stochastically_dominates(x, y);
    let mut lines = Vec::new();
    let first = disjoint::domination_violation(x, y);
    lines.push(match first {
        None => "verdict: X ≼ Y holds".to_string(),
        Some(r) => format!(
            "verdict: X ≼ Y fails at r = {r} (Pr(X ≥ {r}) = {} > {} = Pr(Y ≥ {r}))",
            format_rational(&x.survival(r)),
            format_rational(&y.survival(r))
        ),
    });
    let inc = events.iter().all(Event::is_increasing);
    let dec = events.iter().all(Event::is_decreasing);
    let monotone = inc || dec;
    lines.push(match (inc, dec) {
        (true, true) => "hypothesis: events all increasing and all decreasing".into(),
        (true, false) => "hypothesis: events all increasing".into(),
        (false, true) => "hypothesis: events all decreasing".into(),
        (false, false) => "hypothesis: events not all increasing (nor all decreasing)".into(),
    });
    let mut pa = true;
    if let Some(space) = events.first().map(Event::space) {
        for (i, f) in space.factors().iter().enumerate() {
            match f.is_positively_associated() {
                Ok(true) => {}
                Ok(false) => {
                    pa = false;
                    lines.push(format!("hypothesis: factor {} is not positively associated", i + 1));
                }
                Err(e) => {
                    pa = false;
                    lines.push(format!("hypothesis: factor {} could not be checked: {e}", i + 1));
                }
            }
        }
        if pa {
            lines.push("hypothesis: all factors positively associated".into());
        }
    }
    let hypotheses = monotone && pa;
    lines.push(format!(
        "theorem 1 hypotheses verified: {}",
        if hypotheses { "yes" } else { "no" }
    ));
    (dominated, hypotheses, lines)
}

fn dist(cli: &Cli, space_path: &Path, events_path: &Path, stdout: &mut dyn Write) -> Outcome {
    let space = SpaceSpec::load(space_path)?;
    let events = EventSpec::load_list(events_path, &space)?;
    let x = parallel::x_distribution(&events)?;
    let y = disjoint::y_distribution(&disjoint::probabilities(&events))?;
    let z = parallel::z_distribution(&events)?;
    let (dominated, hypotheses, lines) = verdict(&events, &x, &y);
    let verdict_text = lines.join("\n") + "\n";
    match &cli.out {
        Some(dir) => {
            std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            for (name, d) in [("x.csv", &x), ("y.csv", &y), ("z.csv", &z)] {
                let path = dir.join(name);
                let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
                report::write_distribution(BufWriter::new(file), d)?;
            }
            std::fs::write(dir.join("verdict.txt"), &verdict_text)?;
            stdout.write_all(verdict_text.as_bytes())?;
        }
        None => {
            for (name, d) in [("X", &x), ("Y", &y), ("Z", &z)] {
                writeln!(stdout, "# law of {name}")?;
                report::write_distribution(&mut *stdout, d)?;
            }
            stdout.write_all(verdict_text.as_bytes())?;
        }
    }
    Ok(if hypotheses && !dominated { EXIT_FAILURE } else { EXIT_OK })
}

fn run_verify(cli: &Cli, config: &VerifyConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Outcome {
    let results = verify::verify_all(config)?;
    let mut failed = None;
    with_output(cli, stdout, |w| {
        for r in &results {
            writeln!(w, "{}", r.summary())?;
        }
        let passed = results.iter().filter(|r| r.passed()).count();
        writeln!(w, "{passed}/{} suites passed", results.len())?;
        Ok(())
    })?;
    for r in results.iter().filter(|r| !r.passed()) {
        if let Some(c) = &r.counterexample {
            writeln!(stderr, "counterexample for {}: {}", r.name, c.description)?;
            if let Some(spec) = &c.instance {
                writeln!(stderr, "{}", spec.to_json())?;
            }
        }
        failed.get_or_insert(r.name.clone());
    }
    Ok(if failed.is_some() { EXIT_FAILURE } else { EXIT_OK })
}

fn run_gallery(cli: &Cli, name: &str, stdout: &mut dyn Write) -> Outcome {
    let names: Vec<&str> = if name == "all" { gallery::CASES.to_vec() } else { vec![name] };
    let reports = names.iter().map(|n| gallery::run_case(n)).collect::<Result<Vec<_>, _>>()?;
    with_output(cli, stdout, |w| {
        for r in &reports {
            w.write_all(r.render().as_bytes())?;
        }
        Ok(())
    })?;
    Ok(if reports.iter().all(|r| r.passed()) { EXIT_OK } else { EXIT_FAILURE })
}

fn run_bounds(
    cli: &Cli,
    lambda: f64,
    ts: &[f64],
    events: Option<usize>,
    exact_tail: Option<&str>,
    stdout: &mut dyn Write,
) -> Outcome {
    let exact = exact_tail.map(parse_rational).transpose()?;
    if exact.is_some() && ts.len() != 1 {
        return Err(Usage(anyhow!("--exact-tail needs exactly one --t value")));
    }
    let reports = ts
        .iter()
        .map(|&t| bounds::tail_report(lambda, t, exact.clone(), events))
        .collect::<Result<Vec<_>, _>>()?;
    with_output(cli, stdout, |w| Ok(report::write_bounds(w, &reports)?))?;
    Ok(if reports.iter().all(|r| r.is_consistent()) { EXIT_OK } else { EXIT_FAILURE })
}

/// Standard errors of slack allowed between the empirical tail and the bound.
pub const MONTE_CARLO_SLACK: f64 = 3.0;

#[allow(clippy::too_many_arguments)]
fn run_percolation(
    cli: &Cli,
    graph: &str,
    pairs: &str,
    p: &str,
    samples: u64,
    seed: u64,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Outcome {
    let graph = graph_spec::parse_graph(graph)?;
    let pairs = graph_spec::parse_pairs(&graph, pairs)?;
    let p = parse_rational(p)?;
    let mc = parallel::monte_carlo_tail(&graph, &pairs, &p, samples, seed)?;
    with_output(cli, stdout, |w| Ok(report::write_monte_carlo(w, &mc)?))?;
    let violations = mc.bound_violations(MONTE_CARLO_SLACK);
    if violations.is_empty() {
        Ok(EXIT_OK)
    } else {
        writeln!(stderr, "empirical tail exceeds the bound by more than {MONTE_CARLO_SLACK} SE at r = {violations:?}")?;
        Ok(EXIT_FAILURE)
    }
}

/// Entry point for the binary.
pub fn main_with_std_streams() -> i32 {
    let stdout = io::stdout();
    let stderr = io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}
