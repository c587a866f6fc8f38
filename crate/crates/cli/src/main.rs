use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value as Json};

use sqmul::arith::{frobenius_number, nonrepresentable_set, SemigroupPair};
use sqmul::funcsolve::{check_function, replay_script, solve, SolveError, SolverConfig, Value};
use sqmul::repr::{classify_k5_reading, count, enumerate, exceptional_set, verify_dubouis};
use sqmul::theorem::theorem_check;

#[derive(Debug, Parser)]
#[command(
    name = "sqmul",
    version,
    about = "Sums of k squares and the multiplicative functional equation"
)]
struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Largest finite candidate set kept before falling back to unknown.
    #[arg(long, global = true, default_value_t = 64)]
    seed_cap: usize,
    /// Representations generated per target.
    #[arg(long, global = true, default_value_t = 16)]
    rep_cap: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Text,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
enum Command {
    /// Enumerate and count representations of n as k positive squares.
    Repr {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 100)]
        limit: usize,
    },
    /// Integers up to the bound with no representation as k positive squares.
    Exceptions {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        bound: u64,
    },
    /// Compare the computed exceptional set with the closed form.
    VerifyDubouis {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        bound: u64,
    },
    /// Propagate all generated constraints up to the bound.
    Solve {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        bound: u64,
        /// Maximum number of equation revisions.
        #[arg(long)]
        budget: Option<u64>,
        /// Include every narrowing step in the output.
        #[arg(long)]
        trace: bool,
    },
    /// Run the scripted case deduction for k.
    Replay {
        #[arg(long)]
        k: usize,
    },
    /// Evaluate a function given on prime powers against every constraint.
    Check {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        bound: u64,
        #[arg(long)]
        values: PathBuf,
    },
    /// Frobenius number and gaps of the semigroup generated by a and b.
    Frobenius {
        #[arg(long)]
        a: u64,
        #[arg(long)]
        b: u64,
    },
    /// Verify the theorem's case for k with every argument up to the bound.
    Theorem {
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 300)]
        bound: u64,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Repr { .. } => "repr",
            Command::Exceptions { .. } => "exceptions",
            Command::VerifyDubouis { .. } => "verify-dubouis",
            Command::Solve { .. } => "solve",
            Command::Replay { .. } => "replay",
            Command::Check { .. } => "check",
            Command::Frobenius { .. } => "frobenius",
            Command::Theorem { .. } => "theorem",
        }
    }
}

/// A command's payload, its verdict and a plain-text rendering.
struct Outcome {
    result: Json,
    ok: bool,
    text: String,
}

impl Outcome {
    fn new(result: impl Serialize, ok: bool, text: String) -> anyhow::Result<Self> {
        Ok(Self {
            result: serde_json::to_value(result)?,
            ok,
            text,
        })
    }
}

/// Input problems that are not the computation's fault.
#[derive(Debug)]
struct UsageError(anyhow::Error);

fn usage<E: Into<anyhow::Error>>(e: E) -> UsageError {
    UsageError(e.into())
}

fn config(cli: &Cli, budget: Option<u64>) -> SolverConfig {
    let mut c = SolverConfig {
        set_cap: cli.seed_cap,
        rep_cap: cli.rep_cap,
        ..SolverConfig::default()
    };
    if let Some(b) = budget {
        c.budget = b;
    }
    c
}

fn read_values(path: &PathBuf) -> anyhow::Result<BTreeMap<u64, Value>> {
    let raw =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let map: BTreeMap<String, Value> =
        serde_json::from_str(&raw).with_context(|| format!("parsing {}", path.display()))?;
    map.into_iter()
        .map(|(key, v)| {
            let n = key
                .trim()
                .parse::<u64>()
                .map_err(|_| anyhow!("key {key:?} is not a positive integer"))?;
            Ok((n, v))
        })
        .collect()
}

fn solve_error(e: &SolveError) -> Json {
    match e {
        SolveError::BudgetExceeded { revisions, partial } => json!({
            "error": e.to_string(),
            "revisions": revisions,
            "partial": partial,
        }),
        _ => json!({ "error": e.to_string() }),
    }
}

fn run(cli: &Cli) -> Result<Outcome, UsageError> {
    let out = match &cli.command {
        Command::Repr { n, k, limit } => {
            let e = enumerate(*n, *k, *limit);
            let total = count(*n, *k);
            let mut text = format!("{n} as {k} positive squares: {total} representation(s)\n");
            for r in &e.representations {
                writeln!(text, "  {r}").ok();
            }
            if e.truncated {
                writeln!(text, "  (truncated at {limit})").ok();
            }
            let reps: Vec<&[u64]> = e.representations.iter().map(|r| r.parts()).collect();
            Outcome::new(
                json!({
                    "count": total.to_string(),
                    "representations": reps,
                    "truncated": e.truncated,
                }),
                true,
                text,
            )
        }
        Command::Exceptions { k, bound } => {
            let set = exceptional_set(*k, *bound);
            let text = format!("k = {k}, n <= {bound}: {set:?}\n");
            Outcome::new(json!({ "exceptions": set }), true, text)
        }
        Command::VerifyDubouis { k, bound } => {
            let report = verify_dubouis(*k, *bound).map_err(usage)?;
            let mut result = serde_json::to_value(&report).map_err(usage)?;
            let mut text = format!(
                "k = {k}, n <= {bound}: computed {:?}, closed form {:?}, agree = {}\n",
                report.computed, report.closed_form, report.agree
            );
            if *k == 5 {
                let reading = classify_k5_reading(*bound);
                writeln!(text, "k = 5 reading: {reading:?}").ok();
                result["k5_reading"] = serde_json::to_value(reading).map_err(usage)?;
            }
            Ok(Outcome {
                result,
                ok: report.agree,
                text,
            })
        }
        Command::Solve {
            k,
            bound,
            budget,
            trace,
        } => {
            if *k < 2 || *bound < *k as u64 {
                return Err(usage(anyhow!("solve needs k >= 2 and bound >= k")));
            }
            match solve(*k, *bound, config(cli, *budget)) {
                Ok(report) => {
                    let mut text = format!(
                        "k = {k}, bound = {bound}: {} pinned, {} unresolved, identity preserved = {}\n",
                        report.pinned.len(),
                        report.unresolved.len(),
                        report.identity_preserved
                    );
                    for u in &report.unresolved {
                        writeln!(text, "  f({}) in {}", u.n, u.candidates).ok();
                    }
                    if *trace {
                        for s in &report.steps {
                            writeln!(
                                text,
                                "  #{} {:?} {}: {} -> {} via {}",
                                s.index, s.rule, s.atom, s.before, s.after, s.equation
                            )
                            .ok();
                        }
                    }
                    let mut result = serde_json::to_value(&report).map_err(usage)?;
                    if !*trace {
                        if let Some(obj) = result.as_object_mut() {
                            obj.remove("steps");
                        }
                    }
                    Ok(Outcome {
                        result,
                        ok: true,
                        text,
                    })
                }
                Err(e) => Outcome::new(solve_error(&e), false, format!("{e}\n")),
            }
        }
        Command::Replay { k } => match replay_script(*k) {
            Ok(t) => {
                let mut text = String::new();
                for b in &t.blocks {
                    writeln!(text, "{}", b.name).ok();
                    for c in &b.claims {
                        writeln!(
                            text,
                            "  {} [{}]",
                            c.claim,
                            if c.holds { "holds" } else { "fails" }
                        )
                        .ok();
                    }
                }
                writeln!(text, "identity preserved = {}", t.identity_preserved).ok();
                let ok = t.identity_preserved;
                Outcome::new(t, ok, text)
            }
            Err(e) => Outcome::new(json!({ "error": e.to_string() }), false, format!("{e}\n")),
        },
        Command::Check { k, bound, values } => {
            let vals = read_values(values).map_err(usage)?;
            match check_function(&vals, *k, *bound, cli.rep_cap) {
                Ok(violations) => {
                    let mut text = format!("{} violation(s)\n", violations.len());
                    for v in &violations {
                        writeln!(text, "  {}: lhs {}, rhs {}", v.constraint, v.lhs, v.rhs).ok();
                    }
                    let ok = violations.is_empty();
                    Outcome::new(json!({ "violations": violations }), ok, text)
                }
                Err(e) => return Err(usage(e)),
            }
        }
        Command::Frobenius { a, b } => {
            let pair = SemigroupPair::new(*a, *b).map_err(usage)?;
            let g = frobenius_number(pair);
            let gaps = nonrepresentable_set(pair);
            let text = format!("Frobenius number of {a} and {b}: {g}\ngaps: {gaps:?}\n");
            Outcome::new(
                json!({ "frobenius_number": g, "nonrepresentable": gaps }),
                true,
                text,
            )
        }
        Command::Theorem { k, bound } => match theorem_check(*k, *bound, config(cli, None)) {
            Ok(report) => {
                let mut text = format!("{}: all passed = {}\n", report.case, report.all_passed);
                for c in &report.checks {
                    writeln!(
                        text,
                        "  [{}] {}: {}",
                        if c.passed { "pass" } else { "FAIL" },
                        c.name,
                        c.detail
                    )
                    .ok();
                }
                let ok = report.all_passed;
                Outcome::new(report, ok, text)
            }
            Err(SolveError::UnsupportedK(_)) if *k >= 2 && *bound >= *k as u64 => {
                let explored = solve(*k, *bound, config(cli, None));
                let payload = match &explored {
                    Ok(r) => json!({ "verdict": null, "exploration": r }),
                    Err(e) => json!({ "verdict": null, "exploration": solve_error(e) }),
                };
                let text = match &explored {
                    Ok(r) => format!(
                        "k = {k} is outside the theorem; exploration pinned {} of {bound}\n",
                        r.pinned.len()
                    ),
                    Err(e) => format!("k = {k} is outside the theorem; exploration stopped: {e}\n"),
                };
                Outcome::new(payload, explored.is_ok(), text)
            }
            Err(e) => return Err(usage(e)),
        },
    };
    out.map_err(usage)
}

fn emit(s: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(s.as_bytes()).and_then(|()| out.flush());
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(UsageError(e)) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let status = if outcome.ok { "ok" } else { "failed" };
    match cli.format {
        Format::Json => {
            let envelope = json!({
                "command": cli.command.name(),
                "parameters": {
                    "args": &cli.command,
                    "format": cli.format,
                    "seed_cap": cli.seed_cap,
                    "rep_cap": cli.rep_cap,
                },
                "result": outcome.result,
                "status": status,
                "elapsed_ms": start.elapsed().as_millis() as u64,
            });
            match serde_json::to_string_pretty(&envelope) {
                Ok(s) => emit(&format!("{s}\n")),
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(1);
                }
            }
        }
        Format::Text => emit(&format!("{}status: {status}\n", outcome.text)),
    }
    if outcome.ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
