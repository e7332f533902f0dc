//! `bmdl`: batch front end. Machine-readable JSON goes to standard output,
//! diagnostics to standard error.
//!
//! Exit codes: 0 affirmative verdict, 1 negative verdict (witness printed),
//! 2 usage or parse error, 3 inconclusive.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bmdl::consistency::{from_assumptions, ConsistencyError};
use bmdl::corpus::{parse_sequent_file, run_corpus};
use bmdl::generate::{bench, BenchConfig};
use bmdl::search::DEFAULT_BUDGET;
use bmdl::{
    build, check_derivation, derives, outer_consistent, parse_formula, parse_problem, parse_sequent, prove,
    AssumptionSet, CalculusConfig, Consistency, CountermodelError, Derivability, Derivation, MModel, ProveOutcome,
    SearchConfig, SearchError, Sequent,
};
use clap::{Parser, Subcommand};
use serde_json::{json, Value};

const AFFIRMATIVE: u8 = 0;
const NEGATIVE: u8 = 1;
const USAGE: u8 = 2;
const INCONCLUSIVE: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "bmdl", version, about = "Prover and model checker for basic Mimamsa deontic logic")]
struct Cli {
    /// Maximum number of visited histories per search.
    #[arg(long, global = true, env = "MDL_BUDGET", default_value_t = DEFAULT_BUDGET)]
    budget: usize,
    /// Restrict initial sequents to shared atoms.
    #[arg(long, global = true)]
    atomic_init: bool,
    /// Loop-check the premisses of two-premiss static rules too.
    #[arg(long = "static-loopcheck", global = true)]
    static_loop_check: bool,
    /// Human-readable output instead of JSON.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand, Debug)]
enum Verb {
    /// Decide a sequent, or the goal of a problem file under its assumptions.
    Prove { input: String },
    /// Produce a certified countermodel for an underivable sequent.
    Countermodel { input: String },
    /// Decide outer consistency of a problem file or of `;`-separated formulas.
    Consistent { input: String },
    /// Validate a model file and evaluate formulas at worlds.
    CheckModel {
        file: PathBuf,
        /// `world::formula`; repeatable.
        #[arg(long)]
        holds: Vec<String>,
        /// Close the accessibility relation before validating.
        #[arg(long)]
        close_rt: bool,
    },
    /// Re-check a derivation file with the kernel.
    CheckProof {
        file: PathBuf,
        /// Assumption sequent the leaves may use; repeatable.
        #[arg(long)]
        assume: Vec<String>,
    },
    /// Run a corpus directory against its manifest.
    Corpus {
        #[arg(default_value = "corpus")]
        dir: PathBuf,
    },
    /// Time the search on seeded random sequents.
    Bench {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Comma-separated sequent sizes.
        #[arg(long, value_delimiter = ',', num_args = 0.., default_values_t = [5usize, 10, 15, 20])]
        buckets: Vec<usize>,
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
}

/// A failure that ends the run with a diagnostic and an exit code.
struct Failure {
    code: u8,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: USAGE,
        message: message.into(),
    }
}

impl From<SearchError> for Failure {
    fn from(e: SearchError) -> Self {
        Failure {
            code: INCONCLUSIVE,
            message: e.to_string(),
        }
    }
}

impl From<ConsistencyError> for Failure {
    fn from(e: ConsistencyError) -> Self {
        match e {
            ConsistencyError::Inconclusive(s) => s.into(),
            ConsistencyError::Countermodel(c) => internal(c),
        }
    }
}

impl From<CountermodelError> for Failure {
    fn from(e: CountermodelError) -> Self {
        match e {
            CountermodelError::Search(s) => s.into(),
            other => internal(other),
        }
    }
}

fn internal(e: impl ToString) -> Failure {
    Failure {
        code: INCONCLUSIVE,
        message: e.to_string(),
    }
}

struct Report {
    code: u8,
    json: Value,
    pretty: String,
}

/// Reads `input` as a file when one exists at that path, else uses it as is.
fn text_of(input: &str) -> Result<(String, bool), Failure> {
    let path = Path::new(input);
    if path.is_file() {
        let text = fs::read_to_string(path).map_err(|e| usage(format!("cannot read {input}: {e}")))?;
        Ok((text, true))
    } else {
        Ok((input.to_string(), false))
    }
}

fn is_problem(input: &str, text: &str) -> bool {
    input.ends_with(".mdl") || text.lines().any(|l| l.trim_start().starts_with("assume "))
}

/// A goal together with its assumptions.
fn problem(input: &str) -> Result<(AssumptionSet, Sequent), Failure> {
    let (text, from_file) = text_of(input)?;
    if is_problem(input, &text) {
        let p = parse_problem(&text).map_err(|e| usage(e.to_string()))?;
        let goal = p.goal.ok_or_else(|| usage(format!("{input} has no goal")))?;
        return Ok((AssumptionSet::new(p.assumptions), goal));
    }
    let goal = if from_file {
        parse_sequent_file(&text)
    } else {
        parse_sequent(&text)
    };
    Ok((AssumptionSet::default(), goal.map_err(|e| usage(e.to_string()))?))
}

fn assumptions(input: &str) -> Result<AssumptionSet, Failure> {
    let (text, _) = text_of(input)?;
    if is_problem(input, &text) {
        let p = parse_problem(&text).map_err(|e| usage(e.to_string()))?;
        return Ok(AssumptionSet::new(p.assumptions));
    }
    let formulas = text
        .split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|s| parse_formula(s).map_err(|e| usage(e.to_string())))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(AssumptionSet::new(formulas))
}

fn derivation_report(code: u8, verdict: &str, d: &Derivation) -> Report {
    Report {
        code,
        json: json!({ "verdict": verdict, "derivation": d.to_json() }),
        pretty: format!("{verdict}\n{}", d.render()),
    }
}

fn model_report(code: u8, verdict: &str, m: &bmdl::CounterModelResult) -> Report {
    Report {
        code,
        json: json!({ "verdict": verdict, "countermodel": m.to_json() }),
        pretty: format!("{verdict}\n{}", m.render()),
    }
}

fn run_prove(input: &str, cfg: SearchConfig) -> Result<Report, Failure> {
    let (a, goal) = problem(input)?;
    match derives(&a, &goal, cfg)? {
        Derivability::Accepted(d) => {
            let d = if a.is_empty() { d } else { from_assumptions(&a, &goal, d) };
            check_derivation(&d, &a.sequents()).map_err(internal)?;
            Ok(derivation_report(AFFIRMATIVE, "derivable", &d))
        }
        Derivability::Rejected(m) => Ok(model_report(NEGATIVE, "underivable", &m)),
    }
}

fn run_countermodel(input: &str, cfg: SearchConfig) -> Result<Report, Failure> {
    let (a, goal) = problem(input)?;
    let goal = a.reduce(&goal);
    match prove(&goal, cfg)? {
        ProveOutcome::Accepted { derivation, .. } => Ok(derivation_report(NEGATIVE, "derivable", &derivation)),
        ProveOutcome::Rejected(trace) => Ok(model_report(AFFIRMATIVE, "underivable", &build(&trace)?)),
    }
}

fn run_consistent(input: &str, cfg: SearchConfig) -> Result<Report, Failure> {
    let a = assumptions(input)?;
    match outer_consistent(&a, cfg)? {
        Consistency::Consistent(m) => Ok(model_report(AFFIRMATIVE, "consistent", &m)),
        Consistency::Inconsistent(d) => Ok(derivation_report(NEGATIVE, "inconsistent", &d)),
    }
}

fn run_check_model(file: &Path, holds: &[String], close_rt: bool) -> Result<Report, Failure> {
    let text = fs::read_to_string(file).map_err(|e| usage(format!("cannot read {}: {e}", file.display())))?;
    let mut m = MModel::from_json_str(&text).map_err(|e| usage(e.to_string()))?;
    if close_rt {
        m.close_reflexive_transitive();
    }
    let mut checks = Vec::new();
    for h in holds {
        let (world, formula) = h
            .split_once("::")
            .ok_or_else(|| usage(format!("`{h}` is not of the form world::formula")))?;
        let f = parse_formula(formula).map_err(|e| usage(e.to_string()))?;
        let value = m.holds(world.trim(), &f).map_err(|e| usage(e.to_string()))?;
        checks.push((world.trim().to_string(), f, value));
    }
    let frame = m.validate_frame();
    let ok = frame.is_ok() && checks.iter().all(|c| c.2);
    let mut pretty = match &frame {
        Ok(()) => "valid frame\n".to_string(),
        Err(v) => format!("invalid frame: {v}\n"),
    };
    for (w, f, v) in &checks {
        pretty.push_str(&format!("{w} :: {f} = {v}\n"));
    }
    Ok(Report {
        code: if ok { AFFIRMATIVE } else { NEGATIVE },
        json: json!({
            "valid": frame.is_ok(),
            "violation": frame.as_ref().err().map(|v| json!({ "condition": v.condition(), "message": v.to_string() })),
            "holds": checks
                .iter()
                .map(|(w, f, v)| json!({ "world": w, "formula": f.to_string(), "value": v }))
                .collect::<Vec<_>>(),
        }),
        pretty,
    })
}

fn run_check_proof(file: &Path, assume: &[String]) -> Result<Report, Failure> {
    let text = fs::read_to_string(file).map_err(|e| usage(format!("cannot read {}: {e}", file.display())))?;
    let d = Derivation::from_json_str(&text).map_err(|e| usage(e.to_string()))?;
    let assumptions = assume
        .iter()
        .map(|s| parse_sequent(s).map_err(|e| usage(e.to_string())))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(match check_derivation(&d, &assumptions) {
        Ok(()) => Report {
            code: AFFIRMATIVE,
            json: json!({ "checked": true, "conclusion": d.conclusion.to_string(), "size": d.size() }),
            pretty: format!("checked: {}\n", d.conclusion),
        },
        Err(e) => Report {
            code: NEGATIVE,
            json: json!({ "checked": false, "path": e.path, "rule": e.rule.to_string(), "reason": e.reason }),
            pretty: format!("rejected: {e}\n"),
        },
    })
}

fn run_corpus_verb(dir: &Path, cfg: SearchConfig) -> Result<Report, Failure> {
    let report = run_corpus(dir, cfg).map_err(|e| usage(e.to_string()))?;
    Ok(Report {
        code: if report.passed() { AFFIRMATIVE } else { NEGATIVE },
        json: serde_json::to_value(&report).expect("report serializes"),
        pretty: format!("{report}\n"),
    })
}

fn run_bench(seed: u64, buckets: Vec<usize>, samples: usize, budget: usize) -> Report {
    let rows = bench(&BenchConfig {
        seed,
        buckets,
        samples,
        budget,
        ..BenchConfig::default()
    });
    let mut pretty = String::from("size  samples  accepted  rejected  inconclusive  median_visited  max_visited  median_us\n");
    for r in &rows {
        pretty.push_str(&format!(
            "{:>4}  {:>7}  {:>8}  {:>8}  {:>12}  {:>14}  {:>11}  {:>9}\n",
            r.size, r.samples, r.accepted, r.rejected, r.inconclusive, r.median_visited, r.max_visited, r.median_micros
        ));
    }
    Report {
        code: AFFIRMATIVE,
        json: serde_json::to_value(&rows).expect("rows serialize"),
        pretty,
    }
}

fn run(cli: Cli) -> Result<Report, Failure> {
    let cfg = SearchConfig {
        budget: cli.budget,
        calculus: CalculusConfig {
            atomic_init: cli.atomic_init,
        },
        static_loop_check: cli.static_loop_check,
        ..SearchConfig::default()
    };
    match cli.verb {
        Verb::Prove { input } => run_prove(&input, cfg),
        Verb::Countermodel { input } => run_countermodel(&input, cfg),
        Verb::Consistent { input } => run_consistent(&input, cfg),
        Verb::CheckModel { file, holds, close_rt } => run_check_model(&file, &holds, close_rt),
        Verb::CheckProof { file, assume } => run_check_proof(&file, &assume),
        Verb::Corpus { dir } => run_corpus_verb(&dir, cfg),
        Verb::Bench { seed, buckets, samples } => Ok(run_bench(seed, buckets, samples, cli.budget)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let pretty = cli.pretty;
    match run(cli) {
        Ok(r) => {
            if pretty {
                print!("{}", r.pretty);
            } else {
                println!("{}", r.json);
            }
            ExitCode::from(r.code)
        }
        Err(f) => {
            eprintln!("bmdl: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
