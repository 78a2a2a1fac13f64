//! `qc`: parse, print, count, transform, and exhaustively check
//! (∈,=)-formulas; run the set-theoretic constructions; and run the
//! whole verification suite.
//!
//! Exit codes: 0 success/valid, 1 counterexample or property failure,
//! 2 usage or parse error.

use std::io::Read;
use std::path::Path;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qc_core::catalog;
use qc_core::formula::Formula;
use qc_core::hf::{self, HfSet};
use qc_core::model::{self, FreeVarPolicy, Verdict};
use qc_core::parser::parse;
use qc_core::printer::print;
use qc_core::suite::{self, Fault, Status, SuiteParams};
use qc_core::transforms;

#[derive(Parser)]
#[command(
    name = "qc",
    about = "A toolkit for (∈,=)-formulas: five-quantifier choice, finite model checking, hereditarily finite sets",
    version
)]
struct Cli {
    /// Worker threads for the exhaustive checker (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a formula and print its canonical form.
    Parse(FormulaArg),
    /// Alias of `parse`: canonical minimal-parenthesis rendering.
    Print(FormulaArg),
    /// Count quantifiers of a formula, or symbols of an official rendering.
    Count {
        #[command(flatten)]
        input: FormulaArg,
        /// Count quantifier occurrences (the default).
        #[arg(long, conflicts_with = "tokens")]
        quantifiers: bool,
        /// Count symbols of a catalog official rendering.
        #[arg(long)]
        tokens: bool,
    },
    /// Rewrite toward prenex form, optionally verifying the trace.
    Prenex {
        #[command(flatten)]
        input: FormulaArg,
        /// Exhaustively check every rewrite step up to this size.
        #[arg(long, value_name = "NMAX")]
        verify: Option<usize>,
    },
    /// Exhaustively check validity over all structures of size ≤ nmax.
    CheckValid {
        #[command(flatten)]
        input: FormulaArg,
        #[arg(long, default_value_t = 3)]
        nmax: usize,
        /// Treat free variables as universally quantified.
        #[arg(long)]
        close_free: bool,
    },
    /// Exhaustively check equivalence of two formulas.
    CheckEquiv {
        first: String,
        second: String,
        #[arg(long, default_value_t = 3)]
        nmax: usize,
        /// Treat both arguments as literal text, never catalog names.
        #[arg(long)]
        literal: bool,
    },
    /// List or show the named formulas.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Operations on hereditarily finite sets (braces or decimal codes).
    Hf {
        #[command(subcommand)]
        action: HfAction,
    },
    /// Run every checkable claim and report pass/fail per check.
    VerifyPaper {
        /// Override every check's pinned size bound.
        #[arg(long)]
        nmax: Option<usize>,
        /// Universe stage for the set sweeps and the bridge (3 or 4).
        #[arg(long, default_value_t = 4)]
        rank: usize,
        /// Seed for the randomized round-trip battery.
        #[arg(long, default_value_t = qc_core::gen::DEFAULT_SEED)]
        seed: u64,
        /// Number of random round-trip formulas.
        #[arg(long, default_value_t = 10_000)]
        count: usize,
        /// Write the full JSON report here.
        #[arg(long, value_name = "OUT")]
        json: Option<std::path::PathBuf>,
        /// Wall-clock budget in seconds; checks cut off by it are
        /// reported as failed, flagging the report incomplete.
        #[arg(long, value_name = "SECS")]
        budget: Option<u64>,
        /// Corrupt one artifact to demonstrate the suite notices
        /// (ac**-flip-quantifier, b-drop-conjunct, choice-wrong-patch).
        #[arg(long, value_name = "FAULT")]
        inject_fault: Option<String>,
    },
}

#[derive(Subcommand)]
enum CatalogAction {
    /// All catalog names with shape summaries.
    List,
    /// Official rendering, canonical form, and metadata of one entry.
    Show { name: String },
}

#[derive(Subcommand)]
enum HfAction {
    /// z_x: the elements of z lying in no other element of x.
    Phi {
        z: String,
        x: String,
        #[arg(long)]
        rank: Option<usize>,
    },
    /// x*: the image of x under phi.
    Star {
        x: String,
        #[arg(long)]
        rank: Option<usize>,
    },
    /// Run the choice-set construction on x and show the trace.
    Choose {
        x: String,
        #[arg(long)]
        rank: Option<usize>,
    },
    /// Is y a choice-set for x?
    Check {
        y: String,
        x: String,
        #[arg(long)]
        rank: Option<usize>,
    },
}

#[derive(Args)]
struct FormulaArg {
    /// Catalog name, file path, `-` for stdin, or literal formula text.
    input: String,
    /// Treat the argument as literal text, never a catalog name.
    #[arg(long)]
    literal: bool,
}

enum CliError {
    /// Bad input: exit 2.
    Usage(String),
    /// A check came back negative: exit 1 (output already printed).
    Falsified,
}

impl From<String> for CliError {
    fn from(s: String) -> Self {
        CliError::Usage(s)
    }
}

fn resolve_text(input: &str) -> Result<Option<String>, CliError> {
    if input == "-" {
        let mut text = String::new();
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| CliError::Usage(format!("cannot read stdin: {e}")))?;
        return Ok(Some(text));
    }
    if Path::new(input).is_file() {
        let text = std::fs::read_to_string(input)
            .map_err(|e| CliError::Usage(format!("cannot read {input}: {e}")))?;
        return Ok(Some(text));
    }
    Ok(None)
}

/// Catalog-first resolution: name, then stdin/file, then literal text.
fn resolve_formula(input: &str, literal: bool) -> Result<Formula, CliError> {
    if !literal {
        if let Ok(entry) = catalog::get(input) {
            return Ok(entry.formula.clone());
        }
    }
    let text = resolve_text(input)?.unwrap_or_else(|| input.to_owned());
    parse(&text).map_err(|e| CliError::Usage(format!("parse error: {e}")))
}

fn resolve_set(input: &str, rank_cap: Option<usize>) -> Result<HfSet, CliError> {
    let set: HfSet = input
        .parse()
        .map_err(|e| CliError::Usage(format!("{e}")))?;
    let cap = rank_cap.unwrap_or_else(hf::max_rank);
    if set.rank() > cap {
        return Err(CliError::Usage(format!(
            "set {set} has rank {}, over the cap {cap} (raise --rank or QC_MAX_RANK)",
            set.rank()
        )));
    }
    Ok(set)
}

fn print_verdict(verdict: &Verdict) -> Result<(), CliError> {
    match verdict {
        Verdict::ValidUpTo(n) => {
            println!("valid up to size {n} (no counterexample among all structures of size ≤ {n})");
            Ok(())
        }
        Verdict::Counterexample(cex) => {
            let witness = cex.to_witness();
            println!(
                "counterexample: {}",
                serde_json::to_string_pretty(&witness).expect("witness serializes")
            );
            Err(CliError::Falsified)
        }
    }
}

fn run() -> Result<(), CliError> {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        // The checker partitions structure enumeration over this pool;
        // the verdict does not depend on the thread count.
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot configure {jobs} worker(s): {e}")))?;
    }
    match cli.command {
        Command::Parse(arg) | Command::Print(arg) => {
            let f = resolve_formula(&arg.input, arg.literal)?;
            println!("{}", print(&f));
            Ok(())
        }
        Command::Count {
            input,
            quantifiers: _,
            tokens,
        } => {
            if tokens {
                let arg = match resolve_text(&input.input)? {
                    Some(text) => text.trim().to_owned(),
                    None => input.input.clone(),
                };
                let count = catalog::token_count(&arg)
                    .map_err(|e| CliError::Usage(e.to_string()))?;
                println!("{count}");
            } else {
                let f = resolve_formula(&input.input, input.literal)?;
                println!("{}", f.quantifier_count());
            }
            Ok(())
        }
        Command::Prenex { input, verify } => {
            let f = resolve_formula(&input.input, input.literal)?;
            let (prenexed, trace) =
                transforms::prenex(&f).map_err(|e| CliError::Usage(e.to_string()))?;
            println!("{}", print(&prenexed));
            match prenexed.prefix_pattern() {
                Ok(pattern) => println!("prefix: {pattern}"),
                Err(e) => println!("not prenex ({e})"),
            }
            if let Some(nmax) = verify {
                let verdict = trace
                    .verify(nmax)
                    .map_err(|e| CliError::Usage(e.to_string()))?;
                match verdict {
                    transforms::TraceVerdict::ValidUpTo(n) => {
                        println!("trace: {} steps, all valid up to size {n}", trace.len());
                    }
                    transforms::TraceVerdict::StepCounterexample {
                        step,
                        rule,
                        counterexample,
                    } => {
                        println!(
                            "trace: step {step} ({}) falsified: {}",
                            rule.as_str(),
                            serde_json::to_string(&counterexample.to_witness())
                                .expect("witness serializes")
                        );
                        return Err(CliError::Falsified);
                    }
                }
            }
            Ok(())
        }
        Command::CheckValid {
            input,
            nmax,
            close_free,
        } => {
            let f = resolve_formula(&input.input, input.literal)?;
            let policy = if close_free {
                FreeVarPolicy::CloseUniversally
            } else {
                FreeVarPolicy::Reject
            };
            let verdict = model::check_valid(&f, nmax, policy)
                .map_err(|e| CliError::Usage(e.to_string()))?;
            print_verdict(&verdict)
        }
        Command::CheckEquiv {
            first,
            second,
            nmax,
            literal,
        } => {
            let f = resolve_formula(&first, literal)?;
            let g = resolve_formula(&second, literal)?;
            let verdict =
                model::check_equiv(&f, &g, nmax).map_err(|e| CliError::Usage(e.to_string()))?;
            print_verdict(&verdict)
        }
        Command::Catalog { action } => {
            match action {
                CatalogAction::List => {
                    for entry in catalog::entries() {
                        println!(
                            "{:<16} quantifiers={} free={{{}}}  {}",
                            entry.name,
                            entry.formula.quantifier_count(),
                            entry.free_vars.join(","),
                            entry.citation
                        );
                    }
                }
                CatalogAction::Show { name } => {
                    let entry =
                        catalog::get(&name).map_err(|e| CliError::Usage(e.to_string()))?;
                    println!("name:      {}", entry.name);
                    println!("citation:  {}", entry.citation);
                    println!("official:  {}", entry.official);
                    println!("canonical: {}", print(&entry.formula));
                    println!("free:      {{{}}}", entry.free_vars.join(","));
                    println!("quantifiers: {}", entry.formula.quantifier_count());
                    if let Some(note) = entry.note {
                        println!("note:      {note}");
                    }
                }
            }
            Ok(())
        }
        Command::Hf { action } => match action {
            HfAction::Phi { z, x, rank } => {
                let z = resolve_set(&z, rank)?;
                let x = resolve_set(&x, rank)?;
                println!("{}", hf::phi(z, x));
                Ok(())
            }
            HfAction::Star { x, rank } => {
                let x = resolve_set(&x, rank)?;
                let star = hf::star(x).map_err(|e| CliError::Usage(e.to_string()))?;
                println!("{star}");
                Ok(())
            }
            HfAction::Choose { x, rank } => {
                let x = resolve_set(&x, rank)?;
                match hf::construct_choice_set(x) {
                    Ok(trace) => {
                        println!(
                            "{}",
                            serde_json::to_string_pretty(&trace).expect("trace serializes")
                        );
                        Ok(())
                    }
                    Err(e @ hf::HfError::HypothesisNotSatisfied(_)) => {
                        Err(CliError::Usage(e.to_string()))
                    }
                    Err(e) => {
                        eprintln!("{e}");
                        Err(CliError::Falsified)
                    }
                }
            }
            HfAction::Check { y, x, rank } => {
                let y = resolve_set(&y, rank)?;
                let x = resolve_set(&x, rank)?;
                if hf::is_choice_set(y, x) {
                    println!("true");
                    Ok(())
                } else {
                    println!("false");
                    Err(CliError::Falsified)
                }
            }
        },
        Command::VerifyPaper {
            nmax,
            rank,
            seed,
            count,
            json,
            budget,
            inject_fault,
        } => {
            let fault = match inject_fault {
                None => None,
                Some(id) => Some(Fault::from_id(&id).ok_or_else(|| {
                    CliError::Usage(format!(
                        "unknown fault `{id}`; known faults: {}",
                        Fault::ALL.map(|f| f.id()).join(", ")
                    ))
                })?),
            };
            let params = SuiteParams {
                nmax,
                rank,
                seed,
                roundtrip_count: count,
                fault,
                budget: budget.map(std::time::Duration::from_secs),
            };
            let reports =
                suite::verify_paper(&params).map_err(|e| CliError::Usage(e.to_string()))?;
            for report in &reports {
                let status = match report.status {
                    Status::Pass => "pass",
                    Status::Fail => "FAIL",
                };
                println!(
                    "{status}  {:<42} {:>6} ms  {}",
                    report.check, report.millis, report.params
                );
                if let Some(witness) = &report.witness {
                    println!(
                        "      witness: {}",
                        serde_json::to_string(witness).expect("witness serializes")
                    );
                }
            }
            let passed = reports.iter().filter(|r| r.status == Status::Pass).count();
            println!("{passed}/{} checks passed", reports.len());
            if let Some(path) = json {
                let body =
                    serde_json::to_string_pretty(&reports).expect("reports serialize");
                std::fs::write(&path, body)
                    .map_err(|e| CliError::Usage(format!("cannot write {path:?}: {e}")))?;
                println!("report written to {}", path.display());
            }
            if suite::all_passed(&reports) {
                Ok(())
            } else {
                Err(CliError::Falsified)
            }
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Falsified) => ExitCode::from(1),
        Err(CliError::Usage(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}
