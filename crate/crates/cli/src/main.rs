//! Command-line toolkit for homing vector automata.
//!
//! One binary, `hva`, exposing simulation (`run`, `trace`), language
//! analysis (`enum`, `verify`, `equiv`, `audit`, `unary-dfa`, `bound`),
//! the string/vector codecs (`encode`, `decode`), counter-machine
//! compilation (`compile-counter`), and the built-in machine gallery
//! (`gallery list|export|verify`).
//!
//! Machines are referenced either by file path or as `gallery:NAME`.
//! All output is line-oriented plain text; vectors print as
//! space-separated rational strings.
//!
//! Exit codes: 0 success; 1 reject or disagreement found; 2 invalid
//! input data (unreadable file, parse or validation failure, invalid
//! encoding); 3 resource budget exceeded; 64 usage error. Every failure
//! prints a single diagnostic line `error: <code>: <message>` on stderr.

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use hva::analysis::{
    config_count_bound, cross_check, entry_bound, enumerate_language, equivalence, growth_audit,
    unary_dfa_extract, AnalysisError, AnalysisOptions, CheckResult, EquivalenceResult, Extraction,
};
use hva::counter::{compile_blind, compile_one_counter, CounterDef, CounterMachine};
use hva::gallery;
use hva::machine::{Hva, HvaDef, RunError, RunLimits};
use hva::rational::Rational;
use hva::sb::{gsb_decode, gsb_encode, sb_decode, sb_encode, CodecError};
use hva::RVector;
use num_bigint::BigInt;
use std::str::FromStr;

#[derive(Parser)]
#[command(
    name = "hva",
    version,
    about = "Homing vector automata: simulation, codecs, compilation, and language analysis",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a machine on one input and print accept or reject.
    Run {
        /// Machine file path or gallery:NAME.
        machine: String,
        /// Input string, one character per symbol.
        input: Option<String>,
        /// Input as comma-separated symbols (for multi-character symbols).
        #[arg(long)]
        symbols: Option<String>,
        /// Configuration-set size budget.
        #[arg(long, default_value_t = 100_000)]
        max_configs: usize,
        /// Step budget (default: unlimited).
        #[arg(long)]
        max_steps: Option<u64>,
    },
    /// Print the configuration set after every prefix of the input.
    Trace {
        machine: String,
        input: Option<String>,
        #[arg(long)]
        symbols: Option<String>,
        #[arg(long, default_value_t = 100_000)]
        max_configs: usize,
        #[arg(long)]
        max_steps: Option<u64>,
    },
    /// List every accepted string up to a length bound, shortest first.
    #[command(name = "enum")]
    Enumerate {
        machine: String,
        /// Maximum input length to enumerate.
        #[arg(long)]
        maxlen: usize,
        /// Parallel worker count (default 1 for deterministic timing).
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long, default_value_t = 100_000)]
        max_configs: usize,
        #[arg(long)]
        max_steps: Option<u64>,
    },
    /// Compare a machine against a named oracle predicate on all strings
    /// up to a length bound.
    Verify {
        machine: String,
        /// Oracle name (a gallery entry's reference predicate). Defaults
        /// to the machine's own entry when the machine is gallery:NAME.
        #[arg(long)]
        oracle: Option<String>,
        #[arg(long)]
        maxlen: usize,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long, default_value_t = 100_000)]
        max_configs: usize,
        #[arg(long)]
        max_steps: Option<u64>,
    },
    /// Compare two machines on all strings up to a length bound.
    Equiv {
        left: String,
        right: String,
        #[arg(long)]
        maxlen: usize,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long, default_value_t = 100_000)]
        max_configs: usize,
        #[arg(long)]
        max_steps: Option<u64>,
    },
    /// Encode a string as its integer vector.
    Encode {
        /// Alphabet size.
        #[arg(long)]
        k: usize,
        /// Binary input over {0,1} (plain-string form, --k 2 only).
        input: Option<String>,
        /// Input as comma-separated canonical symbols a_1..a_k.
        #[arg(long)]
        symbols: Option<String>,
    },
    /// Decode an integer vector back to its string.
    Decode {
        /// Alphabet size.
        #[arg(long)]
        k: usize,
        /// Vector as space-separated rational strings, e.g. "5 2".
        vector: String,
    },
    /// Compile a counter-machine definition into a vector machine.
    CompileCounter {
        /// Counter-machine definition file.
        file: String,
    },
    /// Built-in machine gallery.
    Gallery {
        #[command(subcommand)]
        command: GalleryCommand,
    },
    /// Print the worst-case growth bounds for given parameters.
    Bound {
        /// State count (enables the configuration-count bound).
        #[arg(long)]
        s: Option<usize>,
        /// Magnitude bound on matrix entries.
        #[arg(long)]
        m: String,
        /// Vector dimension.
        #[arg(long)]
        k: usize,
        /// Input length.
        #[arg(long)]
        n: usize,
    },
    /// Audit observed vector growth against the worst-case entry bound.
    Audit {
        machine: String,
        #[arg(long)]
        maxlen: usize,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long, default_value_t = 100_000)]
        max_configs: usize,
        #[arg(long)]
        max_steps: Option<u64>,
    },
    /// Extract an equivalent DFA from a deterministic unary machine.
    UnaryDfa {
        machine: String,
        /// Maximum input length to simulate while hunting for a repeat.
        #[arg(long)]
        budget: usize,
    },
}

#[derive(Subcommand)]
enum GalleryCommand {
    /// List the built-in machines.
    List,
    /// Print a built-in machine's definition file.
    Export { name: String },
    /// Check a built-in machine against its reference predicate.
    Verify {
        name: String,
        #[arg(long)]
        maxlen: usize,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
}

/// A diagnostic destined for stderr: `error: <code>: <message>`.
struct Failure {
    code: &'static str,
    message: String,
    exit: i32,
}

fn failure(code: &'static str, exit: i32, message: impl ToString) -> Failure {
    // The diagnostic contract is one line per error; fold multi-line
    // messages (validation violation lists) onto it.
    let message = message
        .to_string()
        .lines()
        .collect::<Vec<_>>()
        .join("; ");
    Failure {
        code,
        message,
        exit,
    }
}

fn usage(message: impl ToString) -> Failure {
    failure("usage", 64, message)
}

fn run_error(e: RunError) -> Failure {
    match e {
        RunError::UnknownSymbol { .. } => failure("unknown-symbol", 2, e),
        RunError::ConfigBudget { .. } | RunError::StepBudget { .. } => failure("budget", 3, e),
    }
}

fn analysis_error(e: AnalysisError) -> Failure {
    let (code, exit) = match &e {
        AnalysisError::Budget { .. } => ("budget", 3),
        AnalysisError::AlphabetMismatch { .. } => ("alphabet-mismatch", 2),
        AnalysisError::BoundViolation { .. } => ("bound-violation", 1),
        AnalysisError::NotUnary { .. } => ("not-unary", 2),
        AnalysisError::NotDeterministic { .. } => ("not-deterministic", 2),
        AnalysisError::DfaMismatch { .. } => ("dfa-mismatch", 1),
    };
    failure(code, exit, e)
}

fn codec_error(e: CodecError) -> Failure {
    let code = match &e {
        CodecError::NonBinarySymbol { .. } => "non-binary-symbol",
        CodecError::SymbolOutOfRange { .. } => "symbol-out-of-range",
        CodecError::AlphabetTooSmall { .. } => "alphabet-too-small",
        CodecError::DimensionMismatch { .. } => "dimension-mismatch",
        CodecError::InvalidEncoding(_) => "invalid-encoding",
    };
    failure(code, 2, e)
}

/// Loads a machine from a definition file or the gallery.
fn load_machine(spec: &str) -> Result<Hva, Failure> {
    if let Some(name) = spec.strip_prefix("gallery:") {
        return Ok(gallery::by_name(name)
            .map_err(|e| failure("gallery", 2, e))?
            .machine);
    }
    let text =
        std::fs::read_to_string(spec).map_err(|e| failure("io", 2, format!("{spec}: {e}")))?;
    let def = HvaDef::from_json(&text).map_err(|e| failure("parse", 2, format!("{spec}: {e}")))?;
    Hva::try_from(def).map_err(|e| failure("validation", 2, e))
}

/// Resolves the input for run/trace: a plain string or comma-separated
/// symbols, but not both.
fn input_tokens(
    machine: &Hva,
    input: &Option<String>,
    symbols: &Option<String>,
) -> Result<Vec<usize>, Failure> {
    match (input, symbols) {
        (Some(_), Some(_)) => Err(usage("pass the input either as INPUT or as --symbols, not both")),
        (Some(s), None) => machine.tokenize(s).map_err(run_error),
        (None, Some(csv)) => machine.tokenize_csv(csv).map_err(run_error),
        (None, None) => Err(usage("an input is required: INPUT or --symbols LIST")),
    }
}

fn options(jobs: usize, max_configs: usize, max_steps: Option<u64>) -> AnalysisOptions {
    AnalysisOptions {
        limits: RunLimits {
            max_configs,
            max_steps,
        },
        jobs,
    }
}

/// Runs a machine-vs-oracle comparison and prints the verdict.
fn report_verification(
    machine: &Hva,
    oracle_name: &str,
    maxlen: usize,
    opts: &AnalysisOptions,
) -> Result<i32, Failure> {
    let entry = gallery::by_name(oracle_name).map_err(|e| failure("gallery", 2, e))?;
    let reference = |s: &str| (entry.reference)(s);
    match cross_check(machine, &reference, maxlen, opts).map_err(analysis_error)? {
        CheckResult::Pass { strings_checked } => {
            println!("pass: {strings_checked} strings checked, no disagreements");
            Ok(0)
        }
        CheckResult::Disagreement {
            input,
            machine_accepts,
            reference_accepts,
        } => {
            println!(
                "disagreement: input {:?} machine={} oracle={}",
                input,
                verdict(machine_accepts),
                verdict(reference_accepts)
            );
            Ok(1)
        }
    }
}

fn verdict(accepted: bool) -> &'static str {
    if accepted {
        "accept"
    } else {
        "reject"
    }
}

/// Parses comma-separated canonical symbols a_1..a_k into 0-based indices.
fn parse_canonical(csv: &str, k: usize) -> Result<Vec<usize>, Failure> {
    if csv.is_empty() {
        return Ok(Vec::new());
    }
    csv.split(',')
        .map(|token| {
            let index: usize = token
                .strip_prefix("a_")
                .and_then(|digits| digits.parse().ok())
                .filter(|&j| (1..=k).contains(&j))
                .ok_or_else(|| {
                    failure(
                        "parse",
                        2,
                        format!("symbol {token:?} is not one of the canonical names a_1..a_{k}"),
                    )
                })?;
            Ok(index - 1)
        })
        .collect()
}

fn parse_vector(text: &str) -> Result<RVector, Failure> {
    let entries = text
        .split_whitespace()
        .map(|t| {
            Rational::from_str(t)
                .map_err(|e| failure("parse", 2, format!("bad rational {t:?}: {e}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    RVector::new(entries).map_err(|e| failure("parse", 2, e))
}

fn dispatch(command: Command) -> Result<i32, Failure> {
    match command {
        Command::Run {
            machine,
            input,
            symbols,
            max_configs,
            max_steps,
        } => {
            let machine = load_machine(&machine)?;
            let tokens = input_tokens(&machine, &input, &symbols)?;
            let limits = RunLimits {
                max_configs,
                max_steps,
            };
            let result = machine.run_symbols(&tokens, &limits).map_err(run_error)?;
            println!("{}", verdict(result.accepted));
            Ok(if result.accepted { 0 } else { 1 })
        }
        Command::Trace {
            machine,
            input,
            symbols,
            max_configs,
            max_steps,
        } => {
            let machine = load_machine(&machine)?;
            let tokens = input_tokens(&machine, &input, &symbols)?;
            let limits = RunLimits {
                max_configs,
                max_steps,
            };
            let steps = machine
                .trace_symbols(&tokens, &limits)
                .map_err(run_error)?;
            for (i, configs) in steps.iter().enumerate() {
                let rendered = if configs.is_empty() {
                    "-".to_string()
                } else {
                    configs
                        .iter()
                        .map(|c| format!("{} [{}]", machine.state_name(c.state), c.vector))
                        .collect::<Vec<_>>()
                        .join(" ; ")
                };
                println!("{i}: {rendered}");
            }
            let result = machine.run_symbols(&tokens, &limits).map_err(run_error)?;
            println!("{}", verdict(result.accepted));
            Ok(if result.accepted { 0 } else { 1 })
        }
        Command::Enumerate {
            machine,
            maxlen,
            jobs,
            max_configs,
            max_steps,
        } => {
            let machine = load_machine(&machine)?;
            let words = enumerate_language(&machine, maxlen, &options(jobs, max_configs, max_steps))
                .map_err(analysis_error)?;
            for word in words {
                println!("{word}");
            }
            Ok(0)
        }
        Command::Verify {
            machine,
            oracle,
            maxlen,
            jobs,
            max_configs,
            max_steps,
        } => {
            let oracle_name = match (&oracle, machine.strip_prefix("gallery:")) {
                (Some(name), _) => name.clone(),
                (None, Some(name)) => name.to_string(),
                (None, None) => {
                    return Err(usage(
                        "--oracle NAME is required unless the machine is gallery:NAME",
                    ))
                }
            };
            let machine = load_machine(&machine)?;
            report_verification(
                &machine,
                &oracle_name,
                maxlen,
                &options(jobs, max_configs, max_steps),
            )
        }
        Command::Equiv {
            left,
            right,
            maxlen,
            jobs,
            max_configs,
            max_steps,
        } => {
            let left = load_machine(&left)?;
            let right = load_machine(&right)?;
            let opts = options(jobs, max_configs, max_steps);
            match equivalence(&left, &right, maxlen, &opts).map_err(analysis_error)? {
                EquivalenceResult::Pass { strings_checked } => {
                    println!("pass: {strings_checked} strings checked, machines agree");
                    Ok(0)
                }
                EquivalenceResult::Disagreement {
                    input,
                    left_accepts,
                    right_accepts,
                } => {
                    println!(
                        "disagreement: input {:?} left={} right={}",
                        input,
                        verdict(left_accepts),
                        verdict(right_accepts)
                    );
                    Ok(1)
                }
            }
        }
        Command::Encode { k, input, symbols } => {
            let vector = match (&input, &symbols) {
                (Some(_), Some(_)) => {
                    return Err(usage("pass the input either as INPUT or as --symbols, not both"))
                }
                (None, None) => {
                    return Err(usage("an input is required: INPUT or --symbols LIST"))
                }
                (Some(s), None) => {
                    if k != 2 {
                        return Err(usage(
                            "plain input strings are binary (--k 2); use --symbols a_1,... \
                             for other alphabet sizes",
                        ));
                    }
                    sb_encode(s).map_err(codec_error)?
                }
                (None, Some(csv)) => {
                    let word = parse_canonical(csv, k)?;
                    gsb_encode(&word, k).map_err(codec_error)?
                }
            };
            println!("{vector}");
            Ok(0)
        }
        Command::Decode { k, vector } => {
            let vector = parse_vector(&vector)?;
            if k == 2 {
                println!("{}", sb_decode(&vector).map_err(codec_error)?);
            } else {
                let word = gsb_decode(&vector, k).map_err(codec_error)?;
                let names: Vec<String> = word.iter().map(|j| format!("a_{}", j + 1)).collect();
                println!("{}", names.join(","));
            }
            Ok(0)
        }
        Command::CompileCounter { file } => {
            let text = std::fs::read_to_string(&file)
                .map_err(|e| failure("io", 2, format!("{file}: {e}")))?;
            let def = CounterDef::from_json(&text)
                .map_err(|e| failure("parse", 2, format!("{file}: {e}")))?;
            let machine =
                CounterMachine::try_from(def).map_err(|e| failure("validation", 2, e))?;
            let compiled = if machine.is_blind() {
                compile_blind(&machine)
            } else {
                compile_one_counter(&machine)
            }
            .map_err(|e| failure("compile", 2, e))?;
            println!("{}", compiled.to_json());
            Ok(0)
        }
        Command::Gallery { command } => match command {
            GalleryCommand::List => {
                for entry in gallery::all() {
                    println!("{}\t{}", entry.name, entry.notes);
                }
                Ok(0)
            }
            GalleryCommand::Export { name } => {
                let entry = gallery::by_name(&name).map_err(|e| failure("gallery", 2, e))?;
                println!("{}", entry.machine.def().to_json());
                Ok(0)
            }
            GalleryCommand::Verify { name, maxlen, jobs } => {
                let entry = gallery::by_name(&name).map_err(|e| failure("gallery", 2, e))?;
                report_verification(
                    &entry.machine,
                    &name,
                    maxlen,
                    &options(jobs, 100_000, None),
                )
            }
        },
        Command::Bound { s, m, k, n } => {
            let m = BigInt::from_str(&m)
                .map_err(|e| failure("parse", 2, format!("bad integer {m:?}: {e}")))?;
            if m < BigInt::from(0) {
                return Err(failure("parse", 2, "the entry magnitude m must be nonnegative"));
            }
            println!("entry_bound: {}", entry_bound(&m, k, n));
            if let Some(s) = s {
                println!("config_count_bound: {}", config_count_bound(s, &m, k, n));
            }
            Ok(0)
        }
        Command::Audit {
            machine,
            maxlen,
            jobs,
            max_configs,
            max_steps,
        } => {
            let machine = load_machine(&machine)?;
            let report = growth_audit(&machine, maxlen, &options(jobs, max_configs, max_steps))
                .map_err(analysis_error)?;
            println!("machine: {}", report.machine);
            println!("m: {}", report.m);
            println!("dimension: {}", report.dimension);
            println!("states: {}", report.states);
            println!("entry_premise: {}", report.entry_premise);
            println!("integer_machine: {}", report.integer_machine);
            for step in &report.steps {
                let configs = step
                    .config_count_bound
                    .as_ref()
                    .map_or_else(|| "-".to_string(), |b| b.to_string());
                println!(
                    "length {}: max_abs_entry={} entry_bound={} config_count_bound={}",
                    step.length, step.max_abs_entry, step.entry_bound, configs
                );
            }
            println!("ok: no bound violations up to length {maxlen}");
            Ok(0)
        }
        Command::UnaryDfa { machine, budget } => {
            let machine = load_machine(&machine)?;
            match unary_dfa_extract(&machine, budget).map_err(analysis_error)? {
                Extraction::Dfa(dfa) => {
                    println!("states: {}", dfa.state_count());
                    println!("initial: {}", dfa.initial);
                    let accepting: Vec<String> = (0..dfa.state_count())
                        .filter(|&i| dfa.accepting[i])
                        .map(|i| i.to_string())
                        .collect();
                    println!("accepting: {}", accepting.join(" "));
                    let successors: Vec<String> =
                        dfa.successor.iter().map(|s| s.to_string()).collect();
                    println!("successor: {}", successors.join(" "));
                    println!("stem: {}", dfa.stem);
                    println!("period: {}", dfa.period);
                    Ok(0)
                }
                Extraction::Undetermined { lengths_simulated } => Err(failure(
                    "undetermined",
                    3,
                    format!(
                        "no accepting-configuration repeat within budget \
                         ({lengths_simulated} lengths simulated)"
                    ),
                )),
            }
        }
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                std::process::exit(0);
            }
            let rendered = e.to_string();
            let mut lines = rendered.lines();
            let first = lines.next().unwrap_or("invalid arguments");
            let first = first.strip_prefix("error: ").unwrap_or(first);
            eprintln!("error: usage: {first}");
            for line in lines {
                eprintln!("{line}");
            }
            std::process::exit(64);
        }
    };
    match dispatch(cli.command) {
        Ok(code) => std::process::exit(code),
        Err(f) => {
            eprintln!("error: {}: {}", f.code, f.message);
            std::process::exit(f.exit);
        }
    }
}
