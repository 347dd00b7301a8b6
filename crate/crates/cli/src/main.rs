use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand};

use streamprod::io::report::{AnalysisReport, EvaluationReport, TraceReport};
use streamprod::io::{export_tpdb, parse_spec, print_spec, ProverConfig};
use streamprod::par::Exec;
use streamprod::strategy::{
    check_productivity, eval_prefix, Budgets, CheckOptions, Outcome, Roots,
};
use streamprod::StreamSpec;

const EXIT_OK: u8 = 0;
const EXIT_NOT_PRODUCTIVE: u8 = 1;
const EXIT_INCONCLUSIVE: u8 = 2;
const EXIT_INPUT: u8 = 3;

/// Productivity analysis for stream specifications.
#[derive(Parser, Debug)]
#[command(name = "streamprod", version)]
struct Cli {
    /// Print an analysis report as JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the stream specification format.
    Validate { file: PathBuf },
    /// Rewrite nested stream patterns into the basic format.
    Unfold {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Compute a prefix of a stream.
    Eval {
        file: PathBuf,
        #[arg(long)]
        term: String,
        #[arg(short = 'n', default_value_t = 10)]
        n: usize,
        #[command(flatten)]
        budgets: BudgetArgs,
    },
    /// Decide productivity where possible.
    Check {
        file: PathBuf,
        /// Comma-separated root terms.
        #[arg(long, conflicts_with = "all_small")]
        roots: Option<String>,
        /// Use every ground stream term up to this size as a root.
        #[arg(long)]
        all_small: Option<usize>,
        /// Prover command; `{}` is replaced by the problem file.
        #[arg(long)]
        prover: Option<String>,
        /// Prover timeout in seconds.
        #[arg(long, default_value_t = 60.0)]
        timeout: f64,
        /// Elements demanded from each root for bounded evidence.
        #[arg(long, default_value_t = 10)]
        prefix: usize,
        /// Analyse roots on the calling thread only.
        #[arg(long)]
        sequential: bool,
        #[command(flatten)]
        budgets: BudgetArgs,
    },
    /// Write the overflow extension in TPDB format.
    Export {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct BudgetArgs {
    #[arg(long)]
    max_steps: Option<usize>,
    #[arg(long)]
    max_size: Option<usize>,
}

impl BudgetArgs {
    fn budgets(&self) -> Budgets {
        let mut budgets = Budgets::default();
        if let Some(n) = self.max_steps {
            budgets.max_steps = n;
        }
        if let Some(n) = self.max_size {
            budgets.max_term_size = n;
        }
        budgets
    }
}

/// An exit code with its message.
struct Exit {
    code: u8,
    message: String,
}

fn input_error(message: impl ToString) -> Exit {
    Exit {
        code: EXIT_INPUT,
        message: message.to_string(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT } else { EXIT_OK });
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(exit) => {
            eprintln!("streamprod: {}", exit.message);
            ExitCode::from(exit.code)
        }
    }
}

fn load(file: &Path) -> Result<(String, StreamSpec), Exit> {
    let text =
        fs::read_to_string(file).map_err(|e| input_error(format!("{}: {e}", file.display())))?;
    let spec = parse_spec(&text).map_err(|e| input_error(format!("{}:{e}", file.display())))?;
    let name = file.file_stem().map_or_else(
        || file.display().to_string(),
        |s| s.to_string_lossy().into_owned(),
    );
    Ok((name, spec))
}

/// Unfolds and validates; invalid input is an input error.
fn load_basic(file: &Path, timings: &mut Vec<(String, f64)>) -> Result<(String, StreamSpec), Exit> {
    let (name, spec) = load(file)?;
    let started = Instant::now();
    let spec = spec.unfold().map_err(input_error)?;
    let report = spec.validate();
    timings.push(("validate".into(), millis(started)));
    if !report.passed() {
        return Err(input_error(format!(
            "{} is not a stream specification\n{report}",
            file.display()
        )));
    }
    Ok((name, spec))
}

fn millis(since: Instant) -> f64 {
    since.elapsed().as_secs_f64() * 1e3
}

fn write_output(output: Option<&Path>, text: &str) -> Result<(), Exit> {
    match output {
        Some(path) => {
            fs::write(path, text).map_err(|e| input_error(format!("{}: {e}", path.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn finish(report: AnalysisReport, timings: Vec<(String, f64)>) -> String {
    let mut report = report;
    report.timings.extend(timings);
    report.to_json()
}

fn run(cli: &Cli) -> Result<u8, Exit> {
    let mut timings = Vec::new();
    match &cli.command {
        Command::Validate { file } => {
            let (name, spec) = load(file)?;
            let started = Instant::now();
            let report = spec.validate();
            timings.push(("validate".into(), millis(started)));
            let passed = report.passed();
            if cli.json {
                let r = AnalysisReport::new(&name, &spec, report, Budgets::default());
                println!("{}", finish(r, timings));
            } else {
                print!("{report}");
            }
            Ok(if passed { EXIT_OK } else { EXIT_INPUT })
        }
        Command::Unfold { file, output } => {
            let (name, spec) = load(file)?;
            let unfolded = spec.unfold().map_err(input_error)?;
            if cli.json {
                let r =
                    AnalysisReport::new(&name, &unfolded, unfolded.validate(), Budgets::default());
                write_output(output.as_deref(), &(finish(r, timings) + "\n"))?;
            } else {
                write_output(output.as_deref(), &print_spec(&unfolded))?;
            }
            Ok(EXIT_OK)
        }
        Command::Eval {
            file,
            term,
            n,
            budgets,
        } => {
            let (name, spec) = load_basic(file, &mut timings)?;
            let t = spec
                .term(term)
                .map_err(|e| input_error(format!("--term: {e}")))?;
            let budgets = budgets.budgets();
            let started = Instant::now();
            let result = eval_prefix(&spec, &t, *n, &budgets);
            timings.push(("eval".into(), millis(started)));
            let (prefix, failure) = match result {
                Ok(prefix) => (prefix, None),
                Err((prefix, failure)) => (prefix, Some(failure)),
            };
            if cli.json {
                let mut r = AnalysisReport::new(&name, &spec, spec.validate(), budgets);
                r.evaluation = Some(EvaluationReport::new(
                    &t,
                    *n,
                    &prefix.values,
                    failure.as_ref(),
                ));
                for (k, trace) in prefix.traces.iter().enumerate() {
                    r.traces
                        .push(TraceReport::new(&format!("element {}", k + 1), trace));
                }
                println!("{}", finish(r, timings));
            } else {
                let values: Vec<String> = prefix.values.iter().map(ToString::to_string).collect();
                println!("[{}]", values.join(", "));
                if let Some(f) = &failure {
                    eprintln!("stopped after {} elements: {f}", values.len());
                }
            }
            Ok(if failure.is_none() {
                EXIT_OK
            } else {
                EXIT_INCONCLUSIVE
            })
        }
        Command::Check {
            file,
            roots,
            all_small,
            prover,
            timeout,
            prefix,
            sequential,
            budgets,
        } => {
            let (name, spec) = load_basic(file, &mut timings)?;
            let roots = match (roots, all_small) {
                (Some(list), _) => Roots::Terms(
                    split_top_level(list)
                        .iter()
                        .map(|t| {
                            spec.term(t)
                                .map_err(|e| input_error(format!("--roots: {e}")))
                        })
                        .collect::<Result<_, _>>()?,
                ),
                (None, Some(size)) => Roots::AllSmall(*size),
                (None, None) => CheckOptions::default().roots,
            };
            if !timeout.is_finite() || *timeout <= 0.0 {
                return Err(input_error("--timeout must be positive"));
            }
            let options = CheckOptions {
                roots,
                budgets: budgets.budgets(),
                prefix_length: *prefix,
                prover: prover
                    .as_ref()
                    .map(|cmd| ProverConfig::new(cmd.clone(), Duration::from_secs_f64(*timeout))),
                exec: if *sequential {
                    Exec::Sequential
                } else {
                    Exec::default()
                },
            };
            let started = Instant::now();
            let verdict = check_productivity(&spec, &options).map_err(input_error)?;
            timings.push(("check".into(), millis(started)));
            if cli.json {
                let r = AnalysisReport::new(&name, &spec, spec.validate(), options.budgets)
                    .with_verdict(&verdict);
                println!("{}", finish(r, timings));
            } else {
                println!("verdict: {}", verdict.outcome);
                println!("certificate: {}", verdict.certificate.kind());
                for note in &verdict.notes {
                    println!("note: {note}");
                }
            }
            Ok(match verdict.outcome {
                Outcome::Productive => EXIT_OK,
                Outcome::NotProductive => EXIT_NOT_PRODUCTIVE,
                Outcome::BoundedProductive(_) | Outcome::Unknown => EXIT_INCONCLUSIVE,
            })
        }
        Command::Export { file, output } => {
            let (name, spec) = load_basic(file, &mut timings)?;
            let extended = spec.extend_with_overflow().map_err(input_error)?;
            let text = export_tpdb(&extended).map_err(input_error)?;
            if cli.json {
                let r = AnalysisReport::new(&name, &spec, spec.validate(), Budgets::default());
                println!("{}", finish(r, timings));
            }
            match (output, cli.json) {
                (Some(path), _) => write_output(Some(path), &text)?,
                (None, false) => write_output(None, &text)?,
                (None, true) => {}
            }
            Ok(EXIT_OK)
        }
    }
}

/// Splits at commas outside parentheses.
fn split_top_level(list: &str) -> Vec<String> {
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut current = String::new();
    for ch in list.chars() {
        match ch {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => {
                parts.push(std::mem::take(&mut current));
                continue;
            }
            _ => {}
        }
        current.push(ch);
    }
    parts.push(current);
    parts
        .into_iter()
        .map(|p| p.trim().to_string())
        .filter(|p| !p.is_empty())
        .collect()
}
