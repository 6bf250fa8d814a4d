use std::path::PathBuf;
use std::process::ExitCode;

use burnside_core::burnside::{
    check_burnside_general_field, check_spectra_descent, verify_report, Parameters, Verdict, DEFAULT_CAP,
};
use burnside_core::family::{read_family, FamilyFile};
use burnside_core::modstruct::{composition_series, triangularize_family, ChopError, VerdictStatus, DEFAULT_BUDGET, DEFAULT_SEED};
use burnside_core::quat::{nilpotent_span_decomposition, DecompositionReport};
use burnside_core::report::{analyze, ChainReport, TriangularizeReport};
use burnside_core::{Error, ExactMatrix, FieldDescriptor};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "burnside", version, about = "Exact irreducibility and triangularization checks for matrix semigroups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closure, algebra dimension, irreducibility and triangularizability.
    Analyze(Opts),
    /// Check that a semigroup of triangularizable matrices is irreducible
    /// exactly when it spans all of M_n.
    BurnsideCheck(Opts),
    /// Check that an irreducible semigroup with spectra in a subfield F is
    /// similar to a spanning subset of M_n(F).
    DescentCheck(Opts),
    /// Find a basis making every generator upper triangular.
    Triangularize(Opts),
    /// Composition series of the family acting on F^n.
    Chop(Opts),
    /// Write a quaternion matrix as a scalar plus square-zero matrices.
    QuatDecompose(Opts),
}

impl Command {
    fn opts(&self) -> &Opts {
        match self {
            Command::Analyze(o)
            | Command::BurnsideCheck(o)
            | Command::DescentCheck(o)
            | Command::Triangularize(o)
            | Command::Chop(o)
            | Command::QuatDecompose(o) => o,
        }
    }
}

#[derive(Args)]
struct Opts {
    /// Family file.
    file: PathBuf,
    /// Largest semigroup closure to enumerate.
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: usize,
    /// Seed for randomized searches.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Rounds of the irreducibility search.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: usize,
    #[arg(long, value_enum, default_value_t = Emit::Text)]
    emit: Emit,
    /// Subfield for descent-check, overriding the file.
    #[arg(long)]
    subfield: Option<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Emit {
    Text,
    Machine,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Code {
    Success = 0,
    Negative = 2,
    Undecided = 3,
    Usage = 4,
    Anomaly = 5,
}

struct Failure {
    code: Code,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::StructureViolation(_) => Code::Anomaly,
            _ => Code::Usage,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: Code::Usage,
        message: message.into(),
    }
}

fn anomaly(problems: &[String]) -> Failure {
    Failure {
        code: Code::Anomaly,
        message: format!("report failed its own recheck: {}", problems.join("; ")),
    }
}

struct Output {
    code: Code,
    text: String,
    machine: String,
}

fn field_matrices(file: &FamilyFile) -> Result<&[ExactMatrix], Failure> {
    file.field_matrices()
        .ok_or_else(|| usage("this command needs a field file, not a quaternion file"))
}

fn verdict_code(v: Verdict) -> Code {
    match v {
        Verdict::TheoremInstanceVerified => Code::Success,
        Verdict::HypothesisFails => Code::Negative,
        Verdict::Incomplete => Code::Undecided,
        Verdict::CounterexampleCandidate => Code::Anomaly,
    }
}

fn run(command: &Command) -> Result<Output, Failure> {
    let opts = command.opts();
    let file = read_family(&opts.file)?;
    let params = Parameters {
        cap: opts.cap,
        seed: opts.seed,
        budget: opts.budget,
    };
    match command {
        Command::Analyze(_) => {
            let gens = field_matrices(&file)?;
            let report = analyze(gens, opts.cap, opts.seed, opts.budget)?;
            let problems = report.verify()?;
            if !problems.is_empty() {
                return Err(anomaly(&problems));
            }
            let code = if report.is_counterexample_candidate() {
                Code::Anomaly
            } else if report.irreducibility == VerdictStatus::Inconclusive {
                Code::Undecided
            } else {
                Code::Success
            };
            Ok(Output {
                code,
                text: report.render_text(),
                machine: report.to_json(),
            })
        }
        Command::BurnsideCheck(_) => {
            let gens = field_matrices(&file)?;
            let report = check_burnside_general_field(gens, opts.cap, opts.seed, opts.budget)?;
            let problems = verify_report(&report)?;
            if !problems.is_empty() {
                return Err(anomaly(&problems));
            }
            Ok(Output {
                code: verdict_code(report.verdict),
                text: report.render_text(),
                machine: report.to_json(),
            })
        }
        Command::DescentCheck(_) => {
            let gens = field_matrices(&file)?;
            let sub = match (&opts.subfield, &file.subfield) {
                (Some(spec), _) => {
                    let sub = FieldDescriptor::parse(spec)?;
                    gens[0].field().check_tower(&sub)?;
                    sub
                }
                (None, Some(sub)) => sub.clone(),
                (None, None) => return Err(usage("descent-check needs a subfield (--subfield or a `subfield` line)")),
            };
            let report = check_spectra_descent(gens, &sub, opts.cap, opts.seed, opts.budget)?.report;
            let problems = verify_report(&report)?;
            if !problems.is_empty() {
                return Err(anomaly(&problems));
            }
            Ok(Output {
                code: verdict_code(report.verdict),
                text: report.render_text(),
                machine: report.to_json(),
            })
        }
        Command::Triangularize(_) => {
            let gens = field_matrices(&file)?;
            let report = TriangularizeReport::new(gens, &triangularize_family(gens)?);
            let problems = report.verify()?;
            if !problems.is_empty() {
                return Err(anomaly(&problems));
            }
            Ok(Output {
                code: if report.is_triangularized() { Code::Success } else { Code::Negative },
                text: report.render_text(),
                machine: report.to_json(),
            })
        }
        Command::Chop(_) => {
            let gens = field_matrices(&file)?;
            let report = match composition_series(gens, opts.seed, opts.budget) {
                Ok(series) => ChainReport::new(gens, params, &series, &[]),
                Err(ChopError::Incomplete(c)) => ChainReport::new(gens, params, &c.partial, &c.unresolved),
                Err(ChopError::Invalid(e)) => return Err(e.into()),
            };
            let problems = report.verify()?;
            if !problems.is_empty() {
                return Err(anomaly(&problems));
            }
            Ok(Output {
                code: if report.complete { Code::Success } else { Code::Undecided },
                text: report.render_text(),
                machine: report.to_json(),
            })
        }
        Command::QuatDecompose(_) => {
            let mats = file
                .quaternion_matrices()
                .ok_or_else(|| usage("quat-decompose needs a quaternion file"))?;
            let mut reports = Vec::with_capacity(mats.len());
            for x in mats {
                let dec = nilpotent_span_decomposition(x)?;
                let report = DecompositionReport::new(x, &dec);
                if !report.verify()? {
                    return Err(anomaly(&["decomposition does not reconstruct the input".into()]));
                }
                reports.push(report);
            }
            let text = reports
                .iter()
                .enumerate()
                .map(|(i, r)| format!("matrix {}\n{}", i + 1, r.render_text()))
                .collect::<Vec<_>>()
                .join("\n");
            Ok(Output {
                code: Code::Success,
                text,
                machine: serde_json::to_string_pretty(&reports).expect("reports serialize"),
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { Code::Usage } else { Code::Success };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let emit = cli.command.opts().emit;
    match run(&cli.command) {
        Ok(out) => {
            match emit {
                Emit::Text => print!("{}", out.text),
                Emit::Machine => println!("{}", out.machine),
            }
            ExitCode::from(out.code as u8)
        }
        Err(f) => {
            eprintln!("burnside: {}", f.message);
            ExitCode::from(f.code as u8)
        }
    }
}
