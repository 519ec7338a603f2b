//! Command-line front end.
//!
//! Exit status: 0 on success or a passing verdict, 1 on a failing verdict
//! (axiom violations, empty solution set, inconsistency, NOT_NOETHERIAN,
//! failed verification), 2 on bad input.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use thiserror::Error;

use crate::format::{
    self, equation_doc, parse_power_system, parse_structure, parse_system,
    CertificateDoc, FormatError, PowerConstDoc, VerdictDoc, WrapResultDoc,
};
use crate::noetherian::{build_witness_family, check_witness, power_noetherian, Certificate, Status};
use crate::power::{consistent, Consistency, PowerSystem, Source};
use crate::signatures::{validate, FiniteStructure, Kind};
use crate::solver::{solve, AlgebraicSet};
use crate::wrap::{example1_s_prime, verify_wrap, wrap};
use crate::{fixtures, Error};

#[derive(Parser, Debug)]
#[command(name = "noether", version, about = "Equation systems over direct powers of finite structures")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
}

#[derive(Args, Debug)]
pub struct StructureArg {
    /// Structure file (JSON).
    #[arg(long)]
    pub structure: PathBuf,
}

#[derive(Args, Debug)]
pub struct SystemArgs {
    #[arg(long)]
    pub structure: PathBuf,
    /// System file (JSON).
    #[arg(long)]
    pub system: PathBuf,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check the axioms of the structure's kind.
    Validate(StructureArg),
    /// Solve a system over the structure itself.
    Solve(SystemArgs),
    /// Project a system over the power onto one coordinate and solve it.
    Project {
        #[command(flatten)]
        files: SystemArgs,
        #[arg(long)]
        coordinate: usize,
    },
    /// Decide consistency of a system over the power.
    Consistent(SystemArgs),
    /// Decide whether the direct power is equationally Noetherian.
    Noetherian(StructureArg),
    /// Build the counterexample family and check its witness points.
    Witness {
        #[command(flatten)]
        file: StructureArg,
        #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
        depth: u64,
    },
    /// Replace a system over the power by an equivalent finite one.
    Wrap {
        #[arg(long, required_unless_present = "example_1", requires = "system")]
        structure: Option<PathBuf>,
        #[arg(long, requires = "structure")]
        system: Option<PathBuf>,
        /// Use the built-in triangle example instead of files.
        #[arg(long = "paper-example-1", conflicts_with_all = ["structure", "system"])]
        example_1: bool,
    },
}

#[derive(Error, Debug)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Format {
        path: PathBuf,
        source: FormatError,
    },
    #[error(transparent)]
    Model(#[from] Error),
}

/// What a command prints and how it exits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub output: String,
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn in_file<T>(path: &Path, r: Result<T, FormatError>) -> Result<T, CliError> {
    r.map_err(|source| CliError::Format {
        path: path.to_path_buf(),
        source,
    })
}

fn load_structure(path: &Path) -> Result<(Kind, FiniteStructure), CliError> {
    in_file(path, parse_structure(&read(path)?))
}

fn load_power_system(path: &Path, s: &FiniteStructure) -> Result<PowerSystem, CliError> {
    in_file(path, parse_power_system(s, &read(path)?))
}

fn points(s: &FiniteStructure, set: &AlgebraicSet) -> Vec<Vec<String>> {
    set.points().iter().map(|p| s.labels(p)).collect()
}

fn show_points(s: &FiniteStructure, set: &AlgebraicSet) -> String {
    let shown: Vec<String> = points(s, set).iter().map(|p| format!("({})", p.join(", "))).collect();
    format!("{{{}}}", shown.join(", "))
}

fn show_source(source: Source) -> String {
    match source {
        Source::Explicit(i) => format!("equation {i}"),
        Source::Member { family, n } => format!("family {family} member {n}"),
    }
}

fn emit(format: OutputFormat, code: i32, value: serde_json::Value, text: String) -> Outcome {
    let output = match format {
        OutputFormat::Json => serde_json::to_string_pretty(&value).expect("json values serialize"),
        OutputFormat::Text => text,
    };
    Outcome { code, output }
}

fn fail_if(bad: bool) -> i32 {
    bad as i32
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let fmt = cli.format;
    match &cli.command {
        Command::Validate(StructureArg { structure }) => {
            let (kind, s) = load_structure(structure)?;
            let report = validate(&s, kind)?;
            let violations: Vec<_> = report
                .violations
                .iter()
                .map(|v| json!({"axiom": v.axiom.name(), "witness": s.labels(&v.witness)}))
                .collect();
            let mut text = if report.passed {
                format!("{kind}: valid ({} elements)", s.size())
            } else {
                format!("{kind}: {} violation(s)", report.violations.len())
            };
            for v in &report.violations {
                write!(text, "\n  {} at ({})", v.axiom.name(), s.labels(&v.witness).join(", ")).unwrap();
            }
            let value = json!({"kind": kind, "passed": report.passed, "violations": violations});
            Ok(emit(fmt, fail_if(!report.passed), value, text))
        }
        Command::Solve(SystemArgs { structure, system }) => {
            let (_, s) = load_structure(structure)?;
            let sys = in_file(system, parse_system(&s, &read(system)?))?;
            let set = solve(&s, &sys)?;
            let value = json!({
                "variables": sys.variables(),
                "consistent": !set.is_empty(),
                "solutions": points(&s, &set),
            });
            let text = format!(
                "variables ({})\n{} solution(s): {}",
                sys.variables().join(", "),
                set.len(),
                show_points(&s, &set)
            );
            Ok(emit(fmt, fail_if(set.is_empty()), value, text))
        }
        Command::Project { files, coordinate } => {
            let (_, s) = load_structure(&files.structure)?;
            let sys = load_power_system(&files.system, &s)?;
            let projected = sys.project(*coordinate);
            let set = solve(&s, &projected)?;
            let mut text = format!("coordinate {coordinate}:");
            for eq in projected.equations() {
                write!(text, "\n  {}", eq.display(&s)).unwrap();
            }
            write!(text, "\n{} solution(s): {}", set.len(), show_points(&s, &set)).unwrap();
            let value = json!({
                "coordinate": coordinate,
                "variables": sys.variables(),
                "equations": projected.equations().iter().map(|e| equation_doc(&s, e)).collect::<Vec<_>>(),
                "consistent": !set.is_empty(),
                "solutions": points(&s, &set),
            });
            Ok(emit(fmt, fail_if(set.is_empty()), value, text))
        }
        Command::Consistent(SystemArgs { structure, system }) => {
            let (_, s) = load_structure(structure)?;
            let sys = load_power_system(system, &s)?;
            match consistent(&s, &sys)? {
                Consistency::Consistent => Ok(emit(
                    fmt,
                    0,
                    json!({"consistent": true}),
                    "consistent".to_string(),
                )),
                Consistency::Inconsistent(cert) => {
                    let mut text = format!("inconsistent at coordinate {}; minimal core:", cert.coordinate);
                    for p in &cert.core {
                        write!(text, "\n  {}  [{}]", p.equation.display(&s), show_source(p.source)).unwrap();
                    }
                    let core: Vec<_> = cert
                        .core
                        .iter()
                        .map(|p| json!({"equation": equation_doc(&s, &p.equation), "source": p.source}))
                        .collect();
                    let value = json!({
                        "consistent": false,
                        "certificate": {"coordinate": cert.coordinate, "core": core},
                    });
                    Ok(emit(fmt, 1, value, text))
                }
            }
        }
        Command::Noetherian(StructureArg { structure }) => {
            let (kind, s) = load_structure(structure)?;
            let verdict = power_noetherian(&s, kind)?;
            let package = match verdict.status {
                Status::NotNoetherian => Some(build_witness_family(&s, kind, &verdict.certificate)?),
                _ => None,
            };
            let doc = VerdictDoc::from_verdict(&s, &verdict, package.as_ref());
            let mut text = format!("{}: {}", kind, status_name(verdict.status));
            write!(text, "\ncertificate: {}", show_certificate(&s, &verdict.certificate)).unwrap();
            if let Some(p) = &package {
                write!(text, "\nwitness family: {}", show_family(&s, &p.system())).unwrap();
            }
            let code = fail_if(verdict.status == Status::NotNoetherian);
            Ok(emit(fmt, code, serde_json::to_value(doc).expect("serializable"), text))
        }
        Command::Witness { file, depth } => {
            let (kind, s) = load_structure(&file.structure)?;
            let verdict = power_noetherian(&s, kind)?;
            if verdict.status != Status::NotNoetherian {
                let text = format!(
                    "{}: {}; no counterexample family to check",
                    kind,
                    status_name(verdict.status)
                );
                let doc = VerdictDoc::from_verdict(&s, &verdict, None);
                return Ok(emit(fmt, 0, serde_json::to_value(doc).expect("serializable"), text));
            }
            let package = build_witness_family(&s, kind, &verdict.certificate)?;
            let mut text = format!(
                "{}: NOT_NOETHERIAN, certificate {}\nfamily: {}",
                kind,
                show_certificate(&s, &verdict.certificate),
                show_family(&s, &package.system())
            );
            let mut checks = Vec::new();
            let mut all = true;
            for n in 1..=*depth as usize {
                let check = check_witness(&s, &package, n)?;
                let point = package.witness_point(n)?;
                all &= check.holds();
                let violation = check
                    .first_violation
                    .map(|(member, coordinate)| json!({"member": member, "coordinate": coordinate}));
                write!(
                    text,
                    "\n  n={n}: point {} {}",
                    point.render(&s),
                    if check.holds() { "ok" } else { "FAILED" }
                )
                .unwrap();
                if let Some((member, coordinate)) = check.first_violation {
                    write!(text, " (first fails member {member} at coordinate {coordinate})").unwrap();
                }
                checks.push(json!({
                    "n": n,
                    "point": PowerConstDoc::from_element(&s, &point),
                    "satisfies_prefix": check.satisfies_prefix,
                    "violates_family": check.violates_family,
                    "violates_next": check.violates_next,
                    "first_violation": violation,
                    "verified": check.holds(),
                }));
            }
            write!(text, "\n{}", if all { "verified" } else { "verification FAILED" }).unwrap();
            let value = json!({
                "kind": kind,
                "status": verdict.status,
                "certificate": CertificateDoc::from_certificate(&s, &verdict.certificate),
                "witness_family": format::PowerSystemDoc::from_system(&s, &package.system()),
                "depth": depth,
                "checks": checks,
                "verified": all,
            });
            Ok(emit(fmt, fail_if(!all), value, text))
        }
        Command::Wrap {
            structure,
            system,
            example_1,
        } => {
            let (s, sys) = if *example_1 {
                (fixtures::k3().into_structure(), fixtures::example1_system())
            } else {
                let path = structure.as_ref().expect("clap enforces --structure");
                let (_, s) = load_structure(path)?;
                let sys = load_power_system(system.as_ref().expect("clap enforces --system"), &s)?;
                (s, sys)
            };
            let result = wrap(&s, &sys)?;
            let mut text = format!(
                "|M| = {}, |S0| = {}, |S'| = {}",
                result.trace.m.len(),
                result.trace.s0.len(),
                result.s_prime.explicit().len()
            );
            for eq in result.s_prime.explicit() {
                write!(text, "\n  {}", eq.render(|c| c.render(&s))).unwrap();
            }
            write!(text, "\nverified: {}\nbound: {}", result.verified, result.bound_ok).unwrap();
            let mut value = serde_json::to_value(WrapResultDoc::from_result(&s, &result)).expect("serializable");
            if *example_1 {
                let listed = verify_wrap(&s, &sys, &example1_s_prime())?.passed();
                write!(text, "\nlisted four-equation system verified: {listed}").unwrap();
                value["listed_s_prime_verified"] = json!(listed);
            }
            Ok(emit(fmt, fail_if(!(result.verified && result.bound_ok)), value, text))
        }
    }
}

fn status_name(status: Status) -> &'static str {
    match status {
        Status::Noetherian => "NOETHERIAN",
        Status::NotNoetherian => "NOT_NOETHERIAN",
        Status::NoObstructionFound => "NO_OBSTRUCTION_FOUND",
    }
}

fn show_certificate(s: &FiniteStructure, c: &Certificate) -> String {
    match c {
        Certificate::Quadruple(q) => format!("quadruple ({})", s.labels(q).join(", ")),
        Certificate::Triple(t) => format!("independent triple ({})", s.labels(t).join(", ")),
        Certificate::StrictPair([a, b]) => format!("{} < {}", s.label(*a), s.label(*b)),
        Certificate::Checked(records) => {
            let parts: Vec<String> = records
                .iter()
                .map(|r| format!("{} [{} instances]", r.condition, r.instances))
                .collect();
            format!("checked {}", parts.join("; "))
        }
    }
}

fn show_family(s: &FiniteStructure, system: &PowerSystem) -> String {
    let first: Vec<String> = (1..=3)
        .map(|n| system.families()[0].member(n).expect("n >= 1").render(|c| c.render(s)))
        .collect();
    format!("{}, ...", first.join(", "))
}

/// Parses `args`, runs the command and returns the exit status, printing to
/// stdout and stderr.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(&cli) {
        Ok(outcome) => {
            println!("{}", outcome.output);
            outcome.code
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
