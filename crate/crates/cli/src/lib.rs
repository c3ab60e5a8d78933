//! Command-line front end for `nonsig-core`.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use nonsig_core::attacks::{attack_eps, AttackPath, AttackStrategy};
use nonsig_core::lp::{certify_binding_with_cap, compile_binding_lp, DEFAULT_VAR_CAP};
use nonsig_core::nonsig::{check_ns_bipartite, check_ns_tripartite, check_ns_two_round, NsReport};
use nonsig_core::rational::{self, Rational};
use nonsig_core::schemes::{self, CommitmentScheme};
use nonsig_core::{coupling, CondTable};
use serde::Serialize;
use thiserror::Error;

pub mod reproduce;

pub const VAR_CAP_ENV: &str = "NONSIG_VAR_CAP";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Input { path: PathBuf, source: nonsig_core::Error },
    #[error(transparent)]
    Core(#[from] nonsig_core::Error),
    #[error("{0}")]
    Usage(String),
}

/// Result of a command that ran to completion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn exit_code(self) -> u8 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "nonsig",
    version,
    about = "Multi-prover bit commitments under non-signaling provers"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build schemes and report their metrics.
    #[command(subcommand)]
    Scheme(SchemeCommand),
    /// Check a table against the non-signaling constraints.
    Check(CheckArgs),
    /// Glue two tables along a maximal coupling of the named outputs.
    Glue(GlueArgs),
    /// Synthesize a non-signaling attack on a two-prover scheme.
    Attack(AttackArgs),
    /// Certify the exact binding value of a scheme by linear programming.
    Bind(BindArgs),
    /// Run a theorem reproduction pipeline.
    Reproduce(reproduce::ReproduceArgs),
}

#[derive(Debug, Subcommand)]
pub enum SchemeCommand {
    /// Construct a scheme and write it as JSON.
    Make(MakeArgs),
    /// Print soundness and hiding metrics.
    Metrics(MetricsArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SchemeKind {
    Intro,
    Tight,
    Three,
    TwoSided,
}

#[derive(Debug, Args)]
pub struct MakeArgs {
    #[arg(long, value_enum)]
    pub kind: SchemeKind,
    #[arg(long)]
    pub n: usize,
    /// Required for `tight` and `two-sided`.
    #[arg(long)]
    pub m: Option<usize>,
    /// Post-process the openings with seeded local maps (two-prover only).
    #[arg(long)]
    pub perturb: Option<u64>,
    /// Defaults to standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CheckKind {
    Bipartite,
    TwoRound,
    Tripartite,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long, value_enum)]
    pub kind: CheckKind,
    #[arg(long = "in")]
    pub input: PathBuf,
}

#[derive(Debug, Args)]
pub struct GlueArgs {
    #[arg(long)]
    pub left: PathBuf,
    #[arg(long)]
    pub right: PathBuf,
    /// Output pairs `left:right`, comma separated or repeated.
    #[arg(long, required = true, value_delimiter = ',')]
    pub along: Vec<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AttackArgs {
    #[arg(long)]
    pub scheme: PathBuf,
    /// Defaults to standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Print binding values, the non-signaling check and the attack path.
    #[arg(long)]
    pub report: bool,
}

#[derive(Debug, Args)]
pub struct BindArgs {
    #[arg(long)]
    pub scheme: PathBuf,
    /// Write the optimal strategy as JSON.
    #[arg(long)]
    pub emit_witness: Option<PathBuf>,
    /// Write the linear program in plain-text sparse row format.
    #[arg(long)]
    pub dump_lp: Option<PathBuf>,
}

/// Reads the LP size cap from `NONSIG_VAR_CAP`.
pub fn var_cap() -> Result<usize, CliError> {
    match std::env::var(VAR_CAP_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{VAR_CAP_ENV} must be a positive integer, got {v:?}"))),
        Err(std::env::VarError::NotPresent) => Ok(DEFAULT_VAR_CAP),
        Err(e) => Err(CliError::Usage(format!("{VAR_CAP_ENV}: {e}"))),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn parse_file<T>(path: &Path, parse: impl FnOnce(&str) -> nonsig_core::Result<T>) -> Result<T, CliError> {
    parse(&read(path)?).map_err(|source| CliError::Input {
        path: path.to_path_buf(),
        source,
    })
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    let mut text = text.to_owned();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match out {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        }),
        None => print_stdout(&text),
    }
}

/// Writes to standard output, treating a closed pipe as success.
pub fn print_stdout(text: &str) -> Result<(), CliError> {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::Io {
            path: PathBuf::from("<stdout>"),
            source: e,
        }),
        _ => Ok(()),
    }
}

/// Pretty JSON with object keys in sorted order.
pub fn to_sorted_json<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("report values always serialize");
    serde_json::to_string_pretty(&v).expect("json values always serialize")
}

pub fn run(cli: Cli) -> Result<Status, CliError> {
    match cli.command {
        Command::Scheme(SchemeCommand::Make(a)) => make(&a),
        Command::Scheme(SchemeCommand::Metrics(a)) => metrics(&a),
        Command::Check(a) => check(&a),
        Command::Glue(a) => glue(&a),
        Command::Attack(a) => attack(&a),
        Command::Bind(a) => bind(&a),
        Command::Reproduce(a) => reproduce::run(&a),
    }
}

pub fn build_scheme(kind: SchemeKind, n: usize, m: Option<usize>) -> Result<CommitmentScheme, CliError> {
    let need_m = || m.ok_or_else(|| CliError::Usage("--m is required for this scheme kind".into()));
    let s = match kind {
        SchemeKind::Intro => schemes::make_intro_scheme(n)?,
        SchemeKind::Tight => schemes::make_tight_scheme(n, need_m()?)?,
        SchemeKind::Three => schemes::make_three_prover_scheme(n)?,
        SchemeKind::TwoSided => schemes::make_two_sided_scheme(n, need_m()?)?,
    };
    Ok(s)
}

fn make(a: &MakeArgs) -> Result<Status, CliError> {
    let mut s = build_scheme(a.kind, a.n, a.m)?;
    if let Some(seed) = a.perturb {
        s = schemes::perturb_openings(&s, seed)?;
    }
    write_or_print(a.out.as_deref(), &s.to_json())?;
    Ok(Status::Pass)
}

fn metrics(a: &MetricsArgs) -> Result<Status, CliError> {
    let s = parse_file(&a.input, CommitmentScheme::from_json)?;
    write_or_print(None, &to_sorted_json(&s.metrics()))?;
    Ok(Status::Pass)
}

fn check(a: &CheckArgs) -> Result<Status, CliError> {
    let t = parse_file(&a.input, CondTable::from_json)?;
    let report: NsReport = match a.kind {
        CheckKind::Bipartite => check_ns_bipartite(&t)?,
        CheckKind::TwoRound => check_ns_two_round(&t)?,
        CheckKind::Tripartite => check_ns_tripartite(&t)?,
    };
    write_or_print(None, &to_sorted_json(&report))?;
    Ok(Status::from_bool(report.passed))
}

fn parse_along(along: &[String]) -> Result<Vec<(&str, &str)>, CliError> {
    along
        .iter()
        .map(|p| {
            p.split_once(':')
                .filter(|(l, r)| !l.is_empty() && !r.is_empty())
                .ok_or_else(|| CliError::Usage(format!("--along expects left:right, got {p:?}")))
        })
        .collect()
}

fn glue(a: &GlueArgs) -> Result<Status, CliError> {
    let left = parse_file(&a.left, CondTable::from_json)?;
    let right = parse_file(&a.right, CondTable::from_json)?;
    let along = parse_along(&a.along)?;
    let g = coupling::glue(&left, &right, &along)?;
    write_or_print(a.out.as_deref(), &g.to_json())?;
    Ok(Status::Pass)
}

#[derive(Debug, Serialize)]
struct AttackReport {
    path: AttackPath,
    ns_check: NsReport,
    #[serde(with = "rational::serde_frac")]
    hiding: Rational,
    #[serde(with = "rational::serde_frac")]
    honest_0: Rational,
    #[serde(with = "rational::serde_frac")]
    honest_1: Rational,
    #[serde(with = "rational::serde_frac")]
    prob_star_0: Rational,
    #[serde(with = "rational::serde_frac")]
    prob_star_1: Rational,
    /// `Prob[Acc|1] - k * eps` for the loss factor `k` of the path.
    #[serde(with = "rational::serde_frac")]
    guaranteed_1: Rational,
    pass: bool,
}

fn attack(a: &AttackArgs) -> Result<Status, CliError> {
    let s = parse_file(&a.scheme, CommitmentScheme::from_json)?;
    let (q, path) = attack_eps(&s)?;
    write_or_print(a.out.as_deref(), &q.to_json())?;
    let ns_check = q.check()?;
    let (prob_star_0, prob_star_1) = s.binding_value(&q)?;
    let hiding = s.hiding_distance();
    let (honest_0, honest_1) = (s.honest_accept_prob(0), s.honest_accept_prob(1));
    let guaranteed_1 = &honest_1 - &hiding * Rational::from_integer(path.loss_factor().into());
    let pass = ns_check.passed && prob_star_0 == honest_0 && prob_star_1 >= guaranteed_1;
    if a.report {
        let r = AttackReport {
            path,
            ns_check,
            hiding,
            honest_0,
            honest_1,
            prob_star_0,
            prob_star_1,
            guaranteed_1,
            pass,
        };
        let text = to_sorted_json(&r);
        if a.out.is_none() {
            eprintln!("{text}");
        } else {
            print_stdout(&format!("{text}\n"))?;
        }
    }
    Ok(Status::from_bool(pass))
}

#[derive(Debug, Serialize)]
struct BindReport {
    #[serde(with = "rational::serde_frac")]
    optimum: Rational,
    #[serde(with = "rational::serde_frac")]
    delta: Rational,
}

fn bind(a: &BindArgs) -> Result<Status, CliError> {
    let s = parse_file(&a.scheme, CommitmentScheme::from_json)?;
    let cap = var_cap()?;
    if let Some(path) = &a.dump_lp {
        let (_, p) = compile_binding_lp(&s)?;
        write_or_print(Some(path), &p.dump())?;
    }
    let cert = certify_binding_with_cap(&s, cap)?;
    if let Some(path) = &a.emit_witness {
        write_or_print(Some(path), &AttackStrategy::to_json(&cert.witness))?;
    }
    let r = BindReport {
        optimum: cert.optimum,
        delta: cert.delta,
    };
    write_or_print(None, &to_sorted_json(&r))?;
    Ok(Status::Pass)
}
