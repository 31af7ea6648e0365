//! `keplerctl`: runs the superkepler verification suites and prints machine-readable reports.
//!
//! Exit status is 0 when every check passes, 1 on a verification failure and 2 on
//! usage or precondition errors.

mod suites;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use thiserror::Error;

use superkepler::dynsym::{Fault, GeneratorTable, PairSelection};
use superkepler::symtensor::{self, SymSpace};
use superkepler::SuperError;

use suites::Suite;

const SCHEMA_VERSION: u32 = 1;
const SAMPLE_COUNT: usize = 500;

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Precondition(String),
    #[error(transparent)]
    Core(#[from] SuperError),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot start worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

#[derive(Parser)]
#[command(name = "keplerctl", version, about = "Verification driver for the Kepler problem on R^{D|2n}")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Bracket table, (K)^2 = 0, grading and annihilation of the ground state.
    Verify(VerifyArgs),
    /// Energies and degeneracies, optionally checking every constructed state.
    Spectrum(SpectrumArgs),
    /// Harmonic decomposition of degree-l supersymmetric tensors.
    Harmonic(TensorArgs),
    /// Branching of harmonic tensors from M to M-1.
    Branching(TensorArgs),
    /// Every suite in one JSON document.
    Report(VerifyArgs),
}

#[derive(Args)]
struct KeplerArgs {
    /// Even dimension.
    #[arg(long = "D")]
    d: usize,
    /// Half the odd dimension.
    #[arg(long, default_value_t = 0)]
    n: usize,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Pairs {
    All,
    Sample,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum FaultArg {
    Generator,
    Pairing,
    Dilation,
}

impl From<FaultArg> for Fault {
    fn from(f: FaultArg) -> Fault {
        match f {
            FaultArg::Generator => Fault::Generator,
            FaultArg::Pairing => Fault::Pairing,
            FaultArg::Dilation => Fault::Dilation,
        }
    }
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    jobs: u16,
}

#[derive(Args)]
struct FaultArgs {
    /// Testing hook: perturb one sign so that some check must fail.
    #[arg(long, value_enum, num_args = 0..=1, default_missing_value = "generator")]
    inject_fault: Option<FaultArg>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    kepler: KeplerArgs,
    /// Highest level for the state checks.
    #[arg(long)]
    kmax: Option<usize>,
    #[arg(long, value_enum, default_value = "sample")]
    pairs: Pairs,
    /// Seed for sampled bracket sweeps.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    fault: FaultArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct SpectrumArgs {
    #[command(flatten)]
    kepler: KeplerArgs,
    #[arg(long, default_value_t = 3)]
    kmax: usize,
    /// Build every level and verify its eigen-equation.
    #[arg(long)]
    check_states: bool,
    #[command(flatten)]
    fault: FaultArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct TensorArgs {
    /// Even dimension of the tensor space.
    #[arg(long = "M")]
    m: usize,
    #[arg(long, default_value_t = 0)]
    n: usize,
    /// Tensor degree.
    #[arg(long)]
    l: usize,
    #[command(flatten)]
    output: OutputArgs,
}

struct Outcome {
    body: String,
    failures: usize,
}

fn check_kepler(k: &KeplerArgs) -> Result<(), CliError> {
    if k.d <= 2 * k.n + 1 {
        return Err(CliError::Precondition(format!("D > 2n+1 required, got D = {}, n = {}", k.d, k.n)));
    }
    Ok(())
}

fn fault_name(f: Option<FaultArg>) -> Value {
    match f {
        None => Value::Null,
        Some(f) => Value::String(f.to_possible_value().unwrap().get_name().to_string()),
    }
}

fn total_failures(suites: &[Suite]) -> usize {
    suites.iter().map(|s| s.failures.len()).sum()
}

fn timing(start: Instant, suites: &[Suite]) -> Value {
    let per: serde_json::Map<String, Value> = suites.iter().map(|s| (s.name.clone(), json!(s.elapsed_ms))).collect();
    json!({ "total_ms": start.elapsed().as_millis() as u64, "suites": per })
}

fn document(command: &str, parameters: Value, suites: &[Suite], extra: Value, start: Instant) -> Value {
    let failures = total_failures(suites);
    let mut doc = json!({
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "parameters": parameters,
        "suites": suites,
        "total_failures": failures,
        "passed": failures == 0,
        "timing": timing(start, suites),
    });
    if let (Value::Object(doc), Value::Object(extra)) = (&mut doc, extra) {
        doc.extend(extra);
    }
    doc
}

fn suites_csv(suites: &[Suite]) -> String {
    let mut out = String::from("suite,checks,failures\n");
    for s in suites {
        out.push_str(&format!("{},{},{}\n", s.name, s.checks, s.failures.len()));
    }
    out
}

fn render(format: Format, doc: &Value, csv: impl FnOnce() -> String) -> String {
    match format {
        Format::Json => format!("{}\n", serde_json::to_string_pretty(doc).expect("report serializes")),
        Format::Csv => csv(),
    }
}

fn run_verify(args: &VerifyArgs, full: bool) -> Result<Outcome, CliError> {
    check_kepler(&args.kepler)?;
    let start = Instant::now();
    let (d, n) = (args.kepler.d, args.kepler.n);
    let k_max = args.kmax.unwrap_or(if full { 2 } else { 1 });
    let fault = args.fault.inject_fault.map(Fault::from);
    let selection = match args.pairs {
        Pairs::All => PairSelection::All,
        Pairs::Sample => PairSelection::Sample { seed: args.seed, count: SAMPLE_COUNT },
    };
    let table = GeneratorTable::build_with(d, n, fault)?;
    let mut suites = vec![
        suites::so21(&table),
        suites::algebra(&table, selection),
        suites::k_squared(&table),
        suites::grading(&table),
        suites::parabolic(&table),
    ];
    let (level_suite, levels) = suites::levels(&table, d, n, k_max, fault)?;
    suites.push(level_suite);
    let mut extra = json!({});
    if full {
        suites.push(suites::radial(d, n, k_max)?);
        suites.push(suites::harmonic(&SymSpace::new(d + 1, n)?, k_max));
        suites.push(suites::agreement(d, n, &levels)?);
        extra = json!({ "spectrum": suites::spectrum_rows(d, n, k_max)? });
    }
    let parameters = json!({
        "D": d, "n": n, "kmax": k_max,
        "pairs": if args.pairs == Pairs::All { "all" } else { "sample" },
        "seed": args.seed,
        "inject_fault": fault_name(args.fault.inject_fault),
    });
    let name = if full { "report" } else { "verify" };
    let doc = document(name, parameters, &suites, extra, start);
    Ok(Outcome { body: render(args.output.format, &doc, || suites_csv(&suites)), failures: total_failures(&suites) })
}

fn run_spectrum(args: &SpectrumArgs) -> Result<Outcome, CliError> {
    check_kepler(&args.kepler)?;
    let start = Instant::now();
    let (d, n) = (args.kepler.d, args.kepler.n);
    let fault = args.fault.inject_fault.map(Fault::from);
    let rows = suites::spectrum_rows(d, n, args.kmax)?;
    let mut suites = Vec::new();
    if args.check_states {
        let table = GeneratorTable::build_with(d, n, fault)?;
        suites.push(suites::levels(&table, d, n, args.kmax, fault)?.0);
    }
    let failures = total_failures(&suites);
    for s in &suites {
        for f in &s.failures {
            eprintln!("failed: {f}");
        }
    }
    let parameters = json!({
        "D": d, "n": n, "kmax": args.kmax,
        "check_states": args.check_states,
        "inject_fault": fault_name(args.fault.inject_fault),
    });
    let doc = document("spectrum", parameters, &suites, json!({ "spectrum": rows }), start);
    let body = render(args.output.format, &doc, || {
        let mut out = String::from("k,energy_exact,energy_decimal,degeneracy\n");
        for r in &rows {
            out.push_str(&format!("{},{},{},{}\n", r.k, r.energy_exact, r.energy_decimal, r.degeneracy));
        }
        out
    });
    Ok(Outcome { body, failures })
}

fn run_harmonic(args: &TensorArgs) -> Result<Outcome, CliError> {
    let start = Instant::now();
    let (m, n, l) = (args.m, args.n, args.l);
    let sp = SymSpace::new(m, n)?;
    let dim_s = symtensor::sym_dim(m, n, l as i64);
    let harmonic = symtensor::harmonic_dim(&sp, l) as u64;
    let suites = vec![suites::harmonic(&sp, l)];
    let decomposition = symtensor::verify_decomposition(&sp, l, |p| sp.box_star(p));
    let extra = json!({ "result": { "dim_s": dim_s, "harmonic_dim": harmonic, "decomposition": decomposition } });
    let doc = document("harmonic", json!({ "M": m, "n": n, "l": l }), &suites, extra, start);
    let body = render(args.output.format, &doc, || format!("M,n,l,dim_s,harmonic_dim,decomposition\n{m},{n},{l},{dim_s},{harmonic},{decomposition}\n"));
    Ok(Outcome { body, failures: total_failures(&suites) })
}

fn run_branching(args: &TensorArgs) -> Result<Outcome, CliError> {
    let start = Instant::now();
    let (m, n, l) = (args.m, args.n, args.l);
    if m < 2 * n + 3 {
        return Err(CliError::Precondition(format!("M-1-2n > 1 required, got M = {m}, n = {n}")));
    }
    let b = symtensor::branching_check(m, n, l)?;
    let sum = b.terms.iter().map(|t| t.to_string()).collect::<Vec<_>>().join("+");
    let suite = Suite {
        name: "branching".into(),
        checks: 1,
        failures: if b.ok { Vec::new() } else { vec![format!("{} != {sum}", b.lhs)] },
        passed: b.ok,
        elapsed_ms: start.elapsed().as_millis() as u64,
    };
    let suites = vec![suite];
    let extra = json!({ "result": { "lhs": b.lhs, "terms": b.terms, "identity": format!("{} = {sum}", b.lhs) } });
    let doc = document("branching", json!({ "M": m, "n": n, "l": l }), &suites, extra, start);
    let body = render(args.output.format, &doc, || format!("M,n,l,lhs,terms,ok\n{m},{n},{l},{},{sum},{}\n", b.lhs, b.ok));
    Ok(Outcome { body, failures: total_failures(&suites) })
}

fn output_args(cmd: &Command) -> &OutputArgs {
    match cmd {
        Command::Verify(a) | Command::Report(a) => &a.output,
        Command::Spectrum(a) => &a.output,
        Command::Harmonic(a) | Command::Branching(a) => &a.output,
    }
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let output = output_args(&cli.command);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(output.jobs as usize).build()?;
    let outcome = pool.install(|| match &cli.command {
        Command::Verify(a) => run_verify(a, false),
        Command::Report(a) => run_verify(a, true),
        Command::Spectrum(a) => run_spectrum(a),
        Command::Harmonic(a) => run_harmonic(a),
        Command::Branching(a) => run_branching(a),
    })?;
    match &output.out {
        Some(path) => fs::write(path, &outcome.body)?,
        None => std::io::stdout().write_all(outcome.body.as_bytes())?,
    }
    Ok(outcome)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(o) if o.failures == 0 => ExitCode::SUCCESS,
        Ok(o) => {
            eprintln!("keplerctl: {} check(s) failed", o.failures);
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("keplerctl: {e}");
            ExitCode::from(2)
        }
    }
}
