//! `ikeda`: Fourier coefficient tables, verification suites and the
//! underlying local data for Ikeda lifts.
//!
//! Exit codes: 0 on success, 2 for configuration errors, 3 when a
//! computed quantity fails one of its checks.

mod fixtures;
mod verify;

use std::fmt;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use ikeda_core::kohnen::{check_eligibility, plus_space_eigenform};
use ikeda_core::lift::{fourier_table, CoefficientRecord, LiftJob};
use ikeda_core::quadform::{Bound, HalfIntegralMatrix};
use ikeda_core::siegel::{siegel_poly, siegel_poly_checked, OracleOptions, SiegelPoly};
use ikeda_core::theta::{EvenLattice, LatticeName, ThetaCounter};
use ikeda_core::Error;

use fixtures::{siegel_name, FixtureStore, Provenance, SiegelFixture};
use verify::{Suite, VerifyConfig};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Assertion(String),
    Io(String),
}

impl CliError {
    fn from_core(e: Error) -> Self {
        let source = match &e {
            Error::AtForm { source, .. } => source.as_ref(),
            other => other,
        };
        match source {
            Error::NotDiscriminant(_)
            | Error::UnsupportedWeight(_)
            | Error::UnsupportedKappa(_)
            | Error::ParityMismatch { .. }
            | Error::InvalidMatrix(_)
            | Error::OutOfBound { .. }
            | Error::NormBound { .. }
            | Error::Infeasible { .. }
            | Error::Invalid(_) => CliError::Config(e.to_string()),
            _ => CliError::Assertion(e.to_string()),
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Assertion(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::from_core(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Assertion(m) => write!(f, "check failed: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "ikeda", version, about = "Exact Fourier coefficients of Ikeda lifts")]
struct Cli {
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Fixture directory.
    #[arg(long, global = true, env = "ENGINE_FIXTURES", default_value = "fixtures")]
    fixtures: PathBuf,
    /// Recompute fixtures instead of reading them.
    #[arg(long, global = true)]
    recheck: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fourier coefficients of the lift, one record per reduced form.
    Lift(LiftArgs),
    /// Run a verification suite and print its report.
    Verify(VerifyArgs),
    /// Coefficients c(t) of the plus-space form.
    Kohnen(KohnenArgs),
    /// The Siegel series polynomial F_p(T, X).
    Siegel(SiegelArgs),
    /// Theta series coefficients of E8+E8 or D16+.
    Theta(ThetaArgs),
}

#[derive(Debug, Args)]
struct BoundArgs {
    /// Forms with det(2T) at most this.
    #[arg(long, conflicts_with = "max_trace")]
    max_det: Option<i64>,
    /// Forms with trace(2T) at most this.
    #[arg(long)]
    max_trace: Option<i64>,
}

impl BoundArgs {
    fn bound(&self) -> Option<Bound> {
        self.max_det.map(Bound::Det).or(self.max_trace.map(Bound::Trace))
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
struct LiftArgs {
    #[arg(long)]
    kappa: u32,
    /// Degree 2n of the lift.
    #[arg(long)]
    degree: u32,
    #[command(flatten)]
    bound: BoundArgs,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    suite: Suite,
    #[arg(long)]
    kappa: Option<u32>,
    /// Degree 2n of the lift.
    #[arg(long)]
    degree: Option<u32>,
    #[command(flatten)]
    bound: BoundArgs,
    /// Largest index t for the Shimura suite.
    #[arg(long, default_value_t = 500)]
    limit: u64,
    /// Random unimodular matrices per form for the invariance suite.
    #[arg(long, default_value_t = 50)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Largest prime checked by the oracle suite.
    #[arg(long, default_value_t = 5)]
    primes: u64,
}

#[derive(Debug, Args)]
struct KohnenArgs {
    #[arg(long)]
    kappa: u32,
    /// (-1)^n, selecting the plus space.
    #[arg(long, allow_hyphen_values = true)]
    sign: i8,
    #[arg(long, default_value_t = 100)]
    limit: u64,
}

#[derive(Debug, Args)]
struct SiegelArgs {
    #[arg(short)]
    p: u64,
    /// Rows of 2T, e.g. "2,1;1,2".
    #[arg(long, allow_hyphen_values = true)]
    gram: String,
    /// Confirm against the local density oracle.
    #[arg(long)]
    oracle: bool,
}

#[derive(Debug, Args)]
struct ThetaArgs {
    #[arg(long)]
    lattice: String,
    /// Rows of 2T for a tuple count.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "norm", required_unless_present = "norm")]
    gram: Option<String>,
    /// Count vectors of this norm.
    #[arg(long)]
    norm: Option<i64>,
}

fn degree_to_n(degree: u32) -> Result<u32, CliError> {
    if degree == 0 || !degree.is_multiple_of(2) {
        return Err(CliError::Config(format!("degree must be a positive even number, got {degree}")));
    }
    Ok(degree / 2)
}

fn parse_gram(s: &str) -> Result<HalfIntegralMatrix, CliError> {
    Ok(s.parse::<HalfIntegralMatrix>()?)
}

fn write_json<T: Serialize>(out: &mut impl Write, value: &T) -> Result<(), CliError> {
    serde_json::to_writer(&mut *out, value).map_err(|e| CliError::Io(e.to_string()))?;
    writeln!(out)?;
    Ok(())
}

#[derive(Serialize)]
struct CsvRecord {
    gram: String,
    #[serde(rename = "det2T")]
    det_two_t: i64,
    #[serde(rename = "D")]
    disc: i64,
    d: i64,
    f: u64,
    c_arg: u64,
    local_factors: String,
    value: String,
}

impl From<&CoefficientRecord> for CsvRecord {
    fn from(r: &CoefficientRecord) -> Self {
        let rows: Vec<String> =
            r.gram.iter().map(|row| row.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")).collect();
        let factors: Vec<String> = r.local_factors.iter().map(|(p, g)| format!("{p}:{g}")).collect();
        Self {
            gram: rows.join(";"),
            det_two_t: r.det_two_t,
            disc: r.disc,
            d: r.d,
            f: r.f,
            c_arg: r.c_arg,
            local_factors: factors.join(" "),
            value: r.value.clone(),
        }
    }
}

fn cmd_lift(args: &LiftArgs, out: &mut impl Write) -> Result<(), CliError> {
    let n = degree_to_n(args.degree)?;
    check_eligibility(args.kappa, n)?;
    let bound = args.bound.bound().ok_or_else(|| CliError::Config("lift needs --max-det or --max-trace".into()))?;
    let job = LiftJob::new(args.kappa, n, bound)?;
    let records: Vec<CoefficientRecord> = fourier_table(&job)?.iter().map(CoefficientRecord::from).collect();
    match args.format {
        Format::Json => {
            for r in &records {
                write_json(out, r)?;
            }
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for r in &records {
                w.serialize(CsvRecord::from(r)).map_err(|e| CliError::Io(e.to_string()))?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

fn cmd_verify(args: &VerifyArgs, store: &FixtureStore, out: &mut impl Write) -> Result<bool, CliError> {
    let cfg = VerifyConfig {
        kappa: args.kappa,
        n: args.degree.map(degree_to_n).transpose()?,
        bound: args.bound.bound(),
        limit: args.limit,
        samples: args.samples,
        seed: args.seed,
        primes: args.primes,
    };
    let report = verify::run(args.suite, &cfg, store)?;
    write_json(out, &report)?;
    Ok(report.is_ok())
}

#[derive(Serialize)]
struct KohnenEntry {
    t: u64,
    c: String,
}

fn cmd_kohnen(args: &KohnenArgs, out: &mut impl Write) -> Result<(), CliError> {
    let n = match args.sign {
        -1 => 1,
        1 => 2,
        s => return Err(CliError::Config(format!("sign must be 1 or -1, got {s}"))),
    };
    let h = plus_space_eigenform(args.kappa, n, args.limit.max(4))?;
    for (t, c) in h.table().take_while(|&(t, _)| t <= args.limit).filter(|&(t, _)| h.in_support(t)) {
        write_json(out, &KohnenEntry { t, c: c.to_string() })?;
    }
    Ok(())
}

/// `F_p(T, X)` confirmed by the density oracle, or by a stored fixture
/// that was.
pub fn oracle_checked_poly(
    t: &HalfIntegralMatrix,
    p: u64,
    opts: OracleOptions,
    store: &FixtureStore,
) -> Result<SiegelPoly, CliError> {
    let gram = t.to_string();
    let name = siegel_name(p, &gram);
    if let Some(fixture) = store.load::<SiegelFixture>(&name) {
        let poly = siegel_poly(t, p)?;
        let ours: Vec<String> = poly.coeffs.iter().map(|c| c.to_string()).collect();
        if fixture.coeffs != ours {
            return Err(CliError::Assertion(format!(
                "{gram} at p = {p}: stored oracle value {:?} differs from {ours:?}",
                fixture.coeffs
            )));
        }
        return Ok(poly);
    }
    let poly = siegel_poly_checked(t, p, opts)?;
    let witness = poly.oracle.as_ref().expect("checked polynomial carries its witness");
    let fixture = SiegelFixture {
        p,
        gram,
        coeffs: poly.coeffs.iter().map(|c| c.to_string()).collect(),
        ks: witness.ks.clone(),
        densities: witness.densities.iter().map(|d| d.to_string()).collect(),
        confirmed: witness.confirmed,
        provenance: Provenance::today("local density interpolation", witness.depth),
    };
    store.store(&name, &fixture)?;
    Ok(poly)
}

#[derive(Serialize)]
struct SiegelOutput {
    p: u64,
    gram: Vec<Vec<i64>>,
    coeffs: Vec<String>,
    degree: usize,
    oracle_checked: bool,
}

fn cmd_siegel(args: &SiegelArgs, store: &FixtureStore, out: &mut impl Write) -> Result<(), CliError> {
    if !ikeda_core::arith::is_prime(args.p) {
        return Err(CliError::Config(format!("{} is not prime", args.p)));
    }
    let t = parse_gram(&args.gram)?;
    let poly = if args.oracle {
        oracle_checked_poly(&t, args.p, OracleOptions::default(), store)?
    } else {
        siegel_poly(&t, args.p)?
    };
    write_json(
        out,
        &SiegelOutput {
            p: args.p,
            gram: t.two_t().to_vec(),
            coeffs: poly.coeffs.iter().map(|c| c.to_string()).collect(),
            degree: poly.degree(),
            oracle_checked: args.oracle,
        },
    )
}

#[derive(Serialize)]
struct ThetaOutput {
    lattice: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    gram: Option<Vec<Vec<i64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    norm: Option<i64>,
    count: u64,
}

fn cmd_theta(args: &ThetaArgs, out: &mut impl Write) -> Result<(), CliError> {
    let name: LatticeName = args.lattice.parse()?;
    let lattice = EvenLattice::new(name)?;
    let output = match (&args.gram, args.norm) {
        (Some(g), _) => {
            let t = parse_gram(g)?;
            let bound = (0..t.size()).map(|i| t.entry(i, i)).max().unwrap_or(0).max(2);
            let count = ThetaCounter::new(lattice, bound)?.theta_coefficient(&t)?;
            ThetaOutput { lattice: name.to_string(), gram: Some(t.two_t().to_vec()), norm: None, count }
        }
        (None, Some(norm)) => {
            let count = ThetaCounter::new(lattice, norm.max(2))?.count_of_norm(norm) as u64;
            ThetaOutput { lattice: name.to_string(), gram: None, norm: Some(norm), count }
        }
        (None, None) => return Err(CliError::Config("theta needs --gram or --norm".into())),
    };
    write_json(out, &output)
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    let store = FixtureStore::new(&cli.fixtures, cli.recheck);
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    let ok = match &cli.command {
        Command::Lift(a) => cmd_lift(a, &mut out).map(|_| true),
        Command::Verify(a) => cmd_verify(a, &store, &mut out),
        Command::Kohnen(a) => cmd_kohnen(a, &mut out).map(|_| true),
        Command::Siegel(a) => cmd_siegel(a, &store, &mut out).map(|_| true),
        Command::Theta(a) => cmd_theta(a, &mut out).map(|_| true),
    }?;
    out.flush()?;
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(e) => {
            eprintln!("ikeda: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
