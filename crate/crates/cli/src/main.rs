//! `degreelab` command-line driver.
//!
//! Exit codes: 0 PASS, 1 FAIL, 2 input error, 3 INDETERMINATE. Errors go to
//! stderr as one JSON object.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use degreelab::corr::{ModelFile, MonomialFile};
use degreelab::counting::{CountSequence, Variety};
use degreelab::cyclelattice::{dual_basis, LatticeFile, QVector};
use degreelab::dyndeg::{self, CheckResult};
use degreelab::linalg::{parse_rational, qserde, QMatrix};
use degreelab::verdict::{fmt15, Verdict};
use degreelab::zeta::{self, ZetaData, ZetaReport};

#[derive(Parser)]
#[command(name = "degreelab", version, about = "Point counts, zeta functions and dynamical degrees")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads for counting and property suites (results do not depend on it).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Point counts N_1..N_n as CSV.
    Count {
        #[arg(long)]
        variety: PathBuf,
        #[arg(long, default_value_t = 4)]
        n_max: usize,
    },
    /// Zeta function from a counts CSV.
    Zeta {
        #[arg(long)]
        counts: PathBuf,
    },
    /// Weil check on a zeta file or counts CSV.
    Weil(ZetaSource),
    /// Lefschetz reconstruction against counts.
    Lefschetz {
        #[command(flatten)]
        source: ZetaSource,
        /// Recount this variety by brute force instead of trusting the CSV.
        #[arg(long)]
        variety: Option<PathBuf>,
        #[arg(long, default_value_t = 6)]
        n_max: usize,
    },
    /// Dynamical degree report for a monomial map or a lattice model.
    Dyndeg {
        #[command(flatten)]
        input: MapSource,
        #[arg(long, default_value_t = dyndeg::DEFAULT_ITERS)]
        iters: usize,
    },
    /// Property-check summary CSV.
    Props {
        #[command(flatten)]
        input: MapSource,
        /// Frobenius model of P^k over F_q, as `q=5,k=2`.
        #[arg(long)]
        frobenius: Option<String>,
        #[arg(long, default_value_t = dyndeg::DEFAULT_ITERS)]
        iters: usize,
        /// Unit-modulus tuples for the near-identity search.
        #[arg(long)]
        tuples: Option<PathBuf>,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long, default_value_t = 10_000)]
        k_max: u64,
        /// Torus matrix for the trace limsup check.
        #[arg(long)]
        matrix: Option<PathBuf>,
        #[arg(long, default_value_t = 200)]
        n_max: usize,
        /// Relative tolerance reported for the trace limsup check.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Dual basis or algebraic/transcendental decomposition.
    Lattice {
        #[arg(long)]
        pairing: PathBuf,
        #[arg(long)]
        dual_basis: bool,
        /// Comma-separated rational vector, e.g. `1,0,1/2,3`.
        #[arg(long)]
        decompose: Option<String>,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct ZetaSource {
    #[arg(long)]
    zeta: Option<PathBuf>,
    #[arg(long)]
    counts: Option<PathBuf>,
}

#[derive(Args)]
struct MapSource {
    #[arg(long, conflicts_with = "model")]
    monomial: Option<PathBuf>,
    #[arg(long)]
    model: Option<PathBuf>,
}

/// A failure carried to `main`: exit code 2 with a JSON body on stderr.
#[derive(Debug, Serialize)]
struct CliError {
    error: &'static str,
    module: &'static str,
    message: String,
}

impl CliError {
    fn parse(module: &'static str, e: impl ToString) -> Self {
        CliError { error: "parse", module, message: e.to_string() }
    }

    fn compute(module: &'static str, e: impl ToString) -> Self {
        CliError { error: "compute", module, message: e.to_string() }
    }

    fn usage(message: impl Into<String>) -> Self {
        CliError { error: "usage", module: "cli", message: message.into() }
    }
}

type CliResult = Result<(String, Verdict), CliError>;

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError {
        error: "io",
        module: "cli",
        message: format!("{}: {e}", path.display()),
    })
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn read_counts(path: &Path) -> Result<CountSequence, CliError> {
    #[derive(Deserialize)]
    struct Row {
        n: usize,
        q_n: u128,
        #[serde(rename = "N_n")]
        count: u64,
    }
    let text = read(path)?;
    let mut rows = Vec::new();
    for r in csv::Reader::from_reader(text.as_bytes()).deserialize::<Row>() {
        rows.push(r.map_err(|e| CliError::parse("counting", e))?);
    }
    let Some(first) = rows.first() else {
        return Err(CliError::parse("counting", "empty counts file"));
    };
    let q = u64::try_from(first.q_n).map_err(|e| CliError::parse("counting", e))?;
    for (i, r) in rows.iter().enumerate() {
        if r.n != i + 1 || Some(r.q_n) != (q as u128).checked_pow(r.n as u32) {
            return Err(CliError::parse("counting", format!("row {} is not n = {}, q^n", i + 1, i + 1)));
        }
    }
    Ok(CountSequence { q, counts: rows.into_iter().map(|r| r.count).collect() })
}

fn load_zeta(src: &ZetaSource) -> Result<(ZetaData, Option<CountSequence>), CliError> {
    match (&src.zeta, &src.counts) {
        (Some(path), _) => {
            let report: ZetaReport = serde_json::from_str(&read(path)?).map_err(|e| CliError::parse("zeta", e))?;
            Ok((report.to_zeta_data().map_err(|e| CliError::compute("zeta", e))?, None))
        }
        (None, Some(path)) => {
            let counts = read_counts(path)?;
            let z = zeta::zeta_from_counts(&counts, None).map_err(|e| CliError::compute("zeta", e))?;
            Ok((z, Some(counts)))
        }
        (None, None) => Err(CliError::usage("need --zeta or --counts")),
    }
}

fn cmd_count(variety: &Path, n_max: usize) -> CliResult {
    let v = Variety::from_json(&read(variety)?).map_err(|e| CliError::parse("counting", e))?;
    let counts = v.count_sequence(n_max).map_err(|e| CliError::compute("counting", e))?;
    Ok((counts.to_csv(), Verdict::Pass))
}

fn cmd_zeta(counts: &Path) -> CliResult {
    let counts = read_counts(counts)?;
    let z = zeta::zeta_from_counts(&counts, None).map_err(|e| CliError::compute("zeta", e))?;
    let report = z.report();
    let verdict = report.verdict;
    Ok((to_json(&report), verdict))
}

fn cmd_weil(src: &ZetaSource) -> CliResult {
    let (z, _) = load_zeta(src)?;
    let report = zeta::weil_check(&z);
    let verdict = report.verdict;
    Ok((to_json(&report), verdict))
}

#[derive(Serialize)]
struct LefschetzRow {
    n: usize,
    reconstructed: String,
    count: Option<u64>,
    source: &'static str,
    verdict: Verdict,
}

#[derive(Serialize)]
struct LefschetzReport {
    q: u64,
    rows: Vec<LefschetzRow>,
    verdict: Verdict,
}

fn cmd_lefschetz(src: &ZetaSource, variety: Option<&Path>, n_max: usize) -> CliResult {
    let (z, counts) = load_zeta(src)?;
    if !z.is_fully_weighted() {
        let report = LefschetzReport { q: z.q, rows: Vec::new(), verdict: Verdict::Indeterminate };
        return Ok((to_json(&report), Verdict::Indeterminate));
    }
    let variety = variety
        .map(|p| Variety::from_json(&read(p)?).map_err(|e| CliError::parse("counting", e)))
        .transpose()?;
    let mut rows = Vec::new();
    for n in 1..=n_max {
        let rec = zeta::lefschetz_reconstruct(&z, n).map_err(|e| CliError::compute("zeta", e))?;
        let (count, source) = match &variety {
            // counts past the enumeration guard are skipped, not failed
            Some(v) => (v.brute_force(n).ok(), "brute_force"),
            None => (counts.as_ref().and_then(|c| c.counts.get(n - 1).copied()), "counts"),
        };
        let verdict = match count {
            Some(c) => Verdict::from_bool(rec == c.into()),
            None => Verdict::Indeterminate,
        };
        rows.push(LefschetzRow { n, reconstructed: rec.to_string(), count, source, verdict });
    }
    let checked: Vec<Verdict> = rows.iter().map(|r| r.verdict).filter(|v| *v != Verdict::Indeterminate).collect();
    let verdict = if checked.is_empty() { Verdict::Indeterminate } else { Verdict::all(checked) };
    Ok((to_json(&LefschetzReport { q: z.q, rows, verdict }), verdict))
}

fn cmd_dyndeg(input: &MapSource, iters: usize) -> CliResult {
    let report = match (&input.monomial, &input.model) {
        (Some(path), _) => {
            let file: MonomialFile = serde_json::from_str(&read(path)?).map_err(|e| CliError::parse("corr", e))?;
            let f = file.to_map().map_err(|e| CliError::parse("corr", e))?;
            dyndeg::monomial_report(&f, iters).map_err(|e| CliError::compute("dyndeg", e))?
        }
        (None, Some(path)) => {
            let file: ModelFile = serde_json::from_str(&read(path)?).map_err(|e| CliError::parse("corr", e))?;
            let c = file.to_model().map_err(|e| CliError::parse("corr", e))?;
            dyndeg::model_report(&c, iters).map_err(|e| CliError::compute("dyndeg", e))?
        }
        (None, None) => return Err(CliError::usage("need --monomial or --model")),
    };
    let verdict = report.verdict;
    Ok((to_json(&report), verdict))
}

fn parse_frobenius(spec: &str) -> Result<(u64, usize), CliError> {
    let mut q = None;
    let mut k = None;
    for part in spec.split(',') {
        match part.trim().split_once('=') {
            Some(("q", v)) => q = v.parse().ok(),
            Some(("k", v)) => k = v.parse().ok(),
            _ => return Err(CliError::parse("cli", format!("bad --frobenius part {part:?}"))),
        }
    }
    q.zip(k).ok_or_else(|| CliError::parse("cli", "--frobenius needs q=<prime power>,k=<dim>"))
}

#[derive(Deserialize)]
struct TupleFile {
    tuples: Vec<NamedTuple>,
}

#[derive(Deserialize)]
struct NamedTuple {
    name: String,
    mus: Vec<Complex64>,
}

#[allow(clippy::too_many_arguments)]
fn cmd_props(
    input: &MapSource,
    frobenius: Option<&str>,
    iters: usize,
    tuples: Option<&Path>,
    eps: f64,
    k_max: u64,
    matrix: Option<&Path>,
    n_max: usize,
    tol: Option<f64>,
) -> CliResult {
    let mut checks: Vec<CheckResult> = Vec::new();
    if let Some(spec) = frobenius {
        let (q, k) = parse_frobenius(spec)?;
        checks.extend(dyndeg::frobenius_suite(q, k).map_err(|e| CliError::compute("dyndeg", e))?);
    }
    if input.monomial.is_some() || input.model.is_some() {
        let (text, _) = cmd_dyndeg(input, iters)?;
        let report: dyndeg::DyndegReport = serde_json::from_str(&text).expect("own output");
        checks.extend(report.checks);
    }
    if let Some(path) = tuples {
        let file: TupleFile = serde_json::from_str(&read(path)?).map_err(|e| CliError::parse("dyndeg", e))?;
        for t in file.tuples {
            let r = dyndeg::near_identity_powers(&t.mus, eps, k_max).map_err(|e| CliError::compute("dyndeg", e))?;
            let first = r.ks.first().copied().unwrap_or(0) as f64;
            checks.push(CheckResult {
                name: format!("near_identity_{}", t.name),
                verdict: Verdict::from_bool(!r.ks.is_empty()),
                value: first,
                reference: r.pigeonhole_bound as f64,
                tolerance: eps,
                witness: None,
            });
        }
    }
    if let Some(path) = matrix {
        let m: QMatrix = serde_json::from_str(&read(path)?).map_err(|e| CliError::parse("linalg", e))?;
        let r = dyndeg::trace_limsup(&m, n_max).map_err(|e| CliError::compute("dyndeg", e))?;
        let tol = tol.unwrap_or(dyndeg::LIMSUP_TOL);
        if !(tol > 0.0) {
            return Err(CliError::usage("--tol must be positive"));
        }
        let ok = ((r.estimate - r.spectral_radius) / r.spectral_radius).abs() <= tol;
        checks.push(CheckResult {
            name: "trace_limsup".into(),
            verdict: Verdict::from_bool(ok),
            value: r.estimate,
            reference: r.spectral_radius,
            tolerance: tol,
            witness: Some(format!("best n = {}", r.best_n)),
        });
    }
    if checks.is_empty() {
        return Err(CliError::usage("nothing to check: give --frobenius, --monomial, --model, --tuples or --matrix"));
    }
    checks.sort_by(|a, b| a.name.cmp(&b.name));
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["quantity", "value", "reference", "tolerance", "verdict"]).expect("in memory");
    for c in &checks {
        let verdict = serde_json::to_value(c.verdict).expect("serializable");
        w.write_record([
            c.name.as_str(),
            &fmt15(c.value),
            &fmt15(c.reference),
            &fmt15(c.tolerance),
            verdict.as_str().expect("string"),
        ])
        .expect("in memory");
    }
    let out = String::from_utf8(w.into_inner().expect("in memory")).expect("utf8");
    Ok((out, Verdict::all(checks.iter().map(|c| c.verdict))))
}

#[derive(Serialize)]
struct DualBasisOut {
    #[serde(with = "qserde::vecvec")]
    basis: Vec<QVector>,
    #[serde(with = "qserde::vecvec")]
    dual: Vec<QVector>,
}

fn cmd_lattice(pairing: &Path, want_dual: bool, decompose: Option<&str>) -> CliResult {
    let file = LatticeFile::from_json(&read(pairing)?).map_err(|e| CliError::parse("cyclelattice", e))?;
    let Some(gram) = file.gram.clone() else {
        return Err(CliError::parse("cyclelattice", "pairing file needs a gram matrix"));
    };
    if want_dual == decompose.is_some() {
        return Err(CliError::usage("give exactly one of --dual-basis and --decompose"));
    }
    if want_dual {
        let basis = match &file.alg_span {
            Some(span) => span.to_rows(),
            None => QMatrix::identity(gram.rows()).to_rows(),
        };
        let dual = dual_basis(&gram, &basis).map_err(|e| CliError::compute("cyclelattice", e))?;
        return Ok((to_json(&DualBasisOut { basis, dual }), Verdict::Pass));
    }
    let x: QVector = decompose
        .expect("checked above")
        .split(',')
        .map(|s| parse_rational(s.trim()))
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::parse("cyclelattice", e))?;
    let mp = file.middle().map_err(|e| CliError::parse("cyclelattice", e))?;
    let d = mp.decompose(&x).map_err(|e| CliError::compute("cyclelattice", e))?;
    Ok((to_json(&d), Verdict::Pass))
}

fn run(cli: &Cli) -> CliResult {
    match &cli.command {
        Command::Count { variety, n_max } => cmd_count(variety, *n_max),
        Command::Zeta { counts } => cmd_zeta(counts),
        Command::Weil(src) => cmd_weil(src),
        Command::Lefschetz { source, variety, n_max } => cmd_lefschetz(source, variety.as_deref(), *n_max),
        Command::Dyndeg { input, iters } => cmd_dyndeg(input, *iters),
        Command::Props { input, frobenius, iters, tuples, eps, k_max, matrix, n_max, tol } => cmd_props(
            input,
            frobenius.as_deref(),
            *iters,
            tuples.as_deref(),
            *eps,
            *k_max,
            matrix.as_deref(),
            *n_max,
            *tol,
        ),
        Command::Lattice { pairing, dual_basis, decompose } => cmd_lattice(pairing, *dual_basis, decompose.as_deref()),
    }
}

fn exit_code(v: Verdict) -> u8 {
    match v {
        Verdict::Pass => 0,
        Verdict::Fail => 1,
        Verdict::Indeterminate => 3,
    }
}

fn fail(e: &CliError) -> ExitCode {
    eprintln!("{}", serde_json::to_string(e).expect("serializable"));
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        // a hint: the global pool may already exist in embedded use
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let (text, verdict) = match run(&cli) {
        Ok(r) => r,
        Err(e) => return fail(&e),
    };
    match &cli.out {
        Some(path) => {
            if let Err(e) = fs::write(path, text) {
                return fail(&CliError { error: "io", module: "cli", message: format!("{}: {e}", path.display()) });
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(exit_code(verdict))
}
