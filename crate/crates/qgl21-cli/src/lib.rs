//! Command-line front end for the qgl21 representation engine.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 for
//! malformed input (bad flags, unreadable files, invalid parameters).

pub mod repfile;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use num_traits::One;
use qgl21::acceptance::{run_library_criteria, Outcome};
use qgl21::qfield::rational_sqrt;
use qgl21::realization::{factorization_check_with, verify_fock_relations};
use qgl21::repbuilder::build_rep_with;
use qgl21::structure::{highest_weight_closure, quotient_rep, StructureError};
use qgl21::verify::{check_all, classical_limit_check_with, numeric_relation_check};
use qgl21::{
    classify, CoeffFamily, Exec, Generator, HalfInt, QScalar, RealizationParams, RepKind, Report,
    Representation, Subspace,
};
use qgl21::report::Check;

use crate::repfile::{export_rep, from_json, import_rep, to_json, Format};

/// Exit code for a run where everything passed.
pub const EXIT_PASS: i32 = 0;
/// Exit code for a failed check.
pub const EXIT_FAIL: i32 = 1;
/// Exit code for malformed input.
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "qgl21", version, about = "Exact Uq[gl(2|1)] representations from a q-boson-fermion realization")]
struct Cli {
    /// Run all batch work on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct WeightArgs {
    /// J1 as a half-integer, e.g. 3/2 (must be nonnegative).
    #[arg(long, value_parser = parse_j1, allow_hyphen_values = true)]
    j1: Option<HalfInt>,
    /// J2 as a half-integer.
    #[arg(long, value_parser = parse_half, allow_hyphen_values = true)]
    j2: Option<HalfInt>,
    /// J3 as a half-integer (default 0).
    #[arg(long, value_parser = parse_half, allow_hyphen_values = true)]
    j3: Option<HalfInt>,
    /// Coefficient file with lines `Fi = expr` (default: the standard D functions).
    #[arg(long)]
    coeffs: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct Source {
    /// Read the representation from a RepFile instead of building it.
    #[arg(long, conflicts_with_all = ["j1", "j2", "j3", "coeffs"])]
    rep: Option<PathBuf>,
    #[command(flatten)]
    weights: WeightArgs,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build the representation and write it as a RepFile (JSON) or CSV.
    Build {
        #[command(flatten)]
        weights: WeightArgs,
        /// Output path (JSON to stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Output format.
        #[arg(long, value_enum, default_value_t = FormatArg::Json)]
        format: FormatArg,
    },
    /// Run the Fock-space and matrix relation suites.
    Verify {
        #[command(flatten)]
        source: Source,
        /// Boson cutoff for the Fock-space suite.
        #[arg(long, default_value_t = 6)]
        nmax: u32,
    },
    /// Classify as typical or nontypical; optionally write the quotient.
    Classify {
        #[command(flatten)]
        weights: WeightArgs,
        /// Write the nontypical quotient RepFile here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Quotient by the span of whole towers (default: the predicted invariant subspace).
    Quotient {
        #[command(flatten)]
        source: Source,
        /// Comma-separated tower numbers, e.g. `1,3`.
        #[arg(long, value_delimiter = ',')]
        towers: Option<Vec<u8>>,
        /// Output path (JSON to stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the factorization of the q-exponential on every basis vector.
    Factorize {
        #[command(flatten)]
        source: Source,
    },
    /// Evaluate at a rational q and re-check the relations (q = 1: gl(2|1) table).
    Limit {
        #[command(flatten)]
        source: Source,
        /// Evaluation point; must be the square of a rational.
        #[arg(long, default_value = "1")]
        q: String,
    },
    /// Run the acceptance suite.
    Selftest,
}

fn parse_half(s: &str) -> Result<HalfInt, String> {
    s.parse::<HalfInt>()
        .map_err(|_| format!("expected an integer or half-integer such as 3/2, got `{s}`"))
}

fn parse_j1(s: &str) -> Result<HalfInt, String> {
    let h = parse_half(s)?;
    if h.twice() < 0 {
        return Err(format!("2*j1 must be nonnegative, got `{s}`"));
    }
    Ok(h)
}

/// Error raised by a subcommand, mapped onto an exit code.
#[derive(Debug)]
enum CliError {
    /// Malformed input: exit 2.
    Usage(String),
    /// A check failed: exit 1.
    Failed(String),
}

type CliResult = Result<i32, CliError>;

fn usage(e: impl ToString) -> CliError {
    CliError::Usage(e.to_string())
}

fn read_params(w: &WeightArgs) -> Result<RealizationParams, CliError> {
    let j1 = w.j1.ok_or_else(|| usage("--j1 is required (or pass --rep)"))?;
    let j2 = w.j2.ok_or_else(|| usage("--j2 is required (or pass --rep)"))?;
    let j3 = w.j3.unwrap_or_default();
    let coeffs = match &w.coeffs {
        None => CoeffFamily::Standard,
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| usage(format!("--coeffs {}: {e}", path.display())))?;
            CoeffFamily::parse(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?
        }
    };
    Ok(RealizationParams::new(j1, j2, j3).with_coeffs(coeffs))
}

fn build(p: &RealizationParams, exec: Exec) -> Result<Representation, CliError> {
    build_rep_with(p, exec).map_err(usage)
}

fn load(src: &Source, exec: Exec) -> Result<Representation, CliError> {
    match &src.rep {
        Some(path) => import_rep(path).map_err(usage),
        None => build(&read_params(&src.weights)?, exec),
    }
}

fn write_rep(rep: &Representation, out: Option<&Path>, format: Format, stdout: &mut dyn Write) -> CliResult {
    match out {
        None if format == Format::Csv => Err(usage("--format csv needs --out")),
        None => {
            stdout.write_all(to_json(rep).as_bytes()).map_err(usage)?;
            Ok(EXIT_PASS)
        }
        Some(path) => {
            let files = export_rep(rep, path, format).map_err(usage)?;
            writeln!(
                stdout,
                "wrote {} file(s), dimension {}, {} generators",
                files.len(),
                rep.dim(),
                Generator::ALL.len()
            )
            .map_err(usage)?;
            Ok(EXIT_PASS)
        }
    }
}

fn report_exit(r: &Report, stdout: &mut dyn Write) -> CliResult {
    write!(stdout, "{r}").map_err(usage)?;
    let failures = r.failures().len();
    if failures == 0 {
        writeln!(stdout, "PASS: {} checks", r.checks.len()).map_err(usage)?;
        Ok(EXIT_PASS)
    } else {
        writeln!(stdout, "FAIL: {failures} of {} checks failed", r.checks.len()).map_err(usage)?;
        Ok(EXIT_FAIL)
    }
}

fn cmd_verify(rep: &Representation, nmax: u32, exec: Exec, stdout: &mut dyn Write) -> CliResult {
    let mut all = Report::new();
    match verify_fock_relations(rep.params(), nmax, exec) {
        Ok(r) => all.extend_prefixed(&format!("fock n<={nmax}"), r),
        Err(e) => all.push(Check::fail("fock", e.to_string())),
    }
    match check_all(rep, exec) {
        Ok(r) => all.extend_prefixed("matrix", r),
        Err(e) => all.push(Check::fail("matrix", e.to_string())),
    }
    report_exit(&all, stdout)
}

fn cmd_classify(p: &RealizationParams, out: Option<&Path>, exec: Exec, stdout: &mut dyn Write) -> CliResult {
    let class = classify(p.j1, p.j2);
    let rep = build(p, exec)?;
    match class.kind {
        RepKind::Typical => {
            writeln!(stdout, "Typical, irreducible, dim {}", rep.dim()).map_err(usage)?;
            if out.is_some() {
                writeln!(stdout, "typical representation: no quotient written").map_err(usage)?;
            }
            Ok(EXIT_PASS)
        }
        RepKind::Excluded => {
            writeln!(stdout, "Excluded (trivial representation)").map_err(usage)?;
            Ok(EXIT_PASS)
        }
        RepKind::Nontypical1 | RepKind::Nontypical2 => {
            let predicted = Subspace::of_towers(&rep, &class.predicted_invariant);
            let closure = highest_weight_closure(&rep);
            if closure != predicted {
                return Err(CliError::Failed(format!(
                    "closure of the highest weight vector has dimension {}, predicted {} ({})",
                    closure.dim(),
                    predicted.dim(),
                    class.invariant_text()
                )));
            }
            let q = quotient_rep(&rep, &predicted).map_err(|e| CliError::Failed(e.to_string()))?;
            writeln!(
                stdout,
                "{}, invariant = {}, quotient dim {}",
                class.kind,
                class.invariant_text(),
                q.dim()
            )
            .map_err(usage)?;
            if let Some(path) = out {
                write_rep(&q, Some(path), Format::Json, stdout)?;
            }
            Ok(EXIT_PASS)
        }
    }
}

fn cmd_quotient(
    rep: &Representation,
    towers: Option<&[u8]>,
    out: Option<&Path>,
    stdout: &mut dyn Write,
) -> CliResult {
    let towers: Vec<u8> = match towers {
        Some(t) => {
            if let Some(bad) = t.iter().find(|x| !(1..=4).contains(*x)) {
                return Err(usage(format!("--towers: {bad} is not a tower number (1..4)")));
            }
            t.to_vec()
        }
        None => {
            let class = classify(rep.params().j1, rep.params().j2);
            if !class.is_nontypical() {
                return Err(usage(format!(
                    "representation is {}; pass --towers to choose a subspace",
                    class.kind
                )));
            }
            class.predicted_invariant
        }
    };
    let sub = Subspace::of_towers(rep, &towers);
    match quotient_rep(rep, &sub) {
        Ok(q) => write_rep(&q, out, Format::Json, stdout),
        Err(e @ StructureError::NotInvariant { .. }) => Err(CliError::Failed(e.to_string())),
        Err(e) => Err(usage(e)),
    }
}

fn parse_q(s: &str) -> Result<BigRational, CliError> {
    let q: BigRational = s
        .parse()
        .map_err(|_| usage(format!("--q: expected a rational number, got `{s}`")))?;
    if q <= BigRational::from_integer(0.into()) {
        return Err(usage(format!("--q: {s} must be positive")));
    }
    if rational_sqrt(&q).is_none() {
        return Err(usage(format!("--q: {s} is not the square of a rational number")));
    }
    Ok(q)
}

fn cmd_limit(rep: &Representation, q: &str, exec: Exec, stdout: &mut dyn Write) -> CliResult {
    let q0 = parse_q(q)?;
    let r = if q0.is_one() {
        classical_limit_check_with(rep, exec)
    } else {
        numeric_relation_check(rep, &q0, exec)
    };
    match r {
        Ok(r) => report_exit(&r, stdout),
        Err(e) => Err(CliError::Failed(e.to_string())),
    }
}

fn cmd_selftest(exec: Exec, stdout: &mut dyn Write) -> CliResult {
    let mut outcomes = run_library_criteria(exec);
    outcomes.push(criterion_9(exec));
    let mut ok = true;
    for o in &outcomes {
        writeln!(stdout, "{}", o.summary_line()).map_err(usage)?;
        ok &= o.passed();
    }
    Ok(if ok { EXIT_PASS } else { EXIT_FAIL })
}

fn dispatch(cli: Cli, stdout: &mut dyn Write) -> CliResult {
    let exec = if cli.sequential { Exec::Sequential } else { Exec::default() };
    match cli.command {
        Command::Build { weights, out, format } => {
            let rep = build(&read_params(&weights)?, exec)?;
            let format = match format {
                FormatArg::Json => Format::Json,
                FormatArg::Csv => Format::Csv,
            };
            write_rep(&rep, out.as_deref(), format, stdout)
        }
        Command::Verify { source, nmax } => cmd_verify(&load(&source, exec)?, nmax, exec, stdout),
        Command::Classify { weights, out } => {
            cmd_classify(&read_params(&weights)?, out.as_deref(), exec, stdout)
        }
        Command::Quotient { source, towers, out } => {
            cmd_quotient(&load(&source, exec)?, towers.as_deref(), out.as_deref(), stdout)
        }
        Command::Factorize { source } => {
            let rep = load(&source, exec)?;
            let coeffs = rep.params().coeffs.clone();
            report_exit(&factorization_check_with(&rep, &coeffs, exec), stdout)
        }
        Command::Limit { source, q } => cmd_limit(&load(&source, exec)?, &q, exec, stdout),
        Command::Selftest => cmd_selftest(exec, stdout),
    }
}

/// Run the command line `args` (including the program name), writing
/// normal output to `stdout` and diagnostics to `stderr`. Returns the exit
/// code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{}", e.render());
                    EXIT_PASS
                }
                _ => {
                    let _ = write!(stderr, "{}", e.render());
                    EXIT_USAGE
                }
            };
        }
    };
    match dispatch(cli, stdout) {
        Ok(code) => code,
        Err(CliError::Usage(m)) => {
            let _ = writeln!(stderr, "error: {m}");
            EXIT_USAGE
        }
        Err(CliError::Failed(m)) => {
            let _ = writeln!(stderr, "check failed: {m}");
            EXIT_FAIL
        }
    }
}

fn run_quiet(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(std::iter::once("qgl21").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8_lossy(&out).into_owned())
}

/// Criterion 9: exact export/import round trips, byte-identical repeated
/// builds, and the documented exit codes on a scripted set of runs.
pub fn criterion_9(exec: Exec) -> Outcome {
    let mut report = Report::new();
    let check = |name: &str, ok: bool, detail: String| {
        if ok {
            Check::pass(name)
        } else {
            Check::fail(name, detail)
        }
    };

    let cases = [
        RealizationParams::from_twice(1, 2, 0),
        RealizationParams::from_twice(0, 1, 0),
        RealizationParams::from_twice(3, -1, 1).with_coeffs(CoeffFamily::q_pow_n()),
    ];
    for p in &cases {
        let tag = format!("({}, {}, {})", p.j1, p.j2, p.j3);
        match (build_rep_with(p, exec), build_rep_with(p, Exec::Sequential)) {
            (Ok(a), Ok(b)) => {
                let text = to_json(&a);
                let back = from_json(&text, "memory");
                report.push(check(
                    &format!("{tag}: JSON round trip is exact"),
                    back.as_ref().is_ok_and(|r| *r == a),
                    format!("{:?}", back.err()),
                ));
                report.push(check(
                    &format!("{tag}: repeated builds are byte-identical"),
                    to_json(&b) == text,
                    "parallel and sequential exports differ".into(),
                ));
            }
            (Err(e), _) | (_, Err(e)) => report.push(Check::fail(tag, e.to_string())),
        }
    }

    // A quotient representation also round-trips.
    if let Ok(rep) = build_rep_with(&RealizationParams::from_twice(1, 0, 0), exec) {
        let sub = Subspace::of_towers(&rep, &[1, 2]);
        if let Ok(q) = quotient_rep(&rep, &sub) {
            let ok = from_json(&to_json(&q), "memory").is_ok_and(|r| r == q);
            report.push(check("quotient round trip is exact", ok, "mismatch".into()));
        }
    }

    let dir = std::env::temp_dir().join(format!("qgl21-selftest-{}", std::process::id()));
    let _ = fs::create_dir_all(&dir);
    let good = dir.join("good.json");
    let bad = dir.join("bad.json");
    let junk = dir.join("junk.json");
    let _ = fs::write(&junk, "{ \"format_version\": 1, \"params\": ");
    if let Ok(rep) = build_rep_with(&RealizationParams::from_twice(1, 2, 0), exec) {
        let e21 = rep.matrix(Generator::E21).scaled(&QScalar::q());
        let _ = fs::write(&good, to_json(&rep));
        let _ = fs::write(&bad, to_json(&rep.with_matrix(Generator::E21, e21)));
    }
    let g = good.to_string_lossy().into_owned();
    let b = bad.to_string_lossy().into_owned();
    let j = junk.to_string_lossy().into_owned();
    let scripted: Vec<(Vec<&str>, i32)> = vec![
        (vec!["verify", "--j1", "0", "--j2", "1/2", "--j3", "0"], EXIT_PASS),
        (vec!["verify", "--rep", &g], EXIT_PASS),
        (vec!["verify", "--rep", &b], EXIT_FAIL),
        (vec!["verify", "--rep", &j], EXIT_USAGE),
        (vec!["classify", "--j1", "1/2", "--j2", "0"], EXIT_PASS),
        (vec!["limit", "--rep", &g, "--q", "1"], EXIT_PASS),
        (vec!["limit", "--rep", &g, "--q", "9/4"], EXIT_PASS),
        (vec!["limit", "--rep", &g, "--q", "2"], EXIT_USAGE),
        (vec!["build", "--j1", "-1/2", "--j2", "0"], EXIT_USAGE),
        (vec!["build", "--j1", "1/3", "--j2", "0"], EXIT_USAGE),
        (vec!["build", "--j2", "0"], EXIT_USAGE),
        (vec!["frobnicate"], EXIT_USAGE),
    ];
    for (args, want) in scripted {
        let (code, _) = run_quiet(&args);
        report.push(check(
            &format!("exit code {want} for `{}`", args.join(" ")),
            code == want,
            format!("got {code}"),
        ));
    }
    let _ = fs::remove_dir_all(&dir);

    Outcome {
        number: 9,
        title: "CLI determinism and exit codes",
        report,
    }
}
