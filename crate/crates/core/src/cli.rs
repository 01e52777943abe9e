//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 for invalid input, 2 when a computed identity
//! fails (which means a bug, not bad input).

use std::io::Write;
use std::time::{Duration, Instant};

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::dedekind::{c_invariant, c_invariant_cotangent, dedekind_rademacher_sum, dedekind_sum};
use crate::error::Error;
use crate::invariants::{
    eta_combination, mubar_c_form, mubar_dedekind_form, verify_main_theorem, InvariantReport,
};
use crate::numeric::ExactRational;
use crate::plumbing::{build_plumbing, mubar_oracle};
use crate::seifert::{enumerate_corpus, normalize_even, solve_coefficients, validate, SeifertData};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID_INPUT: i32 = 1;
pub const EXIT_VERIFICATION_FAILED: i32 = 2;

/// Largest deviation of the cotangent evaluation of c(q, p) from its exact value.
pub const COTANGENT_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Parser)]
#[command(name = "mubar", version, about = "Exact mu-bar and eta invariants of Seifert fibered homology spheres")]
struct Cli {
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Dedekind sum s(q, p). The modulus p comes first on the command line.
    Sum {
        /// Modulus p > 0.
        #[arg(allow_negative_numbers = true)]
        p: i64,
        /// First argument q, coprime to p; may be negative.
        #[arg(allow_negative_numbers = true)]
        q: i64,
    },
    /// Dedekind–Rademacher sum s(q, p; x, y). The modulus p comes first.
    Rsum {
        #[arg(allow_negative_numbers = true)]
        p: i64,
        #[arg(allow_negative_numbers = true)]
        q: i64,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        x: ExactRational,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        y: ExactRational,
    },
    /// The integer c(q, p) = -4 s(q, p) + 8 s(q, 2p), q odd.
    C {
        #[arg(allow_negative_numbers = true)]
        q: i64,
        #[arg(allow_negative_numbers = true)]
        p: i64,
    },
    /// Integers b with sum b_i * A/a_i = 1.
    Coeffs {
        #[arg(required = true, allow_negative_numbers = true)]
        a: Vec<i64>,
        /// Make every a_i - b_i odd (even case only).
        #[arg(long)]
        even_normalized: bool,
    },
    /// The combination 1/2 eta_Dir + 1/8 eta_Sign.
    Eta {
        #[arg(required = true, allow_negative_numbers = true)]
        a: Vec<i64>,
    },
    /// The mu-bar invariant.
    Mubar {
        #[arg(required = true, allow_negative_numbers = true)]
        a: Vec<i64>,
        #[arg(long, value_enum, default_value_t = Method::All)]
        method: Method,
    },
    /// The star-shaped plumbing bounded by the sphere.
    Plumbing {
        #[arg(required = true, allow_negative_numbers = true)]
        a: Vec<i64>,
        #[arg(long, value_enum, default_value_t = GraphFormat::Json)]
        format: GraphFormat,
    },
    /// Check every identity over all spheres with n fibers and a_i <= max_a.
    Verify {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        n_max: Option<usize>,
        #[arg(long)]
        max_a: i64,
        /// Worker threads; defaults to the number of CPUs.
        #[arg(long)]
        jobs: Option<usize>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    C,
    Dedekind,
    Plumbing,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GraphFormat {
    Json,
    Dot,
}

/// One failing sphere of a sweep.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CorpusFailure {
    pub seifert: SeifertData,
    pub failed: Vec<String>,
    pub errors: Vec<String>,
}

/// Aggregate of a corpus sweep. Contents depend only on the corpus, never on
/// the number of workers; `wall_time` is not serialized.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationSummary {
    pub n_min: usize,
    pub n_max: usize,
    pub max_a: i64,
    pub total: usize,
    pub passed: usize,
    pub failures: Vec<CorpusFailure>,
    #[serde(skip)]
    pub wall_time: Duration,
}

impl VerificationSummary {
    pub fn all_passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Runs [`verify_main_theorem`] on every sphere of the corpus, on `jobs`
/// threads (all CPUs when `None`), merging results in corpus order.
pub fn verify_corpus(n_min: usize, n_max: usize, max_a: i64, jobs: Option<usize>) -> VerificationSummary {
    let start = Instant::now();
    let corpus: Vec<SeifertData> = (n_min..=n_max)
        .flat_map(|n| enumerate_corpus(n, max_a))
        .collect();
    let sweep = || -> Vec<InvariantReport> { corpus.par_iter().map(verify_main_theorem).collect() };
    let reports = match jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build()
            .map(|pool| pool.install(sweep))
            .unwrap_or_else(|_| sweep()),
        None => sweep(),
    };
    let failures: Vec<CorpusFailure> = reports
        .into_iter()
        .filter(|r| !r.passed())
        .map(|r| CorpusFailure {
            failed: r.failed_verdicts(),
            errors: r.errors,
            seifert: r.seifert,
        })
        .collect();
    VerificationSummary {
        n_min,
        n_max,
        max_a,
        total: corpus.len(),
        passed: corpus.len() - failures.len(),
        failures,
        wall_time: start.elapsed(),
    }
}

enum Failure {
    Input(String),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_input_error() {
            Failure::Input(e.to_string())
        } else {
            Failure::Verification(e.to_string())
        }
    }
}

type CmdResult = std::result::Result<(), Failure>;

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

/// [`run`] with explicit output streams.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
                return EXIT_INVALID_INPUT;
            }
            let _ = write!(out, "{text}");
            return EXIT_OK;
        }
    };
    match dispatch(cli, out, err) {
        Ok(()) => EXIT_OK,
        Err(Failure::Input(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_INVALID_INPUT
        }
        Err(Failure::Verification(msg)) => {
            let _ = writeln!(err, "verification failed: {msg}");
            EXIT_VERIFICATION_FAILED
        }
    }
}

fn emit(out: &mut dyn Write, text: impl std::fmt::Display) -> CmdResult {
    writeln!(out, "{text}").map_err(|e| Failure::Input(format!("write failed: {e}")))
}

fn dispatch(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let json = cli.json;
    match cli.command {
        Command::Sum { p, q } => {
            let s = dedekind_sum(q, p)?;
            if json {
                emit(out, json!({ "p": p, "q": q, "value": s }))
            } else {
                emit(out, s)
            }
        }
        Command::Rsum { p, q, x, y } => {
            let s = dedekind_rademacher_sum(q, p, &x, &y)?;
            if json {
                emit(out, json!({ "p": p, "q": q, "x": x, "y": y, "value": s }))
            } else {
                emit(out, s)
            }
        }
        Command::C { q, p } => {
            let c = c_invariant(q, p)?;
            let sign = if (q < 0) != (p < 0) { -1.0 } else { 1.0 };
            let approx = sign * c_invariant_cotangent(q.abs(), p.abs())?;
            if (approx - c as f64).abs() >= COTANGENT_TOLERANCE {
                return Err(Failure::Verification(format!(
                    "c({q}, {p}) = {c} but the cotangent sum gives {approx}"
                )));
            }
            if json {
                emit(out, json!({ "q": q, "p": p, "c": c, "cotangent": approx }))
            } else {
                emit(out, c)
            }
        }
        Command::Coeffs { a, even_normalized } => {
            let y = validate(&a)?;
            let mut b = solve_coefficients(&y)?;
            if even_normalized {
                b = normalize_even(&y, &b)?;
            }
            if json {
                emit(out, json!({ "seifert": y, "b": b.b, "even_normalized": b.even_normalized }))
            } else {
                let parts: Vec<String> = b.b.iter().map(i64::to_string).collect();
                emit(out, format!("{y}: b = ({})", parts.join(", ")))
            }
        }
        Command::Eta { a } => {
            let y = validate(&a)?;
            let eta = eta_combination(&y)?;
            if json {
                emit(out, json!({ "seifert": y, "eta_combination": eta }))
            } else {
                emit(out, format!("{y}: 1/2 eta_Dir + 1/8 eta_Sign = {eta}"))
            }
        }
        Command::Mubar { a, method } => mubar_command(&validate(&a)?, method, json, out),
        Command::Plumbing { a, format } => {
            let g = build_plumbing(&validate(&a)?)?;
            match format {
                GraphFormat::Json => emit(out, g.to_json()),
                GraphFormat::Dot => write!(out, "{}", g.to_dot())
                    .map_err(|e| Failure::Input(format!("write failed: {e}"))),
            }
        }
        Command::Verify { n, n_max, max_a, jobs } => {
            let n_max = n_max.unwrap_or(n);
            if n < 3 || n_max < n {
                return Err(Failure::Input(format!(
                    "need 3 <= n <= n-max, got n = {n}, n-max = {n_max}"
                )));
            }
            if jobs == Some(0) {
                return Err(Failure::Input("--jobs must be positive".into()));
            }
            let summary = verify_corpus(n, n_max, max_a, jobs);
            let _ = writeln!(err, "wall time: {:.3}s", summary.wall_time.as_secs_f64());
            if json {
                emit(out, serde_json::to_string(&summary).expect("summary serializes"))?;
            } else {
                emit(out, format!("corpus: n = {n}..={n_max}, max_a = {max_a}"))?;
                emit(out, format!("spheres: {}", summary.total))?;
                emit(out, format!("passed: {}", summary.passed))?;
                emit(out, format!("failed: {}", summary.failures.len()))?;
                for f in &summary.failures {
                    emit(out, format!("  {}: {}", f.seifert, f.failed.join(", ")))?;
                }
            }
            if summary.all_passed() {
                Ok(())
            } else {
                Err(Failure::Verification(format!(
                    "{} of {} spheres failed",
                    summary.failures.len(),
                    summary.total
                )))
            }
        }
    }
}

fn mubar_command(y: &SeifertData, method: Method, json: bool, out: &mut dyn Write) -> CmdResult {
    let single = |name: &str, value: i64, out: &mut dyn Write| {
        if json {
            emit(out, json!({ "seifert": y, "method": name, "mubar": value }))
        } else {
            emit(out, format!("{y}: mubar = {value} ({name})"))
        }
    };
    match method {
        Method::C => single("c", mubar_c_form(y)?, out),
        Method::Plumbing => single("plumbing", mubar_oracle(y)?, out),
        Method::Dedekind => {
            let value = mubar_dedekind_form(y)?;
            let int = value.to_i64().ok_or_else(|| {
                Failure::Verification(format!("Dedekind form of {y} is not an integer: {value}"))
            })?;
            single("dedekind", int, out)
        }
        Method::All => {
            let report = verify_main_theorem(y);
            if json {
                emit(out, serde_json::to_string(&report).expect("report serializes"))?;
            } else {
                let show = |v: Option<String>| v.unwrap_or_else(|| "error".into());
                emit(out, format!("{y}"))?;
                emit(out, format!("  mubar (c-form):       {}", show(report.mubar_c_form.map(|m| m.to_string()))))?;
                emit(out, format!("  mubar (Dedekind):     {}", show(report.mubar_dedekind_form.as_ref().map(|m| m.to_string()))))?;
                emit(out, format!("  mubar (plumbing):     {}", show(report.mubar_oracle.map(|m| m.to_string()))))?;
                emit(out, format!("  1/2 eta_Dir + 1/8 eta_Sign: {}", show(report.eta_combination.as_ref().map(|m| m.to_string()))))?;
                emit(out, format!("  signature, w.w:       {}, {}", show(report.signature.map(|m| m.to_string())), show(report.wu_self_intersection.map(|m| m.to_string()))))?;
                emit(out, format!("  index D+_L:           {}", show(report.aps_index.as_ref().map(|m| m.to_string()))))?;
                emit(out, format!("  agree: {}", if report.passed() { "yes" } else { "no" }))?;
            }
            if report.passed() {
                Ok(())
            } else {
                Err(Failure::Verification(format!(
                    "{y}: failed {}; {}",
                    report.failed_verdicts().join(", "),
                    report.errors.join("; ")
                )))
            }
        }
    }
}
