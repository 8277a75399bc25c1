//! `braidmu` command-line tool.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 for usage
//! or input errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use braidmu::examples_io::{
    braiding_to_def, cyclic_group, identity_bundle, kac_takesaki_bundle, matrix_to_def, super_bundle, super_space,
    symmetric_group3, to_canonical_json, z2_module_bundle, Bundle, BraidingDef, MatrixDef,
};
use braidmu::legdsl::{assert_equal, parse_statement_file, EvalReport};
use braidmu::mult_unitary::{Certificate, Check};
use braidmu::solver::{search, SearchProblem};
use braidmu::{Braiding, Space, DEFAULT_TOL};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Parser)]
#[command(name = "braidmu", version, about = "Braided multiplicative unitaries at finite dimension")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write an example bundle.
    Generate {
        kind: Kind,
        /// Group for kac-takesaki.
        #[arg(long, value_enum, default_value = "zn")]
        group: GroupKind,
        /// Order of the cyclic group.
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Total dimension for super (even part gets the extra one) and identity.
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Certify an operator of a bundle.
    Analyze {
        file: PathBuf,
        #[arg(long)]
        object: String,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Search numerically for multiplicative unitaries.
    Search {
        #[arg(long, value_enum)]
        category: Category,
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 16)]
        restarts: usize,
        #[arg(long, default_value_t = 200)]
        max_iter: usize,
        #[arg(long, default_value_t = 1e-8)]
        target_residual: f64,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(short, long)]
        output: PathBuf,
        /// Also write the found unitaries as a bundle (operators F1, F2, ...).
        #[arg(long)]
        bundle: Option<PathBuf>,
    },
    /// Evaluate a statement file against a bundle.
    Eval {
        stmtfile: PathBuf,
        datafile: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    KacTakesaki,
    Super,
    Identity,
    Z2Module,
}

#[derive(Clone, Copy, ValueEnum)]
enum GroupKind {
    #[value(alias = "Zn")]
    Zn,
    #[value(alias = "S3")]
    S3,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Category {
    Flip,
    Super,
}

/// Input or usage problem, exit code 2.
struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

type CmdResult = Result<bool, InputError>;

#[derive(Serialize)]
struct Input {
    path: String,
    sha256: String,
}

#[derive(Serialize)]
struct AnalyzeReport<'a> {
    tool: &'static str,
    version: &'static str,
    input: Input,
    object: &'a str,
    tol: f64,
    pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    certificate: Option<Certificate>,
    /// Present instead of a certificate when F is not unitary.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    checks: Vec<Check>,
}

#[derive(Serialize)]
struct SearchResult {
    restart: usize,
    residual: f64,
    distance_to_scalar: f64,
    trivial: bool,
    matrix: MatrixDef,
    certificate: Certificate,
}

#[derive(Serialize)]
struct SearchReport {
    tool: &'static str,
    version: &'static str,
    category: Category,
    dim: usize,
    braiding: BraidingDef,
    seed: u64,
    restarts: usize,
    max_iter: usize,
    target_residual: f64,
    tol: f64,
    converged: usize,
    rejected: usize,
    count: usize,
    results: Vec<SearchResult>,
}

#[derive(Serialize)]
struct EvalOut {
    tool: &'static str,
    version: &'static str,
    statements: Input,
    data: Input,
    #[serde(flatten)]
    report: EvalReport,
}

const TOOL: &str = "braidmu";
const VERSION: &str = env!("CARGO_PKG_VERSION");

fn read_input(path: &Path) -> Result<(String, Input), InputError> {
    let bytes = std::fs::read(path).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    let sha256 = format!("{:x}", Sha256::digest(&bytes));
    let text = String::from_utf8(bytes).map_err(|_| InputError(format!("{}: not UTF-8", path.display())))?;
    Ok((text, Input { path: path.display().to_string(), sha256 }))
}

/// Write through a temporary file in the target directory, then rename.
fn write_atomic(path: &Path, text: &str) -> Result<(), InputError> {
    use std::io::Write;
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(text.as_bytes())?;
    tmp.persist(path).map_err(|e| InputError(e.error.to_string()))?;
    Ok(())
}

fn generate(kind: Kind, group: GroupKind, n: usize, dim: usize, output: &Path) -> CmdResult {
    let bundle = match kind {
        Kind::KacTakesaki => {
            let g = match group {
                GroupKind::Zn if n >= 1 => cyclic_group(n),
                GroupKind::Zn => return Err(InputError("--n must be at least 1".into())),
                GroupKind::S3 => symmetric_group3(),
            };
            kac_takesaki_bundle(&g)
        }
        Kind::Super if dim >= 1 => super_bundle(dim - dim / 2, dim / 2),
        Kind::Identity if dim >= 1 => identity_bundle(dim),
        Kind::Super | Kind::Identity => return Err(InputError("--dim must be at least 1".into())),
        Kind::Z2Module => z2_module_bundle(),
    };
    write_atomic(output, &bundle.to_json())?;
    println!("wrote {}", output.display());
    Ok(true)
}

fn print_checks(checks: &[Check]) {
    for c in checks {
        let target = c.target.map(|t| format!(" (target {t})")).unwrap_or_default();
        println!("{} {:<24} {:.3e}{target}", if c.pass { "ok  " } else { "FAIL" }, c.name, c.value);
    }
}

fn analyze(file: &Path, object: &str, tol: f64, report: Option<&Path>) -> CmdResult {
    let (text, input) = read_input(file)?;
    let bundle = Bundle::from_json(&text)?;
    let m = bundle.mult_unitary(object)?;
    let defect = m.unitarity_defect();
    let (certificate, checks) = if defect < tol {
        (Some(m.full_certificate(tol)?), Vec::new())
    } else {
        // nothing downstream is meaningful for a non-unitary F
        let pent = m.pentagon_residual()?;
        (None, vec![Check::residual("unitarity", defect, tol), Check::residual("pentagon", pent, tol)])
    };
    let pass = certificate.as_ref().map(|c| c.pass).unwrap_or(false);
    print_checks(certificate.as_ref().map(|c| &c.checks[..]).unwrap_or(&checks));
    let out = AnalyzeReport { tool: TOOL, version: VERSION, input, object, tol, pass, certificate, checks };
    if let Some(p) = report {
        write_atomic(p, &to_canonical_json(&out))?;
    }
    println!("{}", if pass { "PASS" } else { "FAIL" });
    Ok(pass)
}

#[allow(clippy::too_many_arguments)]
fn run_search(
    category: Category,
    dim: usize,
    seed: u64,
    restarts: usize,
    max_iter: usize,
    target_residual: f64,
    tol: f64,
    output: &Path,
    bundle_out: Option<&Path>,
) -> CmdResult {
    if dim == 0 {
        return Err(InputError("--dim must be at least 1".into()));
    }
    let (l, braiding) = match category {
        Category::Flip => (Space::new("L", dim), Braiding::flip()),
        Category::Super => (super_space("L", dim - dim / 2, dim / 2), Braiding::phase(2)),
    };
    let mut problem = SearchProblem::new(l, braiding.clone());
    problem.seed = seed;
    problem.restarts = restarts;
    problem.max_iter = max_iter;
    problem.target_residual = target_residual;
    problem.tol = tol;
    let outcome = search(&problem)?;
    let mut bundle = Bundle::new(&braiding);
    let results: Vec<SearchResult> = outcome
        .results
        .iter()
        .enumerate()
        .map(|(i, f)| {
            bundle.add_operator(&format!("F{}", i + 1), &f.unitary.f);
            SearchResult {
                restart: f.restart,
                residual: f.residual,
                distance_to_scalar: f.distance_to_scalar,
                trivial: f.trivial,
                matrix: matrix_to_def(&f.unitary.f.mat),
                certificate: f.certificate.clone(),
            }
        })
        .collect();
    for (i, r) in results.iter().enumerate() {
        println!(
            "F{:<3} restart {:<4} residual {:.2e}  distance to scalar {:.3}{}",
            i + 1,
            r.restart,
            r.residual,
            r.distance_to_scalar,
            if r.trivial { "  (trivial)" } else { "" }
        );
    }
    let report = SearchReport {
        tool: TOOL,
        version: VERSION,
        category,
        dim,
        braiding: braiding_to_def(&braiding),
        seed,
        restarts,
        max_iter,
        target_residual,
        tol,
        converged: outcome.converged,
        rejected: outcome.rejected,
        count: results.len(),
        results,
    };
    write_atomic(output, &to_canonical_json(&report))?;
    if let Some(p) = bundle_out {
        write_atomic(p, &bundle.to_json())?;
    }
    println!("{} certified result(s), {} converged, {} rejected", report.count, report.converged, report.rejected);
    Ok(true)
}

fn eval(stmtfile: &Path, datafile: &Path, tol: f64, report: Option<&Path>) -> CmdResult {
    let (stext, statements) = read_input(stmtfile)?;
    let (dtext, data) = read_input(datafile)?;
    let file = parse_statement_file(&stext).map_err(|e| InputError(format!("{}: {e}", stmtfile.display())))?;
    let bundle = Bundle::from_json(&dtext)?;
    let rep = assert_equal(&file, &bundle, tol)?;
    for r in &rep.results {
        println!("{} line {:<3} residual {:.3e}  {}", if r.pass { "ok  " } else { "FAIL" }, r.line, r.residual, r.statement);
    }
    let pass = rep.pass;
    if let Some(p) = report {
        let out = EvalOut { tool: TOOL, version: VERSION, statements, data, report: rep };
        write_atomic(p, &to_canonical_json(&out))?;
    }
    println!("{}", if pass { "PASS" } else { "FAIL" });
    Ok(pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.cmd {
        Cmd::Generate { kind, group, n, dim, output } => generate(kind, group, n, dim, &output),
        Cmd::Analyze { file, object, tol, report } => analyze(&file, &object, tol, report.as_deref()),
        Cmd::Search { category, dim, seed, restarts, max_iter, target_residual, tol, output, bundle } => {
            run_search(category, dim, seed, restarts, max_iter, target_residual, tol, &output, bundle.as_deref())
        }
        Cmd::Eval { stmtfile, datafile, tol, report } => eval(&stmtfile, &datafile, tol, report.as_deref()),
    };
    match res {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(InputError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
