//! Command-line front end. Everything runs through [`run`], which returns
//! the exit status and both output streams so the binary is a thin shell
//! and tests can drive commands in-process.
//!
//! Exit status: 0 success, 1 a diagnostic failed or a computation broke
//! down, 2 usage or input-file error, 3 Hamiltonian outside the supported
//! domain (complex or degenerate spectrum, series beyond its term cap).

mod document;
mod matrix_file;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use thiserror::Error;

pub use document::{emit_report, Format, ReportDocument};
pub use matrix_file::{
    complex_to_json, matrix_to_json, parse_matrix_file, parse_matrix_str, vector_to_json, InputError,
};

use crate::adjoints::{adjoint_diagnostics, default_test_set, flat_spectral_system};
use crate::biortho::{analyze_hamiltonian, metric_operators, validate_system, MetricPair};
use crate::dynamics::{dynamics_diagnostics, gamma_direct, gamma_ode, gamma_series};
use crate::error::Error;
use crate::fermion::{model_report, build_fermion_algebra, nonfactorization_defect, DEFAULT_DT};
use crate::fixtures;
use crate::linalg::{ComplexMatrix, C64};
use crate::report::{relative, DiagnosticReport};
use crate::symmetry::{build_intertwiner, symmetry_report, symmetry_space, DEFAULT_T_SAMPLES};
use crate::tolerance::ToleranceConfig;

/// Times used by `appendix` when none are given.
pub const MODEL_TIMES: [f64; 5] = [0.0, 0.5, 1.0, 2.0, 3.0];
/// Times used by `verify-all`.
pub const VERIFY_TIMES: [f64; 3] = [0.1, 1.0, 2.0];
/// Dimension of the random Hamiltonian `verify-all` draws without `--input`.
pub const VERIFY_DIMENSION: usize = 4;

#[derive(Debug, Parser)]
#[command(name = "gammadyn", version, about = "γ-dynamics of non-self-adjoint Hamiltonians")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,

    /// Relative residual threshold for diagnostics.
    #[arg(long, global = true)]
    pub tol: Option<f64>,

    /// Seed for randomized fixtures.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Biorthogonal eigensystem, metric operators and their validation.
    Analyze(InputArgs),
    /// γ^t(X) by exponentials, series and RK4 at the given times.
    Evolve(EvolveArgs),
    /// γ-symmetry report, symmetry space and intertwiner construction.
    Symmetry(SymmetryArgs),
    /// ♭/♯ scalar products, adjoints and the H♭ eigenbasis.
    Adjoints(InputArgs),
    /// The two-mode fermion model end to end.
    Appendix(ModelArgs),
    /// Every check on a supplied or randomly drawn Hamiltonian.
    VerifyAll(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Hamiltonian in the matrix JSON format.
    #[arg(long)]
    pub input: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvolveArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Observable X.
    #[arg(long)]
    pub x: PathBuf,
    /// Second observable for product checks (default: identity).
    #[arg(long)]
    pub y: Option<PathBuf>,
    /// Evaluation time; repeat for several.
    #[arg(long = "t", required = true, allow_negative_numbers = true)]
    pub t: Vec<f64>,
    /// RK4 step.
    #[arg(long, default_value_t = DEFAULT_DT)]
    pub dt: f64,
}

#[derive(Debug, Args)]
pub struct SymmetryArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Candidate symmetry (default: S_Ψ).
    #[arg(long)]
    pub x: Option<PathBuf>,
    /// Coefficients x_k of Σ x_k |Ψ_k⟩⟨Ψ_k|, e.g. `1,2-0.5i,3i`.
    #[arg(long, allow_hyphen_values = true)]
    pub coeffs: Option<String>,
    /// Sample time for the evolution check; repeat for several.
    #[arg(long = "t", allow_negative_numbers = true)]
    pub t: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    #[arg(long = "t", allow_negative_numbers = true)]
    pub t: Vec<f64>,
    #[arg(long, default_value_t = DEFAULT_DT)]
    pub dt: f64,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Hamiltonian to verify (default: random real-spectrum matrix from --seed).
    #[arg(long)]
    pub input: Option<PathBuf>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("input error: {0}")]
    Input(#[from] InputError),
    #[error("{0}")]
    Compute(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Input(_) => 2,
            CliError::Compute(e) => match e {
                Error::SpectrumNotReal { .. } | Error::Degenerate { .. } | Error::Truncation { .. } => 3,
                Error::Dimension { .. }
                | Error::NonFinite { .. }
                | Error::InvalidTolerance { .. }
                | Error::Contract(_) => 2,
                Error::NoConvergence { .. } | Error::Singular { .. } | Error::Internal(_) => 1,
            },
        }
    }

    fn label(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Input(e) => e.code(),
            CliError::Compute(e) => match e {
                Error::Dimension { .. } => "dimension",
                Error::NonFinite { .. } => "non-finite",
                Error::InvalidTolerance { .. } => "invalid-tolerance",
                Error::NoConvergence { .. } => "no-convergence",
                Error::Singular { .. } => "singular",
                Error::SpectrumNotReal { .. } => "spectrum-not-real",
                Error::Degenerate { .. } => "degenerate",
                Error::Truncation { .. } => "truncation",
                Error::Contract(_) => "contract",
                Error::Internal(_) => "internal",
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome {
                    code: 0,
                    stdout: text,
                    stderr: String::new(),
                },
                _ => Outcome {
                    code: 2,
                    stdout: String::new(),
                    stderr: text,
                },
            };
        }
    };
    let format = cli.format;
    match dispatch(&cli) {
        Ok(doc) => Outcome {
            code: if doc.verdict { 0 } else { 1 },
            stdout: emit_report(&doc, format),
            stderr: String::new(),
        },
        Err(e) => Outcome {
            code: e.exit_code(),
            stdout: String::new(),
            stderr: format!("error[{}]: {e}\n", e.label()),
        },
    }
}

pub fn dispatch(cli: &Cli) -> Result<ReportDocument, CliError> {
    let mut tol = ToleranceConfig::default();
    if let Some(t) = cli.tol {
        tol = tol.with_residual_tol(t);
    }
    tol.validate()?;
    match &cli.command {
        Command::Analyze(a) => cmd_analyze(&a.input, &tol),
        Command::Evolve(a) => cmd_evolve(a, &tol),
        Command::Symmetry(a) => cmd_symmetry(a, &tol),
        Command::Adjoints(a) => cmd_adjoints(&a.input, &tol, cli.seed),
        Command::Appendix(a) => cmd_model(a, &tol),
        Command::VerifyAll(a) => cmd_verify_all(a, &tol, cli.seed),
    }
}

/// Parses a complex literal such as `1`, `-2.5i`, `i`, `3+4i`, `1e-3-2E+1i`.
pub fn parse_complex(text: &str) -> Result<C64, CliError> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || CliError::Usage(format!("cannot parse complex number `{text}`"));
    if s.is_empty() {
        return Err(bad());
    }
    let num = |p: &str| -> Result<f64, CliError> {
        let v: f64 = p.parse().map_err(|_| bad())?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(bad())
        }
    };
    let imag_part = |p: &str| -> Result<f64, CliError> {
        match p {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => num(p),
        }
    };
    let Some(body) = s.strip_suffix(['i', 'j']) else {
        return Ok(C64::new(num(&s)?, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    match split {
        Some(k) => Ok(C64::new(num(&body[..k])?, imag_part(&body[k..])?)),
        None => Ok(C64::new(0.0, imag_part(body)?)),
    }
}

pub fn parse_coefficients(text: &str) -> Result<Vec<C64>, CliError> {
    text.split(',').map(parse_complex).collect()
}

fn load(path: &Path) -> Result<ComplexMatrix, CliError> {
    Ok(parse_matrix_file(path)?)
}

fn real_list(v: &[f64]) -> Value {
    json!(v)
}

fn analysis(
    h: &ComplexMatrix,
    tol: &ToleranceConfig,
) -> Result<(crate::biortho::BiorthogonalSystem, MetricPair, DiagnosticReport), CliError> {
    let sys = analyze_hamiltonian(h, tol)?;
    let metric = metric_operators(&sys, tol)?;
    let report = validate_system(&sys, &metric, tol);
    Ok((sys, metric, report))
}

fn cmd_analyze(input: &Path, tol: &ToleranceConfig) -> Result<ReportDocument, CliError> {
    let h = load(input)?;
    let (sys, metric, report) = analysis(&h, tol)?;
    Ok(ReportDocument::new("analyze", *tol, report)
        .with("eigenvalues", real_list(&sys.eigenvalues))
        .with("phi", Value::Array(sys.phi.iter().map(|v| vector_to_json(v)).collect()))
        .with("psi", Value::Array(sys.psi.iter().map(|v| vector_to_json(v)).collect()))
        .with("s_psi", matrix_to_json(metric.s()))
        .with("s_phi", matrix_to_json(metric.s_inv()))
        .with("min_eigenvalue_s_psi", json!(metric.min_eigenvalue)))
}

/// The metric when `H` admits one, `None` for Hamiltonians outside the
/// biorthogonal framework (which γ-dynamics still handles).
fn optional_metric(h: &ComplexMatrix, tol: &ToleranceConfig) -> Result<Option<MetricPair>, CliError> {
    match analyze_hamiltonian(h, tol) {
        Ok(sys) => Ok(Some(metric_operators(&sys, tol)?)),
        Err(e) if e.is_domain() => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn cmd_evolve(a: &EvolveArgs, tol: &ToleranceConfig) -> Result<ReportDocument, CliError> {
    let h = load(&a.input)?;
    let x = load(&a.x)?;
    let y = match &a.y {
        Some(p) => load(p)?,
        None => ComplexMatrix::identity(h.rows()),
    };
    ComplexMatrix::ensure_same_square("evolve", &[&h, &x, &y])?;
    let metric = optional_metric(&h, tol)?;
    let mut report = DiagnosticReport::new();
    let mut runs = Vec::new();
    for &t in &a.t {
        let direct = gamma_direct(&h, &x, t)?;
        let series = gamma_series(&h, &x, t, tol)?;
        let ode = gamma_ode(&h, &x, t, a.dt)?;
        let scale = direct.evolved.frobenius_norm().max(1.0);
        let tag = format!("t={t}");
        report.check(
            &format!("series vs exponential [{tag}]"),
            series.evolved.distance(&direct.evolved),
            tol.series_tol + tol.residual_tol * scale,
            "Σ_k t^k δ_γ^k(X)/k! = e^{iH†t} X e^{−iHt}",
        );
        report.check(
            &format!("RK4 vs exponential [{tag}]"),
            relative(ode.evolved.distance(&direct.evolved), scale),
            tol.residual_tol.max(1e-8),
            "dX/dt = δ_γ(X) integrates to γ^t(X)",
        );
        report.extend_prefixed(
            &format!("[{tag}] "),
            dynamics_diagnostics(&h, metric.as_ref(), &x, &y, t, tol)?,
        );
        runs.push(json!({
            "t": t,
            "direct": matrix_to_json(&direct.evolved),
            "series": matrix_to_json(&series.evolved),
            "series_terms": series.terms_used,
            "series_truncation_bound": series.truncation_bound,
            "ode": matrix_to_json(&ode.evolved),
        }));
    }
    Ok(ReportDocument::new("evolve", *tol, report)
        .with("has_metric", json!(metric.is_some()))
        .with("dt", json!(a.dt))
        .with("runs", Value::Array(runs)))
}

fn cmd_symmetry(a: &SymmetryArgs, tol: &ToleranceConfig) -> Result<ReportDocument, CliError> {
    let h = load(&a.input)?;
    let (sys, metric, _) = analysis(&h, tol)?;
    let times: Vec<f64> = if a.t.is_empty() {
        DEFAULT_T_SAMPLES.to_vec()
    } else {
        a.t.clone()
    };
    let mut report = DiagnosticReport::new();
    let mut doc_data: Vec<(String, Value)> = Vec::new();

    let space = symmetry_space(&h, tol)?;
    report.check(
        "symmetry space dimension",
        (space.len() as f64 - sys.dimension() as f64).abs(),
        0.0,
        "dim {X : H†X = XH} = N",
    );
    doc_data.push(("symmetry_space_dimension".into(), json!(space.len())));

    let (label, x) = match &a.x {
        Some(p) => ("X".to_string(), load(p)?),
        None => ("S".to_string(), metric.s().clone()),
    };
    ComplexMatrix::ensure_same_square("symmetry", &[&h, &x])?;
    let sr = symmetry_report(&h, &metric, &x, &times, tol)?;
    report.extend_prefixed(&format!("[{label}] "), sr.to_diagnostics());
    doc_data.push(("symmetry_report".into(), serde_json::to_value(&sr).expect("serializable")));

    if let Some(c) = &a.coeffs {
        let coeffs = parse_coefficients(c)?;
        let it = build_intertwiner(&sys, &coeffs, tol)?;
        report.extend_prefixed("[intertwiner] ", it.diagnostics.clone());
        let ir = symmetry_report(&h, &metric, &it.operator, &times, tol)?;
        report.check(
            "[intertwiner] is a γ-symmetry",
            if ir.verdict { 0.0 } else { 1.0 },
            0.0,
            "X = Σ x_k |Ψ_k⟩⟨Ψ_k| ⇒ γ^t(X) = X",
        );
        doc_data.push(("intertwiner".into(), matrix_to_json(&it.operator)));
        if let Some(inv) = &it.inverse {
            doc_data.push(("intertwiner_inverse".into(), matrix_to_json(inv)));
        }
    }
    let mut doc = ReportDocument::new("symmetry", *tol, report);
    for (k, v) in doc_data {
        doc = doc.with(&k, v);
    }
    Ok(doc)
}

fn adjoint_sections(
    sys: &crate::biortho::BiorthogonalSystem,
    metric: &MetricPair,
    tol: &ToleranceConfig,
    seed: u64,
) -> Result<DiagnosticReport, CliError> {
    let mut report = adjoint_diagnostics(&sys.hamiltonian, metric, tol, seed)?;
    let set = default_test_set(sys, metric, seed)?;
    let (_, flat) = flat_spectral_system(sys, metric, tol, &set)?;
    report.extend(flat);
    Ok(report)
}

fn cmd_adjoints(input: &Path, tol: &ToleranceConfig, seed: u64) -> Result<ReportDocument, CliError> {
    let h = load(input)?;
    let (sys, metric, _) = analysis(&h, tol)?;
    let report = adjoint_sections(&sys, &metric, tol, seed)?;
    Ok(ReportDocument::new("adjoints", *tol, report).with("seed", json!(seed)))
}

fn cmd_model(a: &ModelArgs, tol: &ToleranceConfig) -> Result<ReportDocument, CliError> {
    let times: Vec<f64> = if a.t.is_empty() {
        MODEL_TIMES.to_vec()
    } else {
        a.t.clone()
    };
    let alg = build_fermion_algebra();
    let report = model_report(&alg, &times, a.dt, tol)?;
    let defects: Vec<f64> = times
        .iter()
        .map(|&t| nonfactorization_defect(&alg, t))
        .collect::<Result<_, _>>()?;
    let biortho = match analyze_hamiltonian(&alg.h, tol) {
        Ok(_) => "accepted".to_string(),
        Err(e) => format!("rejected: {e}"),
    };
    Ok(ReportDocument::new("appendix", *tol, report)
        .with("times", real_list(&times))
        .with("nonfactorization_defect", real_list(&defects))
        .with("hamiltonian", matrix_to_json(&alg.h))
        .with("biorthogonal_analysis", json!(biortho)))
}

fn cmd_verify_all(a: &VerifyArgs, tol: &ToleranceConfig, seed: u64) -> Result<ReportDocument, CliError> {
    let mut rng = fixtures::rng(seed);
    let h = match &a.input {
        Some(p) => load(p)?,
        None => fixtures::real_spectrum_hamiltonian(&mut rng, VERIFY_DIMENSION).h,
    };
    let n = h.ensure_square("verify-all")?;
    let x = fixtures::matrix(&mut rng, n);
    let y = fixtures::matrix(&mut rng, n);
    let (sys, metric, base) = analysis(&h, tol)?;
    let mut report = DiagnosticReport::new();
    report.extend_prefixed("analyze: ", base);

    for &t in &VERIFY_TIMES {
        report.extend_prefixed(
            &format!("dynamics[t={t}]: "),
            dynamics_diagnostics(&h, Some(&metric), &x, &y, t, tol)?,
        );
        let series = gamma_series(&h, &x, t, tol)?;
        let direct = gamma_direct(&h, &x, t)?;
        report.check(
            &format!("series[t={t}]: agrees with exponential"),
            series.evolved.distance(&direct.evolved),
            tol.series_tol + tol.residual_tol * direct.evolved.frobenius_norm().max(1.0),
            "Σ_k t^k δ_γ^k(X)/k! = e^{iH†t} X e^{−iHt}",
        );
    }

    let space = symmetry_space(&h, tol)?;
    report.check(
        "symmetry: space dimension",
        (space.len() as f64 - n as f64).abs(),
        0.0,
        "dim {X : H†X = XH} = N",
    );
    let s_rep = symmetry_report(&h, &metric, metric.s(), &DEFAULT_T_SAMPLES, tol)?;
    report.extend_prefixed("symmetry[S]: ", s_rep.to_diagnostics());
    report.check(
        "symmetry[S]: verdict",
        if s_rep.verdict { 0.0 } else { 1.0 },
        0.0,
        "γ^t(S) = S",
    );
    let coeffs = fixtures::vector(&mut rng, n);
    let it = build_intertwiner(&sys, &coeffs, tol)?;
    report.extend_prefixed("symmetry[intertwiner]: ", it.diagnostics.clone());
    let i_rep = symmetry_report(&h, &metric, &it.operator, &DEFAULT_T_SAMPLES, tol)?;
    report.extend_prefixed("symmetry[intertwiner]: ", i_rep.to_diagnostics());
    let r_rep = symmetry_report(&h, &metric, &x, &DEFAULT_T_SAMPLES, tol)?;
    report.extend_prefixed("symmetry[random X]: ", r_rep.to_diagnostics());
    for (k, b) in space.iter().enumerate() {
        let rep = symmetry_report(&h, &metric, b, &DEFAULT_T_SAMPLES, tol)?;
        report.check(
            &format!("symmetry[space {k}]: constant of motion"),
            rep.residual_evolution / rep.scale,
            tol.residual_tol,
            "γ^t(X) = X for H†X = XH",
        );
    }

    report.extend_prefixed("adjoints: ", adjoint_sections(&sys, &metric, tol, seed)?);

    let herm = fixtures::hermitian(&mut rng, n);
    report.extend_prefixed(
        "hermitian control: ",
        dynamics_diagnostics(&herm, None, &x, &y, 1.0, tol)?,
    );

    let alg = build_fermion_algebra();
    report.extend_prefixed("two-mode model: ", model_report(&alg, &MODEL_TIMES, DEFAULT_DT, tol)?);

    Ok(ReportDocument::new("verify-all", *tol, report)
        .with("seed", json!(seed))
        .with("n", json!(n))
        .with("eigenvalues", real_list(&sys.eigenvalues))
        .with("hamiltonian", matrix_to_json(&h)))
}
