//! Command-line front end: matrix documents in, result documents, coefficient
//! vectors, verification reports and benchmark CSV out.
//!
//! Exit codes: 0 on success, 2 for usage, input or parse errors, 3 for
//! numerical failures and failed verification properties.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::charpoly::{char_poly, reduce_power};
use crate::error::Error;
use crate::numkernel::{c64, frobenius_norm, relative_frobenius_error, SquareMatrix};
use crate::oracle::{oracle_expm, oracle_matfun, OracleConfig};
use crate::roots::DEFAULT_CLUSTER_TOL;
use crate::sampling::separated_unit_square_matrix;
use crate::synthesis::{build_trace, EvalOptions, ScalarFunction, SpectralAnalysis};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Header of the benchmark table.
pub const BENCH_HEADER: &str = "n,trial,seed,method,err_rel,wall_ms,status";
/// Minimum eigenvalue gap of benchmark matrices.
pub const BENCH_MIN_GAP: f64 = 1e-2;
const BENCH_MAX_ATTEMPTS: usize = 10_000;

// Tolerances of the verify subcommand.
const VERIFY_TOL: f64 = 1e-9;
const VERIFY_ORACLE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }

    pub fn numerical(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_NUMERICAL,
            message: message.into(),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

/// Library errors split into bad input (2) and numerical trouble (3).
fn classify(err: Error) -> CliError {
    match &err {
        Error::DimensionMismatch { .. }
        | Error::EmptyMatrix
        | Error::NonFinite { .. }
        | Error::InvalidArgument(_)
        | Error::UnsupportedFunction(_) => CliError::input(err.to_string()),
        Error::NoConvergence {
            sweeps,
            best,
            residuals,
            max_residual,
        } => {
            let mut msg = format!(
                "{err}\nroot search stopped after {sweeps} sweeps, max residual {max_residual:e}"
            );
            for (z, r) in best.iter().zip(residuals) {
                let _ = write!(msg, "\n  root {:+e}{:+e}i  residual {r:e}", z.re, z.im);
            }
            CliError::numerical(msg)
        }
        _ => CliError::numerical(err.to_string()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Spectral,
    Oracle,
    Both,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Spectral => "spectral",
            Method::Oracle => "oracle",
            Method::Both => "both",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputKind {
    Coeffs,
    Matrix,
    Both,
}

impl OutputKind {
    fn wants_matrix(self) -> bool {
        matches!(self, OutputKind::Matrix | OutputKind::Both)
    }

    fn wants_coeffs(self) -> bool {
        matches!(self, OutputKind::Coeffs | OutputKind::Both)
    }
}

/// Everything one invocation needs.
#[derive(Debug, Clone, PartialEq)]
pub struct JobRequest {
    pub input_path: Option<PathBuf>,
    pub function: ScalarFunction,
    pub t: f64,
    pub method: Method,
    pub output: OutputKind,
    pub cluster_tol: f64,
    /// Only read by the benchmark.
    pub seed: u64,
}

impl Default for JobRequest {
    fn default() -> Self {
        Self {
            input_path: None,
            function: ScalarFunction::exp(),
            t: 1.0,
            method: Method::Spectral,
            output: OutputKind::Both,
            cluster_tol: DEFAULT_CLUSTER_TOL,
            seed: 0,
        }
    }
}

impl JobRequest {
    fn eval_options(&self) -> Result<EvalOptions, CliError> {
        if !(self.cluster_tol.is_finite() && self.cluster_tol >= 0.0) {
            return Err(CliError::input(format!(
                "cluster tolerance must be finite and nonnegative, got {}",
                self.cluster_tol
            )));
        }
        if !self.t.is_finite() {
            return Err(CliError::input(format!("t must be finite, got {}", self.t)));
        }
        Ok(EvalOptions {
            cluster_tol: self.cluster_tol,
            ..EvalOptions::default()
        })
    }

    fn input_path(&self) -> Result<&Path, CliError> {
        self.input_path
            .as_deref()
            .ok_or_else(|| CliError::input("no input file given (use --input)"))
    }
}

/// Parses `exp`, `sin`, `cos` or `poly:c0,c1,...` (real coefficients,
/// lowest degree first).
pub fn parse_function(spec: &str) -> Result<ScalarFunction, String> {
    let spec = spec.trim();
    match spec {
        "exp" => return Ok(ScalarFunction::exp()),
        "sin" => return Ok(ScalarFunction::sin()),
        "cos" => return Ok(ScalarFunction::cos()),
        _ => {}
    }
    let Some(list) = spec.strip_prefix("poly:") else {
        return Err(format!(
            "unknown function '{spec}', expected exp, sin, cos or poly:c0,c1,..."
        ));
    };
    let coeffs = list
        .split(',')
        .map(|c| {
            let c = c.trim();
            match c.parse::<f64>() {
                Ok(x) if x.is_finite() => Ok(c64(x, 0.0)),
                _ => Err(format!("bad polynomial coefficient '{c}'")),
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ScalarFunction::polynomial(coeffs))
}

/// Matrix sizes of a benchmark sweep.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SizeList(pub Vec<usize>);

/// Parses `a..b` (inclusive), `a..=b`, a single size, or a comma list of
/// those.
pub fn parse_size_list(spec: &str) -> Result<SizeList, String> {
    parse_sizes(spec).map(SizeList)
}

pub fn parse_sizes(spec: &str) -> Result<Vec<usize>, String> {
    let mut sizes = Vec::new();
    for part in spec.split(',') {
        let part = part.trim();
        let parse = |s: &str| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| format!("bad size '{s}' in '{spec}'"))
        };
        if let Some((lo, hi)) = part.split_once("..") {
            let (lo, hi) = (parse(lo)?, parse(hi.strip_prefix('=').unwrap_or(hi))?);
            if lo > hi {
                return Err(format!("empty size range '{part}'"));
            }
            sizes.extend(lo..=hi);
        } else {
            sizes.push(parse(part)?);
        }
    }
    if let Some(0) = sizes.iter().copied().min() {
        return Err("matrix sizes must be at least 1".to_string());
    }
    Ok(sizes)
}

// ---------------------------------------------------------------------------
// Documents

#[derive(Debug, Deserialize)]
struct RawMatrixDocument {
    n: usize,
    entries: Vec<Vec<Vec<f64>>>,
}

/// Parses a matrix document, naming the offending row or entry on failure.
pub fn parse_matrix_document(text: &str) -> Result<SquareMatrix, CliError> {
    let raw: RawMatrixDocument = serde_json::from_str(text)
        .map_err(|e| CliError::input(format!("malformed matrix document: {e}")))?;
    let n = raw.n;
    if n == 0 {
        return Err(CliError::input("n must be at least 1"));
    }
    if raw.entries.len() != n {
        return Err(CliError::input(format!(
            "entries has {} rows, expected n = {n}",
            raw.entries.len()
        )));
    }
    let mut entries = Vec::with_capacity(n * n);
    for (i, row) in raw.entries.iter().enumerate() {
        if row.len() != n {
            return Err(CliError::input(format!(
                "row {i} has {} columns, expected {n}",
                row.len()
            )));
        }
        for (j, pair) in row.iter().enumerate() {
            if pair.len() != 2 {
                return Err(CliError::input(format!(
                    "row {i}, column {j} has {} components, expected [re, im]",
                    pair.len()
                )));
            }
            entries.push(c64(pair[0], pair[1]));
        }
    }
    SquareMatrix::new(n, entries).map_err(classify)
}

pub fn read_matrix_file(path: &Path) -> Result<SquareMatrix, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
    parse_matrix_document(&text).map_err(|e| CliError {
        code: e.code,
        message: format!("{}: {}", path.display(), e.message),
    })
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn matrix_rows(a: &SquareMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..a.n())
        .map(|i| a.row(i).iter().map(|&z| pair(z)).collect())
        .collect()
}

#[derive(Debug, Serialize)]
struct MatrixDocument {
    n: usize,
    entries: Vec<Vec<[f64; 2]>>,
}

#[derive(Debug, Serialize)]
struct EigenvalueEntry {
    value: [f64; 2],
    multiplicity: usize,
}

#[derive(Debug, Serialize)]
struct ResultDocument {
    n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    entries: Option<Vec<Vec<[f64; 2]>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    coefficients: Option<Vec<[f64; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    eigenvalues: Option<Vec<EigenvalueEntry>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    path: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    residual_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    disagreement: Option<f64>,
    function: String,
    t: f64,
    method: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    solver: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    min_gap: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    warnings: Vec<String>,
}

/// Pretty JSON whose floats carry 17 significant digits, enough to read
/// back the identical `f64`.
struct RoundTripFormatter(serde_json::ser::PrettyFormatter<'static>);

impl serde_json::ser::Formatter for RoundTripFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

fn to_document_string<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let formatter = RoundTripFormatter(serde_json::ser::PrettyFormatter::new());
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, formatter);
    value
        .serialize(&mut ser)
        .expect("serializing plain data cannot fail");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json writes UTF-8")
}

/// Matrix document with 17 significant digits per component.
pub fn write_matrix_document(a: &SquareMatrix) -> String {
    to_document_string(&MatrixDocument {
        n: a.n(),
        entries: matrix_rows(a),
    })
}

fn function_label(f: &ScalarFunction) -> String {
    use crate::synthesis::FunctionKind;
    match &f.kind {
        FunctionKind::Polynomial(c) => {
            let parts: Vec<String> = c.iter().map(|z| format!("{}", z.re)).collect();
            format!("poly:{}", parts.join(","))
        }
        _ => f.name().to_string(),
    }
}

// ---------------------------------------------------------------------------
// Operations

/// Evaluates `F(tA)` for the input matrix and renders the result document.
///
/// The `entries` field holds the spectral result unless the method is
/// `oracle`. With method `both`, `disagreement` is the relative Frobenius
/// distance of the spectral result from the oracle.
pub fn run_eval(req: &JobRequest) -> Result<String, CliError> {
    let opts = req.eval_options()?;
    let a = read_matrix_file(req.input_path()?)?;
    let f = &req.function;

    if req.method == Method::Oracle && req.output.wants_coeffs() {
        return Err(CliError::input(
            "the oracle produces no coefficients; use --output matrix or --method spectral|both",
        ));
    }

    let oracle = match req.method {
        Method::Oracle | Method::Both => {
            Some(oracle_matfun(&a, &f.at_time(req.t), &OracleConfig::default()).map_err(classify)?)
        }
        Method::Spectral => None,
    };

    let mut doc = ResultDocument {
        n: a.n(),
        entries: None,
        coefficients: None,
        eigenvalues: None,
        path: None,
        residual_max: None,
        disagreement: None,
        function: function_label(f),
        t: req.t,
        method: req.method.as_str(),
        solver: None,
        min_gap: None,
        warnings: Vec::new(),
    };

    if req.method == Method::Oracle {
        doc.entries = oracle.as_ref().map(matrix_rows);
        return Ok(to_document_string(&doc));
    }

    let analysis = SpectralAnalysis::new(&a, &opts).map_err(classify)?;
    let eval = analysis.evaluate(f, req.t).map_err(classify)?;
    let d = &eval.diagnostics;
    if req.output.wants_matrix() {
        doc.entries = Some(matrix_rows(&eval.matrix));
    }
    if req.output.wants_coeffs() {
        doc.coefficients = Some(eval.coefficients.iter().map(|&z| pair(z)).collect());
    }
    doc.eigenvalues = Some(
        d.spectrum
            .nodes
            .iter()
            .map(|node| EigenvalueEntry {
                value: pair(node.value),
                multiplicity: node.multiplicity,
            })
            .collect(),
    );
    doc.path = Some(d.path.as_str());
    doc.residual_max = Some(d.residual_max);
    doc.solver = Some(d.solver.as_str());
    doc.min_gap = d.min_gap;
    doc.warnings = d.warnings.clone();
    if let Some(reference) = &oracle {
        doc.disagreement = Some(relative_frobenius_error(&eval.matrix, reference));
    }
    Ok(to_document_string(&doc))
}

/// Seed of one benchmark case, a SplitMix64 mix of the run seed, the size
/// and the trial index.
pub fn case_seed(seed: u64, n: usize, trial: usize) -> u64 {
    let mut z = seed
        ^ (n as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ (trial as u64).wrapping_mul(0xD1B5_4A32_D192_ED03);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Spectral-vs-oracle sweep. One row per `(n, trial)`, in that order.
///
/// `wall_ms` (time of the spectral evaluation) is filled only when `timing`
/// is set, so the default table is byte-identical for equal seeds.
pub fn run_bench(req: &JobRequest, sizes: &[usize], trials: usize, timing: bool) -> String {
    let mut out = String::from(BENCH_HEADER);
    out.push('\n');
    let opts = req.eval_options();
    for &n in sizes {
        for trial in 0..trials {
            let seed = case_seed(req.seed, n, trial);
            let (err, wall, status) = match &opts {
                Ok(opts) => bench_case(req, opts, n, seed),
                Err(e) => (None, None, format!("fail:{}", e.message)),
            };
            let err = err.map(|e| format!("{e:e}")).unwrap_or_default();
            let wall = if timing {
                wall.map(|w| format!("{w:.3}")).unwrap_or_default()
            } else {
                String::new()
            };
            let status = status.replace([',', '\n', '\r'], " ");
            let _ = writeln!(out, "{n},{trial},{seed},spectral,{err},{wall},{status}");
        }
    }
    out
}

fn bench_case(
    req: &JobRequest,
    opts: &EvalOptions,
    n: usize,
    seed: u64,
) -> (Option<f64>, Option<f64>, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let Some(a) = separated_unit_square_matrix(
        &mut rng,
        n,
        BENCH_MIN_GAP,
        f64::INFINITY,
        BENCH_MAX_ATTEMPTS,
    ) else {
        return (
            None,
            None,
            "fail:no matrix with the required eigenvalue gap".to_string(),
        );
    };
    let start = Instant::now();
    let spectral = SpectralAnalysis::new(&a, opts).and_then(|s| s.evaluate(&req.function, req.t));
    let wall = start.elapsed().as_secs_f64() * 1e3;
    let spectral = match spectral {
        Ok(e) => e.matrix,
        Err(e) => return (None, Some(wall), format!("fail:spectral: {e}")),
    };
    match oracle_matfun(&a, &req.function.at_time(req.t), &OracleConfig::default()) {
        Ok(reference) => (
            Some(relative_frobenius_error(&spectral, &reference)),
            Some(wall),
            "ok".to_string(),
        ),
        Err(e) => (None, Some(wall), format!("fail:oracle: {e}")),
    }
}

/// One checked property of the verify suite.
#[derive(Debug, Clone, PartialEq)]
pub struct PropertyResult {
    pub name: &'static str,
    /// `None` when the property does not apply to the input.
    pub passed: Option<bool>,
    pub detail: String,
}

impl PropertyResult {
    fn measured(name: &'static str, value: f64, tol: f64) -> Self {
        Self {
            name,
            passed: Some(value <= tol),
            detail: format!("{value:.3e} (tolerance {tol:e})"),
        }
    }

    fn failed(name: &'static str, detail: String) -> Self {
        Self {
            name,
            passed: Some(false),
            detail,
        }
    }

    pub fn line(&self) -> String {
        let tag = match self.passed {
            Some(true) => "PASS",
            Some(false) => "FAIL",
            None => "SKIP",
        };
        format!("{tag} {:<22} {}", self.name, self.detail)
    }
}

/// Runs the invariant suite on one matrix.
pub fn verify_matrix(a: &SquareMatrix, t: f64, opts: &EvalOptions) -> Vec<PropertyResult> {
    let n = a.n();
    let mut out = Vec::new();
    let norm = frobenius_norm(a);
    let p = char_poly(a);

    let trace_err = (p.coeff(1) + a.trace()).norm() / norm.max(1.0);
    out.push(PropertyResult::measured(
        "charpoly_trace",
        trace_err,
        VERIFY_TOL,
    ));
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let det_err = (p.coeff(n) - a.determinant() * sign).norm() / norm.max(1.0).powi(n as i32);
    out.push(PropertyResult::measured(
        "charpoly_determinant",
        det_err,
        VERIFY_TOL,
    ));

    let mut lemma: f64 = 0.0;
    let mut power = SquareMatrix::identity(n);
    for m in 0..=2 * n + 2 {
        match reduce_power(a, &p, m) {
            Ok(reduced) => {
                let scale = frobenius_norm(&power).max(f64::MIN_POSITIVE);
                lemma = lemma.max(frobenius_norm(&(&reduced - &power)) / scale);
            }
            Err(_) => lemma = f64::INFINITY,
        }
        power = &power * a;
    }
    out.push(PropertyResult::measured(
        "power_reduction",
        lemma,
        VERIFY_TOL,
    ));

    let analysis = match SpectralAnalysis::new(a, opts) {
        Ok(s) => s,
        Err(e) => {
            out.push(PropertyResult::failed("spectral_analysis", e.to_string()));
            return out;
        }
    };
    let d = &analysis.diagnostics;
    out.push(PropertyResult {
        name: "root_residuals",
        passed: Some(d.residual_max <= d.residual_bound),
        detail: format!("{:.3e} (bound {:.3e})", d.residual_max, d.residual_bound),
    });

    let interp = analysis.coefficients(&ScalarFunction::exp(), t).map(|c| {
        let mut worst: f64 = 0.0;
        let f = ScalarFunction::exp().at_time(t);
        for node in &d.spectrum.nodes {
            for r in 0..node.multiplicity {
                if let Ok(expected) = f.derivative(node.value, r) {
                    let got = c.eval_derivative(node.value, r);
                    worst = worst.max((got - expected).norm() / expected.norm().max(1.0));
                }
            }
        }
        worst
    });
    push_measured(&mut out, "interpolation", interp, VERIFY_TOL);

    let exp_plus = analysis
        .evaluate(&ScalarFunction::exp(), t)
        .map(|e| e.matrix);
    let exp_minus = analysis
        .evaluate(&ScalarFunction::exp(), -t)
        .map(|e| e.matrix);
    let group = match (&exp_plus, &exp_minus) {
        (Ok(x), Ok(y)) => {
            Ok(frobenius_norm(&(&(x * y) - &SquareMatrix::identity(n))) / (n as f64).sqrt())
        }
        (Err(e), _) | (_, Err(e)) => Err(e.clone()),
    };
    push_measured(&mut out, "group_identity", group, VERIFY_TOL);

    let det = exp_plus.as_ref().map_err(Clone::clone).map(|x| {
        let expected = (a.trace() * t).exp();
        (x.determinant() - expected).norm() / expected.norm().max(f64::MIN_POSITIVE)
    });
    push_measured(&mut out, "determinant_identity", det, VERIFY_TOL);

    let oracle = exp_plus.as_ref().map_err(Clone::clone).and_then(|x| {
        let reference = oracle_expm(&a.scale(c64(t, 0.0)), &OracleConfig::default())?;
        Ok(relative_frobenius_error(x, &reference))
    });
    push_measured(&mut out, "oracle_agreement", oracle, VERIFY_ORACLE_TOL);

    let pythagoras = analysis.evaluate(&ScalarFunction::sin(), t).and_then(|s| {
        let c = analysis.evaluate(&ScalarFunction::cos(), t)?;
        let sum = &(&s.matrix * &s.matrix) + &(&c.matrix * &c.matrix);
        Ok(frobenius_norm(&(&sum - &SquareMatrix::identity(n))) / (n as f64).sqrt())
    });
    push_measured(&mut out, "sin2_plus_cos2", pythagoras, VERIFY_TOL);

    if d.spectrum.is_simple() && n >= 2 {
        let report = crate::roots::Spectrum::new(d.spectrum.expanded());
        let check = build_trace(&d.polynomial, &report).and_then(|trace| trace.check());
        push_measured(
            &mut out,
            "companion_structure",
            check.map(|r| r.max()),
            VERIFY_TOL,
        );
    } else {
        out.push(PropertyResult {
            name: "companion_structure",
            passed: None,
            detail: "repeated eigenvalues, diagonalization does not apply".to_string(),
        });
    }
    out
}

fn push_measured(
    out: &mut Vec<PropertyResult>,
    name: &'static str,
    value: crate::error::Result<f64>,
    tol: f64,
) {
    out.push(match value {
        Ok(v) => PropertyResult::measured(name, v, tol),
        Err(e) => PropertyResult::failed(name, e.to_string()),
    });
}

/// Renders the verify report. The flag is true when no property failed.
pub fn run_verify(req: &JobRequest) -> Result<(String, bool), CliError> {
    let opts = req.eval_options()?;
    let a = read_matrix_file(req.input_path()?)?;
    let results = verify_matrix(&a, req.t, &opts);
    let mut text = String::new();
    for r in &results {
        text.push_str(&r.line());
        text.push('\n');
    }
    let ok = results.iter().all(|r| r.passed != Some(false));
    Ok((text, ok))
}

// ---------------------------------------------------------------------------
// Argument parsing

#[derive(Debug, Parser)]
#[command(
    name = "specmat",
    version,
    about = "Matrix functions by Cayley-Hamilton spectral synthesis"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate F(tA) for the matrix in --input.
    Eval(EvalArgs),
    /// Same as eval with --output coeffs.
    Coeffs(CommonArgs),
    /// Check the invariant suite on the matrix in --input.
    Verify(VerifyArgs),
    /// Spectral-vs-oracle error sweep over seeded random matrices.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Matrix document with fields `n` and `entries`.
    #[arg(long)]
    pub input: PathBuf,
    /// exp, sin, cos or poly:c0,c1,... (lowest degree first).
    #[arg(long = "fn", default_value = "exp", value_parser = parse_function)]
    pub function: ScalarFunction,
    /// Time factor: evaluates F(tA).
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub t: f64,
    #[arg(long, value_enum, default_value = "spectral")]
    pub method: Method,
    /// Relative distance under which eigenvalues are merged.
    #[arg(long, env = "SPECMAT_CLUSTER_TOL", default_value_t = DEFAULT_CLUSTER_TOL)]
    pub cluster_tol: f64,
    /// Write the result here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_enum, default_value = "both")]
    pub output: OutputKind,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub t: f64,
    #[arg(long, env = "SPECMAT_CLUSTER_TOL", default_value_t = DEFAULT_CLUSTER_TOL)]
    pub cluster_tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Matrix sizes: `2..4` (inclusive), `3`, or a comma list.
    #[arg(long, default_value = "2..6", value_parser = parse_size_list)]
    pub sizes: SizeList,
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long = "fn", default_value = "exp", value_parser = parse_function)]
    pub function: ScalarFunction,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub t: f64,
    #[arg(long, env = "SPECMAT_CLUSTER_TOL", default_value_t = DEFAULT_CLUSTER_TOL)]
    pub cluster_tol: f64,
    /// Fill the wall_ms column (makes the table run-dependent).
    #[arg(long)]
    pub timing: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl CommonArgs {
    fn request(&self, output: OutputKind) -> JobRequest {
        JobRequest {
            input_path: Some(self.input.clone()),
            function: self.function.clone(),
            t: self.t,
            method: self.method,
            output,
            cluster_tol: self.cluster_tol,
            seed: 0,
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Runs a parsed command; returns the process exit code.
pub fn execute(cli: Cli) -> i32 {
    let result = match cli.command {
        Command::Eval(args) => run_eval(&args.common.request(args.output))
            .and_then(|doc| emit(args.common.out.as_deref(), &doc)),
        Command::Coeffs(args) => run_eval(&args.request(OutputKind::Coeffs))
            .and_then(|doc| emit(args.out.as_deref(), &doc)),
        Command::Verify(args) => {
            let req = JobRequest {
                input_path: Some(args.input.clone()),
                t: args.t,
                cluster_tol: args.cluster_tol,
                ..JobRequest::default()
            };
            run_verify(&req).and_then(|(text, ok)| {
                emit(args.out.as_deref(), &text)?;
                if ok {
                    Ok(())
                } else {
                    Err(CliError::numerical("one or more properties failed"))
                }
            })
        }
        Command::Bench(args) => {
            let req = JobRequest {
                function: args.function.clone(),
                t: args.t,
                cluster_tol: args.cluster_tol,
                seed: args.seed,
                ..JobRequest::default()
            };
            emit(
                args.out.as_deref(),
                &run_bench(&req, &args.sizes.0, args.trials, args.timing),
            )
        }
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.code
        }
    }
}

/// Parses arguments and runs; usage errors exit 2, `--help` exits 0.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(cli),
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                EXIT_INPUT
            } else {
                EXIT_OK
            }
        }
    }
}
