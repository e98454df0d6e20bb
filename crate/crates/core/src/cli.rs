//! Command-line front end for the `frobpde` binary.
//!
//! Exit codes: 0 on success, 2 when the mathematics refuses (resonant or
//! off-conic point, no usable point), 1 for malformed input.

use std::collections::{BTreeMap, HashMap};
use std::io;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

use crate::catalog::{self, CatalogEntry, Model};
use crate::euler::{self, CoordDirection, EulerPDE, Family};
use crate::expr_parser::{parse_expr, series_of, to_series, ExprError};
use crate::frobenius::{
    convergence_report, prepare_coordinates, radius_estimate, radius_estimate_series, solve_with, FrobeniusError,
    FrobeniusSolution, RegularSingularPDE, ResonancePolicy, SolveOptions,
};
use crate::indicial::{
    classify_with_tol, resonance_scan, solve_for_s, IndicialConic, IndicialError, SRoots, DEFAULT_DEGENERACY_TOL,
    DEFAULT_RESONANCE_TOL,
};
use crate::multiseries::{CSeries2, Complex};
use crate::verify::{eval_solution, residual_max};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("schema error at {pointer}: {message}")]
    Schema { pointer: String, message: String },
    #[error("{0}")]
    Refusal(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Refusal(_) => 2,
            _ => 1,
        }
    }

    fn schema(pointer: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Schema {
            pointer: pointer.into(),
            message: message.into(),
        }
    }
}

impl From<ExprError> for CliError {
    fn from(e: ExprError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<FrobeniusError> for CliError {
    fn from(e: FrobeniusError) -> Self {
        match e {
            FrobeniusError::BasePointNotOnConic { .. }
            | FrobeniusError::ResonantPoint { .. }
            | FrobeniusError::NonFinite(_) => CliError::Refusal(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<IndicialError> for CliError {
    fn from(e: IndicialError) -> Self {
        match e {
            IndicialError::BasePointNotOnConic { .. } | IndicialError::NoSolution => CliError::Refusal(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<catalog::CatalogError> for CliError {
    fn from(e: catalog::CatalogError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<euler::EulerError> for CliError {
    fn from(e: euler::EulerError) -> Self {
        CliError::Input(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "frobpde", version, about = "Frobenius series for regular-singular PDEs")]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    /// Print a timestamp line on stderr; the payload is unchanged.
    #[arg(long, global = true)]
    pub meta: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Indicial conic and its classification.
    Classify(ClassifyArgs),
    /// Frobenius coefficients for a problem file.
    Solve(SolveArgs),
    /// Lattice shifts of the base point that fall back on the conic.
    ScanResonance(ScanArgs),
    /// Euler PDE: conic, class, sample exponents, integral points.
    Euler(EulerArgs),
    /// Named models.
    Catalog {
        #[command(subcommand)]
        command: CatalogCommand,
    },
    /// Solve and report the operator residual.
    Verify(VerifyArgs),
    /// Coordinate changes.
    Transform {
        #[command(subcommand)]
        command: TransformCommand,
    },
    /// Radius estimate from layer sums.
    Radius(RadiusArgs),
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    /// Problem file.
    #[arg(long, conflicts_with_all = ["euler", "conic"])]
    pub problem: Option<PathBuf>,
    /// Euler coefficients `A,B,C,D,E,F`.
    #[arg(long, conflicts_with = "conic")]
    pub euler: Option<String>,
    /// Conic coefficients of `A r^2 + B rs + C s^2 + D r + E s + F`.
    #[arg(long)]
    pub conic: Option<String>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    pub problem: PathBuf,
    /// Overrides the problem's order.
    #[arg(long)]
    pub order: Option<u32>,
    /// Continue through resonances whose right-hand side vanishes, with `D_Q = 0`.
    #[arg(long)]
    pub allow_compatible_resonance: bool,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    pub problem: PathBuf,
    /// Scan bound; defaults to the problem's order.
    #[arg(long)]
    pub bound: Option<u32>,
}

#[derive(Debug, Args)]
pub struct EulerArgs {
    /// `A,B,C,D,E,F`.
    #[arg(long, conflicts_with = "family")]
    pub coeffs: Option<String>,
    /// `elliptic:A,C`, `parabolic:A,B,C` or `hyperbolic:A,B`.
    #[arg(long)]
    pub family: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum CatalogCommand {
    List,
    Solve(CatalogSolveArgs),
}

#[derive(Debug, Args)]
pub struct CatalogSolveArgs {
    pub name: String,
    /// `name=value`, repeatable.
    #[arg(long = "param")]
    pub params: Vec<String>,
    #[arg(long, default_value_t = 20)]
    pub order: u32,
    /// `r,s`; defaults to the first nonresonant point of the documented search.
    #[arg(long)]
    pub point: Option<String>,
    #[arg(long)]
    pub allow_compatible_resonance: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub problem: PathBuf,
    /// Also evaluate the solution at `x,y`.
    #[arg(long)]
    pub at: Option<String>,
    #[arg(long)]
    pub allow_compatible_resonance: bool,
}

#[derive(Debug, Subcommand)]
pub enum TransformCommand {
    /// `x = e^u, y = e^v` coefficient map.
    EulerCoordinates {
        #[arg(long)]
        coeffs: String,
        #[arg(long, value_enum)]
        direction: DirectionArg,
    },
    /// Series `f(x)`, `g(y)` making variable leading coefficients constant.
    PrepareCoordinates {
        /// `A(x)` as an expression in `x`.
        #[arg(long)]
        a_of_x: String,
        /// `C(y)` as an expression in `y`.
        #[arg(long)]
        c_of_y: String,
        #[arg(long, default_value_t = 12)]
        order: u32,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DirectionArg {
    ToConstant,
    ToEuler,
}

#[derive(Debug, Args)]
pub struct RadiusArgs {
    /// Problem file to solve first.
    #[arg(long, conflicts_with_all = ["series", "divergent_demo"])]
    pub problem: Option<PathBuf>,
    /// JSON file holding `[[q1, q2, re, im], ...]`.
    #[arg(long, conflicts_with = "divergent_demo")]
    pub series: Option<PathBuf>,
    /// Coefficients of `(n^2 - n - 1/2) a_n = (n + 1) a_{n+1}` up to this order.
    #[arg(long)]
    pub divergent_demo: Option<u32>,
}

/// Where to expand.
#[derive(Debug, Clone, PartialEq)]
pub enum PointSpec {
    Fixed(Complex, Complex),
    Auto,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tolerances {
    pub resonance: f64,
    pub degeneracy: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            resonance: DEFAULT_RESONANCE_TOL,
            degeneracy: DEFAULT_DEGENERACY_TOL,
        }
    }
}

/// A fully resolved problem file.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub pde: RegularSingularPDE,
    pub exprs: [String; 3],
    pub params: BTreeMap<String, Complex>,
    pub point: PointSpec,
    pub order: u32,
    pub tolerances: Tolerances,
}

pub fn load_problem(path: &Path) -> Result<ProblemSpec, CliError> {
    let text = std::fs::read_to_string(path)?;
    parse_problem(&text)
}

/// Parses the JSON problem schema:
///
/// ```json
/// {"A": 1, "B": 2, "C": 1, "a": "1", "b": "1", "c": "x^2 - nu^2",
///  "params": {"nu": 0.5}, "point": [0.5, 0] | "auto", "order": 10,
///  "tolerances": {"resonance": 1e-9, "degeneracy": 1e-9}}
/// ```
///
/// Complex numbers are bare reals or `[re, im]`.
pub fn parse_problem(text: &str) -> Result<ProblemSpec, CliError> {
    let root: Value = serde_json::from_str(text).map_err(|e| CliError::schema("", format!("invalid JSON: {e}")))?;
    let obj = root
        .as_object()
        .ok_or_else(|| CliError::schema("", "expected an object"))?;
    const KNOWN: [&str; 10] = ["A", "B", "C", "a", "b", "c", "params", "point", "order", "tolerances"];
    if let Some(k) = obj.keys().find(|k| !KNOWN.contains(&k.as_str())) {
        return Err(CliError::schema(format!("/{k}"), "unknown field"));
    }
    let field = |k: &str| {
        obj.get(k)
            .ok_or_else(|| CliError::schema(format!("/{k}"), "missing field"))
    };

    let mut params = BTreeMap::new();
    if let Some(p) = obj.get("params") {
        let p = p
            .as_object()
            .ok_or_else(|| CliError::schema("/params", "expected an object"))?;
        for (k, v) in p {
            params.insert(k.clone(), complex_value(v, &format!("/params/{k}"))?);
        }
    }
    let order = field("order")?
        .as_u64()
        .filter(|&n| n >= 1 && n <= u64::from(u32::MAX))
        .ok_or_else(|| CliError::schema("/order", "expected an integer >= 1"))? as u32;

    let ca = complex_value(field("A")?, "/A")?;
    let cb = complex_value(field("B")?, "/B")?;
    let cc = complex_value(field("C")?, "/C")?;
    let hp: HashMap<String, Complex> = params.clone().into_iter().collect();
    let mut exprs: [String; 3] = Default::default();
    let mut series = Vec::new();
    for (i, k) in ["a", "b", "c"].into_iter().enumerate() {
        let t = field(k)?
            .as_str()
            .ok_or_else(|| CliError::schema(format!("/{k}"), "expected an expression string"))?;
        let ast = parse_expr(t).map_err(|e| CliError::schema(format!("/{k}"), e.to_string()))?;
        let s = to_series(&ast, &hp, order).map_err(|e| CliError::schema(format!("/{k}"), e.to_string()))?;
        exprs[i] = t.to_string();
        series.push(s);
    }
    let c = series.pop().expect("three series");
    let b = series.pop().expect("three series");
    let a = series.pop().expect("three series");

    let point = match field("point")? {
        Value::String(s) if s == "auto" => PointSpec::Auto,
        Value::Array(v) if v.len() == 2 => {
            PointSpec::Fixed(complex_value(&v[0], "/point/0")?, complex_value(&v[1], "/point/1")?)
        }
        _ => return Err(CliError::schema("/point", "expected [r, s] or \"auto\"")),
    };

    let mut tolerances = Tolerances::default();
    if let Some(t) = obj.get("tolerances") {
        let t = t
            .as_object()
            .ok_or_else(|| CliError::schema("/tolerances", "expected an object"))?;
        for (k, v) in t {
            let p = format!("/tolerances/{k}");
            let x = v
                .as_f64()
                .filter(|x| *x > 0.0)
                .ok_or_else(|| CliError::schema(p.clone(), "expected a positive number"))?;
            match k.as_str() {
                "resonance" => tolerances.resonance = x,
                "degeneracy" => tolerances.degeneracy = x,
                _ => return Err(CliError::schema(p, "unknown tolerance")),
            }
        }
    }

    Ok(ProblemSpec {
        pde: RegularSingularPDE::new(ca, cb, cc, a, b, c),
        exprs,
        params,
        point,
        order,
        tolerances,
    })
}

fn complex_value(v: &Value, pointer: &str) -> Result<Complex, CliError> {
    match v {
        Value::Number(n) => Ok(Complex::new(n.as_f64().unwrap_or(f64::NAN), 0.0)),
        Value::Array(a) if a.len() == 2 => match (a[0].as_f64(), a[1].as_f64()) {
            (Some(re), Some(im)) => Ok(Complex::new(re, im)),
            _ => Err(CliError::schema(pointer, "expected [re, im] numbers")),
        },
        _ => Err(CliError::schema(pointer, "expected a number or [re, im]")),
    }
    .and_then(|z| {
        if z.re.is_finite() && z.im.is_finite() {
            Ok(z)
        } else {
            Err(CliError::schema(pointer, "number out of range"))
        }
    })
}

/// Candidate `r` values `0, 1/2, -1/2, 1, -1, 3/2, ...` up to `|r| = 10`.
fn auto_r_values() -> impl Iterator<Item = f64> {
    std::iter::once(0.0).chain((1..=20).flat_map(|k| {
        let v = f64::from(k) / 2.0;
        [v, -v]
    }))
}

/// First point on the conic, in the documented search order, whose shifts up
/// to `bound` avoid the conic. For each `r` the roots in `s` are tried in
/// ascending (re, im) order; when every `s` works, `s = 0` is used.
pub fn auto_point(conic: &IndicialConic, bound: u32, tol: f64) -> Option<(Complex, Complex)> {
    for r in auto_r_values() {
        let r = Complex::new(r, 0.0);
        let candidates = match solve_for_s(conic, r) {
            Ok(SRoots::Finite(v)) => v,
            Ok(SRoots::All) => vec![Complex::default()],
            Err(_) => continue,
        };
        for s in candidates {
            if bound == 0 {
                return Some((r, s));
            }
            if let Ok(rep) = resonance_scan(conic, r, s, bound, tol) {
                if rep.is_clean() {
                    return Some((r, s));
                }
            }
        }
    }
    None
}

fn resolve_point(spec: &ProblemSpec, order: u32) -> Result<(Complex, Complex), CliError> {
    match spec.point {
        PointSpec::Fixed(r, s) => Ok((r, s)),
        PointSpec::Auto => auto_point(&spec.pde.conic(), order, spec.tolerances.resonance)
            .ok_or_else(|| CliError::Refusal("no nonresonant point found by the automatic search".into())),
    }
}

fn policy(allow: bool) -> ResonancePolicy {
    if allow {
        ResonancePolicy::ZeroCompatible
    } else {
        ResonancePolicy::Refuse
    }
}

fn solve_problem(spec: &ProblemSpec, order: u32, allow: bool) -> Result<FrobeniusSolution, CliError> {
    let (r0, s0) = resolve_point(spec, order)?;
    Ok(solve_with(
        &spec.pde,
        r0,
        s0,
        order,
        SolveOptions {
            tol: spec.tolerances.resonance,
            resonance: policy(allow),
        },
    )?)
}

/// A comma-separated list of constant expressions, e.g. `1/2, -3, 2*i`.
fn parse_complex_list(text: &str, n: usize) -> Result<Vec<Complex>, CliError> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != n {
        return Err(CliError::Input(format!(
            "expected {n} comma-separated values, got {}",
            parts.len()
        )));
    }
    let empty = HashMap::new();
    parts
        .iter()
        .map(|p| {
            let s = series_of(p.trim(), &empty, 0)?;
            if !s.is_univariate_x() || !s.is_univariate_y() {
                return Err(CliError::Input(format!("`{}` is not a constant", p.trim())));
            }
            Ok(s.constant_term())
        })
        .collect()
}

fn parse_real_list(text: &str, n: usize) -> Result<Vec<f64>, CliError> {
    parse_complex_list(text, n)?
        .into_iter()
        .map(|z| {
            if z.im == 0.0 {
                Ok(z.re)
            } else {
                Err(CliError::Input("expected real values".into()))
            }
        })
        .collect()
}

fn parse_family(text: &str) -> Result<Family, CliError> {
    let (kind, rest) = text
        .split_once(':')
        .ok_or_else(|| CliError::Input("family must look like `elliptic:A,C`".into()))?;
    let ints = |n: usize| -> Result<Vec<i64>, CliError> {
        let v: Result<Vec<i64>, _> = rest.split(',').map(|p| p.trim().parse::<i64>()).collect();
        let v = v.map_err(|e| CliError::Input(format!("family parameters must be integers: {e}")))?;
        if v.len() != n {
            return Err(CliError::Input(format!("`{kind}` takes {n} integers")));
        }
        // keeps every product in the exact conic evaluation inside i128
        if v.iter().any(|x| x.unsigned_abs() > 1 << 20) {
            return Err(CliError::Input("family parameters must satisfy |v| <= 2^20".into()));
        }
        Ok(v)
    };
    match kind {
        "elliptic" => {
            let v = ints(2)?;
            Ok(Family::Elliptic { a: v[0], c: v[1] })
        }
        "parabolic" => {
            let v = ints(3)?;
            Ok(Family::Parabolic {
                a: v[0],
                b: v[1],
                c: v[2],
            })
        }
        "hyperbolic" => {
            let v = ints(2)?;
            Ok(Family::Hyperbolic { a: v[0], b: v[1] })
        }
        _ => Err(CliError::Input(format!("unknown family `{kind}`"))),
    }
}

fn six(v: Vec<Complex>) -> [Complex; 6] {
    [v[0], v[1], v[2], v[3], v[4], v[5]]
}

#[derive(Serialize)]
struct SolutionOut<'a> {
    r0: Complex,
    s0: Complex,
    order: u32,
    coeffs: &'a CSeries2,
    resonance: &'a crate::indicial::ResonanceReport,
    compatible_resonances: &'a [crate::multiseries::MultiIndex],
    convergence: crate::frobenius::ConvergenceReport,
}

fn solution_out<'a>(pde: &RegularSingularPDE, sol: &'a FrobeniusSolution) -> SolutionOut<'a> {
    SolutionOut {
        r0: sol.r0,
        s0: sol.s0,
        order: sol.order,
        coeffs: &sol.coeffs,
        resonance: &sol.resonance,
        compatible_resonances: &sol.compatible,
        convergence: convergence_report(pde.ca, pde.cb, pde.cc),
    }
}

fn radius_json(r: f64) -> Value {
    if r.is_finite() {
        serde_json::json!({ "radius": r, "unbounded": false })
    } else {
        serde_json::json!({ "radius": null, "unbounded": true })
    }
}

/// Runs one invocation and returns the text for stdout.
pub fn run(cli: &Cli) -> Result<String, CliError> {
    let fmt = cli.format;
    match &cli.command {
        Command::Classify(a) => {
            let (conic, tol) = if let Some(p) = &a.problem {
                let spec = load_problem(p)?;
                (spec.pde.conic(), spec.tolerances.degeneracy)
            } else if let Some(e) = &a.euler {
                (
                    EulerPDE::new(six(parse_complex_list(e, 6)?)).conic(),
                    DEFAULT_DEGENERACY_TOL,
                )
            } else if let Some(c) = &a.conic {
                let v = six(parse_complex_list(c, 6)?);
                (
                    IndicialConic::new(v[0], v[1], v[2], v[3], v[4], v[5]),
                    DEFAULT_DEGENERACY_TOL,
                )
            } else {
                return Err(CliError::Input("give --problem, --euler or --conic".into()));
            };
            let class = classify_with_tol(&conic, tol)?;
            let conv = convergence_report(conic.ca, conic.cb, conic.cc);
            emit_json(
                &serde_json::json!({
                    "conic": conic.coefficients(),
                    "class": class,
                    "convergence": conv,
                }),
                fmt,
            )
        }
        Command::Solve(a) => {
            let spec = load_problem(&a.problem)?;
            let order = a.order.unwrap_or(spec.order);
            let sol = solve_problem(&spec, order, a.allow_compatible_resonance)?;
            match fmt {
                Format::Json => to_json(&solution_out(&spec.pde, &sol)),
                Format::Csv => Ok(series_csv(&sol.coeffs)),
            }
        }
        Command::ScanResonance(a) => {
            let spec = load_problem(&a.problem)?;
            let bound = a.bound.unwrap_or(spec.order);
            let conic = spec.pde.conic();
            let (r0, s0) = match spec.point {
                PointSpec::Fixed(r, s) => (r, s),
                PointSpec::Auto => resolve_point(&spec, bound)?,
            };
            let rep = resonance_scan(&conic, r0, s0, bound, spec.tolerances.resonance)?;
            match fmt {
                Format::Json => to_json(&rep),
                Format::Csv => {
                    let mut out = String::from("q1,q2,magnitude\n");
                    for h in &rep.hits {
                        out.push_str(&format!("{},{},{}\n", h.q.q1, h.q.q2, fmt_f64(h.magnitude)));
                    }
                    Ok(out)
                }
            }
        }
        Command::Euler(a) => {
            let (pde, family) = match (&a.coeffs, &a.family) {
                (Some(c), _) => (EulerPDE::new(six(parse_complex_list(c, 6)?)), None),
                (None, Some(f)) => {
                    let fam = parse_family(f)?;
                    (fam.euler_pde(), Some(fam))
                }
                (None, None) => return Err(CliError::Input("give --coeffs or --family".into())),
            };
            let conic = pde.conic();
            let class = classify_with_tol(&conic, DEFAULT_DEGENERACY_TOL).ok();
            let mut samples = Vec::new();
            for r in [0.0, 0.5, -0.5, 1.0, -1.0] {
                let r = Complex::new(r, 0.0);
                match solve_for_s(&conic, r) {
                    Ok(SRoots::Finite(v)) => {
                        for s in v {
                            samples.push(serde_json::json!({ "r": r, "s": s }));
                        }
                    }
                    Ok(SRoots::All) => samples.push(serde_json::json!({ "r": r, "s": "any" })),
                    Err(_) => {}
                }
            }
            let points = family.map(euler::integral_points).transpose()?;
            emit_json(
                &serde_json::json!({
                    "pde": pde.to_array(),
                    "conic": conic.coefficients(),
                    "class": class,
                    "monomial_exponents": samples,
                    "family": family,
                    "integral_points": points,
                }),
                fmt,
            )
        }
        Command::Catalog { command } => match command {
            CatalogCommand::List => {
                let models: Vec<Value> = Model::ALL
                    .iter()
                    .map(|m| {
                        let e = m.expressions();
                        serde_json::json!({
                            "name": m.name(),
                            "params": m.params(),
                            "equation": m.equation(),
                            "normalized": m.normalized(),
                            "A": e[0], "B": e[1], "C": e[2],
                            "a": e[3], "b": e[4], "c": e[5],
                        })
                    })
                    .collect();
                match fmt {
                    Format::Json => to_json(&models),
                    Format::Csv => {
                        let mut out = String::from("name,params,normalized\n");
                        for m in Model::ALL {
                            out.push_str(&format!("{},{},{}\n", m.name(), m.params().join(";"), m.normalized()));
                        }
                        Ok(out)
                    }
                }
            }
            CatalogCommand::Solve(a) => {
                let model: Model = a.name.parse()?;
                let mut entry = CatalogEntry::new(model);
                for p in &a.params {
                    let (k, v) = p
                        .split_once('=')
                        .ok_or_else(|| CliError::Input(format!("parameter `{p}` must look like name=value")))?;
                    let v = parse_complex_list(v, 1)?[0];
                    entry = entry.with_complex(k.trim(), v);
                }
                let pde = catalog::make_pde(&entry, a.order)?;
                let tol = DEFAULT_RESONANCE_TOL;
                let (r0, s0) = match &a.point {
                    Some(p) => {
                        let v = parse_complex_list(p, 2)?;
                        (v[0], v[1])
                    }
                    None => auto_point(&pde.conic(), a.order, tol).ok_or_else(|| {
                        CliError::Refusal("no nonresonant point found by the automatic search".into())
                    })?,
                };
                let sol = solve_with(
                    &pde,
                    r0,
                    s0,
                    a.order,
                    SolveOptions {
                        tol,
                        resonance: policy(a.allow_compatible_resonance),
                    },
                )?;
                match fmt {
                    Format::Json => to_json(&solution_out(&pde, &sol)),
                    Format::Csv => Ok(series_csv(&sol.coeffs)),
                }
            }
        },
        Command::Verify(a) => {
            let spec = load_problem(&a.problem)?;
            let sol = solve_problem(&spec, spec.order, a.allow_compatible_resonance)?;
            let rep = residual_max(&spec.pde, &sol);
            let eval = match &a.at {
                Some(t) => {
                    let v = parse_real_list(t, 2)?;
                    Some(eval_solution(&sol, v[0], v[1]).map_err(|e| CliError::Input(e.to_string()))?)
                }
                None => None,
            };
            emit_json(&serde_json::json!({ "residual": rep, "evaluation": eval }), fmt)
        }
        Command::Transform { command } => match command {
            TransformCommand::EulerCoordinates { coeffs, direction } => {
                let dir = match direction {
                    DirectionArg::ToConstant => CoordDirection::ToConstant,
                    DirectionArg::ToEuler => CoordDirection::ToEuler,
                };
                let out = euler::euler_coords(six(parse_complex_list(coeffs, 6)?), dir);
                emit_json(&serde_json::json!({ "coeffs": out }), fmt)
            }
            TransformCommand::PrepareCoordinates { a_of_x, c_of_y, order } => {
                let empty = HashMap::new();
                let a = series_of(a_of_x, &empty, *order)?;
                let c = series_of(c_of_y, &empty, *order)?;
                let (f, g) = prepare_coordinates(&a, &c)?;
                emit_json(&serde_json::json!({ "f": f, "g": g }), fmt)
            }
        },
        Command::Radius(a) => {
            let r = if let Some(p) = &a.problem {
                let spec = load_problem(p)?;
                radius_estimate(&solve_problem(&spec, spec.order, false)?)
            } else if let Some(p) = &a.series {
                let text = std::fs::read_to_string(p)?;
                let s: CSeries2 = serde_json::from_str(&text)
                    .map_err(|e| CliError::schema("", format!("expected [[q1, q2, re, im], ...]: {e}")))?;
                radius_estimate_series(&s)
            } else if let Some(n) = a.divergent_demo {
                radius_estimate_series(&catalog::divergent_demo_table(n))
            } else {
                return Err(CliError::Input("give --problem, --series or --divergent-demo".into()));
            };
            emit_json(&radius_json(r), fmt)
        }
    }
}

fn emit_json<T: Serialize>(v: &T, fmt: Format) -> Result<String, CliError> {
    match fmt {
        Format::Json => to_json(v),
        Format::Csv => Err(CliError::Input("this subcommand only supports --format json".into())),
    }
}

fn series_csv(s: &CSeries2) -> String {
    let mut out = String::from("q1,q2,re,im\n");
    for (q1, q2, re, im) in s.to_quads() {
        out.push_str(&format!("{q1},{q2},{},{}\n", fmt_f64(re), fmt_f64(im)));
    }
    out
}

/// `%.17g`: 17 significant digits, trailing zeros dropped.
pub fn fmt_f64(v: f64) -> String {
    if !v.is_finite() {
        return if v.is_nan() {
            "nan".into()
        } else if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    if v == 0.0 {
        return if v.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{v:.16e}");
    let (mant, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..17).contains(&exp) {
        let s = format!("{:.*}", (16 - exp) as usize, v);
        trim_zeros(&s).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mant), exp.abs())
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

struct SigFormatter;

impl serde_json::ser::Formatter for SigFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(fmt_f64(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

/// Compact JSON with every float at 17 significant digits.
pub fn to_json<T: Serialize + ?Sized>(v: &T) -> Result<String, CliError> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SigFormatter);
    v.serialize(&mut ser)
        .map_err(|e| CliError::Input(format!("serialization failed: {e}")))?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}
