//! Command line front end: argument parsing, run configuration and
//! schema-versioned reports.

use std::fmt::Write as _;

use clap::{Args, Parser, Subcommand, ValueEnum};
use focklab::criteria::{classify_with, essential_norm_bracket, m_profile, symbolic_profile, Classification};
use focklab::fock::fock_norm_detailed;
use focklab::operator::{empirical_norm, f2_compression, matrix_sigma_max, Family, WeightedCompositionOperator};
use focklab::symbol::{parse_affine, parse_complex, parse_radii, parse_symbol, AffineMap, EntireFunction};
use focklab::topology::{compact_difference, component_id, is_isolated, path_profile, PathKind, PathSettings};
use focklab::verify::{run_criterion, SuiteReport, VerifyConfig, CRITERIA};
use focklab::{Error, ErrorClass, FockIndex, QuadratureSpec};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Map, Value};

/// Version of the report layout in `schema/report.schema.json`.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Parser)]
#[command(
    name = "focklab",
    version,
    about = "Weighted composition operators between Fock spaces"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Absolute quadrature tolerance.
    #[arg(long, global = true, allow_hyphen_values = true, default_value_t = QuadratureSpec::default().abs_tol)]
    pub abs_tol: f64,
    /// Relative quadrature tolerance.
    #[arg(long, global = true, allow_hyphen_values = true, default_value_t = QuadratureSpec::default().rel_tol)]
    pub rel_tol: f64,
    /// Largest truncation radius the quadrature may use.
    #[arg(long, global = true, allow_hyphen_values = true, default_value_t = QuadratureSpec::default().max_radius)]
    pub max_radius: f64,
    /// Order of the truncated F² matrices.
    #[arg(long, global = true, default_value_t = 64)]
    pub matrix_order: usize,
    /// Radius of the kernel grid for distance bounds.
    #[arg(long, global = true, allow_hyphen_values = true, default_value_t = 6.0)]
    pub grid_radius: f64,
    /// Output format; JSON unless the command produces tabular data.
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
    /// Seed for the randomized suites.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Args)]
pub struct OperatorArgs {
    /// Weight ψ, e.g. "(1+2i)*z^2*exp((0.5-1i)*z) + 3".
    #[arg(long, allow_hyphen_values = true)]
    pub psi: String,
    /// Affine symbol "a,b" for φ(z) = az + b.
    #[arg(long, allow_hyphen_values = true)]
    pub phi: String,
    #[arg(long, allow_hyphen_values = true)]
    pub p: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub q: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PathKindArg {
    Dilate,
    Translate,
    Weight,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Fock norm of a symbol.
    Norm {
        #[arg(long, allow_hyphen_values = true)]
        symbol: String,
        #[arg(long, allow_hyphen_values = true)]
        p: f64,
    },
    /// Boundedness and compactness with norm and essential norm brackets.
    Classify(OperatorArgs),
    /// Lower and upper bounds for the operator norm.
    Opnorm(OperatorArgs),
    /// Essential norm bracket.
    Essnorm(OperatorArgs),
    /// Whether W₁ − W₂ is compact.
    Diff {
        #[arg(long, allow_hyphen_values = true)]
        psi1: String,
        #[arg(long, allow_hyphen_values = true)]
        phi1: String,
        #[arg(long, allow_hyphen_values = true)]
        psi2: String,
        #[arg(long, allow_hyphen_values = true)]
        phi2: String,
        #[arg(long, allow_hyphen_values = true)]
        p: f64,
        #[arg(long, allow_hyphen_values = true)]
        q: f64,
    },
    /// Path component of a bounded operator.
    Component(OperatorArgs),
    /// Whether C_φ is isolated.
    Isolated {
        #[arg(long, allow_hyphen_values = true)]
        phi: String,
        #[arg(long, allow_hyphen_values = true)]
        p: f64,
        #[arg(long, allow_hyphen_values = true)]
        q: f64,
    },
    /// Increments along a connecting path.
    Path {
        #[arg(long, value_enum)]
        kind: PathKindArg,
        #[arg(long, allow_hyphen_values = true)]
        psi: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        phi: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        psi1: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        psi2: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        b1: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        b2: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        p: f64,
        #[arg(long, allow_hyphen_values = true)]
        q: f64,
        #[arg(long, default_value_t = 10)]
        steps: usize,
    },
    /// Annulus suprema of m_z.
    ProfileM {
        #[arg(long, allow_hyphen_values = true)]
        psi: String,
        #[arg(long, allow_hyphen_values = true)]
        phi: String,
        /// Comma separated radii.
        #[arg(long, default_value = "1,2,4,8,16,32,64,128,256,512,1024")]
        radii: String,
    },
    /// The full property suite.
    Verify {
        /// Comma separated criterion numbers; all when omitted.
        #[arg(long, allow_hyphen_values = true)]
        criteria: Option<String>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Norm { .. } => "norm",
            Command::Classify(_) => "classify",
            Command::Opnorm(_) => "opnorm",
            Command::Essnorm(_) => "essnorm",
            Command::Diff { .. } => "diff",
            Command::Component(_) => "component",
            Command::Isolated { .. } => "isolated",
            Command::Path { .. } => "path",
            Command::ProfileM { .. } => "profile-m",
            Command::Verify { .. } => "verify",
        }
    }

    fn tabular(&self) -> bool {
        matches!(self, Command::Path { .. } | Command::ProfileM { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub quadrature: QuadratureSpec,
    pub matrix_order: usize,
    pub grid_radius: f64,
    pub output_format: OutputFormat,
    pub seed: u64,
}

impl RunConfig {
    pub fn from_args(args: &GlobalArgs, command: &Command) -> Result<Self, CliError> {
        let quadrature = QuadratureSpec {
            abs_tol: args.abs_tol,
            rel_tol: args.rel_tol,
            max_radius: args.max_radius,
            ..QuadratureSpec::default()
        };
        quadrature.validate().map_err(Error::from)?;
        if args.matrix_order == 0 {
            return Err(CliError::Input("--matrix-order must be positive".into()));
        }
        if !(args.grid_radius > 0.0 && args.grid_radius.is_finite()) {
            return Err(CliError::Input("--grid-radius must be positive".into()));
        }
        let default_format = if command.tabular() {
            OutputFormat::Csv
        } else {
            OutputFormat::Json
        };
        let output_format = args.format.unwrap_or(default_format);
        if output_format == OutputFormat::Csv && !command.tabular() {
            return Err(CliError::Input(format!("{} has no CSV form", command.name())));
        }
        Ok(Self {
            quadrature,
            matrix_order: args.matrix_order,
            grid_radius: args.grid_radius,
            output_format,
            seed: args.seed,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Input(String),
    Library(Error),
    /// The command ran but some verified property failed.
    Failed(Box<Report>),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Library(e)
    }
}

macro_rules! lift {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Library(e.into())
            }
        }
    )*};
}
lift!(
    focklab::ParseError,
    focklab::SymbolError,
    focklab::QuadratureError,
    focklab::OperatorError,
    focklab::CriteriaError,
    focklab::TopologyError
);

impl CliError {
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Input(_) => "cli.input",
            CliError::Library(e) => e.code(),
            CliError::Failed(_) => "verify.failed",
        }
    }

    pub fn message(&self) -> String {
        match self {
            CliError::Input(m) => m.clone(),
            CliError::Library(e) => e.to_string(),
            CliError::Failed(r) => format!("{} criteria failed", r.results["failed"]),
        }
    }

    /// 1 input error, 2 hypothesis violation, 3 numeric failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Library(e) => match e.class() {
                ErrorClass::Input => 1,
                ErrorClass::Hypothesis => 2,
                ErrorClass::Numeric => 3,
            },
            CliError::Failed(_) => 3,
        }
    }

    pub fn to_json(&self, command: &str) -> Value {
        json!({
            "schema_version": SCHEMA_VERSION,
            "command": command,
            "error": { "code": self.code(), "message": self.message() },
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub inputs: Value,
    pub results: Value,
    pub citations: Vec<String>,
    pub diagnostics: Value,
    #[serde(skip)]
    table: Option<Table>,
}

#[derive(Debug, Clone, PartialEq)]
struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<f64>>,
}

/// A real that may be infinite: finite values are plain numbers, the
/// others `{"value": "inf", "infinite": true}`.
pub fn real(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x.is_nan() {
        json!({ "value": "nan", "infinite": false })
    } else {
        json!({ "value": if x > 0.0 { "inf" } else { "-inf" }, "infinite": true })
    }
}

fn complex(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn affine(phi: &AffineMap) -> Value {
    json!({ "a": complex(phi.a()), "b": complex(phi.b()) })
}

fn index(p: f64) -> Result<FockIndex, CliError> {
    Ok(FockIndex::new(p)?)
}

fn symbol(text: &str, warnings: &mut Vec<String>) -> Result<EntireFunction, CliError> {
    let f = parse_symbol(text)?;
    if f.is_zero() {
        warnings.push(format!("symbol {text:?} is identically zero"));
    }
    Ok(f)
}

fn operator(args: &OperatorArgs, warnings: &mut Vec<String>) -> Result<WeightedCompositionOperator, CliError> {
    let psi = symbol(&args.psi, warnings)?;
    let phi = parse_affine(&args.phi)?;
    Ok(WeightedCompositionOperator::new(
        psi,
        phi,
        index(args.p)?,
        index(args.q)?,
    )?)
}

fn operator_inputs(w: &WeightedCompositionOperator) -> Value {
    json!({
        "psi": w.psi().render(),
        "phi": affine(w.phi()),
        "p": w.p().get(),
        "q": w.q().get(),
    })
}

fn classification(c: &Classification) -> Value {
    json!({
        "verdict": c.verdict,
        "witness": c.witness.map(complex),
        "norm_lower": real(c.norm_lower),
        "norm_upper": real(c.norm_upper),
        "ess_lower": real(c.ess_lower),
        "ess_upper": real(c.ess_upper),
        "ls_norm": c.ls_norm.map(real),
        "m_sup": real(c.m_sup),
        "m_limsup": real(c.m_limsup),
        "regime": c.regime,
        "ess_from_theorem": c.ess_from_theorem,
    })
}

fn classification_citations(w: &WeightedCompositionOperator) -> Vec<String> {
    let (p, q, phi) = (w.p().get(), w.q().get(), w.phi());
    let mut out = Vec::new();
    if phi.is_constant() {
        out.push("rank-one operator: exact norm e^{|b|²/2}‖ψ‖_q".to_string());
    } else if q < p {
        out.push("boundedness ⟺ compactness ⟺ m_z ∈ L^{pq/(p−q)} (q < p)".to_string());
        out.push("explicit upper bound (q/2π)^{1/q}(2π/(p|a|²))^{1/p}‖m‖ (q < p)".to_string());
    } else {
        out.push("boundedness ⟺ sup m_z < ∞ (p ≤ q)".to_string());
        out.push("compactness ⟺ m_z → 0 (p ≤ q)".to_string());
        out.push("norm bracket sup m ≤ ‖W‖ ≤ (q/(p|a|²))^{1/q} sup m (p ≤ q)".to_string());
        if phi.is_unit_modulus() {
            out.push("unit-modulus symbols: ψ e^{b̄az} must be constant".to_string());
            out.push("essential norm bracket limsup m ≤ ‖W‖_e ≤ 2(q/(p|a|²))^{1/q} limsup m (1 < p ≤ q)".to_string());
        }
    }
    out
}

fn spec_diagnostics(cfg: &RunConfig) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert(
        "quadrature".into(),
        serde_json::to_value(cfg.quadrature).unwrap_or(Value::Null),
    );
    m
}

fn report(
    command: &Command,
    inputs: Value,
    results: Value,
    citations: Vec<String>,
    diagnostics: Map<String, Value>,
) -> Report {
    Report {
        schema_version: SCHEMA_VERSION,
        command: command.name().to_string(),
        inputs,
        results,
        citations,
        diagnostics: Value::Object(diagnostics),
        table: None,
    }
}

fn family_for(w: &WeightedCompositionOperator) -> Family {
    let mut family = Family::default();
    if let Some(z) = symbolic_profile(w.psi(), w.phi()).argmax {
        family.extra_kernels.push(w.phi().apply(z));
    }
    family
}

/// Runs one command.
pub fn run(command: &Command, cfg: &RunConfig) -> Result<Report, CliError> {
    let spec = &cfg.quadrature;
    let mut warnings = Vec::new();
    let mut diag = spec_diagnostics(cfg);
    let mut out = match command {
        Command::Norm { symbol: text, p } => {
            let f = symbol(text, &mut warnings)?;
            let (norm, integral) = fock_norm_detailed(&f, index(*p)?, spec)?;
            if let Some(i) = integral {
                diag.insert("truncation_radius".into(), json!(i.truncation_radius));
                diag.insert("integral_error_estimate".into(), json!(i.error_estimate));
                diag.insert("ln_integral".into(), real(i.ln_value));
            }
            report(
                command,
                json!({ "symbol": f.render(), "p": p }),
                json!({ "value": real(norm.value), "error_estimate": norm.error_estimate }),
                vec!["‖f‖_p = ((p/2π)∫|f|^p e^{−p|z|²/2} dA)^{1/p}".into()],
                diag,
            )
        }
        Command::Classify(args) => {
            let w = operator(args, &mut warnings)?;
            let c = classify_with(&w, spec, &Family::default())?;
            report(
                command,
                operator_inputs(&w),
                classification(&c),
                classification_citations(&w),
                diag,
            )
        }
        Command::Opnorm(args) => {
            let w = operator(args, &mut warnings)?;
            let c = classify_with(&w, spec, &Family::default())?;
            let empirical = if c.norm_upper.is_finite() {
                let e = empirical_norm(&w, &family_for(&w), spec)?;
                diag.insert(
                    "empirical_witness".into(),
                    serde_json::to_value(e.witness).unwrap_or(Value::Null),
                );
                Some(e.value)
            } else {
                None
            };
            let sigma = if w.p().get() == 2.0 && w.q().get() == 2.0 && c.norm_upper.is_finite() {
                let m = f2_compression(&w, cfg.matrix_order)?;
                diag.insert("matrix_order".into(), json!(cfg.matrix_order));
                diag.insert("matrix_max_tail".into(), json!(m.max_tail()));
                Some(matrix_sigma_max(&m)?)
            } else {
                None
            };
            let mut cites = classification_citations(&w);
            cites.push("kernel test functions k_w have unit norm in every F^p".into());
            report(
                command,
                operator_inputs(&w),
                json!({
                    "empirical_lower": empirical.map(real),
                    "matrix_sigma": sigma.map(real),
                    "theory_lower": real(c.norm_lower),
                    "theory_upper": real(c.norm_upper),
                }),
                cites,
                diag,
            )
        }
        Command::Essnorm(args) => {
            let w = operator(args, &mut warnings)?;
            let (lo, hi) = essential_norm_bracket(&w)?;
            report(
                command,
                operator_inputs(&w),
                json!({ "ess_lower": real(lo), "ess_upper": real(hi), "compact": hi == 0.0 }),
                vec!["essential norm bracket limsup m ≤ ‖W‖_e ≤ 2(q/(p|a|²))^{1/q} limsup m (1 < p ≤ q)".into()],
                diag,
            )
        }
        Command::Diff {
            psi1,
            phi1,
            psi2,
            phi2,
            p,
            q,
        } => {
            let (p, q) = (index(*p)?, index(*q)?);
            let w1 = WeightedCompositionOperator::new(symbol(psi1, &mut warnings)?, parse_affine(phi1)?, p, q)?;
            let w2 = WeightedCompositionOperator::new(symbol(psi2, &mut warnings)?, parse_affine(phi2)?, p, q)?;
            let v = compact_difference(&w1, &w2)?;
            report(
                command,
                json!({ "first": operator_inputs(&w1), "second": operator_inputs(&w2) }),
                serde_json::to_value(&v).unwrap_or(Value::Null),
                vec!["compact difference ⟺ both compact, or φ₁ = φ₂ and m_z(ψ₁−ψ₂, φ) → 0 (p ≤ q)".into()],
                diag,
            )
        }
        Command::Component(args) => {
            let w = operator(args, &mut warnings)?;
            let id = component_id(&w)?;
            report(
                command,
                operator_inputs(&w),
                json!({
                    "kind": id.kind,
                    "leaf_key": id.leaf_key.map(|(a, b)| json!({ "a": complex(a), "b": complex(b) })),
                }),
                vec![
                    "q < p: the bounded operators form one path component".into(),
                    "p ≤ q: the compact operators form one component; each unit-modulus φ carries its own leaf".into(),
                ],
                diag,
            )
        }
        Command::Isolated { phi, p, q } => {
            let phi = parse_affine(phi)?;
            let isolated = is_isolated(&phi, index(*p)?, index(*q)?)?;
            report(
                command,
                json!({ "phi": affine(&phi), "p": p, "q": q }),
                json!({ "isolated": isolated }),
                vec!["C_φ is isolated ⟺ C_φ is non-compact ⟺ |a| = 1, b = 0 (p ≤ q)".into()],
                diag,
            )
        }
        Command::Path {
            kind,
            psi,
            phi,
            psi1,
            psi2,
            b1,
            b2,
            p,
            q,
            steps,
        } => {
            let (p, q) = (index(*p)?, index(*q)?);
            let need = |v: &Option<String>, flag: &str| {
                v.clone()
                    .ok_or_else(|| CliError::Input(format!("--kind needs --{flag}")))
            };
            let (path, inputs, cite) = match kind {
                PathKindArg::Dilate => {
                    let psi = symbol(&need(psi, "psi")?, &mut warnings)?;
                    let phi = parse_affine(&need(phi, "phi")?)?;
                    let w = WeightedCompositionOperator::new(psi, phi, p, q)?;
                    let inputs = json!({ "kind": "dilate", "operator": operator_inputs(&w) });
                    (PathKind::Dilate(w), inputs, "dilation path φ_s(z) = φ(sz)")
                }
                PathKindArg::Translate => {
                    let b1 = parse_complex(&need(b1, "b1")?)?;
                    let b2 = parse_complex(&need(b2, "b2")?)?;
                    let inputs = json!({ "kind": "translate", "b1": complex(b1), "b2": complex(b2), "p": p.get(), "q": q.get() });
                    (
                        PathKind::Translate { b1, b2, p, q },
                        inputs,
                        "translation path β_s = (1−s)b₁ + s b₂",
                    )
                }
                PathKindArg::Weight => {
                    let psi1 = symbol(&need(psi1, "psi1")?, &mut warnings)?;
                    let psi2 = symbol(&need(psi2, "psi2")?, &mut warnings)?;
                    let phi = parse_affine(&need(phi, "phi")?)?;
                    let inputs = json!({
                        "kind": "weight", "psi1": psi1.render(), "psi2": psi2.render(),
                        "phi": affine(&phi), "p": p.get(), "q": q.get(),
                    });
                    (
                        PathKind::Weight { psi1, psi2, phi, p, q },
                        inputs,
                        "weight path u_t = (1−α(t))ψ₁ + α(t)ψ₂",
                    )
                }
            };
            let settings = PathSettings {
                spec: *spec,
                matrix_order: cfg.matrix_order,
                family: Family::default(),
            };
            let points = path_profile(&path, *steps, &settings)?;
            let method = if p.get() == 2.0 && q.get() == 2.0 {
                "matrix_sigma"
            } else {
                "empirical_family"
            };
            diag.insert("distance_method".into(), json!(method));
            let rows: Vec<Value> = points
                .iter()
                .map(|pt| json!({ "t": pt.t, "distance": real(pt.distance), "bound": pt.bound.map(real) }))
                .collect();
            let mut r = report(command, inputs, json!({ "points": rows }), vec![cite.into()], diag);
            r.table = Some(Table {
                header: vec!["t", "distance"],
                rows: points.iter().map(|pt| vec![pt.t, pt.distance]).collect(),
            });
            r
        }
        Command::ProfileM { psi, phi, radii } => {
            let psi = symbol(psi, &mut warnings)?;
            let phi = parse_affine(phi)?;
            let radii = parse_radii(radii)?;
            let prof = m_profile(&psi, &phi, &radii);
            let rows: Vec<Value> = prof
                .numeric_annulus_sups
                .iter()
                .map(|&(r, s)| json!({ "radius": r, "annulus_sup": real(s) }))
                .collect();
            let mut r = report(
                command,
                json!({ "psi": psi.render(), "phi": affine(&phi), "radii": radii }),
                json!({
                    "symbolic_sup": real(prof.symbolic_sup),
                    "symbolic_limsup": real(prof.symbolic_limsup),
                    "limsup_exact_zero": prof.limsup_exact_zero,
                    "numeric_sup": real(prof.numeric_sup),
                    "regime": prof.regime,
                    "annuli": rows,
                }),
                vec!["m_z(ψ, φ) = |ψ(z)| e^{(|φ(z)|² − |z|²)/2}".into()],
                diag,
            );
            r.table = Some(Table {
                header: vec!["radius", "annulus_sup"],
                rows: prof.numeric_annulus_sups.iter().map(|&(r, s)| vec![r, s]).collect(),
            });
            r
        }
        Command::Verify { criteria } => {
            let ids: Vec<usize> = match criteria {
                None => (1..=CRITERIA.len()).collect(),
                Some(text) => text
                    .split(',')
                    .map(|s| match s.trim().parse::<usize>() {
                        Ok(n) if (1..=CRITERIA.len()).contains(&n) => Ok(n),
                        _ => Err(CliError::Input(format!("no criterion {s:?}"))),
                    })
                    .collect::<Result<_, _>>()?,
            };
            let vcfg = VerifyConfig {
                spec: *spec,
                matrix_order: cfg.matrix_order,
                grid_radius: cfg.grid_radius,
            };
            let outcomes: Vec<_> = ids.iter().map(|&id| run_criterion(id, cfg.seed, &vcfg)).collect();
            let passed = outcomes.iter().filter(|o| o.passed).count();
            let suite = SuiteReport {
                seed: cfg.seed,
                passed,
                failed: outcomes.len() - passed,
                criteria: outcomes,
            };
            let r = report(
                command,
                json!({ "seed": cfg.seed, "criteria": ids }),
                serde_json::to_value(&suite).unwrap_or(Value::Null),
                vec!["property and oracle suite".into()],
                diag,
            );
            if suite.failed > 0 {
                return Err(CliError::Failed(Box::new(r)));
            }
            r
        }
    };
    if let Value::Object(d) = &mut out.diagnostics {
        d.insert("warnings".into(), json!(warnings));
    }
    Ok(out)
}

/// Renders a report in the requested format.
pub fn render(report: &Report, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(report).unwrap_or_default();
            s.push('\n');
            s
        }
        OutputFormat::Csv => match &report.table {
            Some(t) => {
                let mut s = t.header.join(",");
                s.push('\n');
                for row in &t.rows {
                    let cells: Vec<String> = row.iter().map(|x| csv_number(*x)).collect();
                    s.push_str(&cells.join(","));
                    s.push('\n');
                }
                s
            }
            None => String::new(),
        },
        OutputFormat::Text => {
            let mut s = format!("{}\n", report.command);
            flatten(&mut s, "", &report.results);
            for c in &report.citations {
                let _ = writeln!(s, "cites: {c}");
            }
            s
        }
    }
}

fn csv_number(x: f64) -> String {
    if x.is_finite() {
        format!("{x}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn flatten(out: &mut String, prefix: &str, v: &Value) {
    match v {
        Value::Object(m) if !(m.contains_key("infinite") && m.len() == 2) => {
            for (k, x) in m {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(out, &key, x);
            }
        }
        Value::Object(m) => {
            let _ = writeln!(out, "{prefix}: {}", m["value"].as_str().unwrap_or("?"));
        }
        Value::Array(a) if a.iter().any(|x| x.is_object() || x.is_array()) => {
            for (i, x) in a.iter().enumerate() {
                flatten(out, &format!("{prefix}[{i}]"), x);
            }
        }
        _ => {
            let _ = writeln!(out, "{prefix}: {v}");
        }
    }
}

/// Caps rayon's pool at `FOCKLAB_THREADS` when set.
pub fn configure_threads() -> Result<(), CliError> {
    match std::env::var("FOCKLAB_THREADS") {
        Ok(v) => {
            let n: usize = v
                .trim()
                .parse()
                .ok()
                .filter(|&n| n > 0)
                .ok_or_else(|| CliError::Input(format!("FOCKLAB_THREADS must be a positive integer, got {v:?}")))?;
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| CliError::Input(e.to_string()))
        }
        Err(_) => Ok(()),
    }
}
