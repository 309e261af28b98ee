//! The `steiner` command line.
//!
//! Every payload echoes the configuration that produced it: JSON output is
//! `{"config": ..., "result": ...}`, CSV output starts with a
//! `# config: {...}` line. Exit codes: 0 success, 2 invalid input,
//! 3 numerical non-convergence.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};
use steiner_core::evalzero::{
    box_zeros, bridge_closed_form, build_function, convergence_exponent, eval_box_product, eval_series,
    find_zeros_with, spiral_closed_form, RootOptions,
};
use steiner_core::gaussmc::{McConfig, McEstimate};
use steiner_core::growth::{analyze, AnalysisOptions, Window, DEFAULT_GC_THRESHOLD, DEFAULT_GV_MARGIN};
use steiner_core::special::kappa;
use steiner_core::volseq::{
    box_volume_sequence, bridge_volume_sequence, log_mk_sequence, spiral_volume_sequence, BoxSpec, JCut, SideRule,
    VolumeSequence,
};
use steiner_core::Complex64;
use thiserror::Error;

use crate::io;
use crate::parallel;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] steiner_core::Error),
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid CSV: {0}")]
    Csv(#[from] csv::Error),
    /// Non-convergence with a partial result still worth emitting.
    #[error("{message}")]
    Partial { message: String, output: Box<Output> },
}

impl CliError {
    pub fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_numerical() => 3,
            CliError::Partial { .. } => 3,
            _ => 2,
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "steiner",
    version,
    about = "Intrinsic volumes, growth of the Steiner entire function, zeros and Gaussian Monte Carlo checks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Intrinsic volumes V_0..V_kmax with m_k (CSV by default).
    Volumes(VolumesArgs),
    /// Order, type, m_k decay, oscillation bounds and GC classification.
    Analyze(AnalyzeArgs),
    /// Evaluate the Steiner function at points, cross-checked against a second method.
    Eval(EvalArgs),
    /// Zeros of a truncation.
    Zeros(ZerosArgs),
    /// Monte Carlo checks on finite boxes.
    #[command(subcommand)]
    Mc(McCommand),
    /// The power-law box analysed with the Gao-Vitale verdict up front.
    Counterexample(CounterexampleArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Spiral,
    Bridge,
    Box,
    User,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RuleName {
    #[value(name = "power_law")]
    PowerLaw,
    #[value(name = "exponential")]
    Exponential,
    #[value(name = "log_squared")]
    LogSquared,
}

impl RuleName {
    fn as_str(self) -> &'static str {
        match self {
            RuleName::PowerLaw => "power_law",
            RuleName::Exponential => "exponential",
            RuleName::LogSquared => "log_squared",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone)]
pub struct FamilyArgs {
    #[arg(long, value_enum)]
    pub family: Family,
    /// Comma-separated side lengths of a finite box.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub sides: Option<Vec<f64>>,
    /// Side rule of an infinite box.
    #[arg(long, value_enum)]
    pub rule: Option<RuleName>,
    /// Rule parameter: alpha for power_law, c for exponential.
    #[arg(long, allow_hyphen_values = true)]
    pub param: Option<f64>,
    /// Head length of a rule box: an integer or "auto".
    #[arg(long)]
    pub j_cut: Option<String>,
    /// Sequence file (user family) or box spec JSON (box family).
    #[arg(long)]
    pub file: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write the payload here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VolumesArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long)]
    pub kmax: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long)]
    pub kmax: Option<usize>,
    /// Fit window "lo,hi".
    #[arg(long)]
    pub window: Option<String>,
    /// Gaussian-continuity threshold on m_kmax.
    #[arg(long, default_value_t = DEFAULT_GC_THRESHOLD)]
    pub threshold: f64,
    /// Order to plug into the type formula.
    #[arg(long)]
    pub type_rho: Option<f64>,
    /// Index at which the type formula is evaluated.
    #[arg(long)]
    pub type_n: Option<usize>,
    /// Window "lo,hi" of the Gao-Vitale test.
    #[arg(long)]
    pub gv_window: Option<String>,
    #[arg(long, default_value_t = DEFAULT_GV_MARGIN)]
    pub gv_margin: f64,
    /// Emit the per-k table (k, m_k, ln k, ln m_k, naive rho) instead of the summary.
    #[arg(long)]
    pub series: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long)]
    pub degree: Option<usize>,
    /// Evaluation point such as 0.5, -1+2i or 3i. Repeatable.
    #[arg(long = "z", allow_hyphen_values = true)]
    pub z: Vec<String>,
    /// Grid "re0,re1,im0,im1,nre,nim".
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct ZerosArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long)]
    pub degree: Option<usize>,
    /// For boxes, read the zeros -1/l_j off the sides instead of root finding.
    #[arg(long)]
    pub exact: bool,
    /// Window "lo,hi" (1-based zero indices) for the convergence exponent.
    #[arg(long)]
    pub window: Option<String>,
    #[arg(long, default_value_t = 500)]
    pub max_iter: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Subcommand, Debug)]
pub enum McCommand {
    /// Volume of the lambda-tube around a box by hit-or-miss.
    Tube(McArgs),
    /// Wills functional by importance sampling.
    Wills(McArgs),
    /// f_K(lambda) from the Gaussian exponential-supremum formula.
    Tsirelson(McArgs),
}

#[derive(Args, Debug)]
pub struct McArgs {
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    pub sides: Vec<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<f64>,
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    /// Proposal standard deviation for wills.
    #[arg(long)]
    pub proposal_scale: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct CounterexampleArgs {
    /// Power-law exponent alpha.
    #[arg(long, default_value_t = 1.25)]
    pub param: f64,
    #[arg(long, default_value_t = 2000)]
    pub kmax: usize,
    #[arg(long)]
    pub gv_window: Option<String>,
    #[arg(long, default_value_t = DEFAULT_GV_MARGIN)]
    pub gv_margin: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// A finished payload.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub payload: String,
    pub path: Option<PathBuf>,
}

enum Resolved {
    Spiral,
    Bridge,
    Box(BoxSpec),
    User(VolumeSequence, PathBuf),
}

impl Resolved {
    fn config(&self) -> Value {
        match self {
            Resolved::Spiral => json!({"name": "spiral"}),
            Resolved::Bridge => json!({"name": "bridge"}),
            Resolved::Box(spec) => json!({"name": "box", "spec": io::box_spec_json(spec)}),
            Resolved::User(_, p) => json!({"name": "user", "file": p.display().to_string()}),
        }
    }

    /// `k_max` when none is given.
    fn natural_kmax(&self, fallback: usize) -> usize {
        match self {
            Resolved::Box(BoxSpec::Explicit(s)) => s.len(),
            Resolved::User(v, _) => v.k_max(),
            _ => fallback,
        }
    }

    fn sequence(&self, k_max: usize) -> Result<VolumeSequence, CliError> {
        Ok(match self {
            Resolved::Spiral => spiral_volume_sequence(k_max),
            Resolved::Bridge => bridge_volume_sequence(k_max),
            Resolved::Box(spec) => box_volume_sequence(spec, k_max)?,
            Resolved::User(v, _) => {
                if k_max > v.k_max() {
                    return Err(CliError::input(format!(
                        "k_max {k_max} exceeds the {} terms in the file",
                        v.k_max()
                    )));
                }
                v.truncated(k_max)
            }
        })
    }
}

fn resolve(a: &FamilyArgs) -> Result<Resolved, CliError> {
    match a.family {
        Family::Spiral => Ok(Resolved::Spiral),
        Family::Bridge => Ok(Resolved::Bridge),
        Family::User => {
            let path = a
                .file
                .clone()
                .ok_or_else(|| CliError::input("--family user needs --file"))?;
            Ok(Resolved::User(io::read_sequence(&path)?, path))
        }
        Family::Box => {
            if let Some(path) = &a.file {
                let text =
                    std::fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
                return Ok(Resolved::Box(io::box_spec_from_json(&serde_json::from_str(&text)?)?));
            }
            match (&a.sides, a.rule) {
                (Some(s), None) => Ok(Resolved::Box(BoxSpec::explicit(s.clone())?)),
                (None, Some(r)) => {
                    let j_cut =
                        match a.j_cut.as_deref() {
                            None | Some("auto") => JCut::Auto,
                            Some(s) => JCut::Fixed(s.parse().map_err(|_| {
                                CliError::input(format!("--j-cut must be an integer or auto, got {s:?}"))
                            })?),
                        };
                    let rule = io::parse_rule(r.as_str(), a.param)?;
                    Ok(Resolved::Box(BoxSpec::rule(rule, j_cut)?))
                }
                (Some(_), Some(_)) => Err(CliError::input("give either --sides or --rule, not both")),
                (None, None) => Err(CliError::input("--family box needs --sides, --rule or --file")),
            }
        }
    }
}

fn parse_window(s: &str) -> Result<Window, CliError> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let bad = || CliError::input(format!("window must be \"lo,hi\", got {s:?}"));
    if parts.len() != 2 {
        return Err(bad());
    }
    let lo = parts[0].parse().map_err(|_| bad())?;
    let hi = parts[1].parse().map_err(|_| bad())?;
    Ok(Window::new(lo, hi))
}

/// Parses `a`, `bi`, `a+bi`, `a-bi` (also with `j`).
pub fn parse_complex(s: &str) -> Result<Complex64, CliError> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || CliError::input(format!("cannot parse complex number {s:?}"));
    if t.is_empty() {
        return Err(bad());
    }
    let Some(body) = t.strip_suffix('i').or_else(|| t.strip_suffix('j')) else {
        return Ok(Complex64::new(t.parse().map_err(|_| bad())?, 0.0));
    };
    // split at the last sign that is not part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let imag = |x: &str| -> Result<f64, CliError> {
        match x {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => x.parse().map_err(|_| bad()),
        }
    };
    match split {
        Some(i) => Ok(Complex64::new(body[..i].parse().map_err(|_| bad())?, imag(&body[i..])?)),
        None => Ok(Complex64::new(0.0, imag(body)?)),
    }
}

fn parse_grid(s: &str) -> Result<Vec<Complex64>, CliError> {
    let p: Vec<&str> = s.split(',').map(str::trim).collect();
    let bad = || CliError::input(format!("grid must be \"re0,re1,im0,im1,nre,nim\", got {s:?}"));
    if p.len() != 6 {
        return Err(bad());
    }
    let f = |i: usize| p[i].parse::<f64>().map_err(|_| bad());
    let n = |i: usize| {
        p[i].parse::<usize>()
            .map_err(|_| bad())
            .and_then(|n| if n == 0 { Err(bad()) } else { Ok(n) })
    };
    let (r0, r1, i0, i1, nr, ni) = (f(0)?, f(1)?, f(2)?, f(3)?, n(4)?, n(5)?);
    let step = |a: f64, b: f64, n: usize, k: usize| {
        if n == 1 {
            a
        } else {
            a + (b - a) * k as f64 / (n - 1) as f64
        }
    };
    let mut pts = Vec::with_capacity(nr * ni);
    for j in 0..ni {
        for k in 0..nr {
            pts.push(Complex64::new(step(r0, r1, nr, k), step(i0, i1, ni, j)));
        }
    }
    Ok(pts)
}

struct Emitter {
    config: Map<String, Value>,
    format: Format,
    out: Option<PathBuf>,
}

impl Emitter {
    fn new(command: &str, output: &OutputArgs, default: Format) -> Self {
        let format = output.format.unwrap_or(default);
        let mut config = Map::new();
        config.insert("command".into(), json!(command));
        Emitter {
            config,
            format,
            out: output.out.clone(),
        }
    }

    fn set(&mut self, key: &str, v: Value) {
        self.config.insert(key.into(), v);
    }

    fn config_value(&self) -> Value {
        let mut c = self.config.clone();
        c.insert(
            "format".into(),
            json!(match self.format {
                Format::Json => "json",
                Format::Csv => "csv",
            }),
        );
        if let Some(p) = &self.out {
            c.insert("out".into(), json!(p.display().to_string()));
        }
        Value::Object(c)
    }

    fn json(&self, result: Value) -> Result<Output, CliError> {
        let mut s = serde_json::to_string_pretty(&json!({"config": self.config_value(), "result": result}))?;
        s.push('\n');
        Ok(Output {
            payload: s,
            path: self.out.clone(),
        })
    }

    fn csv(&self, body: String) -> Result<Output, CliError> {
        Ok(Output {
            payload: format!("# config: {}\n{body}", serde_json::to_string(&self.config_value())?),
            path: self.out.clone(),
        })
    }

    fn emit(
        &self,
        result: Value,
        csv_body: impl FnOnce(&Value) -> Result<String, CliError>,
    ) -> Result<Output, CliError> {
        match self.format {
            Format::Json => self.json(result),
            Format::Csv => {
                let body = csv_body(&result)?;
                self.csv(body)
            }
        }
    }
}

pub fn run(cli: &Cli) -> Result<Output, CliError> {
    match &cli.command {
        Command::Volumes(a) => cmd_volumes(a),
        Command::Analyze(a) => cmd_analyze(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Zeros(a) => cmd_zeros(a),
        Command::Mc(m) => cmd_mc(m),
        Command::Counterexample(a) => cmd_counterexample(a),
    }
}

fn cmd_volumes(a: &VolumesArgs) -> Result<Output, CliError> {
    let fam = resolve(&a.family)?;
    let k_max = a.kmax.unwrap_or_else(|| fam.natural_kmax(100));
    let v = fam.sequence(k_max)?;
    let mut em = Emitter::new("volumes", &a.output, Format::Csv);
    em.set("family", fam.config());
    em.set("k_max", json!(k_max));
    match em.format {
        Format::Json => em.json(io::sequence_json(&v)),
        Format::Csv => em.csv(io::sequence_csv(&v)?),
    }
}

fn analysis_options(
    window: Option<&str>,
    threshold: f64,
    type_rho: Option<f64>,
    type_n: Option<usize>,
    gv_window: Option<&str>,
    gv_margin: f64,
) -> Result<AnalysisOptions, CliError> {
    Ok(AnalysisOptions {
        window: window.map(parse_window).transpose()?,
        gc_threshold: threshold,
        type_rho,
        type_n_eval: type_n,
        gao_vitale_window: gv_window.map(parse_window).transpose()?,
        gao_vitale_margin: gv_margin,
    })
}

fn cmd_analyze(a: &AnalyzeArgs) -> Result<Output, CliError> {
    let fam = resolve(&a.family)?;
    let k_max = a.kmax.unwrap_or_else(|| fam.natural_kmax(2000));
    let v = fam.sequence(k_max)?;
    let opts = analysis_options(
        a.window.as_deref(),
        a.threshold,
        a.type_rho,
        a.type_n,
        a.gv_window.as_deref(),
        a.gv_margin,
    )?;
    let report = analyze(&v, &opts)?;
    for d in &report.diagnostics {
        log::warn!("{d}");
    }
    let mut em = Emitter::new("analyze", &a.output, Format::Json);
    em.set("family", fam.config());
    em.set("k_max", json!(k_max));
    em.set("window", json!(a.window));
    em.set("threshold", io::num(a.threshold));
    em.set("type_rho", json!(a.type_rho));
    em.set("type_n", json!(a.type_n));
    em.set("gv_window", json!(a.gv_window));
    em.set("gv_margin", io::num(a.gv_margin));
    if a.series {
        em.set("series", json!(true));
        return match em.format {
            Format::Json => em.json(io::growth_series_json(&v)?),
            Format::Csv => em.csv(io::growth_series_csv(&v)?),
        };
    }
    em.emit(io::growth_report_json(&report), io::object_csv)
}

fn cmd_eval(a: &EvalArgs) -> Result<Output, CliError> {
    let fam = resolve(&a.family)?;
    let degree = a.degree.unwrap_or_else(|| fam.natural_kmax(300));
    let v = fam.sequence(degree)?;
    let f = build_function(&v, degree)?;
    let mut points: Vec<Complex64> = a.z.iter().map(|s| parse_complex(s)).collect::<Result<_, _>>()?;
    if let Some(g) = &a.grid {
        points.extend(parse_grid(g)?);
    }
    if points.is_empty() {
        return Err(CliError::input("give at least one --z or a --grid"));
    }
    let mut rows = Vec::with_capacity(points.len());
    let mut max_delta: Option<f64> = None;
    let mut csv_body = String::new();
    io::push_csv_line(
        &mut csv_body,
        &["re_z", "im_z", "re_f", "im_f", "tail_bound", "check_rel_delta"].map(String::from),
    )?;
    for z in points {
        let s = eval_series(&f, z);
        if s.degree_too_low {
            log::warn!(
                "degree {} too low at z = {z}: tail bound {:e}",
                f.degree(),
                s.tail_bound
            );
        }
        let check = match &fam {
            Resolved::Spiral => Some(("closed_form", spiral_closed_form(z)?)),
            Resolved::Bridge => Some(("closed_form", bridge_closed_form(z)?)),
            Resolved::Box(spec) => Some(("product", eval_box_product(spec, z)?.value)),
            Resolved::User(..) => None,
        };
        let delta = check.map(|(_, c)| (s.value - c).norm() / c.norm());
        if let Some(d) = delta {
            max_delta = Some(max_delta.map_or(d, |m: f64| m.max(d)));
        }
        let bound = (f.v1() * z.norm()).exp();
        io::push_csv_line(
            &mut csv_body,
            &[
                io::cell(z.re),
                io::cell(z.im),
                io::cell(s.value.re),
                io::cell(s.value.im),
                io::cell(s.tail_bound),
                delta.map_or(String::new(), io::cell),
            ],
        )?;
        rows.push(json!({
            "z": io::complex(z),
            "value": io::complex(s.value),
            "tail_bound": io::num(s.tail_bound),
            "degree_too_low": s.degree_too_low,
            "entire_bound": io::num(bound),
            "within_entire_bound": s.value.norm() <= bound * (1.0 + 1e-9),
            "check": check.map_or(Value::Null, |(m, c)| json!({
                "method": m,
                "value": io::complex(c),
                "rel_delta": io::num(delta.unwrap_or(f64::NAN)),
            })),
        }));
    }
    let mut em = Emitter::new("eval", &a.output, Format::Json);
    em.set("family", fam.config());
    em.set("degree", json!(degree));
    em.set("z", json!(a.z));
    em.set("grid", json!(a.grid));
    let result = json!({
        "degree": f.degree(),
        "scale_radius": io::num(f.scale_radius()),
        "v1": io::num(f.v1()),
        "max_check_rel_delta": max_delta.map_or(Value::Null, io::num),
        "points": rows,
    });
    em.emit(result, |_| Ok(csv_body))
}

fn cmd_zeros(a: &ZerosArgs) -> Result<Output, CliError> {
    let fam = resolve(&a.family)?;
    let degree = a.degree.unwrap_or_else(|| fam.natural_kmax(60));
    let mut em = Emitter::new("zeros", &a.output, Format::Json);
    em.set("family", fam.config());
    em.set("degree", json!(degree));
    em.set("exact", json!(a.exact));
    em.set("window", json!(a.window));
    em.set("max_iter", json!(a.max_iter));

    let (zs, converged, iterations, method, scale) = match (&fam, a.exact) {
        (Resolved::Box(spec), true) => (box_zeros(spec, degree), true, 0, "sides", Value::Null),
        (_, true) => return Err(CliError::input("--exact applies to boxes only")),
        _ => {
            let v = fam.sequence(degree)?;
            let f = build_function(&v, degree)?;
            let opts = RootOptions {
                max_iterations: a.max_iter,
                ..RootOptions::default()
            };
            let s = find_zeros_with(&f, &opts)?;
            (s.zeros, s.converged, s.iterations, "aberth", io::num(f.scale_radius()))
        }
    };
    let artifacts = zs.artifact.iter().filter(|x| **x).count();
    if artifacts > 0 {
        log::warn!(
            "{artifacts} zeros lie beyond the reliable radius {:.4} and are truncation artifacts",
            zs.reliable_radius
        );
    }
    let window = a.window.as_deref().map(parse_window).transpose()?;
    let exponent = if zs.len() >= steiner_core::evalzero::MIN_ZEROS {
        match convergence_exponent(&zs, window) {
            Ok(e) => {
                if e.ill_conditioned {
                    log::warn!("zero moduli are all near 1 in the window; the exponent is ill-conditioned");
                }
                io::exponent_json(&e)
            }
            Err(e) => {
                log::warn!("convergence exponent: {e}");
                Value::Null
            }
        }
    } else {
        Value::Null
    };
    let result = json!({
        "method": method,
        "degree": zs.len(),
        "converged": converged,
        "iterations": iterations,
        "scale_radius": scale,
        "reliable_radius": io::num(zs.reliable_radius),
        "convergence_exponent": exponent,
        "zeros": io::zero_set_json(&zs),
    });
    let out = em.emit(result, |_| io::zero_set_csv(&zs))?;
    if !converged {
        return Err(CliError::Partial {
            message: format!("root iteration did not converge after {iterations} iterations; partial zeros written"),
            output: Box::new(out),
        });
    }
    Ok(out)
}

/// `e_k` of the sides by direct expansion (sides may be zero here).
fn elementary(sides: &[f64]) -> Vec<f64> {
    let mut e = vec![0.0; sides.len() + 1];
    e[0] = 1.0;
    for (i, &l) in sides.iter().enumerate() {
        for k in (1..=i + 1).rev() {
            e[k] += l * e[k - 1];
        }
    }
    e
}

fn cmd_mc(m: &McCommand) -> Result<Output, CliError> {
    let (name, a) = match m {
        McCommand::Tube(a) => ("tube", a),
        McCommand::Wills(a) => ("wills", a),
        McCommand::Tsirelson(a) => ("tsirelson", a),
    };
    let cfg = McConfig::new(a.samples, a.seed).with_workers(a.workers);
    let lambda = || {
        a.lambda
            .ok_or_else(|| CliError::input(format!("mc {name} needs --lambda")))
    };
    let (est, exact): (McEstimate, f64) = match m {
        McCommand::Tube(_) => {
            let lam = lambda()?;
            let e = elementary(&a.sides);
            let d = a.sides.len();
            let exact = (0..=d).map(|k| kappa(d - k) * e[k] * lam.powi((d - k) as i32)).sum();
            (parallel::tube_volume_mc(&a.sides, lam, &cfg)?, exact)
        }
        McCommand::Wills(_) => (
            parallel::wills_mc(&a.sides, a.proposal_scale, &cfg)?,
            a.sides.iter().map(|l| 1.0 + l).product(),
        ),
        McCommand::Tsirelson(_) => {
            let lam = lambda()?;
            (
                parallel::tsirelson_mc(&a.sides, lam, &cfg)?,
                a.sides.iter().map(|l| 1.0 + l * lam).product(),
            )
        }
    };
    for w in &est.warnings {
        log::warn!("{w}");
    }
    let mut em = Emitter::new(&format!("mc {name}"), &a.output, Format::Json);
    em.set("sides", json!(a.sides));
    em.set("lambda", json!(a.lambda));
    em.set("samples", json!(a.samples));
    em.set("seed", json!(a.seed));
    em.set("workers", json!(a.workers));
    em.set("proposal_scale", json!(a.proposal_scale));
    let mut result = io::mc_json(&est);
    if let Value::Object(map) = &mut result {
        map.insert("exact".into(), io::num(exact));
        map.insert("z_score".into(), io::num(est.z_score(exact)));
    }
    em.emit(result, io::object_csv)
}

fn cmd_counterexample(a: &CounterexampleArgs) -> Result<Output, CliError> {
    let spec = BoxSpec::rule(SideRule::PowerLaw { alpha: a.param }, JCut::Auto)?;
    let v = box_volume_sequence(&spec, a.kmax)?;
    let opts = analysis_options(
        None,
        DEFAULT_GC_THRESHOLD,
        None,
        None,
        a.gv_window.as_deref(),
        a.gv_margin,
    )?;
    let report = analyze(&v, &opts)?;
    for d in &report.diagnostics {
        log::warn!("{d}");
    }
    let lm = log_mk_sequence(&v)?;
    let lo = 500.min(lm.len().saturating_sub(2));
    let increasing = (lo..lm.len().saturating_sub(1))
        .all(|k| lm[k + 1] + 0.5 * ((k + 1) as f64).ln() > lm[k] + 0.5 * (k as f64).ln());
    let mut em = Emitter::new("counterexample", &a.output, Format::Json);
    em.set("family", json!({"name": "box", "spec": io::box_spec_json(&spec)}));
    em.set("k_max", json!(a.kmax));
    em.set("gv_window", json!(a.gv_window));
    em.set("gv_margin", io::num(a.gv_margin));
    let mut summary = String::new();
    if let Some(g) = &report.gao_vitale {
        let _ = write!(
            summary,
            "m_k ~ k^{:.4}: decays slower than k^(-1/2) is {}",
            g.exponent,
            if g.verdict == steiner_core::growth::GaoVitaleVerdict::Violated {
                "shown"
            } else {
                "not shown"
            }
        );
    }
    let result = json!({
        "gao_vitale": report.gao_vitale.as_ref().map_or(Value::Null, io::gao_vitale_json),
        "summary": summary,
        "mk_decay_exponent_hat": report.mk_decay_exponent_hat.map_or(Value::Null, io::num),
        "mk_sqrt_k_increasing": {"window": [lo, lm.len().saturating_sub(1)], "holds": increasing},
        "rho_hat": report.rho_hat.map_or(Value::Null, io::num),
        "classification": report.classification.as_str(),
        "report": io::growth_report_json(&report),
    });
    em.emit(result, io::object_csv)
}
