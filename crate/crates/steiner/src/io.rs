//! JSON and CSV interchange.
//!
//! Non-finite numbers are written as the strings `"inf"`, `"-inf"` and
//! `"nan"`, so a log-volume of a vanishing term survives a round trip.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde_json::{json, Map, Value};
use steiner_core::evalzero::{ConvergenceExponent, ZeroSet};
use steiner_core::gaussmc::McEstimate;
use steiner_core::growth::{GaoVitaleReport, GaoVitaleVerdict, GrowthReport, Window};
use steiner_core::volseq::{
    log_mk_sequence, user_volume_sequence, BoxSpec, JCut, SideRule, Source, TailError, TailTreatment, VolumeSequence,
};
use steiner_core::Complex64;

use crate::cli::CliError;

pub fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x.is_nan() {
        json!("nan")
    } else if x > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

fn opt_num(x: Option<f64>) -> Value {
    x.map_or(Value::Null, num)
}

pub fn parse_num(v: &Value) -> Result<f64, CliError> {
    match v {
        Value::Number(n) => n.as_f64().ok_or_else(|| CliError::input(format!("bad number {n}"))),
        Value::String(s) => match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "+inf" | "infinity" => Ok(f64::INFINITY),
            "-inf" | "-infinity" => Ok(f64::NEG_INFINITY),
            "nan" => Ok(f64::NAN),
            other => other.parse().map_err(|_| CliError::input(format!("bad number {s:?}"))),
        },
        other => Err(CliError::input(format!("expected a number, got {other}"))),
    }
}

/// CSV cell for a float; shortest round-trip representation.
pub fn cell(x: f64) -> String {
    if x.is_finite() {
        format!("{x:?}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

pub fn complex(z: Complex64) -> Value {
    json!({"re": num(z.re), "im": num(z.im)})
}

fn window(w: Option<Window>) -> Value {
    w.map_or(Value::Null, |w| json!([w.lo, w.hi]))
}

fn tail_treatment(t: TailTreatment) -> &'static str {
    match t {
        TailTreatment::Exact => "exact",
        TailTreatment::Folded => "folded",
        TailTreatment::Truncated => "truncated",
        TailTreatment::Unspecified => "unspecified",
    }
}

pub fn tail_error(t: &TailError) -> Value {
    json!({
        "treatment": tail_treatment(t.treatment),
        "head_len": t.head_len,
        "omitted_sum": num(t.omitted_sum),
        "relative_bound": num(t.relative_bound),
    })
}

fn tail_summary(t: &TailError) -> String {
    let kind = tail_treatment(t.treatment);
    if t.omitted_sum == 0.0 && t.relative_bound == 0.0 {
        kind.to_string()
    } else {
        format!(
            "{kind}: head {} sides, omitted sum {:e}, relative bound {:e}",
            t.head_len, t.omitted_sum, t.relative_bound
        )
    }
}

/// `{source, k_max, logV, tail_error}` plus `dimension`, `tail` details, `values` and `m`.
pub fn sequence_json(v: &VolumeSequence) -> Value {
    let m = log_mk_sequence(v).ok();
    json!({
        "source": v.source().as_str(),
        "k_max": v.k_max(),
        "dimension": v.dimension(),
        "tail_error": tail_summary(v.tail()),
        "tail": tail_error(v.tail()),
        "logV": v.log_v().iter().map(|x| num(*x)).collect::<Vec<_>>(),
        "values": v.values().into_iter().map(num).collect::<Vec<_>>(),
        "m": m.map(|m| m.into_iter().map(|l| num(l.exp())).collect::<Vec<_>>()),
    })
}

/// Rows `k, V_k, logV_k, m_k` (`m_k` empty at `k_max`).
pub fn sequence_csv(v: &VolumeSequence) -> Result<String, CliError> {
    let lm = log_mk_sequence(v)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["k", "V_k", "logV_k", "m_k"])?;
    for (k, l) in v.log_v().iter().enumerate() {
        let m = lm.get(k).map_or(String::new(), |x| cell(x.exp()));
        w.write_record([k.to_string(), cell(l.exp()), cell(*l), m])?;
    }
    finish_csv(w)
}

pub(crate) fn finish_csv(w: csv::Writer<Vec<u8>>) -> Result<String, CliError> {
    let bytes = w.into_inner().map_err(|e| CliError::input(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::input(e.to_string()))
}

/// Reads a user sequence from JSON (`{"values": [...]}` or `{"logV": [...]}`, optionally wrapped in a `result` object)
/// or CSV (a `logV_k` or `V_k` column).
pub fn read_sequence(path: &Path) -> Result<VolumeSequence, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    let is_csv = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    if is_csv {
        sequence_from_csv(&text)
    } else {
        let v: Value = serde_json::from_str(&text)?;
        sequence_from_json(&v)
    }
}

pub fn sequence_from_json(v: &Value) -> Result<VolumeSequence, CliError> {
    // accept the full `volumes` output as well
    let v = match v.get("result") {
        Some(r) if r.is_object() => r,
        _ => v,
    };
    let arr = |key: &str| -> Result<Option<Vec<f64>>, CliError> {
        match v.get(key) {
            None => Ok(None),
            Some(Value::Array(a)) => a.iter().map(parse_num).collect::<Result<_, _>>().map(Some),
            Some(_) => Err(CliError::input(format!("\"{key}\" must be an array"))),
        }
    };
    if let Some(lv) = arr("logV")?.or(arr("log_v")?) {
        Ok(VolumeSequence::from_log_values(
            Source::User,
            lv,
            TailError::unspecified(),
            None,
        )?)
    } else if let Some(vals) = arr("values")? {
        Ok(user_volume_sequence(&vals)?)
    } else {
        Err(CliError::input("sequence file needs a \"values\" or \"logV\" array"))
    }
}

pub fn sequence_from_csv(text: &str) -> Result<VolumeSequence, CliError> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let headers = r.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h.trim() == name);
    let (idx, logs) = match (col("logV_k"), col("V_k")) {
        (Some(i), _) => (i, true),
        (None, Some(i)) => (i, false),
        _ => return Err(CliError::input("CSV needs a logV_k or V_k column")),
    };
    let mut xs = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let s = rec.get(idx).unwrap_or("").trim();
        xs.push(parse_num(&Value::String(s.to_string()))?);
    }
    if logs {
        Ok(VolumeSequence::from_log_values(
            Source::User,
            xs,
            TailError::unspecified(),
            None,
        )?)
    } else {
        Ok(user_volume_sequence(&xs)?)
    }
}

pub fn box_spec_json(spec: &BoxSpec) -> Value {
    match spec {
        BoxSpec::Explicit(s) => json!({"sides": s}),
        BoxSpec::Rule { rule, j_cut } => json!({
            "rule": rule.name(),
            "param": rule.param(),
            "j_cut": match j_cut {
                JCut::Auto => json!("auto"),
                JCut::Fixed(j) => json!(j),
            },
        }),
    }
}

pub fn parse_rule(name: &str, param: Option<f64>) -> Result<SideRule, CliError> {
    let need = |what: &str| param.ok_or_else(|| CliError::input(format!("rule {name} needs --param ({what})")));
    match name {
        "power_law" => Ok(SideRule::PowerLaw { alpha: need("alpha")? }),
        "exponential" => Ok(SideRule::Exponential { rate: need("c")? }),
        "log_squared" => Ok(SideRule::LogSquared),
        other => Err(CliError::input(format!("unknown side rule {other:?}"))),
    }
}

pub fn parse_j_cut(v: Option<&Value>) -> Result<JCut, CliError> {
    match v {
        None | Some(Value::Null) => Ok(JCut::Auto),
        Some(Value::String(s)) if s == "auto" => Ok(JCut::Auto),
        Some(Value::Number(n)) => n
            .as_u64()
            .map(|j| JCut::Fixed(j as usize))
            .ok_or_else(|| CliError::input(format!("j_cut must be a positive integer, got {n}"))),
        Some(other) => Err(CliError::input(format!(
            "j_cut must be an integer or \"auto\", got {other}"
        ))),
    }
}

/// `{"sides": [...]}` or `{"rule", "param", "j_cut"}`.
pub fn box_spec_from_json(v: &Value) -> Result<BoxSpec, CliError> {
    if let Some(s) = v.get("sides") {
        let sides = s
            .as_array()
            .ok_or_else(|| CliError::input("\"sides\" must be an array"))?
            .iter()
            .map(parse_num)
            .collect::<Result<Vec<_>, _>>()?;
        return Ok(BoxSpec::explicit(sides)?);
    }
    let name = v
        .get("rule")
        .and_then(Value::as_str)
        .ok_or_else(|| CliError::input("box spec needs \"sides\" or \"rule\""))?;
    let param = v.get("param").filter(|p| !p.is_null()).map(parse_num).transpose()?;
    Ok(BoxSpec::rule(parse_rule(name, param)?, parse_j_cut(v.get("j_cut"))?)?)
}

fn verdict(v: GaoVitaleVerdict) -> &'static str {
    match v {
        GaoVitaleVerdict::Consistent => "consistent",
        GaoVitaleVerdict::Violated => "violated",
    }
}

pub fn gao_vitale_json(g: &GaoVitaleReport) -> Value {
    json!({
        "verdict": verdict(g.verdict),
        "exponent": num(g.exponent),
        "margin": num(g.margin),
        "increasing_tail": g.increasing_tail,
        "drop_factor": num(g.drop_factor),
        "window": window(Some(g.window)),
    })
}

pub fn growth_report_json(r: &GrowthReport) -> Value {
    json!({
        "k_max": r.k_max,
        "window": window(r.window),
        "rho_hat": opt_num(r.rho_hat),
        "rho_raw": opt_num(r.rho_raw),
        "rho_stderr": opt_num(r.rho_stderr),
        "rho_naive": opt_num(r.rho_naive),
        "rho_from_mk": opt_num(r.rho_from_mk),
        "residual": opt_num(r.residual),
        "terminating": r.terminating,
        "sigma_hat": opt_num(r.sigma_hat),
        "sigma_rho": opt_num(r.sigma_rho),
        "mk_decay_exponent_hat": opt_num(r.mk_decay_exponent_hat),
        "mk_decay_slope": opt_num(r.mk_decay_slope),
        "osc_lower": num(r.osc_lower),
        "osc_upper": num(r.osc_upper),
        "osc_trailing_drop": opt_num(r.osc_trailing_drop),
        "mk_non_increasing": r.mk_non_increasing,
        "gao_vitale": r.gao_vitale.as_ref().map_or(Value::Null, gao_vitale_json),
        "gc_threshold": num(r.gc_threshold),
        "classification": r.classification.as_str(),
        "diagnostics": r.diagnostics,
    })
}

/// Flat `field,value` rows of a JSON object; nested values are inlined as JSON.
struct SeriesRow {
    k: usize,
    m: f64,
    ln_k: f64,
    ln_m: f64,
    naive_rho: f64,
}

// rows k = 1..k_max-1; naive rho_k = k ln k / (-ln V_k)
fn growth_series(v: &VolumeSequence) -> Result<Vec<SeriesRow>, CliError> {
    let lm = log_mk_sequence(v)?;
    let lv = v.log_v();
    Ok((1..lm.len())
        .map(|k| {
            let ln_k = (k as f64).ln();
            let naive_rho = if lv[k] < 0.0 {
                k as f64 * ln_k / -lv[k]
            } else {
                f64::NAN
            };
            SeriesRow {
                k,
                m: lm[k].exp(),
                ln_k,
                ln_m: lm[k],
                naive_rho,
            }
        })
        .collect())
}

pub fn growth_series_json(v: &VolumeSequence) -> Result<Value, CliError> {
    let rows = growth_series(v)?;
    Ok(json!({
        "k": rows.iter().map(|r| r.k).collect::<Vec<_>>(),
        "m_k": rows.iter().map(|r| num(r.m)).collect::<Vec<_>>(),
        "ln_k": rows.iter().map(|r| num(r.ln_k)).collect::<Vec<_>>(),
        "ln_m_k": rows.iter().map(|r| num(r.ln_m)).collect::<Vec<_>>(),
        "naive_rho": rows.iter().map(|r| num(r.naive_rho)).collect::<Vec<_>>(),
    }))
}

pub fn growth_series_csv(v: &VolumeSequence) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["k", "m_k", "ln_k", "ln_m_k", "naive_rho"])?;
    for r in growth_series(v)? {
        w.write_record([
            r.k.to_string(),
            cell(r.m),
            cell(r.ln_k),
            cell(r.ln_m),
            cell(r.naive_rho),
        ])?;
    }
    finish_csv(w)
}

pub fn object_csv(v: &Value) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["field", "value"])?;
    if let Value::Object(map) = v {
        for (k, x) in map {
            let s = match x {
                Value::String(s) => s.clone(),
                Value::Null => String::new(),
                other => other.to_string(),
            };
            w.write_record([k.as_str(), s.as_str()])?;
        }
    }
    finish_csv(w)
}

/// `[{re, im, residual, artifact_flag, multiple}]`.
pub fn zero_set_json(zs: &ZeroSet) -> Value {
    Value::Array(
        (0..zs.len())
            .map(|i| {
                json!({
                    "re": num(zs.zeros[i].re),
                    "im": num(zs.zeros[i].im),
                    "residual": num(zs.residuals[i]),
                    "artifact_flag": zs.artifact[i],
                    "multiple": zs.multiple[i],
                })
            })
            .collect(),
    )
}

pub fn zero_set_csv(zs: &ZeroSet) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["re", "im", "residual", "artifact_flag"])?;
    for i in 0..zs.len() {
        w.write_record([
            cell(zs.zeros[i].re),
            cell(zs.zeros[i].im),
            cell(zs.residuals[i]),
            zs.artifact[i].to_string(),
        ])?;
    }
    finish_csv(w)
}

pub fn exponent_json(e: &ConvergenceExponent) -> Value {
    json!({
        "exponent": num(e.exponent),
        "stderr": num(e.stderr),
        "window": window(Some(e.window)),
        "ill_conditioned": e.ill_conditioned,
    })
}

/// `{value, stderr, n, seed, method, lambda, ...}`.
pub fn mc_json(e: &McEstimate) -> Value {
    let mut m = Map::new();
    m.insert("value".into(), num(e.value));
    m.insert("stderr".into(), num(e.stderr));
    m.insert("n".into(), json!(e.n_samples));
    m.insert("seed".into(), json!(e.seed));
    m.insert("method".into(), json!(e.method.as_str()));
    m.insert("lambda".into(), opt_num(e.lambda));
    m.insert("workers".into(), json!(e.workers));
    m.insert("ess".into(), opt_num(e.ess));
    m.insert("warnings".into(), json!(e.warnings));
    Value::Object(m)
}

/// Appends one CSV line to `out`, quoting as needed.
pub fn push_csv_line(out: &mut String, fields: &[String]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(fields)?;
    let _ = write!(out, "{}", finish_csv(w)?);
    Ok(())
}
