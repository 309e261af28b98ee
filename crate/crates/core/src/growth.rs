//! Growth indicators of the Steiner function from a finite volume sequence.
//!
//! Order and type are limits, so every estimate here is a regression over a
//! window of indices rather than a pointwise ratio: `n ln n / ln(1/V_n)`
//! converges only like `1/ln n`, while fitting `-ln V_n` against
//! `{n ln n, n, ln n, 1}` matches the asymptotic expansion of all the model
//! families and converges at `O(1/n)`.
//!
//! Verdicts on Gaussian continuity are numerical statements about a
//! truncation. A flat `m_k` tail can never prove a positive limit, so
//! [`Classification::NotGc`] is a heuristic flag.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::linfit::least_squares;
use crate::volseq::{log_mk_sequence, VolumeSequence};
use crate::{Error, Result};

/// Minimum number of indices in a fit window.
pub const MIN_WINDOW: usize = 8;
/// Default Gaussian-continuity threshold on `m_{k_max}`.
pub const DEFAULT_GC_THRESHOLD: f64 = 1e-3;
/// Default margin of the Gao–Vitale exponent test.
pub const DEFAULT_GV_MARGIN: f64 = 0.05;
/// Decay slopes above `-FLAT_SLOPE` count as "no decay".
pub const FLAT_SLOPE: f64 = 0.02;
/// Relative drop of `m_k` over the trailing quarter below which the tail is flat.
pub const FLAT_DROP: f64 = 0.01;
/// Tolerance, on top of two standard errors, for `ρ` to be read as 1.
pub const UNIT_ORDER_TOL: f64 = 0.02;

/// Inclusive index range `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    pub lo: usize,
    pub hi: usize,
}

impl Window {
    pub fn new(lo: usize, hi: usize) -> Self {
        Window { lo, hi }
    }

    /// `[k_max/5, k_max]`, the head dropped as pre-asymptotic.
    pub fn default_for(k_max: usize) -> Self {
        Window {
            lo: (k_max / 5).max(2),
            hi: k_max,
        }
    }

    /// `[k_max/20, k_max - 1]`, wide enough to see `m_k` halve.
    pub fn gao_vitale_default(k_max: usize) -> Self {
        Window {
            lo: (k_max / 20).max(2),
            hi: k_max.saturating_sub(1),
        }
    }

    pub fn len(&self) -> usize {
        (self.hi + 1).saturating_sub(self.lo)
    }

    pub fn is_empty(&self) -> bool {
        self.hi < self.lo
    }

    fn upper_half(&self) -> Self {
        Window {
            lo: self.lo + self.len() / 2,
            hi: self.hi,
        }
    }
}

fn window_error(w: Window, reason: impl Into<String>) -> Error {
    Error::InvalidWindow {
        lo: w.lo,
        hi: w.hi,
        reason: reason.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderWarning {
    /// The `n ln n` coefficient was not positive: the sequence does not decay
    /// like the coefficients of an entire function.
    GrowingSequence,
}

/// Order estimate with fit diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderEstimate {
    /// Raw (unclamped) estimate.
    pub rho: f64,
    /// Regression standard error combined with the shift seen when refitting
    /// on the upper half of the window.
    pub stderr: f64,
    /// Pointwise estimate at the window end.
    pub naive: Option<f64>,
    pub residual_rms: f64,
    pub window: Option<Window>,
    /// The sequence vanishes eventually; order 0 without fitting.
    pub terminating: bool,
    pub warning: Option<OrderWarning>,
    /// `|ρ_mk − ρ_coeffs|` on the same window, for the `m_k` route.
    pub cross_check: Option<f64>,
}

impl OrderEstimate {
    /// The estimate clamped into `[0, 1]`.
    pub fn clamped(&self) -> f64 {
        if self.rho.is_nan() {
            return self.rho;
        }
        self.rho.clamp(0.0, 1.0)
    }

    fn terminating() -> Self {
        OrderEstimate {
            rho: 0.0,
            stderr: 0.0,
            naive: None,
            residual_rms: 0.0,
            window: None,
            terminating: true,
            warning: None,
            cross_check: None,
        }
    }
}

struct SlopeFit {
    slope: f64,
    stderr: f64,
    rms: f64,
}

/// Coefficient on `n ln n` in the fit of `-ln V_n`.
fn coeff_fit(log_v: &[f64], w: Window) -> Option<SlopeFit> {
    let rows: Vec<Vec<f64>> = (w.lo..=w.hi)
        .map(|n| {
            let x = n as f64;
            let lx = libm::log(x);
            vec![x * lx, x, lx, 1.0]
        })
        .collect();
    let y: Vec<f64> = (w.lo..=w.hi).map(|n| -log_v[n]).collect();
    let fit = least_squares(&rows, &y)?;
    Some(SlopeFit {
        slope: fit.coef[0],
        stderr: fit.stderr[0],
        rms: fit.rms,
    })
}

/// Slope of `y` against `ln k` with intercept.
fn log_slope_fit(ks: impl Iterator<Item = usize>, y: impl Fn(usize) -> f64) -> Option<SlopeFit> {
    let mut rows = Vec::new();
    let mut ys = Vec::new();
    for k in ks {
        rows.push(vec![libm::log(k as f64), 1.0]);
        ys.push(y(k));
    }
    let fit = least_squares(&rows, &ys)?;
    Some(SlopeFit {
        slope: fit.coef[0],
        stderr: fit.stderr[0],
        rms: fit.rms,
    })
}

fn check_coeff_window(v: &VolumeSequence, w: Window) -> Result<()> {
    if w.lo < 2 || w.hi > v.k_max() || w.is_empty() {
        return Err(window_error(w, format!("must lie within [2, {}]", v.k_max())));
    }
    if w.len() < MIN_WINDOW {
        return Err(window_error(w, format!("needs at least {MIN_WINDOW} points")));
    }
    if v.log_v()[w.lo..=w.hi].iter().any(|l| !l.is_finite()) {
        return Err(window_error(w, "V_n vanishes inside the window"));
    }
    Ok(())
}

/// Order from the coefficients, `ρ = lim n ln n / ln(1/V_n)`.
pub fn estimate_order_from_coeffs(v: &VolumeSequence, window: Window) -> Result<OrderEstimate> {
    if v.is_terminating() {
        return Ok(OrderEstimate::terminating());
    }
    check_coeff_window(v, window)?;
    let l = v.log_v();
    let fit = coeff_fit(l, window).ok_or_else(|| window_error(window, "singular design"))?;
    let (rho, warning) = slope_to_order(fit.slope);
    let mut stderr = fit.stderr / (fit.slope * fit.slope);
    let half = window.upper_half();
    if half.len() >= MIN_WINDOW {
        if let Some(h) = coeff_fit(l, half) {
            let shift = 1.0 / h.slope - rho;
            stderr = libm::sqrt(stderr * stderr + shift * shift);
        }
    }
    let n = window.hi as f64;
    Ok(OrderEstimate {
        rho,
        stderr,
        naive: Some(n * libm::log(n) / -l[window.hi]),
        residual_rms: fit.rms,
        window: Some(window),
        terminating: false,
        warning,
        cross_check: None,
    })
}

fn slope_to_order(slope: f64) -> (f64, Option<OrderWarning>) {
    if slope > 0.0 {
        (1.0 / slope, None)
    } else if slope == 0.0 {
        (f64::INFINITY, Some(OrderWarning::GrowingSequence))
    } else {
        (1.0 / slope, Some(OrderWarning::GrowingSequence))
    }
}

/// Clamps the top of an `m_k` window to the last available ratio.
fn mk_window(log_mk: &[f64], w: Window) -> Result<Window> {
    let w = Window::new(w.lo, w.hi.min(log_mk.len().saturating_sub(1)));
    if w.lo < 2 || w.is_empty() || log_mk.is_empty() {
        return Err(window_error(
            w,
            format!("must lie within [2, {}]", log_mk.len().saturating_sub(1)),
        ));
    }
    if w.len() < MIN_WINDOW {
        return Err(window_error(w, format!("needs at least {MIN_WINDOW} points")));
    }
    if log_mk[w.lo..=w.hi].contains(&f64::NEG_INFINITY) {
        return Err(window_error(
            w,
            "m_k = 0 inside the window (finite-dimensional, order 0)",
        ));
    }
    Ok(w)
}

/// Order from the ratios, `ρ = limsup ln k / (-ln(m_k / k))`.
///
/// The window top is clamped to `k_max - 1`, the last index with an `m_k`.
pub fn estimate_order_from_mk(v: &VolumeSequence, window: Window) -> Result<OrderEstimate> {
    let lm = log_mk_sequence(v)?;
    let w = mk_window(&lm, window)?;
    let y = |k: usize| libm::log(k as f64) - lm[k];
    let fit = log_slope_fit(w.lo..=w.hi, y).ok_or_else(|| window_error(w, "singular design"))?;
    let (rho, warning) = slope_to_order(fit.slope);
    let kk = w.hi as f64;
    let cross_check = estimate_order_from_coeffs(v, Window::new(w.lo, w.hi.min(v.k_max())))
        .ok()
        .map(|c| libm::fabs(c.rho - rho));
    Ok(OrderEstimate {
        rho,
        stderr: fit.stderr / (fit.slope * fit.slope),
        naive: Some(libm::log(kk) / y(w.hi)),
        residual_rms: fit.rms,
        window: Some(w),
        terminating: false,
        warning,
        cross_check,
    })
}

/// Type estimate at a given order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TypeEstimate {
    pub sigma: f64,
    pub rho: f64,
    pub n_eval: usize,
    /// `(max − min) / σ` of the pointwise values over a short trailing window.
    pub trailing_spread: f64,
}

/// `σ` from `(σ e ρ)^{1/ρ} = lim n^{1/ρ} V_n^{1/n}`, evaluated at `n_eval`.
pub fn estimate_type(v: &VolumeSequence, rho: f64, n_eval: usize) -> Result<TypeEstimate> {
    if !(rho > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "type is undefined at order {rho}; need 0 < rho <= 1"
        )));
    }
    if rho > 1.0 + 1e-12 {
        return Err(Error::InvalidArgument(format!("order {rho} exceeds 1")));
    }
    if n_eval == 0 || n_eval > v.k_max() {
        return Err(Error::InvalidArgument(format!(
            "n_eval = {n_eval} outside [1, {}]",
            v.k_max()
        )));
    }
    let l = v.log_v();
    let at = |n: usize| {
        let x = n as f64;
        // t_n^ρ / (eρ) with t_n = exp(ln n / ρ + ln V_n / n)
        libm::exp(libm::log(x) + rho * l[n] / x - 1.0) / rho
    };
    if !l[n_eval].is_finite() {
        return Err(Error::InvalidArgument(format!("V_{n_eval} = 0")));
    }
    let sigma = at(n_eval);
    let span = (n_eval / 100).max(4).min(n_eval - 1);
    let (mut lo, mut hi) = (sigma, sigma);
    for n in (n_eval - span..n_eval).filter(|&n| l[n].is_finite()) {
        let s = at(n);
        lo = lo.min(s);
        hi = hi.max(s);
    }
    Ok(TypeEstimate {
        sigma,
        rho,
        n_eval,
        trailing_spread: (hi - lo) / sigma,
    })
}

/// Fitted slope of `ln m_k` against `ln k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayExponent {
    pub slope: f64,
    pub stderr: f64,
    pub window: Window,
}

impl DecayExponent {
    /// The decay exponent, or `None` when `m_k` does not decay.
    pub fn exponent(&self) -> Option<f64> {
        (self.slope <= -FLAT_SLOPE).then_some(self.slope)
    }
}

/// `limsup ln m_k / ln k`, which equals `1 − 1/ρ`.
pub fn mk_decay_exponent(v: &VolumeSequence, window: Window) -> Result<DecayExponent> {
    let lm = log_mk_sequence(v)?;
    let w = mk_window(&lm, window)?;
    let fit = log_slope_fit(w.lo..=w.hi, |k| lm[k]).ok_or_else(|| window_error(w, "singular design"))?;
    Ok(DecayExponent {
        slope: fit.slope,
        stderr: fit.stderr,
        window: w,
    })
}

/// Bounds on `osc(K) = lim m_k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillationBounds {
    /// Always 0: no positive lower bound follows from finitely many terms.
    pub lower: f64,
    /// `m_{k_max - 1}`; an upper bound because `m_k` is non-increasing.
    pub upper: f64,
    /// Slope of `ln m_k` against `ln k` over the upper half of the sequence.
    pub tail_trend: Option<f64>,
    /// Whether every computed `m_k` was non-increasing (slack 1e-9).
    pub non_increasing: bool,
}

pub fn oscillation_bounds(v: &VolumeSequence) -> Result<OscillationBounds> {
    let lm = log_mk_sequence(v)?;
    let Some(&last) = lm.last() else {
        return Err(Error::InvalidSequence("need at least V_0 and V_1".into()));
    };
    let non_increasing = lm.windows(2).all(|p| p[1] <= p[0] + 1e-9);
    let half = Window::new((lm.len() / 2).max(2), lm.len().saturating_sub(1));
    let tail_trend = if half.len() >= MIN_WINDOW && lm[half.lo..=half.hi].iter().all(|l| l.is_finite()) {
        log_slope_fit(half.lo..=half.hi, |k| lm[k]).map(|f| f.slope)
    } else {
        None
    };
    Ok(OscillationBounds {
        lower: 0.0,
        upper: libm::exp(last),
        tail_trend,
        non_increasing,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GaoVitaleVerdict {
    Consistent,
    Violated,
}

/// Evidence that `m_k → 0` slower than `k^{-1/2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaoVitaleReport {
    pub verdict: GaoVitaleVerdict,
    pub exponent: f64,
    pub margin: f64,
    /// `m_k √k` strictly increasing over the upper half of the window.
    pub increasing_tail: bool,
    /// `m_lo / m_hi`.
    pub drop_factor: f64,
    pub window: Window,
}

/// Violated when the fitted exponent exceeds `-1/2 + margin`, `m_k √k` keeps
/// increasing over the trailing half of the window and `m_k` has at least
/// halved across it. Otherwise consistent.
pub fn gao_vitale_test(v: &VolumeSequence, window: Window, margin: f64) -> Result<GaoVitaleReport> {
    let lm = log_mk_sequence(v)?;
    let w = mk_window(&lm, window)?;
    let fit = log_slope_fit(w.lo..=w.hi, |k| lm[k]).ok_or_else(|| window_error(w, "singular design"))?;
    let scaled = |k: usize| lm[k] + 0.5 * libm::log(k as f64);
    let mid = w.lo + w.len() / 2;
    let increasing_tail = (mid..w.hi).all(|k| scaled(k + 1) > scaled(k));
    let drop_factor = libm::exp(lm[w.lo] - lm[w.hi]);
    let violated = fit.slope > -0.5 + margin && increasing_tail && drop_factor >= 2.0;
    Ok(GaoVitaleReport {
        verdict: if violated {
            GaoVitaleVerdict::Violated
        } else {
            GaoVitaleVerdict::Consistent
        },
        exponent: fit.slope,
        margin,
        increasing_tail,
        drop_factor,
        window: w,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Gc,
    NotGc,
    Inconclusive,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::Gc => "GC",
            Classification::NotGc => "NotGC",
            Classification::Inconclusive => "Inconclusive",
        }
    }
}

/// Options for [`analyze`].
#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisOptions {
    /// Fit window; defaults to [`Window::default_for`].
    pub window: Option<Window>,
    pub gc_threshold: f64,
    /// Order plugged into the type formula. Without it the type is only
    /// computed (at `ρ = 1`) when the fitted order is consistent with 1.
    pub type_rho: Option<f64>,
    /// Index for the type formula; defaults to `k_max`.
    pub type_n_eval: Option<usize>,
    pub gao_vitale_window: Option<Window>,
    pub gao_vitale_margin: f64,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            window: None,
            gc_threshold: DEFAULT_GC_THRESHOLD,
            type_rho: None,
            type_n_eval: None,
            gao_vitale_window: None,
            gao_vitale_margin: DEFAULT_GV_MARGIN,
        }
    }
}

/// Everything [`analyze`] learned about a sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthReport {
    pub k_max: usize,
    pub window: Option<Window>,
    /// Clamped into `[0, 1]`.
    pub rho_hat: Option<f64>,
    pub rho_raw: Option<f64>,
    pub rho_stderr: Option<f64>,
    pub rho_naive: Option<f64>,
    pub rho_from_mk: Option<f64>,
    pub residual: Option<f64>,
    pub terminating: bool,
    pub sigma_hat: Option<f64>,
    /// The order used for `sigma_hat`.
    pub sigma_rho: Option<f64>,
    /// `None` when `m_k` does not decay or could not be fitted.
    pub mk_decay_exponent_hat: Option<f64>,
    pub mk_decay_slope: Option<f64>,
    pub osc_lower: f64,
    pub osc_upper: f64,
    /// Relative drop of `m_k` across the trailing quarter of the window.
    pub osc_trailing_drop: Option<f64>,
    pub mk_non_increasing: bool,
    pub gao_vitale: Option<GaoVitaleReport>,
    pub gc_threshold: f64,
    pub classification: Classification,
    pub diagnostics: Vec<String>,
}

/// Runs every estimator on `v` and classifies the result.
///
/// Estimators that cannot run (short windows, vanishing terms) leave their
/// fields empty and add a diagnostic. Only an inconsistent sequence is an error.
pub fn analyze(v: &VolumeSequence, opts: &AnalysisOptions) -> Result<GrowthReport> {
    let lm = log_mk_sequence(v)?;
    let k_max = v.k_max();
    let window = opts.window.unwrap_or_else(|| Window::default_for(k_max));
    let mut diagnostics = Vec::new();

    let order = match estimate_order_from_coeffs(v, window) {
        Ok(o) => Some(o),
        Err(e) => {
            diagnostics.push(format!("order from coefficients: {e}"));
            None
        }
    };
    if let Some(OrderEstimate {
        warning: Some(OrderWarning::GrowingSequence),
        ..
    }) = order
    {
        diagnostics.push("n ln n coefficient not positive: sequence does not decay like an entire function's".into());
    }
    let terminating = v.is_terminating();
    let rho_from_mk = if terminating {
        None
    } else {
        match estimate_order_from_mk(v, window) {
            Ok(o) => Some(o.rho),
            Err(e) => {
                diagnostics.push(format!("order from m_k: {e}"));
                None
            }
        }
    };

    let decay = if terminating {
        None
    } else {
        match mk_decay_exponent(v, window) {
            Ok(d) => Some(d),
            Err(e) => {
                diagnostics.push(format!("m_k decay: {e}"));
                None
            }
        }
    };

    let osc_upper = lm.last().map_or(0.0, |&l| libm::exp(l));
    let mk_non_increasing = lm.windows(2).all(|p| p[1] <= p[0] + 1e-9);
    if !mk_non_increasing {
        diagnostics.push("m_k is not non-increasing: sequence fails ultra-log-concavity; limits are unreliable".into());
    }
    let osc_trailing_drop = trailing_drop(&lm, window);

    let unit_order = order
        .as_ref()
        .filter(|o| !o.terminating)
        .is_some_and(|o| libm::fabs(o.rho - 1.0) <= 2.0 * o.stderr + UNIT_ORDER_TOL);
    let (sigma_hat, sigma_rho) = {
        let rho = opts.type_rho.or(unit_order.then_some(1.0));
        match rho {
            Some(r) if k_max >= 1 => match estimate_type(v, r, opts.type_n_eval.unwrap_or(k_max)) {
                Ok(t) => (Some(t.sigma), Some(r)),
                Err(e) => {
                    diagnostics.push(format!("type: {e}"));
                    (None, None)
                }
            },
            _ => (None, None),
        }
    };

    let gao_vitale = if terminating {
        None
    } else {
        let w = opts
            .gao_vitale_window
            .unwrap_or_else(|| Window::gao_vitale_default(k_max));
        match gao_vitale_test(v, w, opts.gao_vitale_margin) {
            Ok(g) => Some(g),
            Err(e) => {
                diagnostics.push(format!("Gao-Vitale test: {e}"));
                None
            }
        }
    };

    let mut report = GrowthReport {
        k_max,
        window: order.as_ref().and_then(|o| o.window),
        rho_hat: order.as_ref().map(OrderEstimate::clamped),
        rho_raw: order.as_ref().map(|o| o.rho),
        rho_stderr: order.as_ref().map(|o| o.stderr),
        rho_naive: order.as_ref().and_then(|o| o.naive),
        rho_from_mk,
        residual: order.as_ref().map(|o| o.residual_rms),
        terminating,
        sigma_hat,
        sigma_rho,
        mk_decay_exponent_hat: decay.and_then(|d| d.exponent()),
        mk_decay_slope: decay.map(|d| d.slope),
        osc_lower: 0.0,
        osc_upper,
        osc_trailing_drop,
        mk_non_increasing,
        gao_vitale,
        gc_threshold: opts.gc_threshold,
        classification: Classification::Inconclusive,
        diagnostics,
    };
    report.classification = classify_gc(&report, opts.gc_threshold);
    if report.classification != Classification::Gc && !terminating {
        report
            .diagnostics
            .push("verdict is numerical, drawn from a truncated sequence".into());
    }
    Ok(report)
}

fn trailing_drop(lm: &[f64], window: Window) -> Option<f64> {
    let hi = window.hi.min(lm.len().checked_sub(1)?);
    let lo = window.lo.max(1);
    if hi <= lo {
        return None;
    }
    let start = hi - (hi - lo) / 4;
    let (a, b) = (lm[start], lm[hi]);
    if a == f64::NEG_INFINITY {
        return Some(0.0);
    }
    Some(-libm::expm1(b - a))
}

/// Gaussian-continuity verdict from the report fields alone.
///
/// - GC when the sequence terminates, when `ρ̂ + 2·se < 1`, or when
///   `m_{k_max} < gc_threshold` while still decreasing.
/// - NotGC when `m_k` sits flat above the threshold over the trailing quarter
///   of the window and `ρ̂` is consistent with 1.
/// - Inconclusive otherwise, or when both signals fire.
pub fn classify_gc(report: &GrowthReport, gc_threshold: f64) -> Classification {
    if report.terminating {
        return Classification::Gc;
    }
    let by_order = matches!(
        (report.rho_hat, report.rho_stderr),
        (Some(r), Some(se)) if r + 2.0 * se < 1.0
    );
    let decreasing = report.osc_upper == 0.0 || report.osc_trailing_drop.is_some_and(|d| d > 0.0);
    let by_osc = report.osc_upper < gc_threshold && decreasing;

    let flat = report.osc_trailing_drop.is_some_and(|d| libm::fabs(d) <= FLAT_DROP);
    let unit_order = matches!(
        (report.rho_raw, report.rho_stderr),
        (Some(r), Some(se)) if libm::fabs(r - 1.0) <= 2.0 * se + UNIT_ORDER_TOL
    );
    let not_gc = flat && report.osc_upper >= gc_threshold && unit_order;

    match (by_order || by_osc, not_gc) {
        (true, false) => Classification::Gc,
        (false, true) => Classification::NotGc,
        _ => Classification::Inconclusive,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::ln_factorial;
    use crate::volseq::{
        box_volume_sequence, bridge_volume_sequence, spiral_volume_sequence, user_volume_sequence, BoxSpec, JCut,
        SideRule, Source, TailError,
    };

    fn geometric_factorial(l: f64, k_max: usize) -> VolumeSequence {
        let lv = (0..=k_max).map(|k| k as f64 * l.ln() - ln_factorial(k)).collect();
        VolumeSequence::from_log_values(Source::User, lv, TailError::unspecified(), None).unwrap()
    }

    fn power_law(alpha: f64, k_max: usize) -> VolumeSequence {
        let spec = BoxSpec::rule(SideRule::PowerLaw { alpha }, JCut::Auto).unwrap();
        box_volume_sequence(&spec, k_max).unwrap()
    }

    #[test]
    fn spiral_order_from_coefficients() {
        let s = spiral_volume_sequence(1000);
        let o = estimate_order_from_coeffs(&s, Window::new(200, 1000)).unwrap();
        assert!((0.647..=0.687).contains(&o.rho), "{}", o.rho);
        // the pointwise ratio is far off at this range
        assert!(o.naive.unwrap() > 0.8);
    }

    #[test]
    fn spiral_order_from_mk_and_agreement() {
        let s = spiral_volume_sequence(2000);
        let o = estimate_order_from_mk(&s, Window::new(200, 2000)).unwrap();
        assert!((o.rho - 2.0 / 3.0).abs() < 0.03);
        assert!(o.cross_check.unwrap() <= 0.02);
    }

    #[test]
    fn finite_box_has_order_zero() {
        let spec = BoxSpec::explicit(vec![1.0, 0.5, 0.25]).unwrap();
        let v = box_volume_sequence(&spec, 3).unwrap();
        let o = estimate_order_from_coeffs(&v, Window::new(2, 3)).unwrap();
        assert!(o.terminating);
        assert_eq!(o.rho, 0.0);
        assert!(estimate_order_from_mk(&box_volume_sequence(&spec, 40).unwrap(), Window::new(2, 39)).is_err());
    }

    #[test]
    fn short_window_rejected() {
        let s = spiral_volume_sequence(20);
        assert!(matches!(
            estimate_order_from_coeffs(&s, Window::new(10, 16)),
            Err(Error::InvalidWindow { .. })
        ));
        assert!(estimate_order_from_coeffs(&s, Window::new(1, 20)).is_err());
        assert!(estimate_order_from_coeffs(&s, Window::new(2, 21)).is_err());
    }

    #[test]
    fn growing_sequence_warns() {
        let lv = (0..=40)
            .map(|k| if k == 0 { 0.0 } else { (k as f64) * (k as f64).ln() })
            .collect();
        let v = VolumeSequence::from_log_values(Source::User, lv, TailError::unspecified(), None).unwrap();
        let o = estimate_order_from_coeffs(&v, Window::new(10, 40)).unwrap();
        assert_eq!(o.warning, Some(OrderWarning::GrowingSequence));
        assert!(o.rho < 0.0);
        assert_eq!(o.clamped(), 0.0);
    }

    #[test]
    fn power_law_orders() {
        let v = power_law(1.25, 2000);
        let o = estimate_order_from_coeffs(&v, Window::new(200, 2000)).unwrap();
        assert!((0.77..=0.83).contains(&o.rho), "{}", o.rho);
        let v = power_law(2.0, 2000);
        let o = estimate_order_from_mk(&v, Window::default_for(2000)).unwrap();
        assert!((o.rho - 0.5).abs() < 0.03, "{}", o.rho);
    }

    #[test]
    fn spiral_and_bridge_type() {
        let target = 1.5 * (2.0 * core::f64::consts::PI).powf(1.0 / 3.0);
        assert!((target - 2.767_90).abs() < 1e-5);
        for v in [spiral_volume_sequence(2000), bridge_volume_sequence(2000)] {
            let t = estimate_type(&v, 2.0 / 3.0, 2000).unwrap();
            assert!((t.sigma - target).abs() < 0.02 * target, "{}", t.sigma);
            assert!(t.trailing_spread < 1e-2);
        }
    }

    #[test]
    fn type_scales_with_dilation_at_unit_order() {
        let v = spiral_volume_sequence(500);
        let a = estimate_type(&v, 1.0, 500).unwrap().sigma;
        let b = estimate_type(&v.dilated(3.0), 1.0, 500).unwrap().sigma;
        assert!((b / a - 3.0).abs() < 1e-12);
    }

    #[test]
    fn type_rejects_zero_order() {
        let v = spiral_volume_sequence(50);
        assert!(estimate_type(&v, 0.0, 50).is_err());
        assert!(estimate_type(&v, 0.5, 51).is_err());
    }

    #[test]
    fn synthetic_type_equals_limit_of_mk() {
        let v = geometric_factorial(0.5, 2000);
        let t = estimate_type(&v, 1.0, 2000).unwrap();
        assert!((t.sigma - 0.5).abs() < 0.01);
        let osc = oscillation_bounds(&v).unwrap();
        assert!((osc.upper - 0.5).abs() < 1e-12);
    }

    #[test]
    fn decay_exponents() {
        let s = spiral_volume_sequence(2000);
        let d = mk_decay_exponent(&s, Window::default_for(2000)).unwrap();
        assert!((d.slope + 0.5).abs() < 0.05);
        let p = power_law(1.25, 2000);
        let d = mk_decay_exponent(&p, Window::default_for(2000)).unwrap();
        assert!((d.slope + 0.25).abs() < 0.05, "{}", d.slope);
        let flat = geometric_factorial(0.5, 200);
        let d = mk_decay_exponent(&flat, Window::default_for(200)).unwrap();
        assert_eq!(d.exponent(), None);
        assert!(d.slope.abs() < 1e-9);
    }

    #[test]
    fn exponential_box_decays_fast() {
        let spec = BoxSpec::rule(SideRule::Exponential { rate: 1.0 }, JCut::Auto).unwrap();
        let v = box_volume_sequence(&spec, 600).unwrap();
        let d = mk_decay_exponent(&v, Window::new(50, 500)).unwrap();
        assert!(d.slope < -2.0, "{}", d.slope);
    }

    #[test]
    fn oscillation_of_spiral_and_finite_box() {
        let s = spiral_volume_sequence(10_000);
        let o = oscillation_bounds(&s).unwrap();
        let guess = (2.0 * core::f64::consts::PI / 9999.0).sqrt();
        assert!((o.upper / guess - 1.0).abs() < 0.05, "{}", o.upper);
        assert!(o.non_increasing);
        let spec = BoxSpec::explicit(vec![1.0, 0.5, 0.25]).unwrap();
        let o = oscillation_bounds(&box_volume_sequence(&spec, 5).unwrap()).unwrap();
        assert_eq!(o.upper, 0.0);
        assert!(oscillation_bounds(&user_volume_sequence(&[1.0]).unwrap()).is_err());
    }

    #[test]
    fn mk_of_finite_box() {
        let spec = BoxSpec::explicit(vec![1.0, 0.5, 0.25]).unwrap();
        let m = crate::volseq::mk_sequence(&box_volume_sequence(&spec, 5).unwrap()).unwrap();
        assert!((m[0] - 1.75).abs() < 1e-15);
        assert!((m[1] - 1.0).abs() < 1e-15);
        assert!((m[2] - 3.0 * 0.125 / 0.875).abs() < 1e-15);
        assert_eq!(&m[3..], &[0.0, 0.0]);
    }

    #[test]
    fn gao_vitale_verdicts() {
        let w = Window::new(100, 2000);
        let g = gao_vitale_test(&power_law(1.25, 2000), w, DEFAULT_GV_MARGIN).unwrap();
        assert_eq!(g.verdict, GaoVitaleVerdict::Violated, "{g:?}");
        let g = gao_vitale_test(&spiral_volume_sequence(2000), w, DEFAULT_GV_MARGIN).unwrap();
        assert_eq!(g.verdict, GaoVitaleVerdict::Consistent);
        let g = gao_vitale_test(&power_law(2.0, 2000), w, DEFAULT_GV_MARGIN).unwrap();
        assert_eq!(g.verdict, GaoVitaleVerdict::Consistent);
        assert!((g.exponent + 1.0).abs() < 0.05);
    }

    #[test]
    fn classifications() {
        let opts = AnalysisOptions::default();
        let r = analyze(&spiral_volume_sequence(2000), &opts).unwrap();
        assert_eq!(r.classification, Classification::Gc);
        assert_eq!(r.sigma_hat, None);

        let spec = BoxSpec::rule(SideRule::Exponential { rate: 1.0 }, JCut::Auto).unwrap();
        let r = analyze(&box_volume_sequence(&spec, 2000).unwrap(), &opts).unwrap();
        assert_eq!(r.classification, Classification::Gc);
        assert!(r.rho_hat.unwrap() <= 0.05);

        let r = analyze(&geometric_factorial(0.5, 2000), &opts).unwrap();
        assert_eq!(r.classification, Classification::NotGc, "{r:?}");
        assert!((r.sigma_hat.unwrap() - 0.5).abs() < 0.01);

        let spec = BoxSpec::explicit(vec![1.0, 0.5]).unwrap();
        let r = analyze(&box_volume_sequence(&spec, 4).unwrap(), &opts).unwrap();
        assert_eq!(r.classification, Classification::Gc);
        assert_eq!(r.osc_upper, 0.0);
    }

    #[test]
    fn short_sequence_is_inconclusive() {
        let r = analyze(&spiral_volume_sequence(4), &AnalysisOptions::default()).unwrap();
        assert_eq!(r.classification, Classification::Inconclusive);
        assert!(r.rho_hat.is_none());
        assert!(r.diagnostics.iter().any(|d| d.contains("at least")));
    }

    #[test]
    fn classification_is_a_function_of_the_report() {
        let r = analyze(&power_law(1.25, 1000), &AnalysisOptions::default()).unwrap();
        assert_eq!(classify_gc(&r, 1e-3), r.classification);
        assert_eq!(classify_gc(&r, 1e-3), classify_gc(&r.clone(), 1e-3));
    }
}
