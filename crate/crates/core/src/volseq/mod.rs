//! Intrinsic-volume sequences: generators for the model families, ingestion
//! of user data, the structural validators and the derived `m_k` ratios.

mod boxes;
mod validate;

pub use boxes::{box_volume_sequence, BoxSpec, JCut, SideRule};
pub use validate::{validate_chevet, validate_ulc, ValidationReport, VALIDATION_SLACK};

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::LN_2;

use crate::special::{ln_factorial, log_kappa, log_sum_exp};
use crate::{Error, Result};

/// Where a sequence came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Source {
    Spiral,
    Bridge,
    Box,
    User,
}

impl Source {
    pub fn as_str(self) -> &'static str {
        match self {
            Source::Spiral => "spiral",
            Source::Bridge => "bridge",
            Source::Box => "box",
            Source::User => "user",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "spiral" => Some(Source::Spiral),
            "bridge" => Some(Source::Bridge),
            "box" => Some(Source::Box),
            "user" => Some(Source::User),
            _ => None,
        }
    }
}

/// How the part of an infinite box beyond the convolved head was handled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailTreatment {
    /// Closed-form or finite-dimensional: nothing was omitted.
    Exact,
    /// Sides `j > J` were folded in from their power sums.
    Folded,
    /// Sides `j > J` were dropped.
    Truncated,
    /// No information (user data).
    Unspecified,
}

/// Record of the truncation error attached to a sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct TailError {
    pub treatment: TailTreatment,
    /// Number of sides convolved explicitly (`J`); zero when not a box.
    pub head_len: usize,
    /// `Σ_{j>J} ℓ_j`.
    pub omitted_sum: f64,
    /// Estimated relative error on any `V_k` due to the tail handling.
    pub relative_bound: f64,
}

impl TailError {
    pub fn exact() -> Self {
        TailError {
            treatment: TailTreatment::Exact,
            head_len: 0,
            omitted_sum: 0.0,
            relative_bound: 0.0,
        }
    }

    pub fn unspecified() -> Self {
        TailError {
            treatment: TailTreatment::Unspecified,
            ..Self::exact()
        }
    }

    /// Human-readable one-liner used in the interchange formats.
    pub fn describe(&self) -> String {
        match self.treatment {
            TailTreatment::Exact => String::from("exact"),
            TailTreatment::Unspecified => String::from("unspecified (user data)"),
            TailTreatment::Folded => format!(
                "head J={} convolved; sides j>J folded in from power sums (sum of omitted sides {:.6e}); relative error <= {:.1e}",
                self.head_len, self.omitted_sum, self.relative_bound
            ),
            TailTreatment::Truncated => format!(
                "head J={} convolved; sides j>J dropped; V_k(full)-V_k <= {:.6e} * V_(k-1); relative error <= {:.1e}",
                self.head_len, self.omitted_sum, self.relative_bound
            ),
        }
    }
}

/// Intrinsic volumes `V_0..V_kmax` stored as natural logs.
#[derive(Debug, Clone, PartialEq)]
pub struct VolumeSequence {
    log_v: Vec<f64>,
    source: Source,
    tail: TailError,
    dimension: Option<usize>,
}

impl VolumeSequence {
    /// Builds a sequence from log-values.
    ///
    /// Requires `log_v[0] == 0` and every entry finite or `-inf`. The
    /// structural inequalities are not checked here.
    pub fn from_log_values(source: Source, log_v: Vec<f64>, tail: TailError, dimension: Option<usize>) -> Result<Self> {
        match log_v.first() {
            None => return Err(Error::InvalidSequence("empty sequence".into())),
            Some(&l0) if libm::fabs(l0) > 1e-12 => {
                return Err(Error::InvalidSequence(format!("V_0 must be 1, got exp({l0})")))
            }
            _ => {}
        }
        if let Some(k) = log_v.iter().position(|v| v.is_nan() || *v == f64::INFINITY) {
            return Err(Error::InvalidSequence(format!("entry {k} is not a finite log-volume")));
        }
        let mut log_v = log_v;
        log_v[0] = 0.0;
        Ok(VolumeSequence {
            log_v,
            source,
            tail,
            dimension,
        })
    }

    pub(crate) fn from_parts_unchecked(
        source: Source,
        log_v: Vec<f64>,
        tail: TailError,
        dimension: Option<usize>,
    ) -> Self {
        VolumeSequence {
            log_v,
            source,
            tail,
            dimension,
        }
    }

    pub fn log_v(&self) -> &[f64] {
        &self.log_v
    }

    pub fn k_max(&self) -> usize {
        self.log_v.len() - 1
    }

    pub fn len(&self) -> usize {
        self.log_v.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn source(&self) -> Source {
        self.source
    }

    pub fn tail(&self) -> &TailError {
        &self.tail
    }

    /// Ambient dimension, known only for finite boxes.
    pub fn dimension(&self) -> Option<usize> {
        self.dimension
    }

    /// `V_k`, zero past `k_max`.
    pub fn value(&self, k: usize) -> f64 {
        self.log_v.get(k).map_or(0.0, |&l| libm::exp(l))
    }

    pub fn values(&self) -> Vec<f64> {
        self.log_v.iter().map(|&l| libm::exp(l)).collect()
    }

    /// Index of the first vanishing volume, if any.
    pub fn first_zero(&self) -> Option<usize> {
        self.log_v.iter().position(|&l| l == f64::NEG_INFINITY)
    }

    /// True when the sequence is known to vanish beyond some index.
    pub fn is_terminating(&self) -> bool {
        self.dimension.is_some() || self.first_zero().is_some()
    }

    /// Largest `k` with `V_k > 0` within the stored range.
    pub fn last_finite(&self) -> usize {
        self.log_v.iter().rposition(|&l| l > f64::NEG_INFINITY).unwrap_or(0)
    }

    /// The prefix `V_0..V_k`.
    pub fn truncated(&self, k_max: usize) -> Self {
        let mut out = self.clone();
        out.log_v.truncate(k_max + 1);
        out
    }

    /// Sequence of the dilate `cK`: `V_k ↦ c^k V_k`.
    pub fn dilated(&self, c: f64) -> Self {
        let lc = libm::log(c);
        let mut out = self.clone();
        for (k, l) in out.log_v.iter_mut().enumerate() {
            if *l > f64::NEG_INFINITY {
                *l += k as f64 * lc;
            }
        }
        out.tail.omitted_sum *= c;
        out
    }
}

/// `V_k = κ_k / k!`, the closed convex hull of the Wiener spiral.
pub fn spiral_volume_sequence(k_max: usize) -> VolumeSequence {
    let log_v = (0..=k_max).map(|k| log_kappa(k) - ln_factorial(k)).collect();
    VolumeSequence::from_parts_unchecked(Source::Spiral, log_v, TailError::exact(), None)
}

/// `V_k = κ_{k+1} / (2 k!)`, the closed convex hull of the spiral bridge.
pub fn bridge_volume_sequence(k_max: usize) -> VolumeSequence {
    let mut log_v: Vec<f64> = (0..=k_max).map(|k| log_kappa(k + 1) - LN_2 - ln_factorial(k)).collect();
    // κ_1 / 2 = 1 exactly
    log_v[0] = 0.0;
    VolumeSequence::from_parts_unchecked(Source::Bridge, log_v, TailError::exact(), None)
}

/// Ingests raw values `V_0, V_1, …` without checking the inequalities.
pub fn user_volume_sequence(values: &[f64]) -> Result<VolumeSequence> {
    let Some(&v0) = values.first() else {
        return Err(Error::InvalidSequence("empty sequence".into()));
    };
    if libm::fabs(v0 - 1.0) > 1e-12 {
        return Err(Error::InvalidSequence(format!("V_0 must be 1, got {v0}")));
    }
    if let Some(k) = values.iter().position(|v| !(*v >= 0.0) || v.is_infinite()) {
        return Err(Error::InvalidSequence(format!(
            "V_{k} = {} is not a finite non-negative number",
            values[k]
        )));
    }
    let mut log_v: Vec<f64> = values.iter().map(|&v| libm::log(v)).collect();
    log_v[0] = 0.0;
    Ok(VolumeSequence::from_parts_unchecked(
        Source::User,
        log_v,
        TailError::unspecified(),
        None,
    ))
}

/// `ln m_k = ln((k+1) V_{k+1} / V_k)` for `0 ≤ k < k_max`, `-inf` for `0/0`.
///
/// Working in logs keeps ratios meaningful where `m_k` itself underflows
/// (geometric side lengths make `m_k` decay like `e^{-ck}`).
pub fn log_mk_sequence(v: &VolumeSequence) -> Result<Vec<f64>> {
    let l = v.log_v();
    (0..v.k_max())
        .map(|k| {
            if l[k] == f64::NEG_INFINITY {
                if l[k + 1] == f64::NEG_INFINITY {
                    Ok(f64::NEG_INFINITY)
                } else {
                    Err(Error::InconsistentSequence { index: k })
                }
            } else {
                Ok(libm::log((k + 1) as f64) + l[k + 1] - l[k])
            }
        })
        .collect()
}

/// `m_k = (k+1) V_{k+1} / V_k` with the convention `0/0 = 0`.
pub fn mk_sequence(v: &VolumeSequence) -> Result<Vec<f64>> {
    Ok(log_mk_sequence(v)?.into_iter().map(libm::exp).collect())
}

/// Wills functional of a sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WillsValue {
    /// `Σ_{k ≤ k_max} V_k`.
    pub value: f64,
    pub log_value: f64,
    /// Chevet bound on the omitted part `Σ_{k > k_max} V_1^k / k!`.
    pub tail_bound: f64,
    /// `exp(V_1)`.
    pub upper_bound: f64,
    /// Whether `W ≤ exp(V_1)` held (slack 1e-9).
    pub bound_holds: bool,
}

pub fn wills(v: &VolumeSequence) -> WillsValue {
    let log_value = log_sum_exp(v.log_v().iter().copied());
    let v1 = v.value(1);
    let tail_bound = if v.is_terminating() {
        0.0
    } else {
        chevet_tail(v1, v.k_max())
    };
    let upper_bound = libm::exp(v1);
    WillsValue {
        value: libm::exp(log_value),
        log_value,
        tail_bound,
        upper_bound,
        bound_holds: log_value <= v1 + 1e-9,
    }
}

/// `Σ_{k > n} x^k / k!` for `x ≥ 0`.
pub fn chevet_tail(x: f64, n: usize) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let lx = libm::log(x);
    let mut k = n + 1;
    let mut log_term = k as f64 * lx - ln_factorial(k);
    let mut sum = 0.0;
    loop {
        let term = libm::exp(log_term);
        sum += term;
        k += 1;
        log_term += lx - libm::log(k as f64);
        // past the peak and negligible
        if (k as f64) > x && (term == 0.0 || term < 1e-17 * sum) {
            break;
        }
        if k > n + 100_000 {
            break;
        }
    }
    sum
}
