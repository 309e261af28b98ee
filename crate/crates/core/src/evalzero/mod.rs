//! The Steiner entire function `f_K(z) = Σ V_k z^k`: evaluation, zeros and
//! the Hadamard product.
//!
//! Zeros of a Taylor truncation only track zeros of `f_K` well inside the
//! radius where the omitted tail is negligible. [`ZeroSet`] records that
//! radius and flags anything outside it.

mod hyper;
mod roots;

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;

pub use hyper::{bridge_closed_form, hyper0f2, spiral_closed_form};

use crate::growth::Window;
use crate::linfit::least_squares;
use crate::volseq::{chevet_tail, BoxSpec, JCut, VolumeSequence};
use crate::{Error, Result};

/// Tail bound above this fraction of `|f|` means the degree is too low.
pub const DEGREE_TOO_LOW: f64 = 0.1;
/// Absolute tail size defining the reliable radius of a truncation.
pub const RELIABLE_TAIL: f64 = 1e-8;

/// `Σ_{k ≤ N} V_k z^k`, stored as log-coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSteinerFunction {
    logc: Vec<f64>,
    scale_radius: f64,
    v1: f64,
    exact: bool,
}

impl TruncatedSteinerFunction {
    pub fn log_coeffs(&self) -> &[f64] {
        &self.logc
    }

    pub fn degree(&self) -> usize {
        self.logc.len() - 1
    }

    /// `r = exp(-ln c_N / N)`, so the balanced coefficients `c_k r^k` have
    /// `b_0 = b_N = 1`.
    pub fn scale_radius(&self) -> f64 {
        self.scale_radius
    }

    /// `V_1` of the underlying sequence, used for the tail bound.
    pub fn v1(&self) -> f64 {
        self.v1
    }

    /// Whether the polynomial is the whole function (finite-dimensional body).
    pub fn is_exact(&self) -> bool {
        self.exact
    }

    pub fn coefficients(&self) -> Vec<f64> {
        self.logc.iter().map(|l| libm::exp(*l)).collect()
    }

    /// `ln(c_k r^k)`.
    pub fn balanced_log_coeffs(&self) -> Vec<f64> {
        let lr = libm::log(self.scale_radius);
        self.logc.iter().enumerate().map(|(k, l)| l + k as f64 * lr).collect()
    }

    /// `Σ_{k > N} (V_1 |z|)^k / k!`, zero for exact polynomials.
    pub fn tail_bound(&self, abs_z: f64) -> f64 {
        if self.exact {
            0.0
        } else {
            chevet_tail(self.v1 * abs_z, self.degree())
        }
    }

    /// Largest `|z|` with tail bound at most [`RELIABLE_TAIL`].
    pub fn reliable_radius(&self) -> f64 {
        if self.exact || self.v1 == 0.0 {
            return f64::INFINITY;
        }
        let (mut lo, mut hi) = (0.0, 1.0);
        while self.tail_bound(hi) <= RELIABLE_TAIL {
            lo = hi;
            hi *= 2.0;
        }
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if self.tail_bound(mid) <= RELIABLE_TAIL {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }
}

/// Truncates `v` at `degree`, or earlier at its last non-zero entry.
pub fn build_function(v: &VolumeSequence, degree: usize) -> Result<TruncatedSteinerFunction> {
    if degree > v.k_max() {
        return Err(Error::InvalidArgument(format!(
            "degree {degree} exceeds k_max {}",
            v.k_max()
        )));
    }
    let lv = v.log_v();
    let n = (0..=degree).rev().find(|&k| lv[k].is_finite()).unwrap_or(0);
    let mut logc = lv[..=n].to_vec();
    logc[0] = 0.0;
    let ends_early = n < degree || v.dimension().is_some_and(|d| d <= degree);
    let scale_radius = if n == 0 { 1.0 } else { libm::exp(-logc[n] / n as f64) };
    Ok(TruncatedSteinerFunction {
        logc,
        scale_radius,
        v1: if v.k_max() >= 1 { v.value(1) } else { 0.0 },
        exact: ends_early,
    })
}

/// Series value with its truncation diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: Complex64,
    /// Bound on `|f_K(z) − value|`.
    pub tail_bound: f64,
    pub degree_too_low: bool,
}

/// Horner evaluation in `w = z / r` with a single global magnitude shift.
pub fn eval_series(f: &TruncatedSteinerFunction, z: Complex64) -> SeriesValue {
    if z == Complex64::new(0.0, 0.0) {
        return SeriesValue {
            value: Complex64::new(1.0, 0.0),
            tail_bound: 0.0,
            degree_too_low: false,
        };
    }
    let s = roots::eval_scaled(&f.balanced_log_coeffs(), z / f.scale_radius);
    let value = s.value * libm::exp(s.log_scale);
    let tail_bound = f.tail_bound(z.norm());
    SeriesValue {
        value,
        tail_bound,
        degree_too_low: tail_bound > DEGREE_TOO_LOW * value.norm(),
    }
}

/// Product value for a box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxProductValue {
    pub value: Complex64,
    /// Factors multiplied explicitly.
    pub head_len: usize,
    /// Relative error bound from cutting the tail log-series.
    pub tail_bound: f64,
}

/// Complex product kept as `mantissa · e^{log_scale}`.
struct ScaledProduct {
    mantissa: Complex64,
    log_scale: f64,
}

impl ScaledProduct {
    fn new() -> Self {
        ScaledProduct {
            mantissa: Complex64::new(1.0, 0.0),
            log_scale: 0.0,
        }
    }

    fn mul(&mut self, x: Complex64) {
        self.mantissa *= x;
        let m = self.mantissa.norm();
        if m != 0.0 && !(1e-150..=1e150).contains(&m) {
            self.log_scale += libm::log(m);
            self.mantissa /= m;
        }
    }

    fn value(&self) -> Complex64 {
        self.mantissa * libm::exp(self.log_scale)
    }
}

const TAIL_TERMS: usize = 40;
const MAX_HEAD: usize = 1 << 26;

/// `∏ (1 + ℓ_j z)`.
///
/// Rule boxes multiply a head of `max(J, 1000)` factors, extended until
/// `ℓ_{J+1} |z| ≤ 1/4`, and fold the rest in as `exp(Σ_m (−1)^{m−1} p_m z^m / m)`
/// with `p_m = Σ_{j>J} ℓ_j^m`.
pub fn eval_box_product(spec: &BoxSpec, z: Complex64) -> Result<BoxProductValue> {
    let mut acc = ScaledProduct::new();
    match spec {
        BoxSpec::Explicit(sides) => {
            for &l in sides {
                acc.mul(Complex64::new(1.0, 0.0) + l * z);
            }
            Ok(BoxProductValue {
                value: acc.value(),
                head_len: sides.len(),
                tail_bound: 0.0,
            })
        }
        BoxSpec::Rule { rule, j_cut } => {
            if z == Complex64::new(0.0, 0.0) {
                return Ok(BoxProductValue {
                    value: Complex64::new(1.0, 0.0),
                    head_len: 0,
                    tail_bound: 0.0,
                });
            }
            let lz = libm::log(z.norm());
            let alpha = rule.param().unwrap_or(1.0).max(1.0);
            let floor = libm::ceil(4.0 * TAIL_TERMS as f64 * alpha) as usize;
            let mut head = match j_cut {
                JCut::Fixed(j) => *j,
                JCut::Auto => 1000,
            }
            .max(floor);
            while spec.log_side(head + 1) + lz > libm::log(0.25) {
                head *= 2;
                if head > MAX_HEAD {
                    return Err(Error::InvalidArgument(format!(
                        "|z| = {} too large for a product evaluation",
                        z.norm()
                    )));
                }
            }
            for i in 1..=head {
                acc.mul(Complex64::new(1.0, 0.0) + libm::exp(spec.log_side(i)) * z);
            }
            let lp = spec.tail_log_power_sums(head, TAIL_TERMS);
            let mut t = Complex64::new(0.0, 0.0);
            let mut zm = Complex64::new(1.0, 0.0);
            let mut tail_bound = 0.0;
            for (i, &l) in lp.iter().enumerate() {
                let m = i + 1;
                zm *= z;
                let term = zm * (libm::exp(l) / m as f64);
                if term.norm() <= 1e-17 * t.norm() {
                    break;
                }
                if m % 2 == 1 {
                    t += term;
                } else {
                    t -= term;
                }
                tail_bound = if m == TAIL_TERMS { term.norm() } else { 0.0 };
            }
            let value = acc.value() * t.exp();
            Ok(BoxProductValue {
                value,
                head_len: head,
                tail_bound,
            })
        }
    }
}

/// Zeros sorted by modulus, with per-zero diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroSet {
    pub zeros: Vec<Complex64>,
    /// `|p(z)| / Σ |c_k| |z|^k` after polishing.
    pub residuals: Vec<f64>,
    /// Another zero lies within `1e-6 |z|`.
    pub multiple: Vec<bool>,
    /// Beyond the reliable radius of the truncation.
    pub artifact: Vec<bool>,
    pub reliable_radius: f64,
}

impl ZeroSet {
    fn from_unsorted(mut items: Vec<(Complex64, f64)>, reliable_radius: f64) -> Self {
        items.sort_by(|a, b| a.0.norm().total_cmp(&b.0.norm()).then(a.0.im.total_cmp(&b.0.im)));
        let zeros: Vec<Complex64> = items.iter().map(|p| p.0).collect();
        let multiple = zeros
            .iter()
            .enumerate()
            .map(|(i, z)| {
                zeros
                    .iter()
                    .enumerate()
                    .any(|(j, w)| j != i && (z - w).norm() <= 1e-6 * z.norm())
            })
            .collect();
        let artifact = zeros.iter().map(|z| z.norm() > reliable_radius).collect();
        ZeroSet {
            residuals: items.iter().map(|p| p.1).collect(),
            zeros,
            multiple,
            artifact,
            reliable_radius,
        }
    }

    pub fn len(&self) -> usize {
        self.zeros.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zeros.is_empty()
    }

    pub fn moduli(&self) -> Vec<f64> {
        self.zeros.iter().map(|z| z.norm()).collect()
    }
}

/// Root-finder settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootOptions {
    pub max_iterations: usize,
    /// Relative step size at which a root is frozen.
    pub tolerance: f64,
}

impl Default for RootOptions {
    fn default() -> Self {
        RootOptions {
            max_iterations: 500,
            tolerance: 4.0 * f64::EPSILON,
        }
    }
}

/// Zeros plus the state of the iteration that found them.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroSearch {
    pub zeros: ZeroSet,
    pub converged: bool,
    pub iterations: usize,
}

/// Aberth–Ehrlich iteration on the balanced coefficients, then Newton polish.
/// Returns partial results when the iteration does not settle.
pub fn find_zeros_with(f: &TruncatedSteinerFunction, opts: &RootOptions) -> Result<ZeroSearch> {
    if f.degree() == 0 {
        return Err(Error::InvalidArgument("a constant has no zeros".into()));
    }
    let out = roots::aberth(&f.balanced_log_coeffs(), opts.max_iterations, opts.tolerance);
    let r = f.scale_radius;
    let items = out
        .roots
        .iter()
        .zip(out.residuals)
        .map(|(w, res)| (w * r, res))
        .collect();
    Ok(ZeroSearch {
        zeros: ZeroSet::from_unsorted(items, f.reliable_radius()),
        converged: out.converged,
        iterations: out.iterations,
    })
}

/// All `degree` zeros of the truncation; errors if the iteration does not
/// converge (see [`find_zeros_with`] for partial results).
pub fn find_zeros(f: &TruncatedSteinerFunction) -> Result<ZeroSet> {
    let opts = RootOptions::default();
    let s = find_zeros_with(f, &opts)?;
    if !s.converged {
        return Err(Error::NoConvergence {
            what: "Aberth iteration".into(),
            iterations: s.iterations,
        });
    }
    Ok(s.zeros)
}

/// Zeros `−1/ℓ_j` of a box read off its sides: all of them for an explicit
/// box, the first `count` for a rule.
///
/// Coefficient-based root finding cannot resolve these for long boxes: the
/// zeros `−j^α` have condition numbers growing like `10^{3j}`.
pub fn box_zeros(spec: &BoxSpec, count: usize) -> ZeroSet {
    let n = match spec {
        BoxSpec::Explicit(s) => s.len(),
        BoxSpec::Rule { .. } => count,
    };
    let items = (1..=n)
        .map(|i| (Complex64::new(-libm::exp(-spec.log_side(i)), 0.0), 0.0))
        .collect();
    ZeroSet::from_unsorted(items, f64::INFINITY)
}

/// Estimate of `limsup ln n / ln |z_n|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceExponent {
    pub exponent: f64,
    pub stderr: f64,
    /// 1-based zero indices used.
    pub window: Window,
    /// All window zeros have modulus `≤ 1 + 1e-6`.
    pub ill_conditioned: bool,
}

pub const MIN_ZEROS: usize = 10;

/// Slope of `ln n` against `ln |z_n|`. Default window: the last four fifths.
pub fn convergence_exponent(zs: &ZeroSet, window: Option<Window>) -> Result<ConvergenceExponent> {
    let n = zs.len();
    if n < MIN_ZEROS {
        return Err(Error::InvalidArgument(format!(
            "need at least {MIN_ZEROS} zeros, got {n}"
        )));
    }
    let w = window.unwrap_or(Window::new((n / 5).max(1), n));
    if w.lo < 1 || w.hi > n || w.len() < 3 {
        return Err(Error::InvalidWindow {
            lo: w.lo,
            hi: w.hi,
            reason: format!("needs at least 3 zero indices within [1, {n}]"),
        });
    }
    let m = zs.moduli();
    let rows: Vec<Vec<f64>> = (w.lo..=w.hi).map(|i| alloc::vec![libm::log(m[i - 1]), 1.0]).collect();
    let y: Vec<f64> = (w.lo..=w.hi).map(|i| libm::log(i as f64)).collect();
    let ill_conditioned = (w.lo..=w.hi).all(|i| m[i - 1] <= 1.0 + 1e-6);
    let fit = least_squares(&rows, &y).ok_or(Error::InvalidWindow {
        lo: w.lo,
        hi: w.hi,
        reason: "zero moduli are all equal".into(),
    })?;
    Ok(ConvergenceExponent {
        exponent: fit.coef[0],
        stderr: fit.stderr[0],
        window: w,
        ill_conditioned,
    })
}

/// `ln n / ln |z_n|` for each zero with `n ≥ 2` and `|z_n| > 1`.
pub fn pointwise_exponents(zs: &ZeroSet) -> Vec<(usize, f64)> {
    zs.moduli()
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, m)| **m > 1.0)
        .map(|(i, m)| (i + 1, libm::log((i + 1) as f64) / libm::log(*m)))
        .collect()
}

/// `e^{cz} ∏ (1 − z / z_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HadamardProduct {
    pub zeros: Vec<Complex64>,
    pub c: Complex64,
}

/// Outcome of comparing a product against another evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct HadamardComparison {
    pub max_rel_deviation: f64,
    pub compared: usize,
    /// Sample points dropped for sitting on a zero.
    pub skipped: Vec<Complex64>,
}

impl HadamardProduct {
    pub fn new(zeros: Vec<Complex64>, c: Complex64) -> Self {
        HadamardProduct { zeros, c }
    }

    /// Product over a zero set with `c = 0`, the only case reconstructed.
    pub fn from_zero_set(zs: &ZeroSet) -> Self {
        HadamardProduct::new(zs.zeros.clone(), Complex64::new(0.0, 0.0))
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = ScaledProduct::new();
        for zj in &self.zeros {
            acc.mul(Complex64::new(1.0, 0.0) - z / zj);
        }
        acc.value() * (self.c * z).exp()
    }

    fn near_zero(&self, z: Complex64) -> bool {
        self.zeros
            .iter()
            .any(|zj| (z - zj).norm() <= 1e-12 * zj.norm().max(1.0))
    }

    /// Largest `|f − product| / |f|` over the points.
    pub fn compare<F>(&self, f: F, points: &[Complex64]) -> HadamardComparison
    where
        F: Fn(Complex64) -> Complex64,
    {
        let mut worst: f64 = 0.0;
        let mut compared = 0;
        let mut skipped = Vec::new();
        for &z in points {
            let fz = f(z);
            if self.near_zero(z) || fz.norm() == 0.0 {
                skipped.push(z);
                continue;
            }
            compared += 1;
            worst = worst.max((fz - self.eval(z)).norm() / fz.norm());
        }
        HadamardComparison {
            max_rel_deviation: worst,
            compared,
            skipped,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::{ln_factorial, log_kappa};
    use crate::volseq::{box_volume_sequence, bridge_volume_sequence, spiral_volume_sequence, wills, SideRule};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn small_box() -> BoxSpec {
        BoxSpec::explicit(alloc::vec![1.0, 0.5, 0.25]).unwrap()
    }

    #[test]
    fn build_small_box() {
        let v = box_volume_sequence(&small_box(), 6).unwrap();
        let f = build_function(&v, 6).unwrap();
        assert_eq!(f.degree(), 3);
        assert!(f.is_exact());
        for (a, b) in f.coefficients().iter().zip([1.0, 1.75, 0.875, 0.125]) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(f.reliable_radius(), f64::INFINITY);
    }

    #[test]
    fn build_spiral_and_constant() {
        let v = spiral_volume_sequence(200);
        let f = build_function(&v, 100).unwrap();
        for k in 1..=100 {
            assert!((f.log_coeffs()[k] - (log_kappa(k) - ln_factorial(k))).abs() < 1e-12);
        }
        assert!(!f.is_exact());
        let f0 = build_function(&v, 0).unwrap();
        assert_eq!(eval_series(&f0, c(0.3, 0.0)).value, c(1.0, 0.0));
        assert!(build_function(&v, 201).is_err());
    }

    #[test]
    fn series_values() {
        let f = build_function(&box_volume_sequence(&small_box(), 3).unwrap(), 3).unwrap();
        assert_eq!(eval_series(&f, c(0.0, 0.0)).value, c(1.0, 0.0));
        let s = eval_series(&f, c(0.5, 0.0));
        assert!((s.value.re - 2.109375).abs() < 1e-14 && s.value.im == 0.0);
        assert_eq!(s.tail_bound, 0.0);

        let v = spiral_volume_sequence(300);
        let s = eval_series(&build_function(&v, 300).unwrap(), c(1.0, 0.0));
        assert!((s.value.re - wills(&v).value).abs() <= s.tail_bound + 1e-13);
    }

    #[test]
    fn low_degree_is_flagged() {
        let v = spiral_volume_sequence(10);
        let s = eval_series(&build_function(&v, 3).unwrap(), c(5.0, 0.0));
        assert!(s.degree_too_low);
    }

    #[test]
    fn closed_forms_match_series() {
        let sp = build_function(&spiral_volume_sequence(200), 200).unwrap();
        let a = eval_series(&sp, c(0.5, 0.0)).value;
        let b = spiral_closed_form(c(0.5, 0.0)).unwrap();
        assert!((a - b).norm() <= 1e-10 * b.norm());
        let br = build_function(&bridge_volume_sequence(300), 300).unwrap();
        let a = eval_series(&br, c(1.0, 1.0)).value;
        let b = bridge_closed_form(c(1.0, 1.0)).unwrap();
        assert!((a - b).norm() <= 1e-10 * b.norm());
    }

    #[test]
    fn explicit_product() {
        let p = eval_box_product(&small_box(), c(0.5, 0.0)).unwrap();
        assert_eq!(p.value, c(2.109375, 0.0));
        assert_eq!(eval_box_product(&small_box(), c(0.0, 0.0)).unwrap().value, c(1.0, 0.0));
        assert_eq!(eval_box_product(&small_box(), c(-1.0, 0.0)).unwrap().value.norm(), 0.0);
    }

    #[test]
    fn rule_product_matches_series() {
        for rule in [
            SideRule::PowerLaw { alpha: 1.25 },
            SideRule::PowerLaw { alpha: 2.0 },
            SideRule::Exponential { rate: 1.0 },
            SideRule::LogSquared,
        ] {
            let spec = BoxSpec::rule(rule, JCut::Auto).unwrap();
            let f = build_function(&box_volume_sequence(&spec, 200).unwrap(), 200).unwrap();
            for z in [c(0.7, 0.0), c(-1.3, 0.4), c(0.0, 2.0), c(-2.0, 0.0)] {
                let s = eval_series(&f, z);
                let p = eval_box_product(&spec, z).unwrap();
                // cancellation in the series costs up to f(|z|) / |f(z)|
                let scale = eval_series(&f, c(z.norm(), 0.0)).value.re;
                assert!(
                    (s.value - p.value).norm() <= 1e-10 * p.value.norm() + 1e-13 * scale,
                    "{rule:?} {z}: {} vs {}",
                    s.value,
                    p.value
                );
            }
        }
    }

    #[test]
    fn zeros_of_small_box() {
        let f = build_function(&box_volume_sequence(&small_box(), 3).unwrap(), 3).unwrap();
        let zs = find_zeros(&f).unwrap();
        for (z, want) in zs.zeros.iter().zip([-1.0, -2.0, -4.0]) {
            assert!((z - c(want, 0.0)).norm() < 1e-8);
        }
        assert!(zs.residuals.iter().all(|r| *r <= 1e-10));
        assert!(zs.artifact.iter().all(|a| !a));
    }

    #[test]
    fn linear_function_zero() {
        let v = box_volume_sequence(&BoxSpec::explicit(alloc::vec![0.3]).unwrap(), 1).unwrap();
        let zs = find_zeros(&build_function(&v, 1).unwrap()).unwrap();
        assert!((zs.zeros[0] - c(-1.0 / 0.3, 0.0)).norm() < 1e-12);
        let v0 = spiral_volume_sequence(3);
        assert!(find_zeros(&build_function(&v0, 0).unwrap()).is_err());
    }

    #[test]
    fn spiral_zeros_stable_under_degree() {
        let v = spiral_volume_sequence(120);
        let a = find_zeros(&build_function(&v, 60).unwrap()).unwrap();
        let b = find_zeros(&build_function(&v, 120).unwrap()).unwrap();
        assert!(a.residuals.iter().all(|r| *r <= 1e-10), "{:?}", a.residuals);
        let stable: Vec<_> = a.zeros.iter().zip(&a.artifact).filter(|p| !p.1).map(|p| p.0).collect();
        assert!(stable.len() >= 3);
        for z in stable {
            let d = b.zeros.iter().map(|w| (w - z).norm()).fold(f64::INFINITY, f64::min);
            assert!(d < 1e-6, "{z}: {d}");
        }
        assert!(a.artifact.iter().any(|x| *x));
    }

    #[test]
    fn exponents() {
        let spec = BoxSpec::rule(SideRule::PowerLaw { alpha: 1.25 }, JCut::Auto).unwrap();
        let e = convergence_exponent(&box_zeros(&spec, 500), None).unwrap();
        assert!((e.exponent - 0.8).abs() < 1e-9);
        let spec = BoxSpec::rule(SideRule::Exponential { rate: 1.0 }, JCut::Auto).unwrap();
        let e = convergence_exponent(&box_zeros(&spec, 200), None).unwrap();
        assert!(e.exponent <= 0.1 && e.exponent > 0.0);
        let geo = BoxSpec::explicit((0..7).map(|i| 0.5f64.powi(i)).collect()).unwrap();
        let zs = box_zeros(&geo, 0);
        assert!(convergence_exponent(&zs, None).is_err());
        let pw = pointwise_exponents(&zs);
        assert!(pw.windows(2).all(|p| p[1].1 < p[0].1));
        let ones = box_zeros(&BoxSpec::explicit(alloc::vec![1.0; 12]).unwrap(), 0);
        assert!(convergence_exponent(&ones, None).is_err());
    }

    #[test]
    fn hadamard_small_box() {
        let spec = small_box();
        let f = build_function(&box_volume_sequence(&spec, 3).unwrap(), 3).unwrap();
        let h = HadamardProduct::from_zero_set(&find_zeros(&f).unwrap());
        let pts: Vec<_> = (0..20)
            .map(|i| Complex64::from_polar(0.1 * i as f64, 0.7 * i as f64))
            .collect();
        let cmp = h.compare(|z| eval_series(&f, z).value, &pts);
        assert!(cmp.max_rel_deviation <= 1e-10);
        assert_eq!(cmp.compared, 20);
        let cmp = h.compare(|z| eval_series(&f, z).value, &[c(-2.0, 0.0)]);
        assert_eq!(cmp.skipped.len(), 1);
        let empty = HadamardProduct::new(Vec::new(), c(0.0, 0.0));
        assert_eq!(empty.eval(c(3.0, 1.0)), c(1.0, 0.0));
    }

    #[test]
    fn hadamard_fifty_sides() {
        let sides: Vec<f64> = (1..=50).map(|j| 1.0 / (j * j) as f64).collect();
        let spec = BoxSpec::explicit(sides).unwrap();
        let f = build_function(&box_volume_sequence(&spec, 50).unwrap(), 50).unwrap();
        let h = HadamardProduct::from_zero_set(&box_zeros(&spec, 0));
        let pts: Vec<_> = (0..30)
            .map(|i| Complex64::from_polar(0.1 * i as f64, 1.3 * i as f64))
            .collect();
        let cmp = h.compare(|z| eval_series(&f, z).value, &pts);
        assert!(cmp.max_rel_deviation <= 1e-6, "{}", cmp.max_rel_deviation);
    }
}
