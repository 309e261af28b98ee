//! Simultaneous root finding on balanced log-coefficients.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

/// Value and derivative data of `p(w) = Σ b_k w^k` at one point, all divided
/// by the largest term magnitude `e^M`.
pub(crate) struct Scaled {
    /// `p(w) / e^M`.
    pub value: Complex64,
    /// `w p'(w) / e^M`.
    pub w_deriv: Complex64,
    /// `Σ |b_k| |w|^k / e^M`.
    pub abs_sum: f64,
    pub log_scale: f64,
}

/// Evaluates with one global shift so no term overflows.
pub(crate) fn eval_scaled(log_b: &[f64], w: Complex64) -> Scaled {
    let r = w.norm();
    if r == 0.0 {
        let v = if log_b[0].is_finite() { 1.0 } else { 0.0 };
        return Scaled {
            value: Complex64::new(v, 0.0),
            w_deriv: Complex64::new(0.0, 0.0),
            abs_sum: v,
            log_scale: log_b[0],
        };
    }
    let lr = libm::log(r);
    let u = w / r;
    let m = log_b
        .iter()
        .enumerate()
        .map(|(k, &l)| l + k as f64 * lr)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut s0 = Complex64::new(0.0, 0.0);
    let mut s1 = Complex64::new(0.0, 0.0);
    let mut abs_sum = 0.0;
    for (k, &l) in log_b.iter().enumerate().rev() {
        let a = libm::exp(l + k as f64 * lr - m);
        s0 = s0 * u + a;
        s1 = s1 * u + k as f64 * a;
        abs_sum += a;
    }
    Scaled {
        value: s0,
        w_deriv: s1,
        abs_sum,
        log_scale: m,
    }
}

/// Newton correction `p / p'` at `w`.
fn newton(log_b: &[f64], w: Complex64) -> (Complex64, f64) {
    let s = eval_scaled(log_b, w);
    let resid = s.value.norm() / s.abs_sum;
    if s.w_deriv.norm() == 0.0 {
        return (Complex64::new(0.0, 0.0), resid);
    }
    (w * s.value / s.w_deriv, resid)
}

/// Initial radii from the upper convex hull of `(k, ln |b_k|)`.
fn initial_guesses(log_b: &[f64]) -> Vec<Complex64> {
    let n = log_b.len() - 1;
    let pts: Vec<usize> = (0..=n).filter(|&k| log_b[k].is_finite()).collect();
    let mut hull: Vec<usize> = Vec::new();
    for &k in &pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // drop b when it lies on or below the chord a→k
            let cross = (b - a) as f64 * (log_b[k] - log_b[a]) - (k - a) as f64 * (log_b[b] - log_b[a]);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(k);
    }
    let mut out = Vec::with_capacity(n);
    let sigma = 0.7;
    for pair in hull.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let count = b - a;
        let radius = libm::exp((log_b[a] - log_b[b]) / count as f64);
        for j in 0..count {
            let theta = 2.0 * PI * j as f64 / count as f64 + 2.0 * PI * a as f64 / n as f64 + sigma;
            out.push(Complex64::from_polar(radius, theta));
        }
    }
    out
}

pub(crate) struct AberthOutcome {
    pub roots: Vec<Complex64>,
    pub residuals: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Roots of `Σ b_k w^k` given `ln b_k` (all finite, `b_0, b_N > 0`).
pub(crate) fn aberth(log_b: &[f64], max_iter: usize, tol: f64) -> AberthOutcome {
    let n = log_b.len() - 1;
    let mut z = initial_guesses(log_b);
    let mut done = vec![false; n];
    let mut iterations = 0;
    while iterations < max_iter && !done.iter().all(|d| *d) {
        iterations += 1;
        for i in 0..n {
            if done[i] {
                continue;
            }
            let (ratio, resid) = newton(log_b, z[i]);
            if resid <= n as f64 * f64::EPSILON {
                done[i] = true;
            }
            let mut rep = Complex64::new(0.0, 0.0);
            for (j, zj) in z.iter().enumerate() {
                if j != i {
                    rep += (z[i] - zj).inv();
                }
            }
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * rep);
            if step.re.is_finite() && step.im.is_finite() {
                z[i] -= step;
            }
            if step.norm() <= tol * z[i].norm() || !step.norm().is_finite() {
                done[i] = true;
            }
        }
    }
    let converged = done.iter().all(|d| *d);
    let mut residuals = Vec::with_capacity(n);
    for zi in z.iter_mut() {
        let (_, mut best) = newton(log_b, *zi);
        for _ in 0..3 {
            let (step, _) = newton(log_b, *zi);
            let cand = *zi - step;
            let (_, r) = newton(log_b, cand);
            if r < best {
                *zi = cand;
                best = r;
            } else {
                break;
            }
        }
        residuals.push(best);
    }
    AberthOutcome {
        roots: z,
        residuals,
        iterations,
        converged,
    }
}
