//! The `0F2` hypergeometric series and the closed forms built from it.

use alloc::format;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::special::Neumaier;
use crate::{Error, Result};

/// Terms at or below this fraction of the running sum count as negligible.
const NEGLIGIBLE: f64 = 1e-17;
/// Consecutive negligible terms needed to stop. The argument `πz²/4` makes
/// even and odd parts interleave, so one small term proves nothing.
const QUIET_RUN: usize = 30;
const MAX_TERMS: usize = 100_000;

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && libm::floor(x) == x
}

/// `0F2(α, β; z) = Σ z^k / ((α)_k (β)_k k!)`.
pub fn hyper0f2(alpha: f64, beta: f64, z: Complex64) -> Result<Complex64> {
    if is_nonpositive_integer(alpha) || is_nonpositive_integer(beta) {
        return Err(Error::InvalidArgument(format!(
            "0F2 parameters must not be non-positive integers (got {alpha}, {beta})"
        )));
    }
    if !(alpha.is_finite() && beta.is_finite() && z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::InvalidArgument("0F2 arguments must be finite".into()));
    }
    let mut re = Neumaier::default();
    let mut im = Neumaier::default();
    let mut term = Complex64::new(1.0, 0.0);
    re.add(1.0);
    let mut quiet = 0;
    for k in 0..MAX_TERMS {
        let kf = k as f64;
        term *= z / ((alpha + kf) * (beta + kf) * (kf + 1.0));
        re.add(term.re);
        im.add(term.im);
        let sum = Complex64::new(re.sum(), im.sum());
        if term.norm() <= NEGLIGIBLE * sum.norm() || term.norm() == 0.0 {
            quiet += 1;
            if quiet >= QUIET_RUN {
                return Ok(sum);
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::NoConvergence {
        what: "0F2 series".into(),
        iterations: MAX_TERMS,
    })
}

/// Steiner function of the Wiener spiral,
/// `0F2(½, 1; πz²/4) + 2z · 0F2(3/2, 3/2; πz²/4)`.
pub fn spiral_closed_form(z: Complex64) -> Result<Complex64> {
    let x = z * z * (PI / 4.0);
    Ok(hyper0f2(0.5, 1.0, x)? + 2.0 * z * hyper0f2(1.5, 1.5, x)?)
}

/// Steiner function of the Brownian bridge hull,
/// `0F2(½, 3/2; πz²/4) + (πz/2) · 0F2(3/2, 2; πz²/4)`.
pub fn bridge_closed_form(z: Complex64) -> Result<Complex64> {
    let x = z * z * (PI / 4.0);
    Ok(hyper0f2(0.5, 1.5, x)? + (PI / 2.0) * z * hyper0f2(1.5, 2.0, x)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pochhammer(a: f64, k: usize) -> f64 {
        (0..k).map(|i| a + i as f64).product()
    }

    fn brute(alpha: f64, beta: f64, z: Complex64, terms: usize) -> Complex64 {
        let mut re = Neumaier::default();
        let mut im = Neumaier::default();
        let mut fact = 1.0;
        for k in 0..terms {
            if k > 0 {
                fact *= k as f64;
            }
            let t = z.powu(k as u32) / (pochhammer(alpha, k) * pochhammer(beta, k) * fact);
            re.add(t.re);
            im.add(t.im);
        }
        Complex64::new(re.sum(), im.sum())
    }

    #[test]
    fn zero_argument() {
        assert_eq!(
            hyper0f2(0.5, 1.0, Complex64::new(0.0, 0.0)).unwrap(),
            Complex64::new(1.0, 0.0)
        );
        assert_eq!(
            spiral_closed_form(Complex64::new(0.0, 0.0)).unwrap(),
            Complex64::new(1.0, 0.0)
        );
        assert_eq!(
            bridge_closed_form(Complex64::new(0.0, 0.0)).unwrap(),
            Complex64::new(1.0, 0.0)
        );
    }

    #[test]
    fn small_argument_matches_pochhammer_sum() {
        let z = Complex64::new(0.1, 0.0);
        let a = hyper0f2(0.5, 1.0, z).unwrap();
        let b = brute(0.5, 1.0, z, 50);
        assert!((a - b).norm() <= 1e-12 * b.norm());
    }

    #[test]
    fn large_argument_matches_long_sum() {
        for z in [
            Complex64::new(10.0, 0.0),
            Complex64::new(-10.0, 0.0),
            Complex64::new(0.0, 10.0),
        ] {
            let a = hyper0f2(1.5, 1.5, z).unwrap();
            let b = brute(1.5, 1.5, z, 200);
            assert!((a - b).norm() <= 1e-10 * b.norm(), "{z}: {a} vs {b}");
        }
    }

    #[test]
    fn rejects_poles() {
        assert!(hyper0f2(0.0, 1.0, Complex64::new(1.0, 0.0)).is_err());
        assert!(hyper0f2(1.0, -3.0, Complex64::new(1.0, 0.0)).is_err());
        assert!(hyper0f2(-0.5, 1.0, Complex64::new(1.0, 0.0)).is_ok());
    }

    #[test]
    fn spiral_derivative_at_zero_is_mean_width() {
        // f(z) = 1 + 2z + (π/2) z² + … for the spiral
        let h = 1e-4;
        let f = |x: f64| spiral_closed_form(Complex64::new(x, 0.0)).unwrap().re;
        let d = (f(h) - f(-h)) / (2.0 * h);
        assert!((d - 2.0).abs() < 1e-7);
        let g = |x: f64| bridge_closed_form(Complex64::new(x, 0.0)).unwrap().re;
        let d = (g(h) - g(-h)) / (2.0 * h);
        assert!((d - PI / 2.0).abs() < 1e-7);
    }
}
