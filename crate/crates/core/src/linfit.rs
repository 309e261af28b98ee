//! Small dense least squares (a handful of columns, up to a few thousand rows).

use alloc::vec;
use alloc::vec::Vec;

#[derive(Debug, Clone)]
pub(crate) struct LinearFit {
    pub coef: Vec<f64>,
    /// Standard errors of the coefficients from the residual variance.
    pub stderr: Vec<f64>,
    /// Root mean square of the residuals.
    pub rms: f64,
}

/// Ordinary least squares `min ‖A c − y‖` via Householder QR.
///
/// `rows` yields one design row per observation. Columns are scaled to unit
/// norm before factorization, so bases mixing `n ln n` and `1` stay well
/// conditioned. Returns `None` when there are fewer rows than columns or the
/// design is rank deficient.
pub(crate) fn least_squares(rows: &[Vec<f64>], y: &[f64]) -> Option<LinearFit> {
    let m = rows.len();
    let p = rows.first()?.len();
    if m < p || y.len() != m || p == 0 {
        return None;
    }
    // column-major copy
    let mut a: Vec<Vec<f64>> = (0..p).map(|j| rows.iter().map(|r| r[j]).collect()).collect();
    let mut scale = vec![0.0; p];
    for (j, col) in a.iter_mut().enumerate() {
        let norm = libm::sqrt(col.iter().map(|v| v * v).sum::<f64>());
        if norm == 0.0 {
            return None;
        }
        scale[j] = norm;
        col.iter_mut().for_each(|v| *v /= norm);
    }
    let mut b = y.to_vec();
    let mut r = vec![vec![0.0; p]; p];

    for k in 0..p {
        let norm = libm::sqrt(a[k][k..].iter().map(|v| v * v).sum::<f64>());
        if norm < 1e-13 {
            return None;
        }
        let alpha = if a[k][k] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = a[k][k..].to_vec();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 > 0.0 {
            for col in a.iter_mut().skip(k) {
                let dot: f64 = v.iter().zip(&col[k..]).map(|(x, c)| x * c).sum();
                let f = 2.0 * dot / vnorm2;
                col[k..].iter_mut().zip(&v).for_each(|(c, x)| *c -= f * x);
            }
            let dot: f64 = v.iter().zip(&b[k..]).map(|(x, c)| x * c).sum();
            let f = 2.0 * dot / vnorm2;
            b[k..].iter_mut().zip(&v).for_each(|(c, x)| *c -= f * x);
        }
        for (j, row) in r[k].iter_mut().enumerate().skip(k) {
            *row = a[j][k];
        }
    }

    // back substitution R c = Qᵀy
    let mut c = vec![0.0; p];
    for i in (0..p).rev() {
        let s: f64 = (i + 1..p).map(|j| r[i][j] * c[j]).sum();
        c[i] = (b[i] - s) / r[i][i];
    }

    let rss: f64 = b[p..].iter().map(|v| v * v).sum();
    let rms = libm::sqrt(rss / m as f64);
    let dof = m - p;
    let sigma2 = if dof > 0 { rss / dof as f64 } else { 0.0 };

    // diag((RᵀR)^-1) = row norms² of R^-1
    let mut rinv = vec![vec![0.0; p]; p];
    for i in 0..p {
        rinv[i][i] = 1.0 / r[i][i];
        for j in i + 1..p {
            let s: f64 = (i..j).map(|k| rinv[i][k] * r[k][j]).sum();
            rinv[i][j] = -s / r[j][j];
        }
    }
    let stderr = (0..p)
        .map(|i| libm::sqrt(sigma2 * rinv[i].iter().map(|v| v * v).sum::<f64>()) / scale[i])
        .collect();
    let coef = c.iter().zip(&scale).map(|(c, s)| c / s).collect();
    Some(LinearFit { coef, stderr, rms })
}
