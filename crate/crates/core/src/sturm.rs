//! Symmetric tridiagonal eigenvalues by Sturm-sequence bisection.

use alloc::vec;
use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;

/// Number of eigenvalues strictly below `lambda` of the symmetric
/// tridiagonal matrix with diagonal `diag` and off-diagonal `off`
/// (`off.len() == diag.len() − 1`), counted as negative LDLᵀ pivots.
pub fn sturm_count(diag: &[f64], off: &[f64], lambda: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for (i, &d) in diag.iter().enumerate() {
        let coupling = if i == 0 { 0.0 } else { off[i - 1] * off[i - 1] };
        let pivot = if q == 0.0 { f64::EPSILON * (coupling.abs() + 1.0) } else { q };
        q = d - lambda - coupling / pivot;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Gershgorin interval containing the whole spectrum.
pub fn gershgorin(diag: &[f64], off: &[f64]) -> (f64, f64) {
    let n = diag.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let left = if i > 0 { off[i - 1].abs() } else { 0.0 };
        let right = if i + 1 < n { off[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - left - right);
        hi = hi.max(diag[i] + left + right);
    }
    (lo, hi)
}

/// `index`-th smallest eigenvalue (0-based), bisected to machine precision.
pub fn eigenvalue(diag: &[f64], off: &[f64], index: usize) -> f64 {
    let (mut lo, mut hi) = gershgorin(diag, off);
    let pad = 1e-12 * (lo.abs() + hi.abs() + 1.0);
    lo -= pad;
    hi += pad;
    for _ in 0..256 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(diag, off, mid) > index {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

pub fn min_eigenvalue(diag: &[f64], off: &[f64]) -> f64 {
    eigenvalue(diag, off, 0)
}

/// Unit eigenvector for an eigenvalue estimate `lambda` by inverse
/// iteration with a shifted tridiagonal solve.
pub fn eigenvector(diag: &[f64], off: &[f64], lambda: f64) -> Vec<f64> {
    let n = diag.len();
    let scale = diag.iter().chain(off).fold(0.0_f64, |m, x| m.max(x.abs())).max(1.0);
    let shift = lambda - 1e-10 * scale;
    let mut x = vec![1.0; n];
    for _ in 0..4 {
        x = solve_shifted(diag, off, shift, &x);
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            break;
        }
        x.iter_mut().for_each(|v| *v /= norm);
    }
    x
}

/// Thomas algorithm for `(T − shift·I) y = rhs`.
fn solve_shifted(diag: &[f64], off: &[f64], shift: f64, rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let guard = |p: f64| if p.abs() < 1e-300 { 1e-300 } else { p };
    let mut pivot = guard(diag[0] - shift);
    if n > 1 {
        c[0] = off[0] / pivot;
    }
    d[0] = rhs[0] / pivot;
    for i in 1..n {
        pivot = guard(diag[i] - shift - off[i - 1] * c[i - 1]);
        if i + 1 < n {
            c[i] = off[i] / pivot;
        }
        d[i] = (rhs[i] - off[i - 1] * d[i - 1]) / pivot;
    }
    let mut y = vec![0.0; n];
    y[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        y[i] = d[i] - c[i] * y[i + 1];
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn counts_on_2x2() {
        // [[1, −1], [−1, 3]]: eigenvalues 2 ∓ √2
        let (d, e) = ([1.0, 3.0], [-1.0]);
        assert_eq!(sturm_count(&d, &e, 0.0), 0);
        assert_eq!(sturm_count(&d, &e, 1.0), 1);
        assert_eq!(sturm_count(&d, &e, 4.0), 2);
        assert!((min_eigenvalue(&d, &e) - (2.0 - 2.0_f64.sqrt())).abs() < 1e-14);
    }

    #[test]
    fn toeplitz_spectrum() {
        // diagonal 3, off-diagonal −1.5: eigenvalues 3 − 3cos(jπ/(n+1))
        let n = 7;
        let d = vec![3.0; n];
        let e = vec![-1.5; n - 1];
        for j in 0..n {
            let exact = 3.0 - 3.0 * ((j + 1) as f64 * PI / (n + 1) as f64).cos();
            assert!((eigenvalue(&d, &e, j) - exact).abs() < 1e-13);
        }
    }

    #[test]
    fn eigenvector_residual() {
        let d = [2.0, -1.0, 0.5, 4.0];
        let e = [0.3, -0.7, 1.1];
        let lam = min_eigenvalue(&d, &e);
        let x = eigenvector(&d, &e, lam);
        for i in 0..4 {
            let mut r = d[i] * x[i] - lam * x[i];
            if i > 0 {
                r += e[i - 1] * x[i - 1];
            }
            if i < 3 {
                r += e[i] * x[i + 1];
            }
            assert!(r.abs() < 1e-8);
        }
    }
}
