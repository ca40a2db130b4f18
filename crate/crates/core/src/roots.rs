//! Scalar root bracketing and one-dimensional extremum refinement.

#[cfg(not(feature = "std"))]
use num_traits::Float;

/// Safeguarded Newton iteration on a bracket `[lo, hi]` where `f` is
/// positive at the `lo` end and non-positive at the `hi` end (`lo` may be
/// larger than `hi`).
///
/// `fdf` returns the value and the derivative. Newton steps that leave the
/// bracket or fail to halve the residual fall back to bisection. Stops once
/// `|f| <= tol` or the bracket has collapsed to a few ulps.
pub fn newton_bisect<F>(mut lo: f64, mut hi: f64, tol: f64, max_iter: usize, mut fdf: F) -> f64
where
    F: FnMut(f64) -> (f64, f64),
{
    let mut x = 0.5 * (lo + hi);
    let mut last_abs = f64::INFINITY;
    for _ in 0..max_iter {
        let (fx, dfx) = fdf(x);
        if fx.abs() <= tol {
            return x;
        }
        if fx > 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        if (hi - lo).abs() <= 4.0 * f64::EPSILON * x.abs().max(1.0) {
            return x;
        }
        let newton = x - fx / dfx;
        let inside = dfx != 0.0 && newton > lo.min(hi) && newton < lo.max(hi);
        x = if inside && fx.abs() < 0.5 * last_abs {
            newton
        } else {
            0.5 * (lo + hi)
        };
        last_abs = fx.abs();
    }
    x
}

/// Plain bisection for a sign change of `f` on `[lo, hi]`.
pub fn bisect<F>(mut lo: f64, mut hi: f64, tol: f64, mut f: F) -> f64
where
    F: FnMut(f64) -> f64,
{
    let lo_positive = f(lo) > 0.0;
    while (hi - lo).abs() > tol {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if (f(mid) > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Golden-section search for a minimum of a unimodal `f` on `[a, b]`.
/// Returns `(argmin, min)`.
pub fn golden_min<F>(mut a: f64, mut b: f64, tol: f64, mut f: F) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    let inv_phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    let fx = f(x);
    // the midpoint can be marginally worse than the interior probes
    [(x, fx), (c, fc), (d, fd)]
        .into_iter()
        .fold((x, fx), |best, p| if p.1 < best.1 { p } else { best })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn newton_bisect_finds_sqrt2() {
        let r = newton_bisect(1.0, 2.0, 1e-15, 100, |x| (2.0 - x * x, -2.0 * x));
        assert!((r - 2.0_f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn newton_bisect_survives_flat_derivative() {
        // derivative vanishes at the midpoint; must fall back to bisection
        let r = newton_bisect(-1.0, 2.0, 1e-13, 200, |x| (-(x * x * x) + 1.0, -3.0 * x * x));
        assert!((r - 1.0).abs() < 1e-10);
    }

    #[test]
    fn bisect_cosine_root() {
        let r = bisect(0.0, 3.0, 1e-14, |x: f64| x.cos());
        assert!((r - core::f64::consts::FRAC_PI_2).abs() < 1e-13);
    }

    #[test]
    fn golden_quadratic() {
        let (x, fx) = golden_min(-1.0, 3.0, 1e-10, |x| (x - 0.3) * (x - 0.3) + 2.0);
        // a flat minimum pins the argument only to about sqrt(eps)
        assert!((x - 0.3).abs() < 1e-7);
        assert!((fx - 2.0).abs() < 1e-15);
    }
}
