//! Converse-KAM criteria: necessary conditions for a rotational invariant
//! curve, evaluated on orbit samples. A violated condition at a point rules
//! out every invariant curve through that point.
//!
//! On an orbit `… x₋₁, x₀, x₁ …` the curve quantities are
//!
//! ```text
//! a(x₀) = h₂₂(x₋₁, x₀) + h₁₁(x₀, x₁)
//! b(x₀) = −h₁₂(x₋₁, x₀)        b(φ(x₀)) = −h₁₂(x₀, x₁)
//! ```
//!
//! where the orbit successor stands in for the conjugacy `φ` of a
//! hypothetical curve through the sample.
//!
//! * [`simple_criterion`]: every curve has `a > 0`.
//! * [`refined_criterion`]: with bounds `B±`, `C±` on the curve ratios,
//!   `a(x) ≥ b(φ(x))·D⁻ + b(x)/D⁺` where `D±` come from the continued
//!   fractions bounding `φ'`.
//! * [`second_variation_test`]: orbits on a curve minimise the action, so
//!   the tridiagonal Hessian of the action along any segment is positive
//!   semi-definite.

use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::profile::ProfileNorms;
use crate::sturm;
use crate::system::{OrbitSegment, TwistSystem};
use crate::{Error, Result};

/// Tolerance on margins of the pointwise criteria.
pub const MARGIN_TOL: f64 = 1e-12;

/// Tolerance on the smallest eigenvalue of the second variation.
pub const EIGEN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ABRecord {
    /// Base point `x₀` on the lift.
    pub x: f64,
    pub a: f64,
    pub b: f64,
    /// `b` at the successor, the stand-in for `b(φ(x₀))`.
    pub b_next: f64,
}

pub fn ab_along_orbit<S: TwistSystem + ?Sized>(
    system: &S,
    x_prev: f64,
    x0: f64,
    x_next: f64,
) -> Result<ABRecord> {
    let before = system.gen(x_prev, x0)?;
    let after = system.gen(x0, x_next)?;
    Ok(ABRecord {
        x: x0,
        a: before.h22 + after.h11,
        b: -before.h12,
        b_next: -after.h12,
    })
}

/// One record per interior point of a sequence of orbit angles.
pub fn records_along<S: TwistSystem + ?Sized>(system: &S, angles: &[f64]) -> Result<Vec<ABRecord>> {
    angles
        .windows(3)
        .map(|w| ab_along_orbit(system, w[0], w[1], w[2]))
        .collect()
}

/// Record centred on `(x, y)`, using one backward and one forward step.
pub fn record_at<S: TwistSystem + ?Sized>(system: &S, x: f64, y: f64) -> Result<ABRecord> {
    let (x_prev, _) = system.retreat(x, y)?;
    let (x_next, _) = system.step(x, y)?;
    ab_along_orbit(system, x_prev, x, x_next)
}

/// Multipliers applied to sampled extrema: `B` is inflated and `C`
/// deflated, since sample maxima and minima under-cover the true ones.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SafetyFactors {
    pub b: f64,
    pub c: f64,
}

impl Default for SafetyFactors {
    fn default() -> Self {
        SafetyFactors { b: 1.01, c: 0.99 }
    }
}

impl SafetyFactors {
    /// Exact reproduction of closed-form constants.
    pub fn none() -> Self {
        SafetyFactors { b: 1.0, c: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BcEstimate {
    pub b_plus: f64,
    pub b_minus: f64,
    pub c_plus: f64,
    pub c_minus: f64,
}

/// `B⁺ ≥ max a/b(φ)`, `B⁻ ≥ max a/b`, `C⁺ ≤ min b/b(φ)`,
/// `C⁻ ≤ min b(φ)/b` over the sample.
pub fn estimate_bc(records: &[ABRecord], factors: SafetyFactors) -> Result<BcEstimate> {
    if records.is_empty() {
        return Err(Error::EmptyInput);
    }
    let max = |f: &dyn Fn(&ABRecord) -> f64| records.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
    let min = |f: &dyn Fn(&ABRecord) -> f64| records.iter().map(f).fold(f64::INFINITY, f64::min);
    let inflate = |x: f64| if x > 0.0 { x * factors.b } else { x / factors.b };
    Ok(BcEstimate {
        b_plus: inflate(max(&|r| r.a / r.b_next)),
        b_minus: inflate(max(&|r| r.a / r.b)),
        c_plus: min(&|r| r.b / r.b_next) * factors.c,
        c_minus: min(&|r| r.b_next / r.b) * factors.c,
    })
}

/// Bounds on the derivative of the conjugacy along an invariant curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DBounds {
    pub b_plus: f64,
    pub b_minus: f64,
    pub c_plus: f64,
    pub c_minus: f64,
    pub discriminant_plus: f64,
    pub discriminant_minus: f64,
    /// Largest root of `d² − B⁺d + C⁺`.
    pub d_plus: Option<f64>,
    /// Inverse of the largest root of `d² − B⁻d + C⁻`.
    pub d_minus: Option<f64>,
}

impl DBounds {
    pub fn is_defined(&self) -> bool {
        self.d_plus.is_some() && self.d_minus.is_some()
    }
}

/// Limits of the continued fractions `B − C/(B − C/(B − …))`. Undefined
/// (the refined criterion is inapplicable) unless `B, C > 0` and
/// `B² − 4C > 0`.
pub fn d_bounds(b_plus: f64, b_minus: f64, c_plus: f64, c_minus: f64) -> DBounds {
    let discriminant_plus = b_plus * b_plus - 4.0 * c_plus;
    let discriminant_minus = b_minus * b_minus - 4.0 * c_minus;
    let ok = |b: f64, c: f64, disc: f64| b > 0.0 && c > 0.0 && disc > 0.0;
    let d_plus = ok(b_plus, c_plus, discriminant_plus)
        .then(|| 0.5 * (b_plus + discriminant_plus.sqrt()));
    // (B − √disc)/(2C) rewritten without the cancellation
    let d_minus = ok(b_minus, c_minus, discriminant_minus)
        .then(|| 2.0 / (b_minus + discriminant_minus.sqrt()));
    DBounds {
        b_plus,
        b_minus,
        c_plus,
        c_minus,
        discriminant_plus,
        discriminant_minus,
        d_plus,
        d_minus,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Criterion {
    Simple,
    Refined,
    SecondVariation,
}

impl Criterion {
    pub fn name(&self) -> &'static str {
        match self {
            Criterion::Simple => "simple",
            Criterion::Refined => "refined",
            Criterion::SecondVariation => "second_variation",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriterionReport {
    pub criterion: Criterion,
    /// True when the sample rules out invariant curves through the witness.
    pub conclusive: bool,
    /// Angle where the margin is attained.
    pub witness: f64,
    /// Signed slack; negative means the necessary condition is violated.
    /// For the second variation it is the smallest eigenvalue.
    pub margin: f64,
    pub constants: Option<DBounds>,
}

/// Conclusive iff `min a < −tol`.
pub fn simple_criterion(records: &[ABRecord], tol: f64) -> Result<CriterionReport> {
    let worst = records
        .iter()
        .min_by(|p, q| p.a.total_cmp(&q.a))
        .ok_or(Error::EmptyInput)?;
    Ok(CriterionReport {
        criterion: Criterion::Simple,
        conclusive: worst.a < -tol,
        witness: worst.x,
        margin: worst.a,
        constants: None,
    })
}

/// Conclusive iff some record has `a < b(φ)·D⁻ + b/D⁺ − tol`.
pub fn refined_criterion(records: &[ABRecord], bounds: &DBounds, tol: f64) -> Result<CriterionReport> {
    let (d_plus, d_minus) = match (bounds.d_plus, bounds.d_minus) {
        (Some(p), Some(m)) => (p, m),
        _ => return Err(Error::UndefinedBounds),
    };
    let slack = |r: &ABRecord| r.a - r.b_next * d_minus - r.b / d_plus;
    let worst = records
        .iter()
        .min_by(|p, q| slack(p).total_cmp(&slack(q)))
        .ok_or(Error::EmptyInput)?;
    let margin = slack(worst);
    Ok(CriterionReport {
        criterion: Criterion::Refined,
        conclusive: margin < -tol,
        witness: worst.x,
        margin,
        constants: Some(*bounds),
    })
}

/// Smallest eigenvalue of the second variation of the action
/// `Σ h(x_n, x_{n+1})` along `angles`, with both endpoints fixed.
///
/// The witness is the interior point carrying the largest component of the
/// corresponding eigenvector.
pub fn second_variation<S: TwistSystem + ?Sized>(
    system: &S,
    angles: &[f64],
    tol: f64,
) -> Result<CriterionReport> {
    if angles.len() < 3 {
        return Err(Error::DegenerateSegment(angles.len()));
    }
    let hess: Vec<_> = angles
        .windows(2)
        .map(|w| system.gen(w[0], w[1]))
        .collect::<Result<_>>()?;
    let diag: Vec<f64> = hess.windows(2).map(|p| p[0].h22 + p[1].h11).collect();
    // couplings between consecutive interior points
    let off: Vec<f64> = hess[1..hess.len() - 1].iter().map(|h| h.h12).collect();
    let lambda = sturm::min_eigenvalue(&diag, &off);
    let vec = sturm::eigenvector(&diag, &off, lambda);
    let peak = vec
        .iter()
        .enumerate()
        .max_by(|p, q| p.1.abs().total_cmp(&q.1.abs()))
        .map(|(i, _)| i)
        .unwrap_or(0);
    Ok(CriterionReport {
        criterion: Criterion::SecondVariation,
        conclusive: lambda < -tol,
        witness: angles[peak + 1],
        margin: lambda,
        constants: None,
    })
}

pub fn second_variation_test<S: TwistSystem + ?Sized>(
    system: &S,
    segment: &OrbitSegment,
) -> Result<CriterionReport> {
    second_variation(system, &segment.angles(), EIGEN_TOL)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn around(centre: f64, half_width: f64) -> Self {
        Interval { lo: centre - half_width, hi: centre + half_width }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn centre(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Guaranteed ranges for `a(t)`, `b(t)` and `b(φ(t))` at a point `(t, e)`
/// of a high-energy Tennis orbit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbEnclosure {
    pub a: Interval,
    pub b: Interval,
    pub b_next: Interval,
}

/// Remainder constants `ρ·√(2e)` of the high-energy expansions
/// `a = √(2e)(g + 2f̈(t) + R^A)`, `b = √(2e)(g/2 + R^B)` and
/// `b(φ) = √(2e)(g/2 + R^B̃)`.
fn remainder_scales(norms: &ProfileNorms, g: f64) -> (f64, f64, f64) {
    let (s1, s2) = (norms.sup_df, norms.sup_ddf);
    (
        16.0 * (g + 3.0 * s2) * s1,
        (7.0 * g + 2.0 * s2) * s1,
        (5.0 * g + 2.0 * s2) * s1,
    )
}

pub fn tennis_ab_asymptotic(norms: &ProfileNorms, g: f64, e: f64, ddf_at_t: f64) -> AbEnclosure {
    let s = (2.0 * e).sqrt();
    let (ra, rb, rbt) = remainder_scales(norms, g);
    AbEnclosure {
        a: Interval::around(s * (g + 2.0 * ddf_at_t), ra),
        b: Interval::around(0.5 * s * g, rb),
        b_next: Interval::around(0.5 * s * g, rbt),
    }
}

/// Summands of `√(2e*)` for the pointwise (`a > 0`) threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimpleThresholdTerms {
    /// `√(2e_*) = v_*`
    pub base: f64,
    /// `‖ḟ‖·16(g + 3‖f̈‖)/(−(g + 2m))`
    pub remainder: f64,
    /// `2‖ḟ‖ + g + (g/2)·max{(4/g)‖ḟ‖, T*}`
    pub buffer: f64,
}

impl SimpleThresholdTerms {
    pub fn sqrt_2e(&self) -> f64 {
        self.base + self.remainder + self.buffer
    }
}

pub const SURROGATE_NOTE: &str = "T* replaced by (4/g)*sup|f'|, the flight-time deviation bound of the \
unextended map; refined threshold is the smallest energy at which the explicit remainder \
enclosures make the refined inequality strict, plus the curve-oscillation buffer";

/// Energies above which no invariant curve of the Tennis map can reach.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdReport {
    /// From `a > 0`; requires `m < −g/2`.
    pub e_star_simple: Option<f64>,
    pub simple_terms: Option<SimpleThresholdTerms>,
    /// From the refined criterion; requires the diffusion condition on `m, M`.
    pub e_star_refined: Option<f64>,
    /// Energy above which no curve crosses the vertical line through the
    /// minimiser of `f̈` (refined criterion).
    pub e_line_refined: Option<f64>,
    pub norms: ProfileNorms,
    pub g: f64,
    pub v_star: f64,
    pub surrogate_note: &'static str,
}

/// `2‖ḟ‖ + g + (g/2)·max{(4/g)‖ḟ‖, T*}` with `T* := (4/g)‖ḟ‖`.
pub fn curve_buffer(norms: &ProfileNorms, g: f64) -> f64 {
    let t_star = 4.0 / g * norms.sup_df;
    2.0 * norms.sup_df + g + 0.5 * g * t_star.max(4.0 / g * norms.sup_df)
}

pub fn tennis_thresholds(norms: &ProfileNorms, g: f64, v_star: f64) -> ThresholdReport {
    let buffer = curve_buffer(norms, g);
    let simple_terms = (g + 2.0 * norms.m < 0.0).then(|| SimpleThresholdTerms {
        base: v_star,
        remainder: norms.sup_df * 16.0 * (g + 3.0 * norms.sup_ddf) / (-(g + 2.0 * norms.m)),
        buffer,
    });
    let e_star_simple = simple_terms.map(|t| 0.5 * t.sqrt_2e().powi(2));

    let line = if norms.check_main_condition(g).holds {
        refined_line(norms, g, v_star, buffer)
    } else {
        None
    };
    ThresholdReport {
        e_star_simple,
        simple_terms,
        e_star_refined: line.map(|s| 0.5 * (s + buffer).powi(2)),
        e_line_refined: line.map(|s| 0.5 * s * s),
        norms: *norms,
        g,
        v_star,
        surrogate_note: SURROGATE_NOTE,
    }
}

/// Worst-case refined inequality at `(t₀, e₀)` with `f̈(t₀) = m` and
/// `√(2e₀) = s`, for any curve through that point. Positive means the
/// inequality is strictly violated, so no curve passes.
fn refined_gap(norms: &ProfileNorms, g: f64, v_star: f64, buffer: f64, s: f64) -> f64 {
    let s_low = s - buffer;
    if !(s_low > v_star) {
        return f64::NEG_INFINITY;
    }
    let (ra, rb, rbt) = remainder_scales(norms, g);
    let half = 0.5 * g;
    // relative remainders on the whole curve, bounded at its lowest energy
    let (pa, pb, pbt) = (ra / s_low, rb / s_low, rbt / s_low);
    if !(half - pb > 0.0 && half - pbt > 0.0) {
        return f64::NEG_INFINITY;
    }
    let top = g + 2.0 * norms.big_m + pa;
    let bounds = d_bounds(
        top / (half - pbt),
        top / (half - pb),
        (half - pb) / (half + pbt),
        (half - pbt) / (half + pb),
    );
    let (Some(d_plus), Some(d_minus)) = (bounds.d_plus, bounds.d_minus) else {
        return f64::NEG_INFINITY;
    };
    let (qa, qb, qbt) = (ra / s, rb / s, rbt / s);
    let a_max = g + 2.0 * norms.m + qa;
    let rhs_min = (half - qbt) * d_minus + (half - qb) / d_plus;
    rhs_min - a_max
}

/// Smallest `√(2e₀)` where [`refined_gap`] turns positive.
fn refined_line(norms: &ProfileNorms, g: f64, v_star: f64, buffer: f64) -> Option<f64> {
    let gap = |s: f64| refined_gap(norms, g, v_star, buffer, s);
    let mut lo = v_star + buffer;
    if gap(lo) > 0.0 {
        return Some(lo);
    }
    let mut hi = 2.0 * lo.max(1.0);
    while !(gap(hi) > 0.0) {
        lo = hi;
        hi *= 2.0;
        if hi > 1e15 {
            return None;
        }
    }
    while hi - lo > 1e-13 * hi {
        let mid = 0.5 * (lo + hi);
        if gap(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}
