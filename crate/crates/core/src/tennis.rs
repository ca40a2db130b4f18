//! The Tennis map: a ball falling under gravity `g` onto a racket whose
//! height is the 1-periodic function `f`.
//!
//! A state `(t, w)` is an impact time and the absolute velocity right after
//! the impact; `v = w − ḟ(t)` is the velocity relative to the racket and
//! `e = v²/2` the matching energy. The next impact time `t̄` is the smallest
//! root `t̄ > t` of
//!
//! ```text
//! F_t(t̄) = f(t) − f(t̄) + w (t̄ − t) − (g/2)(t̄ − t)²
//! ```
//!
//! and the elastic bounce gives `v̄ = v − 2 f[t, t̄] + ḟ(t̄) + ḟ(t)`, with
//! `f[t, t̄]` the divided difference of `f`.
//!
//! Internally every formula is written in terms of the flight time
//! `τ = t̄ − t` so that large lifted times do not cost precision.

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::profile::{ProfileNorms, RacketProfile};
use crate::roots::{bisect, newton_bisect};
use crate::system::{Advance, Coord, GenFunEval, LiftState, OrbitSegment, TwistSystem};
use crate::{Error, Result};

/// Below this separation divided differences switch to a Taylor expansion.
pub const TAYLOR_WINDOW: f64 = 1e-6;

/// Grid used for the racket norms stored in [`TennisParams`].
pub const NORMS_GRID: usize = 1024;

/// Number of interior points checked to certify the smallest-root rule.
const INTERIOR_CHECKS: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct TennisParams {
    pub profile: RacketProfile,
    pub g: f64,
    /// Velocity floor of the region where the map is a twist embedding.
    pub v_star: f64,
    /// Relative tolerance on the bounce-time residual: a root is accepted
    /// when `|F_t| ≤ root_tol·(1 + w·τ)`.
    pub root_tol: f64,
    pub march_step: f64,
    norms: ProfileNorms,
}

/// `f[t, t̄]` and its two partial derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DividedDifference {
    pub value: f64,
    pub d_t: f64,
    pub d_tbar: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BounceTime {
    pub tbar: f64,
    /// Flight time `t̄ − t`.
    pub tau: f64,
    /// `|F_t(t̄)|`.
    pub residual: f64,
    f_start: f64,
    df_start: f64,
    f_end: f64,
    df_end: f64,
}

/// One step of the map in `(t, v)` or `(t, e)` coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step {
    pub t: f64,
    pub value: f64,
    pub residual: f64,
}

pub fn divided_difference(profile: &RacketProfile, t: f64, tbar: f64) -> DividedDifference {
    let a = profile.eval_derivs(t);
    let tau = tbar - t;
    if tau.abs() < TAYLOR_WINDOW {
        return taylor_dd(a.df, a.ddf, a.dddf, tau);
    }
    let b = profile.eval_derivs(tbar);
    dd_from_values(a.f, a.df, b.f, b.df, tau)
}

#[inline]
fn dd_from_values(f0: f64, df0: f64, f1: f64, df1: f64, tau: f64) -> DividedDifference {
    let value = (f1 - f0) / tau;
    DividedDifference {
        value,
        d_t: (value - df0) / tau,
        d_tbar: (df1 - value) / tau,
    }
}

/// Expansion about `t`: `f[t, t+τ] = ḟ + f̈τ/2 + f⃛τ²/6`.
#[inline]
fn taylor_dd(df: f64, ddf: f64, dddf: f64, tau: f64) -> DividedDifference {
    DividedDifference {
        value: df + 0.5 * ddf * tau + dddf * tau * tau / 6.0,
        d_t: 0.5 * ddf + dddf * tau / 6.0,
        d_tbar: 0.5 * ddf + dddf * tau / 3.0,
    }
}

impl TennisParams {
    /// Parameters with the default domain floor `v_* = 4.5‖ḟ‖ + 0.5`,
    /// marching step `0.2·v_*/g` and root tolerance `1e−12`.
    pub fn new(profile: RacketProfile, g: f64) -> Result<Self> {
        if !(g > 0.0 && g.is_finite()) {
            return Err(Error::InvalidParameter("g must be positive"));
        }
        let norms = profile.norms(NORMS_GRID);
        let v_star = 4.5 * norms.sup_df + 0.5;
        Ok(TennisParams {
            profile,
            g,
            v_star,
            root_tol: 1e-12,
            march_step: 0.1 * (2.0 / g) * v_star,
            norms,
        })
    }

    /// Overrides `v_*`; it must exceed `4‖ḟ‖`. The marching step is reset
    /// to its default for the new floor.
    pub fn with_v_star(mut self, v_star: f64) -> Result<Self> {
        if !(v_star > 4.0 * self.norms.sup_df) {
            return Err(Error::InvalidParameter("v_star must exceed 4·sup|f'|"));
        }
        self.v_star = v_star;
        self.march_step = 0.1 * (2.0 / self.g) * v_star;
        Ok(self)
    }

    pub fn with_root_tol(mut self, tol: f64) -> Result<Self> {
        if !(tol > 0.0) {
            return Err(Error::InvalidParameter("root_tol must be positive"));
        }
        self.root_tol = tol;
        Ok(self)
    }

    pub fn with_march_step(mut self, step: f64) -> Result<Self> {
        if !(step > 0.0) {
            return Err(Error::InvalidParameter("march_step must be positive"));
        }
        self.march_step = step;
        Ok(self)
    }

    pub fn norms(&self) -> &ProfileNorms {
        &self.norms
    }

    /// `e_* = v_*²/2`.
    pub fn e_star(&self) -> f64 {
        0.5 * self.v_star * self.v_star
    }

    /// `‖ḟ‖` padded by the refinement tolerance, for use in bounds.
    fn df_bound(&self) -> f64 {
        self.norms.sup_df * (1.0 + 1e-9) + 1e-14
    }

    /// Marching increment, never coarser than an eighth of the shortest
    /// racket wavelength.
    fn effective_march(&self) -> f64 {
        if self.profile.is_flat() {
            self.march_step
        } else {
            self.march_step.min(0.125 / self.profile.max_k() as f64)
        }
    }

    /// Smallest flight time `τ > 0` with `F_t(t + τ) = 0` for launch
    /// velocity `w > ḟ(t)`.
    pub fn solve_bounce_time(&self, t: f64, w: f64) -> Result<BounceTime> {
        let (f0, df0) = self.profile.value_and_velocity(t);
        self.solve_from(t, w, f0, df0)
    }

    fn solve_from(&self, t: f64, w: f64, f0: f64, df0: f64) -> Result<BounceTime> {
        if !(w > df0) {
            return Err(Error::NotAboveRacket { t, v: w - df0 });
        }
        let g = self.g;
        let profile = &self.profile;
        let gap = |tau: f64| {
            let (f1, df1) = profile.value_and_velocity(t + tau);
            (f0 - f1 + tau * (w - 0.5 * g * tau), w - g * tau - df1, f1, df1)
        };
        let bound = self.df_bound();
        // F_t(t+τ) ≥ τ(w − ‖ḟ‖ − gτ/2) > 0 below `safe`: no root there.
        let safe = (2.0 * (w - bound) / g).max(0.0);
        let limit = 4.0 * w / g + 4.0 * bound / g + 1.0;
        let step = self.effective_march();

        let mut lo = (safe - step).max(0.0);
        let mut hi;
        loop {
            hi = lo + step;
            if hi > limit {
                return Err(Error::SolverFailure { t, w });
            }
            let (fh, ..) = gap(hi);
            if fh <= 0.0 {
                break;
            }
            lo = hi;
        }

        let mut tau = self.refine(&gap, lo, hi, w);
        // Certify the smallest-root rule on interior samples; a non-positive
        // sample means an earlier crossing was stepped over.
        for _ in 0..64 {
            let mut earlier = None;
            let mut last_positive = 0.0;
            for i in 1..=INTERIOR_CHECKS {
                let s = tau * i as f64 / (INTERIOR_CHECKS + 1) as f64;
                if s < safe {
                    last_positive = s;
                    continue;
                }
                if gap(s).0 <= 0.0 {
                    earlier = Some((last_positive, s));
                    break;
                }
                last_positive = s;
            }
            match earlier {
                None => break,
                Some((a, b)) => tau = self.refine(&gap, a, b, w),
            }
        }

        let (fval, _, f1, df1) = gap(tau);
        Ok(BounceTime {
            tbar: t + tau,
            tau,
            residual: fval.abs(),
            f_start: f0,
            df_start: df0,
            f_end: f1,
            df_end: df1,
        })
    }

    fn refine<G>(&self, gap: &G, lo: f64, hi: f64, w: f64) -> f64
    where
        G: Fn(f64) -> (f64, f64, f64, f64),
    {
        let (fh, ..) = gap(hi);
        if fh == 0.0 {
            return hi;
        }
        let tol = self.root_tol * (1.0 + w.abs() * hi);
        newton_bisect(lo, hi, tol, 200, |tau| {
            let (f, df, ..) = gap(tau);
            (f, df)
        })
    }

    /// One bounce in `(t, v)` coordinates; requires `v > 0`.
    pub fn step_tv(&self, t: f64, v: f64) -> Result<Step> {
        let (f0, df0) = self.profile.value_and_velocity(t);
        if !(v > 0.0) {
            return Err(Error::NotAboveRacket { t, v });
        }
        let bt = self.solve_from(t, v + df0, f0, df0)?;
        Ok(Step {
            t: bt.tbar,
            value: bounce_velocity(v, &bt),
            residual: bt.residual,
        })
    }

    /// One bounce in `(t, e)` coordinates; requires `e > 0`.
    pub fn step_te(&self, t: f64, e: f64) -> Result<Step> {
        if !(e > 0.0) {
            return Err(Error::NotAboveRacket { t, v: 0.0 });
        }
        let v = (2.0 * e).sqrt();
        let s = self.step_tv(t, v)?;
        // increment form: no sqrt/square round trip when v̄ = v
        let dv = s.value - v;
        Ok(Step { value: (e + dv * (v + 0.5 * dv)).max(0.0), ..s })
    }

    /// Bouncing motion from `(t0, v0)`, `v0 ≥ 0`. When the relative velocity
    /// is not positive the ball stays on the racket and the motion is marked
    /// absorbed.
    pub fn bouncing_motion(&self, t0: f64, v0: f64, n_steps: usize) -> Result<OrbitSegment> {
        if !(v0 >= 0.0) {
            return Err(Error::InvalidParameter("initial velocity must be non-negative"));
        }
        let mut seg = OrbitSegment::default();
        seg.states.push(LiftState::new(t0, v0, Coord::Velocity));
        let (mut t, mut v) = (t0, v0);
        for _ in 0..n_steps {
            if v <= 0.0 {
                seg.absorbed = true;
                break;
            }
            let s = self.step_tv(t, v)?;
            (t, v) = (s.t, s.value);
            seg.states.push(LiftState::new(t, v, Coord::Velocity));
            seg.residuals.push(s.residual);
        }
        Ok(seg)
    }

    /// Jacobian of the `(t, v)` map by implicit differentiation, together
    /// with the image point.
    pub fn jacobian_tv(&self, t: f64, v: f64) -> Result<([[f64; 2]; 2], Step)> {
        let (f0, df0) = self.profile.value_and_velocity(t);
        if !(v > 0.0) {
            return Err(Error::NotAboveRacket { t, v });
        }
        let bt = self.solve_from(t, v + df0, f0, df0)?;
        let a = self.profile.eval_derivs(t);
        let b = self.profile.eval_derivs(bt.tbar);
        let dd = if bt.tau < TAYLOR_WINDOW {
            taylor_dd(a.df, a.ddf, a.dddf, bt.tau)
        } else {
            dd_from_values(a.f, a.df, b.f, b.df, bt.tau)
        };
        let k = 2.0 / self.g;
        let det_out = 1.0 + k * dd.d_tbar;
        if !(det_out > 0.0) {
            return Err(Error::SingularJacobian { t, det: det_out });
        }
        // D_{t̄,v̄}F = [[det_out, 0], [2∂_t̄f[] − f̈(t̄), 1]]
        let lower = 2.0 * dd.d_tbar - b.ddf;
        // D_{t,v}F
        let d1 = [[-1.0 + k * dd.d_t - k * a.ddf, -k], [2.0 * dd.d_t - a.ddf, -1.0]];
        let row0 = [-d1[0][0] / det_out, -d1[0][1] / det_out];
        let row1 = [
            -d1[1][0] - lower * row0[0],
            -d1[1][1] - lower * row0[1],
        ];
        let step = Step {
            t: bt.tbar,
            value: bounce_velocity(v, &bt),
            residual: bt.residual,
        };
        Ok(([row0, row1], step))
    }

    /// Jacobian of the `(t, e)` map. Its determinant is 1 and
    /// `∂t̄/∂e > 0` on the twist region.
    pub fn jacobian_te(&self, t: f64, e: f64) -> Result<[[f64; 2]; 2]> {
        if !(e > 0.0) {
            return Err(Error::NotAboveRacket { t, v: 0.0 });
        }
        let v = (2.0 * e).sqrt();
        let (j, s) = self.jacobian_tv(t, v)?;
        let vbar = s.value;
        Ok([[j[0][0], j[0][1] / v], [vbar * j[1][0], vbar * j[1][1] / v]])
    }

    /// Membership of `(t, t̄)` in the generating-function domain
    /// `t̄ − t > (2/g)(v_* − f[t, t̄] + ḟ(t))`.
    pub fn domain_guard(&self, t: f64, tbar: f64) -> bool {
        let tau = tbar - t;
        if !(tau > 0.0) {
            return false;
        }
        let (f0, df0) = self.profile.value_and_velocity(t);
        let f1 = self.profile.value(tbar);
        tau > (2.0 / self.g) * (self.v_star - (f1 - f0) / tau + df0)
    }

    /// The lower boundary `T(t)` of the domain: the `t̄` where the domain
    /// inequality becomes an equality.
    pub fn domain_boundary(&self, t: f64) -> f64 {
        let k = 2.0 / self.g;
        let (f0, df0) = self.profile.value_and_velocity(t);
        let excess = |tau: f64| {
            let f1 = self.profile.value(t + tau);
            tau - k * (self.v_star - (f1 - f0) / tau + df0)
        };
        let bound = self.df_bound();
        let lo = (k * (self.v_star - 2.0 * bound)).max(1e-12);
        let hi = k * (self.v_star + 2.0 * bound) + 1e-12;
        t + bisect(lo, hi, 1e-14 * hi.max(1.0), excess)
    }

    /// Generating function `h(t, t̄)` with its first and second partials.
    pub fn gen_fun(&self, t: f64, tbar: f64) -> Result<GenFunEval> {
        if !self.domain_guard(t, tbar) {
            return Err(Error::OutsideDomain { t, tbar });
        }
        Ok(self.gen_fun_unchecked(t, tbar))
    }

    /// [`gen_fun`](Self::gen_fun) without the domain check; requires `t̄ > t`.
    pub fn gen_fun_unchecked(&self, t: f64, tbar: f64) -> GenFunEval {
        let g = self.g;
        let tau = tbar - t;
        let a = self.profile.eval_derivs(t);
        let b = self.profile.eval_derivs(tbar);
        let dd = if tau.abs() < TAYLOR_WINDOW {
            taylor_dd(a.df, a.ddf, a.dddf, tau)
        } else {
            dd_from_values(a.f, a.df, b.f, b.df, tau)
        };
        let fd = dd.value;
        let h = g * g / 24.0 * tau * tau * tau + 0.5 * g * (b.f + a.f) * tau
            - 0.5 * (b.f - a.f) * fd
            - g * self.profile.integral(t, tau)
            + 0.5 * self.profile.integral_df_squared(t, tau);
        let launch = 0.5 * g * tau + fd - a.df;
        let arrival = 0.5 * g * tau - fd + b.df;
        GenFunEval {
            h,
            h1: -0.5 * launch * launch,
            h2: 0.5 * arrival * arrival,
            h11: 0.5 * g * tau * (0.5 * g + a.ddf) + (dd.d_t - a.ddf) * (a.df - fd),
            h22: 0.5 * g * tau * (0.5 * g + b.ddf) + (dd.d_tbar - b.ddf) * (fd - b.df),
            h12: -0.25 * g * g * tau + dd.d_tbar * (a.df - fd) - 0.5 * g * (b.df - a.df),
        }
    }

    /// Preimage of `(t̄, ē)`: the launch `(t, e)` whose first impact is at
    /// `t̄` with energy `ē`.
    pub fn retreat_te(&self, tbar: f64, ebar: f64) -> Result<(f64, f64)> {
        if !(ebar > 0.0) {
            return Err(Error::InverseFailure { t: tbar });
        }
        let g = self.g;
        let vbar = (2.0 * ebar).sqrt();
        let (f1, df1) = self.profile.value_and_velocity(tbar);
        // v̄ = (g/2)τ − f[t̄−τ, t̄] + ḟ(t̄)
        let mismatch = |tau: f64| {
            let f0 = self.profile.value(tbar - tau);
            0.5 * g * tau - (f1 - f0) / tau + df1 - vbar
        };
        let bound = self.df_bound();
        let lo = (2.0 * (vbar - df1 - bound) / g).max(1e-9);
        let hi = 2.0 * (vbar - df1 + bound) / g + 1e-9;
        if !(hi > lo) {
            return Err(Error::InverseFailure { t: tbar });
        }
        let step = self.effective_march();
        let mut a = lo;
        let mut ma = mismatch(a);
        while a < hi {
            let b = (a + step).min(hi);
            let mb = mismatch(b);
            if (ma <= 0.0) != (mb <= 0.0) {
                let tau = bisect(a, b, 1e-15 * b.max(1.0), |x| -mismatch(x));
                let t = tbar - tau;
                let (f0, df0) = self.profile.value_and_velocity(t);
                let v = 0.5 * g * tau + (f1 - f0) / tau - df0;
                if v > 0.0 {
                    if let Ok(bt) = self.solve_from(t, v + df0, f0, df0) {
                        if (bt.tbar - tbar).abs() <= 1e-9 * (1.0 + tau) {
                            return Ok((t, 0.5 * v * v));
                        }
                    }
                }
            }
            a = b;
            ma = mb;
        }
        Err(Error::InverseFailure { t: tbar })
    }
}

#[inline]
fn bounce_velocity(v: f64, bt: &BounceTime) -> f64 {
    let fd = (bt.f_end - bt.f_start) / bt.tau;
    v - 2.0 * fd + bt.df_end + bt.df_start
}

/// The Tennis map in the symplectic coordinates `(t, e)`.
impl TwistSystem for TennisParams {
    fn period(&self) -> f64 {
        1.0
    }

    fn coord(&self) -> Coord {
        Coord::Energy
    }

    fn advance(&self, t: f64, e: f64) -> Result<Advance> {
        if !(e > 0.0) {
            return Ok(Advance::Absorbed);
        }
        let s = self.step_te(t, e)?;
        Ok(Advance::To { next: (s.t, s.value), residual: s.residual })
    }

    fn retreat(&self, t: f64, e: f64) -> Result<(f64, f64)> {
        self.retreat_te(t, e)
    }

    fn jacobian(&self, t: f64, e: f64) -> Result<[[f64; 2]; 2]> {
        self.jacobian_te(t, e)
    }

    fn gen(&self, t: f64, tbar: f64) -> Result<GenFunEval> {
        self.gen_fun(t, tbar)
    }

    fn in_domain(&self, t: f64, tbar: f64) -> bool {
        self.domain_guard(t, tbar)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn flat() -> TennisParams {
        TennisParams::new(RacketProfile::constant(0.0), 1.0).unwrap()
    }

    fn wavy() -> TennisParams {
        TennisParams::new(RacketProfile::cosine(0.01), 1.0).unwrap()
    }

    #[test]
    fn defaults_follow_norms() {
        let p = wavy();
        let sup = 0.02 * core::f64::consts::PI;
        assert!((p.v_star - (4.5 * sup + 0.5)).abs() < 1e-12);
        assert!((p.march_step - 0.2 * p.v_star).abs() < 1e-12);
        assert!(p.clone().with_v_star(3.9 * sup).is_err());
        assert!(TennisParams::new(RacketProfile::constant(0.0), 0.0).is_err());
    }

    #[test]
    fn divided_difference_constant_and_cosine() {
        let c = RacketProfile::constant(3.0);
        let dd = divided_difference(&c, 0.2, 1.7);
        assert_eq!((dd.value, dd.d_t, dd.d_tbar), (0.0, 0.0, 0.0));
        let dd = divided_difference(&RacketProfile::cosine(0.01), 0.0, 0.5);
        assert!((dd.value + 0.04).abs() < 1e-15);
    }

    #[test]
    fn divided_difference_taylor_branch() {
        let p = RacketProfile::new(vec![crate::Harmonic::new(1, 0.01, 0.02)], 0.0);
        let t = 0.3;
        let dd = divided_difference(&p, t, t + 1e-9);
        let exact = p.eval_derivs(t).df;
        assert!((dd.value - exact).abs() <= 1e-6 * exact.abs());
    }

    #[test]
    fn flat_bounce_times() {
        let p = flat();
        let bt = p.solve_bounce_time(0.25, 3.0).unwrap();
        assert!((bt.tbar - 6.25).abs() < 1e-12);
        let raised = TennisParams::new(RacketProfile::constant(5.0), 1.0).unwrap();
        let bt = raised.solve_bounce_time(0.0, 2.0).unwrap();
        assert!((bt.tbar - 4.0).abs() < 1e-12);
    }

    #[test]
    fn flat_steps() {
        let p = flat();
        let s = p.step_tv(0.25, 3.0).unwrap();
        assert!((s.t - 6.25).abs() < 1e-12 && (s.value - 3.0).abs() < 1e-15);
        let s = p.step_te(0.25, 4.5).unwrap();
        assert!((s.t - 6.25).abs() < 1e-12 && (s.value - 4.5).abs() < 1e-14);
    }

    #[test]
    fn step_requires_positive_velocity() {
        assert!(matches!(wavy().step_tv(0.0, 0.0), Err(Error::NotAboveRacket { .. })));
    }

    #[test]
    fn flat_jacobian_is_a_shear() {
        let j = flat().jacobian_te(0.1, 4.5).unwrap();
        assert!((j[0][0] - 1.0).abs() < 1e-12);
        assert!((j[0][1] - 2.0 / 3.0).abs() < 1e-12);
        assert!(j[1][0].abs() < 1e-12);
        assert!((j[1][1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn flat_generating_function() {
        let p = TennisParams::new(RacketProfile::constant(0.0), 1.0)
            .unwrap()
            .with_v_star(1.0)
            .unwrap();
        let h = p.gen_fun(0.0, 6.0).unwrap();
        assert!((h.h - 9.0).abs() < 1e-12);
        assert!((h.h1 + 4.5).abs() < 1e-12);
        assert!((h.h2 - 4.5).abs() < 1e-12);
        assert!((h.h12 + 1.5).abs() < 1e-12);
    }

    #[test]
    fn flat_domain_guard() {
        let p = flat().with_v_star(1.0).unwrap();
        assert!(p.domain_guard(0.3, 2.31));
        assert!(!p.domain_guard(0.3, 2.29));
        assert!(!p.domain_guard(0.3, 0.3));
        assert!(matches!(p.gen_fun(0.0, 1.0), Err(Error::OutsideDomain { .. })));
    }

    #[test]
    fn absorbed_when_relative_velocity_vanishes() {
        // ḟ(0) = 0.1·2π > 0; at v = 0 the ball sits on the racket
        let p = TennisParams::new(RacketProfile::sine(0.1), 1.0).unwrap();
        let seg = p.bouncing_motion(0.0, 0.0, 5).unwrap();
        assert!(seg.absorbed);
        assert_eq!(seg.states.len(), 1);
    }

    #[test]
    fn flat_bouncing_motion() {
        let seg = flat().bouncing_motion(0.0, 3.0, 3).unwrap();
        let times: alloc::vec::Vec<f64> = seg.angles();
        for (t, want) in times.iter().zip([0.0, 6.0, 12.0, 18.0]) {
            assert!((t - want).abs() < 1e-12);
        }
        assert!(seg.states.iter().all(|s| (s.value - 3.0).abs() < 1e-15));
        assert!(!seg.absorbed);
    }

    #[test]
    fn retreat_inverts_step() {
        let p = wavy();
        for &(t, e) in &[(0.1, 12.5), (0.77, 60.0), (3.4, 200.0)] {
            let s = p.step_te(t, e).unwrap();
            let (t0, e0) = p.retreat_te(s.t, s.value).unwrap();
            assert!((t0 - t).abs() < 1e-9, "{t0} vs {t}");
            assert!((e0 - e).abs() < 1e-8 * (1.0 + e));
        }
    }
}
