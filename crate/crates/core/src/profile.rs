//! Periodic racket motion `f(t)` as a finite Fourier series.
//!
//! `f(t) = mean + Σ a_k cos(2πkt) + b_k sin(2πkt)`, with period 1. All
//! derivatives are exact term-wise derivatives of the series, and the two
//! antiderivatives needed by the generating function (`∫f` and `∫ḟ²`) are
//! available in closed form.

use alloc::vec::Vec;
use core::f64::consts::TAU;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::roots::golden_min;

/// One term `cos_coeff·cos(2πkt) + sin_coeff·sin(2πkt)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Harmonic {
    pub k: u32,
    pub cos_coeff: f64,
    pub sin_coeff: f64,
}

impl Harmonic {
    pub fn new(k: u32, cos_coeff: f64, sin_coeff: f64) -> Self {
        Harmonic { k, cos_coeff, sin_coeff }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RacketProfile {
    pub harmonics: Vec<Harmonic>,
    pub mean_height: f64,
}

/// `(f, ḟ, f̈, f⃛)` at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivs {
    pub f: f64,
    pub df: f64,
    pub ddf: f64,
    pub dddf: f64,
}

/// Extrema of the racket derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileNorms {
    /// `min f̈`
    pub m: f64,
    /// `max f̈`
    pub big_m: f64,
    /// `sup |ḟ|`
    pub sup_df: f64,
    /// `sup |f̈|`
    pub sup_ddf: f64,
    /// A time where `f̈` attains `m`.
    pub argmin_ddf: f64,
    /// `max ḟ`, used by the unbounded-motion condition.
    pub max_df: f64,
}

/// Outcome of a closed-form sufficient condition. A positive margin means
/// the condition holds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionReport {
    pub holds: bool,
    pub margin: f64,
    /// False when the condition is undefined for these inputs.
    pub applicable: bool,
}

/// `2π·n·s` reduced so that integer shifts of `s` give identical results.
#[inline]
fn phase(n: i64, s: f64) -> f64 {
    let x = n as f64 * s;
    TAU * (x - x.floor())
}

impl RacketProfile {
    pub fn new(harmonics: Vec<Harmonic>, mean_height: f64) -> Self {
        RacketProfile { harmonics, mean_height }
    }

    /// The flat racket `f ≡ height`.
    pub fn constant(height: f64) -> Self {
        RacketProfile { harmonics: Vec::new(), mean_height: height }
    }

    /// `amplitude·cos(2πt)`.
    pub fn cosine(amplitude: f64) -> Self {
        RacketProfile::new(alloc::vec![Harmonic::new(1, amplitude, 0.0)], 0.0)
    }

    /// `amplitude·sin(2πt)`.
    pub fn sine(amplitude: f64) -> Self {
        RacketProfile::new(alloc::vec![Harmonic::new(1, 0.0, amplitude)], 0.0)
    }

    pub fn is_flat(&self) -> bool {
        self.harmonics
            .iter()
            .all(|h| h.k == 0 || (h.cos_coeff == 0.0 && h.sin_coeff == 0.0))
    }

    /// Highest harmonic index, at least 1.
    pub fn max_k(&self) -> u32 {
        self.harmonics.iter().map(|h| h.k).max().unwrap_or(1).max(1)
    }

    pub fn eval_derivs(&self, t: f64) -> Derivs {
        let mut d = Derivs { f: self.mean_height, df: 0.0, ddf: 0.0, dddf: 0.0 };
        for h in &self.harmonics {
            let w = TAU * h.k as f64;
            let (s, c) = phase(h.k as i64, t).sin_cos();
            let (a, b) = (h.cos_coeff, h.sin_coeff);
            let even = a * c + b * s;
            let odd = b * c - a * s;
            d.f += even;
            d.df += w * odd;
            d.ddf -= w * w * even;
            d.dddf -= w * w * w * odd;
        }
        d
    }

    /// `(f, ḟ)` only; the bounce solver's inner loop.
    #[inline]
    pub fn value_and_velocity(&self, t: f64) -> (f64, f64) {
        let mut f = self.mean_height;
        let mut df = 0.0;
        for h in &self.harmonics {
            let w = TAU * h.k as f64;
            let (s, c) = phase(h.k as i64, t).sin_cos();
            f += h.cos_coeff * c + h.sin_coeff * s;
            df += w * (h.sin_coeff * c - h.cos_coeff * s);
        }
        (f, df)
    }

    #[inline]
    pub fn value(&self, t: f64) -> f64 {
        self.value_and_velocity(t).0
    }

    /// `∫_t^{t+τ} f(s) ds`.
    pub fn integral(&self, t: f64, tau: f64) -> f64 {
        let end = t + tau;
        let mut acc = self.mean_height * tau;
        for h in &self.harmonics {
            if h.k == 0 {
                acc += h.cos_coeff * tau;
                continue;
            }
            let w = TAU * h.k as f64;
            let n = h.k as i64;
            let (s1, c1) = phase(n, end).sin_cos();
            let (s0, c0) = phase(n, t).sin_cos();
            acc += (h.cos_coeff * (s1 - s0) - h.sin_coeff * (c1 - c0)) / w;
        }
        acc
    }

    /// `∫_t^{t+τ} ḟ(s)² ds`, expanded into products of harmonics.
    pub fn integral_df_squared(&self, t: f64, tau: f64) -> f64 {
        let end = t + tau;
        // ∫ cos(2πn s) ds and ∫ sin(2πn s) ds over [t, end]
        let cos_int = |n: i64| {
            if n == 0 {
                tau
            } else {
                (phase(n, end).sin() - phase(n, t).sin()) / (TAU * n as f64)
            }
        };
        let sin_int = |n: i64| {
            if n == 0 {
                0.0
            } else {
                -(phase(n, end).cos() - phase(n, t).cos()) / (TAU * n as f64)
            }
        };
        // ḟ = Σ c_j cos(ω_j s) + d_j sin(ω_j s)
        let terms: Vec<(i64, f64, f64)> = self
            .harmonics
            .iter()
            .filter(|h| h.k > 0)
            .map(|h| {
                let w = TAU * h.k as f64;
                (h.k as i64, w * h.sin_coeff, -w * h.cos_coeff)
            })
            .collect();
        let mut acc = 0.0;
        for &(nj, cj, dj) in &terms {
            for &(nk, ck, dk) in &terms {
                let (diff, sum) = (nj - nk, nj + nk);
                acc += 0.5 * cj * ck * (cos_int(diff) + cos_int(sum));
                acc += 0.5 * dj * dk * (cos_int(diff) - cos_int(sum));
                // sin(a)cos(b) = ½[sin(a+b) + sin(a−b)]
                acc += 0.5 * dj * ck * (sin_int(sum) + sin_int(diff));
                acc += 0.5 * cj * dk * (sin_int(sum) - sin_int(diff));
            }
        }
        acc
    }

    /// Extrema of `f̈` and `ḟ` by sampling on `grid_n` points followed by
    /// golden-section refinement of every discrete local extremum.
    pub fn norms(&self, grid_n: usize) -> ProfileNorms {
        let grid_n = grid_n.max(64);
        if self.is_flat() {
            return ProfileNorms {
                m: 0.0,
                big_m: 0.0,
                sup_df: 0.0,
                sup_ddf: 0.0,
                argmin_ddf: 0.0,
                max_df: 0.0,
            };
        }
        let ddf = |t: f64| self.eval_derivs(t).ddf;
        let df = |t: f64| self.eval_derivs(t).df;
        let (argmin_ddf, m) = periodic_min(grid_n, ddf);
        let (_, neg_big_m) = periodic_min(grid_n, |t| -ddf(t));
        let (_, min_df) = periodic_min(grid_n, df);
        let (_, neg_max_df) = periodic_min(grid_n, |t| -df(t));
        let big_m = -neg_big_m;
        let max_df = -neg_max_df;
        ProfileNorms {
            m,
            big_m,
            sup_df: max_df.max(-min_df),
            sup_ddf: big_m.max(-m),
            argmin_ddf,
            max_df,
        }
    }
}

/// Global minimum over one period of a smooth 1-periodic function.
fn periodic_min<F: Fn(f64) -> f64>(grid_n: usize, f: F) -> (f64, f64) {
    let h = 1.0 / grid_n as f64;
    let samples: Vec<f64> = (0..grid_n).map(|i| f(i as f64 * h)).collect();
    let mut best = (0.0, f64::INFINITY);
    for i in 0..grid_n {
        let prev = samples[(i + grid_n - 1) % grid_n];
        let next = samples[(i + 1) % grid_n];
        let here = samples[i];
        if here <= prev && here <= next {
            let centre = i as f64 * h;
            let (x, fx) = golden_min(centre - h, centre + h, 1e-10, &f);
            if fx < best.1 {
                best = (x - x.floor(), fx);
            }
        }
    }
    if !best.1.is_finite() {
        // constant samples: any point is a minimiser
        best = (0.0, samples[0]);
    }
    best
}

impl ProfileNorms {
    /// Unbounded-motion condition: `max ḟ ≥ g/2`.
    pub fn check_pustylnikov(&self, g: f64) -> ConditionReport {
        let margin = self.max_df - 0.5 * g;
        ConditionReport { holds: margin >= 0.0, margin, applicable: true }
    }

    /// The threshold `−g / (1 + √(1 + g/M))`, or `None` when `M ≤ 0`.
    pub fn main_threshold(&self, g: f64) -> Option<f64> {
        (self.big_m > 0.0).then(|| -g / (1.0 + (1.0 + g / self.big_m).sqrt()))
    }

    /// Diffusion condition `m < −g/(1 + √(1 + g/M))`. Inapplicable when
    /// `M ≤ 0`, where the right side is undefined.
    pub fn check_main_condition(&self, g: f64) -> ConditionReport {
        match self.main_threshold(g) {
            Some(threshold) => {
                let margin = threshold - self.m;
                ConditionReport { holds: margin > 0.0, margin, applicable: true }
            }
            None => ConditionReport { holds: false, margin: f64::NAN, applicable: false },
        }
    }
}
