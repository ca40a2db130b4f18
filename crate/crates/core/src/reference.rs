//! Closed-form reference twist maps: the Chirikov standard map and, at
//! `k = 0`, the integrable shear.
//!
//! The standard map keeps its own angle period 2π, matching
//! `h(x, x̄) = ½(x̄ − x)² + k cos x`, so its known thresholds in `k` are not
//! rescaled.

use core::f64::consts::TAU;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::kam::{d_bounds, DBounds};
use crate::system::{Advance, Coord, GenFunEval, TwistSystem};
use crate::{Error, Result};

/// `x̄ = x + y − k sin x`, `ȳ = y − k sin x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StandardMap {
    pub k: f64,
}

impl StandardMap {
    pub fn new(k: f64) -> Result<Self> {
        if !(k >= 0.0 && k.is_finite()) {
            return Err(Error::InvalidParameter("k must be non-negative"));
        }
        Ok(StandardMap { k })
    }

    pub fn integrable() -> Self {
        StandardMap { k: 0.0 }
    }

    pub fn standard_step(&self, x: f64, y: f64) -> (f64, f64) {
        let ybar = y - self.k * x.sin();
        (x + ybar, ybar)
    }

    pub fn standard_gen(&self, x: f64, xbar: f64) -> GenFunEval {
        let d = xbar - x;
        let (s, c) = x.sin_cos();
        GenFunEval {
            h: 0.5 * d * d + self.k * c,
            h1: -d - self.k * s,
            h2: d,
            h11: 1.0 - self.k * c,
            h12: -1.0,
            h22: 1.0,
        }
    }

    /// `(a(x), b(x)) = (2 − k cos x, 1)` on any invariant curve.
    pub fn standard_ab(&self, x: f64) -> (f64, f64) {
        (2.0 - self.k * x.cos(), 1.0)
    }

    /// `B± = 2 + k`, `C± = 1`, so `D⁺ = 1 + k/2 + √(k²/4 + k)` and
    /// `D⁻ = 1/D⁺`.
    pub fn standard_dbounds(&self) -> Result<DBounds> {
        if !(self.k > 0.0) {
            return Err(Error::InvalidParameter("k must be positive"));
        }
        let b = 2.0 + self.k;
        Ok(d_bounds(b, b, 1.0, 1.0))
    }
}

impl TwistSystem for StandardMap {
    fn period(&self) -> f64 {
        TAU
    }

    fn coord(&self) -> Coord {
        Coord::Momentum
    }

    fn advance(&self, x: f64, y: f64) -> Result<Advance> {
        Ok(Advance::To { next: self.standard_step(x, y), residual: 0.0 })
    }

    fn retreat(&self, x: f64, y: f64) -> Result<(f64, f64)> {
        let x0 = x - y;
        Ok((x0, y + self.k * x0.sin()))
    }

    fn jacobian(&self, x: f64, _y: f64) -> Result<[[f64; 2]; 2]> {
        let kc = self.k * x.cos();
        Ok([[1.0 - kc, 1.0], [-kc, 1.0]])
    }

    fn gen(&self, x: f64, xbar: f64) -> Result<GenFunEval> {
        Ok(self.standard_gen(x, xbar))
    }

    fn in_domain(&self, _x: f64, _xbar: f64) -> bool {
        true
    }
}
