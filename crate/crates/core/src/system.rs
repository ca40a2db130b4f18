//! Common vocabulary for exact symplectic twist maps on the lift of the
//! cylinder: states, orbit segments, generating-function evaluations and
//! the [`TwistSystem`] trait the criteria and diagnostics are written against.

use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::Result;

/// Which momentum-like coordinate a [`LiftState`] carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Coord {
    /// Racket-frame velocity `v` right after the bounce.
    Velocity,
    /// Energy `e = v²/2` right after the bounce.
    Energy,
    /// Action variable of a reference map (the standard map's `y`).
    Momentum,
}

/// A point of the lift: unwrapped angle plus momentum-like value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LiftState {
    pub t: f64,
    pub value: f64,
    pub coord: Coord,
}

impl LiftState {
    pub fn new(t: f64, value: f64, coord: Coord) -> Self {
        LiftState { t, value, coord }
    }

    /// Angle reduced to `[0, 1)` in units of `period`.
    pub fn t_mod(&self, period: f64) -> f64 {
        let x = self.t / period;
        let r = x - x.floor();
        // rounding can land exactly on 1
        if r >= 1.0 {
            0.0
        } else {
            r
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OrbitSegment {
    pub states: Vec<LiftState>,
    /// Residual of the implicit step equation for each step taken.
    pub residuals: Vec<f64>,
    /// The motion reached a state with no further flight.
    pub absorbed: bool,
}

impl OrbitSegment {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn angles(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.t).collect()
    }
}

/// Value, gradient and Hessian of a generating function `h(x, x̄)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenFunEval {
    pub h: f64,
    pub h1: f64,
    pub h2: f64,
    pub h11: f64,
    pub h12: f64,
    pub h22: f64,
}

/// Result of one application of a map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Advance {
    To { next: (f64, f64), residual: f64 },
    /// No further motion: the state is frozen.
    Absorbed,
}

/// An exact symplectic twist map of the cylinder, given on its lift together
/// with a generating function `h` such that `h₁(x, x̄) = −y`,
/// `h₂(x, x̄) = ȳ` and `h₁₂ < 0` on the domain.
pub trait TwistSystem {
    /// Period of the angle coordinate (1 for the Tennis map, 2π for the
    /// standard map).
    fn period(&self) -> f64;

    fn coord(&self) -> Coord;

    fn advance(&self, x: f64, y: f64) -> Result<Advance>;

    /// Preimage of `(x̄, ȳ)`.
    fn retreat(&self, x: f64, y: f64) -> Result<(f64, f64)>;

    fn jacobian(&self, x: f64, y: f64) -> Result<[[f64; 2]; 2]>;

    fn gen(&self, x: f64, xbar: f64) -> Result<GenFunEval>;

    fn in_domain(&self, x: f64, xbar: f64) -> bool;

    /// `advance`, treating absorption as an error.
    fn step(&self, x: f64, y: f64) -> Result<(f64, f64)> {
        match self.advance(x, y)? {
            Advance::To { next, .. } => Ok(next),
            Advance::Absorbed => Err(crate::Error::Absorbed),
        }
    }

    /// Forward orbit of `n_steps` iterates starting at `(x, y)`. Stops early
    /// on absorption.
    fn trace(&self, x: f64, y: f64, n_steps: usize) -> Result<OrbitSegment> {
        let coord = self.coord();
        let mut seg = OrbitSegment {
            states: Vec::with_capacity(n_steps + 1),
            residuals: Vec::with_capacity(n_steps),
            absorbed: false,
        };
        seg.states.push(LiftState::new(x, y, coord));
        let (mut x, mut y) = (x, y);
        for _ in 0..n_steps {
            match self.advance(x, y)? {
                Advance::To { next, residual } => {
                    (x, y) = next;
                    seg.states.push(LiftState::new(x, y, coord));
                    seg.residuals.push(residual);
                }
                Advance::Absorbed => {
                    seg.absorbed = true;
                    break;
                }
            }
        }
        Ok(seg)
    }
}
