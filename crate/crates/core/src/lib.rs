//! Numerical toolkit for the bouncing-ball ("Tennis") map and converse-KAM
//! criteria for the breakup of rotational invariant curves.
//!
//! The crate is `no_std` (with `alloc`) when the default `std` feature is
//! disabled. All floating-point transcendental functions go through
//! [`num_traits::Float`], which falls back to `libm` without `std`.
//!
//! Module map:
//!
//! * [`profile`]: periodic racket motion as a finite Fourier series, its
//!   norms, and the closed-form sufficient conditions on the racket.
//! * [`tennis`]: the bounce map in time/velocity and time/energy
//!   coordinates, its Jacobian and its generating function.
//! * [`reference`]: the Chirikov standard map and the integrable shear.
//! * [`kam`]: pointwise, refined and second-variation non-existence
//!   criteria, asymptotic enclosures and explicit energy thresholds.
//! * [`explorer`]: orbit ensembles, diffusion search, rotation numbers,
//!   Lyapunov exponents and layer scans.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod error;
pub mod explorer;
pub mod kam;
pub mod profile;
pub mod reference;
pub mod roots;
pub mod sturm;
pub mod system;
pub mod tennis;

pub use error::Error;
pub use profile::{Harmonic, ProfileNorms, RacketProfile};
pub use reference::StandardMap;
pub use system::{Advance, Coord, GenFunEval, LiftState, OrbitSegment, TwistSystem};
pub use tennis::TennisParams;

pub type Result<T, E = Error> = core::result::Result<T, E>;
