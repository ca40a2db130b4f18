use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The bounce-time equation had no sign change in the admissible window.
    #[error("no bounce time found after t = {t} with launch velocity w = {w}")]
    SolverFailure { t: f64, w: f64 },
    /// The state is at or below the racket velocity, so no flight follows.
    #[error("state at t = {t} is not above the racket (relative velocity {v})")]
    NotAboveRacket { t: f64, v: f64 },
    #[error("pair ({t}, {tbar}) lies outside the generating-function domain")]
    OutsideDomain { t: f64, tbar: f64 },
    #[error("implicit system is singular at t = {t} (determinant {det})")]
    SingularJacobian { t: f64, det: f64 },
    #[error("no consistent preimage for the state at t = {t}")]
    InverseFailure { t: f64 },
    #[error("orbit segment needs at least 3 points, got {0}")]
    DegenerateSegment(usize),
    #[error("empty input")]
    EmptyInput,
    #[error("D-bounds undefined: discriminant not positive")]
    UndefinedBounds,
    #[error("orbit was absorbed by the racket")]
    Absorbed,
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
}
