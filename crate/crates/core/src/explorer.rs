//! Orbit ensembles and dynamical diagnostics on any [`TwistSystem`].

use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::system::{Advance, Coord, LiftState, OrbitSegment, TwistSystem};
use crate::{Error, Result};

/// Jittered grid of initial conditions over one angle period and an energy
/// (or momentum) band.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleSpec {
    pub t_grid: usize,
    pub e_grid: usize,
    pub e_range: (f64, f64),
    pub n_steps: usize,
    pub seed: u64,
}

impl EnsembleSpec {
    pub fn validate(&self) -> Result<()> {
        if self.t_grid == 0 || self.e_grid == 0 {
            return Err(Error::InvalidParameter("grid counts must be at least 1"));
        }
        if self.n_steps == 0 {
            return Err(Error::InvalidParameter("n_steps must be at least 1"));
        }
        let (lo, hi) = self.e_range;
        if !(lo > 0.0 && hi >= lo) {
            return Err(Error::InvalidParameter("e_range must satisfy 0 < e_lo <= e_hi"));
        }
        Ok(())
    }

    pub fn orbit_count(&self) -> usize {
        self.t_grid * self.e_grid
    }

    /// Grid nodes at cell centres plus a uniform jitter of up to half a
    /// cell, in row-major order (angle index outer).
    pub fn initial_conditions(&self, period: f64) -> Vec<(f64, f64)> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let (lo, hi) = self.e_range;
        let dt = period / self.t_grid as f64;
        let de = (hi - lo) / self.e_grid as f64;
        let mut out = Vec::with_capacity(self.orbit_count());
        for i in 0..self.t_grid {
            for j in 0..self.e_grid {
                let ut = unit(&mut rng) - 0.5;
                let ue = unit(&mut rng) - 0.5;
                out.push(((i as f64 + 0.5 + ut) * dt, lo + (j as f64 + 0.5 + ue) * de));
            }
        }
        out
    }
}

fn unit(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitStats {
    pub ic: LiftState,
    pub e_min: f64,
    pub e_max: f64,
    pub sup_minus_inf: f64,
    pub absorbed: bool,
    /// The step solver failed; statistics cover the steps before it.
    pub failed: bool,
    pub steps: usize,
    pub rotation: Option<f64>,
    pub lyapunov: Option<f64>,
}

impl OrbitStats {
    /// Oscillation in velocity units, `√(2e_max) − √(2e_min)`, for energy
    /// coordinates.
    pub fn velocity_oscillation(&self) -> Option<f64> {
        (self.ic.coord == Coord::Energy && self.e_min >= 0.0)
            .then(|| (2.0 * self.e_max).sqrt() - (2.0 * self.e_min).sqrt())
    }
}

/// Statistics of one orbit of `n_steps` iterates, without storing it.
pub fn orbit_stats<S: TwistSystem + ?Sized>(system: &S, ic: (f64, f64), n_steps: usize) -> OrbitStats {
    let (mut x, mut y) = ic;
    let (mut lo, mut hi) = (y, y);
    let mut absorbed = false;
    let mut failed = false;
    let mut steps = 0;
    for _ in 0..n_steps {
        match system.advance(x, y) {
            Ok(Advance::To { next, .. }) => {
                (x, y) = next;
                lo = lo.min(y);
                hi = hi.max(y);
                steps += 1;
            }
            Ok(Advance::Absorbed) => {
                absorbed = true;
                break;
            }
            Err(_) => {
                failed = true;
                break;
            }
        }
    }
    let rotation = (!absorbed && !failed && steps > 0).then(|| (x - ic.0) / steps as f64);
    OrbitStats {
        ic: LiftState::new(ic.0, ic.1, system.coord()),
        e_min: lo,
        e_max: hi,
        sup_minus_inf: hi - lo,
        absorbed,
        failed,
        steps,
        rotation,
        lyapunov: None,
    }
}

/// Statistics for every orbit of the ensemble, in grid order.
pub fn ensemble_run<S: TwistSystem + ?Sized>(system: &S, spec: &EnsembleSpec) -> Result<Vec<OrbitStats>> {
    spec.validate()?;
    Ok(spec
        .initial_conditions(system.period())
        .into_iter()
        .map(|ic| orbit_stats(system, ic, spec.n_steps))
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiffusionResult {
    pub found: bool,
    /// Witness orbit, replayable from its first state.
    pub orbit: OrbitSegment,
    pub achieved_amplitude: f64,
    /// Map evaluations spent.
    pub budget_used: u64,
    /// Largest oscillation seen, with its initial condition and length.
    pub best: Option<OrbitStats>,
}

/// Looks for an orbit whose oscillation `sup − inf` reaches `amplitude`,
/// running the ensemble with doubling orbit length until found or the
/// evaluation budget is exhausted. `runner` executes one ensemble.
pub fn diffusion_search_with<S, R>(
    system: &S,
    amplitude: f64,
    budget: u64,
    spec: &EnsembleSpec,
    mut runner: R,
) -> Result<DiffusionResult>
where
    S: TwistSystem + ?Sized,
    R: FnMut(&EnsembleSpec) -> Result<Vec<OrbitStats>>,
{
    if !(amplitude > 0.0) {
        return Err(Error::InvalidParameter("amplitude must be positive"));
    }
    spec.validate()?;
    let mut used = 0u64;
    let mut round = *spec;
    let mut best: Option<OrbitStats> = None;
    loop {
        let cost = (round.orbit_count() * round.n_steps) as u64;
        if used + cost > budget {
            break;
        }
        let stats = runner(&round)?;
        used += stats.iter().map(|s| s.steps as u64).sum::<u64>();
        for s in stats {
            if best.map_or(true, |b| s.sup_minus_inf > b.sup_minus_inf) {
                best = Some(s);
            }
        }
        if best.is_some_and(|b| b.sup_minus_inf >= amplitude) {
            break;
        }
        round.n_steps *= 2;
    }
    match best {
        Some(b) if b.sup_minus_inf >= amplitude => {
            let orbit = replay(system, &b)?;
            let achieved_amplitude = oscillation(&orbit);
            Ok(DiffusionResult { found: true, orbit, achieved_amplitude, budget_used: used, best })
        }
        _ => Ok(DiffusionResult {
            found: false,
            orbit: OrbitSegment::default(),
            achieved_amplitude: best.map_or(0.0, |b| b.sup_minus_inf),
            budget_used: used,
            best,
        }),
    }
}

pub fn diffusion_search<S: TwistSystem + ?Sized>(
    system: &S,
    amplitude: f64,
    budget: u64,
    spec: &EnsembleSpec,
) -> Result<DiffusionResult> {
    diffusion_search_with(system, amplitude, budget, spec, |s| ensemble_run(system, s))
}

/// Re-simulates the orbit summarised by `stats`.
pub fn replay<S: TwistSystem + ?Sized>(system: &S, stats: &OrbitStats) -> Result<OrbitSegment> {
    system.trace(stats.ic.t, stats.ic.value, stats.steps)
}

/// `sup − inf` of the momentum-like coordinate along a segment.
pub fn oscillation(seg: &OrbitSegment) -> f64 {
    let (lo, hi) = seg
        .states
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| (lo.min(s.value), hi.max(s.value)));
    if lo.is_finite() {
        hi - lo
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationEstimate {
    pub omega: f64,
    /// `1/N`: the deviation bound for orbits on an invariant curve.
    pub error_bar: f64,
}

/// Mean lift advance per iterate, `(t_N − t_0)/N`. Undefined for absorbed
/// or single-point segments.
pub fn rotation_number(segment: &OrbitSegment) -> Option<RotationEstimate> {
    let n = segment.states.len().checked_sub(1)?;
    if n == 0 || segment.absorbed {
        return None;
    }
    let first = segment.states[0].t;
    let last = segment.states[n].t;
    Some(RotationEstimate { omega: (last - first) / n as f64, error_bar: 1.0 / n as f64 })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LyapunovEstimate {
    /// `(1/N) Σ log ‖J_n u_n‖` over the whole orbit.
    pub lambda: f64,
    /// Same average restricted to the last quarter of the orbit.
    pub last_quarter: f64,
    pub steps: usize,
}

/// Maximal Lyapunov exponent along the orbit of `ic`, propagating a tangent
/// vector and renormalising it every `renorm_every` steps.
pub fn lyapunov_max<S: TwistSystem + ?Sized>(
    system: &S,
    ic: (f64, f64),
    n_steps: usize,
    renorm_every: usize,
) -> Result<LyapunovEstimate> {
    if n_steps == 0 {
        return Err(Error::InvalidParameter("n_steps must be at least 1"));
    }
    let every = renorm_every.max(1);
    let quarter_start = n_steps - n_steps / 4;
    let (mut x, mut y) = ic;
    let mut u = [1.0 / 2.0_f64.sqrt(), 1.0 / 2.0_f64.sqrt()];
    let (mut total, mut tail) = (0.0, 0.0);
    let mut pending = 0usize;
    for n in 0..n_steps {
        let j = system.jacobian(x, y)?;
        (x, y) = system.step(x, y)?;
        u = [j[0][0] * u[0] + j[0][1] * u[1], j[1][0] * u[0] + j[1][1] * u[1]];
        pending += 1;
        if pending == every || n + 1 == n_steps {
            let norm = u[0].hypot(u[1]);
            let growth = norm.ln();
            total += growth;
            // the tail sum takes whole blocks that end inside the last quarter
            if n >= quarter_start {
                tail += growth;
            }
            u = [u[0] / norm, u[1] / norm];
            pending = 0;
        }
    }
    let tail_steps = n_steps - quarter_start;
    Ok(LyapunovEstimate {
        lambda: total / n_steps as f64,
        last_quarter: if tail_steps > 0 { tail / tail_steps as f64 } else { f64::NAN },
        steps: n_steps,
    })
}

/// Settings for the probe orbits of a layer scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeSpec {
    pub t_count: usize,
    pub n_steps: usize,
    /// Band width relative to the level (energy coordinates) or to the
    /// angle period (momentum coordinates).
    pub beta: f64,
}

impl Default for ProbeSpec {
    fn default() -> Self {
        ProbeSpec { t_count: 8, n_steps: 2000, beta: 0.1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayerLevel {
    pub e: f64,
    pub confined: bool,
    pub max_oscillation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayerScan {
    pub levels: Vec<LayerLevel>,
    pub lowest_non_confined: Option<f64>,
}

/// For each of `resolution` levels in `e_range`, launches probe orbits at
/// evenly spaced angles and flags the level confined when every orbit keeps
/// `sup − inf` within the band of [`band_width`]. Absorbed or failed probes
/// count as escapes.
pub fn layer_scan<S: TwistSystem + ?Sized>(
    system: &S,
    e_range: (f64, f64),
    resolution: usize,
    probe: &ProbeSpec,
) -> Result<LayerScan> {
    if probe.t_count == 0 {
        return Err(Error::InvalidParameter("probe needs at least one orbit"));
    }
    let levels = scan_levels(e_range, resolution)?;
    Ok(finish_scan(
        levels
            .into_iter()
            .map(|e| scan_level(system, e, probe))
            .collect(),
    ))
}

/// `resolution` evenly spaced levels from `lo` to `hi` inclusive.
pub fn scan_levels(e_range: (f64, f64), resolution: usize) -> Result<Vec<f64>> {
    let (lo, hi) = e_range;
    if resolution == 0 || !(hi >= lo) {
        return Err(Error::InvalidParameter("invalid scan range or resolution"));
    }
    Ok((0..resolution)
        .map(|i| {
            if resolution == 1 {
                lo
            } else {
                lo + (hi - lo) * i as f64 / (resolution - 1) as f64
            }
        })
        .collect())
}

/// Probe ensemble at one level.
pub fn scan_level<S: TwistSystem + ?Sized>(system: &S, e: f64, probe: &ProbeSpec) -> LayerLevel {
    let period = system.period();
    let mut worst = 0.0_f64;
    let mut escaped = false;
    for i in 0..probe.t_count {
        let t = period * (i as f64 + 0.5) / probe.t_count as f64;
        let s = orbit_stats(system, (t, e), probe.n_steps);
        worst = worst.max(s.sup_minus_inf);
        escaped |= s.absorbed || s.failed;
    }
    LayerLevel {
        e,
        confined: !escaped && worst <= band_width(system, e, probe.beta),
        max_oscillation: worst,
    }
}

/// `beta·e` for energies; `beta·period` for a momentum such as the standard
/// map's `y`, which has no natural origin.
pub fn band_width<S: TwistSystem + ?Sized>(system: &S, level: f64, beta: f64) -> f64 {
    match system.coord() {
        Coord::Momentum => beta * system.period(),
        Coord::Energy | Coord::Velocity => beta * level.abs(),
    }
}

pub fn finish_scan(levels: Vec<LayerLevel>) -> LayerScan {
    let lowest_non_confined = levels
        .iter()
        .filter(|l| !l.confined)
        .map(|l| l.e)
        .fold(None, |acc: Option<f64>, e| Some(acc.map_or(e, |a| a.min(e))));
    LayerScan { levels, lowest_non_confined }
}
