//! Parallel drivers for the explorer. Orbits run on the rayon pool and are
//! collected in grid order, so results match the sequential drivers exactly.

use rayon::prelude::*;

use tennis_core::explorer::{
    diffusion_search_with, finish_scan, orbit_stats, scan_level, scan_levels, DiffusionResult,
    EnsembleSpec, LayerScan, OrbitStats, ProbeSpec,
};
use tennis_core::{Error, Result, TwistSystem};

pub fn ensemble_run<S>(system: &S, spec: &EnsembleSpec) -> Result<Vec<OrbitStats>>
where
    S: TwistSystem + Sync + ?Sized,
{
    spec.validate()?;
    Ok(spec
        .initial_conditions(system.period())
        .into_par_iter()
        .map(|ic| orbit_stats(system, ic, spec.n_steps))
        .collect())
}

pub fn diffusion_search<S>(system: &S, amplitude: f64, budget: u64, spec: &EnsembleSpec) -> Result<DiffusionResult>
where
    S: TwistSystem + Sync + ?Sized,
{
    diffusion_search_with(system, amplitude, budget, spec, |s| ensemble_run(system, s))
}

pub fn layer_scan<S>(system: &S, e_range: (f64, f64), resolution: usize, probe: &ProbeSpec) -> Result<LayerScan>
where
    S: TwistSystem + Sync + ?Sized,
{
    if probe.t_count == 0 {
        return Err(Error::InvalidParameter("probe needs at least one orbit"));
    }
    let levels = scan_levels(e_range, resolution)?;
    Ok(finish_scan(
        levels.into_par_iter().map(|e| scan_level(system, e, probe)).collect(),
    ))
}

/// Per-orbit segments of an ensemble, in grid order.
pub fn ensemble_trace<S>(system: &S, spec: &EnsembleSpec) -> Result<Vec<tennis_core::OrbitSegment>>
where
    S: TwistSystem + Sync + ?Sized,
{
    spec.validate()?;
    spec.initial_conditions(system.period())
        .into_par_iter()
        .map(|(x, y)| system.trace(x, y, spec.n_steps))
        .collect()
}
