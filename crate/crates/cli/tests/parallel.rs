//! The rayon drivers return exactly what the sequential ones do.

use tennis_cli::parallel;
use tennis_core::explorer::{self, EnsembleSpec, ProbeSpec};
use tennis_core::{RacketProfile, StandardMap, TennisParams};

#[test]
fn ensemble_matches_sequential() {
    let p = TennisParams::new(RacketProfile::cosine(0.01), 1.0).unwrap();
    let spec = EnsembleSpec { t_grid: 5, e_grid: 4, e_range: (50.0, 60.0), n_steps: 300, seed: 17 };
    assert_eq!(parallel::ensemble_run(&p, &spec).unwrap(), explorer::ensemble_run(&p, &spec).unwrap());
}

#[test]
fn scan_matches_sequential() {
    let m = StandardMap::new(0.8).unwrap();
    let probe = ProbeSpec { t_count: 4, n_steps: 500, beta: 0.1 };
    assert_eq!(
        parallel::layer_scan(&m, (0.5, 5.0), 7, &probe).unwrap(),
        explorer::layer_scan(&m, (0.5, 5.0), 7, &probe).unwrap()
    );
}

#[test]
fn diffusion_matches_sequential() {
    let p = TennisParams::new(RacketProfile::cosine(0.01), 1.0).unwrap();
    let spec = EnsembleSpec { t_grid: 3, e_grid: 3, e_range: (50.0, 60.0), n_steps: 500, seed: 3 };
    assert_eq!(
        parallel::diffusion_search(&p, 8.0, 1_000_000, &spec).unwrap(),
        explorer::diffusion_search(&p, 8.0, 1_000_000, &spec).unwrap()
    );
}
