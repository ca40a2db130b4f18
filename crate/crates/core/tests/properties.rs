use std::f64::consts::TAU;

use proptest::prelude::*;

use tennis_core::explorer::{ensemble_run, rotation_number, EnsembleSpec};
use tennis_core::kam::{
    ab_along_orbit, d_bounds, refined_criterion, second_variation, simple_criterion, tennis_ab_asymptotic, ABRecord,
    EIGEN_TOL, MARGIN_TOL,
};
use tennis_core::sturm::{min_eigenvalue, sturm_count};
use tennis_core::{Harmonic, ProfileNorms, RacketProfile, StandardMap, TennisParams, TwistSystem};

fn profile_strategy() -> impl Strategy<Value = RacketProfile> {
    (
        prop::collection::vec((1u32..=8, -0.01f64..0.01, -0.01f64..0.01), 1..=4),
        -1.0f64..1.0,
    )
        .prop_map(|(hs, mean)| {
            let mut harmonics: Vec<Harmonic> = Vec::new();
            for (k, c, s) in hs {
                if harmonics.iter().all(|h| h.k != k) {
                    harmonics.push(Harmonic::new(k, c, s));
                }
            }
            RacketProfile::new(harmonics, mean)
        })
}

fn tennis() -> impl Strategy<Value = TennisParams> {
    (profile_strategy(), 0.5f64..2.0).prop_map(|(p, g)| TennisParams::new(p, g).unwrap())
}

/// Tennis system with a state `(t, e)`, `e ∈ [e_*, 100 e_*]`.
fn tennis_state() -> impl Strategy<Value = (TennisParams, f64, f64)> {
    (tennis(), -2.0f64..2.0, 1.0f64..100.0).prop_map(|(p, t, s)| {
        let e = p.e_star() * s;
        (p, t, e)
    })
}

/// Eigenvalues of a small symmetric matrix by cyclic Jacobi rotations.
fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _ in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j].powi(2)).sum();
        if off < 1e-24 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i][i]).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn profile_is_periodic(p in profile_strategy(), t in -5.0f64..5.0) {
        let (a, b) = (p.eval_derivs(t), p.eval_derivs(t + 1.0));
        prop_assert!((a.f - b.f).abs() < 1e-12);
        prop_assert!((a.df - b.df).abs() < 1e-10);
        prop_assert!((a.ddf - b.ddf).abs() < 1e-9);
    }

    #[test]
    fn norms_stable_under_refinement(p in profile_strategy()) {
        let (a, b) = (p.norms(1024), p.norms(2048));
        prop_assert!((a.m - b.m).abs() < 1e-9);
        prop_assert!((a.big_m - b.big_m).abs() < 1e-9);
        prop_assert!((a.sup_df - b.sup_df).abs() < 1e-9);
        prop_assert!(a.m <= a.big_m);
        prop_assert!((a.sup_ddf - a.m.abs().max(a.big_m.abs())).abs() < 1e-15);
        prop_assert!((p.eval_derivs(a.argmin_ddf).ddf - a.m).abs() < 1e-9);
    }

    #[test]
    fn main_condition_monotone(m in -2.0f64..0.0, dm in 0.0f64..1.0, big_m in 0.01f64..2.0) {
        let base = ProfileNorms { m, big_m, sup_df: 0.1, sup_ddf: big_m.max(-m), argmin_ddf: 0.0, max_df: 0.1 };
        let lower = ProfileNorms { m: m - dm, ..base };
        if base.check_main_condition(1.0).holds {
            prop_assert!(lower.check_main_condition(1.0).holds);
        }
    }

    #[test]
    fn lift_equivariance((p, t, e) in tennis_state()) {
        let v = (2.0 * e).sqrt();
        let a = p.step_tv(t, v).unwrap();
        let b = p.step_tv(t + 1.0, v).unwrap();
        prop_assert!((b.t - a.t - 1.0).abs() < 1e-9);
        prop_assert!((b.value - a.value).abs() < 1e-9);
    }

    #[test]
    fn energy_and_velocity_steps_agree((p, t, e) in tennis_state()) {
        let a = p.step_tv(t, (2.0 * e).sqrt()).unwrap();
        let b = p.step_te(t, e).unwrap();
        prop_assert!((a.t - b.t).abs() < 1e-10);
        prop_assert!((0.5 * a.value * a.value - b.value).abs() < 1e-10 * (1.0 + e));
    }

    #[test]
    fn elastic_reflection((p, t, e) in tennis_state()) {
        let v = (2.0 * e).sqrt();
        let s = p.step_tv(t, v).unwrap();
        let (d0, d1) = (p.profile.eval_derivs(t).df, p.profile.eval_derivs(s.t).df);
        let (w, wbar) = (v + d0, s.value + d1);
        prop_assert!((wbar + w - p.g * (s.t - t) - 2.0 * d1).abs() < 1e-9);
        prop_assert!(s.residual <= p.root_tol * (1.0 + (v + d0) * (s.t - t)));
        // the ball is hit on the way down
        prop_assert!(s.t - t > v / p.g);
    }

    #[test]
    fn smallest_root_rule((p, t, e) in tennis_state()) {
        let v = (2.0 * e).sqrt();
        let w = v + p.profile.eval_derivs(t).df;
        let bt = p.solve_bounce_time(t, w).unwrap();
        let f0 = p.profile.value(t);
        for i in 1..=64 {
            let s = bt.tau * i as f64 / 65.0;
            let gap = f0 - p.profile.value(t + s) + w * s - 0.5 * p.g * s * s;
            prop_assert!(gap > 0.0);
        }
    }

    #[test]
    fn symplectic_and_twist((p, t, e) in tennis_state()) {
        let j = p.jacobian_te(t, e).unwrap();
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        prop_assert!((det - 1.0).abs() < 1e-9, "det {}", det);
        prop_assert!(j[0][1] > 0.0);
    }

    #[test]
    fn generating_function_reproduces_map((p, t, e) in tennis_state()) {
        let s = p.step_te(t, e).unwrap();
        let h = p.gen_fun(t, s.t).unwrap();
        prop_assert!((h.h1 + e).abs() < 1e-8 * (1.0 + e));
        prop_assert!((h.h2 - s.value).abs() < 1e-8 * (1.0 + e));
        prop_assert!(h.h12 < 0.0);
        let shifted = p.gen_fun(t + 1.0, s.t + 1.0).unwrap();
        prop_assert!((shifted.h - h.h).abs() < 1e-9 * (1.0 + h.h.abs()));
    }

    #[test]
    fn retreat_inverts_step((p, t, e) in tennis_state()) {
        let s = p.step_te(t, e).unwrap();
        let (t0, e0) = p.retreat_te(s.t, s.value).unwrap();
        prop_assert!((t0 - t).abs() < 1e-8 * (1.0 + t.abs()));
        prop_assert!((e0 - e).abs() < 1e-7 * (1.0 + e));
    }

    #[test]
    fn standard_map_consistency(k in 0.0f64..6.0, x in -10.0f64..10.0, y in -3.0f64..3.0) {
        let m = StandardMap::new(k).unwrap();
        let (x1, y1) = m.standard_step(x, y);
        let (x2, _) = m.standard_step(x1, y1);
        let h = m.standard_gen(x, x1);
        prop_assert!((h.h1 + y).abs() < 1e-12 * (1.0 + y.abs() + k));
        prop_assert!((h.h2 - y1).abs() < 1e-12 * (1.0 + y1.abs() + k));
        let r = ab_along_orbit(&m, x, x1, x2).unwrap();
        let (a, b) = m.standard_ab(x1);
        prop_assert!((r.a - a).abs() < 1e-12 && r.b == b && r.b_next == b);
        let j = m.jacobian(x, y).unwrap();
        prop_assert!((j[0][0] * j[1][1] - j[0][1] * j[1][0] - 1.0).abs() < 1e-12);
        let p = m.standard_gen(x + TAU, x1 + TAU);
        prop_assert!((p.h - h.h).abs() < 1e-9);
    }

    #[test]
    fn dbounds_roots(b in 0.1f64..20.0, c in 0.01f64..5.0) {
        let d = d_bounds(b, b, c, c);
        if b * b - 4.0 * c > 0.0 {
            let (dp, dm) = (d.d_plus.unwrap(), d.d_minus.unwrap());
            prop_assert!((dp * dp - b * dp + c).abs() < 1e-12 * (1.0 + b * b));
            // D⁻ is the reciprocal of the large root of d² − Bd + C
            let r = 1.0 / dm;
            prop_assert!((r * r - b * r + c).abs() < 1e-12 * (1.0 + b * b));
            prop_assert!(dp >= dm && dm > 0.0);
            if c == 1.0 {
                prop_assert!((dp * dm - 1.0).abs() < 1e-12);
            }
        } else {
            prop_assert!(!d.is_defined());
        }
    }

    #[test]
    fn standard_dbounds_product(k in 0.01f64..10.0) {
        let d = StandardMap::new(k).unwrap().standard_dbounds().unwrap();
        prop_assert!((d.d_plus.unwrap() * d.d_minus.unwrap() - 1.0).abs() < 1e-12);
        prop_assert!(d.discriminant_plus > 0.0);
    }

    #[test]
    fn simple_implies_second_variation(k in 2.01f64..8.0, y in -2.0f64..2.0) {
        let m = StandardMap::new(k).unwrap();
        let (xp, _) = m.retreat(0.0, y).unwrap();
        let (x1, y1) = m.standard_step(0.0, y);
        let (x2, _) = m.standard_step(x1, y1);
        let rec = ab_along_orbit(&m, xp, 0.0, x1).unwrap();
        let simple = simple_criterion(&[rec], MARGIN_TOL).unwrap();
        prop_assert!(simple.conclusive);
        let sv = second_variation(&m, &[xp, 0.0, x1, x2], EIGEN_TOL).unwrap();
        prop_assert!(sv.conclusive);
    }

    #[test]
    fn refined_tends_to_simple(a in -1.0f64..1.0, b in 0.5f64..2.0, bn in 0.5f64..2.0) {
        let recs = [ABRecord { x: 0.0, a, b, b_next: bn }];
        let d = d_bounds(1e10, 1e10, 1.0, 1.0);
        let r = refined_criterion(&recs, &d, MARGIN_TOL).unwrap();
        prop_assert!((r.margin - a).abs() < 1e-9);
    }

    #[test]
    fn sturm_matches_jacobi(diag in prop::collection::vec(-5.0f64..5.0, 2..8), seed in prop::collection::vec(-3.0f64..3.0, 7)) {
        let n = diag.len();
        let off: Vec<f64> = seed[..n - 1].to_vec();
        let mut dense = vec![vec![0.0; n]; n];
        for i in 0..n {
            dense[i][i] = diag[i];
            if i + 1 < n {
                dense[i][i + 1] = off[i];
                dense[i + 1][i] = off[i];
            }
        }
        let mut eig = jacobi_eigenvalues(dense);
        eig.sort_by(f64::total_cmp);
        let lmin = min_eigenvalue(&diag, &off);
        prop_assert!((lmin - eig[0]).abs() < 1e-9);
        prop_assert_eq!(sturm_count(&diag, &off, eig[n - 1] + 1e-6), n);
    }

    #[test]
    fn enclosures_contain_orbit_values(t in 0.0f64..1.0, e in 100.0f64..2000.0) {
        let p = TennisParams::new(RacketProfile::cosine(0.01), 1.0).unwrap();
        let (tp, _) = p.retreat(t, e).unwrap();
        let (t1, _) = p.step(t, e).unwrap();
        let r = ab_along_orbit(&p, tp, t, t1).unwrap();
        let enc = tennis_ab_asymptotic(p.norms(), 1.0, e, p.profile.eval_derivs(t).ddf);
        prop_assert!(enc.a.contains(r.a));
        prop_assert!(enc.b.contains(r.b));
        prop_assert!(enc.b_next.contains(r.b_next));
    }

    #[test]
    fn integrable_rotation(e in 1.0f64..100.0, g in 0.5f64..2.0) {
        let p = TennisParams::new(RacketProfile::constant(0.0), g).unwrap();
        let seg = p.trace(0.3, e, 200).unwrap();
        let rot = rotation_number(&seg).unwrap();
        prop_assert!((rot.omega - 2.0 / g * (2.0 * e).sqrt()).abs() < 1e-12 * (1.0 + rot.omega));
    }
}

#[test]
fn ensemble_is_deterministic() {
    let p = TennisParams::new(RacketProfile::cosine(0.01), 1.0).unwrap();
    let spec = EnsembleSpec { t_grid: 3, e_grid: 2, e_range: (50.0, 60.0), n_steps: 200, seed: 4 };
    let a = ensemble_run(&p, &spec).unwrap();
    let b = ensemble_run(&p, &spec).unwrap();
    assert_eq!(a, b);
    for s in &a {
        assert!(s.e_min <= s.e_max && s.sup_minus_inf == s.e_max - s.e_min);
    }
}

#[test]
fn standard_map_margins_continuous_in_k() {
    let margin = |k: f64| {
        let m = StandardMap::new(k).unwrap();
        m.standard_ab(0.0).0
    };
    let (mut lo, mut hi) = (1.0, 3.0);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if margin(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    assert!((lo - 2.0).abs() < 1e-9);
}
