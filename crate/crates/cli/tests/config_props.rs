use proptest::prelude::*;

use tennis_cli::config::parse_config;

fn real() -> impl Strategy<Value = f64> {
    prop_oneof![0.001f64..1000.0, (1u32..100).prop_map(|n| n as f64 * 1e-6)]
}

fn tennis_text() -> impl Strategy<Value = String> {
    (
        real(),
        prop::collection::btree_map(1u32..10, (-0.1f64..0.1, -0.1f64..0.1), 0..4),
        0u64..1000,
        1usize..50,
        real(),
        prop::option::of(real()),
    )
        .prop_map(|(g, hs, seed, grid, e_lo, v0)| {
            let mut s = format!("[map]\nkind = tennis\ng = {g}\nroot_tol = 1e-11\n[profile]\n");
            for (k, (c, d)) in hs {
                s += &format!("harmonic = {k}, {c:e}, {d}\n");
            }
            s += &format!("[ensemble]\nt_grid = {grid}\ne_lo = {e_lo}\ne_hi = {}\n", e_lo * 2.0);
            s += &format!("[run]\nseed = {seed}\n");
            if let Some(v) = v0 {
                s += &format!("v0 = {v}\n");
            }
            s
        })
}

proptest! {
    #[test]
    fn serialisation_is_idempotent(text in tennis_text()) {
        let once = parse_config(&text).unwrap();
        let normal = once.to_text();
        let twice = parse_config(&normal).unwrap();
        prop_assert_eq!(&once, &twice);
        prop_assert_eq!(normal, twice.to_text());
    }

    #[test]
    fn standard_round_trip(k in 0.0f64..10.0, seed in 0u64..u64::MAX / 2) {
        let text = format!("[map]\nkind = standard\nk = {k}\n[run]\nseed = {seed}\n");
        let c = parse_config(&text).unwrap();
        prop_assert_eq!(parse_config(&c.to_text()).unwrap(), c);
    }

    #[test]
    fn never_panics(text in "[\\[\\]a-z_=0-9., \n#-]{0,200}") {
        let _ = parse_config(&text);
    }
}
