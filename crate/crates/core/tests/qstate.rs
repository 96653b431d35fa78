use std::f64::consts::{PI, TAU};

use proptest::prelude::*;
use qfp::qstate::{delta_max, overlap, search_encoding, tetrahedral_encoding, BlochState, Encoding};

/// `(1 + n.n') / 2` from Bloch vectors built by hand.
fn overlap_from_vectors(a: (f64, f64), b: (f64, f64)) -> f64 {
    let v = |(t, p): (f64, f64)| [t.sin() * p.cos(), t.sin() * p.sin(), t.cos()];
    let (u, w) = (v(a), v(b));
    (1.0 + u[0] * w[0] + u[1] * w[1] + u[2] * w[2]) / 2.0
}

fn state() -> impl Strategy<Value = (f64, f64)> {
    (0.0..=PI, -10.0..10.0f64)
}

#[test]
fn three_state_grid_oracle() {
    // Rotate state 0 to the pole and state 1 into the phi = 0 half-plane; grid the rest.
    let steps = 90;
    let mut best = f64::INFINITY;
    for i in 0..=steps {
        let t1 = PI * i as f64 / steps as f64;
        let o01 = overlap_from_vectors((0.0, 0.0), (t1, 0.0));
        if o01 >= best {
            continue;
        }
        for j in 0..=steps {
            let t2 = PI * j as f64 / steps as f64;
            let o02 = overlap_from_vectors((0.0, 0.0), (t2, 0.0));
            for k in 0..2 * steps {
                let p2 = TAU * k as f64 / (2 * steps) as f64;
                let o12 = overlap_from_vectors((t1, 0.0), (t2, p2));
                best = best.min(o01.max(o02).max(o12));
            }
        }
    }
    assert!(best >= 0.25 - 1e-12, "grid beat 1/4: {best}");
    assert!(best <= 0.25 + 1e-3, "grid never got near 1/4: {best}");

    let equatorial: Vec<_> = (0..3).map(|w| BlochState::new(PI / 2.0, TAU * w as f64 / 3.0).unwrap()).collect();
    let enc = Encoding::new(equatorial).unwrap();
    assert!((delta_max(&enc) - 0.25).abs() < 1e-12);

    let found = search_encoding(3, 2000, 11).unwrap();
    assert!(found.delta_max() <= 0.25 + 1e-6);
}

#[test]
fn search_reaches_tetrahedral_optimum() {
    let found = search_encoding(4, 2000, 3).unwrap();
    assert!(found.delta_max() <= 1.0 / 3.0 + 1e-6, "{}", found.delta_max());
    assert!(found.delta_max() >= tetrahedral_encoding().delta_max() - 1e-9);
}

#[test]
fn search_is_seed_deterministic() {
    let a = search_encoding(5, 300, 42).unwrap();
    let b = search_encoding(5, 300, 42).unwrap();
    assert_eq!(a, b);
}

#[test]
fn csv_round_trip() {
    for enc in [tetrahedral_encoding(), search_encoding(6, 200, 1).unwrap()] {
        assert_eq!(Encoding::from_csv(&enc.to_csv()).unwrap(), enc);
    }
}

proptest! {
    #[test]
    fn overlap_is_symmetric(a in state(), b in state()) {
        let (sa, sb) = (BlochState::new(a.0, a.1).unwrap(), BlochState::new(b.0, b.1).unwrap());
        prop_assert!((overlap(&sa, &sb) - overlap(&sb, &sa)).abs() < 1e-12);
    }

    #[test]
    fn overlap_ignores_common_phase_shift(a in state(), b in state(), shift in -10.0..10.0f64) {
        let before = overlap(&BlochState::new(a.0, a.1).unwrap(), &BlochState::new(b.0, b.1).unwrap());
        let after = overlap(
            &BlochState::new(a.0, a.1 + shift).unwrap(),
            &BlochState::new(b.0, b.1 + shift).unwrap(),
        );
        prop_assert!((before - after).abs() < 1e-12);
    }

    #[test]
    fn overlap_matches_bloch_vectors(a in state(), b in state()) {
        let o = overlap(&BlochState::new(a.0, a.1).unwrap(), &BlochState::new(b.0, b.1).unwrap());
        prop_assert!((0.0..=1.0).contains(&o));
        prop_assert!((o - overlap_from_vectors(a, b)).abs() < 1e-12);
    }

    #[test]
    fn states_are_normalized(a in state()) {
        let s = BlochState::new(a.0, a.1).unwrap();
        let [c0, c1] = s.amplitudes();
        prop_assert!((c0.norm_sqr() + c1.norm_sqr() - 1.0).abs() < 1e-12);
        prop_assert!((0.0..TAU).contains(&s.phi()));
    }
}
