use std::collections::HashSet;

use num_rational::Rational64;
use qfp::classical::{
    best_success_shared_random, evaluate_protocol, min_wcs_error_two_sided, wcs_error_one_sided, ClassicalEncoding,
    RogerClass, RogerRule,
};

fn r(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

/// One shared encoding and every deterministic rule over the `f x f` fingerprint pairs;
/// keeps the rules that never err on equal messages.
fn one_sided_joint_oracle(m: usize, g: u32) -> Rational64 {
    let f = 1usize << g;
    let cells = f * f;
    let mut best = r(1, 1);
    for code in 0..f.pow(m as u32) {
        let enc: Vec<usize> = (0..m).map(|w| (code / f.pow(w as u32)) % f).collect();
        for rule in 0..(1u32 << cells) {
            let says_equal = |x: usize, y: usize| (rule >> (enc[x] * f + enc[y])) & 1 == 1;
            if (0..m).any(|w| !says_equal(w, w)) {
                continue;
            }
            let collides = (0..m).any(|x| (0..m).any(|y| x != y && says_equal(x, y)));
            let worst = if collides { r(1, 1) } else { r(0, 1) };
            best = best.min(worst);
        }
    }
    best
}

#[test]
fn one_sided_matches_joint_enumeration() {
    for g in 1..=2 {
        for m in 2..=4 {
            assert_eq!(wcs_error_one_sided(m, g).unwrap(), one_sided_joint_oracle(m, g), "m={m} g={g}");
        }
    }
    assert_eq!(wcs_error_one_sided(4, 1).unwrap(), r(1, 1));
    assert_eq!(wcs_error_one_sided(2, 1).unwrap(), r(0, 1));
    assert_eq!(wcs_error_one_sided(5, 2).unwrap(), r(1, 1));
}

#[test]
fn two_sided_matches_rule_grid() {
    // Cells are independent, so the optimum lies on the quarter grid of rules.
    let grid: Vec<Rational64> = (0..=4).map(|i| r(i, 4)).collect();
    for m in 2..=4 {
        let mut best = r(1, 1);
        for fa in 0..(1usize << m) {
            for fb in 0..(1usize << m) {
                let bit = |t: usize, w: usize| (t >> w) & 1;
                for q in 0..grid.len().pow(4) {
                    let qc = |a: usize, b: usize| grid[(q / grid.len().pow((2 * a + b) as u32)) % grid.len()];
                    let mut worst = r(0, 1);
                    for x in 0..m {
                        for y in 0..m {
                            let p = qc(bit(fa, x), bit(fb, y));
                            worst = worst.max(if x == y { r(1, 1) - p } else { p });
                        }
                    }
                    best = best.min(worst);
                }
            }
        }
        assert_eq!(min_wcs_error_two_sided(m).unwrap(), best, "m={m}");
    }
    assert_eq!(min_wcs_error_two_sided(3).unwrap(), r(1, 2));
    for m in 2..=6 {
        assert!(min_wcs_error_two_sided(m).unwrap() <= wcs_error_one_sided(m, 1).unwrap());
    }
}

/// Independent one-shared-bit solver. A joint encoding packs Alice's four bits in the low
/// nibble and Bob's in the high one. Each message pair is classified by the two
/// fingerprint cells it lands in and whether it is an equal pair; the set of classes is
/// all that matters to Roger.
fn one_bit_game_classes() -> HashSet<u32> {
    let cell = |e: usize, x: usize, y: usize| ((e >> x) & 1) * 2 + ((e >> (4 + y)) & 1);
    let mut masks = HashSet::new();
    for e0 in 0..256 {
        for e1 in e0..256 {
            let mut mask = 0u32;
            for x in 0..4 {
                for y in 0..4 {
                    let class = (cell(e0, x, y) * 4 + cell(e1, x, y)) * 2 + usize::from(x == y);
                    mask |= 1 << class;
                }
            }
            masks.insert(mask);
        }
    }
    masks
}

fn class_success(class: u32, q: [f64; 4]) -> f64 {
    let equal = class & 1 == 1;
    let (c0, c1) = ((class >> 1) / 4, (class >> 1) % 4);
    let score = |c: u32| if equal { q[c as usize] } else { 1.0 - q[c as usize] };
    (score(c0) + score(c1)) / 2.0
}

fn game_value(masks: &HashSet<u32>, rules: &[[f64; 4]]) -> f64 {
    let mut best = 0.0f64;
    for &mask in masks {
        let classes: Vec<u32> = (0..32).filter(|c| mask >> c & 1 == 1).collect();
        for &q in rules {
            let v = classes.iter().map(|&c| class_success(c, q)).fold(1.0, f64::min);
            best = best.max(v);
        }
    }
    best
}

#[test]
fn one_shared_bit_matches_independent_solver() {
    let masks = one_bit_game_classes();
    let pure: Vec<[f64; 4]> = (0..16).map(|b| [0, 1, 2, 3].map(|i| f64::from((b >> i) & 1))).collect();
    let steps = 6;
    let grid: Vec<[f64; 4]> = (0..(steps + 1usize).pow(4))
        .map(|i| [0, 1, 2, 3].map(|c| ((i / (steps + 1).pow(c)) % (steps + 1)) as f64 / steps as f64))
        .collect();

    let pure_value = game_value(&masks, &pure);
    let lib_pure = best_success_shared_random(4, 1, RogerClass::Pure).unwrap();
    assert!((pure_value - 0.5).abs() < 1e-12);
    assert_eq!(lib_pure.best_success, r(1, 2));

    // 2/3 sits on the sixths grid, so the grid search attains the exact optimum here
    let grid_value = game_value(&masks, &grid);
    let lib_mixed = best_success_shared_random(4, 1, RogerClass::Mixed).unwrap();
    assert!((grid_value - 2.0 / 3.0).abs() < 1e-12, "{grid_value}");
    assert_eq!(lib_mixed.best_success, r(2, 3));
}

#[test]
fn witnesses_reproduce_and_values_grow_with_shared_bits() {
    let mut previous = [r(0, 1), r(0, 1)];
    for k in 0..=1 {
        for (i, class) in [RogerClass::Pure, RogerClass::Mixed].into_iter().enumerate() {
            let report = best_success_shared_random(4, k, class).unwrap();
            assert_eq!(report.evaluate().unwrap(), report.best_success);
            assert!(report.best_success >= previous[i]);
            assert!(report.best_success <= r(2, 3));
            if class == RogerClass::Pure {
                assert!(report.roger_rule.is_pure());
            }
            previous[i] = report.best_success;
        }
        assert!(previous[1] >= previous[0]);
    }
    assert_eq!(previous, [r(1, 2), r(2, 3)]);
}

#[test]
fn no_shared_randomness() {
    assert_eq!(best_success_shared_random(4, 0, RogerClass::Pure).unwrap().best_success, r(0, 1));
    let mixed = best_success_shared_random(4, 0, RogerClass::Mixed).unwrap();
    assert_eq!(mixed.best_success, r(1, 1) - min_wcs_error_two_sided(4).unwrap());
    for m in 2..=4 {
        let v = best_success_shared_random(m, 0, RogerClass::Mixed).unwrap().best_success;
        assert_eq!(v, r(1, 1) - min_wcs_error_two_sided(m).unwrap(), "m={m}");
    }
}

#[test]
fn hand_built_protocols() {
    // identical single-bit parities: equal pairs always agree, half the unequal pairs collide
    let alice = ClassicalEncoding::new(1, vec![vec![0, 0, 1, 1], vec![0, 1, 0, 1]]).unwrap();
    let rule = RogerRule::new([[r(2, 3), r(0, 1)], [r(0, 1), r(2, 3)]]).unwrap();
    assert_eq!(evaluate_protocol(&alice, &alice, &rule).unwrap(), r(2, 3));

    let short = ClassicalEncoding::new(1, vec![vec![0, 1, 0]]).unwrap();
    assert!(evaluate_protocol(&alice, &short, &rule).is_err());
}

#[test]
fn input_limits() {
    assert!(best_success_shared_random(4, 3, RogerClass::Pure).is_err());
    assert!(best_success_shared_random(5, 0, RogerClass::Pure).is_err());
    assert!(wcs_error_one_sided(4, 3).is_err());
    assert!(min_wcs_error_two_sided(1).is_err());
}

#[test]
fn two_shared_bits_beat_two_thirds() {
    // tables are [shared value][message]
    let alice = ClassicalEncoding::new(1, vec![vec![0, 0, 0, 0], vec![0, 0, 1, 1], vec![0, 1, 0, 1], vec![1, 0, 0, 1]])
        .unwrap();
    let bob = ClassicalEncoding::new(1, vec![vec![0, 0, 0, 0], vec![1, 1, 0, 0], vec![1, 0, 1, 0], vec![0, 1, 1, 0]])
        .unwrap();
    let differ = RogerRule::new([[r(0, 1), r(1, 1)], [r(1, 1), r(0, 1)]]).unwrap();
    assert_eq!(evaluate_protocol(&alice, &bob, &differ).unwrap(), r(3, 4));

    let one_hot: Vec<Vec<u8>> = (0..4).map(|s| (0..4).map(|x| u8::from(x == s)).collect()).collect();
    let shared = ClassicalEncoding::new(1, one_hot).unwrap();
    let rule = RogerRule::new([[r(3, 5), r(0, 1)], [r(0, 1), r(1, 1)]]).unwrap();
    assert_eq!(evaluate_protocol(&shared, &shared, &rule).unwrap(), r(7, 10));
}
