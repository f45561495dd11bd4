use helper_mpc::expo::{
    int, leakage_bound, run_exp, statistical_leakage, FixedInts, KeyFlow, SecurityParam,
};
use helper_mpc::sharing::{Rat, TapeSet};
use helper_mpc::Error;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

fn pow(c: i64, a: u32) -> i64 {
    (0..a).fold(1, |acc, _| acc * c)
}

fn min1(r: Rat) -> Rat {
    if r > Rat::one() {
        Rat::one()
    } else {
        r
    }
}

/// Given the exponent key K, the helper sees X = c^(a+K) + K1 (uniform
/// shift) and, conditioned on X, K3 + c^a = X / c^K - K2 (uniform shift).
/// Between two exponents the shifts differ by c^K * d and d, so the overlap
/// is (1 - x)(1 - y) and the distance is x + y - xy, averaged over K.
fn tv_oracle(c: i64, a1: u32, a2: u32, n: i64, key_range: u32) -> Rat {
    let d = Rat::from_integer((pow(c, a1) - pow(c, a2)).abs().into());
    let n = Rat::from_integer(n.into());
    let total = (0..key_range).fold(Rat::zero(), |acc, k| {
        let x = min1(Rat::from_integer(pow(c, k).into()) * &d / &n);
        let y = min1(&d / &n);
        acc + &x + &y - &x * &y
    });
    total / Rat::from_integer((key_range as i64).into())
}

#[test]
fn exact_powers_for_every_key_in_small_ranges() {
    let mut rng = ChaCha20Rng::seed_from_u64(2);
    for c in [2i64, 3] {
        for a in 0..=10u32 {
            let want = Rat::from_integer(pow(c, a).into());
            let n = pow(c, a);
            let sp = SecurityParam::new(0, n as u64).with_exponent_key_range(2);
            let mut triples = Vec::new();
            if n <= 64 {
                for k in 0..2 {
                    for k1 in 0..n {
                        for k2 in 0..n {
                            triples.push((k, k1, k2));
                        }
                    }
                }
            } else {
                for k in 0..2 {
                    for k1 in [0, 1, n - 1] {
                        for k2 in [0, 1, n - 1] {
                            triples.push((k, k1, k2));
                        }
                    }
                }
                for _ in 0..64 {
                    triples.push((
                        rng.gen_range(0..2),
                        rng.gen_range(0..n),
                        rng.gen_range(0..n),
                    ));
                }
            }
            for (k, k1, k2) in triples {
                let mut keys = FixedInts::new(vec![int(k), int(k1), int(k2)]);
                let out =
                    run_exp(&int(c), &int(a as i64), &sp, KeyFlow::Corrected, &mut keys).unwrap();
                assert_eq!(out.value, want, "{c}^{a} keys {k} {k1} {k2}");
                assert_eq!(out.cost.rounds, 2);
            }
        }
    }
}

#[test]
fn leakage_equals_the_oracle_and_shrinks_with_lambda() {
    for (c, a1, a2, b, kr) in [
        (2i64, 1u32, 2u32, 8u64, 2u32),
        (2, 0, 3, 8, 3),
        (3, 1, 2, 9, 2),
        (3, 0, 1, 27, 2),
    ] {
        let mut last: Option<Rat> = None;
        for lambda in 0..=3 {
            let sp = SecurityParam::new(lambda, b).with_exponent_key_range(kr);
            let n = b as i64 * (1 << lambda);
            let tv = statistical_leakage(
                &int(c),
                &int(a1 as i64),
                &int(a2 as i64),
                &sp,
                KeyFlow::Corrected,
            )
            .unwrap();
            assert_eq!(
                tv,
                tv_oracle(c, a1, a2, n, kr),
                "c={c} a={a1},{a2} lambda={lambda}"
            );
            let d = (pow(c, a1) - pow(c, a2)).abs();
            let spread = pow(c, kr - 1) * d + d;
            let bound = Rat::new(spread.into(), n.into());
            assert!(tv <= bound);
            assert_eq!(
                leakage_bound(&int(c), &int(a1 as i64), &int(a2 as i64), &sp).unwrap(),
                bound
            );
            if let Some(prev) = &last {
                assert!(&tv <= prev);
            }
            last = Some(tv);
        }
    }
}

#[test]
fn literal_flow_is_wrong_for_nonzero_k1() {
    let sp = SecurityParam::new(0, 8).with_exponent_key_range(2);
    let mut keys = FixedInts::new(vec![int(0), int(0), int(5)]);
    let ok = run_exp(&int(2), &int(3), &sp, KeyFlow::HelperChosen, &mut keys).unwrap();
    assert_eq!(ok.value, int(8));
    let mut keys = FixedInts::new(vec![int(1), int(3), int(5)]);
    let bad = run_exp(&int(2), &int(3), &sp, KeyFlow::HelperChosen, &mut keys).unwrap();
    assert_ne!(bad.value, int(8));
}

#[test]
fn seeded_runs_are_reproducible() {
    let sp = SecurityParam::new(8, 1 << 12);
    let run = |seed| {
        run_exp(
            &int(3),
            &int(7),
            &sp,
            KeyFlow::Corrected,
            &mut TapeSet::from_u64(seed),
        )
        .unwrap()
    };
    let (a, b) = (run(4), run(4));
    assert_eq!(a.transcript, b.transcript);
    assert_eq!(a.value, int(2187));
}

#[test]
fn negative_exponent_reveals_a_fraction() {
    let sp = SecurityParam::new(4, 64);
    let out = run_exp(
        &int(2),
        &int(-5),
        &sp,
        KeyFlow::Corrected,
        &mut TapeSet::from_u64(1),
    )
    .unwrap();
    assert_eq!(out.value, Rat::new(1.into(), 32.into()));
    assert!(out.value.is_positive());
}

#[test]
fn out_of_bound_values_are_rejected() {
    let sp = SecurityParam::new(4, 100);
    let err = run_exp(
        &int(3),
        &int(5),
        &sp,
        KeyFlow::Corrected,
        &mut TapeSet::from_u64(1),
    )
    .unwrap_err();
    assert!(matches!(err, Error::ValueBound(_)));
}
