mod common;

use helper_mpc::circuit::{
    all_pairs, cost_bound, eval_plain, evaluate, parse_circuit, per_gate_bits, plan, AndChoice,
    Step,
};
use helper_mpc::sharing::TapeSet;
use helper_mpc::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

#[test]
fn all_pairs_measures_the_table_formula() {
    for (v, want) in [(4usize, 22u64), (6, 39), (10, 85)] {
        let c = all_pairs(v);
        let s = plan(&c);
        let mut rng = ChaCha20Rng::seed_from_u64(v as u64);
        for _ in 0..4 {
            let inputs: Vec<bool> = (0..v).map(|_| rng.gen()).collect();
            let ev = evaluate(&c, &s, &inputs, &mut TapeSet::from_u64(rng.gen())).unwrap();
            assert_eq!(ev.cost.computation_bits, want);
            assert_eq!(ev.outputs, common::plain_eval(&c.to_netlist(), &inputs));
        }
    }
}

#[test]
fn t_and_circuits_stay_under_4v_plus_t() {
    let mut rng = ChaCha20Rng::seed_from_u64(45);
    for _ in 0..200 {
        let v = rng.gen_range(2..=8usize);
        let t = rng.gen_range(1..=v * (v - 1) / 2 + 3);
        let mut text = format!(
            "in {}\n",
            (0..v)
                .map(|i| format!("x{i}"))
                .collect::<Vec<_>>()
                .join(" ")
        );
        for g in 0..t {
            let a = rng.gen_range(0..v);
            let b = (a + rng.gen_range(1..v)) % v;
            text.push_str(&format!("g{g} AND x{a} x{b}\n"));
        }
        let c = parse_circuit(&text).unwrap();
        let s = plan(&c);
        let ev = evaluate(&c, &s, &vec![true; v], &mut TapeSet::from_u64(1)).unwrap();
        let bound = 4 * v as u64 + t as u64;
        assert!(ev.cost.computation_bits <= bound, "{text}");
        assert_eq!(ev.cost.computation_bits, s.predicted_bits());
    }
}

#[test]
fn cost_bound_is_one_bit_per_gate_asymptotically() {
    for v in 4..40u64 {
        let t = v * (v - 1) / 2;
        if t >= 4 * v {
            assert!(cost_bound(v, t).unwrap() as f64 / t as f64 <= 2.0);
        }
    }
    assert_eq!(cost_bound(10, 45), Ok(85));
    assert!(matches!(
        cost_bound(10, 46),
        Err(Error::CostBoundRange { .. })
    ));
}

#[test]
fn shared_left_operand_is_reused() {
    let c = parse_circuit("in a b c\ng1 AND a b\ng2 AND a c\nout g1 g2").unwrap();
    let s = plan(&c);
    let choices: Vec<_> = s
        .gates
        .iter()
        .map(|g| match &g.step {
            Step::And { choice, .. } => *choice,
            other => panic!("{other:?}"),
        })
        .collect();
    assert_eq!(choices, [AndChoice::Fresh, AndChoice::ReuseLeft]);
    let ev = evaluate(&c, &s, &[true, true, false], &mut TapeSet::from_u64(3)).unwrap();
    let per_gate = per_gate_bits(&s, &ev.cost);
    assert_eq!(per_gate["g1"], (5, 5));
    assert_eq!(per_gate["g2"], (3, 3));
}

#[test]
fn triangle_fits_two_slots_per_variable() {
    let c = parse_circuit("in a b c\ng1 AND a b\ng2 AND a c\ng3 AND b c\nout g1 g2 g3").unwrap();
    let s = plan(&c);
    for m in 0..8 {
        let inputs = common::bits(m, 3);
        let ev = evaluate(&c, &s, &inputs, &mut TapeSet::from_u64(m)).unwrap();
        assert_eq!(ev.outputs, common::plain_eval(&c.to_netlist(), &inputs));
    }
}

#[test]
fn random_circuits_match_prediction_and_plaintext() {
    let mut rng = ChaCha20Rng::seed_from_u64(8);
    for _ in 0..100 {
        let text = common::random_netlist(&mut rng, 5, 8);
        let c = parse_circuit(&text).unwrap();
        let s = plan(&c);
        let inputs: Vec<bool> = (0..c.inputs.len()).map(|_| rng.gen()).collect();
        let ev = evaluate(&c, &s, &inputs, &mut TapeSet::from_u64(rng.gen())).unwrap();
        assert_eq!(ev.outputs, common::plain_eval(&text, &inputs), "{text}");
        assert_eq!(ev.outputs, eval_plain(&c, &inputs).unwrap());
        assert_eq!(ev.cost.computation_bits, s.predicted_bits(), "{text}");
    }
}

#[test]
fn parse_errors_carry_line_numbers() {
    let err = parse_circuit("in a b\n\ng1 AND a g9\n").unwrap_err();
    assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
    let err = parse_circuit("in a\ng1 NOT a\ng2 XOR g1 g3\ng3 NOT g2\n").unwrap_err();
    assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
}

#[test]
fn missing_inputs_are_reported() {
    let c = parse_circuit("in a b\ng1 AND a b\nout g1").unwrap();
    let err = evaluate(&c, &plan(&c), &[true], &mut TapeSet::from_u64(0)).unwrap_err();
    assert!(matches!(err, Error::MissingInput(_)));
    assert!(matches!(
        c.assignment(&["a=1".into()]),
        Err(Error::MissingInput(_))
    ));
}
