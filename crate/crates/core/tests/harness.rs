use helper_mpc::anf::Anf;
use helper_mpc::circuit::{parse_circuit, plan};
use helper_mpc::harness::{
    audit, audit_scenario, decrypting_pairs, enumerate_views, holdings_check, mutants, scenarios,
    tape_bits, CircuitProtocol, Execution, Protocol, Route, Scenario, ScenarioKind,
    ENUMERATION_BUDGET,
};
use helper_mpc::netsim::{PartyId, Phase, Sim};
use helper_mpc::sharing::{BitValue, KeySource, PartyPair};
use helper_mpc::{Error, Result};

/// Client sends `s ^ r` (padded) or `s & r` (not padded) to EVH.
struct Toy {
    padded: bool,
}

impl Protocol for Toy {
    fn name(&self) -> String {
        "toy".into()
    }
    fn arity(&self) -> usize {
        1
    }
    fn parties(&self) -> Vec<PartyId> {
        vec![PartyId::Evh]
    }
    fn expected(&self, s: &[bool]) -> Vec<bool> {
        vec![s[0]]
    }
    fn execute<B: BitValue>(
        &self,
        secrets: &[B],
        keys: &mut dyn KeySource<B>,
    ) -> Result<Execution<B>> {
        let mut sim = Sim::new();
        let r = keys.draw(PartyPair::new(PartyId::Client, PartyId::Kh), "r");
        sim.record_draw(PartyPair::new(PartyId::Client, PartyId::Kh), "r", r.clone())?;
        let m = if self.padded {
            secrets[0].xor(&r)
        } else {
            secrets[0].and(&r)
        };
        sim.put(PartyId::Client, "m", m, 0)?;
        sim.send(0, Phase::SecretSharing, PartyId::Client, PartyId::Evh, "m")?;
        Ok(Execution {
            outputs: vec![secrets[0].clone()],
            transcript: sim.finish(),
        })
    }
}

#[test]
fn toy_protocols_are_classified_by_both_routes() {
    for route in [Route::BruteForce, Route::Symbolic] {
        assert!(
            audit(&Toy { padded: true }, route).unwrap().secure(),
            "{route}"
        );
        assert!(
            !audit(&Toy { padded: false }, route).unwrap().secure(),
            "{route}"
        );
    }
}

#[test]
fn toy_view_multisets_by_hand() {
    // s ^ r: {0, 1} for both secrets. s & r: {0, 0} for s=0, {0, 1} for s=1.
    let d = enumerate_views(&Toy { padded: true }, PartyId::Evh).unwrap();
    assert!(d.is_uniform_across_secrets());
    assert_eq!(d.cardinality(&[false]), 2);
    let d = enumerate_views(&Toy { padded: false }, PartyId::Evh).unwrap();
    assert_eq!(d.by_secret[&vec![false]].get(&vec![false]), Some(&2));
    assert_eq!(d.by_secret[&vec![true]].get(&vec![true]), Some(&1));
}

#[test]
fn routes_agree_on_small_protocols() {
    let small = [
        Scenario::new(ScenarioKind::And4),
        Scenario::new(ScenarioKind::And3),
        Scenario::new(ScenarioKind::ReuseReencrypt),
        Scenario::new(ScenarioKind::ReuseLeft),
        Scenario::new(ScenarioKind::Fanin(1)),
    ];
    for s in small.iter().chain(&mutants()) {
        if tape_bits(s).unwrap() > 14 {
            continue;
        }
        let bf = audit_scenario(s, Route::BruteForce).unwrap();
        let sy = audit_scenario(s, Route::Symbolic).unwrap();
        assert_eq!(bf.correctness.pass, sy.correctness.pass, "{}", s.name());
        let verdicts = |r: &helper_mpc::harness::AuditReport| -> Vec<(PartyId, bool)> {
            r.parties.iter().map(|p| (p.party, p.pass)).collect()
        };
        assert_eq!(verdicts(&bf), verdicts(&sy), "{}", s.name());
    }
}

#[test]
fn every_view_multiset_has_full_size() {
    let s = Scenario::new(ScenarioKind::And3);
    let d = enumerate_views(&s, PartyId::Helper).unwrap();
    for secret in d.by_secret.keys() {
        assert_eq!(d.cardinality(secret), 1 << d.tape_bits);
    }
    assert_eq!(d.by_secret.len(), 4);
}

#[test]
fn shipped_protocols_pass_and_mutants_fail() {
    for s in scenarios() {
        assert!(
            audit_scenario(&s, Route::Auto).unwrap().pass(),
            "{}",
            s.name()
        );
    }
    for m in mutants() {
        let r = audit_scenario(&m, Route::Auto).unwrap();
        assert!(r.correctness.pass, "{}", m.name());
        assert!(!r.secure(), "{}", m.name());
        assert!(r.as_expected());
    }
}

#[test]
fn brute_force_refuses_large_tapes() {
    let s = Scenario::new(ScenarioKind::Fanin(2));
    assert!(tape_bits(&s).unwrap() > ENUMERATION_BUDGET);
    assert!(matches!(
        audit(&s, Route::BruteForce),
        Err(Error::EnumerationBudget { .. })
    ));
    assert!(audit(&s, Route::Symbolic).unwrap().pass());
}

#[test]
fn no_party_ends_with_a_decrypting_pair() {
    for s in scenarios() {
        assert!(holdings_check(&s).unwrap().is_empty(), "{}", s.name());
    }
    // a forwarded key next to its ciphertext is caught
    let leaky = Scenario::by_name("mutant-and4-leak").unwrap();
    assert!(!holdings_check(&leaky).unwrap().is_empty());
}

#[test]
fn decrypting_pairs_on_a_handmade_transcript() {
    let mut sim: Sim<Anf> = Sim::new();
    let ct = Anf::var(0).xor(&Anf::var(1));
    sim.hold_initial(PartyId::Evh, "ct", ct).unwrap();
    sim.hold_initial(PartyId::Evh, "k", Anf::var(1)).unwrap();
    sim.hold_initial(PartyId::Kh, "k", Anf::var(1)).unwrap();
    let t = sim.finish();
    let pairs = decrypting_pairs(&t, 1);
    assert_eq!(
        pairs,
        vec![(PartyId::Evh, "ct".to_string(), "k".to_string())]
    );
}

#[test]
fn circuit_protocols_are_audited() {
    let c = parse_circuit("in a b c\ng1 AND a b\ng2 AND a c\ng3 AND b c\nout g1 g2 g3").unwrap();
    let p = CircuitProtocol {
        name: "triangle".into(),
        schedule: plan(&c),
        circuit: c,
    };
    let r = audit(&p, Route::Symbolic).unwrap();
    assert!(r.pass(), "{}", r.render_text());
    assert!(holdings_check(&p).unwrap().is_empty());
}

#[test]
fn scenario_oracles_match_plain_logic() {
    let and = |s: &[bool]| s.iter().all(|&b| b);
    for s in scenarios() {
        for m in 0..1u32 << s.arity() {
            let bits: Vec<bool> = (0..s.arity()).map(|i| m >> i & 1 == 1).collect();
            let want = match s.kind {
                ScenarioKind::ReuseBoth => {
                    vec![and(&bits[..2]), and(&bits[1..]), bits[0] && bits[2]]
                }
                ScenarioKind::ReuseLeft => vec![and(&bits[..2]), bits[0] && bits[2]],
                ScenarioKind::ReuseReencrypt => vec![and(&bits); 2],
                _ => vec![and(&bits)],
            };
            assert_eq!(s.expected(&bits), want, "{}", s.name());
        }
    }
}
