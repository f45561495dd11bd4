//! Cost of an AND once its operands already sit at the helper.

use helper_mpc::harness::{Protocol, Scenario, ScenarioKind, TARGET_SCOPE};

fn main() -> helper_mpc::Result<()> {
    let cases = [
        (ScenarioKind::And3, "fresh"),
        (ScenarioKind::ReuseLeft, "left operand resident"),
        (ScenarioKind::ReuseReencrypt, "re-encrypted right operand"),
        (ScenarioKind::ReuseBoth, "both operands resident"),
    ];
    for (kind, what) in cases {
        let s = Scenario::new(kind);
        let (_, cost) = s.measure([3; 32], &vec![true; s.arity()])?;
        let gate = cost
            .per_gate
            .iter()
            .find(|g| g.gate == TARGET_SCOPE)
            .map_or(0, |g| g.bits);
        println!("{what:<28} {gate} bit(s)");
    }
    Ok(())
}
