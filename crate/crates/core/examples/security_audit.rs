//! Audits every shipped protocol and every leaky mutant.

use helper_mpc::harness::{audit_scenario, mutants, scenarios, Route};

fn main() -> helper_mpc::Result<()> {
    for s in scenarios().iter().chain(&mutants()) {
        let r = audit_scenario(s, Route::Auto)?;
        print!("{}", r.render_text());
    }
    Ok(())
}
