//! One AND with a single helper, printing every message.

use helper_mpc::gates::{run, DEFAULT_W_MAX};
use helper_mpc::netsim::cost_of;
use helper_mpc::sharing::{Bit, TapeSet};

fn main() -> helper_mpc::Result<()> {
    let mut tapes = TapeSet::from_u64(7);
    let (out, t) = run(&mut tapes, None, DEFAULT_W_MAX, |e| {
        let x = e.share_input("a", Bit(true))?;
        e.share_input("b", Bit(true))?;
        let y = e.share_input_second("b")?;
        e.set_scope(Some("and"));
        let z = e.and3(&x, &y)?;
        e.set_scope(None);
        e.reveal(&z)
    })?;
    for m in &t.messages {
        println!(
            "round {} {:>6} -> {:<6} {:<13} {} = {}",
            m.round, m.from, m.to, m.phase, m.label, m.payload
        );
    }
    let cost = cost_of(&t);
    println!("a AND b = {out}");
    println!(
        "computation bits {} in {} rounds",
        cost.computation_bits, cost.rounds
    );
    Ok(())
}
