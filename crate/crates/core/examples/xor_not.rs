//! Linear gates are local: no bits leave any party.

use helper_mpc::gates::{run, DEFAULT_W_MAX};
use helper_mpc::netsim::cost_of;
use helper_mpc::sharing::{Bit, TapeSet};

fn main() -> helper_mpc::Result<()> {
    for (a, b) in [(false, false), (false, true), (true, false), (true, true)] {
        let mut tapes = TapeSet::from_u64(1);
        let (out, t) = run(&mut tapes, None, DEFAULT_W_MAX, |e| {
            let x = e.share_input("a", Bit(a))?;
            let y = e.share_input("b", Bit(b))?;
            let z = e.xor_gate(&x, &y)?;
            let nz = e.not_gate(&z)?;
            Ok((e.reveal(&z)?, e.reveal(&nz)?))
        })?;
        let cost = cost_of(&t);
        println!(
            "a={} b={} xor={} xnor={} computation_bits={}",
            u8::from(a),
            u8::from(b),
            out.0,
            out.1,
            cost.computation_bits
        );
    }
    Ok(())
}
