//! The two-helper AND over all four input combinations.

use helper_mpc::gates::{run, DEFAULT_W_MAX};
use helper_mpc::netsim::cost_of;
use helper_mpc::sharing::{Bit, TapeSet};

fn main() -> helper_mpc::Result<()> {
    for (a, b) in [(false, false), (false, true), (true, false), (true, true)] {
        let mut tapes = TapeSet::from_u64(11);
        let (out, t) = run(&mut tapes, None, DEFAULT_W_MAX, |e| {
            let x = e.share_input("a", Bit(a))?;
            let y = e.share_input("b", Bit(b))?;
            let z = e.and4(&x, &y)?;
            e.reveal(&z)
        })?;
        let c = cost_of(&t);
        println!(
            "{} AND {} = {out}  ({} bits, {} rounds)",
            u8::from(a),
            u8::from(b),
            c.computation_bits,
            c.rounds
        );
    }
    Ok(())
}
