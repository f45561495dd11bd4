//! Fan-in AND: term count doubles per input, round count stays flat.

use helper_mpc::gates::{fanin_terms, run, DEFAULT_W_MAX};
use helper_mpc::netsim::cost_of;
use helper_mpc::sharing::{Bit, TapeSet};

fn main() -> helper_mpc::Result<()> {
    for w in 1..=5 {
        let mut tapes = TapeSet::from_u64(w as u64);
        let (out, t) = run(&mut tapes, None, DEFAULT_W_MAX, |e| {
            let xs = (0..w)
                .map(|i| e.share_input(&format!("x{i}"), Bit(true)))
                .collect::<helper_mpc::Result<Vec<_>>>()?;
            let z = e.fanin_and(&xs)?;
            e.reveal(&z)
        })?;
        let c = cost_of(&t);
        println!(
            "w={w} out={out} terms={:>2} bits={:>3} rounds={}",
            fanin_terms(w),
            c.computation_bits,
            c.rounds
        );
    }
    Ok(())
}
