//! Writes a circuit transcript, reads it back and recomputes the costs.

use helper_mpc::circuit::{evaluate, parse_circuit, plan};
use helper_mpc::netsim::{cost_of, parse_transcript, transcript_to_string};
use helper_mpc::sharing::TapeSet;

const NETLIST: &str = "\
in a b c
g1 AND a b
g2 AND a c
g3 XOR g1 g2
out g3
";

fn main() -> helper_mpc::Result<()> {
    let c = parse_circuit(NETLIST)?;
    let ev = evaluate(
        &c,
        &plan(&c),
        &[true, false, true],
        &mut TapeSet::from_u64(5),
    )?;
    let text = transcript_to_string(&ev.transcript);
    print!("{text}");
    let reread = cost_of(&parse_transcript(&text)?);
    assert_eq!(reread, ev.cost);
    println!(
        "g3 = {}; {} computation bits, {} rounds",
        u8::from(ev.outputs[0]),
        reread.computation_bits,
        reread.rounds
    );
    Ok(())
}
