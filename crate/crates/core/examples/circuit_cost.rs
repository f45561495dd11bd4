//! Plans all-pairs circuits and compares measured bits with 4v + t.

use helper_mpc::circuit::{all_pairs, all_pairs_formula, cost_bound, evaluate, plan};
use helper_mpc::sharing::TapeSet;

fn main() -> helper_mpc::Result<()> {
    println!(
        "{:>3} {:>4} {:>9} {:>8} {:>9}",
        "v", "t", "measured", "formula", "4v+t"
    );
    for v in [3, 4, 6, 10, 16] {
        let c = all_pairs(v);
        let s = plan(&c);
        let inputs = vec![true; v];
        let ev = evaluate(&c, &s, &inputs, &mut TapeSet::from_u64(v as u64))?;
        let t = c.and_count() as u64;
        println!(
            "{v:>3} {t:>4} {:>9} {:>8} {:>9}",
            ev.cost.computation_bits,
            all_pairs_formula(v as u64),
            cost_bound(v as u64, t)?
        );
    }
    Ok(())
}
