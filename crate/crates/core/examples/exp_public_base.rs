//! c^a on an additively shared exponent, and how leakage shrinks with lambda.

use helper_mpc::expo::{int, leakage_bound, run_exp, statistical_leakage, KeyFlow, SecurityParam};
use helper_mpc::sharing::TapeSet;

fn main() -> helper_mpc::Result<()> {
    let sp = SecurityParam::new(16, 1 << 16);
    for (c, a) in [(2, 10), (3, 7)] {
        let out = run_exp(
            &int(c),
            &int(a),
            &sp,
            KeyFlow::Corrected,
            &mut TapeSet::from_u64(1),
        )?;
        println!(
            "{c}^{a} = {} ({} bits, {} rounds)",
            out.value, out.cost.computation_bits, out.cost.rounds
        );
    }
    println!("exponent 1 vs 2, base 2, B=8:");
    for lambda in 0..=4 {
        let sp = SecurityParam::new(lambda, 8).with_exponent_key_range(2);
        let tv = statistical_leakage(&int(2), &int(1), &int(2), &sp, KeyFlow::Corrected)?;
        let bound = leakage_bound(&int(2), &int(1), &int(2), &sp)?;
        println!("  lambda={lambda} tv={tv} bound={bound}");
    }
    Ok(())
}
