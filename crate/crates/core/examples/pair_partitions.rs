//! Pair partitions, admissibility, and the solved index systems behind each
//! limit term.

use patterned_rmt::partitions::{
    catalan, double_factorial, enumerate_pair_partitions, is_crossing, limit_terms, EpsilonPattern,
};
use patterned_rmt::Result;

fn main() -> Result<()> {
    for two_m in (2..=10).step_by(2) {
        let all = enumerate_pair_partitions(two_m)?;
        let nc = all.iter().filter(|p| !is_crossing(p)).count();
        println!(
            "2m = {two_m:>2}: {:>4} pair partitions ((2m-1)!! = {}), {:>3} non-crossing (Catalan {})",
            all.len(),
            double_factorial(two_m as u64 - 1),
            nc,
            catalan(two_m as u64 / 2)
        );
    }

    let pattern = EpsilonPattern::from_flags("11**")?.with_powers(vec![1, 1, 1, 1])?;
    println!("\npattern (1, 1, *, *) with D after every letter:");
    for t in limit_terms(&pattern)? {
        println!(
            "  {} crossing={} free indices {:?} forms {:?}",
            t.partition, t.crossing, t.free_indices, t.forms
        );
    }
    Ok(())
}
