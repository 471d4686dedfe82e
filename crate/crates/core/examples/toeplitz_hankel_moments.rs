//! Moments of the symmetric Toeplitz and Hankel limit laws, evaluated by
//! expanding into circulant and skew-circulant words.

use patterned_rmt::limits::{hankel_lsd_moment, toeplitz_lsd_moment, LimitOptions};
use patterned_rmt::Result;

fn main() -> Result<()> {
    let opts = LimitOptions::default().with_budget(500_000);
    println!("{:>2} {:>22} {:>22}", "p", "Toeplitz", "Hankel");
    for p in 1..=6 {
        let t = toeplitz_lsd_moment(p, &opts)?;
        let h = hankel_lsd_moment(p, &opts)?;
        println!(
            "{p:>2} {:>12.5} +- {:.0e} {:>12.5} +- {:.0e}",
            t.value.re, t.mc_error, h.value.re, h.mc_error
        );
    }
    Ok(())
}
