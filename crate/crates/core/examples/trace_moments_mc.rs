//! Finite-n Monte Carlo of normalized traces against the limit engine.

use patterned_rmt::limits::{word_limit, LimitOptions};
use patterned_rmt::spectra::{trace_moment_mc, McConfig};
use patterned_rmt::word::Word;
use patterned_rmt::Result;

fn main() -> Result<()> {
    let opts = LimitOptions::default().with_budget(500_000);
    let words = ["C C* S S*", "C S C* S*", "T T T* T*", "Ts Ts Ts Ts", "H H H H"];
    for n in [128, 512] {
        for w in words {
            let word = Word::parse(w)?;
            let mc = trace_moment_mc(&word, &McConfig::new(n, 40, 1))?;
            let lim = word_limit(&word, std::f64::consts::PI, &opts)?;
            println!(
                "n={n:<4} {w:<12} monte carlo {:>8.4} +- {:.4}   limit {:.4}",
                mc.mean.re, mc.std_error, lim.value.re
            );
        }
    }
    Ok(())
}
