//! Limiting *-moments of words, with the published values alongside.

use patterned_rmt::limits::{reference_moments, word_limit, LimitOptions};
use patterned_rmt::word::Word;
use patterned_rmt::Result;

fn main() -> Result<()> {
    let opts = LimitOptions::default();
    for (w, theta) in [("C C* C C*", 0.0), ("C D C* D*", 1.0), ("S S* S S*", 3.14159), ("C C_1 C* C_1*", 0.0)] {
        let v = word_limit(&Word::parse(w)?, theta, &opts)?;
        println!("{w:<16} theta={theta:<8} -> {:.6} (method {:?})", v.value, v.method);
    }

    println!("\n{:<26} {:<24} {:>22} {:>10} {:>12}", "moment", "word", "engine", "+-", "published");
    for row in reference_moments(&opts)? {
        println!(
            "{:<26} {:<24} {:>22.6} {:>10.1e} {:>12.6}",
            row.name, row.word, row.engine.value, row.engine.mc_error, row.reference
        );
    }
    Ok(())
}
