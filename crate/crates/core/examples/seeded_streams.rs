//! Results are a pure function of the seed, whatever the thread count.

use patterned_rmt::spectra::{trace_moment_mc, McConfig};
use patterned_rmt::word::Word;
use patterned_rmt::Result;

fn main() -> Result<()> {
    let word = Word::parse("T T* T T*")?;
    let cfg = McConfig::new(96, 24, 2026);
    let mut results = Vec::new();
    for threads in [1, 2, 4] {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().expect("thread pool");
        let est = pool.install(|| trace_moment_mc(&word, &cfg))?;
        println!("{threads} threads: {:.17} +- {:.3e}", est.mean.re, est.std_error);
        results.push(est);
    }
    assert!(results.windows(2).all(|w| w[0] == w[1]));
    println!("bit-identical across thread counts");
    Ok(())
}
