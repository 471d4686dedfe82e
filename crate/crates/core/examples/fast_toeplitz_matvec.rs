//! Toeplitz matrix-vector products through circulant embedding.

use std::time::Instant;

use patterned_rmt::ensembles::{sample_input, EntryDistribution};
use patterned_rmt::operator::{dense_matvec_toeplitz, fast_matvec_toeplitz};
use patterned_rmt::Result;

fn main() -> Result<()> {
    for n in [1024, 8192] {
        let tau = sample_input(EntryDistribution::StandardGaussian, 2 * n - 1, 1)?;
        let v = sample_input(EntryDistribution::StandardGaussian, n, 2)?;
        let t = Instant::now();
        let fast = fast_matvec_toeplitz(&tau, &v)?;
        let tf = t.elapsed();
        let t = Instant::now();
        let dense = dense_matvec_toeplitz(&tau, &v)?;
        let td = t.elapsed();
        let err = fast.iter().zip(&dense).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let scale = dense.iter().map(|x| x.abs()).fold(0.0, f64::max);
        println!(
            "n={n:<5} fft {tf:>10.2?}  dense {td:>10.2?}  speedup {:>6.1}x  relative error {:.1e}",
            td.as_secs_f64() / tf.as_secs_f64(),
            err / scale
        );
    }
    Ok(())
}
