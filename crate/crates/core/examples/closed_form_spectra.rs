//! Circulant-type spectra from one FFT, compared with a dense eigensolve.

use patterned_rmt::ensembles::{EnsembleKind, EnsembleSpec, EntryDistribution};
use patterned_rmt::spectra::{dense_symmetric_eigs, spectrum_of};
use patterned_rmt::Result;

fn main() -> Result<()> {
    let n = 200;
    for kind in [EnsembleKind::LeftSkewCirculant, EnsembleKind::ReverseCirculant] {
        let spec = EnsembleSpec::new(kind, n)?;
        let input = spec.sample(EntryDistribution::StandardGaussian, 3)?.expect("random ensemble");
        let mut fast = spectrum_of(&spec, &input)?.real_values()?;
        fast.sort_by(f64::total_cmp);
        let dense = dense_symmetric_eigs(&spec.build(&input)?)?;
        let err = fast.iter().zip(&dense).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        println!("{:<18} n={n}: closed form vs dense, max |diff| = {err:.2e}", kind.name());
    }

    let spec = EnsembleSpec::new(EnsembleKind::SkewCirculant, 8)?;
    let input = spec.sample(EntryDistribution::StandardGaussian, 3)?.expect("random ensemble");
    println!("\nskew-circulant eigenvalues (n = 8), conjugate pairs j <-> n-1-j:");
    for (j, z) in spectrum_of(&spec, &input)?.eigenvalues.iter().enumerate() {
        println!("  lambda_{j} = {:+.4} {:+.4}i", z.re, z.im);
    }
    Ok(())
}
