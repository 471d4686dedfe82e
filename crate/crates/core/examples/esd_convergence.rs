//! Spectral distributions converging to their limit laws.

use patterned_rmt::ensembles::{EnsembleKind, EnsembleSpec, EntryDistribution};
use patterned_rmt::esd::{convergence_study, replicate_spectra, Binning, Histogram1D};
use patterned_rmt::Result;

fn main() -> Result<()> {
    let dist = EntryDistribution::StandardGaussian;
    for kind in [EnsembleKind::LeftSkewCirculant, EnsembleKind::SkewCirculant, EnsembleKind::Hankel] {
        let study = convergence_study(kind, &[64, 256, 1024], 16, 5, dist)?;
        println!("{} (decreasing: {})", study.ensemble, study.decreasing);
        for r in &study.rows {
            let se = r.std_error.map(|e| format!(" +- {e:.4}")).unwrap_or_default();
            println!("  n={:<5} {:?} = {:.4}{se} (target {:.4})", r.n, r.statistic, r.value, r.target);
        }
    }

    let spec = EnsembleSpec::new(EnsembleKind::LeftSkewCirculant, 2048)?;
    let vals: Vec<f64> = replicate_spectra(&spec, dist, 10, 5)?
        .iter()
        .flat_map(|s| s.real_values().expect("symmetric spectrum"))
        .collect();
    let hist = Histogram1D::new(&vals, Binning::Fixed(24))?;
    println!("\nleft skew-circulant ESD, n=2048, 10 replicates:");
    for (e, d) in hist.bin_edges.windows(2).zip(hist.density()) {
        println!("  {:+.2} {}", 0.5 * (e[0] + e[1]), "#".repeat((d * 60.0) as usize));
    }
    Ok(())
}
