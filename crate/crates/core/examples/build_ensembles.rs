//! Build every ensemble from a seeded input and check the identities that
//! tie them together.

use patterned_rmt::ensembles::{check_decompositions, EnsembleKind, EnsembleSpec, EntryDistribution};
use patterned_rmt::Result;

fn main() -> Result<()> {
    let n = 5;
    let kinds = [
        EnsembleKind::Circulant,
        EnsembleKind::SkewCirculant,
        EnsembleKind::LeftSkewCirculant,
        EnsembleKind::ReverseCirculant,
        EnsembleKind::ToeplitzSym,
        EnsembleKind::Hankel,
    ];
    for kind in kinds {
        let spec = EnsembleSpec::new(kind, n)?;
        let input = spec.sample(EntryDistribution::Rademacher, 11)?.expect("random ensemble");
        let m = spec.build(&input)?;
        println!("{} (input {:?})", kind.name(), input.values);
        for i in 0..n {
            let row: Vec<String> = m.row(i).iter().map(|z| format!("{:+.0}", z.re)).collect();
            println!("  {}", row.join(" "));
        }
    }

    for n in [8, 64, 257] {
        let report = check_decompositions(n, 1)?;
        println!("\nidentities at n = {n}");
        for c in &report.checks {
            println!("  {:<22} relative deviation {:.2e}", c.name, c.relative_deviation);
        }
    }
    Ok(())
}
