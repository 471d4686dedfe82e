//! The verification report: named checks with measured value, expected
//! value and tolerance.
//!
//! Every check is a pure function of the seed; the rendered report contains
//! no timings, so equal seeds give byte-identical reports at any thread
//! count.

use std::f64::consts::PI;
use std::fmt::{self, Write as _};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ensembles::{
    check_decompositions, left_skew_half_commutator_defect, skew_commutator_defect, EnsembleKind,
    EnsembleSpec, EntryDistribution,
};
use crate::error::Result;
use crate::esd::{
    convergence_point, esd_complex, moments_of, replicate_spectra, replicate_trace_moment,
};
use crate::limits::laws::arc_moment;
use crate::limits::{reference_moments, LimitOptions, Method};
use crate::partitions::{
    admissible_partitions, catalan, double_factorial, enumerate_pair_partitions, is_crossing,
    EpsilonPattern,
};
use crate::spectra::{sample_spectrum, trace_moment_mc, McConfig};
use crate::word::Word;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerifyLevel {
    /// Structural identities and partition counts.
    #[default]
    Fast,
    /// Adds limit values, Monte Carlo agreement and spectral convergence.
    Full,
}

impl fmt::Display for VerifyLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Fast => "fast",
            Self::Full => "full",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub measured: String,
    pub expected: String,
    /// `|measured - expected|`, or the measured value for upper-bound checks.
    pub deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

pub fn fmt_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{:.6e}", z.re)
    } else {
        format!("{:.6e}{:+.6e}i", z.re, z.im)
    }
}

impl Check {
    pub fn within(name: impl Into<String>, measured: Complex64, expected: Complex64, tolerance: f64) -> Self {
        let deviation = (measured - expected).norm();
        Self {
            name: name.into(),
            measured: fmt_complex(measured),
            expected: fmt_complex(expected),
            deviation,
            tolerance,
            passed: deviation <= tolerance,
        }
    }

    pub fn within_real(name: impl Into<String>, measured: f64, expected: f64, tolerance: f64) -> Self {
        Self::within(name, measured.into(), expected.into(), tolerance)
    }

    /// `measured <= bound`.
    pub fn at_most(name: impl Into<String>, measured: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            measured: format!("{measured:.6e}"),
            expected: format!("<= {bound:.6e}"),
            deviation: measured,
            tolerance: bound,
            passed: measured <= bound,
        }
    }

    pub fn exact(name: impl Into<String>, measured: u64, expected: u64) -> Self {
        Self {
            name: name.into(),
            measured: measured.to_string(),
            expected: expected.to_string(),
            deviation: measured.abs_diff(expected) as f64,
            tolerance: 0.0,
            passed: measured == expected,
        }
    }
}

pub const CONVERGENCE_NOTE: &str = "Almost-sure convergence cannot be checked at finite n; \
it is replaced by pooled finite-n statistics over independent replicates.";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub level: VerifyLevel,
    pub seed: u64,
    pub checks: Vec<Check>,
    pub note: String,
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "verification level={} seed={}", self.level, self.seed);
        for c in &self.checks {
            let _ = writeln!(
                out,
                "{} {} | measured {} | expected {} | deviation {:.3e} | tolerance {:.3e}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.measured,
                c.expected,
                c.deviation,
                c.tolerance
            );
        }
        let failed = self.failures().count();
        let _ = writeln!(out, "{} checks, {} failed", self.checks.len(), failed);
        let _ = writeln!(out, "note: {}", self.note);
        out
    }
}

/// Relative deviation bound for the exact identities.
pub const IDENTITY_TOL: f64 = 1e-10;

pub fn structural_checks(seed: u64) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for n in [8, 64, 257] {
        for c in check_decompositions(n, seed)?.checks {
            checks.push(Check::at_most(format!("identity {} (n={n})", c.name), c.relative_deviation, IDENTITY_TOL));
        }
    }
    let seeds = (0..10).map(|k| seed.wrapping_add(k));
    let comm = seeds.clone().map(|s| skew_commutator_defect(64, s)).fold(0.0, f64::max);
    let half = seeds.map(|s| left_skew_half_commutator_defect(64, s)).fold(0.0, f64::max);
    checks.push(Check::at_most("skew-circulants commute (n=64, 10 seeds)", comm, IDENTITY_TOL));
    checks.push(Check::at_most("left skew-circulants half-commute (n=64, 10 seeds)", half, IDENTITY_TOL));
    Ok(checks)
}

pub fn partition_checks() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for m in 1..=5u64 {
        let all = enumerate_pair_partitions(2 * m as usize)?;
        checks.push(Check::exact(format!("pair partitions of {}", 2 * m), all.len() as u64, double_factorial(2 * m - 1)));
        let nc = all.iter().filter(|p| !is_crossing(p)).count() as u64;
        checks.push(Check::exact(format!("non-crossing pair partitions of {}", 2 * m), nc, catalan(m)));
    }
    let alternating = EpsilonPattern::from_flags("1*1*")?;
    checks.push(Check::exact(
        "admissible partitions of (1,*,1,*)",
        admissible_partitions(&alternating)?.len() as u64,
        2,
    ));
    Ok(checks)
}

/// Engine values against the published ones.
pub fn reference_checks(opts: &LimitOptions) -> Result<Vec<Check>> {
    Ok(reference_moments(opts)?
        .into_iter()
        .map(|row| {
            let tol = match row.engine.method {
                Method::ClosedForm => 1e-3,
                _ => 3.0 * row.engine.mc_error,
            };
            Check::within(format!("limit {} [{}]", row.name, row.word), row.engine.value, row.reference, tol)
        })
        .collect())
}

/// Finite-n Monte Carlo against the engine for every reference word.
pub fn mc_agreement_checks(
    opts: &LimitOptions,
    n: usize,
    replicates: usize,
    seed: u64,
    dist: EntryDistribution,
) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for row in reference_moments(opts)? {
        let cfg = McConfig::new(n, replicates, seed)
            .with_distribution(dist)
            .with_theta(row.theta);
        let mc = trace_moment_mc(&Word::parse(&row.word)?, &cfg)?;
        let tol = 3.0 * (mc.std_error + row.engine.mc_error) + 0.02;
        checks.push(Check::within(
            format!("monte carlo {} [{}] n={n} reps={replicates} {dist}", row.name, row.word),
            mc.mean,
            row.engine.value,
            tol,
        ));
    }
    Ok(checks)
}

/// Spectral convergence at `n`: KS distances, planar covariance and fourth
/// moments.
pub fn esd_checks(n: usize, replicates: usize, seed: u64, dist: EntryDistribution) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let ls = convergence_point(EnsembleKind::LeftSkewCirculant, n, replicates, seed, dist)?;
    checks.push(Check::at_most(
        format!("left-skew KS vs symmetrized Rayleigh n={n} reps={replicates} {dist}"),
        ls.value,
        0.02,
    ));
    let spec = EnsembleSpec::new(EnsembleKind::SkewCirculant, n)?;
    let pooled: Vec<Complex64> = replicate_spectra(&spec, dist, replicates, seed)?
        .into_iter()
        .flat_map(|s| s.eigenvalues)
        .collect();
    let e = esd_complex(&pooled)?;
    checks.push(Check::at_most(format!("skew KS(re) vs N(0,1/2) n={n} {dist}"), e.ks_re, 0.02));
    checks.push(Check::at_most(format!("skew KS(im) vs N(0,1/2) n={n} {dist}"), e.ks_im, 0.02));
    checks.push(Check::at_most(
        format!("skew covariance vs diag(1/2,1/2), relative n={n} {dist}"),
        e.covariance_deviation(),
        0.05,
    ));
    for (kind, target) in [(EnsembleKind::ToeplitzSym, 8.0 / 3.0), (EnsembleKind::Hankel, 2.0)] {
        let spec = EnsembleSpec::new(kind, n)?;
        let m4 = replicate_trace_moment(&spec, dist, 4, replicates.clamp(2, 10), seed)?;
        checks.push(Check::within_real(
            format!("{} fourth moment n={n} {dist}", kind.name()),
            m4.mean.re,
            target,
            0.05 * target,
        ));
    }
    Ok(checks)
}

/// Moments of `D_n(pi)` against the arc law.
pub fn diagonal_checks(n: usize) -> Result<Vec<Check>> {
    let spec = EnsembleSpec::new(EnsembleKind::DiagonalD { theta: PI }, n)?;
    let s = sample_spectrum(&spec, EntryDistribution::StandardGaussian, 0, 0)?;
    Ok(moments_of(&s.eigenvalues, 4)?
        .into_iter()
        .enumerate()
        .map(|(k, m)| {
            let p = k as i64 + 1;
            Check::within(format!("D(pi) moment {p} n={n}"), m, arc_moment(PI, p), 1e-3)
        })
        .collect())
}

pub fn run(level: VerifyLevel, seed: u64) -> Result<Report> {
    let mut checks = structural_checks(seed)?;
    checks.extend(partition_checks()?);
    if level == VerifyLevel::Full {
        let opts = LimitOptions::default().with_seed(seed);
        checks.extend(reference_checks(&opts)?);
        checks.extend(mc_agreement_checks(&opts, 1024, 100, seed, EntryDistribution::StandardGaussian)?);
        for dist in [EntryDistribution::StandardGaussian, EntryDistribution::Rademacher] {
            checks.extend(esd_checks(4096, 20, seed, dist)?);
        }
        checks.extend(diagonal_checks(100_000)?);
    }
    Ok(Report {
        level,
        seed,
        checks,
        note: CONVERGENCE_NOTE.to_string(),
    })
}
