//! Empirical spectral distributions: histograms, moments, Kolmogorov–Smirnov
//! distances to the limit laws, and convergence studies over `n`.
//!
//! Replicate spectra are pooled before a distance is taken (the limits are
//! non-random); per-replicate distances are reported alongside.

use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensembles::{EnsembleKind, EnsembleSpec, EntryDistribution};
use crate::error::{invalid, Error, Result};
use crate::limits::laws::{normal_cdf, LimitLaw};
use crate::spectra::{
    replicate_input, sample_spectrum, trace_power_moments, MomentEstimate, SpectralSample,
};

/// Most bins a histogram will allocate.
pub const MAX_BINS: usize = 10_000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Binning {
    /// Width `2 IQR / m^{1/3}` for `m` points.
    #[default]
    FreedmanDiaconis,
    Fixed(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Histogram1D {
    pub bin_edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub total: u64,
}

#[derive(Serialize)]
struct HistogramRow {
    bin_left: f64,
    bin_right: f64,
    count: u64,
    density: f64,
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

fn sorted_finite(values: &[f64]) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(invalid("sample is empty"));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(invalid("sample contains a non-finite value"));
    }
    let mut s = values.to_vec();
    s.sort_by(f64::total_cmp);
    Ok(s)
}

impl Histogram1D {
    pub fn new(values: &[f64], binning: Binning) -> Result<Self> {
        let sorted = sorted_finite(values)?;
        let (lo, hi) = (sorted[0], sorted[sorted.len() - 1]);
        let (lo, hi) = if hi > lo { (lo, hi) } else { (lo - 0.5, hi + 0.5) };
        let bins = match binning {
            Binning::Fixed(0) => return Err(invalid("bin count must be positive")),
            Binning::Fixed(k) => k,
            Binning::FreedmanDiaconis => {
                let iqr = quantile(&sorted, 0.75) - quantile(&sorted, 0.25);
                let width = 2.0 * iqr / (sorted.len() as f64).cbrt();
                if width > 0.0 {
                    (((hi - lo) / width).ceil() as usize).max(1)
                } else {
                    1
                }
            }
        };
        if bins > MAX_BINS {
            return Err(Error::ResourceLimit(format!("{bins} bins exceed {MAX_BINS}")));
        }
        let width = (hi - lo) / bins as f64;
        let mut bin_edges: Vec<f64> = (0..bins).map(|k| lo + k as f64 * width).collect();
        bin_edges.push(hi);
        let mut counts = vec![0u64; bins];
        for &v in &sorted {
            // The last bin is closed on the right.
            let k = (((v - lo) / width) as usize).min(bins - 1);
            counts[k] += 1;
        }
        Ok(Self {
            bin_edges,
            counts,
            total: sorted.len() as u64,
        })
    }

    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    /// Count normalized by total and bin width.
    pub fn density(&self) -> Vec<f64> {
        self.counts
            .iter()
            .zip(self.bin_edges.windows(2))
            .map(|(&c, e)| c as f64 / (self.total as f64 * (e[1] - e[0])))
            .collect()
    }

    /// Columns `bin_left,bin_right,count,density`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for ((e, &count), density) in self.bin_edges.windows(2).zip(&self.counts).zip(self.density()) {
            w.serialize(HistogramRow {
                bin_left: e[0],
                bin_right: e[1],
                count,
                density,
            })?;
        }
        w.flush()?;
        Ok(())
    }

    /// Two whitespace-separated columns, bin center and density, for plotting.
    pub fn write_plot_data<W: Write>(&self, mut out: W) -> Result<()> {
        for (e, d) in self.bin_edges.windows(2).zip(self.density()) {
            writeln!(out, "{:.10e} {:.10e}", 0.5 * (e[0] + e[1]), d)?;
        }
        Ok(())
    }
}

/// `n^{-1} sum_j lambda_j^p` for `p = 1..=max_p`.
pub fn empirical_moments(sample: &SpectralSample, max_p: usize) -> Result<Vec<Complex64>> {
    moments_of(&sample.eigenvalues, max_p)
}

pub fn moments_of(values: &[Complex64], max_p: usize) -> Result<Vec<Complex64>> {
    if max_p == 0 {
        return Err(invalid("max_p must be at least 1"));
    }
    if values.is_empty() {
        return Err(invalid("sample is empty"));
    }
    let n = values.len() as f64;
    let mut sums = vec![Complex64::new(0.0, 0.0); max_p];
    for &z in values {
        let mut pw = Complex64::new(1.0, 0.0);
        for s in sums.iter_mut() {
            pw *= z;
            *s += pw;
        }
    }
    Ok(sums.into_iter().map(|s| s / n).collect())
}

/// `sup_x |F_emp(x) - cdf(x)|`.
pub fn ks_distance(values: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    let sorted = sorted_finite(values)?;
    let m = sorted.len() as f64;
    Ok(sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            ((i + 1) as f64 / m - f).max(f - i as f64 / m)
        })
        .fold(0.0, f64::max))
}

/// Scatter of complex eigenvalues with marginal summaries against the
/// planar Gaussian with covariance `diag(1/2, 1/2)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Esd2D {
    pub points: Vec<(f64, f64)>,
    pub mean: (f64, f64),
    /// Sample covariance `[[var re, cov], [cov, var im]]`.
    pub covariance: [[f64; 2]; 2],
    pub ks_re: f64,
    pub ks_im: f64,
}

impl Esd2D {
    /// Largest relative deviation of the covariance from `diag(1/2, 1/2)`,
    /// with the off-diagonal measured against 1/2.
    pub fn covariance_deviation(&self) -> f64 {
        let c = self.covariance;
        [(c[0][0] - 0.5).abs(), (c[1][1] - 0.5).abs(), c[0][1].abs()]
            .into_iter()
            .fold(0.0, f64::max)
            / 0.5
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["re", "im"])?;
        for (x, y) in &self.points {
            w.write_record([x.to_string(), y.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// All eigenvalues are kept, including the few real ones.
pub fn esd_complex(eigenvalues: &[Complex64]) -> Result<Esd2D> {
    if eigenvalues.len() < 2 {
        return Err(invalid("need at least two eigenvalues"));
    }
    let m = eigenvalues.len() as f64;
    let re: Vec<f64> = eigenvalues.iter().map(|z| z.re).collect();
    let im: Vec<f64> = eigenvalues.iter().map(|z| z.im).collect();
    let mean = (re.iter().sum::<f64>() / m, im.iter().sum::<f64>() / m);
    let mut cov = [[0.0; 2]; 2];
    for (x, y) in re.iter().zip(&im) {
        let (dx, dy) = (x - mean.0, y - mean.1);
        cov[0][0] += dx * dx;
        cov[0][1] += dx * dy;
        cov[1][1] += dy * dy;
    }
    for row in cov.iter_mut() {
        for v in row.iter_mut() {
            *v /= m - 1.0;
        }
    }
    cov[1][0] = cov[0][1];
    let marginal = |x: f64| normal_cdf(x, 0.5);
    Ok(Esd2D {
        ks_re: ks_distance(&re, marginal)?,
        ks_im: ks_distance(&im, marginal)?,
        points: re.into_iter().zip(im).collect(),
        mean,
        covariance: cov,
    })
}

/// Normalized spectra of replicates `0..replicates`, in replicate order.
pub fn replicate_spectra(
    spec: &EnsembleSpec,
    dist: EntryDistribution,
    replicates: usize,
    seed: u64,
) -> Result<Vec<SpectralSample>> {
    if replicates == 0 {
        return Err(invalid("replicates must be positive"));
    }
    (0..replicates as u64)
        .into_par_iter()
        .map(|rep| sample_spectrum(spec, dist, seed, rep))
        .collect()
}

/// The limiting spectral law of an ensemble, when it has a closed form.
pub fn limit_law_of(kind: &EnsembleKind) -> Option<LimitLaw> {
    match *kind {
        EnsembleKind::Circulant | EnsembleKind::TildeCirculant { .. } | EnsembleKind::SkewCirculant => {
            Some(LimitLaw::BivariateGaussianHalf)
        }
        EnsembleKind::LeftSkewCirculant | EnsembleKind::ReverseCirculant => {
            Some(LimitLaw::SymmetrizedRayleigh)
        }
        EnsembleKind::DiagonalD { theta } => Some(LimitLaw::ArcOnCircle { theta }),
        _ => None,
    }
}

/// Limiting fourth moment for the ensembles tracked through moments.
pub fn limit_fourth_moment(kind: &EnsembleKind) -> Option<f64> {
    match kind {
        EnsembleKind::ToeplitzSym => Some(8.0 / 3.0),
        EnsembleKind::Hankel => Some(2.0),
        EnsembleKind::LeftSkewCirculant | EnsembleKind::ReverseCirculant => Some(2.0),
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KsSummary {
    /// Distance of the pooled sample (for planar laws, the larger marginal).
    pub pooled: f64,
    pub per_replicate_mean: f64,
    pub per_replicate_max: f64,
}

/// KS distance of one spectrum to `law`. Planar laws use the larger of the
/// two marginal distances; the arc law acts on the angle.
pub fn spectrum_ks(eigenvalues: &[Complex64], law: LimitLaw) -> Result<f64> {
    match law {
        LimitLaw::BivariateGaussianHalf | LimitLaw::StandardComplexGaussian => {
            let e = esd_complex(eigenvalues)?;
            Ok(e.ks_re.max(e.ks_im))
        }
        LimitLaw::ArcOnCircle { .. } => {
            let angles: Vec<f64> = eigenvalues.iter().map(|z| z.arg()).collect();
            ks_distance(&angles, |x| law.cdf(x).expect("arc law has a cdf"))
        }
        LimitLaw::SymmetrizedRayleigh | LimitLaw::StandardGaussian => {
            let vals = real_parts_checked(eigenvalues)?;
            ks_distance(&vals, |x| law.cdf(x).expect("real law has a cdf"))
        }
    }
}

fn real_parts_checked(eigenvalues: &[Complex64]) -> Result<Vec<f64>> {
    let tol = crate::spectra::IMAG_TOL;
    if let Some(z) = eigenvalues.iter().find(|z| z.im.abs() > tol) {
        return Err(invalid(format!("expected a real spectrum, found {z}")));
    }
    Ok(eigenvalues.iter().map(|z| z.re).collect())
}

pub fn ks_summary(samples: &[SpectralSample], law: LimitLaw) -> Result<KsSummary> {
    if samples.is_empty() {
        return Err(invalid("no spectra to summarize"));
    }
    let per: Vec<f64> = samples
        .iter()
        .map(|s| spectrum_ks(&s.eigenvalues, law))
        .collect::<Result<_>>()?;
    let pooled: Vec<Complex64> = samples.iter().flat_map(|s| s.eigenvalues.iter().copied()).collect();
    Ok(KsSummary {
        pooled: spectrum_ks(&pooled, law)?,
        per_replicate_mean: per.iter().sum::<f64>() / per.len() as f64,
        per_replicate_max: per.iter().copied().fold(0.0, f64::max),
    })
}

/// Per-replicate `n^{-1} Tr((A/sqrt n)^p)`, `p <= 4`, without an eigensolve.
pub fn replicate_trace_moment(
    spec: &EnsembleSpec,
    dist: EntryDistribution,
    p: usize,
    replicates: usize,
    seed: u64,
) -> Result<MomentEstimate> {
    let values: Vec<Complex64> = (0..replicates as u64)
        .into_par_iter()
        .map(|rep| {
            let input = replicate_input(spec, dist, seed, rep);
            Ok(trace_power_moments(spec, &input, p)?[p - 1])
        })
        .collect::<Result<_>>()?;
    MomentEstimate::from_values(&values, spec.n)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Statistic {
    /// Pooled KS distance to the limit law.
    Ks,
    /// Mean empirical fourth moment.
    FourthMoment,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub replicates: usize,
    pub statistic: Statistic,
    pub value: f64,
    pub target: f64,
    pub deviation: f64,
    /// Standard error of `value` across replicates (moments only).
    pub std_error: Option<f64>,
    /// Mean per-replicate KS distance (KS only).
    pub per_replicate_ks: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceStudy {
    pub ensemble: String,
    pub distribution: EntryDistribution,
    pub seed: u64,
    pub rows: Vec<ConvergenceRow>,
    /// Deviations never increase along the grid.
    pub decreasing: bool,
    /// Least-squares slope of `log deviation` against `log n`.
    pub log_log_slope: Option<f64>,
}

impl ConvergenceStudy {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["n", "replicates", "statistic", "value", "target", "deviation", "std_error", "per_replicate_ks"])?;
        let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
        for r in &self.rows {
            let stat = match r.statistic {
                Statistic::Ks => "ks",
                Statistic::FourthMoment => "fourth-moment",
            };
            w.write_record([
                r.n.to_string(),
                r.replicates.to_string(),
                stat.to_string(),
                r.value.to_string(),
                r.target.to_string(),
                r.deviation.to_string(),
                opt(r.std_error),
                opt(r.per_replicate_ks),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn log_log_slope(rows: &[ConvergenceRow]) -> Option<f64> {
    if rows.len() < 2 || rows.iter().any(|r| r.deviation <= 0.0) {
        return None;
    }
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| ((r.n as f64).ln(), r.deviation.ln()))
        .collect();
    let m = pts.len() as f64;
    let (mx, my) = (
        pts.iter().map(|p| p.0).sum::<f64>() / m,
        pts.iter().map(|p| p.1).sum::<f64>() / m,
    );
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// One convergence measurement at order `n`: pooled KS distance for
/// ensembles with a closed-form limit law, the fourth moment for symmetric
/// Toeplitz and Hankel matrices.
pub fn convergence_point(
    kind: EnsembleKind,
    n: usize,
    replicates: usize,
    seed: u64,
    dist: EntryDistribution,
) -> Result<ConvergenceRow> {
    let spec = EnsembleSpec::new(kind, n)?;
    if let Some(law) = limit_law_of(&kind) {
        let samples = replicate_spectra(&spec, dist, replicates, seed)?;
        let ks = ks_summary(&samples, law)?;
        return Ok(ConvergenceRow {
            n,
            replicates,
            statistic: Statistic::Ks,
            value: ks.pooled,
            target: 0.0,
            deviation: ks.pooled,
            std_error: None,
            per_replicate_ks: Some(ks.per_replicate_mean),
        });
    }
    let target = limit_fourth_moment(&kind).ok_or_else(|| {
        Error::Unsupported(format!("no limit law tracked for {}", kind.name()))
    })?;
    let est = replicate_trace_moment(&spec, dist, 4, replicates.max(2), seed)?;
    Ok(ConvergenceRow {
        n,
        replicates: est.replicates,
        statistic: Statistic::FourthMoment,
        value: est.mean.re,
        target,
        deviation: (est.mean.re - target).abs(),
        std_error: Some(est.std_error),
        per_replicate_ks: None,
    })
}

pub fn convergence_study(
    kind: EnsembleKind,
    n_grid: &[usize],
    replicates: usize,
    seed: u64,
    dist: EntryDistribution,
) -> Result<ConvergenceStudy> {
    if n_grid.is_empty() || n_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid("n grid must be nonempty and strictly ascending"));
    }
    let rows: Vec<ConvergenceRow> = n_grid
        .iter()
        .map(|&n| convergence_point(kind, n, replicates, seed, dist))
        .collect::<Result<_>>()?;
    Ok(ConvergenceStudy {
        ensemble: kind.name().to_string(),
        distribution: dist,
        seed,
        decreasing: rows.windows(2).all(|w| w[1].deviation <= w[0].deviation),
        log_log_slope: log_log_slope(&rows),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::limits::laws::{arc_moment, rayleigh_cdf, rayleigh_quantile};
    use crate::rng::stream_rng;
    use rand::Rng;
    use std::f64::consts::PI;

    #[test]
    fn histogram_conserves_mass() {
        let v: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 / 7.0).collect();
        for b in [Binning::FreedmanDiaconis, Binning::Fixed(1), Binning::Fixed(13)] {
            let h = Histogram1D::new(&v, b).unwrap();
            assert_eq!(h.counts.iter().sum::<u64>(), h.total);
            assert_eq!(h.total, 1000);
            assert!(h.bin_edges.windows(2).all(|w| w[1] > w[0]));
            let mass: f64 = h.density().iter().zip(h.bin_edges.windows(2)).map(|(d, e)| d * (e[1] - e[0])).sum();
            assert!((mass - 1.0).abs() < 1e-12);
        }
        let h = Histogram1D::new(&[3.0, 3.0], Binning::FreedmanDiaconis).unwrap();
        assert_eq!(h.counts, vec![2]);
        assert!(Histogram1D::new(&[], Binning::FreedmanDiaconis).is_err());
    }

    #[test]
    fn ks_of_constant_sample() {
        assert_eq!(ks_distance(&[0.0], rayleigh_cdf).unwrap(), 0.5);
        assert!(ks_distance(&[], rayleigh_cdf).is_err());
    }

    #[test]
    fn ks_of_inverse_transform_sample() {
        // DKW: P(D > 0.01) <= 2 exp(-2 * 1e5 * 1e-4) ~ 4e-9.
        let mut rng = stream_rng(1, 2, 3);
        let v: Vec<f64> = (0..100_000).map(|_| rayleigh_quantile(rng.random::<f64>())).collect();
        assert!(ks_distance(&v, rayleigh_cdf).unwrap() <= 0.01);
    }

    #[test]
    fn ks_is_permutation_invariant() {
        let mut rng = stream_rng(4, 5, 6);
        let v: Vec<f64> = (0..500).map(|_| rng.random::<f64>() * 3.0 - 1.5).collect();
        let mut w = v.clone();
        w.reverse();
        w.rotate_left(123);
        assert_eq!(ks_distance(&v, rayleigh_cdf).unwrap(), ks_distance(&w, rayleigh_cdf).unwrap());
    }

    #[test]
    fn moments_of_identity_and_diagonal() {
        let ones = vec![Complex64::new(1.0, 0.0); 10];
        assert!(moments_of(&ones, 4).unwrap().iter().all(|m| *m == Complex64::new(1.0, 0.0)));
        let spec = EnsembleSpec::new(EnsembleKind::DiagonalD { theta: PI }, 2000).unwrap();
        let s = sample_spectrum(&spec, EntryDistribution::StandardGaussian, 0, 0).unwrap();
        let m = empirical_moments(&s, 3).unwrap();
        for (k, mk) in m.iter().enumerate() {
            assert!((mk - arc_moment(PI, k as i64 + 1)).norm() < 5.0 / 2000.0);
        }
        assert!(moments_of(&ones, 0).is_err());
    }

    #[test]
    fn skew_circulant_esd_is_planar_gaussian() {
        let spec = EnsembleSpec::new(EnsembleKind::SkewCirculant, 1024).unwrap();
        let samples = replicate_spectra(&spec, EntryDistribution::StandardGaussian, 8, 3).unwrap();
        let pooled: Vec<Complex64> = samples.iter().flat_map(|s| s.eigenvalues.clone()).collect();
        let e = esd_complex(&pooled).unwrap();
        assert_eq!(e.points.len(), 8 * 1024);
        assert!(e.ks_re < 0.03 && e.ks_im < 0.03, "{} {}", e.ks_re, e.ks_im);
        assert!(e.covariance_deviation() < 0.08, "{:?}", e.covariance);
    }

    #[test]
    fn left_skew_is_rayleigh() {
        let row = convergence_point(EnsembleKind::LeftSkewCirculant, 1024, 8, 1, EntryDistribution::StandardGaussian).unwrap();
        assert!(row.value < 0.03, "{row:?}");
    }

    #[test]
    fn hankel_fourth_moment_study() {
        let st = convergence_study(EnsembleKind::Hankel, &[64, 256], 6, 2, EntryDistribution::StandardGaussian).unwrap();
        assert_eq!(st.rows.len(), 2);
        assert!((st.rows[1].value - 2.0).abs() < 0.15, "{st:?}");
        assert!(convergence_study(EnsembleKind::Hankel, &[64, 64], 2, 2, EntryDistribution::StandardGaussian).is_err());
    }

    #[test]
    fn diagonal_ks_shrinks_like_one_over_n() {
        let st = convergence_study(
            EnsembleKind::DiagonalD { theta: PI },
            &[100, 1000, 10_000],
            1,
            0,
            EntryDistribution::StandardGaussian,
        )
        .unwrap();
        assert!(st.decreasing);
        for r in &st.rows {
            assert!(r.value <= 1.0 / r.n as f64 + 1e-12, "{r:?}");
        }
        assert!((st.log_log_slope.unwrap() + 1.0).abs() < 0.05);
    }

    #[test]
    fn csv_outputs() {
        let h = Histogram1D::new(&[0.0, 1.0, 2.0, 3.0], Binning::Fixed(2)).unwrap();
        let mut buf = Vec::new();
        h.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("bin_left,bin_right,count,density\n"));
        assert_eq!(text.lines().count(), 3);
    }
}
