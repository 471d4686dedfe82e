//! Spectra of the structured ensembles.
//!
//! Circulant-type matrices are diagonalized by (twisted) Fourier bases, so
//! their eigenvalues come from one FFT. The two symmetric circulant variants
//! (`L = S J`, `R = C J`) are handled in closed form too: `J` maps each
//! Fourier vector to its mirror partner up to a unit phase, so on each
//! two-dimensional mirror pair the matrix acts as `[[0, a], [b, 0]]` with
//! `ab = |lambda|^2`. Toeplitz and Hankel spectra fall back on a dense
//! symmetric eigensolver.

pub mod trace;

use std::f64::consts::PI;

use faer::{Mat, Side};
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::dense::DenseMatrix;
use crate::ensembles::{
    diagonal_d_entries, tilde_generator, EnsembleKind, EnsembleSpec, EntryDistribution,
};
use crate::error::{invalid, Error, Result};
use crate::operator::{letter_operator, FftPlans};
use crate::rng::{key_of, stream_rng};
use crate::word::LetterKind;

pub use trace::{trace_moment_mc, McConfig, MomentEstimate, WordPath};

/// Symmetry tolerance (relative to the largest entry) accepted by
/// [`dense_symmetric_eigs`].
pub const SYMMETRY_TOL: f64 = 1e-10;
/// Residual bound `||A v - lambda v|| <= RESIDUAL_TOL * ||A||_F`.
pub const RESIDUAL_TOL: f64 = 1e-8;
/// Largest imaginary part tolerated when a nominally real spectrum is
/// converted to reals.
pub const IMAG_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralSample {
    pub ensemble: EnsembleSpec,
    pub eigenvalues: Vec<Complex64>,
    /// Factor already applied to every eigenvalue (1 or `n^{-1/2}`).
    pub normalization: f64,
}

impl SpectralSample {
    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Rescale by `n^{-1/2}`; a no-op if already normalized.
    pub fn normalized(mut self) -> Self {
        let target = 1.0 / (self.n() as f64).sqrt();
        let factor = target / self.normalization;
        for z in &mut self.eigenvalues {
            *z *= factor;
        }
        self.normalization = target;
        self
    }

    /// Real parts, after checking every imaginary part is below [`IMAG_TOL`].
    pub fn real_values(&self) -> Result<Vec<f64>> {
        if let Some(z) = self.eigenvalues.iter().find(|z| z.im.abs() > IMAG_TOL) {
            return Err(invalid(format!(
                "spectrum is not real: eigenvalue {z} has imaginary part above {IMAG_TOL}"
            )));
        }
        Ok(self.eigenvalues.iter().map(|z| z.re).collect())
    }
}

fn from_reals(v: impl IntoIterator<Item = f64>) -> Vec<Complex64> {
    v.into_iter().map(|x| Complex64::new(x, 0.0)).collect()
}

/// `sum_r g_r e^{2 pi i r j / n}` for every `j`: an unnormalized inverse DFT.
fn fourier_sums(mut g: Vec<Complex64>) -> Vec<Complex64> {
    if g.is_empty() {
        return g;
    }
    FftPlanner::new().plan_fft_inverse(g.len()).process(&mut g);
    g
}

fn spec_of(kind: EnsembleKind, n: usize) -> EnsembleSpec {
    EnsembleSpec { kind, n }
}

fn require_nonempty(seq: &[f64]) -> Result<usize> {
    if seq.is_empty() {
        return Err(invalid("input sequence must be nonempty"));
    }
    Ok(seq.len())
}

/// `lambda_j = sum_r c_r e^{2 pi i r j / n}`.
pub fn eigs_circulant(seq: &[f64]) -> Result<SpectralSample> {
    let n = require_nonempty(seq)?;
    Ok(SpectralSample {
        ensemble: spec_of(EnsembleKind::Circulant, n),
        eigenvalues: fourier_sums(from_reals(seq.iter().copied())),
        normalization: 1.0,
    })
}

/// Eigenvalues of the circulant generated by `c_k eta^k`.
pub fn eigs_tilde_circulant(seq: &[f64], theta: f64) -> Result<SpectralSample> {
    let n = require_nonempty(seq)?;
    crate::ensembles::check_theta(theta)?;
    Ok(SpectralSample {
        ensemble: spec_of(EnsembleKind::TildeCirculant { theta }, n),
        eigenvalues: fourier_sums(tilde_generator(seq, theta)),
        normalization: 1.0,
    })
}

/// `lambda_j = sum_r s_r e^{i pi (2j+1) r / n}` for `j = 0, ..., n-1`.
pub fn eigs_skew_circulant(seq: &[f64]) -> Result<SpectralSample> {
    let n = require_nonempty(seq)?;
    Ok(SpectralSample {
        ensemble: spec_of(EnsembleKind::SkewCirculant, n),
        eigenvalues: fourier_sums(tilde_generator(seq, PI)),
        normalization: 1.0,
    })
}

/// `|lambda_j|` for the skew-circulant `Scirc(l_{n-1}, ..., l_0)`; these are
/// the singular values of the left skew-circulant built from `l`.
pub fn singular_spectrum_left_skew(seq: &[f64]) -> Result<Vec<f64>> {
    let rev: Vec<f64> = seq.iter().rev().copied().collect();
    Ok(eigs_skew_circulant(&rev)?
        .eigenvalues
        .iter()
        .map(|z| z.norm())
        .collect())
}

/// Eigenvalues of the left skew-circulant in closed form.
///
/// With `s = rev(l)` and `lambda_m` the skew-circulant eigenvalues, the
/// spectrum is `+-|lambda_m|` for each mirror pair `m < n-1-m`, plus the real
/// middle eigenvalue `sum_k (-1)^k s_k` when `n` is odd.
pub fn eigs_left_skew_circulant(seq: &[f64]) -> Result<SpectralSample> {
    let n = require_nonempty(seq)?;
    let rev: Vec<f64> = seq.iter().rev().copied().collect();
    let lambda = eigs_skew_circulant(&rev)?.eigenvalues;
    let mut out = Vec::with_capacity(n);
    for z in &lambda[..n / 2] {
        out.push(z.norm());
        out.push(-z.norm());
    }
    if n % 2 == 1 {
        let mid: f64 = rev
            .iter()
            .enumerate()
            .map(|(k, s)| if k % 2 == 0 { *s } else { -*s })
            .sum();
        out.push(mid);
    }
    Ok(SpectralSample {
        ensemble: spec_of(EnsembleKind::LeftSkewCirculant, n),
        eigenvalues: from_reals(out),
        normalization: 1.0,
    })
}

/// Eigenvalues of the reverse circulant `R = C J` in closed form: `mu_0`,
/// `+-|mu_m|` for each pair `{m, n-m}`, and `-mu_{n/2}` when `n` is even,
/// where `mu` are the circulant eigenvalues.
pub fn eigs_reverse_circulant(seq: &[f64]) -> Result<SpectralSample> {
    let n = require_nonempty(seq)?;
    let mu = eigs_circulant(seq)?.eigenvalues;
    let mut out = Vec::with_capacity(n);
    out.push(mu[0].re);
    for z in &mu[1..n.div_ceil(2)] {
        out.push(z.norm());
        out.push(-z.norm());
    }
    if n % 2 == 0 {
        out.push(-mu[n / 2].re);
    }
    Ok(SpectralSample {
        ensemble: spec_of(EnsembleKind::ReverseCirculant, n),
        eigenvalues: from_reals(out),
        normalization: 1.0,
    })
}

fn to_faer_real(m: &DenseMatrix) -> Result<Mat<f64>> {
    let scale = m.max_abs().max(f64::MIN_POSITIVE);
    let defect = m.real_symmetric_defect();
    if defect > SYMMETRY_TOL * scale.max(1.0) {
        return Err(invalid(format!(
            "matrix is not real symmetric (defect {defect:.3e})"
        )));
    }
    let n = m.dim();
    // Average the two triangles so the solver sees an exactly symmetric input.
    Ok(Mat::from_fn(n, n, |i, j| 0.5 * (m[(i, j)].re + m[(j, i)].re)))
}

/// Real eigenvalues (ascending) of a real symmetric matrix.
pub fn dense_symmetric_eigs(m: &DenseMatrix) -> Result<Vec<f64>> {
    let a = to_faer_real(m)?;
    a.self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Eigen(format!("{e:?}")))
}

/// Eigenvalues plus the largest residual `||A v - lambda v||` over all pairs.
pub fn dense_symmetric_eigs_checked(m: &DenseMatrix) -> Result<(Vec<f64>, f64)> {
    let a = to_faer_real(m)?;
    let evd = a
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Eigen(format!("{e:?}")))?;
    let u = evd.U();
    let s = evd.S().column_vector();
    let n = a.nrows();
    let vals: Vec<f64> = (0..n).map(|k| s[k]).collect();
    let av = &a * u;
    let mut worst: f64 = 0.0;
    for k in 0..n {
        let r: f64 = (0..n)
            .map(|i| (av[(i, k)] - vals[k] * u[(i, k)]).powi(2))
            .sum::<f64>()
            .sqrt();
        worst = worst.max(r);
    }
    let frob = m.frobenius_norm().max(f64::MIN_POSITIVE);
    if worst > RESIDUAL_TOL * frob {
        return Err(Error::Eigen(format!(
            "residual {worst:.3e} exceeds {RESIDUAL_TOL:e} * ||A||_F"
        )));
    }
    Ok((vals, worst))
}

/// Spectrum of one realization of `spec` built from `input`, by the closed
/// form when one exists and by the dense symmetric solver otherwise.
pub fn spectrum_of(spec: &EnsembleSpec, input: &[f64]) -> Result<SpectralSample> {
    if input.len() != spec.input_len() {
        return Err(Error::DimensionMismatch {
            expected: spec.input_len(),
            got: input.len(),
        });
    }
    let n = spec.n;
    let dense = |m: DenseMatrix| -> Result<SpectralSample> {
        Ok(SpectralSample {
            ensemble: *spec,
            eigenvalues: from_reals(dense_symmetric_eigs(&m)?),
            normalization: 1.0,
        })
    };
    match spec.kind {
        EnsembleKind::Circulant => eigs_circulant(input),
        EnsembleKind::TildeCirculant { theta } => eigs_tilde_circulant(input, theta),
        EnsembleKind::SkewCirculant => eigs_skew_circulant(input),
        EnsembleKind::LeftSkewCirculant => eigs_left_skew_circulant(input),
        EnsembleKind::ReverseCirculant => eigs_reverse_circulant(input),
        EnsembleKind::ToeplitzSym | EnsembleKind::Hankel => dense(spec.build(input)?),
        EnsembleKind::DiagonalD { theta } => Ok(SpectralSample {
            ensemble: *spec,
            eigenvalues: diagonal_d_entries(theta, n),
            normalization: 1.0,
        }),
        EnsembleKind::ExchangeJ => Ok(SpectralSample {
            ensemble: *spec,
            eigenvalues: from_reals((0..n).map(|k| if k < n.div_ceil(2) { 1.0 } else { -1.0 })),
            normalization: 1.0,
        }),
        EnsembleKind::ToeplitzNonsym => Err(Error::Unsupported(
            "eigenvalues of a non-symmetric Toeplitz matrix".into(),
        )),
    }
}

/// Input for replicate `rep` of `spec`; a pure function of `(seed, rep)`.
pub fn replicate_input(
    spec: &EnsembleSpec,
    dist: EntryDistribution,
    seed: u64,
    rep: u64,
) -> Vec<f64> {
    let mut rng = stream_rng(seed, key_of(spec.kind.name()), rep);
    dist.sample_vec(&mut rng, spec.input_len())
}

/// Normalized spectrum of replicate `rep`.
pub fn sample_spectrum(
    spec: &EnsembleSpec,
    dist: EntryDistribution,
    seed: u64,
    rep: u64,
) -> Result<SpectralSample> {
    let input = replicate_input(spec, dist, seed, rep);
    let s = spectrum_of(spec, &input)?;
    Ok(match spec.kind {
        EnsembleKind::DiagonalD { .. } | EnsembleKind::ExchangeJ => s,
        _ => s.normalized(),
    })
}

fn letter_kind(kind: &EnsembleKind) -> LetterKind {
    match kind {
        EnsembleKind::Circulant => LetterKind::C,
        EnsembleKind::TildeCirculant { .. } => LetterKind::CTilde,
        EnsembleKind::SkewCirculant => LetterKind::S,
        EnsembleKind::LeftSkewCirculant => LetterKind::L,
        EnsembleKind::ReverseCirculant => LetterKind::R,
        EnsembleKind::ToeplitzNonsym => LetterKind::T,
        EnsembleKind::ToeplitzSym => LetterKind::Ts,
        EnsembleKind::Hankel => LetterKind::H,
        EnsembleKind::DiagonalD { .. } => LetterKind::D,
        EnsembleKind::ExchangeJ => LetterKind::J,
    }
}

/// `n^{-1} Tr((A / sqrt n)^p)` for `p = 1..=max_p` (`max_p <= 4`) without an
/// eigensolve: `Tr(A^{a+b}) = sum_ik (A^a)_ik (A^b)_ki` with `A^2` formed by
/// structured right-multiplication.
pub fn trace_power_moments(spec: &EnsembleSpec, input: &[f64], max_p: usize) -> Result<Vec<Complex64>> {
    if max_p == 0 || max_p > 4 {
        return Err(invalid("trace_power_moments supports 1 <= max_p <= 4"));
    }
    let n = spec.n;
    let plans = FftPlans::new(n);
    let theta = spec.kind.theta().unwrap_or(0.0);
    let op = letter_operator(letter_kind(&spec.kind), 1, input, theta, &plans)?;
    let a1 = op.to_dense(&plans);
    let scale = match spec.kind {
        EnsembleKind::DiagonalD { .. } | EnsembleKind::ExchangeJ => 1.0,
        _ => 1.0 / (n as f64).sqrt(),
    };
    let nf = n as f64;
    let mut out = vec![a1.trace() * scale / nf];
    if max_p >= 2 {
        out.push(a1.trace_of_product(&a1) * scale.powi(2) / nf);
    }
    if max_p >= 3 {
        let mut a2 = a1.clone();
        op.apply_right(&mut a2, &plans);
        out.push(a1.trace_of_product(&a2) * scale.powi(3) / nf);
        if max_p == 4 {
            out.push(a2.trace_of_product(&a2) * scale.powi(4) / nf);
        }
    }
    Ok(out)
}
