//! Structured matrices built from random input sequences.
//!
//! Two-sided inputs (Toeplitz, Hankel) are stored with an explicit offset:
//! for a Toeplitz matrix of order `n`, storage position `k` holds
//! `tau_{k-(n-1)}`, so the slice runs `tau_{-(n-1)}, ..., tau_0, ..., tau_{n-1}`.
//! Hankel input is stored as `h_0, ..., h_{2n-2}`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::dense::DenseMatrix;
use crate::error::{invalid, Result};
use crate::rng::{key_of, stream_rng};

const THETA_SLACK: f64 = 1e-12;

/// Law of the i.i.d. real entries. Every variant has mean 0 and variance 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum EntryDistribution {
    #[default]
    StandardGaussian,
    Rademacher,
    /// Uniform on `[-sqrt(3), sqrt(3)]`.
    UniformScaled,
}

impl EntryDistribution {
    pub fn sample<R: Rng + ?Sized>(self, rng: &mut R) -> f64 {
        match self {
            Self::StandardGaussian => rng.sample(StandardNormal),
            Self::Rademacher => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            Self::UniformScaled => {
                let s = 3f64.sqrt();
                rng.random_range(-s..=s)
            }
        }
    }

    pub fn sample_vec<R: Rng + ?Sized>(self, rng: &mut R, len: usize) -> Vec<f64> {
        (0..len).map(|_| self.sample(rng)).collect()
    }
}

impl FromStr for EntryDistribution {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gaussian" | "normal" | "standard-gaussian" => Ok(Self::StandardGaussian),
            "rademacher" | "sign" => Ok(Self::Rademacher),
            "uniform" | "uniform-scaled" => Ok(Self::UniformScaled),
            other => Err(invalid(format!("unknown entry distribution `{other}`"))),
        }
    }
}

impl fmt::Display for EntryDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::StandardGaussian => "gaussian",
            Self::Rademacher => "rademacher",
            Self::UniformScaled => "uniform",
        })
    }
}

/// A reproducible input sequence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InputSequence {
    pub values: Vec<f64>,
    pub seed: u64,
    pub distribution: EntryDistribution,
}

impl Deref for InputSequence {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.values
    }
}

/// Draw `len` i.i.d. values; a pure function of `(dist, len, seed)`.
pub fn sample_input(dist: EntryDistribution, len: usize, seed: u64) -> Result<InputSequence> {
    if len == 0 {
        return Err(invalid("input sequence length must be at least 1"));
    }
    let mut rng = stream_rng(seed, key_of("input-sequence"), 0);
    Ok(InputSequence {
        values: dist.sample_vec(&mut rng, len),
        seed,
        distribution: dist,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum EnsembleKind {
    Circulant,
    TildeCirculant { theta: f64 },
    SkewCirculant,
    LeftSkewCirculant,
    ReverseCirculant,
    ToeplitzNonsym,
    ToeplitzSym,
    Hankel,
    DiagonalD { theta: f64 },
    ExchangeJ,
}

impl EnsembleKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Circulant => "circulant",
            Self::TildeCirculant { .. } => "tilde-circulant",
            Self::SkewCirculant => "skew",
            Self::LeftSkewCirculant => "left-skew",
            Self::ReverseCirculant => "reverse-circulant",
            Self::ToeplitzNonsym => "toeplitz",
            Self::ToeplitzSym => "symmetric-toeplitz",
            Self::Hankel => "hankel",
            Self::DiagonalD { .. } => "diagonal-d",
            Self::ExchangeJ => "exchange-j",
        }
    }

    pub fn theta(&self) -> Option<f64> {
        match *self {
            Self::TildeCirculant { theta } | Self::DiagonalD { theta } => Some(theta),
            _ => None,
        }
    }

    /// Parse a kind name; `theta` is required exactly for the kinds that use it.
    pub fn parse(name: &str, theta: Option<f64>) -> Result<Self> {
        let kind = match name.to_ascii_lowercase().as_str() {
            "circulant" | "c" => Self::Circulant,
            "tilde-circulant" | "c~" => Self::TildeCirculant {
                theta: theta.ok_or_else(|| invalid("tilde-circulant needs theta"))?,
            },
            "skew" | "skew-circulant" | "s" => Self::SkewCirculant,
            "left-skew" | "left-skew-circulant" | "l" => Self::LeftSkewCirculant,
            "reverse-circulant" | "reverse" | "r" => Self::ReverseCirculant,
            "toeplitz" | "t" => Self::ToeplitzNonsym,
            "symmetric-toeplitz" | "ts" => Self::ToeplitzSym,
            "hankel" | "h" => Self::Hankel,
            "diagonal-d" | "d" => Self::DiagonalD {
                theta: theta.ok_or_else(|| invalid("diagonal-d needs theta"))?,
            },
            "exchange-j" | "j" => Self::ExchangeJ,
            other => return Err(invalid(format!("unknown ensemble `{other}`"))),
        };
        Ok(kind)
    }

    /// Real symmetric kinds, whose spectra are real.
    pub fn is_symmetric(&self) -> bool {
        matches!(
            self,
            Self::LeftSkewCirculant
                | Self::ReverseCirculant
                | Self::ToeplitzSym
                | Self::Hankel
                | Self::ExchangeJ
        )
    }
}

/// Which structured matrix to build, and at what order.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub kind: EnsembleKind,
    pub n: usize,
}

impl EnsembleSpec {
    pub fn new(kind: EnsembleKind, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("matrix order must be positive"));
        }
        if let Some(theta) = kind.theta() {
            check_theta(theta)?;
        }
        Ok(Self { kind, n })
    }

    /// Length of the random input consumed by [`EnsembleSpec::build`].
    pub fn input_len(&self) -> usize {
        match self.kind {
            EnsembleKind::ToeplitzNonsym | EnsembleKind::Hankel => 2 * self.n - 1,
            EnsembleKind::DiagonalD { .. } | EnsembleKind::ExchangeJ => 0,
            _ => self.n,
        }
    }

    pub fn build(&self, seq: &[f64]) -> Result<DenseMatrix> {
        let expect = self.input_len();
        if seq.len() != expect {
            return Err(invalid(format!(
                "{} of order {} needs {} inputs, got {}",
                self.kind.name(),
                self.n,
                expect,
                seq.len()
            )));
        }
        Ok(match self.kind {
            EnsembleKind::Circulant => build_circulant(seq),
            EnsembleKind::TildeCirculant { theta } => build_tilde_circulant(seq, theta)?,
            EnsembleKind::SkewCirculant => build_skew_circulant(seq),
            EnsembleKind::LeftSkewCirculant => build_left_skew_circulant(seq),
            EnsembleKind::ReverseCirculant => build_reverse_circulant(seq),
            EnsembleKind::ToeplitzNonsym => build_toeplitz(seq)?,
            EnsembleKind::ToeplitzSym => build_symmetric_toeplitz(seq),
            EnsembleKind::Hankel => build_hankel(seq)?,
            EnsembleKind::DiagonalD { theta } => build_diagonal_d(theta, self.n)?,
            EnsembleKind::ExchangeJ => build_exchange_j(self.n),
        })
    }

    /// Sample this ensemble's input from `dist` with the given seed.
    pub fn sample(&self, dist: EntryDistribution, seed: u64) -> Result<Option<InputSequence>> {
        match self.input_len() {
            0 => Ok(None),
            len => sample_input(dist, len, seed).map(Some),
        }
    }
}

pub(crate) fn check_theta(theta: f64) -> Result<()> {
    if !theta.is_finite() || theta.abs() > PI + THETA_SLACK {
        return Err(invalid(format!("theta = {theta} lies outside [-pi, pi]")));
    }
    Ok(())
}


/// Order of a two-sided input of length `2n - 1`.
pub(crate) fn two_sided_order(len: usize) -> Result<usize> {
    if len == 0 || len % 2 == 0 {
        return Err(invalid(format!(
            "two-sided input must have odd length 2n-1, got {len}"
        )));
    }
    Ok(len.div_ceil(2))
}

/// `C[i][j] = c[(j - i) mod n]`.
pub fn build_circulant(seq: &[f64]) -> DenseMatrix {
    let n = seq.len();
    DenseMatrix::from_real_fn(n, |i, j| seq[(j + n - i) % n])
}

/// Circulant generated by `c_k * eta^k`, `eta = exp(i theta / n)`.
pub fn build_tilde_circulant(seq: &[f64], theta: f64) -> Result<DenseMatrix> {
    check_theta(theta)?;
    let gen = tilde_generator(seq, theta);
    let n = seq.len();
    Ok(DenseMatrix::from_fn(n, |i, j| gen[(j + n - i) % n]))
}

pub(crate) fn tilde_generator(seq: &[f64], theta: f64) -> Vec<Complex64> {
    let n = seq.len() as f64;
    seq.iter()
        .enumerate()
        .map(|(k, &c)| Complex64::from_polar(c, theta * k as f64 / n))
        .collect()
}

/// `S[i][j] = s[j - i]` on and above the diagonal, `-s[n + j - i]` below.
pub fn build_skew_circulant(seq: &[f64]) -> DenseMatrix {
    let n = seq.len();
    DenseMatrix::from_real_fn(n, |i, j| if j >= i { seq[j - i] } else { -seq[n + j - i] })
}

/// Left skew-circulant: `L[i][j] = l[i + j]` for `i + j < n`, `-l[i + j - n]` otherwise.
/// Equals `Scirc(l_{n-1}, ..., l_0) * J`.
pub fn build_left_skew_circulant(seq: &[f64]) -> DenseMatrix {
    let n = seq.len();
    DenseMatrix::from_real_fn(n, |i, j| {
        let k = i + j;
        if k < n {
            seq[k]
        } else {
            -seq[k - n]
        }
    })
}

/// Reverse circulant `R = C * J`, i.e. `R[i][j] = c[(n - 1 - j - i) mod n]`.
pub fn build_reverse_circulant(seq: &[f64]) -> DenseMatrix {
    let n = seq.len();
    DenseMatrix::from_real_fn(n, |i, j| seq[(2 * n - 1 - i - j) % n])
}

/// Toeplitz `T[i][j] = tau_{j-i}` from a two-sided input of length `2n - 1`.
pub fn build_toeplitz(two_sided: &[f64]) -> Result<DenseMatrix> {
    let n = two_sided_order(two_sided.len())?;
    Ok(DenseMatrix::from_real_fn(n, |i, j| two_sided[j + n - 1 - i]))
}

/// Symmetric Toeplitz `T[i][j] = x_{|i-j|}`.
pub fn build_symmetric_toeplitz(seq: &[f64]) -> DenseMatrix {
    DenseMatrix::from_real_fn(seq.len(), |i, j| seq[i.abs_diff(j)])
}

/// Hankel `H[i][j] = h_{i+j}` from `h_0, ..., h_{2n-2}`.
pub fn build_hankel(seq: &[f64]) -> Result<DenseMatrix> {
    let n = two_sided_order(seq.len())?;
    Ok(DenseMatrix::from_real_fn(n, |i, j| seq[i + j]))
}

pub(crate) fn diagonal_d_entries(theta: f64, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|j| Complex64::from_polar(1.0, theta * j as f64 / n as f64))
        .collect()
}

/// `D_n(theta) = diag(1, eta, ..., eta^{n-1})`, `eta = exp(i theta / n)`.
pub fn build_diagonal_d(theta: f64, n: usize) -> Result<DenseMatrix> {
    check_theta(theta)?;
    if n == 0 {
        return Err(invalid("matrix order must be positive"));
    }
    let d = diagonal_d_entries(theta, n);
    let mut m = DenseMatrix::zeros(n);
    for (j, z) in d.into_iter().enumerate() {
        m[(j, j)] = z;
    }
    Ok(m)
}

/// Exchange matrix `J[i][j] = [i + j == n - 1]`.
pub fn build_exchange_j(n: usize) -> DenseMatrix {
    DenseMatrix::from_real_fn(n, |i, j| if i + j + 1 == n { 1.0 } else { 0.0 })
}

/// Two-sided Toeplitz storage for `T = (C + S) / sqrt(2)`.
pub fn toeplitz_from_circulant_pair(c: &[f64], s: &[f64]) -> Vec<f64> {
    assert_eq!(c.len(), s.len());
    let n = c.len();
    let mut tau = vec![0.0; 2 * n - 1];
    tau[n - 1] = (c[0] + s[0]) * FRAC_1_SQRT_2;
    for j in 1..n {
        tau[n - 1 + j] = (c[j] + s[j]) * FRAC_1_SQRT_2;
        tau[n - 1 - j] = (c[n - j] - s[n - j]) * FRAC_1_SQRT_2;
    }
    tau
}

/// One assembled identity `lhs = rhs`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub name: String,
    pub max_abs_deviation: f64,
    /// `||lhs - rhs||_F / max(||lhs||_F, ||rhs||_F)`.
    pub relative_deviation: f64,
    /// Largest entry modulus of `lhs`.
    pub scale: f64,
}

impl IdentityCheck {
    fn new(name: &str, lhs: &DenseMatrix, rhs: &DenseMatrix) -> Self {
        let diff = lhs - rhs;
        let norm = lhs.frobenius_norm().max(rhs.frobenius_norm());
        Self {
            name: name.to_string(),
            max_abs_deviation: diff.max_abs(),
            relative_deviation: if norm > 0.0 {
                diff.frobenius_norm() / norm
            } else {
                0.0
            },
            scale: lhs.max_abs(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub n: usize,
    pub seed: u64,
    pub checks: Vec<IdentityCheck>,
}

impl DecompositionReport {
    pub fn max_relative_deviation(&self) -> f64 {
        self.checks
            .iter()
            .map(|c| c.relative_deviation)
            .fold(0.0, f64::max)
    }
}

/// Build shared Gaussian inputs and assemble both sides of every algebraic
/// identity linking the ensembles.
pub fn check_decompositions(n: usize, seed: u64) -> Result<DecompositionReport> {
    if n < 2 {
        return Err(invalid("decomposition checks need n >= 2"));
    }
    let dist = EntryDistribution::StandardGaussian;
    let mut rng = stream_rng(seed, key_of("decompositions"), n as u64);
    let c = dist.sample_vec(&mut rng, n);
    let s = dist.sample_vec(&mut rng, n);
    let l = dist.sample_vec(&mut rng, n);

    let cm = build_circulant(&c);
    let sm = build_skew_circulant(&s);
    let j = build_exchange_j(n);
    let mut checks = Vec::new();

    // T = (C + S) / sqrt(2)
    let tau = toeplitz_from_circulant_pair(&c, &s);
    let t = build_toeplitz(&tau)?;
    checks.push(IdentityCheck::new(
        "T = (C+S)/sqrt2",
        &t,
        &(&cm + &sm).scale(FRAC_1_SQRT_2),
    ));

    // S = D(pi) C~(pi) D(pi)*
    let d = build_diagonal_d(PI, n)?;
    let ct = build_tilde_circulant(&s, PI)?;
    checks.push(IdentityCheck::new(
        "S = D C~ D*",
        &sm,
        &(&(&d * &ct) * &d.adjoint()),
    ));

    // L = Scirc(rev l) J
    let lm = build_left_skew_circulant(&l);
    let rev_l: Vec<f64> = l.iter().rev().copied().collect();
    let s_rev = build_skew_circulant(&rev_l);
    checks.push(IdentityCheck::new("L = S J", &lm, &(&s_rev * &j)));

    // R = C J
    let r = build_reverse_circulant(&c);
    checks.push(IdentityCheck::new("R = C J", &r, &(&cm * &j)));

    // H = T J / sqrt(2) with h_j = tau_{(n-1)-j} / sqrt(2)
    let h_seq: Vec<f64> = tau.iter().rev().map(|x| x * FRAC_1_SQRT_2).collect();
    let h = build_hankel(&h_seq)?;
    checks.push(IdentityCheck::new(
        "H = T J/sqrt2",
        &h,
        &(&t * &j).scale(FRAC_1_SQRT_2),
    ));

    // T_s = (T + T^T) / sqrt(2) with x_|k| = (tau_k + tau_-k) / sqrt(2)
    let x: Vec<f64> = (0..n)
        .map(|k| (tau[n - 1 + k] + tau[n - 1 - k]) * FRAC_1_SQRT_2)
        .collect();
    let ts = build_symmetric_toeplitz(&x);
    checks.push(IdentityCheck::new(
        "Ts = (T+T^T)/sqrt2",
        &ts,
        &(&t + &t.transpose()).scale(FRAC_1_SQRT_2),
    ));

    // L^2 = S S*
    checks.push(IdentityCheck::new(
        "L^2 = S S*",
        &(&lm * &lm),
        &(&s_rev * &s_rev.adjoint()),
    ));

    // R^2 = C C*
    checks.push(IdentityCheck::new(
        "R^2 = C C*",
        &(&r * &r),
        &(&cm * &cm.adjoint()),
    ));

    Ok(DecompositionReport { n, seed, checks })
}

/// `||S1 S2 - S2 S1||_F / (||S1||_F ||S2||_F)` for independent skew-circulants.
pub fn skew_commutator_defect(n: usize, seed: u64) -> f64 {
    let mut rng = stream_rng(seed, key_of("skew-commutator"), n as u64);
    let dist = EntryDistribution::StandardGaussian;
    let s1 = build_skew_circulant(&dist.sample_vec(&mut rng, n));
    let s2 = build_skew_circulant(&dist.sample_vec(&mut rng, n));
    let comm = &(&s1 * &s2) - &(&s2 * &s1);
    comm.frobenius_norm() / (s1.frobenius_norm() * s2.frobenius_norm())
}

/// `||L1 L2 L3 - L3 L2 L1||_F / (||L1||_F ||L2||_F ||L3||_F)` for independent
/// left skew-circulants.
pub fn left_skew_half_commutator_defect(n: usize, seed: u64) -> f64 {
    let mut rng = stream_rng(seed, key_of("left-skew-half-commutator"), n as u64);
    let dist = EntryDistribution::StandardGaussian;
    let l1 = build_left_skew_circulant(&dist.sample_vec(&mut rng, n));
    let l2 = build_left_skew_circulant(&dist.sample_vec(&mut rng, n));
    let l3 = build_left_skew_circulant(&dist.sample_vec(&mut rng, n));
    let lhs = &(&l1 * &l2) * &l3;
    let rhs = &(&l3 * &l2) * &l1;
    (&lhs - &rhs).frobenius_norm()
        / (l1.frobenius_norm() * l2.frobenius_norm() * l3.frobenius_norm())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn re(m: &DenseMatrix) -> Vec<f64> {
        m.real_parts()
    }

    #[test]
    fn rademacher_support_and_determinism() {
        let a = sample_input(EntryDistribution::Rademacher, 4, 11).unwrap();
        assert!(a.iter().all(|&x| x == 1.0 || x == -1.0));
        let b = sample_input(EntryDistribution::Rademacher, 4, 11).unwrap();
        assert_eq!(a, b);
        assert!(sample_input(EntryDistribution::StandardGaussian, 0, 1).is_err());
    }

    #[test]
    fn gaussian_variance_is_one() {
        let x = sample_input(EntryDistribution::StandardGaussian, 1_000_000, 3).unwrap();
        let mean = x.iter().sum::<f64>() / x.len() as f64;
        let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / x.len() as f64;
        assert!((var - 1.0).abs() < 0.01, "var = {var}");
        let u = sample_input(EntryDistribution::UniformScaled, 1_000_000, 3).unwrap();
        let var_u = u.iter().map(|v| v * v).sum::<f64>() / u.len() as f64;
        assert!((var_u - 1.0).abs() < 0.01, "var = {var_u}");
    }

    #[test]
    fn circulant_small_cases() {
        assert_eq!(re(&build_circulant(&[2.5])), vec![2.5]);
        let m = build_circulant(&[0.0, 1.0, 2.0]);
        assert_eq!(re(&m), vec![0.0, 1.0, 2.0, 2.0, 0.0, 1.0, 1.0, 2.0, 0.0]);
    }

    #[test]
    fn tilde_circulant_cases() {
        let c = [0.3, -1.2, 0.7];
        assert_eq!(build_tilde_circulant(&c, 0.0).unwrap(), build_circulant(&c));
        let m = build_tilde_circulant(&[1.0, 1.0], PI).unwrap();
        assert!((m[(0, 1)] - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        let mt = build_tilde_circulant(&c, 2.0).unwrap();
        let mc = build_circulant(&c);
        for i in 0..3 {
            for j in 0..3 {
                assert!((mt[(i, j)].norm() - mc[(i, j)].norm()).abs() < 1e-15);
            }
        }
        assert!(build_tilde_circulant(&c, 4.0).is_err());
    }

    #[test]
    fn skew_and_left_skew_small_cases() {
        assert_eq!(re(&build_skew_circulant(&[3.0, 5.0])), vec![3.0, 5.0, -5.0, 3.0]);
        assert_eq!(
            re(&build_left_skew_circulant(&[3.0, 5.0])),
            vec![3.0, 5.0, 5.0, -3.0]
        );
    }

    #[test]
    fn toeplitz_hankel_small_cases() {
        assert_eq!(re(&build_toeplitz(&[1.0, 2.0, 3.0]).unwrap()), vec![2.0, 3.0, 1.0, 2.0]);
        assert!(build_toeplitz(&[1.0, 2.0]).is_err());
        assert_eq!(re(&build_hankel(&[1.0, 2.0, 3.0]).unwrap()), vec![1.0, 2.0, 2.0, 3.0]);
        assert!(build_hankel(&[1.0, 2.0, 3.0, 4.0]).is_err());
        assert_eq!(re(&build_symmetric_toeplitz(&[1.0, 2.0])), vec![1.0, 2.0, 2.0, 1.0]);
        assert_eq!(re(&build_reverse_circulant(&[4.0])), vec![4.0]);
    }

    #[test]
    fn reverse_circulant_is_c_times_j() {
        let c = [1.0, 2.0, 3.0];
        let r = build_reverse_circulant(&c);
        assert_eq!(r, &build_circulant(&c) * &build_exchange_j(3));
        // rows of R are the circulant rows read right to left
        assert_eq!(re(&r)[..3], [2.0, 1.0, 0.0].map(|k| c[k as usize]));
    }

    #[test]
    fn diagonal_and_exchange() {
        assert_eq!(build_diagonal_d(0.0, 3).unwrap(), DenseMatrix::identity(3));
        let d = build_diagonal_d(PI, 2).unwrap();
        assert!((d[(1, 1)] - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        let d = build_diagonal_d(1.3, 16).unwrap();
        assert!((&d * &d.adjoint()).max_abs_diff(&DenseMatrix::identity(16)) < 1e-15);
        assert_eq!(re(&build_exchange_j(2)), vec![0.0, 1.0, 1.0, 0.0]);
        let j = build_exchange_j(7);
        assert_eq!(&j * &j, DenseMatrix::identity(7));
        assert!(j.is_symmetric_exact());
    }

    #[test]
    fn decompositions_hold_at_mixed_parities() {
        for n in [2, 3, 8, 64] {
            let rep = check_decompositions(n, 5).unwrap();
            for c in &rep.checks {
                assert!(
                    c.relative_deviation <= 1e-12,
                    "n={n} {}: {}",
                    c.name,
                    c.relative_deviation
                );
                assert!(c.max_abs_deviation <= 1e-12 * c.scale.max(1.0) * n as f64);
            }
        }
        assert!(check_decompositions(1, 5).is_err());
    }

    #[test]
    fn spec_build_validates_lengths() {
        let spec = EnsembleSpec::new(EnsembleKind::Hankel, 3).unwrap();
        assert_eq!(spec.input_len(), 5);
        assert!(spec.build(&[0.0; 3]).is_err());
        assert!(EnsembleSpec::new(EnsembleKind::DiagonalD { theta: 7.0 }, 3).is_err());
        assert!(EnsembleKind::parse("tilde-circulant", None).is_err());
    }

    #[test]
    fn commutation_defects_are_rounding_level() {
        for seed in 0..3 {
            assert!(skew_commutator_defect(32, seed) < 1e-12);
            assert!(left_skew_half_commutator_defect(32, seed) < 1e-12);
        }
    }
}
