//! Structured right-multiplication.
//!
//! Every letter of a word factors into a few cheap operators: circulants
//! (diagonal in the Fourier basis), Toeplitz blocks (embedded in a circulant
//! of twice the size), diagonals, and the exchange permutation. Applying them
//! row by row to a running product costs `O(n^2 log n)` per letter instead of
//! the `O(n^3)` of a dense multiply.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::dense::DenseMatrix;
use crate::ensembles::{
    build_circulant, build_diagonal_d, build_exchange_j, build_hankel, build_left_skew_circulant,
    build_reverse_circulant, build_skew_circulant, build_symmetric_toeplitz,
    build_tilde_circulant, build_toeplitz, diagonal_d_entries, tilde_generator,
};
use crate::error::{invalid, Result};
use crate::word::{Letter, LetterKind};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// FFT plans for one matrix order, shared by every operator of that order.
#[derive(Clone)]
pub struct FftPlans {
    n: usize,
    fwd_n: Arc<dyn Fft<f64>>,
    inv_n: Arc<dyn Fft<f64>>,
    fwd_2n: Arc<dyn Fft<f64>>,
    inv_2n: Arc<dyn Fft<f64>>,
}

impl FftPlans {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            n,
            fwd_n: planner.plan_fft_forward(n),
            inv_n: planner.plan_fft_inverse(n),
            fwd_2n: planner.plan_fft_forward(2 * n),
            inv_2n: planner.plan_fft_inverse(2 * n),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

impl std::fmt::Debug for FftPlans {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FftPlans").field("n", &self.n).finish()
    }
}

/// One structured factor `M`, applied as `x -> x M` to row vectors.
#[derive(Clone, Debug)]
pub enum StructuredOp {
    /// `M[k][j] = g[(j - k) mod n]`, stored as the forward DFT of `g`.
    Circulant { spectrum: Vec<Complex64> },
    /// `M[k][j] = t[j - k + n - 1]`, stored as the forward DFT (size `2n`) of `t`.
    Toeplitz { spectrum: Vec<Complex64> },
    Diagonal(Vec<Complex64>),
    /// The exchange matrix `J`.
    Reverse,
}

impl StructuredOp {
    pub fn circulant(gen: &[Complex64], plans: &FftPlans) -> Self {
        let mut spectrum = gen.to_vec();
        plans.fwd_n.process(&mut spectrum);
        Self::Circulant { spectrum }
    }

    /// Toeplitz operator from two-sided storage `t_{-(n-1)}, ..., t_{n-1}`.
    pub fn toeplitz(two_sided: &[Complex64], plans: &FftPlans) -> Self {
        let mut spectrum = vec![ZERO; 2 * plans.n];
        spectrum[..two_sided.len()].copy_from_slice(two_sided);
        plans.fwd_2n.process(&mut spectrum);
        Self::Toeplitz { spectrum }
    }

    /// The operator of `M*`.
    pub fn adjoint(&self, plans: &FftPlans) -> Self {
        match self {
            // The conjugate-reversed generator has the conjugate spectrum.
            Self::Circulant { spectrum } => Self::Circulant {
                spectrum: spectrum.iter().map(|z| z.conj()).collect(),
            },
            Self::Toeplitz { spectrum } => {
                // Recover storage, conjugate-reverse it, re-transform.
                let mut t = spectrum.clone();
                plans.inv_2n.process(&mut t);
                let scale = 1.0 / (2 * plans.n) as f64;
                let len = 2 * plans.n - 1;
                let rev: Vec<Complex64> = (0..len).map(|p| t[len - 1 - p].conj() * scale).collect();
                Self::toeplitz(&rev, plans)
            }
            Self::Diagonal(d) => Self::Diagonal(d.iter().map(|z| z.conj()).collect()),
            Self::Reverse => Self::Reverse,
        }
    }

    /// Replace `row` with `row * M`. `scratch` must hold at least `2n` entries.
    fn apply_row(&self, row: &mut [Complex64], scratch: &mut [Complex64], plans: &FftPlans) {
        let n = row.len();
        match self {
            Self::Circulant { spectrum } => {
                let buf = &mut scratch[..n];
                buf.copy_from_slice(row);
                plans.fwd_n.process(buf);
                for (b, s) in buf.iter_mut().zip(spectrum) {
                    *b *= s;
                }
                plans.inv_n.process(buf);
                let scale = 1.0 / n as f64;
                for (r, b) in row.iter_mut().zip(buf.iter()) {
                    *r = b * scale;
                }
            }
            Self::Toeplitz { spectrum } => {
                let buf = &mut scratch[..2 * n];
                buf[..n].copy_from_slice(row);
                buf[n..].fill(ZERO);
                plans.fwd_2n.process(buf);
                for (b, s) in buf.iter_mut().zip(spectrum) {
                    *b *= s;
                }
                plans.inv_2n.process(buf);
                let scale = 1.0 / (2 * n) as f64;
                for (j, r) in row.iter_mut().enumerate() {
                    *r = buf[j + n - 1] * scale;
                }
            }
            Self::Diagonal(d) => {
                for (r, z) in row.iter_mut().zip(d) {
                    *r *= z;
                }
            }
            Self::Reverse => row.reverse(),
        }
    }
}

/// A matrix realized as a product of structured factors.
#[derive(Clone, Debug)]
pub struct StructuredMatrix {
    pub ops: Vec<StructuredOp>,
}

impl StructuredMatrix {
    /// `P <- P * M`, row by row.
    pub fn apply_right(&self, p: &mut DenseMatrix, plans: &FftPlans) {
        let n = p.dim();
        let mut scratch = vec![ZERO; 2 * n];
        for row in p.as_mut_slice().chunks_mut(n) {
            for op in &self.ops {
                op.apply_row(row, &mut scratch, plans);
            }
        }
    }

    pub fn adjoint(&self, plans: &FftPlans) -> Self {
        Self {
            ops: self.ops.iter().rev().map(|op| op.adjoint(plans)).collect(),
        }
    }

    pub fn to_dense(&self, plans: &FftPlans) -> DenseMatrix {
        let mut m = DenseMatrix::identity(plans.n);
        self.apply_right(&mut m, plans);
        m
    }
}

/// Diagonal of `D(theta)^k`.
fn diagonal_power(theta: f64, k: i32, n: usize) -> Vec<Complex64> {
    if k == 1 {
        return diagonal_d_entries(theta, n);
    }
    (0..n)
        .map(|j| Complex64::from_polar(1.0, theta * f64::from(k) * j as f64 / n as f64))
        .collect()
}

fn complexify(x: &[f64]) -> Vec<Complex64> {
    x.iter().map(|&v| Complex64::new(v, 0.0)).collect()
}

/// Structured factors of one (unadjointed) letter given its random input.
///
/// `theta` is the angle used by `C~` and `D`. `S` is factored through the
/// unitary similarity `S = D(pi) C~(pi) D(pi)*`, and the symmetric letters
/// through `J`: `L = Scirc(rev l) J`, `R = C J`, `H = T' J`.
pub fn letter_operator(
    kind: LetterKind,
    power: i32,
    input: &[f64],
    theta: f64,
    plans: &FftPlans,
) -> Result<StructuredMatrix> {
    let n = plans.n;
    let want = kind.input_len(n);
    if input.len() != want {
        return Err(invalid(format!(
            "letter {} of order {n} needs {want} inputs, got {}",
            kind.token(),
            input.len()
        )));
    }
    let skew_ops = |s: &[f64]| {
        let d = diagonal_d_entries(PI, n);
        let dc: Vec<Complex64> = d.iter().map(|z| z.conj()).collect();
        vec![
            StructuredOp::Diagonal(d),
            StructuredOp::circulant(&tilde_generator(s, PI), plans),
            StructuredOp::Diagonal(dc),
        ]
    };
    let ops = match kind {
        LetterKind::C => vec![StructuredOp::circulant(&complexify(input), plans)],
        LetterKind::CTilde => vec![StructuredOp::circulant(&tilde_generator(input, theta), plans)],
        LetterKind::S => skew_ops(input),
        LetterKind::L => {
            let rev: Vec<f64> = input.iter().rev().copied().collect();
            let mut ops = skew_ops(&rev);
            ops.push(StructuredOp::Reverse);
            ops
        }
        LetterKind::R => vec![
            StructuredOp::circulant(&complexify(input), plans),
            StructuredOp::Reverse,
        ],
        LetterKind::T => vec![StructuredOp::toeplitz(&complexify(input), plans)],
        LetterKind::Ts => {
            let two_sided: Vec<Complex64> = (0..2 * n - 1)
                .map(|p| Complex64::new(input[p.abs_diff(n - 1)], 0.0))
                .collect();
            vec![StructuredOp::toeplitz(&two_sided, plans)]
        }
        LetterKind::H => {
            let rev: Vec<Complex64> = input.iter().rev().map(|&v| Complex64::new(v, 0.0)).collect();
            vec![StructuredOp::toeplitz(&rev, plans), StructuredOp::Reverse]
        }
        LetterKind::D => {
            vec![StructuredOp::Diagonal(diagonal_power(theta, power, n))]
        }
        LetterKind::J => vec![StructuredOp::Reverse],
    };
    Ok(StructuredMatrix { ops })
}

/// Dense matrix of one (unadjointed) letter; the reference for
/// [`letter_operator`].
pub fn letter_dense(kind: LetterKind, power: i32, input: &[f64], theta: f64, n: usize) -> Result<DenseMatrix> {
    let want = kind.input_len(n);
    if input.len() != want {
        return Err(invalid(format!(
            "letter {} of order {n} needs {want} inputs, got {}",
            kind.token(),
            input.len()
        )));
    }
    Ok(match kind {
        LetterKind::C => build_circulant(input),
        LetterKind::CTilde => build_tilde_circulant(input, theta)?,
        LetterKind::S => build_skew_circulant(input),
        LetterKind::L => build_left_skew_circulant(input),
        LetterKind::R => build_reverse_circulant(input),
        LetterKind::T => build_toeplitz(input)?,
        LetterKind::Ts => build_symmetric_toeplitz(input),
        LetterKind::H => build_hankel(input)?,
        LetterKind::D if power == 1 => build_diagonal_d(theta, n)?,
        LetterKind::D => {
            crate::ensembles::check_theta(theta)?;
            let d = diagonal_power(theta, power, n);
            DenseMatrix::from_fn(n, |i, j| if i == j { d[i] } else { ZERO })
        }
        LetterKind::J => build_exchange_j(n),
    })
}

/// Convenience for a fully specified letter.
pub fn letter_matrix(letter: &Letter, input: &[f64], theta: f64, n: usize) -> Result<DenseMatrix> {
    let m = letter_dense(letter.kind(), letter.power, input, theta, n)?;
    Ok(if letter.adjoint { m.adjoint() } else { m })
}

/// Toeplitz matrix-vector product `T v` in `O(n log n)` from two-sided input.
pub fn fast_matvec_toeplitz(two_sided: &[f64], v: &[f64]) -> Result<Vec<f64>> {
    let n = crate::ensembles::two_sided_order(two_sided.len())?;
    if v.len() != n {
        return Err(crate::Error::DimensionMismatch {
            expected: n,
            got: v.len(),
        });
    }
    // (T v)_i = sum_j tau_{j-i} v_j; as a row-vector product this is v^T T^T,
    // i.e. right-multiplication by the Toeplitz operator of the reversed input.
    let plans = FftPlans::new(n);
    let rev: Vec<Complex64> = two_sided.iter().rev().map(|&x| Complex64::new(x, 0.0)).collect();
    let op = StructuredOp::toeplitz(&rev, &plans);
    let mut row = complexify(v);
    let mut scratch = vec![ZERO; 2 * n];
    op.apply_row(&mut row, &mut scratch, &plans);
    Ok(row.into_iter().map(|z| z.re).collect())
}

/// Dense `T v`, the oracle for [`fast_matvec_toeplitz`].
pub fn dense_matvec_toeplitz(two_sided: &[f64], v: &[f64]) -> Result<Vec<f64>> {
    let n = crate::ensembles::two_sided_order(two_sided.len())?;
    if v.len() != n {
        return Err(crate::Error::DimensionMismatch {
            expected: n,
            got: v.len(),
        });
    }
    Ok((0..n)
        .map(|i| (0..n).map(|j| two_sided[j + n - 1 - i] * v[j]).sum())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::EntryDistribution;
    use crate::rng::stream_rng;

    const KINDS: [LetterKind; 10] = [
        LetterKind::C,
        LetterKind::CTilde,
        LetterKind::S,
        LetterKind::L,
        LetterKind::R,
        LetterKind::T,
        LetterKind::Ts,
        LetterKind::H,
        LetterKind::D,
        LetterKind::J,
    ];

    #[test]
    fn structured_letters_match_dense() {
        for n in [1, 2, 5, 8, 13] {
            let plans = FftPlans::new(n);
            let mut rng = stream_rng(1, 2, n as u64);
            for kind in KINDS {
                for power in [1, -2] {
                    let input = EntryDistribution::StandardGaussian.sample_vec(&mut rng, kind.input_len(n));
                    let theta = 1.1;
                    let dense = letter_dense(kind, power, &input, theta, n).unwrap();
                    let op = letter_operator(kind, power, &input, theta, &plans).unwrap();
                    let scale = dense.max_abs().max(1.0);
                    assert!(
                        op.to_dense(&plans).max_abs_diff(&dense) < 1e-12 * scale,
                        "{kind:?} n={n}"
                    );
                    assert!(
                        op.adjoint(&plans).to_dense(&plans).max_abs_diff(&dense.adjoint()) < 1e-12 * scale,
                        "{kind:?}* n={n}"
                    );
                }
            }
        }
    }

    #[test]
    fn fast_toeplitz_matvec_matches_dense() {
        let n = 512;
        let mut rng = stream_rng(3, 4, 5);
        let tau = EntryDistribution::StandardGaussian.sample_vec(&mut rng, 2 * n - 1);
        let v = EntryDistribution::StandardGaussian.sample_vec(&mut rng, n);
        let fast = fast_matvec_toeplitz(&tau, &v).unwrap();
        let dense = dense_matvec_toeplitz(&tau, &v).unwrap();
        let norm = dense.iter().map(|x| x * x).sum::<f64>().sqrt();
        let err = fast.iter().zip(&dense).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        assert!(err <= 1e-10 * norm);
        assert!(fast_matvec_toeplitz(&tau, &v[1..]).is_err());
    }

    #[test]
    fn identity_toeplitz_returns_input() {
        let n = 6;
        let mut tau = vec![0.0; 2 * n - 1];
        tau[n - 1] = 1.0;
        let v: Vec<f64> = (0..n).map(|i| i as f64 - 2.5).collect();
        let out = fast_matvec_toeplitz(&tau, &v).unwrap();
        for (a, b) in out.iter().zip(&v) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
