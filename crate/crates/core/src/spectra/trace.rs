//! Monte Carlo estimates of `phi_n(W) = n^{-1} E Tr(W)` for matrix words.
//!
//! Every distinct symbol of a word (`C`, `S_1`, ...) gets an independent
//! realization per replicate; adjointed letters reuse the realization of
//! their symbol. Random letters carry the usual `n^{-1/2}`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dense::DenseMatrix;
use crate::ensembles::{check_theta, EntryDistribution};
use crate::error::{invalid, Result};
use crate::operator::{letter_matrix, letter_operator, FftPlans, StructuredMatrix};
use crate::rng::{key_of, stream_rng};
use crate::word::{Symbol, Word};

/// How a word product is formed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WordPath {
    /// Row-wise FFT right-multiplication, `O(n^2 log n)` per letter.
    #[default]
    Structured,
    /// Running dense product, `O(n^3)` per letter; the reference path.
    Dense,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub n: usize,
    pub replicates: usize,
    pub seed: u64,
    pub distribution: EntryDistribution,
    /// Angle of `C~` and `D` letters.
    pub theta: f64,
    pub path: WordPath,
}

impl McConfig {
    pub fn new(n: usize, replicates: usize, seed: u64) -> Self {
        Self {
            n,
            replicates,
            seed,
            distribution: EntryDistribution::StandardGaussian,
            theta: std::f64::consts::PI,
            path: WordPath::Structured,
        }
    }

    pub fn with_distribution(mut self, distribution: EntryDistribution) -> Self {
        self.distribution = distribution;
        self
    }

    pub fn with_theta(mut self, theta: f64) -> Self {
        self.theta = theta;
        self
    }

    pub fn with_path(mut self, path: WordPath) -> Self {
        self.path = path;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub mean: Complex64,
    /// Sample standard deviation of the replicate values over `sqrt(replicates)`.
    pub std_error: f64,
    pub replicates: usize,
    pub n: usize,
}

impl MomentEstimate {
    /// Summarize replicate values. The standard deviation uses the complex
    /// modulus, `sqrt(sum |x - mean|^2 / (R - 1))`.
    pub fn from_values(values: &[Complex64], n: usize) -> Result<Self> {
        let r = values.len();
        if r < 2 {
            return Err(invalid("at least two replicates are needed for a standard error"));
        }
        let mean = values.iter().sum::<Complex64>() / r as f64;
        let var = values.iter().map(|v| (v - mean).norm_sqr()).sum::<f64>() / (r - 1) as f64;
        Ok(Self {
            mean,
            std_error: (var / r as f64).sqrt(),
            replicates: r,
            n,
        })
    }
}

/// Independent inputs for every symbol of `word` in replicate `rep`.
pub fn replicate_inputs(word: &Word, cfg: &McConfig, rep: u64) -> BTreeMap<Symbol, Vec<f64>> {
    word.symbols()
        .into_iter()
        .map(|sym| {
            let mut rng = stream_rng(cfg.seed, key_of(&sym.to_string()), rep);
            let len = sym.kind.input_len(cfg.n);
            (sym, cfg.distribution.sample_vec(&mut rng, len))
        })
        .collect()
}

/// `n^{-1} Tr(W)` for one realization, with `n^{-1/2}` per random letter.
pub fn word_trace(
    word: &Word,
    inputs: &BTreeMap<Symbol, Vec<f64>>,
    n: usize,
    theta: f64,
    path: WordPath,
) -> Result<Complex64> {
    if n == 0 {
        return Err(invalid("matrix order must be positive"));
    }
    if word.is_empty() {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let input_of = |sym: &Symbol| -> Result<&[f64]> {
        inputs
            .get(sym)
            .map(Vec::as_slice)
            .ok_or_else(|| invalid(format!("no input supplied for symbol {sym}")))
    };
    let product = match path {
        WordPath::Dense => {
            let mut p: Option<DenseMatrix> = None;
            for letter in &word.letters {
                let m = letter_matrix(letter, input_of(&letter.symbol)?, theta, n)?;
                p = Some(match p {
                    None => m,
                    Some(acc) => &acc * &m,
                });
            }
            p.expect("nonempty word")
        }
        WordPath::Structured => {
            let plans = FftPlans::new(n);
            let mut cache: BTreeMap<(Symbol, i32, bool), StructuredMatrix> = BTreeMap::new();
            let mut p: Option<DenseMatrix> = None;
            for letter in &word.letters {
                let key = (letter.symbol, letter.power, letter.adjoint);
                if !cache.contains_key(&key) {
                    let base = letter_operator(
                        letter.kind(),
                        letter.power,
                        input_of(&letter.symbol)?,
                        theta,
                        &plans,
                    )?;
                    let op = if letter.adjoint { base.adjoint(&plans) } else { base };
                    cache.insert(key, op);
                }
                let op = &cache[&key];
                match p.as_mut() {
                    None => p = Some(op.to_dense(&plans)),
                    Some(acc) => op.apply_right(acc, &plans),
                }
            }
            p.expect("nonempty word")
        }
    };
    let scale = (n as f64).powf(-0.5 * word.random_degree() as f64) / n as f64;
    Ok(product.trace() * scale)
}

/// Estimate `phi_n(W)` from `cfg.replicates` independent realizations.
///
/// Replicates run in parallel, each on its own addressable random stream, and
/// are reduced in replicate order, so the estimate does not depend on the
/// thread count.
pub fn trace_moment_mc(word: &Word, cfg: &McConfig) -> Result<MomentEstimate> {
    if cfg.replicates < 2 {
        return Err(invalid("replicates must be at least 2"));
    }
    if cfg.n == 0 {
        return Err(invalid("matrix order must be positive"));
    }
    check_theta(cfg.theta)?;
    let values: Vec<Complex64> = (0..cfg.replicates as u64)
        .into_par_iter()
        .map(|rep| {
            let inputs = replicate_inputs(word, cfg, rep);
            word_trace(word, &inputs, cfg.n, cfg.theta, cfg.path)
        })
        .collect::<Result<_>>()?;
    MomentEstimate::from_values(&values, cfg.n)
}
