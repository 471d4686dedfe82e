//! Limits of `phi_n(n^{-m} C^{e_1} D^{k_1} ... C^{e_2m} D^{k_2m})`.
//!
//! Each admissible pair partition contributes
//!
//! ```text
//! int_{[0,1]^{m+1}} exp(i theta sum_r k_r {l_{r+1}(x)}) dx
//! ```
//!
//! where `l_r` is the linear form of cycle index `i_r` over the free
//! variables and `{.}` is the fractional part. It is the limit of the exact
//! free-index sum in which every index is reduced mod `n`. Variables that
//! enter only through single-variable forms integrate to
//! `(e^{i u} - 1) / (i u)` factors; what remains (crossing partitions only) is
//! integrated numerically.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::laws::unit_interval_exp;
use crate::ensembles::check_theta;
use crate::error::{invalid, Error, Result};
use crate::partitions::{is_unit, limit_terms, EpsilonPattern, LimitTerm};
use crate::rng::{key_of, stream_rng, DEFAULT_SEED};

/// Largest dimension accepted by the midpoint-grid integrator.
pub const MAX_RIEMANN_DIM: usize = 4;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Integrator {
    /// Randomly shifted Kronecker lattice; reports a standard error.
    #[default]
    Qmc,
    /// Deterministic midpoint grid.
    Riemann,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitOptions {
    pub integrator: Integrator,
    /// Points per numerically integrated term (QMC).
    pub budget: usize,
    /// Independent random shifts used for the QMC error estimate.
    pub shifts: usize,
    /// Points per axis for the midpoint grid.
    pub grid: usize,
    pub seed: u64,
}

impl Default for LimitOptions {
    fn default() -> Self {
        Self {
            integrator: Integrator::Qmc,
            budget: 2_000_000,
            shifts: 16,
            grid: 40,
            seed: DEFAULT_SEED,
        }
    }
}

impl LimitOptions {
    pub fn riemann(grid: usize) -> Self {
        Self {
            integrator: Integrator::Riemann,
            grid,
            ..Self::default()
        }
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    McIntegration,
    Riemann,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitValue {
    pub value: Complex64,
    pub method: Method,
    /// Standard error of the numerical part; 0 for closed forms.
    pub mc_error: f64,
    pub n_terms: usize,
    pub n_crossing: usize,
}

impl LimitValue {
    pub fn closed(value: Complex64) -> Self {
        Self {
            value,
            method: Method::ClosedForm,
            mc_error: 0.0,
            n_terms: 0,
            n_crossing: 0,
        }
    }
}

/// A residual integral over the coupled variables of a term:
/// `int exp(i theta (sum_j linear_j x_j + sum_f K_f {f(x)})) dx`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IntegralKey {
    pub linear: Vec<i64>,
    pub forms: Vec<(Vec<i64>, i64)>,
    theta_bits: u64,
}

impl IntegralKey {
    pub fn new(linear: Vec<i64>, mut forms: Vec<(Vec<i64>, i64)>, theta: f64) -> Self {
        forms.sort();
        Self {
            linear,
            forms,
            theta_bits: theta.to_bits(),
        }
    }

    pub fn dim(&self) -> usize {
        self.linear.len()
    }

    pub fn theta(&self) -> f64 {
        f64::from_bits(self.theta_bits)
    }

    /// The same integral with variables relabelled: new variable `j` is old
    /// variable `perm[j]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let linear = perm.iter().map(|&p| self.linear[p]).collect();
        let forms = self
            .forms
            .iter()
            .map(|(f, k)| (perm.iter().map(|&p| f[p]).collect(), *k))
            .collect();
        Self::new(linear, forms, self.theta())
    }

    fn phase(&self, x: &[f64]) -> f64 {
        let mut acc: f64 = self.linear.iter().zip(x).map(|(&a, &v)| a as f64 * v).sum();
        for (f, k) in &self.forms {
            let v: f64 = f.iter().zip(x).map(|(&a, &xv)| a as f64 * xv).sum();
            acc += *k as f64 * (v - v.floor());
        }
        self.theta() * acc
    }
}

/// A term split into a closed-form prefactor and an optional residual integral.
#[derive(Clone, Debug, PartialEq)]
pub struct TermReduction {
    pub prefactor: Complex64,
    pub key: Option<IntegralKey>,
}

/// Factor out every variable that appears only in single-variable forms.
pub fn reduce_term(term: &LimitTerm, pattern: &EpsilonPattern, theta: f64) -> TermReduction {
    let two_m = term.forms.len();
    let vars = term.free_count;
    let mut by_form: BTreeMap<&[i64], i64> = BTreeMap::new();
    for r in 0..two_m {
        *by_form.entry(&term.forms[(r + 1) % two_m]).or_insert(0) += pattern.diag_powers[r];
    }
    let mut unit_k = vec![0i64; vars];
    let mut nonunit: Vec<(Vec<i64>, i64)> = Vec::new();
    for (form, k) in by_form {
        if k == 0 {
            continue;
        }
        match is_unit(form) {
            Some(j) => unit_k[j] += k,
            None => nonunit.push((form.to_vec(), k)),
        }
    }
    let coupled: Vec<usize> = (0..vars)
        .filter(|&j| nonunit.iter().any(|(f, _)| f[j] != 0))
        .collect();
    let prefactor = (0..vars)
        .filter(|j| !coupled.contains(j))
        .map(|j| unit_interval_exp(theta * unit_k[j] as f64))
        .product();
    let key = (!coupled.is_empty()).then(|| {
        IntegralKey::new(
            coupled.iter().map(|&j| unit_k[j]).collect(),
            nonunit
                .iter()
                .map(|(f, k)| (coupled.iter().map(|&j| f[j]).collect(), *k))
                .collect(),
            theta,
        )
    });
    TermReduction { prefactor, key }
}

/// The `R_d` Kronecker sequence generator: fractional parts of
/// `phi_d^{-j}`, `phi_d` the positive root of `x^{d+1} = x + 1`.
fn kronecker_alphas(d: usize) -> Vec<f64> {
    let mut phi = 2.0f64;
    for _ in 0..64 {
        phi = (1.0 + phi).powf(1.0 / (d as f64 + 1.0));
    }
    (1..=d).map(|j| phi.powi(-(j as i32)).fract()).collect()
}

/// Randomly shifted lattice estimate: mean and standard error.
pub fn integrate_qmc(key: &IntegralKey, opts: &LimitOptions) -> Result<(Complex64, f64)> {
    let shifts = opts.shifts.max(2);
    let per_shift = (opts.budget / shifts).max(1);
    let d = key.dim();
    let alphas = kronecker_alphas(d);
    let mut rng = stream_rng(opts.seed, key_of(&format!("{key:?}")), 0);
    let mut x = vec![0.0; d];
    let means: Vec<Complex64> = (0..shifts)
        .map(|_| {
            let shift: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..per_shift {
                for j in 0..d {
                    x[j] = (shift[j] + i as f64 * alphas[j]).fract();
                }
                acc += Complex64::from_polar(1.0, key.phase(&x));
            }
            acc / per_shift as f64
        })
        .collect();
    let mean = means.iter().sum::<Complex64>() / shifts as f64;
    let var = means.iter().map(|m| (m - mean).norm_sqr()).sum::<f64>() / (shifts - 1) as f64;
    Ok((mean, (var / shifts as f64).sqrt()))
}

/// Midpoint rule on a `grid^d` lattice.
pub fn integrate_riemann(key: &IntegralKey, grid: usize) -> Result<Complex64> {
    let d = key.dim();
    if d > MAX_RIEMANN_DIM {
        return Err(Error::ResourceLimit(format!(
            "midpoint grid limited to {MAX_RIEMANN_DIM} dimensions, term needs {d}"
        )));
    }
    if grid == 0 {
        return Err(invalid("grid must be positive"));
    }
    let total = grid.pow(d as u32);
    let h = 1.0 / grid as f64;
    let mut x = vec![0.0; d];
    let mut acc = Complex64::new(0.0, 0.0);
    for flat in 0..total {
        let mut rest = flat;
        for xj in x.iter_mut() {
            *xj = ((rest % grid) as f64 + 0.5) * h;
            rest /= grid;
        }
        acc += Complex64::from_polar(1.0, key.phase(&x));
    }
    Ok(acc / total as f64)
}

fn integrate(key: &IntegralKey, opts: &LimitOptions) -> Result<(Complex64, f64)> {
    match opts.integrator {
        Integrator::Qmc => integrate_qmc(key, opts),
        Integrator::Riemann => Ok((integrate_riemann(key, opts.grid)?, 0.0)),
    }
}

/// Collects weighted patterns, shares residual integrals between them, and
/// aggregates errors per distinct integral (terms using the same integral
/// have perfectly correlated errors).
#[derive(Clone, Debug, Default)]
pub struct MomentAccumulator {
    closed: Complex64,
    weights: BTreeMap<IntegralKey, Complex64>,
    n_terms: usize,
    n_crossing: usize,
}

impl MomentAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    /// Add `weight * lim phi_n(pattern)`.
    pub fn add_pattern(&mut self, pattern: &EpsilonPattern, theta: f64, weight: Complex64) -> Result<()> {
        check_theta(theta)?;
        if pattern.len() % 2 == 1 {
            return Err(invalid(format!(
                "pattern length {} is odd",
                pattern.len()
            )));
        }
        if pattern.is_empty() {
            self.closed += weight;
            return Ok(());
        }
        if !pattern.is_balanced() {
            return Ok(());
        }
        for term in limit_terms(pattern)? {
            self.n_terms += 1;
            self.n_crossing += usize::from(term.crossing);
            let red = reduce_term(&term, pattern, theta);
            let w = weight * red.prefactor;
            match red.key {
                None => self.closed += w,
                Some(key) => *self.weights.entry(key).or_insert(Complex64::new(0.0, 0.0)) += w,
            }
        }
        Ok(())
    }

    pub fn distinct_integrals(&self) -> usize {
        self.weights.len()
    }

    pub fn finish(self, opts: &LimitOptions) -> Result<LimitValue> {
        let keys: Vec<&IntegralKey> = self
            .weights
            .iter()
            .filter(|(_, w)| w.norm() > 0.0)
            .map(|(k, _)| k)
            .collect();
        let values: Vec<(Complex64, f64)> = keys
            .par_iter()
            .map(|k| integrate(k, opts))
            .collect::<Result<_>>()?;
        let mut value = self.closed;
        let mut var = 0.0;
        for (k, (v, e)) in keys.iter().zip(values) {
            let w = self.weights[*k];
            value += w * v;
            var += (w.norm() * e).powi(2);
        }
        let method = match (keys.is_empty(), opts.integrator) {
            (true, _) => Method::ClosedForm,
            (false, Integrator::Qmc) => Method::McIntegration,
            (false, Integrator::Riemann) => Method::Riemann,
        };
        Ok(LimitValue {
            value,
            method,
            mc_error: var.sqrt(),
            n_terms: self.n_terms,
            n_crossing: self.n_crossing,
        })
    }
}

/// Limit of the normalized trace of one `C`/`D` monomial.
pub fn limit_mixed_moment_cd(
    pattern: &EpsilonPattern,
    theta: f64,
    opts: &LimitOptions,
) -> Result<LimitValue> {
    let mut acc = MomentAccumulator::new();
    acc.add_pattern(pattern, theta, Complex64::new(1.0, 0.0))?;
    acc.finish(opts)
}

/// Diagnostic view of the residual integrals of a pattern.
pub fn pattern_integrals(pattern: &EpsilonPattern, theta: f64) -> Result<BTreeSet<IntegralKey>> {
    Ok(limit_terms(pattern)?
        .iter()
        .filter_map(|t| reduce_term(t, pattern, theta).key)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partitions::{Eps, PairPartition};
    use std::f64::consts::PI;

    fn pat(flags: &str, powers: &[i64]) -> EpsilonPattern {
        EpsilonPattern::from_flags(flags)
            .unwrap()
            .with_powers(powers.to_vec())
            .unwrap()
    }

    fn fast() -> LimitOptions {
        LimitOptions::default().with_budget(200_000)
    }

    #[test]
    fn alternating_patterns_give_factorials() {
        let mut fact = 1.0;
        for m in 1..=4 {
            fact *= m as f64;
            let flags = "1*".repeat(m);
            let v = limit_mixed_moment_cd(&pat(&flags, &vec![0; 2 * m]), 0.0, &fast()).unwrap();
            assert!((v.value.re - fact).abs() < 1e-12, "m={m}: {v:?}");
        }
    }

    #[test]
    fn second_moment_is_one() {
        let v = limit_mixed_moment_cd(&pat("1*", &[0, 0]), 0.0, &fast()).unwrap();
        assert_eq!(v.value, Complex64::new(1.0, 0.0));
        assert_eq!(v.method, Method::ClosedForm);
        assert_eq!(v.mc_error, 0.0);
    }

    #[test]
    fn two_diagonals_factor() {
        // p = 2: E[d^(1)] E[d^(2)].
        let theta = 1.1;
        let v = limit_mixed_moment_cd(&pat("1*", &[2, -1]), theta, &fast()).unwrap();
        let want = unit_interval_exp(2.0 * theta) * unit_interval_exp(-theta);
        assert!((v.value - want).norm() < 1e-14);
    }

    #[test]
    fn example_with_four_diagonals() {
        let v = limit_mixed_moment_cd(&pat("1*1*", &[1, 1, 1, 1]), PI, &fast()).unwrap();
        assert!(v.value.norm() < 1e-14);
        let v = limit_mixed_moment_cd(&pat("1*1*", &[1, 1, 1, -1]), PI, &fast()).unwrap();
        assert!((v.value.re + 4.0 / (PI * PI)).abs() < 1e-12, "{v:?}");
        assert_eq!(v.n_terms, 2);
        assert_eq!(v.n_crossing, 0);
    }

    #[test]
    fn unbalanced_and_odd_patterns() {
        let v = limit_mixed_moment_cd(&pat("11*1", &[0; 4]), 1.0, &fast()).unwrap();
        assert_eq!(v.value, Complex64::new(0.0, 0.0));
        assert!(limit_mixed_moment_cd(&pat("1*1", &[0; 3]), 1.0, &fast()).is_err());
        assert!(limit_mixed_moment_cd(&pat("1*", &[0; 2]), 4.0, &fast()).is_err());
    }

    /// Two-family pattern of `C D C* D C~ D C~* D*`.
    fn two_family() -> EpsilonPattern {
        EpsilonPattern::new(
            vec![Eps::Plain, Eps::Star, Eps::Plain, Eps::Star],
            vec![1, 1, 1, -1],
            vec![0, 0, 1, 1],
        )
        .unwrap()
    }

    #[test]
    fn two_family_example_is_closed_form() {
        for theta in [PI / 2.0, PI, 0.3] {
            let v = limit_mixed_moment_cd(&two_family(), theta, &fast()).unwrap();
            let e = Complex64::from_polar(1.0, theta) - 1.0;
            let want = -(e * e) / (theta * theta);
            assert!((v.value - want).norm() < 1e-12, "theta={theta}");
        }
    }

    fn crossing_key(powers: &[i64], theta: f64) -> IntegralKey {
        let p = pat("11**", powers);
        let t = crate::partitions::solve_index_system(
            &PairPartition::from_pairs(&[(1, 3), (2, 4)]).unwrap(),
            &p,
        )
        .unwrap();
        reduce_term(&t, &p, theta).key.expect("crossing term needs integration")
    }

    #[test]
    fn qmc_matches_riemann_grid() {
        let key = crossing_key(&[1, 1, 1, 1], PI);
        let (q, e) = integrate_qmc(&key, &LimitOptions::default()).unwrap();
        let r = integrate_riemann(&key, 120).unwrap();
        assert!(e < 1e-3);
        assert!((q - r).norm() < 2e-3 + 3.0 * e, "{q} vs {r}");
    }

    #[test]
    fn midpoint_triple_sum_matches_engine() {
        // Direct triple sum of the wrapped integrand for the crossing term of
        // (1, 1, *, *): i_4 = i_1 - i_2 + i_3 (mod n).
        let (k, theta, n) = ([1i64, 2, -1, 1], PI, 40usize);
        let mut acc = Complex64::new(0.0, 0.0);
        let h = 1.0 / n as f64;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let (x1, x2, x3) = ((a as f64 + 0.5) * h, (b as f64 + 0.5) * h, (c as f64 + 0.5) * h);
                    let x4 = (x1 - x2 + x3).rem_euclid(1.0);
                    let ph = k[0] as f64 * x2 + k[1] as f64 * x3 + k[2] as f64 * x4 + k[3] as f64 * x1;
                    acc += Complex64::from_polar(1.0, theta * ph);
                }
            }
        }
        acc /= (n * n * n) as f64;
        let p = pat("11**", &k);
        let v = limit_mixed_moment_cd(&p, theta, &LimitOptions::default()).unwrap();
        // The engine sums both admissible terms; subtract the closed non-crossing one.
        let nc = unit_interval_exp(theta * (k[0] + k[2]) as f64)
            * unit_interval_exp(theta * k[1] as f64)
            * unit_interval_exp(theta * k[3] as f64);
        assert!((v.value - nc - acc).norm() < 2e-3, "{} vs {acc}", v.value - nc);
    }

    #[test]
    fn relabelling_variables_leaves_integrals_unchanged() {
        let perms = [[1usize, 0, 2], [2, 1, 0], [0, 2, 1], [1, 2, 0], [2, 0, 1]];
        let powers: [[i64; 4]; 5] = [[1, 1, 1, 1], [1, -1, 2, 0], [2, 1, -1, 1], [0, 1, 1, 1], [1, 0, 1, -2]];
        for (perm, pw) in perms.iter().zip(powers) {
            let key = crossing_key(&pw, 2.0);
            let (a, ea) = integrate_qmc(&key, &fast()).unwrap();
            let (b, eb) = integrate_qmc(&key.permuted(perm), &fast()).unwrap();
            assert!((a - b).norm() <= 4.0 * (ea + eb) + 1e-4, "{pw:?}");
        }
    }

    #[test]
    fn kronecker_generator_in_unit_interval() {
        for d in 1..6 {
            let a = kronecker_alphas(d);
            assert!(a.iter().all(|&x| x > 0.0 && x < 1.0));
        }
        // golden ratio for d = 1
        assert!((kronecker_alphas(1)[0] - 0.618_033_988_749_895).abs() < 1e-12);
    }
}
