//! Pair partitions and the index system behind limiting moments.
//!
//! For a word `C^{e_1} D^{k_1} ... C^{e_2m} D^{k_2m}` the trace runs over a
//! cycle of indices `i_1, ..., i_2m` (letter `r` spans `(i_r, i_{r+1})`,
//! `i_{2m+1} = i_1`) and the diagonal after letter `r` acts on `i_{r+1}`.
//! A pair partition `pi` survives in the limit only if it pairs plain letters
//! with adjoint letters of the same family; it then forces
//! `alpha_r = -alpha_{pi(r)} (mod n)` with `alpha_r = i_{r+1} - i_r`.
//!
//! Solving this system sequentially yields `m + 1` free indices and every
//! `i_r` as an integer linear form in them, reduced mod `n`:
//! `i_1` is free; walking `r = 1, 2, ...`, the opener of each pair makes
//! `i_{r+1}` a new free index, and a closer sets
//! `i_{r+1} = i_r - alpha_{pi(r)}`. The substitution is unimodular, so the
//! free indices range independently over `0..n` and the constrained sum is
//! reproduced exactly.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Largest word length handled by the enumerators.
pub const MAX_TWO_M: usize = 16;

/// A fixed-point-free involution of `{0, ..., 2m-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PairPartition {
    pairing: Vec<usize>,
}

impl PairPartition {
    pub fn from_pairing(pairing: Vec<usize>) -> Result<Self> {
        let len = pairing.len();
        for (r, &p) in pairing.iter().enumerate() {
            if p >= len || p == r || pairing[p] != r {
                return Err(invalid(format!("{pairing:?} is not a pair partition")));
            }
        }
        Ok(Self { pairing })
    }

    /// Build from 1-based pairs such as `[(1, 3), (2, 4)]`.
    pub fn from_pairs(pairs: &[(usize, usize)]) -> Result<Self> {
        let len = 2 * pairs.len();
        let mut pairing = vec![usize::MAX; len];
        for &(a, b) in pairs {
            if a == 0 || b == 0 || a > len || b > len {
                return Err(invalid(format!("pair ({a}, {b}) out of range 1..={len}")));
            }
            pairing[a - 1] = b - 1;
            pairing[b - 1] = a - 1;
        }
        Self::from_pairing(pairing)
    }

    pub fn len(&self) -> usize {
        self.pairing.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairing.is_empty()
    }

    pub fn partner(&self, r: usize) -> usize {
        self.pairing[r]
    }

    pub fn pairing(&self) -> &[usize] {
        &self.pairing
    }

    /// 0-based pairs `(a, b)`, `a < b`, ordered by `a`.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.pairing
            .iter()
            .enumerate()
            .filter(|&(r, &p)| r < p)
            .map(|(r, &p)| (r, p))
            .collect()
    }
}

impl fmt::Display for PairPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (a, b)) in self.pairs().into_iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "({}, {})", a + 1, b + 1)?;
        }
        f.write_str("}")
    }
}

fn check_two_m(two_m: usize) -> Result<()> {
    if two_m == 0 || two_m % 2 == 1 {
        return Err(invalid(format!("pair partitions need a positive even size, got {two_m}")));
    }
    if two_m > MAX_TWO_M {
        return Err(invalid(format!("size {two_m} exceeds the limit {MAX_TWO_M}")));
    }
    Ok(())
}

/// All pair partitions of `{1, ..., two_m}` in lexicographic order.
pub fn enumerate_pair_partitions(two_m: usize) -> Result<Vec<PairPartition>> {
    check_two_m(two_m)?;
    let mut out = Vec::new();
    let mut pairing = vec![usize::MAX; two_m];
    fill(&mut pairing, &mut out, &|_, _| true);
    Ok(out)
}

fn fill(pairing: &mut [usize], out: &mut Vec<PairPartition>, allowed: &dyn Fn(usize, usize) -> bool) {
    let Some(first) = pairing.iter().position(|&p| p == usize::MAX) else {
        out.push(PairPartition {
            pairing: pairing.to_vec(),
        });
        return;
    };
    for second in first + 1..pairing.len() {
        if pairing[second] == usize::MAX && allowed(first, second) {
            pairing[first] = second;
            pairing[second] = first;
            fill(pairing, out, allowed);
            pairing[first] = usize::MAX;
            pairing[second] = usize::MAX;
        }
    }
}

/// True iff two pairs `(a, b)`, `(c, d)` interleave as `a < c < b < d`.
pub fn is_crossing(p: &PairPartition) -> bool {
    let pairs = p.pairs();
    pairs.iter().any(|&(a, b)| {
        pairs
            .iter()
            .any(|&(c, d)| a < c && c < b && b < d)
    })
}

pub fn double_factorial(k: u64) -> u64 {
    (1..=k).rev().step_by(2).product()
}

pub fn catalan(m: u64) -> u64 {
    // C_m = binom(2m, m) / (m + 1), built incrementally to stay exact.
    (0..m).fold(1u64, |c, k| c * 2 * (2 * k + 1) / (k + 2))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Eps {
    Plain,
    Star,
}

impl Eps {
    pub fn flip(self) -> Self {
        match self {
            Self::Plain => Self::Star,
            Self::Star => Self::Plain,
        }
    }
}

/// Adjoint flags, diagonal powers and family labels of a word
/// `X_1^{e_1} D^{k_1} ... X_2m^{e_2m} D^{k_2m}`. Letters of different
/// families are independent copies and never pair.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EpsilonPattern {
    pub eps: Vec<Eps>,
    pub diag_powers: Vec<i64>,
    pub families: Vec<u32>,
}

impl EpsilonPattern {
    pub fn new(eps: Vec<Eps>, diag_powers: Vec<i64>, families: Vec<u32>) -> Result<Self> {
        if eps.len() != diag_powers.len() || eps.len() != families.len() {
            return Err(invalid(format!(
                "pattern lengths differ: {} flags, {} powers, {} families",
                eps.len(),
                diag_powers.len(),
                families.len()
            )));
        }
        Ok(Self {
            eps,
            diag_powers,
            families,
        })
    }

    /// A single-family pattern.
    pub fn single(eps: Vec<Eps>, diag_powers: Vec<i64>) -> Result<Self> {
        let len = eps.len();
        Self::new(eps, diag_powers, vec![0; len])
    }

    /// Parse flags like `"1*1*"` (or `"1 * 1 *"`) with all powers zero.
    pub fn from_flags(flags: &str) -> Result<Self> {
        let eps: Vec<Eps> = flags
            .chars()
            .filter(|c| !c.is_whitespace() && *c != ',')
            .map(|c| match c {
                '1' => Ok(Eps::Plain),
                '*' => Ok(Eps::Star),
                other => Err(invalid(format!("unknown adjoint flag `{other}`"))),
            })
            .collect::<Result<_>>()?;
        let len = eps.len();
        Self::single(eps, vec![0; len])
    }

    pub fn with_powers(mut self, powers: Vec<i64>) -> Result<Self> {
        if powers.len() != self.eps.len() {
            return Err(invalid("diagonal powers must match the pattern length"));
        }
        self.diag_powers = powers;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.eps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eps.is_empty()
    }

    /// Every family has as many plain as adjoint letters.
    pub fn is_balanced(&self) -> bool {
        let mut fams: Vec<u32> = self.families.clone();
        fams.sort_unstable();
        fams.dedup();
        fams.iter().all(|&f| {
            let plain = (0..self.len())
                .filter(|&r| self.families[r] == f && self.eps[r] == Eps::Plain)
                .count();
            let star = (0..self.len())
                .filter(|&r| self.families[r] == f && self.eps[r] == Eps::Star)
                .count();
            plain == star
        })
    }
}

/// Whether `p` pairs only plain with adjoint letters of a common family.
pub fn admissible(p: &PairPartition, pattern: &EpsilonPattern) -> Result<bool> {
    if p.len() != pattern.len() {
        return Err(Error::DimensionMismatch {
            expected: pattern.len(),
            got: p.len(),
        });
    }
    Ok(p.pairs().into_iter().all(|(s, t)| {
        pattern.eps[s] != pattern.eps[t] && pattern.families[s] == pattern.families[t]
    }))
}

/// The admissible partitions of `pattern`, generated directly (without
/// enumerating all `(2m-1)!!` partitions), in lexicographic order.
pub fn admissible_partitions(pattern: &EpsilonPattern) -> Result<Vec<PairPartition>> {
    check_two_m(pattern.len())?;
    let mut out = Vec::new();
    let mut pairing = vec![usize::MAX; pattern.len()];
    fill(&mut pairing, &mut out, &|s, t| {
        pattern.eps[s] != pattern.eps[t] && pattern.families[s] == pattern.families[t]
    });
    Ok(out)
}

/// One surviving partition with its solved index system.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LimitTerm {
    pub partition: PairPartition,
    pub crossing: bool,
    /// `m + 1`.
    pub free_count: usize,
    /// 1-based cycle positions of the free indices, in variable order.
    pub free_indices: Vec<usize>,
    /// `k^pi_j = sum_r k_r [coefficient of x_j in the form of i_{r+1}]`.
    pub coeffs: Vec<i64>,
    /// `forms[r]` expresses `i_{r+1}` (1-based) over the free variables.
    pub forms: Vec<Vec<i64>>,
}

impl LimitTerm {
    /// Whether every form is a single free variable, so no reduction mod
    /// `n` ever happens.
    pub fn all_forms_trivial(&self) -> bool {
        self.forms.iter().all(|f| is_unit(f).is_some())
    }

    /// The cycle indices `i_1, ..., i_2m` for given free values, reduced mod `n`.
    pub fn indices(&self, free: &[i64], n: i64) -> Vec<i64> {
        self.forms
            .iter()
            .map(|f| f.iter().zip(free).map(|(a, x)| a * x).sum::<i64>().rem_euclid(n))
            .collect()
    }

    /// The phase exponent `sum_r k_r i_{r+1}` (the term contributes
    /// `exp(i theta E / n)`) at given free values.
    pub fn exponent(&self, pattern: &EpsilonPattern, free: &[i64], n: i64) -> i64 {
        let idx = self.indices(free, n);
        let len = idx.len();
        (0..len).map(|r| pattern.diag_powers[r] * idx[(r + 1) % len]).sum()
    }
}

/// `Some(j)` if `form` is the unit vector `e_j`.
pub fn is_unit(form: &[i64]) -> Option<usize> {
    let mut hit = None;
    for (j, &a) in form.iter().enumerate() {
        match a {
            0 => {}
            1 if hit.is_none() => hit = Some(j),
            _ => return None,
        }
    }
    hit
}

/// Solve `alpha_r = -alpha_{pi(r)}` for an admissible partition.
pub fn solve_index_system(p: &PairPartition, pattern: &EpsilonPattern) -> Result<LimitTerm> {
    if !admissible(p, pattern)? {
        return Err(Error::ContractViolation(format!(
            "partition {p} is not admissible for the pattern"
        )));
    }
    let two_m = p.len();
    let vars = two_m / 2 + 1;
    let unit = |j: usize| {
        let mut v = vec![0i64; vars];
        v[j] = 1;
        v
    };
    // forms[r] is the form of the 0-based index i_r, r = 0..=2m.
    let mut forms: Vec<Vec<i64>> = Vec::with_capacity(two_m + 1);
    let mut alphas: Vec<Option<Vec<i64>>> = vec![None; two_m];
    let mut free_indices = vec![1];
    forms.push(unit(0));
    let mut next_var = 1;
    for r in 0..two_m {
        let partner = p.partner(r);
        let (alpha, next) = if r < partner {
            let e = unit(next_var);
            free_indices.push(r + 2);
            next_var += 1;
            let alpha: Vec<i64> = e.iter().zip(&forms[r]).map(|(a, b)| a - b).collect();
            (alpha, e)
        } else {
            let alpha: Vec<i64> = alphas[partner]
                .as_ref()
                .expect("opener precedes closer")
                .iter()
                .map(|a| -a)
                .collect();
            let next = forms[r].iter().zip(&alpha).map(|(a, b)| a + b).collect();
            (alpha, next)
        };
        alphas[r] = Some(alpha);
        forms.push(next);
    }
    // The alphas cancel in pairs, so the cycle closes.
    debug_assert_eq!(forms[two_m], forms[0]);
    forms.truncate(two_m);

    let mut coeffs = vec![0i64; vars];
    for r in 0..two_m {
        let k = pattern.diag_powers[r];
        for (c, a) in coeffs.iter_mut().zip(&forms[(r + 1) % two_m]) {
            *c += k * a;
        }
    }
    Ok(LimitTerm {
        crossing: is_crossing(p),
        partition: p.clone(),
        free_count: vars,
        free_indices,
        coeffs,
        forms,
    })
}

/// Solved terms for every admissible partition of `pattern`.
pub fn limit_terms(pattern: &EpsilonPattern) -> Result<Vec<LimitTerm>> {
    admissible_partitions(pattern)?
        .iter()
        .map(|p| solve_index_system(p, pattern))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    #[test]
    fn counts_are_double_factorials() {
        for two_m in [2, 4, 6, 8, 10] {
            let all = enumerate_pair_partitions(two_m).unwrap();
            assert_eq!(all.len() as u64, double_factorial(two_m as u64 - 1));
            let mut dedup = all.clone();
            dedup.sort();
            dedup.dedup();
            assert_eq!(dedup.len(), all.len());
            let nc = all.iter().filter(|p| !is_crossing(p)).count() as u64;
            assert_eq!(nc, catalan(two_m as u64 / 2));
        }
        assert!(enumerate_pair_partitions(3).is_err());
        assert!(enumerate_pair_partitions(18).is_err());
    }

    #[test]
    fn four_element_partitions() {
        let all = enumerate_pair_partitions(4).unwrap();
        let shown: Vec<String> = all.iter().map(|p| p.to_string()).collect();
        assert_eq!(shown, ["{(1, 2), (3, 4)}", "{(1, 3), (2, 4)}", "{(1, 4), (2, 3)}"]);
        assert!(!is_crossing(&all[0]));
        assert!(is_crossing(&all[1]));
        assert!(!is_crossing(&all[2]));
    }

    #[test]
    fn admissibility_of_alternating_pattern() {
        let pat = EpsilonPattern::from_flags("1*1*").unwrap();
        let adm = admissible_partitions(&pat).unwrap();
        assert_eq!(adm.len(), 2);
        assert_eq!(adm[0], PairPartition::from_pairs(&[(1, 2), (3, 4)]).unwrap());
        assert_eq!(adm[1], PairPartition::from_pairs(&[(1, 4), (2, 3)]).unwrap());
        let blocked = EpsilonPattern::from_flags("11**").unwrap();
        assert!(!admissible(&adm[0], &blocked).unwrap());
        assert!(solve_index_system(&adm[0], &blocked).is_err());
    }

    #[test]
    fn crossing_term_has_the_expected_non_free_index() {
        let pat = EpsilonPattern::from_flags("11**").unwrap();
        let p = PairPartition::from_pairs(&[(1, 3), (2, 4)]).unwrap();
        let t = solve_index_system(&p, &pat).unwrap();
        assert!(t.crossing);
        assert_eq!(t.free_count, 3);
        assert_eq!(t.free_indices, vec![1, 2, 3]);
        assert_eq!(t.forms[3], vec![1, -1, 1]);
        assert!(!t.all_forms_trivial());
    }

    #[test]
    fn non_crossing_forms_are_single_variables() {
        for flags in ["1*", "1*1*", "11**", "1**1", "1*1*1*", "11*1**", "111***"] {
            let pat = EpsilonPattern::from_flags(flags).unwrap();
            for t in limit_terms(&pat).unwrap() {
                assert_eq!(t.free_count, pat.len() / 2 + 1);
                if !t.crossing {
                    assert!(t.all_forms_trivial(), "{flags} {}", t.partition);
                }
            }
        }
    }

    #[test]
    fn forms_satisfy_the_pairing_equations() {
        let pat = EpsilonPattern::from_flags("1*11*1**").unwrap();
        for t in limit_terms(&pat).unwrap() {
            let len = t.forms.len();
            let alpha = |r: usize| -> Vec<i64> {
                t.forms[(r + 1) % len].iter().zip(&t.forms[r]).map(|(a, b)| a - b).collect()
            };
            for r in 0..len {
                let s: Vec<i64> = alpha(r)
                    .iter()
                    .zip(alpha(t.partition.partner(r)))
                    .map(|(a, b)| a + b)
                    .collect();
                assert!(s.iter().all(|&x| x == 0));
            }
        }
    }

    /// Histogram of the phase exponent over all index tuples satisfying the
    /// pairing congruences, by a direct 2m-fold loop.
    fn brute_histogram(p: &PairPartition, pat: &EpsilonPattern, n: i64) -> BTreeMap<i64, u64> {
        let len = p.len();
        let mut hist = BTreeMap::new();
        let mut idx = vec![0i64; len];
        loop {
            let ok = (0..len).all(|r| {
                let a = idx[(r + 1) % len] - idx[r];
                let q = p.partner(r);
                let b = idx[(q + 1) % len] - idx[q];
                (a + b).rem_euclid(n) == 0
            });
            if ok {
                let e: i64 = (0..len).map(|r| pat.diag_powers[r] * idx[(r + 1) % len]).sum();
                *hist.entry(e).or_insert(0) += 1;
            }
            let mut k = 0;
            loop {
                if k == len {
                    return hist;
                }
                idx[k] += 1;
                if idx[k] < n {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
        }
    }

    fn free_histogram(t: &LimitTerm, pat: &EpsilonPattern, n: i64) -> BTreeMap<i64, u64> {
        let vars = t.free_count;
        let mut hist = BTreeMap::new();
        let mut free = vec![0i64; vars];
        loop {
            *hist.entry(t.exponent(pat, &free, n)).or_insert(0) += 1;
            let mut k = 0;
            loop {
                if k == vars {
                    return hist;
                }
                free[k] += 1;
                if free[k] < n {
                    break;
                }
                free[k] = 0;
                k += 1;
            }
        }
    }

    #[test]
    fn free_index_sum_reproduces_brute_force_exactly() {
        let cases: [(&str, &[i64]); 5] = [
            ("1*", &[1, -1]),
            ("11**", &[1, 1, 1, -1]),
            ("1*1*", &[1, 0, -1, 2]),
            ("1**1", &[2, -1, 1, 1]),
            ("1*1*1*", &[1, -1, 0, 1, 1, -1]),
        ];
        for n in [6i64, 8, 10] {
            for (flags, powers) in cases {
                let pat = EpsilonPattern::from_flags(flags).unwrap().with_powers(powers.to_vec()).unwrap();
                for t in limit_terms(&pat).unwrap() {
                    assert_eq!(
                        brute_histogram(&t.partition, &pat, n),
                        free_histogram(&t, &pat, n),
                        "{flags} {} n={n}",
                        t.partition
                    );
                }
            }
        }
    }
}
