//! Limiting *-moments of circulant-type words and the laws they define.

pub mod engine;
pub mod expand;
pub mod laws;

pub use engine::{
    limit_mixed_moment_cd, pattern_integrals, Integrator, IntegralKey, LimitOptions, LimitValue,
    Method, MomentAccumulator,
};
pub use expand::{
    expand_word, hankel_lsd_moment, reference_moments, toeplitz_lsd_moment, word_limit,
    ReferenceMoment,
};
pub use laws::LimitLaw;

/// Whether every symbol occurs equally often at odd and at even positions,
/// the monomials whose mean survives under half-independence.
pub fn is_symmetric_monomial<T: PartialEq>(word: &[T]) -> bool {
    word.iter().all(|a| {
        let (odd, even) = word
            .iter()
            .enumerate()
            .filter(|(_, b)| *b == a)
            .fold((0usize, 0usize), |(o, e), (i, _)| if i % 2 == 0 { (o + 1, e) } else { (o, e + 1) });
        odd == even
    })
}

#[cfg(test)]
mod tests {
    use super::is_symmetric_monomial;

    /// Count positions of one symbol directly.
    fn balanced(word: &str, c: char) -> bool {
        let odd = word.chars().step_by(2).filter(|&x| x == c).count();
        let even = word.chars().skip(1).step_by(2).filter(|&x| x == c).count();
        odd == even
    }

    #[test]
    fn symmetric_monomials() {
        let chars = |s: &str| s.chars().collect::<Vec<_>>();
        // a sits at positions 1 and 3, both odd.
        assert!(!is_symmetric_monomial(&chars("abab")));
        assert!(is_symmetric_monomial(&chars("abba")));
        assert!(is_symmetric_monomial(&chars("aabb")));
        assert!(!is_symmetric_monomial(&chars("abb")));
        assert!(is_symmetric_monomial::<char>(&[]));
        for w in ["abcabc", "abccba", "aaaa", "abcacb", "abba"] {
            let want = w.chars().all(|c| balanced(w, c));
            assert_eq!(is_symmetric_monomial(&chars(w)), want, "{w}");
        }
    }
}
