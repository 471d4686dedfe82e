//! Property tests over random inputs.

use num_complex::Complex64;
use patterned_rmt::esd::{ks_distance, Binning, Histogram1D};
use patterned_rmt::operator::{dense_matvec_toeplitz, fast_matvec_toeplitz};
use patterned_rmt::spectra::trace::{replicate_inputs, word_trace};
use patterned_rmt::spectra::{McConfig, WordPath};
use patterned_rmt::word::Word;
use proptest::prelude::*;

fn normal_cdf(x: f64) -> f64 {
    0.5 * (1.0 + libm::erf(x / std::f64::consts::SQRT_2))
}

const TOKENS: &[&str] = &[
    "C", "C*", "C_1", "C_1*", "S", "S*", "T", "T*", "Ts", "R", "R*", "L", "H", "J", "D", "D*", "D^2",
    "D^-3", "C~", "C~*",
];

fn word_strategy(tokens: &'static [&'static str]) -> impl Strategy<Value = String> {
    prop::collection::vec(prop::sample::select(tokens), 1..7).prop_map(|t| t.join(" "))
}

/// Letters with real generators, where one realization's trace is cheap.
const TRACE_TOKENS: &[&str] = &["C", "C*", "C_1", "C_1*", "S", "S*", "T", "T*", "R", "L*", "H", "J", "D", "D*", "D^2"];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ks_is_permutation_invariant(mut v in prop::collection::vec(-5.0f64..5.0, 1..200), seed in any::<u64>()) {
        let a = ks_distance(&v, normal_cdf).unwrap();
        let len = v.len();
        v.rotate_left((seed % len as u64) as usize);
        v.reverse();
        prop_assert_eq!(a, ks_distance(&v, normal_cdf).unwrap());
    }

    #[test]
    fn histogram_conserves_mass(v in prop::collection::vec(-1e3f64..1e3, 1..500), bins in 1usize..50) {
        for binning in [Binning::FreedmanDiaconis, Binning::Fixed(bins)] {
            let h = Histogram1D::new(&v, binning).unwrap();
            prop_assert_eq!(h.counts.iter().sum::<u64>(), v.len() as u64);
            prop_assert_eq!(h.total, v.len() as u64);
            prop_assert_eq!(h.bin_edges.len(), h.counts.len() + 1);
            let widths = h.bin_edges.windows(2).map(|w| w[1] - w[0]);
            let mass: f64 = h.density().iter().zip(widths).map(|(d, w)| d * w).sum();
            prop_assert!((mass - 1.0).abs() < 1e-9, "density integrates to {}", mass);
        }
    }

    #[test]
    fn word_display_round_trips(s in word_strategy(TOKENS)) {
        let w = Word::parse(&s).unwrap();
        prop_assert_eq!(&Word::parse(&w.to_string()).unwrap(), &w);
        prop_assert_eq!(w.adjoint().adjoint(), w);
    }

    #[test]
    fn fast_toeplitz_matvec_matches_dense(
        (tau, v) in (1usize..80).prop_flat_map(|n| (
            prop::collection::vec(-3.0f64..3.0, 2 * n - 1),
            prop::collection::vec(-3.0f64..3.0, n),
        ))
    ) {
        let fast = fast_matvec_toeplitz(&tau, &v).unwrap();
        let dense = dense_matvec_toeplitz(&tau, &v).unwrap();
        let scale = 1.0 + dense.iter().map(|x| x.abs()).fold(0.0, f64::max);
        for (a, b) in fast.iter().zip(&dense) {
            prop_assert!((a - b).abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn trace_is_invariant_under_rotation(s in word_strategy(TRACE_TOKENS), k in 0usize..6, rep in 0u64..1000) {
        let w = Word::parse(&s).unwrap();
        let cfg = McConfig::new(24, 2, 11).with_theta(1.3);
        let inputs = replicate_inputs(&w, &cfg, rep);
        let a = word_trace(&w, &inputs, cfg.n, cfg.theta, WordPath::Structured).unwrap();
        let b = word_trace(&w.rotate(k), &inputs, cfg.n, cfg.theta, WordPath::Structured).unwrap();
        prop_assert!((a - b).norm() <= 1e-10 * (1.0 + a.norm()), "{} vs {}", a, b);
    }

    #[test]
    fn adjoint_word_gives_conjugate_trace(s in word_strategy(TRACE_TOKENS), rep in 0u64..1000) {
        let w = Word::parse(&s).unwrap();
        let cfg = McConfig::new(24, 2, 13).with_theta(0.7);
        let inputs = replicate_inputs(&w, &cfg, rep);
        let a = word_trace(&w, &inputs, cfg.n, cfg.theta, WordPath::Dense).unwrap();
        let b = word_trace(&w.adjoint(), &inputs, cfg.n, cfg.theta, WordPath::Dense).unwrap();
        prop_assert!((b - a.conj()).norm() <= 1e-12 * (1.0 + a.norm()), "{} vs {}", a, b);
    }

    #[test]
    fn structured_and_dense_products_agree(s in word_strategy(TRACE_TOKENS), rep in 0u64..1000) {
        let w = Word::parse(&s).unwrap();
        let cfg = McConfig::new(20, 2, 17).with_theta(2.1);
        let inputs = replicate_inputs(&w, &cfg, rep);
        let a: Complex64 = word_trace(&w, &inputs, cfg.n, cfg.theta, WordPath::Dense).unwrap();
        let b = word_trace(&w, &inputs, cfg.n, cfg.theta, WordPath::Structured).unwrap();
        prop_assert!((a - b).norm() <= 1e-9 * (1.0 + a.norm()), "{} vs {}", a, b);
    }
}
