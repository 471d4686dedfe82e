//! Limit engine against finite-n Monte Carlo for every balanced adjoint
//! pattern of length at most six, with random diagonal powers.

use patterned_rmt::limits::{word_limit, LimitOptions};
use patterned_rmt::spectra::{trace_moment_mc, McConfig};
use patterned_rmt::word::Word;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const THETA: f64 = 1.0;

fn words() -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut out = Vec::new();
    for two_m in [2usize, 4, 6] {
        for mask in 0u32..(1 << two_m) {
            if mask.count_ones() as usize != two_m / 2 {
                continue;
            }
            let mut w = Vec::new();
            for r in 0..two_m {
                w.push(if mask >> r & 1 == 1 { "C*" } else { "C" }.to_string());
                match rng.random_range(-1i32..=1) {
                    0 => {}
                    1 => w.push("D".into()),
                    _ => w.push("D*".into()),
                }
            }
            out.push(w.join(" "));
        }
    }
    out
}

#[test]
fn engine_agrees_with_monte_carlo() {
    let opts = LimitOptions::default().with_seed(1);
    let mut failures = Vec::new();
    for s in words() {
        let w = Word::parse(&s).unwrap();
        let limit = word_limit(&w, THETA, &opts).unwrap();
        let mc = trace_moment_mc(&w, &McConfig::new(1024, 20, 9).with_theta(THETA)).unwrap();
        let tol = 3.0 * (mc.std_error + limit.mc_error) + 0.02;
        let dev = (mc.mean - limit.value).norm();
        if dev > tol {
            failures.push(format!("{s}: mc {} engine {} |diff| {dev:.3e} > {tol:.3e}", mc.mean, limit.value));
        }
    }
    assert!(failures.is_empty(), "{failures:#?}");
}
