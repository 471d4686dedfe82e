//! Limits of arbitrary words, reduced to `C`/`D` patterns.
//!
//! Every letter is rewritten through exact matrix identities:
//!
//! ```text
//! T  = (C + S) / sqrt2          Ts = (C + S + C* + S*) / 2
//! R  = C J                      L  = S J
//! H  = (R + L) / sqrt2          S  = D(pi) C~ D(pi)*
//! J X J = X*  for real circulant or skew-circulant X
//! ```
//!
//! after which each monomial is a pattern of independent circulant families
//! interleaved with powers of `D`, evaluated by [`MomentAccumulator`]. Each
//! composite letter draws its own independent families, so `T`, `T_1` and
//! `C` never share randomness.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::engine::{LimitOptions, LimitValue, MomentAccumulator};
use super::laws::arc_moment;
use crate::ensembles::check_theta;
use crate::error::{Error, Result};
use crate::partitions::{Eps, EpsilonPattern};
use crate::word::{LetterKind, Word};

/// Largest Toeplitz/Hankel moment order evaluated by expansion.
pub const MAX_STRUCTURED_ORDER: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Base {
    C,
    S,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Atom {
    Random { family: String, base: Base, adjoint: bool },
    Diag(i64),
    J,
}

fn random(family: String, base: Base, adjoint: bool) -> Atom {
    Atom::Random { family, base, adjoint }
}

/// Linear combination of atom strings equal to one letter.
fn expand_letter(letter: &crate::word::Letter) -> Vec<(f64, Vec<Atom>)> {
    let sym = letter.symbol.to_string();
    let adj = letter.adjoint;
    let fam = |suffix: &str| format!("{sym}.{suffix}");
    match letter.kind() {
        LetterKind::C | LetterKind::CTilde => vec![(1.0, vec![random(sym, Base::C, adj)])],
        LetterKind::S => vec![(1.0, vec![random(sym, Base::S, adj)])],
        LetterKind::T => vec![
            (FRAC_1_SQRT_2, vec![random(fam("C"), Base::C, adj)]),
            (FRAC_1_SQRT_2, vec![random(fam("S"), Base::S, adj)]),
        ],
        LetterKind::Ts => vec![
            (0.5, vec![random(fam("C"), Base::C, false)]),
            (0.5, vec![random(fam("S"), Base::S, false)]),
            (0.5, vec![random(fam("C"), Base::C, true)]),
            (0.5, vec![random(fam("S"), Base::S, true)]),
        ],
        LetterKind::R => vec![(1.0, vec![random(sym, Base::C, false), Atom::J])],
        LetterKind::L => vec![(1.0, vec![random(sym, Base::S, false), Atom::J])],
        LetterKind::H => vec![
            (FRAC_1_SQRT_2, vec![random(fam("C"), Base::C, false), Atom::J]),
            (FRAC_1_SQRT_2, vec![random(fam("S"), Base::S, false), Atom::J]),
        ],
        LetterKind::D => vec![(1.0, vec![Atom::Diag(i64::from(letter.power))])],
        LetterKind::J => vec![(1.0, vec![Atom::J])],
    }
}

/// Push every `J` to the right end, adjointing the letters it passes, and
/// replace skew-circulants by `D C~ D*`. `None` when an unpaired `J` is left,
/// whose normalized trace vanishes in the limit.
fn normalize(atoms: Vec<Atom>) -> Option<Vec<Atom>> {
    let mut parity = false;
    let mut out = Vec::with_capacity(atoms.len());
    for a in atoms.into_iter().rev() {
        match a {
            Atom::J => parity = !parity,
            Atom::Random { family, base, adjoint } => {
                let adjoint = adjoint ^ parity;
                match base {
                    Base::C => out.push(random(family, Base::C, adjoint)),
                    Base::S => {
                        // Reversed order: D*, C~, D.
                        out.push(Atom::Diag(-1));
                        out.push(random(family, Base::C, adjoint));
                        out.push(Atom::Diag(1));
                    }
                }
            }
            Atom::Diag(k) => out.push(Atom::Diag(k)),
        }
    }
    if parity {
        return None;
    }
    out.reverse();
    Some(out)
}

enum Reduced {
    /// `phi(D^k)`: no random letters remain.
    Diagonal(i64),
    Pattern(EpsilonPattern),
    Zero,
}

fn to_pattern(atoms: &[Atom]) -> Result<Reduced> {
    let mut lead = 0i64;
    let mut eps = Vec::new();
    let mut powers: Vec<i64> = Vec::new();
    let mut families = Vec::new();
    let mut names: Vec<&str> = Vec::new();
    for a in atoms {
        match a {
            Atom::Diag(k) => match powers.last_mut() {
                Some(p) => *p += k,
                None => lead += k,
            },
            Atom::Random { family, adjoint, .. } => {
                let id = match names.iter().position(|n| n == family) {
                    Some(i) => i,
                    None => {
                        names.push(family);
                        names.len() - 1
                    }
                };
                eps.push(if *adjoint { Eps::Star } else { Eps::Plain });
                powers.push(0);
                families.push(id as u32);
            }
            Atom::J => unreachable!("J removed by normalize"),
        }
    }
    match powers.last_mut() {
        None => return Ok(Reduced::Diagonal(lead)),
        Some(p) => *p += lead,
    }
    if eps.len() % 2 == 1 {
        return Ok(Reduced::Zero);
    }
    Ok(Reduced::Pattern(EpsilonPattern::new(eps, powers, families)?))
}

/// The weighted patterns a word expands into, with the angle they are
/// evaluated at. Diagonal-only monomials are returned under the empty
/// pattern with their arc moment folded into the weight.
pub fn expand_word(word: &Word, theta: f64) -> Result<(BTreeMap<EpsilonPattern, Complex64>, f64)> {
    check_theta(theta)?;
    let has = |kinds: &[LetterKind]| word.letters.iter().any(|l| kinds.contains(&l.kind()));
    let skew = has(&[LetterKind::S, LetterKind::L, LetterKind::T, LetterKind::Ts, LetterKind::H]);
    let diag = has(&[LetterKind::D]);
    let exchange = has(&[LetterKind::J, LetterKind::R, LetterKind::L, LetterKind::H]);
    if exchange && has(&[LetterKind::D, LetterKind::CTilde]) {
        return Err(Error::Unsupported(format!(
            "limit of `{word}`: exchange-type letters (J, R, L, H) cannot be combined with D or C~"
        )));
    }
    if skew && diag && (theta - PI).abs() > 1e-12 {
        return Err(Error::Unsupported(format!(
            "limit of `{word}`: skew-type letters with D require theta = pi"
        )));
    }
    let angle = if skew { PI } else { theta };

    let mut monomials: Vec<(f64, Vec<Atom>)> = vec![(1.0, Vec::new())];
    for letter in &word.letters {
        let parts = expand_letter(letter);
        monomials = monomials
            .iter()
            .flat_map(|(w, atoms)| {
                parts.iter().map(move |(pw, pa)| {
                    let mut a = atoms.clone();
                    a.extend(pa.iter().cloned());
                    (w * pw, a)
                })
            })
            .collect();
    }

    let mut patterns: BTreeMap<EpsilonPattern, Complex64> = BTreeMap::new();
    let empty = EpsilonPattern::single(Vec::new(), Vec::new())?;
    for (w, atoms) in monomials {
        let Some(atoms) = normalize(atoms) else { continue };
        let (pattern, weight) = match to_pattern(&atoms)? {
            Reduced::Zero => continue,
            Reduced::Diagonal(k) => (empty.clone(), arc_moment(angle, k) * w),
            Reduced::Pattern(p) => (p, Complex64::new(w, 0.0)),
        };
        *patterns.entry(pattern).or_insert(Complex64::new(0.0, 0.0)) += weight;
    }
    Ok((patterns, angle))
}

/// `lim phi_n(n^{-deg/2} W)` for a word in any of the ensemble letters.
///
/// `theta` is the angle of `D` and `C~`; words with skew-type letters and
/// `D` need `theta = pi`.
pub fn word_limit(word: &Word, theta: f64, opts: &LimitOptions) -> Result<LimitValue> {
    let (patterns, angle) = expand_word(word, theta)?;
    let mut acc = MomentAccumulator::new();
    for (pattern, weight) in &patterns {
        if weight.norm() == 0.0 {
            continue;
        }
        acc.add_pattern(pattern, angle, *weight)?;
    }
    acc.finish(opts)
}

fn power_moment(kind: LetterKind, p: usize, opts: &LimitOptions) -> Result<LimitValue> {
    if p > MAX_STRUCTURED_ORDER {
        return Err(Error::ResourceLimit(format!(
            "moment order {p} exceeds {MAX_STRUCTURED_ORDER}"
        )));
    }
    if p % 2 == 1 {
        return Ok(LimitValue::closed(Complex64::new(0.0, 0.0)));
    }
    let word = Word::new(vec![crate::word::Letter::plain(kind); p]);
    word_limit(&word, PI, opts)
}

/// `p`-th moment of the limiting spectral distribution of symmetric Toeplitz
/// matrices.
pub fn toeplitz_lsd_moment(p: usize, opts: &LimitOptions) -> Result<LimitValue> {
    power_moment(LetterKind::Ts, p, opts)
}

/// `p`-th moment of the limiting spectral distribution of Hankel matrices.
pub fn hankel_lsd_moment(p: usize, opts: &LimitOptions) -> Result<LimitValue> {
    power_moment(LetterKind::H, p, opts)
}

/// A mixed moment with a published reference value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReferenceMoment {
    pub name: String,
    pub word: String,
    pub theta: f64,
    pub engine: LimitValue,
    pub reference: Complex64,
}

impl ReferenceMoment {
    /// `|engine - reference|`.
    pub fn deviation(&self) -> f64 {
        (self.engine.value - self.reference).norm()
    }
}

/// Published mixed moments of the decomposition, side by side with the
/// engine values.
pub fn reference_moments(opts: &LimitOptions) -> Result<Vec<ReferenceMoment>> {
    let two_family = |theta: f64| {
        let e = Complex64::from_polar(1.0, theta) - 1.0;
        -(e * e) / (theta * theta)
    };
    let rows: Vec<(&str, &str, f64, Complex64)> = vec![
        ("C C* S S*", "C C* S S*", PI, 1.0.into()),
        ("C S C* S*", "C S C* S*", PI, (2.0 / 3.0).into()),
        ("T^2 T*^2", "T T T* T*", PI, (11.0 / 6.0).into()),
        ("T T* T T*", "T T* T T*", PI, (5.0 / 3.0).into()),
        ("Toeplitz m2", "Ts Ts", PI, 1.0.into()),
        ("Toeplitz m4", "Ts Ts Ts Ts", PI, (8.0 / 3.0).into()),
        ("Hankel m2", "H H", PI, 1.0.into()),
        ("Hankel m4", "H H H H", PI, 2.0.into()),
        ("Y1^2 Y2^2", "R R L L", PI, 1.0.into()),
        ("Y1 Y2 Y1 Y2", "R L R L", PI, 0.0.into()),
        ("two-family, theta=pi/2", "C D C* D C~ D C~* D*", PI / 2.0, two_family(PI / 2.0)),
        ("two-family, theta=pi", "C D C* D C~ D C~* D*", PI, two_family(PI)),
    ];
    rows.into_iter()
        .map(|(name, w, theta, reference)| {
            Ok(ReferenceMoment {
                name: name.to_string(),
                word: w.to_string(),
                theta,
                engine: word_limit(&Word::parse(w)?, theta, opts)?,
                reference,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> LimitOptions {
        LimitOptions::default().with_budget(400_000)
    }

    fn lim(w: &str, theta: f64) -> LimitValue {
        word_limit(&Word::parse(w).unwrap(), theta, &opts()).unwrap()
    }

    fn close(v: &LimitValue, want: f64, tol: f64) {
        assert!(
            (v.value - Complex64::new(want, 0.0)).norm() <= tol + 4.0 * v.mc_error,
            "{v:?} vs {want}"
        );
    }

    #[test]
    fn circulant_moments() {
        close(&lim("C C*", 1.0), 1.0, 1e-12);
        close(&lim("C C* C C*", 1.0), 2.0, 1e-12);
        close(&lim("C C C* C*", 1.0), 2.0, 1e-12);
        close(&lim("C C", 1.0), 0.0, 1e-12);
        close(&lim("S S*", 1.0), 1.0, 1e-12);
        close(&lim("S S* S S*", PI), 2.0, 1e-12);
    }

    #[test]
    fn mixed_circulant_skew() {
        close(&lim("C C* S S*", PI), 1.0, 1e-12);
        close(&lim("C S C* S*", PI), 1.0 / 3.0, 3e-3);
    }

    #[test]
    fn toeplitz_mixed_moments() {
        close(&lim("T T*", PI), 1.0, 1e-12);
        close(&lim("T T T* T*", PI), 5.0 / 3.0, 3e-3);
        close(&lim("T T* T T*", PI), 2.0, 3e-3);
    }

    #[test]
    fn structured_lsd_moments() {
        close(&toeplitz_lsd_moment(2, &opts()).unwrap(), 1.0, 1e-12);
        close(&toeplitz_lsd_moment(4, &opts()).unwrap(), 8.0 / 3.0, 3e-3);
        close(&toeplitz_lsd_moment(3, &opts()).unwrap(), 0.0, 0.0);
        close(&hankel_lsd_moment(2, &opts()).unwrap(), 1.0, 1e-12);
        close(&hankel_lsd_moment(4, &opts()).unwrap(), 2.0, 3e-3);
        assert!(matches!(toeplitz_lsd_moment(10, &opts()), Err(Error::ResourceLimit(_))));
    }

    #[test]
    fn reverse_and_left_skew() {
        close(&lim("R R", PI), 1.0, 1e-12);
        close(&lim("R R R R", PI), 2.0, 1e-12);
        close(&lim("L L L L", PI), 2.0, 1e-12);
        close(&lim("R R L L", PI), 1.0, 1e-12);
        close(&lim("R L R L", PI), 0.0, 1e-12);
        close(&lim("R", PI), 0.0, 0.0);
        close(&lim("J", PI), 0.0, 0.0);
        close(&lim("J J", PI), 1.0, 0.0);
    }

    #[test]
    fn diagonal_only_words() {
        let v = lim("D^2", 1.0);
        assert!((v.value - arc_moment(1.0, 2)).norm() < 1e-15);
        let v = lim("D D*", 0.4);
        assert!((v.value - 1.0).norm() < 1e-15);
    }

    #[test]
    fn unsupported_combinations() {
        let w = Word::parse("R D R").unwrap();
        assert!(matches!(word_limit(&w, PI, &opts()), Err(Error::Unsupported(_))));
        let w = Word::parse("S D S* D*").unwrap();
        assert!(matches!(word_limit(&w, 1.0, &opts()), Err(Error::Unsupported(_))));
        assert!(word_limit(&w, PI, &opts()).is_ok());
    }

    #[test]
    fn independent_copies_do_not_pair() {
        close(&lim("C C_1*", 1.0), 0.0, 0.0);
        close(&lim("T T_1*", PI), 0.0, 0.0);
    }
}
