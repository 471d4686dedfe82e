//! Monomials in the structured matrices.
//!
//! Grammar: whitespace-separated tokens `NAME[_copy][*][^k]` where `NAME` is
//! one of `C C~ S L R T Ts H D J`, `_copy` selects an independent copy of the
//! same ensemble (`S_1 S_2`), `*` takes the adjoint, and `^k` (only on `D`)
//! raises the diagonal matrix to an integer power. `D*` is `D^-1`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LetterKind {
    C,
    CTilde,
    S,
    L,
    R,
    T,
    Ts,
    H,
    D,
    J,
}

impl LetterKind {
    pub fn token(self) -> &'static str {
        match self {
            Self::C => "C",
            Self::CTilde => "C~",
            Self::S => "S",
            Self::L => "L",
            Self::R => "R",
            Self::T => "T",
            Self::Ts => "Ts",
            Self::H => "H",
            Self::D => "D",
            Self::J => "J",
        }
    }

    fn from_token(s: &str) -> Option<Self> {
        Some(match s {
            "C" => Self::C,
            "C~" => Self::CTilde,
            "S" => Self::S,
            "L" => Self::L,
            "R" => Self::R,
            "T" => Self::T,
            "Ts" => Self::Ts,
            "H" => Self::H,
            "D" => Self::D,
            "J" => Self::J,
            _ => return None,
        })
    }

    /// Letters carrying random entries (and hence an `n^{-1/2}` scaling).
    pub fn is_random(self) -> bool {
        !matches!(self, Self::D | Self::J)
    }

    /// Letters whose matrices are real symmetric, so `X* = X`.
    pub fn is_self_adjoint(self) -> bool {
        matches!(self, Self::L | Self::R | Self::Ts | Self::H | Self::J)
    }

    /// Length of the random input sequence at order `n`.
    pub fn input_len(self, n: usize) -> usize {
        match self {
            Self::T | Self::H => 2 * n - 1,
            Self::D | Self::J => 0,
            _ => n,
        }
    }
}

/// A matrix identity: ensemble letter plus copy index. Distinct symbols are
/// sampled independently.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Symbol {
    pub kind: LetterKind,
    pub copy: u32,
}

impl Symbol {
    pub fn new(kind: LetterKind) -> Self {
        Self { kind, copy: 0 }
    }

    pub fn with_copy(kind: LetterKind, copy: u32) -> Self {
        Self { kind, copy }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.kind.token())?;
        if self.copy != 0 {
            write!(f, "_{}", self.copy)?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Letter {
    pub symbol: Symbol,
    /// Always `false` for `D`, whose adjoint is folded into `power`.
    pub adjoint: bool,
    /// Exponent of `D`; 1 for every other letter.
    pub power: i32,
}

impl Letter {
    pub fn plain(kind: LetterKind) -> Self {
        Self {
            symbol: Symbol::new(kind),
            adjoint: false,
            power: 1,
        }
    }

    pub fn star(kind: LetterKind) -> Self {
        Self {
            adjoint: true,
            ..Self::plain(kind)
        }
    }

    pub fn d(power: i32) -> Self {
        Self {
            symbol: Symbol::new(LetterKind::D),
            adjoint: false,
            power,
        }
    }

    pub fn copy(mut self, copy: u32) -> Self {
        self.symbol.copy = copy;
        self
    }

    pub fn kind(&self) -> LetterKind {
        self.symbol.kind
    }

    pub fn adjointed(self) -> Self {
        if self.kind() == LetterKind::D {
            Self {
                power: -self.power,
                ..self
            }
        } else {
            Self {
                adjoint: !self.adjoint,
                ..self
            }
        }
    }

    fn parse(tok: &str) -> Result<Self> {
        let err = |reason: &str| Error::Word {
            token: tok.to_string(),
            reason: reason.to_string(),
        };
        let (head, power) = match tok.split_once('^') {
            Some((h, p)) => {
                let k: i32 = p.parse().map_err(|_| err("exponent must be an integer"))?;
                (h, Some(k))
            }
            None => (tok, None),
        };
        let (head, adjoint) = match head.strip_suffix('*') {
            Some(h) => (h, true),
            None => (head, false),
        };
        let (name, copy) = match head.rsplit_once('_') {
            Some((name, c)) => {
                let c: u32 = c.parse().map_err(|_| err("copy index must be a non-negative integer"))?;
                (name, c)
            }
            None => (head, 0),
        };
        let kind = LetterKind::from_token(name)
            .ok_or_else(|| err("unknown letter; expected one of C C~ S L R T Ts H D J"))?;
        match (kind, power) {
            (LetterKind::D, p) => {
                if copy != 0 {
                    return Err(err("D has no independent copies"));
                }
                let p = p.unwrap_or(1);
                Ok(Self::d(if adjoint { -p } else { p }))
            }
            (_, Some(_)) => Err(err("only D takes an exponent")),
            (_, None) => Ok(Self {
                symbol: Symbol::with_copy(kind, copy),
                adjoint,
                power: 1,
            }),
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.kind() == LetterKind::D {
            return match self.power {
                1 => f.write_str("D"),
                -1 => f.write_str("D*"),
                k => write!(f, "D^{k}"),
            };
        }
        write!(f, "{}", self.symbol)?;
        if self.adjoint {
            f.write_str("*")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Word {
    pub letters: Vec<Letter>,
}

impl Word {
    pub fn new(letters: Vec<Letter>) -> Self {
        Self { letters }
    }

    pub fn parse(s: &str) -> Result<Self> {
        s.split_whitespace()
            .map(Letter::parse)
            .collect::<Result<Vec<_>>>()
            .map(Self::new)
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// `(X_1 ... X_p)* = X_p* ... X_1*`.
    pub fn adjoint(&self) -> Self {
        Self::new(self.letters.iter().rev().map(|l| l.adjointed()).collect())
    }

    /// Move the first `k` letters to the end.
    pub fn rotate(&self, k: usize) -> Self {
        let mut letters = self.letters.clone();
        if !letters.is_empty() {
            let len = letters.len();
            letters.rotate_left(k % len);
        }
        Self::new(letters)
    }

    /// Distinct symbols in order of first appearance.
    pub fn symbols(&self) -> Vec<Symbol> {
        let mut out: Vec<Symbol> = Vec::new();
        for l in &self.letters {
            if !out.contains(&l.symbol) {
                out.push(l.symbol);
            }
        }
        out
    }

    /// Number of random letters (each contributes one `n^{-1/2}`).
    pub fn random_degree(&self) -> usize {
        self.letters.iter().filter(|l| l.kind().is_random()).count()
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}
