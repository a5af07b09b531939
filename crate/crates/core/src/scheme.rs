//! Update schemes: words over {H, V} applied cyclically.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Axis selector of a single update step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    H,
    V,
}

impl Rule {
    pub fn swap(self) -> Rule {
        match self {
            Rule::H => Rule::V,
            Rule::V => Rule::H,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Rule::H => 'H',
            Rule::V => 'V',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemeError {
    #[error("empty update scheme")]
    EmptyWord,
    #[error("illegal symbol at position {0}")]
    IllegalSymbol(usize),
    #[error("scheme uses a single axis; the one-dimensional case is not supported")]
    MonotoneWord,
    #[error("scheme is a proper power of a shorter word")]
    NotPrimitive,
}

/// A cyclic word over {H, V} with cached symbol counts.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UpdateScheme {
    word: Vec<Rule>,
    h: usize,
    v: usize,
}

impl UpdateScheme {
    pub fn from_rules(word: Vec<Rule>) -> Result<Self, SchemeError> {
        if word.is_empty() {
            return Err(SchemeError::EmptyWord);
        }
        let h = word.iter().filter(|r| **r == Rule::H).count();
        let v = word.len() - h;
        Ok(UpdateScheme { word, h, v })
    }

    pub fn word(&self) -> &[Rule] {
        &self.word
    }

    pub fn h(&self) -> usize {
        self.h
    }

    pub fn v(&self) -> usize {
        self.v
    }

    pub fn k(&self) -> usize {
        self.word.len()
    }

    /// Rule applied at global step `t` (0-based).
    pub fn rule_at(&self, t: usize) -> Rule {
        self.word[t % self.word.len()]
    }

    pub fn is_primitive(&self) -> bool {
        self.primitive_root().k() == self.k()
    }

    /// Shortest `W` with `self = W^i`.
    pub fn primitive_root(&self) -> UpdateScheme {
        let k = self.k();
        for d in 1..=k {
            if k.is_multiple_of(d) && (d..k).all(|i| self.word[i] == self.word[i % d]) {
                return UpdateScheme::from_rules(self.word[..d].to_vec()).unwrap();
            }
        }
        unreachable!()
    }

    /// Cyclic rotation `Y·X` for the split `X·Y` with `|X| = s`.
    pub fn rotate(&self, s: usize) -> UpdateScheme {
        let s = s % self.k();
        let mut w = self.word[s..].to_vec();
        w.extend_from_slice(&self.word[..s]);
        UpdateScheme::from_rules(w).unwrap()
    }

    /// All proper rotations of a primitive word.
    pub fn shifted_cycles(&self) -> Result<Vec<UpdateScheme>, SchemeError> {
        if !self.is_primitive() {
            return Err(SchemeError::NotPrimitive);
        }
        Ok((1..self.k()).map(|s| self.rotate(s)).collect())
    }

    /// H and V exchanged (90 degree rotation of the plane).
    pub fn swapped(&self) -> UpdateScheme {
        UpdateScheme::from_rules(self.word.iter().map(|r| r.swap()).collect()).unwrap()
    }

    pub fn is_normal(&self) -> bool {
        self.word[0] == Rule::H && self.word[self.k() - 1] == Rule::V
    }

    pub fn normalize(&self) -> Result<Normalization, SchemeError> {
        normalize(self)
    }
}

impl fmt::Display for UpdateScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.word {
            write!(f, "{}", r.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for UpdateScheme {
    type Err = SchemeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_scheme(s)
    }
}

/// Parses a scheme word, case-insensitively. Surrounding whitespace is ignored.
pub fn parse_scheme(text: &str) -> Result<UpdateScheme, SchemeError> {
    let text = text.trim();
    let mut word = Vec::with_capacity(text.len());
    for (i, c) in text.chars().enumerate() {
        match c.to_ascii_uppercase() {
            'H' => word.push(Rule::H),
            'V' => word.push(Rule::V),
            _ => return Err(SchemeError::IllegalSymbol(i)),
        }
    }
    UpdateScheme::from_rules(word)
}

/// Result of bringing a scheme into the form `H … V`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Normalization {
    /// H and V were exchanged; layouts built for `normalized` must be transposed.
    pub rotated: bool,
    /// Number of physical steps executed before the first cycle of `normalized`.
    pub wait_steps: usize,
    /// The absorbed steps themselves (`wait_steps` symbols, in the physical frame
    /// after any rotation).
    pub prefix: Vec<Rule>,
    pub normalized: UpdateScheme,
}

pub fn normalize(z: &UpdateScheme) -> Result<Normalization, SchemeError> {
    if z.h() == 0 || z.v() == 0 {
        return Err(SchemeError::MonotoneWord);
    }
    let w = z.word();
    let k = z.k();
    if w[0] == Rule::V && w[k - 1] == Rule::H {
        return Ok(Normalization {
            rotated: true,
            wait_steps: 0,
            prefix: Vec::new(),
            normalized: z.swapped(),
        });
    }
    // First H that follows a V cyclically; covers both the leading-V run and a
    // trailing-H residue.
    let p = (0..k)
        .find(|&p| w[p] == Rule::H && w[(p + k - 1) % k] == Rule::V)
        .expect("word contains both symbols");
    Ok(Normalization {
        rotated: false,
        wait_steps: p,
        prefix: w[..p].to_vec(),
        normalized: z.rotate(p),
    })
}
