//! The two-state binary automaton `B(u)` and the three-state variant with sinks.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{big, pow2, RatMatrix, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("not a binary word: {0:?}")]
pub struct BinWordError(pub String);

/// A word over `{0,1}`.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BinWord(Vec<bool>);

impl BinWord {
    pub fn new(bits: Vec<bool>) -> Self {
        BinWord(bits)
    }

    pub fn empty() -> Self {
        BinWord(Vec::new())
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn reversed(&self) -> BinWord {
        BinWord(self.0.iter().rev().copied().collect())
    }

    pub fn concat(&self, other: &BinWord) -> BinWord {
        let mut bits = self.0.clone();
        bits.extend_from_slice(&other.0);
        BinWord(bits)
    }

    pub fn concat_all<'a>(parts: impl IntoIterator<Item = &'a BinWord>) -> BinWord {
        BinWord(parts.into_iter().flat_map(|p| p.0.iter().copied()).collect())
    }

    pub fn ends_with_one(&self) -> bool {
        self.0.last() == Some(&true)
    }

    pub fn is_prefix_of(&self, other: &BinWord) -> bool {
        other.0.starts_with(&self.0)
    }

    /// `(u)₂`, the word read as a binary number.
    pub fn value(&self) -> BigInt {
        self.0.iter().fold(BigInt::zero(), |acc, &b| {
            (acc << 1usize) + if b { BigInt::one() } else { BigInt::zero() }
        })
    }

    /// `0.u = (u)₂ / 2^{|u|}`.
    pub fn fraction(&self) -> Rational {
        big(self.value()) * pow2(-(self.len() as i64))
    }
}

impl FromStr for BinWord {
    type Err = BinWordError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(BinWordError(s.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(BinWord)
    }
}

impl fmt::Display for BinWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BinWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

impl Serialize for BinWord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for BinWord {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `(u)₂` for a 0/1 string. Panics on other characters.
pub fn bin_value(u: &str) -> BigInt {
    u.parse::<BinWord>().expect("binary word").value()
}

/// `0.u` for a 0/1 string. Panics on other characters.
pub fn bin_fraction(u: &str) -> Rational {
    u.parse::<BinWord>().expect("binary word").fraction()
}

/// `B(u)`; satisfies `B(u)·B(u′) = B(u′u)`. `B("")` is the identity.
pub fn b_matrix(u: &BinWord) -> RatMatrix {
    let scale = pow2(-(u.len() as i64));
    let x = big(u.value()) * &scale;
    let y = big(u.value() + 1) * &scale;
    let one = Rational::one();
    RatMatrix::new(vec![vec![&one - &x, x], vec![&one - &y, y]]).expect("2x2")
}

/// Three states `q₀`, accept sink, reject sink. From `q₀` the automaton stays
/// with probability `2^{−|u|}`, accepts with `0.u` and rejects otherwise.
pub fn fijalkow_automaton(u: &BinWord) -> RatMatrix {
    assert!(!u.is_empty(), "word must be nonempty");
    let stay = pow2(-(u.len() as i64));
    let acc = u.fraction();
    let rej = Rational::one() - &stay - &acc;
    assert!(rej >= Rational::zero());
    let z = Rational::zero();
    let o = Rational::one();
    RatMatrix::new(vec![
        vec![stay, acc, rej],
        vec![z.clone(), o.clone(), z.clone()],
        vec![z.clone(), z, o],
    ])
    .expect("3x3")
}
