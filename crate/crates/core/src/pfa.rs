//! Probabilistic finite automata with exact acceptance probabilities.
//!
//! A word `w₁…wₘ` is accepted with probability `πᵀ M_{w₁}…M_{wₘ} out`. The
//! output vector may hold any values in `[0,1]`; a 0-1 vector is the usual
//! set of accepting states.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{serde_rational, ExactError, RatMatrix, RatVector, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PfaError {
    #[error("unknown symbol {0:?}")]
    UnknownSymbol(String),
    #[error("symbol index {0} out of range")]
    BadIndex(usize),
    #[error("duplicate symbol {0:?}")]
    DuplicateSymbol(String),
    #[error("empty alphabet")]
    EmptyAlphabet,
    #[error("matrix for {symbol:?} is {shape:?}, expected {dim}x{dim}")]
    BadShape {
        symbol: String,
        shape: (usize, usize),
        dim: usize,
    },
    #[error("matrix for {0:?} is not row-stochastic")]
    NotStochastic(String),
    #[error("starting vector is not a probability distribution")]
    BadPi,
    #[error("output vector has entries outside [0,1] or wrong length")]
    BadOut,
    #[error("cutpoint outside [0,1]")]
    BadCutpoint,
    #[error("mixture weights must be nonnegative and sum to 1")]
    WeightSum,
    #[error("alphabets differ")]
    AlphabetMismatch,
    #[error("missing matrix for symbol {0:?}")]
    MissingMatrix(String),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Accept when the probability is `> λ`.
    Strict,
    /// Accept when the probability is `≥ λ`.
    Weak,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pfa {
    alphabet: Vec<String>,
    matrices: Vec<RatMatrix>,
    pi: RatVector,
    out: RatVector,
    cutpoint: Rational,
    mode: Mode,
}

impl Pfa {
    pub fn new(
        alphabet: Vec<String>,
        matrices: Vec<RatMatrix>,
        pi: RatVector,
        out: RatVector,
        cutpoint: Rational,
        mode: Mode,
    ) -> Result<Self, PfaError> {
        if alphabet.is_empty() {
            return Err(PfaError::EmptyAlphabet);
        }
        for (i, s) in alphabet.iter().enumerate() {
            if alphabet[..i].contains(s) {
                return Err(PfaError::DuplicateSymbol(s.clone()));
            }
        }
        if matrices.len() != alphabet.len() {
            return Err(PfaError::MissingMatrix(
                alphabet.get(matrices.len()).cloned().unwrap_or_default(),
            ));
        }
        let d = pi.dim();
        for (s, m) in alphabet.iter().zip(&matrices) {
            if m.shape() != (d, d) {
                return Err(PfaError::BadShape {
                    symbol: s.clone(),
                    shape: m.shape(),
                    dim: d,
                });
            }
            if !m.is_row_stochastic() {
                return Err(PfaError::NotStochastic(s.clone()));
            }
        }
        if !pi.is_distribution() {
            return Err(PfaError::BadPi);
        }
        if out.dim() != d || !out.in_unit_box() {
            return Err(PfaError::BadOut);
        }
        if cutpoint.is_negative() || cutpoint > Rational::one() {
            return Err(PfaError::BadCutpoint);
        }
        Ok(Pfa {
            alphabet,
            matrices,
            pi,
            out,
            cutpoint,
            mode,
        })
    }

    pub fn dim(&self) -> usize {
        self.pi.dim()
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn matrices(&self) -> &[RatMatrix] {
        &self.matrices
    }

    pub fn matrix(&self, symbol: &str) -> Option<&RatMatrix> {
        self.symbol_index(symbol).map(|i| &self.matrices[i])
    }

    pub fn pi(&self) -> &RatVector {
        &self.pi
    }

    pub fn out(&self) -> &RatVector {
        &self.out
    }

    pub fn cutpoint(&self) -> &Rational {
        &self.cutpoint
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn symbol_index(&self, symbol: &str) -> Option<usize> {
        self.alphabet.iter().position(|s| s == symbol)
    }

    pub fn with_cutpoint(mut self, cutpoint: Rational, mode: Mode) -> Result<Self, PfaError> {
        if cutpoint.is_negative() || cutpoint > Rational::one() {
            return Err(PfaError::BadCutpoint);
        }
        self.cutpoint = cutpoint;
        self.mode = mode;
        Ok(self)
    }

    pub fn indices<S: AsRef<str>>(&self, word: &[S]) -> Result<Vec<usize>, PfaError> {
        word.iter()
            .map(|s| {
                self.symbol_index(s.as_ref())
                    .ok_or_else(|| PfaError::UnknownSymbol(s.as_ref().to_string()))
            })
            .collect()
    }

    pub fn symbols(&self, word: &[usize]) -> Vec<String> {
        word.iter().map(|&i| self.alphabet[i].clone()).collect()
    }

    /// State distribution after reading `word` (given as symbol indices).
    pub fn distribution(&self, word: &[usize]) -> Result<RatVector, PfaError> {
        let mut v = self.pi.clone();
        for &a in word {
            let m = self.matrices.get(a).ok_or(PfaError::BadIndex(a))?;
            v = v.mul_mat(m)?;
        }
        Ok(v)
    }

    pub fn accept_prob_idx(&self, word: &[usize]) -> Result<Rational, PfaError> {
        Ok(self.distribution(word)?.dot(&self.out)?)
    }

    pub fn accept_prob<S: AsRef<str>>(&self, word: &[S]) -> Result<Rational, PfaError> {
        self.accept_prob_idx(&self.indices(word)?)
    }

    /// Whether a probability clears this automaton's cutpoint.
    pub fn clears(&self, p: &Rational) -> bool {
        match self.mode {
            Mode::Strict => *p > self.cutpoint,
            Mode::Weak => *p >= self.cutpoint,
        }
    }

    pub fn accepts<S: AsRef<str>>(&self, word: &[S]) -> Result<bool, PfaError> {
        Ok(self.clears(&self.accept_prob(word)?))
    }

    /// Runs two automata side by side; the probability is the product.
    pub fn product(&self, q: &Pfa) -> Result<Pfa, PfaError> {
        if self.alphabet != q.alphabet {
            return Err(PfaError::AlphabetMismatch);
        }
        let matrices = self
            .matrices
            .iter()
            .zip(&q.matrices)
            .map(|(a, b)| a.kron(b))
            .collect();
        Pfa::new(
            self.alphabet.clone(),
            matrices,
            self.pi.kron(&q.pi),
            self.out.kron(&q.out),
            &self.cutpoint * &q.cutpoint,
            self.mode,
        )
    }

    /// Probability `1 − x`; the cutpoint becomes `1 − λ`.
    pub fn complement(&self) -> Pfa {
        let one = Rational::one();
        let out = RatVector::new(self.out.iter().map(|x| &one - x).collect()).expect("nonempty");
        Pfa {
            out,
            cutpoint: &one - &self.cutpoint,
            ..self.clone()
        }
    }

    /// Convex combination: block-diagonal matrices, weighted concatenation of π.
    pub fn mixture(weights: &[Rational], ps: &[&Pfa]) -> Result<Pfa, PfaError> {
        if weights.len() != ps.len()
            || ps.is_empty()
            || weights.iter().any(|w| w.is_negative())
            || !weights.iter().fold(Rational::zero(), |a, b| a + b).is_one()
        {
            return Err(PfaError::WeightSum);
        }
        let alphabet = ps[0].alphabet.clone();
        if ps.iter().any(|p| p.alphabet != alphabet) {
            return Err(PfaError::AlphabetMismatch);
        }
        let matrices = (0..alphabet.len())
            .map(|a| {
                let blocks: Vec<&RatMatrix> = ps.iter().map(|p| &p.matrices[a]).collect();
                RatMatrix::block_diag(&blocks)
            })
            .collect();
        let pis: Vec<RatVector> = ps.iter().zip(weights).map(|(p, w)| p.pi.scale(w)).collect();
        let pi = RatVector::concat(&pis.iter().collect::<Vec<_>>());
        let out = RatVector::concat(&ps.iter().map(|p| &p.out).collect::<Vec<_>>());
        let cutpoint = ps
            .iter()
            .zip(weights)
            .fold(Rational::zero(), |acc, (p, w)| acc + w * &p.cutpoint);
        Pfa::new(alphabet, matrices, pi, out, cutpoint, ps[0].mode)
    }
}

#[derive(Serialize, Deserialize)]
struct PfaJson {
    alphabet: Vec<String>,
    matrices: BTreeMap<String, RatMatrix>,
    pi: RatVector,
    out: RatVector,
    #[serde(with = "serde_rational")]
    cutpoint: Rational,
    mode: Mode,
}

impl Serialize for Pfa {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PfaJson {
            alphabet: self.alphabet.clone(),
            matrices: self
                .alphabet
                .iter()
                .cloned()
                .zip(self.matrices.iter().cloned())
                .collect(),
            pi: self.pi.clone(),
            out: self.out.clone(),
            cutpoint: self.cutpoint.clone(),
            mode: self.mode,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Pfa {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let mut raw = PfaJson::deserialize(d)?;
        let mut matrices = Vec::with_capacity(raw.alphabet.len());
        for s in &raw.alphabet {
            let m = raw
                .matrices
                .remove(s)
                .ok_or_else(|| D::Error::custom(PfaError::MissingMatrix(s.clone())))?;
            matrices.push(m);
        }
        Pfa::new(raw.alphabet, matrices, raw.pi, raw.out, raw.cutpoint, raw.mode).map_err(D::Error::custom)
    }
}

/// Predicate for [`bounded_search`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Want {
    Above(Rational),
    AtLeast(Rational),
    Exactly(Rational),
}

impl Want {
    /// The predicate induced by a PFA's own cutpoint and mode.
    pub fn from_pfa(p: &Pfa) -> Want {
        match p.mode {
            Mode::Strict => Want::Above(p.cutpoint.clone()),
            Mode::Weak => Want::AtLeast(p.cutpoint.clone()),
        }
    }

    pub fn holds(&self, x: &Rational) -> bool {
        match self {
            Want::Above(v) => x > v,
            Want::AtLeast(v) => x >= v,
            Want::Exactly(v) => x == v,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub word: Vec<String>,
    #[serde(with = "serde_rational")]
    pub probability: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchReport {
    pub witness: Option<Witness>,
    /// Largest probability among the words examined, and the first word attaining it.
    #[serde(with = "serde_rational")]
    pub max_probability: Rational,
    pub max_word: Vec<String>,
    pub words_examined: u64,
    /// True when every word up to `max_len` was examined.
    pub complete: bool,
    pub max_len: usize,
}

/// Breadth-first search over all words of length `≤ max_len`, shorter words
/// first and lexicographic (alphabet order) within a length. Stops after the
/// first length that contains a witness; the witness is the first such word.
pub fn bounded_search(p: &Pfa, max_len: usize, want: &Want) -> SearchReport {
    let mut best: Option<(Rational, Vec<usize>)> = None;
    let mut examined = 0u64;
    let mut frontier: Vec<(Vec<usize>, RatVector)> = vec![(Vec::new(), p.pi.clone())];
    for len in 0..=max_len {
        let probs: Vec<Rational> = frontier
            .par_iter()
            .map(|(_, v)| v.dot(&p.out).expect("dims checked"))
            .collect();
        examined += probs.len() as u64;
        let mut hit = None;
        for ((w, _), x) in frontier.iter().zip(&probs) {
            if best.as_ref().is_none_or(|(b, _)| x > b) {
                best = Some((x.clone(), w.clone()));
            }
            if hit.is_none() && want.holds(x) {
                hit = Some(Witness {
                    word: p.symbols(w),
                    probability: x.clone(),
                });
            }
        }
        if hit.is_some() || len == max_len {
            let (max_probability, w) = best.expect("at least the empty word");
            return SearchReport {
                complete: hit.is_none() || len == max_len,
                witness: hit,
                max_probability,
                max_word: p.symbols(&w),
                words_examined: examined,
                max_len,
            };
        }
        frontier = frontier
            .par_iter()
            .flat_map_iter(|(w, v)| {
                (0..p.alphabet.len()).map(move |a| {
                    let mut w2 = w.clone();
                    w2.push(a);
                    (w2, v.mul_mat(&p.matrices[a]).expect("dims checked"))
                })
            })
            .collect();
    }
    unreachable!("loop returns at len == max_len")
}

/// Every word of length `≤ max_len` with its acceptance probability, in search order.
pub fn all_probabilities(p: &Pfa, max_len: usize) -> Vec<(Vec<usize>, Rational)> {
    let mut result = Vec::new();
    let mut frontier: Vec<(Vec<usize>, RatVector)> = vec![(Vec::new(), p.pi.clone())];
    for len in 0..=max_len {
        let probs: Vec<Rational> = frontier
            .par_iter()
            .map(|(_, v)| v.dot(&p.out).expect("dims checked"))
            .collect();
        result.extend(frontier.iter().map(|(w, _)| w.clone()).zip(probs));
        if len == max_len {
            break;
        }
        frontier = frontier
            .par_iter()
            .flat_map_iter(|(w, v)| {
                (0..p.alphabet.len()).map(move |a| {
                    let mut w2 = w.clone();
                    w2.push(a);
                    (w2, v.mul_mat(&p.matrices[a]).expect("dims checked"))
                })
            })
            .collect();
    }
    result
}

/// All words over `{0..k}` of length `≤ max_len`, shortest first, lexicographic.
pub fn words_up_to(k: usize, max_len: usize) -> Vec<Vec<usize>> {
    let mut all = vec![Vec::new()];
    let mut level = vec![Vec::new()];
    for _ in 0..max_len {
        level = level
            .iter()
            .flat_map(|w: &Vec<usize>| {
                (0..k).map(move |a| {
                    let mut w2 = w.clone();
                    w2.push(a);
                    w2
                })
            })
            .collect();
        all.extend(level.iter().cloned());
    }
    all
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};

    fn coin() -> Pfa {
        let m0 = RatMatrix::new(vec![vec![rat(1, 2), rat(1, 2)], vec![int(0), int(1)]]).unwrap();
        let m1 = RatMatrix::identity(2);
        Pfa::new(
            vec!["a".into(), "b".into()],
            vec![m0, m1],
            RatVector::unit(2, 0),
            RatVector::from_ints(&[0, 1]),
            rat(1, 2),
            Mode::Strict,
        )
        .unwrap()
    }

    #[test]
    fn empty_word_is_pi_dot_out() {
        let p = coin();
        assert_eq!(p.accept_prob::<&str>(&[]).unwrap(), int(0));
    }

    #[test]
    fn simple_probabilities() {
        let p = coin();
        assert_eq!(p.accept_prob(&["a"]).unwrap(), rat(1, 2));
        assert_eq!(p.accept_prob(&["a", "b", "a"]).unwrap(), rat(3, 4));
        assert!(p.accepts(&["a", "a"]).unwrap());
        assert!(!p.accepts(&["a"]).unwrap());
    }

    #[test]
    fn unknown_symbol_is_error() {
        assert_eq!(
            coin().accept_prob(&["z"]),
            Err(PfaError::UnknownSymbol("z".into()))
        );
    }

    #[test]
    fn all_ones_out_gives_one() {
        let p = coin();
        let q = Pfa::new(
            p.alphabet.clone(),
            p.matrices.clone(),
            p.pi.clone(),
            RatVector::ones(2),
            rat(1, 2),
            Mode::Weak,
        )
        .unwrap();
        for w in words_up_to(2, 4) {
            assert_eq!(q.accept_prob_idx(&w).unwrap(), int(1));
        }
    }

    #[test]
    fn validation() {
        let bad = RatMatrix::from_ints(&[&[2, -1], &[0, 1]]);
        let r = Pfa::new(
            vec!["a".into()],
            vec![bad],
            RatVector::unit(2, 0),
            RatVector::zeros(2),
            rat(1, 2),
            Mode::Strict,
        );
        assert_eq!(r, Err(PfaError::NotStochastic("a".into())));
        let r = Pfa::new(
            vec!["a".into()],
            vec![RatMatrix::identity(2)],
            RatVector::from_ints(&[1, 1]),
            RatVector::zeros(2),
            rat(1, 2),
            Mode::Strict,
        );
        assert_eq!(r, Err(PfaError::BadPi));
    }

    #[test]
    fn mixture_weight_check() {
        let p = coin();
        assert_eq!(
            Pfa::mixture(&[rat(1, 2), rat(1, 3)], &[&p, &p]),
            Err(PfaError::WeightSum)
        );
    }

    #[test]
    fn zero_out_search_finds_nothing() {
        let p = coin().complement().complement();
        let z = Pfa::new(
            p.alphabet.clone(),
            p.matrices.clone(),
            p.pi.clone(),
            RatVector::zeros(2),
            int(0),
            Mode::Strict,
        )
        .unwrap();
        let r = bounded_search(&z, 5, &Want::Above(int(0)));
        assert!(r.witness.is_none());
        assert_eq!(r.max_probability, int(0));
        assert!(r.complete);
        assert_eq!(r.words_examined, 63);
    }

    #[test]
    fn search_finds_first_witness() {
        let r = bounded_search(&coin(), 4, &Want::Above(rat(1, 2)));
        let w = r.witness.unwrap();
        assert_eq!(w.word, vec!["a", "a"]);
        assert_eq!(w.probability, rat(3, 4));
    }

    #[test]
    fn json_round_trip() {
        let p = coin();
        let s = serde_json::to_string(&p).unwrap();
        let back: Pfa = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn word_enumeration_order() {
        let ws = words_up_to(2, 2);
        assert_eq!(
            ws,
            vec![
                vec![],
                vec![0],
                vec![1],
                vec![0, 0],
                vec![0, 1],
                vec![1, 0],
                vec![1, 1]
            ]
        );
    }
}
