//! Post correspondence problem variants, a brute-force solver and word transforms.
//!
//! Indices are 0-based in memory and 1-based in JSON and on the command line.
//! An RMPCP instance stores its words already reversed (at the symbol level);
//! its solutions concatenate as `v_{a_m}…v_{a_2}v_1`.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Debug;
use std::hash::Hash;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::binaut::BinWord;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PcpError {
    #[error("empty instance")]
    NoPairs,
    #[error("index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("solution violates the {variant:?} constraint: {reason}")]
    VariantConstraint { variant: Variant, reason: String },
    #[error("{variant:?} needs pair {pair} to end with 1")]
    MustEndWithOne { variant: Variant, pair: usize },
    #[error("expected variant {expected:?}, got {got:?}")]
    VariantMismatch { expected: Variant, got: Variant },
    #[error("code collision: {0}")]
    CodeCollision(String),
    #[error("no codeword for symbol {0:?}")]
    MissingCodeword(String),
    #[error("bad word: {0}")]
    BadWord(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    #[serde(rename = "plain")]
    Plain,
    /// Pair 1 starts the solution and is used nowhere else.
    #[serde(rename = "mpcp")]
    Mpcp,
    /// Like MPCP, but pair 1 is the last factor of a reversed concatenation.
    #[serde(rename = "rmpcp")]
    Rmpcp,
    /// Pair 1 starts, pair 2 finishes, neither is used elsewhere.
    #[serde(rename = "2mpcp")]
    TwoMpcp,
}

/// Symbols a PCP word may be made of.
pub trait PcpSymbol: Clone + Eq + Hash + Ord + Debug + Send + Sync {
    fn word_to_json(w: &[Self]) -> Value;
    fn word_from_json(v: &Value) -> Result<Vec<Self>, PcpError>;
    fn show(w: &[Self]) -> String;
}

impl PcpSymbol for bool {
    fn word_to_json(w: &[bool]) -> Value {
        Value::String(BinWord::new(w.to_vec()).to_string())
    }

    fn word_from_json(v: &Value) -> Result<Vec<bool>, PcpError> {
        let bad = || PcpError::BadWord(v.to_string());
        match v {
            Value::String(s) => s.parse::<BinWord>().map(|b| b.bits().to_vec()).map_err(|_| bad()),
            Value::Array(xs) => xs
                .iter()
                .map(|x| match x.as_str() {
                    Some("0") => Ok(false),
                    Some("1") => Ok(true),
                    _ => Err(bad()),
                })
                .collect(),
            _ => Err(bad()),
        }
    }

    fn show(w: &[bool]) -> String {
        BinWord::new(w.to_vec()).to_string()
    }
}

impl PcpSymbol for String {
    fn word_to_json(w: &[String]) -> Value {
        Value::Array(w.iter().cloned().map(Value::String).collect())
    }

    fn word_from_json(v: &Value) -> Result<Vec<String>, PcpError> {
        match v {
            Value::Array(xs) => xs
                .iter()
                .map(|x| {
                    x.as_str()
                        .map(str::to_string)
                        .ok_or_else(|| PcpError::BadWord(v.to_string()))
                })
                .collect(),
            Value::String(s) => Ok(s.chars().map(|c| c.to_string()).collect()),
            _ => Err(PcpError::BadWord(v.to_string())),
        }
    }

    fn show(w: &[String]) -> String {
        w.join(" ")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PcpInstance<T: PcpSymbol = bool> {
    pub variant: Variant,
    pub pairs: Vec<(Vec<T>, Vec<T>)>,
}

pub type BinPcp = PcpInstance<bool>;
pub type SymPcp = PcpInstance<String>;

/// A solution as 0-based pair indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PcpSolution(pub Vec<usize>);

impl PcpSolution {
    pub fn from_one_based(xs: &[usize]) -> Self {
        PcpSolution(xs.iter().map(|&x| x - 1).collect())
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.0.iter().map(|&x| x + 1).collect()
    }
}

fn bits(s: &str) -> Vec<bool> {
    s.parse::<BinWord>().expect("binary literal").bits().to_vec()
}

impl BinPcp {
    /// Pairs given as 0/1 strings.
    pub fn from_strs(variant: Variant, pairs: &[(&str, &str)]) -> Self {
        PcpInstance {
            variant,
            pairs: pairs.iter().map(|(v, w)| (bits(v), bits(w))).collect(),
        }
    }

    /// The textbook instance (a, baa), (ab, aa), (bba, bb) with a ↦ 0, b ↦ 1.
    /// Its shortest solution is 3, 2, 3, 1.
    pub fn classic() -> Self {
        Self::from_strs(Variant::Plain, &[("0", "100"), ("01", "00"), ("110", "11")])
    }

    pub fn v(&self, i: usize) -> BinWord {
        BinWord::new(self.pairs[i].0.clone())
    }

    pub fn w(&self, i: usize) -> BinWord {
        BinWord::new(self.pairs[i].1.clone())
    }

    /// Longest word length over all pairs.
    pub fn max_word_len(&self) -> usize {
        self.pairs
            .iter()
            .map(|(v, w)| v.len().max(w.len()))
            .max()
            .unwrap_or(0)
    }

    /// Checks that the fixed pairs of RMPCP/2MPCP end with 1.
    pub fn check_fixed_pairs_end_with_one(&self) -> Result<(), PcpError> {
        let fixed: &[usize] = match self.variant {
            Variant::Rmpcp => &[0],
            Variant::TwoMpcp => &[0, 1],
            _ => &[],
        };
        for &i in fixed {
            let (v, w) = &self.pairs[i];
            if v.last() != Some(&true) || w.last() != Some(&true) {
                return Err(PcpError::MustEndWithOne {
                    variant: self.variant,
                    pair: i + 1,
                });
            }
        }
        Ok(())
    }
}

impl<T: PcpSymbol> PcpInstance<T> {
    pub fn new(variant: Variant, pairs: Vec<(Vec<T>, Vec<T>)>) -> Result<Self, PcpError> {
        let need = match variant {
            Variant::TwoMpcp => 2,
            _ => 1,
        };
        if pairs.len() < need {
            return Err(PcpError::NoPairs);
        }
        Ok(PcpInstance { variant, pairs })
    }

    pub fn k(&self) -> usize {
        self.pairs.len()
    }

    /// Checks the first/last-index constraints of the variant.
    pub fn check_variant(&self, sol: &PcpSolution) -> Result<(), PcpError> {
        let a = &sol.0;
        if let Some(&i) = a.iter().find(|&&i| i >= self.k()) {
            return Err(PcpError::IndexOutOfRange(i + 1));
        }
        let fail = |reason: &str| {
            Err(PcpError::VariantConstraint {
                variant: self.variant,
                reason: reason.to_string(),
            })
        };
        if a.is_empty() {
            return fail("solution must be nonempty");
        }
        match self.variant {
            Variant::Plain => {}
            Variant::Mpcp | Variant::Rmpcp => {
                if a[0] != 0 {
                    return fail("must start with pair 1");
                }
                if a[1..].contains(&0) {
                    return fail("pair 1 used twice");
                }
            }
            Variant::TwoMpcp => {
                if a.len() < 2 || a[0] != 0 || *a.last().unwrap() != 1 {
                    return fail("must start with pair 1 and end with pair 2");
                }
                if a[1..a.len() - 1].iter().any(|&i| i < 2) {
                    return fail("pairs 1 and 2 used in the middle");
                }
            }
        }
        Ok(())
    }

    /// The two concatenations of a solution candidate, in the variant's order.
    pub fn concatenations(&self, sol: &PcpSolution) -> (Vec<T>, Vec<T>) {
        let order: Vec<usize> = match self.variant {
            Variant::Rmpcp => sol.0.iter().rev().copied().collect(),
            _ => sol.0.clone(),
        };
        let mut top = Vec::new();
        let mut bot = Vec::new();
        for i in order {
            top.extend_from_slice(&self.pairs[i].0);
            bot.extend_from_slice(&self.pairs[i].1);
        }
        (top, bot)
    }

    pub fn check_solution(&self, sol: &PcpSolution) -> Result<bool, PcpError> {
        self.check_variant(sol)?;
        let (top, bot) = self.concatenations(sol);
        Ok(top == bot)
    }

    /// Reverses every word; the variant tag is kept.
    pub fn reverse_words(&self) -> Self {
        PcpInstance {
            variant: self.variant,
            pairs: self
                .pairs
                .iter()
                .map(|(v, w)| {
                    (
                        v.iter().rev().cloned().collect(),
                        w.iter().rev().cloned().collect(),
                    )
                })
                .collect(),
        }
    }

    /// MPCP to RMPCP: reverse every word (symbol level) and retag.
    pub fn to_rmpcp(&self) -> Result<Self, PcpError> {
        if self.variant != Variant::Mpcp {
            return Err(PcpError::VariantMismatch {
                expected: Variant::Mpcp,
                got: self.variant,
            });
        }
        let mut r = self.reverse_words();
        r.variant = Variant::Rmpcp;
        Ok(r)
    }

    /// An equivalent instance whose solutions concatenate left to right.
    fn forward_form(&self) -> Self {
        match self.variant {
            Variant::Rmpcp => {
                let mut f = self.reverse_words();
                f.variant = Variant::Mpcp;
                f
            }
            _ => self.clone(),
        }
    }

    fn allowed_first(&self) -> Vec<usize> {
        match self.variant {
            Variant::Plain => (0..self.k()).collect(),
            _ => vec![0],
        }
    }

    fn allowed_next(&self) -> Vec<usize> {
        match self.variant {
            Variant::Plain => (0..self.k()).collect(),
            Variant::Mpcp | Variant::Rmpcp => (1..self.k()).collect(),
            Variant::TwoMpcp => (1..self.k()).collect(),
        }
    }

    /// Whether a finished candidate may stop here.
    fn may_end(&self, last: usize, len: usize) -> bool {
        match self.variant {
            Variant::TwoMpcp => last == 1 && len >= 2,
            _ => true,
        }
    }

    /// Whether a candidate may be extended after using `last`.
    fn may_extend(&self, last: usize, len: usize) -> bool {
        !(self.variant == Variant::TwoMpcp && last == 1 && len >= 2)
    }

    /// Shortest solution of length `≤ max_len`, lexicographically least among
    /// the shortest. Branches where neither side is a prefix of the other are cut.
    pub fn brute_solve(&self, max_len: usize) -> Option<PcpSolution> {
        let fwd = self.forward_form();
        let mut seen: HashSet<Overhang<T>> = HashSet::new();
        let mut level: Vec<(Overhang<T>, Vec<usize>)> = Vec::new();
        for i in fwd.allowed_first() {
            if let Some(o) = Overhang::start().extend(&fwd.pairs[i]) {
                level.push((o, vec![i]));
            }
        }
        for len in 1..=max_len {
            for (o, path) in &level {
                if o.is_balanced() && fwd.may_end(*path.last().unwrap(), len) {
                    return Some(PcpSolution(path.clone()));
                }
            }
            if len == max_len {
                break;
            }
            let mut next = Vec::new();
            for (o, path) in &level {
                let last = *path.last().unwrap();
                if !fwd.may_extend(last, len) {
                    continue;
                }
                for i in fwd.allowed_next() {
                    if let Some(o2) = o.extend(&fwd.pairs[i]) {
                        let key = o2.clone().with_tag(i == 1 && fwd.variant == Variant::TwoMpcp);
                        if seen.insert(key) {
                            let mut p = path.clone();
                            p.push(i);
                            next.push((o2, p));
                        }
                    }
                }
            }
            level = next;
        }
        None
    }

    /// Number of solutions of each length `1..=max_len`.
    pub fn count_solutions(&self, max_len: usize) -> Vec<u128> {
        self.count_inner(max_len, false)
    }

    /// Like [`PcpInstance::count_solutions`], but a solution is not extended
    /// once both sides agree, so `s` and `s` followed by more pairs are not
    /// both counted.
    pub fn count_primitive_solutions(&self, max_len: usize) -> Vec<u128> {
        self.count_inner(max_len, true)
    }

    fn count_inner(&self, max_len: usize, primitive: bool) -> Vec<u128> {
        let fwd = self.forward_form();
        let mut counts = Vec::with_capacity(max_len);
        let mut level: HashMap<(Overhang<T>, usize), u128> = HashMap::new();
        for i in fwd.allowed_first() {
            if let Some(o) = Overhang::start().extend(&fwd.pairs[i]) {
                *level.entry((o, i)).or_default() += 1;
            }
        }
        for len in 1..=max_len {
            counts.push(
                level
                    .iter()
                    .filter(|((o, last), _)| o.is_balanced() && fwd.may_end(*last, len))
                    .map(|(_, c)| *c)
                    .sum(),
            );
            let mut next: HashMap<(Overhang<T>, usize), u128> = HashMap::new();
            for ((o, last), c) in &level {
                if !fwd.may_extend(*last, len) || (primitive && o.is_balanced()) {
                    continue;
                }
                for i in fwd.allowed_next() {
                    if let Some(o2) = o.extend(&fwd.pairs[i]) {
                        *next.entry((o2, i)).or_default() += c;
                    }
                }
            }
            level = next;
        }
        counts
    }
}

/// The unmatched suffix of the longer side.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Overhang<T> {
    top_ahead: bool,
    rest: Vec<T>,
    tag: bool,
}

impl<T: PcpSymbol> Overhang<T> {
    fn start() -> Self {
        Overhang {
            top_ahead: true,
            rest: Vec::new(),
            tag: false,
        }
    }

    fn is_balanced(&self) -> bool {
        self.rest.is_empty()
    }

    fn with_tag(mut self, tag: bool) -> Self {
        self.tag = tag;
        self
    }

    fn extend(&self, (v, w): &(Vec<T>, Vec<T>)) -> Option<Self> {
        // Surplus of the leading side followed by the new word on that side.
        let (ahead, behind) = if self.top_ahead { (v, w) } else { (w, v) };
        let mut long: Vec<T> = self.rest.clone();
        long.extend_from_slice(ahead);
        let short = behind;
        let n = long.len().min(short.len());
        if long[..n] != short[..n] {
            return None;
        }
        if long.len() >= short.len() {
            Some(Overhang {
                top_ahead: self.top_ahead,
                rest: long[n..].to_vec(),
                tag: false,
            })
        } else {
            Some(Overhang {
                top_ahead: !self.top_ahead,
                rest: short[n..].to_vec(),
                tag: false,
            })
        }
    }
}

impl<T: PcpSymbol> Serialize for PcpInstance<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Raw {
            variant: Variant,
            pairs: Vec<[Value; 2]>,
        }
        Raw {
            variant: self.variant,
            pairs: self
                .pairs
                .iter()
                .map(|(v, w)| [T::word_to_json(v), T::word_to_json(w)])
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de, T: PcpSymbol> Deserialize<'de> for PcpInstance<T> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        #[derive(Deserialize)]
        struct Raw {
            #[serde(default = "plain")]
            variant: Variant,
            pairs: Vec<[Value; 2]>,
        }
        fn plain() -> Variant {
            Variant::Plain
        }
        let raw = Raw::deserialize(d)?;
        let pairs = raw
            .pairs
            .iter()
            .map(|[v, w]| Ok((T::word_from_json(v)?, T::word_from_json(w)?)))
            .collect::<Result<Vec<_>, PcpError>>()
            .map_err(D::Error::custom)?;
        PcpInstance::new(raw.variant, pairs).map_err(D::Error::custom)
    }
}

/// Interleaves a `1` after every bit so that trailing zeros cannot hide a
/// difference between two binary fractions.
pub fn antizero(inst: &BinPcp) -> BinPcp {
    let spread = |w: &Vec<bool>| w.iter().flat_map(|&b| [b, true]).collect();
    PcpInstance {
        variant: inst.variant,
        pairs: inst.pairs.iter().map(|(v, w)| (spread(v), spread(w))).collect(),
    }
}

/// A binary prefix code for a finite symbol set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "BTreeMap<String, BinWord>", into = "BTreeMap<String, BinWord>")]
pub struct PrefixCode {
    map: BTreeMap<String, BinWord>,
}

impl PrefixCode {
    /// Fails unless the code is prefix-free, which makes it uniquely decodable.
    pub fn new(map: BTreeMap<String, BinWord>) -> Result<Self, PcpError> {
        for (a, x) in &map {
            if x.is_empty() {
                return Err(PcpError::CodeCollision(format!("{a:?} has the empty codeword")));
            }
            for (b, y) in &map {
                if a != b && x.is_prefix_of(y) {
                    return Err(PcpError::CodeCollision(format!(
                        "{a:?} = {x} is a prefix of {b:?} = {y}"
                    )));
                }
            }
        }
        Ok(PrefixCode { map })
    }

    pub fn from_strs(pairs: &[(&str, &str)]) -> Result<Self, PcpError> {
        let mut map = BTreeMap::new();
        for (s, c) in pairs {
            let w = c
                .parse::<BinWord>()
                .map_err(|_| PcpError::BadWord(c.to_string()))?;
            map.insert(s.to_string(), w);
        }
        Self::new(map)
    }

    pub fn get(&self, symbol: &str) -> Option<&BinWord> {
        self.map.get(symbol)
    }

    pub fn symbols(&self) -> impl Iterator<Item = &String> {
        self.map.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &BinWord)> {
        self.map.iter()
    }

    pub fn max_len(&self) -> usize {
        self.map.values().map(BinWord::len).max().unwrap_or(0)
    }

    pub fn encode(&self, word: &[String]) -> Result<BinWord, PcpError> {
        let mut parts = Vec::with_capacity(word.len());
        for s in word {
            parts.push(
                self.map
                    .get(s)
                    .ok_or_else(|| PcpError::MissingCodeword(s.clone()))?,
            );
        }
        Ok(BinWord::concat_all(parts))
    }

    /// Splits a bit string into codewords; `None` if it does not parse.
    pub fn decode(&self, bits: &BinWord) -> Option<Vec<String>> {
        let mut out = Vec::new();
        let mut i = 0;
        let b = bits.bits();
        'outer: while i < b.len() {
            for (s, c) in &self.map {
                if b[i..].starts_with(c.bits()) {
                    out.push(s.clone());
                    i += c.len();
                    continue 'outer;
                }
            }
            return None;
        }
        Some(out)
    }
}

impl TryFrom<BTreeMap<String, BinWord>> for PrefixCode {
    type Error = PcpError;
    fn try_from(map: BTreeMap<String, BinWord>) -> Result<Self, PcpError> {
        PrefixCode::new(map)
    }
}

impl From<PrefixCode> for BTreeMap<String, BinWord> {
    fn from(c: PrefixCode) -> Self {
        c.map
    }
}

/// Replaces every symbol by its codeword; index sequences are unaffected.
pub fn binarize(inst: &SymPcp, code: &PrefixCode) -> Result<BinPcp, PcpError> {
    let pairs = inst
        .pairs
        .iter()
        .map(|(v, w)| Ok((code.encode(v)?.bits().to_vec(), code.encode(w)?.bits().to_vec())))
        .collect::<Result<Vec<_>, PcpError>>()?;
    Ok(PcpInstance {
        variant: inst.variant,
        pairs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sol(xs: &[usize]) -> PcpSolution {
        PcpSolution::from_one_based(xs)
    }

    #[test]
    fn classic_solution_checks() {
        let c = BinPcp::classic();
        assert_eq!(c.check_solution(&sol(&[3, 2, 3, 1])), Ok(true));
        let (top, _) = c.concatenations(&sol(&[3, 2, 3, 1]));
        assert_eq!(bool::show(&top), "110011100");
        assert_eq!(c.check_solution(&sol(&[1])), Ok(false));
    }

    #[test]
    fn empty_solution_rejected() {
        let c = BinPcp::classic();
        assert!(matches!(
            c.check_solution(&sol(&[])),
            Err(PcpError::VariantConstraint { .. })
        ));
    }

    #[test]
    fn classic_brute_force() {
        assert_eq!(
            BinPcp::classic().brute_solve(4).map(|s| s.one_based()),
            Some(vec![3, 2, 3, 1])
        );
        assert_eq!(BinPcp::classic().brute_solve(3), None);
    }

    #[test]
    fn unsolvable_single_pair() {
        let p = BinPcp::from_strs(Variant::Plain, &[("0", "1")]);
        for b in 1..=10 {
            assert_eq!(p.brute_solve(b), None);
        }
    }

    #[test]
    fn antizero_interleaves() {
        let p = BinPcp::from_strs(Variant::Plain, &[("0", "00")]);
        assert_eq!(antizero(&p), BinPcp::from_strs(Variant::Plain, &[("01", "0101")]));
    }

    #[test]
    fn binarize_erasing_pair() {
        let code = PrefixCode::from_strs(&[("#", "101"), ("_", "100")]).unwrap();
        let inst = SymPcp::new(
            Variant::Mpcp,
            vec![(vec!["#".into(), "_".into()], vec!["#".into()])],
        )
        .unwrap();
        let b = binarize(&inst, &code).unwrap();
        assert_eq!(b, BinPcp::from_strs(Variant::Mpcp, &[("101100", "101")]));
    }

    #[test]
    fn code_collision_detected() {
        assert!(matches!(
            PrefixCode::from_strs(&[("a", "10"), ("b", "101")]),
            Err(PcpError::CodeCollision(_))
        ));
    }

    #[test]
    fn decode_round_trip() {
        let code = PrefixCode::from_strs(&[("#", "101"), ("_", "100"), ("q", "0001")]).unwrap();
        let w: Vec<String> = ["#", "q", "_", "#"].iter().map(|s| s.to_string()).collect();
        assert_eq!(code.decode(&code.encode(&w).unwrap()), Some(w));
    }

    #[test]
    fn mpcp_constraints() {
        let p = BinPcp::from_strs(Variant::Mpcp, &[("1", "11"), ("1", ""), ("", "1")]);
        assert!(p.check_solution(&sol(&[2, 1])).is_err());
        assert!(p.check_solution(&sol(&[1, 1])).is_err());
        assert_eq!(p.check_solution(&sol(&[1, 2])), Ok(true));
        assert_eq!(p.brute_solve(3).unwrap().one_based(), vec![1, 2]);
    }

    #[test]
    fn rmpcp_reads_right_to_left() {
        let p = BinPcp::from_strs(Variant::Rmpcp, &[("1", "01"), ("0", "")]);
        assert_eq!(p.check_solution(&sol(&[1, 2])), Ok(true));
        assert_eq!(p.brute_solve(3).unwrap().one_based(), vec![1, 2]);
        let mut as_mpcp = p.clone();
        as_mpcp.variant = Variant::Mpcp;
        assert_eq!(as_mpcp.check_solution(&sol(&[1, 2])), Ok(false));
    }

    #[test]
    fn two_mpcp_needs_finish() {
        let p = BinPcp::from_strs(Variant::TwoMpcp, &[("1", "10"), ("01", "1"), ("0", "0")]);
        assert_eq!(p.check_solution(&sol(&[1, 2])), Ok(true));
        assert_eq!(p.check_solution(&sol(&[1, 3, 2])), Ok(true));
        assert!(p.check_solution(&sol(&[1, 3])).is_err());
        assert_eq!(p.brute_solve(4).unwrap().one_based(), vec![1, 2]);
        assert_eq!(p.count_solutions(3), vec![0, 1, 1]);
        assert_eq!(
            p.check_solution(&sol(&[1, 2, 3])),
            Err(PcpError::VariantConstraint {
                variant: Variant::TwoMpcp,
                reason: "must start with pair 1 and end with pair 2".into()
            })
        );
    }

    #[test]
    fn json_formats() {
        let c = BinPcp::classic();
        let s = serde_json::to_string(&c).unwrap();
        assert_eq!(
            s,
            r#"{"variant":"plain","pairs":[["0","100"],["01","00"],["110","11"]]}"#
        );
        assert_eq!(serde_json::from_str::<BinPcp>(&s).unwrap(), c);
        let sym: SymPcp =
            serde_json::from_str(r##"{"variant":"mpcp","pairs":[[["#"],["#","_","q0"]]]}"##).unwrap();
        assert_eq!(sym.pairs[0].1.len(), 3);
    }

    #[test]
    fn counting_matches_solver() {
        let c = BinPcp::classic();
        let counts = c.count_solutions(8);
        let first = counts.iter().position(|&n| n > 0).map(|i| i + 1);
        assert_eq!(first, Some(4));
    }
}
