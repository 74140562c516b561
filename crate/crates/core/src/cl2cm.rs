//! Two-counter machines and the coin-flipping route: computation words,
//! formal checks, the Equality Checker automaton, exact Correctness Test
//! probabilities and the round aggregation.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{int, pow2, powu, rat, RatMatrix, RatVector, Rational};
use crate::pfa::{Mode, Pfa, PfaError};

pub const END: &str = "#";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CmError {
    #[error("unknown state {0:?}")]
    UnknownState(String),
    #[error("state name {0:?} clashes with a tape symbol")]
    Reserved(String),
    #[error("duplicate state {0:?}")]
    DuplicateState(String),
    #[error("two rules for ({q}, {lz}, {rz})")]
    Nondeterministic { q: String, lz: bool, rz: bool },
    #[error("rule for ({q}, {lz}, {rz}) decrements a zero counter or moves by more than 1")]
    BadDelta { q: String, lz: bool, rz: bool },
    #[error("the halting state {0:?} has outgoing rules")]
    HaltHasRules(String),
    #[error("the machine stops after {0} steps")]
    RunTooShort(usize),
    #[error("formal check failed: {0}")]
    Formal(String),
    #[error("modulus must be at least 2 and the rejection count at least 1")]
    BadParams,
    #[error(transparent)]
    Pfa(#[from] PfaError),
}

/// `(state, l == 0, r == 0) ↦ (Δl, Δr, next)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CmRule {
    pub state: String,
    pub lz: bool,
    pub rz: bool,
    pub dl: i8,
    pub dr: i8,
    pub next: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoCounterMachine {
    pub states: Vec<String>,
    pub start: String,
    pub halt: String,
    pub rules: Vec<CmRule>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CmConfig {
    pub state: String,
    pub l: u64,
    pub r: u64,
}

impl CmConfig {
    pub fn new(state: &str, l: u64, r: u64) -> Self {
        CmConfig {
            state: state.into(),
            l,
            r,
        }
    }
}

impl TwoCounterMachine {
    pub fn validate(&self) -> Result<(), CmError> {
        let mut seen = HashSet::new();
        for q in &self.states {
            if q == "0" || q == "1" || q == END {
                return Err(CmError::Reserved(q.clone()));
            }
            if !seen.insert(q) {
                return Err(CmError::DuplicateState(q.clone()));
            }
        }
        for q in [&self.start, &self.halt] {
            if !seen.contains(q) {
                return Err(CmError::UnknownState(q.clone()));
            }
        }
        let mut keys = HashSet::new();
        for r in &self.rules {
            for q in [&r.state, &r.next] {
                if !seen.contains(q) {
                    return Err(CmError::UnknownState(q.clone()));
                }
            }
            if r.state == self.halt {
                return Err(CmError::HaltHasRules(r.state.clone()));
            }
            if !keys.insert((&r.state, r.lz, r.rz)) {
                return Err(CmError::Nondeterministic {
                    q: r.state.clone(),
                    lz: r.lz,
                    rz: r.rz,
                });
            }
            let bad = |d: i8, z: bool| !(-1..=1).contains(&d) || (z && d < 0);
            if bad(r.dl, r.lz) || bad(r.dr, r.rz) {
                return Err(CmError::BadDelta {
                    q: r.state.clone(),
                    lz: r.lz,
                    rz: r.rz,
                });
            }
        }
        Ok(())
    }

    pub fn rule_for(&self, state: &str, lz: bool, rz: bool) -> Option<&CmRule> {
        self.rules
            .iter()
            .find(|r| r.state == state && r.lz == lz && r.rz == rz)
    }

    pub fn step(&self, c: &CmConfig) -> Option<CmConfig> {
        let r = self.rule_for(&c.state, c.l == 0, c.r == 0)?;
        Some(CmConfig {
            state: r.next.clone(),
            l: c.l.checked_add_signed(r.dl as i64)?,
            r: c.r.checked_add_signed(r.dr as i64)?,
        })
    }

    /// Configurations from `(start, 0, 0)` until the halting state, a missing
    /// rule, or `max_steps` steps.
    pub fn run(&self, max_steps: usize) -> Vec<CmConfig> {
        let mut out = vec![CmConfig::new(&self.start, 0, 0)];
        while out.len() <= max_steps {
            let cur = out.last().expect("nonempty");
            if cur.state == self.halt {
                break;
            }
            match self.step(cur) {
                Some(n) => out.push(n),
                None => break,
            }
        }
        out
    }

    /// The accepting computation, if the machine halts within `max_steps`.
    pub fn accepting_run(&self, max_steps: usize) -> Option<Vec<CmConfig>> {
        let run = self.run(max_steps);
        (run.last()?.state == self.halt).then_some(run)
    }
}

/// `0^{l₀}1^{r₀}q₀ … 0^{l_m}1^{r_m}q_m #`.
pub fn encode_configs(configs: &[CmConfig]) -> Vec<String> {
    let mut w = Vec::new();
    for c in configs {
        w.extend(std::iter::repeat_n("0".to_string(), c.l as usize));
        w.extend(std::iter::repeat_n("1".to_string(), c.r as usize));
        w.push(c.state.clone());
    }
    w.push(END.into());
    w
}

/// The first `steps` steps of the run as a word.
pub fn encode_computation(m: &TwoCounterMachine, steps: usize) -> Result<Vec<String>, CmError> {
    m.validate()?;
    let run = m.run(steps);
    if run.len() != steps + 1 {
        return Err(CmError::RunTooShort(run.len() - 1));
    }
    Ok(encode_configs(&run))
}

/// Splits a word into configurations; only the shape `(0*1*q)+ #` is checked.
pub fn parse_computation<S: AsRef<str>>(m: &TwoCounterMachine, word: &[S]) -> Result<Vec<CmConfig>, CmError> {
    let bad = |s: &str| Err(CmError::Formal(s.into()));
    let (last, body) = match word.split_last() {
        Some(x) => x,
        None => return bad("empty word"),
    };
    if last.as_ref() != END {
        return bad("missing end marker");
    }
    let mut configs = Vec::new();
    let (mut l, mut r) = (0u64, 0u64);
    for s in body {
        match s.as_ref() {
            "0" if r > 0 => return bad("0 after 1 inside a block"),
            "0" => l += 1,
            "1" => r += 1,
            END => return bad("end marker before the end"),
            q if m.states.iter().any(|x| x == q) => {
                configs.push(CmConfig::new(q, l, r));
                l = 0;
                r = 0;
            }
            _ => return bad("unknown symbol"),
        }
    }
    if l > 0 || r > 0 {
        return bad("counter block without a state");
    }
    if configs.is_empty() {
        return bad("no configuration");
    }
    Ok(configs)
}

/// Format, `l₀ = r₀ = 0`, start and halting state, and that each step follows a
/// rule selected by the zero tests. Counter values are not compared.
pub fn formal_check<S: AsRef<str>>(m: &TwoCounterMachine, word: &[S]) -> Result<Vec<CmConfig>, CmError> {
    let configs = parse_computation(m, word)?;
    let first = &configs[0];
    if first.l != 0 || first.r != 0 {
        return Err(CmError::Formal("counters do not start at 0".into()));
    }
    if first.state != m.start {
        return Err(CmError::Formal("wrong start state".into()));
    }
    if configs.last().expect("nonempty").state != m.halt {
        return Err(CmError::Formal("does not end in the halting state".into()));
    }
    for w in configs.windows(2) {
        match m.rule_for(&w[0].state, w[0].l == 0, w[0].r == 0) {
            Some(rule) if rule.next == w[1].state => {}
            _ => {
                return Err(CmError::Formal(format!(
                    "no rule leads from {} to {}",
                    w[0].state, w[1].state
                )))
            }
        }
    }
    Ok(configs)
}

/// Whether consecutive counter values differ by the rule's increments.
pub fn counters_consistent(m: &TwoCounterMachine, configs: &[CmConfig]) -> bool {
    configs.windows(2).all(|w| m.step(&w[0]).as_ref() == Some(&w[1]))
}

/// `G` is the modulus for `i − j`, `K` the number of INCORRECT rounds before rejection.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckerParams {
    pub g: u32,
    pub k: u32,
}

impl Default for CheckerParams {
    fn default() -> Self {
        CheckerParams { g: 12, k: 10 }
    }
}

impl CheckerParams {
    pub fn validate(&self) -> Result<(), CmError> {
        if self.g < 2 || self.k < 1 {
            return Err(CmError::BadParams);
        }
        Ok(())
    }

    /// `2^{G−1}`, the advantage of Different over Same when `i ≠ j`.
    pub fn advantage(&self) -> Rational {
        pow2(self.g as i64 - 1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Same,
    Different,
    Undecided,
    Rejected,
}

const OUTCOMES: [Outcome; 4] = [
    Outcome::Same,
    Outcome::Different,
    Outcome::Undecided,
    Outcome::Rejected,
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutcomeProbs {
    pub same: Rational,
    pub different: Rational,
    pub undecided: Rational,
    pub rejected: Rational,
}

impl OutcomeProbs {
    fn zero() -> Self {
        OutcomeProbs {
            same: Rational::zero(),
            different: Rational::zero(),
            undecided: Rational::zero(),
            rejected: Rational::zero(),
        }
    }

    fn add(&mut self, o: Outcome, p: &Rational) {
        *match o {
            Outcome::Same => &mut self.same,
            Outcome::Different => &mut self.different,
            Outcome::Undecided => &mut self.undecided,
            Outcome::Rejected => &mut self.rejected,
        } += p;
    }

    pub fn total(&self) -> Rational {
        &self.same + &self.different + &self.undecided + &self.rejected
    }
}

// Coin flags: bit 0 red, 1 orange (player D), 2 blue, 3 green (player S).
const RED: u8 = 1;
const ORANGE: u8 = 2;
const BLUE: u8 = 4;
const GREEN: u8 = 8;
const ALL_LUCKY: u8 = 15;
const A_COINS: [u8; 4] = [RED, RED, BLUE, GREEN];
const B_COINS: [u8; 4] = [ORANGE, ORANGE, BLUE, GREEN];

fn classify(diff_zero: bool, flags: u8) -> Outcome {
    if !diff_zero {
        return Outcome::Different;
    }
    let d = flags & (RED | ORANGE) != 0;
    let s = flags & (BLUE | GREEN) != 0;
    match (d, s) {
        (true, false) => Outcome::Different,
        (false, true) => Outcome::Same,
        _ => Outcome::Undecided,
    }
}

/// Flips `coin`: a lucky coin stays lucky with probability 1/2.
fn flip(dist: Vec<(u8, Rational)>, coin: u8) -> Vec<(u8, Rational)> {
    let half = rat(1, 2);
    let mut out: Vec<(u8, Rational)> = Vec::new();
    let mut push = |f: u8, p: Rational| match out.iter_mut().find(|(g, _)| *g == f) {
        Some((_, q)) => *q += p,
        None => out.push((f, p)),
    };
    for (f, p) in dist {
        if f & coin != 0 {
            push(f, &p * &half);
            push(f & !coin, p * &half);
        } else {
            push(f, p);
        }
    }
    out
}

/// Luck-level oracle: coin `c` flipped `n` times is lucky with probability
/// `2^{−n}`, independently; the 16 luck patterns are enumerated.
pub fn coin_oracle(i: u64, j: u64, g: u32) -> OutcomeProbs {
    let flips = [(RED, 2 * i), (ORANGE, 2 * j), (BLUE, i + j), (GREEN, i + j)];
    let same_mod = (i as i128 - j as i128).rem_euclid(g as i128) == 0;
    let mut res = OutcomeProbs::zero();
    for pattern in 0u8..16 {
        let mut p = Rational::one();
        for (c, n) in flips {
            let lucky = pow2(-(n as i64));
            p *= if pattern & c != 0 {
                lucky
            } else {
                Rational::one() - lucky
            };
        }
        res.add(classify(same_mod, pattern), &p);
    }
    res
}

/// Every individual coin outcome, `2^{4(i+j)}` cases; small `i + j` only.
pub fn coin_bruteforce(i: u64, j: u64, g: u32) -> OutcomeProbs {
    let n = 4 * (i + j);
    assert!(n <= 24, "too many coin outcomes");
    let coins: Vec<u8> = std::iter::repeat_n(A_COINS, i as usize)
        .chain(std::iter::repeat_n(B_COINS, j as usize))
        .flatten()
        .collect();
    let same_mod = (i as i128 - j as i128).rem_euclid(g as i128) == 0;
    let mut counts = [0u64; 4];
    for heads in 0u64..(1 << n) {
        let mut flags = ALL_LUCKY;
        for (b, c) in coins.iter().enumerate() {
            if heads >> b & 1 == 0 {
                flags &= !c;
            }
        }
        let o = classify(same_mod, flags);
        counts[OUTCOMES.iter().position(|x| *x == o).expect("listed")] += 1;
    }
    let total = Rational::from_integer(BigInt::one() << n);
    let p = |c: u64| Rational::from_integer(BigInt::from(c)) / &total;
    OutcomeProbs {
        same: p(counts[0]),
        different: p(counts[1]),
        undecided: p(counts[2]),
        rejected: p(counts[3]),
    }
}

/// Class of each automaton state: `None` while reading, `Some` once decided.
pub type StateClass = Option<Outcome>;

/// The Equality Checker on `a^i b^j #`, as an explicit automaton.
#[derive(Clone, Debug)]
pub struct EqualityChecker {
    pub params: CheckerParams,
    pub pfa: Pfa,
    pub classes: Vec<StateClass>,
}

fn sparse_matrix(n: usize, rows: impl Fn(usize) -> Vec<(usize, Rational)>) -> RatMatrix {
    let mut m = RatMatrix::zeros(n, n);
    for i in 0..n {
        for (j, p) in rows(i) {
            let cur = m.get(i, j).clone();
            m.set(i, j, cur + p);
        }
    }
    m
}

fn outcome_class_probs(dist: &RatVector, classes: &[StateClass]) -> OutcomeProbs {
    let mut res = OutcomeProbs::zero();
    for (p, c) in dist.iter().zip(classes) {
        if let Some(o) = c {
            res.add(*o, p);
        }
    }
    res
}

/// Live state: phase (0 reading `a`, 1 reading `b`), `i − j mod G`, luck flags.
#[derive(Clone, Copy)]
struct Live {
    phase: usize,
    d: usize,
    flags: u8,
}

impl Live {
    fn index(&self, g: usize) -> usize {
        (self.phase * g + self.d) * 16 + self.flags as usize
    }

    fn from_index(x: usize, g: usize) -> Live {
        Live {
            phase: x / 16 / g,
            d: x / 16 % g,
            flags: (x % 16) as u8,
        }
    }

    /// Deterministic part of reading `a` or `b`; `None` for an `a` after a `b`.
    fn read(self, sym: char, g: usize) -> Option<Live> {
        match (sym, self.phase) {
            ('a', 0) => Some(Live {
                d: (self.d + 1) % g,
                ..self
            }),
            ('a', _) => None,
            (_, _) => Some(Live {
                phase: 1,
                d: (self.d + g - 1) % g,
                ..self
            }),
        }
    }
}

impl EqualityChecker {
    /// `32G + 4` states: both phases, every residue and every flag pattern,
    /// then Same, Different, Undecided, Rejected.
    pub fn new(params: CheckerParams) -> Result<Self, CmError> {
        params.validate()?;
        let g = params.g as usize;
        let live = 32 * g;
        let n = live + 4;
        let out_index = |o: Outcome| live + OUTCOMES.iter().position(|x| *x == o).expect("listed");
        let rej = out_index(Outcome::Rejected);
        let matrix = |sym: char| {
            sparse_matrix(n, |s| {
                if s >= live {
                    return vec![(rej, Rational::one())];
                }
                let st = Live::from_index(s, g);
                if sym == '#' {
                    return vec![(out_index(classify(st.d == 0, st.flags)), Rational::one())];
                }
                let Some(next) = st.read(sym, g) else {
                    return vec![(rej, Rational::one())];
                };
                let coins = if sym == 'a' { A_COINS } else { B_COINS };
                let dist = coins
                    .iter()
                    .fold(vec![(next.flags, Rational::one())], |d, c| flip(d, *c));
                dist.into_iter()
                    .map(|(f, p)| (Live { flags: f, ..next }.index(g), p))
                    .collect()
            })
        };
        let matrices = vec![matrix('a'), matrix('b'), matrix('#')];
        let start = Live {
            phase: 0,
            d: 0,
            flags: ALL_LUCKY,
        }
        .index(g);
        let classes = (0..n).map(|s| (s >= live).then(|| OUTCOMES[s - live])).collect();
        let pfa = Pfa::new(
            vec!["a".into(), "b".into(), END.into()],
            matrices,
            RatVector::unit(n, start),
            RatVector::unit(n, out_index(Outcome::Same)),
            Rational::zero(),
            Mode::Strict,
        )?;
        Ok(EqualityChecker { params, pfa, classes })
    }

    pub fn state_count(&self) -> usize {
        self.pfa.dim()
    }

    pub fn word(i: u64, j: u64) -> Vec<String> {
        let mut w: Vec<String> = std::iter::repeat_n("a".to_string(), i as usize).collect();
        w.extend(std::iter::repeat_n("b".to_string(), j as usize));
        w.push(END.into());
        w
    }

    pub fn outcome_probs_word<S: AsRef<str>>(&self, word: &[S]) -> Result<OutcomeProbs, CmError> {
        let idx = self.pfa.indices(word)?;
        Ok(outcome_class_probs(&self.pfa.distribution(&idx)?, &self.classes))
    }

    pub fn outcome_probs(&self, i: u64, j: u64) -> OutcomeProbs {
        self.outcome_probs_word(&Self::word(i, j))
            .expect("well-formed word")
    }

    /// Outcome probabilities for every `(i, j)` with `i + j ≤ max_sum`,
    /// sharing the `a^i` prefixes.
    pub fn outcome_table(&self, max_sum: u64) -> Vec<((u64, u64), OutcomeProbs)> {
        let m = |s: &str| self.pfa.matrix(s).expect("symbol");
        let mut res = Vec::new();
        let mut va = self.pfa.pi().clone();
        for i in 0..=max_sum {
            let mut vb = va.clone();
            for j in 0..=max_sum - i {
                let end = vb.mul_mat(m(END)).expect("dims");
                res.push(((i, j), outcome_class_probs(&end, &self.classes)));
                vb = vb.mul_mat(m("b")).expect("dims");
            }
            va = va.mul_mat(m("a")).expect("dims");
        }
        res
    }
}

/// The checker with at most one coin per symbol: each `a`/`b` is followed by
/// three padding symbols `z` that flip the remaining coins, so every matrix
/// entry is 0, 1/2 or 1.
#[derive(Clone, Debug)]
pub struct PaddedChecker {
    pub pfa: Pfa,
    pub classes: Vec<StateClass>,
}

pub const PAD: &str = "z";

impl PaddedChecker {
    /// `7·32G + 4` states: a live state paired with "idle" or one of the
    /// pending stages `a1..a3`, `b1..b3`.
    pub fn new(params: CheckerParams) -> Result<Self, CmError> {
        params.validate()?;
        let g = params.g as usize;
        let live = 32 * g * 7;
        let n = live + 4;
        let out_index = |o: Outcome| live + OUTCOMES.iter().position(|x| *x == o).expect("listed");
        let rej = out_index(Outcome::Rejected);
        let half = rat(1, 2);
        // Flip one coin and land in `slot`.
        let flip_to = |st: Live, coin: u8, slot: usize| -> Vec<(usize, Rational)> {
            flip(vec![(st.flags, Rational::one())], coin)
                .into_iter()
                .map(|(f, p)| (Live { flags: f, ..st }.index(g) * 7 + slot, p))
                .collect()
        };
        let matrix = |sym: &str| {
            sparse_matrix(n, |s| {
                if s >= live {
                    return vec![(rej, Rational::one())];
                }
                let (st, slot) = (Live::from_index(s / 7, g), s % 7);
                match (sym, slot) {
                    ("#", 0) => vec![(out_index(classify(st.d == 0, st.flags)), Rational::one())],
                    ("a" | "b", 0) => {
                        let c = sym.chars().next().expect("one char");
                        match st.read(c, g) {
                            Some(next) => {
                                let (coins, base) = if c == 'a' { (A_COINS, 1) } else { (B_COINS, 4) };
                                flip_to(next, coins[0], base)
                            }
                            None => vec![(rej, Rational::one())],
                        }
                    }
                    (PAD, 1..=6) => {
                        let (coins, stage) = if slot <= 3 {
                            (A_COINS, slot)
                        } else {
                            (B_COINS, slot - 3)
                        };
                        let next_slot = if stage == 3 { 0 } else { slot + 1 };
                        flip_to(st, coins[stage], next_slot)
                    }
                    _ => vec![(rej, Rational::one())],
                }
            })
        };
        let alphabet = ["a", "b", END, PAD];
        let matrices: Vec<RatMatrix> = alphabet.iter().map(|s| matrix(s)).collect();
        debug_assert!(matrices.iter().all(|m| m
            .entries()
            .iter()
            .all(|x| x.is_zero() || x.is_one() || *x == half)));
        let start = Live {
            phase: 0,
            d: 0,
            flags: ALL_LUCKY,
        }
        .index(g)
            * 7;
        let classes = (0..n).map(|s| (s >= live).then(|| OUTCOMES[s - live])).collect();
        let pfa = Pfa::new(
            alphabet.iter().map(|s| s.to_string()).collect(),
            matrices,
            RatVector::unit(n, start),
            RatVector::unit(n, out_index(Outcome::Same)),
            Rational::zero(),
            Mode::Strict,
        )?;
        Ok(PaddedChecker { pfa, classes })
    }

    /// `a ↦ a z z z`, `b ↦ b z z z`, `# ↦ #`.
    pub fn pad_word<S: AsRef<str>>(word: &[S]) -> Vec<String> {
        word.iter()
            .flat_map(|s| {
                let s = s.as_ref().to_string();
                let pad = if s == END { 0 } else { 3 };
                std::iter::once(s).chain(std::iter::repeat_n(PAD.to_string(), pad))
            })
            .collect()
    }

    pub fn outcome_probs_word<S: AsRef<str>>(&self, word: &[S]) -> Result<OutcomeProbs, CmError> {
        let idx = self.pfa.indices(word)?;
        Ok(outcome_class_probs(&self.pfa.distribution(&idx)?, &self.classes))
    }
}

/// `¼(1−4^{−i}) + ¼(1−4^{−j}) + ½·2^{−(i+j)} = ½ − ¼(2^{−i} − 2^{−j})²`.
pub fn equality_by_coins(i: u64, j: u64) -> Rational {
    let q = rat(1, 4);
    &q * (Rational::one() - pow2(-2 * i as i64))
        + &q * (Rational::one() - pow2(-2 * j as i64))
        + rat(1, 2) * pow2(-((i + j) as i64))
}

pub fn equality_by_coins_closed(i: u64, j: u64) -> Rational {
    let d = pow2(-(i as i64)) - pow2(-(j as i64));
    rat(1, 2) - rat(1, 4) * &d * &d
}

/// Reads `a^i b^j #` flipping the red (twice per `a`), orange (twice per
/// `b`) and blue coin (once per symbol); on `#` it accepts with
/// probability ¼ if red is unlucky, ¼ if orange is unlucky, ½ if blue is lucky.
/// 18 states: two phases × eight flag patterns, accept, reject.
pub fn coin_equality_pfa() -> Pfa {
    let live = 16;
    let (acc, rej) = (16, 17);
    let idx = |phase: usize, f: u8| phase * 8 + f as usize;
    let coins = |sym: char| {
        if sym == 'a' {
            [RED, RED, BLUE]
        } else {
            [ORANGE, ORANGE, BLUE]
        }
    };
    let matrix = |sym: char| {
        sparse_matrix(18, |s| {
            if s >= live {
                return vec![(rej, Rational::one())];
            }
            let (phase, f) = (s / 8, (s % 8) as u8);
            if sym == '#' {
                let mut p = Rational::zero();
                if f & RED == 0 {
                    p += rat(1, 4);
                }
                if f & ORANGE == 0 {
                    p += rat(1, 4);
                }
                if f & BLUE != 0 {
                    p += rat(1, 2);
                }
                return vec![(acc, p.clone()), (rej, Rational::one() - p)];
            }
            if sym == 'a' && phase == 1 {
                return vec![(rej, Rational::one())];
            }
            let next_phase = if sym == 'b' { 1 } else { phase };
            coins(sym)
                .iter()
                .fold(vec![(f, Rational::one())], |d, c| flip(d, *c))
                .into_iter()
                .map(|(g, p)| (idx(next_phase, g), p))
                .collect()
        })
    };
    Pfa::new(
        vec!["a".into(), "b".into(), END.into()],
        vec![matrix('a'), matrix('b'), matrix('#')],
        RatVector::unit(18, idx(0, RED | ORANGE | BLUE)),
        RatVector::unit(18, acc),
        rat(1, 2),
        Mode::Weak,
    )
    .expect("stochastic by construction")
}

/// Probabilities of one Correctness Test round.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundProbs {
    pub correct: Rational,
    pub incorrect: Rational,
}

impl RoundProbs {
    pub fn null(&self) -> Rational {
        Rational::one() - &self.correct - &self.incorrect
    }
}

/// Block lengths handed to the checkers, two per step. The state symbol that
/// ends a block counts as one more `a` (resp. `b`), so an empty counter still
/// flips every coin; an increment adds a further `a` and a decrement a further
/// `b`. The pair is equal exactly when the step is consistent.
pub fn checker_lengths(m: &TwoCounterMachine, configs: &[CmConfig]) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    for w in configs.windows(2) {
        let (dl, dr) = m
            .rule_for(&w[0].state, w[0].l == 0, w[0].r == 0)
            .map_or((0, 0), |r| (r.dl, r.dr));
        for (x, y, d) in [(w[0].l, w[1].l, dl), (w[0].r, w[1].r, dr)] {
            out.push((x + 1 + (d > 0) as u64, y + 1 + (d < 0) as u64));
        }
    }
    out
}

/// CORRECT when every checker says Same, INCORRECT when every one says
/// Different. A word failing the formal checks is an error (the automaton
/// rejects it). A computation without steps has no checkers and counts as CORRECT.
pub fn correctness_test_probs<S: AsRef<str>>(
    m: &TwoCounterMachine,
    word: &[S],
    params: CheckerParams,
) -> Result<RoundProbs, CmError> {
    params.validate()?;
    let configs = formal_check(m, word)?;
    let lens = checker_lengths(m, &configs);
    if lens.is_empty() {
        return Ok(RoundProbs {
            correct: Rational::one(),
            incorrect: Rational::zero(),
        });
    }
    let (mut c, mut d) = (Rational::one(), Rational::one());
    for (i, j) in lens {
        let p = coin_oracle(i, j, params.g);
        c *= p.same;
        d *= p.different;
    }
    Ok(RoundProbs {
        correct: c,
        incorrect: d,
    })
}

/// Probability that some round says CORRECT before `k` rounds said
/// INCORRECT, within `t` independent rounds. Exact, `O(t·k)` steps.
pub fn aggregate_accept_prob(r: &RoundProbs, t: u64, k: u32) -> Rational {
    let null = r.null();
    let mut alive = vec![Rational::zero(); k as usize];
    alive[0] = Rational::one();
    let mut acc = Rational::zero();
    for _ in 0..t {
        let total: Rational = alive.iter().sum();
        if total.is_zero() {
            break;
        }
        acc += total * &r.correct;
        let mut next = vec![Rational::zero(); k as usize];
        for (i, p) in alive.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            next[i] += p * &null;
            if i + 1 < k as usize {
                next[i + 1] += p * &r.incorrect;
            }
        }
        alive = next;
    }
    acc
}

/// `t → ∞`: `1 − (d/(c+d))^K`.
pub fn limit_accept_prob(r: &RoundProbs, k: u32) -> Rational {
    let s = &r.correct + &r.incorrect;
    if s.is_zero() {
        return Rational::zero();
    }
    Rational::one() - powu(&(&r.incorrect / s), k as u64)
}

/// `1 − (d/(c+d))^K − 1/(1 + c·t)`, a lower bound on the acceptance
/// probability after `t` rounds, using `(1−c)^t ≤ e^{−ct} ≤ 1/(1+ct)`.
/// Needs no power of `1 − c`, so huge `t` are fine.
pub fn accept_lower_bound(r: &RoundProbs, t: &BigInt, k: u32) -> Rational {
    let miss = Rational::one() / (Rational::one() + &r.correct * Rational::from_integer(t.clone()));
    let b = limit_accept_prob(r, k) - miss;
    if b < Rational::zero() {
        Rational::zero()
    } else {
        b
    }
}

/// Smallest `t` with `1/(1 + c·t) ≤ slack`.
pub fn rounds_needed(r: &RoundProbs, slack: &Rational) -> Option<BigInt> {
    if r.correct.is_zero() || *slack <= Rational::zero() {
        return None;
    }
    let need = (Rational::one() / slack - Rational::one()) / &r.correct;
    Some(need.ceil().to_integer().max(BigInt::zero()))
}

/// Probability that more than half of `copies` independent runs accept.
pub fn majority_vote(p: &Rational, copies: u32) -> Rational {
    let q = Rational::one() - p;
    ((copies / 2 + 1)..=copies)
        .map(|i| {
            let c = num_integer::binomial(BigInt::from(copies), BigInt::from(i));
            Rational::from_integer(c) * powu(p, i as u64) * powu(&q, (copies - i) as u64)
        })
        .sum()
}

/// Rejection bound for a machine without accepting computation: `(1 − 1/(2^{G−1}+1))^K`.
pub fn fake_reject_bound(params: CheckerParams) -> Rational {
    let a = params.advantage();
    powu(
        &(Rational::one() - Rational::one() / (a + int(1))),
        params.k as u64,
    )
}

pub mod machines {
    use super::*;

    fn rule(state: &str, lz: bool, rz: bool, dl: i8, dr: i8, next: &str) -> CmRule {
        CmRule {
            state: state.into(),
            lz,
            rz,
            dl,
            dr,
            next: next.into(),
        }
    }

    fn machine(states: &[&str], rules: Vec<CmRule>) -> TwoCounterMachine {
        TwoCounterMachine {
            states: states.iter().map(|s| s.to_string()).collect(),
            start: states[0].into(),
            halt: states[states.len() - 1].into(),
            rules,
        }
    }

    /// Starts in its halting state.
    pub fn halt_at_once() -> TwoCounterMachine {
        machine(&["h"], vec![])
    }

    /// Increments `l`, then halts.
    pub fn inc_then_halt() -> TwoCounterMachine {
        machine(&["q0", "q1"], vec![rule("q0", true, true, 1, 0, "q1")])
    }

    /// Increments `l`, decrements it again, halts: two steps.
    pub fn up_down() -> TwoCounterMachine {
        machine(
            &["q0", "q1", "h"],
            vec![
                rule("q0", true, true, 1, 0, "q1"),
                rule("q1", false, true, -1, 0, "h"),
            ],
        )
    }

    /// Counts `l` to 3 while raising `r`, then drains `l`.
    pub fn count_and_drain() -> TwoCounterMachine {
        let mut rules = Vec::new();
        for (a, b) in [("q0", "q1"), ("q1", "q2"), ("q2", "q3")] {
            for (lz, rz) in [(true, true), (false, false)] {
                rules.push(rule(a, lz, rz, 1, 1, b));
            }
        }
        rules.push(rule("q3", false, false, -1, 0, "q3"));
        rules.push(rule("q3", true, false, 0, 0, "h"));
        machine(&["q0", "q1", "q2", "q3", "h"], rules)
    }

    /// Increments `l` forever.
    pub fn runaway() -> TwoCounterMachine {
        machine(
            &["q0", "h"],
            vec![
                rule("q0", true, true, 1, 0, "q0"),
                rule("q0", false, true, 1, 0, "q0"),
            ],
        )
    }
}

#[cfg(test)]
mod tests {
    use super::machines::*;
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn encodings() {
        assert_eq!(encode_computation(&halt_at_once(), 0).unwrap(), vec!["h", "#"]);
        assert_eq!(
            encode_computation(&inc_then_halt(), 1).unwrap(),
            vec!["q0", "0", "q1", "#"]
        );
        assert_eq!(
            encode_computation(&inc_then_halt(), 2),
            Err(CmError::RunTooShort(1))
        );
        let run = count_and_drain().accepting_run(20).unwrap();
        assert_eq!(run.len(), 8);
        assert_eq!(run[3], CmConfig::new("q3", 3, 3));
        assert!(runaway().accepting_run(50).is_none());
    }

    #[test]
    fn bad_machines() {
        let mut m = up_down();
        m.rules[1].lz = true;
        assert!(matches!(m.validate(), Err(CmError::BadDelta { .. })));
        let mut m = up_down();
        m.rules.push(m.rules[0].clone());
        assert!(matches!(m.validate(), Err(CmError::Nondeterministic { .. })));
        let mut m = up_down();
        m.states.push("#".into());
        assert!(matches!(m.validate(), Err(CmError::Reserved(_))));
    }

    #[test]
    fn json_round_trip() {
        let m = count_and_drain();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(serde_json::from_str::<TwoCounterMachine>(&s).unwrap(), m);
    }

    fn mutate(rng: &mut ChaCha8Rng, w: &[String], states: &[String]) -> Vec<String> {
        let mut w = w.to_vec();
        let syms: Vec<String> = ["0", "1", "#"]
            .iter()
            .map(|s| s.to_string())
            .chain(states.iter().cloned())
            .collect();
        for _ in 0..rng.gen_range(1..=2) {
            let pos = rng.gen_range(0..=w.len());
            match rng.gen_range(0..3) {
                0 if pos < w.len() => {
                    w.remove(pos);
                }
                1 => w.insert(pos, syms[rng.gen_range(0..syms.len())].clone()),
                _ if pos < w.len() => w[pos] = syms[rng.gen_range(0..syms.len())].clone(),
                _ => {}
            }
        }
        w
    }

    #[test]
    fn formal_checks_plus_counters_accept_exactly_the_run() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for m in [up_down(), count_and_drain(), inc_then_halt()] {
            let run = m.accepting_run(50).unwrap();
            let good = encode_configs(&run);
            assert_eq!(formal_check(&m, &good).unwrap(), run);
            for _ in 0..300 {
                let w = mutate(&mut rng, &good, &m.states);
                let ok = formal_check(&m, &w).is_ok_and(|c| counters_consistent(&m, &c));
                assert_eq!(ok, w == good, "{w:?}");
            }
        }
    }

    #[test]
    fn checker_matches_oracles() {
        let ec = EqualityChecker::new(CheckerParams { g: 4, k: 1 }).unwrap();
        assert_eq!(ec.state_count(), 132);
        for ((i, j), p) in ec.outcome_table(8) {
            assert_eq!(p, coin_oracle(i, j, 4), "({i},{j})");
            assert_eq!(p.total(), Rational::one());
            if i + j <= 4 {
                assert_eq!(p, coin_bruteforce(i, j, 4));
            }
        }
    }

    #[test]
    fn checker_rejects_bad_format() {
        let ec = EqualityChecker::new(CheckerParams::default()).unwrap();
        assert_eq!(ec.state_count(), 388);
        for w in [vec!["b", "a", "#"], vec!["a", "#", "a"], vec!["a", "b"]] {
            let p = ec.outcome_probs_word(&w).unwrap();
            let expected = if w.last() == Some(&"b") {
                Rational::zero()
            } else {
                Rational::one()
            };
            assert_eq!(p.rejected, expected, "{w:?}");
        }
    }

    #[test]
    fn lemma_ec_outcome() {
        for g in [4u32, 8, 12] {
            let params = CheckerParams { g, k: 1 };
            for s in 0..=14u64 {
                for i in 0..=s {
                    let p = coin_oracle(i, s - i, g);
                    if 2 * i == s {
                        assert_eq!(p.same, p.different);
                    } else {
                        assert!(
                            p.different >= params.advantage() * &p.same,
                            "g={g} i={i} j={}",
                            s - i
                        );
                    }
                }
            }
        }
        let p = coin_oracle(0, 12, 12);
        assert!(p.same.is_zero());
        assert_eq!(p.different, Rational::one() - pow2(-12) * (int(2) - pow2(-12)));
    }

    #[test]
    fn padded_checker_agrees() {
        let params = CheckerParams { g: 3, k: 1 };
        let ec = EqualityChecker::new(params).unwrap();
        let pc = PaddedChecker::new(params).unwrap();
        for m in pc.pfa.matrices() {
            assert!(m
                .entries()
                .iter()
                .all(|x| x.is_zero() || x.is_one() || *x == rat(1, 2)));
        }
        for (i, j) in [(0, 0), (1, 1), (2, 1), (1, 4), (3, 3)] {
            let w = EqualityChecker::word(i, j);
            assert_eq!(
                pc.outcome_probs_word(&PaddedChecker::pad_word(&w)).unwrap(),
                ec.outcome_probs(i, j)
            );
        }
        let p = pc.outcome_probs_word(&["a", "z", "#"]).unwrap();
        assert_eq!(p.rejected, Rational::one());
    }

    #[test]
    fn coins_identity() {
        let pfa = coin_equality_pfa();
        for i in 0..=10 {
            for j in 0..=10 {
                let x = equality_by_coins(i, j);
                assert_eq!(x, equality_by_coins_closed(i, j));
                assert_eq!(pfa.accept_prob(&EqualityChecker::word(i, j)).unwrap(), x);
                assert_eq!(x == rat(1, 2), i == j);
            }
        }
    }

    #[test]
    fn correctness_test_fair_and_fake() {
        let params = CheckerParams::default();
        let m = up_down();
        let run = m.accepting_run(10).unwrap();
        let good = encode_configs(&run);
        let r = correctness_test_probs(&m, &good, params).unwrap();
        assert_eq!(r.correct, r.incorrect);
        assert!(r.correct > Rational::zero());
        // l jumps to 3 (off by two, Same impossible) or 13 (off by G).
        for l in [3, 13] {
            let fake = encode_configs(&[
                CmConfig::new("q0", 0, 0),
                CmConfig::new("q1", l, 0),
                CmConfig::new("h", 0, 0),
            ]);
            let f = correctness_test_probs(&m, &fake, params).unwrap();
            assert!(f.incorrect >= params.advantage() * &f.correct);
            assert_eq!(f.correct.is_zero(), l == 3);
        }
        assert_eq!(params.advantage(), int(2048));
        assert!(matches!(
            correctness_test_probs(&m, &["q0", "h", "#"], params),
            Err(CmError::Formal(_))
        ));
    }

    #[test]
    fn aggregation() {
        let params = CheckerParams::default();
        let fair = RoundProbs {
            correct: rat(1, 8),
            incorrect: rat(1, 8),
        };
        assert!(aggregate_accept_prob(&fair, 0, params.k).is_zero());
        let lim = limit_accept_prob(&fair, params.k);
        assert_eq!(Rational::one() - &lim, pow2(-10));
        let mut prev = Rational::zero();
        for t in [1u64, 10, 100, 300] {
            let a = aggregate_accept_prob(&fair, t, params.k);
            assert!(a >= prev && a <= lim);
            assert!(a >= accept_lower_bound(&fair, &BigInt::from(t), params.k));
            prev = a;
        }
        let fake = RoundProbs {
            correct: rat(1, 4096),
            incorrect: rat(2048, 4096),
        };
        let bound = fake_reject_bound(params);
        for t in [1u64, 50, 400] {
            assert!(Rational::one() - aggregate_accept_prob(&fake, t, params.k) >= bound);
        }
        assert_eq!(majority_vote(&rat(1, 2), 3), rat(1, 2));
        assert_eq!(majority_vote(&rat(3, 4), 3), rat(27, 32));
    }
}
