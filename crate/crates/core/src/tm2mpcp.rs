//! Turing machines to MPCP word pairs, binary codes for them, and the
//! fixed-matrix pipelines where only `π` or only the output vector depends on
//! the machine input.
//!
//! Pair order of a compiled instance: starting pair, finishing pair, copying
//! pairs (tape alphabet order, then `#`), the padding pair, rule pairs in rule
//! order, erasing pairs. Pair 2 is the finishing pair, so the same list also
//! reads as a 2MPCP.

use std::collections::HashSet;

use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::binaut::BinWord;
use crate::exact::{pow2, rat, ExactError, RatMatrix, RatVector, Rational};
use crate::pcp::{BinPcp, PcpError, PcpInstance, PcpSolution, PrefixCode, SymPcp, Variant};
use crate::pcp2pfa::{
    eleven_state_matrix, eliminate_output_vector, f_hat, f_hat_11, m_infinity, nine_state_matrix,
    twelve_state_matrix, CompileError,
};
use crate::pfa::{Mode, Pfa, PfaError};

/// Separator between configurations.
pub const SEP: &str = "#";
/// Halting marker.
pub const HALT: &str = "H";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TmError {
    #[error("unknown state {0:?}")]
    UnknownState(String),
    #[error("unknown tape symbol {0:?}")]
    UnknownSymbol(String),
    #[error("name {0:?} is reserved")]
    Reserved(String),
    #[error("name {0:?} is used twice")]
    Duplicate(String),
    #[error("blank {0:?} is not in the tape alphabet")]
    BlankMissing(String),
    #[error("two rules for state {q:?} reading {s:?}")]
    Nondeterministic { q: String, s: String },
    #[error("halting rule must carry \"halt\": true")]
    BadHalt,
    #[error("code too short: {0}")]
    CodeTooShort(String),
    #[error("not a solution of the compiled instance")]
    NotASolution,
    #[error("trace mismatch: {0}")]
    Trace(String),
    #[error(transparent)]
    Pcp(#[from] PcpError),
    #[error(transparent)]
    Pfa(#[from] PfaError),
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Move {
    L,
    R,
}

impl Move {
    fn flipped(self) -> Move {
        match self {
            Move::L => Move::R,
            Move::R => Move::L,
        }
    }
}

/// Where the head starts: on the leftmost or on the rightmost input symbol.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Head {
    #[default]
    Left,
    Right,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Rule {
    Step {
        q: String,
        s: String,
        write: String,
        #[serde(rename = "move")]
        mv: Move,
        next: String,
    },
    Halt {
        q: String,
        s: String,
        halt: bool,
    },
}

impl Rule {
    pub fn step(q: &str, s: &str, write: &str, mv: Move, next: &str) -> Rule {
        Rule::Step {
            q: q.into(),
            s: s.into(),
            write: write.into(),
            mv,
            next: next.into(),
        }
    }

    pub fn halt(q: &str, s: &str) -> Rule {
        Rule::Halt {
            q: q.into(),
            s: s.into(),
            halt: true,
        }
    }

    pub fn q(&self) -> &str {
        match self {
            Rule::Step { q, .. } | Rule::Halt { q, .. } => q,
        }
    }

    pub fn s(&self) -> &str {
        match self {
            Rule::Step { s, .. } | Rule::Halt { s, .. } => s,
        }
    }

    pub fn is_left(&self) -> bool {
        matches!(self, Rule::Step { mv: Move::L, .. })
    }

    pub fn is_right(&self) -> bool {
        matches!(self, Rule::Step { mv: Move::R, .. })
    }

    pub fn is_halt(&self) -> bool {
        matches!(self, Rule::Halt { .. })
    }
}

/// A deterministic one-tape machine. A missing rule means the machine gets
/// stuck, which is not halting.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TuringMachine {
    pub states: Vec<String>,
    pub alphabet: Vec<String>,
    pub blank: String,
    pub start: String,
    pub rules: Vec<Rule>,
    #[serde(default)]
    pub head: Head,
}

/// A configuration; `head < tape.len()` always holds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Config {
    pub tape: Vec<String>,
    pub head: usize,
    pub state: String,
}

impl Config {
    /// Tape contents with the state written in front of the scanned cell.
    pub fn symbols(&self) -> Vec<String> {
        let mut out = self.tape[..self.head].to_vec();
        out.push(self.state.clone());
        out.extend_from_slice(&self.tape[self.head..]);
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Halted,
    Stuck,
    OutOfSteps,
}

#[derive(Clone, Debug)]
pub struct Run {
    /// Every configuration reached, starting with the initial one.
    pub configs: Vec<Config>,
    pub outcome: Outcome,
}

impl TuringMachine {
    pub fn validate(&self) -> Result<(), TmError> {
        let mut names = HashSet::new();
        for n in self.states.iter().chain(&self.alphabet) {
            if n == SEP || n == HALT {
                return Err(TmError::Reserved(n.clone()));
            }
            if !names.insert(n.as_str()) {
                return Err(TmError::Duplicate(n.clone()));
            }
        }
        if !self.alphabet.contains(&self.blank) {
            return Err(TmError::BlankMissing(self.blank.clone()));
        }
        self.check_state(&self.start)?;
        let mut seen = HashSet::new();
        for r in &self.rules {
            self.check_state(r.q())?;
            self.check_symbol(r.s())?;
            match r {
                Rule::Step { write, next, .. } => {
                    self.check_symbol(write)?;
                    self.check_state(next)?;
                }
                Rule::Halt { halt, .. } => {
                    if !halt {
                        return Err(TmError::BadHalt);
                    }
                }
            }
            if !seen.insert((r.q(), r.s())) {
                return Err(TmError::Nondeterministic {
                    q: r.q().into(),
                    s: r.s().into(),
                });
            }
        }
        Ok(())
    }

    fn check_state(&self, q: &str) -> Result<(), TmError> {
        if self.states.iter().any(|x| x == q) {
            Ok(())
        } else {
            Err(TmError::UnknownState(q.into()))
        }
    }

    fn check_symbol(&self, s: &str) -> Result<(), TmError> {
        if self.alphabet.iter().any(|x| x == s) {
            Ok(())
        } else {
            Err(TmError::UnknownSymbol(s.into()))
        }
    }

    pub fn rule_for(&self, q: &str, s: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| r.q() == q && r.s() == s)
    }

    pub fn left_rules(&self) -> usize {
        self.rules.iter().filter(|r| r.is_left()).count()
    }

    pub fn right_rules(&self) -> usize {
        self.rules.iter().filter(|r| r.is_right()).count()
    }

    pub fn halt_rules(&self) -> usize {
        self.rules.iter().filter(|r| r.is_halt()).count()
    }

    /// The machine and input with the head starting on the leftmost symbol.
    /// A rightmost start is turned into that by mirroring the tape.
    pub fn oriented(&self, input: &[String]) -> (TuringMachine, Vec<String>) {
        match self.head {
            Head::Left => (self.clone(), input.to_vec()),
            Head::Right => {
                let mut m = self.clone();
                m.head = Head::Left;
                for r in &mut m.rules {
                    if let Rule::Step { mv, .. } = r {
                        *mv = mv.flipped();
                    }
                }
                (m, input.iter().rev().cloned().collect())
            }
        }
    }

    pub fn initial_config(&self, input: &[String]) -> Config {
        let mut tape = input.to_vec();
        if tape.is_empty() {
            tape.push(self.blank.clone());
        }
        let head = match self.head {
            Head::Left => 0,
            Head::Right => tape.len() - 1,
        };
        Config {
            tape,
            head,
            state: self.start.clone(),
        }
    }

    /// Runs for at most `max_steps` rule applications.
    pub fn run(&self, input: &[String], max_steps: usize) -> Run {
        let mut c = self.initial_config(input);
        let mut configs = vec![c.clone()];
        for _ in 0..max_steps {
            match self.rule_for(&c.state, &c.tape[c.head]) {
                None => {
                    return Run {
                        configs,
                        outcome: Outcome::Stuck,
                    }
                }
                Some(Rule::Halt { .. }) => {
                    return Run {
                        configs,
                        outcome: Outcome::Halted,
                    }
                }
                Some(Rule::Step { write, mv, next, .. }) => {
                    c.tape[c.head] = write.clone();
                    c.state = next.clone();
                    match mv {
                        Move::R => {
                            c.head += 1;
                            if c.head == c.tape.len() {
                                c.tape.push(self.blank.clone());
                            }
                        }
                        Move::L => {
                            if c.head == 0 {
                                c.tape.insert(0, self.blank.clone());
                            } else {
                                c.head -= 1;
                            }
                        }
                    }
                    configs.push(c.clone());
                }
            }
        }
        let outcome = match self.rule_for(&c.state, &c.tape[c.head]) {
            None => Outcome::Stuck,
            Some(Rule::Halt { .. }) => Outcome::Halted,
            Some(_) => Outcome::OutOfSteps,
        };
        Run { configs, outcome }
    }
}

/// Strips blanks from both ends.
pub fn normalize(cfg: &[String], blank: &str) -> Vec<String> {
    let a = cfg.iter().position(|x| x != blank).unwrap_or(cfg.len());
    let b = cfg.iter().rposition(|x| x != blank).map_or(a, |i| i + 1);
    cfg[a..b.max(a)].to_vec()
}

fn dedup_normalized(cfgs: &[Vec<String>], blank: &str) -> Vec<Vec<String>> {
    let mut out: Vec<Vec<String>> = Vec::new();
    for c in cfgs {
        let n = normalize(c, blank);
        if out.last() != Some(&n) {
            out.push(n);
        }
    }
    out
}

/// What a word pair of a compiled instance stands for.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairKind {
    Start,
    Finish,
    Copy(String),
    Padding,
    Right(usize),
    Left {
        rule: usize,
        t: String,
    },
    Halt(usize),
    /// `(Hs, H)`.
    EraseRight(String),
    /// `(sH, H)`, or `(sH#, H#)` in uniqueness mode.
    EraseLeft(String),
    /// `(q#, q␣#)`: a state at the right end sees a blank.
    EdgeState(String),
    /// `(#qs, #q′␣s′)`: a left move off the left end.
    EdgeLeft(usize),
    /// Bit copying pair of the comma-coded variant.
    BitCopy(bool),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MpcpOptions {
    /// Drop the padding pair and add the edge pairs, making solutions unique.
    #[serde(default)]
    pub uniqueness: bool,
}

type SymPair = (Vec<String>, Vec<String>);

fn w(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|x| x.to_string()).collect()
}

/// The input-independent pairs, finishing pair first. `tm` must be oriented.
pub fn rule_pairs(tm: &TuringMachine, opts: MpcpOptions) -> Vec<(SymPair, PairKind)> {
    let b = tm.blank.as_str();
    let mut out = vec![((w(&[HALT, SEP, SEP]), w(&[SEP])), PairKind::Finish)];
    for s in &tm.alphabet {
        out.push(((w(&[s]), w(&[s])), PairKind::Copy(s.clone())));
    }
    out.push(((w(&[SEP]), w(&[SEP])), PairKind::Copy(SEP.into())));
    if !opts.uniqueness {
        out.push(((w(&[SEP]), w(&[b, SEP, b])), PairKind::Padding));
    }
    for (i, r) in tm.rules.iter().enumerate() {
        match r {
            Rule::Step {
                q,
                s,
                write,
                mv: Move::R,
                next,
            } => out.push(((w(&[q, s]), w(&[write, next])), PairKind::Right(i))),
            Rule::Step {
                q,
                s,
                write,
                mv: Move::L,
                next,
            } => {
                for t in &tm.alphabet {
                    out.push((
                        (w(&[t, q, s]), w(&[next, t, write])),
                        PairKind::Left {
                            rule: i,
                            t: t.clone(),
                        },
                    ));
                }
            }
            Rule::Halt { q, s, .. } => out.push(((w(&[q, s]), w(&[HALT])), PairKind::Halt(i))),
        }
    }
    if opts.uniqueness {
        for q in &tm.states {
            out.push(((w(&[q, SEP]), w(&[q, b, SEP])), PairKind::EdgeState(q.clone())));
        }
        for (i, r) in tm.rules.iter().enumerate() {
            if let Rule::Step {
                q,
                s,
                write,
                mv: Move::L,
                next,
            } = r
            {
                out.push((
                    (w(&[SEP, q, s]), w(&[SEP, next, b, write])),
                    PairKind::EdgeLeft(i),
                ));
            }
        }
    }
    for s in &tm.alphabet {
        out.push(((w(&[HALT, s]), w(&[HALT])), PairKind::EraseRight(s.clone())));
        if opts.uniqueness {
            out.push((
                (w(&[s, HALT, SEP]), w(&[HALT, SEP])),
                PairKind::EraseLeft(s.clone()),
            ));
        } else {
            out.push(((w(&[s, HALT]), w(&[HALT])), PairKind::EraseLeft(s.clone())));
        }
    }
    out
}

/// `(#, #␣q₀u␣#)`, or `(#, #␣q₀u#)` in uniqueness mode. `tm` must be oriented.
///
/// In uniqueness mode the leading blank keeps the first separator free: the
/// top word `#` has already consumed it, so an edge pair `(#qs, …)` could not
/// fire on the first configuration.
pub fn start_pair(tm: &TuringMachine, input: &[String], opts: MpcpOptions) -> SymPair {
    let mut bottom = vec![SEP.to_string(), tm.blank.clone()];
    bottom.push(tm.start.clone());
    bottom.extend_from_slice(input);
    if !opts.uniqueness {
        bottom.push(tm.blank.clone());
    }
    bottom.push(SEP.to_string());
    (w(&[SEP]), bottom)
}

/// `3|Γ|+3 + |Γ|·L + R + H + 1`; in uniqueness mode one less plus `|Q| + L`.
pub fn pair_count_formula(tm: &TuringMachine, opts: MpcpOptions) -> usize {
    let g = tm.alphabet.len();
    let base = 3 * g + 3 + g * tm.left_rules() + tm.right_rules() + tm.halt_rules() + 1;
    if opts.uniqueness {
        base - 1 + tm.states.len() + tm.left_rules()
    } else {
        base
    }
}

/// A compiled MPCP with pair labels, and the oriented machine and input.
#[derive(Clone, Debug, Serialize)]
pub struct TmMpcp {
    pub instance: SymPcp,
    pub kinds: Vec<PairKind>,
    pub machine: TuringMachine,
    pub input: Vec<String>,
    pub options: MpcpOptions,
}

pub fn tm_to_mpcp(tm: &TuringMachine, input: &[String], opts: MpcpOptions) -> Result<TmMpcp, TmError> {
    tm.validate()?;
    for s in input {
        tm.check_symbol(s)?;
    }
    let (m, u) = tm.oriented(input);
    let mut pairs = vec![start_pair(&m, &u, opts)];
    let mut kinds = vec![PairKind::Start];
    for (p, k) in rule_pairs(&m, opts) {
        pairs.push(p);
        kinds.push(k);
    }
    Ok(TmMpcp {
        instance: PcpInstance::new(Variant::Mpcp, pairs)?,
        kinds,
        machine: m,
        input: u,
        options: opts,
    })
}

impl TmMpcp {
    /// Configurations spelled by the lower words of a solution.
    pub fn decode(&self, sol: &PcpSolution) -> Result<Vec<Vec<String>>, TmError> {
        if !self.instance.check_solution(sol)? {
            return Err(TmError::NotASolution);
        }
        let (_, bottom) = self.instance.concatenations(sol);
        Ok(split_configs(&bottom))
    }

    /// Checks decoded configurations against a direct run of the machine:
    /// the run up to its halting configuration, the halting marker in place
    /// of the scanned cell, then one neighbour of `H` erased per step down
    /// to `H` alone. Blanks at either end and repeated configurations are
    /// ignored. Returns the number of machine steps.
    pub fn verify_trace(&self, configs: &[Vec<String>]) -> Result<usize, TmError> {
        let blank = self.machine.blank.as_str();
        let got = dedup_normalized(configs, blank);
        let limit = configs.len() + 1;
        let run = self.machine.run(&self.input, limit);
        if run.outcome != Outcome::Halted {
            return Err(TmError::Trace(format!(
                "machine did not halt within {limit} steps"
            )));
        }
        let raw: Vec<Vec<String>> = run.configs.iter().map(Config::symbols).collect();
        let want = dedup_normalized(&raw, blank);
        if got.len() < want.len() || got[..want.len()] != want[..] {
            return Err(TmError::Trace(format!(
                "run prefix differs: want {want:?}, got {got:?}"
            )));
        }
        let last = run.configs.last().expect("nonempty");
        let mut halted = last.symbols();
        halted.splice(last.head..last.head + 2, [HALT.to_string()]);
        let mut prev = normalize(&halted, blank);
        let mut rest = got[want.len()..].iter();
        match rest.next() {
            Some(c) if *c == prev => {}
            other => {
                return Err(TmError::Trace(format!(
                    "expected halting configuration {prev:?}, got {other:?}"
                )))
            }
        }
        for c in rest {
            let h = prev.iter().position(|x| x == HALT).expect("H present");
            let mut ok = false;
            for j in [h.wrapping_sub(1), h + 1] {
                if j < prev.len() {
                    let mut cand = prev.clone();
                    cand.remove(j);
                    ok |= normalize(&cand, blank) == *c;
                }
            }
            if !ok {
                return Err(TmError::Trace(format!(
                    "{c:?} is not an erasure step of {prev:?}"
                )));
            }
            prev = c.clone();
        }
        if prev != [HALT.to_string()] {
            return Err(TmError::Trace(format!("ends with {prev:?}")));
        }
        Ok(run.configs.len() - 1)
    }
}

/// Splits `#c₀#c₁#…` into the pieces `cᵢ`, dropping empty ones at the ends.
pub fn split_configs(bottom: &[String]) -> Vec<Vec<String>> {
    let mut parts: Vec<Vec<String>> = bottom.split(|x| x == SEP).map(|p| p.to_vec()).collect();
    while parts.last().is_some_and(|p| p.is_empty()) {
        parts.pop();
    }
    if parts.first().is_some_and(|p| p.is_empty()) {
        parts.remove(0);
    }
    parts
}

/// The variable-length code: states `0****` by list position, `H ≐ 01111`,
/// `␣ ≐ 100`, `# ≐ 101`, other tape symbols `110` then `111`. With
/// `positivity` the all-ones codeword is not used, so every `B(vᵢ)` of a
/// compiled instance is positive.
pub fn efficient_code(tm: &TuringMachine, positivity: bool) -> Result<PrefixCode, TmError> {
    if tm.states.len() > 15 {
        return Err(TmError::CodeTooShort(format!(
            "{} states, at most 15 fit",
            tm.states.len()
        )));
    }
    let others: Vec<&String> = tm.alphabet.iter().filter(|s| **s != tm.blank).collect();
    let spare: &[&str] = if positivity { &["110"] } else { &["110", "111"] };
    if others.len() > spare.len() {
        return Err(TmError::CodeTooShort(format!(
            "{} non-blank tape symbols, at most {} fit",
            others.len(),
            spare.len()
        )));
    }
    let mut pairs: Vec<(String, String)> = tm
        .states
        .iter()
        .enumerate()
        .map(|(i, q)| (q.clone(), format!("0{i:04b}")))
        .collect();
    pairs.push((HALT.into(), "01111".into()));
    pairs.push((tm.blank.clone(), "100".into()));
    pairs.push((SEP.into(), "101".into()));
    for (s, c) in others.iter().zip(spare) {
        pairs.push(((*s).clone(), c.to_string()));
    }
    let refs: Vec<(&str, &str)> = pairs.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    Ok(PrefixCode::from_strs(&refs)?)
}

/// Comma code `1 0^{i+1} 1` over the symbols `Γ ∪ {#} ∪ Q ∪ {H}`. No
/// codeword occurs inside a concatenation except at codeword boundaries.
pub fn comma_code(tm: &TuringMachine) -> PrefixCode {
    let symbols = tm
        .alphabet
        .iter()
        .chain([&SEP.to_string()])
        .chain(&tm.states)
        .chain([&HALT.to_string()])
        .cloned()
        .collect::<Vec<_>>();
    let pairs: Vec<(String, String)> = symbols
        .into_iter()
        .enumerate()
        .map(|(i, s)| (s, format!("1{}1", "0".repeat(i + 1))))
        .collect();
    let refs: Vec<(&str, &str)> = pairs.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    PrefixCode::from_strs(&refs).expect("comma code is prefix-free")
}

/// Binary instance under the comma code with the `|Γ|+1` copying pairs
/// replaced by the two bit copies `(0,0)` and `(1,1)`.
pub fn copy_shortcut(m: &TmMpcp) -> Result<(BinPcp, Vec<PairKind>, PrefixCode), TmError> {
    let code = comma_code(&m.machine);
    let mut pairs = Vec::new();
    let mut kinds = Vec::new();
    for ((v, w), k) in m.instance.pairs.iter().zip(&m.kinds) {
        if matches!(k, PairKind::Copy(_)) {
            continue;
        }
        pairs.push((code.encode(v)?.bits().to_vec(), code.encode(w)?.bits().to_vec()));
        kinds.push(k.clone());
        if *k == PairKind::Finish {
            for b in [false, true] {
                pairs.push((vec![b], vec![b]));
                kinds.push(PairKind::BitCopy(b));
            }
        }
    }
    Ok((PcpInstance::new(Variant::Mpcp, pairs)?, kinds, code))
}

/// Starting probabilities of the twelve-state RMPCP automaton after the
/// first pair: the three boxes, then `q_A = γ₁/8`, `q_R = 1/2 − γ₁/8`.
pub fn starting_distribution(v1: &BinWord, w1: &BinWord, gamma1: &Rational) -> RatVector {
    let x = v1.fraction();
    let y = w1.fraction();
    let one = Rational::one();
    let (nx, ny) = (&one - &x, &one - &y);
    let q = rat(1, 4);
    let e = rat(1, 8);
    RatVector::new(vec![
        &q * &nx * &ny,
        &q * &nx * &y,
        &q * &x * &ny,
        &q * &x * &y,
        &e * &nx * &nx,
        &q * &nx * &x,
        &e * &x * &x,
        &e * &ny * &ny,
        &q * &ny * &y,
        &e * &y * &y,
        &e * gamma1,
        rat(1, 2) - &e * gamma1,
    ])
    .expect("nonempty")
}

/// Which fixed-matrix construction to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    /// Twelve states, reversed words, input in `π`, strict `1/4`.
    P12,
    /// Nine states, fixed `π`, input in the output vector, weak `1/2`.
    T9,
    /// Eleven states, fixed `π`, input in the output vector, strict `1/4`.
    T11Pi,
    /// Eleven states, reversed words, input in `π`, final symbol `end`,
    /// output `e_{q_A}`, strict `1/4`.
    T11,
    /// Eighteen states, reversed words, input in `π`, 0/1 output, weak `1/2`.
    T18,
}

impl Target {
    pub fn states(self) -> usize {
        match self {
            Target::P12 => 12,
            Target::T9 => 9,
            Target::T11Pi | Target::T11 => 11,
            Target::T18 => 18,
        }
    }

    fn reversed(self) -> bool {
        matches!(self, Target::P12 | Target::T11 | Target::T18)
    }
}

/// Symbol of the closing matrix in [`Target::T11`].
pub const END: &str = "end";

/// The input-independent part of a pipeline plus what is needed to build the
/// input-dependent vector.
#[derive(Clone, Debug)]
pub struct FixedPipeline {
    pub target: Target,
    pub alphabet: Vec<String>,
    pub matrices: Vec<RatMatrix>,
    /// Present when `π` does not depend on the input.
    pub pi: Option<RatVector>,
    /// Present when the output vector does not depend on the input.
    pub out: Option<RatVector>,
    pub cutpoint: Rational,
    pub mode: Mode,
    /// Self-loop probability of `q_A`, where there is one.
    pub gamma: Option<Rational>,
    machine: TuringMachine,
    code: PrefixCode,
    options: MpcpOptions,
    /// Head convention of the machine as given.
    head: Head,
    /// Output values folded into the eighteen-state layout.
    f18: Option<RatVector>,
}

impl FixedPipeline {
    /// Pair labels are 1-based pair indices: `"2"` is the finishing pair.
    pub fn build(
        tm: &TuringMachine,
        code: &PrefixCode,
        target: Target,
        opts: MpcpOptions,
    ) -> Result<Self, TmError> {
        tm.validate()?;
        let (m, _) = tm.oriented(&[]);
        let coded = rule_pairs(&m, opts)
            .into_iter()
            .map(|((v, w), _)| code_pair(code, &v, &w, target.reversed()))
            .collect::<Result<Vec<_>, _>>()?;
        let longest = coded.iter().map(|(v, w)| v.len().max(w.len())).max().unwrap_or(1);
        let label = |i: usize| (i + 2).to_string();
        let (finish, rules) = (&coded[0], &coded[1..]);
        let labels: Vec<String> = (1..coded.len()).map(label).collect();
        let mut p = FixedPipeline {
            target,
            alphabet: Vec::new(),
            matrices: Vec::new(),
            pi: None,
            out: None,
            cutpoint: rat(1, 4),
            mode: Mode::Strict,
            gamma: None,
            machine: m,
            code: code.clone(),
            options: opts,
            head: tm.head,
            f18: None,
        };
        match target {
            Target::P12 => {
                let g = pow2(-2 * longest as i64);
                p.alphabet = (0..coded.len()).map(label).collect();
                p.matrices = coded.iter().map(|(v, w)| twelve_state_matrix(v, w, &g)).collect();
                let mut out = RatVector::zeros(12);
                for i in [3, 4, 5, 7, 8, 10] {
                    out[i] = Rational::one();
                }
                p.out = Some(out);
                p.gamma = Some(g);
            }
            Target::T9 => {
                p.alphabet = labels;
                p.matrices = rules.iter().map(|(v, w)| nine_state_matrix(v, w)).collect();
                p.pi = Some(RatVector::unit(9, 0).mul_mat(&nine_state_matrix(&finish.0, &finish.1))?);
                p.cutpoint = rat(1, 2);
                p.mode = Mode::Weak;
            }
            Target::T11Pi => {
                let g = pow2(-4 * longest as i64);
                p.alphabet = labels;
                p.matrices = rules.iter().map(|(v, w)| eleven_state_matrix(v, w, &g)).collect();
                let fin = eleven_state_matrix(&finish.0, &finish.1, &g);
                p.pi = Some(pi0_11().mul_mat(&fin)?);
                p.gamma = Some(g);
            }
            Target::T11 => {
                let g = pow2(-4 * longest as i64);
                p.alphabet = labels;
                p.alphabet.push(END.into());
                p.matrices = rules.iter().map(|(v, w)| eleven_state_matrix(v, w, &g)).collect();
                let fin = eleven_state_matrix(&finish.0, &finish.1, &g);
                p.matrices.push(fin.mul(&m_infinity(&f_hat_11(), 9, 10))?);
                p.out = Some(RatVector::unit(11, 9));
                p.gamma = Some(g);
            }
            Target::T18 => {
                let f = nine_state_matrix(&finish.0, &finish.1).mul_vec(&f_hat())?;
                let template = Pfa::new(
                    labels.clone(),
                    rules.iter().map(|(v, w)| nine_state_matrix(v, w)).collect(),
                    RatVector::unit(9, 0),
                    f.clone(),
                    rat(1, 2),
                    Mode::Weak,
                )?;
                let big = eliminate_output_vector(&template)?;
                p.alphabet = labels;
                p.matrices = big.matrices().to_vec();
                p.out = Some(big.out().clone());
                p.cutpoint = rat(1, 2);
                p.mode = Mode::Weak;
                p.f18 = Some(f);
            }
        }
        Ok(p)
    }

    /// The complete automaton for one machine input.
    pub fn pfa_for(&self, input: &[String]) -> Result<Pfa, TmError> {
        for s in input {
            self.machine.check_symbol(s)?;
        }
        let u: Vec<String> = match self.head {
            Head::Left => input.to_vec(),
            Head::Right => input.iter().rev().cloned().collect(),
        };
        let (v1, w1) = start_pair(&self.machine, &u, self.options);
        let (v, w) = code_pair(&self.code, &v1, &w1, self.target.reversed())?;
        let g1_16 = pow2(-4 * v.len().max(w.len()) as i64);
        let (pi, out) = match self.target {
            Target::P12 => {
                let g1 = pow2(-2 * v.len().max(w.len()) as i64);
                (
                    starting_distribution(&v, &w, &g1),
                    self.out.clone().expect("fixed"),
                )
            }
            Target::T9 => (
                self.pi.clone().expect("fixed"),
                nine_state_matrix(&v, &w).mul_vec(&f_hat())?,
            ),
            Target::T11Pi => (
                self.pi.clone().expect("fixed"),
                eleven_state_matrix(&v, &w, &g1_16).mul_vec(&f_hat_11())?,
            ),
            Target::T11 => (
                pi0_11().mul_mat(&eleven_state_matrix(&v, &w, &g1_16))?,
                self.out.clone().expect("fixed"),
            ),
            Target::T18 => {
                let pi9 = RatVector::unit(9, 0).mul_mat(&nine_state_matrix(&v, &w))?;
                let f = self.f18.as_ref().expect("eighteen-state target");
                let one = Rational::one();
                let mut e = Vec::with_capacity(18);
                e.extend(pi9.iter().zip(f.iter()).map(|(p, f)| p * f));
                e.extend(pi9.iter().zip(f.iter()).map(|(p, f)| p * (&one - f)));
                (RatVector::new(e)?, self.out.clone().expect("fixed"))
            }
        };
        Ok(Pfa::new(
            self.alphabet.clone(),
            self.matrices.clone(),
            pi,
            out,
            self.cutpoint.clone(),
            self.mode,
        )?)
    }

    /// The automaton word for an MPCP solution `1, a₂, …, a_{m−1}, 2` of the
    /// compiled instance (0-based `0, …, 1` in `sol`).
    pub fn word_for(&self, sol: &PcpSolution) -> Vec<String> {
        let label = |i: &usize| (i + 1).to_string();
        let idx = &sol.0;
        if self.target == Target::P12 {
            return idx[1..].iter().map(label).collect();
        }
        let middle = &idx[1..idx.len().saturating_sub(1).max(1)];
        match self.target {
            Target::T9 | Target::T11Pi => middle.iter().rev().map(label).collect(),
            Target::T11 => middle
                .iter()
                .map(label)
                .chain(std::iter::once(END.to_string()))
                .collect(),
            _ => middle.iter().map(label).collect(),
        }
    }

    /// Largest `e` such that some matrix entry has denominator `2^e`;
    /// `None` if some denominator is not a power of two.
    pub fn denominator_exponent(&self) -> Option<u64> {
        let mut best = 0;
        for m in &self.matrices {
            best = best.max(dyadic_exponent(m)?);
        }
        Some(best)
    }
}

/// Largest `e` with some entry of denominator `2^e`, or `None` if some
/// entry is not a binary fraction.
pub fn dyadic_exponent(m: &RatMatrix) -> Option<u64> {
    let mut best = 0;
    for x in m.entries() {
        let d = x.denom();
        let e = d.trailing_zeros().unwrap_or(0);
        if *d != num_bigint::BigInt::one() << e {
            return None;
        }
        best = best.max(e);
    }
    Some(best)
}

fn pi0_11() -> RatVector {
    let mut p = RatVector::zeros(11);
    p[0] = rat(1, 2);
    p[9] = rat(1, 2);
    p
}

fn code_pair(
    code: &PrefixCode,
    v: &[String],
    w: &[String],
    reversed: bool,
) -> Result<(BinWord, BinWord), TmError> {
    let prep = |x: &[String]| -> Vec<String> {
        if reversed {
            x.iter().rev().cloned().collect()
        } else {
            x.to_vec()
        }
    };
    Ok((code.encode(&prep(v))?, code.encode(&prep(w))?))
}

/// Small machines used by tests, examples and the command line.
pub mod machines {
    use super::{Head, Move, Rule, TuringMachine};

    fn tm(states: &[&str], rules: Vec<Rule>) -> TuringMachine {
        TuringMachine {
            states: states.iter().map(|s| s.to_string()).collect(),
            alphabet: vec!["_".into(), "b".into()],
            blank: "_".into(),
            start: states[0].into(),
            rules,
            head: Head::Left,
        }
    }

    /// Halts at once: `(q0, _, −)`.
    pub fn halt_at_once() -> TuringMachine {
        tm(&["q0"], vec![Rule::halt("q0", "_")])
    }

    /// Writes `b`, moves right, halts.
    pub fn write_and_halt() -> TuringMachine {
        tm(
            &["q0", "q1"],
            vec![Rule::step("q0", "_", "b", Move::R, "q1"), Rule::halt("q1", "_")],
        )
    }

    /// Writes `b`, moves left off the input, halts.
    pub fn step_left_and_halt() -> TuringMachine {
        tm(
            &["q0", "q1"],
            vec![Rule::step("q0", "_", "b", Move::L, "q1"), Rule::halt("q1", "_")],
        )
    }

    /// Runs right forever: `(q0, _, _, R, q0)`.
    pub fn run_right_forever() -> TuringMachine {
        tm(&["q0"], vec![Rule::step("q0", "_", "_", Move::R, "q0")])
    }

    /// Fifteen states, two symbols, 14 left, 15 right and one halting rule.
    pub fn fifteen_state_shape() -> TuringMachine {
        let states: Vec<String> = (0..15).map(|i| format!("q{i}")).collect();
        let mut rules = Vec::new();
        let mut n = 0;
        for q in &states {
            for sym in ["_", "b"] {
                let next = &states[(n * 7) % 15];
                rules.push(match n {
                    0..=13 => Rule::step(q, sym, "b", Move::L, next),
                    14 => Rule::halt(q, sym),
                    _ => Rule::step(q, sym, "_", Move::R, next),
                });
                n += 1;
            }
        }
        TuringMachine {
            states,
            alphabet: vec!["_".into(), "b".into()],
            blank: "_".into(),
            start: "q0".into(),
            rules,
            head: Head::Left,
        }
    }

    /// Skips `b`s to the right and halts on the first blank.
    pub fn skip_bs() -> TuringMachine {
        tm(
            &["q0"],
            vec![Rule::step("q0", "b", "b", Move::R, "q0"), Rule::halt("q0", "_")],
        )
    }
}
