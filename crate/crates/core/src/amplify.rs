//! Amplifying a strict-½ threshold: the expanding automaton, Algorithm F
//! (one coin per round), Algorithm NC (no coins), and the input recipe
//! for Algorithm GO (one coin at the start).

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{int, pow2, powu, rat, RatMatrix, RatVector, Rational};
use crate::pfa::{Mode, Pfa, PfaError};

pub const SIM: &str = "sim";
pub const END: &str = "end";
pub const CHECK: &str = "check";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AmpError {
    #[error("x = {0} is outside [0, 1]")]
    BadX(String),
    #[error("the recipe needs x > 1/2, got {0}")]
    XTooSmall(String),
    #[error("epsilon must lie in (0, 1)")]
    BadEps,
    #[error("the base alphabet already contains {0:?}")]
    Reserved(String),
    #[error("n and t must be at least 1")]
    BadInput,
    #[error(transparent)]
    Pfa(#[from] PfaError),
}

/// A base word `u` repeated `n` times per round, for `t` rounds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmplifyInput {
    pub u: Vec<String>,
    pub n: u64,
    pub t: u64,
}

impl AmplifyInput {
    pub fn new(u: Vec<String>, n: u64, t: u64) -> Result<Self, AmpError> {
        if n == 0 || t == 0 {
            return Err(AmpError::BadInput);
        }
        Ok(AmplifyInput { u, n, t })
    }

    /// `((u end)ⁿ check)ᵗ`.
    pub fn word(&self) -> Vec<String> {
        let mut round = Vec::new();
        for _ in 0..self.n {
            round.extend(self.u.iter().cloned());
            round.push(END.into());
        }
        round.push(CHECK.into());
        (0..self.t).flat_map(|_| round.clone()).collect()
    }
}

fn check_x(x: &Rational) -> Result<(), AmpError> {
    if x.is_negative() || *x > Rational::one() {
        return Err(AmpError::BadX(crate::exact::format_rational(x)));
    }
    Ok(())
}

fn build(
    n: usize,
    alphabet: &[&str],
    rows: impl Fn(&str, usize) -> Vec<(usize, Rational)>,
) -> Vec<RatMatrix> {
    alphabet
        .iter()
        .map(|s| {
            let mut m = RatMatrix::zeros(n, n);
            for i in 0..n {
                for (j, p) in rows(s, i) {
                    let cur = m.get(i, j).clone();
                    m.set(i, j, cur + p);
                }
            }
            m
        })
        .collect()
}

pub mod expanding {
    //! States `q₀ = 0`, `+ = 1`, `− = 2`, `⊤ = 3`, `⊥ = 4`.
    pub const Q0: usize = 0;
    pub const PLUS: usize = 1;
    pub const MINUS: usize = 2;
    pub const TOP: usize = 3;
    pub const BOT: usize = 4;
}

/// Five states over `{sim, check}`: `sim` keeps `+` with probability `x`
/// and `−` with `1−x`, falling back to `q₀` otherwise; `check` decides from
/// `+`/`−` and throws the round coin from `q₀`. Accepts in `⊤`.
pub fn expanding_automaton(x: &Rational) -> Result<Pfa, AmpError> {
    use expanding::*;
    check_x(x)?;
    let nx = Rational::one() - x;
    let half = rat(1, 2);
    let ms = build(5, &[SIM, CHECK], |s, i| match (s, i) {
        (_, TOP) => vec![(TOP, Rational::one())],
        (_, BOT) => vec![(BOT, Rational::one())],
        (SIM, Q0) => vec![(Q0, Rational::one())],
        (SIM, PLUS) => vec![(PLUS, x.clone()), (Q0, nx.clone())],
        (SIM, _) => vec![(MINUS, nx.clone()), (Q0, x.clone())],
        (_, Q0) => vec![(PLUS, half.clone()), (MINUS, half.clone())],
        (_, PLUS) => vec![(TOP, Rational::one())],
        (_, _) => vec![(BOT, Rational::one())],
    });
    Ok(Pfa::new(
        vec![SIM.into(), CHECK.into()],
        ms,
        RatVector::unit(5, Q0),
        RatVector::unit(5, TOP),
        rat(1, 2),
        Mode::Strict,
    )?)
}

/// `check (simⁿ check)ᵗ`: the first `check` throws the first coin.
pub fn expanding_word(n: u64, t: u64) -> Vec<String> {
    let mut w = vec![CHECK.to_string()];
    for _ in 0..t {
        w.extend(std::iter::repeat_n(SIM.to_string(), n as usize));
        w.push(CHECK.into());
    }
    w
}

/// Round outcome probabilities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundOdds {
    pub accept: Rational,
    pub reject: Rational,
}

impl RoundOdds {
    /// Algorithm F: `½xⁿ`, `½(1−x)ⁿ`.
    pub fn coin(x: &Rational, n: u64) -> Self {
        let h = rat(1, 2);
        RoundOdds {
            accept: &h * powu(x, n),
            reject: h * powu(&(Rational::one() - x), n),
        }
    }

    /// Algorithm NC: `xⁿ`, `(1−x)ⁿ`.
    pub fn no_coin(x: &Rational, n: u64) -> Self {
        RoundOdds {
            accept: powu(x, n),
            reject: powu(&(Rational::one() - x), n),
        }
    }

    pub fn indecision(&self) -> Rational {
        Rational::one() - &self.accept - &self.reject
    }

    /// `(1 − A − R)ᵗ`.
    pub fn indecision_after(&self, t: u64) -> Rational {
        powu(&self.indecision(), t)
    }

    /// Acceptance after `t` rounds: `A·(1 − (1−A−R)ᵗ)/(A+R)`.
    pub fn accept_after(&self, t: u64) -> Rational {
        let s = &self.accept + &self.reject;
        if s.is_zero() {
            return Rational::zero();
        }
        &self.accept * (Rational::one() - self.indecision_after(t)) / s
    }

    /// `R/(A+R)`, the rejection probability given that a decision is made.
    pub fn conditional_reject(&self) -> Rational {
        let s = &self.accept + &self.reject;
        if s.is_zero() {
            return Rational::zero();
        }
        &self.reject / s
    }
}

/// `(d+1)`-state copy of a PFA whose new state 0 behaves like the initial
/// distribution and is never re-entered. Returns matrices, output values.
pub fn fresh_start(a: &Pfa) -> (Vec<RatMatrix>, RatVector) {
    let d = a.dim();
    let ms = a
        .matrices()
        .iter()
        .map(|m| {
            let first = a.pi().mul_mat(m).expect("dims");
            RatMatrix::from_fn(d + 1, d + 1, |i, j| match (i, j) {
                (_, 0) => Rational::zero(),
                (0, j) => first[j - 1].clone(),
                (i, j) => m.get(i - 1, j - 1).clone(),
            })
        })
        .collect();
    let mut f = vec![a.pi().dot(a.out()).expect("dims")];
    f.extend(a.out().iter().cloned());
    (ms, RatVector::new(f).expect("nonempty"))
}

fn extended_alphabet(a: &Pfa) -> Result<Vec<String>, AmpError> {
    for s in [END, CHECK] {
        if a.alphabet().iter().any(|x| x == s) {
            return Err(AmpError::Reserved(s.into()));
        }
    }
    let mut al = a.alphabet().to_vec();
    al.push(END.into());
    al.push(CHECK.into());
    Ok(al)
}

/// Algorithm F on a base automaton `A` with `d′ = d+1` states after the
/// start-state fix. `2d′ + 3` states: dead-round state `z`, `⊤`, `⊥`, then a
/// `+` copy and a `−` copy of `A`. The round coin for the first round is in
/// the initial distribution, later coins are thrown by `check` from `z`.
///
/// `end` in the `+` copy keeps the round alive with probability `f(s)` (back
/// to the copy's start), else the round is dead; the `−` copy uses `1 − f(s)`.
/// `check` at a copy's start decides (`⊤` for `+`, `⊥` for `−`); `check`
/// anywhere else in a copy is ill-formed and rejects.
pub fn amplify_f(a: &Pfa) -> Result<Pfa, AmpError> {
    let alphabet = extended_alphabet(a)?;
    let (ms, f) = fresh_start(a);
    let d = f.dim();
    let (z, top, bot, p0, m0) = (0, 1, 2, 3, 3 + d);
    let n = 3 + 2 * d;
    let k = a.alphabet().len();
    let half = rat(1, 2);
    let syms: Vec<&str> = alphabet.iter().map(String::as_str).collect();
    let matrices = build(n, &syms, |s, i| {
        let sym = syms.iter().position(|x| *x == s).expect("listed");
        if i == top || i == bot {
            return vec![(i, Rational::one())];
        }
        if i == z {
            return if s == CHECK {
                vec![(p0, half.clone()), (m0, half.clone())]
            } else {
                vec![(z, Rational::one())]
            };
        }
        let (base, plus) = if i < m0 { (p0, true) } else { (m0, false) };
        let st = i - base;
        if sym < k {
            return (0..d)
                .filter(|&j| !ms[sym].get(st, j).is_zero())
                .map(|j| (base + j, ms[sym].get(st, j).clone()))
                .collect();
        }
        if s == END {
            let keep = if plus {
                f[st].clone()
            } else {
                Rational::one() - &f[st]
            };
            let lose = Rational::one() - &keep;
            return vec![(base, keep), (z, lose)];
        }
        match (st, plus) {
            (0, true) => vec![(top, Rational::one())],
            _ => vec![(bot, Rational::one())],
        }
    });
    let mut pi = RatVector::zeros(n);
    pi[p0] = half.clone();
    pi[m0] = half;
    Ok(Pfa::new(
        alphabet,
        matrices,
        pi,
        RatVector::unit(n, top),
        rat(1, 2),
        Mode::Strict,
    )?)
}

/// Algorithm NC: `3d′ + 3` states `z`, `⊤`, `⊥`, then copies for the first
/// word of a round, "all Plus so far" and "all Minus so far". Deterministic
/// start at the first copy's start. An empty round (`check` straight after a
/// round boundary) rejects, as does an ill-formed `check`.
pub fn amplify_nc(a: &Pfa) -> Result<Pfa, AmpError> {
    let alphabet = extended_alphabet(a)?;
    let (ms, f) = fresh_start(a);
    let d = f.dim();
    let (z, top, bot, f0, p0, m0) = (0, 1, 2, 3, 3 + d, 3 + 2 * d);
    let n = 3 + 3 * d;
    let k = a.alphabet().len();
    let syms: Vec<&str> = alphabet.iter().map(String::as_str).collect();
    let matrices = build(n, &syms, |s, i| {
        let sym = syms.iter().position(|x| *x == s).expect("listed");
        if i == top || i == bot {
            return vec![(i, Rational::one())];
        }
        if i == z {
            let to = if s == CHECK { f0 } else { z };
            return vec![(to, Rational::one())];
        }
        let base = if i < p0 {
            f0
        } else if i < m0 {
            p0
        } else {
            m0
        };
        let st = i - base;
        if sym < k {
            return (0..d)
                .filter(|&j| !ms[sym].get(st, j).is_zero())
                .map(|j| (base + j, ms[sym].get(st, j).clone()))
                .collect();
        }
        if s == END {
            let plus = f[st].clone();
            let minus = Rational::one() - &plus;
            return match base {
                b if b == f0 => vec![(p0, plus), (m0, minus)],
                b if b == p0 => vec![(p0, plus), (z, minus)],
                _ => vec![(m0, minus), (z, plus)],
            };
        }
        match (st, base) {
            (0, b) if b == p0 => vec![(top, Rational::one())],
            _ => vec![(bot, Rational::one())],
        }
    });
    Ok(Pfa::new(
        alphabet,
        matrices,
        RatVector::unit(n, f0),
        RatVector::unit(n, top),
        rat(1, 2),
        Mode::Strict,
    )?)
}

/// Smallest `n ≥ 1` with `R/(A+R) ≤ ε/2` for the coin round, then smallest
/// `t ≥ 1` with `(1−A−R)ᵗ ≤ ε/2`; acceptance is then at least `1 − ε`.
pub fn f_input_builder(x: &Rational, eps: &Rational) -> Result<(u64, u64), AmpError> {
    check_x(x)?;
    if *x <= rat(1, 2) {
        return Err(AmpError::XTooSmall(crate::exact::format_rational(x)));
    }
    if eps.is_negative() || eps.is_zero() || *eps >= Rational::one() {
        return Err(AmpError::BadEps);
    }
    let half_eps = eps / int(2);
    let mut n = 1;
    while RoundOdds::coin(x, n).conditional_reject() > half_eps {
        n += 1;
    }
    let odds = RoundOdds::coin(x, n);
    let ind = odds.indecision();
    let (mut t, mut p) = (1u64, ind.clone());
    while p > half_eps {
        t += 1;
        p *= &ind;
    }
    Ok((n, t))
}

/// Bounds `lo ≤ ln y ≤ hi` with `hi − lo ≤ tol`, for rational `y > 0`.
pub fn ln_bounds(y: &Rational, tol: &Rational) -> (Rational, Rational) {
    assert!(y.is_positive() && tol.is_positive());
    if *y < Rational::one() {
        let (lo, hi) = ln_bounds(&(Rational::one() / y), tol);
        return (-hi, -lo);
    }
    // y = 2^k · m with 1 ≤ m < 2.
    let mut k = (y.numer().bits() as i64) - (y.denom().bits() as i64);
    let mut m = y * pow2(-k);
    while m >= int(2) {
        m /= int(2);
        k += 1;
    }
    while m < Rational::one() {
        m *= int(2);
        k -= 1;
    }
    let share = tol / int(k + 1);
    let (l2lo, l2hi) = atanh_log(&int(2), &share);
    let (lmlo, lmhi) = atanh_log(&m, &share);
    (int(k) * l2lo + lmlo, int(k) * l2hi + lmhi)
}

/// `ln m = 2 Σ z^{2i+1}/(2i+1)` with `z = (m−1)/(m+1)`, for `1 ≤ m ≤ 2`.
fn atanh_log(m: &Rational, tol: &Rational) -> (Rational, Rational) {
    let z = (m - Rational::one()) / (m + Rational::one());
    let z2 = &z * &z;
    let mut sum = Rational::zero();
    let mut pw = z.clone();
    let mut i: i64 = 0;
    loop {
        sum += int(2) * &pw / int(2 * i + 1);
        pw *= &z2;
        let tail = int(2) * &pw / (int(2 * i + 3) * (Rational::one() - &z2));
        if tail <= *tol {
            return (sum.clone(), sum + tail);
        }
        i += 1;
    }
}

/// `ln(2/ε)`, from above, to within 1/1024.
pub fn ln_two_over_eps_upper(eps: &Rational) -> Rational {
    ln_bounds(&(int(2) / eps), &rat(1, 1024)).1
}

/// Output of the GO recipe.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoPlan {
    pub n: u64,
    pub t: u64,
    /// Upper bound used for `ln(2/ε)`.
    #[serde(with = "crate::exact::serde_rational")]
    pub ln_bound: Rational,
}

/// Smallest `n` with `((1−x)/x)ⁿ ≤ g` alone.
pub fn go_ratio_exponent(x: &Rational, g: &Rational) -> u64 {
    let r = (Rational::one() - x) / x;
    let mut n = 1;
    let mut p = r.clone();
    while p > *g {
        n += 1;
        p *= &r;
    }
    n
}

/// `g = ε/ln(2/ε)`; `n` smallest with `((1−x)/x)ⁿ ≤ g` and `xⁿ ≤ ½`;
/// `t = ⌊ln(2/ε)/xⁿ⌋`. The logarithm is replaced by a rational upper bound,
/// which keeps both estimates valid.
pub fn go_input_builder(x: &Rational, eps: &Rational) -> Result<GoPlan, AmpError> {
    check_x(x)?;
    if *x <= rat(1, 2) {
        return Err(AmpError::XTooSmall(crate::exact::format_rational(x)));
    }
    if eps.is_negative() || eps.is_zero() || *eps >= Rational::one() {
        return Err(AmpError::BadEps);
    }
    let ln = ln_two_over_eps_upper(eps);
    let g = eps / &ln;
    let mut n = go_ratio_exponent(x, &g);
    while powu(x, n) > rat(1, 2) {
        n += 1;
    }
    let t = (&ln / powu(x, n)).floor().to_integer();
    let t: u64 = t.try_into().map_err(|_| AmpError::BadInput)?;
    Ok(GoPlan {
        n,
        t: t.max(1),
        ln_bound: ln,
    })
}

pub mod go {
    //! `P` live, `P` dead, `M` live, `M` dead, `⊤`, `⊥`.
    pub const P_LIVE: usize = 0;
    pub const P_DEAD: usize = 1;
    pub const M_LIVE: usize = 2;
    pub const M_DEAD: usize = 3;
    pub const TOP: usize = 4;
    pub const BOT: usize = 5;
}

/// Expanding-level automaton for Algorithm GO: the coin is the initial
/// distribution. In the `+` branch an all-Plus round accepts and running out
/// of input rejects; in the `−` branch an all-Minus round rejects and running
/// out of input accepts.
pub fn go_automaton(x: &Rational) -> Result<Pfa, AmpError> {
    use go::*;
    check_x(x)?;
    let nx = Rational::one() - x;
    let ms = build(6, &[SIM, CHECK], |s, i| match (s, i) {
        (_, TOP) | (_, BOT) => vec![(i, Rational::one())],
        (SIM, P_LIVE) => vec![(P_LIVE, x.clone()), (P_DEAD, nx.clone())],
        (SIM, M_LIVE) => vec![(M_LIVE, nx.clone()), (M_DEAD, x.clone())],
        (SIM, _) => vec![(i, Rational::one())],
        (_, P_LIVE) => vec![(TOP, Rational::one())],
        (_, P_DEAD) => vec![(P_LIVE, Rational::one())],
        (_, M_LIVE) => vec![(BOT, Rational::one())],
        (_, _) => vec![(M_LIVE, Rational::one())],
    });
    let mut pi = RatVector::zeros(6);
    pi[P_LIVE] = rat(1, 2);
    pi[M_LIVE] = rat(1, 2);
    let out = RatVector::from_ints(&[0, 0, 1, 1, 1, 0]);
    Ok(Pfa::new(
        vec![SIM.into(), CHECK.into()],
        ms,
        pi,
        out,
        rat(1, 2),
        Mode::Strict,
    )?)
}

/// `(simⁿ check)ᵗ`.
pub fn go_word(n: u64, t: u64) -> Vec<String> {
    let mut round: Vec<String> = std::iter::repeat_n(SIM.to_string(), n as usize).collect();
    round.push(CHECK.into());
    (0..t).flat_map(|_| round.clone()).collect()
}

/// `(Pr[REJECT | +], Pr[REJECT | −])` by running the GO automaton from each branch.
pub fn go_conditional_rejects(x: &Rational, n: u64, t: u64) -> Result<(Rational, Rational), AmpError> {
    let p = go_automaton(x)?;
    let idx = p.indices(&go_word(n, t))?;
    let reject_from = |start: usize| -> Result<Rational, AmpError> {
        let mut v = RatVector::unit(6, start);
        for &a in &idx {
            v = v.mul_mat(&p.matrices()[a]).expect("dims");
        }
        Ok(Rational::one() - v.dot(p.out()).expect("dims"))
    };
    Ok((reject_from(go::P_LIVE)?, reject_from(go::M_LIVE)?))
}

/// Closed forms `(1−xⁿ)ᵗ` and `1 − (1−(1−x)ⁿ)ᵗ` of the conditional rejections.
pub fn go_closed_rejects(x: &Rational, n: u64, t: u64) -> (Rational, Rational) {
    let one = Rational::one();
    let plus = powu(&(&one - powu(x, n)), t);
    let minus = &one - powu(&(&one - powu(&(&one - x), n)), t);
    (plus, minus)
}
