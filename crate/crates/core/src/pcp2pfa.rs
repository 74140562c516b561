//! PFA constructions parameterized by a binary PCP instance.
//!
//! For an index word `a = a₁…aₘ` let `φ(a) = 0.v_{aₘ}…v_{a₁}` and
//! `ψ(a) = 0.w_{aₘ}…w_{a₁}`. Three independent boxes accept with `φψ`,
//! `1 − φ²` and `1 − ψ²`; mixing them as `1/2, 1/4, 1/4` yields
//! `1/2 − 1/4(φ − ψ)²`, which equals `1/2` exactly when `φ = ψ`.

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::binaut::{b_matrix, BinWord};
use crate::exact::{pow2, rat, RatMatrix, RatVector, Rational};
use crate::pcp::{BinPcp, PcpError, Variant};
use crate::pfa::{Mode, Pfa, PfaError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CompileError {
    #[error("box transition {value} for symbol {symbol:?} is not a multiple of gamma {gamma}")]
    GammaDivisibility {
        symbol: String,
        value: String,
        gamma: String,
    },
    #[error("gamma must lie in (0, 1/4]")]
    BadGamma,
    #[error("cutpoint must lie in (0, 1/2)")]
    BadCutpoint,
    #[error("need states q_A with output 1/8 and q_R with output 0")]
    MissingAcceptReject,
    #[error("binary coding needs more than two symbols")]
    AlphabetTooSmall,
    #[error(transparent)]
    Pfa(#[from] PfaError),
    #[error(transparent)]
    Pcp(#[from] PcpError),
}

/// Pair-index alphabet `"1"…"k"`.
pub fn pair_alphabet(k: usize) -> Vec<String> {
    (1..=k).map(|i| i.to_string()).collect()
}

/// Merges the two middle states of `p ⊗ p` for a 2×2 stochastic `p`.
/// States: both copies in 0, one copy in each, both copies in 1.
pub fn merged3(p: &RatMatrix) -> RatMatrix {
    let (p00, p01, p10, p11) = (p.get(0, 0), p.get(0, 1), p.get(1, 0), p.get(1, 1));
    let two = Rational::from_integer(2.into());
    RatMatrix::new(vec![
        vec![p00 * p00, &two * p00 * p01, p01 * p01],
        vec![p00 * p10, p01 * p10 + p00 * p11, p01 * p11],
        vec![p10 * p10, &two * p10 * p11, p11 * p11],
    ])
    .expect("3x3")
}

/// The two-state automata computing `φ` and `ψ`.
pub fn phi_psi_automata(inst: &BinPcp) -> Result<(Pfa, Pfa), CompileError> {
    let make = |side: usize| {
        let ms = inst
            .pairs
            .iter()
            .map(|p| b_matrix(&BinWord::new(if side == 0 { p.0.clone() } else { p.1.clone() })))
            .collect();
        Pfa::new(
            pair_alphabet(inst.k()),
            ms,
            RatVector::unit(2, 0),
            RatVector::unit(2, 1),
            rat(1, 2),
            Mode::Strict,
        )
    };
    Ok((make(0)?, make(1)?))
}

/// The three boxes mixed `1/2, 1/4, 1/4`, without a start state: 12 states,
/// or 10 when the symmetric states of the squared boxes are merged.
/// Weak cutpoint `1/2`; the empty word scores `1/2`.
pub fn mixture_boxes(inst: &BinPcp, merged: bool) -> Result<Pfa, CompileError> {
    let mut ms = Vec::with_capacity(inst.k());
    for i in 0..inst.k() {
        let bv = b_matrix(&inst.v(i));
        let bw = b_matrix(&inst.w(i));
        let (sq_v, sq_w) = if merged {
            (merged3(&bv), merged3(&bw))
        } else {
            (bv.kron(&bv), bw.kron(&bw))
        };
        ms.push(RatMatrix::block_diag(&[&bv.kron(&bw), &sq_v, &sq_w]));
    }
    let sq = if merged { 3 } else { 4 };
    let d = 4 + 2 * sq;
    let mut pi = RatVector::zeros(d);
    pi[0] = rat(1, 2);
    pi[4] = rat(1, 4);
    pi[4 + sq] = rat(1, 4);
    let mut out = RatVector::zeros(d);
    out[3] = Rational::one();
    for j in 0..sq - 1 {
        out[4 + j] = Rational::one();
        out[4 + sq + j] = Rational::one();
    }
    Ok(Pfa::new(
        pair_alphabet(inst.k()),
        ms,
        pi,
        out,
        rat(1, 2),
        Mode::Weak,
    )?)
}

/// Adds a fresh start state (state 0) that absorbs the first transition:
/// its row is `πᵀM_σ`, its output is 0, and it is never re-entered.
pub fn with_start_state(p: &Pfa) -> Result<Pfa, CompileError> {
    let d = p.dim();
    let ms = p
        .matrices()
        .iter()
        .map(|m| {
            let mut big = RatMatrix::zeros(d + 1, d + 1);
            let first = p.pi().mul_mat(m).expect("dims");
            for j in 0..d {
                big.set(0, j + 1, first[j].clone());
            }
            big.put_block(1, 1, m);
            big
        })
        .collect();
    let out = RatVector::concat(&[&RatVector::zeros(1), p.out()]);
    Ok(Pfa::new(
        p.alphabet().to_vec(),
        ms,
        RatVector::unit(d + 1, 0),
        out,
        p.cutpoint().clone(),
        p.mode(),
    )?)
}

/// 13 states, 7 accepting: `1/2 − 1/4(φ−ψ)²` on nonempty words, 0 on the empty word.
pub fn equality_pfa_13(inst: &BinPcp) -> Result<Pfa, CompileError> {
    with_start_state(&mixture_boxes(inst, false)?)
}

/// 11 states, 5 accepting; same probabilities as [`equality_pfa_13`].
pub fn equality_pfa_11(inst: &BinPcp) -> Result<Pfa, CompileError> {
    with_start_state(&mixture_boxes(inst, true)?)
}

/// Parameters of the strict-inequality gadget.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GadgetParams {
    /// Self-loop probability of `q_A`.
    pub gamma: Rational,
    /// Probability factor of entering `q_A` on the first symbol.
    pub gamma1: Rational,
    /// Strict cutpoint `λ ∈ (0, 1/2)`.
    pub cutpoint: Rational,
}

impl GadgetParams {
    /// `γ = γ₁ = 4^{−max |vᵢ|,|wᵢ|}`. Non-solutions can tie with the cutpoint.
    pub fn unit(inst: &BinPcp) -> Self {
        let g = pow2(-2 * inst.max_word_len() as i64);
        GadgetParams {
            gamma: g.clone(),
            gamma1: g,
            cutpoint: rat(1, 4),
        }
    }

    /// Half of [`GadgetParams::unit`]; every non-solution then stays strictly
    /// below the cutpoint.
    pub fn separating(inst: &BinPcp) -> Self {
        let u = Self::unit(inst);
        GadgetParams {
            gamma: u.gamma / Rational::from_integer(2.into()),
            gamma1: u.gamma1 / Rational::from_integer(2.into()),
            cutpoint: u.cutpoint,
        }
    }

    /// RMPCP version: `γ` from pairs `2..k`, `γ₁` from pair 1 alone.
    pub fn unit_rmpcp(inst: &BinPcp) -> Self {
        let (v1, w1) = &inst.pairs[0];
        let rest = inst.pairs[1..]
            .iter()
            .map(|(v, w)| v.len().max(w.len()))
            .max()
            .unwrap_or(1)
            .max(1);
        GadgetParams {
            gamma: pow2(-2 * rest as i64),
            gamma1: pow2(-2 * v1.len().max(w1.len()) as i64),
            cutpoint: rat(1, 4),
        }
    }

    pub fn separating_rmpcp(inst: &BinPcp) -> Self {
        let u = Self::unit_rmpcp(inst);
        let two = Rational::from_integer(2.into());
        GadgetParams {
            gamma: u.gamma / &two,
            gamma1: u.gamma1 / &two,
            cutpoint: u.cutpoint,
        }
    }

    pub fn with_cutpoint(mut self, cutpoint: Rational) -> Self {
        self.cutpoint = cutpoint;
        self
    }
}

/// Turns a weak `1/2`-cutpoint box automaton (no start state) into a strict one.
///
/// States: start, the boxes, `q_A`, `q_R`. On the first symbol the start state
/// enters the boxes with weight `2λ`, `q_A` with weight `c·γ₁` where
/// `c = min(λ/2, 1 − 2λ)`, and `q_R` otherwise. `q_A` stays with probability `γ`.
/// For `λ = 1/4` the split is `1/2, 1/8, 3/8` and a word scores
/// `1/4 − 1/8(φ−ψ)² + 1/8·γ₁γ^{|a|−1}`.
pub fn strict_gadget(boxes: &Pfa, params: &GadgetParams) -> Result<Pfa, CompileError> {
    strict_gadget_skipping(boxes, params, None)
}

/// Like [`strict_gadget`], but the matrix of `skip` is exempt from the
/// divisibility check (it is only ever used out of the start state).
pub fn strict_gadget_skipping(
    boxes: &Pfa,
    params: &GadgetParams,
    skip: Option<usize>,
) -> Result<Pfa, CompileError> {
    let GadgetParams {
        gamma,
        gamma1,
        cutpoint,
    } = params;
    let quarter = rat(1, 4);
    if !gamma.is_positive() || *gamma > quarter || !gamma1.is_positive() || *gamma1 > quarter {
        return Err(CompileError::BadGamma);
    }
    if !cutpoint.is_positive() || *cutpoint >= rat(1, 2) {
        return Err(CompileError::BadCutpoint);
    }
    for (i, (s, m)) in boxes.alphabet().iter().zip(boxes.matrices()).enumerate() {
        if Some(i) == skip {
            continue;
        }
        if let Some(x) = m.entries().iter().find(|x| !(*x / gamma).is_integer()) {
            return Err(CompileError::GammaDivisibility {
                symbol: s.clone(),
                value: crate::exact::format_rational(x),
                gamma: crate::exact::format_rational(gamma),
            });
        }
    }
    let one = Rational::one();
    let two = Rational::from_integer(2.into());
    let box_weight = &two * cutpoint;
    let c = std::cmp::min(cutpoint / &two, &one - &box_weight);
    let d = boxes.dim();
    let (qa, qr) = (d + 1, d + 2);
    let n = d + 3;
    let ms = boxes
        .matrices()
        .iter()
        .map(|m| {
            let mut big = RatMatrix::zeros(n, n);
            let first = boxes.pi().mul_mat(m).expect("dims").scale(&box_weight);
            for j in 0..d {
                big.set(0, j + 1, first[j].clone());
            }
            let to_qa = &c * gamma1;
            big.set(0, qr, &one - &box_weight - &to_qa);
            big.set(0, qa, to_qa);
            big.put_block(1, 1, m);
            big.set(qa, qa, gamma.clone());
            big.set(qa, qr, &one - gamma);
            big.set(qr, qr, one.clone());
            big
        })
        .collect();
    let mut out = RatVector::zeros(n);
    for j in 0..d {
        out[j + 1] = boxes.out()[j].clone();
    }
    out[qa] = one;
    Ok(Pfa::new(
        boxes.alphabet().to_vec(),
        ms,
        RatVector::unit(n, 0),
        out,
        cutpoint.clone(),
        Mode::Strict,
    )?)
}

/// 15 states: start, 12 box states, `q_A`, `q_R`.
pub fn strict15(inst: &BinPcp, params: &GadgetParams) -> Result<Pfa, CompileError> {
    strict_gadget(&mixture_boxes(inst, false)?, params)
}

/// 13 states: start, 10 merged box states, `q_A`, `q_R`.
pub fn strict13(inst: &BinPcp, params: &GadgetParams) -> Result<Pfa, CompileError> {
    strict_gadget(&mixture_boxes(inst, true)?, params)
}

/// 12 states for an RMPCP: the start row for pair 1 becomes `π`, pair 1
/// leaves the alphabet, and the start state is dropped.
/// Word `a₂…aₘ` (symbols `"2"…"k"`) scores above the cutpoint iff
/// `v_{aₘ}…v_{a₂}v₁ = w_{aₘ}…w_{a₂}w₁`.
pub fn rmpcp_compile(inst: &BinPcp, params: &GadgetParams) -> Result<Pfa, CompileError> {
    if inst.variant != Variant::Rmpcp {
        return Err(PcpError::VariantMismatch {
            expected: Variant::Rmpcp,
            got: inst.variant,
        }
        .into());
    }
    inst.check_fixed_pairs_end_with_one()?;
    let full = strict_gadget_skipping(&mixture_boxes(inst, true)?, params, Some(0))?;
    drop_start_state(&full, 0)
}

/// Pre-applies the matrix of `symbol` to the start state, removes that symbol
/// and the start state (state 0, which must never be re-entered).
pub fn drop_start_state(full: &Pfa, symbol: usize) -> Result<Pfa, CompileError> {
    let n = full.dim();
    let pi0 = full.pi().mul_mat(&full.matrices()[symbol]).expect("dims");
    let pi = RatVector::new(pi0.entries()[1..].to_vec()).expect("nonempty");
    let mut alphabet = Vec::new();
    let mut ms = Vec::new();
    for (i, (s, m)) in full.alphabet().iter().zip(full.matrices()).enumerate() {
        if i != symbol {
            alphabet.push(s.clone());
            ms.push(m.block(1, 1, n - 1, n - 1));
        }
    }
    let out = RatVector::new(full.out().entries()[1..].to_vec()).expect("nonempty");
    Ok(Pfa::new(
        alphabet,
        ms,
        pi,
        out,
        full.cutpoint().clone(),
        full.mode(),
    )?)
}

/// Output values of the nine merged states, φ-state major:
/// `{1/2,1/2,1/4; 1/2,5/8,1/2; 1/4,1/2,1/2}`.
pub fn f_hat() -> RatVector {
    RatVector::new(vec![
        rat(1, 2),
        rat(1, 2),
        rat(1, 4),
        rat(1, 2),
        rat(5, 8),
        rat(1, 2),
        rat(1, 4),
        rat(1, 2),
        rat(1, 2),
    ])
    .expect("nonempty")
}

/// Pair matrix on the nine merged states: `merged3(B(v)) ⊗ merged3(B(w))`.
pub fn nine_state_matrix(v: &BinWord, w: &BinWord) -> RatMatrix {
    merged3(&b_matrix(v)).kron(&merged3(&b_matrix(w)))
}

/// Nine states, deterministic start, output vector [`f_hat`], weak cutpoint
/// `1/2`. Scores `1/2 − 1/4(φ−ψ)²` on every word, the empty word included.
pub fn nine_state_pfa(inst: &BinPcp) -> Result<Pfa, CompileError> {
    let ms = (0..inst.k())
        .map(|i| nine_state_matrix(&inst.v(i), &inst.w(i)))
        .collect();
    Ok(Pfa::new(
        pair_alphabet(inst.k()),
        ms,
        RatVector::unit(9, 0),
        f_hat(),
        rat(1, 2),
        Mode::Weak,
    )?)
}

/// Nine merged states plus `q_A` (self-loop `γ`, output `1/8`) and absorbing
/// `q_R` (output 0).
pub fn eleven_state_matrix(v: &BinWord, w: &BinWord, gamma: &Rational) -> RatMatrix {
    let mut m = RatMatrix::zeros(11, 11);
    m.put_block(0, 0, &nine_state_matrix(v, w));
    m.set(9, 9, gamma.clone());
    m.set(9, 10, Rational::one() - gamma);
    m.set(10, 10, Rational::one());
    m
}

/// Eleven states for an RMPCP, closed by [`m_infinity_closure`] into the
/// symbol `end`. Pair 1 is pre-applied to `π₀ = ½e₀ + ½e_{q_A}` with
/// `γ₁ = 16^{−max(|v₁|,|w₁|)}`; rule pairs use `γ = 16^{−max}` over pairs 2…k.
/// Word `a₂…aₘ end` scores above `1/4` iff `v_{aₘ}…v_{a₂}v₁ = w_{aₘ}…w_{a₂}w₁`.
pub fn eleven_state_rmpcp(inst: &BinPcp) -> Result<Pfa, CompileError> {
    if inst.variant != Variant::Rmpcp {
        return Err(PcpError::VariantMismatch {
            expected: Variant::Rmpcp,
            got: inst.variant,
        }
        .into());
    }
    inst.check_fixed_pairs_end_with_one()?;
    let longest = (1..inst.k())
        .map(|i| inst.pairs[i].0.len().max(inst.pairs[i].1.len()))
        .max()
        .unwrap_or(1);
    let g = pow2(-4 * longest as i64);
    let g1 = pow2(-4 * inst.pairs[0].0.len().max(inst.pairs[0].1.len()) as i64);
    let mut pi0 = RatVector::zeros(11);
    pi0[0] = rat(1, 2);
    pi0[9] = rat(1, 2);
    let pi = pi0
        .mul_mat(&eleven_state_matrix(&inst.v(0), &inst.w(0), &g1))
        .expect("dims");
    let ms = (1..inst.k())
        .map(|i| eleven_state_matrix(&inst.v(i), &inst.w(i), &g))
        .collect();
    let alphabet = pair_alphabet(inst.k()).split_off(1);
    let open = Pfa::new(alphabet, ms, pi, f_hat_11(), rat(1, 4), Mode::Strict)?;
    m_infinity_closure(&open, 9, 10, None, "end")
}

/// The matrix for one rule pair in the twelve-state RMPCP layout:
/// `B(v)⊗B(w)`, the two merged squares, then `q_A` (self-loop `γ`) and `q_R`.
pub fn twelve_state_matrix(v: &BinWord, w: &BinWord, gamma: &Rational) -> RatMatrix {
    let bv = b_matrix(v);
    let bw = b_matrix(w);
    let mut m = RatMatrix::zeros(12, 12);
    m.put_block(
        0,
        0,
        &RatMatrix::block_diag(&[&bv.kron(&bw), &merged3(&bv), &merged3(&bw)]),
    );
    m.set(10, 10, gamma.clone());
    m.set(10, 11, Rational::one() - gamma);
    m.set(11, 11, Rational::one());
    m
}

/// Output vector of the eleven-state layout.
pub fn f_hat_11() -> RatVector {
    RatVector::concat(&[
        &f_hat(),
        &RatVector::new(vec![rat(1, 8), Rational::zero()]).unwrap(),
    ])
}

/// Replaces fractional outputs by a 0-1 vector on `2d` states: state `q⁺`
/// (index `q`) and `q⁻` (index `d+q`). Column `q⁺` is scaled by `f_q` and
/// column `q⁻` by `1 − f_q`; both row copies equal the original row.
pub fn eliminate_output_vector(p: &Pfa) -> Result<Pfa, CompileError> {
    let d = p.dim();
    let f = p.out();
    let one = Rational::one();
    let ms = p
        .matrices()
        .iter()
        .map(|m| {
            RatMatrix::from_fn(2 * d, 2 * d, |i, j| {
                let x = m.get(i % d, j % d);
                if j < d {
                    x * &f[j]
                } else {
                    x * (&one - &f[j - d])
                }
            })
        })
        .collect();
    let pi = RatVector::new(
        (0..2 * d)
            .map(|j| {
                if j < d {
                    &p.pi()[j] * &f[j]
                } else {
                    &p.pi()[j - d] * (&one - &f[j - d])
                }
            })
            .collect(),
    )
    .expect("nonempty");
    let out = RatVector::new(
        (0..2 * d)
            .map(|j| if j < d { one.clone() } else { Rational::zero() })
            .collect(),
    )
    .expect("nonempty");
    Ok(Pfa::new(
        p.alphabet().to_vec(),
        ms,
        pi,
        out,
        p.cutpoint().clone(),
        p.mode(),
    )?)
}

/// `M∞`: state `q` moves to `q_A` with probability `f_q`, to `q_R` otherwise.
pub fn m_infinity(f: &RatVector, qa: usize, qr: usize) -> RatMatrix {
    let d = f.dim();
    let mut m = RatMatrix::zeros(d, d);
    for q in 0..d {
        m.set(q, qa, f[q].clone());
        let rest = Rational::one() - &f[q];
        let cur = m.get(q, qr).clone();
        m.set(q, qr, cur + rest);
    }
    m
}

/// Moves the output vector into a final symbol. The matrix of `finish` (if
/// given) is replaced by `M_finish·M∞` under the name `new_symbol`; otherwise
/// `M∞` is appended. The output becomes the unit vector at `q_A`, strict `1/4`.
pub fn m_infinity_closure(
    p: &Pfa,
    qa: usize,
    qr: usize,
    finish: Option<&str>,
    new_symbol: &str,
) -> Result<Pfa, CompileError> {
    let d = p.dim();
    if qa >= d || qr >= d || p.out()[qa] != rat(1, 8) || !p.out()[qr].is_zero() {
        return Err(CompileError::MissingAcceptReject);
    }
    let minf = m_infinity(p.out(), qa, qr);
    let fin = match finish {
        Some(s) => Some(
            p.symbol_index(s)
                .ok_or_else(|| PfaError::UnknownSymbol(s.to_string()))?,
        ),
        None => None,
    };
    let mut alphabet = Vec::new();
    let mut ms = Vec::new();
    for (i, (s, m)) in p.alphabet().iter().zip(p.matrices()).enumerate() {
        if Some(i) != fin {
            alphabet.push(s.clone());
            ms.push(m.clone());
        }
    }
    let new = match fin {
        Some(i) => p.matrices()[i].mul(&minf).expect("dims"),
        None => minf,
    };
    alphabet.push(new_symbol.to_string());
    ms.push(new);
    Ok(Pfa::new(
        alphabet,
        ms,
        p.pi().clone(),
        RatVector::unit(d, qa),
        rat(1, 4),
        Mode::Strict,
    )?)
}

/// Codeword of the `i`-th symbol (0-based) among `k`: `a^i b` for `i < k−1`,
/// `a^{k−1}` for the last symbol.
pub fn codeword(i: usize, k: usize) -> String {
    let mut s = "a".repeat(i);
    if i + 1 < k {
        s.push('b');
    }
    s
}

/// Binary alphabet `{a, b}` on `(k−1)·d` states. Block `j` remembers that `j`
/// letters `a` of the current codeword were read. `τ(u)` scores as `u`; a
/// word ending inside a codeword scores 0.
pub fn code_binary(p: &Pfa) -> Result<Pfa, CompileError> {
    let k = p.alphabet().len();
    if k <= 2 {
        return Err(CompileError::AlphabetTooSmall);
    }
    let d = p.dim();
    let blocks = k - 1;
    let n = blocks * d;
    let mut ma = RatMatrix::zeros(n, n);
    let mut mb = RatMatrix::zeros(n, n);
    let id = RatMatrix::identity(d);
    for j in 0..blocks {
        if j + 1 < blocks {
            ma.put_block(j * d, (j + 1) * d, &id);
        } else {
            ma.put_block(j * d, 0, &p.matrices()[k - 1]);
        }
        mb.put_block(j * d, 0, &p.matrices()[j]);
    }
    let mut pi = RatVector::zeros(n);
    let mut out = RatVector::zeros(n);
    for q in 0..d {
        pi[q] = p.pi()[q].clone();
        out[q] = p.out()[q].clone();
    }
    Ok(Pfa::new(
        vec!["a".into(), "b".into()],
        vec![ma, mb],
        pi,
        out,
        p.cutpoint().clone(),
        p.mode(),
    )?)
}

/// `τ(u)` as a list of `"a"`/`"b"` symbols.
pub fn encode_word(u: &[usize], k: usize) -> Vec<String> {
    u.iter()
        .flat_map(|&i| codeword(i, k).chars().map(|c| c.to_string()).collect::<Vec<_>>())
        .collect()
}

/// Closed-form score `1/2 − 1/4(φ−ψ)²` of the weak constructions.
pub fn equality_score(phi: &Rational, psi: &Rational) -> Rational {
    let d = phi - psi;
    rat(1, 2) - rat(1, 4) * &d * &d
}

/// `(φ(a), ψ(a))` for an index word.
pub fn phi_psi(inst: &BinPcp, word: &[usize]) -> (Rational, Rational) {
    let mut v = Vec::new();
    let mut w = Vec::new();
    for &i in word.iter().rev() {
        v.extend_from_slice(&inst.pairs[i].0);
        w.extend_from_slice(&inst.pairs[i].1);
    }
    (BinWord::new(v).fraction(), BinWord::new(w).fraction())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::int;
    use crate::pcp::antizero;
    use crate::pfa::{all_probabilities, bounded_search, words_up_to, Want};

    fn classic() -> BinPcp {
        antizero(&BinPcp::classic())
    }

    #[test]
    fn eleven_states_close_with_end() {
        let inst = BinPcp::from_strs(Variant::Rmpcp, &[("1", "11"), ("11", "1"), ("01", "1")]);
        let p = eleven_state_rmpcp(&inst).unwrap();
        let mut hits = 0;
        assert_eq!((p.dim(), p.alphabet().len()), (11, 3));
        for (w, x) in crate::pfa::all_probabilities(&p, 4) {
            let closed = w.last() == Some(&2);
            let body: Vec<usize> = if closed {
                w[..w.len() - 1].to_vec()
            } else {
                w.clone()
            };
            let mut v = inst.pairs[0].0.clone();
            let mut u = inst.pairs[0].1.clone();
            for &i in &body {
                if i == 2 {
                    break;
                }
                v = [inst.pairs[i + 1].0.clone(), v].concat();
                u = [inst.pairs[i + 1].1.clone(), u].concat();
            }
            let sol = closed && !body.contains(&2) && v == u;
            assert_eq!(x > rat(1, 4), sol, "{w:?}: {x}");
            hits += sol as usize;
        }
        assert!(hits > 0);
    }

    #[test]
    fn phi_reads_reversed_concatenation() {
        let inst = BinPcp::from_strs(Variant::Plain, &[("00110", "1"), ("01", "10")]);
        let (phi, psi) = phi_psi_automata(&inst).unwrap();
        assert_eq!(phi.accept_prob(&["1"]).unwrap(), rat(6, 32));
        assert_eq!(
            phi.accept_prob(&["1", "2"]).unwrap(),
            "0100110".parse::<BinWord>().unwrap().fraction()
        );
        assert_eq!(
            psi.accept_prob(&["2", "1"]).unwrap(),
            "110".parse::<BinWord>().unwrap().fraction()
        );
    }

    #[test]
    fn symmetric_pair_gives_equal_automata() {
        let inst = BinPcp::from_strs(Variant::Plain, &[("1", "1")]);
        let (phi, psi) = phi_psi_automata(&inst).unwrap();
        assert_eq!(phi, psi);
    }

    #[test]
    fn thirteen_states_shape() {
        let p = equality_pfa_13(&classic()).unwrap();
        assert_eq!(p.dim(), 13);
        assert_eq!(p.out().sum(), int(7));
        let q = equality_pfa_11(&classic()).unwrap();
        assert_eq!(q.dim(), 11);
        assert_eq!(q.out().sum(), int(5));
        assert_eq!(p.accept_prob::<&str>(&[]).unwrap(), int(0));
    }

    #[test]
    fn closed_form_on_single_pair() {
        let inst = classic();
        let p = equality_pfa_13(&inst).unwrap();
        let want = equality_score(&inst.v(0).fraction(), &inst.w(0).fraction());
        assert_eq!(p.accept_prob(&["1"]).unwrap(), want);
        assert!(want < rat(1, 2));
    }

    #[test]
    fn merged_matrix_is_stochastic() {
        let b = b_matrix(&"0110".parse().unwrap());
        let m = merged3(&b);
        assert!(m.is_row_stochastic());
    }

    #[test]
    fn strict_gadget_split() {
        let inst = classic();
        let p = strict15(&inst, &GadgetParams::separating(&inst)).unwrap();
        assert_eq!(p.dim(), 15);
        assert_eq!(p.accept_prob::<&str>(&[]).unwrap(), int(0));
        let sol = ["1", "3", "2", "3"];
        assert!(p.accept_prob(&sol).unwrap() > rat(1, 4));
    }

    #[test]
    fn gamma_divisibility_checked() {
        let inst = classic();
        let mut params = GadgetParams::unit(&inst);
        params.gamma = rat(1, 3) * rat(1, 4);
        assert!(matches!(
            strict15(&inst, &params),
            Err(CompileError::GammaDivisibility { .. })
        ));
    }

    #[test]
    fn other_cutpoints() {
        let inst = classic();
        for lam in [rat(1, 10), rat(1, 3), rat(9, 20)] {
            let params = GadgetParams::separating(&inst).with_cutpoint(lam.clone());
            let p = strict13(&inst, &params).unwrap();
            for (w, x) in all_probabilities(&p, 4) {
                let is_sol = w == vec![0, 2, 1, 2];
                assert_eq!(x > lam, is_sol, "word {w:?}");
            }
        }
        assert_eq!(
            strict13(&inst, &GadgetParams::separating(&inst).with_cutpoint(rat(1, 2))),
            Err(CompileError::BadCutpoint)
        );
    }

    #[test]
    fn nine_state_center() {
        assert_eq!(f_hat()[4], rat(5, 8));
    }

    #[test]
    fn nine_state_empty_word() {
        let p = nine_state_pfa(&classic()).unwrap();
        assert_eq!(p.accept_prob::<&str>(&[]).unwrap(), rat(1, 2));
    }

    #[test]
    fn eliminate_all_ones_out() {
        let inst = classic();
        let p = nine_state_pfa(&inst).unwrap();
        let ones = Pfa::new(
            p.alphabet().to_vec(),
            p.matrices().to_vec(),
            p.pi().clone(),
            RatVector::ones(9),
            rat(1, 2),
            Mode::Weak,
        )
        .unwrap();
        let e = eliminate_output_vector(&ones).unwrap();
        for m in e.matrices() {
            for j in 9..18 {
                assert!(m.col(j).iter().all(|x| x.is_zero()));
            }
        }
    }

    #[test]
    fn m_infinity_identity() {
        let f = f_hat_11();
        let m = m_infinity(&f, 9, 10);
        assert_eq!(m.mul_vec(&RatVector::unit(11, 9)).unwrap(), f);
        assert!(m.is_row_stochastic());
    }

    #[test]
    fn code_binary_three_symbols() {
        assert_eq!(
            (0..3).map(|i| codeword(i, 3)).collect::<Vec<_>>(),
            vec!["b", "ab", "aa"]
        );
        let inst = classic();
        let p = equality_pfa_11(&inst).unwrap();
        let c = code_binary(&p).unwrap();
        assert_eq!(c.dim(), 22);
        let ma = &c.matrices()[0];
        assert_eq!(ma.block(0, 11, 11, 11), RatMatrix::identity(11));
        assert_eq!(ma.block(11, 0, 11, 11), p.matrices()[2]);
        for u in words_up_to(3, 3) {
            assert_eq!(
                c.accept_prob(&encode_word(&u, 3)).unwrap(),
                p.accept_prob_idx(&u).unwrap()
            );
        }
        assert_eq!(c.accept_prob(&["b", "b", "a"]).unwrap(), int(0));
    }

    #[test]
    fn search_finds_classic_witness() {
        let inst = classic();
        let p = strict15(&inst, &GadgetParams::separating(&inst)).unwrap();
        let r = bounded_search(&p, 4, &Want::from_pfa(&p));
        let w = r.witness.unwrap();
        assert_eq!(w.word, vec!["1", "3", "2", "3"]);
        assert!(w.probability > rat(1, 4));
    }
}
