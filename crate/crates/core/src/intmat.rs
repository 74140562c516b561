//! Integer-matrix route: word pairs over `{1,2}` as 6×6 integer matrices,
//! Turakainen's conversion to stochastic matrices, and the reduction to a
//! two-letter alphabet that keeps an absorbing state unsplit.
//!
//! Binary instances are read as ternary digits via `0 ↦ 1`, `1 ↦ 2`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{big, int, pow2, ExactError, RatMatrix, RatVector, Rational};
use crate::pcp::{BinPcp, PcpError, Variant};
use crate::pcp2pfa::{codeword, pair_alphabet};
use crate::pfa::{Mode, Pfa, PfaError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IntError {
    #[error("not a word over {{1,2}}: {0:?}")]
    BadDigit(String),
    #[error("matrix {0} is not square or does not match the vector")]
    Shape(usize),
    #[error("need at least {need} matrices, got {got}")]
    TooFewMatrices { need: usize, got: usize },
    #[error(transparent)]
    Pcp(#[from] PcpError),
    #[error(transparent)]
    Pfa(#[from] PfaError),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// A word over the digits `{1,2}`.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct TernWord(Vec<u8>);

impl TernWord {
    pub fn new(digits: Vec<u8>) -> Result<Self, IntError> {
        if digits.iter().any(|d| *d != 1 && *d != 2) {
            return Err(IntError::BadDigit(format!("{digits:?}")));
        }
        Ok(TernWord(digits))
    }

    /// `0 ↦ 1`, `1 ↦ 2`.
    pub fn from_bits(bits: &[bool]) -> Self {
        TernWord(bits.iter().map(|&b| if b { 2 } else { 1 }).collect())
    }

    pub fn digits(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &TernWord) -> TernWord {
        let mut d = self.0.clone();
        d.extend_from_slice(&other.0);
        TernWord(d)
    }

    /// `(u)₃ = Σ uⱼ 3^{n−j}`; injective on `{1,2}*`.
    pub fn value(&self) -> BigInt {
        self.0
            .iter()
            .fold(BigInt::zero(), |acc, &d| acc * 3 + BigInt::from(d))
    }
}

impl FromStr for TernWord {
    type Err = IntError;
    fn from_str(s: &str) -> Result<Self, IntError> {
        let digits = s
            .chars()
            .map(|c| match c {
                '1' => Ok(1),
                '2' => Ok(2),
                _ => Err(IntError::BadDigit(s.into())),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(TernWord(digits))
    }
}

impl fmt::Display for TernWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.0 {
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for TernWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

impl Serialize for TernWord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for TernWord {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

fn pow3(e: usize) -> Rational {
    big(BigInt::from(3).pow(e as u32))
}

/// Claus's matrix; `A(v₁,w₁)A(v₂,w₂) = A(v₁v₂, w₁w₂)`.
pub fn claus_a(v: &TernWord, w: &TernWord) -> RatMatrix {
    let (x, y) = (big(v.value()), big(w.value()));
    let (a, b) = (pow3(v.len()), pow3(w.len()));
    let z = Rational::zero;
    let two = int(2);
    RatMatrix::new(vec![
        vec![
            Rational::one(),
            -&two * &x,
            &two * &y,
            &x * &x,
            &y * &y,
            -&two * &x * &y,
        ],
        vec![z(), a.clone(), z(), -&x * &a, z(), &y * &a],
        vec![z(), z(), b.clone(), z(), &y * &b, -&x * &b],
        vec![z(), z(), z(), &a * &a, z(), z()],
        vec![z(), z(), z(), z(), &b * &b, z()],
        vec![z(), z(), z(), z(), z(), &a * &b],
    ])
    .expect("6x6")
}

/// `(1,0,0,−1,−1,−1)`: `e₁ᵀA(v,w)f₁ = 1 − ((v)₃−(w)₃)²`.
pub fn claus_f1() -> RatVector {
    RatVector::from_ints(&[1, 0, 0, -1, -1, -1])
}

/// `(0,0,0,−1,−1,−1)`: `e₁ᵀA(v,w)f = −((v)₃−(w)₃)²`, for a weak criterion.
pub fn claus_f1_weak() -> RatVector {
    RatVector::from_ints(&[0, 0, 0, -1, -1, -1])
}

/// Hirvensalo's variant, last row a unit row;
/// `Ã(v₁,w₁)Ã(v₂,w₂) = Ã(v₂v₁, w₂w₁)`.
pub fn hirvensalo_a(v: &TernWord, w: &TernWord) -> RatMatrix {
    let (x, y) = (big(v.value()), big(w.value()));
    let (a, b) = (pow3(v.len()), pow3(w.len()));
    let z = Rational::zero;
    let two = int(2);
    RatMatrix::new(vec![
        vec![&a * &b, z(), z(), -&x * &b, &y * &a, -&two * &x * &y],
        vec![z(), &b * &b, z(), &y * &b, z(), &y * &y],
        vec![z(), z(), &a * &a, z(), -&x * &a, &x * &x],
        vec![z(), z(), z(), b.clone(), z(), &two * &y],
        vec![z(), z(), z(), z(), a.clone(), -&two * &x],
        vec![z(), z(), z(), z(), z(), Rational::one()],
    ])
    .expect("6x6")
}

/// `π₁ = (−2,−2,−2,0,0,1)`; with `η₁ = e₆` the value is `1 − 2Δ²`, never 0.
pub fn hirvensalo_pi1() -> RatVector {
    RatVector::from_ints(&[-2, -2, -2, 0, 0, 1])
}

pub fn hirvensalo_eta1() -> RatVector {
    RatVector::unit(6, 5)
}

/// `πᵀ M₁ ⋯ M_m f`.
pub fn chain_value(pi: &RatVector, ms: &[&RatMatrix], f: &RatVector) -> Result<Rational, ExactError> {
    let mut x = pi.clone();
    for m in ms {
        x = x.mul_mat(m)?;
    }
    x.dot(f)
}

/// `Dᵢ = [[Bᵢ, Bᵢf], [0, 0]]`: the new last state collects `Bᵢf`, so the
/// top-right entry of a nonempty product is `e₁ᵀB⋯Bf`; the empty product gives 0.
pub fn extend_final(bs: &[RatMatrix], f: &RatVector) -> Result<Vec<RatMatrix>, IntError> {
    bs.iter()
        .enumerate()
        .map(|(i, b)| {
            let d = b.rows();
            if !b.is_square() || f.dim() != d {
                return Err(IntError::Shape(i));
            }
            let mut m = RatMatrix::zeros(d + 1, d + 1);
            m.put_block(0, 0, b);
            let bf = b.mul_vec(f)?;
            for r in 0..d {
                m.set(r, d, bf[r].clone());
            }
            Ok(m)
        })
        .collect()
}

/// New start state 0 and final state `d+1`:
/// `Dᵢ = [[0, πᵀMᵢ, πᵀMᵢf], [0, Mᵢ, Mᵢf], [0, 0, 0]]`, used with `e₁` and `e_{d+2}`.
pub fn extend_start(ms: &[RatMatrix], pi: &RatVector, f: &RatVector) -> Result<Vec<RatMatrix>, IntError> {
    ms.iter()
        .enumerate()
        .map(|(i, m)| {
            let d = m.rows();
            if !m.is_square() || pi.dim() != d || f.dim() != d {
                return Err(IntError::Shape(i));
            }
            let mut out = RatMatrix::zeros(d + 2, d + 2);
            let row = pi.mul_mat(m)?;
            let mf = m.mul_vec(f)?;
            for j in 0..d {
                out.set(0, j + 1, row[j].clone());
            }
            out.set(0, d + 1, row.dot(f)?);
            out.put_block(1, 1, m);
            for r in 0..d {
                out.set(r + 1, d + 1, mf[r].clone());
            }
            Ok(out)
        })
        .collect()
}

/// `Eᵢ = [[Dᵢ, 0, tᵢ], [rᵢᵀ, 0, sᵢ], [0, 0, 0]]` with every row and column sum zero.
pub fn pad_zero_sums(d: &RatMatrix) -> RatMatrix {
    let n = d.rows();
    let mut e = RatMatrix::zeros(n + 2, n + 2);
    e.put_block(0, 0, d);
    let rs = d.row_sums();
    let cs = d.col_sums();
    let mut r_total = Rational::zero();
    for i in 0..n {
        e.set(i, n + 1, -&rs[i]);
        e.set(n, i, -&cs[i]);
        r_total -= &cs[i];
    }
    e.set(n, n + 1, -r_total);
    e
}

/// Result of the stochastic conversion `Fᵢ = J + αEᵢ`.
#[derive(Clone, Debug)]
pub struct Turakainen {
    pub e: Vec<RatMatrix>,
    pub f: Vec<RatMatrix>,
    pub alpha: Rational,
}

impl Turakainen {
    pub fn dim(&self) -> usize {
        self.f[0].rows()
    }

    /// `1/d + α^m·c`, the value of an `F`-chain whose `E`-chain gives `c`.
    pub fn lift(&self, m: usize, c: &Rational) -> Rational {
        Rational::one() / int(self.dim() as i64) + crate::exact::powu(&self.alpha, m as u64) * c
    }
}

/// Pads each `Dᵢ` to zero row and column sums and picks `α` as the largest
/// power of 1/2 making every `J + αEᵢ` strictly positive.
pub fn turakainen(ds: &[RatMatrix]) -> Result<Turakainen, IntError> {
    if ds.is_empty() {
        return Err(IntError::TooFewMatrices { need: 1, got: 0 });
    }
    let e: Vec<RatMatrix> = ds.iter().map(pad_zero_sums).collect();
    let n = e[0].rows();
    let inv_d = Rational::one() / int(n as i64);
    let worst = e
        .iter()
        .flat_map(|m| m.entries().iter())
        .filter(|x| x.is_negative())
        .map(|x| -x)
        .max()
        .unwrap_or_else(Rational::zero);
    let mut k = 0i64;
    while pow2(-k) * &worst >= inv_d {
        k += 1;
    }
    let alpha = pow2(-k);
    let j = RatMatrix::uniform(n);
    let f = e
        .iter()
        .map(|m| j.add(&m.scale(&alpha)).expect("same shape"))
        .collect::<Vec<_>>();
    debug_assert!(f.iter().all(|m| m.is_positive() && m.is_row_stochastic()));
    Ok(Turakainen { e, f, alpha })
}

/// Options of the nine-state construction.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClausOptions {
    /// The last pair only ever ends a solution; fold its matrix into `f₁`.
    #[serde(default)]
    pub merge_last: bool,
    /// Use `(0,0,0,−1,−1,−1)` and the weak cutpoint `≥ 1/9`.
    #[serde(default)]
    pub weak: bool,
}

/// Automaton plus the data behind it.
#[derive(Clone, Debug)]
pub struct IntPipeline {
    pub pfa: Pfa,
    pub alpha: Rational,
    /// Construction steps in order.
    pub steps: Vec<String>,
}

/// `e₁ᵀ F_{a₁}⋯F_{a_m} e₇ > 1/9` iff `a` solves the (plain) PCP. States:
/// six from `A`, the final state, two padding states.
pub fn claus9_pipeline(inst: &BinPcp, opts: ClausOptions) -> Result<IntPipeline, IntError> {
    let tern = |b: &Vec<bool>| TernWord::from_bits(b);
    let mut bs: Vec<RatMatrix> = inst
        .pairs
        .iter()
        .map(|(v, w)| claus_a(&tern(v), &tern(w)))
        .collect();
    let mut f1 = if opts.weak { claus_f1_weak() } else { claus_f1() };
    let mut alphabet = pair_alphabet(inst.k());
    let mut steps = vec!["integer matrices A(v,w)".to_string()];
    if opts.merge_last {
        if bs.len() < 2 {
            return Err(IntError::TooFewMatrices {
                need: 2,
                got: bs.len(),
            });
        }
        let last = bs.pop().expect("nonempty");
        alphabet.pop();
        f1 = last.mul_vec(&f1)?;
        steps.push("last pair folded into the final vector".into());
    }
    let ds = extend_final(&bs, &f1)?;
    steps.push("new final state".into());
    let t = turakainen(&ds)?;
    steps.push(format!(
        "stochastic conversion J + αE, α = {}",
        crate::exact::format_rational(&t.alpha)
    ));
    let n = t.dim();
    let (cut, mode) = (
        Rational::one() / int(n as i64),
        if opts.weak { Mode::Weak } else { Mode::Strict },
    );
    let pfa = Pfa::new(
        alphabet,
        t.f.clone(),
        RatVector::unit(n, 0),
        RatVector::unit(n, n - 3),
        cut,
        mode,
    )?;
    Ok(IntPipeline {
        pfa,
        alpha: t.alpha,
        steps,
    })
}

/// Intermediate data of the two-letter reduction.
#[derive(Clone, Debug)]
pub struct HirvensaloStages {
    /// `C₁ … C_n`, the matrices of pairs `3..k`.
    pub c: Vec<RatMatrix>,
    pub pi2: RatVector,
    pub f2: RatVector,
    pub ma: RatMatrix,
    pub mb: RatMatrix,
    pub pi3: RatVector,
    pub f3: RatVector,
}

impl HirvensaloStages {
    /// `π₂ᵀ C_{x₁} ⋯ C_{x_m} f₂` for 0-based indices into `c`.
    pub fn value(&self, word: &[usize]) -> Result<Rational, ExactError> {
        let ms: Vec<&RatMatrix> = word.iter().map(|&i| &self.c[i]).collect();
        chain_value(&self.pi2, &ms, &self.f2)
    }

    /// `π₃ᵀ M′_{y₁} ⋯ f₃` for a word over `{a, b}`.
    pub fn coded_value(&self, word: &[char]) -> Result<Rational, ExactError> {
        let ms: Vec<&RatMatrix> = word
            .iter()
            .map(|c| if *c == 'a' { &self.ma } else { &self.mb })
            .collect();
        chain_value(&self.pi3, &ms, &self.f3)
    }
}

/// Steps 1–3: `Ã` matrices, start and finish pairs merged into
/// `π₂ᵀ = π₁ᵀB_finish` and `f₂ = B_start η₁`, then the block reduction over
/// the codewords `b, ab, …, a^{n−2}b, a^{n−1}` with the absorbing last state
/// kept once. Values read the middle of a solution backwards.
pub fn hirvensalo_stages(inst: &BinPcp) -> Result<HirvensaloStages, IntError> {
    if inst.variant != Variant::TwoMpcp {
        return Err(PcpError::VariantMismatch {
            expected: Variant::TwoMpcp,
            got: inst.variant,
        }
        .into());
    }
    let n = inst.k().saturating_sub(2);
    if n < 2 {
        return Err(IntError::TooFewMatrices {
            need: 4,
            got: inst.k(),
        });
    }
    let b: Vec<RatMatrix> = inst
        .pairs
        .iter()
        .map(|(v, w)| hirvensalo_a(&TernWord::from_bits(v), &TernWord::from_bits(w)))
        .collect();
    let pi2 = hirvensalo_pi1().mul_mat(&b[1])?;
    let f2 = b[0].mul_vec(&hirvensalo_eta1())?;
    let c: Vec<RatMatrix> = b[2..].to_vec();
    let h = 5;
    let blocks = n - 1;
    let dim = blocks * h + 1;
    let last = dim - 1;
    let mut ma = RatMatrix::zeros(dim, dim);
    let mut mb = RatMatrix::zeros(dim, dim);
    let id = RatMatrix::identity(h);
    let put = |m: &mut RatMatrix, row_block: usize, ci: &RatMatrix| {
        m.put_block(row_block * h, 0, &ci.block(0, 0, h, h));
        for r in 0..h {
            m.set(row_block * h + r, last, ci.get(r, h).clone());
        }
    };
    for j in 0..blocks {
        if j + 1 < blocks {
            ma.put_block(j * h, (j + 1) * h, &id);
        } else {
            put(&mut ma, j, &c[n - 1]);
        }
        put(&mut mb, j, &c[j]);
    }
    ma.set(last, last, Rational::one());
    mb.set(last, last, Rational::one());
    let mut pi3 = RatVector::zeros(dim);
    let mut f3 = RatVector::zeros(dim);
    for r in 0..h {
        pi3[r] = pi2[r].clone();
        for j in 0..blocks {
            f3[j * h + r] = f2[r].clone();
        }
    }
    pi3[last] = pi2[h].clone();
    f3[last] = f2[h].clone();
    Ok(HirvensaloStages {
        c,
        pi2,
        f2,
        ma,
        mb,
        pi3,
        f3,
    })
}

/// Two-letter automaton: Steps 1–3, new start and final states, stochastic
/// conversion. For `k = 6` this has `3·5 + 1 + 2 + 2 = 20` states. A word
/// scores above `1/dim` iff it decodes (ignoring a trailing partial
/// codeword) to the reversed middle `a_{m−1}…a₂` of a solution.
pub fn hirvensalo_pipeline(inst: &BinPcp) -> Result<(IntPipeline, HirvensaloStages), IntError> {
    let st = hirvensalo_stages(inst)?;
    let ds = extend_start(&[st.ma.clone(), st.mb.clone()], &st.pi3, &st.f3)?;
    let t = turakainen(&ds)?;
    let n = t.dim();
    let pfa = Pfa::new(
        vec!["a".into(), "b".into()],
        t.f.clone(),
        RatVector::unit(n, 0),
        RatVector::unit(n, n - 3),
        Rational::one() / int(n as i64),
        Mode::Strict,
    )?;
    let steps = vec![
        "integer matrices Ã(v,w)".to_string(),
        "start and finish pairs merged into the boundary vectors".into(),
        format!("two-letter block reduction, {} codewords", inst.k() - 2),
        "new start and final states".into(),
        format!(
            "stochastic conversion J + αE, α = {}",
            crate::exact::format_rational(&t.alpha)
        ),
    ];
    Ok((
        IntPipeline {
            pfa,
            alpha: t.alpha,
            steps,
        },
        st,
    ))
}

/// `τ` for the two-letter reduction with `n` middle symbols, as characters.
pub fn encode_middle(word: &[usize], n: usize) -> Vec<char> {
    word.iter()
        .flat_map(|&i| codeword(i, n).chars().collect::<Vec<_>>())
        .collect()
}

/// True when `(v)₃ ≠ (w)₃` for distinct words; used by the injectivity check.
pub fn values_distinct(words: &[TernWord]) -> bool {
    let mut vals: Vec<BigInt> = words.iter().map(TernWord::value).collect();
    vals.sort();
    vals.windows(2).all(|w| w[0] != w[1])
}

/// `x` is odd, so `1 − 2Δ²` is never zero; kept for the parity check.
pub fn is_odd(x: &Rational) -> bool {
    x.is_integer() && x.numer().is_odd()
}
