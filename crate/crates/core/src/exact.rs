//! Exact rational scalars, vectors and dense matrices.
//!
//! Every probability in the crate is a [`Rational`]. Vectors and matrices are
//! dense and row-major. JSON encodes a rational as the string `"num/den"`
//! (integers as `"num"`).

use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub type Rational = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExactError {
    #[error("dimension mismatch in {op}: {left:?} vs {right:?}")]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("empty vector or matrix")]
    Empty,
    #[error("ragged matrix rows")]
    Ragged,
    #[error("cannot parse rational {0:?}")]
    Parse(String),
}

/// `n/d` as a rational. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn big(n: BigInt) -> Rational {
    Rational::from_integer(n)
}

/// `2^k` for any integer `k`.
pub fn pow2(k: i64) -> Rational {
    let p = BigInt::one() << k.unsigned_abs();
    if k >= 0 {
        big(p)
    } else {
        Rational::new(BigInt::one(), p)
    }
}

/// `x^e` for a nonnegative exponent.
pub fn powu(x: &Rational, e: u64) -> Rational {
    num_traits::pow::pow(x.clone(), e as usize)
}

pub fn parse_rational(s: &str) -> Result<Rational, ExactError> {
    let s = s.trim();
    let err = || ExactError::Parse(s.to_string());
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| err())?;
            let d: BigInt = d.trim().parse().map_err(|_| err())?;
            if d.is_zero() {
                return Err(err());
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(big(s.parse().map_err(|_| err())?)),
    }
}

pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// True if `r` is an integer multiple of `unit`.
pub fn is_multiple_of(r: &Rational, unit: &Rational) -> bool {
    (r / unit).is_integer()
}

/// Serde adapter for a single rational.
pub mod serde_rational {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        match v {
            serde_json::Value::String(s) => parse_rational(&s).map_err(D::Error::custom),
            serde_json::Value::Number(n) if n.is_i64() => Ok(int(n.as_i64().unwrap())),
            other => Err(D::Error::custom(format!("expected rational, got {other}"))),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatVector {
    entries: Vec<Rational>,
}

impl RatVector {
    pub fn new(entries: Vec<Rational>) -> Result<Self, ExactError> {
        if entries.is_empty() {
            return Err(ExactError::Empty);
        }
        Ok(RatVector { entries })
    }

    pub fn from_ints(xs: &[i64]) -> Self {
        RatVector::new(xs.iter().map(|&x| int(x)).collect()).expect("nonempty")
    }

    pub fn zeros(n: usize) -> Self {
        RatVector::new(vec![Rational::zero(); n]).expect("nonempty")
    }

    pub fn ones(n: usize) -> Self {
        RatVector::new(vec![Rational::one(); n]).expect("nonempty")
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = Self::zeros(n);
        v.entries[i] = Rational::one();
        v
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<Rational> {
        self.entries
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Rational> {
        self.entries.iter()
    }

    pub fn sum(&self) -> Rational {
        self.entries.iter().fold(Rational::zero(), |a, b| a + b)
    }

    pub fn dot(&self, other: &RatVector) -> Result<Rational, ExactError> {
        if self.dim() != other.dim() {
            return Err(ExactError::DimensionMismatch {
                op: "dot",
                left: (1, self.dim()),
                right: (other.dim(), 1),
            });
        }
        let mut acc = Rational::zero();
        for (a, b) in self.entries.iter().zip(&other.entries) {
            if !a.is_zero() && !b.is_zero() {
                acc += a * b;
            }
        }
        Ok(acc)
    }

    /// Row vector times matrix: `selfᵀ · m`.
    pub fn mul_mat(&self, m: &RatMatrix) -> Result<RatVector, ExactError> {
        if self.dim() != m.rows {
            return Err(ExactError::DimensionMismatch {
                op: "vec_mul_mat",
                left: (1, self.dim()),
                right: (m.rows, m.cols),
            });
        }
        let mut out = vec![Rational::zero(); m.cols];
        for (i, a) in self.entries.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                let b = &m.data[i * m.cols + j];
                if !b.is_zero() {
                    *o += a * b;
                }
            }
        }
        Ok(RatVector { entries: out })
    }

    pub fn scale(&self, s: &Rational) -> RatVector {
        RatVector {
            entries: self.entries.iter().map(|x| x * s).collect(),
        }
    }

    pub fn add(&self, other: &RatVector) -> Result<RatVector, ExactError> {
        if self.dim() != other.dim() {
            return Err(ExactError::DimensionMismatch {
                op: "vec_add",
                left: (1, self.dim()),
                right: (1, other.dim()),
            });
        }
        Ok(RatVector {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn concat(parts: &[&RatVector]) -> RatVector {
        RatVector {
            entries: parts.iter().flat_map(|p| p.entries.iter().cloned()).collect(),
        }
    }

    pub fn kron(&self, other: &RatVector) -> RatVector {
        let mut entries = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.entries {
            for b in &other.entries {
                entries.push(a * b);
            }
        }
        RatVector { entries }
    }

    /// Nonnegative entries summing to 1.
    pub fn is_distribution(&self) -> bool {
        self.entries.iter().all(|x| !x.is_negative()) && self.sum().is_one()
    }

    /// All entries in `[0, 1]`.
    pub fn in_unit_box(&self) -> bool {
        self.entries
            .iter()
            .all(|x| !x.is_negative() && *x <= Rational::one())
    }
}

impl Index<usize> for RatVector {
    type Output = Rational;
    fn index(&self, i: usize) -> &Rational {
        &self.entries[i]
    }
}

impl IndexMut<usize> for RatVector {
    fn index_mut(&mut self, i: usize) -> &mut Rational {
        &mut self.entries[i]
    }
}

impl fmt::Debug for RatVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries.iter().map(format_rational).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

impl Serialize for RatVector {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<String> = self.entries.iter().map(format_rational).collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RatVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw: Vec<serde_json::Value> = Vec::deserialize(d)?;
        let entries = raw
            .into_iter()
            .map(|v| serde_rational::deserialize(v).map_err(D::Error::custom))
            .collect::<Result<Vec<_>, _>>()?;
        RatVector::new(entries).map_err(D::Error::custom)
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RatMatrix {
    pub fn new(rows: Vec<Vec<Rational>>) -> Result<Self, ExactError> {
        let r = rows.len();
        if r == 0 || rows[0].is_empty() {
            return Err(ExactError::Empty);
        }
        let c = rows[0].len();
        if rows.iter().any(|row| row.len() != c) {
            return Err(ExactError::Ragged);
        }
        Ok(RatMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        assert!(rows > 0 && cols > 0, "empty matrix");
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        RatMatrix { rows, cols, data }
    }

    pub fn from_ints(rows: &[&[i64]]) -> Self {
        RatMatrix::new(rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect())
            .expect("well-formed integer matrix")
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| Rational::zero())
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(
            n,
            n,
            |i, j| if i == j { Rational::one() } else { Rational::zero() },
        )
    }

    /// The uniform stochastic matrix `J` with every entry `1/d`.
    pub fn uniform(d: usize) -> Self {
        let e = rat(1, d as i64);
        Self::from_fn(d, d, |_, _| e.clone())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> RatVector {
        RatVector {
            entries: self.data[i * self.cols..(i + 1) * self.cols].to_vec(),
        }
    }

    pub fn col(&self, j: usize) -> RatVector {
        RatVector {
            entries: (0..self.rows).map(|i| self.get(i, j).clone()).collect(),
        }
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        self.data.chunks(self.cols).map(|c| c.to_vec()).collect()
    }

    pub fn entries(&self) -> &[Rational] {
        &self.data
    }

    pub fn mul(&self, b: &RatMatrix) -> Result<RatMatrix, ExactError> {
        if self.cols != b.rows {
            return Err(ExactError::DimensionMismatch {
                op: "mat_mul",
                left: self.shape(),
                right: b.shape(),
            });
        }
        let mut out = vec![Rational::zero(); self.rows * b.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.data[i * self.cols + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..b.cols {
                    let x = &b.data[k * b.cols + j];
                    if !x.is_zero() {
                        out[i * b.cols + j] += a * x;
                    }
                }
            }
        }
        Ok(RatMatrix {
            rows: self.rows,
            cols: b.cols,
            data: out,
        })
    }

    /// Matrix times column vector.
    pub fn mul_vec(&self, v: &RatVector) -> Result<RatVector, ExactError> {
        if self.cols != v.dim() {
            return Err(ExactError::DimensionMismatch {
                op: "mat_mul_vec",
                left: self.shape(),
                right: (v.dim(), 1),
            });
        }
        let entries = (0..self.rows)
            .map(|i| {
                let mut acc = Rational::zero();
                for j in 0..self.cols {
                    let a = &self.data[i * self.cols + j];
                    if !a.is_zero() && !v[j].is_zero() {
                        acc += a * &v[j];
                    }
                }
                acc
            })
            .collect();
        Ok(RatVector { entries })
    }

    /// Product of a nonempty chain, left to right.
    pub fn chain(ms: &[&RatMatrix]) -> Result<RatMatrix, ExactError> {
        let (first, rest) = ms.split_first().ok_or(ExactError::Empty)?;
        rest.iter().try_fold((*first).clone(), |acc, m| acc.mul(m))
    }

    /// `(a⊗b)[(i,k),(j,l)] = a[i,j]·b[k,l]`.
    pub fn kron(&self, b: &RatMatrix) -> RatMatrix {
        let rows = self.rows * b.rows;
        let cols = self.cols * b.cols;
        Self::from_fn(rows, cols, |r, c| {
            let (i, k) = (r / b.rows, r % b.rows);
            let (j, l) = (c / b.cols, c % b.cols);
            self.get(i, j) * b.get(k, l)
        })
    }

    pub fn transpose(&self) -> RatMatrix {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn add(&self, b: &RatMatrix) -> Result<RatMatrix, ExactError> {
        if self.shape() != b.shape() {
            return Err(ExactError::DimensionMismatch {
                op: "mat_add",
                left: self.shape(),
                right: b.shape(),
            });
        }
        Ok(RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&b.data).map(|(x, y)| x + y).collect(),
        })
    }

    pub fn scale(&self, s: &Rational) -> RatMatrix {
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn map(&self, f: impl Fn(&Rational) -> Rational) -> RatMatrix {
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    /// Block-diagonal matrix from square or rectangular blocks.
    pub fn block_diag(blocks: &[&RatMatrix]) -> RatMatrix {
        let rows: usize = blocks.iter().map(|b| b.rows).sum();
        let cols: usize = blocks.iter().map(|b| b.cols).sum();
        let mut m = Self::zeros(rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            m.put_block(r0, c0, b);
            r0 += b.rows;
            c0 += b.cols;
        }
        m
    }

    /// Copy `b` into `self` with its top-left corner at `(r0, c0)`.
    pub fn put_block(&mut self, r0: usize, c0: usize, b: &RatMatrix) {
        for i in 0..b.rows {
            for j in 0..b.cols {
                self.set(r0 + i, c0 + j, b.get(i, j).clone());
            }
        }
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> RatMatrix {
        Self::from_fn(rows, cols, |i, j| self.get(r0 + i, c0 + j).clone())
    }

    pub fn row_sums(&self) -> RatVector {
        RatVector {
            entries: (0..self.rows).map(|i| self.row(i).sum()).collect(),
        }
    }

    pub fn col_sums(&self) -> RatVector {
        RatVector {
            entries: (0..self.cols).map(|j| self.col(j).sum()).collect(),
        }
    }

    pub fn is_row_stochastic(&self) -> bool {
        self.data.iter().all(|x| !x.is_negative()) && (0..self.rows).all(|i| self.row(i).sum().is_one())
    }

    pub fn is_positive(&self) -> bool {
        self.data.iter().all(|x| x.is_positive())
    }

    pub fn min_entry(&self) -> Rational {
        self.data.iter().min().cloned().expect("nonempty")
    }

    pub fn max_abs(&self) -> Rational {
        self.data.iter().map(|x| x.abs()).max().expect("nonempty")
    }

    /// True if every entry is an integer multiple of `unit`.
    pub fn all_multiples_of(&self, unit: &Rational) -> bool {
        self.data.iter().all(|x| is_multiple_of(x, unit))
    }
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RatMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

impl Serialize for RatMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = self
            .data
            .chunks(self.cols)
            .map(|r| r.iter().map(format_rational).collect())
            .collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RatMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows: Vec<RatVector> = Vec::deserialize(d)?;
        RatMatrix::new(rows.into_iter().map(|r| r.entries).collect()).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["3/8", "-5/7", "0", "12", "1/4194304"] {
            assert_eq!(format_rational(&parse_rational(s).unwrap()), s);
        }
        assert_eq!(parse_rational("6/32").unwrap(), rat(3, 16));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn canonical_form() {
        let a = rat(6, 32);
        let b = rat(-3, -16);
        assert_eq!(a, b);
        assert_eq!(a.numer(), b.numer());
        assert_eq!(a.denom(), b.denom());
    }

    #[test]
    fn identity_is_neutral() {
        let x = RatMatrix::new(vec![vec![rat(1, 3), rat(2, 3)], vec![rat(1, 7), rat(6, 7)]]).unwrap();
        assert_eq!(RatMatrix::identity(2).mul(&x).unwrap(), x);
    }

    #[test]
    fn hand_product() {
        let a = RatMatrix::new(vec![vec![int(1), int(0)], vec![rat(1, 2), rat(1, 2)]]).unwrap();
        let b = RatMatrix::new(vec![vec![rat(1, 2), rat(1, 2)], vec![int(0), int(1)]]).unwrap();
        let want = RatMatrix::new(vec![vec![rat(1, 2), rat(1, 2)], vec![rat(1, 4), rat(3, 4)]]).unwrap();
        assert_eq!(a.mul(&b).unwrap(), want);
    }

    #[test]
    fn mismatch_is_error() {
        let a = RatMatrix::zeros(2, 3);
        assert!(matches!(a.mul(&a), Err(ExactError::DimensionMismatch { .. })));
    }

    #[test]
    fn kron_identity() {
        assert_eq!(
            RatMatrix::identity(2).kron(&RatMatrix::identity(2)),
            RatMatrix::identity(4)
        );
    }

    #[test]
    fn kron_corner() {
        let b1 = RatMatrix::new(vec![vec![rat(1, 2), rat(1, 2)], vec![int(0), int(1)]]).unwrap();
        let k = b1.kron(&b1);
        assert_eq!(k.shape(), (4, 4));
        assert_eq!(*k.get(0, 0), rat(1, 4));
        assert!(k.is_row_stochastic());
    }

    #[test]
    fn stochastic_and_positive_checks() {
        let m = RatMatrix::new(vec![vec![rat(1, 2), rat(1, 2)], vec![int(0), int(1)]]).unwrap();
        assert!(m.is_row_stochastic());
        assert!(!m.is_positive());
        let j = RatMatrix::uniform(9);
        assert!(j.is_row_stochastic() && j.is_positive());
        let bad = RatMatrix::from_ints(&[&[2, -1], &[0, 1]]);
        assert!(!bad.is_row_stochastic());
    }

    #[test]
    fn json_round_trip() {
        let m = RatMatrix::new(vec![vec![rat(26, 32), rat(6, 32)], vec![rat(25, 32), rat(7, 32)]]).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"[["13/16","3/16"],["25/32","7/32"]]"#);
        let back: RatMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        assert!(serde_json::from_str::<RatMatrix>(r#"[["1"],["1","2"]]"#).is_err());
    }

    #[test]
    fn pow2_signs() {
        assert_eq!(pow2(3), int(8));
        assert_eq!(pow2(-22), rat(1, 4194304));
        assert_eq!(pow2(0), int(1));
    }
}
