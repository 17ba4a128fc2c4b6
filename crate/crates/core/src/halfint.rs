//! Exact arithmetic over the half-integers.
//!
//! Every quantity is stored doubled: the integer `d` represents `d / 2`.
//! A product of two doubled values is four times the true product, so the
//! multiplication kernels halve the accumulated sum and refuse to continue
//! when the halving is inexact.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An element of (1/2)·ℤ, stored as twice its value.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HalfInt(i64);

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt(0);
    pub const ONE: HalfInt = HalfInt(2);
    pub const HALF: HalfInt = HalfInt(1);

    pub const fn from_doubled(doubled: i64) -> Self {
        HalfInt(doubled)
    }

    pub const fn from_int(value: i64) -> Self {
        HalfInt(2 * value)
    }

    pub const fn doubled(self) -> i64 {
        self.0
    }

    pub const fn is_zero(self) -> bool {
        self.0 == 0
    }

    pub const fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / 2.0
    }

    pub fn checked_add(self, rhs: HalfInt) -> Result<HalfInt> {
        self.0
            .checked_add(rhs.0)
            .map(HalfInt)
            .ok_or(Error::Overflow("half-integer addition"))
    }

    /// Exact product; fails when the result is not a half-integer.
    pub fn checked_mul(self, rhs: HalfInt) -> Result<HalfInt> {
        let quad = self
            .0
            .checked_mul(rhs.0)
            .ok_or(Error::Overflow("half-integer product"))?;
        halve(quad, 0, 0).map(HalfInt)
    }
}

impl Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 + rhs.0)
    }
}

impl Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 - rhs.0)
    }
}

impl Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt(-self.0)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

/// Divides an accumulated doubled×doubled sum by two, exactly.
#[inline]
pub(crate) fn halve(value: i64, row: usize, col: usize) -> Result<i64> {
    if value % 2 != 0 {
        return Err(Error::InexactHalving { row, col, value });
    }
    Ok(value / 2)
}

/// Dense row-major matrix over (1/2)·ℤ in doubled encoding.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct HalfIntMatrix {
    rows: usize,
    cols: usize,
    doubled: Vec<i64>,
}

impl fmt::Debug for HalfIntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HalfIntMatrix({}x{}, nnz={})", self.rows, self.cols, self.nnz())
    }
}

impl HalfIntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self {
            rows,
            cols,
            doubled: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.doubled[i * n + i] = 2;
        }
        m
    }

    pub fn from_doubled(rows: usize, cols: usize, doubled: Vec<i64>) -> Result<Self> {
        if rows == 0 || cols == 0 || doubled.len() != rows * cols {
            return Err(Error::InvalidInput(format!(
                "{} doubled entries do not fill a {rows}x{cols} matrix",
                doubled.len()
            )));
        }
        Ok(Self { rows, cols, doubled })
    }

    /// Builds a matrix with integer entries.
    pub fn from_ints(rows: usize, cols: usize, ints: &[i64]) -> Result<Self> {
        Self::from_doubled(rows, cols, ints.iter().map(|v| 2 * v).collect())
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> HalfInt) -> Self {
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m.doubled[r * cols + c] = f(r, c).doubled();
            }
        }
        m
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

    pub fn doubled_entries(&self) -> &[i64] {
        &self.doubled
    }

    pub fn into_doubled_entries(self) -> Vec<i64> {
        self.doubled
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> HalfInt {
        HalfInt(self.doubled[row * self.cols + col])
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: HalfInt) {
        self.doubled[row * self.cols + col] = value.doubled();
    }

    pub fn row(&self, row: usize) -> &[i64] {
        &self.doubled[row * self.cols..(row + 1) * self.cols]
    }

    pub fn nnz(&self) -> usize {
        self.doubled.iter().filter(|&&v| v != 0).count()
    }

    pub fn is_zero(&self) -> bool {
        self.doubled.iter().all(|&v| v == 0)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.doubled[c * self.rows + r] = self.doubled[r * self.cols + c];
            }
        }
        t
    }

    pub fn neg(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            doubled: self.doubled.iter().map(|v| -v).collect(),
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, "add", i64::checked_add)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, "sub", i64::checked_sub)
    }

    /// Multiplies every entry by an integer.
    pub fn checked_scale(&self, factor: i64) -> Result<Self> {
        let doubled = self
            .doubled
            .iter()
            .map(|v| v.checked_mul(factor).ok_or(Error::Overflow("matrix scale")))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { doubled, ..*self })
    }

    fn zip_with(&self, other: &Self, op: &'static str, f: impl Fn(i64, i64) -> Option<i64>) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(Error::DimensionMismatch {
                op,
                left: self.shape(),
                right: other.shape(),
            });
        }
        let doubled = self
            .doubled
            .iter()
            .zip(&other.doubled)
            .map(|(&a, &b)| f(a, b).ok_or(Error::Overflow(op)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { doubled, ..*self })
    }

    /// True when every row and every column holds exactly one nonzero entry, equal to ±1.
    pub fn is_signed_permutation(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        let n = self.rows;
        let mut col_seen = vec![false; n];
        for r in 0..n {
            let mut count = 0;
            for c in 0..n {
                let v = self.doubled[r * n + c];
                if v == 0 {
                    continue;
                }
                if v.abs() != 2 || col_seen[c] {
                    return false;
                }
                col_seen[c] = true;
                count += 1;
            }
            if count != 1 {
                return false;
            }
        }
        true
    }

    pub fn to_f64_vec(&self) -> Vec<f64> {
        self.doubled.iter().map(|&v| v as f64 / 2.0).collect()
    }
}

/// Exact matrix product.
pub fn mat_mul(a: &HalfIntMatrix, b: &HalfIntMatrix) -> Result<HalfIntMatrix> {
    halved(a.rows, b.cols, mul_quadrupled(a, b)?)
}

/// Row-major product at four times its true value.
fn mul_quadrupled(a: &HalfIntMatrix, b: &HalfIntMatrix) -> Result<Vec<i64>> {
    if a.cols != b.rows {
        return Err(Error::DimensionMismatch {
            op: "mat_mul",
            left: a.shape(),
            right: b.shape(),
        });
    }
    let (n, m, p) = (a.rows, a.cols, b.cols);
    let mut acc = vec![0i64; n * p];
    for i in 0..n {
        let out = &mut acc[i * p..(i + 1) * p];
        for k in 0..m {
            let aik = a.doubled[i * m + k];
            if aik == 0 {
                continue;
            }
            let brow = &b.doubled[k * p..(k + 1) * p];
            for (o, &bkj) in out.iter_mut().zip(brow) {
                if bkj == 0 {
                    continue;
                }
                let prod = aik.checked_mul(bkj).ok_or(Error::Overflow("mat_mul"))?;
                *o = o.checked_add(prod).ok_or(Error::Overflow("mat_mul"))?;
            }
        }
    }
    Ok(acc)
}

fn halved(rows: usize, cols: usize, mut acc: Vec<i64>) -> Result<HalfIntMatrix> {
    for (idx, v) in acc.iter_mut().enumerate() {
        *v = halve(*v, idx / cols, idx % cols)?;
    }
    Ok(HalfIntMatrix {
        rows,
        cols,
        doubled: acc,
    })
}

/// Exact `a·b − b·a`.
pub fn commutator(a: &HalfIntMatrix, b: &HalfIntMatrix) -> Result<HalfIntMatrix> {
    if !a.is_square() || a.shape() != b.shape() {
        return Err(Error::DimensionMismatch {
            op: "commutator",
            left: a.shape(),
            right: b.shape(),
        });
    }
    let ab = mul_quadrupled(a, b)?;
    let ba = mul_quadrupled(b, a)?;
    let diff = ab
        .iter()
        .zip(&ba)
        .map(|(x, y)| x.checked_sub(*y).ok_or(Error::Overflow("commutator")))
        .collect::<Result<Vec<_>>>()?;
    halved(a.rows, a.cols, diff)
}

/// Exact `trace(a·b)` without forming the product.
pub fn trace_pairing(a: &HalfIntMatrix, b: &HalfIntMatrix) -> Result<HalfInt> {
    if !a.is_square() || a.shape() != b.shape() {
        return Err(Error::DimensionMismatch {
            op: "trace_pairing",
            left: a.shape(),
            right: b.shape(),
        });
    }
    let n = a.rows;
    let mut acc = 0i64;
    for i in 0..n {
        for k in 0..n {
            let aik = a.doubled[i * n + k];
            if aik == 0 {
                continue;
            }
            let bki = b.doubled[k * n + i];
            let prod = aik.checked_mul(bki).ok_or(Error::Overflow("trace_pairing"))?;
            acc = acc.checked_add(prod).ok_or(Error::Overflow("trace_pairing"))?;
        }
    }
    halve(acc, 0, 0).map(HalfInt)
}
