//! Compressed-row half-integer matrices.
//!
//! Every generator in this crate has at most a handful of nonzeros per row,
//! so the exhaustive verification loops run on this representation. Results
//! are bit-identical to the dense kernels in [`crate::halfint`]; the tests
//! check the two against each other.

use crate::error::{Error, Result};
use crate::halfint::{halve, HalfInt, HalfIntMatrix};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SparseHalfIntMatrix {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    doubled: Vec<i64>,
}

impl SparseHalfIntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            row_ptr: vec![0; rows + 1],
            col_idx: Vec::new(),
            doubled: Vec::new(),
        }
    }

    /// Builds from `(row, col, doubled value)` triplets; duplicates are summed
    /// and zeros dropped.
    pub fn from_triplets(rows: usize, cols: usize, triplets: &[(usize, usize, i64)]) -> Result<Self> {
        let mut per_row: Vec<Vec<(usize, i64)>> = vec![Vec::new(); rows];
        for &(r, c, v) in triplets {
            if r >= rows || c >= cols {
                return Err(Error::InvalidInput(format!("triplet ({r}, {c}) outside {rows}x{cols}")));
            }
            per_row[r].push((c, v));
        }
        let mut m = Self::zeros(rows, cols);
        for (r, mut entries) in per_row.into_iter().enumerate() {
            entries.sort_by_key(|e| e.0);
            let mut i = 0;
            while i < entries.len() {
                let c = entries[i].0;
                let mut sum = 0i64;
                while i < entries.len() && entries[i].0 == c {
                    sum = sum
                        .checked_add(entries[i].1)
                        .ok_or(Error::Overflow("sparse assembly"))?;
                    i += 1;
                }
                if sum != 0 {
                    m.col_idx.push(c);
                    m.doubled.push(sum);
                }
            }
            m.row_ptr[r + 1] = m.col_idx.len();
        }
        Ok(m)
    }

    pub fn from_dense(d: &HalfIntMatrix) -> Self {
        let mut m = Self::zeros(d.rows(), d.cols());
        for r in 0..d.rows() {
            for (c, &v) in d.row(r).iter().enumerate() {
                if v != 0 {
                    m.col_idx.push(c);
                    m.doubled.push(v);
                }
            }
            m.row_ptr[r + 1] = m.col_idx.len();
        }
        m
    }

    pub fn to_dense(&self) -> HalfIntMatrix {
        let mut d = HalfIntMatrix::zeros(self.rows, self.cols);
        for (r, c, v) in self.iter() {
            d.set(r, c, HalfInt::from_doubled(v));
        }
        d
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

    pub fn nnz(&self) -> usize {
        self.doubled.len()
    }

    pub fn is_zero(&self) -> bool {
        self.doubled.is_empty()
    }

    /// Nonzeros of one row as `(col, doubled value)`.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, i64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.col_idx[span.clone()]
            .iter()
            .copied()
            .zip(self.doubled[span].iter().copied())
    }

    /// All nonzeros as `(row, col, doubled value)` in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, i64)> + '_ {
        (0..self.rows).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn get(&self, r: usize, c: usize) -> HalfInt {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.col_idx[span.clone()].binary_search(&c) {
            Ok(i) => HalfInt::from_doubled(self.doubled[span.start + i]),
            Err(_) => HalfInt::ZERO,
        }
    }

    pub fn transpose(&self) -> Self {
        let triplets: Vec<_> = self.iter().map(|(r, c, v)| (c, r, v)).collect();
        Self::from_triplets(self.cols, self.rows, &triplets).expect("transpose stays in bounds")
    }

    pub fn neg(&self) -> Self {
        Self {
            doubled: self.doubled.iter().map(|v| -v).collect(),
            ..self.clone()
        }
    }

    /// Returns a copy with `delta` (doubled) added at `(r, c)`.
    pub fn with_added(&self, r: usize, c: usize, delta: i64) -> Result<Self> {
        let mut t: Vec<_> = self.iter().collect();
        t.push((r, c, delta));
        Self::from_triplets(self.rows, self.cols, &t)
    }

    pub fn mat_mul(&self, other: &Self) -> Result<Self> {
        let quad = self.mul_quadrupled(other)?;
        quad.halved()
    }

    /// Product kept at four times its true value, so no halving is needed.
    fn mul_quadrupled(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                op: "sparse mat_mul",
                left: self.shape(),
                right: other.shape(),
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        let mut scratch = vec![0i64; other.cols];
        let mut touched: Vec<usize> = Vec::new();
        for r in 0..self.rows {
            for (k, a) in self.row(r) {
                for (c, b) in other.row(k) {
                    let prod = a.checked_mul(b).ok_or(Error::Overflow("sparse mat_mul"))?;
                    if scratch[c] == 0 {
                        touched.push(c);
                    }
                    scratch[c] = scratch[c].checked_add(prod).ok_or(Error::Overflow("sparse mat_mul"))?;
                }
            }
            touched.sort_unstable();
            touched.dedup();
            for &c in &touched {
                if scratch[c] != 0 {
                    out.col_idx.push(c);
                    out.doubled.push(scratch[c]);
                }
                scratch[c] = 0;
            }
            touched.clear();
            out.row_ptr[r + 1] = out.col_idx.len();
        }
        Ok(out)
    }

    fn halved(mut self) -> Result<Self> {
        for r in 0..self.rows {
            for i in self.row_ptr[r]..self.row_ptr[r + 1] {
                self.doubled[i] = halve(self.doubled[i], r, self.col_idx[i])?;
            }
        }
        Ok(self)
    }

    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.commutator_quadrupled(other)?.halved()
    }

    /// Nonzeros of `4·[self, other]` as `(row, col, value)`, exact even when
    /// the commutator itself has quarter-integer entries.
    pub fn commutator_quadrupled_entries(&self, other: &Self) -> Result<Vec<(usize, usize, i64)>> {
        Ok(self.commutator_quadrupled(other)?.iter().collect())
    }

    fn commutator_quadrupled(&self, other: &Self) -> Result<Self> {
        if self.rows != self.cols || self.shape() != other.shape() {
            return Err(Error::DimensionMismatch {
                op: "sparse commutator",
                left: self.shape(),
                right: other.shape(),
            });
        }
        let ab = self.mul_quadrupled(other)?;
        let ba = other.mul_quadrupled(self)?;
        ab.linear_combination(&[(1, &ba.neg())])
    }

    /// `trace(self · other)`.
    pub fn trace_pairing(&self, other: &Self) -> Result<HalfInt> {
        if self.rows != self.cols || self.shape() != other.shape() {
            return Err(Error::DimensionMismatch {
                op: "sparse trace_pairing",
                left: self.shape(),
                right: other.shape(),
            });
        }
        let mut acc = 0i64;
        for (i, k, a) in self.iter() {
            let b = other.get(k, i).doubled();
            if b != 0 {
                let prod = a.checked_mul(b).ok_or(Error::Overflow("sparse trace_pairing"))?;
                acc = acc.checked_add(prod).ok_or(Error::Overflow("sparse trace_pairing"))?;
            }
        }
        halve(acc, 0, 0).map(HalfInt::from_doubled)
    }

    /// `self + Σ factor_k · m_k` with integer factors.
    pub fn linear_combination(&self, terms: &[(i64, &Self)]) -> Result<Self> {
        let mut triplets: Vec<_> = self.iter().collect();
        for &(factor, m) in terms {
            if m.shape() != self.shape() {
                return Err(Error::DimensionMismatch {
                    op: "sparse linear_combination",
                    left: self.shape(),
                    right: m.shape(),
                });
            }
            for (r, c, v) in m.iter() {
                let scaled = v
                    .checked_mul(factor)
                    .ok_or(Error::Overflow("sparse linear_combination"))?;
                triplets.push((r, c, scaled));
            }
        }
        Self::from_triplets(self.rows, self.cols, &triplets)
    }

    /// Scales every entry by an integer.
    pub fn scaled(&self, factor: i64) -> Result<Self> {
        Self::zeros(self.rows, self.cols).linear_combination(&[(factor, self)])
    }

    /// Largest number of nonzeros in any row.
    pub fn max_row_nnz(&self) -> usize {
        (0..self.rows)
            .map(|r| self.row_ptr[r + 1] - self.row_ptr[r])
            .max()
            .unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::halfint::{commutator, mat_mul, trace_pairing};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_half(rng: &mut ChaCha8Rng, n: usize, density: f64) -> HalfIntMatrix {
        HalfIntMatrix::from_fn(n, n, |_, _| {
            if rng.random_bool(density) {
                HalfInt::from_doubled(rng.random_range(-4..=4))
            } else {
                HalfInt::ZERO
            }
        })
    }

    fn random_int(rng: &mut ChaCha8Rng, n: usize, density: f64) -> HalfIntMatrix {
        HalfIntMatrix::from_fn(n, n, |_, _| {
            if rng.random_bool(density) {
                HalfInt::from_int(rng.random_range(-3..=3))
            } else {
                HalfInt::ZERO
            }
        })
    }

    #[test]
    fn agrees_with_dense_kernels() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let a = random_int(&mut rng, 9, 0.3);
            let b = random_half(&mut rng, 9, 0.3);
            let (sa, sb) = (SparseHalfIntMatrix::from_dense(&a), SparseHalfIntMatrix::from_dense(&b));
            assert_eq!(sa.mat_mul(&sb).unwrap().to_dense(), mat_mul(&a, &b).unwrap());
            assert_eq!(sa.commutator(&sb).unwrap().to_dense(), commutator(&a, &b).unwrap());
            assert_eq!(sa.trace_pairing(&sb).unwrap(), trace_pairing(&a, &b).unwrap());
            assert_eq!(sa.transpose().to_dense(), a.transpose());
        }
    }

    #[test]
    fn inexact_products_fail_like_dense() {
        let h = HalfIntMatrix::from_doubled(2, 2, vec![1, 0, 0, 1]).unwrap();
        let s = SparseHalfIntMatrix::from_dense(&h);
        assert!(matches!(s.mat_mul(&s), Err(Error::InexactHalving { .. })));
        assert!(mat_mul(&h, &h).is_err());
    }

    #[test]
    fn triplets_merge_and_drop_zeros() {
        let m = SparseHalfIntMatrix::from_triplets(2, 2, &[(0, 1, 2), (0, 1, -2), (1, 0, 1), (1, 0, 1)]).unwrap();
        assert_eq!(m.nnz(), 1);
        assert_eq!(m.get(1, 0), HalfInt::ONE);
        assert!(SparseHalfIntMatrix::from_triplets(2, 2, &[(2, 0, 1)]).is_err());
    }
}
