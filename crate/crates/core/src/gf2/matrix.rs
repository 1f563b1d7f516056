use std::fmt;
use std::ops::{Add, Mul};

use super::vector::{words_for, BitVector, WORD_BITS};
use super::{Gf2Error, Subspace};

/// Default bound for [`BitMatrix::element_order`].
pub const DEFAULT_ORDER_CAP: u64 = 1_000_000;

/// A dense GF(2) matrix, row-major, each row packed into words.
///
/// Matrices act on row vectors from the right: the image of `v` under `m`
/// is `v * m`, and `a * b` means "first `a`, then `b`".
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        Self {
            rows,
            cols,
            stride,
            data: vec![0; rows * stride],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Stacks `rows` (all of length `cols`) into a matrix.
    pub fn from_rows(cols: usize, rows: &[BitVector]) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "row {i} has length {}, expected {cols}", r.len());
            m.row_words_mut(i).copy_from_slice(r.words());
        }
        m
    }

    /// Builds a matrix with at most 64 columns from one packed word per row.
    pub fn from_u64_rows(cols: usize, rows: &[u64]) -> Self {
        let vs: Vec<BitVector> = rows.iter().map(|&r| BitVector::from_u64(cols, r)).collect();
        Self::from_rows(cols, &vs)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn row_words(&self, i: usize) -> &[u64] {
        &self.data[i * self.stride..(i + 1) * self.stride]
    }

    #[inline]
    fn row_words_mut(&mut self, i: usize) -> &mut [u64] {
        &mut self.data[i * self.stride..(i + 1) * self.stride]
    }

    pub fn row(&self, i: usize) -> BitVector {
        BitVector::from_words(self.cols, self.row_words(i).to_vec())
    }

    pub fn row_vectors(&self) -> Vec<BitVector> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    /// Row `i` as a single word, when the matrix has at most 64 columns.
    #[inline]
    pub fn row_u64(&self, i: usize) -> u64 {
        debug_assert!(self.cols <= WORD_BITS);
        if self.stride == 0 {
            0
        } else {
            self.data[i]
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        (self.data[i * self.stride + j / WORD_BITS] >> (j % WORD_BITS)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        assert!(i < self.rows && j < self.cols);
        let idx = i * self.stride + j / WORD_BITS;
        let mask = 1u64 << (j % WORD_BITS);
        if value {
            self.data[idx] |= mask;
        } else {
            self.data[idx] &= !mask;
        }
    }

    pub fn flip(&mut self, i: usize, j: usize) {
        let v = self.get(i, j);
        self.set(i, j, !v);
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && *self == Self::identity(self.rows)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    /// `v * self`.
    pub fn apply(&self, v: &BitVector) -> BitVector {
        assert_eq!(v.len(), self.rows, "vector length {} vs {} rows", v.len(), self.rows);
        let mut out = BitVector::zeros(self.cols);
        for i in v.iter_ones() {
            out.xor_words(self.row_words(i));
        }
        out
    }

    /// `v * self` for packed vectors; requires at most 64 rows and columns.
    #[inline]
    pub fn apply_u64(&self, v: u64) -> u64 {
        let mut out = 0u64;
        let mut bits = v;
        while bits != 0 {
            let i = bits.trailing_zeros() as usize;
            out ^= self.row_u64(i);
            bits &= bits - 1;
        }
        out
    }

    pub fn mul_checked(&self, rhs: &Self) -> Result<Self, Gf2Error> {
        if self.cols != rhs.rows {
            return Err(Gf2Error::DimensionMismatch {
                expected: self.cols,
                found: rhs.rows,
            });
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let row = BitVector::from_words(self.cols, self.row_words(i).to_vec());
            for k in row.iter_ones() {
                let (src, dst) = (k * rhs.stride, i * out.stride);
                for w in 0..out.stride {
                    out.data[dst + w] ^= rhs.data[src + w];
                }
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in self.row(i).iter_ones() {
                out.set(j, i, true);
            }
        }
        out
    }

    pub fn pow(&self, mut e: u64) -> Self {
        assert!(self.is_square());
        let mut base = self.clone();
        let mut acc = Self::identity(self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Reduced row-echelon form and rank. Pivot rows come first, ordered by
    /// pivot column; every pivot column is zero outside its pivot row.
    pub fn rref(&self) -> (Self, usize) {
        let mut m = self.clone();
        let rank = m.rref_in_place(self.cols);
        (m, rank)
    }

    /// Row-reduces using pivots only in columns `< pivot_limit`; returns the rank
    /// of that column block.
    pub(crate) fn rref_in_place(&mut self, pivot_limit: usize) -> usize {
        let mut rank = 0;
        for col in 0..pivot_limit.min(self.cols) {
            let Some(p) = (rank..self.rows).find(|&r| self.get(r, col)) else {
                continue;
            };
            self.swap_rows(rank, p);
            let pivot: Vec<u64> = self.row_words(rank).to_vec();
            for r in 0..self.rows {
                if r != rank && self.get(r, col) {
                    for (a, b) in self.row_words_mut(r).iter_mut().zip(&pivot) {
                        *a ^= b;
                    }
                }
            }
            rank += 1;
            if rank == self.rows {
                break;
            }
        }
        rank
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for w in 0..self.stride {
            self.data.swap(a * self.stride + w, b * self.stride + w);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    pub fn inverse(&self) -> Option<Self> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n);
        for i in 0..n {
            for j in self.row(i).iter_ones() {
                aug.set(i, j, true);
            }
            aug.set(i, n + i, true);
        }
        if aug.rref_in_place(n) < n {
            return None;
        }
        let mut inv = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                if aug.get(i, n + j) {
                    inv.set(i, j, true);
                }
            }
        }
        Some(inv)
    }

    /// The left kernel `{ v : v * self = 0 }`, a subspace of GF(2)^rows.
    pub fn kernel(&self) -> Subspace {
        let (r, c) = (self.rows, self.cols);
        let mut aug = Self::zeros(r, c + r);
        for i in 0..r {
            for j in self.row(i).iter_ones() {
                aug.set(i, j, true);
            }
            aug.set(i, c + i, true);
        }
        let rank = aug.rref_in_place(c);
        let vectors: Vec<BitVector> = (rank..r).map(|i| aug.row(i).slice(c, c + r)).collect();
        Subspace::span(r, &vectors)
    }

    /// The row space `{ v * self }`, a subspace of GF(2)^cols.
    pub fn image(&self) -> Subspace {
        Subspace::span(self.cols, &self.row_vectors())
    }

    /// Least `k >= 1` with `self^k = I`.
    pub fn element_order(&self, cap: u64) -> Result<u64, Gf2Error> {
        if !self.is_invertible() {
            return Err(Gf2Error::NotInvertible);
        }
        let id = Self::identity(self.rows);
        let mut acc = self.clone();
        let mut k = 1;
        while acc != id {
            if k >= cap {
                return Err(Gf2Error::OrderCapExceeded { cap });
            }
            acc = &acc * self;
            k += 1;
        }
        Ok(k)
    }

    /// Image of the subspace `w` under this matrix.
    pub fn map_subspace(&self, w: &Subspace) -> Subspace {
        let images: Vec<BitVector> = w.basis().iter().map(|b| self.apply(b)).collect();
        Subspace::span(self.cols, &images)
    }

    /// Block-diagonal matrix with `blocks` along the diagonal.
    pub fn block_diagonal(blocks: &[Self]) -> Self {
        let n: usize = blocks.iter().map(|b| b.rows).sum();
        let m: usize = blocks.iter().map(|b| b.cols).sum();
        let mut out = Self::zeros(n, m);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in b.row(i).iter_ones() {
                    out.set(r0 + i, c0 + j, true);
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        out
    }

    /// Packs a square matrix with `n * n <= 128` into a `u128`, row `i` at bits `i*n..`.
    pub fn pack_u128(&self) -> Option<u128> {
        let n = self.rows;
        if !self.is_square() || n * n > 128 {
            return None;
        }
        let mut key = 0u128;
        for i in 0..n {
            key |= (self.row_u64(i) as u128) << (i * n);
        }
        Some(key)
    }

    pub fn unpack_u128(n: usize, key: u128) -> Self {
        assert!(n * n <= 128);
        let mask = if n == 0 { 0 } else { (1u128 << n) - 1 };
        let rows: Vec<u64> = (0..n).map(|i| ((key >> (i * n)) & mask) as u64).collect();
        Self::from_u64_rows(n, &rows)
    }
}

impl Mul for &BitMatrix {
    type Output = BitMatrix;

    fn mul(self, rhs: &BitMatrix) -> BitMatrix {
        self.mul_checked(rhs).expect("matrix dimension mismatch")
    }
}

impl Add for &BitMatrix {
    type Output = BitMatrix;

    fn add(self, rhs: &BitMatrix) -> BitMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&rhs.data) {
            *a ^= b;
        }
        out
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {}", self.row(i))?;
        }
        Ok(())
    }
}
