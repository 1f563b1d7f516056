//! The field with four elements and small matrices over it.
//!
//! An element `a + b*w` (with `w^2 = w + 1`) is stored as the bit pair
//! `a | b << 1`. A vector of `F4^n` is identified with `GF(2)^(2n)` by sending
//! coordinate `i` to the bit pair `(2i, 2i+1)`; scalar multiplication by `w`
//! then acts blockwise as `[[0,1],[1,1]]`.

use std::fmt;
use std::ops::{Add, Mul};


use crate::gf2::{BitMatrix, BitVector};

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct F4(u8);

impl F4 {
    pub const ZERO: F4 = F4(0);
    pub const ONE: F4 = F4(1);
    /// A primitive element `w` with `w^2 = w + 1`.
    pub const W: F4 = F4(2);
    /// `w^2 = w + 1`.
    pub const W2: F4 = F4(3);

    pub const ALL: [F4; 4] = [F4::ZERO, F4::ONE, F4::W, F4::W2];

    pub fn from_bits(a: bool, b: bool) -> Self {
        F4(a as u8 | (b as u8) << 1)
    }

    pub fn bits(self) -> (bool, bool) {
        (self.0 & 1 == 1, self.0 & 2 == 2)
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// The Frobenius map `x -> x^2`, the field's only nontrivial automorphism.
    pub fn conj(self) -> Self {
        match self.0 {
            2 => F4(3),
            3 => F4(2),
            x => F4(x),
        }
    }

    pub fn inv(self) -> Option<Self> {
        match self.0 {
            0 => None,
            1 => Some(F4(1)),
            2 => Some(F4(3)),
            _ => Some(F4(2)),
        }
    }

    /// Norm `x * conj(x) = x^3`, which is 1 for every nonzero `x`.
    pub fn norm(self) -> Self {
        self * self.conj()
    }
}

impl Add for F4 {
    type Output = F4;

    fn add(self, rhs: F4) -> F4 {
        F4(self.0 ^ rhs.0)
    }
}

impl Mul for F4 {
    type Output = F4;

    fn mul(self, rhs: F4) -> F4 {
        // log table over the cyclic group {1, w, w^2}
        const LOG: [u8; 4] = [0, 0, 1, 2];
        const EXP: [u8; 3] = [1, 2, 3];
        if self.0 == 0 || rhs.0 == 0 {
            return F4(0);
        }
        F4(EXP[((LOG[self.0 as usize] + LOG[rhs.0 as usize]) % 3) as usize])
    }
}

impl fmt::Debug for F4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self.0 {
            0 => "0",
            1 => "1",
            2 => "w",
            _ => "w2",
        })
    }
}

/// A square matrix over `F4`, row-major, acting on row vectors from the right.
///
/// Serialized as one string per row over the letters `0`, `1`, `w`, `W` (for `w^2`).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct F4Matrix {
    n: usize,
    entries: Vec<F4>,
}

impl F4Matrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            entries: vec![F4::ZERO; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, F4::ONE);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<F4>]) -> Self {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), n);
            for (j, &x) in r.iter().enumerate() {
                m.set(i, j, x);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> F4 {
        self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: F4) {
        self.entries[i * self.n + j] = x;
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = F4::ZERO;
                for k in 0..n {
                    acc = acc + self.get(i, k) * rhs.get(k, j);
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    /// Conjugate transpose `M^*` with `(M^*)_{ij} = conj(M_{ji})`.
    pub fn conj_transpose(&self) -> Self {
        let mut out = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                out.set(i, j, self.get(j, i).conj());
            }
        }
        out
    }

    pub fn is_hermitian(&self) -> bool {
        *self == self.conj_transpose()
    }

    /// Row vector times matrix.
    pub fn apply(&self, v: &[F4]) -> Vec<F4> {
        assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|j| (0..self.n).fold(F4::ZERO, |acc, i| acc + v[i] * self.get(i, j)))
            .collect()
    }

    /// `x M conj(y)^T`, the sesquilinear form with Gram matrix `self`.
    pub fn form(&self, x: &[F4], y: &[F4]) -> F4 {
        let xm = self.apply(x);
        xm.iter().zip(y).fold(F4::ZERO, |acc, (&a, &b)| acc + a * b.conj())
    }

    pub fn rank(&self) -> usize {
        let n = self.n;
        let mut m = self.entries.clone();
        let mut rank = 0;
        for col in 0..n {
            let Some(p) = (rank..n).find(|&r| !m[r * n + col].is_zero()) else {
                continue;
            };
            for j in 0..n {
                m.swap(rank * n + j, p * n + j);
            }
            let inv = m[rank * n + col].inv().unwrap();
            for j in 0..n {
                m[rank * n + j] = m[rank * n + j] * inv;
            }
            for r in 0..n {
                let factor = m[r * n + col];
                if r != rank && !factor.is_zero() {
                    for j in 0..n {
                        m[r * n + j] = m[r * n + j] + factor * m[rank * n + j];
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    /// The same map on `GF(2)^(2n)`.
    pub fn to_f2(&self) -> BitMatrix {
        let n = self.n;
        let mut out = BitMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                let a = self.get(i, j);
                for (row, scalar) in [(2 * i, a), (2 * i + 1, F4::W * a)] {
                    let (lo, hi) = scalar.bits();
                    out.set(row, 2 * j, lo);
                    out.set(row, 2 * j + 1, hi);
                }
            }
        }
        out
    }

    /// Inverse of [`F4Matrix::to_f2`]; `None` if `m` does not commute with the standard `w` action.
    pub fn from_f2(m: &BitMatrix) -> Option<Self> {
        let n = m.rows() / 2;
        if m.rows() != 2 * n || !m.is_square() {
            return None;
        }
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, F4::from_bits(m.get(2 * i, 2 * j), m.get(2 * i, 2 * j + 1)));
            }
        }
        (out.to_f2() == *m).then_some(out)
    }
}

/// The `w` action on `GF(2)^(2n)`: block-diagonal `[[0,1],[1,1]]`.
pub fn standard_omega(n: usize) -> BitMatrix {
    F4Matrix::from_rows(
        &(0..n)
            .map(|i| (0..n).map(|j| if i == j { F4::W } else { F4::ZERO }).collect())
            .collect::<Vec<_>>(),
    )
    .to_f2()
}

pub fn vector_to_f2(v: &[F4]) -> BitVector {
    let mut out = BitVector::zeros(2 * v.len());
    for (i, x) in v.iter().enumerate() {
        let (a, b) = x.bits();
        out.set(2 * i, a);
        out.set(2 * i + 1, b);
    }
    out
}

pub fn vector_from_f2(v: &BitVector) -> Vec<F4> {
    (0..v.len() / 2).map(|i| F4::from_bits(v.get(2 * i), v.get(2 * i + 1))).collect()
}

/// All vectors of `F4^n` in a fixed order.
pub fn all_vectors(n: usize) -> Vec<Vec<F4>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|v| {
                F4::ALL.into_iter().map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}

/// One representative per 1-dimensional subspace of `F4^n` (first nonzero coordinate 1).
pub fn projective_points(n: usize) -> Vec<Vec<F4>> {
    all_vectors(n)
        .into_iter()
        .filter(|v| v.iter().find(|x| !x.is_zero()) == Some(&F4::ONE))
        .collect()
}

impl F4 {
    fn letter(self) -> char {
        ['0', '1', 'w', 'W'][self.0 as usize]
    }

    fn from_letter(c: char) -> Option<Self> {
        Some(match c {
            '0' => F4::ZERO,
            '1' => F4::ONE,
            'w' => F4::W,
            'W' => F4::W2,
            _ => return None,
        })
    }
}

impl serde::Serialize for F4Matrix {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<String> = (0..self.n).map(|i| (0..self.n).map(|j| self.get(i, j).letter()).collect()).collect();
        serializer.collect_seq(rows)
    }
}

impl<'de> serde::Deserialize<'de> for F4Matrix {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let rows = Vec::<String>::deserialize(deserializer)?;
        let n = rows.len();
        let parsed: Vec<Vec<F4>> = rows
            .iter()
            .map(|r| {
                let row: Option<Vec<F4>> = r.chars().map(F4::from_letter).collect();
                row.filter(|row| row.len() == n)
                    .ok_or_else(|| D::Error::custom(format!("bad F4 matrix row {r:?}")))
            })
            .collect::<Result<_, _>>()?;
        Ok(F4Matrix::from_rows(&parsed))
    }
}
