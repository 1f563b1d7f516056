//! Alternating bilinear forms and quadratic forms over GF(2).

use serde::{Deserialize, Serialize};

use crate::gf2::{BitMatrix, BitVector, Subspace};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormError {
    #[error("Gram matrix is not square")]
    NotSquare,
    #[error("Gram matrix is not symmetric with zero diagonal")]
    NotAlternating,
    #[error("quadratic form values have length {found}, expected {expected}")]
    LengthMismatch { expected: usize, found: usize },
}

/// `f(x, y) = x G y^T` with `G` symmetric and zero on the diagonal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SymplecticForm {
    gram: BitMatrix,
}

impl SymplecticForm {
    pub fn new(gram: BitMatrix) -> Result<Self, FormError> {
        if !gram.is_square() {
            return Err(FormError::NotSquare);
        }
        let n = gram.rows();
        if gram != gram.transpose() || (0..n).any(|i| gram.get(i, i)) {
            return Err(FormError::NotAlternating);
        }
        Ok(Self { gram })
    }

    /// The hyperbolic form pairing coordinates `2i` and `2i+1`. An odd `dim`
    /// leaves the last coordinate in the radical.
    pub fn standard(dim: usize) -> Self {
        let mut gram = BitMatrix::zeros(dim, dim);
        for i in (0..dim.saturating_sub(1)).step_by(2) {
            gram.set(i, i + 1, true);
            gram.set(i + 1, i, true);
        }
        Self { gram }
    }

    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    pub fn gram(&self) -> &BitMatrix {
        &self.gram
    }

    pub fn eval(&self, x: &BitVector, y: &BitVector) -> bool {
        self.gram.apply(x).dot(y)
    }

    /// The functional `f(v, -)` as a coordinate vector.
    pub fn functional(&self, v: &BitVector) -> BitVector {
        self.gram.apply(v)
    }

    pub fn radical(&self) -> Subspace {
        self.gram.kernel()
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.gram.is_invertible()
    }

    /// `f(xg, yg) = f(x, y)` for all `x, y`, i.e. `g G g^T = G`.
    pub fn is_invariant_under(&self, g: &BitMatrix) -> bool {
        &(g * &self.gram) * &g.transpose() == self.gram
    }

    /// The symplectic transvection `w -> w + f(w, v) v`.
    pub fn transvection(&self, v: &BitVector) -> BitMatrix {
        outer_update(&self.functional(v), v)
    }

    /// `B G B^T`: the Gram matrix in the basis given by the rows of `basis`.
    pub fn in_basis(&self, basis: &BitMatrix) -> BitMatrix {
        &(basis * &self.gram) * &basis.transpose()
    }

    /// Rows `e_1, f_1, e_2, f_2, ...` with `f(e_i, f_i) = 1` and every other pair
    /// orthogonal, so `in_basis` of the result is [`SymplecticForm::standard`].
    /// `None` for a degenerate form.
    pub fn hyperbolic_basis(&self) -> Option<BitMatrix> {
        if !self.is_nondegenerate() {
            return None;
        }
        let n = self.dim();
        let mut rest: Vec<BitVector> = (0..n).map(|i| BitVector::unit(n, i)).collect();
        let mut rows = Vec::with_capacity(n);
        while let Some(e) = rest.pop() {
            let at = rest.iter().position(|v| self.eval(&e, v))?;
            let f = rest.swap_remove(at);
            for v in rest.iter_mut() {
                let (along_e, along_f) = (self.eval(v, &f), self.eval(v, &e));
                if along_e {
                    *v = &*v + &e;
                }
                if along_f {
                    *v = &*v + &f;
                }
            }
            rows.push(e);
            rows.push(f);
        }
        Some(BitMatrix::from_rows(n, &rows))
    }
}

/// `I + phi^T v`, the map `w -> w + phi(w) v`.
pub(crate) fn outer_update(phi: &BitVector, v: &BitVector) -> BitMatrix {
    let n = v.len();
    let mut m = BitMatrix::identity(n);
    for i in phi.iter_ones() {
        for j in v.iter_ones() {
            m.flip(i, j);
        }
    }
    m
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn as_str(self) -> &'static str {
        match self {
            Sign::Plus => "plus",
            Sign::Minus => "minus",
        }
    }
}

/// A quadratic form given by its values on the standard basis and its polar form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuadraticForm {
    values_on_basis: BitVector,
    bilinear: SymplecticForm,
}

impl QuadraticForm {
    pub fn new(values_on_basis: BitVector, bilinear: SymplecticForm) -> Result<Self, FormError> {
        if values_on_basis.len() != bilinear.dim() {
            return Err(FormError::LengthMismatch {
                expected: bilinear.dim(),
                found: values_on_basis.len(),
            });
        }
        Ok(Self {
            values_on_basis,
            bilinear,
        })
    }

    /// `sum x_{2i} x_{2i+1}`, with the last pair replaced by `x^2 + xy + y^2` for `Minus`.
    pub fn standard(dim: usize, sign: Sign) -> Self {
        assert!(dim >= 2 && dim % 2 == 0, "standard quadratic forms need even dimension");
        let mut values = BitVector::zeros(dim);
        if sign == Sign::Minus {
            values.set(dim - 2, true);
            values.set(dim - 1, true);
        }
        Self {
            values_on_basis: values,
            bilinear: SymplecticForm::standard(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.bilinear.dim()
    }

    pub fn values_on_basis(&self) -> &BitVector {
        &self.values_on_basis
    }

    pub fn bilinear(&self) -> &SymplecticForm {
        &self.bilinear
    }

    pub fn eval(&self, v: &BitVector) -> bool {
        let ones: Vec<usize> = v.iter_ones().collect();
        let mut q = false;
        for (a, &i) in ones.iter().enumerate() {
            q ^= self.values_on_basis.get(i);
            for &j in &ones[a + 1..] {
                q ^= self.bilinear.gram().get(i, j);
            }
        }
        q
    }

    /// `Rad(Q)`: vectors of `Rad(f)` on which `Q` vanishes. Since `Q` is additive on
    /// `Rad(f)` this is the kernel of a functional there.
    pub fn radical(&self) -> Subspace {
        let rad_f = self.bilinear.radical();
        let singular: Vec<BitVector> = rad_f.vectors().into_iter().filter(|v| !self.eval(v)).collect();
        Subspace::span(self.dim(), &singular)
    }

    /// `Q(vg) = Q(v)` for all `v`: the polar form is invariant and `Q` agrees on the basis images.
    pub fn is_invariant_under(&self, g: &BitMatrix) -> bool {
        self.bilinear.is_invariant_under(g)
            && (0..self.dim()).all(|i| self.eval(&g.row(i)) == self.values_on_basis.get(i))
    }

    /// Number of nonzero `v` with `Q(v) = 1`, by enumeration.
    pub fn nonsingular_count(&self) -> usize {
        Subspace::full(self.dim()).vectors().iter().filter(|v| self.eval(v)).count()
    }

    /// Witt type for a nondegenerate form of even dimension `2m`, read off the count
    /// `2^(2m-1) -+ 2^(m-1)` of nonsingular vectors.
    pub fn sign(&self) -> Option<Sign> {
        let n = self.dim();
        if n % 2 != 0 || !self.bilinear.is_nondegenerate() {
            return None;
        }
        let m = n / 2;
        let count = self.nonsingular_count();
        if count == (1 << (n - 1)) - (1 << (m - 1)) {
            Some(Sign::Plus)
        } else if count == (1 << (n - 1)) + (1 << (m - 1)) {
            Some(Sign::Minus)
        } else {
            None
        }
    }
}
