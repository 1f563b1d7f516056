use std::fmt;

use super::matrix::BitMatrix;
use super::vector::BitVector;
use super::Gf2Error;

/// A subspace of GF(2)^n held as its reduced row-echelon basis.
///
/// The basis is canonical (nonzero rows, strictly increasing pivots, pivot
/// columns cleared elsewhere), so two subspaces are equal exactly when their
/// basis lists are identical and derived `Eq`/`Hash`/`Ord` are meaningful.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<BitVector>,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Self {
            ambient,
            basis: Vec::new(),
        }
    }

    pub fn full(ambient: usize) -> Self {
        Self {
            ambient,
            basis: (0..ambient).map(|i| BitVector::unit(ambient, i)).collect(),
        }
    }

    /// The span of `vectors`, each of length `ambient`.
    pub fn span(ambient: usize, vectors: &[BitVector]) -> Self {
        if vectors.is_empty() {
            return Self::zero(ambient);
        }
        let m = BitMatrix::from_rows(ambient, vectors);
        let (r, rank) = m.rref();
        Self {
            ambient,
            basis: (0..rank).map(|i| r.row(i)).collect(),
        }
    }

    pub fn from_u64s(ambient: usize, vectors: &[u64]) -> Self {
        let vs: Vec<BitVector> = vectors.iter().map(|&v| BitVector::from_u64(ambient, v)).collect();
        Self::span(ambient, &vs)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[BitVector] {
        &self.basis
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.basis.len() == self.ambient
    }

    pub fn basis_matrix(&self) -> BitMatrix {
        BitMatrix::from_rows(self.ambient, &self.basis)
    }

    /// Reduces `v` against the basis; the result is zero iff `v` lies in the subspace.
    pub fn reduce(&self, v: &BitVector) -> BitVector {
        let mut r = v.clone();
        for b in &self.basis {
            let pivot = b.leading_index().expect("basis rows are nonzero");
            if r.get(pivot) {
                r += b;
            }
        }
        r
    }

    pub fn contains(&self, v: &BitVector) -> bool {
        assert_eq!(v.len(), self.ambient, "vector length mismatch");
        self.reduce(v).is_zero()
    }

    /// Coefficients of `v` with respect to the canonical basis, if `v` is in the subspace.
    pub fn coordinates(&self, v: &BitVector) -> Option<BitVector> {
        let mut r = v.clone();
        let mut coords = BitVector::zeros(self.dim());
        for (k, b) in self.basis.iter().enumerate() {
            let pivot = b.leading_index().expect("basis rows are nonzero");
            if r.get(pivot) {
                r += b;
                coords.set(k, true);
            }
        }
        r.is_zero().then_some(coords)
    }

    pub fn is_subspace_of(&self, other: &Self) -> bool {
        self.ambient == other.ambient && self.basis.iter().all(|b| other.contains(b))
    }

    fn check_ambient(&self, other: &Self) -> Result<(), Gf2Error> {
        if self.ambient != other.ambient {
            return Err(Gf2Error::DimensionMismatch {
                expected: self.ambient,
                found: other.ambient,
            });
        }
        Ok(())
    }

    pub fn sum(&self, other: &Self) -> Result<Self, Gf2Error> {
        self.check_ambient(other)?;
        let mut vs = self.basis.clone();
        vs.extend(other.basis.iter().cloned());
        Ok(Self::span(self.ambient, &vs))
    }

    /// Intersection by the Zassenhaus method: reduce rows `(a | a)` and `(b | 0)`;
    /// rows whose left half vanishes carry a basis of the meet on the right.
    pub fn meet(&self, other: &Self) -> Result<Self, Gf2Error> {
        self.check_ambient(other)?;
        let n = self.ambient;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(n));
        }
        let mut rows: Vec<BitVector> = self.basis.iter().map(|a| a.concat(a)).collect();
        rows.extend(other.basis.iter().map(|b| b.concat(&BitVector::zeros(n))));
        let mut m = BitMatrix::from_rows(2 * n, &rows);
        let rank_left = m.rref_in_place(n);
        let right: Vec<BitVector> = (rank_left..m.rows()).map(|i| m.row(i).slice(n, 2 * n)).collect();
        Ok(Self::span(n, &right))
    }

    /// All vectors of the subspace, zero first. Only sensible for small dimension.
    pub fn vectors(&self) -> Vec<BitVector> {
        assert!(self.dim() <= 24, "refusing to enumerate 2^{} vectors", self.dim());
        let mut out = Vec::with_capacity(1 << self.dim());
        out.push(BitVector::zeros(self.ambient));
        for b in &self.basis {
            let shifted: Vec<BitVector> = out.iter().map(|v| v + b).collect();
            out.extend(shifted);
        }
        out
    }

    pub fn nonzero_vectors(&self) -> Vec<BitVector> {
        let mut v = self.vectors();
        v.remove(0);
        v
    }

    /// Packed vectors of the subspace (ambient dimension at most 64), zero first.
    pub fn vectors_u64(&self) -> Vec<u64> {
        let basis: Vec<u64> = self
            .basis
            .iter()
            .map(|b| b.to_u64().expect("ambient dimension above 64"))
            .collect();
        let mut out = vec![0u64];
        for b in basis {
            let shifted: Vec<u64> = out.iter().map(|v| v ^ b).collect();
            out.extend(shifted);
        }
        out
    }

    /// Annihilator `{ x : x . w = 0 for all w }` under the standard dot product.
    pub fn annihilator(&self) -> Self {
        if self.is_zero() {
            return Self::full(self.ambient);
        }
        self.basis_matrix().transpose().kernel()
    }
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self.basis.iter().map(|b| b.to_bit_string()).collect();
        write!(f, "<{}>", rows.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(n: usize, i: usize) -> BitVector {
        BitVector::unit(n, i)
    }

    #[test]
    fn sum_and_meet_of_coordinate_planes() {
        let a = Subspace::span(4, &[e(4, 0), e(4, 1)]);
        let b = Subspace::span(4, &[e(4, 1), e(4, 2)]);
        assert_eq!(a.sum(&b).unwrap().dim(), 3);
        assert_eq!(a.meet(&b).unwrap(), Subspace::span(4, &[e(4, 1)]));
        assert_eq!(a.sum(&a).unwrap(), a);
        assert_eq!(a.meet(&a).unwrap(), a);
    }

    #[test]
    fn ambient_mismatch_is_an_error() {
        let a = Subspace::full(3);
        let b = Subspace::full(4);
        assert!(matches!(a.sum(&b), Err(Gf2Error::DimensionMismatch { .. })));
        assert!(matches!(a.meet(&b), Err(Gf2Error::DimensionMismatch { .. })));
    }

    #[test]
    fn canonical_form_ignores_spanning_set() {
        let a = Subspace::span(3, &["110".parse().unwrap(), "011".parse().unwrap()]);
        let b = Subspace::span(3, &["101".parse().unwrap(), "110".parse().unwrap(), "011".parse().unwrap()]);
        assert_eq!(a, b);
        assert_eq!(a.dim(), 2);
    }

    #[test]
    fn coordinates_reconstruct() {
        let s = Subspace::span(5, &["11000".parse().unwrap(), "00111".parse().unwrap()]);
        let v: BitVector = "11111".parse().unwrap();
        let c = s.coordinates(&v).unwrap();
        assert_eq!(c.weight(), 2);
        assert!(s.coordinates(&e(5, 0)).is_none());
    }

    #[test]
    fn annihilator_dimension() {
        let s = Subspace::span(5, &["11000".parse().unwrap(), "00111".parse().unwrap()]);
        let ann = s.annihilator();
        assert_eq!(ann.dim(), 3);
        for a in ann.basis() {
            for b in s.basis() {
                assert!(!a.dot(b));
            }
        }
    }
}
