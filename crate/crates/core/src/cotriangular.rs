//! Recognition of cotriangular geometries: every plane is dual affine, and the
//! geometry is the symplectic one, the orthogonal one or the triangular one.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::forms::{QuadraticForm, Sign, SymplecticForm};
use crate::geometry::Geometry;
use crate::gf2::{BitMatrix, BitVector, Subspace};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RecognitionError {
    #[error("the points span a subspace of dimension {found}, not all of V (dimension {dim})")]
    PointsDoNotSpan { dim: usize, found: usize },
    #[error("collinearity of points {0} and {1} disagrees with the recovered form")]
    NotFormDescribable(usize, usize),
    #[error("not a triangular geometry: {0}")]
    NotTriangular(String),
    #[error("no cotriangular branch verifies")]
    NoBranch,
    #[error("dimension {0} is too large to enumerate all vectors")]
    TooLarge(usize),
}

/// A symplectic form read off the collinearity graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymplecticRecovery {
    pub form: SymplecticForm,
    /// Points of the geometry forming a basis of `V`, as rows.
    pub point_basis: BitMatrix,
    /// Collinearity among the basis points: the form's Gram matrix in that basis.
    pub basis_gram: BitMatrix,
}

impl SymplecticRecovery {
    /// The recovered form evaluated on the point basis reproduces the collinearity Gram
    /// matrix; this is the congruence the recovery is built on.
    pub fn witness_holds(&self) -> bool {
        self.form.in_basis(&self.point_basis) == self.basis_gram
    }
}

/// Builds `f` with `f(p, q) = 1` exactly when the points `p` and `q` are collinear.
pub fn recover_symplectic(geometry: &Geometry) -> Result<SymplecticRecovery, RecognitionError> {
    let n = geometry.dim();
    let points = geometry.points();
    let mut chosen: Vec<usize> = Vec::new();
    let mut span = Subspace::zero(n);
    for (i, p) in points.iter().enumerate() {
        if span.dim() == n {
            break;
        }
        if !span.contains(p) {
            span = span.sum(&Subspace::span(n, std::slice::from_ref(p))).unwrap();
            chosen.push(i);
        }
    }
    if span.dim() != n {
        return Err(RecognitionError::PointsDoNotSpan { dim: n, found: span.dim() });
    }
    let point_basis = BitMatrix::from_rows(n, &chosen.iter().map(|&i| points[i].clone()).collect::<Vec<_>>());
    let mut basis_gram = BitMatrix::zeros(n, n);
    for (a, &p) in chosen.iter().enumerate() {
        for (b, &q) in chosen.iter().enumerate() {
            if p != q && geometry.collinear(p, q) {
                basis_gram.set(a, b, true);
            }
        }
    }
    let inverse = point_basis.inverse().expect("chosen points are independent");
    let gram = &(&inverse * &basis_gram) * &inverse.transpose();
    let form = SymplecticForm::new(gram).expect("collinearity is symmetric and irreflexive");

    let functionals: Vec<BitVector> = points.iter().map(|p| form.functional(p)).collect();
    for p in 0..points.len() {
        for q in p + 1..points.len() {
            if functionals[p].dot(&points[q]) != geometry.collinear(p, q) {
                return Err(RecognitionError::NotFormDescribable(p, q));
            }
        }
    }
    Ok(SymplecticRecovery {
        form,
        point_basis,
        basis_gram,
    })
}

/// Points labelled by pairs from an index set `Omega`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriangularModel {
    pub omega_size: usize,
    /// `V` is the even-weight space modulo the all-one vector.
    pub quotiented: bool,
    /// The pair `{a, b}` (with `a < b`) for each point, in geometry order.
    pub point_labels: Vec<(usize, usize)>,
    /// Images of `w_0 + w_a` for `a = 1, ..., |Omega| - 1`.
    pub index_vectors: Vec<BitVector>,
}

impl TriangularModel {
    /// The vector for the pair `{a, b}` computed from the index vectors.
    pub fn vector_of(&self, a: usize, b: usize) -> BitVector {
        let unit = |x: usize| self.index_vectors[x - 1].clone();
        match (a.min(b), a.max(b)) {
            (0, y) => unit(y),
            (x, y) => &unit(x) + &unit(y),
        }
    }
}

/// Recovers `Omega` from the stars of the collinearity graph: for collinear `p, q`
/// sharing index `a`, the star of `a` is `{p, q}` plus their common neighbours other
/// than the third point of their line.
pub fn recognize_triangular(geometry: &Geometry) -> Result<TriangularModel, RecognitionError> {
    let bad = |msg: String| Err(RecognitionError::NotTriangular(msg));
    let count = geometry.points().len();
    let Some(omega) = (5..=count + 1).find(|k| k * (k - 1) / 2 >= count).filter(|k| k * (k - 1) / 2 == count) else {
        return bad(format!("{count} points is not a triangular number with |Omega| >= 5"));
    };
    let mut stars: BTreeSet<Vec<usize>> = BTreeSet::new();
    for l in 0..geometry.lines().len() {
        let pts = geometry.points_on(l);
        if pts.len() != 3 {
            return bad(format!("line {l} holds {} points", pts.len()));
        }
        for (p, q, r) in [(pts[0], pts[1], pts[2]), (pts[0], pts[2], pts[1]), (pts[1], pts[2], pts[0])] {
            let mut star: Vec<usize> = geometry
                .neighbours(p)
                .filter(|&x| x != r && x != q && geometry.collinear(q, x))
                .collect();
            star.push(p);
            star.push(q);
            star.sort_unstable();
            stars.insert(star);
        }
    }
    let stars: Vec<Vec<usize>> = stars.into_iter().collect();
    if stars.len() != omega || stars.iter().any(|s| s.len() != omega - 1) {
        return bad(format!("found {} stars, expected {omega} of size {}", stars.len(), omega - 1));
    }
    let mut membership = vec![Vec::new(); count];
    for (a, s) in stars.iter().enumerate() {
        for &p in s {
            membership[p].push(a);
        }
    }
    let mut labels = Vec::with_capacity(count);
    for (p, m) in membership.iter().enumerate() {
        match m.as_slice() {
            &[a, b] => labels.push((a, b)),
            _ => return bad(format!("point {p} lies in {} stars", m.len())),
        }
    }
    let distinct: BTreeSet<&(usize, usize)> = labels.iter().collect();
    if distinct.len() != count {
        return bad("two points share a label".into());
    }
    for p in 0..count {
        for q in p + 1..count {
            let (a, b) = labels[p];
            let shared = [a, b].iter().filter(|x| **x == labels[q].0 || **x == labels[q].1).count();
            if (shared == 1) != geometry.collinear(p, q) {
                return bad(format!("points {p} and {q} break the pair rule"));
            }
        }
    }
    let expected_lines = omega * (omega - 1) * (omega - 2) / 6;
    if geometry.lines().len() != expected_lines {
        return bad(format!("{} lines, expected {expected_lines}", geometry.lines().len()));
    }

    let n = geometry.dim();
    let mut index_vectors = vec![BitVector::zeros(n); omega - 1];
    for (p, &(a, b)) in labels.iter().enumerate() {
        if a == 0 {
            index_vectors[b - 1] = geometry.points()[p].clone();
        }
    }
    let quotiented = match n {
        d if d == omega - 1 => false,
        d if d + 2 == omega && omega % 2 == 0 => true,
        d => return bad(format!("dimension {d} fits neither E(Omega) nor its quotient for |Omega| = {omega}")),
    };
    let model = TriangularModel {
        omega_size: omega,
        quotiented,
        point_labels: labels,
        index_vectors,
    };
    for (p, &(a, b)) in model.point_labels.iter().enumerate() {
        if model.vector_of(a, b) != geometry.points()[p] {
            return bad(format!("point {p} is not the sum of its index vectors"));
        }
    }
    if Subspace::span(n, &model.index_vectors).dim() != n {
        return bad("index vectors do not span V".into());
    }
    Ok(model)
}

/// The cotriangular spaces, in the order they are preferred.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CotriangularKind {
    Symplectic,
    Orthogonal(Sign),
    Triangular { omega_size: usize, quotiented: bool },
}

/// Every branch that verified on one geometry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CotriangularOutcome {
    pub symplectic: bool,
    pub quadratic: Option<QuadraticForm>,
    pub triangular: Option<TriangularModel>,
}

/// Symplectic and orthogonal cases are claimed only from this dimension on.
pub const MIN_FORM_DIM: usize = 6;

impl CotriangularOutcome {
    pub fn verified(&self) -> Vec<CotriangularKind> {
        let mut out = Vec::new();
        if self.symplectic {
            out.push(CotriangularKind::Symplectic);
        }
        if let Some(sign) = self.quadratic.as_ref().and_then(QuadraticForm::sign) {
            out.push(CotriangularKind::Orthogonal(sign));
        }
        if let Some(t) = &self.triangular {
            out.push(CotriangularKind::Triangular {
                omega_size: t.omega_size,
                quotiented: t.quotiented,
            });
        }
        out
    }

    /// First verified branch in the order symplectic, orthogonal, triangular. The form
    /// cases need dimension at least [`MIN_FORM_DIM`].
    pub fn chosen(&self, dim: usize) -> Option<CotriangularKind> {
        self.verified().into_iter().find(|k| match k {
            CotriangularKind::Triangular { .. } => true,
            _ => dim >= MIN_FORM_DIM,
        })
    }
}

/// Vectors are enumerated exhaustively for the orthogonal test.
pub const MAX_ENUMERATION_DIM: usize = 24;

/// Runs every branch: all nonzero vectors are points (symplectic); points are the
/// nonsingular vectors of a quadratic form with trivial radical (orthogonal); the
/// collinearity graph is triangular.
pub fn classify_cotriangular(geometry: &Geometry, recovery: &SymplecticRecovery) -> Result<CotriangularOutcome, RecognitionError> {
    let n = geometry.dim();
    if n > MAX_ENUMERATION_DIM {
        return Err(RecognitionError::TooLarge(n));
    }
    let form = &recovery.form;
    let point_count = geometry.points().len();
    let symplectic = form.is_nondegenerate() && point_count == (1 << n) - 1;

    let quadratic = solve_quadratic(recovery).filter(|q| {
        q.radical().is_zero()
            && q.nonsingular_count() == point_count
            && geometry.points().iter().all(|p| q.eval(p))
    });
    let triangular = recognize_triangular(geometry).ok();
    let outcome = CotriangularOutcome {
        symplectic,
        quadratic,
        triangular,
    };
    if outcome.verified().is_empty() {
        return Err(RecognitionError::NoBranch);
    }
    Ok(outcome)
}

/// The quadratic form polarizing to the recovered form that is 1 on every basis point.
fn solve_quadratic(recovery: &SymplecticRecovery) -> Option<QuadraticForm> {
    let n = recovery.form.dim();
    let inverse = recovery.point_basis.inverse()?;
    let mut values = BitVector::zeros(n);
    for k in 0..n {
        // e_k = sum c_i b_i, so Q(e_k) = sum c_i + sum_{i<j} c_i c_j f(b_i, b_j)
        let c: Vec<usize> = inverse.row(k).iter_ones().collect();
        let mut q = c.len() % 2 == 1;
        for (a, &i) in c.iter().enumerate() {
            for &j in &c[a + 1..] {
                q ^= recovery.basis_gram.get(i, j);
            }
        }
        values.set(k, q);
    }
    QuadraticForm::new(values, recovery.form.clone()).ok()
}
