//! Explicit generators for every family of the classification, plus degenerate controls.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::f4::{standard_omega, F4Matrix, F4};
use crate::forms::{outer_update, QuadraticForm, Sign, SymplecticForm};
use crate::gf2::{BitMatrix, BitVector, Subspace};
use crate::group::is_class_candidate;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FamilyError {
    #[error("invalid family: {0}")]
    InvalidSpec(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("cannot parse family spec {0:?}")]
    Parse(String),
}

/// The eight cases of the classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CaseTag {
    TransvectionTV,
    Frobenius7_3,
    Alt7InGl4,
    Symplectic,
    Orthogonal,
    Alternating,
    F4Reflection,
    F4Unitary,
}

impl CaseTag {
    /// The letter of the case in the theorem, `a` through `h`.
    pub fn letter(self) -> char {
        match self {
            CaseTag::TransvectionTV => 'a',
            CaseTag::Frobenius7_3 => 'b',
            CaseTag::Alt7InGl4 => 'c',
            CaseTag::Symplectic => 'd',
            CaseTag::Orthogonal => 'e',
            CaseTag::Alternating => 'f',
            CaseTag::F4Reflection => 'g',
            CaseTag::F4Unitary => 'h',
        }
    }
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) {:?}", self.letter(), self)
    }
}

/// Constructions that deliberately violate a hypothesis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Control {
    /// `SL(active)` on the first coordinates, identity on the rest: `[V,G] != V`, `C_V(G) != 0`.
    FixedBlock { active: usize, dim: usize },
    /// Transvection group for a dual subspace missing one coordinate: `C_V(G) != 0`.
    PartialDual { dim: usize },
    /// Symplectic construction for a form with a 1-dimensional radical.
    DegenerateSymplectic { dim: usize },
    /// `SL(block) x SL(block)` acting on two summands: reducible, and `D` cannot generate `G`.
    ReducibleBlocks { block: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FamilySpec {
    /// `T(V, V^*) = SL(dim, 2)`.
    Transvection { dim: usize },
    Frobenius7_3,
    Alt7InGl4,
    Symplectic { dim: usize },
    Orthogonal { dim: usize, sign: Sign },
    /// Even-weight vectors of `F_2 Omega`, divided by the all-one vector when `quotiented`.
    Alternating { omega: usize, quotiented: bool },
    /// `GL(f4_dim, 4)` generated by its reflections with eigenvalue `w`.
    F4Reflection { f4_dim: usize },
    /// Unitary reflections for the standard Hermitian form on `F4^f4_dim`.
    F4Unitary { f4_dim: usize },
    Control(Control),
}

/// Largest dimension over GF(2) that the constructors accept.
pub const MAX_FAMILY_DIM: usize = 64;

impl FamilySpec {
    pub fn case_tag(&self) -> Option<CaseTag> {
        Some(match self {
            FamilySpec::Transvection { .. } => CaseTag::TransvectionTV,
            FamilySpec::Frobenius7_3 => CaseTag::Frobenius7_3,
            FamilySpec::Alt7InGl4 => CaseTag::Alt7InGl4,
            FamilySpec::Symplectic { .. } => CaseTag::Symplectic,
            FamilySpec::Orthogonal { .. } => CaseTag::Orthogonal,
            FamilySpec::Alternating { .. } => CaseTag::Alternating,
            FamilySpec::F4Reflection { .. } => CaseTag::F4Reflection,
            FamilySpec::F4Unitary { .. } => CaseTag::F4Unitary,
            FamilySpec::Control(_) => return None,
        })
    }

    /// Dimension of `V` over GF(2).
    pub fn dimension(&self) -> usize {
        match *self {
            FamilySpec::Transvection { dim } | FamilySpec::Symplectic { dim } => dim,
            FamilySpec::Orthogonal { dim, .. } => dim,
            FamilySpec::Frobenius7_3 => 3,
            FamilySpec::Alt7InGl4 => 4,
            FamilySpec::Alternating { omega, quotiented } => omega - 1 - quotiented as usize,
            FamilySpec::F4Reflection { f4_dim } | FamilySpec::F4Unitary { f4_dim } => 2 * f4_dim,
            FamilySpec::Control(c) => match c {
                Control::FixedBlock { dim, .. }
                | Control::PartialDual { dim }
                | Control::DegenerateSymplectic { dim } => dim,
                Control::ReducibleBlocks { block } => 2 * block,
            },
        }
    }

    /// Whether the construction satisfies the theorem's hypotheses.
    pub fn satisfies_hypotheses(&self) -> bool {
        match *self {
            FamilySpec::Control(_) => false,
            FamilySpec::Alternating { omega, quotiented } => omega % 2 == 1 || quotiented,
            _ => true,
        }
    }

    pub fn validate(&self) -> Result<(), FamilyError> {
        let bad = |msg: String| Err(FamilyError::InvalidSpec(msg));
        let n = self.dimension();
        if n > MAX_FAMILY_DIM {
            return bad(format!("dimension {n} exceeds {MAX_FAMILY_DIM}"));
        }
        match *self {
            FamilySpec::Transvection { dim } if dim < 3 => bad(format!("transvection family needs dim >= 3, got {dim}")),
            FamilySpec::Symplectic { dim } if dim < 4 || dim % 2 == 1 => {
                bad(format!("symplectic family needs even dim >= 4, got {dim}"))
            }
            FamilySpec::Orthogonal { dim, .. } if dim < 6 || dim % 2 == 1 => {
                bad(format!("orthogonal family needs even dim >= 6, got {dim}"))
            }
            FamilySpec::Alternating { omega, .. } if omega < 5 => bad(format!("alternating family needs |Omega| >= 5, got {omega}")),
            FamilySpec::Alternating { omega, quotiented: true } if omega % 2 == 1 => {
                bad(format!("the all-one vector has odd weight for |Omega| = {omega}"))
            }
            FamilySpec::F4Reflection { f4_dim } if f4_dim < 2 => bad(format!("reflection family needs F4-dim >= 2, got {f4_dim}")),
            FamilySpec::F4Unitary { f4_dim } if f4_dim < 3 => bad(format!("unitary family needs F4-dim >= 3, got {f4_dim}")),
            FamilySpec::Control(Control::FixedBlock { active, dim }) if active < 2 || active >= dim => {
                bad(format!("fixed block needs 2 <= active < dim, got {active}, {dim}"))
            }
            FamilySpec::Control(Control::PartialDual { dim }) if dim < 3 => bad(format!("partial dual needs dim >= 3, got {dim}")),
            FamilySpec::Control(Control::DegenerateSymplectic { dim }) if dim < 5 || dim % 2 == 0 => {
                bad(format!("degenerate symplectic control needs odd dim >= 5, got {dim}"))
            }
            FamilySpec::Control(Control::ReducibleBlocks { block }) if block < 2 => bad(format!("reducible blocks need block >= 2, got {block}")),
            _ => Ok(()),
        }
    }

    /// The group order when it has a closed form.
    pub fn expected_order(&self) -> Option<u128> {
        match *self {
            FamilySpec::Transvection { dim } => Some(sl2_order(dim)),
            FamilySpec::Frobenius7_3 => Some(21),
            FamilySpec::Alt7InGl4 => Some(2520),
            FamilySpec::Symplectic { dim } if dim == 4 => Some(360),
            FamilySpec::Symplectic { dim } => Some(sp2_order(dim)),
            FamilySpec::Orthogonal { dim, sign } => Some(omega2_order(dim, sign)),
            FamilySpec::Alternating { omega, .. } => Some((3..=omega as u128).product()),
            FamilySpec::F4Reflection { f4_dim } => Some(gl4_order(f4_dim)),
            FamilySpec::F4Unitary { f4_dim } => Some(gu2_order(f4_dim)),
            FamilySpec::Control(_) => None,
        }
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            FamilySpec::Transvection { dim } => write!(f, "transvection:{dim}"),
            FamilySpec::Frobenius7_3 => write!(f, "frobenius73"),
            FamilySpec::Alt7InGl4 => write!(f, "alt7"),
            FamilySpec::Symplectic { dim } => write!(f, "symplectic:{dim}"),
            FamilySpec::Orthogonal { dim, sign } => write!(f, "orthogonal:{dim}:{}", sign.as_str()),
            FamilySpec::Alternating { omega, quotiented } => {
                write!(f, "alternating:{omega}{}", if quotiented { ":quotient" } else { "" })
            }
            FamilySpec::F4Reflection { f4_dim } => write!(f, "f4-reflection:{f4_dim}"),
            FamilySpec::F4Unitary { f4_dim } => write!(f, "f4-unitary:{f4_dim}"),
            FamilySpec::Control(Control::FixedBlock { active, dim }) => write!(f, "fixed-block:{active}:{dim}"),
            FamilySpec::Control(Control::PartialDual { dim }) => write!(f, "partial-dual:{dim}"),
            FamilySpec::Control(Control::DegenerateSymplectic { dim }) => write!(f, "degenerate-symplectic:{dim}"),
            FamilySpec::Control(Control::ReducibleBlocks { block }) => write!(f, "reducible-blocks:{block}"),
        }
    }
}

impl FromStr for FamilySpec {
    type Err = FamilyError;

    /// Parses the `Display` form, e.g. `orthogonal:6:minus` or `alternating:8:quotient`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || FamilyError::Parse(s.to_string());
        let parts: Vec<&str> = s.trim().split(':').collect();
        let num = |i: usize| -> Result<usize, FamilyError> {
            parts.get(i).and_then(|p| p.parse().ok()).ok_or_else(err)
        };
        let spec = match (parts[0], parts.len()) {
            ("transvection", 2) => FamilySpec::Transvection { dim: num(1)? },
            ("frobenius73", 1) => FamilySpec::Frobenius7_3,
            ("alt7", 1) => FamilySpec::Alt7InGl4,
            ("symplectic", 2) => FamilySpec::Symplectic { dim: num(1)? },
            ("orthogonal", 3) => FamilySpec::Orthogonal {
                dim: num(1)?,
                sign: match parts[2] {
                    "plus" => Sign::Plus,
                    "minus" => Sign::Minus,
                    _ => return Err(err()),
                },
            },
            ("alternating", 2) => FamilySpec::Alternating {
                omega: num(1)?,
                quotiented: false,
            },
            ("alternating", 3) if parts[2] == "quotient" => FamilySpec::Alternating {
                omega: num(1)?,
                quotiented: true,
            },
            ("f4-reflection", 2) => FamilySpec::F4Reflection { f4_dim: num(1)? },
            ("f4-unitary", 2) => FamilySpec::F4Unitary { f4_dim: num(1)? },
            ("fixed-block", 3) => FamilySpec::Control(Control::FixedBlock {
                active: num(1)?,
                dim: num(2)?,
            }),
            ("partial-dual", 2) => FamilySpec::Control(Control::PartialDual { dim: num(1)? }),
            ("degenerate-symplectic", 2) => FamilySpec::Control(Control::DegenerateSymplectic { dim: num(1)? }),
            ("reducible-blocks", 2) => FamilySpec::Control(Control::ReducibleBlocks { block: num(1)? }),
            _ => return Err(err()),
        };
        Ok(spec)
    }
}

/// Forms and operators the construction preserves, for comparison with recovered evidence.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub symplectic: Option<SymplecticForm>,
    pub quadratic: Option<QuadraticForm>,
    /// Scalar multiplication by `w` for the F4 families.
    pub omega: Option<BitMatrix>,
    pub hermitian: Option<F4Matrix>,
}

#[derive(Debug, Clone)]
pub struct Family {
    pub spec: FamilySpec,
    pub generators: Vec<BitMatrix>,
    /// An element of the intended class `D`.
    pub seed: BitMatrix,
    pub truth: GroundTruth,
}

/// `t_{v,phi}: w -> w + phi(w) v`.
pub fn make_transvection(v: &BitVector, phi: &BitVector) -> Result<BitMatrix, FamilyError> {
    if v.len() != phi.len() {
        return Err(FamilyError::Precondition("v and phi differ in length".into()));
    }
    if v.is_zero() || phi.is_zero() {
        return Err(FamilyError::Precondition("v and phi must be nonzero".into()));
    }
    if phi.dot(v) {
        return Err(FamilyError::Precondition("phi(v) must be 0".into()));
    }
    Ok(outer_update(phi, v))
}

/// `d = t_{v,phi} t_{w,psi}` (first `t_{v,phi}`, then `t_{w,psi}`), an element of order 3
/// with `[V,d] = <v, w>`.
pub fn make_d_element(v: &BitVector, w: &BitVector, phi: &BitVector, psi: &BitVector) -> Result<BitMatrix, FamilyError> {
    if !(psi.dot(v) && phi.dot(w)) {
        return Err(FamilyError::Precondition("need psi(v) = phi(w) = 1".into()));
    }
    Ok(&make_transvection(v, phi)? * &make_transvection(w, psi)?)
}

pub fn make_family(spec: FamilySpec) -> Result<Family, FamilyError> {
    spec.validate()?;
    let mut truth = GroundTruth::default();
    let (generators, seed) = match spec {
        FamilySpec::Transvection { dim } => sl_generators(dim),
        FamilySpec::Frobenius7_3 => {
            let g = make_7_3();
            let seed = g[0].clone();
            (g, seed)
        }
        FamilySpec::Alt7InGl4 => {
            let g = make_a7_in_gl4();
            let seed = g[0].clone();
            (g, seed)
        }
        FamilySpec::Symplectic { dim } => {
            let f = SymplecticForm::standard(dim);
            let chain = symplectic_chain(dim);
            // e_2 is adjacent to c_3 only; the branch takes the group past Sym(dim + 1)
            let (mut generators, seed) = symplectic_generators(&f, &chain);
            generators.push(&f.transvection(&chain[3]) * &f.transvection(&unit(dim, 2)));
            truth.symplectic = Some(f);
            (generators, seed)
        }
        FamilySpec::Orthogonal { dim, sign } => {
            let q = QuadraticForm::standard(dim, sign);
            let f = q.bilinear();
            let chain = orthogonal_chain(&q);
            let (mut generators, seed) = symplectic_generators(f, &chain);
            // The path alone falls short for the plus type in dim 6; one more product
            // fixes that and stays inside the group in every other case.
            let last = chain.last().unwrap();
            let extra = Subspace::full(dim)
                .nonzero_vectors()
                .into_iter()
                .find(|v| q.eval(v) && f.eval(last, v) && !chain.contains(v))
                .expect("a nonsingular vector off the path exists");
            generators.push(&f.transvection(last) * &f.transvection(&extra));
            truth.symplectic = Some(f.clone());
            truth.quadratic = Some(q);
            (generators, seed)
        }
        FamilySpec::Alternating { omega, quotiented } => {
            let generators: Vec<BitMatrix> = (2..omega)
                .map(|k| alternating_matrix(omega, quotiented, &three_cycle(omega, 0, 1, k)))
                .collect();
            let seed = generators[0].clone();
            (generators, seed)
        }
        FamilySpec::F4Reflection { f4_dim } => {
            truth.omega = Some(standard_omega(f4_dim));
            f4_reflection_generators(f4_dim)
        }
        FamilySpec::F4Unitary { f4_dim } => {
            truth.omega = Some(standard_omega(f4_dim));
            truth.hermitian = Some(F4Matrix::identity(f4_dim));
            f4_unitary_generators(f4_dim)
        }
        FamilySpec::Control(c) => control_generators(c, &mut truth),
    };
    debug_assert!(is_class_candidate(&seed));
    Ok(Family {
        spec,
        generators,
        seed,
        truth,
    })
}

fn unit(n: usize, i: usize) -> BitVector {
    BitVector::unit(n, i)
}

/// The displayed block `[[0,1],[1,1]]` on coordinates `i, j`, identity elsewhere.
fn block_element(n: usize, i: usize, j: usize) -> BitMatrix {
    make_d_element(&unit(n, j), &unit(n, i), &unit(n, i), &unit(n, j)).expect("coordinate pair is valid")
}

/// Permutation matrix of the 3-cycle `e_a -> e_b -> e_c -> e_a`.
fn cycle_matrix(n: usize, a: usize, b: usize, c: usize) -> BitMatrix {
    let perm = three_cycle(n, a, b, c);
    BitMatrix::from_rows(n, &perm.iter().map(|&p| unit(n, p)).collect::<Vec<_>>())
}

/// The block element on `e_0, e_1` and coordinate 3-cycles overlapping it in a chain.
fn sl_generators(n: usize) -> (Vec<BitMatrix>, BitMatrix) {
    let seed = block_element(n, 0, 1);
    let mut generators = vec![seed.clone()];
    if n == 3 {
        generators.push(cycle_matrix(3, 0, 1, 2));
    }
    for i in (1..n.saturating_sub(2)).step_by(2) {
        generators.push(cycle_matrix(n, i, i + 1, i + 2));
    }
    if n % 2 == 1 && n > 3 {
        generators.push(cycle_matrix(n, n - 3, n - 2, n - 1));
    }
    (generators, seed)
}

/// A basis `c_0, c_1, ...` with `f(c_i, c_{i+1}) = 1` and `f(c_i, c_j) = 0` otherwise.
fn symplectic_chain(n: usize) -> Vec<BitVector> {
    let mut chain = vec![unit(n, 0), unit(n, 1)];
    for k in (2..n).step_by(2) {
        chain.push(&unit(n, k) + &unit(n, k - 2));
        chain.push(unit(n, k + 1));
    }
    chain
}

fn orthogonal_chain(q: &QuadraticForm) -> Vec<BitVector> {
    let n = q.dim();
    let f = q.bilinear();
    let nonsingular: Vec<BitVector> = Subspace::full(n).nonzero_vectors().into_iter().filter(|v| q.eval(v)).collect();
    // Greedy path through the nonsingular vectors, spanning V.
    let mut chain = vec![nonsingular[0].clone()];
    let mut span = Subspace::span(n, &chain);
    while span.dim() < n {
        let last = chain.last().unwrap().clone();
        let next = nonsingular
            .iter()
            .find(|v| f.eval(&last, v) && !span.contains(v))
            .expect("nonsingular vectors span V")
            .clone();
        span = span.sum(&Subspace::span(n, &[next.clone()])).unwrap();
        chain.push(next);
    }
    chain
}

/// `t_{c_i} t_{c_{i+1}}` for consecutive chain vectors.
fn symplectic_generators(f: &SymplecticForm, chain: &[BitVector]) -> (Vec<BitMatrix>, BitMatrix) {
    let generators: Vec<BitMatrix> = chain
        .windows(2)
        .map(|w| {
            debug_assert!(f.eval(&w[0], &w[1]));
            &f.transvection(&w[0]) * &f.transvection(&w[1])
        })
        .collect();
    let seed = generators[0].clone();
    (generators, seed)
}

fn three_cycle(n: usize, a: usize, b: usize, c: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p[a] = b;
    p[b] = c;
    p[c] = a;
    p
}

/// The permutation `perm` of `Omega = {0..n}` acting on even-weight vectors,
/// optionally modulo the all-one vector.
///
/// Coordinates: basis `e_k = w_k + w_{n-1}` for `k < n-1`; in the quotient, the
/// representative with `x_{n-2} = 0` is used and `e_{n-2}` is dropped.
pub fn alternating_matrix(n: usize, quotiented: bool, perm: &[usize]) -> BitMatrix {
    let dim = n - 1 - quotiented as usize;
    let rows: Vec<BitVector> = (0..dim)
        .map(|k| {
            let mut image = BitVector::zeros(n);
            image.flip(perm[k]);
            image.flip(perm[n - 1]);
            alternating_coordinates(n, quotiented, &image)
        })
        .collect();
    BitMatrix::from_rows(dim, &rows)
}

/// Coordinates of an even-weight vector of `F_2^n` in the basis of [`alternating_matrix`].
pub fn alternating_coordinates(n: usize, quotiented: bool, x: &BitVector) -> BitVector {
    let mut x = x.clone();
    if quotiented && x.get(n - 2) {
        for i in 0..n {
            x.flip(i);
        }
    }
    x.slice(0, n - 1 - quotiented as usize)
}

/// Multiplication by a generator of `F_8^*` is `mult`, `x -> x^2` is `frob`;
/// returns `frob` and `frob^mult`, both in the class of `frob`.
pub fn make_7_3() -> Vec<BitMatrix> {
    // F_8 = F_2[a]/(a^3 + a + 1) with basis 1, a, a^2.
    let mult = BitMatrix::from_u64_rows(3, &[0b010, 0b100, 0b011]);
    let frob = BitMatrix::from_u64_rows(3, &[0b001, 0b100, 0b110]);
    let conj = &(&mult.inverse().unwrap() * &frob) * &mult;
    vec![frob, conj]
}

/// `A_7` inside `GL(4,2)`, through its action on one orbit of 15 Fano planes on 7 points.
///
/// The planes are the points of `PG(3,2)` and the 35 triples its lines (a plane lies
/// on a triple when the triple is one of its lines). Coordinates come from the
/// 4-dimensional space of functions on planes summing to zero on every line.
/// Returns the images of `(0 1 2)(3 4 5)` and `(0 1 3)(4 5 6)`, in that order.
pub fn make_a7_in_gl4() -> Vec<BitMatrix> {
    A7_GENERATORS.iter().map(|p| a7_permutation_matrix(p)).collect()
}

const A7_GENERATORS: [[usize; 7]; 2] = [[1, 2, 0, 4, 5, 3, 6], [1, 3, 2, 0, 5, 6, 4]];

/// The matrix of an even permutation of `{0..7}` in the model of [`make_a7_in_gl4`].
pub fn a7_permutation_matrix(perm: &[usize]) -> BitMatrix {
    thread_local! {
        static MODEL: A7Model = A7Model::new();
    }
    MODEL.with(|m| m.matrix(perm))
}

/// A Fano plane on `{0..7}` as a sorted list of its 7 triples, each a bitmask.
type Plane = [u8; 7];

struct A7Model {
    planes: Vec<Plane>,
    coords: Vec<BitVector>,
}

impl A7Model {
    fn new() -> Self {
        let base: Plane = canonical_plane([[0, 1, 3], [1, 2, 4], [2, 3, 5], [3, 4, 6], [4, 5, 0], [5, 6, 1], [6, 0, 2]].map(mask));
        // orbit of the base plane under A_7 = <(0 1 k)>
        let gens: Vec<Vec<usize>> = (2..7).map(|k| three_cycle(7, 0, 1, k)).collect();
        let mut planes = vec![base];
        let mut head = 0;
        while head < planes.len() {
            let p = planes[head];
            head += 1;
            for g in &gens {
                let q = permute_plane(&p, g);
                if !planes.contains(&q) {
                    planes.push(q);
                }
            }
        }
        planes.sort();
        assert_eq!(planes.len(), 15);

        let triples: Vec<u8> = (0u8..128).filter(|t| t.count_ones() == 3).collect();
        let mut incidence = BitMatrix::zeros(planes.len(), triples.len());
        for (i, p) in planes.iter().enumerate() {
            for (j, t) in triples.iter().enumerate() {
                if p.contains(t) {
                    incidence.set(i, j, true);
                }
            }
        }
        // x with x_a + x_b + x_c = 0 on every line
        let functions = incidence.kernel();
        assert_eq!(functions.dim(), 4);
        let coords = (0..planes.len())
            .map(|p| BitVector::from_bools(&functions.basis().iter().map(|s| s.get(p)).collect::<Vec<_>>()))
            .collect();
        Self { planes, coords }
    }

    fn matrix(&self, perm: &[usize]) -> BitMatrix {
        let image: Vec<usize> = self
            .planes
            .iter()
            .map(|p| self.planes.binary_search(&permute_plane(p, perm)).expect("orbit is A_7-invariant"))
            .collect();
        let mut chosen = Vec::new();
        let mut span = Subspace::zero(4);
        for (i, c) in self.coords.iter().enumerate() {
            if !span.contains(c) {
                span = span.sum(&Subspace::span(4, &[c.clone()])).unwrap();
                chosen.push(i);
            }
        }
        let basis = BitMatrix::from_rows(4, &chosen.iter().map(|&i| self.coords[i].clone()).collect::<Vec<_>>());
        let images = BitMatrix::from_rows(4, &chosen.iter().map(|&i| self.coords[image[i]].clone()).collect::<Vec<_>>());
        let m = &basis.inverse().unwrap() * &images;
        for (i, c) in self.coords.iter().enumerate() {
            assert_eq!(m.apply(c), self.coords[image[i]], "plane permutation is not linear");
        }
        m
    }
}

fn mask(t: [usize; 3]) -> u8 {
    t.iter().fold(0, |acc, &i| acc | 1 << i)
}

fn canonical_plane(mut lines: [u8; 7]) -> Plane {
    lines.sort();
    lines
}

fn permute_plane(p: &Plane, perm: &[usize]) -> Plane {
    canonical_plane(p.map(|t| (0..7).filter(|&i| t >> i & 1 == 1).fold(0u8, |acc, i| acc | 1 << perm[i])))
}

/// `w -> w + phi(w) v` over F4 with `phi(v) = w^2`, so `v -> w v`.
fn f4_reflection(phi: &[F4], v: &[F4]) -> F4Matrix {
    let n = v.len();
    let mut m = F4Matrix::identity(n);
    for i in 0..n {
        for j in 0..n {
            m.set(i, j, m.get(i, j) + phi[i] * v[j]);
        }
    }
    m
}

fn f4_unit(n: usize, i: usize, x: F4) -> Vec<F4> {
    let mut v = vec![F4::ZERO; n];
    v[i] = x;
    v
}

/// The diagonal reflection on `e_0` and, for each consecutive pair, the reflection
/// along `e_i + e_{i+1}` with `phi = w e_i^* + e_{i+1}^*`.
fn f4_reflection_generators(n: usize) -> (Vec<BitMatrix>, BitMatrix) {
    let mut generators = vec![f4_reflection(&f4_unit(n, 0, F4::W2), &f4_unit(n, 0, F4::ONE)).to_f2()];
    for i in 0..n - 1 {
        let mut v = f4_unit(n, i, F4::ONE);
        v[i + 1] = F4::ONE;
        let mut phi = f4_unit(n, i, F4::W);
        phi[i + 1] = F4::ONE;
        generators.push(f4_reflection(&phi, &v).to_f2());
    }
    let seed = generators[0].clone();
    (generators, seed)
}

/// `w -> w + w^2 h(w, v) v` for the standard Hermitian form, `h(v, v) = 1`.
fn unitary_reflection(v: &[F4]) -> F4Matrix {
    let phi: Vec<F4> = v.iter().map(|x| F4::W2 * x.conj()).collect();
    f4_reflection(&phi, v)
}

fn f4_unitary_generators(n: usize) -> (Vec<BitMatrix>, BitMatrix) {
    let mut vectors: Vec<Vec<F4>> = (0..n).map(|i| f4_unit(n, i, F4::ONE)).collect();
    for i in 0..n - 2 {
        let mut v = vec![F4::ZERO; n];
        v[i] = F4::ONE;
        v[i + 1] = F4::ONE;
        v[i + 2] = F4::ONE;
        vectors.push(v.clone());
        v[i + 1] = F4::W;
        vectors.push(v);
    }
    let generators: Vec<BitMatrix> = vectors.iter().map(|v| unitary_reflection(v).to_f2()).collect();
    let seed = generators[0].clone();
    (generators, seed)
}

fn control_generators(c: Control, truth: &mut GroundTruth) -> (Vec<BitMatrix>, BitMatrix) {
    match c {
        Control::FixedBlock { active, dim } => {
            let (inner, seed) = if active == 2 {
                let d = block_element(2, 0, 1);
                (vec![d.clone()], d)
            } else {
                sl_generators(active)
            };
            let pad = |m: &BitMatrix| BitMatrix::block_diagonal(&[m.clone(), BitMatrix::identity(dim - active)]);
            (inner.iter().map(pad).collect(), pad(&seed))
        }
        Control::PartialDual { dim } => {
            let rank = dim - 1;
            let (inner, _) = if rank == 2 {
                (vec![block_element(2, 0, 1)], block_element(2, 0, 1))
            } else {
                sl_generators(rank)
            };
            let mut generators: Vec<BitMatrix> = inner
                .iter()
                .map(|m| BitMatrix::block_diagonal(&[m.clone(), BitMatrix::identity(1)]))
                .collect();
            let v = &unit(dim, 0) + &unit(dim, rank);
            generators.push(make_d_element(&v, &unit(dim, 1), &unit(dim, 1), &unit(dim, 0)).unwrap());
            let seed = generators[0].clone();
            (generators, seed)
        }
        Control::DegenerateSymplectic { dim } => {
            let f = SymplecticForm::standard(dim);
            let chain: Vec<BitVector> = symplectic_chain(dim - 1).iter().map(|v| v.concat(&BitVector::zeros(1))).collect();
            let (mut generators, seed) = symplectic_generators(&f, &chain);
            // A chain vector shifted by the radical makes `[V,G]` all of V.
            let shifted = &chain[0] + &unit(dim, dim - 1);
            generators.push(&f.transvection(&shifted) * &f.transvection(&chain[1]));
            truth.symplectic = Some(f);
            (generators, seed)
        }
        Control::ReducibleBlocks { block } => {
            let (inner, seed) = sl_generators(block);
            let id = BitMatrix::identity(block);
            let mut generators: Vec<BitMatrix> = inner.iter().map(|m| BitMatrix::block_diagonal(&[m.clone(), id.clone()])).collect();
            generators.extend(inner.iter().map(|m| BitMatrix::block_diagonal(&[id.clone(), m.clone()])));
            (generators, BitMatrix::block_diagonal(&[seed, id]))
        }
    }
}

pub fn sl2_order(n: usize) -> u128 {
    let mut order: u128 = 1 << (n * (n - 1) / 2);
    for i in 2..=n {
        order *= (1u128 << i) - 1;
    }
    order
}

pub fn sp2_order(n: usize) -> u128 {
    let m = n / 2;
    let mut order: u128 = 1 << (m * m);
    for i in 1..=m {
        order *= (1u128 << (2 * i)) - 1;
    }
    order
}

/// `|Omega^+-(2m, 2)|`, the commutator subgroup of index 2 in the orthogonal group.
pub fn omega2_order(n: usize, sign: Sign) -> u128 {
    let m = n / 2;
    let mut order: u128 = 1 << (m * (m - 1));
    order *= match sign {
        Sign::Plus => (1u128 << m) - 1,
        Sign::Minus => (1u128 << m) + 1,
    };
    for i in 1..m {
        order *= (1u128 << (2 * i)) - 1;
    }
    order
}

pub fn gl4_order(n: usize) -> u128 {
    let q: u128 = 4;
    (0..n as u32).map(|i| q.pow(n as u32) - q.pow(i)).product()
}

/// `|GU(n, 2)| = 2^(n(n-1)/2) prod_{i=1..n} (2^i - (-1)^i)`.
pub fn gu2_order(n: usize) -> u128 {
    let mut order: u128 = 1 << (n * (n - 1) / 2);
    for i in 1..=n {
        order *= if i % 2 == 1 { (1u128 << i) + 1 } else { (1u128 << i) - 1 };
    }
    order
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{commutator_space, fixed_space};

    #[test]
    fn transvection_examples() {
        let t = make_transvection(&unit(3, 0), &unit(3, 1)).unwrap();
        assert_eq!(t.element_order(10).unwrap(), 2);
        assert_eq!(commutator_space(&t), Subspace::span(3, &[unit(3, 0)]));
        assert!(make_transvection(&unit(3, 0), &unit(3, 0)).is_err());
    }

    #[test]
    fn d_element_examples() {
        let displayed = BitMatrix::from_u64_rows(2, &[0b10, 0b11]);
        let e = |i| unit(2, i);
        // With w -> (w t_v) t_w the stated pair gives the inverse of the displayed block;
        // exchanging the roles of e1 and e2 gives the block itself.
        let d = make_d_element(&e(0), &e(1), &e(1), &e(0)).unwrap();
        assert_eq!(d, &displayed * &displayed);
        assert_eq!(make_d_element(&e(1), &e(0), &e(0), &e(1)).unwrap(), displayed);
        assert_eq!(d.element_order(10).unwrap(), 3);

        let n = 5;
        let (v, w) = (unit(n, 0), &unit(n, 1) + &unit(n, 3));
        let (phi, psi) = (unit(n, 1), &unit(n, 0) + &unit(n, 4));
        let d = make_d_element(&v, &w, &phi, &psi).unwrap();
        assert_eq!(commutator_space(&d), Subspace::span(n, &[v, w]));
        let kernels = Subspace::span(n, &[phi, psi]).annihilator();
        assert_eq!(fixed_space(&d), kernels);
        assert!(make_d_element(&unit(n, 0), &unit(n, 1), &unit(n, 2), &unit(n, 0)).is_err());
    }

    #[test]
    fn spec_round_trips_through_text() {
        for s in [
            "transvection:4",
            "frobenius73",
            "alt7",
            "symplectic:6",
            "orthogonal:6:minus",
            "alternating:8:quotient",
            "alternating:7",
            "f4-reflection:2",
            "f4-unitary:3",
            "fixed-block:2:4",
            "partial-dual:4",
            "degenerate-symplectic:5",
            "reducible-blocks:3",
        ] {
            let spec: FamilySpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
        }
        assert!("orthogonal:6".parse::<FamilySpec>().is_err());
    }

    #[test]
    fn invalid_specs_are_rejected() {
        assert!(make_family(FamilySpec::Symplectic { dim: 5 }).is_err());
        assert!(make_family(FamilySpec::Orthogonal { dim: 4, sign: Sign::Plus }).is_err());
        assert!(make_family(FamilySpec::Alternating { omega: 7, quotiented: true }).is_err());
        assert!(make_family(FamilySpec::Transvection { dim: 2 }).is_err());
    }

    #[test]
    fn order_formulas() {
        assert_eq!(sl2_order(3), 168);
        assert_eq!(sl2_order(4), 20160);
        assert_eq!(sp2_order(6), 1_451_520);
        assert_eq!(omega2_order(6, Sign::Minus), 25_920);
        assert_eq!(omega2_order(6, Sign::Plus), 20_160);
        assert_eq!(gl4_order(2), 180);
        assert_eq!(gl4_order(3), 181_440);
        assert_eq!(gu2_order(3), 648);
    }
}
