//! Matrix groups from generators: closure, the class `D`, and element-level invariants.

mod class;
mod closure;

pub use class::{build_class, ClassD, ClassOptions};
pub use closure::{closure, GroupClosure, MatrixGroup, DEFAULT_CLOSURE_CAP};

use serde::{Deserialize, Serialize};

use crate::gf2::{BitMatrix, Subspace};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GroupError {
    #[error("no generators given")]
    NoGenerators,
    #[error("generator {index} is {found:?}, expected {expected}x{expected}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        found: (usize, usize),
    },
    #[error("generator {index} is not invertible")]
    NotInvertible { index: usize },
    #[error("closure exceeded cap of {cap} elements ({partial} found)")]
    CapExceeded { cap: usize, partial: usize },
    #[error("seed is not an order-3 element with 2-dimensional commutator: {0}")]
    InvalidSeed(String),
}

/// `[V,d] = { vd - v }`, the image of `d + I`.
pub fn commutator_space(d: &BitMatrix) -> Subspace {
    (d + &BitMatrix::identity(d.rows())).image()
}

/// `C_V(d) = { v : vd = v }`, the kernel of `d + I`.
pub fn fixed_space(d: &BitMatrix) -> Subspace {
    (d + &BitMatrix::identity(d.rows())).kernel()
}

/// Commutator and fixed space of an element; for order-3 elements they are complements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommutatorDecomposition {
    pub commutator: Subspace,
    pub fixed: Subspace,
}

impl CommutatorDecomposition {
    pub fn of(d: &BitMatrix) -> Self {
        Self {
            commutator: commutator_space(d),
            fixed: fixed_space(d),
        }
    }

    pub fn is_direct_sum(&self) -> bool {
        let n = self.commutator.ambient_dim();
        self.commutator.meet(&self.fixed).map(|m| m.is_zero()).unwrap_or(false)
            && self.commutator.dim() + self.fixed.dim() == n
    }
}

/// True when `d` has order 3 and a 2-dimensional commutator space.
pub fn is_class_candidate(d: &BitMatrix) -> bool {
    if !d.is_square() {
        return false;
    }
    let id = BitMatrix::identity(d.rows());
    *d != id && d.pow(3) == id && commutator_space(d).dim() == 2
}

/// True when `t` is a transvection: an involution whose commutator space is a point.
pub fn is_transvection(t: &BitMatrix) -> bool {
    let id = BitMatrix::identity(t.rows());
    *t != id && (t * t) == id && commutator_space(t).dim() == 1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Invariance {
    /// `W <= C_V(d)`.
    Centralized,
    /// `[V,d] <= W`.
    ContainsLine,
    NotInvariant,
}

/// Classifies `w` against `d`: an invariant subspace is either centralized by `d`
/// or contains its commutator line, never both.
pub fn invariant_subspace_check(d: &BitMatrix, w: &Subspace) -> Result<Invariance, GroupError> {
    if !is_class_candidate(d) {
        return Err(GroupError::InvalidSeed("invariance check needs an order-3 element".into()));
    }
    if d.map_subspace(w) != *w {
        return Ok(Invariance::NotInvariant);
    }
    let dec = CommutatorDecomposition::of(d);
    let centralized = w.is_subspace_of(&dec.fixed);
    let contains = dec.commutator.is_subspace_of(w);
    match (centralized, contains) {
        (true, false) => Ok(Invariance::Centralized),
        (false, true) => Ok(Invariance::ContainsLine),
        (true, true) => unreachable!("commutator and fixed space of an order-3 element meet trivially"),
        (false, false) => unreachable!("an invariant subspace of an order-3 element must be centralized or contain its line"),
    }
}

/// The two group-level hypotheses plus transitivity on commutator lines.
///
/// `[V,G]` and `C_V(G)` are taken for `G = <D>`, so a class that generates only
/// part of the input group is caught here.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub dimension: usize,
    /// `dim [V,G]`.
    pub commutator_dim: usize,
    /// `dim C_V(G)`.
    pub fixed_dim: usize,
    /// Whether the class generates the input group; `None` if undecided.
    pub generated_by_class: Option<bool>,
    pub line_count: usize,
    pub line_orbits: usize,
    pub commutator_is_whole_space: bool,
    pub fixed_space_trivial: bool,
    pub transitive_on_lines: bool,
}

impl HypothesisReport {
    pub fn all_hold(&self) -> bool {
        self.commutator_is_whole_space
            && self.fixed_space_trivial
            && self.transitive_on_lines
            && self.generated_by_class != Some(false)
    }
}

/// `[V,G]` as the sum of the generators' commutator spaces.
pub fn group_commutator(group: &MatrixGroup) -> Subspace {
    group
        .generators()
        .iter()
        .fold(Subspace::zero(group.dim()), |acc, g| acc.sum(&commutator_space(g)).unwrap())
}

/// `C_V(G)` as the meet of the generators' fixed spaces.
pub fn group_fixed_space(group: &MatrixGroup) -> Subspace {
    group
        .generators()
        .iter()
        .fold(Subspace::full(group.dim()), |acc, g| acc.meet(&fixed_space(g)).unwrap())
}

/// Orbits of the generators on a `G`-invariant set of subspaces, as a label per item.
pub fn subspace_orbits(group: &MatrixGroup, items: &[Subspace]) -> Vec<usize> {
    let index: rustc_hash::FxHashMap<&Subspace, usize> = items.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let mut parent: Vec<usize> = (0..items.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (i, s) in items.iter().enumerate() {
        for g in group.generators() {
            let image = g.map_subspace(s);
            let j = *index.get(&image).expect("subspace set is not invariant under the generators");
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let roots: Vec<usize> = (0..items.len()).map(|i| find(&mut parent, i)).collect();
    let mut labels = rustc_hash::FxHashMap::default();
    roots
        .iter()
        .map(|r| {
            let next = labels.len();
            *labels.entry(*r).or_insert(next)
        })
        .collect()
}

/// `[V,<D>]`, the sum of the class lines.
pub fn class_commutator(class: &ClassD) -> Subspace {
    let mut acc = Subspace::zero(class.dim());
    for l in class.lines() {
        if acc.is_full() {
            break;
        }
        acc = acc.sum(l).unwrap();
    }
    acc
}

/// `C_V(<D>)`, the meet of the fixed spaces of the class elements.
pub fn class_fixed_space(class: &ClassD) -> Subspace {
    let mut acc = Subspace::full(class.dim());
    for i in 0..class.len() {
        if acc.is_zero() {
            break;
        }
        acc = acc.meet(class.fixed_space_of(i)).unwrap();
    }
    acc
}

pub fn check_hypotheses(group: &MatrixGroup, class: &ClassD) -> HypothesisReport {
    let n = group.dim();
    let commutator = class_commutator(class);
    let fixed = class_fixed_space(class);
    let labels = subspace_orbits(group, class.lines());
    let line_orbits = labels.iter().copied().max().map_or(0, |m| m + 1);
    HypothesisReport {
        dimension: n,
        commutator_dim: commutator.dim(),
        fixed_dim: fixed.dim(),
        generated_by_class: class.generated_by_class,
        line_count: class.lines().len(),
        line_orbits,
        commutator_is_whole_space: commutator.dim() == n,
        fixed_space_trivial: fixed.is_zero(),
        transitive_on_lines: line_orbits == 1,
    }
}
