use rustc_hash::{FxHashMap, FxHashSet};

use super::{commutator_space, fixed_space, is_class_candidate, GroupClosure, GroupError, MatrixGroup};
use crate::gf2::{BitMatrix, Subspace};

#[derive(Debug, Clone, Copy)]
pub struct ClassOptions {
    /// Largest class the orbit computation may build.
    pub cap: usize,
}

impl Default for ClassOptions {
    fn default() -> Self {
        Self {
            cap: super::DEFAULT_CLOSURE_CAP,
        }
    }
}

/// A conjugation-closed set `D` of order-3 elements with 2-dimensional commutator,
/// together with its lines `[V,d]`.
#[derive(Debug, Clone)]
pub struct ClassD {
    dim: usize,
    elements: Vec<BitMatrix>,
    fixed: Vec<Subspace>,
    lines: Vec<Subspace>,
    line_of: Vec<usize>,
    by_line: Vec<Vec<usize>>,
    inverse_closed: bool,
    /// `Some(true)` when `D` is the only class of order-3 elements with 2-dimensional
    /// commutator in `G`; `None` when `G` was not enumerated.
    pub is_single_class: Option<bool>,
    /// `Some(true)` when `<D> = G`; `None` when that could not be decided.
    pub generated_by_class: Option<bool>,
}

impl ClassD {
    /// Wraps an explicit element set. Every element must be an order-3 matrix with
    /// 2-dimensional commutator; closure under conjugation is the caller's concern.
    pub fn from_elements(mut elements: Vec<BitMatrix>) -> Result<Self, GroupError> {
        let dim = elements.first().map(|e| e.rows()).ok_or(GroupError::NoGenerators)?;
        if let Some(bad) = elements.iter().position(|d| d.rows() != dim || !is_class_candidate(d)) {
            return Err(GroupError::InvalidSeed(format!("element {bad} is not a class candidate")));
        }
        elements.sort();
        elements.dedup();
        let commutators: Vec<Subspace> = elements.iter().map(commutator_space).collect();
        let fixed = elements.iter().map(fixed_space).collect();
        let mut lines = commutators.clone();
        lines.sort();
        lines.dedup();
        let index: FxHashMap<&Subspace, usize> = lines.iter().enumerate().map(|(i, l)| (l, i)).collect();
        let line_of: Vec<usize> = commutators.iter().map(|c| index[c]).collect();
        let mut by_line = vec![Vec::new(); lines.len()];
        for (i, &l) in line_of.iter().enumerate() {
            by_line[l].push(i);
        }
        let set: FxHashSet<&BitMatrix> = elements.iter().collect();
        let inverse_closed = elements.iter().all(|d| set.contains(&(d * d)));
        Ok(Self {
            dim,
            elements,
            fixed,
            lines,
            line_of,
            by_line,
            inverse_closed,
            is_single_class: None,
            generated_by_class: None,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Elements in canonical (sorted) order.
    pub fn elements(&self) -> &[BitMatrix] {
        &self.elements
    }

    pub fn fixed_space_of(&self, i: usize) -> &Subspace {
        &self.fixed[i]
    }

    /// Distinct lines `[V,d]`, sorted.
    pub fn lines(&self) -> &[Subspace] {
        &self.lines
    }

    pub fn line_of(&self, i: usize) -> usize {
        self.line_of[i]
    }

    /// Indices of the elements `d` with `[V,d]` equal to line `l`.
    pub fn elements_on_line(&self, l: usize) -> &[usize] {
        &self.by_line[l]
    }

    pub fn index_of(&self, d: &BitMatrix) -> Option<usize> {
        self.elements.binary_search(d).ok()
    }

    pub fn contains(&self, d: &BitMatrix) -> bool {
        self.index_of(d).is_some()
    }

    pub fn inverse_closed(&self) -> bool {
        self.inverse_closed
    }

    /// Elements whose line lies inside `w` (the set `D_W`).
    pub fn supported_in(&self, w: &Subspace) -> Vec<usize> {
        (0..self.elements.len())
            .filter(|&i| self.lines[self.line_of[i]].is_subspace_of(w))
            .collect()
    }

    /// `A_U`: the meet of the fixed spaces of all `d` with `[V,d] <= U`.
    pub fn centralized_by_support(&self, u: &Subspace) -> Subspace {
        self.supported_in(u)
            .into_iter()
            .fold(Subspace::full(self.dim), |acc, i| acc.meet(&self.fixed[i]).unwrap())
    }
}

/// The conjugation orbit of `seed` under the group generated by `group`'s generators.
///
/// When `enumerated` is given, also decides whether the orbit is the only class of
/// order-3 elements with 2-dimensional commutator, and whether it generates `G`.
pub fn build_class(
    group: &MatrixGroup,
    seed: &BitMatrix,
    enumerated: Option<&GroupClosure>,
    options: ClassOptions,
) -> Result<ClassD, GroupError> {
    if seed.rows() != group.dim() || !is_class_candidate(seed) {
        return Err(GroupError::InvalidSeed(
            "seed must have order 3 and a 2-dimensional commutator space".into(),
        ));
    }
    let pairs: Vec<(BitMatrix, BitMatrix)> = group
        .generators()
        .iter()
        .map(|g| (g.inverse().expect("generators are invertible"), g.clone()))
        .collect();
    let mut seen: FxHashSet<BitMatrix> = FxHashSet::default();
    seen.insert(seed.clone());
    let mut orbit = vec![seed.clone()];
    let mut head = 0;
    while head < orbit.len() {
        let d = orbit[head].clone();
        head += 1;
        for (inv, g) in &pairs {
            let c = &(inv * &d) * g;
            if !seen.contains(&c) {
                if orbit.len() >= options.cap {
                    return Err(GroupError::CapExceeded {
                        cap: options.cap,
                        partial: orbit.len(),
                    });
                }
                seen.insert(c.clone());
                orbit.push(c);
            }
        }
    }
    drop(seen);
    let mut class = ClassD::from_elements(orbit)?;

    let generators_in_class = group.generators().iter().all(|g| class.contains(g));
    if let Some(all) = enumerated {
        let candidates = all.class_candidate_count();
        class.is_single_class = Some(candidates == class.len());
        class.generated_by_class = Some(if generators_in_class {
            true
        } else {
            super::closure(class.elements(), all.order())
                .map(|sub| sub.order() == all.order())
                .unwrap_or(false)
        });
    } else if generators_in_class {
        class.generated_by_class = Some(true);
    }
    Ok(class)
}
