//! The pointless case: no two class lines meet. Lines are grouped into spreads of
//! 4-spaces, and the spreads give `V` the structure of a space over `F4`.

use std::collections::{BTreeSet, VecDeque};

use rustc_hash::{FxHashMap, FxHashSet};
use serde::{Deserialize, Serialize};

use crate::f4::{projective_points, vector_from_f2, vector_to_f2, F4Matrix, F4};
use crate::gf2::{BitMatrix, BitVector, Subspace};
use crate::group::{commutator_space, fixed_space, ClassD};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpreadError {
    #[error("class lines meet in a point; the geometry is not pointless")]
    HasPoints,
    #[error("a 4-space spanned by two class lines holds {0} class lines, expected 4 or 5")]
    LineCount(usize),
    #[error("members of a {0} spread do not partition the 4-space")]
    NotASpread(&'static str),
    #[error("no involution with the singular line as commutator was found")]
    NoInvolution,
    #[error("the spreads do not form a projective space of order 4: {0}")]
    NotProjective(String),
    #[error("no F4 structure is compatible with the group and the lines")]
    NoF4Structure,
    #[error("the commutant has dimension {0}, too large to search")]
    CommutantTooLarge(usize),
    #[error("the polarity is not given by a unique Hermitian form ({0} solutions)")]
    NotHermitian(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SpreadKind {
    Full,
    Tangent,
    Hyperbolic,
    Singular,
}

impl SpreadKind {
    fn name(self) -> &'static str {
        match self {
            SpreadKind::Full => "full",
            SpreadKind::Tangent => "tangent",
            SpreadKind::Hyperbolic => "hyperbolic",
            SpreadKind::Singular => "singular",
        }
    }
}

/// Five 2-spaces partitioning the nonzero vectors of a 4-space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Spread {
    pub span: Subspace,
    pub members: Vec<Subspace>,
    pub kind: SpreadKind,
    /// Indices into the class lines.
    pub class_lines: Vec<usize>,
    /// Indices into the singular lines.
    pub singular_lines: Vec<usize>,
}

/// Class lines, singular lines and every spread among them.
#[derive(Debug, Clone)]
pub struct SpreadComplex {
    dim: usize,
    lines: Vec<Subspace>,
    singular: Vec<Subspace>,
    spreads: Vec<Spread>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpreadCensus {
    pub full: usize,
    pub tangent: usize,
    pub hyperbolic: usize,
    pub singular: usize,
    pub singular_lines: usize,
}

/// All 2-dimensional subspaces of `w`.
fn two_spaces(w: &Subspace) -> Vec<Subspace> {
    let vectors = w.nonzero_vectors();
    let mut out = BTreeSet::new();
    for (i, a) in vectors.iter().enumerate() {
        for b in &vectors[i + 1..] {
            out.insert(Subspace::span(w.ambient_dim(), &[a.clone(), b.clone()]));
        }
    }
    out.into_iter().collect()
}

fn is_partition(span: &Subspace, members: &[Subspace]) -> bool {
    members.len() == 5
        && members.iter().all(|m| m.dim() == 2 && m.is_subspace_of(span))
        && members
            .iter()
            .enumerate()
            .all(|(i, a)| members[i + 1..].iter().all(|b| a.meet(b).unwrap().is_zero()))
}

/// Finds full and tangent spreads from pairs of class elements, collects the singular
/// lines of the tangent ones, then the hyperbolic and singular spreads.
pub fn find_spreads(class: &ClassD) -> Result<SpreadComplex, SpreadError> {
    let dim = class.dim();
    let lines = class.lines().to_vec();
    let mut seen_vectors = FxHashSet::default();
    for l in &lines {
        for v in l.nonzero_vectors() {
            if !seen_vectors.insert(v) {
                return Err(SpreadError::HasPoints);
            }
        }
    }
    let line_index: FxHashMap<&Subspace, usize> = lines.iter().enumerate().map(|(i, l)| (l, i)).collect();

    let mut spans = FxHashSet::default();
    let mut primary: Vec<(Subspace, Vec<Subspace>, SpreadKind)> = Vec::new();
    for a in 0..lines.len() {
        for b in a + 1..lines.len() {
            let Some(d) = class.elements_on_line(a).iter().copied().find(|&d| !lines[b].is_subspace_of(class.fixed_space_of(d))) else {
                continue;
            };
            let span = lines[a].sum(&lines[b]).unwrap();
            if !spans.insert(span.clone()) {
                continue;
            }
            let inside: Vec<Subspace> = two_spaces(&span).into_iter().filter(|s| line_index.contains_key(s)).collect();
            let (members, kind) = match inside.len() {
                5 => (inside, SpreadKind::Full),
                4 => {
                    let mut members = inside;
                    members.push(class.fixed_space_of(d).meet(&span).unwrap());
                    (members, SpreadKind::Tangent)
                }
                other => return Err(SpreadError::LineCount(other)),
            };
            if !is_partition(&span, &members) {
                return Err(SpreadError::NotASpread(kind.name()));
            }
            primary.push((span, members, kind));
        }
    }
    let singular: Vec<Subspace> = primary
        .iter()
        .filter(|(_, _, k)| *k == SpreadKind::Tangent)
        .map(|(_, m, _)| m[4].clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let singular_index: FxHashMap<&Subspace, usize> = singular.iter().enumerate().map(|(i, l)| (l, i)).collect();

    let mut secondary = Vec::new();
    for h in &singular {
        for (i, d) in class.elements().iter().enumerate() {
            if h.is_subspace_of(class.fixed_space_of(i)) {
                continue;
            }
            let span = commutator_space(d).sum(h).unwrap();
            if !spans.insert(span.clone()) {
                continue;
            }
            let members: Vec<Subspace> = two_spaces(&span)
                .into_iter()
                .filter(|s| line_index.contains_key(s) || singular_index.contains_key(s))
                .collect();
            let class_count = members.iter().filter(|s| line_index.contains_key(s)).count();
            if class_count != 2 || !is_partition(&span, &members) {
                return Err(SpreadError::NotASpread("hyperbolic"));
            }
            secondary.push((span, members, SpreadKind::Hyperbolic));
        }
    }
    for (i, h) in singular.iter().enumerate() {
        for k in &singular[i + 1..] {
            if !h.meet(k).unwrap().is_zero() {
                continue;
            }
            let span = h.sum(k).unwrap();
            if spans.contains(&span) {
                continue;
            }
            let members: Vec<Subspace> = two_spaces(&span)
                .into_iter()
                .filter(|s| line_index.contains_key(s) || singular_index.contains_key(s))
                .collect();
            if members.len() == 5 && members.iter().all(|s| singular_index.contains_key(s)) && is_partition(&span, &members) {
                spans.insert(span.clone());
                secondary.push((span, members, SpreadKind::Singular));
            }
        }
    }

    let mut spreads: Vec<Spread> = primary
        .into_iter()
        .chain(secondary)
        .map(|(span, mut members, kind)| {
            members.sort();
            let class_lines = members.iter().filter_map(|m| line_index.get(m).copied()).collect();
            let singular_lines = members.iter().filter_map(|m| singular_index.get(m).copied()).collect();
            Spread {
                span,
                members,
                kind,
                class_lines,
                singular_lines,
            }
        })
        .collect();
    spreads.sort_by(|a, b| (a.kind, &a.span).cmp(&(b.kind, &b.span)));
    Ok(SpreadComplex {
        dim,
        lines,
        singular,
        spreads,
    })
}

/// Violation counts for the lemmas of the pointless case; all zero when they hold.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpreadLemmaReport {
    /// `[V,d]` meets `C_V(e)` in something other than 0 or `[V,d]`.
    pub line_meets_fixed_space: usize,
    /// A class line meets a singular line.
    pub class_meets_singular: usize,
    /// Two singular lines meet.
    pub singular_meets_singular: usize,
    /// Two spreads share something other than nothing or one member.
    pub spread_intersections: usize,
    /// A full or tangent spread where `<D_W>` does not induce Alt(5) or Alt(4).
    pub induced_groups: usize,
    /// Full spreads coexist with singular lines.
    pub full_with_singular: usize,
    /// The spread graph on the class lines is disconnected or has diameter above 2.
    pub connectivity: usize,
    /// A 6-space spanned by two meeting spreads holds a number of lines other than 21.
    pub plane_counts: usize,
}

impl SpreadLemmaReport {
    pub fn total(&self) -> usize {
        self.line_meets_fixed_space
            + self.class_meets_singular
            + self.singular_meets_singular
            + self.spread_intersections
            + self.induced_groups
            + self.full_with_singular
            + self.connectivity
            + self.plane_counts
    }
}

impl SpreadComplex {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lines(&self) -> &[Subspace] {
        &self.lines
    }

    pub fn singular_lines(&self) -> &[Subspace] {
        &self.singular
    }

    pub fn spreads(&self) -> &[Spread] {
        &self.spreads
    }

    pub fn census(&self) -> SpreadCensus {
        let count = |k| self.spreads.iter().filter(|s| s.kind == k).count();
        SpreadCensus {
            full: count(SpreadKind::Full),
            tangent: count(SpreadKind::Tangent),
            hyperbolic: count(SpreadKind::Hyperbolic),
            singular: count(SpreadKind::Singular),
            singular_lines: self.singular.len(),
        }
    }

    pub fn lemma_report(&self, class: &ClassD) -> SpreadLemmaReport {
        let mut r = SpreadLemmaReport::default();
        for l in &self.lines {
            for e in 0..class.len() {
                let m = l.meet(class.fixed_space_of(e)).unwrap();
                if !m.is_zero() && m != *l {
                    r.line_meets_fixed_space += 1;
                }
            }
        }
        for h in &self.singular {
            r.class_meets_singular += self.lines.iter().filter(|l| !l.meet(h).unwrap().is_zero()).count();
        }
        for (i, h) in self.singular.iter().enumerate() {
            r.singular_meets_singular += self.singular[i + 1..].iter().filter(|k| !h.meet(k).unwrap().is_zero()).count();
        }
        for (i, s) in self.spreads.iter().enumerate() {
            for t in &self.spreads[i + 1..] {
                let meet = s.span.meet(&t.span).unwrap();
                if !(meet.is_zero() || (meet.dim() == 2 && s.members.contains(&meet) && t.members.contains(&meet))) {
                    r.spread_intersections += 1;
                }
            }
        }
        for s in self.spreads.iter().filter(|s| matches!(s.kind, SpreadKind::Full | SpreadKind::Tangent)) {
            let expected = if s.kind == SpreadKind::Full { 60 } else { 12 };
            if induced_group_order(class, s) != expected {
                r.induced_groups += 1;
            }
        }
        if self.census().full > 0 && !self.singular.is_empty() {
            r.full_with_singular = 1;
        }
        if !self.spread_graph_diameter().is_some_and(|d| d <= 2) {
            r.connectivity = 1;
        }
        r.plane_counts = self.plane_count_violations();
        r
    }

    /// Diameter of the graph on class lines joined when they share a full or tangent
    /// spread; `None` when disconnected.
    pub fn spread_graph_diameter(&self) -> Option<usize> {
        let n = self.lines.len();
        let mut adj = vec![BTreeSet::new(); n];
        for s in self.spreads.iter().filter(|s| matches!(s.kind, SpreadKind::Full | SpreadKind::Tangent)) {
            for &a in &s.class_lines {
                for &b in &s.class_lines {
                    if a != b {
                        adj[a].insert(b);
                    }
                }
            }
        }
        let mut diameter = 0;
        for start in 0..n {
            let mut dist = vec![usize::MAX; n];
            dist[start] = 0;
            let mut queue = VecDeque::from([start]);
            while let Some(x) = queue.pop_front() {
                for &y in &adj[x] {
                    if dist[y] == usize::MAX {
                        dist[y] = dist[x] + 1;
                        queue.push_back(y);
                    }
                }
            }
            diameter = diameter.max(*dist.iter().max()?);
            if dist.contains(&usize::MAX) {
                return None;
            }
        }
        Some(diameter)
    }

    fn plane_count_violations(&self) -> usize {
        let all: Vec<&Subspace> = self.lines.iter().chain(&self.singular).collect();
        let mut seen = FxHashSet::default();
        let mut bad = 0;
        for (i, s) in self.spreads.iter().enumerate() {
            for t in &self.spreads[i + 1..] {
                if s.span.meet(&t.span).unwrap().dim() != 2 {
                    continue;
                }
                let w = s.span.sum(&t.span).unwrap();
                if seen.insert(w.clone()) && all.iter().filter(|l| l.is_subspace_of(&w)).count() != 21 {
                    bad += 1;
                }
            }
        }
        bad
    }

    /// Whether `(points, spreads on them)` is a projective space of order 4: every
    /// block has five points, two points lie on exactly one block, and the Veblen-Young
    /// axiom holds. With `with_singular` the points include the singular lines.
    pub fn check_projective(&self, with_singular: bool) -> Result<(), SpreadError> {
        let bad = |m: String| Err(SpreadError::NotProjective(m));
        let mut points: Vec<&Subspace> = self.lines.iter().collect();
        if with_singular {
            points.extend(&self.singular);
        }
        let index: FxHashMap<&Subspace, usize> = points.iter().enumerate().map(|(i, p)| (*p, i)).collect();
        let blocks: Vec<Vec<usize>> = self
            .spreads
            .iter()
            .filter_map(|s| s.members.iter().map(|m| index.get(m).copied()).collect::<Option<Vec<_>>>())
            .collect();
        let n = points.len();
        let mut block_of = vec![usize::MAX; n * n];
        for (b, pts) in blocks.iter().enumerate() {
            for &p in pts {
                for &q in pts {
                    if p == q {
                        continue;
                    }
                    if block_of[p * n + q] != usize::MAX {
                        return bad("two points lie on two blocks".into());
                    }
                    block_of[p * n + q] = b;
                }
            }
        }
        if (0..n).any(|p| (0..n).any(|q| p != q && block_of[p * n + q] == usize::MAX)) {
            return bad("two points lie on no common block".into());
        }
        let mut through = vec![Vec::new(); n];
        for (b, pts) in blocks.iter().enumerate() {
            for &p in pts {
                through[p].push(b);
            }
        }
        let on = |b: usize, x: usize| blocks[b].contains(&x);
        for p in 0..n {
            for (i, &s1) in through[p].iter().enumerate() {
                for &s2 in &through[p][i + 1..] {
                    let rest1: Vec<usize> = blocks[s1].iter().copied().filter(|&x| x != p).collect();
                    let rest2: Vec<usize> = blocks[s2].iter().copied().filter(|&x| x != p).collect();
                    for &a in &rest1 {
                        for &c in &rest1 {
                            for &b in &rest2 {
                                for &d in &rest2 {
                                    if a == c || b == d {
                                        continue;
                                    }
                                    let (t1, t2) = (block_of[a * n + b], block_of[c * n + d]);
                                    if !blocks[t1].iter().any(|&x| on(t2, x)) {
                                        return bad("Veblen-Young fails".into());
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        let m = self.dim / 2;
        if n != (4usize.pow(m as u32) - 1) / 3 {
            return bad(format!("{n} points, not a projective space of F4-dimension {m}"));
        }
        Ok(())
    }

    /// An involution `t` generated by class elements supported in a tangent spread,
    /// with `[V,t]` its singular line, fixing the spread's 4-space pointwise and not
    /// centralizing `[V,f]`. Tries every admissible pair `(d, e)` and `(d, e^-1)`.
    pub fn singular_involution(&self, class: &ClassD, spread: &Spread, f: usize) -> Result<BitMatrix, SpreadError> {
        let h = spread
            .members
            .iter()
            .find(|m| !self.lines.contains(m))
            .filter(|_| spread.kind == SpreadKind::Tangent)
            .ok_or(SpreadError::NoInvolution)?;
        let f_line = &class.lines()[class.line_of(f)];
        if h.is_subspace_of(class.fixed_space_of(f)) {
            return Err(SpreadError::NoInvolution);
        }
        let on_spread: Vec<usize> = spread.class_lines.iter().flat_map(|&l| class.elements_on_line(l).iter().copied()).collect();
        let id = BitMatrix::identity(self.dim);
        for &d in &on_spread {
            if !f_line.is_subspace_of(class.fixed_space_of(d)) {
                continue;
            }
            for &e in &on_spread {
                if class.line_of(e) == class.line_of(d) || f_line.is_subspace_of(class.fixed_space_of(e)) {
                    continue;
                }
                let e = &class.elements()[e];
                for e in [e.clone(), e.inverse().expect("class elements are invertible")] {
                    let g = &class.elements()[d] * &e;
                    let t = &g * &g;
                    let fixed = fixed_space(&t);
                    if t != id
                        && (&t * &t) == id
                        && commutator_space(&t) == *h
                        && !f_line.is_subspace_of(&fixed)
                        && spread.span.is_subspace_of(&fixed)
                        && fixed.dim() + 2 == self.dim
                    {
                        return Ok(t);
                    }
                }
            }
        }
        Err(SpreadError::NoInvolution)
    }
}

/// Order of the permutation group induced on the class lines of a spread by the class
/// elements supported in its 4-space.
fn induced_group_order(class: &ClassD, spread: &Spread) -> usize {
    let lines: Vec<&Subspace> = spread.class_lines.iter().map(|&l| &class.lines()[l]).collect();
    let perms: Vec<Vec<u8>> = class
        .supported_in(&spread.span)
        .into_iter()
        .filter_map(|i| {
            let d = &class.elements()[i];
            lines
                .iter()
                .map(|l| {
                    let image = d.map_subspace(l);
                    lines.iter().position(|m| **m == image).map(|p| p as u8)
                })
                .collect()
        })
        .collect();
    let identity: Vec<u8> = (0..lines.len() as u8).collect();
    let mut seen: FxHashSet<Vec<u8>> = FxHashSet::from_iter([identity.clone()]);
    let mut queue = VecDeque::from([identity]);
    while let Some(p) = queue.pop_front() {
        for g in &perms {
            let q: Vec<u8> = p.iter().map(|&x| g[x as usize]).collect();
            if seen.insert(q.clone()) {
                queue.push_back(q);
            }
        }
    }
    seen.len()
}

/// The scalar action of `w` on `V`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct F4Structure {
    pub j_operator: BitMatrix,
}

impl F4Structure {
    pub fn is_field_action(&self) -> bool {
        let j = &self.j_operator;
        let id = BitMatrix::identity(j.rows());
        (&(j * j) + &(j + &id)).is_zero()
    }

    pub fn commutes_with(&self, g: &BitMatrix) -> bool {
        (&self.j_operator * g) == (g * &self.j_operator)
    }

    pub fn preserves(&self, line: &Subspace) -> bool {
        self.j_operator.map_subspace(line) == *line
    }

    /// Rows `b_1, b_1 J, b_2, b_2 J, ...`: an `F4`-basis written over `F2`, so that
    /// row vector `y` in `F4` coordinates corresponds to `y * basis`.
    pub fn basis(&self) -> BitMatrix {
        let n = self.j_operator.rows();
        let mut span = Subspace::zero(n);
        let mut rows = Vec::with_capacity(n);
        for i in 0..n {
            let b = BitVector::unit(n, i);
            if span.contains(&b) {
                continue;
            }
            let bj = self.j_operator.apply(&b);
            span = span.sum(&Subspace::span(n, &[b.clone(), bj.clone()])).unwrap();
            rows.push(b);
            rows.push(bj);
        }
        BitMatrix::from_rows(n, &rows)
    }

    /// `g` written in the `F4` coordinates of [`F4Structure::basis`].
    pub fn to_f4(&self, g: &BitMatrix) -> Option<F4Matrix> {
        let b = self.basis();
        F4Matrix::from_f2(&(&(&b * g) * &b.inverse()?))
    }
}

/// Largest commutant dimension searched for a field action.
pub const MAX_COMMUTANT_DIM: usize = 16;

/// Solves `J g = g J` for every generator and `l J = l` for every line, then picks
/// the solution with `J^2 + J + 1 = 0`. Of the two (`J` and `J^2`) the smaller
/// matrix is returned.
pub fn recover_f4(generators: &[BitMatrix], lines: &[Subspace]) -> Result<F4Structure, SpreadError> {
    let n = generators.first().map(|g| g.rows()).ok_or(SpreadError::NoF4Structure)?;
    let var = |i: usize, j: usize| i * n + j;
    let mut constraints: Vec<BitVector> = Vec::new();
    for g in generators {
        for i in 0..n {
            for k in 0..n {
                let mut c = BitVector::zeros(n * n);
                for j in 0..n {
                    if g.get(j, k) {
                        c.flip(var(i, j));
                    }
                    if g.get(i, j) {
                        c.flip(var(j, k));
                    }
                }
                constraints.push(c);
            }
        }
    }
    for l in lines {
        let ann = l.annihilator();
        for a in l.basis() {
            for c in ann.basis() {
                let mut row = BitVector::zeros(n * n);
                for i in a.iter_ones() {
                    for j in c.iter_ones() {
                        row.flip(var(i, j));
                    }
                }
                constraints.push(row);
            }
        }
    }
    // unknowns index the rows, so the left kernel is the solution space
    let system = BitMatrix::from_rows(n * n, &constraints).transpose();
    let solutions = system.kernel();
    if solutions.dim() > MAX_COMMUTANT_DIM {
        return Err(SpreadError::CommutantTooLarge(solutions.dim()));
    }
    solutions
        .vectors()
        .into_iter()
        .map(|v| {
            let rows: Vec<BitVector> = (0..n).map(|i| v.slice(i * n, (i + 1) * n)).collect();
            F4Structure {
                j_operator: BitMatrix::from_rows(n, &rows),
            }
        })
        .filter(F4Structure::is_field_action)
        .min_by(|a, b| a.j_operator.cmp(&b.j_operator))
        .ok_or(SpreadError::NoF4Structure)
}

/// A Hermitian form on the `F4`-space, in the coordinates of `f4.basis()`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HermitianModel {
    pub f4: F4Structure,
    pub gram: F4Matrix,
    /// The 2-spaces `<v>_F4` with `h(v, v) = 0`, sorted.
    pub absolute_points: Vec<Subspace>,
}

impl HermitianModel {
    pub fn is_invariant_under(&self, g: &BitMatrix) -> bool {
        self.f4
            .to_f4(g)
            .is_some_and(|m| m.mul(&self.gram).mul(&m.conj_transpose()) == self.gram)
    }
}

/// Absolute points of a Hermitian Gram matrix as 2-spaces of `V` over `F2`.
pub fn absolute_points(f4: &F4Structure, gram: &F4Matrix) -> Vec<Subspace> {
    let basis = f4.basis();
    let n = basis.rows();
    let mut out: Vec<Subspace> = projective_points(gram.dim())
        .into_iter()
        .filter(|v| gram.form(v, v).is_zero())
        .map(|v| {
            let x = basis.apply(&vector_to_f2(&v));
            let xj = f4.j_operator.apply(&x);
            Subspace::span(n, &[x, xj])
        })
        .collect();
    out.sort();
    out
}

/// Fits `h` to the polarity `l -> A_l`, where `A_l` is the fixed space of a class
/// element on `l` or of the involution attached to a singular line `l`. The Hermitian
/// matrices form an `F2`-space of dimension `m^2`; the polarity cuts it down to a
/// single nonzero form, so no scaling choice is left.
pub fn recover_hermitian(f4: &F4Structure, class: &ClassD, complex: &SpreadComplex) -> Result<HermitianModel, SpreadError> {
    let mut polarity: Vec<(Subspace, Subspace)> = Vec::new();
    for l in 0..class.lines().len() {
        let d = class.elements_on_line(l)[0];
        polarity.push((class.lines()[l].clone(), class.fixed_space_of(d).clone()));
    }
    for h in complex.singular_lines() {
        let spread = complex
            .spreads()
            .iter()
            .find(|s| s.kind == SpreadKind::Tangent && s.members.contains(h))
            .ok_or(SpreadError::NoInvolution)?;
        let f = (0..class.len())
            .find(|&f| !h.is_subspace_of(class.fixed_space_of(f)))
            .ok_or(SpreadError::NoInvolution)?;
        let t = complex.singular_involution(class, spread, f)?;
        polarity.push((h.clone(), fixed_space(&t)));
    }

    let basis = f4.basis();
    let inverse = basis.inverse().ok_or(SpreadError::NoF4Structure)?;
    let m = basis.rows() / 2;
    let coords = |x: &BitVector| vector_from_f2(&inverse.apply(x));
    // an F2 basis of the Hermitian matrices
    let mut hermitian_basis = Vec::new();
    for i in 0..m {
        let mut e = F4Matrix::zeros(m);
        e.set(i, i, F4::ONE);
        hermitian_basis.push(e);
        for j in i + 1..m {
            for x in [F4::ONE, F4::W] {
                let mut e = F4Matrix::zeros(m);
                e.set(i, j, x);
                e.set(j, i, x.conj());
                hermitian_basis.push(e);
            }
        }
    }
    let mut columns: Vec<BitVector> = Vec::new();
    for (point, perp) in &polarity {
        let v = coords(&point.basis()[0]);
        for w in perp.basis() {
            let w = coords(w);
            let values: Vec<(bool, bool)> = hermitian_basis.iter().map(|e| e.form(&w, &v).bits()).collect();
            columns.push(BitVector::from_bools(&values.iter().map(|p| p.0).collect::<Vec<_>>()));
            columns.push(BitVector::from_bools(&values.iter().map(|p| p.1).collect::<Vec<_>>()));
        }
    }
    let system = BitMatrix::from_rows(hermitian_basis.len(), &columns).transpose();
    let solutions = system.kernel();
    if solutions.dim() != 1 {
        return Err(SpreadError::NotHermitian((1usize << solutions.dim()) - 1));
    }
    let coefficients = &solutions.basis()[0];
    let mut gram = F4Matrix::zeros(m);
    for k in coefficients.iter_ones() {
        for i in 0..m {
            for j in 0..m {
                gram.set(i, j, gram.get(i, j) + hermitian_basis[k].get(i, j));
            }
        }
    }
    Ok(HermitianModel {
        f4: f4.clone(),
        absolute_points: absolute_points(f4, &gram),
        gram,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{make_family, FamilySpec};
    use crate::group::{build_class, ClassOptions, MatrixGroup};

    fn setup(spec: &str) -> (Vec<BitMatrix>, ClassD, SpreadComplex, crate::families::GroundTruth) {
        let family = make_family(spec.parse::<FamilySpec>().unwrap()).unwrap();
        let group = MatrixGroup::new(family.generators.clone()).unwrap();
        let class = build_class(&group, &family.seed, None, ClassOptions::default()).unwrap();
        let complex = find_spreads(&class).unwrap();
        (family.generators, class, complex, family.truth)
    }

    #[test]
    fn reflection_spreads_are_full() {
        for spec in ["f4-reflection:2", "f4-reflection:3"] {
            let (gens, class, complex, truth) = setup(spec);
            let census = complex.census();
            assert!(census.full > 0);
            assert_eq!((census.tangent, census.singular_lines), (0, 0));
            assert_eq!(complex.lemma_report(&class).total(), 0);
            complex.check_projective(false).unwrap();
            let f4 = recover_f4(&gens, complex.lines()).unwrap();
            let omega = truth.omega.unwrap();
            assert!(f4.j_operator == omega || f4.j_operator == &omega * &omega);
        }
    }

    #[test]
    fn unitary_three_has_nine_singular_lines() {
        let (gens, class, complex, _) = setup("f4-unitary:3");
        let census = complex.census();
        assert_eq!(census.full, 0);
        assert_eq!(census.singular_lines, 9);
        assert_eq!(complex.lemma_report(&class).total(), 0);
        complex.check_projective(true).unwrap();
        let lines: Vec<Subspace> = complex.lines().iter().chain(complex.singular_lines()).cloned().collect();
        let f4 = recover_f4(&gens, &lines).unwrap();
        let model = recover_hermitian(&f4, &class, &complex).unwrap();
        assert!(model.gram.is_hermitian());
        assert!(gens.iter().all(|g| model.is_invariant_under(g)));
        assert_eq!(model.absolute_points, complex.singular_lines());
    }

    #[test]
    fn unitary_four_has_singular_spreads() {
        let (gens, class, complex, _) = setup("f4-unitary:4");
        let census = complex.census();
        assert_eq!(census.singular_lines, 45);
        assert!(census.singular > 0);
        assert_eq!(complex.lemma_report(&class).total(), 0);
        complex.check_projective(true).unwrap();
        let lines: Vec<Subspace> = complex.lines().iter().chain(complex.singular_lines()).cloned().collect();
        let f4 = recover_f4(&gens, &lines).unwrap();
        let model = recover_hermitian(&f4, &class, &complex).unwrap();
        assert_eq!(model.absolute_points, complex.singular_lines());
    }

    #[test]
    fn singular_involution_properties() {
        let (_, class, complex, _) = setup("f4-unitary:3");
        for spread in complex.spreads().iter().filter(|s| s.kind == SpreadKind::Tangent) {
            let h = spread.members.iter().find(|m| !complex.lines().contains(m)).unwrap();
            let f = (0..class.len()).find(|&f| !h.is_subspace_of(class.fixed_space_of(f))).unwrap();
            let t = complex.singular_involution(&class, spread, f).unwrap();
            assert!((&t * &t).is_identity());
            assert_eq!(commutator_space(&t), *h);
            assert!(spread.span.is_subspace_of(&fixed_space(&t)));
        }
    }

    #[test]
    fn cotriangular_input_is_rejected() {
        let family = make_family("symplectic:4".parse::<FamilySpec>().unwrap()).unwrap();
        let group = MatrixGroup::new(family.generators).unwrap();
        let class = build_class(&group, &family.seed, None, ClassOptions::default()).unwrap();
        assert_eq!(find_spreads(&class).unwrap_err(), SpreadError::HasPoints);
    }
}
