//! The point-line geometry of a class: lines `[V,d]`, points where two lines meet.

use std::collections::VecDeque;

use rustc_hash::{FxHashMap, FxHashSet};
use serde::{Deserialize, Serialize};

use crate::gf2::{BitMatrix, BitVector, Subspace};
use crate::group::ClassD;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GeometryError {
    #[error("the lines do not meet in a point")]
    LinesDoNotMeet,
    #[error("{0} is not a line of the geometry")]
    UnknownLine(String),
    #[error("plane with {points} points and {lines} lines is neither projective nor dual affine")]
    UnknownPlane { points: usize, lines: usize },
    #[error("the geometry has no points")]
    NoPoints,
    #[error("incidence data is inconsistent: {0}")]
    Inconsistent(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PlaneKind {
    Projective,
    DualAffine,
}

/// The restriction of the geometry to the 3-space spanned by two meeting lines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlaneType {
    pub span: Subspace,
    pub kind: PlaneKind,
    /// The one point of the Fano plane that is missing, for dual affine planes.
    pub missing_point: Option<BitVector>,
}

/// `Pi(D)`: points are 1-spaces (stored by their nonzero vector), lines are 2-spaces.
#[derive(Debug, Clone)]
pub struct Geometry {
    dim: usize,
    points: Vec<BitVector>,
    lines: Vec<Subspace>,
    point_index: FxHashMap<BitVector, usize>,
    line_index: FxHashMap<Subspace, usize>,
    line_points: Vec<Vec<usize>>,
    point_lines: Vec<Vec<usize>>,
    /// Collinearity as bitset rows over point indices.
    adjacency: Vec<Vec<u64>>,
}

/// Counts reported for a geometry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeometryCensus {
    pub points: usize,
    pub lines: usize,
    pub projective_planes: usize,
    pub dual_affine_planes: usize,
    pub components: usize,
    pub diameter: usize,
}

/// The geometry of the class lines. A point is a vector lying on two distinct lines.
pub fn build_geometry(class: &ClassD) -> Geometry {
    Geometry::from_lines(class.dim(), class.lines().to_vec())
}

impl Geometry {
    pub fn from_lines(dim: usize, lines: Vec<Subspace>) -> Self {
        let mut count: FxHashMap<BitVector, usize> = FxHashMap::default();
        for l in &lines {
            for v in l.nonzero_vectors() {
                *count.entry(v).or_default() += 1;
            }
        }
        let points: Vec<BitVector> = count.into_iter().filter(|&(_, c)| c >= 2).map(|(v, _)| v).collect();
        Self::from_incidence(dim, points, lines).expect("points derived from lines are consistent")
    }

    /// Builds the geometry with an explicit point set; every point must lie on some line.
    pub fn from_incidence(dim: usize, mut points: Vec<BitVector>, mut lines: Vec<Subspace>) -> Result<Self, GeometryError> {
        points.sort();
        points.dedup();
        lines.sort();
        lines.dedup();
        if let Some(l) = lines.iter().find(|l| l.dim() != 2 || l.ambient_dim() != dim) {
            return Err(GeometryError::Inconsistent(format!("{l:?} is not a 2-space of the ambient space")));
        }
        if points.iter().any(|p| p.is_zero() || p.len() != dim) {
            return Err(GeometryError::Inconsistent("points must be nonzero vectors of the ambient space".into()));
        }
        let point_index: FxHashMap<BitVector, usize> = points.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        let line_index: FxHashMap<Subspace, usize> = lines.iter().cloned().enumerate().map(|(i, l)| (l, i)).collect();
        let mut line_points = vec![Vec::new(); lines.len()];
        let mut point_lines = vec![Vec::new(); points.len()];
        for (li, l) in lines.iter().enumerate() {
            for v in l.nonzero_vectors() {
                if let Some(&pi) = point_index.get(&v) {
                    line_points[li].push(pi);
                    point_lines[pi].push(li);
                }
            }
            line_points[li].sort_unstable();
        }
        if let Some(p) = point_lines.iter().position(|ls| ls.is_empty()) {
            return Err(GeometryError::Inconsistent(format!("point {} lies on no line", points[p].to_bit_string())));
        }
        let words = points.len().div_ceil(64);
        let mut adjacency = vec![vec![0u64; words]; points.len()];
        for pts in &line_points {
            for &a in pts {
                for &b in pts {
                    if a != b {
                        adjacency[a][b / 64] |= 1 << (b % 64);
                    }
                }
            }
        }
        Ok(Self {
            dim,
            points,
            lines,
            point_index,
            line_index,
            line_points,
            point_lines,
            adjacency,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[BitVector] {
        &self.points
    }

    pub fn lines(&self) -> &[Subspace] {
        &self.lines
    }

    pub fn point_subspace(&self, p: usize) -> Subspace {
        Subspace::span(self.dim, std::slice::from_ref(&self.points[p]))
    }

    pub fn point_of(&self, v: &BitVector) -> Option<usize> {
        self.point_index.get(v).copied()
    }

    pub fn line_of(&self, l: &Subspace) -> Option<usize> {
        self.line_index.get(l).copied()
    }

    pub fn points_on(&self, line: usize) -> &[usize] {
        &self.line_points[line]
    }

    pub fn lines_through(&self, point: usize) -> &[usize] {
        &self.point_lines[point]
    }

    pub fn collinear(&self, p: usize, q: usize) -> bool {
        self.adjacency[p][q / 64] >> (q % 64) & 1 == 1
    }

    pub fn neighbours(&self, p: usize) -> impl Iterator<Item = usize> + '_ {
        let row = &self.adjacency[p];
        (0..self.points.len()).filter(move |&q| row[q / 64] >> (q % 64) & 1 == 1)
    }

    /// `p^perp`: `p` together with every point not collinear with it.
    pub fn perp(&self, p: usize) -> Vec<usize> {
        (0..self.points.len()).filter(|&q| q == p || !self.collinear(p, q)).collect()
    }

    /// Lines holding a number of points other than 0 or 3.
    pub fn lines_with_bad_point_count(&self) -> Vec<usize> {
        (0..self.lines.len())
            .filter(|&l| !matches!(self.line_points[l].len(), 0 | 3))
            .collect()
    }

    /// Types the plane `l + m` spanned by two lines that meet in a point.
    pub fn plane_type(&self, l: &Subspace, m: &Subspace) -> Result<PlaneType, GeometryError> {
        for x in [l, m] {
            if !self.line_index.contains_key(x) {
                return Err(GeometryError::UnknownLine(format!("{x:?}")));
            }
        }
        let meet = l.meet(m).map_err(|_| GeometryError::LinesDoNotMeet)?;
        if l == m || meet.dim() != 1 || !self.point_index.contains_key(&meet.basis()[0]) {
            return Err(GeometryError::LinesDoNotMeet);
        }
        let span = l.sum(m).expect("same ambient space");
        self.type_plane(span)
    }

    /// The points of a plane are those on its lines; a global point of the 3-space on
    /// none of them is the missing point of a dual affine plane.
    fn type_plane(&self, span: Subspace) -> Result<PlaneType, GeometryError> {
        let lines_in = self.lines_in(&span);
        let mut covered: Vec<usize> = lines_in.iter().flat_map(|&l| self.line_points[l].iter().copied()).collect();
        covered.sort_unstable();
        covered.dedup();
        let uncovered: Vec<BitVector> = span
            .nonzero_vectors()
            .into_iter()
            .filter(|v| self.point_index.get(v).is_none_or(|p| covered.binary_search(p).is_err()))
            .collect();
        match (covered.len(), lines_in.len()) {
            (7, 7) => Ok(PlaneType {
                span,
                kind: PlaneKind::Projective,
                missing_point: None,
            }),
            (6, 4) if uncovered.len() == 1 => Ok(PlaneType {
                span,
                kind: PlaneKind::DualAffine,
                missing_point: uncovered.into_iter().next(),
            }),
            (points, lines) => Err(GeometryError::UnknownPlane { points, lines }),
        }
    }

    /// Lines of the geometry inside a 3-space.
    fn lines_in(&self, span: &Subspace) -> Vec<usize> {
        let vectors = span.nonzero_vectors();
        let mut found = Vec::new();
        for (i, a) in vectors.iter().enumerate() {
            for b in &vectors[i + 1..] {
                let l = Subspace::span(self.dim, &[a.clone(), b.clone()]);
                if let Some(&li) = self.line_index.get(&l) {
                    found.push(li);
                }
            }
        }
        found.sort_unstable();
        found.dedup();
        found
    }

    /// Every plane spanned by two meeting lines, typed. Errors on the first plane of
    /// neither kind.
    pub fn planes(&self) -> Result<Vec<PlaneType>, GeometryError> {
        let mut seen: FxHashSet<Subspace> = FxHashSet::default();
        let mut out = Vec::new();
        for lines in &self.point_lines {
            for (i, &a) in lines.iter().enumerate() {
                for &b in &lines[i + 1..] {
                    let span = self.lines[a].sum(&self.lines[b]).unwrap();
                    if seen.insert(span.clone()) {
                        out.push(self.type_plane(span)?);
                    }
                }
            }
        }
        out.sort_by(|x, y| x.span.cmp(&y.span));
        Ok(out)
    }

    /// Component count of the collinearity graph and the diameter of the largest component.
    pub fn connectivity(&self) -> Result<(usize, usize), GeometryError> {
        let n = self.points.len();
        if n == 0 {
            return Err(GeometryError::NoPoints);
        }
        let mut component = vec![usize::MAX; n];
        let mut sizes = Vec::new();
        for start in 0..n {
            if component[start] != usize::MAX {
                continue;
            }
            let c = sizes.len();
            let members = self.bfs(start).into_iter().enumerate().filter(|&(_, d)| d != usize::MAX).map(|(q, _)| q).collect::<Vec<_>>();
            for &q in &members {
                component[q] = c;
            }
            sizes.push(members.len());
        }
        let largest = (0..sizes.len()).max_by_key(|&c| (sizes[c], usize::MAX - c)).unwrap();
        let diameter = (0..n)
            .filter(|&p| component[p] == largest)
            .map(|p| self.bfs(p).into_iter().filter(|&d| d != usize::MAX).max().unwrap_or(0))
            .max()
            .unwrap_or(0);
        Ok((sizes.len(), diameter))
    }

    fn bfs(&self, start: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.points.len()];
        dist[start] = 0;
        let mut queue = VecDeque::from([start]);
        while let Some(p) = queue.pop_front() {
            for q in self.neighbours(p) {
                if dist[q] == usize::MAX {
                    dist[q] = dist[p] + 1;
                    queue.push_back(q);
                }
            }
        }
        dist
    }

    /// The meet over all points `p` of `<p^perp>`.
    pub fn perp_radical(&self) -> Result<Subspace, GeometryError> {
        if self.points.is_empty() {
            return Err(GeometryError::NoPoints);
        }
        let mut acc = Subspace::full(self.dim);
        for p in 0..self.points.len() {
            if acc.is_zero() {
                break;
            }
            let span = Subspace::span(self.dim, &self.perp(p).into_iter().map(|q| self.points[q].clone()).collect::<Vec<_>>());
            acc = acc.meet(&span).unwrap();
        }
        Ok(acc)
    }

    /// Classes of points with equal perps, each sorted, in order of first member.
    pub fn equiv_classes(&self) -> Vec<Vec<usize>> {
        // p^perp = q^perp exactly when p and q have the same neighbours
        let mut groups: FxHashMap<&[u64], Vec<usize>> = FxHashMap::default();
        let mut order = Vec::new();
        for p in 0..self.points.len() {
            let key = self.adjacency[p].as_slice();
            let entry = groups.entry(key).or_default();
            if entry.is_empty() {
                order.push(key);
            }
            entry.push(p);
        }
        order.into_iter().map(|k| groups.remove(k).unwrap()).collect()
    }

    /// Point-line pairs `(p, l)`, `p` off `l`, where `p` sees a number of points of `l`
    /// other than 0 or 2.
    pub fn cotriangular_violations(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (l, pts) in self.line_points.iter().enumerate() {
            if pts.is_empty() {
                continue;
            }
            for p in 0..self.points.len() {
                if pts.contains(&p) {
                    continue;
                }
                let seen = pts.iter().filter(|&&q| self.collinear(p, q)).count();
                if seen != 0 && seen != 2 {
                    out.push((p, l));
                }
            }
        }
        out
    }

    pub fn census(&self) -> Result<GeometryCensus, GeometryError> {
        let planes = self.planes()?;
        let projective = planes.iter().filter(|p| p.kind == PlaneKind::Projective).count();
        let (components, diameter) = if self.points.is_empty() { (0, 0) } else { self.connectivity()? };
        Ok(GeometryCensus {
            points: self.points.len(),
            lines: self.lines.len(),
            projective_planes: projective,
            dual_affine_planes: planes.len() - projective,
            components,
            diameter,
        })
    }

    /// A product of class elements mapping line `from` to line `to`, built along a chain
    /// of lines in which consecutive lines meet in a point. Each step uses an element
    /// whose line lies in the plane of the two lines. The result is checked before it
    /// is returned.
    pub fn transport(&self, class: &ClassD, from: usize, to: usize) -> Option<BitMatrix> {
        let path = self.line_path(from, to)?;
        let mut g = BitMatrix::identity(self.dim);
        for step in path.windows(2) {
            let (a, b) = (&self.lines[step[0]], &self.lines[step[1]]);
            let plane = a.sum(b).unwrap();
            let d = class
                .supported_in(&plane)
                .into_iter()
                .map(|i| &class.elements()[i])
                .find(|d| d.map_subspace(a) == *b)?;
            g = &g * d;
        }
        (g.map_subspace(&self.lines[from]) == self.lines[to]).then_some(g)
    }

    /// Shortest chain of lines from `from` to `to` with consecutive lines sharing a point.
    fn line_path(&self, from: usize, to: usize) -> Option<Vec<usize>> {
        let mut prev = vec![usize::MAX; self.lines.len()];
        prev[from] = from;
        let mut queue = VecDeque::from([from]);
        while let Some(l) = queue.pop_front() {
            if l == to {
                let mut path = vec![to];
                let mut x = to;
                while x != from {
                    x = prev[x];
                    path.push(x);
                }
                path.reverse();
                return Some(path);
            }
            for &p in &self.line_points[l] {
                for &m in &self.point_lines[p] {
                    if prev[m] == usize::MAX {
                        prev[m] = l;
                        queue.push_back(m);
                    }
                }
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{make_family, FamilySpec};
    use crate::group::{build_class, ClassOptions, MatrixGroup};

    fn geometry_of(spec: &str) -> (ClassD, Geometry) {
        let family = make_family(spec.parse::<FamilySpec>().unwrap()).unwrap();
        let group = MatrixGroup::new(family.generators).unwrap();
        let class = build_class(&group, &family.seed, None, ClassOptions::default()).unwrap();
        let geometry = build_geometry(&class);
        (class, geometry)
    }

    #[test]
    fn symplectic_plane_is_dual_affine() {
        let (_, g) = geometry_of("symplectic:4");
        assert_eq!((g.points().len(), g.lines().len()), (15, 20));
        let planes = g.planes().unwrap();
        assert!(planes.iter().all(|p| p.kind == PlaneKind::DualAffine));
        let f = crate::forms::SymplecticForm::standard(4);
        for plane in &planes {
            // the missing point is the radical of f on the plane
            let q = plane.missing_point.as_ref().unwrap();
            assert!(plane.span.basis().iter().all(|b| !f.eval(q, b)));
        }
        assert!(g.cotriangular_violations().is_empty());
    }

    #[test]
    fn projective_case_and_errors() {
        let (_, g) = geometry_of("transvection:3");
        let l = &g.lines()[0];
        let m = g.lines().iter().find(|m| *m != l).unwrap();
        assert_eq!(g.plane_type(l, m).unwrap().kind, PlaneKind::Projective);

        let (_, g) = geometry_of("symplectic:6");
        let l = &g.lines()[0];
        let skew = g.lines().iter().find(|m| l.meet(m).unwrap().is_zero()).unwrap();
        assert_eq!(g.plane_type(l, skew), Err(GeometryError::LinesDoNotMeet));
    }

    #[test]
    fn single_line_geometry() {
        let line = Subspace::from_u64s(3, &[0b001, 0b010]);
        let g = Geometry::from_incidence(3, line.nonzero_vectors(), vec![line]).unwrap();
        assert_eq!(g.connectivity().unwrap(), (1, 1));
        assert_eq!(g.equiv_classes(), vec![vec![0], vec![1], vec![2]]);
        assert_eq!(Geometry::from_lines(3, vec![]).connectivity(), Err(GeometryError::NoPoints));
    }

    #[test]
    fn reflection_family_has_no_points() {
        let (_, g) = geometry_of("f4-reflection:2");
        assert!(g.points().is_empty());
    }

    #[test]
    fn disjoint_blocks_give_two_components() {
        let (_, g) = geometry_of("reducible-blocks:3");
        // only the first block's class is present, so add the second block's lines by hand
        let mut lines = g.lines().to_vec();
        let shift = |l: &Subspace| {
            Subspace::span(6, &l.basis().iter().map(|v| BitVector::zeros(3).concat(&v.slice(0, 3))).collect::<Vec<_>>())
        };
        lines.extend(g.lines().iter().map(shift).collect::<Vec<_>>());
        let both = Geometry::from_lines(6, lines);
        assert_eq!(both.connectivity().unwrap().0, 2);
    }

    #[test]
    fn transport_follows_a_path() {
        let (class, g) = geometry_of("symplectic:6");
        for to in [1, 17, 200, g.lines().len() - 1] {
            let t = g.transport(&class, 0, to).unwrap();
            assert_eq!(t.map_subspace(&g.lines()[0]), g.lines()[to]);
        }
    }
}
