//! Shared fixtures, independent oracles and lemma checks for the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use gf2class_core::families::{make_family, Family, FamilySpec};
use gf2class_core::group::{
    build_class, closure, commutator_space, fixed_space, invariant_subspace_check, ClassD, ClassOptions, GroupClosure,
    Invariance, MatrixGroup,
};
use gf2class_core::spread::SpreadComplex;
use gf2class_core::{BitMatrix, BitVector, Subspace};
use rand::Rng;

/// The end-to-end matrix: every family with its admissible variants.
pub const MATRIX: &[&str] = &[
    "transvection:3",
    "transvection:4",
    "transvection:5",
    "transvection:6",
    "frobenius73",
    "alt7",
    "symplectic:6",
    "orthogonal:6:plus",
    "orthogonal:6:minus",
    "alternating:5",
    "alternating:6:quotient",
    "alternating:7",
    "alternating:8:quotient",
    "f4-reflection:2",
    "f4-reflection:3",
    "f4-unitary:3",
];

/// Constructions violating a hypothesis. Even `|Omega|` without the quotient fixes the
/// all-one vector.
pub const CONTROLS: &[&str] = &[
    "fixed-block:2:4",
    "fixed-block:3:5",
    "partial-dual:4",
    "partial-dual:6",
    "degenerate-symplectic:5",
    "reducible-blocks:3",
    "alternating:6",
    "alternating:8",
];

/// Families with points, dimension at most 8.
pub const POINTED: &[&str] = &[
    "transvection:3",
    "transvection:4",
    "transvection:5",
    "frobenius73",
    "alt7",
    "symplectic:4",
    "symplectic:6",
    "symplectic:8",
    "orthogonal:6:plus",
    "orthogonal:6:minus",
    "orthogonal:8:plus",
    "orthogonal:8:minus",
    "alternating:5",
    "alternating:6:quotient",
    "alternating:7",
    "alternating:8:quotient",
    "alternating:9",
    "alternating:10:quotient",
];

/// Families without points, dimension at most 8.
pub const POINTLESS: &[&str] = &["f4-reflection:2", "f4-reflection:3", "f4-reflection:4", "f4-unitary:3", "f4-unitary:4"];

pub fn family(spec: &str) -> Family {
    make_family(spec.parse::<FamilySpec>().unwrap()).unwrap()
}

pub struct Built {
    pub family: Family,
    pub group: MatrixGroup,
    pub all: Option<GroupClosure>,
    pub class: ClassD,
}

pub fn built(spec: &str, enumerate: bool) -> Built {
    let family = family(spec);
    let group = MatrixGroup::new(family.generators.clone()).unwrap();
    let all = enumerate.then(|| closure(&family.generators, 1 << 24).unwrap());
    let class = build_class(&group, &family.seed, all.as_ref(), ClassOptions::default()).unwrap();
    Built {
        family,
        group,
        all,
        class,
    }
}

/// Brute-force computations on matrices packed one `u64` per row, sharing nothing with
/// the library beyond reading matrix rows.
pub mod oracle {
    use super::*;

    pub type Packed = Vec<u64>;

    pub fn pack(m: &BitMatrix) -> Packed {
        (0..m.rows()).map(|i| m.row_u64(i)).collect()
    }

    pub fn apply(v: u64, m: &Packed) -> u64 {
        let mut acc = 0;
        for (i, row) in m.iter().enumerate() {
            if v >> i & 1 == 1 {
                acc ^= row;
            }
        }
        acc
    }

    pub fn mul(a: &Packed, b: &Packed) -> Packed {
        a.iter().map(|&r| apply(r, b)).collect()
    }

    pub fn identity(n: usize) -> Packed {
        (0..n).map(|i| 1u64 << i).collect()
    }

    pub fn inverse(g: &Packed) -> Packed {
        let id = identity(g.len());
        let mut prev = id.clone();
        let mut p = g.clone();
        while p != id {
            prev = p.clone();
            p = mul(&p, g);
        }
        if g == &id {
            id
        } else {
            prev
        }
    }

    /// One byte per row; dimension at most 8.
    fn key(m: &Packed) -> u64 {
        m.iter().enumerate().fold(0, |acc, (i, &r)| acc | r << (8 * i))
    }

    pub fn group_order(gens: &[BitMatrix]) -> usize {
        let gens: Vec<Packed> = gens.iter().map(pack).collect();
        let id = identity(gens[0].len());
        assert!(id.len() <= 8);
        let mut seen = HashSet::from([key(&id)]);
        let mut queue = VecDeque::from([id]);
        while let Some(x) = queue.pop_front() {
            for g in &gens {
                let y = mul(&x, g);
                if seen.insert(key(&y)) {
                    queue.push_back(y);
                }
            }
        }
        seen.len()
    }

    pub fn class(gens: &[BitMatrix], seed: &BitMatrix) -> Vec<Packed> {
        let pairs: Vec<(Packed, Packed)> = gens.iter().map(|g| (inverse(&pack(g)), pack(g))).collect();
        let s = pack(seed);
        let mut seen = HashSet::from([s.clone()]);
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            for (inv, g) in &pairs {
                let y = mul(&mul(inv, &x), g);
                if seen.insert(y.clone()) {
                    queue.push_back(y);
                }
            }
        }
        seen.into_iter().collect()
    }

    /// Nonzero vectors of the image of `d + I`, sorted.
    pub fn line(d: &Packed) -> Vec<u64> {
        let n = d.len();
        let image: BTreeSet<u64> = (0..1u64 << n).map(|v| apply(v, d) ^ v).filter(|&w| w != 0).collect();
        image.into_iter().collect()
    }

    /// `(points, lines)`: distinct lines, and vectors on at least two of them.
    pub fn geometry_counts(gens: &[BitMatrix], seed: &BitMatrix) -> (usize, usize) {
        let lines: BTreeSet<Vec<u64>> = class(gens, seed).iter().map(line).collect();
        let mut on: HashMap<u64, usize> = HashMap::new();
        for l in &lines {
            for &v in l {
                *on.entry(v).or_default() += 1;
            }
        }
        (on.values().filter(|&&c| c >= 2).count(), lines.len())
    }

    /// `F4` as `{0, 1, w, w^2}` coded 0..4, multiplication by a table.
    fn f4_mul(a: u8, b: u8) -> u8 {
        const T: [[u8; 4]; 4] = [[0, 0, 0, 0], [0, 1, 2, 3], [0, 2, 3, 1], [0, 3, 1, 2]];
        T[a as usize][b as usize]
    }

    /// Isotropic points of `h(x, y) = sum x_i y_i^2` on `F4^m`.
    pub fn isotropic_points(m: u32) -> usize {
        let mut count = 0;
        for code in 1..4usize.pow(m) {
            let mut h = 0u8;
            let mut c = code;
            for _ in 0..m {
                let x = (c % 4) as u8;
                h ^= f4_mul(x, f4_mul(x, x));
                c /= 4;
            }
            if h == 0 {
                count += 1;
            }
        }
        count / 3
    }
}

/// `V = [V,d] + C_V(d)` directly, for every class element.
pub fn decomposition_violations(class: &ClassD) -> usize {
    class
        .elements()
        .iter()
        .filter(|d| {
            let (c, f) = (commutator_space(d), fixed_space(d));
            !(c.dim() == 2 && c.meet(&f).unwrap().is_zero() && c.sum(&f).unwrap().is_full())
        })
        .count()
}

pub fn random_subspace<R: Rng>(rng: &mut R, n: usize, inside: Option<&Subspace>) -> Subspace {
    let k = rng.random_range(0..=n);
    let vectors: Vec<BitVector> = (0..k)
        .map(|_| match inside {
            Some(w) => w.basis().iter().filter(|_| rng.random_bool(0.5)).fold(BitVector::zeros(n), |acc, b| &acc + b),
            None => BitVector::from_u64(n, rng.random::<u64>() & ((1u64 << n) - 1)),
        })
        .collect();
    Subspace::span(n, &vectors)
}

/// Invariant-subspace trichotomy on `samples` subspaces: a third uniformly random, a third inside a fixed
/// space, a third containing a commutator line. Returns violations.
pub fn invariance_violations<R: Rng>(class: &ClassD, rng: &mut R, samples: usize) -> usize {
    let n = class.dim();
    let mut bad = 0;
    for s in 0..samples {
        let i = rng.random_range(0..class.len());
        let d = &class.elements()[i];
        let (line, fixed) = (commutator_space(d), fixed_space(d));
        let w = match s % 3 {
            0 => random_subspace(rng, n, None),
            1 => random_subspace(rng, n, Some(&fixed)),
            _ => random_subspace(rng, n, None).sum(&line).unwrap(),
        };
        let invariant = d.map_subspace(&w) == w;
        let centralized = w.is_subspace_of(&fixed);
        let contains = line.is_subspace_of(&w);
        let expected = match (centralized, contains) {
            (true, false) => Invariance::Centralized,
            (false, true) => Invariance::ContainsLine,
            _ => Invariance::NotInvariant,
        };
        if invariant != (centralized || contains)
            || (centralized && contains)
            || invariant_subspace_check(d, &w).unwrap() != expected
        {
            bad += 1;
        }
    }
    bad
}

/// Points and lines of the class, computed here rather than by the geometry module.
pub struct PlainGeometry {
    pub lines: Vec<Subspace>,
    pub line_set: HashSet<Subspace>,
    pub points: Vec<BitVector>,
    pub lines_through: HashMap<BitVector, Vec<usize>>,
}

pub fn plain_geometry(class: &ClassD) -> PlainGeometry {
    let lines: Vec<Subspace> = class.elements().iter().map(commutator_space).collect::<BTreeSet<_>>().into_iter().collect();
    let mut lines_through: HashMap<BitVector, Vec<usize>> = HashMap::new();
    for (i, l) in lines.iter().enumerate() {
        for v in l.nonzero_vectors() {
            lines_through.entry(v).or_default().push(i);
        }
    }
    lines_through.retain(|_, ls| ls.len() >= 2);
    let mut points: Vec<BitVector> = lines_through.keys().cloned().collect();
    points.sort();
    PlainGeometry {
        line_set: lines.iter().cloned().collect(),
        lines,
        points,
        lines_through,
    }
}

fn two_spaces_of(w: &Subspace) -> Vec<Subspace> {
    let vs = w.nonzero_vectors();
    let mut out = BTreeSet::new();
    for (i, a) in vs.iter().enumerate() {
        for b in &vs[i + 1..] {
            out.insert(Subspace::span(w.ambient_dim(), &[a.clone(), b.clone()]));
        }
    }
    out.into_iter().collect()
}

/// Every plane spanned by two lines through a point holds 7 lines covering
/// 7 points or 4 lines covering 6 points. Returns `(planes, violations)`.
pub fn plane_violations(g: &PlainGeometry) -> (usize, usize) {
    let mut seen = HashSet::new();
    let mut bad = 0;
    for p in &g.points {
        let through = &g.lines_through[p];
        for (i, &a) in through.iter().enumerate() {
            for &b in &through[i + 1..] {
                let w = g.lines[a].sum(&g.lines[b]).unwrap();
                if !seen.insert(w.clone()) {
                    continue;
                }
                let inside: Vec<Subspace> = two_spaces_of(&w).into_iter().filter(|l| g.line_set.contains(l)).collect();
                let covered: BTreeSet<BitVector> = inside
                    .iter()
                    .flat_map(|l| l.nonzero_vectors())
                    .filter(|v| g.lines_through.contains_key(v))
                    .collect();
                if !matches!((inside.len(), covered.len()), (7, 7) | (4, 6)) {
                    bad += 1;
                }
            }
        }
    }
    (seen.len(), bad)
}

/// Diameter of the collinearity graph, `None` if disconnected.
pub fn collinearity_diameter(g: &PlainGeometry) -> Option<usize> {
    let index: HashMap<&BitVector, usize> = g.points.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let n = g.points.len();
    let mut adj = vec![BTreeSet::new(); n];
    for l in &g.lines {
        let pts: Vec<usize> = l.nonzero_vectors().iter().filter_map(|v| index.get(v).copied()).collect();
        for &a in &pts {
            for &b in &pts {
                if a != b {
                    adj[a].insert(b);
                }
            }
        }
    }
    let mut diameter = 0;
    for s in 0..n {
        let mut dist = vec![usize::MAX; n];
        dist[s] = 0;
        let mut queue = VecDeque::from([s]);
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

/// Line/fixed-space dichotomy over all pairs of a class line and a class element.
pub fn line_fixed_dichotomy_violations(class: &ClassD) -> usize {
    let mut bad = 0;
    for line in class.lines() {
        for e in 0..class.len() {
            let m = line.meet(class.fixed_space_of(e)).unwrap();
            if !(m.is_zero() || &m == line) {
                bad += 1;
            }
        }
    }
    bad
}

/// For lines `l != m` with some `d` on `l` not centralizing `m`, the 4-space
/// `l + m` holds 4 or 5 class lines. Returns `(pairs, violations)`.
pub fn spread_count_violations(class: &ClassD) -> (usize, usize) {
    let lines = class.lines();
    let set: HashSet<&Subspace> = lines.iter().collect();
    let (mut pairs, mut bad) = (0, 0);
    for a in 0..lines.len() {
        for b in 0..lines.len() {
            if a == b || class.elements_on_line(a).iter().all(|&d| lines[b].is_subspace_of(class.fixed_space_of(d))) {
                continue;
            }
            pairs += 1;
            let w = lines[a].sum(&lines[b]).unwrap();
            let count = two_spaces_of(&w).iter().filter(|l| set.contains(l)).count();
            if w.dim() != 4 || !matches!(count, 4 | 5) {
                bad += 1;
            }
        }
    }
    (pairs, bad)
}

/// Full spreads and singular lines never coexist.
pub fn full_spreads_exclude_singular(complex: &SpreadComplex) -> bool {
    let c = complex.census();
    c.full == 0 || c.singular_lines == 0
}
