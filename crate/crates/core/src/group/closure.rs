use std::hash::Hash;

use rustc_hash::FxHashSet;

use super::GroupError;
use crate::gf2::BitMatrix;

/// Default element cap for closures.
pub const DEFAULT_CLOSURE_CAP: usize = 1 << 24;

/// A nonempty list of invertible square matrices of one dimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixGroup {
    dim: usize,
    generators: Vec<BitMatrix>,
}

impl MatrixGroup {
    pub fn new(generators: Vec<BitMatrix>) -> Result<Self, GroupError> {
        let first = generators.first().ok_or(GroupError::NoGenerators)?;
        let dim = first.rows();
        for (index, g) in generators.iter().enumerate() {
            if !g.is_square() || g.rows() != dim {
                return Err(GroupError::DimensionMismatch {
                    index,
                    expected: dim,
                    found: (g.rows(), g.cols()),
                });
            }
            if !g.is_invertible() {
                return Err(GroupError::NotInvertible { index });
            }
        }
        Ok(Self { dim, generators })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[BitMatrix] {
        &self.generators
    }

    /// Conjugates every generator by `x`: `g -> x^-1 g x`.
    pub fn conjugate_by(&self, x: &BitMatrix) -> Self {
        let inv = x.inverse().expect("conjugating matrix must be invertible");
        let generators = self.generators.iter().map(|g| &(&inv * g) * x).collect();
        Self {
            dim: self.dim,
            generators,
        }
    }

    pub fn closure(&self, cap: usize) -> Result<GroupClosure, GroupError> {
        closure(&self.generators, cap)
    }
}

/// Every element of a finite matrix group, sorted by packed bits.
#[derive(Clone, Debug)]
pub struct GroupClosure {
    dim: usize,
    generators: Vec<BitMatrix>,
    store: Store,
}

#[derive(Clone, Debug)]
enum Store {
    Word(Vec<u64>),
    Wide(Vec<u128>),
    Dense(Vec<BitMatrix>),
}

impl GroupClosure {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[BitMatrix] {
        &self.generators
    }

    pub fn order(&self) -> usize {
        match &self.store {
            Store::Word(v) => v.len(),
            Store::Wide(v) => v.len(),
            Store::Dense(v) => v.len(),
        }
    }

    pub fn contains(&self, m: &BitMatrix) -> bool {
        if !m.is_square() || m.rows() != self.dim {
            return false;
        }
        match &self.store {
            Store::Word(v) => v.binary_search(&(m.pack_u128().unwrap() as u64)).is_ok(),
            Store::Wide(v) => v.binary_search(&m.pack_u128().unwrap()).is_ok(),
            Store::Dense(v) => v.binary_search(m).is_ok(),
        }
    }

    /// Number of elements of order 3 with 2-dimensional commutator space.
    ///
    /// Packed stores are filtered on `rank(g + I) = 2` without unpacking, so only
    /// those few candidates are materialized.
    pub fn class_candidate_count(&self) -> usize {
        let n = self.dim;
        let identity = BitMatrix::identity(n);
        let check = |k: u128| super::is_class_candidate(&BitMatrix::unpack_u128(n, k));
        match &self.store {
            Store::Word(v) => {
                let id = identity.pack_u128().unwrap() as u64;
                v.iter()
                    .filter(|&&k| packed_rank(n, (k ^ id) as u128) == 2 && check(k as u128))
                    .count()
            }
            Store::Wide(v) => {
                let id = identity.pack_u128().unwrap();
                v.iter().filter(|&&k| packed_rank(n, k ^ id) == 2 && check(k)).count()
            }
            Store::Dense(v) => v.iter().filter(|g| super::is_class_candidate(g)).count(),
        }
    }

    /// Elements in canonical order.
    pub fn iter(&self) -> Box<dyn Iterator<Item = BitMatrix> + '_> {
        let n = self.dim;
        match &self.store {
            Store::Word(v) => Box::new(v.iter().map(move |&k| BitMatrix::unpack_u128(n, k as u128))),
            Store::Wide(v) => Box::new(v.iter().map(move |&k| BitMatrix::unpack_u128(n, k))),
            Store::Dense(v) => Box::new(v.iter().cloned()),
        }
    }
}

/// Rank of an `n x n` matrix packed row by row into `n` bits each.
fn packed_rank(n: usize, key: u128) -> usize {
    let mask = (1u128 << n) - 1;
    let mut rows = [0u64; 11];
    for (i, r) in rows.iter_mut().enumerate().take(n) {
        *r = ((key >> (i * n)) & mask) as u64;
    }
    let mut rank = 0;
    for i in 0..n {
        let Some(p) = (i..n).max_by_key(|&j| rows[j]).filter(|&j| rows[j] != 0) else {
            break;
        };
        rows.swap(i, p);
        let top = 63 - rows[i].leading_zeros();
        for j in i + 1..n {
            if rows[j] >> top & 1 == 1 {
                rows[j] ^= rows[i];
            }
        }
        rank += 1;
    }
    rank
}

/// Row-lookup form of a generator for packed multiplication: `table[r] = r * g`.
struct RowTable {
    table: Vec<u64>,
}

impl RowTable {
    fn new(g: &BitMatrix) -> Self {
        let n = g.rows();
        let table = (0..1u64 << n).map(|r| g.apply_u64(r)).collect();
        Self { table }
    }
}

trait Packed: Copy + Eq + Hash + Ord {
    fn pack(m: &BitMatrix) -> Self;
    fn times(self, n: usize, g: &RowTable) -> Self;
}

impl Packed for u64 {
    fn pack(m: &BitMatrix) -> Self {
        m.pack_u128().expect("dimension at most 8") as u64
    }

    #[inline]
    fn times(self, n: usize, g: &RowTable) -> Self {
        let mask = (1u64 << n) - 1;
        let mut out = 0u64;
        for i in 0..n {
            let row = (self >> (i * n)) & mask;
            out |= g.table[row as usize] << (i * n);
        }
        out
    }
}

impl Packed for u128 {
    fn pack(m: &BitMatrix) -> Self {
        m.pack_u128().expect("dimension at most 11")
    }

    #[inline]
    fn times(self, n: usize, g: &RowTable) -> Self {
        let mask = (1u128 << n) - 1;
        let mut out = 0u128;
        for i in 0..n {
            let row = (self >> (i * n)) & mask;
            out |= (g.table[row as usize] as u128) << (i * n);
        }
        out
    }
}

fn bfs_packed<K: Packed>(n: usize, generators: &[BitMatrix], cap: usize) -> Result<Vec<K>, GroupError> {
    let tables: Vec<RowTable> = generators.iter().map(RowTable::new).collect();
    let identity = K::pack(&BitMatrix::identity(n));
    let mut seen: FxHashSet<K> = FxHashSet::default();
    seen.insert(identity);
    let mut elements = vec![identity];
    let mut head = 0;
    while head < elements.len() {
        let x = elements[head];
        head += 1;
        for t in &tables {
            let y = x.times(n, t);
            if seen.insert(y) {
                if elements.len() >= cap {
                    return Err(GroupError::CapExceeded {
                        cap,
                        partial: elements.len(),
                    });
                }
                elements.push(y);
            }
        }
    }
    elements.sort_unstable();
    Ok(elements)
}

fn bfs_dense(n: usize, generators: &[BitMatrix], cap: usize) -> Result<Vec<BitMatrix>, GroupError> {
    let identity = BitMatrix::identity(n);
    let mut seen: FxHashSet<BitMatrix> = FxHashSet::default();
    seen.insert(identity.clone());
    let mut elements = vec![identity];
    let mut head = 0;
    while head < elements.len() {
        let x = elements[head].clone();
        head += 1;
        for g in generators {
            let y = &x * g;
            if !seen.contains(&y) {
                if elements.len() >= cap {
                    return Err(GroupError::CapExceeded {
                        cap,
                        partial: elements.len(),
                    });
                }
                seen.insert(y.clone());
                elements.push(y);
            }
        }
    }
    elements.sort_unstable();
    Ok(elements)
}

/// Breadth-first product closure of `generators`.
///
/// The element list is sorted, so the result does not depend on generator
/// order. Fails once more than `cap` elements have been found.
pub fn closure(generators: &[BitMatrix], cap: usize) -> Result<GroupClosure, GroupError> {
    let group = MatrixGroup::new(generators.to_vec())?;
    let n = group.dim;
    let store = if n * n <= 64 {
        Store::Word(bfs_packed::<u64>(n, generators, cap)?)
    } else if n * n <= 128 {
        Store::Wide(bfs_packed::<u128>(n, generators, cap)?)
    } else {
        Store::Dense(bfs_dense(n, generators, cap)?)
    };
    Ok(GroupClosure {
        dim: n,
        generators: group.generators,
        store,
    })
}
