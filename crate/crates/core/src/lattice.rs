//! Finite lattices with explicit join and meet tables, and lattice
//! homomorphisms.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::semilattice::FiniteJoinSemilattice;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("lattice must have at least one element")]
    Empty,
    #[error("{table} table has wrong shape")]
    Shape { table: &'static str },
    #[error("{table} table entry ({row},{col}) out of range")]
    OutOfRange {
        table: &'static str,
        row: usize,
        col: usize,
    },
    #[error("{table} is not idempotent at {a}")]
    NotIdempotent { table: &'static str, a: usize },
    #[error("{table} is not commutative at ({a}, {b})")]
    NotCommutative { table: &'static str, a: usize, b: usize },
    #[error("{table} is not associative at ({a}, {b}, {c})")]
    NotAssociative {
        table: &'static str,
        a: usize,
        b: usize,
        c: usize,
    },
    #[error("absorption fails at ({a}, {b})")]
    NotAbsorptive { a: usize, b: usize },
    #[error("order relation is not a lattice order: {0}")]
    NotALattice(String),
    #[error("map has length {len}, source has {size} elements")]
    MapLength { len: usize, size: usize },
    #[error("map value {value} out of range for target of size {size}")]
    MapOutOfRange { value: usize, size: usize },
    #[error("map does not preserve {op} of {a} and {b}")]
    NotPreserved { op: &'static str, a: usize, b: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FiniteLattice {
    size: usize,
    join: Vec<usize>,
    meet: Vec<usize>,
}

impl fmt::Debug for FiniteLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteLattice")
            .field("size", &self.size)
            .finish_non_exhaustive()
    }
}

impl FiniteLattice {
    /// Validates both tables and the absorption laws. Absorption makes the two
    /// derived orders coincide.
    pub fn new(join: Vec<Vec<usize>>, meet: Vec<Vec<usize>>) -> Result<Self, LatticeError> {
        let size = join.len();
        if size == 0 {
            return Err(LatticeError::Empty);
        }
        let flatten = |t: Vec<Vec<usize>>, table: &'static str| -> Result<Vec<usize>, LatticeError> {
            if t.len() != size || t.iter().any(|r| r.len() != size) {
                return Err(LatticeError::Shape { table });
            }
            let flat: Vec<usize> = t.into_iter().flatten().collect();
            if let Some(p) = flat.iter().position(|&v| v >= size) {
                return Err(LatticeError::OutOfRange {
                    table,
                    row: p / size,
                    col: p % size,
                });
            }
            Ok(flat)
        };
        let join = flatten(join, "join")?;
        let meet = flatten(meet, "meet")?;
        let l = FiniteLattice { size, join, meet };
        l.check_axioms()?;
        Ok(l)
    }

    pub(crate) fn from_flat_unchecked(size: usize, join: Vec<usize>, meet: Vec<usize>) -> Self {
        FiniteLattice { size, join, meet }
    }

    fn check_axioms(&self) -> Result<(), LatticeError> {
        let n = self.size;
        for (table, t) in [("join", &self.join), ("meet", &self.meet)] {
            let op = |a: usize, b: usize| t[a * n + b];
            for a in 0..n {
                if op(a, a) != a {
                    return Err(LatticeError::NotIdempotent { table, a });
                }
                for b in 0..n {
                    if op(a, b) != op(b, a) {
                        return Err(LatticeError::NotCommutative { table, a, b });
                    }
                    for c in 0..n {
                        if op(op(a, b), c) != op(a, op(b, c)) {
                            return Err(LatticeError::NotAssociative { table, a, b, c });
                        }
                    }
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                if self.join(a, self.meet(a, b)) != a || self.meet(a, self.join(a, b)) != a {
                    return Err(LatticeError::NotAbsorptive { a, b });
                }
            }
        }
        Ok(())
    }

    /// Builds a lattice from an order given as `leq(x, y)`; fails if some pair
    /// lacks a least upper or greatest lower bound.
    pub fn from_order<F: Fn(usize, usize) -> bool>(size: usize, leq: F) -> Result<Self, LatticeError> {
        if size == 0 {
            return Err(LatticeError::Empty);
        }
        let rel: Vec<bool> = (0..size * size).map(|i| leq(i / size, i % size)).collect();
        let le = |x: usize, y: usize| rel[x * size + y];
        for x in 0..size {
            if !le(x, x) {
                return Err(LatticeError::NotALattice(format!("not reflexive at {x}")));
            }
            for y in 0..size {
                if x != y && le(x, y) && le(y, x) {
                    return Err(LatticeError::NotALattice(format!("not antisymmetric at ({x}, {y})")));
                }
                for z in 0..size {
                    if le(x, y) && le(y, z) && !le(x, z) {
                        return Err(LatticeError::NotALattice(format!(
                            "not transitive at ({x}, {y}, {z})"
                        )));
                    }
                }
            }
        }
        let mut join = vec![0; size * size];
        let mut meet = vec![0; size * size];
        for x in 0..size {
            for y in 0..size {
                let ub: Vec<usize> = (0..size).filter(|&z| le(x, z) && le(y, z)).collect();
                let lub = ub.iter().copied().find(|&z| ub.iter().all(|&w| le(z, w)));
                let lb: Vec<usize> = (0..size).filter(|&z| le(z, x) && le(z, y)).collect();
                let glb = lb.iter().copied().find(|&z| lb.iter().all(|&w| le(w, z)));
                match (lub, glb) {
                    (Some(j), Some(m)) => {
                        join[x * size + y] = j;
                        meet[x * size + y] = m;
                    }
                    _ => {
                        return Err(LatticeError::NotALattice(format!(
                            "({x}, {y}) has no join or no meet"
                        )))
                    }
                }
            }
        }
        Ok(FiniteLattice { size, join, meet })
    }

    /// A finite ⟨∨,0⟩-semilattice is a lattice; meets are joins of common lower bounds.
    pub fn from_semilattice(s: &FiniteJoinSemilattice) -> Self {
        FiniteLattice {
            size: s.size(),
            join: s.join_table().to_vec(),
            meet: s.meet_table(),
        }
    }

    pub fn chain(n: usize) -> Self {
        Self::from_semilattice(&FiniteJoinSemilattice::chain(n))
    }

    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn join(&self, a: usize, b: usize) -> usize {
        self.join[a * self.size + b]
    }

    #[inline]
    pub fn meet(&self, a: usize, b: usize) -> usize {
        self.meet[a * self.size + b]
    }

    #[inline]
    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.join(a, b) == b
    }

    pub fn bottom(&self) -> usize {
        (0..self.size).fold(0, |acc, x| self.meet(acc, x))
    }

    pub fn top(&self) -> usize {
        (0..self.size).fold(0, |acc, x| self.join(acc, x))
    }

    pub fn join_rows(&self) -> Vec<Vec<usize>> {
        self.join.chunks(self.size).map(<[usize]>::to_vec).collect()
    }

    pub fn meet_rows(&self) -> Vec<Vec<usize>> {
        self.meet.chunks(self.size).map(<[usize]>::to_vec).collect()
    }

    /// The join reduct with the bottom as zero.
    pub fn semilattice(&self) -> FiniteJoinSemilattice {
        FiniteJoinSemilattice::from_flat_unchecked(self.size, self.join.clone(), self.bottom(), None)
    }

    /// Sublattice on a subset closed under join and meet; elements numbered by
    /// ascending position in `elements`.
    pub fn sublattice(&self, elements: &[usize]) -> Result<Self, LatticeError> {
        let mut position = vec![usize::MAX; self.size];
        for (i, &e) in elements.iter().enumerate() {
            if e >= self.size {
                return Err(LatticeError::MapOutOfRange {
                    value: e,
                    size: self.size,
                });
            }
            position[e] = i;
        }
        let k = elements.len();
        if k == 0 {
            return Err(LatticeError::Empty);
        }
        let mut join = Vec::with_capacity(k * k);
        let mut meet = Vec::with_capacity(k * k);
        for &a in elements {
            for &b in elements {
                let (j, m) = (position[self.join(a, b)], position[self.meet(a, b)]);
                if j == usize::MAX || m == usize::MAX {
                    return Err(LatticeError::ShapeMismatch(format!(
                        "subset not closed under join/meet at ({a}, {b})"
                    )));
                }
                join.push(j);
                meet.push(m);
            }
        }
        Ok(FiniteLattice { size: k, join, meet })
    }
}

/// The product lattice; element `(l, r)` has index `l · |right| + r`.
pub fn lattice_product(left: &FiniteLattice, right: &FiniteLattice) -> FiniteLattice {
    let rs = right.size;
    let n = left.size * rs;
    let mut join = Vec::with_capacity(n * n);
    let mut meet = Vec::with_capacity(n * n);
    for x in 0..n {
        for y in 0..n {
            let (xl, xr, yl, yr) = (x / rs, x % rs, y / rs, y % rs);
            join.push(left.join(xl, yl) * rs + right.join(xr, yr));
            meet.push(left.meet(xl, yl) * rs + right.meet(xr, yr));
        }
    }
    FiniteLattice::from_flat_unchecked(n, join, meet)
}

#[derive(Clone)]
pub struct LatticeHom {
    source: Arc<FiniteLattice>,
    target: Arc<FiniteLattice>,
    map: Vec<usize>,
}

impl fmt::Debug for LatticeHom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LatticeHom")
            .field("source_size", &self.source.size)
            .field("target_size", &self.target.size)
            .field("map", &self.map)
            .finish()
    }
}

impl PartialEq for LatticeHom {
    fn eq(&self, other: &Self) -> bool {
        self.map == other.map
            && same_lattice(&self.source, &other.source)
            && same_lattice(&self.target, &other.target)
    }
}

impl Eq for LatticeHom {}

pub fn same_lattice(a: &Arc<FiniteLattice>, b: &Arc<FiniteLattice>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

impl LatticeHom {
    pub fn new(
        source: Arc<FiniteLattice>,
        target: Arc<FiniteLattice>,
        map: Vec<usize>,
    ) -> Result<Self, LatticeError> {
        if map.len() != source.size {
            return Err(LatticeError::MapLength {
                len: map.len(),
                size: source.size,
            });
        }
        if let Some(&value) = map.iter().find(|&&v| v >= target.size) {
            return Err(LatticeError::MapOutOfRange {
                value,
                size: target.size,
            });
        }
        let n = source.size;
        for a in 0..n {
            for b in (a + 1)..n {
                if map[source.join(a, b)] != target.join(map[a], map[b]) {
                    return Err(LatticeError::NotPreserved { op: "join", a, b });
                }
                if map[source.meet(a, b)] != target.meet(map[a], map[b]) {
                    return Err(LatticeError::NotPreserved { op: "meet", a, b });
                }
            }
        }
        Ok(LatticeHom { source, target, map })
    }

    /// No homomorphism check; for composites and fault injection.
    pub fn new_unchecked(
        source: Arc<FiniteLattice>,
        target: Arc<FiniteLattice>,
        map: Vec<usize>,
    ) -> Self {
        LatticeHom { source, target, map }
    }

    pub fn identity(l: &Arc<FiniteLattice>) -> Self {
        LatticeHom {
            source: l.clone(),
            target: l.clone(),
            map: (0..l.size).collect(),
        }
    }

    pub fn source(&self) -> &Arc<FiniteLattice> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FiniteLattice> {
        &self.target
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    pub fn is_surjective(&self) -> bool {
        let mut seen = vec![false; self.target.size];
        for &v in &self.map {
            seen[v] = true;
        }
        seen.into_iter().all(|s| s)
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &LatticeHom) -> Result<LatticeHom, LatticeError> {
        if !same_lattice(&first.target, &self.source) {
            return Err(LatticeError::ShapeMismatch(
                "cannot compose lattice homomorphisms with mismatched ends".into(),
            ));
        }
        Ok(LatticeHom {
            source: first.source.clone(),
            target: self.target.clone(),
            map: first.map.iter().map(|&x| self.map[x]).collect(),
        })
    }
}

/// Every lattice homomorphism `source → target`, by backtracking in index
/// order with pairwise join/meet checks against already assigned elements.
pub fn enumerate_lattice_homs(
    source: &Arc<FiniteLattice>,
    target: &Arc<FiniteLattice>,
    limit: usize,
) -> Vec<LatticeHom> {
    let n = source.size;
    let mut out = Vec::new();
    let mut values = vec![usize::MAX; n];
    fn go(
        x: usize,
        s: &FiniteLattice,
        t: &FiniteLattice,
        values: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
        limit: usize,
    ) {
        if out.len() >= limit {
            return;
        }
        if x == s.size {
            let n = s.size;
            let complete = (0..n).all(|a| {
                (0..n).all(|b| {
                    values[s.join(a, b)] == t.join(values[a], values[b])
                        && values[s.meet(a, b)] == t.meet(values[a], values[b])
                })
            });
            if complete {
                out.push(values.clone());
            }
            return;
        }
        for v in 0..t.size {
            values[x] = v;
            let ok = (0..=x).all(|y| {
                let (j, m) = (s.join(x, y), s.meet(x, y));
                (j > x || values[j] == t.join(v, values[y]))
                    && (m > x || values[m] == t.meet(v, values[y]))
            });
            if ok {
                go(x + 1, s, t, values, out, limit);
            }
        }
        values[x] = usize::MAX;
    }
    let mut raw = Vec::new();
    go(0, source, target, &mut values, &mut raw, limit);
    for m in raw {
        out.push(LatticeHom::new_unchecked(source.clone(), target.clone(), m));
    }
    out
}
