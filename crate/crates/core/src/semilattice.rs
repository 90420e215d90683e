//! Finite ⟨∨,0⟩-semilattices given by join tables, their homomorphisms and
//! binary products.
//!
//! Elements are dense indices `0..size`. Every algebraic operation is a table
//! lookup, so all predicates below are exhaustive scans.

use std::collections::BinaryHeap;
use std::cmp::Reverse;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemilatticeError {
    #[error("semilattice must have at least one element")]
    Empty,
    #[error("join table is not square: row {row} has {len} entries, expected {size}")]
    NotSquare { row: usize, len: usize, size: usize },
    #[error("table entry ({row},{col}) = {value} is out of range for size {size}")]
    OutOfRange {
        row: usize,
        col: usize,
        value: usize,
        size: usize,
    },
    #[error("element index {index} out of range for size {size}")]
    IndexOutOfRange { index: usize, size: usize },
    #[error("join is not idempotent: {a} ∨ {a} = {result}")]
    NotIdempotent { a: usize, result: usize },
    #[error("join is not commutative: {a} ∨ {b} ≠ {b} ∨ {a}")]
    NotCommutative { a: usize, b: usize },
    #[error("join is not associative at ({a}, {b}, {c})")]
    NotAssociative { a: usize, b: usize, c: usize },
    #[error("zero {zero} is not neutral: {zero} ∨ {a} = {result}")]
    ZeroNotNeutral { zero: usize, a: usize, result: usize },
    #[error("unit {unit} is not absorbing: {unit} ∨ {a} = {result}")]
    UnitNotAbsorbing { unit: usize, a: usize, result: usize },
    #[error("map has length {len}, source has {size} elements")]
    MapLength { len: usize, size: usize },
    #[error("map does not send zero to zero (zero ↦ {image})")]
    ZeroNotPreserved { image: usize },
    #[error("map does not preserve the join of {a} and {b}")]
    JoinNotPreserved { a: usize, b: usize },
    #[error("homomorphisms do not share a source")]
    SourceMismatch,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("semilattice is not distributive: {0}")]
    NotDistributive(String),
}

/// A finite join-semilattice with least element `zero` and, optionally, a
/// designated unit (top) that homomorphisms in the ⟨∨,0,1⟩ signature preserve.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FiniteJoinSemilattice {
    size: usize,
    join: Vec<usize>,
    zero: usize,
    unit: Option<usize>,
}

impl fmt::Debug for FiniteJoinSemilattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteJoinSemilattice")
            .field("size", &self.size)
            .field("zero", &self.zero)
            .field("unit", &self.unit)
            .finish_non_exhaustive()
    }
}

impl FiniteJoinSemilattice {
    /// Validates a join table exhaustively. Errors name a witnessing element,
    /// pair or triple.
    pub fn new(
        table: Vec<Vec<usize>>,
        zero: usize,
        unit: Option<usize>,
    ) -> Result<Self, SemilatticeError> {
        let size = table.len();
        if size == 0 {
            return Err(SemilatticeError::Empty);
        }
        let mut join = Vec::with_capacity(size * size);
        for (row, entries) in table.iter().enumerate() {
            if entries.len() != size {
                return Err(SemilatticeError::NotSquare {
                    row,
                    len: entries.len(),
                    size,
                });
            }
            for (col, &value) in entries.iter().enumerate() {
                if value >= size {
                    return Err(SemilatticeError::OutOfRange {
                        row,
                        col,
                        value,
                        size,
                    });
                }
                join.push(value);
            }
        }
        Self::from_flat(size, join, zero, unit)
    }

    /// Same as [`FiniteJoinSemilattice::new`] for a row-major flat table.
    pub fn from_flat(
        size: usize,
        join: Vec<usize>,
        zero: usize,
        unit: Option<usize>,
    ) -> Result<Self, SemilatticeError> {
        if size == 0 {
            return Err(SemilatticeError::Empty);
        }
        if join.len() != size * size {
            return Err(SemilatticeError::NotSquare {
                row: 0,
                len: join.len(),
                size: size * size,
            });
        }
        if let Some(pos) = join.iter().position(|&v| v >= size) {
            return Err(SemilatticeError::OutOfRange {
                row: pos / size,
                col: pos % size,
                value: join[pos],
                size,
            });
        }
        for index in std::iter::once(zero).chain(unit) {
            if index >= size {
                return Err(SemilatticeError::IndexOutOfRange { index, size });
            }
        }
        let s = FiniteJoinSemilattice {
            size,
            join,
            zero,
            unit,
        };
        s.check_axioms()?;
        Ok(s)
    }

    /// Builds without validation. Only for tables that are semilattices by
    /// construction (products, images, powersets).
    pub(crate) fn from_flat_unchecked(
        size: usize,
        join: Vec<usize>,
        zero: usize,
        unit: Option<usize>,
    ) -> Self {
        debug_assert_eq!(join.len(), size * size);
        FiniteJoinSemilattice {
            size,
            join,
            zero,
            unit,
        }
    }

    fn check_axioms(&self) -> Result<(), SemilatticeError> {
        let n = self.size;
        for a in 0..n {
            let r = self.join(a, a);
            if r != a {
                return Err(SemilatticeError::NotIdempotent { a, result: r });
            }
        }
        for a in 0..n {
            for b in (a + 1)..n {
                if self.join(a, b) != self.join(b, a) {
                    return Err(SemilatticeError::NotCommutative { a, b });
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                let ab = self.join(a, b);
                for c in 0..n {
                    if self.join(ab, c) != self.join(a, self.join(b, c)) {
                        return Err(SemilatticeError::NotAssociative { a, b, c });
                    }
                }
            }
        }
        for a in 0..n {
            let r = self.join(self.zero, a);
            if r != a {
                return Err(SemilatticeError::ZeroNotNeutral {
                    zero: self.zero,
                    a,
                    result: r,
                });
            }
        }
        if let Some(unit) = self.unit {
            for a in 0..n {
                let r = self.join(unit, a);
                if r != unit {
                    return Err(SemilatticeError::UnitNotAbsorbing { unit, a, result: r });
                }
            }
        }
        Ok(())
    }

    /// The `n`-element chain `0 < 1 < … < n-1` (indices in order).
    pub fn chain(n: usize) -> Self {
        assert!(n > 0, "chain needs at least one element");
        let join = (0..n * n).map(|i| (i / n).max(i % n)).collect();
        Self::from_flat_unchecked(n, join, 0, None)
    }

    /// The powerset of a `k`-element set; element `m` is the subset with bitmask `m`.
    pub fn powerset(k: usize) -> Self {
        let n = 1usize << k;
        let join = (0..n * n).map(|i| (i / n) | (i % n)).collect();
        Self::from_flat_unchecked(n, join, 0, None)
    }

    pub fn with_unit(mut self) -> Self {
        self.unit = Some(self.top());
        self
    }

    pub fn without_unit(mut self) -> Self {
        self.unit = None;
        self
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn zero(&self) -> usize {
        self.zero
    }

    pub fn unit(&self) -> Option<usize> {
        self.unit
    }

    #[inline]
    pub fn join(&self, a: usize, b: usize) -> usize {
        self.join[a * self.size + b]
    }

    pub fn join_table(&self) -> &[usize] {
        &self.join
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        self.join.chunks(self.size).map(<[usize]>::to_vec).collect()
    }

    /// Derived order: `x ≤ y` iff `x ∨ y = y`.
    #[inline]
    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.join(x, y) == y
    }

    pub fn join_all<I: IntoIterator<Item = usize>>(&self, items: I) -> usize {
        items.into_iter().fold(self.zero, |acc, x| self.join(acc, x))
    }

    /// Largest element (join of everything).
    pub fn top(&self) -> usize {
        self.join_all(0..self.size)
    }

    /// Meet table; in a finite ⟨∨,0⟩-semilattice the meet of `x, y` is the
    /// join of their common lower bounds.
    pub fn meet_table(&self) -> Vec<usize> {
        let n = self.size;
        let mut meet = vec![self.zero; n * n];
        for x in 0..n {
            for y in x..n {
                let m = self.join_all((0..n).filter(|&z| self.leq(z, x) && self.leq(z, y)));
                meet[x * n + y] = m;
                meet[y * n + x] = m;
            }
        }
        meet
    }

    /// For every `c ≤ a ∨ b`: `c = (c ∧ a) ∨ (c ∧ b)`. Equivalent to the
    /// splitting definition because `c ∧ a` is the largest `a′ ≤ a` below `c`.
    pub fn is_distributive(&self) -> bool {
        self.distributivity_witness().is_none()
    }

    /// A triple `(a, b, c)` with `c ≤ a ∨ b` that admits no splitting.
    pub fn distributivity_witness(&self) -> Option<(usize, usize, usize)> {
        let n = self.size;
        let meet = self.meet_table();
        for a in 0..n {
            for b in 0..n {
                let ab = self.join(a, b);
                for c in 0..n {
                    if self.leq(c, ab) && self.join(meet[c * n + a], meet[c * n + b]) != c {
                        return Some((a, b, c));
                    }
                }
            }
        }
        None
    }

    /// Distributive, and every element has a complement relative to `0` and the top.
    pub fn is_boolean(&self) -> bool {
        if !self.is_distributive() {
            return false;
        }
        let n = self.size;
        let top = self.top();
        let meet = self.meet_table();
        (0..n).all(|x| (0..n).any(|y| self.join(x, y) == top && meet[x * n + y] == self.zero))
    }

    /// Nonzero `j` such that `j = a ∨ b` forces `j ∈ {a, b}`, ascending.
    pub fn join_irreducibles(&self) -> Vec<usize> {
        let n = self.size;
        (0..n)
            .filter(|&j| j != self.zero)
            .filter(|&j| {
                !(0..n).any(|a| a != j && (0..n).any(|b| b != j && self.join(a, b) == j))
            })
            .collect()
    }

    /// A linear extension of the order: repeatedly the smallest index whose
    /// strict lower bounds are all already listed.
    pub fn linear_extension(&self) -> Vec<usize> {
        let n = self.size;
        let mut below = vec![0usize; n];
        let mut above: Vec<Vec<usize>> = vec![Vec::new(); n];
        for x in 0..n {
            for y in 0..n {
                if x != y && self.leq(x, y) {
                    below[y] += 1;
                    above[x].push(y);
                }
            }
        }
        let mut heap: BinaryHeap<Reverse<usize>> =
            (0..n).filter(|&x| below[x] == 0).map(Reverse).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(Reverse(x)) = heap.pop() {
            order.push(x);
            for &y in &above[x] {
                below[y] -= 1;
                if below[y] == 0 {
                    heap.push(Reverse(y));
                }
            }
        }
        order
    }

    /// The sub-semilattice on a join-closed subset containing zero. Elements
    /// of the result are numbered by ascending position in `elements`.
    pub fn subsemilattice(&self, elements: &[usize]) -> Result<Self, SemilatticeError> {
        let mut position = vec![usize::MAX; self.size];
        for (i, &e) in elements.iter().enumerate() {
            if e >= self.size {
                return Err(SemilatticeError::IndexOutOfRange {
                    index: e,
                    size: self.size,
                });
            }
            position[e] = i;
        }
        let zero = position[self.zero];
        if zero == usize::MAX {
            return Err(SemilatticeError::ShapeMismatch(
                "subset does not contain zero".into(),
            ));
        }
        let k = elements.len();
        let mut join = Vec::with_capacity(k * k);
        for &a in elements {
            for &b in elements {
                let p = position[self.join(a, b)];
                if p == usize::MAX {
                    return Err(SemilatticeError::ShapeMismatch(format!(
                        "subset not closed under join: {a} ∨ {b}"
                    )));
                }
                join.push(p);
            }
        }
        let unit = self.unit.map(|u| position[u]).filter(|&p| p != usize::MAX);
        Ok(Self::from_flat_unchecked(k, join, zero, unit))
    }
}

/// A ⟨∨,0⟩-homomorphism with cached injectivity and
/// surjectivity flags.
#[derive(Clone)]
pub struct SemilatticeHom {
    source: Arc<FiniteJoinSemilattice>,
    target: Arc<FiniteJoinSemilattice>,
    map: Vec<usize>,
    injective: bool,
    surjective: bool,
}

impl fmt::Debug for SemilatticeHom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SemilatticeHom")
            .field("source_size", &self.source.size)
            .field("target_size", &self.target.size)
            .field("map", &self.map)
            .finish()
    }
}

impl PartialEq for SemilatticeHom {
    fn eq(&self, other: &Self) -> bool {
        self.map == other.map
            && same_semilattice(&self.source, &other.source)
            && same_semilattice(&self.target, &other.target)
    }
}

impl Eq for SemilatticeHom {}

pub fn same_semilattice(a: &Arc<FiniteJoinSemilattice>, b: &Arc<FiniteJoinSemilattice>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

impl SemilatticeHom {
    pub fn new(
        source: Arc<FiniteJoinSemilattice>,
        target: Arc<FiniteJoinSemilattice>,
        map: Vec<usize>,
    ) -> Result<Self, SemilatticeError> {
        if map.len() != source.size {
            return Err(SemilatticeError::MapLength {
                len: map.len(),
                size: source.size,
            });
        }
        if let Some(&bad) = map.iter().find(|&&v| v >= target.size) {
            return Err(SemilatticeError::IndexOutOfRange {
                index: bad,
                size: target.size,
            });
        }
        if map[source.zero] != target.zero {
            return Err(SemilatticeError::ZeroNotPreserved {
                image: map[source.zero],
            });
        }
        let n = source.size;
        for a in 0..n {
            for b in (a + 1)..n {
                if map[source.join(a, b)] != target.join(map[a], map[b]) {
                    return Err(SemilatticeError::JoinNotPreserved { a, b });
                }
            }
        }
        Ok(Self::new_unchecked(source, target, map))
    }

    /// No homomorphism check; indices must be in range. Used for composites
    /// of known homomorphisms and for fault injection.
    pub fn new_unchecked(
        source: Arc<FiniteJoinSemilattice>,
        target: Arc<FiniteJoinSemilattice>,
        map: Vec<usize>,
    ) -> Self {
        let mut seen = vec![false; target.size];
        let mut injective = true;
        for &v in &map {
            if seen[v] {
                injective = false;
            }
            seen[v] = true;
        }
        let surjective = seen.iter().all(|&s| s);
        SemilatticeHom {
            source,
            target,
            map,
            injective,
            surjective,
        }
    }

    pub fn identity(s: &Arc<FiniteJoinSemilattice>) -> Self {
        Self::new_unchecked(s.clone(), s.clone(), (0..s.size).collect())
    }

    /// The constant-zero map.
    pub fn zero_map(
        source: &Arc<FiniteJoinSemilattice>,
        target: &Arc<FiniteJoinSemilattice>,
    ) -> Self {
        Self::new_unchecked(source.clone(), target.clone(), vec![target.zero; source.size])
    }

    pub fn source(&self) -> &Arc<FiniteJoinSemilattice> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FiniteJoinSemilattice> {
        &self.target
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    pub fn is_injective(&self) -> bool {
        self.injective
    }

    pub fn is_surjective(&self) -> bool {
        self.surjective
    }

    pub fn is_order_reflecting(&self) -> bool {
        let n = self.source.size;
        let map = &self.map;
        (0..n).all(|x| (0..n).all(|y| !self.target.leq(map[x], map[y]) || self.source.leq(x, y)))
    }

    /// One-to-one and order-reflecting.
    pub fn is_embedding(&self) -> bool {
        self.injective && self.is_order_reflecting()
    }

    pub fn is_isomorphism(&self) -> bool {
        self.injective && self.surjective
    }

    /// Preserves the designated units (vacuous when the source has none).
    pub fn preserves_unit(&self) -> bool {
        match (self.source.unit, self.target.unit) {
            (None, _) => true,
            (Some(u), Some(v)) => self.map[u] == v,
            (Some(u), None) => self.map[u] == self.target.top(),
        }
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &SemilatticeHom) -> Result<SemilatticeHom, SemilatticeError> {
        if !same_semilattice(&first.target, &self.source) {
            return Err(SemilatticeError::ShapeMismatch(format!(
                "cannot compose: codomain of size {} is not the domain of size {}",
                first.target.size, self.source.size
            )));
        }
        let map = first.map.iter().map(|&x| self.map[x]).collect();
        Ok(Self::new_unchecked(
            first.source.clone(),
            self.target.clone(),
            map,
        ))
    }

    /// The inverse of an isomorphism.
    pub fn inverse(&self) -> Option<SemilatticeHom> {
        if !self.is_isomorphism() {
            return None;
        }
        let mut inv = vec![0; self.map.len()];
        for (x, &y) in self.map.iter().enumerate() {
            inv[y] = x;
        }
        Some(Self::new_unchecked(
            self.target.clone(),
            self.source.clone(),
            inv,
        ))
    }

    /// Image as a sub-semilattice of the target, with the corestriction and
    /// the inclusion.
    pub fn image(&self) -> (Arc<FiniteJoinSemilattice>, SemilatticeHom, SemilatticeHom) {
        let mut elements: Vec<usize> = self.map.clone();
        elements.sort_unstable();
        elements.dedup();
        let sub = Arc::new(
            self.target
                .subsemilattice(&elements)
                .expect("image of a homomorphism is a sub-semilattice"),
        );
        let mut position = vec![usize::MAX; self.target.size];
        for (i, &e) in elements.iter().enumerate() {
            position[e] = i;
        }
        let corestriction = Self::new_unchecked(
            self.source.clone(),
            sub.clone(),
            self.map.iter().map(|&v| position[v]).collect(),
        );
        let inclusion = Self::new_unchecked(sub.clone(), self.target.clone(), elements);
        (sub, corestriction, inclusion)
    }

    /// First element on which two parallel maps differ.
    pub fn first_difference(&self, other: &SemilatticeHom) -> Option<usize> {
        self.map.iter().zip(&other.map).position(|(a, b)| a != b)
    }
}

/// `C = A Π B` with projections; element `(l, r)` of the product has index
/// `l · |B| + r` (left index major).
#[derive(Clone, Debug)]
pub struct ProductDecomposition {
    product: Arc<FiniteJoinSemilattice>,
    left: Arc<FiniteJoinSemilattice>,
    right: Arc<FiniteJoinSemilattice>,
    left_proj: SemilatticeHom,
    right_proj: SemilatticeHom,
}

/// The product `A Π B` with componentwise join.
pub fn product(
    left: &Arc<FiniteJoinSemilattice>,
    right: &Arc<FiniteJoinSemilattice>,
) -> ProductDecomposition {
    let (ls, rs) = (left.size, right.size);
    let n = ls * rs;
    let mut join = Vec::with_capacity(n * n);
    for x in 0..n {
        let (xl, xr) = (x / rs, x % rs);
        for y in 0..n {
            let (yl, yr) = (y / rs, y % rs);
            join.push(left.join(xl, yl) * rs + right.join(xr, yr));
        }
    }
    let zero = left.zero * rs + right.zero;
    let unit = match (left.unit, right.unit) {
        (Some(a), Some(b)) => Some(a * rs + b),
        _ => None,
    };
    let product = Arc::new(FiniteJoinSemilattice::from_flat_unchecked(n, join, zero, unit));
    let left_proj =
        SemilatticeHom::new_unchecked(product.clone(), left.clone(), (0..n).map(|x| x / rs).collect());
    let right_proj =
        SemilatticeHom::new_unchecked(product.clone(), right.clone(), (0..n).map(|x| x % rs).collect());
    ProductDecomposition {
        product,
        left: left.clone(),
        right: right.clone(),
        left_proj,
        right_proj,
    }
}

impl ProductDecomposition {
    pub fn product(&self) -> &Arc<FiniteJoinSemilattice> {
        &self.product
    }

    pub fn left(&self) -> &Arc<FiniteJoinSemilattice> {
        &self.left
    }

    pub fn right(&self) -> &Arc<FiniteJoinSemilattice> {
        &self.right
    }

    pub fn left_proj(&self) -> &SemilatticeHom {
        &self.left_proj
    }

    pub fn right_proj(&self) -> &SemilatticeHom {
        &self.right_proj
    }

    #[inline]
    pub fn encode(&self, l: usize, r: usize) -> usize {
        l * self.right.size + r
    }

    #[inline]
    pub fn decode(&self, x: usize) -> (usize, usize) {
        (x / self.right.size, x % self.right.size)
    }

    /// `f × g`: the unique `h` with `left_proj ∘ h = f` and `right_proj ∘ h = g`.
    pub fn pair(
        &self,
        f: &SemilatticeHom,
        g: &SemilatticeHom,
    ) -> Result<SemilatticeHom, SemilatticeError> {
        if !same_semilattice(&f.source, &g.source) {
            return Err(SemilatticeError::SourceMismatch);
        }
        if !same_semilattice(&f.target, &self.left) || !same_semilattice(&g.target, &self.right) {
            return Err(SemilatticeError::ShapeMismatch(
                "component codomains do not match the product factors".into(),
            ));
        }
        let map = f
            .map
            .iter()
            .zip(&g.map)
            .map(|(&l, &r)| self.encode(l, r))
            .collect();
        Ok(SemilatticeHom::new_unchecked(
            f.source.clone(),
            self.product.clone(),
            map,
        ))
    }

    /// `f Π g = (f ∘ a′) × (g ∘ b′)` from the product `source` into `self`.
    pub fn parallel(
        &self,
        f: &SemilatticeHom,
        g: &SemilatticeHom,
        source: &ProductDecomposition,
    ) -> Result<SemilatticeHom, SemilatticeError> {
        if !same_semilattice(&f.source, &source.left) || !same_semilattice(&g.source, &source.right)
        {
            return Err(SemilatticeError::ShapeMismatch(
                "component domains do not match the source product factors".into(),
            ));
        }
        let fa = f.after(&source.left_proj)?;
        let gb = g.after(&source.right_proj)?;
        self.pair(&fa, &gb)
    }
}

/// `f × g` into the given product.
pub fn pair_hom(
    f: &SemilatticeHom,
    g: &SemilatticeHom,
    into: &ProductDecomposition,
) -> Result<SemilatticeHom, SemilatticeError> {
    into.pair(f, g)
}

/// `f Π g` between two products.
pub fn parallel_hom(
    f: &SemilatticeHom,
    g: &SemilatticeHom,
    source: &ProductDecomposition,
    target: &ProductDecomposition,
) -> Result<SemilatticeHom, SemilatticeError> {
    target.parallel(f, g, source)
}

/// Extra per-element constraints for [`HomSearch`].
pub trait HomConstraint {
    /// May `x ↦ value` be part of a solution?
    fn admits(&self, x: usize, value: usize) -> bool;
}

impl HomConstraint for () {
    fn admits(&self, _: usize, _: usize) -> bool {
        true
    }
}

impl<F: Fn(usize, usize) -> bool> HomConstraint for F {
    fn admits(&self, x: usize, value: usize) -> bool {
        self(x, value)
    }
}

/// Outcome of a bounded homomorphism search.
#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub solutions: Vec<Vec<usize>>,
    /// Stopped early because the solution limit was reached.
    pub truncated: bool,
    /// Stopped early because the step budget ran out.
    pub budget_exhausted: bool,
}

/// Backtracking enumeration of ⟨∨,0⟩-homomorphisms.
///
/// Elements are visited along [`FiniteJoinSemilattice::linear_extension`].
/// Join-irreducible elements are the only free choices (tried in ascending
/// target index); every other element's value is forced by a decomposition
/// into strictly smaller elements and then checked against all others.
pub struct HomSearch<'a, C: HomConstraint = ()> {
    source: &'a FiniteJoinSemilattice,
    target: &'a FiniteJoinSemilattice,
    constraint: C,
    injective: bool,
    limit: usize,
    budget: u64,
}

impl<'a> HomSearch<'a, ()> {
    pub fn new(source: &'a FiniteJoinSemilattice, target: &'a FiniteJoinSemilattice) -> Self {
        HomSearch {
            source,
            target,
            constraint: (),
            injective: false,
            limit: usize::MAX,
            budget: u64::MAX,
        }
    }
}

impl<'a, C: HomConstraint> HomSearch<'a, C> {
    pub fn constraint<D: HomConstraint>(self, constraint: D) -> HomSearch<'a, D> {
        HomSearch {
            source: self.source,
            target: self.target,
            constraint,
            injective: self.injective,
            limit: self.limit,
            budget: self.budget,
        }
    }

    pub fn injective(mut self, yes: bool) -> Self {
        self.injective = yes;
        self
    }

    pub fn limit(mut self, limit: usize) -> Self {
        self.limit = limit;
        self
    }

    pub fn budget(mut self, steps: u64) -> Self {
        self.budget = steps;
        self
    }

    pub fn run(&self) -> SearchOutcome {
        let s = self.source;
        let n = s.size;
        let order = s.linear_extension();
        // decompositions[x]: pairs (y, z) of strictly smaller elements with y ∨ z = x
        let mut decompositions: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        let mut strictly_below: Vec<Vec<usize>> = vec![Vec::new(); n];
        for y in 0..n {
            for z in 0..n {
                let x = s.join(y, z);
                if y < z && x != y && x != z {
                    decompositions[x].push((y, z));
                }
                if y != z && s.leq(y, z) {
                    strictly_below[z].push(y);
                }
            }
        }
        let mut state = SearchState {
            values: vec![usize::MAX; n],
            used: vec![false; self.target.size],
            outcome: SearchOutcome {
                solutions: Vec::new(),
                truncated: false,
                budget_exhausted: false,
            },
            steps: 0,
        };
        if self.limit > 0 {
            self.descend(0, &order, &decompositions, &strictly_below, &mut state);
        }
        state.outcome
    }

    fn descend(
        &self,
        depth: usize,
        order: &[usize],
        decompositions: &[Vec<(usize, usize)>],
        strictly_below: &[Vec<usize>],
        state: &mut SearchState,
    ) -> bool {
        if depth == order.len() {
            state.outcome.solutions.push(state.values.clone());
            if state.outcome.solutions.len() >= self.limit {
                state.outcome.truncated = true;
                return false;
            }
            return true;
        }
        let x = order[depth];
        let t = self.target;
        let candidates: Vec<usize> = if x == self.source.zero {
            vec![t.zero]
        } else if let Some(&(y, z)) = decompositions[x].first() {
            vec![t.join(state.values[y], state.values[z])]
        } else {
            let floor = t.join_all(strictly_below[x].iter().map(|&y| state.values[y]));
            (0..t.size).filter(|&v| t.leq(floor, v)).collect()
        };
        for v in candidates {
            state.steps += 1;
            if state.steps > self.budget {
                state.outcome.budget_exhausted = true;
                return false;
            }
            if self.injective && state.used[v] {
                continue;
            }
            if !self.constraint.admits(x, v) {
                continue;
            }
            let consistent = decompositions[x]
                .iter()
                .all(|&(y, z)| t.join(state.values[y], state.values[z]) == v)
                && strictly_below[x].iter().all(|&y| t.leq(state.values[y], v));
            if !consistent {
                continue;
            }
            state.values[x] = v;
            state.used[v] = true;
            let go_on = self.descend(depth + 1, order, decompositions, strictly_below, state);
            state.used[v] = false;
            state.values[x] = usize::MAX;
            if !go_on {
                return false;
            }
        }
        true
    }
}

struct SearchState {
    values: Vec<usize>,
    used: Vec<bool>,
    outcome: SearchOutcome,
    steps: u64,
}

/// Every ⟨∨,0⟩-homomorphism from `source` to `target`, in search order.
pub fn enumerate_homs(
    source: &Arc<FiniteJoinSemilattice>,
    target: &Arc<FiniteJoinSemilattice>,
) -> Vec<SemilatticeHom> {
    HomSearch::new(source, target)
        .run()
        .solutions
        .into_iter()
        .map(|m| SemilatticeHom::new_unchecked(source.clone(), target.clone(), m))
        .collect()
}

/// Some isomorphism `a → b`, if any.
pub fn find_isomorphism(
    a: &Arc<FiniteJoinSemilattice>,
    b: &Arc<FiniteJoinSemilattice>,
) -> Option<SemilatticeHom> {
    if a.size != b.size {
        return None;
    }
    HomSearch::new(a, b)
        .injective(true)
        .limit(1)
        .run()
        .solutions
        .pop()
        .map(|m| SemilatticeHom::new_unchecked(a.clone(), b.clone(), m))
}

/// Decides whether `phi: A → B` is a product projection, i.e. `A = B Π B′`
/// with `phi` as the first leg. Returns the complementary leg onto
/// `B′ = phi⁻¹(0)` when it is.
///
/// In a product the fibre over `b` has least element `(b, 0)`, and
/// `(b, k) = (b, 0) ∨ (0, k)`; conversely those two facts make
/// `(b, k) ↦ min(fibre b) ∨ k` an isomorphism `B × phi⁻¹(0) → A`.
pub fn projection_complement(phi: &SemilatticeHom) -> Option<SemilatticeHom> {
    if !phi.is_surjective() {
        return None;
    }
    let a = phi.source();
    let b = phi.target();
    let mut least = vec![usize::MAX; b.size];
    for x in 0..a.size {
        let fibre = phi.apply(x);
        let cur = least[fibre];
        if cur == usize::MAX || a.leq(x, cur) {
            least[fibre] = x;
        }
    }
    for x in 0..a.size {
        if !a.leq(least[phi.apply(x)], x) {
            return None;
        }
    }
    // the section b ↦ least(b) must be a homomorphism
    for p in 0..b.size {
        for q in 0..b.size {
            if a.join(least[p], least[q]) != least[b.join(p, q)] {
                return None;
            }
        }
    }
    let kernel: Vec<usize> = (0..a.size).filter(|&x| phi.apply(x) == b.zero).collect();
    let mut hit = vec![usize::MAX; a.size];
    for (p, &lp) in least.iter().enumerate() {
        for (ki, &k) in kernel.iter().enumerate() {
            let x = a.join(lp, k);
            if hit[x] != usize::MAX || phi.apply(x) != p {
                return None;
            }
            hit[x] = ki;
        }
    }
    if hit.iter().any(|&h| h == usize::MAX) {
        return None;
    }
    let complement = Arc::new(a.subsemilattice(&kernel).ok()?);
    Some(SemilatticeHom::new_unchecked(a.clone(), complement, hit))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arc(s: FiniteJoinSemilattice) -> Arc<FiniteJoinSemilattice> {
        Arc::new(s)
    }

    /// M3: 0, three pairwise incomparable atoms, 1.
    fn m3() -> FiniteJoinSemilattice {
        let n = 5;
        let mut join = vec![0; n * n];
        for x in 0..n {
            for y in 0..n {
                join[x * n + y] = if x == y || y == 0 {
                    x
                } else if x == 0 {
                    y
                } else {
                    4
                };
            }
        }
        FiniteJoinSemilattice::from_flat(n, join, 0, None).unwrap()
    }

    #[test]
    fn two_element_chain_is_valid() {
        let s = FiniteJoinSemilattice::new(vec![vec![0, 1], vec![1, 1]], 0, None).unwrap();
        assert_eq!(s.size(), 2);
        assert!(s.leq(0, 1));
    }

    #[test]
    fn non_idempotent_table_rejected() {
        let err = FiniteJoinSemilattice::new(vec![vec![0, 1], vec![1, 0]], 0, None).unwrap_err();
        assert_eq!(err, SemilatticeError::NotIdempotent { a: 1, result: 0 });
    }

    #[test]
    fn non_associative_table_names_triple() {
        // idempotent, commutative, zero-neutral but x∨(y∨z) breaks
        let t = vec![
            vec![0, 1, 2, 3],
            vec![1, 1, 3, 2],
            vec![2, 3, 2, 3],
            vec![3, 2, 3, 3],
        ];
        let err = FiniteJoinSemilattice::new(t, 0, None).unwrap_err();
        assert!(matches!(err, SemilatticeError::NotAssociative { .. }), "{err}");
    }

    #[test]
    fn zero_must_be_neutral() {
        let err = FiniteJoinSemilattice::new(vec![vec![0, 1], vec![1, 1]], 1, None).unwrap_err();
        assert!(matches!(err, SemilatticeError::ZeroNotNeutral { .. }));
    }

    #[test]
    fn three_chain_order_is_reconstructed() {
        let c = FiniteJoinSemilattice::chain(3);
        for x in 0..3 {
            for y in 0..3 {
                assert_eq!(c.leq(x, y), x <= y);
            }
        }
        assert!(c.leq(0, 1));
        assert!(!c.leq(2, 1));
    }

    #[test]
    fn square_order_is_componentwise() {
        let c2 = arc(FiniteJoinSemilattice::chain(2));
        let sq = product(&c2, &c2);
        let p = sq.product();
        assert!(!p.leq(sq.encode(1, 0), sq.encode(0, 1)));
        assert!(p.leq(sq.encode(1, 0), sq.encode(1, 1)));
    }

    #[test]
    fn distributivity_examples() {
        assert!(FiniteJoinSemilattice::chain(5).is_distributive());
        assert!(FiniteJoinSemilattice::powerset(3).is_distributive());
        let s = m3();
        assert!(!s.is_distributive());
        assert_eq!(s.is_distributive(), brute_distributive(&s));
        assert_eq!(s.distributivity_witness(), Some((1, 2, 3)));
    }

    fn brute_distributive(s: &FiniteJoinSemilattice) -> bool {
        let n = s.size();
        (0..n).all(|a| {
            (0..n).all(|b| {
                (0..n).filter(|&c| s.leq(c, s.join(a, b))).all(|c| {
                    (0..n).any(|a2| {
                        s.leq(a2, a) && (0..n).any(|b2| s.leq(b2, b) && s.join(a2, b2) == c)
                    })
                })
            })
        })
    }

    #[test]
    fn booleanness() {
        let c2 = arc(FiniteJoinSemilattice::chain(2));
        assert!(product(&c2, &c2).product().is_boolean());
        assert!(!FiniteJoinSemilattice::chain(3).is_boolean());
        assert!(FiniteJoinSemilattice::chain(1).is_boolean());
    }

    #[test]
    fn join_irreducible_examples() {
        assert_eq!(FiniteJoinSemilattice::chain(3).join_irreducibles(), vec![1, 2]);
        assert_eq!(FiniteJoinSemilattice::powerset(2).join_irreducibles(), vec![1, 2]);
        assert!(FiniteJoinSemilattice::chain(1).join_irreducibles().is_empty());
    }

    #[test]
    fn products_and_projections() {
        let c2 = arc(FiniteJoinSemilattice::chain(2));
        let c3 = arc(FiniteJoinSemilattice::chain(3));
        let one = arc(FiniteJoinSemilattice::chain(1));
        let p = product(&c3, &c2);
        assert_eq!(p.product().size(), 6);
        assert!(p.left_proj().is_surjective() && p.right_proj().is_surjective());
        let q = product(&c3, &one);
        assert!(find_isomorphism(q.product(), &c3).is_some());
        assert!(q.right_proj().map().iter().all(|&v| v == 0));
        assert!(p.product().is_distributive());
    }

    #[test]
    fn pair_hom_examples() {
        let c2 = arc(FiniteJoinSemilattice::chain(2));
        let sq = product(&c2, &c2);
        let id = SemilatticeHom::identity(&c2);
        let diag = pair_hom(&id, &id, &sq).unwrap();
        assert_eq!(diag.map(), &[sq.encode(0, 0), sq.encode(1, 1)]);
        let zero = SemilatticeHom::zero_map(&c2, &c2);
        let graph = pair_hom(&id, &zero, &sq).unwrap();
        assert_eq!(graph.map(), &[sq.encode(0, 0), sq.encode(1, 0)]);
        assert_eq!(sq.left_proj().after(&graph).unwrap(), id);
        assert_eq!(sq.right_proj().after(&graph).unwrap(), zero);
        let c3 = arc(FiniteJoinSemilattice::chain(3));
        let other = SemilatticeHom::identity(&c3);
        assert_eq!(pair_hom(&id, &other, &sq).unwrap_err(), SemilatticeError::SourceMismatch);
    }

    #[test]
    fn parallel_identities_give_identity() {
        let c2 = arc(FiniteJoinSemilattice::chain(2));
        let c3 = arc(FiniteJoinSemilattice::chain(3));
        let p = product(&c3, &c2);
        let h = parallel_hom(
            &SemilatticeHom::identity(&c3),
            &SemilatticeHom::identity(&c2),
            &p,
            &p,
        )
        .unwrap();
        assert_eq!(h, SemilatticeHom::identity(p.product()));
        let bad = parallel_hom(
            &SemilatticeHom::identity(&c2),
            &SemilatticeHom::identity(&c2),
            &p,
            &p,
        );
        assert!(matches!(bad, Err(SemilatticeError::ShapeMismatch(_))));
    }

    #[test]
    fn hom_validation() {
        let c2 = arc(FiniteJoinSemilattice::chain(2));
        let c3 = arc(FiniteJoinSemilattice::chain(3));
        assert!(SemilatticeHom::new(c2.clone(), c3.clone(), vec![0, 2]).is_ok());
        assert_eq!(
            SemilatticeHom::new(c2.clone(), c3.clone(), vec![1, 2]).unwrap_err(),
            SemilatticeError::ZeroNotPreserved { image: 1 }
        );
        let sq = product(&c2, &c2);
        // non-monotone
        let bad = SemilatticeHom::new(sq.product().clone(), c3.clone(), vec![0, 1, 1, 1]);
        assert!(bad.is_ok());
        let bad = SemilatticeHom::new(sq.product().clone(), c3.clone(), vec![0, 1, 2, 1]);
        assert!(matches!(bad, Err(SemilatticeError::JoinNotPreserved { .. })));
    }

    #[test]
    fn hom_enumeration_counts() {
        // homs C3 → C3 are monotone maps fixing 0: (a, 1) with 0 ≤ a ≤ b ≤ 2 → 6
        let c3 = arc(FiniteJoinSemilattice::chain(3));
        assert_eq!(enumerate_homs(&c3, &c3).len(), 6);
        // homs 2² → C2: choose images of the two atoms freely: 4
        let c2 = arc(FiniteJoinSemilattice::chain(2));
        let sq = product(&c2, &c2);
        assert_eq!(enumerate_homs(sq.product(), &c2).len(), 4);
    }

    #[test]
    fn projection_detection() {
        let c2 = arc(FiniteJoinSemilattice::chain(2));
        let c3 = arc(FiniteJoinSemilattice::chain(3));
        let p = product(&c3, &c2);
        let comp = projection_complement(p.left_proj()).unwrap();
        assert_eq!(comp.target().size(), 2);
        // C3 → C2 collapsing the top pair is surjective but not a projection
        let squash = SemilatticeHom::new(c3.clone(), c2.clone(), vec![0, 1, 1]).unwrap();
        assert!(projection_complement(&squash).is_none());
        assert!(projection_complement(&SemilatticeHom::identity(&c3)).is_some());
    }
}
