//! Finite commutative monoids by Cayley table: algebraic quasi-ordering,
//! refinement, conicality, order-units, o-ideals, quotients `M/I` and
//! ideal-induced homomorphisms.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use crate::semilattice::{FiniteJoinSemilattice, SemilatticeHom};

/// Default size bound for monoid construction; refinement scans are quartic.
pub const DEFAULT_MONOID_LIMIT: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MonoidError {
    #[error("monoid must have at least one element")]
    Empty,
    #[error("monoid has {size} elements, limit is {limit}")]
    TooLarge { size: usize, limit: usize },
    #[error("addition table has wrong shape")]
    Shape,
    #[error("table entry ({row},{col}) out of range")]
    OutOfRange { row: usize, col: usize },
    #[error("addition is not commutative at ({a}, {b})")]
    NotCommutative { a: usize, b: usize },
    #[error("addition is not associative at ({a}, {b}, {c})")]
    NotAssociative { a: usize, b: usize, c: usize },
    #[error("zero is not neutral at {a}")]
    ZeroNotNeutral { a: usize },
    #[error("not an o-ideal: {0}")]
    NotAnOIdeal(String),
    #[error("not a monoid homomorphism: {0}")]
    NotAHomomorphism(String),
    #[error("≡_I is not a congruence at ({x}, {y}) with {z}")]
    NotACongruence { x: usize, y: usize, z: usize },
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FiniteCommutativeMonoid {
    size: usize,
    add: Vec<usize>,
    zero: usize,
}

impl fmt::Debug for FiniteCommutativeMonoid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteCommutativeMonoid")
            .field("size", &self.size)
            .field("zero", &self.zero)
            .finish_non_exhaustive()
    }
}

impl FiniteCommutativeMonoid {
    pub fn new(table: Vec<Vec<usize>>, zero: usize) -> Result<Self, MonoidError> {
        Self::with_limit(table, zero, DEFAULT_MONOID_LIMIT)
    }

    /// Like [`FiniteCommutativeMonoid::new`] with an explicit size bound.
    pub fn with_limit(table: Vec<Vec<usize>>, zero: usize, limit: usize) -> Result<Self, MonoidError> {
        let size = table.len();
        if size == 0 {
            return Err(MonoidError::Empty);
        }
        if size > limit {
            return Err(MonoidError::TooLarge { size, limit });
        }
        if table.iter().any(|r| r.len() != size) || zero >= size {
            return Err(MonoidError::Shape);
        }
        let add: Vec<usize> = table.into_iter().flatten().collect();
        if let Some(p) = add.iter().position(|&v| v >= size) {
            return Err(MonoidError::OutOfRange {
                row: p / size,
                col: p % size,
            });
        }
        let m = FiniteCommutativeMonoid { size, add, zero };
        m.check_axioms()?;
        Ok(m)
    }

    fn check_axioms(&self) -> Result<(), MonoidError> {
        let n = self.size;
        for a in 0..n {
            if self.add(self.zero, a) != a {
                return Err(MonoidError::ZeroNotNeutral { a });
            }
            for b in 0..n {
                if self.add(a, b) != self.add(b, a) {
                    return Err(MonoidError::NotCommutative { a, b });
                }
                for c in 0..n {
                    if self.add(self.add(a, b), c) != self.add(a, self.add(b, c)) {
                        return Err(MonoidError::NotAssociative { a, b, c });
                    }
                }
            }
        }
        Ok(())
    }

    /// ℤ/n under addition.
    pub fn cyclic_group(n: usize) -> Self {
        let add = (0..n * n).map(|i| (i / n + i % n) % n).collect();
        FiniteCommutativeMonoid { size: n, add, zero: 0 }
    }

    /// `{0, 1, …, k}` with sums above `k` absorbed into `k`.
    pub fn truncated_naturals(k: usize) -> Self {
        let n = k + 1;
        let add = (0..n * n).map(|i| (i / n + i % n).min(k)).collect();
        FiniteCommutativeMonoid { size: n, add, zero: 0 }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn zero(&self) -> usize {
        self.zero
    }

    #[inline]
    pub fn add(&self, a: usize, b: usize) -> usize {
        self.add[a * self.size + b]
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        self.add.chunks(self.size).map(<[usize]>::to_vec).collect()
    }

    /// `x ≤ y` iff `x + z = y` for some `z`.
    pub fn alg_leq(&self, x: usize, y: usize) -> bool {
        (0..self.size).any(|z| self.add(x, z) == y)
    }

    fn leq_table(&self) -> Vec<bool> {
        let n = self.size;
        let mut t = vec![false; n * n];
        for x in 0..n {
            for z in 0..n {
                t[x * n + self.add(x, z)] = true;
            }
        }
        t
    }

    /// `n · x` for `n ≥ 1`.
    pub fn multiple(&self, x: usize, n: usize) -> usize {
        (1..n).fold(x, |acc, _| self.add(acc, x))
    }

    /// The lexicographically least `(a₀, a₁, b₀, b₁)` with `a₀ + a₁ = b₀ + b₁`
    /// admitting no refinement matrix, or `None` when `M` is a refinement
    /// monoid. The scan over `a₀` runs in parallel; the result is the same
    /// for any thread count.
    pub fn refinement_counterexample(&self) -> Option<(usize, usize, usize, usize)> {
        let n = self.size;
        let mut by_sum: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        for a in 0..n {
            for b in 0..n {
                by_sum[self.add(a, b)].push((a, b));
            }
        }
        // summands[x * n + t]: all y with x + y = t
        let mut summands: Vec<Vec<usize>> = vec![Vec::new(); n * n];
        for x in 0..n {
            for y in 0..n {
                summands[x * n + self.add(x, y)].push(y);
            }
        }
        let refines = |a0: usize, a1: usize, b0: usize, b1: usize| -> bool {
            (0..n).any(|c00| {
                summands[c00 * n + a0].iter().any(|&c01| {
                    summands[c00 * n + b0].iter().any(|&c10| {
                        summands[c10 * n + a1]
                            .iter()
                            .any(|&c11| self.add(c01, c11) == b1)
                    })
                })
            })
        };
        (0..n).into_par_iter().find_map_first(|a0| {
            (0..n).find_map(|a1| {
                by_sum[self.add(a0, a1)]
                    .iter()
                    .find(|&&(b0, b1)| !refines(a0, a1, b0, b1))
                    .map(|&(b0, b1)| (a0, a1, b0, b1))
            })
        })
    }

    pub fn is_refinement(&self) -> bool {
        self.refinement_counterexample().is_none()
    }

    /// `x + y = 0` forces `x = y = 0`.
    pub fn is_conical(&self) -> bool {
        let n = self.size;
        (0..n).all(|x| (0..n).all(|y| self.add(x, y) != self.zero || (x == self.zero && y == self.zero)))
    }

    /// Least-index `u` such that every `x` lies below some multiple `n·u`, `1 ≤ n ≤ size`.
    pub fn order_unit(&self) -> Option<usize> {
        let leq = self.leq_table();
        let n = self.size;
        (0..n).find(|&u| {
            let multiples: Vec<usize> = (1..=n).map(|k| self.multiple(u, k)).collect();
            (0..n).all(|x| multiples.iter().any(|&m| leq[x * n + m]))
        })
    }

    /// The o-ideal generated by `seed`: closed under sums and under summands.
    pub fn o_ideal_closure(&self, seed: &[usize]) -> OIdeal {
        let n = self.size;
        let mut member = vec![false; n];
        member[self.zero] = true;
        for &s in seed {
            member[s] = true;
        }
        loop {
            let mut changed = false;
            for x in 0..n {
                for y in 0..n {
                    let s = self.add(x, y);
                    if member[x] && member[y] && !member[s] {
                        member[s] = true;
                        changed = true;
                    }
                    if member[s] && !(member[x] && member[y]) {
                        member[x] = true;
                        member[y] = true;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        OIdeal { members: member }
    }

    /// Every o-ideal, by growing closures one seed element at a time.
    /// Ordered by (cardinality, sorted member list).
    pub fn o_ideals(&self) -> Vec<OIdeal> {
        let start = self.o_ideal_closure(&[]);
        let mut seen: BTreeSet<Vec<bool>> = BTreeSet::new();
        let mut frontier = vec![start];
        let mut all = Vec::new();
        while let Some(ideal) = frontier.pop() {
            if !seen.insert(ideal.members.clone()) {
                continue;
            }
            for x in 0..self.size {
                if !ideal.members[x] {
                    let mut seed = ideal.elements();
                    seed.push(x);
                    let next = self.o_ideal_closure(&seed);
                    if !seen.contains(&next.members) {
                        frontier.push(next);
                    }
                }
            }
            all.push(ideal);
        }
        all.sort_by_key(|i| (i.len(), i.elements()));
        all
    }

    /// Class labels of `≡_I` (labels by first occurrence), after checking
    /// that it is an equivalence compatible with addition.
    pub fn ideal_congruence(&self, ideal: &OIdeal) -> Result<Vec<usize>, MonoidError> {
        ideal.validate(self)?;
        let n = self.size;
        let members = ideal.elements();
        let mut related = vec![false; n * n];
        for x in 0..n {
            for &u in &members {
                let xu = self.add(x, u);
                for y in 0..n {
                    if members.iter().any(|&v| self.add(y, v) == xu) {
                        related[x * n + y] = true;
                    }
                }
            }
        }
        for x in 0..n {
            for y in 0..n {
                if !related[x * n + y] {
                    continue;
                }
                if !related[y * n + x] {
                    return Err(MonoidError::NotACongruence { x, y, z: x });
                }
                for z in 0..n {
                    if related[y * n + z] && !related[x * n + z] {
                        return Err(MonoidError::NotACongruence { x, y, z });
                    }
                    if !related[self.add(x, z) * n + self.add(y, z)] {
                        return Err(MonoidError::NotACongruence { x, y, z });
                    }
                }
            }
        }
        Ok(labels_from_relation(n, |x, y| related[x * n + y]))
    }
}

fn labels_from_relation<F: Fn(usize, usize) -> bool>(n: usize, related: F) -> Vec<usize> {
    let mut label = vec![usize::MAX; n];
    let mut next = 0;
    for x in 0..n {
        if label[x] != usize::MAX {
            continue;
        }
        for y in x..n {
            if related(x, y) {
                label[y] = next;
            }
        }
        next += 1;
    }
    label
}

/// A semilattice viewed as a monoid under join.
pub fn semilattice_as_monoid(s: &FiniteJoinSemilattice) -> FiniteCommutativeMonoid {
    FiniteCommutativeMonoid {
        size: s.size(),
        add: s.join_table().to_vec(),
        zero: s.zero(),
    }
}

/// `0 ∈ I` and `x + y ∈ I` iff `x ∈ I` and `y ∈ I`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OIdeal {
    members: Vec<bool>,
}

impl OIdeal {
    pub fn new(monoid: &FiniteCommutativeMonoid, elements: &[usize]) -> Result<Self, MonoidError> {
        let mut members = vec![false; monoid.size];
        for &e in elements {
            if e >= monoid.size {
                return Err(MonoidError::NotAnOIdeal(format!("element {e} out of range")));
            }
            members[e] = true;
        }
        let ideal = OIdeal { members };
        ideal.validate(monoid)?;
        Ok(ideal)
    }

    fn validate(&self, monoid: &FiniteCommutativeMonoid) -> Result<(), MonoidError> {
        if self.members.len() != monoid.size {
            return Err(MonoidError::NotAnOIdeal("size mismatch".into()));
        }
        if !self.members[monoid.zero] {
            return Err(MonoidError::NotAnOIdeal("does not contain zero".into()));
        }
        for x in 0..monoid.size {
            for y in 0..monoid.size {
                let both = self.members[x] && self.members[y];
                if both != self.members[monoid.add(x, y)] {
                    return Err(MonoidError::NotAnOIdeal(format!(
                        "{x} + {y} breaks the o-ideal condition"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn contains(&self, x: usize) -> bool {
        self.members[x]
    }

    pub fn elements(&self) -> Vec<usize> {
        (0..self.members.len()).filter(|&x| self.members[x]).collect()
    }

    pub fn len(&self) -> usize {
        self.members.iter().filter(|&&m| m).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Debug)]
pub struct MonoidHom {
    source: Arc<FiniteCommutativeMonoid>,
    target: Arc<FiniteCommutativeMonoid>,
    map: Vec<usize>,
}

impl MonoidHom {
    pub fn new(
        source: Arc<FiniteCommutativeMonoid>,
        target: Arc<FiniteCommutativeMonoid>,
        map: Vec<usize>,
    ) -> Result<Self, MonoidError> {
        if map.len() != source.size || map.iter().any(|&v| v >= target.size) {
            return Err(MonoidError::NotAHomomorphism("map has wrong shape".into()));
        }
        if map[source.zero] != target.zero {
            return Err(MonoidError::NotAHomomorphism("zero not preserved".into()));
        }
        for a in 0..source.size {
            for b in 0..source.size {
                if map[source.add(a, b)] != target.add(map[a], map[b]) {
                    return Err(MonoidError::NotAHomomorphism(format!(
                        "sum of {a} and {b} not preserved"
                    )));
                }
            }
        }
        Ok(MonoidHom { source, target, map })
    }

    /// The underlying monoid map of a semilattice homomorphism.
    pub fn from_semilattice_hom(f: &SemilatticeHom) -> Self {
        MonoidHom {
            source: Arc::new(semilattice_as_monoid(f.source())),
            target: Arc::new(semilattice_as_monoid(f.target())),
            map: f.map().to_vec(),
        }
    }

    pub fn source(&self) -> &Arc<FiniteCommutativeMonoid> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FiniteCommutativeMonoid> {
        &self.target
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn is_surjective(&self) -> bool {
        let mut seen = vec![false; self.target.size];
        for &v in &self.map {
            seen[v] = true;
        }
        seen.into_iter().all(|s| s)
    }

    /// Surjective, the kernel `I = f⁻¹{0}` is an o-ideal, and
    /// `f(x) = f(y)` iff `x ≡_I y`.
    pub fn is_ideal_induced(&self) -> bool {
        if !self.is_surjective() {
            return false;
        }
        let kernel: Vec<usize> = (0..self.source.size)
            .filter(|&x| self.map[x] == self.target.zero)
            .collect();
        let Ok(ideal) = OIdeal::new(&self.source, &kernel) else {
            return false;
        };
        let Ok(labels) = self.source.ideal_congruence(&ideal) else {
            return false;
        };
        let n = self.source.size;
        (0..n).all(|x| (0..n).all(|y| (self.map[x] == self.map[y]) == (labels[x] == labels[y])))
    }

    /// A pair `(x, y)` showing `f` is not an embedding: equal images, or
    /// `f(x) ≤ f(y)` without `x ≤ y`.
    pub fn embedding_witness(&self) -> Option<(usize, usize)> {
        let n = self.source.size;
        let src = self.source.leq_table();
        let tgt = self.target.leq_table();
        let m = self.target.size;
        for x in 0..n {
            for y in 0..n {
                if x != y && self.map[x] == self.map[y] {
                    return Some((x, y));
                }
                if tgt[self.map[x] * m + self.map[y]] != src[x * n + y] {
                    return Some((x, y));
                }
            }
        }
        None
    }

    /// One-to-one and `f(x) ≤ f(y)` iff `x ≤ y`.
    pub fn is_embedding(&self) -> bool {
        self.embedding_witness().is_none()
    }
}

/// `M/I` with its canonical projection. Classes are numbered by first member.
pub fn quotient_by_ideal(
    monoid: &Arc<FiniteCommutativeMonoid>,
    ideal: &OIdeal,
) -> Result<(Arc<FiniteCommutativeMonoid>, MonoidHom), MonoidError> {
    let labels = monoid.ideal_congruence(ideal)?;
    let k = labels.iter().copied().max().map_or(0, |m| m + 1);
    let mut representative = vec![usize::MAX; k];
    for (x, &c) in labels.iter().enumerate() {
        if representative[c] == usize::MAX {
            representative[c] = x;
        }
    }
    let add = (0..k * k)
        .map(|i| labels[monoid.add(representative[i / k], representative[i % k])])
        .collect();
    let quotient = Arc::new(FiniteCommutativeMonoid {
        size: k,
        add,
        zero: labels[monoid.zero],
    });
    let projection = MonoidHom {
        source: monoid.clone(),
        target: quotient.clone(),
        map: labels,
    };
    Ok((quotient, projection))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::semilattice::product;

    fn chain_monoid(n: usize) -> Arc<FiniteCommutativeMonoid> {
        Arc::new(semilattice_as_monoid(&FiniteJoinSemilattice::chain(n)))
    }

    fn brute_refinement_failure(m: &FiniteCommutativeMonoid) -> Option<(usize, usize, usize, usize)> {
        let n = m.size();
        for a0 in 0..n {
            for a1 in 0..n {
                for b0 in 0..n {
                    for b1 in 0..n {
                        if m.add(a0, a1) != m.add(b0, b1) {
                            continue;
                        }
                        let mut found = false;
                        for c in 0..n * n * n * n {
                            let (c00, c01, c10, c11) = (c / (n * n * n), c / (n * n) % n, c / n % n, c % n);
                            if m.add(c00, c01) == a0
                                && m.add(c10, c11) == a1
                                && m.add(c00, c10) == b0
                                && m.add(c01, c11) == b1
                            {
                                found = true;
                                break;
                            }
                        }
                        if !found {
                            return Some((a0, a1, b0, b1));
                        }
                    }
                }
            }
        }
        None
    }

    #[test]
    fn algebraic_order() {
        let m = chain_monoid(2);
        assert!(m.alg_leq(0, 1));
        assert!(!m.alg_leq(1, 0));
        // {0, 1, ∞} with 1 + 1 = ∞
        let t = FiniteCommutativeMonoid::truncated_naturals(2);
        assert!(t.alg_leq(1, 2));
        for x in 0..3 {
            assert!(t.alg_leq(0, x));
        }
    }

    #[test]
    fn refinement_examples() {
        assert!(semilattice_as_monoid(&FiniteJoinSemilattice::powerset(3)).is_refinement());
        assert!(chain_monoid(2).is_refinement());
        let m3 = semilattice_as_monoid(&catalog::m3().semilattice());
        let w = m3.refinement_counterexample().unwrap();
        assert_eq!(Some(w), brute_refinement_failure(&m3));
        assert_eq!(w, (1, 2, 1, 3));
        let n5 = semilattice_as_monoid(&catalog::n5().semilattice());
        assert!(!n5.is_refinement());
    }

    #[test]
    fn conical_examples() {
        assert!(chain_monoid(4).is_conical());
        assert!(!FiniteCommutativeMonoid::cyclic_group(2).is_conical());
        assert!(FiniteCommutativeMonoid::cyclic_group(1).is_conical());
    }

    #[test]
    fn order_unit_examples() {
        assert_eq!(chain_monoid(3).order_unit(), Some(2));
        assert_eq!(FiniteCommutativeMonoid::cyclic_group(1).order_unit(), Some(0));
        // ℤ/3: 1 is an order unit (every element is a multiple of 1)
        assert_eq!(FiniteCommutativeMonoid::cyclic_group(3).order_unit(), Some(0));
        // truncated naturals {0,1,2}: 2 bounds everything but so does 1 (2·1 = 2)
        assert_eq!(FiniteCommutativeMonoid::truncated_naturals(2).order_unit(), Some(1));
    }

    #[test]
    fn order_unit_matches_definition() {
        // b ≤ a, both idempotent
        let m = FiniteCommutativeMonoid::new(vec![vec![0, 1, 2], vec![1, 1, 1], vec![2, 1, 2]], 0).unwrap();
        let brute = |m: &FiniteCommutativeMonoid| {
            (0..m.size()).find(|&u| {
                (0..m.size()).all(|x| (1..=m.size()).any(|k| m.alg_leq(x, m.multiple(u, k))))
            })
        };
        assert_eq!(m.order_unit(), Some(1));
        assert_eq!(brute(&m), m.order_unit());
    }

    #[test]
    fn sum_of_everything_is_an_order_unit() {
        for m in [
            FiniteCommutativeMonoid::cyclic_group(5),
            FiniteCommutativeMonoid::truncated_naturals(4),
            semilattice_as_monoid(&catalog::n5().semilattice()),
        ] {
            let total = (0..m.size()).fold(m.zero(), |acc, x| m.add(acc, x));
            assert!((0..m.size()).all(|x| m.alg_leq(x, total)));
            assert!(m.order_unit().is_some());
        }
    }

    #[test]
    fn quotients() {
        let conical = Arc::new(FiniteCommutativeMonoid::truncated_naturals(3));
        let zero = conical.o_ideal_closure(&[]);
        let (q, p) = quotient_by_ideal(&conical, &zero).unwrap();
        assert_eq!(q.size(), conical.size());
        assert!(p.is_ideal_induced());

        let full = OIdeal::new(&conical, &[0, 1, 2, 3]).unwrap();
        let (q, _) = quotient_by_ideal(&conical, &full).unwrap();
        assert_eq!(q.size(), 1);

        let c2 = Arc::new(FiniteJoinSemilattice::chain(2));
        let sq = product(&c2, &c2);
        let m = Arc::new(semilattice_as_monoid(sq.product()));
        // the axis {(0,0), (0,1)}
        let axis = OIdeal::new(&m, &[0, 1]).unwrap();
        let (q, p) = quotient_by_ideal(&m, &axis).unwrap();
        assert_eq!(q.size(), 2);
        assert!(p.is_ideal_induced());
        assert!(OIdeal::new(&m, &[1]).is_err());
    }

    #[test]
    fn ideal_induced_examples() {
        let c2 = Arc::new(FiniteJoinSemilattice::chain(2));
        let c3 = Arc::new(FiniteJoinSemilattice::chain(3));
        let p = product(&c3, &c2);
        assert!(MonoidHom::from_semilattice_hom(p.left_proj()).is_ideal_induced());
        let inc = SemilatticeHom::new(c2.clone(), c3.clone(), vec![0, 2]).unwrap();
        assert!(!MonoidHom::from_semilattice_hom(&inc).is_ideal_induced());
        // C3 → C2 collapsing {1, 2}: kernel {0} and 1 ≢ 2 mod {0}
        let squash = SemilatticeHom::new(c3.clone(), c2.clone(), vec![0, 1, 1]).unwrap();
        assert!(!MonoidHom::from_semilattice_hom(&squash).is_ideal_induced());
    }

    #[test]
    fn embeddings() {
        let m = chain_monoid(3);
        let id = MonoidHom::new(m.clone(), m.clone(), vec![0, 1, 2]).unwrap();
        assert!(id.is_embedding());
        let zero = MonoidHom::new(m.clone(), m.clone(), vec![0, 0, 0]).unwrap();
        assert_eq!(zero.embedding_witness(), Some((0, 1)));
        let z2 = Arc::new(FiniteCommutativeMonoid::cyclic_group(2));
        let z4 = Arc::new(FiniteCommutativeMonoid::cyclic_group(4));
        assert!(MonoidHom::new(z2, z4, vec![0, 2]).unwrap().is_embedding());
    }

    #[test]
    fn injective_hom_collapsing_order() {
        // S = {0, a, b, ∞} with every nonzero sum ∞; T adds z with a + z = b.
        let s = Arc::new(
            FiniteCommutativeMonoid::new(
                vec![vec![0, 1, 2, 3], vec![1, 3, 3, 3], vec![2, 3, 3, 3], vec![3, 3, 3, 3]],
                0,
            )
            .unwrap(),
        );
        let t = Arc::new(
            FiniteCommutativeMonoid::new(
                vec![
                    vec![0, 1, 2, 3, 4],
                    vec![1, 3, 3, 3, 2],
                    vec![2, 3, 3, 3, 3],
                    vec![3, 3, 3, 3, 3],
                    vec![4, 2, 3, 3, 3],
                ],
                0,
            )
            .unwrap(),
        );
        assert!(!s.alg_leq(1, 2));
        assert!(t.alg_leq(1, 2));
        let inclusion = MonoidHom::new(s, t, vec![0, 1, 2, 3]).unwrap();
        assert_eq!(inclusion.embedding_witness(), Some((1, 2)));
    }

    #[test]
    fn size_limit_enforced() {
        let table: Vec<Vec<usize>> = FiniteJoinSemilattice::chain(70).rows();
        assert_eq!(
            FiniteCommutativeMonoid::new(table.clone(), 0).unwrap_err(),
            MonoidError::TooLarge { size: 70, limit: 64 }
        );
        assert!(FiniteCommutativeMonoid::with_limit(table, 0, 80).is_ok());
    }
}
