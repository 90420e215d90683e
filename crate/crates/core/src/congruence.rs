//! Congruences of finite lattices, the compact-congruence semilattice
//! `Conc L`, the induced maps `Conc f`, quotients, and projectability
//! witnesses for ideal-induced maps out of `Conc L`.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::lattice::{enumerate_lattice_homs, FiniteLattice, LatticeError, LatticeHom};
use crate::monoid::MonoidHom;
use crate::semilattice::{same_semilattice, FiniteJoinSemilattice, SemilatticeError, SemilatticeHom};

/// Largest lattice for which all partitions are filtered when enumerating
/// congruences; larger lattices use principal-join generation.
pub const PARTITION_FILTER_LIMIT: usize = 7;

/// Upper bound on the number of congruences `con_lattice` will tabulate.
pub const MAX_CONGRUENCES: usize = 1 << 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CongruenceError {
    #[error("element {0} out of range")]
    OutOfRange(usize),
    #[error("partition has {got} entries, lattice has {expected} elements")]
    SizeMismatch { got: usize, expected: usize },
    #[error("not a congruence: {x} ≡ {y} but translation by {z} breaks it")]
    NotACongruence { x: usize, y: usize, z: usize },
    #[error("lattice has {count} congruences, limit is {limit}")]
    TooLarge { count: usize, limit: usize },
    #[error("map is not ideal-induced")]
    NotIdealInduced,
    #[error("witness check failed: {0}")]
    WitnessClaimFailed(String),
    #[error("universal property failed: {0}")]
    UniversalPropertyFailed(String),
    #[error("source of φ is not the congruence semilattice of the lattice")]
    WrongSource,
    #[error(transparent)]
    Semilattice(#[from] SemilatticeError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// A partition of a lattice's elements, stored as block labels numbered by
/// first occurrence. Two congruences on the same lattice are equal iff
/// their label vectors are.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Congruence {
    labels: Vec<usize>,
}

impl fmt::Debug for Congruence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Congruence{:?}", self.blocks())
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut c = x;
        while self.parent[c] != r {
            let next = self.parent[c];
            self.parent[c] = r;
            c = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }
}

fn canonical_labels(classes: impl IntoIterator<Item = usize>) -> Vec<usize> {
    let mut remap = HashMap::new();
    classes
        .into_iter()
        .map(|c| {
            let next = remap.len();
            *remap.entry(c).or_insert(next)
        })
        .collect()
}

impl Congruence {
    pub fn diagonal(n: usize) -> Self {
        Congruence { labels: (0..n).collect() }
    }

    pub fn full(n: usize) -> Self {
        Congruence { labels: vec![0; n] }
    }

    /// Validates that `blocks` partitions the lattice and is compatible
    /// with join and meet.
    pub fn from_blocks(lattice: &FiniteLattice, blocks: &[Vec<usize>]) -> Result<Self, CongruenceError> {
        let n = lattice.size();
        let mut class = vec![usize::MAX; n];
        for (b, block) in blocks.iter().enumerate() {
            for &x in block {
                if x >= n {
                    return Err(CongruenceError::OutOfRange(x));
                }
                if class[x] != usize::MAX {
                    return Err(CongruenceError::SizeMismatch {
                        got: blocks.iter().map(Vec::len).sum(),
                        expected: n,
                    });
                }
                class[x] = b;
            }
        }
        if class.contains(&usize::MAX) {
            return Err(CongruenceError::SizeMismatch {
                got: blocks.iter().map(Vec::len).sum(),
                expected: n,
            });
        }
        let theta = Congruence {
            labels: canonical_labels(class),
        };
        theta.check_compatible(lattice)?;
        Ok(theta)
    }

    fn check_compatible(&self, lattice: &FiniteLattice) -> Result<(), CongruenceError> {
        let n = lattice.size();
        if self.labels.len() != n {
            return Err(CongruenceError::SizeMismatch {
                got: self.labels.len(),
                expected: n,
            });
        }
        for x in 0..n {
            for y in (x + 1)..n {
                if self.labels[x] != self.labels[y] {
                    continue;
                }
                for z in 0..n {
                    if !self.related(lattice.join(x, z), lattice.join(y, z))
                        || !self.related(lattice.meet(x, z), lattice.meet(y, z))
                    {
                        return Err(CongruenceError::NotACongruence { x, y, z });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn is_congruence_of(&self, lattice: &FiniteLattice) -> bool {
        self.check_compatible(lattice).is_ok()
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn class_of(&self, x: usize) -> usize {
        self.labels[x]
    }

    pub fn related(&self, x: usize, y: usize) -> bool {
        self.labels[x] == self.labels[y]
    }

    pub fn num_blocks(&self) -> usize {
        self.labels.iter().copied().max().map_or(0, |m| m + 1)
    }

    /// Blocks in order of their least element, each sorted.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut blocks = vec![Vec::new(); self.num_blocks()];
        for (x, &c) in self.labels.iter().enumerate() {
            blocks[c].push(x);
        }
        blocks
    }

    pub fn is_diagonal(&self) -> bool {
        self.num_blocks() == self.labels.len()
    }

    /// Containment as relations.
    pub fn is_finer_than(&self, other: &Congruence) -> bool {
        let n = self.labels.len();
        (0..n).all(|x| (x + 1..n).all(|y| !self.related(x, y) || other.related(x, y)))
    }

    fn union_find(&self) -> UnionFind {
        let mut uf = UnionFind::new(self.labels.len());
        let mut first = vec![usize::MAX; self.num_blocks()];
        for (x, &c) in self.labels.iter().enumerate() {
            if first[c] == usize::MAX {
                first[c] = x;
            } else {
                uf.union(first[c], x);
            }
        }
        uf
    }
}

/// Ordering key: more blocks first, then block signature. Puts Δ first.
fn congruence_order(theta: &Congruence) -> (std::cmp::Reverse<usize>, Vec<Vec<usize>>) {
    (std::cmp::Reverse(theta.num_blocks()), theta.blocks())
}

/// Saturates a union-find state into the least congruence containing it.
fn saturate(lattice: &FiniteLattice, mut uf: UnionFind) -> Congruence {
    let n = lattice.size();
    loop {
        let mut changed = false;
        for x in 0..n {
            let r = uf.find(x);
            if r == x {
                continue;
            }
            for z in 0..n {
                changed |= uf.union(lattice.join(x, z), lattice.join(r, z));
                changed |= uf.union(lattice.meet(x, z), lattice.meet(r, z));
            }
        }
        if !changed {
            break;
        }
    }
    Congruence {
        labels: canonical_labels((0..n).map(|x| uf.find(x))),
    }
}

/// The least congruence identifying every listed pair.
pub fn generated_by(lattice: &FiniteLattice, pairs: &[(usize, usize)]) -> Result<Congruence, CongruenceError> {
    let n = lattice.size();
    let mut uf = UnionFind::new(n);
    for &(x, y) in pairs {
        for v in [x, y] {
            if v >= n {
                return Err(CongruenceError::OutOfRange(v));
            }
        }
        uf.union(x, y);
    }
    Ok(saturate(lattice, uf))
}

/// `Θ(x, y)`, the congruence generated by one pair.
pub fn principal_congruence(lattice: &FiniteLattice, x: usize, y: usize) -> Result<Congruence, CongruenceError> {
    generated_by(lattice, &[(x, y)])
}

/// The join of two congruences.
pub fn join_congruences(lattice: &FiniteLattice, a: &Congruence, b: &Congruence) -> Congruence {
    let mut uf = a.union_find();
    for block in b.blocks() {
        for w in block.windows(2) {
            uf.union(w[0], w[1]);
        }
    }
    saturate(lattice, uf)
}

/// All congruences by filtering every set partition.
pub fn congruences_by_partitions(lattice: &FiniteLattice) -> Vec<Congruence> {
    let n = lattice.size();
    let mut out = Vec::new();
    let mut growth = vec![0usize; n];
    // restricted growth strings: growth[0] = 0, growth[i] ≤ 1 + max(prefix)
    fn rec(i: usize, max: usize, growth: &mut Vec<usize>, lattice: &FiniteLattice, out: &mut Vec<Congruence>) {
        if i == growth.len() {
            let theta = Congruence { labels: growth.clone() };
            if theta.is_congruence_of(lattice) {
                out.push(theta);
            }
            return;
        }
        for c in 0..=max + 1 {
            growth[i] = c;
            rec(i + 1, max.max(c), growth, lattice, out);
        }
    }
    if n > 0 {
        rec(1, 0, &mut growth, lattice, &mut out);
    }
    out.sort_by_key(congruence_order);
    out
}

/// All congruences as joins of principal ones.
pub fn congruences_by_generation(lattice: &FiniteLattice, limit: usize) -> Result<Vec<Congruence>, CongruenceError> {
    let n = lattice.size();
    let mut principal = BTreeSet::new();
    for x in 0..n {
        for y in (x + 1)..n {
            principal.insert(principal_congruence(lattice, x, y)?);
        }
    }
    let principal: Vec<Congruence> = principal.into_iter().collect();
    let mut seen: BTreeSet<Congruence> = BTreeSet::new();
    let start = Congruence::diagonal(n);
    seen.insert(start.clone());
    let mut queue = VecDeque::from([start]);
    while let Some(theta) = queue.pop_front() {
        for p in &principal {
            let next = join_congruences(lattice, &theta, p);
            if seen.insert(next.clone()) {
                if seen.len() > limit {
                    return Err(CongruenceError::TooLarge { count: seen.len(), limit });
                }
                queue.push_back(next);
            }
        }
    }
    let mut out: Vec<Congruence> = seen.into_iter().collect();
    out.sort_by_key(congruence_order);
    Ok(out)
}

/// `Conc L`: every congruence of a finite lattice, as a ⟨∨,0⟩-semilattice
/// whose element `i` is `congruences()[i]`. Element 0 is Δ.
#[derive(Clone)]
pub struct ConcSemilattice {
    lattice: Arc<FiniteLattice>,
    congruences: Vec<Congruence>,
    index: HashMap<Congruence, usize>,
    semilattice: Arc<FiniteJoinSemilattice>,
}

impl fmt::Debug for ConcSemilattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConcSemilattice")
            .field("lattice_size", &self.lattice.size())
            .field("congruences", &self.congruences.len())
            .finish()
    }
}

impl ConcSemilattice {
    pub fn lattice(&self) -> &Arc<FiniteLattice> {
        &self.lattice
    }

    pub fn semilattice(&self) -> &Arc<FiniteJoinSemilattice> {
        &self.semilattice
    }

    pub fn congruences(&self) -> &[Congruence] {
        &self.congruences
    }

    pub fn congruence(&self, i: usize) -> &Congruence {
        &self.congruences[i]
    }

    pub fn index_of(&self, theta: &Congruence) -> Option<usize> {
        self.index.get(theta).copied()
    }

    pub fn size(&self) -> usize {
        self.congruences.len()
    }

    /// Index of `Θ(x, y)`.
    pub fn principal_index(&self, x: usize, y: usize) -> usize {
        let theta = principal_congruence(&self.lattice, x, y).expect("in range");
        self.index[&theta]
    }
}

/// Enumerates `Con L` and tabulates its join.
pub fn con_lattice(lattice: &Arc<FiniteLattice>) -> Result<ConcSemilattice, CongruenceError> {
    let congruences = if lattice.size() <= PARTITION_FILTER_LIMIT {
        congruences_by_partitions(lattice)
    } else {
        congruences_by_generation(lattice, MAX_CONGRUENCES)?
    };
    if congruences.len() > MAX_CONGRUENCES {
        return Err(CongruenceError::TooLarge {
            count: congruences.len(),
            limit: MAX_CONGRUENCES,
        });
    }
    let index: HashMap<Congruence, usize> = congruences
        .iter()
        .enumerate()
        .map(|(i, c)| (c.clone(), i))
        .collect();
    let k = congruences.len();
    let mut join = vec![0; k * k];
    for a in 0..k {
        for b in a..k {
            let j = index[&join_congruences(lattice, &congruences[a], &congruences[b])];
            join[a * k + b] = j;
            join[b * k + a] = j;
        }
    }
    let semilattice = Arc::new(FiniteJoinSemilattice::from_flat_unchecked(k, join, 0, None));
    Ok(ConcSemilattice {
        lattice: lattice.clone(),
        congruences,
        index,
        semilattice,
    })
}

/// The image congruence of `θ` under `f`: generated by `⟨f(x), f(y)⟩`.
pub fn image_congruence(f: &LatticeHom, theta: &Congruence) -> Congruence {
    let mut uf = UnionFind::new(f.target().size());
    for block in theta.blocks() {
        for w in block.windows(2) {
            uf.union(f.apply(w[0]), f.apply(w[1]));
        }
    }
    saturate(f.target(), uf)
}

/// `Conc f` between precomputed congruence semilattices.
pub fn conc_hom(
    f: &LatticeHom,
    source: &ConcSemilattice,
    target: &ConcSemilattice,
) -> Result<SemilatticeHom, CongruenceError> {
    let map = source
        .congruences
        .iter()
        .map(|theta| target.index[&image_congruence(f, theta)])
        .collect();
    Ok(SemilatticeHom::new(
        source.semilattice.clone(),
        target.semilattice.clone(),
        map,
    )?)
}

/// `L/θ` and the canonical projection; block `i` is the class labelled `i`.
pub fn quotient_lattice(
    lattice: &Arc<FiniteLattice>,
    theta: &Congruence,
) -> Result<(Arc<FiniteLattice>, LatticeHom), CongruenceError> {
    theta.check_compatible(lattice)?;
    let blocks = theta.blocks();
    let k = blocks.len();
    let rep: Vec<usize> = blocks.iter().map(|b| b[0]).collect();
    let join = (0..k * k)
        .map(|i| theta.class_of(lattice.join(rep[i / k], rep[i % k])))
        .collect();
    let meet = (0..k * k)
        .map(|i| theta.class_of(lattice.meet(rep[i / k], rep[i % k])))
        .collect();
    let quotient = Arc::new(FiniteLattice::from_flat_unchecked(k, join, meet));
    let p = LatticeHom::new(lattice.clone(), quotient.clone(), theta.labels.clone())?;
    Ok((quotient, p))
}

/// The data `⟨p, ε⟩` with `p: L ↠ L/𝒂` and `ε: Conc(L/𝒂) ≅ S`.
#[derive(Clone, Debug)]
pub struct ConcWitness {
    pub kernel: Congruence,
    pub quotient: Arc<FiniteLattice>,
    pub projection: LatticeHom,
    pub source_conc: ConcSemilattice,
    pub quotient_conc: ConcSemilattice,
    pub conc_projection: SemilatticeHom,
    pub eps: SemilatticeHom,
}

/// Builds and checks a projectability witness for an ideal-induced
/// `φ: Conc L ↠ S`.
pub fn conc_projectability_witness(
    conc: &ConcSemilattice,
    phi: &SemilatticeHom,
) -> Result<ConcWitness, CongruenceError> {
    if !same_semilattice(phi.source(), conc.semilattice()) {
        return Err(CongruenceError::WrongSource);
    }
    if !MonoidHom::from_semilattice_hom(phi).is_ideal_induced() {
        return Err(CongruenceError::NotIdealInduced);
    }
    let lattice = conc.lattice();
    let n = lattice.size();
    let zero = phi.target().zero();

    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut placed = vec![false; n];
    for x in 0..n {
        if placed[x] {
            continue;
        }
        let block: Vec<usize> = (x..n)
            .filter(|&y| phi.apply(conc.principal_index(x, y)) == zero)
            .collect();
        for &y in &block {
            if placed[y] {
                return Err(CongruenceError::WitnessClaimFailed(format!(
                    "relation 𝒂 is not transitive at {y}"
                )));
            }
            placed[y] = true;
        }
        blocks.push(block);
    }
    let kernel = Congruence::from_blocks(lattice, &blocks)
        .map_err(|e| CongruenceError::WitnessClaimFailed(format!("𝒂 is not a congruence: {e}")))?;
    for x in 0..n {
        for y in 0..n {
            let zero_image = phi.apply(conc.principal_index(x, y)) == zero;
            if zero_image != kernel.related(x, y) {
                return Err(CongruenceError::WitnessClaimFailed(format!(
                    "𝒂 disagrees with φΘ({x},{y})"
                )));
            }
        }
    }

    for (i, u) in conc.congruences().iter().enumerate() {
        if (phi.apply(i) == zero) != u.is_finer_than(&kernel) {
            return Err(CongruenceError::WitnessClaimFailed(format!(
                "φ(𝒖) = 0 and 𝒖 ⊆ 𝒂 disagree for {u:?}"
            )));
        }
    }

    let (quotient, projection) = quotient_lattice(lattice, &kernel)?;
    let quotient_conc = con_lattice(&quotient)?;
    let conc_projection = conc_hom(&projection, conc, &quotient_conc)?;

    let k = conc.size();
    let kernel_index = conc.index_of(&kernel).expect("kernel is a congruence");
    for x in 0..k {
        for y in 0..k {
            let same_image = conc_projection.apply(x) == conc_projection.apply(y);
            let joins = conc.semilattice().join(x, kernel_index) == conc.semilattice().join(y, kernel_index);
            if same_image != joins {
                return Err(CongruenceError::WitnessClaimFailed(format!(
                    "Conc p identifies {x}, {y} inconsistently with joins by 𝒂"
                )));
            }
        }
    }

    let mut eps = vec![usize::MAX; quotient_conc.size()];
    for u in 0..k {
        let v = conc_projection.apply(u);
        if eps[v] == usize::MAX {
            eps[v] = phi.apply(u);
        } else if eps[v] != phi.apply(u) {
            return Err(CongruenceError::WitnessClaimFailed(format!(
                "φ is not constant on the fibre of Conc p over {v}"
            )));
        }
    }
    if eps.contains(&usize::MAX) {
        return Err(CongruenceError::WitnessClaimFailed("Conc p is not surjective".into()));
    }
    let eps = SemilatticeHom::new(quotient_conc.semilattice().clone(), phi.target().clone(), eps)?;
    if !eps.is_isomorphism() {
        return Err(CongruenceError::WitnessClaimFailed("ε is not an isomorphism".into()));
    }
    if eps.after(&conc_projection)?.map() != phi.map() {
        return Err(CongruenceError::WitnessClaimFailed("φ ≠ ε ∘ Conc p".into()));
    }
    Ok(ConcWitness {
        kernel,
        quotient,
        projection,
        source_conc: conc.clone(),
        quotient_conc,
        conc_projection,
        eps,
    })
}

/// Counts from a universal-property check against one target lattice.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct UniversalCheck {
    pub homs: usize,
    pub factorizations: usize,
}

/// For every lattice hom `f: L → X` and every `η: Conc(L/𝒂) → Conc X` with
/// `Conc f = η ∘ Conc p`, checks that a unique `g: L/𝒂 → X` exists with
/// `f = g ∘ p` and `Conc g = η`.
///
/// `Conc p` is surjective, so `η` is determined by `Conc f` when it exists:
/// the candidate is read off the fibres of `Conc p` and then confirmed to be
/// a homomorphism.
pub fn check_universal_property(
    witness: &ConcWitness,
    target: &Arc<FiniteLattice>,
) -> Result<UniversalCheck, CongruenceError> {
    let target_conc = con_lattice(target)?;
    let source = witness.projection.source();
    let quotient = &witness.quotient;
    let cp = &witness.conc_projection;
    let mut report = UniversalCheck::default();
    for f in enumerate_lattice_homs(source, target, usize::MAX) {
        report.homs += 1;
        let conc_f = conc_hom(&f, &witness.source_conc, &target_conc)?;
        let mut eta = vec![usize::MAX; witness.quotient_conc.size()];
        let mut consistent = true;
        for u in 0..witness.source_conc.size() {
            let v = cp.apply(u);
            if eta[v] == usize::MAX {
                eta[v] = conc_f.apply(u);
            } else if eta[v] != conc_f.apply(u) {
                consistent = false;
                break;
            }
        }
        if !consistent {
            continue;
        }
        let Ok(eta) = SemilatticeHom::new(
            witness.quotient_conc.semilattice().clone(),
            target_conc.semilattice().clone(),
            eta,
        ) else {
            continue;
        };
        report.factorizations += 1;
        let p = &witness.projection;
        let mut g = vec![usize::MAX; quotient.size()];
        for x in 0..source.size() {
            let q = p.apply(x);
            if g[q] == usize::MAX {
                g[q] = f.apply(x);
            } else if g[q] != f.apply(x) {
                return Err(CongruenceError::UniversalPropertyFailed(format!(
                    "f = {:?} is not constant on the fibre of p over {q}",
                    f.map()
                )));
            }
        }
        let g = LatticeHom::new(quotient.clone(), target.clone(), g).map_err(|e| {
            CongruenceError::UniversalPropertyFailed(format!("induced g is not a homomorphism: {e}"))
        })?;
        let conc_g = conc_hom(&g, &witness.quotient_conc, &target_conc)?;
        if conc_g.map() != eta.map() {
            return Err(CongruenceError::UniversalPropertyFailed(format!(
                "Conc g ≠ η for f = {:?}",
                f.map()
            )));
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::lattice::lattice_product;

    fn arc(l: FiniteLattice) -> Arc<FiniteLattice> {
        Arc::new(l)
    }

    /// Least congruence by brute force over all partitions.
    fn brute_principal(l: &FiniteLattice, x: usize, y: usize) -> Congruence {
        congruences_by_partitions(l)
            .into_iter()
            .filter(|c| c.related(x, y))
            .min_by_key(|c| std::cmp::Reverse(c.num_blocks()))
            .unwrap()
    }

    #[test]
    fn principal_examples() {
        let c3 = FiniteLattice::chain(3);
        assert!(principal_congruence(&c3, 1, 1).unwrap().is_diagonal());
        assert_eq!(principal_congruence(&c3, 1, 2).unwrap().blocks(), vec![vec![0], vec![1, 2]]);
        let m3 = catalog::m3();
        let theta = principal_congruence(&m3, 1, 0).unwrap();
        assert_eq!(theta.num_blocks(), 1);
        assert_eq!(theta, brute_principal(&m3, 1, 0));
        let n5 = catalog::n5();
        for x in 0..5 {
            for y in 0..5 {
                assert_eq!(principal_congruence(&n5, x, y).unwrap(), brute_principal(&n5, x, y));
            }
        }
    }

    #[test]
    fn conc_examples() {
        let conc = con_lattice(&arc(FiniteLattice::chain(2))).unwrap();
        assert_eq!(conc.size(), 2);
        assert!(conc.congruence(0).is_diagonal());
        for n in 1..=4 {
            let conc = con_lattice(&arc(FiniteLattice::chain(n + 1))).unwrap();
            assert_eq!(conc.size(), 1 << n);
            assert!(conc.semilattice().is_boolean());
        }
        let conc = con_lattice(&arc(catalog::m3())).unwrap();
        assert_eq!(conc.size(), 2);
        let conc = con_lattice(&arc(catalog::n5())).unwrap();
        assert_eq!(conc.size(), congruences_by_partitions(&catalog::n5()).len());
        assert!(conc.semilattice().is_distributive());
    }

    #[test]
    fn generation_matches_partition_filter() {
        for n in 1..=6 {
            for l in catalog::all_lattices(n) {
                assert_eq!(
                    congruences_by_partitions(&l),
                    congruences_by_generation(&l, MAX_CONGRUENCES).unwrap()
                );
            }
        }
    }

    #[test]
    fn conc_hom_examples() {
        let c2 = arc(FiniteLattice::chain(2));
        let c3 = arc(FiniteLattice::chain(3));
        let (k2, k3) = (con_lattice(&c2).unwrap(), con_lattice(&c3).unwrap());
        let id = LatticeHom::identity(&c3);
        assert_eq!(conc_hom(&id, &k3, &k3).unwrap().map(), &[0, 1, 2, 3]);
        let constant = LatticeHom::new(c3.clone(), c2.clone(), vec![0, 0, 0]).unwrap();
        assert_eq!(conc_hom(&constant, &k3, &k2).unwrap().map(), &[0, 0, 0, 0]);
        // bounds to bounds: ∇ ↦ Θ(0, top) = ∇
        let ends = LatticeHom::new(c2.clone(), c3.clone(), vec![0, 2]).unwrap();
        let f = conc_hom(&ends, &k2, &k3).unwrap();
        assert!(k3.congruence(f.apply(1)).num_blocks() == 1);
        // onto the lower covering pair: ∇ ↦ Θ(0, a)
        let low = LatticeHom::new(c2.clone(), c3.clone(), vec![0, 1]).unwrap();
        let f = conc_hom(&low, &k2, &k3).unwrap();
        assert_eq!(k3.congruence(f.apply(1)).blocks(), vec![vec![0, 1], vec![2]]);
    }

    #[test]
    fn quotient_examples() {
        let c3 = arc(FiniteLattice::chain(3));
        let (q, p) = quotient_lattice(&c3, &Congruence::diagonal(3)).unwrap();
        assert_eq!(q.size(), 3);
        assert_eq!(p.map(), &[0, 1, 2]);
        let (q, _) = quotient_lattice(&c3, &Congruence::full(3)).unwrap();
        assert_eq!(q.size(), 1);
        let theta = principal_congruence(&c3, 1, 2).unwrap();
        let (q, p) = quotient_lattice(&c3, &theta).unwrap();
        assert_eq!(q.size(), 2);
        assert!(q.leq(0, 1));
        assert_eq!(p.map(), &[0, 1, 1]);
    }

    #[test]
    fn witness_for_identity() {
        let l = arc(catalog::n5());
        let conc = con_lattice(&l).unwrap();
        let phi = SemilatticeHom::identity(conc.semilattice());
        let w = conc_projectability_witness(&conc, &phi).unwrap();
        assert!(w.kernel.is_diagonal());
        assert_eq!(w.quotient.size(), 5);
        assert!(w.eps.is_isomorphism());
    }

    #[test]
    fn witness_for_coordinate_projection() {
        let c3 = arc(FiniteLattice::chain(3));
        let conc = con_lattice(&c3).unwrap();
        // Θ(0,a) as the first coordinate: collapse everything above it
        let low = conc.index_of(&principal_congruence(&c3, 0, 1).unwrap()).unwrap();
        let high = conc.index_of(&principal_congruence(&c3, 1, 2).unwrap()).unwrap();
        let target = Arc::new(FiniteJoinSemilattice::chain(2));
        let mut map = vec![0; 4];
        map[low] = 1;
        map[3] = 1;
        let phi = SemilatticeHom::new(conc.semilattice().clone(), target, map).unwrap();
        let w = conc_projectability_witness(&conc, &phi).unwrap();
        assert_eq!(w.kernel.blocks(), vec![vec![0], vec![1, 2]]);
        assert_eq!(conc.index_of(&w.kernel), Some(high));
        assert_eq!(w.quotient_conc.size(), 2);
        for n in 1..=4 {
            let check = check_universal_property(&w, &arc(FiniteLattice::chain(n))).unwrap();
            assert!(check.homs > 0);
        }
        check_universal_property(&w, &arc(catalog::m3())).unwrap();
    }

    #[test]
    fn non_ideal_induced_is_refused() {
        let c3 = arc(FiniteLattice::chain(3));
        let conc = con_lattice(&c3).unwrap();
        // Conc C3 ≅ 2² → C2 sending both atoms to 1 is not ideal-induced
        let target = Arc::new(FiniteJoinSemilattice::chain(2));
        let phi = SemilatticeHom::new(conc.semilattice().clone(), target, vec![0, 1, 1, 1]).unwrap();
        assert_eq!(
            conc_projectability_witness(&conc, &phi).unwrap_err(),
            CongruenceError::NotIdealInduced
        );
    }

    #[test]
    fn conc_of_product_is_product_of_concs() {
        let c2 = FiniteLattice::chain(2);
        let c3 = FiniteLattice::chain(3);
        let p = arc(lattice_product(&c3, &c2));
        assert_eq!(con_lattice(&p).unwrap().size(), 8);
    }
}
