//! Seeded generators for property suites: semilattices as union-closed set
//! families, distributive ones as ring-of-sets families, embeddings,
//! retractions, retracted diagrams over small index posets, lattices and
//! monoids. Everything is drawn from one ChaCha stream, so a seed and a
//! configuration determine the corpus.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::catalog::{all_lattices, m3, n5, with_new_bottom, with_new_top};
use crate::diagram::{
    promote_to_retracted, BooleanProvider, IndexPoset, PosetDiagram, ProductProvider, RetractedDiagram,
    RetractionProvider, SemilatticeDiagram,
};
use crate::lattice::FiniteLattice;
use crate::monoid::{semilattice_as_monoid, FiniteCommutativeMonoid};
use crate::retraction::{boolean_retraction, Retraction};
use crate::semilattice::{FiniteJoinSemilattice, SemilatticeHom};

/// Bits of the ambient powerset the set families live in.
const UNIVERSE_BITS: u32 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CorpusConfig {
    pub seed: u64,
    /// Largest semilattice drawn directly (bases and plain semilattices).
    pub max_size: usize,
    pub semilattices: usize,
    pub distributive: usize,
    pub embeddings: usize,
    pub retractions: usize,
    pub diagrams: usize,
    /// Largest `|D̂(X)|` at a diagram node.
    pub max_cover: usize,
    pub max_nodes: usize,
}

impl CorpusConfig {
    pub fn new(seed: u64, max_size: usize) -> Self {
        CorpusConfig {
            seed,
            max_size,
            semilattices: 200,
            distributive: 60,
            embeddings: 40,
            retractions: 100,
            diagrams: 24,
            max_cover: 8,
            max_nodes: 4,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Corpus {
    pub config: CorpusConfig,
    pub semilattices: Vec<Arc<FiniteJoinSemilattice>>,
    pub distributive: Vec<Arc<FiniteJoinSemilattice>>,
    /// Inclusions of distributive sub-semilattices.
    pub embeddings: Vec<SemilatticeHom>,
    /// Pairs `(B, ρ = ε∘μ)` as full retraction data.
    pub retractions: Vec<Retraction>,
    pub diagrams: Vec<RetractedDiagram>,
    pub lattices: Vec<Arc<FiniteLattice>>,
    pub monoids: Vec<Arc<FiniteCommutativeMonoid>>,
}

/// The semilattice of a union-closed family of bitmasks containing 0,
/// elements numbered in ascending mask order.
pub fn family_semilattice(family: &BTreeSet<u32>) -> FiniteJoinSemilattice {
    let masks: Vec<u32> = family.iter().copied().collect();
    let position: BTreeMap<u32, usize> = masks.iter().enumerate().map(|(i, &m)| (m, i)).collect();
    let rows = masks
        .iter()
        .map(|&a| masks.iter().map(|&b| position[&(a | b)]).collect())
        .collect();
    FiniteJoinSemilattice::new(rows, position[&0], None).expect("union-closed family")
}

fn close(family: &mut BTreeSet<u32>, with_intersections: bool) {
    loop {
        let items: Vec<u32> = family.iter().copied().collect();
        let before = family.len();
        for &a in &items {
            for &b in &items {
                family.insert(a | b);
                if with_intersections {
                    family.insert(a & b);
                }
            }
        }
        if family.len() == before {
            return;
        }
    }
}

/// Grows a family from `{0}` by random masks, keeping each addition whose
/// closure stays within `max_size`.
fn random_family(rng: &mut ChaCha8Rng, max_size: usize, with_intersections: bool) -> BTreeSet<u32> {
    let target = rng.gen_range(1..=max_size.max(1));
    let mut family = BTreeSet::from([0u32]);
    for _ in 0..4 * max_size {
        if family.len() >= target {
            break;
        }
        let mut next = family.clone();
        next.insert(rng.gen_range(1..(1u32 << UNIVERSE_BITS)));
        close(&mut next, with_intersections);
        if next.len() <= max_size {
            family = next;
        }
    }
    family
}

pub fn random_semilattice(rng: &mut ChaCha8Rng, max_size: usize) -> FiniteJoinSemilattice {
    family_semilattice(&random_family(rng, max_size, false))
}

/// Closed under union and intersection, hence distributive.
pub fn random_distributive(rng: &mut ChaCha8Rng, max_size: usize) -> FiniteJoinSemilattice {
    family_semilattice(&random_family(rng, max_size, true))
}

/// The join-closure of `seed ∪ {0}` in `s`, in ascending index order.
fn join_closure(s: &FiniteJoinSemilattice, seed: &[usize]) -> Vec<usize> {
    let mut set: BTreeSet<usize> = seed.iter().copied().collect();
    set.insert(s.zero());
    loop {
        let items: Vec<usize> = set.iter().copied().collect();
        let before = set.len();
        for &a in &items {
            for &b in &items {
                set.insert(s.join(a, b));
            }
        }
        if set.len() == before {
            return items;
        }
    }
}

/// The inclusion of a random distributive sub-semilattice of `target`.
pub fn random_embedding(rng: &mut ChaCha8Rng, target: &Arc<FiniteJoinSemilattice>) -> Option<SemilatticeHom> {
    for _ in 0..8 {
        let count = rng.gen_range(0..=target.size().min(3));
        let seed: Vec<usize> = (0..count).map(|_| rng.gen_range(0..target.size())).collect();
        let elements = join_closure(target, &seed);
        let sub = target.subsemilattice(&elements).expect("join-closed");
        if sub.is_distributive() {
            return Some(SemilatticeHom::new(Arc::new(sub), target.clone(), elements).expect("inclusion"));
        }
    }
    None
}

/// A random poset on `n` nodes whose order extends the index order,
/// given by its covering relation.
pub fn random_index_poset(rng: &mut ChaCha8Rng, n: usize) -> IndexPoset {
    let mut below = vec![vec![false; n]; n];
    for j in 0..n {
        for i in 0..j {
            if rng.gen_bool(0.5) {
                below[i][j] = true;
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if below[i][k] && below[k][j] {
                    below[i][j] = true;
                }
            }
        }
    }
    let covers = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| below[i][j] && !(0..n).any(|k| below[i][k] && below[k][j]))
        .collect();
    IndexPoset::new(n, covers).expect("transitive reduction of a strict order")
}

/// Objects are ring-of-sets families growing along the index order, with
/// inclusions as arrows; the provider promotes them to a retracted diagram.
fn random_retracted_diagram(rng: &mut ChaCha8Rng, config: &CorpusConfig) -> Option<RetractedDiagram> {
    let nodes = rng.gen_range(1..=config.max_nodes.max(1));
    let index = Arc::new(random_index_poset(rng, nodes));
    let product = rng.gen_bool(0.25);
    // |D̂| = 2^|J(D)| for the Boolean cover, 2|D| for the product one
    let fits = |s: &FiniteJoinSemilattice| {
        let cover = if product { 2 * s.size() } else { 1 << s.join_irreducibles().len() };
        cover <= config.max_cover
    };
    let mut families: Vec<BTreeSet<u32>> = Vec::with_capacity(nodes);
    for x in 0..nodes {
        let mut family = BTreeSet::from([0u32]);
        for p in 0..x {
            if index.leq(p, x) {
                family.extend(families[p].iter().copied());
            }
        }
        close(&mut family, true);
        for _ in 0..rng.gen_range(0..=2) {
            let mut next = family.clone();
            next.insert(rng.gen_range(1..(1u32 << (UNIVERSE_BITS - 1))));
            close(&mut next, true);
            if fits(&family_semilattice(&next)) {
                family = next;
            }
        }
        if !fits(&family_semilattice(&family)) {
            return None;
        }
        families.push(family);
    }
    let objects: Vec<Arc<FiniteJoinSemilattice>> = families.iter().map(|f| Arc::new(family_semilattice(f))).collect();
    let mut edges = BTreeMap::new();
    for &(x, y) in index.covers() {
        let target: Vec<u32> = families[y].iter().copied().collect();
        let map = families[x]
            .iter()
            .map(|m| target.binary_search(m).expect("families grow along the order"))
            .collect();
        edges.insert((x, y), SemilatticeHom::new(objects[x].clone(), objects[y].clone(), map).ok()?);
    }
    let base: SemilatticeDiagram = PosetDiagram::new(index, objects, edges).ok()?;
    let provider: Box<dyn RetractionProvider> = if product {
        Box::new(ProductProvider {
            factor: Arc::new(FiniteJoinSemilattice::chain(2)),
        })
    } else {
        Box::new(BooleanProvider::default())
    };
    promote_to_retracted(&base, provider.as_ref()).ok()
}

/// A retraction `(B, ε, μ)` with `|B| ≤ 16`: the Boolean cover of a
/// distributive semilattice, or a product `D × C` with `ε = id × 0`.
fn random_retraction(rng: &mut ChaCha8Rng, max_size: usize) -> Retraction {
    loop {
        if rng.gen_bool(0.5) {
            let d = Arc::new(random_distributive(rng, max_size.min(16)));
            if d.join_irreducibles().len() <= 4 {
                return boolean_retraction(&d).expect("distributive");
            }
        } else {
            let d = Arc::new(random_semilattice(rng, max_size.min(8)));
            let c = Arc::new(random_semilattice(rng, (16 / d.size()).clamp(1, 4)));
            if d.size() * c.size() <= 16 {
                return ProductProvider { factor: c }.retraction(0, &d).expect("product retraction");
            }
        }
    }
}

/// Every lattice with at most `min(max_size, 6)` elements, then the M3/N5
/// family with added bounds up to 7 elements.
fn lattice_corpus(max_size: usize) -> Vec<Arc<FiniteLattice>> {
    let mut out: Vec<FiniteLattice> = (1..=max_size.min(6)).flat_map(all_lattices).collect();
    if max_size >= 5 {
        for base in [m3(), n5()] {
            out.push(base.clone());
            if max_size >= 6 {
                out.push(with_new_top(&base));
                out.push(with_new_bottom(&base));
            }
            if max_size >= 7 {
                out.push(with_new_top(&with_new_bottom(&base)));
            }
        }
    }
    out.into_iter().map(Arc::new).collect()
}

pub fn generate_corpus(config: CorpusConfig) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let max = config.max_size.max(1);

    let mut semilattices = Vec::with_capacity(config.semilattices);
    if max >= 5 {
        semilattices.push(Arc::new(m3().semilattice()));
        semilattices.push(Arc::new(n5().semilattice()));
    }
    while semilattices.len() < config.semilattices {
        semilattices.push(Arc::new(random_semilattice(&mut rng, max)));
    }

    let distributive: Vec<_> = (0..config.distributive)
        .map(|_| Arc::new(random_distributive(&mut rng, max)))
        .collect();

    let mut embeddings = Vec::with_capacity(config.embeddings);
    for _ in 0..config.embeddings {
        if let Some(target) = distributive.choose(&mut rng) {
            if let Some(f) = random_embedding(&mut rng, target) {
                embeddings.push(f);
            }
        }
    }

    let retractions = (0..config.retractions).map(|_| random_retraction(&mut rng, max)).collect();

    let mut diagrams = Vec::with_capacity(config.diagrams);
    let mut attempts = 0;
    while diagrams.len() < config.diagrams && attempts < 20 * config.diagrams.max(1) {
        attempts += 1;
        if let Some(d) = random_retracted_diagram(&mut rng, &config) {
            diagrams.push(d);
        }
    }

    let mut monoids: Vec<Arc<FiniteCommutativeMonoid>> = semilattices
        .iter()
        .take(16)
        .map(|s| Arc::new(semilattice_as_monoid(s)))
        .collect();
    for n in 1..=max.min(6) {
        monoids.push(Arc::new(FiniteCommutativeMonoid::cyclic_group(n)));
        monoids.push(Arc::new(FiniteCommutativeMonoid::truncated_naturals(n)));
    }

    Corpus {
        config,
        semilattices,
        distributive,
        embeddings,
        retractions,
        diagrams,
        lattices: lattice_corpus(max),
        monoids,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_corpus() {
        let a = generate_corpus(CorpusConfig::new(7, 8));
        let b = generate_corpus(CorpusConfig::new(7, 8));
        assert_eq!(a.semilattices, b.semilattices);
        assert_eq!(a.embeddings, b.embeddings);
        assert_eq!(a.diagrams.len(), b.diagrams.len());
    }

    #[test]
    fn families_respect_the_size_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            assert!(random_semilattice(&mut rng, 6).size() <= 6);
            let d = random_distributive(&mut rng, 9);
            assert!(d.size() <= 9 && d.is_distributive());
        }
    }

    #[test]
    fn non_distributive_members_from_five_on() {
        let c = generate_corpus(CorpusConfig::new(0, 5));
        assert!(c.semilattices.iter().any(|s| !s.is_distributive()));
        assert!(c.semilattices.iter().all(|s| s.size() <= 5));
    }

    #[test]
    fn embeddings_and_diagrams_are_valid() {
        let c = generate_corpus(CorpusConfig::new(3, 12));
        assert!(!c.embeddings.is_empty());
        assert!(c.embeddings.iter().all(|f| f.is_embedding() && f.source().is_distributive()));
        assert!(c.diagrams.len() >= 12, "only {} diagrams", c.diagrams.len());
        for d in &c.diagrams {
            assert!(d.nodes() <= 4);
            assert!(d.violations().is_empty());
            assert!((0..d.nodes()).all(|x| d.hat().object(x).size() <= 8));
        }
        assert_eq!(c.retractions.len(), 100);
        assert!(c.retractions.iter().all(|r| r.cover.size() <= 16));
    }

    #[test]
    fn index_posets_are_reduced() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..=4 {
            let p = random_index_poset(&mut rng, n);
            assert_eq!(p.nodes(), n);
        }
    }
}
