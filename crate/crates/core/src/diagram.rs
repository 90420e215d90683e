//! Poset-indexed diagrams of finite structures, retracted diagrams
//! `(D, D̂, ε, μ)`, and promotion of a plain diagram to a retracted one
//! through a pluggable retraction provider.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::lattice::{FiniteLattice, LatticeHom};
use crate::retraction::{boolean_retraction, search_retraction_morphisms, LiftSearch, Retraction, RetractionError};
use crate::semilattice::{product, same_semilattice, FiniteJoinSemilattice, SemilatticeHom};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagramError {
    #[error("index poset needs at least one node")]
    EmptyIndex,
    #[error("edge ({0}, {1}) refers to a missing node")]
    EdgeOutOfRange(usize, usize),
    #[error("edge ({0}, {0}) is a loop")]
    Loop(usize),
    #[error("edge ({0}, {1}) is listed twice")]
    DuplicateEdge(usize, usize),
    #[error("covering edges contain a cycle through {0}")]
    Cycle(usize),
    #[error("edge ({0}, {1}) is implied by a longer path and is not a cover")]
    NotACover(usize, usize),
    #[error("diagram has {got} objects, index has {expected} nodes")]
    ObjectCount { got: usize, expected: usize },
    #[error("no arrow given for covering edge ({0}, {1})")]
    MissingArrow(usize, usize),
    #[error("arrow given for ({0}, {1}), which is not a covering edge")]
    UnexpectedArrow(usize, usize),
    #[error("arrow ({0}, {1}) does not run between the objects at its endpoints")]
    ArrowEndpoints(usize, usize),
    #[error("base and hat diagrams have different index posets")]
    IndexMismatch,
    #[error("retraction data has the wrong shape at node {0}")]
    RetractionShape(usize),
    #[error("retracted diagram is invalid: {}", .0.join("; "))]
    InvalidRetraction(Vec<String>),
}

/// A finite poset given by its covering edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexPoset {
    nodes: usize,
    covers: Vec<(usize, usize)>,
    successors: Vec<Vec<usize>>,
    leq: Vec<bool>,
}

impl IndexPoset {
    pub fn new(nodes: usize, covers: Vec<(usize, usize)>) -> Result<Self, DiagramError> {
        if nodes == 0 {
            return Err(DiagramError::EmptyIndex);
        }
        let mut covers = covers;
        covers.sort_unstable();
        for w in covers.windows(2) {
            if w[0] == w[1] {
                return Err(DiagramError::DuplicateEdge(w[0].0, w[0].1));
            }
        }
        let mut leq = vec![false; nodes * nodes];
        for x in 0..nodes {
            leq[x * nodes + x] = true;
        }
        for &(a, b) in &covers {
            if a >= nodes || b >= nodes {
                return Err(DiagramError::EdgeOutOfRange(a, b));
            }
            if a == b {
                return Err(DiagramError::Loop(a));
            }
            leq[a * nodes + b] = true;
        }
        for k in 0..nodes {
            for i in 0..nodes {
                if leq[i * nodes + k] {
                    for j in 0..nodes {
                        if leq[k * nodes + j] {
                            leq[i * nodes + j] = true;
                        }
                    }
                }
            }
        }
        for x in 0..nodes {
            for y in 0..nodes {
                if x != y && leq[x * nodes + y] && leq[y * nodes + x] {
                    return Err(DiagramError::Cycle(x));
                }
            }
        }
        for &(a, b) in &covers {
            let between = (0..nodes).any(|z| z != a && z != b && leq[a * nodes + z] && leq[z * nodes + b]);
            if between {
                return Err(DiagramError::NotACover(a, b));
            }
        }
        let mut successors = vec![Vec::new(); nodes];
        for &(a, b) in &covers {
            successors[a].push(b);
        }
        Ok(IndexPoset {
            nodes,
            covers,
            successors,
            leq,
        })
    }

    pub fn single() -> Self {
        Self::chain(1)
    }

    /// `0 < 1 < … < n−1`.
    pub fn chain(n: usize) -> Self {
        Self::new(n, (1..n).map(|i| (i - 1, i)).collect()).expect("a chain is a poset")
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn covers(&self) -> &[(usize, usize)] {
        &self.covers
    }

    pub fn is_cover(&self, x: usize, y: usize) -> bool {
        self.covers.binary_search(&(x, y)).is_ok()
    }

    pub fn successors(&self, x: usize) -> &[usize] {
        &self.successors[x]
    }

    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.leq[x * self.nodes + y]
    }

    /// All `(x, y)` with `x < y`, in lexicographic order.
    pub fn strict_pairs(&self) -> Vec<(usize, usize)> {
        (0..self.nodes)
            .flat_map(|x| (0..self.nodes).map(move |y| (x, y)))
            .filter(|&(x, y)| x != y && self.leq(x, y))
            .collect()
    }

    /// All `(x, y, z)` with `x < y < z`, in lexicographic order.
    pub fn strict_triples(&self) -> Vec<(usize, usize, usize)> {
        let pairs = self.strict_pairs();
        let mut out = Vec::new();
        for &(x, y) in &pairs {
            for &(y2, z) in &pairs {
                if y2 == y {
                    out.push((x, y, z));
                }
            }
        }
        out
    }

    /// The covering path from `x` to `y` taking the least-index step that
    /// still lies below `y` at every node.
    pub fn canonical_path(&self, x: usize, y: usize) -> Option<Vec<usize>> {
        if !self.leq(x, y) {
            return None;
        }
        let mut path = vec![x];
        let mut cur = x;
        while cur != y {
            cur = *self.successors[cur]
                .iter()
                .find(|&&z| self.leq(z, y))
                .expect("a node strictly below y has a cover below y");
            path.push(cur);
        }
        Some(path)
    }

    /// Pairwise joins and meets exist.
    pub fn is_lattice(&self) -> bool {
        let n = self.nodes;
        let bound = |x: usize, y: usize, upper: bool| -> bool {
            let candidates: Vec<usize> = (0..n)
                .filter(|&z| if upper { self.leq(x, z) && self.leq(y, z) } else { self.leq(z, x) && self.leq(z, y) })
                .collect();
            candidates.iter().any(|&c| {
                candidates
                    .iter()
                    .all(|&d| if upper { self.leq(c, d) } else { self.leq(d, c) })
            })
        };
        (0..n).all(|x| (0..n).all(|y| bound(x, y, true) && bound(x, y, false)))
    }

    /// `self × {0 < 1 < … < len−1}` with node `(x, k)` at index `x·len + k`.
    pub fn times_chain(&self, len: usize) -> IndexPoset {
        let mut covers = Vec::new();
        for x in 0..self.nodes {
            for k in 0..len {
                if k + 1 < len {
                    covers.push((x * len + k, x * len + k + 1));
                }
                for &y in &self.successors[x] {
                    covers.push((x * len + k, y * len + k));
                }
            }
        }
        IndexPoset::new(self.nodes * len, covers).expect("product of posets is a poset")
    }
}

/// Arrows of a concrete category of finite structures given by tables.
pub trait Morphism: Clone + fmt::Debug + Send + Sync {
    type Object: Clone + fmt::Debug + PartialEq + Send + Sync;

    fn source(&self) -> &Arc<Self::Object>;
    fn target(&self) -> &Arc<Self::Object>;
    fn table(&self) -> &[usize];
    fn object_size(object: &Self::Object) -> usize;
    fn same_object(a: &Arc<Self::Object>, b: &Arc<Self::Object>) -> bool;
    fn identity(object: &Arc<Self::Object>) -> Self;
    /// `self ∘ first`, assuming `first.target()` is `self.source()`.
    fn compose_unchecked(&self, first: &Self) -> Self;
    /// Builds and validates an arrow from its table.
    fn from_table(source: Arc<Self::Object>, target: Arc<Self::Object>, map: Vec<usize>) -> Result<Self, String>;
    /// Re-checks the structure-preservation laws.
    fn check_laws(&self) -> Result<(), String>;
    /// The substructure on the listed elements (indices in list order).
    fn subobject(object: &Self::Object, elements: &[usize]) -> Result<Self::Object, String>;

    fn apply(&self, x: usize) -> usize {
        self.table()[x]
    }
}

impl Morphism for SemilatticeHom {
    type Object = FiniteJoinSemilattice;

    fn source(&self) -> &Arc<FiniteJoinSemilattice> {
        SemilatticeHom::source(self)
    }

    fn target(&self) -> &Arc<FiniteJoinSemilattice> {
        SemilatticeHom::target(self)
    }

    fn table(&self) -> &[usize] {
        self.map()
    }

    fn object_size(object: &FiniteJoinSemilattice) -> usize {
        object.size()
    }

    fn same_object(a: &Arc<FiniteJoinSemilattice>, b: &Arc<FiniteJoinSemilattice>) -> bool {
        same_semilattice(a, b)
    }

    fn identity(object: &Arc<FiniteJoinSemilattice>) -> Self {
        SemilatticeHom::identity(object)
    }

    fn compose_unchecked(&self, first: &Self) -> Self {
        let map = first.map().iter().map(|&v| self.apply(v)).collect();
        SemilatticeHom::new_unchecked(first.source().clone(), self.target().clone(), map)
    }

    fn from_table(
        source: Arc<FiniteJoinSemilattice>,
        target: Arc<FiniteJoinSemilattice>,
        map: Vec<usize>,
    ) -> Result<Self, String> {
        SemilatticeHom::new(source, target, map).map_err(|e| e.to_string())
    }

    fn check_laws(&self) -> Result<(), String> {
        SemilatticeHom::new(self.source().clone(), self.target().clone(), self.map().to_vec())
            .map(|_| ())
            .map_err(|e| e.to_string())
    }

    fn subobject(object: &FiniteJoinSemilattice, elements: &[usize]) -> Result<FiniteJoinSemilattice, String> {
        object.subsemilattice(elements).map_err(|e| e.to_string())
    }
}

impl Morphism for LatticeHom {
    type Object = FiniteLattice;

    fn source(&self) -> &Arc<FiniteLattice> {
        LatticeHom::source(self)
    }

    fn target(&self) -> &Arc<FiniteLattice> {
        LatticeHom::target(self)
    }

    fn table(&self) -> &[usize] {
        self.map()
    }

    fn object_size(object: &FiniteLattice) -> usize {
        object.size()
    }

    fn same_object(a: &Arc<FiniteLattice>, b: &Arc<FiniteLattice>) -> bool {
        Arc::ptr_eq(a, b) || a == b
    }

    fn identity(object: &Arc<FiniteLattice>) -> Self {
        LatticeHom::identity(object)
    }

    fn compose_unchecked(&self, first: &Self) -> Self {
        let map = first.map().iter().map(|&v| self.apply(v)).collect();
        LatticeHom::new_unchecked(first.source().clone(), self.target().clone(), map)
    }

    fn from_table(source: Arc<FiniteLattice>, target: Arc<FiniteLattice>, map: Vec<usize>) -> Result<Self, String> {
        LatticeHom::new(source, target, map).map_err(|e| e.to_string())
    }

    fn check_laws(&self) -> Result<(), String> {
        LatticeHom::new(self.source().clone(), self.target().clone(), self.map().to_vec())
            .map(|_| ())
            .map_err(|e| e.to_string())
    }

    fn subobject(object: &FiniteLattice, elements: &[usize]) -> Result<FiniteLattice, String> {
        object.sublattice(elements).map_err(|e| e.to_string())
    }
}

/// First element where two arrows with the same source differ.
pub fn first_difference<M: Morphism>(a: &M, b: &M) -> Option<usize> {
    if a.table().len() != b.table().len() {
        return Some(0);
    }
    a.table().iter().zip(b.table()).position(|(x, y)| x != y)
}

/// Table equality with the first differing element as the error.
pub fn tables_agree(left: &[usize], right: &[usize]) -> Result<(), String> {
    if left.len() != right.len() {
        return Err(format!("tables have lengths {} and {}", left.len(), right.len()));
    }
    match left.iter().zip(right).position(|(a, b)| a != b) {
        None => Ok(()),
        Some(i) => Err(format!("differ at element {i}: {} vs {}", left[i], right[i])),
    }
}

/// A functor from an index poset, given by objects and covering-edge arrows.
/// Arrows between comparable pairs are composed along canonical paths.
#[derive(Clone, Debug)]
pub struct PosetDiagram<M: Morphism> {
    index: Arc<IndexPoset>,
    objects: Vec<Arc<M::Object>>,
    edges: BTreeMap<(usize, usize), M>,
    composites: BTreeMap<(usize, usize), M>,
}

pub type SemilatticeDiagram = PosetDiagram<SemilatticeHom>;
pub type LatticeDiagram = PosetDiagram<LatticeHom>;

/// One failed law of a diagram.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DiagramIssue {
    HomLaw { from: usize, to: usize, detail: String },
    NonCommuting { from: usize, to: usize, path: Vec<usize>, other: Vec<usize>, element: usize },
}

impl fmt::Display for DiagramIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DiagramIssue::HomLaw { from, to, detail } => write!(f, "arrow {from}→{to}: {detail}"),
            DiagramIssue::NonCommuting { from, to, path, other, element } => write!(
                f,
                "{from}→{to}: paths {path:?} and {other:?} differ at element {element}"
            ),
        }
    }
}

/// Every failed law found by [`PosetDiagram::validate`]; empty means the
/// diagram is a functor.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DiagramReport {
    pub issues: Vec<DiagramIssue>,
}

impl DiagramReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }
}

impl fmt::Display for DiagramReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.issues.is_empty() {
            return write!(f, "valid");
        }
        for (i, issue) in self.issues.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{issue}")?;
        }
        Ok(())
    }
}

impl<M: Morphism> PosetDiagram<M> {
    pub fn new(
        index: Arc<IndexPoset>,
        objects: Vec<Arc<M::Object>>,
        edges: BTreeMap<(usize, usize), M>,
    ) -> Result<Self, DiagramError> {
        if objects.len() != index.nodes() {
            return Err(DiagramError::ObjectCount {
                got: objects.len(),
                expected: index.nodes(),
            });
        }
        for &(x, y) in index.covers() {
            if !edges.contains_key(&(x, y)) {
                return Err(DiagramError::MissingArrow(x, y));
            }
        }
        for (&(x, y), arrow) in &edges {
            if !index.is_cover(x, y) {
                return Err(DiagramError::UnexpectedArrow(x, y));
            }
            if !M::same_object(arrow.source(), &objects[x]) || !M::same_object(arrow.target(), &objects[y]) {
                return Err(DiagramError::ArrowEndpoints(x, y));
            }
        }
        Ok(Self::assemble(index, objects, edges))
    }

    fn assemble(index: Arc<IndexPoset>, objects: Vec<Arc<M::Object>>, edges: BTreeMap<(usize, usize), M>) -> Self {
        let mut composites = BTreeMap::new();
        // longest canonical paths last, so each composite extends a shorter one
        let mut pairs = index.strict_pairs();
        pairs.sort_by_key(|&(x, y)| (index.canonical_path(x, y).map_or(0, |p| p.len()), x, y));
        for (x, y) in pairs {
            let path = index.canonical_path(x, y).expect("comparable");
            let first: &M = &edges[&(path[0], path[1])];
            let arrow = if path[1] == y {
                first.clone()
            } else {
                let rest: &M = &composites[&(path[1], y)];
                rest.compose_unchecked(first)
            };
            composites.insert((x, y), arrow);
        }
        PosetDiagram {
            index,
            objects,
            edges,
            composites,
        }
    }

    /// A copy with one covering arrow replaced, without any checks.
    pub fn with_edge_replaced(&self, x: usize, y: usize, arrow: M) -> Self {
        let mut edges = self.edges.clone();
        edges.insert((x, y), arrow);
        Self::assemble(self.index.clone(), self.objects.clone(), edges)
    }

    pub fn index(&self) -> &Arc<IndexPoset> {
        &self.index
    }

    pub fn object(&self, x: usize) -> &Arc<M::Object> {
        &self.objects[x]
    }

    pub fn objects(&self) -> &[Arc<M::Object>] {
        &self.objects
    }

    pub fn edge(&self, x: usize, y: usize) -> Option<&M> {
        self.edges.get(&(x, y))
    }

    pub fn edges(&self) -> &BTreeMap<(usize, usize), M> {
        &self.edges
    }

    /// The arrow `x → y` for `x ≤ y`.
    pub fn arrow(&self, x: usize, y: usize) -> Option<M> {
        if x == y {
            return Some(M::identity(&self.objects[x]));
        }
        self.composites.get(&(x, y)).cloned()
    }

    /// Every covering path `x → y` agrees with the canonical composite.
    /// Checking each first step against the canonical remainder suffices by
    /// induction on path length.
    pub fn pair_commutes(&self, x: usize, y: usize) -> Result<(), DiagramIssue> {
        let canonical = match self.composites.get(&(x, y)) {
            Some(c) => c,
            None => return Ok(()),
        };
        for &z in self.index.successors(x) {
            if !self.index.leq(z, y) {
                continue;
            }
            let edge = &self.edges[&(x, z)];
            let via = if z == y {
                edge.clone()
            } else {
                self.composites[&(z, y)].compose_unchecked(edge)
            };
            if let Some(element) = first_difference(&via, canonical) {
                let mut path = vec![x];
                path.extend(self.index.canonical_path(z, y).expect("comparable"));
                return Err(DiagramIssue::NonCommuting {
                    from: x,
                    to: y,
                    path,
                    other: self.index.canonical_path(x, y).expect("comparable"),
                    element,
                });
            }
        }
        Ok(())
    }

    /// All hom-law failures and all non-commuting path pairs.
    pub fn validate(&self) -> DiagramReport {
        let mut report = DiagramReport::default();
        for (&(from, to), arrow) in &self.edges {
            if let Err(detail) = arrow.check_laws() {
                report.issues.push(DiagramIssue::HomLaw { from, to, detail });
            }
        }
        for (x, y) in self.index.strict_pairs() {
            if let Err(issue) = self.pair_commutes(x, y) {
                report.issues.push(issue);
            }
        }
        report
    }
}

/// `(D, D̂, ε, μ)`: a functor into the category of retractions.
#[derive(Clone, Debug)]
pub struct RetractedDiagram {
    base: SemilatticeDiagram,
    hat: SemilatticeDiagram,
    eps: Vec<SemilatticeHom>,
    mu: Vec<SemilatticeHom>,
}

impl RetractedDiagram {
    pub fn new(
        base: SemilatticeDiagram,
        hat: SemilatticeDiagram,
        eps: Vec<SemilatticeHom>,
        mu: Vec<SemilatticeHom>,
    ) -> Result<Self, DiagramError> {
        let rd = Self::new_unchecked(base, hat, eps, mu)?;
        let violations = rd.violations();
        if violations.is_empty() {
            Ok(rd)
        } else {
            Err(DiagramError::InvalidRetraction(violations))
        }
    }

    /// Shape checks only; for fault injection.
    pub fn new_unchecked(
        base: SemilatticeDiagram,
        hat: SemilatticeDiagram,
        eps: Vec<SemilatticeHom>,
        mu: Vec<SemilatticeHom>,
    ) -> Result<Self, DiagramError> {
        if base.index() != hat.index() {
            return Err(DiagramError::IndexMismatch);
        }
        let n = base.index().nodes();
        if eps.len() != n || mu.len() != n {
            return Err(DiagramError::RetractionShape(eps.len().min(mu.len())));
        }
        for x in 0..n {
            let ok = same_semilattice(eps[x].source(), base.object(x))
                && same_semilattice(eps[x].target(), hat.object(x))
                && same_semilattice(mu[x].source(), hat.object(x))
                && same_semilattice(mu[x].target(), base.object(x));
            if !ok {
                return Err(DiagramError::RetractionShape(x));
            }
        }
        Ok(RetractedDiagram { base, hat, eps, mu })
    }

    /// Every failed invariant, as readable messages.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (name, d) in [("base", &self.base), ("hat", &self.hat)] {
            for issue in d.validate().issues {
                out.push(format!("{name} diagram: {issue}"));
            }
        }
        for x in 0..self.nodes() {
            for (name, h) in [("ε", &self.eps[x]), ("μ", &self.mu[x])] {
                if let Err(e) = h.check_laws() {
                    out.push(format!("{name} at node {x}: {e}"));
                }
            }
            let id: Vec<usize> = (0..self.base.object(x).size()).collect();
            if let Err(e) = tables_agree(self.mu[x].compose_unchecked(&self.eps[x]).map(), &id) {
                out.push(format!("μ∘ε ≠ id at node {x}: {e}"));
            }
        }
        for (x, y) in self.index().strict_pairs() {
            if let Err(e) = self.eps_square(x, y) {
                out.push(format!("ε square at {x}→{y}: {e}"));
            }
            if let Err(e) = self.mu_square(x, y) {
                out.push(format!("μ square at {x}→{y}: {e}"));
            }
        }
        out
    }

    /// `D̂(f) ∘ ε_X = ε_Y ∘ D(f)`.
    pub fn eps_square(&self, x: usize, y: usize) -> Result<(), String> {
        let hf = self.hat.arrow(x, y).ok_or("not comparable")?;
        let f = self.base.arrow(x, y).ok_or("not comparable")?;
        tables_agree(
            hf.compose_unchecked(&self.eps[x]).map(),
            self.eps[y].compose_unchecked(&f).map(),
        )
    }

    /// `μ_Y ∘ D̂(f) = D(f) ∘ μ_X`.
    pub fn mu_square(&self, x: usize, y: usize) -> Result<(), String> {
        let hf = self.hat.arrow(x, y).ok_or("not comparable")?;
        let f = self.base.arrow(x, y).ok_or("not comparable")?;
        tables_agree(
            self.mu[y].compose_unchecked(&hf).map(),
            f.compose_unchecked(&self.mu[x]).map(),
        )
    }

    pub fn index(&self) -> &Arc<IndexPoset> {
        self.base.index()
    }

    pub fn nodes(&self) -> usize {
        self.index().nodes()
    }

    pub fn base(&self) -> &SemilatticeDiagram {
        &self.base
    }

    pub fn hat(&self) -> &SemilatticeDiagram {
        &self.hat
    }

    pub fn eps(&self, x: usize) -> &SemilatticeHom {
        &self.eps[x]
    }

    pub fn mu(&self, x: usize) -> &SemilatticeHom {
        &self.mu[x]
    }

    /// `ρ_X = ε_X ∘ μ_X`; idempotent whenever `μ_X ∘ ε_X = id`.
    pub fn derived_rho(&self, x: usize) -> SemilatticeHom {
        self.eps[x].compose_unchecked(&self.mu[x])
    }

    /// `D̂(f) ∘ ρ_X = ρ_Y ∘ D̂(f)` as tables.
    pub fn check_rho_naturality(&self, x: usize, y: usize) -> bool {
        let Some(hf) = self.hat.arrow(x, y) else {
            return false;
        };
        hf.compose_unchecked(&self.derived_rho(x)).map() == self.derived_rho(y).compose_unchecked(&hf).map()
    }

    /// Decomposes into `(base, hat, ε, μ)`.
    pub fn into_parts(self) -> (SemilatticeDiagram, SemilatticeDiagram, Vec<SemilatticeHom>, Vec<SemilatticeHom>) {
        (self.base, self.hat, self.eps, self.mu)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PromoteError {
    #[error("node {node} is not distributive: {detail}")]
    NotDistributiveNode { node: usize, detail: String },
    #[error("arrow {from}→{to} is not an embedding")]
    NotAnEmbedding { from: usize, to: usize },
    #[error("arrow {from}→{to}: no lift satisfies both retraction squares ({reason})")]
    ArrowLiftNotFound { from: usize, to: usize, reason: String },
    #[error("node {node}: {detail}")]
    Provider { node: usize, detail: String },
    #[error("no combination of arrow lifts makes the hat diagram commute ({attempts} tried)")]
    NoFunctorialChoice { attempts: usize },
}

/// Supplies `(D̂(X), ε_X, μ_X)` per object and candidate `D̂(f)` per arrow.
pub trait RetractionProvider {
    fn name(&self) -> &'static str;

    fn requires_embeddings(&self) -> bool {
        false
    }

    fn retraction(&self, node: usize, d: &Arc<FiniteJoinSemilattice>) -> Result<Retraction, PromoteError>;

    /// Candidate arrows `D̂(X) → D̂(Y)` satisfying both squares, best first.
    fn lift_candidates(
        &self,
        f: &SemilatticeHom,
        source: &Retraction,
        target: &Retraction,
    ) -> Result<Vec<SemilatticeHom>, String>;
}

/// The powerset of join-irreducibles with arrow lifts found by search
/// among embeddings.
#[derive(Clone, Copy, Debug)]
pub struct BooleanProvider {
    pub candidates: usize,
    pub budget: u64,
}

impl Default for BooleanProvider {
    fn default() -> Self {
        BooleanProvider {
            candidates: 16,
            budget: 5_000_000,
        }
    }
}

impl RetractionProvider for BooleanProvider {
    fn name(&self) -> &'static str {
        "boolean"
    }

    fn requires_embeddings(&self) -> bool {
        true
    }

    fn retraction(&self, node: usize, d: &Arc<FiniteJoinSemilattice>) -> Result<Retraction, PromoteError> {
        boolean_retraction(d).map_err(|e| match e {
            RetractionError::NotDistributive { .. } => PromoteError::NotDistributiveNode {
                node,
                detail: e.to_string(),
            },
            other => PromoteError::Provider {
                node,
                detail: other.to_string(),
            },
        })
    }

    fn lift_candidates(
        &self,
        f: &SemilatticeHom,
        source: &Retraction,
        target: &Retraction,
    ) -> Result<Vec<SemilatticeHom>, String> {
        let options = LiftSearch {
            embeddings_only: true,
            limit: self.candidates,
            budget: self.budget,
        };
        search_retraction_morphisms(f, source, target, options).map_err(|e| e.to_string())
    }
}

/// `D̂ = D`, `ε = μ = id`, `D̂(f) = f`.
#[derive(Clone, Copy, Debug, Default)]
pub struct IdentityProvider;

impl RetractionProvider for IdentityProvider {
    fn name(&self) -> &'static str {
        "identity"
    }

    fn retraction(&self, _node: usize, d: &Arc<FiniteJoinSemilattice>) -> Result<Retraction, PromoteError> {
        Ok(Retraction::identity(d))
    }

    fn lift_candidates(
        &self,
        f: &SemilatticeHom,
        _source: &Retraction,
        _target: &Retraction,
    ) -> Result<Vec<SemilatticeHom>, String> {
        Ok(vec![f.clone()])
    }
}

/// `D̂ = D Π C` for a fixed `C`, with `ε = id × 0`, `μ` the first
/// projection and `D̂(f) = f Π id_C`.
#[derive(Clone, Debug)]
pub struct ProductProvider {
    pub factor: Arc<FiniteJoinSemilattice>,
}

impl RetractionProvider for ProductProvider {
    fn name(&self) -> &'static str {
        "product"
    }

    fn retraction(&self, node: usize, d: &Arc<FiniteJoinSemilattice>) -> Result<Retraction, PromoteError> {
        let p = product(d, &self.factor);
        let eps = p
            .pair(&SemilatticeHom::identity(d), &SemilatticeHom::zero_map(d, &self.factor))
            .map_err(|e| PromoteError::Provider {
                node,
                detail: e.to_string(),
            })?;
        Retraction::new(eps, p.left_proj().clone()).map_err(|e| PromoteError::Provider {
            node,
            detail: e.to_string(),
        })
    }

    fn lift_candidates(
        &self,
        f: &SemilatticeHom,
        source: &Retraction,
        target: &Retraction,
    ) -> Result<Vec<SemilatticeHom>, String> {
        let c = self.factor.size();
        let map = (0..source.cover.size())
            .map(|v| f.apply(v / c) * c + v % c)
            .collect();
        SemilatticeHom::new(source.cover.clone(), target.cover.clone(), map)
            .map(|h| vec![h])
            .map_err(|e| e.to_string())
    }
}

/// What was built before promotion failed.
#[derive(Clone, Debug)]
pub struct PromoteFailure {
    pub errors: Vec<PromoteError>,
    pub retractions: Vec<Option<Retraction>>,
    pub lifts: BTreeMap<(usize, usize), Vec<SemilatticeHom>>,
}

impl fmt::Display for PromoteFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let msgs: Vec<String> = self.errors.iter().map(ToString::to_string).collect();
        write!(f, "{}", msgs.join("; "))
    }
}

/// Most leaf combinations tried when choosing one lift per covering edge.
pub const MAX_PROMOTE_ATTEMPTS: usize = 100_000;

/// Builds a retracted diagram over `d` with the provider's objects and a
/// commuting choice of arrow lifts.
pub fn promote_to_retracted<P: RetractionProvider + ?Sized>(
    d: &SemilatticeDiagram,
    provider: &P,
) -> Result<RetractedDiagram, PromoteFailure> {
    let index = d.index().clone();
    let mut errors = Vec::new();
    let retractions: Vec<Option<Retraction>> = (0..index.nodes())
        .map(|x| match provider.retraction(x, d.object(x)) {
            Ok(r) => Some(r),
            Err(e) => {
                errors.push(e);
                None
            }
        })
        .collect();
    let mut lifts = BTreeMap::new();
    for (&(x, y), f) in d.edges() {
        if provider.requires_embeddings() && !f.is_embedding() {
            errors.push(PromoteError::NotAnEmbedding { from: x, to: y });
            continue;
        }
        let (Some(rx), Some(ry)) = (&retractions[x], &retractions[y]) else {
            continue;
        };
        match provider.lift_candidates(f, rx, ry) {
            Ok(c) if !c.is_empty() => {
                lifts.insert((x, y), c);
            }
            Ok(_) => errors.push(PromoteError::ArrowLiftNotFound {
                from: x,
                to: y,
                reason: "no candidates".into(),
            }),
            Err(reason) => errors.push(PromoteError::ArrowLiftNotFound { from: x, to: y, reason }),
        }
    }
    if !errors.is_empty() {
        return Err(PromoteFailure {
            errors,
            retractions,
            lifts,
        });
    }
    let retractions: Vec<Retraction> = retractions.into_iter().map(Option::unwrap).collect();
    let covers: Vec<(usize, usize)> = index.covers().to_vec();
    let hat_objects: Vec<_> = retractions.iter().map(|r| r.cover.clone()).collect();
    let eps: Vec<_> = retractions.iter().map(|r| r.eps.clone()).collect();
    let mu: Vec<_> = retractions.iter().map(|r| r.mu.clone()).collect();

    let mut choice = vec![0usize; covers.len()];
    let mut attempts = 0;
    loop {
        attempts += 1;
        let edges: BTreeMap<_, _> = covers
            .iter()
            .zip(&choice)
            .map(|(&e, &c)| (e, lifts[&e][c].clone()))
            .collect();
        let hat = PosetDiagram::new(index.clone(), hat_objects.clone(), edges)
            .expect("lifts run between the provider's covers");
        if hat.validate().is_valid() {
            let rd = RetractedDiagram::new(d.clone(), hat, eps.clone(), mu.clone());
            match rd {
                Ok(rd) => return Ok(rd),
                Err(e) => {
                    return Err(PromoteFailure {
                        errors: vec![PromoteError::Provider {
                            node: 0,
                            detail: e.to_string(),
                        }],
                        retractions: retractions.into_iter().map(Some).collect(),
                        lifts,
                    })
                }
            }
        }
        // odometer over candidate indices, last edge fastest
        let mut i = covers.len();
        loop {
            if i == 0 || attempts >= MAX_PROMOTE_ATTEMPTS {
                return Err(PromoteFailure {
                    errors: vec![PromoteError::NoFunctorialChoice { attempts }],
                    retractions: retractions.into_iter().map(Some).collect(),
                    lifts,
                });
            }
            i -= 1;
            choice[i] += 1;
            if choice[i] < lifts[&covers[i]].len() {
                break;
            }
            choice[i] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(n: usize) -> Arc<FiniteJoinSemilattice> {
        Arc::new(FiniteJoinSemilattice::chain(n))
    }

    fn one_edge(a: Arc<FiniteJoinSemilattice>, b: Arc<FiniteJoinSemilattice>, map: Vec<usize>) -> SemilatticeDiagram {
        let f = SemilatticeHom::new(a.clone(), b.clone(), map).unwrap();
        PosetDiagram::new(Arc::new(IndexPoset::chain(2)), vec![a, b], BTreeMap::from([((0, 1), f)])).unwrap()
    }

    #[test]
    fn index_poset_rejects_bad_input() {
        assert_eq!(IndexPoset::new(2, vec![(0, 1), (1, 0)]).unwrap_err(), DiagramError::Cycle(0));
        assert_eq!(
            IndexPoset::new(3, vec![(0, 1), (1, 2), (0, 2)]).unwrap_err(),
            DiagramError::NotACover(0, 2)
        );
        assert_eq!(IndexPoset::new(1, vec![(0, 0)]).unwrap_err(), DiagramError::Loop(0));
        let square = IndexPoset::new(4, vec![(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap();
        assert!(square.is_lattice());
        assert_eq!(square.canonical_path(0, 3), Some(vec![0, 1, 3]));
        assert!(!IndexPoset::new(3, vec![(0, 2), (1, 2)]).unwrap().is_lattice());
    }

    #[test]
    fn times_chain_numbering() {
        let p = IndexPoset::chain(2).times_chain(3);
        assert_eq!(p.nodes(), 6);
        assert!(p.leq(0, 5));
        assert!(p.is_cover(0, 1));
        assert!(p.is_cover(0, 3));
        assert!(!p.leq(3, 2));
    }

    #[test]
    fn single_node_and_one_edge_are_valid() {
        let d = PosetDiagram::<SemilatticeHom>::new(Arc::new(IndexPoset::single()), vec![chain(3)], BTreeMap::new())
            .unwrap();
        assert!(d.validate().is_valid());
        assert!(one_edge(chain(2), chain(3), vec![0, 2]).validate().is_valid());
    }

    #[test]
    fn corrupted_square_is_named() {
        let c2 = chain(2);
        let id = SemilatticeHom::identity(&c2);
        let zero = SemilatticeHom::zero_map(&c2, &c2);
        let square = Arc::new(IndexPoset::new(4, vec![(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap());
        let edges = BTreeMap::from([
            ((0, 1), id.clone()),
            ((0, 2), id.clone()),
            ((1, 3), id.clone()),
            ((2, 3), id.clone()),
        ]);
        let d = PosetDiagram::new(square, vec![c2.clone(); 4], edges).unwrap();
        assert!(d.validate().is_valid());
        let broken = d.with_edge_replaced(2, 3, zero);
        let report = broken.validate();
        assert_eq!(
            report.issues,
            vec![DiagramIssue::NonCommuting {
                from: 0,
                to: 3,
                path: vec![0, 2, 3],
                other: vec![0, 1, 3],
                element: 1
            }]
        );
    }

    #[test]
    fn corrupted_table_breaks_hom_law() {
        let d = one_edge(chain(2), chain(3), vec![0, 2]);
        let bad = SemilatticeHom::new_unchecked(chain(2), chain(3), vec![1, 2]);
        let report = d.with_edge_replaced(0, 1, bad).validate();
        assert!(matches!(report.issues[0], DiagramIssue::HomLaw { from: 0, to: 1, .. }));
    }

    #[test]
    fn promote_one_node_three_chain() {
        let d = PosetDiagram::new(Arc::new(IndexPoset::single()), vec![chain(3)], BTreeMap::new()).unwrap();
        let rd = promote_to_retracted(&d, &BooleanProvider::default()).unwrap();
        assert_eq!(rd.hat().object(0).size(), 4);
        assert_eq!(rd.eps(0).map(), &[0, 1, 3]);
        let rho = rd.derived_rho(0);
        assert_eq!(rho.map(), &[0, 1, 3, 3]);
        assert_eq!(rho.compose_unchecked(&rho).map(), rho.map());
    }

    #[test]
    fn promote_embedding_of_chains() {
        let d = one_edge(chain(2), chain(3), vec![0, 2]);
        let rd = promote_to_retracted(&d, &BooleanProvider::default()).unwrap();
        assert!(rd.eps_square(0, 1).is_ok());
        assert!(rd.mu_square(0, 1).is_ok());
        assert!(rd.check_rho_naturality(0, 1));
        assert_eq!(rd.base().edge(0, 1), d.edge(0, 1));
    }

    #[test]
    fn identity_arrows_lift_to_identities() {
        let c3 = chain(3);
        let d = one_edge(c3.clone(), c3.clone(), vec![0, 1, 2]);
        let rd = promote_to_retracted(&d, &BooleanProvider::default()).unwrap();
        let h = rd.hat().edge(0, 1).unwrap();
        assert_eq!(h.map(), &[0, 1, 2, 3]);
    }

    #[test]
    fn non_embedding_is_refused() {
        let d = one_edge(chain(3), chain(2), vec![0, 1, 1]);
        let err = promote_to_retracted(&d, &BooleanProvider::default()).unwrap_err();
        assert_eq!(err.errors, vec![PromoteError::NotAnEmbedding { from: 0, to: 1 }]);
        assert!(err.retractions.iter().all(Option::is_some));
    }

    #[test]
    fn product_provider_is_functorial() {
        let d = one_edge(chain(2), chain(3), vec![0, 1]);
        let rd = promote_to_retracted(&d, &ProductProvider { factor: chain(2) }).unwrap();
        assert_eq!(rd.hat().object(1).size(), 6);
        assert_ne!(rd.derived_rho(0).map(), SemilatticeHom::identity(rd.hat().object(0)).map());
    }

    #[test]
    fn corrupted_mu_breaks_rho_naturality() {
        let d = one_edge(chain(2), chain(3), vec![0, 2]);
        let rd = promote_to_retracted(&d, &BooleanProvider::default()).unwrap();
        let (base, hat, eps, mut mu) = rd.into_parts();
        mu[1] = SemilatticeHom::zero_map(hat.object(1), base.object(1));
        let broken = RetractedDiagram::new_unchecked(base, hat, eps, mu).unwrap();
        assert!(!broken.check_rho_naturality(0, 1));
        assert!(!broken.violations().is_empty());
    }
}
