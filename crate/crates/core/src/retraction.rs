//! Retraction data `(B, ε, μ)` with `μ ∘ ε = id`, the canonical Boolean
//! retraction of a finite distributive semilattice, and a generator-based
//! search for the morphism part of a functorial retraction.

use std::sync::Arc;

use thiserror::Error;

use crate::semilattice::{
    same_semilattice, FiniteJoinSemilattice, HomSearch, SemilatticeError, SemilatticeHom,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RetractionError {
    #[error(transparent)]
    Semilattice(#[from] SemilatticeError),
    #[error("not distributive: {a} ∨ {b} lies above {c}, which does not split")]
    NotDistributive { a: usize, b: usize, c: usize },
    #[error("μ ∘ ε differs from the identity at {element}")]
    NotARetraction { element: usize },
    #[error("no homomorphism in the generator search space satisfies both squares")]
    NotFound,
    #[error("lift search exceeded its step budget")]
    BudgetExhausted,
}

/// `A` is a retract of `B` through `ε: A → B` and `μ: B → A`.
#[derive(Clone, Debug)]
pub struct Retraction {
    pub base: Arc<FiniteJoinSemilattice>,
    pub cover: Arc<FiniteJoinSemilattice>,
    pub eps: SemilatticeHom,
    pub mu: SemilatticeHom,
}

impl Retraction {
    pub fn new(eps: SemilatticeHom, mu: SemilatticeHom) -> Result<Self, RetractionError> {
        let r = Self::new_unchecked(eps, mu)?;
        let composite = r.mu.after(&r.eps)?;
        if let Some(element) = composite.first_difference(&SemilatticeHom::identity(&r.base)) {
            return Err(RetractionError::NotARetraction { element });
        }
        Ok(r)
    }

    /// Shape-checked only; `μ ∘ ε = id` is not enforced.
    pub fn new_unchecked(eps: SemilatticeHom, mu: SemilatticeHom) -> Result<Self, RetractionError> {
        if !same_semilattice(eps.target(), mu.source())
            || !same_semilattice(eps.source(), mu.target())
        {
            return Err(SemilatticeError::ShapeMismatch(
                "ε and μ are not opposite arrows between the same pair of objects".into(),
            )
            .into());
        }
        Ok(Retraction {
            base: eps.source().clone(),
            cover: eps.target().clone(),
            eps,
            mu,
        })
    }

    /// The trivial retraction of `A` onto itself.
    pub fn identity(a: &Arc<FiniteJoinSemilattice>) -> Self {
        let id = SemilatticeHom::identity(a);
        Retraction {
            base: a.clone(),
            cover: a.clone(),
            eps: id.clone(),
            mu: id,
        }
    }

    /// `ρ = ε ∘ μ`, an idempotent endomorphism of the cover.
    pub fn rho(&self) -> SemilatticeHom {
        self.eps
            .after(&self.mu)
            .expect("retraction arrows compose by construction")
    }
}

/// The powerset `B` of the join-irreducibles `J(D)` with
/// `ε(x) = { j ∈ J(D) : j ≤ x }` and `μ(S) = ⋁ S`.
///
/// Subset `S` of `J(D)` is the element whose bitmask has bit `i` set when
/// the `i`-th join-irreducible (ascending index) is in `S`.
pub fn boolean_retraction(d: &Arc<FiniteJoinSemilattice>) -> Result<Retraction, RetractionError> {
    if let Some((a, b, c)) = d.distributivity_witness() {
        return Err(RetractionError::NotDistributive { a, b, c });
    }
    let irreducibles = d.join_irreducibles();
    let k = irreducibles.len();
    let mut cover = FiniteJoinSemilattice::powerset(k);
    if d.unit().is_some() {
        cover = cover.with_unit();
    }
    let cover = Arc::new(cover);
    let eps_map = (0..d.size())
        .map(|x| {
            irreducibles
                .iter()
                .enumerate()
                .filter(|&(_, &j)| d.leq(j, x))
                .fold(0usize, |m, (i, _)| m | (1 << i))
        })
        .collect();
    let mu_map = (0..cover.size())
        .map(|mask| {
            d.join_all(
                irreducibles
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| mask & (1 << i) != 0)
                    .map(|(_, &j)| j),
            )
        })
        .collect();
    let eps = SemilatticeHom::new(d.clone(), cover.clone(), eps_map)?;
    let mu = SemilatticeHom::new(cover.clone(), d.clone(), mu_map)?;
    Retraction::new(eps, mu)
}

/// Options for [`search_retraction_morphism`].
#[derive(Clone, Copy, Debug)]
pub struct LiftSearch {
    /// Only accept ⟨∨,0⟩-embeddings.
    pub embeddings_only: bool,
    /// Stop after this many solutions.
    pub limit: usize,
    pub budget: u64,
}

impl Default for LiftSearch {
    fn default() -> Self {
        LiftSearch {
            embeddings_only: false,
            limit: 1,
            budget: 5_000_000,
        }
    }
}

/// All homomorphisms `g: B_X → B_Y` (up to `options.limit`) with
/// `g ∘ ε_X = ε_Y ∘ f` and `μ_Y ∘ g = f ∘ μ_X`.
///
/// Both squares are element-local constraints on `g`: `g(ε_X(d))` is pinned
/// to `ε_Y(f(d))`, and `g(b)` must lie in the `μ_Y`-fibre of `f(μ_X(b))`.
/// The backtracking in [`HomSearch`] assigns join-irreducible generators in
/// ascending order with ascending candidate values.
pub fn search_retraction_morphisms(
    f: &SemilatticeHom,
    source: &Retraction,
    target: &Retraction,
    options: LiftSearch,
) -> Result<Vec<SemilatticeHom>, RetractionError> {
    if !same_semilattice(f.source(), &source.base) || !same_semilattice(f.target(), &target.base) {
        return Err(SemilatticeError::ShapeMismatch(
            "retraction data do not match the arrow's endpoints".into(),
        )
        .into());
    }
    let bx = &source.cover;
    let by = &target.cover;
    let mut pinned: Vec<Option<usize>> = vec![None; bx.size()];
    for d in 0..source.base.size() {
        let x = source.eps.apply(d);
        let required = target.eps.apply(f.apply(d));
        match pinned[x] {
            Some(v) if v != required => return Err(RetractionError::NotFound),
            _ => pinned[x] = Some(required),
        }
    }
    let fibre_target: Vec<usize> = (0..bx.size())
        .map(|b| f.apply(source.mu.apply(b)))
        .collect();
    let constraint = |x: usize, value: usize| {
        pinned[x].map_or(true, |v| v == value) && target.mu.apply(value) == fibre_target[x]
    };
    let outcome = HomSearch::new(bx, by)
        .constraint(constraint)
        .injective(options.embeddings_only)
        .limit(options.limit)
        .budget(options.budget)
        .run();
    if outcome.solutions.is_empty() {
        return Err(if outcome.budget_exhausted {
            RetractionError::BudgetExhausted
        } else {
            RetractionError::NotFound
        });
    }
    Ok(outcome
        .solutions
        .into_iter()
        .map(|m| SemilatticeHom::new_unchecked(bx.clone(), by.clone(), m))
        .collect())
}

/// First homomorphism found by [`search_retraction_morphisms`].
pub fn search_retraction_morphism(
    f: &SemilatticeHom,
    source: &Retraction,
    target: &Retraction,
    embeddings_only: bool,
) -> Result<SemilatticeHom, RetractionError> {
    let options = LiftSearch {
        embeddings_only,
        ..LiftSearch::default()
    };
    let mut found = search_retraction_morphisms(f, source, target, options)?;
    Ok(found.remove(0))
}

/// Checks both squares over every element (not only generators). Returns the
/// first failing element and which square failed.
pub fn check_retraction_squares(
    f: &SemilatticeHom,
    g: &SemilatticeHom,
    source: &Retraction,
    target: &Retraction,
) -> Result<(), String> {
    for d in 0..source.base.size() {
        if g.apply(source.eps.apply(d)) != target.eps.apply(f.apply(d)) {
            return Err(format!("g∘ε_X ≠ ε_Y∘f at {d}"));
        }
    }
    for b in 0..source.cover.size() {
        if target.mu.apply(g.apply(b)) != f.apply(source.mu.apply(b)) {
            return Err(format!("μ_Y∘g ≠ f∘μ_X at {b}"));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semilattice::{enumerate_homs, find_isomorphism, product};

    fn chain(n: usize) -> Arc<FiniteJoinSemilattice> {
        Arc::new(FiniteJoinSemilattice::chain(n))
    }

    #[test]
    fn three_chain_retracts_onto_square() {
        let d = chain(3);
        let r = boolean_retraction(&d).unwrap();
        assert_eq!(r.cover.size(), 4);
        // J = {a=1, 1=2}; bit 0 ↔ a, bit 1 ↔ top
        assert_eq!(r.eps.map(), &[0b00, 0b01, 0b11]);
        assert_eq!(r.mu.apply(0b10), 2);
        assert!(r.eps.is_embedding());
        assert!(r.cover.is_boolean());
        let rho = r.rho();
        assert_eq!(rho.map(), &[0b00, 0b01, 0b11, 0b11]);
    }

    #[test]
    fn boolean_input_gives_isomorphism() {
        let c2 = chain(2);
        let sq = product(&c2, &c2);
        let d = sq.product().clone();
        let r = boolean_retraction(&d).unwrap();
        assert!(r.eps.is_isomorphism());
        let back = r.eps.after(&r.mu).unwrap();
        assert_eq!(back, SemilatticeHom::identity(&r.cover));
        assert!(find_isomorphism(&d, &r.cover).is_some());
    }

    #[test]
    fn degenerate_retraction() {
        let r = boolean_retraction(&chain(1)).unwrap();
        assert_eq!(r.cover.size(), 1);
    }

    #[test]
    fn unit_is_preserved() {
        let d = Arc::new(FiniteJoinSemilattice::chain(3).with_unit());
        let r = boolean_retraction(&d).unwrap();
        assert!(r.eps.preserves_unit());
    }

    #[test]
    fn non_distributive_refused() {
        let m3 = Arc::new(crate::catalog::m3().semilattice());
        assert!(matches!(
            boolean_retraction(&m3),
            Err(RetractionError::NotDistributive { .. })
        ));
    }

    #[test]
    fn identity_lift_found_first() {
        let d = chain(3);
        let r = boolean_retraction(&d).unwrap();
        let id = SemilatticeHom::identity(&d);
        let g = search_retraction_morphism(&id, &r, &r, false).unwrap();
        assert_eq!(g, SemilatticeHom::identity(&r.cover));
    }

    #[test]
    fn chain_embedding_lift_matches_brute_force() {
        let c2 = chain(2);
        let c3 = chain(3);
        let f = SemilatticeHom::new(c2.clone(), c3.clone(), vec![0, 2]).unwrap();
        let rx = boolean_retraction(&c2).unwrap();
        let ry = boolean_retraction(&c3).unwrap();
        let brute: Vec<SemilatticeHom> = enumerate_homs(&rx.cover, &ry.cover)
            .into_iter()
            .filter(|g| check_retraction_squares(&f, g, &rx, &ry).is_ok())
            .collect();
        assert!(!brute.is_empty());
        let all = search_retraction_morphisms(
            &f,
            &rx,
            &ry,
            LiftSearch {
                limit: usize::MAX,
                ..LiftSearch::default()
            },
        )
        .unwrap();
        assert_eq!(all, brute);
        let g = search_retraction_morphism(&f, &rx, &ry, true).unwrap();
        assert!(check_retraction_squares(&f, &g, &rx, &ry).is_ok());
        assert!(g.is_embedding());
    }

    #[test]
    fn incompatible_data_not_found() {
        // f collapses the 2-chain to 0; retraction data of the target are the
        // identity, source uses the product cover C2 Π C2 with ε = diagonal.
        let c2 = chain(2);
        let sq = product(&c2, &c2);
        let id = SemilatticeHom::identity(&c2);
        let diag = sq.pair(&id, &id).unwrap();
        let rx = Retraction::new(diag, sq.left_proj().clone()).unwrap();
        let ry = Retraction::identity(&c2);
        let f = SemilatticeHom::zero_map(&c2, &c2);
        // exhaustive oracle: no hom satisfies both squares as embeddings
        let brute: Vec<_> = enumerate_homs(&rx.cover, &ry.cover)
            .into_iter()
            .filter(|g| g.is_embedding() && check_retraction_squares(&f, g, &rx, &ry).is_ok())
            .collect();
        assert!(brute.is_empty());
        assert_eq!(
            search_retraction_morphism(&f, &rx, &ry, true).unwrap_err(),
            RetractionError::NotFound
        );
    }
}
