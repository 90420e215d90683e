//! Colimits of constant chains `B →ρ B →ρ ⋯` for an idempotent `ρ`.

use std::sync::Arc;

use super::LiftError;
use crate::catalog::all_lattices;
use crate::diagram::Morphism;
use crate::semilattice::{enumerate_homs, same_semilattice, FiniteJoinSemilattice, SemilatticeHom};

/// `A = ρ(B)` with the constant limiting map `μ: B ↠ A`.
#[derive(Clone, Debug)]
pub struct IdempotentColimit {
    pub object: Arc<FiniteJoinSemilattice>,
    pub limit: SemilatticeHom,
    pub inclusion: SemilatticeHom,
}

pub fn idempotent_chain_colimit(rho: &SemilatticeHom) -> Result<IdempotentColimit, LiftError> {
    if !same_semilattice(rho.source(), rho.target()) {
        return Err(LiftError::Construction("ρ is not an endomorphism".into()));
    }
    if let Some(x) = (0..rho.source().size()).find(|&x| rho.apply(rho.apply(x)) != rho.apply(x)) {
        return Err(LiftError::NotIdempotent(x));
    }
    let (object, limit, inclusion) = rho.image();
    Ok(IdempotentColimit {
        object,
        limit,
        inclusion,
    })
}

/// One representative of each ⟨∨,0⟩-semilattice with at most `max_size`
/// elements.
pub fn small_targets(max_size: usize) -> Vec<Arc<FiniteJoinSemilattice>> {
    (1..=max_size)
        .flat_map(all_lattices)
        .map(|l| Arc::new(l.semilattice()))
        .collect()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CoconeCheck {
    pub targets: usize,
    pub cocones: usize,
}

/// Checks that `μ` is a cocone and that every cocone `φ = φ∘ρ` into each
/// target factors as `ψ∘μ` for exactly one `ψ`.
pub fn verify_colimit_universal(
    rho: &SemilatticeHom,
    colimit: &IdempotentColimit,
    targets: &[Arc<FiniteJoinSemilattice>],
) -> Result<CoconeCheck, String> {
    let b = rho.source();
    let mu = &colimit.limit;
    if mu.compose_unchecked(rho).map() != mu.map() {
        return Err("μ∘ρ ≠ μ".into());
    }
    let mut check = CoconeCheck::default();
    for t in targets {
        check.targets += 1;
        let factors = enumerate_homs(&colimit.object, t);
        for phi in enumerate_homs(b, t) {
            if phi.compose_unchecked(rho).map() != phi.map() {
                continue;
            }
            check.cocones += 1;
            let count = factors
                .iter()
                .filter(|psi| psi.compose_unchecked(mu).map() == phi.map())
                .count();
            if count != 1 {
                return Err(format!(
                    "cocone {:?} into a {}-element target has {count} factorizations",
                    phi.map(),
                    t.size()
                ));
            }
        }
    }
    Ok(check)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_gives_the_whole_object() {
        let b = Arc::new(FiniteJoinSemilattice::powerset(2));
        let c = idempotent_chain_colimit(&SemilatticeHom::identity(&b)).unwrap();
        assert_eq!(c.object.size(), 4);
        assert!(c.limit.is_isomorphism());
    }

    #[test]
    fn three_chain_retract() {
        let b = Arc::new(FiniteJoinSemilattice::chain(3));
        let rho = SemilatticeHom::new(b.clone(), b.clone(), vec![0, 2, 2]).unwrap();
        let c = idempotent_chain_colimit(&rho).unwrap();
        assert_eq!(c.object.size(), 2);
        assert_eq!(c.limit.map(), &[0, 1, 1]);
        let check = verify_colimit_universal(&rho, &c, &small_targets(4)).unwrap();
        assert_eq!(check.targets, 5);
        // cocones into C_k from C3 constant on {1, 2}: one per element of C_k
        // in each chain, plus 4 into the square
        assert_eq!(check.cocones, 1 + 2 + 3 + 4 + 4);
    }

    #[test]
    fn non_idempotent_is_refused() {
        let b = Arc::new(FiniteJoinSemilattice::chain(3));
        let rho = SemilatticeHom::new(b.clone(), b, vec![0, 2, 2]).unwrap();
        let shifted = SemilatticeHom::new(rho.source().clone(), rho.source().clone(), vec![0, 1, 1]).unwrap();
        assert!(idempotent_chain_colimit(&shifted).is_ok());
        let c4 = Arc::new(FiniteJoinSemilattice::chain(4));
        let up = SemilatticeHom::new(c4.clone(), c4, vec![0, 2, 3, 3]).unwrap();
        assert_eq!(idempotent_chain_colimit(&up).unwrap_err(), LiftError::NotIdempotent(1));
    }

    #[test]
    fn small_target_count() {
        let sizes: Vec<usize> = small_targets(4).iter().map(|t| t.size()).collect();
        assert_eq!(sizes, vec![1, 2, 3, 4, 4]);
    }
}
