//! Projectable functors into finite ⟨∨,0⟩-semilattices: the identity on
//! semilattices and `Conc` on finite lattices.

use std::fmt;
use std::sync::{Arc, Mutex};

use super::LiftError;
use crate::catalog::all_lattices;
use crate::congruence::{check_universal_property, con_lattice, conc_hom, conc_projectability_witness, ConcSemilattice, ConcWitness};
use crate::diagram::Morphism;
use crate::lattice::{enumerate_lattice_homs, FiniteLattice, LatticeHom};
use crate::semilattice::{enumerate_homs, projection_complement, FiniteJoinSemilattice, SemilatticeHom};

pub type ObjectOf<F> = <<F as ProjectableFunctor>::Arrow as Morphism>::Object;

/// A functor `F` into finite ⟨∨,0⟩-semilattices together with a procedure
/// producing projectability witnesses `⟨a, ζ⟩` for surjections
/// `φ: F(A) ↠ B`.
pub trait ProjectableFunctor: Sync {
    type Arrow: Morphism;
    type Witness: Clone + fmt::Debug + Send + Sync;

    fn tag(&self) -> &'static str;

    fn object(&self, a: &Arc<ObjectOf<Self>>) -> Result<Arc<FiniteJoinSemilattice>, LiftError>;

    fn arrow(&self, f: &Self::Arrow) -> Result<SemilatticeHom, LiftError>;

    /// `⟨a: A ↠ Ā, ζ: F(Ā) ≅ B⟩` with `φ = ζ ∘ F(a)`.
    fn witness(&self, a: &Arc<ObjectOf<Self>>, phi: &SemilatticeHom) -> Result<Self::Witness, String>;

    fn epi<'w>(&self, w: &'w Self::Witness) -> &'w Self::Arrow;

    fn iso<'w>(&self, w: &'w Self::Witness) -> &'w SemilatticeHom;

    /// The factorization clause against every target with at most
    /// `max_target` elements; `None` when the source exceeds `max_source`.
    /// On success returns the number of arrows checked.
    fn check_universal(&self, w: &Self::Witness, max_source: usize, max_target: usize) -> Option<Result<usize, String>>;

    /// Every arrow between two objects.
    fn homs(&self, source: &Arc<ObjectOf<Self>>, target: &Arc<ObjectOf<Self>>) -> Vec<Self::Arrow>;
}

/// The identity functor on ⟨∨,0⟩-semilattices; a projection `φ` is its
/// own witness epic with `ζ = id`.
#[derive(Clone, Copy, Debug, Default)]
pub struct IdentityFunctor;

impl ProjectableFunctor for IdentityFunctor {
    type Arrow = SemilatticeHom;
    type Witness = (SemilatticeHom, SemilatticeHom);

    fn tag(&self) -> &'static str {
        "id"
    }

    fn object(&self, a: &Arc<FiniteJoinSemilattice>) -> Result<Arc<FiniteJoinSemilattice>, LiftError> {
        Ok(a.clone())
    }

    fn arrow(&self, f: &SemilatticeHom) -> Result<SemilatticeHom, LiftError> {
        Ok(f.clone())
    }

    fn witness(&self, _a: &Arc<FiniteJoinSemilattice>, phi: &SemilatticeHom) -> Result<Self::Witness, String> {
        if projection_complement(phi).is_none() {
            return Err(LiftError::NotAProjection.to_string());
        }
        Ok((phi.clone(), SemilatticeHom::identity(phi.target())))
    }

    fn epi<'w>(&self, w: &'w Self::Witness) -> &'w SemilatticeHom {
        &w.0
    }

    fn iso<'w>(&self, w: &'w Self::Witness) -> &'w SemilatticeHom {
        &w.1
    }

    fn check_universal(&self, w: &Self::Witness, max_source: usize, max_target: usize) -> Option<Result<usize, String>> {
        let a = &w.0;
        if a.source().size() > max_source {
            return None;
        }
        let quotient = a.target();
        let mut checked = 0;
        for target in super::small_targets(max_target) {
            for f in enumerate_homs(a.source(), &target) {
                // η with F(f) = η∘F(a) is forced on the fibres of a
                let mut eta = vec![usize::MAX; quotient.size()];
                let consistent = (0..a.source().size()).all(|x| {
                    let slot = &mut eta[a.apply(x)];
                    if *slot == usize::MAX {
                        *slot = f.apply(x);
                    }
                    *slot == f.apply(x)
                });
                if !consistent || eta.contains(&usize::MAX) {
                    continue;
                }
                let Ok(eta) = SemilatticeHom::new(quotient.clone(), target.clone(), eta) else {
                    continue;
                };
                checked += 1;
                let g = eta.clone();
                if g.compose_unchecked(a).map() != f.map() {
                    return Some(Err(format!("f = {:?} does not factor through a", f.map())));
                }
            }
        }
        Some(Ok(checked))
    }

    fn homs(&self, source: &Arc<FiniteJoinSemilattice>, target: &Arc<FiniteJoinSemilattice>) -> Vec<SemilatticeHom> {
        enumerate_homs(source, target)
    }
}

/// `Conc` on finite lattices, with congruence semilattices cached per
/// lattice.
#[derive(Default)]
pub struct ConcFunctor {
    cache: Mutex<Vec<(Arc<FiniteLattice>, Arc<ConcSemilattice>)>>,
}

impl fmt::Debug for ConcFunctor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("ConcFunctor")
    }
}

impl ConcFunctor {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn conc(&self, l: &Arc<FiniteLattice>) -> Result<Arc<ConcSemilattice>, LiftError> {
        let mut cache = self.cache.lock().expect("cache lock");
        if let Some((_, c)) = cache.iter().find(|(k, _)| Arc::ptr_eq(k, l)) {
            return Ok(c.clone());
        }
        if let Some((_, c)) = cache.iter().find(|(k, _)| k.as_ref() == l.as_ref()) {
            let c = c.clone();
            cache.push((l.clone(), c.clone()));
            return Ok(c);
        }
        let c = Arc::new(con_lattice(l).map_err(|e| LiftError::Functor(e.to_string()))?);
        cache.push((l.clone(), c.clone()));
        Ok(c)
    }
}

impl ProjectableFunctor for ConcFunctor {
    type Arrow = LatticeHom;
    type Witness = ConcWitness;

    fn tag(&self) -> &'static str {
        "conc"
    }

    fn object(&self, a: &Arc<FiniteLattice>) -> Result<Arc<FiniteJoinSemilattice>, LiftError> {
        Ok(self.conc(a)?.semilattice().clone())
    }

    fn arrow(&self, f: &LatticeHom) -> Result<SemilatticeHom, LiftError> {
        let s = self.conc(f.source())?;
        let t = self.conc(f.target())?;
        conc_hom(f, &s, &t).map_err(|e| LiftError::Functor(e.to_string()))
    }

    fn witness(&self, a: &Arc<FiniteLattice>, phi: &SemilatticeHom) -> Result<ConcWitness, String> {
        let conc = self.conc(a).map_err(|e| e.to_string())?;
        let w = conc_projectability_witness(&conc, phi).map_err(|e| e.to_string())?;
        self.cache
            .lock()
            .expect("cache lock")
            .push((w.quotient.clone(), Arc::new(w.quotient_conc.clone())));
        Ok(w)
    }

    fn epi<'w>(&self, w: &'w ConcWitness) -> &'w LatticeHom {
        &w.projection
    }

    fn iso<'w>(&self, w: &'w ConcWitness) -> &'w SemilatticeHom {
        &w.eps
    }

    fn check_universal(&self, w: &ConcWitness, max_source: usize, max_target: usize) -> Option<Result<usize, String>> {
        if w.projection.source().size() > max_source {
            return None;
        }
        let mut checked = 0;
        for n in 1..=max_target {
            for target in all_lattices(n) {
                match check_universal_property(w, &Arc::new(target)) {
                    Ok(c) => checked += c.homs,
                    Err(e) => return Some(Err(e.to_string())),
                }
            }
        }
        Some(Ok(checked))
    }

    fn homs(&self, source: &Arc<FiniteLattice>, target: &Arc<FiniteLattice>) -> Vec<LatticeHom> {
        enumerate_lattice_homs(source, target, usize::MAX)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semilattice::product;

    #[test]
    fn identity_witness_of_a_left_projection() {
        let c2 = Arc::new(FiniteJoinSemilattice::chain(2));
        let p = product(&c2, &c2);
        let phi = p.left_proj().clone();
        let w = IdentityFunctor.witness(p.product(), &phi).unwrap();
        assert_eq!(w.0, phi);
        assert!(w.1.is_isomorphism());
        let checked = IdentityFunctor.check_universal(&w, 16, 4).unwrap().unwrap();
        assert!(checked > 0);
    }

    #[test]
    fn identity_witness_of_an_identity() {
        let c3 = Arc::new(FiniteJoinSemilattice::chain(3));
        let id = SemilatticeHom::identity(&c3);
        let w = IdentityFunctor.witness(&c3, &id).unwrap();
        assert_eq!(w.0.map(), &[0, 1, 2]);
        assert_eq!(w.1.map(), &[0, 1, 2]);
    }

    #[test]
    fn identity_witness_refuses_non_projections() {
        let c3 = Arc::new(FiniteJoinSemilattice::chain(3));
        let c2 = Arc::new(FiniteJoinSemilattice::chain(2));
        let phi = SemilatticeHom::new(c3.clone(), c2, vec![0, 1, 1]).unwrap();
        assert!(IdentityFunctor.witness(&c3, &phi).is_err());
    }

    #[test]
    fn conc_functor_caches_and_preserves_identities() {
        let f = ConcFunctor::new();
        let c3 = Arc::new(FiniteLattice::chain(3));
        let a = f.object(&c3).unwrap();
        let b = f.object(&Arc::new(FiniteLattice::chain(3))).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
        let id = f.arrow(&LatticeHom::identity(&c3)).unwrap();
        assert_eq!(id.map(), &[0, 1, 2, 3]);
    }
}
