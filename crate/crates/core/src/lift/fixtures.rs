//! Ready-made `Conc` liftings of unfoldings over chains of identical nodes,
//! built from powers `Cⁿ` of a small lattice `C` with `Conc C ≅ D̂`.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::functor::{ConcFunctor, ProjectableFunctor};
use super::LiftError;
use crate::diagram::{
    promote_to_retracted, BooleanProvider, IndexPoset, LatticeDiagram, PosetDiagram, ProductProvider,
    RetractedDiagram, RetractionProvider, SemilatticeDiagram,
};
use crate::lattice::{lattice_product, FiniteLattice, LatticeHom};
use crate::semilattice::{find_isomorphism, FiniteJoinSemilattice, SemilatticeHom};
use crate::unfold::{unfold, UnfoldBudget};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConcTower {
    /// `D = 2²` with `ρ = id`, lifted by `C = 3`; the chain is stable from
    /// the first level.
    Stable,
    /// `D = 1` with `D̂ = 2` and `ρ = 0`, lifted by `C = 2` with
    /// `sⁿ(v) = (0, v)`; the chain collapses to a point at level 2.
    Collapsing,
}

/// A lifting `E` of the unfolding along `Conc`, with `η` tables indexed
/// `[node][level − 1]`.
#[derive(Clone, Debug)]
pub struct ConcLiftPackage {
    pub lift: LatticeDiagram,
    pub eta: Vec<Vec<Vec<usize>>>,
}

/// Builds the retracted diagram over a chain of `nodes` equal objects with
/// identity arrows, and its `Conc` lifting to the given depth.
pub fn conc_tower_fixture(
    functor: &ConcFunctor,
    kind: ConcTower,
    nodes: usize,
    depth: usize,
) -> Result<(RetractedDiagram, ConcLiftPackage), LiftError> {
    if nodes == 0 {
        return Err(LiftError::Construction("at least one node is needed".into()));
    }
    let (d, provider, c, collapse): (_, Box<dyn RetractionProvider>, _, bool) = match kind {
        ConcTower::Stable => (
            FiniteJoinSemilattice::powerset(2),
            Box::new(BooleanProvider::default()),
            FiniteLattice::chain(3),
            false,
        ),
        ConcTower::Collapsing => (
            FiniteJoinSemilattice::chain(1),
            Box::new(ProductProvider {
                factor: Arc::new(FiniteJoinSemilattice::chain(2)),
            }),
            FiniteLattice::chain(2),
            true,
        ),
    };
    let d = Arc::new(d);
    let index = Arc::new(IndexPoset::chain(nodes));
    let base_edges = index
        .covers()
        .iter()
        .map(|&e| (e, SemilatticeHom::identity(&d)))
        .collect();
    let base: SemilatticeDiagram = PosetDiagram::new(index.clone(), vec![d.clone(); nodes], base_edges)
        .map_err(|e| LiftError::Construction(e.to_string()))?;
    let rd = promote_to_retracted(&base, provider.as_ref()).map_err(|e| LiftError::Construction(e.to_string()))?;
    let bundle = unfold(&rd, depth, UnfoldBudget::default())?;

    // Pⁿ = C × Pⁿ⁻¹
    let c = Arc::new(c);
    let mut powers = vec![c.clone()];
    for _ in 1..depth {
        let prev = powers.last().expect("nonempty");
        powers.push(Arc::new(lattice_product(&c, prev)));
    }
    let first = |n: usize, v: usize| if n == 1 { v } else { v / powers[n - 2].size() };
    let mut chain_steps = Vec::new();
    for n in 1..depth {
        let size = powers[n - 1].size();
        let map = (0..size)
            .map(|v| if collapse { v } else { first(n, v) * size + v })
            .collect();
        chain_steps.push(
            LatticeHom::new(powers[n - 1].clone(), powers[n].clone(), map)
                .map_err(|e| LiftError::Construction(format!("chain step {n}: {e}")))?,
        );
    }

    let lift_index = Arc::new(index.times_chain(depth));
    let objects = (0..nodes).flat_map(|_| powers.iter().cloned()).collect();
    let mut edges = BTreeMap::new();
    for &(p, q) in lift_index.covers() {
        let arrow = if p / depth == q / depth {
            chain_steps[p % depth].clone()
        } else {
            LatticeHom::identity(&powers[p % depth])
        };
        edges.insert((p, q), arrow);
    }
    let lift = PosetDiagram::new(lift_index, objects, edges).map_err(|e| LiftError::Construction(e.to_string()))?;

    // η¹ is any iso Conc C ≅ D̂; ηⁿ(θ) = (η¹(Conc p_l θ), ηⁿ⁻¹(Conc p_r θ))
    let conc_c = functor.conc(&c)?;
    let hat = bundle.power(0, 1);
    let eta1 = find_isomorphism(conc_c.semilattice(), hat)
        .ok_or_else(|| LiftError::Construction(format!("Conc C has {} elements, D̂ has {}", conc_c.size(), hat.size())))?;
    let mut eta = vec![eta1.map().to_vec()];
    for n in 2..=depth {
        let p = &powers[n - 1];
        let rest = powers[n - 2].size();
        let left = LatticeHom::new(p.clone(), c.clone(), (0..p.size()).map(|v| v / rest).collect())
            .map_err(|e| LiftError::Construction(e.to_string()))?;
        let right = LatticeHom::new(p.clone(), powers[n - 2].clone(), (0..p.size()).map(|v| v % rest).collect())
            .map_err(|e| LiftError::Construction(e.to_string()))?;
        let (cl, cr) = (functor.arrow(&left)?, functor.arrow(&right)?);
        let dec = bundle
            .decomposition(0, n)
            .ok_or_else(|| LiftError::Construction(format!("no product decomposition at level {n}")))?;
        let table = (0..cl.source().size())
            .map(|t| dec.encode(eta1.apply(cl.apply(t)), eta[n - 2][cr.apply(t)]))
            .collect();
        eta.push(table);
    }
    let package = ConcLiftPackage {
        lift,
        eta: vec![eta; nodes],
    };
    Ok((rd, package))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lift::{replay, LiftedUnfolding, ReplayMode, ReplayOptions};

    #[test]
    fn stable_tower_is_certified() {
        let f = ConcFunctor::new();
        let (rd, pkg) = conc_tower_fixture(&f, ConcTower::Stable, 1, 2).unwrap();
        assert_eq!(rd.derived_rho(0).map(), &[0, 1, 2, 3]);
        let bundle = unfold(&rd, 2, UnfoldBudget::default()).unwrap();
        let lifted = LiftedUnfolding::new(&f, bundle, pkg.lift, pkg.eta).unwrap();
        let r = replay(&f, &lifted, ReplayOptions::default()).unwrap();
        assert!(r.certified(), "{}", r.ledger);
        assert_eq!(r.stable_from, vec![Some(1)]);
        assert_eq!(r.r_object(0).size(), 3);
    }

    #[test]
    fn collapsing_tower_stabilizes_at_level_two() {
        let f = ConcFunctor::new();
        let (rd, pkg) = conc_tower_fixture(&f, ConcTower::Collapsing, 2, 3).unwrap();
        assert_eq!(rd.derived_rho(0).map(), &[0, 0]);
        let bundle = unfold(&rd, 3, UnfoldBudget::default()).unwrap();
        let lifted = LiftedUnfolding::new(&f, bundle, pkg.lift, pkg.eta).unwrap();
        let r = replay(&f, &lifted, ReplayOptions::default()).unwrap();
        assert!(r.certified(), "{}", r.ledger);
        assert_eq!(r.stable_from, vec![Some(2), Some(2)]);
        assert_eq!(r.r_object(0).size(), 1);
    }

    #[test]
    fn collapsing_tower_at_depth_two_is_depth_relative() {
        let f = ConcFunctor::new();
        let (rd, pkg) = conc_tower_fixture(&f, ConcTower::Collapsing, 1, 2).unwrap();
        let bundle = unfold(&rd, 2, UnfoldBudget::default()).unwrap();
        let lifted = LiftedUnfolding::new(&f, bundle, pkg.lift, pkg.eta).unwrap();
        let r = replay(&f, &lifted, ReplayOptions::default()).unwrap();
        assert_eq!(r.mode, ReplayMode::DepthRelative);
        assert!(!r.certified());
        assert_eq!(r.leg_levels(), 2);
    }

    #[test]
    fn non_iso_eta_is_rejected() {
        let f = ConcFunctor::new();
        let (rd, mut pkg) = conc_tower_fixture(&f, ConcTower::Stable, 1, 2).unwrap();
        pkg.eta[0][0] = vec![0; 4];
        let bundle = unfold(&rd, 2, UnfoldBudget::default()).unwrap();
        let err = LiftedUnfolding::new(&f, bundle, pkg.lift, pkg.eta).unwrap_err();
        assert!(matches!(err, LiftError::LiftPackageInvalid(_)), "{err}");
    }
}
