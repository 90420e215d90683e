use std::collections::BTreeSet;
use std::sync::Arc;

use proptest::prelude::*;

use retrolift_core::congruence::con_lattice;
use retrolift_core::diagram::Morphism;
use retrolift_core::lattice::FiniteLattice;
use retrolift_core::ledger::VerificationLedger;
use retrolift_core::monoid::{quotient_by_ideal, semilattice_as_monoid};
use retrolift_core::retraction::boolean_retraction;
use retrolift_core::semilattice::{product, FiniteJoinSemilattice};

/// Closes a family of bit masks under union (and intersection when asked),
/// always including the empty set.
fn close(seeds: &[u8], meets: bool) -> Vec<u8> {
    let mut family: BTreeSet<u8> = seeds.iter().copied().collect();
    family.insert(0);
    loop {
        let current: Vec<u8> = family.iter().copied().collect();
        let before = family.len();
        for &a in &current {
            for &b in &current {
                family.insert(a | b);
                if meets {
                    family.insert(a & b);
                }
            }
        }
        if family.len() == before {
            return current;
        }
    }
}

fn set_semilattice(family: &[u8]) -> FiniteJoinSemilattice {
    let index = |m: u8| family.iter().position(|&x| x == m).unwrap();
    let rows = family.iter().map(|&a| family.iter().map(|&b| index(a | b)).collect()).collect();
    FiniteJoinSemilattice::new(rows, index(0), None).unwrap()
}

fn seeds(bits: u32, max: usize) -> impl Strategy<Value = Vec<u8>> {
    proptest::collection::vec(0u8..(1 << bits), 0..max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn union_closed_families_are_semilattices(s in seeds(4, 6)) {
        let family = close(&s, false);
        let l = set_semilattice(&family);
        for a in 0..l.size() {
            for b in 0..l.size() {
                prop_assert_eq!(l.leq(a, b), family[a] & !family[b] == 0);
            }
        }
    }

    #[test]
    fn product_projections_recover_components(a in seeds(3, 4), b in seeds(3, 4)) {
        let (left, right) = (Arc::new(set_semilattice(&close(&a, false))), Arc::new(set_semilattice(&close(&b, false))));
        let p = product(&left, &right);
        prop_assert_eq!(p.product().size(), left.size() * right.size());
        for l in 0..left.size() {
            for r in 0..right.size() {
                let x = p.encode(l, r);
                prop_assert_eq!(p.decode(x), (l, r));
                prop_assert_eq!(p.left_proj().apply(x), l);
                prop_assert_eq!(p.right_proj().apply(x), r);
            }
        }
        prop_assert!(p.left_proj().check_laws().is_ok());
        prop_assert!(p.right_proj().check_laws().is_ok());
    }

    #[test]
    fn distributive_families_have_boolean_retractions(s in seeds(4, 5)) {
        let d = Arc::new(set_semilattice(&close(&s, true)));
        prop_assert!(d.is_distributive());
        prop_assert!(semilattice_as_monoid(&d).is_refinement());
        let r = boolean_retraction(&d).unwrap();
        prop_assert!(r.cover.is_boolean());
        prop_assert!(r.eps.is_embedding());
        for x in 0..d.size() {
            prop_assert_eq!(r.mu.apply(r.eps.apply(x)), x);
        }
    }

    #[test]
    fn distributive_lattice_congruences_count_join_irreducibles(s in seeds(3, 5)) {
        let family = close(&s, true);
        let l = FiniteLattice::from_order(family.len(), |a, b| family[a] & !family[b] == 0).unwrap();
        let irreducible = (0..l.size())
            .filter(|&x| {
                x != l.bottom()
                    && (0..l.size()).all(|a| (0..l.size()).all(|b| a == x || b == x || l.join(a, b) != x))
            })
            .count();
        let conc = con_lattice(&Arc::new(l)).unwrap();
        prop_assert_eq!(conc.size(), 1 << irreducible);
        prop_assert!(conc.semilattice().is_boolean());
    }

    #[test]
    fn ideal_quotients_are_surjective_and_ideal_induced(s in seeds(4, 5), pick in 0usize..64) {
        let m = Arc::new(semilattice_as_monoid(&set_semilattice(&close(&s, false))));
        let ideals = m.o_ideals();
        let ideal = &ideals[pick % ideals.len()];
        let (q, p) = quotient_by_ideal(&m, ideal).unwrap();
        prop_assert!(p.is_surjective());
        prop_assert!(p.is_ideal_induced());
        for x in 0..m.size() {
            prop_assert_eq!(p.map()[x] == q.zero(), ideal.contains(x));
        }
    }

    #[test]
    fn ledger_counts_and_json_round_trip(results in proptest::collection::vec(0u8..3, 0..20)) {
        let mut l = VerificationLedger::new();
        for (i, r) in results.iter().enumerate() {
            let at = format!("x={i}");
            match r {
                0 => l.record("row", at, Ok(())),
                1 => l.record("row", at, Err(format!("witness {i}"))),
                _ => l.skip("row", at, "not applicable"),
            }
        }
        let c = l.counts();
        prop_assert_eq!(c.pass + c.fail + c.skipped, results.len());
        prop_assert_eq!(l.is_clean(), c.fail == 0);
        let back: VerificationLedger = serde_json::from_str(&l.to_json()).unwrap();
        prop_assert_eq!(back, l);
    }
}
