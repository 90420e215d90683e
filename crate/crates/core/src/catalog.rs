//! Small named lattices and an up-to-isomorphism enumeration of all lattices
//! of a given size.

use std::collections::BTreeSet;

use crate::lattice::FiniteLattice;
use crate::semilattice::FiniteJoinSemilattice;

/// 0 < a, b, c < 1 with a, b, c pairwise incomparable.
pub fn m3() -> FiniteLattice {
    FiniteLattice::from_order(5, |x, y| x == y || x == 0 || y == 4).expect("M3 is a lattice")
}

/// 0 < a < b < 1 and 0 < c < 1, with c incomparable to a and b.
/// Indices: 0, a=1, b=2, c=3, 1=4.
pub fn n5() -> FiniteLattice {
    FiniteLattice::from_order(5, |x, y| x == y || x == 0 || y == 4 || (x, y) == (1, 2))
        .expect("N5 is a lattice")
}

/// The Boolean lattice with `2^k` elements (bitmask indices).
pub fn boolean(k: usize) -> FiniteLattice {
    FiniteLattice::from_semilattice(&FiniteJoinSemilattice::powerset(k))
}

/// `L` with a new bottom (index 0) added below it.
pub fn with_new_bottom(l: &FiniteLattice) -> FiniteLattice {
    let n = l.size() + 1;
    FiniteLattice::from_order(n, |x, y| x == 0 || (x > 0 && y > 0 && l.leq(x - 1, y - 1)))
        .expect("adding a bottom keeps a lattice")
}

/// `L` with a new top (last index) added above it.
pub fn with_new_top(l: &FiniteLattice) -> FiniteLattice {
    let n = l.size() + 1;
    FiniteLattice::from_order(n, |x, y| y == n - 1 || (x < n - 1 && y < n - 1 && l.leq(x, y)))
        .expect("adding a top keeps a lattice")
}

/// One representative per isomorphism class of lattices with `n` elements,
/// in a fixed order. Practical for `n ≤ 7`.
///
/// Bottom is 0, top is `n - 1`, and the middle elements are labelled along a
/// linear extension, so only relations `i < j` between middle elements need
/// enumerating.
pub fn all_lattices(n: usize) -> Vec<FiniteLattice> {
    assert!(n >= 1, "lattices are nonempty");
    if n <= 2 {
        return vec![FiniteLattice::chain(n)];
    }
    let m = n - 2;
    let pairs: Vec<(usize, usize)> = (0..m)
        .flat_map(|i| ((i + 1)..m).map(move |j| (i, j)))
        .collect();
    let perms = permutations(m);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << pairs.len()) {
        let mut rel = vec![false; m * m];
        for i in 0..m {
            rel[i * m + i] = true;
        }
        for (bit, &(i, j)) in pairs.iter().enumerate() {
            if mask & (1 << bit) != 0 {
                rel[i * m + j] = true;
            }
        }
        let transitive = (0..m).all(|i| {
            (0..m).all(|j| (0..m).all(|k| !(rel[i * m + j] && rel[j * m + k]) || rel[i * m + k]))
        });
        if !transitive {
            continue;
        }
        let canonical = perms
            .iter()
            .map(|p| {
                let mut code = vec![false; m * m];
                for i in 0..m {
                    for j in 0..m {
                        code[p[i] * m + p[j]] = rel[i * m + j];
                    }
                }
                code
            })
            .min()
            .unwrap_or_default();
        if seen.contains(&canonical) {
            continue;
        }
        let leq = |x: usize, y: usize| {
            x == y || x == 0 || y == n - 1 || (x > 0 && y > 0 && x < n - 1 && y < n - 1 && rel[(x - 1) * m + (y - 1)])
        };
        if let Ok(l) = FiniteLattice::from_order(n, leq) {
            seen.insert(canonical);
            out.push(l);
        }
    }
    out
}

fn permutations(m: usize) -> Vec<Vec<usize>> {
    if m == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(m - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, m - 1);
            out.push(q);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_counts_match_known_sequence() {
        // 1, 1, 1, 2, 5, 15, 53 (OEIS A006966)
        let counts: Vec<usize> = (1..=7).map(|n| all_lattices(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 1, 2, 5, 15, 53]);
    }

    #[test]
    fn m3_and_n5_are_not_distributive() {
        assert!(!m3().semilattice().is_distributive());
        assert!(!n5().semilattice().is_distributive());
        assert!(boolean(2).semilattice().is_boolean());
    }

    #[test]
    fn ordinal_sums() {
        let l = with_new_top(&n5());
        assert_eq!(l.size(), 6);
        assert_eq!(l.top(), 5);
        let l = with_new_bottom(&m3());
        assert_eq!(l.bottom(), 0);
    }
}
