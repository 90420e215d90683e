use retrolift_core::corpus::{generate_corpus, CorpusConfig};
use retrolift_core::lift::{replay_identity, ReplayMode, ReplayOptions};
use retrolift_core::semilattice::SemilatticeHom;
use retrolift_core::unfold::{unfold, UnfoldBudget};

#[test]
fn corpus_diagrams_unfold_and_replay() {
    let corpus = generate_corpus(CorpusConfig::new(11, 8));
    let mut multi_node = 0;
    for (i, rd) in corpus.diagrams.iter().enumerate() {
        if rd.nodes() > 1 {
            multi_node += 1;
        }
        for depth in 1..=3 {
            let b = unfold(rd, depth, UnfoldBudget::default()).unwrap();
            let l = b.verify();
            assert!(l.is_clean(), "diagram {i} depth {depth}:\n{l}");
        }
        let b = unfold(rd, 3, UnfoldBudget::default()).unwrap();
        let r = replay_identity(&b, UnfoldBudget::default(), ReplayOptions::default()).unwrap();
        assert_eq!(r.mode, ReplayMode::Stabilized, "diagram {i}");
        assert!(r.certified(), "diagram {i}:\n{}", r.ledger);
    }
    assert!(multi_node > 0);
}

#[test]
fn corrupted_sigma_is_caught() {
    let corpus = generate_corpus(CorpusConfig::new(12, 8));
    for rd in &corpus.diagrams {
        let mut b = unfold(rd, 2, UnfoldBudget::default()).unwrap();
        let sigma = b.sigma(0, 1).clone();
        if sigma.target().size() < 2 {
            continue;
        }
        let mut table = sigma.map().to_vec();
        let last = table.len() - 1;
        table[last] = (table[last] + 1) % sigma.target().size();
        b.replace_sigma(0, 1, SemilatticeHom::new_unchecked(sigma.source().clone(), sigma.target().clone(), table));
        assert!(!b.verify().is_clean());
    }
}

